//! Support graphs of kernels and edge functions.
//!
//! States are indexed `0..m` in memory. File formats and coordinate labels
//! use `1..=m`; the conversion happens in [`crate::io`].

use std::collections::VecDeque;
use std::fmt;

use crate::error::{Error, Result};

/// A set of directed edges over `m` states, stored as a dense adjacency mask.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct EdgeSet {
    size: usize,
    mask: Vec<bool>,
}

impl fmt::Debug for EdgeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EdgeSet")
            .field("size", &self.size)
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}

impl EdgeSet {
    pub fn empty(size: usize) -> Self {
        Self {
            size,
            mask: vec![false; size * size],
        }
    }

    /// The complete graph `[m]²`, self-loops included.
    pub fn full(size: usize) -> Self {
        Self {
            size,
            mask: vec![true; size * size],
        }
    }

    pub fn from_edges<I>(size: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut set = Self::empty(size);
        for (x, y) in edges {
            if x >= size || y >= size {
                return Err(Error::SupportMismatch(format!(
                    "edge ({x}, {y}) out of range for {size} states"
                )));
            }
            set.insert(x, y);
        }
        Ok(set)
    }

    /// Edges where `pred(x, y)` holds.
    pub fn from_fn(size: usize, mut pred: impl FnMut(usize, usize) -> bool) -> Self {
        let mut set = Self::empty(size);
        for x in 0..size {
            for y in 0..size {
                if pred(x, y) {
                    set.insert(x, y);
                }
            }
        }
        set
    }

    /// Birth-and-death support `{(i, j) : |i - j| <= 1}`.
    pub fn birth_death(size: usize) -> Self {
        Self::from_fn(size, |x, y| x.abs_diff(y) <= 1)
    }

    /// Lazy cycle support: self-loops plus both neighbours on the ring.
    pub fn lazy_cycle(size: usize) -> Self {
        Self::from_fn(size, |x, y| {
            x == y || (x + 1) % size == y || (y + 1) % size == x
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn len(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.mask[x * self.size + y]
    }

    pub fn insert(&mut self, x: usize, y: usize) {
        self.mask[x * self.size + y] = true;
    }

    /// Edges in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.size)
            .flat_map(move |x| (0..self.size).map(move |y| (x, y)))
            .filter(move |&(x, y)| self.contains(x, y))
    }

    pub fn successors(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.size).filter(move |&y| self.contains(x, y))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.size, |x, y| self.contains(y, x))
    }

    pub fn union(&self, other: &Self) -> Self {
        assert_eq!(self.size, other.size);
        Self::from_fn(self.size, |x, y| self.contains(x, y) || other.contains(x, y))
    }

    pub fn intersection(&self, other: &Self) -> Self {
        assert_eq!(self.size, other.size);
        Self::from_fn(self.size, |x, y| self.contains(x, y) && other.contains(x, y))
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.size == other.size && self.edges().all(|(x, y)| other.contains(x, y))
    }

    pub fn is_symmetric(&self) -> bool {
        self.edges().all(|(x, y)| self.contains(y, x))
    }

    pub fn is_full(&self) -> bool {
        self.mask.iter().all(|&b| b)
    }

    /// True iff every state reaches every other state.
    pub fn is_strongly_connected(&self) -> bool {
        strong_connectivity(self)
    }

    /// Self-loops `T0(E)`.
    pub fn t0(&self) -> Vec<(usize, usize)> {
        self.edges().filter(|&(x, y)| x == y).collect()
    }

    /// Strictly lower edges `T+(E) = {(x, x') : x' < x}`.
    pub fn t_plus(&self) -> Vec<(usize, usize)> {
        self.edges().filter(|&(x, y)| y < x).collect()
    }

    /// Strictly upper edges `T-(E) = {(x, x') : x' > x}`.
    pub fn t_minus(&self) -> Vec<(usize, usize)> {
        self.edges().filter(|&(x, y)| y > x).collect()
    }

    /// Smallest state adjacent to the last state.
    pub fn x_star(&self) -> Option<usize> {
        let last = self.size.checked_sub(1)?;
        self.successors(last).next()
    }

    /// The excluded pair `(m, x_star)` of the reversible chart.
    pub fn excluded_pair(&self) -> Result<(usize, usize)> {
        let last = self.size.checked_sub(1).ok_or(Error::InvalidSize(0))?;
        let star = self.x_star().ok_or(Error::NotIrreducible)?;
        Ok((last, star))
    }

    /// Chart index set `T(E)`: lower-triangular edges (diagonal included)
    /// minus `(m, x_star)`, in lexicographic order.
    pub fn chart_index(&self) -> Result<Vec<(usize, usize)>> {
        if !self.is_symmetric() {
            return Err(Error::AsymmetricSupport);
        }
        let excluded = self.excluded_pair()?;
        Ok(self
            .edges()
            .filter(|&(x, y)| y <= x && (x, y) != excluded)
            .collect())
    }
}

/// Single-SCC test by forward and backward reachability from state 0.
pub fn strong_connectivity(edges: &EdgeSet) -> bool {
    let m = edges.size();
    if m == 0 {
        return false;
    }
    let reach = |forward: bool| {
        let mut seen = vec![false; m];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(x) = queue.pop_front() {
            for y in 0..m {
                let edge = if forward {
                    edges.contains(x, y)
                } else {
                    edges.contains(y, x)
                };
                if edge && !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    reach(true) && reach(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn directed_cycle_is_connected() {
        let e = EdgeSet::from_edges(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        assert!(strong_connectivity(&e));
    }

    #[test]
    fn isolated_state_is_not_connected() {
        let e = EdgeSet::from_edges(3, [(0, 1), (1, 0), (2, 2)]).unwrap();
        assert!(!strong_connectivity(&e));
    }

    #[test]
    fn complete_graph_is_connected() {
        for m in 1..6 {
            assert!(EdgeSet::full(m).is_strongly_connected());
        }
    }

    #[test]
    fn one_way_path_is_not_connected() {
        let e = EdgeSet::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        assert!(!e.is_strongly_connected());
    }

    #[test]
    fn chart_index_full_two_states() {
        let t = EdgeSet::full(2).chart_index().unwrap();
        assert_eq!(t, vec![(0, 0), (1, 1)]);
    }

    #[test]
    fn chart_index_cardinality() {
        for m in 2..7 {
            for e in [EdgeSet::full(m), EdgeSet::birth_death(m), EdgeSet::lazy_cycle(m)] {
                let t = e.chart_index().unwrap();
                assert_eq!(t.len(), (e.len() + e.t0().len()) / 2 - 1);
                assert_eq!(t.len(), e.t_plus().len() + e.t0().len() - 1);
                assert_eq!(e.t_plus().len(), e.t_minus().len());
            }
        }
    }

    #[test]
    fn x_star_is_smallest_neighbour_of_last() {
        let e = EdgeSet::birth_death(4);
        assert_eq!(e.x_star(), Some(2));
        assert_eq!(EdgeSet::lazy_cycle(5).x_star(), Some(0));
    }

    #[test]
    fn asymmetric_support_has_no_chart() {
        let e = EdgeSet::from_edges(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!(e.chart_index(), Err(Error::AsymmetricSupport));
    }
}
