//! JSON reading and writing of kernels, edge measures and coordinates.
//!
//! Files look like `{"size": m, "matrix": [[...], ...], "support": [[x, x'], ...]}`
//! with `support` optional and 1-based. Numbers are written with 17
//! significant digits.

use std::io;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::geometry::ChartCoords;
use crate::kernel::{
    EdgeMeasure, Kernel, ZERO_THRESHOLD, validate_kernel, validate_kernel_with_support,
};
use crate::support::EdgeSet;

#[derive(Debug, Clone, Serialize, Deserialize)]
struct MatrixFile {
    size: usize,
    matrix: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    support: Option<Vec<[usize; 2]>>,
}

impl MatrixFile {
    fn parse(text: &str) -> Result<Self> {
        let file: MatrixFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if file.matrix.len() != file.size || file.matrix.iter().any(|r| r.len() != file.size) {
            return Err(Error::Parse(format!(
                "\"matrix\" is not {0}x{0}",
                file.size
            )));
        }
        Ok(file)
    }

    fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.size, self.size, |x, y| self.matrix[x][y])
    }

    fn support(&self) -> Result<Option<EdgeSet>> {
        let Some(edges) = &self.support else {
            return Ok(None);
        };
        let m = self.size;
        let mut zero_based = Vec::with_capacity(edges.len());
        for &[x, y] in edges {
            if x == 0 || y == 0 || x > m || y > m {
                return Err(Error::Parse(format!(
                    "support edge [{x}, {y}] is out of range 1..={m}"
                )));
            }
            zero_based.push((x - 1, y - 1));
        }
        EdgeSet::from_edges(m, zero_based).map(Some)
    }

    fn from_parts(matrix: &DMatrix<f64>, support: &EdgeSet) -> Self {
        Self {
            size: matrix.nrows(),
            matrix: (0..matrix.nrows())
                .map(|x| matrix.row(x).iter().copied().collect())
                .collect(),
            support: Some(support.edges().map(|(x, y)| [x + 1, y + 1]).collect()),
        }
    }
}

pub fn parse_kernel(text: &str) -> Result<Kernel> {
    let file = MatrixFile::parse(text)?;
    match file.support()? {
        Some(e) => validate_kernel_with_support(&file.matrix(), &e, ZERO_THRESHOLD),
        None => validate_kernel(&file.matrix(), ZERO_THRESHOLD),
    }
}

pub fn parse_edge_measure(text: &str) -> Result<EdgeMeasure> {
    let file = MatrixFile::parse(text)?;
    let q = EdgeMeasure::new(file.matrix())?;
    if let Some(e) = file.support()? {
        if &e != q.support() {
            return Err(Error::SupportMismatch(
                "declared support differs from the positive entries".into(),
            ));
        }
    }
    Ok(q)
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))
}

pub fn read_kernel(path: impl AsRef<Path>) -> Result<Kernel> {
    parse_kernel(&read_text(path.as_ref())?)
}

pub fn read_edge_measure(path: impl AsRef<Path>) -> Result<EdgeMeasure> {
    parse_edge_measure(&read_text(path.as_ref())?)
}

pub fn kernel_to_value(kernel: &Kernel) -> Value {
    serde_json::to_value(MatrixFile::from_parts(kernel.matrix(), kernel.support()))
        .expect("matrix files are plain JSON")
}

pub fn edge_measure_to_value(measure: &EdgeMeasure) -> Value {
    serde_json::to_value(MatrixFile::from_parts(measure.matrix(), measure.support()))
        .expect("matrix files are plain JSON")
}

/// `{"(i,j)": value}` with 1-based indices, in chart order.
pub fn coords_to_value(coords: &ChartCoords) -> Value {
    let map: Map<String, Value> = coords
        .iter()
        .map(|((i, j), v)| (format!("({},{})", i + 1, j + 1), Value::from(v)))
        .collect();
    Value::Object(map)
}

/// Writes floats as `{:.16e}`, which round-trips every finite `f64`.
#[derive(Debug, Clone, Copy, Default)]
pub struct PreciseFormatter;

impl serde_json::ser::Formatter for PreciseFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }
}

/// Compact JSON with 17 significant digits per float.
pub fn to_json_string(value: &Value) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, PreciseFormatter);
    value
        .serialize(&mut ser)
        .expect("serializing a Value into memory cannot fail");
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}
