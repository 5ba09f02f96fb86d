//! `COSM` binary matrix container and its CSV mirror.
//!
//! Binary layout, little-endian: magic `COSM`, `u32` version (1), `u32`
//! rows, `u32` cols, `rows` `f64` row-axis values, `cols` `f64` column-axis
//! values, then `rows × cols` `f64` entries in row-major order.
//!
//! CSV: two header lines `# signal_axis_nm: …` and `# idler_axis_nm: …`,
//! then one comma-separated line per row.

use std::fmt::Write as _;
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::spectrum::{FrequencyGrid, JointSpectrum};

pub const MATRIX_MAGIC: [u8; 4] = *b"COSM";
pub const MATRIX_FORMAT_VERSION: u32 = 1;

/// A matrix with coordinates for its rows and columns.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixFile {
    pub row_axis: Vec<f64>,
    pub col_axis: Vec<f64>,
    pub values: Matrix,
}

impl MatrixFile {
    pub fn new(row_axis: Vec<f64>, col_axis: Vec<f64>, values: Matrix) -> Result<Self> {
        if (row_axis.len(), col_axis.len()) != values.shape() {
            return Err(Error::ShapeMismatch {
                expected: values.shape(),
                found: (row_axis.len(), col_axis.len()),
            });
        }
        Ok(Self {
            row_axis,
            col_axis,
            values,
        })
    }

    pub fn from_spectrum(s: &JointSpectrum) -> Self {
        Self {
            row_axis: s.grid().signal_nm().to_vec(),
            col_axis: s.grid().idler_nm().to_vec(),
            values: s.values().clone(),
        }
    }

    /// Interprets the axes as signal and idler wavelengths.
    pub fn into_spectrum(self) -> Result<JointSpectrum> {
        let grid = FrequencyGrid::new(self.row_axis, self.col_axis)?;
        JointSpectrum::new(grid, self.values)
    }

    pub fn encode(&self) -> Vec<u8> {
        let (rows, cols) = self.values.shape();
        let mut out = Vec::with_capacity(16 + 8 * (rows + cols + rows * cols));
        out.extend_from_slice(&MATRIX_MAGIC);
        out.extend_from_slice(&MATRIX_FORMAT_VERSION.to_le_bytes());
        out.extend_from_slice(&(rows as u32).to_le_bytes());
        out.extend_from_slice(&(cols as u32).to_le_bytes());
        for v in self
            .row_axis
            .iter()
            .chain(&self.col_axis)
            .chain(self.values.as_slice())
        {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn decode(mut bytes: &[u8]) -> Result<Self> {
        Self::read_from(&mut bytes)
    }

    pub fn read_from<R: Read>(reader: &mut R) -> Result<Self> {
        let mut head = [0u8; 16];
        reader
            .read_exact(&mut head[..4])
            .map_err(|_| Error::Format("truncated matrix header".into()))?;
        let magic: [u8; 4] = head[..4].try_into().unwrap();
        if magic != MATRIX_MAGIC {
            return Err(Error::BadMagic {
                expected: MATRIX_MAGIC,
                found: magic,
            });
        }
        reader
            .read_exact(&mut head[4..])
            .map_err(|_| Error::Format("truncated matrix header".into()))?;
        let version = u32::from_le_bytes(head[4..8].try_into().unwrap());
        if version != MATRIX_FORMAT_VERSION {
            return Err(Error::VersionMismatch {
                expected: MATRIX_FORMAT_VERSION,
                found: version,
            });
        }
        let rows = u32::from_le_bytes(head[8..12].try_into().unwrap()) as usize;
        let cols = u32::from_le_bytes(head[12..16].try_into().unwrap()) as usize;
        let n = rows + cols + rows * cols;
        let mut payload = Vec::new();
        reader.read_to_end(&mut payload)?;
        if payload.len() != 8 * n {
            return Err(Error::Format(format!(
                "matrix payload holds {} bytes, expected {}",
                payload.len(),
                8 * n
            )));
        }
        let mut values = payload
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()));
        let row_axis: Vec<f64> = values.by_ref().take(rows).collect();
        let col_axis: Vec<f64> = values.by_ref().take(cols).collect();
        let data: Vec<f64> = values.collect();
        Self::new(row_axis, col_axis, Matrix::from_vec(rows, cols, data)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.encode())?;
        Ok(())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let bytes = std::fs::read(path)?;
        Self::decode(&bytes)
    }

    pub fn to_csv(&self) -> String {
        let join = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let mut out = String::new();
        writeln!(out, "# signal_axis_nm: {}", join(&self.row_axis)).unwrap();
        writeln!(out, "# idler_axis_nm: {}", join(&self.col_axis)).unwrap();
        for i in 0..self.values.rows() {
            writeln!(out, "{}", join(self.values.row(i))).unwrap();
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut row_axis = None;
        let mut col_axis = None;
        for line in text.lines().filter(|l| l.starts_with('#')) {
            let body = line.trim_start_matches('#').trim();
            if let Some(rest) = body.strip_prefix("signal_axis_nm:") {
                row_axis = Some(parse_list(rest)?);
            } else if let Some(rest) = body.strip_prefix("idler_axis_nm:") {
                col_axis = Some(parse_list(rest)?);
            }
        }
        let row_axis = row_axis.ok_or_else(|| Error::Format("missing signal_axis_nm header".into()))?;
        let col_axis = col_axis.ok_or_else(|| Error::Format("missing idler_axis_nm header".into()))?;
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut data = Vec::with_capacity(row_axis.len() * col_axis.len());
        let mut rows = 0;
        for record in reader.records() {
            let record = record.map_err(|e| Error::Format(format!("matrix csv: {e}")))?;
            if record.len() != col_axis.len() {
                return Err(Error::Format(format!(
                    "csv row {rows} has {} fields, expected {}",
                    record.len(),
                    col_axis.len()
                )));
            }
            for field in record.iter() {
                data.push(parse_f64(field)?);
            }
            rows += 1;
        }
        if rows != row_axis.len() {
            return Err(Error::Format(format!(
                "csv has {rows} rows, header declares {}",
                row_axis.len()
            )));
        }
        Self::new(row_axis, col_axis, Matrix::from_vec(rows, data.len() / rows.max(1), data)?)
    }
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Format(format!("not a number: {s:?}")))
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',').map(parse_f64).collect()
}
