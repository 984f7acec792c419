use std::io::{BufRead, BufReader, Read, Write};

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};

/// Observed entries `M_Ω`, stored in lexicographic index order.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservedData {
    rows: usize,
    cols: usize,
    indices: Vec<(usize, usize)>,
    values: Vec<f64>,
}

impl ObservedData {
    /// Builds from unordered `(i, j, value)` triplets. Duplicate positions,
    /// out-of-range indices and non-finite values are rejected.
    pub fn new(rows: usize, cols: usize, mut entries: Vec<(usize, usize, f64)>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyMatrix);
        }
        entries.sort_by_key(|e| (e.0, e.1));
        let mut indices = Vec::with_capacity(entries.len());
        let mut values = Vec::with_capacity(entries.len());
        for (i, j, v) in entries {
            if i >= rows || j >= cols {
                return Err(Error::IndexOutOfRange {
                    index: if i >= rows { i } else { j },
                    len: if i >= rows { rows } else { cols },
                });
            }
            if !v.is_finite() {
                return Err(Error::NonFinite { row: i, col: j });
            }
            if indices.last() == Some(&(i, j)) {
                return Err(Error::InvalidParameter(format!("duplicate observation at ({i}, {j})")));
            }
            indices.push((i, j));
            values.push(v);
        }
        Ok(Self {
            rows,
            cols,
            indices,
            values,
        })
    }

    /// Samples `m` at the given positions.
    pub fn from_matrix(m: &DenseMatrix, positions: &[(usize, usize)]) -> Result<Self> {
        let entries = positions
            .iter()
            .map(|&(i, j)| {
                if i >= m.rows() || j >= m.cols() {
                    Err(Error::IndexOutOfRange {
                        index: i.max(j),
                        len: m.rows().max(m.cols()),
                    })
                } else {
                    Ok((i, j, m.get(i, j)))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(m.rows(), m.cols(), entries)
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[(usize, usize)] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `(M)_Ω` as a dense matrix, zero off the mask.
    pub fn to_dense(&self) -> DenseMatrix {
        let mut z = DenseMatrix::zeros(self.rows, self.cols);
        for (&(i, j), &v) in self.indices.iter().zip(&self.values) {
            z.set(i, j, v);
        }
        z
    }

    /// `‖(M)_Ω‖`.
    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Writes `# rows=<n1> cols=<n2>`, the header `i,j,value`, then one
    /// line per observation.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# rows={} cols={}", self.rows, self.cols)?;
        let mut wtr = csv::Writer::from_writer(out);
        wtr.write_record(["i", "j", "value"])?;
        for (&(i, j), v) in self.indices.iter().zip(&self.values) {
            wtr.write_record([i.to_string(), j.to_string(), format!("{v:?}")])?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut reader = BufReader::new(input);
        let mut first = String::new();
        reader.read_line(&mut first)?;
        let (rows, cols) = parse_shape_line(&first)?;
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let header = rdr.headers()?.clone();
        if header.iter().collect::<Vec<_>>() != ["i", "j", "value"] {
            return Err(Error::Parse(format!("expected header i,j,value, found {header:?}")));
        }
        let mut entries = Vec::new();
        for record in rdr.records() {
            let record = record?;
            let field = |k: usize| record.get(k).ok_or_else(|| Error::Parse(format!("short record {record:?}")));
            let i = field(0)?.parse::<usize>().map_err(|e| Error::Parse(e.to_string()))?;
            let j = field(1)?.parse::<usize>().map_err(|e| Error::Parse(e.to_string()))?;
            let v = field(2)?.parse::<f64>().map_err(|e| Error::Parse(e.to_string()))?;
            entries.push((i, j, v));
        }
        Self::new(rows, cols, entries)
    }
}

fn parse_shape_line(line: &str) -> Result<(usize, usize)> {
    let body = line
        .trim()
        .strip_prefix('#')
        .ok_or_else(|| Error::Parse("missing `# rows=.. cols=..` line".into()))?;
    let mut rows = None;
    let mut cols = None;
    for tok in body.split_whitespace() {
        match tok.split_once('=') {
            Some(("rows", v)) => rows = v.parse().ok(),
            Some(("cols", v)) => cols = v.parse().ok(),
            _ => {}
        }
    }
    match (rows, cols) {
        (Some(r), Some(c)) => Ok((r, c)),
        _ => Err(Error::Parse(format!("bad shape line {line:?}"))),
    }
}

/// `(M)_Ω + (Z)_Ω̄`: overwrite the observed entries of `z`.
pub fn project_affine_mask(z: &DenseMatrix, data: &ObservedData) -> Result<DenseMatrix> {
    if z.shape() != data.shape() {
        return Err(Error::ShapeMismatch {
            expected: data.shape(),
            found: z.shape(),
        });
    }
    let mut out = z.clone();
    for (&(i, j), &v) in data.indices.iter().zip(&data.values) {
        out.set(i, j, v);
    }
    Ok(out)
}
