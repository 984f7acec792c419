//! Matrix serialization: headerless CSV and the `DMAT` binary format.
//!
//! `DMAT` layout: a 16-byte header (the magic bytes `DMAT`, `u32` rows,
//! `u32` cols, four reserved zero bytes; integers
//! little-endian), then `rows * cols` little-endian `f64` values in row-major
//! order. Both readers reject NaN and infinities.

use std::io::{Read, Write};

use super::DenseMatrix;
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"DMAT";

pub fn write_csv<W: Write>(m: &DenseMatrix, out: W) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    for i in 0..m.rows() {
        wtr.write_record(m.row(i).iter().map(|v| format!("{v:?}")))?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<DenseMatrix> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(input);
    let mut rows = Vec::new();
    for (line, record) in rdr.records().enumerate() {
        let record = record?;
        let row = record
            .iter()
            .map(|field| {
                field
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("row {line}: {field:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    DenseMatrix::from_rows(&rows)
}

pub fn write_dmat<W: Write>(m: &DenseMatrix, mut out: W) -> Result<()> {
    let rows = u32::try_from(m.rows()).map_err(|_| Error::InvalidParameter("too many rows".into()))?;
    let cols = u32::try_from(m.cols()).map_err(|_| Error::InvalidParameter("too many cols".into()))?;
    let mut buf = Vec::with_capacity(16 + 8 * m.as_slice().len());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&rows.to_le_bytes());
    buf.extend_from_slice(&cols.to_le_bytes());
    buf.extend_from_slice(&[0u8; 4]);
    for v in m.as_slice() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    out.write_all(&buf)?;
    Ok(())
}

pub fn read_dmat<R: Read>(mut input: R) -> Result<DenseMatrix> {
    let mut header = [0u8; 16];
    input.read_exact(&mut header)?;
    if &header[..4] != MAGIC {
        return Err(Error::Parse("missing DMAT magic".into()));
    }
    let rows = u32::from_le_bytes(header[4..8].try_into().unwrap()) as usize;
    let cols = u32::from_le_bytes(header[8..12].try_into().unwrap()) as usize;
    let mut body = Vec::new();
    input.read_to_end(&mut body)?;
    if body.len() != 8 * rows * cols {
        return Err(Error::Parse(format!(
            "DMAT body has {} bytes, expected {}",
            body.len(),
            8 * rows * cols
        )));
    }
    let data = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    DenseMatrix::from_vec(rows, cols, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{gaussian_matrix, RngSpec};

    #[test]
    fn csv_round_trip_is_bitwise() {
        let m = gaussian_matrix(4, 3, RngSpec::new(3, 0));
        let mut buf = Vec::new();
        write_csv(&m, &mut buf).unwrap();
        assert_eq!(String::from_utf8_lossy(&buf).lines().count(), 4);
        assert_eq!(read_csv(buf.as_slice()).unwrap(), m);
    }

    #[test]
    fn dmat_round_trip_and_header() {
        let m = gaussian_matrix(2, 5, RngSpec::new(4, 0));
        let mut buf = Vec::new();
        write_dmat(&m, &mut buf).unwrap();
        assert_eq!(&buf[..4], b"DMAT");
        assert_eq!(buf.len(), 16 + 8 * 10);
        assert_eq!(u32::from_le_bytes(buf[4..8].try_into().unwrap()), 2);
        assert_eq!(read_dmat(buf.as_slice()).unwrap(), m);
    }

    #[test]
    fn readers_reject_non_finite() {
        assert!(matches!(
            read_csv("1,2\n3,NaN\n".as_bytes()),
            Err(Error::NonFinite { row: 1, col: 1 })
        ));
        assert!(read_csv("1,inf\n".as_bytes()).is_err());
        let mut buf = Vec::new();
        write_dmat(&DenseMatrix::zeros(1, 1), &mut buf).unwrap();
        buf[16..24].copy_from_slice(&f64::INFINITY.to_le_bytes());
        assert!(matches!(read_dmat(buf.as_slice()), Err(Error::NonFinite { .. })));
    }

    #[test]
    fn ragged_csv_is_rejected() {
        assert!(read_csv("1,2\n3\n".as_bytes()).is_err());
    }
}
