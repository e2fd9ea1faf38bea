//! Binary field files: one JSON header line `{"L", "N", "support"}`, then
//! `N*N` little-endian `f64` pairs `(re, im)` in grid order.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::algebra::Complex;
use crate::error::{Error, Result};
use crate::transforms::plane::{PlaneField, PlaneGrid};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FieldHeader {
    #[serde(rename = "L")]
    pub side: f64,
    #[serde(rename = "N")]
    pub n: usize,
    /// `"disk"` for fields supported in the closed unit disk, `"plane"` otherwise.
    pub support: String,
}

pub fn write_field<W: Write>(mut out: W, field: &PlaneField) -> Result<()> {
    let support = if field.sup_outside_disk() == 0.0 { "disk" } else { "plane" };
    let header = FieldHeader {
        side: field.grid.side(),
        n: field.grid.n(),
        support: support.into(),
    };
    serde_json::to_writer(&mut out, &header)?;
    out.write_all(b"\n")?;
    let mut buf = Vec::with_capacity(16 * field.values.len());
    for v in &field.values {
        buf.extend_from_slice(&v.re.to_le_bytes());
        buf.extend_from_slice(&v.im.to_le_bytes());
    }
    out.write_all(&buf)?;
    Ok(())
}

pub fn read_field<R: BufRead>(mut input: R) -> Result<PlaneField> {
    let mut line = String::new();
    input.read_line(&mut line)?;
    let header: FieldHeader = serde_json::from_str(line.trim_end())?;
    let grid = PlaneGrid::new(header.side, header.n)?;
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    if bytes.len() != 16 * grid.len() {
        return Err(Error::Domain(format!(
            "field payload has {} bytes, header implies {}",
            bytes.len(),
            16 * grid.len()
        )));
    }
    let f = |c: &[u8]| f64::from_le_bytes(c.try_into().expect("8-byte chunk"));
    let values = bytes
        .chunks_exact(16)
        .map(|c| Complex::new(f(&c[..8]), f(&c[8..])))
        .collect();
    let field = PlaneField::new(grid, values)?;
    if header.support == "disk" && field.sup_outside_disk() > 0.0 {
        return Err(Error::Domain("header claims disk support but field is nonzero outside".into()));
    }
    Ok(field)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let g = PlaneGrid::new(8.0, 16).unwrap();
        let f = g.sample_disk(|z| z * z.conj() + Complex::new(0.0, 1.5));
        let mut buf = Vec::new();
        write_field(&mut buf, &f).unwrap();
        assert!(buf.starts_with(br#"{"L":8.0,"N":16,"support":"disk"}"#));
        let back = read_field(&buf[..]).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn truncated_payload_is_rejected() {
        let g = PlaneGrid::new(8.0, 8).unwrap();
        let mut buf = Vec::new();
        write_field(&mut buf, &g.zeros()).unwrap();
        buf.truncate(buf.len() - 3);
        assert!(matches!(read_field(&buf[..]), Err(Error::Domain(_))));
    }
}
