//! Binary field files: `QNSF`, version, `n`, `N`, `m` (u32 LE), `L` (f64 LE), then samples.

use crate::field::SpectralField;
use crate::grid::TorusGrid;
use crate::{Result, SpectralError};
use std::io::{Read, Write};

pub const MAGIC: &[u8; 4] = b"QNSF";
pub const VERSION: u32 = 1;

pub fn write_field<W: Write>(w: &mut W, f: &SpectralField) -> Result<()> {
    let io = |e: std::io::Error| SpectralError::Format(e.to_string());
    let g = f.grid;
    let mut buf = Vec::with_capacity(28 + 8 * f.coeffs.len());
    buf.extend_from_slice(MAGIC);
    for v in [VERSION, g.dim as u32, g.n() as u32, f.components as u32] {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    buf.extend_from_slice(&g.period.to_le_bytes());
    for x in f.to_samples() {
        buf.extend_from_slice(&x.to_le_bytes());
    }
    w.write_all(&buf).map_err(io)
}

pub fn read_field<R: Read>(r: &mut R) -> Result<SpectralField> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes).map_err(|e| SpectralError::Format(e.to_string()))?;
    if bytes.len() < 28 || &bytes[..4] != MAGIC {
        return Err(SpectralError::Format("missing QNSF header".into()));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let version = u32_at(4);
    if version != VERSION {
        return Err(SpectralError::Format(format!("unsupported version {version}")));
    }
    let (n, pts, m) = (u32_at(8) as usize, u32_at(12) as usize, u32_at(16) as usize);
    let period = f64::from_le_bytes(bytes[20..28].try_into().unwrap());
    let grid = TorusGrid::new(n, pts, period)?;
    let body = &bytes[28..];
    if body.len() != 8 * m * grid.len() {
        return Err(SpectralError::Format(format!(
            "expected {} sample bytes, found {}",
            8 * m * grid.len(),
            body.len()
        )));
    }
    let samples: Vec<f64> =
        body.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    SpectralField::from_samples(grid, m, &samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::random_field;

    #[test]
    fn roundtrip_and_header() {
        let g = TorusGrid::new(2, 16, 3.5).unwrap();
        let f = random_field(g, 2, 3, 1.0, 5, true);
        let mut buf = Vec::new();
        write_field(&mut buf, &f).unwrap();
        assert_eq!(&buf[..4], b"QNSF");
        assert_eq!(buf.len(), 28 + 8 * 2 * 256);
        let back = read_field(&mut buf.as_slice()).unwrap();
        assert!(back.sub(&f).unwrap().max_coeff() < 1e-15);
        buf.truncate(100);
        assert!(read_field(&mut buf.as_slice()).is_err());
        assert!(read_field(&mut &b"NOPE"[..]).is_err());
    }
}
