//! Binary state checkpoints with a fixed-width header and little-endian
//! 64-bit components, byte layout:
//!
//! ```text
//! offset  size  field
//! 0       8     magic "BNLSCKP1"
//! 8       4     u32 version (= 1)
//! 12      4     u32 geometry kind (0 full, 1 radial)
//! 16      4     u32 dimension n
//! 20      4     u32 points per axis / radial nodes
//! 24      8     f64 half-width L / r_max
//! 32      8     f64 time tag t
//! 40      8     f64 dt hint
//! 48      ...   len·2 f64 interleaved (re, im)
//! ```

use std::fs;
use std::path::Path;

use num_complex::Complex;

use bnls_core::field::{ComplexField, Geometry};
use bnls_core::grid::make_grid;
use bnls_core::radial::make_radial_grid;

use crate::RunnerError;

const MAGIC: &[u8; 8] = b"BNLSCKP1";
const VERSION: u32 = 1;
const HEADER_LEN: usize = 48;

pub struct Checkpoint {
    pub field: ComplexField<f64>,
    pub t: f64,
    pub dt: f64,
}

impl std::fmt::Debug for Checkpoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Checkpoint")
            .field("geometry", &self.field.geometry().kind_name())
            .field("len", &self.field.values().len())
            .field("t", &self.t)
            .field("dt", &self.dt)
            .finish()
    }
}

pub fn save_checkpoint(field: &ComplexField<f64>, dt: f64, path: &Path) -> Result<(), RunnerError> {
    let (kind, n, points, extent) = match field.geometry() {
        Geometry::Full(g) => (0u32, g.dim() as u32, g.points_per_axis() as u32, g.half_width()),
        Geometry::Radial(g) => (1u32, g.dim() as u32, g.len() as u32, g.r_max()),
    };
    let t = field.time_tag().unwrap_or(0.0);
    let mut buf = Vec::with_capacity(HEADER_LEN + field.values().len() * 16);
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&kind.to_le_bytes());
    buf.extend_from_slice(&n.to_le_bytes());
    buf.extend_from_slice(&points.to_le_bytes());
    buf.extend_from_slice(&extent.to_le_bytes());
    buf.extend_from_slice(&t.to_le_bytes());
    buf.extend_from_slice(&dt.to_le_bytes());
    for v in field.values() {
        buf.extend_from_slice(&v.re.to_le_bytes());
        buf.extend_from_slice(&v.im.to_le_bytes());
    }
    fs::write(path, buf).map_err(|e| RunnerError::Io(format!("{}: {e}", path.display())))
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint, RunnerError> {
    let buf = fs::read(path).map_err(|e| RunnerError::Io(format!("{}: {e}", path.display())))?;
    if buf.len() < HEADER_LEN {
        return Err(RunnerError::Checkpoint("truncated header".into()));
    }
    if &buf[0..8] != MAGIC {
        return Err(RunnerError::Checkpoint("bad magic (not a checkpoint file)".into()));
    }
    let u32_at = |o: usize| u32::from_le_bytes(buf[o..o + 4].try_into().unwrap());
    let f64_at = |o: usize| f64::from_le_bytes(buf[o..o + 8].try_into().unwrap());
    let version = u32_at(8);
    if version != VERSION {
        return Err(RunnerError::Checkpoint(format!("version {version} unsupported (expected {VERSION})")));
    }
    let kind = u32_at(12);
    let n = u32_at(16) as usize;
    let points = u32_at(20) as usize;
    let extent = f64_at(24);
    let t = f64_at(32);
    let dt = f64_at(40);

    let geometry = match kind {
        0 => Geometry::Full(make_grid::<f64>(n, points, extent).map_err(RunnerError::Core)?),
        1 => Geometry::Radial(make_radial_grid::<f64>(n, points, extent).map_err(RunnerError::Core)?),
        other => return Err(RunnerError::Checkpoint(format!("unknown geometry kind {other}"))),
    };
    let len = geometry.len();
    let expected = HEADER_LEN + len * 16;
    if buf.len() != expected {
        return Err(RunnerError::Checkpoint(format!(
            "payload length {} does not match geometry ({} expected)",
            buf.len(),
            expected
        )));
    }
    let mut values = Vec::with_capacity(len);
    for i in 0..len {
        let o = HEADER_LEN + i * 16;
        values.push(Complex::new(f64_at(o), f64_at(o + 8)));
    }
    let field = ComplexField::new(geometry, values).map_err(RunnerError::Core)?.with_time(t);
    Ok(Checkpoint { field, t, dt })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let g = make_grid::<f64>(1, 64, 9.0).unwrap();
        let u = bnls_core::random::random_band_limited(&g, 4.0, 99).with_time(1.25);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("state.ckpt");
        save_checkpoint(&u, 1e-3, &path).unwrap();
        let back = load_checkpoint(&path).unwrap();
        assert_eq!(back.t, 1.25);
        assert_eq!(back.dt, 1e-3);
        assert_eq!(u.values(), back.field.values(), "payload must round-trip bit-exactly");
    }

    #[test]
    fn radial_round_trip() {
        let rg = make_radial_grid::<f64>(5, 64, 8.0).unwrap();
        let u = ComplexField::from_fn_radial(&rg, |r| Complex::new((-r).exp(), 0.1 * r));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("radial.ckpt");
        save_checkpoint(&u, 0.5, &path).unwrap();
        let back = load_checkpoint(&path).unwrap();
        assert_eq!(u.values(), back.field.values());
        assert_eq!(back.field.geometry().kind_name(), "radial");
    }

    #[test]
    fn truncated_file_is_a_corrupt_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.ckpt");
        std::fs::write(&path, b"BNLSCKP1\x01\x00").unwrap();
        let err = load_checkpoint(&path).unwrap_err();
        assert!(err.to_string().contains("truncated"), "{err}");
    }

    #[test]
    fn wrong_magic_and_version_are_rejected() {
        let g = make_grid::<f64>(1, 16, 1.0).unwrap();
        let u = ComplexField::zeros(Geometry::Full(g));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("v.ckpt");
        save_checkpoint(&u, 0.0, &path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[8] = 9;
        std::fs::write(&path, &bytes).unwrap();
        assert!(load_checkpoint(&path).unwrap_err().to_string().contains("version"));
        bytes[0] = b'X';
        std::fs::write(&path, &bytes).unwrap();
        assert!(load_checkpoint(&path).unwrap_err().to_string().contains("magic"));
    }
}
