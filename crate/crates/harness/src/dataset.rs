//! Binary forward dataset.
//!
//! Little-endian layout: magic `ISSP`, `u32` version, `u32` d, `f64` R,
//! `u32` node count, `u32` n_theta, `u32` n_phi, `u32` block count; then per
//! wavenumber an `f64` κ followed by `(dir re, dir im, neu re, neu im)` per node.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::sync::Arc;

use issp_core::forward::BoundaryData;
use issp_core::geometry::{make_boundary_grid, BoundaryGrid};
use issp_core::{Dim, C64};

use crate::error::{HarnessError, Result};

pub const MAGIC: &[u8; 4] = b"ISSP";
pub const VERSION: u32 = 1;

/// Clean forward traces on one boundary grid at every lattice wavenumber.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub grid: Arc<BoundaryGrid>,
    pub blocks: Vec<BoundaryData>,
}

fn put_u32(w: &mut impl Write, v: u32) -> std::io::Result<()> {
    w.write_all(&v.to_le_bytes())
}

fn put_f64(w: &mut impl Write, v: f64) -> std::io::Result<()> {
    w.write_all(&v.to_le_bytes())
}

fn get_u32(r: &mut impl Read) -> std::io::Result<u32> {
    let mut b = [0; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn get_f64(r: &mut impl Read) -> std::io::Result<f64> {
    let mut b = [0; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

fn as_u32(v: usize, what: &str) -> Result<u32> {
    u32::try_from(v).map_err(|_| HarnessError::Io(format!("{what} = {v} does not fit the dataset header")))
}

impl Dataset {
    pub fn kappas(&self) -> Vec<f64> {
        self.blocks.iter().map(|b| b.kappa).collect()
    }

    pub fn write(&self, mut w: impl Write) -> Result<()> {
        let g = &self.grid;
        let (nt, np) = g.counts();
        let io = |e: std::io::Error| HarnessError::Io(e.to_string());
        w.write_all(MAGIC).map_err(io)?;
        put_u32(&mut w, VERSION).map_err(io)?;
        put_u32(&mut w, g.dim.as_usize() as u32).map_err(io)?;
        put_f64(&mut w, g.radius).map_err(io)?;
        put_u32(&mut w, as_u32(g.len(), "node count")?).map_err(io)?;
        put_u32(&mut w, as_u32(nt, "n_theta")?).map_err(io)?;
        put_u32(&mut w, as_u32(np, "n_phi")?).map_err(io)?;
        put_u32(&mut w, as_u32(self.blocks.len(), "block count")?).map_err(io)?;
        for b in &self.blocks {
            let neu = b.neumann()?;
            put_f64(&mut w, b.kappa).map_err(io)?;
            for (u, v) in b.dirichlet.iter().zip(neu) {
                for x in [u.re, u.im, v.re, v.im] {
                    put_f64(&mut w, x).map_err(io)?;
                }
            }
        }
        w.flush().map_err(io)
    }

    pub fn read(mut r: impl Read) -> Result<Self> {
        let io = |e: std::io::Error| HarnessError::Io(format!("truncated or unreadable dataset: {e}"));
        let mut magic = [0; 4];
        r.read_exact(&mut magic).map_err(io)?;
        if &magic != MAGIC {
            return Err(HarnessError::Io("not a forward dataset (bad magic)".into()));
        }
        let version = get_u32(&mut r).map_err(io)?;
        if version != VERSION {
            return Err(HarnessError::Io(format!("dataset version {version} is not supported")));
        }
        let dim = Dim::from_usize(get_u32(&mut r).map_err(io)? as usize)
            .map_err(|e| HarnessError::Io(format!("dataset header: {e}")))?;
        let radius = get_f64(&mut r).map_err(io)?;
        let nodes = get_u32(&mut r).map_err(io)? as usize;
        let nt = get_u32(&mut r).map_err(io)? as usize;
        let np = get_u32(&mut r).map_err(io)? as usize;
        let count = get_u32(&mut r).map_err(io)? as usize;
        let grid = Arc::new(
            make_boundary_grid(dim, radius, nt, np)
                .map_err(|e| HarnessError::Io(format!("dataset header describes no valid grid: {e}")))?,
        );
        if grid.len() != nodes {
            return Err(HarnessError::Io(format!("header node count {nodes} ≠ grid size {}", grid.len())));
        }
        let mut blocks = Vec::with_capacity(count);
        for _ in 0..count {
            let kappa = get_f64(&mut r).map_err(io)?;
            let (mut dir, mut neu) = (Vec::with_capacity(nodes), Vec::with_capacity(nodes));
            for _ in 0..nodes {
                let mut q = [0.0; 4];
                for x in &mut q {
                    *x = get_f64(&mut r).map_err(io)?;
                }
                dir.push(C64::new(q[0], q[1]));
                neu.push(C64::new(q[2], q[3]));
            }
            blocks.push(BoundaryData::new(kappa, grid.clone(), dir, Some(neu))?);
        }
        let mut rest = [0u8; 1];
        if r.read(&mut rest).map_err(io)? != 0 {
            return Err(HarnessError::Io("trailing bytes after the last block".into()));
        }
        Ok(Dataset { grid, blocks })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
        }
        let f = File::create(path).map_err(|e| HarnessError::io(path, e))?;
        self.write(BufWriter::new(f))
    }

    /// A missing file is a state error: the forward step has not run.
    pub fn load(path: &Path) -> Result<Self> {
        let f = match File::open(path) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                return Err(issp_core::Error::State(format!(
                    "no forward dataset at {}; run `issp forward` first",
                    path.display()
                ))
                .into())
            }
            Err(e) => return Err(HarnessError::io(path, e)),
        };
        Self::read(BufReader::new(f))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(dim: Dim) -> Dataset {
        let (nt, np) = if dim == Dim::Two { (16, 0) } else { (4, 8) };
        let grid = Arc::new(make_boundary_grid(dim, 1.5, nt, np).unwrap());
        let blocks = (1..=3)
            .map(|j| {
                let k = 0.5 * j as f64;
                let d = (0..grid.len()).map(|i| C64::new(i as f64, -k)).collect();
                let n = (0..grid.len()).map(|i| C64::new(k, 1.0 / (i + 1) as f64)).collect();
                BoundaryData::new(k, grid.clone(), d, Some(n)).unwrap()
            })
            .collect();
        Dataset { grid, blocks }
    }

    #[test]
    fn round_trip_is_exact() {
        for dim in [Dim::Two, Dim::Three] {
            let ds = sample(dim);
            let mut buf = Vec::new();
            ds.write(&mut buf).unwrap();
            assert_eq!(&buf[..4], MAGIC);
            let back = Dataset::read(buf.as_slice()).unwrap();
            assert_eq!(back, ds);
        }
    }

    #[test]
    fn corrupt_input_is_an_io_error() {
        let mut buf = Vec::new();
        sample(Dim::Two).write(&mut buf).unwrap();
        for bad in [&buf[..buf.len() - 3], &b"ISSX"[..]] {
            assert!(matches!(Dataset::read(bad), Err(HarnessError::Io(_))));
        }
        let mut extra = buf.clone();
        extra.push(0);
        assert!(matches!(Dataset::read(extra.as_slice()), Err(HarnessError::Io(_))));
    }

    #[test]
    fn missing_file_is_a_state_error() {
        let err = Dataset::load(Path::new("/nonexistent/dataset.issp")).unwrap_err();
        assert!(matches!(err, HarnessError::Core(issp_core::Error::State(_))));
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn traces_without_neumann_cannot_be_written() {
        let mut ds = sample(Dim::Two);
        ds.blocks[1].neumann = None;
        assert!(ds.write(Vec::new()).is_err());
    }
}
