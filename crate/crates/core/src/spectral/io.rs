//! Little-endian binary layout for [`FourierSamples`]:
//! magic `ISFS`, `u32 d`, `f64 K`, `u32 n_freq`, `u32 n_dir`, `u64 count`,
//! then per sample `ξ` (`d` × f64), weight (f64), value (re, im f64).

use std::io::{Read, Write};

use super::FourierSamples;
use crate::{Dim, Error, Result, C64};

const MAGIC: &[u8; 4] = b"ISFS";

fn io_err(e: std::io::Error) -> Error {
    Error::Io(e.to_string())
}

pub fn write_fourier_samples(samples: &FourierSamples, mut w: impl Write) -> Result<()> {
    let d = samples.dim.as_usize();
    let mut buf = Vec::with_capacity(32 + samples.len() * 8 * (d + 3));
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&(d as u32).to_le_bytes());
    buf.extend_from_slice(&samples.k_max.to_le_bytes());
    buf.extend_from_slice(&(samples.n_freq() as u32).to_le_bytes());
    buf.extend_from_slice(&(samples.n_dir() as u32).to_le_bytes());
    buf.extend_from_slice(&(samples.len() as u64).to_le_bytes());
    for i in 0..samples.len() {
        let xi = samples.xi(i);
        for c in &xi[..d] {
            buf.extend_from_slice(&c.to_le_bytes());
        }
        buf.extend_from_slice(&samples.weights[i].to_le_bytes());
        buf.extend_from_slice(&samples.values[i].re.to_le_bytes());
        buf.extend_from_slice(&samples.values[i].im.to_le_bytes());
    }
    w.write_all(&buf).map_err(io_err)
}

struct Cursor<'a>(&'a [u8]);

impl Cursor<'_> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N]> {
        if self.0.len() < N {
            return Err(Error::Shape("truncated Fourier sample file".into()));
        }
        let (head, rest) = self.0.split_at(N);
        self.0 = rest;
        Ok(head.try_into().expect("length checked"))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take()?))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take()?))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take()?))
    }
}

pub fn read_fourier_samples(mut r: impl Read) -> Result<FourierSamples> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes).map_err(io_err)?;
    let mut c = Cursor(&bytes);
    if &c.take::<4>()? != MAGIC {
        return Err(Error::Shape("not a Fourier sample file".into()));
    }
    let d = c.u32()? as usize;
    let dim = Dim::from_usize(d).map_err(|_| Error::Shape(format!("bad dimension {d} in sample file")))?;
    let k_max = c.f64()?;
    let n_freq = c.u32()? as usize;
    let n_dir = c.u32()? as usize;
    let count = c.u64()? as usize;
    if count != n_freq * n_dir || n_dir == 0 {
        return Err(Error::Shape(format!("{count} samples for a {n_freq}×{n_dir} lattice")));
    }
    let mut xis = Vec::with_capacity(count);
    let mut weights = Vec::with_capacity(count);
    let mut values = Vec::with_capacity(count);
    for _ in 0..count {
        let mut xi = [0.0; 3];
        for x in xi.iter_mut().take(d) {
            *x = c.f64()?;
        }
        xis.push(xi);
        weights.push(c.f64()?);
        values.push(C64::new(c.f64()?, c.f64()?));
    }
    if !c.0.is_empty() {
        return Err(Error::Shape("trailing bytes after Fourier samples".into()));
    }
    let len = |x: &[f64; 3]| (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    let kappas: Vec<f64> = (0..n_freq).map(|j| len(&xis[j * n_dir])).collect();
    let directions = xis[..n_dir]
        .iter()
        .map(|x| {
            let k = kappas[0];
            [x[0] / k, x[1] / k, x[2] / k]
        })
        .collect();
    Ok(FourierSamples { dim, k_max, kappas, directions, weights, values })
}
