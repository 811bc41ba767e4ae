//! Binary parameter format: `MDO1`, then per tensor a little-endian `u32`
//! name length, the name, `u32` rank, `u32` dims, and `f32` data. The first
//! tensor, `meta.config`, holds the architecture constants.

use alloc::string::String;
use alloc::vec;

use super::params::{PolicyConfig, PolicyParams, TensorSpec};
use super::real::Real;
use crate::error::{Error, Result};
use crate::prelude::*;

pub const MAGIC: &[u8; 4] = b"MDO1";
pub const CONFIG_TENSOR: &str = "meta.config";

fn put_tensor(out: &mut Vec<u8>, name: &str, shape: &[usize], data: impl Iterator<Item = f32>) {
    out.extend_from_slice(&(name.len() as u32).to_le_bytes());
    out.extend_from_slice(name.as_bytes());
    out.extend_from_slice(&(shape.len() as u32).to_le_bytes());
    for &d in shape {
        out.extend_from_slice(&(d as u32).to_le_bytes());
    }
    for x in data {
        out.extend_from_slice(&x.to_le_bytes());
    }
}

pub fn encode<T: Real>(params: &PolicyParams<T>) -> Vec<u8> {
    let mut out = Vec::with_capacity(4 + params.len() * 4 + 64 * params.specs().len());
    out.extend_from_slice(MAGIC);
    let cfg = params.config().to_values();
    put_tensor(&mut out, CONFIG_TENSOR, &[cfg.len()], cfg.iter().map(|&v| v as f32));
    for spec in params.specs() {
        let data = &params.flat()[spec.offset..spec.offset + spec.len];
        put_tensor(&mut out, &spec.name, &spec.shape, data.iter().map(|x| x.f64() as f32));
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, n: usize, tensor: &str) -> Result<&[u8]> {
        if self.bytes.len() - self.pos < n {
            return Err(Error::TruncatedTensor(String::from(tensor)));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self, tensor: &str) -> Result<usize> {
        let b = self.take(4, tensor)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]) as usize)
    }

    /// Reads one tensor, checking name and shape against `expected`.
    fn tensor(&mut self, expected: &str, shape: &[usize]) -> Result<Vec<f32>> {
        let name_len = self.u32(expected)?;
        let name = String::from_utf8_lossy(self.take(name_len, expected)?).into_owned();
        if name != expected {
            return Err(Error::UnexpectedTensor {
                expected: String::from(expected),
                got: name,
            });
        }
        let rank = self.u32(expected)?;
        let mut dims = Vec::with_capacity(rank.min(8));
        for _ in 0..rank {
            dims.push(self.u32(expected)?);
        }
        if dims != shape {
            return Err(Error::DimensionMismatch {
                name,
                expected: shape.to_vec(),
                got: dims,
            });
        }
        let len: usize = shape.iter().product();
        let raw = self.take(len * 4, expected)?;
        Ok(raw
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect())
    }
}

pub fn decode(bytes: &[u8]) -> Result<PolicyParams<f32>> {
    if bytes.len() < 4 || &bytes[..4] != MAGIC {
        return Err(Error::BadMagic);
    }
    let mut r = Reader { bytes, pos: 4 };
    let cfg = r.tensor(CONFIG_TENSOR, &[5])?;
    let mut values = [0usize; 5];
    for (v, &c) in values.iter_mut().zip(&cfg) {
        if !(c >= 0.0 && c.fract() == 0.0 && c < 1e7) {
            return Err(Error::Config("checkpoint config is not a list of sizes"));
        }
        *v = c as usize;
    }
    let config = PolicyConfig::from_values(values);
    config.validate()?;
    let specs: Vec<TensorSpec> = super::params::Layout::new(&config).specs;
    let mut data = vec![0.0f32; specs.iter().map(|s| s.len).sum()];
    for spec in &specs {
        let t = r.tensor(&spec.name, &spec.shape)?;
        data[spec.offset..spec.offset + spec.len].copy_from_slice(&t);
    }
    if r.pos != bytes.len() {
        return Err(Error::UnexpectedTensor {
            expected: String::from("end of file"),
            got: String::from("trailing bytes"),
        });
    }
    PolicyParams::from_flat(config, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn params() -> PolicyParams<f32> {
        PolicyParams::init(PolicyConfig::tiny(8), &mut stream(1, "init", 0)).unwrap()
    }

    #[test]
    fn round_trip_is_bitwise() {
        let p = params();
        let q = decode(&encode(&p)).unwrap();
        assert_eq!(p.config(), q.config());
        assert!(p.flat().iter().zip(q.flat()).all(|(a, b)| a.to_bits() == b.to_bits()));
    }

    #[test]
    fn errors_are_distinct() {
        let bytes = encode(&params());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert_eq!(decode(&bad).unwrap_err(), Error::BadMagic);
        let short = &bytes[..bytes.len() - 2];
        assert!(matches!(decode(short), Err(Error::TruncatedTensor(n)) if n == "critic.out.bias"));
        let other = encode(&PolicyParams::<f32>::init(PolicyConfig::tiny(4), &mut stream(1, "init", 0)).unwrap());
        // splice a 4-wide tensor body into an 8-wide file
        let mut mixed = bytes[..4].to_vec();
        let cfg_len = 4 + 11 + 4 + 4 + 5 * 4;
        mixed.extend_from_slice(&bytes[4..4 + cfg_len]);
        mixed.extend_from_slice(&other[4 + cfg_len..]);
        assert!(matches!(decode(&mixed), Err(Error::DimensionMismatch { .. })));
    }
}
