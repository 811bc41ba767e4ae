use alloc::string::String;
use alloc::vec;

use rand::Rng;

use super::real::Real;
use crate::error::{Error, Result};
use crate::mdp::N_FEATURES;
use crate::prelude::*;
use crate::rng::StreamRng;

/// Architecture constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct PolicyConfig {
    pub d_model: usize,
    pub heads: usize,
    pub d_ff: usize,
    pub critic_hidden: usize,
    pub n_actions: usize,
}

impl Default for PolicyConfig {
    fn default() -> Self {
        Self {
            d_model: 128,
            heads: 4,
            d_ff: 256,
            critic_hidden: 64,
            n_actions: 3,
        }
    }
}

impl PolicyConfig {
    /// Small network of the given width, used for gradient checks.
    pub fn tiny(width: usize) -> Self {
        Self {
            d_model: width,
            heads: 2,
            d_ff: 2 * width,
            critic_hidden: width,
            n_actions: 3,
        }
    }

    pub fn with_actions(self, n_actions: usize) -> Self {
        Self { n_actions, ..self }
    }

    pub fn head_dim(&self) -> usize {
        self.d_model / self.heads
    }

    pub fn validate(&self) -> Result<()> {
        if self.d_model == 0 || self.heads == 0 || self.d_ff == 0 || self.critic_hidden == 0 || self.n_actions == 0 {
            return Err(Error::Config("policy dimensions must be positive"));
        }
        if self.d_model % self.heads != 0 {
            return Err(Error::Config("d_model must be divisible by heads"));
        }
        Ok(())
    }

    pub(crate) fn to_values(self) -> [usize; 5] {
        [self.d_model, self.heads, self.d_ff, self.critic_hidden, self.n_actions]
    }

    pub(crate) fn from_values(v: [usize; 5]) -> Self {
        Self {
            d_model: v[0],
            heads: v[1],
            d_ff: v[2],
            critic_hidden: v[3],
            n_actions: v[4],
        }
    }
}

/// Name, shape and position of one parameter tensor in the flat buffer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorSpec {
    pub name: String,
    pub shape: Vec<usize>,
    pub offset: usize,
    pub len: usize,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct LinearSlots {
    pub w: usize,
    pub b: usize,
    pub fan_in: usize,
    pub fan_out: usize,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct NormSlots {
    pub g: usize,
    pub b: usize,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct AttnSlots {
    pub q: LinearSlots,
    pub k: LinearSlots,
    pub v: LinearSlots,
    pub o: LinearSlots,
}

#[derive(Debug, Clone)]
pub(crate) struct Layout {
    pub pe: LinearSlots,
    pub de: LinearSlots,
    pub ln1: NormSlots,
    pub enc: AttnSlots,
    pub ln2: NormSlots,
    pub ff1: LinearSlots,
    pub ff2: LinearSlots,
    pub lnq: NormSlots,
    pub lnkv: NormSlots,
    pub dec: AttnSlots,
    pub ln_out: NormSlots,
    pub mu: LinearSlots,
    pub sigma: LinearSlots,
    pub critic1: LinearSlots,
    pub critic2: LinearSlots,
    pub specs: Vec<TensorSpec>,
    pub total: usize,
}

struct Builder {
    specs: Vec<TensorSpec>,
    total: usize,
}

impl Builder {
    fn tensor(&mut self, name: String, shape: Vec<usize>) -> usize {
        let len = shape.iter().product();
        let offset = self.total;
        self.specs.push(TensorSpec { name, shape, offset, len });
        self.total += len;
        offset
    }

    fn linear(&mut self, name: &str, fan_in: usize, fan_out: usize) -> LinearSlots {
        let w = self.tensor(alloc::format!("{name}.weight"), vec![fan_in, fan_out]);
        let b = self.tensor(alloc::format!("{name}.bias"), vec![fan_out]);
        LinearSlots { w, b, fan_in, fan_out }
    }

    fn norm(&mut self, name: &str, dim: usize) -> NormSlots {
        let g = self.tensor(alloc::format!("{name}.gain"), vec![dim]);
        let b = self.tensor(alloc::format!("{name}.bias"), vec![dim]);
        NormSlots { g, b }
    }

    fn attn(&mut self, name: &str, d: usize) -> AttnSlots {
        AttnSlots {
            q: self.linear(&alloc::format!("{name}.query"), d, d),
            k: self.linear(&alloc::format!("{name}.key"), d, d),
            v: self.linear(&alloc::format!("{name}.value"), d, d),
            o: self.linear(&alloc::format!("{name}.out"), d, d),
        }
    }
}

impl Layout {
    pub fn new(c: &PolicyConfig) -> Self {
        let d = c.d_model;
        let mut b = Builder { specs: Vec::new(), total: 0 };
        let pe = b.linear("pe_proj", N_FEATURES, d);
        let de = b.linear("de_proj", N_FEATURES, d);
        let ln1 = b.norm("encoder.norm1", d);
        let enc = b.attn("encoder.attn", d);
        let ln2 = b.norm("encoder.norm2", d);
        let ff1 = b.linear("encoder.ff1", d, c.d_ff);
        let ff2 = b.linear("encoder.ff2", c.d_ff, d);
        let lnq = b.norm("decoder.norm_q", d);
        let lnkv = b.norm("decoder.norm_kv", d);
        let dec = b.attn("decoder.attn", d);
        let ln_out = b.norm("decoder.norm_out", d);
        let mu = b.linear("mu_head", d, c.n_actions);
        let sigma = b.linear("sigma_head", d, c.n_actions);
        let critic1 = b.linear("critic.hidden", d, c.critic_hidden);
        let critic2 = b.linear("critic.out", c.critic_hidden, 1);
        Layout {
            pe,
            de,
            ln1,
            enc,
            ln2,
            ff1,
            ff2,
            lnq,
            lnkv,
            dec,
            ln_out,
            mu,
            sigma,
            critic1,
            critic2,
            specs: b.specs,
            total: b.total,
        }
    }

    fn norms(&self) -> [NormSlots; 5] {
        [self.ln1, self.ln2, self.lnq, self.lnkv, self.ln_out]
    }
}

/// All trainable parameters in one flat buffer, tensors in declaration order.
#[derive(Debug, Clone)]
pub struct PolicyParams<T: Real> {
    config: PolicyConfig,
    pub(crate) layout: Layout,
    data: Vec<T>,
    version: u64,
}

impl<T: Real> PartialEq for PolicyParams<T> {
    fn eq(&self, other: &Self) -> bool {
        self.config == other.config && self.data == other.data
    }
}

impl<T: Real> PolicyParams<T> {
    /// Uniform in `±1/sqrt(fan_in)`; layer-norm gains 1, biases 0.
    pub fn init(config: PolicyConfig, rng: &mut StreamRng) -> Result<Self> {
        config.validate()?;
        let layout = Layout::new(&config);
        let mut data = vec![T::zero(); layout.total];
        let is_norm = |offset: usize| layout.norms().iter().any(|n| n.g == offset || n.b == offset);
        for (i, spec) in layout.specs.iter().enumerate() {
            let slice = &mut data[spec.offset..spec.offset + spec.len];
            if is_norm(spec.offset) {
                let gain = layout.norms().iter().any(|n| n.g == spec.offset);
                let v = if gain { T::one() } else { T::zero() };
                slice.iter_mut().for_each(|x| *x = v);
                continue;
            }
            // a bias takes the fan-in of the weight declared just before it
            let fan_in = if spec.shape.len() == 2 { spec.shape[0] } else { layout.specs[i - 1].shape[0] };
            let bound = 1.0 / (fan_in as f64).sqrt();
            for x in slice.iter_mut() {
                *x = T::of(rng.random_range(-bound..bound));
            }
        }
        Ok(Self { config, layout, data, version: 0 })
    }

    /// Wraps an existing buffer laid out for `config`.
    pub fn from_flat(config: PolicyConfig, data: Vec<T>) -> Result<Self> {
        config.validate()?;
        let layout = Layout::new(&config);
        if data.len() != layout.total {
            return Err(Error::Shape {
                expected: layout.total,
                got: data.len(),
            });
        }
        Ok(Self { config, layout, data, version: 0 })
    }

    pub fn config(&self) -> PolicyConfig {
        self.config
    }

    pub fn specs(&self) -> &[TensorSpec] {
        &self.layout.specs
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn flat(&self) -> &[T] {
        &self.data
    }

    /// Mutable access; invalidates outstanding forward caches.
    pub fn flat_mut(&mut self) -> &mut [T] {
        self.version += 1;
        &mut self.data
    }

    pub fn version(&self) -> u64 {
        self.version
    }

    pub fn tensor(&self, name: &str) -> Option<&[T]> {
        self.layout
            .specs
            .iter()
            .find(|s| s.name == name)
            .map(|s| &self.data[s.offset..s.offset + s.len])
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// Same parameters in another precision.
    pub fn cast<U: Real>(&self) -> PolicyParams<U> {
        PolicyParams {
            config: self.config,
            layout: self.layout.clone(),
            data: self.data.iter().map(|x| U::of(x.f64())).collect(),
            version: 0,
        }
    }
}
