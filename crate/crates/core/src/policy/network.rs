use alloc::vec;

use super::gaussian::{GaussianHead, SIGMA_MAX, SIGMA_MIN};
use super::layers::{
    add_into, attn_bwd, attn_fwd, linear_bwd, linear_fwd, norm_bwd, norm_fwd, relu_bwd, relu_in_place, AttnCache,
    NormCache, Sets,
};
use super::params::PolicyParams;
use super::real::Real;
use crate::error::{Error, Result};
use crate::mdp::{StateMatrix, N_FEATURES};
use crate::prelude::*;

/// Activations kept for the backward pass.
#[derive(Debug, Clone)]
pub struct ForwardCache<T: Real> {
    version: u64,
    sets: Sets,
    x: Vec<T>,
    ln1: NormCache<T>,
    enc: AttnCache<T>,
    ln2: NormCache<T>,
    ln2_out: Vec<T>,
    ff_act: Vec<T>,
    lnq: NormCache<T>,
    lnkv: NormCache<T>,
    dec: AttnCache<T>,
    ln_out: NormCache<T>,
    lo: Vec<T>,
    t_mu: Vec<T>,
    t_sigma: Vec<T>,
    pool: Vec<T>,
    critic_act: Vec<T>,
}

impl<T: Real> ForwardCache<T> {
    pub fn batch(&self) -> usize {
        self.sets.batch
    }

    pub fn tokens(&self) -> usize {
        self.sets.tokens
    }

    /// The network input, `batch * tokens` rows of features.
    pub fn input(&self) -> &[T] {
        &self.x
    }
}

/// Heads and critic value for a batch of populations.
#[derive(Debug, Clone)]
pub struct PolicyOutput {
    pub heads: Vec<GaussianHead>,
    pub values: Vec<f64>,
}

/// Runs the actor-critic on one population.
pub fn forward<T: Real>(params: &PolicyParams<T>, state: &StateMatrix) -> Result<(GaussianHead, f64, ForwardCache<T>)> {
    let (mut out, cache) = forward_batch(params, &[state])?;
    let head = out.heads.pop().expect("one set");
    Ok((head, out.values[0], cache))
}

/// Runs the actor-critic on several populations of equal size at once.
pub fn forward_batch<T: Real>(params: &PolicyParams<T>, states: &[&StateMatrix]) -> Result<(PolicyOutput, ForwardCache<T>)> {
    let tokens = states.first().map_or(0, |s| s.len());
    if tokens == 0 {
        return Err(Error::Shape { expected: 1, got: 0 });
    }
    let mut x = Vec::with_capacity(states.len() * tokens * N_FEATURES);
    for s in states {
        if s.len() != tokens {
            return Err(Error::Shape {
                expected: tokens,
                got: s.len(),
            });
        }
        for row in &s.rows {
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("policy input"));
            }
            x.extend(row.iter().map(|&v| T::of(v)));
        }
    }
    Ok(run_forward(params, x, states.len(), tokens))
}

fn run_forward<T: Real>(params: &PolicyParams<T>, x: Vec<T>, batch: usize, tokens: usize) -> (PolicyOutput, ForwardCache<T>) {
    let cfg = params.config();
    let l = &params.layout;
    let p = params.flat();
    let d = cfg.d_model;
    let m = cfg.n_actions;
    let rows = batch * tokens;
    let sets = Sets {
        batch,
        tokens,
        width: d,
        heads: cfg.heads,
    };

    let pe = linear_fwd(p, l.pe, &x, rows);
    let de = linear_fwd(p, l.de, &x, rows);

    let (ln1_out, ln1) = norm_fwd(p, l.ln1, &pe, d);
    let (attn_out, enc) = attn_fwd(p, l.enc, ln1_out, None, sets);
    let mut h = pe;
    add_into(&mut h, &attn_out);
    let (ln2_out, ln2) = norm_fwd(p, l.ln2, &h, d);
    let mut ff_act = linear_fwd(p, l.ff1, &ln2_out, rows);
    relu_in_place(&mut ff_act);
    let ff_out = linear_fwd(p, l.ff2, &ff_act, rows);
    let mut fipe = h;
    add_into(&mut fipe, &ff_out);

    let (lnq_out, lnq) = norm_fwd(p, l.lnq, &de, d);
    let (lnkv_out, lnkv) = norm_fwd(p, l.lnkv, &fipe, d);
    let (cross, dec) = attn_fwd(p, l.dec, lnq_out, Some(lnkv_out), sets);
    let mut dd = de;
    add_into(&mut dd, &cross);
    let (lo, ln_out) = norm_fwd(p, l.ln_out, &dd, d);

    let mut t_mu = linear_fwd(p, l.mu, &lo, rows);
    let mut t_sigma = linear_fwd(p, l.sigma, &lo, rows);
    t_mu.iter_mut().for_each(|v| *v = v.tanh());
    t_sigma.iter_mut().for_each(|v| *v = v.tanh());

    let inv_n = T::of(1.0 / tokens as f64);
    let mut pool = vec![T::zero(); batch * d];
    for b in 0..batch {
        let acc = &mut pool[b * d..(b + 1) * d];
        for r in 0..tokens {
            add_into(acc, &lo[(b * tokens + r) * d..(b * tokens + r + 1) * d]);
        }
        acc.iter_mut().for_each(|v| *v = *v * inv_n);
    }
    let mut critic_act = linear_fwd(p, l.critic1, &pool, batch);
    relu_in_place(&mut critic_act);
    let values = linear_fwd(p, l.critic2, &critic_act, batch);

    let span = SIGMA_MAX - SIGMA_MIN;
    let heads = (0..batch)
        .map(|b| {
            let r = b * tokens * m..(b + 1) * tokens * m;
            GaussianHead {
                n_actions: m,
                mu: t_mu[r.clone()].iter().map(|t| (t.f64() + 1.0) / 2.0).collect(),
                sigma: t_sigma[r]
                    .iter()
                    .map(|t| (SIGMA_MIN + span * (t.f64() + 1.0) / 2.0).clamp(SIGMA_MIN, SIGMA_MAX))
                    .collect(),
            }
        })
        .collect();
    let out = PolicyOutput {
        heads,
        values: values.iter().map(|v| v.f64()).collect(),
    };
    let cache = ForwardCache {
        version: params.version(),
        sets,
        x,
        ln1,
        enc,
        ln2,
        ln2_out,
        ff_act,
        lnq,
        lnkv,
        dec,
        ln_out,
        lo,
        t_mu,
        t_sigma,
        pool,
        critic_act,
    };
    (out, cache)
}

/// Gradient of a scalar loss with respect to every parameter, given the
/// loss gradients with respect to `mu`, `sigma` (row-major, sets
/// concatenated) and the per-set values.
pub fn backward<T: Real>(
    params: &PolicyParams<T>,
    cache: &ForwardCache<T>,
    d_mu: &[f64],
    d_sigma: &[f64],
    d_value: &[f64],
) -> Result<Vec<T>> {
    if cache.version != params.version() {
        return Err(Error::Config("forward cache is stale"));
    }
    let cfg = params.config();
    let l = &params.layout;
    let p = params.flat();
    let sets = cache.sets;
    let (batch, tokens, d, m) = (sets.batch, sets.tokens, cfg.d_model, cfg.n_actions);
    let rows = batch * tokens;
    for (len, want) in [(d_mu.len(), rows * m), (d_sigma.len(), rows * m), (d_value.len(), batch)] {
        if len != want {
            return Err(Error::Shape { expected: want, got: len });
        }
    }
    let mut g = vec![T::zero(); params.len()];

    let span = SIGMA_MAX - SIGMA_MIN;
    let dz_mu: Vec<T> = d_mu
        .iter()
        .zip(&cache.t_mu)
        .map(|(&dm, &t)| T::of(dm * 0.5) * (T::one() - t * t))
        .collect();
    let dz_sigma: Vec<T> = d_sigma
        .iter()
        .zip(&cache.t_sigma)
        .map(|(&ds, &t)| T::of(ds * span * 0.5) * (T::one() - t * t))
        .collect();
    let mut d_lo = linear_bwd(p, &mut g, l.mu, &cache.lo, &dz_mu, rows, true).expect("dx requested");
    let d_lo_s = linear_bwd(p, &mut g, l.sigma, &cache.lo, &dz_sigma, rows, true).expect("dx requested");
    add_into(&mut d_lo, &d_lo_s);

    let dv: Vec<T> = d_value.iter().map(|&v| T::of(v)).collect();
    let mut d_hidden = linear_bwd(p, &mut g, l.critic2, &cache.critic_act, &dv, batch, true).expect("dx requested");
    relu_bwd(&cache.critic_act, &mut d_hidden);
    let d_pool = linear_bwd(p, &mut g, l.critic1, &cache.pool, &d_hidden, batch, true).expect("dx requested");
    let inv_n = T::of(1.0 / tokens as f64);
    for b in 0..batch {
        let dp = &d_pool[b * d..(b + 1) * d];
        for r in 0..tokens {
            let row = &mut d_lo[(b * tokens + r) * d..(b * tokens + r + 1) * d];
            for (acc, &v) in row.iter_mut().zip(dp) {
                *acc = *acc + v * inv_n;
            }
        }
    }

    let mut d_dd = vec![T::zero(); rows * d];
    norm_bwd(p, &mut g, l.ln_out, &cache.ln_out, &d_lo, &mut d_dd, d);
    let (d_lnq, d_lnkv) = attn_bwd(p, &mut g, l.dec, &cache.dec, &d_dd, sets);
    let mut d_de = d_dd;
    norm_bwd(p, &mut g, l.lnq, &cache.lnq, &d_lnq, &mut d_de, d);
    let mut d_fipe = vec![T::zero(); rows * d];
    norm_bwd(p, &mut g, l.lnkv, &cache.lnkv, &d_lnkv, &mut d_fipe, d);

    let mut d_act = linear_bwd(p, &mut g, l.ff2, &cache.ff_act, &d_fipe, rows, true).expect("dx requested");
    relu_bwd(&cache.ff_act, &mut d_act);
    let d_ln2 = linear_bwd(p, &mut g, l.ff1, &cache.ln2_out, &d_act, rows, true).expect("dx requested");
    let mut d_h = d_fipe;
    norm_bwd(p, &mut g, l.ln2, &cache.ln2, &d_ln2, &mut d_h, d);
    let (mut d_ln1, d_ln1_kv) = attn_bwd(p, &mut g, l.enc, &cache.enc, &d_h, sets);
    add_into(&mut d_ln1, &d_ln1_kv);
    let mut d_pe = d_h;
    norm_bwd(p, &mut g, l.ln1, &cache.ln1, &d_ln1, &mut d_pe, d);

    linear_bwd(p, &mut g, l.pe, &cache.x, &d_pe, rows, false);
    linear_bwd(p, &mut g, l.de, &cache.x, &d_de, rows, false);
    Ok(g)
}
