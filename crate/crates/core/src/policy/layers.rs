//! Dense building blocks with explicit backward passes. Activations are
//! row-major `rows x width` buffers.

use alloc::vec;

use super::params::{AttnSlots, LinearSlots, NormSlots};
use super::real::{gemm, Real, View};
use crate::prelude::*;

pub(crate) const LN_EPS: f64 = 1e-5;

pub(crate) fn linear_fwd<T: Real>(p: &[T], s: LinearSlots, x: &[T], rows: usize) -> Vec<T> {
    let w = &p[s.w..s.w + s.fan_in * s.fan_out];
    let b = &p[s.b..s.b + s.fan_out];
    let mut y: Vec<T> = Vec::with_capacity(rows * s.fan_out);
    for _ in 0..rows {
        y.extend_from_slice(b);
    }
    gemm(
        T::one(),
        x,
        View::dense(rows, s.fan_in),
        w,
        View::dense(s.fan_in, s.fan_out),
        T::one(),
        &mut y,
        View::dense(rows, s.fan_out),
    );
    y
}

/// Accumulates weight and bias gradients; returns `dy * W^T` when asked.
pub(crate) fn linear_bwd<T: Real>(
    p: &[T],
    g: &mut [T],
    s: LinearSlots,
    x: &[T],
    dy: &[T],
    rows: usize,
    want_dx: bool,
) -> Option<Vec<T>> {
    let (fi, fo) = (s.fan_in, s.fan_out);
    gemm(
        T::one(),
        x,
        View::dense(rows, fi).t(),
        dy,
        View::dense(rows, fo),
        T::one(),
        &mut g[s.w..s.w + fi * fo],
        View::dense(fi, fo),
    );
    let gb = &mut g[s.b..s.b + fo];
    for r in 0..rows {
        for (acc, &d) in gb.iter_mut().zip(&dy[r * fo..(r + 1) * fo]) {
            *acc = *acc + d;
        }
    }
    if !want_dx {
        return None;
    }
    let mut dx = vec![T::zero(); rows * fi];
    gemm(
        T::one(),
        dy,
        View::dense(rows, fo),
        &p[s.w..s.w + fi * fo],
        View::dense(fi, fo).t(),
        T::zero(),
        &mut dx,
        View::dense(rows, fi),
    );
    Some(dx)
}

#[derive(Debug, Clone)]
pub(crate) struct NormCache<T> {
    xhat: Vec<T>,
    rstd: Vec<T>,
}

pub(crate) fn norm_fwd<T: Real>(p: &[T], s: NormSlots, x: &[T], width: usize) -> (Vec<T>, NormCache<T>) {
    let rows = x.len() / width;
    let g = &p[s.g..s.g + width];
    let b = &p[s.b..s.b + width];
    let inv_w = T::of(1.0 / width as f64);
    let eps = T::of(LN_EPS);
    let mut xhat = vec![T::zero(); x.len()];
    let mut y = vec![T::zero(); x.len()];
    let mut rstd = Vec::with_capacity(rows);
    for r in 0..rows {
        let row = &x[r * width..(r + 1) * width];
        let mean = row.iter().copied().sum::<T>() * inv_w;
        let var = row.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() * inv_w;
        let rs = T::one() / (var + eps).sqrt();
        rstd.push(rs);
        for j in 0..width {
            let h = (row[j] - mean) * rs;
            xhat[r * width + j] = h;
            y[r * width + j] = g[j] * h + b[j];
        }
    }
    (y, NormCache { xhat, rstd })
}

/// Adds the input gradient into `dx`.
pub(crate) fn norm_bwd<T: Real>(p: &[T], grad: &mut [T], s: NormSlots, c: &NormCache<T>, dy: &[T], dx: &mut [T], width: usize) {
    let rows = c.rstd.len();
    let inv_w = T::of(1.0 / width as f64);
    let mut dxhat = vec![T::zero(); width];
    for r in 0..rows {
        let xh = &c.xhat[r * width..(r + 1) * width];
        let d = &dy[r * width..(r + 1) * width];
        let mut mean_d = T::zero();
        let mut mean_dx = T::zero();
        for j in 0..width {
            grad[s.g + j] = grad[s.g + j] + d[j] * xh[j];
            grad[s.b + j] = grad[s.b + j] + d[j];
            dxhat[j] = d[j] * p[s.g + j];
            mean_d = mean_d + dxhat[j];
            mean_dx = mean_dx + dxhat[j] * xh[j];
        }
        mean_d = mean_d * inv_w;
        mean_dx = mean_dx * inv_w;
        let rs = c.rstd[r];
        for j in 0..width {
            let v = &mut dx[r * width + j];
            *v = *v + rs * (dxhat[j] - mean_d - xh[j] * mean_dx);
        }
    }
}

/// Shape of a batch of token sets.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Sets {
    pub batch: usize,
    pub tokens: usize,
    pub width: usize,
    pub heads: usize,
}

impl Sets {
    fn rows(&self) -> usize {
        self.batch * self.tokens
    }
    fn dh(&self) -> usize {
        self.width / self.heads
    }
    fn head_view(&self, b: usize, h: usize) -> View {
        View::block(self.width, b * self.tokens, self.tokens, h * self.dh(), self.dh())
    }
    fn score_view(&self, b: usize, h: usize) -> View {
        let n = self.tokens;
        View {
            off: (b * self.heads + h) * n * n,
            rows: n,
            cols: n,
            rs: n,
            cs: 1,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct AttnCache<T> {
    q_in: Vec<T>,
    kv_in: Option<Vec<T>>,
    q: Vec<T>,
    k: Vec<T>,
    v: Vec<T>,
    probs: Vec<T>,
    o: Vec<T>,
}

/// Multi-head attention within each set. `kv_in = None` means self-attention.
pub(crate) fn attn_fwd<T: Real>(p: &[T], s: AttnSlots, q_in: Vec<T>, kv_in: Option<Vec<T>>, sh: Sets) -> (Vec<T>, AttnCache<T>) {
    let rows = sh.rows();
    let kv = kv_in.as_deref().unwrap_or(&q_in);
    let q = linear_fwd(p, s.q, &q_in, rows);
    let k = linear_fwd(p, s.k, kv, rows);
    let v = linear_fwd(p, s.v, kv, rows);
    let n = sh.tokens;
    let scale = T::of(1.0 / (sh.dh() as f64).sqrt());
    let mut probs = vec![T::zero(); sh.batch * sh.heads * n * n];
    let mut o = vec![T::zero(); rows * sh.width];
    for b in 0..sh.batch {
        for h in 0..sh.heads {
            let hv = sh.head_view(b, h);
            let sv = sh.score_view(b, h);
            gemm(scale, &q, hv, &k, hv.t(), T::zero(), &mut probs, sv);
            for row in probs[sv.off..sv.off + n * n].chunks_mut(n) {
                let m = row.iter().copied().fold(T::neg_infinity(), T::max);
                let mut z = T::zero();
                for e in row.iter_mut() {
                    *e = (*e - m).exp();
                    z = z + *e;
                }
                let inv = T::one() / z;
                row.iter_mut().for_each(|e| *e = *e * inv);
            }
            gemm(T::one(), &probs, sv, &v, hv, T::zero(), &mut o, hv);
        }
    }
    let out = linear_fwd(p, s.o, &o, rows);
    (
        out,
        AttnCache {
            q_in,
            kv_in,
            q,
            k,
            v,
            probs,
            o,
        },
    )
}

/// Returns `(d q_in, d kv_in)`; for self-attention the caller sums them.
pub(crate) fn attn_bwd<T: Real>(p: &[T], g: &mut [T], s: AttnSlots, c: &AttnCache<T>, dout: &[T], sh: Sets) -> (Vec<T>, Vec<T>) {
    let rows = sh.rows();
    let n = sh.tokens;
    let scale = T::of(1.0 / (sh.dh() as f64).sqrt());
    let d_o = linear_bwd(p, g, s.o, &c.o, dout, rows, true).expect("dx requested");
    let mut dq = vec![T::zero(); rows * sh.width];
    let mut dk = vec![T::zero(); rows * sh.width];
    let mut dv = vec![T::zero(); rows * sh.width];
    let mut dp = vec![T::zero(); n * n];
    let dpv = View::dense(n, n);
    for b in 0..sh.batch {
        for h in 0..sh.heads {
            let hv = sh.head_view(b, h);
            let sv = sh.score_view(b, h);
            gemm(T::one(), &d_o, hv, &c.v, hv.t(), T::zero(), &mut dp, dpv);
            gemm(T::one(), &c.probs, sv.t(), &d_o, hv, T::zero(), &mut dv, hv);
            let pr = &c.probs[sv.off..sv.off + n * n];
            for i in 0..n {
                let prow = &pr[i * n..(i + 1) * n];
                let drow = &mut dp[i * n..(i + 1) * n];
                let dot = prow.iter().zip(drow.iter()).map(|(&a, &b)| a * b).sum::<T>();
                for (d, &pv) in drow.iter_mut().zip(prow) {
                    *d = pv * (*d - dot) * scale;
                }
            }
            gemm(T::one(), &dp, dpv, &c.k, hv, T::zero(), &mut dq, hv);
            gemm(T::one(), &dp, dpv.t(), &c.q, hv, T::zero(), &mut dk, hv);
        }
    }
    let kv = c.kv_in.as_deref().unwrap_or(&c.q_in);
    let dq_in = linear_bwd(p, g, s.q, &c.q_in, &dq, rows, true).expect("dx requested");
    let mut dkv = linear_bwd(p, g, s.k, kv, &dk, rows, true).expect("dx requested");
    let dkv_v = linear_bwd(p, g, s.v, kv, &dv, rows, true).expect("dx requested");
    add_into(&mut dkv, &dkv_v);
    (dq_in, dkv)
}

pub(crate) fn add_into<T: Real>(acc: &mut [T], x: &[T]) {
    for (a, &b) in acc.iter_mut().zip(x) {
        *a = *a + b;
    }
}

pub(crate) fn relu_in_place<T: Real>(x: &mut [T]) {
    x.iter_mut().for_each(|v| *v = v.max(T::zero()));
}

/// Zeroes `dy` where the pre-activation was not positive.
pub(crate) fn relu_bwd<T: Real>(pre: &[T], dy: &mut [T]) {
    for (d, &z) in dy.iter_mut().zip(pre) {
        if z <= T::zero() {
            *d = T::zero();
        }
    }
}
