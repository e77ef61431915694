//! Small dense networks with hand-rolled reverse-mode differentiation.
//!
//! The backbone is two ELU hidden layers of [128, 64] with D2RL wiring:
//! the raw observation is concatenated onto every hidden layer's input
//! (here: the second layer; the first already consumes the observation).

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub const HIDDEN: [usize; 2] = [128, 64];

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Linear {
    pub in_dim: usize,
    pub out_dim: usize,
    /// Row-major (out_dim x in_dim).
    pub w: Vec<f64>,
    pub b: Vec<f64>,
}

impl Linear {
    fn new(in_dim: usize, out_dim: usize, scale: f64, rng: &mut ChaCha8Rng) -> Self {
        // Uniform Xavier-style init scaled by `scale`.
        let limit = scale * (6.0 / (in_dim + out_dim) as f64).sqrt();
        Linear {
            in_dim,
            out_dim,
            w: (0..in_dim * out_dim)
                .map(|_| rng.gen_range(-limit..limit))
                .collect(),
            b: vec![0.0; out_dim],
        }
    }

    fn forward(&self, x: &[f64], y: &mut Vec<f64>) {
        y.clear();
        for o in 0..self.out_dim {
            let row = &self.w[o * self.in_dim..(o + 1) * self.in_dim];
            let mut acc = self.b[o];
            for (wi, xi) in row.iter().zip(x) {
                acc += wi * xi;
            }
            y.push(acc);
        }
    }

    /// Accumulates dw/db from (x, dy) and adds the input gradient into dx.
    fn backward(&self, x: &[f64], dy: &[f64], dx: &mut [f64], grads: &mut LinearGrads) {
        for (o, g) in dy.iter().enumerate().take(self.out_dim) {
            let g = *g;
            grads.db[o] += g;
            let row = &self.w[o * self.in_dim..(o + 1) * self.in_dim];
            let drow = &mut grads.dw[o * self.in_dim..(o + 1) * self.in_dim];
            for i in 0..self.in_dim {
                drow[i] += g * x[i];
                dx[i] += g * row[i];
            }
        }
    }

    fn param_count(&self) -> usize {
        self.w.len() + self.b.len()
    }
}

#[derive(Debug, Clone)]
pub struct LinearGrads {
    pub dw: Vec<f64>,
    pub db: Vec<f64>,
}

impl LinearGrads {
    fn zeros(layer: &Linear) -> Self {
        LinearGrads {
            dw: vec![0.0; layer.w.len()],
            db: vec![0.0; layer.b.len()],
        }
    }
}

#[inline]
fn elu(z: f64) -> f64 {
    if z > 0.0 {
        z
    } else {
        z.exp() - 1.0
    }
}

#[inline]
fn elu_deriv(z: f64) -> f64 {
    if z > 0.0 {
        1.0
    } else {
        z.exp()
    }
}

/// Two-hidden-layer ELU network with the observation concatenated onto the
/// second hidden layer's input.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct D2rlNet {
    pub l1: Linear,
    pub l2: Linear,
    pub head: Linear,
}

/// Intermediate activations retained for the backward pass.
#[derive(Debug, Clone, Default)]
pub struct ForwardCache {
    x: Vec<f64>,
    z1: Vec<f64>,
    cat: Vec<f64>, // [elu(z1); x]
    z2: Vec<f64>,
    h2: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct NetGrads {
    pub l1: LinearGrads,
    pub l2: LinearGrads,
    pub head: LinearGrads,
}

impl D2rlNet {
    pub fn new(in_dim: usize, out_dim: usize, head_scale: f64, rng: &mut ChaCha8Rng) -> Self {
        D2rlNet {
            l1: Linear::new(in_dim, HIDDEN[0], 1.0, rng),
            l2: Linear::new(HIDDEN[0] + in_dim, HIDDEN[1], 1.0, rng),
            head: Linear::new(HIDDEN[1], out_dim, head_scale, rng),
        }
    }

    pub fn in_dim(&self) -> usize {
        self.l1.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.head.out_dim
    }

    pub fn forward(&self, x: &[f64], out: &mut Vec<f64>, cache: &mut ForwardCache) {
        debug_assert_eq!(x.len(), self.l1.in_dim);
        cache.x.clear();
        cache.x.extend_from_slice(x);
        self.l1.forward(x, &mut cache.z1);
        cache.cat.clear();
        cache.cat.extend(cache.z1.iter().map(|z| elu(*z)));
        cache.cat.extend_from_slice(x);
        self.l2.forward(&cache.cat, &mut cache.z2);
        cache.h2.clear();
        cache.h2.extend(cache.z2.iter().map(|z| elu(*z)));
        self.head.forward(&cache.h2, out);
    }

    /// Convenience forward without gradient bookkeeping.
    pub fn infer(&self, x: &[f64]) -> Vec<f64> {
        let mut out = Vec::new();
        let mut cache = ForwardCache::default();
        self.forward(x, &mut out, &mut cache);
        out
    }

    /// Accumulates parameter gradients for d(loss)/d(out) = `dout`.
    pub fn backward(&self, cache: &ForwardCache, dout: &[f64], grads: &mut NetGrads) {
        let mut dh2 = vec![0.0; self.l2.out_dim];
        self.head.backward(&cache.h2, dout, &mut dh2, &mut grads.head);

        let dz2: Vec<f64> = dh2
            .iter()
            .zip(&cache.z2)
            .map(|(d, z)| d * elu_deriv(*z))
            .collect();
        let mut dcat = vec![0.0; self.l2.in_dim];
        self.l2.backward(&cache.cat, &dz2, &mut dcat, &mut grads.l2);

        // The concatenated input splits into [h1; x]; the x part needs no
        // gradient (inputs are constants).
        let dz1: Vec<f64> = dcat[..self.l1.out_dim]
            .iter()
            .zip(&cache.z1)
            .map(|(d, z)| d * elu_deriv(*z))
            .collect();
        let mut dx = vec![0.0; self.l1.in_dim];
        self.l1.backward(&cache.x, &dz1, &mut dx, &mut grads.l1);
    }

    pub fn zero_grads(&self) -> NetGrads {
        NetGrads {
            l1: LinearGrads::zeros(&self.l1),
            l2: LinearGrads::zeros(&self.l2),
            head: LinearGrads::zeros(&self.head),
        }
    }

    pub fn param_count(&self) -> usize {
        self.l1.param_count() + self.l2.param_count() + self.head.param_count()
    }

    pub fn flatten_params(&self, out: &mut Vec<f64>) {
        for layer in [&self.l1, &self.l2, &self.head] {
            out.extend_from_slice(&layer.w);
            out.extend_from_slice(&layer.b);
        }
    }

    pub fn unflatten_params(&mut self, params: &[f64]) -> usize {
        let mut i = 0;
        for layer in [&mut self.l1, &mut self.l2, &mut self.head] {
            let nw = layer.w.len();
            layer.w.copy_from_slice(&params[i..i + nw]);
            i += nw;
            let nb = layer.b.len();
            layer.b.copy_from_slice(&params[i..i + nb]);
            i += nb;
        }
        i
    }

    pub fn flatten_grads(grads: &NetGrads, out: &mut Vec<f64>) {
        for g in [&grads.l1, &grads.l2, &grads.head] {
            out.extend_from_slice(&g.dw);
            out.extend_from_slice(&g.db);
        }
    }
}

/// Central finite-difference check of `analytic` against `loss` at
/// `params`; returns the maximum relative error over all coordinates.
pub fn gradient_check(
    loss: &mut dyn FnMut(&[f64]) -> f64,
    params: &[f64],
    analytic: &[f64],
    rel_step: f64,
) -> f64 {
    assert_eq!(params.len(), analytic.len());
    let mut p = params.to_vec();
    let mut max_rel = 0.0f64;
    for i in 0..p.len() {
        let h = rel_step * p[i].abs().max(1.0);
        let orig = p[i];
        p[i] = orig + h;
        let f_plus = loss(&p);
        p[i] = orig - h;
        let f_minus = loss(&p);
        p[i] = orig;
        let fd = (f_plus - f_minus) / (2.0 * h);
        let denom = fd.abs().max(analytic[i].abs()).max(1e-6);
        max_rel = max_rel.max((fd - analytic[i]).abs() / denom);
    }
    max_rel
}
