//! Parameter layout, forward pass, and cross-entropy gradients.
//!
//! Parameters live in one flat vector so that SGD and finite-difference
//! checks treat both architectures the same way:
//!
//! * logistic: `W (d x c)`, `b (c)`
//! * mlp: `W1 (d x h)`, `b1 (h)`, `W2 (h x c)`, `b2 (c)`, ReLU hidden layer
//!
//! All weight matrices are row-major with the input dimension as rows.

use crate::matrix::Matrix;
use crate::rng::SplitMix64;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Architecture {
    Logistic { dim: usize, classes: usize },
    Mlp { dim: usize, hidden: usize, classes: usize },
}

impl Architecture {
    pub fn dim(&self) -> usize {
        match *self {
            Self::Logistic { dim, .. } | Self::Mlp { dim, .. } => dim,
        }
    }

    pub fn classes(&self) -> usize {
        match *self {
            Self::Logistic { classes, .. } | Self::Mlp { classes, .. } => classes,
        }
    }

    pub fn num_params(&self) -> usize {
        match *self {
            Self::Logistic { dim, classes } => dim * classes + classes,
            Self::Mlp { dim, hidden, classes } => dim * hidden + hidden + hidden * classes + classes,
        }
    }

    /// Width of the representation returned by `embed`.
    pub fn embedding_dim(&self) -> usize {
        match *self {
            Self::Logistic { dim, .. } => dim,
            Self::Mlp { hidden, .. } => hidden,
        }
    }
}

/// Loss, gradient and pre-update correctness for one mini-batch.
pub struct BatchGradient<T> {
    pub loss: T,
    pub grad: Vec<T>,
    pub correct: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Network<T> {
    arch: Architecture,
    params: Vec<T>,
}

impl<T: Scalar> Network<T> {
    /// Logistic weights start at zero. MLP weights are drawn from
    /// `U(-1/sqrt(fan_in), 1/sqrt(fan_in))` in layout order; biases are zero.
    pub fn init(arch: Architecture, rng: &mut SplitMix64) -> Self {
        let mut params = vec![T::zero(); arch.num_params()];
        if let Architecture::Mlp { dim, hidden, classes } = arch {
            let a1 = 1.0 / (dim as f64).sqrt();
            for w in &mut params[..dim * hidden] {
                *w = T::of(rng.uniform(-a1, a1));
            }
            let a2 = 1.0 / (hidden as f64).sqrt();
            let w2 = dim * hidden + hidden;
            for w in &mut params[w2..w2 + hidden * classes] {
                *w = T::of(rng.uniform(-a2, a2));
            }
        }
        Self { arch, params }
    }

    pub fn arch(&self) -> Architecture {
        self.arch
    }

    pub fn params(&self) -> &[T] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [T] {
        &mut self.params
    }

    /// Hidden activations (mlp only) and logits for one input row.
    fn forward_row(&self, x: &[T], hidden_out: &mut Vec<T>, logits: &mut Vec<T>) {
        let p = &self.params;
        match self.arch {
            Architecture::Logistic { dim, classes } => {
                affine(x, &p[..dim * classes], &p[dim * classes..], classes, logits);
            }
            Architecture::Mlp { dim, hidden, classes } => {
                let (w1, rest) = p.split_at(dim * hidden);
                let (b1, rest) = rest.split_at(hidden);
                let (w2, b2) = rest.split_at(hidden * classes);
                affine(x, w1, b1, hidden, hidden_out);
                for h in hidden_out.iter_mut() {
                    *h = h.max(T::zero());
                }
                affine(hidden_out, w2, b2, classes, logits);
            }
        }
    }

    pub fn logits(&self, x: &[T]) -> Vec<T> {
        let mut h = Vec::new();
        let mut z = Vec::new();
        self.forward_row(x, &mut h, &mut z);
        z
    }

    pub fn probabilities(&self, x: &[T]) -> Vec<T> {
        let mut z = self.logits(x);
        softmax_in_place(&mut z);
        z
    }

    /// Post-activation hidden layer for the mlp, the input itself for logistic.
    pub fn embedding(&self, x: &[T]) -> Vec<T> {
        match self.arch {
            Architecture::Logistic { .. } => x.to_vec(),
            Architecture::Mlp { .. } => {
                let mut h = Vec::new();
                let mut z = Vec::new();
                self.forward_row(x, &mut h, &mut z);
                h
            }
        }
    }

    /// Mean cross-entropy over `rows` of `x`.
    pub fn loss(&self, x: &Matrix<T>, labels: &[usize], rows: &[usize]) -> T {
        let mut h = Vec::new();
        let mut z = Vec::new();
        let mut total = T::zero();
        for &i in rows {
            self.forward_row(x.row(i), &mut h, &mut z);
            total += cross_entropy(&z, labels[i]);
        }
        total / T::of(rows.len() as f64)
    }

    /// Mean cross-entropy and its gradient over `rows`, plus whether each
    /// row was classified correctly by the current parameters.
    pub fn batch_gradient(&self, x: &Matrix<T>, labels: &[usize], rows: &[usize]) -> BatchGradient<T> {
        let mut grad = vec![T::zero(); self.params.len()];
        let mut correct = Vec::with_capacity(rows.len());
        let mut loss = T::zero();
        let mut h = Vec::new();
        let mut z = Vec::new();
        let mut dh = Vec::new();

        for &i in rows {
            let xi = x.row(i);
            let y = labels[i];
            self.forward_row(xi, &mut h, &mut z);
            correct.push(argmax(&z) == y);
            loss += cross_entropy(&z, y);
            // z becomes dL/dz = softmax(z) - onehot(y)
            softmax_in_place(&mut z);
            z[y] -= T::one();

            match self.arch {
                Architecture::Logistic { dim, classes } => {
                    let (gw, gb) = grad.split_at_mut(dim * classes);
                    outer_acc(xi, &z, gw, gb);
                }
                Architecture::Mlp { dim, hidden, classes } => {
                    let w2_off = dim * hidden + hidden;
                    let w2 = &self.params[w2_off..w2_off + hidden * classes];
                    dh.clear();
                    dh.extend((0..hidden).map(|j| {
                        if h[j] > T::zero() {
                            w2[j * classes..(j + 1) * classes].iter().zip(&z).map(|(&w, &g)| w * g).sum()
                        } else {
                            T::zero()
                        }
                    }));
                    let (g1, g2) = grad.split_at_mut(w2_off);
                    let (gw1, gb1) = g1.split_at_mut(dim * hidden);
                    let (gw2, gb2) = g2.split_at_mut(hidden * classes);
                    outer_acc(&h, &z, gw2, gb2);
                    outer_acc(xi, &dh, gw1, gb1);
                }
            }
        }

        let scale = T::one() / T::of(rows.len() as f64);
        for g in &mut grad {
            *g *= scale;
        }
        BatchGradient { loss: loss * scale, grad, correct }
    }

    pub fn sgd_step(&mut self, grad: &[T], learning_rate: T) {
        for (p, g) in self.params.iter_mut().zip(grad) {
            *p -= learning_rate * *g;
        }
    }
}

/// `out = x W + b` with `W` row-major `(x.len() x width)`.
#[inline]
fn affine<T: Scalar>(x: &[T], w: &[T], b: &[T], width: usize, out: &mut Vec<T>) {
    out.clear();
    out.extend_from_slice(b);
    for (k, &xk) in x.iter().enumerate() {
        if xk == T::zero() {
            continue;
        }
        for (o, &wkj) in out.iter_mut().zip(&w[k * width..(k + 1) * width]) {
            *o += xk * wkj;
        }
    }
}

/// `gw += x (outer) g`, `gb += g`.
#[inline]
fn outer_acc<T: Scalar>(x: &[T], g: &[T], gw: &mut [T], gb: &mut [T]) {
    let width = g.len();
    for (k, &xk) in x.iter().enumerate() {
        if xk == T::zero() {
            continue;
        }
        for (w, &gj) in gw[k * width..(k + 1) * width].iter_mut().zip(g) {
            *w += xk * gj;
        }
    }
    for (b, &gj) in gb.iter_mut().zip(g) {
        *b += gj;
    }
}

/// First index of the maximum.
pub(crate) fn argmax<T: Scalar>(z: &[T]) -> usize {
    let mut best = 0;
    for (j, &v) in z.iter().enumerate().skip(1) {
        if v > z[best] {
            best = j;
        }
    }
    best
}

pub(crate) fn softmax_in_place<T: Scalar>(z: &mut [T]) {
    let max = z.iter().copied().fold(T::neg_infinity(), T::max);
    let mut sum = T::zero();
    for v in z.iter_mut() {
        *v = (*v - max).exp();
        sum += *v;
    }
    for v in z.iter_mut() {
        *v /= sum;
    }
}

fn cross_entropy<T: Scalar>(z: &[T], y: usize) -> T {
    let max = z.iter().copied().fold(T::neg_infinity(), T::max);
    let lse = max + z.iter().map(|&v| (v - max).exp()).sum::<T>().ln();
    lse - z[y]
}
