//! Contrastive pretraining of an encoder over CTRL embeddings.
//!
//! The encoder is a two-hidden-layer rectifier MLP with a linear projection
//! head. The NT-Xent loss pulls each graph's latent toward the latent of its
//! augmented view and pushes it away from the augmented views of the other
//! graphs in the batch; the denominator averages over those negatives.
//! Backpropagation is written out by hand so gradients can be verified
//! against finite differences.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::rng::{derive_seed, derive_seed_indexed, rng_from};
use crate::{Error, Result};

/// Weights and biases for input d → hidden h → hidden h → projection p.
#[derive(Debug, Clone, PartialEq)]
pub struct EncoderParams {
    pub w1: DMatrix<f64>,
    pub b1: DVector<f64>,
    pub w2: DMatrix<f64>,
    pub b2: DVector<f64>,
    pub w3: DMatrix<f64>,
    pub b3: DVector<f64>,
}

impl EncoderParams {
    pub fn input_dim(&self) -> usize {
        self.w1.ncols()
    }

    pub fn hidden_dim(&self) -> usize {
        self.w1.nrows()
    }

    pub fn proj_dim(&self) -> usize {
        self.w3.nrows()
    }

    pub fn zeros(d: usize, h: usize, p: usize) -> Self {
        EncoderParams {
            w1: DMatrix::zeros(h, d),
            b1: DVector::zeros(h),
            w2: DMatrix::zeros(h, h),
            b2: DVector::zeros(h),
            w3: DMatrix::zeros(p, h),
            b3: DVector::zeros(p),
        }
    }

    fn assert_finite(&self) -> bool {
        self.w1.iter().all(|x| x.is_finite())
            && self.w2.iter().all(|x| x.is_finite())
            && self.w3.iter().all(|x| x.is_finite())
            && self.b1.iter().all(|x| x.is_finite())
            && self.b2.iter().all(|x| x.is_finite())
            && self.b3.iter().all(|x| x.is_finite())
    }
}

/// Same shapes as the parameters; accumulated by backprop.
#[derive(Debug, Clone)]
pub struct ParamGrads {
    pub w1: DMatrix<f64>,
    pub b1: DVector<f64>,
    pub w2: DMatrix<f64>,
    pub b2: DVector<f64>,
    pub w3: DMatrix<f64>,
    pub b3: DVector<f64>,
}

#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub temperature: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    /// 0 disables momentum (plain gradient descent).
    pub momentum: f64,
    pub hidden_dim: usize,
    pub proj_dim: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            temperature: 0.5,
            batch_size: 32,
            epochs: 40,
            learning_rate: 0.01,
            momentum: 0.9,
            hidden_dim: 128,
            proj_dim: 64,
            seed: 0,
        }
    }
}

/// Uniform Glorot-style init, biases zero.
pub fn init_params(d: usize, h: usize, p: usize, seed: u64) -> EncoderParams {
    let mut rng = rng_from(derive_seed(seed, "encoder-init"));
    let mut layer = |rows: usize, cols: usize| {
        let a = (6.0 / (rows + cols) as f64).sqrt();
        DMatrix::from_fn(rows, cols, |_, _| rng.gen_range(-a..a))
    };
    EncoderParams {
        w1: layer(h, d),
        b1: DVector::zeros(h),
        w2: layer(h, h),
        b2: DVector::zeros(h),
        w3: layer(p, h),
        b3: DVector::zeros(p),
    }
}

struct ForwardCache {
    h1_pre: DMatrix<f64>,
    h1: DMatrix<f64>,
    h2_pre: DMatrix<f64>,
    h2: DMatrix<f64>,
    z: DMatrix<f64>,
}

/// Rows of `x` are samples.
fn forward_batch(params: &EncoderParams, x: &DMatrix<f64>) -> ForwardCache {
    let ones = DVector::from_element(x.nrows(), 1.0);
    let h1_pre = x * params.w1.transpose() + &ones * params.b1.transpose();
    let h1 = h1_pre.map(|v| v.max(0.0));
    let h2_pre = &h1 * params.w2.transpose() + &ones * params.b2.transpose();
    let h2 = h2_pre.map(|v| v.max(0.0));
    let z = &h2 * params.w3.transpose() + &ones * params.b3.transpose();
    ForwardCache {
        h1_pre,
        h1,
        h2_pre,
        h2,
        z,
    }
}

fn backward_batch(
    params: &EncoderParams,
    x: &DMatrix<f64>,
    cache: &ForwardCache,
    dz: &DMatrix<f64>,
    grads: &mut ParamGrads,
) {
    grads.w3 += dz.transpose() * &cache.h2;
    grads.b3 += dz.row_sum().transpose();
    let dh2 = dz * &params.w3;
    let dh2_pre = dh2.zip_map(&cache.h2_pre, |g, pre| if pre > 0.0 { g } else { 0.0 });
    grads.w2 += dh2_pre.transpose() * &cache.h1;
    grads.b2 += dh2_pre.row_sum().transpose();
    let dh1 = &dh2_pre * &params.w2;
    let dh1_pre = dh1.zip_map(&cache.h1_pre, |g, pre| if pre > 0.0 { g } else { 0.0 });
    grads.w1 += dh1_pre.transpose() * x;
    grads.b1 += dh1_pre.row_sum().transpose();
}

/// Deterministic feedforward for one CTRL vector.
pub fn encoder_forward(params: &EncoderParams, x: &DVector<f64>) -> Result<DVector<f64>> {
    if x.len() != params.input_dim() {
        return Err(Error::ShapeMismatch(format!(
            "input dimension {} != encoder d {}",
            x.len(),
            params.input_dim()
        )));
    }
    let row = DMatrix::from_row_slice(1, x.len(), x.as_slice());
    let cache = forward_batch(params, &row);
    Ok(cache.z.row(0).transpose())
}

/// Row-wise encoding, order preserving.
pub fn encode_all(params: &EncoderParams, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if x.ncols() != params.input_dim() {
        return Err(Error::ShapeMismatch(format!(
            "input width {} != encoder d {}",
            x.ncols(),
            params.input_dim()
        )));
    }
    Ok(forward_batch(params, x).z)
}

/// NT-Xent value and gradients with respect to both latent batches.
#[derive(Debug, Clone)]
pub struct NtXent {
    pub loss: f64,
    pub grad_z: DMatrix<f64>,
    pub grad_aug: DMatrix<f64>,
    /// Latents with zero norm encountered during cosine similarity.
    pub zero_norm_latents: usize,
}

/// loss = mean_i −log[ exp(sim(z_i, z′_i)/τ) / ((1/(M−1)) Σ_{j≠i} exp(sim(z_i, z′_j)/τ)) ]
///
/// Negatives are the augmented latents of the other batch rows; the
/// denominator is their mean, not their sum. Zero-norm latents contribute
/// similarity 0 with zero gradient.
pub fn nt_xent_loss(z: &DMatrix<f64>, z_aug: &DMatrix<f64>, tau: f64) -> Result<NtXent> {
    let m = z.nrows();
    if m < 2 {
        return Err(Error::ShapeMismatch(format!(
            "NT-Xent needs at least 2 pairs, got {m}"
        )));
    }
    if z.shape() != z_aug.shape() {
        return Err(Error::ShapeMismatch(format!(
            "latent shapes differ: {:?} vs {:?}",
            z.shape(),
            z_aug.shape()
        )));
    }

    const NORM_EPS: f64 = 1e-12;
    let mut zero_norm_latents = 0;
    let norms_z: Vec<f64> = (0..m).map(|i| z.row(i).norm()).collect();
    let norms_a: Vec<f64> = (0..m).map(|i| z_aug.row(i).norm()).collect();
    zero_norm_latents += norms_z.iter().filter(|&&n| n <= NORM_EPS).count();
    zero_norm_latents += norms_a.iter().filter(|&&n| n <= NORM_EPS).count();

    // s[(i, j)] = cosine(z_i, z′_j)
    let mut sims: DMatrix<f64> = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            if norms_z[i] > NORM_EPS && norms_a[j] > NORM_EPS {
                sims[(i, j)] = z.row(i).dot(&z_aug.row(j)) / (norms_z[i] * norms_a[j]);
            }
        }
    }

    let mut loss = 0.0;
    // dL/ds, assembled row by row.
    let mut dsim: DMatrix<f64> = DMatrix::zeros(m, m);
    for i in 0..m {
        // log of the mean over negatives, computed with a shifted exp.
        let max_neg = (0..m)
            .filter(|&j| j != i)
            .map(|j| sims[(i, j)] / tau)
            .fold(f64::NEG_INFINITY, f64::max);
        let sum_exp: f64 = (0..m)
            .filter(|&j| j != i)
            .map(|j| ((sims[(i, j)] / tau) - max_neg).exp())
            .sum();
        let log_mean = max_neg + sum_exp.ln() - ((m - 1) as f64).ln();
        loss += -sims[(i, i)] / tau + log_mean;

        dsim[(i, i)] += -1.0 / (tau * m as f64);
        for j in 0..m {
            if j != i {
                let p = ((sims[(i, j)] / tau) - max_neg).exp() / sum_exp;
                dsim[(i, j)] += p / (tau * m as f64);
            }
        }
    }
    loss /= m as f64;

    // Chain through the cosine.
    let mut grad_z: DMatrix<f64> = DMatrix::zeros(m, z.ncols());
    let mut grad_aug: DMatrix<f64> = DMatrix::zeros(m, z.ncols());
    for i in 0..m {
        for j in 0..m {
            let g = dsim[(i, j)];
            if g == 0.0 || norms_z[i] <= NORM_EPS || norms_a[j] <= NORM_EPS {
                continue;
            }
            let s = sims[(i, j)];
            for c in 0..z.ncols() {
                let zi = z[(i, c)];
                let aj = z_aug[(j, c)];
                grad_z[(i, c)] += g * (aj / (norms_z[i] * norms_a[j]) - s * zi / (norms_z[i] * norms_z[i]));
                grad_aug[(j, c)] += g * (zi / (norms_z[i] * norms_a[j]) - s * aj / (norms_a[j] * norms_a[j]));
            }
        }
    }

    Ok(NtXent {
        loss,
        grad_z,
        grad_aug,
        zero_norm_latents,
    })
}

/// Loss and parameter gradients for one (original, augmented) batch pair.
pub fn loss_and_param_grads(
    params: &EncoderParams,
    x: &DMatrix<f64>,
    x_aug: &DMatrix<f64>,
    tau: f64,
) -> Result<(f64, ParamGrads)> {
    let cache = forward_batch(params, x);
    let cache_aug = forward_batch(params, x_aug);
    let nt = nt_xent_loss(&cache.z, &cache_aug.z, tau)?;
    let mut grads = ParamGrads {
        w1: DMatrix::zeros(params.w1.nrows(), params.w1.ncols()),
        b1: DVector::zeros(params.b1.len()),
        w2: DMatrix::zeros(params.w2.nrows(), params.w2.ncols()),
        b2: DVector::zeros(params.b2.len()),
        w3: DMatrix::zeros(params.w3.nrows(), params.w3.ncols()),
        b3: DVector::zeros(params.b3.len()),
    };
    backward_batch(params, x, &cache, &nt.grad_z, &mut grads);
    backward_batch(params, x_aug, &cache_aug, &nt.grad_aug, &mut grads);
    Ok((nt.loss, grads))
}

struct Momentum {
    v: ParamGrads,
    beta: f64,
}

impl Momentum {
    fn new(params: &EncoderParams, beta: f64) -> Self {
        Momentum {
            v: ParamGrads {
                w1: DMatrix::zeros(params.w1.nrows(), params.w1.ncols()),
                b1: DVector::zeros(params.b1.len()),
                w2: DMatrix::zeros(params.w2.nrows(), params.w2.ncols()),
                b2: DVector::zeros(params.b2.len()),
                w3: DMatrix::zeros(params.w3.nrows(), params.w3.ncols()),
                b3: DVector::zeros(params.b3.len()),
            },
            beta,
        }
    }

    fn step(&mut self, params: &mut EncoderParams, grads: &ParamGrads, lr: f64) {
        self.v.w1 = &self.v.w1 * self.beta + &grads.w1;
        self.v.b1 = &self.v.b1 * self.beta + &grads.b1;
        self.v.w2 = &self.v.w2 * self.beta + &grads.w2;
        self.v.b2 = &self.v.b2 * self.beta + &grads.b2;
        self.v.w3 = &self.v.w3 * self.beta + &grads.w3;
        self.v.b3 = &self.v.b3 * self.beta + &grads.b3;
        params.w1 -= &self.v.w1 * lr;
        params.b1 -= &self.v.b1 * lr;
        params.w2 -= &self.v.w2 * lr;
        params.b2 -= &self.v.b2 * lr;
        params.w3 -= &self.v.w3 * lr;
        params.b3 -= &self.v.b3 * lr;
    }
}

/// Contrastive pretraining over standardized CTRL embeddings.
///
/// `augmented_view(epoch)` returns the augmented-view feature matrix for
/// that epoch (same row order and standardization as `x`); regenerating it
/// per epoch with fresh augmentation seeds is the expected use. Batches of
/// fewer than 2 rows are skipped. Fully deterministic given the seeds.
pub fn pretrain<F>(
    x: &DMatrix<f64>,
    mut augmented_view: F,
    cfg: &TrainConfig,
) -> Result<(EncoderParams, Vec<f64>)>
where
    F: FnMut(usize) -> DMatrix<f64>,
{
    let n = x.nrows();
    if n == 0 {
        return Err(Error::EmptyDataset);
    }
    if n < 2 {
        return Err(Error::ShapeMismatch(
            "contrastive pretraining needs at least 2 rows".into(),
        ));
    }
    let mut params = init_params(x.ncols(), cfg.hidden_dim, cfg.proj_dim, cfg.seed);
    let mut optimizer = Momentum::new(&params, cfg.momentum);
    let mut history = Vec::with_capacity(cfg.epochs);

    for epoch in 0..cfg.epochs {
        let x_aug = augmented_view(epoch);
        if x_aug.shape() != x.shape() {
            return Err(Error::ShapeMismatch(format!(
                "augmented view shape {:?} != original {:?}",
                x_aug.shape(),
                x.shape()
            )));
        }
        let mut order: Vec<usize> = (0..n).collect();
        {
            use rand::seq::SliceRandom;
            let mut rng = rng_from(derive_seed_indexed(cfg.seed, "shuffle", epoch as u64));
            order.shuffle(&mut rng);
        }

        let mut epoch_loss = 0.0;
        let mut counted = 0usize;
        for batch in order.chunks(cfg.batch_size.max(2)) {
            if batch.len() < 2 {
                continue;
            }
            let xb = DMatrix::from_fn(batch.len(), x.ncols(), |i, j| x[(batch[i], j)]);
            let ab = DMatrix::from_fn(batch.len(), x.ncols(), |i, j| x_aug[(batch[i], j)]);
            let (loss, grads) = loss_and_param_grads(&params, &xb, &ab, cfg.temperature)?;
            optimizer.step(&mut params, &grads, cfg.learning_rate);
            epoch_loss += loss * batch.len() as f64;
            counted += batch.len();
        }
        if !params.assert_finite() {
            return Err(Error::Internal(format!(
                "encoder parameters diverged at epoch {epoch}; lower the learning rate"
            )));
        }
        history.push(if counted > 0 {
            epoch_loss / counted as f64
        } else {
            0.0
        });
    }
    Ok((params, history))
}
