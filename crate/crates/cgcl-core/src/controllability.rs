//! Controllability Gramian and controllable-subspace statistics for the
//! leader-follower dynamics ẋ_f = −A·x_f − B·u.
//!
//! A is the follower block of the Laplacian; for every component holding a
//! leader it is symmetric positive definite, so −A is stable and the
//! infinite-horizon Gramian W solves A·W + W·Aᵀ = B·Bᵀ.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::graph::{partition_laplacian, Graph, LeaderConfig};
use crate::{Error, Result};

/// Relative factor for numerical-rank thresholds.
const RANK_RTOL: f64 = 1e-10;

/// Gramian spectrum statistics for one (graph, leader set) pair.
///
/// `rank` counts eigenvalues above `N_f · μ_1 · 1e-10`; `min_nonzero_eig`
/// is the smallest eigenvalue above that threshold (0 when rank is 0) and
/// `ld` is the log-determinant restricted to the nonzero spectrum
/// (0 when rank is 0).
#[derive(Debug, Clone)]
pub struct GramianReport {
    pub w: DMatrix<f64>,
    /// Nonincreasing.
    pub eigenvalues: Vec<f64>,
    pub rank: usize,
    pub trace: f64,
    pub min_nonzero_eig: f64,
    pub ld: f64,
}

impl GramianReport {
    pub fn nf(&self) -> usize {
        self.w.nrows()
    }
}

/// Dimension of the controllable subspace, i.e. the numerical rank of
/// [−B | (−A)(−B) | … | (−A)^{N_f−1}(−B)].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ControllabilityRank {
    pub gamma: usize,
}

/// Solves A·W + W·Aᵀ = B·Bᵀ for symmetric positive definite A by
/// eigendecomposition: with A = QΛQᵀ and M = Qᵀ(BBᵀ)Q, the transformed
/// solution is W̃_ij = M_ij / (λ_i + λ_j).
pub fn solve_lyapunov(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::ShapeMismatch(format!(
            "A must be square, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if b.nrows() != n {
        return Err(Error::ShapeMismatch(format!(
            "B has {} rows, expected {}",
            b.nrows(),
            n
        )));
    }
    if n == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }

    let eig = SymmetricEigen::new(a.clone());
    let lambda_max = eig.eigenvalues.iter().cloned().fold(f64::MIN, f64::max);
    let lambda_min = eig.eigenvalues.iter().cloned().fold(f64::MAX, f64::min);
    if lambda_min <= 1e-10 * lambda_max.max(1.0) {
        return Err(Error::Stability(format!(
            "follower block not positive definite (lambda_min = {lambda_min:.3e}); \
             some follower component has no leader"
        )));
    }

    let q = &eig.eigenvectors;
    let bbt = b * b.transpose();
    let m = q.transpose() * &bbt * q;
    let mut wt = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            wt[(i, j)] = m[(i, j)] / (eig.eigenvalues[i] + eig.eigenvalues[j]);
        }
    }
    let w = q * wt * q.transpose();
    // Exact symmetry simplifies every consumer downstream.
    Ok((&w + w.transpose()) * 0.5)
}

/// Nonincreasing eigenvalues of a symmetric matrix.
fn symmetric_eigenvalues_desc(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[j]
            .partial_cmp(&eig.eigenvalues[i])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(m.nrows(), m.ncols());
    for (new_col, &old_col) in order.iter().enumerate() {
        vectors.set_column(new_col, &eig.eigenvectors.column(old_col));
    }
    (values, vectors)
}

fn gramian_rank_threshold(nf: usize, mu_max: f64) -> f64 {
    nf as f64 * mu_max.max(0.0) * RANK_RTOL
}

/// Gramian plus the spectrum statistics used by the CTRL embedding.
pub fn gramian_report(g: &Graph, lc: &LeaderConfig) -> Result<GramianReport> {
    let part = partition_laplacian(g, lc);
    gramian_report_from_blocks(&part.a, &part.b)
}

/// Same as [`gramian_report`] but on explicit (A, B) blocks.
pub fn gramian_report_from_blocks(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<GramianReport> {
    let nf = a.nrows();
    if nf == 0 {
        return Ok(GramianReport {
            w: DMatrix::zeros(0, 0),
            eigenvalues: Vec::new(),
            rank: 0,
            trace: 0.0,
            min_nonzero_eig: 0.0,
            ld: 0.0,
        });
    }
    let w = solve_lyapunov(a, b)?;
    let (eigenvalues, _) = symmetric_eigenvalues_desc(&w);
    let threshold = gramian_rank_threshold(nf, eigenvalues[0]);
    let nonzero: Vec<f64> = eigenvalues
        .iter()
        .cloned()
        .filter(|&mu| mu > threshold)
        .collect();
    let rank = nonzero.len();
    Ok(GramianReport {
        trace: w.trace(),
        min_nonzero_eig: nonzero.last().cloned().unwrap_or(0.0),
        ld: nonzero.iter().map(|mu| mu.ln()).sum(),
        w,
        eigenvalues,
        rank,
    })
}

/// Builds the controllability matrix [−B | (−A)(−B) | …] and returns its
/// numerical rank via column-pivoted QR with relative threshold
/// `max(rows, cols) · max column norm · 1e-10`.
///
/// Power blocks whose magnitude exceeds 1e100 are rescaled before the next
/// multiplication; column scaling leaves the rank unchanged and keeps long
/// Krylov chains finite.
pub fn controllability_rank(g: &Graph, lc: &LeaderConfig) -> Result<ControllabilityRank> {
    let part = partition_laplacian(g, lc);
    Ok(controllability_rank_from_blocks(&part.a, &part.b))
}

pub fn controllability_rank_from_blocks(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
) -> ControllabilityRank {
    let nf = a.nrows();
    let nl = b.ncols();
    if nf == 0 {
        return ControllabilityRank { gamma: 0 };
    }
    let neg_a = -a;
    let mut block = -b;
    let mut ctrb = DMatrix::zeros(nf, nf * nl);
    for i in 0..nf {
        ctrb.view_mut((0, i * nl), (nf, nl)).copy_from(&block);
        if i + 1 < nf {
            block = &neg_a * block;
            let max_abs = block.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
            if max_abs > 1e100 {
                block /= max_abs;
            }
        }
    }
    ControllabilityRank {
        gamma: numerical_rank(&ctrb),
    }
}

/// Numerical rank by column-pivoted QR; threshold is
/// `max(rows, cols) · largest column norm · 1e-10`.
pub fn numerical_rank(m: &DMatrix<f64>) -> usize {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return 0;
    }
    let max_col_norm = (0..cols)
        .map(|j| m.column(j).norm())
        .fold(0.0f64, f64::max);
    if max_col_norm == 0.0 {
        return 0;
    }
    let threshold = rows.max(cols) as f64 * max_col_norm * RANK_RTOL;
    let qr = m.clone().col_piv_qr();
    let r = qr.r();
    (0..rows.min(cols))
        .take_while(|&i| r[(i, i)].abs() > threshold)
        .count()
}

/// Minimum energy to steer the followers from the origin to `x_target`:
/// x_targetᵀ · W⁺ · x_target, with the pseudo-inverse restricted to the
/// above-threshold eigenspace of W.
pub fn min_control_energy(g: &Graph, lc: &LeaderConfig, x_target: &DVector<f64>) -> Result<f64> {
    let report = gramian_report(g, lc)?;
    let nf = report.nf();
    if x_target.len() != nf {
        return Err(Error::ShapeMismatch(format!(
            "target dimension {} != follower count {}",
            x_target.len(),
            nf
        )));
    }
    if nf == 0 {
        return Ok(0.0);
    }
    let (values, vectors) = symmetric_eigenvalues_desc(&report.w);
    let threshold = gramian_rank_threshold(nf, values[0]);
    let coefficients = vectors.transpose() * x_target;
    let mut energy = 0.0;
    let mut residual_sq = 0.0;
    for (j, &mu) in values.iter().enumerate() {
        let c = coefficients[j];
        if mu > threshold {
            energy += c * c / mu;
        } else {
            residual_sq += c * c;
        }
    }
    let residual = residual_sq.sqrt();
    if residual > 1e-8 * x_target.norm().max(1.0) {
        return Err(Error::UnreachableState { residual });
    }
    Ok(energy)
}
