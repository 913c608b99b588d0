//! Downstream evaluation: linear classification of frozen representations
//! under the low-label-rate cross-validation protocol, plus the
//! {Baseline, Random-CGCL, CGCL} ablation pipeline.
//!
//! Protocol per repetition: stratified folds, a stratified subsample of the
//! training fold at the configured label rate fits the classifier, and the
//! full held-out fold is scored. Mean and standard deviation are taken over
//! all folds × repetitions.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::augment::{augment, random_perturbation, AugmentKind, AugmentationSpec};
use crate::data::Dataset;
use crate::embedding::{
    ctrl_embedding, embed_dataset, standardize, EmbeddedDataset, LeaderPolicy, LeaderStrategy,
};
use crate::graph::{Graph, LeaderConfig};
use crate::rng::{derive_seed, derive_seed_indexed, fnv1a64, rng_from};
use crate::train::{encode_all, pretrain, EncoderParams, TrainConfig};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct EvalProtocol {
    pub folds: usize,
    pub label_rate: f64,
    pub repetitions: usize,
    /// L2 regularization strength of the linear classifier.
    pub reg: f64,
    pub seed: u64,
}

impl Default for EvalProtocol {
    fn default() -> Self {
        EvalProtocol {
            folds: 10,
            label_rate: 0.10,
            repetitions: 5,
            reg: 1e-2,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FoldAccuracy {
    pub repetition: usize,
    pub fold: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone)]
pub struct EvalReport {
    pub records: Vec<FoldAccuracy>,
    pub mean: f64,
    pub std: f64,
    pub fingerprint: u64,
}

impl EvalReport {
    fn from_records(records: Vec<FoldAccuracy>, fingerprint: u64) -> Self {
        let n = records.len() as f64;
        let mean = records.iter().map(|r| r.accuracy).sum::<f64>() / n;
        let var = records
            .iter()
            .map(|r| (r.accuracy - mean) * (r.accuracy - mean))
            .sum::<f64>()
            / n;
        EvalReport {
            records,
            mean,
            std: var.sqrt(),
            fingerprint,
        }
    }
}

/// Fold partition. `stratified` is false when a class was too small and the
/// split fell back to plain shuffled folds.
#[derive(Debug, Clone)]
pub struct KFoldSplit {
    pub folds: Vec<(Vec<usize>, Vec<usize>)>,
    pub stratified: bool,
}

/// Stratified k-fold: within each class, shuffled indices are dealt
/// round-robin, keeping class proportions within ±1 per fold.
pub fn stratified_kfold(labels: &[usize], folds: usize, seed: u64) -> Result<KFoldSplit> {
    if folds < 2 {
        return Err(Error::DegenerateLabels(format!(
            "need at least 2 folds, got {folds}"
        )));
    }
    if labels.len() < folds {
        return Err(Error::DegenerateLabels(format!(
            "{} samples cannot fill {folds} folds",
            labels.len()
        )));
    }
    let n_classes = labels.iter().max().map(|&m| m + 1).unwrap_or(0);
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); n_classes];
    for (i, &y) in labels.iter().enumerate() {
        by_class[y].push(i);
    }
    let smallest = by_class.iter().map(|c| c.len()).filter(|&c| c > 0).min();
    let stratified = smallest.map(|s| s >= folds).unwrap_or(false);

    let mut rng = rng_from(derive_seed(seed, "kfold"));
    let mut test_sets: Vec<Vec<usize>> = vec![Vec::new(); folds];
    if stratified {
        for class_indices in by_class.iter_mut() {
            class_indices.shuffle(&mut rng);
            for (pos, &idx) in class_indices.iter().enumerate() {
                test_sets[pos % folds].push(idx);
            }
        }
    } else {
        let mut all: Vec<usize> = (0..labels.len()).collect();
        all.shuffle(&mut rng);
        for (pos, &idx) in all.iter().enumerate() {
            test_sets[pos % folds].push(idx);
        }
    }

    let mut out = Vec::with_capacity(folds);
    for f in 0..folds {
        let mut test = test_sets[f].clone();
        test.sort_unstable();
        let mut train: Vec<usize> = (0..labels.len())
            .filter(|i| test.binary_search(i).is_err())
            .collect();
        train.sort_unstable();
        out.push((train, test));
    }
    Ok(KFoldSplit {
        folds: out,
        stratified,
    })
}

/// One-vs-rest L2-regularized logistic classifier. Deterministic: the
/// convex objective is minimized by damped Newton iterations from zero.
#[derive(Debug, Clone)]
pub struct LinearClassifier {
    /// Row c = weights of class c.
    pub weights: DMatrix<f64>,
    pub bias: DVector<f64>,
}

impl LinearClassifier {
    pub fn scores(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let ones = DVector::from_element(x.nrows(), 1.0);
        x * self.weights.transpose() + ones * self.bias.transpose()
    }

    pub fn predict(&self, x: &DMatrix<f64>) -> Vec<usize> {
        let s = self.scores(x);
        (0..x.nrows())
            .map(|i| {
                let row = s.row(i);
                let mut best = 0;
                for c in 1..row.len() {
                    if row[c] > row[best] {
                        best = c;
                    }
                }
                best
            })
            .collect()
    }
}

fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// Binary logistic fit by Newton's method on mean loss + (reg/2)·‖w‖²
/// (bias unregularized). The mean formulation makes the optimum invariant
/// to duplicating every row.
fn fit_binary_logistic(x: &DMatrix<f64>, targets: &[f64], reg: f64) -> (DVector<f64>, f64) {
    let n = x.nrows();
    let d = x.ncols();
    let mut w = DVector::zeros(d + 1); // last entry = bias

    for _ in 0..50 {
        let mut grad = DVector::zeros(d + 1);
        let mut hess = DMatrix::zeros(d + 1, d + 1);
        for i in 0..n {
            let xi = x.row(i);
            let s: f64 = xi.iter().zip(w.iter()).map(|(a, b)| a * b).sum::<f64>() + w[d];
            let p = sigmoid(s);
            let err = (p - targets[i]) / n as f64;
            let curv = (p * (1.0 - p)).max(1e-10) / n as f64;
            for a in 0..d {
                grad[a] += err * xi[a];
                for b in 0..d {
                    hess[(a, b)] += curv * xi[a] * xi[b];
                }
                hess[(a, d)] += curv * xi[a];
                hess[(d, a)] += curv * xi[a];
            }
            grad[d] += err;
            hess[(d, d)] += curv;
        }
        for a in 0..d {
            grad[a] += reg * w[a];
            hess[(a, a)] += reg;
        }
        hess[(d, d)] += 1e-12;

        let grad_norm = grad.norm();
        if grad_norm < 1e-10 {
            break;
        }
        let step = match hess.clone().cholesky() {
            Some(ch) => ch.solve(&grad),
            None => {
                let jittered = hess + DMatrix::identity(d + 1, d + 1) * 1e-8;
                match jittered.cholesky() {
                    Some(ch) => ch.solve(&grad),
                    None => grad.clone(),
                }
            }
        };
        w -= &step;
        if step.norm() < 1e-12 {
            break;
        }
    }
    (w.rows(0, d).into_owned(), w[d])
}

/// Multiclass one-vs-rest trainer. `n_classes` fixes the score layout even
/// when a class is absent from this particular training set.
pub fn train_linear_classifier(
    x: &DMatrix<f64>,
    y: &[usize],
    n_classes: usize,
    reg: f64,
) -> Result<LinearClassifier> {
    if x.nrows() != y.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} rows vs {} labels",
            x.nrows(),
            y.len()
        )));
    }
    let present: std::collections::BTreeSet<usize> = y.iter().copied().collect();
    if present.len() < 2 {
        return Err(Error::DegenerateLabels(
            "training set holds a single class".into(),
        ));
    }
    let d = x.ncols();
    let mut weights = DMatrix::zeros(n_classes, d);
    let mut bias = DVector::zeros(n_classes);
    for c in 0..n_classes {
        if !present.contains(&c) {
            // No positives: score stays pinned far below any fit class.
            bias[c] = f64::NEG_INFINITY;
            continue;
        }
        let targets: Vec<f64> = y.iter().map(|&yi| if yi == c { 1.0 } else { 0.0 }).collect();
        let (w, b) = fit_binary_logistic(x, &targets, reg);
        weights.row_mut(c).copy_from(&w.transpose());
        bias[c] = b;
    }
    Ok(LinearClassifier { weights, bias })
}

/// Stratified subsample of `indices` at `rate`, at least one per class.
fn label_rate_subsample(
    indices: &[usize],
    labels: &[usize],
    rate: f64,
    seed: u64,
) -> Vec<usize> {
    let n_classes = labels.iter().max().map(|&m| m + 1).unwrap_or(0);
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); n_classes];
    for &i in indices {
        by_class[labels[i]].push(i);
    }
    let mut rng = rng_from(seed);
    let mut out = Vec::new();
    for class_indices in by_class.iter_mut() {
        if class_indices.is_empty() {
            continue;
        }
        class_indices.shuffle(&mut rng);
        let want = ((class_indices.len() as f64 * rate).round() as usize).max(1);
        out.extend(class_indices.iter().take(want.min(class_indices.len())));
    }
    out.sort_unstable();
    out
}

fn accuracy(predicted: &[usize], y: &[usize], indices: &[usize]) -> f64 {
    let hits = indices
        .iter()
        .zip(predicted)
        .filter(|(&i, &p)| y[i] == p)
        .count();
    hits as f64 / indices.len() as f64
}

fn gather_rows(x: &DMatrix<f64>, indices: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(indices.len(), x.ncols(), |i, j| x[(indices[i], j)])
}

fn protocol_fingerprint(protocol: &EvalProtocol, rows: usize, cols: usize) -> u64 {
    let desc = format!(
        "folds={};label_rate={};reps={};reg={};seed={};rows={rows};cols={cols}",
        protocol.folds, protocol.label_rate, protocol.repetitions, protocol.reg, protocol.seed
    );
    fnv1a64(desc.as_bytes())
}

/// Full protocol run over frozen representations.
pub fn evaluate(x: &DMatrix<f64>, y: &[usize], protocol: &EvalProtocol) -> Result<EvalReport> {
    if x.nrows() != y.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} rows vs {} labels",
            x.nrows(),
            y.len()
        )));
    }
    if y.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let n_classes = y.iter().max().map(|&m| m + 1).unwrap();
    if y.iter().copied().collect::<std::collections::BTreeSet<_>>().len() < 2 {
        return Err(Error::DegenerateLabels("dataset has a single class".into()));
    }

    let mut records = Vec::with_capacity(protocol.folds * protocol.repetitions);
    for rep in 0..protocol.repetitions {
        let split = stratified_kfold(y, protocol.folds, protocol.seed ^ rep as u64)?;
        for (fold_idx, (train_idx, test_idx)) in split.folds.iter().enumerate() {
            let sub_seed = derive_seed_indexed(
                protocol.seed,
                "label-subsample",
                (rep * protocol.folds + fold_idx) as u64,
            );
            let sub = label_rate_subsample(train_idx, y, protocol.label_rate, sub_seed);
            let sub_labels: Vec<usize> = sub.iter().map(|&i| y[i]).collect();
            let distinct: std::collections::BTreeSet<usize> =
                sub_labels.iter().copied().collect();

            let predictions = if distinct.len() < 2 {
                // Degenerate subsample: predict its only class.
                let only = *distinct.iter().next().expect("subsample nonempty");
                vec![only; test_idx.len()]
            } else {
                let clf =
                    train_linear_classifier(&gather_rows(x, &sub), &sub_labels, n_classes, protocol.reg)?;
                clf.predict(&gather_rows(x, test_idx))
            };
            records.push(FoldAccuracy {
                repetition: rep,
                fold: fold_idx,
                accuracy: accuracy(&predictions, y, test_idx),
            });
        }
    }
    Ok(EvalReport::from_records(
        records,
        protocol_fingerprint(protocol, x.nrows(), x.ncols()),
    ))
}

/// Ablation methods, in report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Baseline,
    RandomCgcl,
    Cgcl,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Baseline => "Baseline",
            Method::RandomCgcl => "Random-CGCL",
            Method::Cgcl => "CGCL",
        }
    }
}

/// Knobs of the contrastive pipeline that sit outside TrainConfig.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub aug_kind: AugmentKind,
    pub k: usize,
    pub n_lap_eigs: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            aug_kind: AugmentKind::Substitute,
            k: 2,
            n_lap_eigs: crate::embedding::DEFAULT_LAPLACIAN_EIGS,
        }
    }
}

/// Leader set used when augmenting: the highest-degree node of each
/// component, deterministic and cheap.
pub fn augmentation_leaders(g: &Graph) -> LeaderConfig {
    let policy = LeaderPolicy {
        sizes: vec![1],
        samples_per_size: 1,
        seed: 0,
        strategy: LeaderStrategy::DegreeRanked,
    };
    crate::embedding::select_leaders(g, &policy, 0)
        .into_iter()
        .next()
        .expect("one config")
}

/// Augmented-view CTRL embeddings for one epoch, standardized with the
/// original dataset's statistics.
pub fn augmented_view_matrix(
    graphs: &[Graph],
    base: &EmbeddedDataset,
    policy: &LeaderPolicy,
    pipeline: &PipelineConfig,
    epoch_seed: u64,
    control_preserving: bool,
) -> Result<DMatrix<f64>> {
    let rows: Vec<Result<Vec<f64>>> = graphs
        .par_iter()
        .enumerate()
        .map(|(i, g)| {
            let spec = AugmentationSpec {
                kind: pipeline.aug_kind,
                k: pipeline.k,
                seed: derive_seed_indexed(epoch_seed, "graph-aug", i as u64),
            };
            let aug = if control_preserving {
                let lc = augmentation_leaders(g);
                augment(g, &lc, &spec)?
            } else {
                random_perturbation(g, &spec)
            };
            let (emb, _) = ctrl_embedding(&aug, policy, pipeline.n_lap_eigs, i);
            Ok(emb.values)
        })
        .collect();

    let mut matrix = DMatrix::zeros(graphs.len(), base.matrix.ncols());
    for (i, row) in rows.into_iter().enumerate() {
        let row = row?;
        for (j, v) in row.into_iter().enumerate() {
            matrix[(i, j)] = v;
        }
    }
    Ok(standardize(&matrix, &base.means, &base.stds))
}

/// Pretrains on one branch (control-preserving or uniform-random
/// augmentations) and evaluates the encoded representations.
fn contrastive_branch(
    dataset: &Dataset,
    base: &EmbeddedDataset,
    x_std: &DMatrix<f64>,
    policy: &LeaderPolicy,
    train_cfg: &TrainConfig,
    protocol: &EvalProtocol,
    pipeline: &PipelineConfig,
    control_preserving: bool,
) -> Result<(EvalReport, EncoderParams, Vec<f64>)> {
    let mut aug_error = None;
    let branch = if control_preserving { "cgcl" } else { "random" };
    let (params, history) = pretrain(
        x_std,
        |epoch| {
            let epoch_seed =
                derive_seed_indexed(train_cfg.seed, branch, epoch as u64);
            match augmented_view_matrix(
                &dataset.graphs,
                base,
                policy,
                pipeline,
                epoch_seed,
                control_preserving,
            ) {
                Ok(m) => m,
                Err(e) => {
                    aug_error = Some(e);
                    DMatrix::zeros(x_std.nrows(), x_std.ncols())
                }
            }
        },
        train_cfg,
    )?;
    if let Some(e) = aug_error {
        return Err(e);
    }
    let latents = encode_all(&params, x_std)?;
    let report = evaluate(&latents, &dataset.labels(), protocol)?;
    Ok((report, params, history))
}

#[derive(Debug, Clone)]
pub struct AblationReport {
    pub dataset: String,
    pub baseline: EvalReport,
    pub random_cgcl: EvalReport,
    pub cgcl: EvalReport,
}

impl AblationReport {
    pub fn get(&self, method: Method) -> &EvalReport {
        match method {
            Method::Baseline => &self.baseline,
            Method::RandomCgcl => &self.random_cgcl,
            Method::Cgcl => &self.cgcl,
        }
    }

    /// Human-readable comparison table.
    pub fn table(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("dataset: {}\n", self.dataset));
        s.push_str(&format!("{:<14} {:>10} {:>10}\n", "method", "mean", "std"));
        for method in [Method::Baseline, Method::RandomCgcl, Method::Cgcl] {
            let r = self.get(method);
            s.push_str(&format!(
                "{:<14} {:>10.2} {:>10.2}\n",
                method.as_str(),
                100.0 * r.mean,
                100.0 * r.std
            ));
        }
        s
    }
}

/// Full {Baseline, Random-CGCL, CGCL} comparison on one dataset.
pub fn run_ablation(
    dataset: &Dataset,
    policy: &LeaderPolicy,
    train_cfg: &TrainConfig,
    protocol: &EvalProtocol,
    pipeline: &PipelineConfig,
) -> Result<AblationReport> {
    let base = embed_dataset(&dataset.graphs, policy, pipeline.n_lap_eigs)?;
    let x_std = standardize(&base.matrix, &base.means, &base.stds);
    let labels = dataset.labels();

    let baseline = evaluate(&x_std, &labels, protocol)?;
    let (cgcl, _, _) = contrastive_branch(
        dataset, &base, &x_std, policy, train_cfg, protocol, pipeline, true,
    )?;
    let (random_cgcl, _, _) = contrastive_branch(
        dataset, &base, &x_std, policy, train_cfg, protocol, pipeline, false,
    )?;

    Ok(AblationReport {
        dataset: dataset.name.clone(),
        baseline,
        random_cgcl,
        cgcl,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn kfold_balanced_two_classes() {
        let labels = vec![0, 1, 0, 1, 0, 1, 0, 1, 0, 1];
        let split = stratified_kfold(&labels, 5, 3).unwrap();
        assert!(split.stratified);
        for (_, test) in &split.folds {
            assert_eq!(test.len(), 2);
            let classes: Vec<usize> = test.iter().map(|&i| labels[i]).collect();
            assert_eq!(classes.iter().filter(|&&c| c == 0).count(), 1);
        }
    }

    #[test]
    fn kfold_leave_one_out() {
        let labels = vec![0, 1, 0, 1];
        let split = stratified_kfold(&labels, 4, 1).unwrap();
        for (train, test) in &split.folds {
            assert_eq!(test.len(), 1);
            assert_eq!(train.len(), 3);
        }
    }

    #[test]
    fn kfold_disjoint_exhaustive() {
        let labels: Vec<usize> = (0..23).map(|i| i % 3).collect();
        let split = stratified_kfold(&labels, 4, 9).unwrap();
        let mut seen = vec![false; labels.len()];
        for (train, test) in &split.folds {
            for &i in test {
                assert!(!seen[i], "index {i} in two test folds");
                seen[i] = true;
                assert!(train.binary_search(&i).is_err());
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn kfold_errors() {
        assert!(stratified_kfold(&[0, 1], 1, 0).is_err());
        assert!(stratified_kfold(&[0, 1], 3, 0).is_err());
    }

    #[test]
    fn classifier_separable_clusters() {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..10 {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            rows.push([sign * 3.0 + 0.1 * i as f64, sign * 2.0]);
            labels.push(if i % 2 == 0 { 0 } else { 1 });
        }
        let x = DMatrix::from_fn(10, 2, |i, j| rows[i][j]);
        let clf = train_linear_classifier(&x, &labels, 2, 1e-3).unwrap();
        assert_eq!(clf.predict(&x), labels);
    }

    #[test]
    fn classifier_rejects_single_class() {
        let x = DMatrix::zeros(4, 2);
        assert!(train_linear_classifier(&x, &[1, 1, 1, 1], 2, 1e-2).is_err());
    }

    #[test]
    fn classifier_duplication_invariance() {
        let x = DMatrix::from_row_slice(6, 2, &[1.0, 0.5, 2.0, 1.0, -1.0, 0.3, -2.0, -0.5, 0.7, -1.2, -0.4, 1.8]);
        let y = vec![0, 0, 1, 1, 0, 1];
        let clf1 = train_linear_classifier(&x, &y, 2, 1e-2).unwrap();

        let mut doubled_rows = Vec::new();
        let mut doubled_y = Vec::new();
        for i in 0..6 {
            for _ in 0..2 {
                doubled_rows.push([x[(i, 0)], x[(i, 1)]]);
                doubled_y.push(y[i]);
            }
        }
        let x2 = DMatrix::from_fn(12, 2, |i, j| doubled_rows[i][j]);
        let clf2 = train_linear_classifier(&x2, &doubled_y, 2, 1e-2).unwrap();

        for c in 0..2 {
            for j in 0..2 {
                assert_relative_eq!(
                    clf1.weights[(c, j)],
                    clf2.weights[(c, j)],
                    epsilon = 1e-6
                );
            }
            assert_relative_eq!(clf1.bias[c], clf2.bias[c], epsilon = 1e-6);
        }
    }

    #[test]
    fn classifier_monotone_rescale_of_scores_keeps_argmax() {
        let x = DMatrix::from_row_slice(4, 2, &[2.0, 0.1, -1.0, 0.4, 1.5, -0.3, -0.8, 0.9]);
        let y = vec![0, 1, 0, 1];
        let clf = train_linear_classifier(&x, &y, 2, 1e-2).unwrap();
        let base = clf.predict(&x);
        let scaled = LinearClassifier {
            weights: &clf.weights * 3.0,
            bias: &clf.bias * 3.0,
        };
        assert_eq!(scaled.predict(&x), base);
    }

    #[test]
    fn evaluate_perfect_features() {
        let n = 40;
        let labels: Vec<usize> = (0..n).map(|i| i % 2).collect();
        let x = DMatrix::from_fn(n, 2, |i, j| if labels[i] == j { 1.0 } else { 0.0 });
        let protocol = EvalProtocol {
            repetitions: 2,
            ..EvalProtocol::default()
        };
        let report = evaluate(&x, &labels, &protocol).unwrap();
        assert_relative_eq!(report.mean, 1.0);
        assert_eq!(report.records.len(), 20);
    }

    #[test]
    fn evaluate_random_features_near_chance() {
        let n = 300;
        let c = 3;
        let labels: Vec<usize> = (0..n).map(|i| i % c).collect();
        let mut rng = rng_from(11);
        use rand::Rng;
        let x = DMatrix::from_fn(n, 6, |_, _| rng.gen_range(-1.0..1.0));
        let protocol = EvalProtocol {
            repetitions: 2,
            ..EvalProtocol::default()
        };
        let report = evaluate(&x, &labels, &protocol).unwrap();
        // 3σ binomial band around chance for n test points total.
        let p = 1.0 / c as f64;
        let sigma = (p * (1.0 - p) / n as f64).sqrt();
        assert!(
            (report.mean - p).abs() < 3.0 * sigma + 0.05,
            "mean {} too far from chance {}",
            report.mean,
            p
        );
    }

    #[test]
    fn evaluate_deterministic() {
        let n = 30;
        let labels: Vec<usize> = (0..n).map(|i| i % 2).collect();
        let mut rng = rng_from(4);
        use rand::Rng;
        let x = DMatrix::from_fn(n, 4, |_, _| rng.gen_range(-1.0..1.0));
        let protocol = EvalProtocol::default();
        let a = evaluate(&x, &labels, &protocol).unwrap();
        let b = evaluate(&x, &labels, &protocol).unwrap();
        assert_eq!(a.records, b.records);
        assert_eq!(a.mean, b.mean);
    }

    #[test]
    fn evaluate_mean_std_consistent() {
        let n = 24;
        let labels: Vec<usize> = (0..n).map(|i| i % 2).collect();
        let mut rng = rng_from(8);
        use rand::Rng;
        let x = DMatrix::from_fn(n, 3, |_, _| rng.gen_range(-1.0..1.0));
        let protocol = EvalProtocol {
            folds: 4,
            repetitions: 3,
            ..EvalProtocol::default()
        };
        let report = evaluate(&x, &labels, &protocol).unwrap();
        let mean = report.records.iter().map(|r| r.accuracy).sum::<f64>()
            / report.records.len() as f64;
        assert!((report.mean - mean).abs() < 1e-12);
        let var = report
            .records
            .iter()
            .map(|r| (r.accuracy - mean).powi(2))
            .sum::<f64>()
            / report.records.len() as f64;
        assert!((report.std - var.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn evaluate_rejects_single_class() {
        let x = DMatrix::zeros(10, 2);
        let labels = vec![0; 10];
        assert!(evaluate(&x, &labels, &EvalProtocol::default()).is_err());
    }

    #[test]
    fn identity_encoder_matches_baseline_on_nonnegative_features() {
        // With identity weights and nonnegative inputs the encoder is the
        // identity map, so evaluation must agree with the baseline exactly.
        let n = 30;
        let d = 4;
        let labels: Vec<usize> = (0..n).map(|i| i % 2).collect();
        let mut rng = rng_from(17);
        use rand::Rng;
        let x = DMatrix::from_fn(n, d, |i, _| {
            rng.gen_range(0.0..1.0) + labels[i] as f64
        });
        let mut params = EncoderParams::zeros(d, d, d);
        params.w1 = DMatrix::identity(d, d);
        params.w2 = DMatrix::identity(d, d);
        params.w3 = DMatrix::identity(d, d);
        let z = encode_all(&params, &x).unwrap();
        let protocol = EvalProtocol {
            repetitions: 2,
            folds: 5,
            ..EvalProtocol::default()
        };
        let a = evaluate(&x, &labels, &protocol).unwrap();
        let b = evaluate(&z, &labels, &protocol).unwrap();
        assert_eq!(a.records, b.records);
    }
}
