//! Command-line front end for the control-based graph contrastive learning
//! pipeline.
//!
//! Subcommands: `ingest` (parse + stats), `embed` (CTRL matrix + cache),
//! `augment` (augmented dataset + δ-preservation audit), `pretrain`
//! (encoder checkpoint + loss history), `evaluate` (protocol CSVs) and
//! `report` (Baseline / Random-CGCL / CGCL ablation table).
//!
//! Every stage derives its RNG stream from the one global `--seed` by
//! hashing a stage name, so stages can be rerun independently and whole
//! runs are bit-reproducible. Options may come from a `key = value` config
//! file; explicit flags win.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cgcl_core::augment::{augment, AugmentKind, AugmentationSpec};
use cgcl_core::data::{
    load_checkpoint, parse_tudataset, save_checkpoint, save_embeddings, Dataset,
};
use cgcl_core::embedding::{
    embed_dataset, standardize, LeaderPolicy, LeaderStrategy, DEFAULT_LAPLACIAN_EIGS,
};
use cgcl_core::eval::{
    augmentation_leaders, evaluate, run_ablation, EvalProtocol, EvalReport, Method,
    PipelineConfig,
};
use cgcl_core::graph::LeaderConfig;
use cgcl_core::pmi::{longest_pmi, DEFAULT_EXACT_LIMIT};
use cgcl_core::rng::{derive_seed, derive_seed_indexed, fnv1a64};
use cgcl_core::train::{encode_all, pretrain, TrainConfig};
use cgcl_core::{Error, Result};

#[derive(Parser)]
#[command(name = "cgcl", version, about = "Control-based graph embeddings and contrastive learning")]
struct Cli {
    /// Config file with `key = value` lines; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Dataset name (files are <data-dir>/<dataset>/<dataset>_*.txt).
    #[arg(long, global = true)]
    dataset: Option<String>,

    /// Directory holding dataset subdirectories.
    #[arg(long, global = true)]
    data_dir: Option<PathBuf>,

    /// Comma-separated leader set sizes, e.g. 1,2,3.
    #[arg(long, global = true)]
    leader_sizes: Option<String>,

    /// Leader configurations sampled per size.
    #[arg(long, global = true)]
    samples_per_size: Option<usize>,

    /// Leader sampling strategy: seeded-random | degree-ranked.
    #[arg(long, global = true)]
    strategy: Option<String>,

    /// Laplacian eigenvalues kept per end of the spectrum.
    #[arg(long, global = true)]
    n_lap_eigs: Option<usize>,

    /// Augmentation kind: delete | add | substitute.
    #[arg(long, global = true)]
    aug_kind: Option<String>,

    /// Number of edges to perturb.
    #[arg(long, global = true)]
    k: Option<usize>,

    /// NT-Xent temperature.
    #[arg(long, global = true)]
    tau: Option<f64>,

    /// Minibatch size.
    #[arg(long, global = true)]
    batch: Option<usize>,

    #[arg(long, global = true)]
    epochs: Option<usize>,

    #[arg(long, global = true)]
    lr: Option<f64>,

    #[arg(long, global = true)]
    momentum: Option<f64>,

    /// Encoder hidden width.
    #[arg(long, global = true)]
    hidden: Option<usize>,

    /// Projection head dimension.
    #[arg(long, global = true)]
    proj: Option<usize>,

    /// Cross-validation folds.
    #[arg(long, global = true)]
    folds: Option<usize>,

    /// Fraction of the training fold whose labels the classifier sees.
    #[arg(long, global = true)]
    label_rate: Option<f64>,

    /// Protocol repetitions.
    #[arg(long, global = true)]
    reps: Option<usize>,

    /// Classifier L2 regularization.
    #[arg(long, global = true)]
    reg: Option<f64>,

    /// Global seed; every stage derives its own stream from it.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory for artifacts.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Representation to evaluate: baseline | cgcl.
    #[arg(long, global = true)]
    method: Option<String>,

    /// Encoder checkpoint path (defaults to <out>/checkpoint.bin).
    #[arg(long, global = true)]
    checkpoint: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a TUDataset directory and print its statistics.
    Ingest,
    /// Compute CTRL embeddings and write the binary cache + CSV mirror.
    Embed,
    /// Emit a control-preserving augmented copy of the dataset with a
    /// δ-preservation audit.
    Augment,
    /// Contrastively pretrain the encoder; writes checkpoint + loss CSV.
    Pretrain,
    /// Evaluate frozen representations under the label-rate CV protocol.
    Evaluate,
    /// Run the full {Baseline, Random-CGCL, CGCL} comparison.
    Report,
}

/// Everything a run needs, assembled from defaults, config file and flags.
#[derive(Debug, Clone)]
struct RunConfig {
    dataset: String,
    data_dir: PathBuf,
    policy: LeaderPolicy,
    pipeline: PipelineConfig,
    train: TrainConfig,
    protocol: EvalProtocol,
    seed: u64,
    out: PathBuf,
    method: String,
    checkpoint: Option<PathBuf>,
}

impl RunConfig {
    fn dataset_dir(&self) -> PathBuf {
        self.data_dir.join(&self.dataset)
    }

    /// Stable hash of every knob that affects outputs.
    fn fingerprint(&self) -> u64 {
        fnv1a64(self.describe().as_bytes())
    }

    fn describe(&self) -> String {
        format!(
            "dataset={}\nleader_sizes={:?}\nsamples_per_size={}\nstrategy={}\n\
             n_lap_eigs={}\naug_kind={}\nk={}\ntau={}\nbatch={}\nepochs={}\nlr={}\n\
             momentum={}\nhidden={}\nproj={}\nfolds={}\nlabel_rate={}\nreps={}\nreg={}\nseed={}\n",
            self.dataset,
            self.policy.sizes,
            self.policy.samples_per_size,
            self.policy.strategy.as_str(),
            self.pipeline.n_lap_eigs,
            self.pipeline.aug_kind.as_str(),
            self.pipeline.k,
            self.train.temperature,
            self.train.batch_size,
            self.train.epochs,
            self.train.learning_rate,
            self.train.momentum,
            self.train.hidden_dim,
            self.train.proj_dim,
            self.protocol.folds,
            self.protocol.label_rate,
            self.protocol.repetitions,
            self.protocol.reg,
            self.seed,
        )
    }
}

fn parse_config_file(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match line.split_once('=') {
            Some((k, v)) => {
                map.insert(k.trim().to_string(), v.trim().to_string());
            }
            None => {
                return Err(Error::Parse {
                    file: path.display().to_string(),
                    line: i + 1,
                    msg: format!("expected 'key = value', got '{line}'"),
                })
            }
        }
    }
    Ok(map)
}

fn parse_from<T: std::str::FromStr>(map: &BTreeMap<String, String>, key: &str) -> Result<Option<T>> {
    match map.get(key) {
        None => Ok(None),
        Some(raw) => raw.parse::<T>().map(Some).map_err(|_| {
            Error::Parse {
                file: "config".into(),
                line: 0,
                msg: format!("bad value '{raw}' for key '{key}'"),
            }
        }),
    }
}

fn parse_sizes(raw: &str) -> Result<Vec<usize>> {
    let sizes: std::result::Result<Vec<usize>, _> =
        raw.split(',').map(|t| t.trim().parse::<usize>()).collect();
    let sizes = sizes.map_err(|_| Error::Parse {
        file: "leader-sizes".into(),
        line: 0,
        msg: format!("expected comma-separated integers, got '{raw}'"),
    })?;
    if sizes.is_empty() || sizes.iter().any(|&s| s == 0) {
        return Err(Error::Parse {
            file: "leader-sizes".into(),
            line: 0,
            msg: "leader sizes must be positive".into(),
        });
    }
    Ok(sizes)
}

fn build_config(cli: &Cli) -> Result<RunConfig> {
    let file = match &cli.config {
        Some(path) => parse_config_file(path)?,
        None => BTreeMap::new(),
    };

    macro_rules! pick {
        ($flag:expr, $key:literal, $ty:ty) => {
            match &$flag {
                Some(v) => Some(v.clone()),
                None => parse_from::<$ty>(&file, $key)?,
            }
        };
    }

    let dataset = pick!(cli.dataset, "dataset", String)
        .ok_or_else(|| Error::Parse {
            file: "config".into(),
            line: 0,
            msg: "missing required option 'dataset'".into(),
        })?;
    let data_dir = pick!(cli.data_dir, "data-dir", PathBuf).unwrap_or_else(|| PathBuf::from("data"));
    let out = pick!(cli.out, "out", PathBuf).unwrap_or_else(|| PathBuf::from("out"));
    let seed = pick!(cli.seed, "seed", u64).unwrap_or(0);

    let mut policy = LeaderPolicy::default();
    if let Some(raw) = pick!(cli.leader_sizes, "leader-sizes", String) {
        policy.sizes = parse_sizes(&raw)?;
    }
    if let Some(v) = pick!(cli.samples_per_size, "samples-per-size", usize) {
        policy.samples_per_size = v.max(1);
    }
    if let Some(raw) = pick!(cli.strategy, "strategy", String) {
        policy.strategy = LeaderStrategy::parse(&raw)?;
    }
    policy.seed = derive_seed(seed, "embed");

    let mut pipeline = PipelineConfig::default();
    if let Some(raw) = pick!(cli.aug_kind, "aug-kind", String) {
        pipeline.aug_kind = AugmentKind::parse(&raw)?;
    }
    if let Some(v) = pick!(cli.k, "k", usize) {
        pipeline.k = v;
    }
    if let Some(v) = pick!(cli.n_lap_eigs, "n-lap-eigs", usize) {
        pipeline.n_lap_eigs = v;
    } else {
        pipeline.n_lap_eigs = DEFAULT_LAPLACIAN_EIGS;
    }

    let mut train = TrainConfig::default();
    if let Some(v) = pick!(cli.tau, "tau", f64) {
        train.temperature = v;
    }
    if let Some(v) = pick!(cli.batch, "batch", usize) {
        train.batch_size = v;
    }
    if let Some(v) = pick!(cli.epochs, "epochs", usize) {
        train.epochs = v;
    }
    if let Some(v) = pick!(cli.lr, "lr", f64) {
        train.learning_rate = v;
    }
    if let Some(v) = pick!(cli.momentum, "momentum", f64) {
        train.momentum = v;
    }
    if let Some(v) = pick!(cli.hidden, "hidden", usize) {
        train.hidden_dim = v;
    }
    if let Some(v) = pick!(cli.proj, "proj", usize) {
        train.proj_dim = v;
    }
    train.seed = derive_seed(seed, "pretrain");

    let mut protocol = EvalProtocol::default();
    if let Some(v) = pick!(cli.folds, "folds", usize) {
        protocol.folds = v;
    }
    if let Some(v) = pick!(cli.label_rate, "label-rate", f64) {
        protocol.label_rate = v;
    }
    if let Some(v) = pick!(cli.reps, "reps", usize) {
        protocol.repetitions = v;
    }
    if let Some(v) = pick!(cli.reg, "reg", f64) {
        protocol.reg = v;
    }
    protocol.seed = derive_seed(seed, "evaluate");

    let method = pick!(cli.method, "method", String).unwrap_or_else(|| "baseline".into());
    let checkpoint = pick!(cli.checkpoint, "checkpoint", PathBuf);

    Ok(RunConfig {
        dataset,
        data_dir,
        policy,
        pipeline,
        train,
        protocol,
        seed,
        out,
        method,
        checkpoint,
    })
}

fn ensure_out(cfg: &RunConfig) -> Result<()> {
    fs::create_dir_all(&cfg.out).map_err(|e| Error::Io {
        path: cfg.out.display().to_string(),
        source: e,
    })?;
    let fp_path = cfg.out.join("fingerprint.txt");
    let content = format!("fingerprint={:016x}\n{}", cfg.fingerprint(), cfg.describe());
    fs::write(&fp_path, content).map_err(|e| Error::Io {
        path: fp_path.display().to_string(),
        source: e,
    })
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    fs::write(path, content).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })
}

fn load_dataset(cfg: &RunConfig) -> Result<Dataset> {
    parse_tudataset(&cfg.dataset_dir(), &cfg.dataset)
}

fn cmd_ingest(cfg: &RunConfig) -> Result<()> {
    let ds = load_dataset(cfg)?;
    let (min_n, max_n) = ds.node_range();
    println!(
        "{:<12} {:>8} {:>10} {:>10} {:>12} {:>8}",
        "dataset", "graphs", "avg_nodes", "avg_edges", "range_nodes", "classes"
    );
    println!(
        "{:<12} {:>8} {:>10.2} {:>10.2} {:>12} {:>8}",
        ds.name,
        ds.graphs.len(),
        ds.mean_nodes(),
        ds.mean_edges(),
        format!("{min_n}-{max_n}"),
        ds.n_classes
    );
    if ds.self_loops_dropped > 0 || ds.duplicate_edges_collapsed > 0 {
        println!(
            "note: dropped {} self-loops, collapsed {} duplicate edge lines",
            ds.self_loops_dropped, ds.duplicate_edges_collapsed
        );
    }
    ensure_out(cfg)?;
    let csv = format!(
        "# fingerprint={:016x}\ndataset,graphs,avg_nodes,avg_edges,min_nodes,max_nodes,classes\n{},{},{:.4},{:.4},{},{},{}\n",
        cfg.fingerprint(),
        ds.name,
        ds.graphs.len(),
        ds.mean_nodes(),
        ds.mean_edges(),
        min_n,
        max_n,
        ds.n_classes
    );
    write_file(&cfg.out.join(format!("{}_stats.csv", ds.name)), &csv)
}

fn embeddings_csv(schema: &[String], matrix: &nalgebra::DMatrix<f64>, fingerprint: u64) -> String {
    let mut s = format!("# fingerprint={fingerprint:016x}\n");
    s.push_str(&schema.join(","));
    s.push('\n');
    for i in 0..matrix.nrows() {
        let row: Vec<String> = matrix.row(i).iter().map(|v| format!("{v:.17e}")).collect();
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

fn cmd_embed(cfg: &RunConfig) -> Result<()> {
    let ds = load_dataset(cfg)?;
    let embedded = embed_dataset(&ds.graphs, &cfg.policy, cfg.pipeline.n_lap_eigs)?;
    ensure_out(cfg)?;
    let fp = cfg.fingerprint();
    let bin_path = cfg.out.join(format!("{}_embeddings.bin", ds.name));
    save_embeddings(&bin_path, &embedded.schema, &embedded.matrix, fp)?;
    write_file(
        &cfg.out.join(format!("{}_embeddings.csv", ds.name)),
        &embeddings_csv(&embedded.schema, &embedded.matrix, fp),
    )?;
    println!(
        "embedded {} graphs into {} features -> {}",
        embedded.matrix.nrows(),
        embedded.matrix.ncols(),
        bin_path.display()
    );
    if embedded.diagnostics.non_finite_replaced > 0 || embedded.diagnostics.gramian_failures > 0 {
        println!(
            "diagnostics: {} non-finite values zeroed, {} gramian failures",
            embedded.diagnostics.non_finite_replaced, embedded.diagnostics.gramian_failures
        );
    }
    Ok(())
}

fn cmd_augment(cfg: &RunConfig) -> Result<()> {
    let ds = load_dataset(cfg)?;
    let stage_seed = derive_seed(cfg.seed, "augment");
    ensure_out(cfg)?;

    let mut audit = format!(
        "# fingerprint={:016x}\ngraph,edges_before,edges_after,delta_before,delta_after,exact\n",
        cfg.fingerprint()
    );
    let mut augmented = Vec::with_capacity(ds.graphs.len());
    let mut violations = 0usize;
    let mut inexact = 0usize;

    for (i, g) in ds.graphs.iter().enumerate() {
        let lc: LeaderConfig = augmentation_leaders(g);
        let spec = AugmentationSpec {
            kind: cfg.pipeline.aug_kind,
            k: cfg.pipeline.k,
            seed: derive_seed_indexed(stage_seed, "graph-aug", i as u64),
        };
        let before = longest_pmi(g, &lc);
        let out = augment(g, &lc, &spec)?;
        let lc_after = LeaderConfig::new(lc.leaders().to_vec(), &out)?;
        let after = longest_pmi(&out, &lc_after);
        let exact = before.exact && after.exact;
        if exact {
            if after.delta < before.delta {
                violations += 1;
            }
        } else {
            inexact += 1;
        }
        audit.push_str(&format!(
            "{},{},{},{},{},{}\n",
            i,
            g.num_edges(),
            out.num_edges(),
            before.delta,
            after.delta,
            exact
        ));
        augmented.push(out);
    }

    let aug_name = format!("{}-AUG", ds.name);
    let aug_ds = Dataset {
        name: aug_name.clone(),
        graphs: augmented,
        n_classes: ds.n_classes,
        self_loops_dropped: 0,
        duplicate_edges_collapsed: 0,
    };
    cgcl_core::data::write_tudataset(&cfg.out.join(&aug_name), &aug_name, &aug_ds)?;
    write_file(&cfg.out.join(format!("{}_audit.csv", ds.name)), &audit)?;

    println!(
        "augmented {} graphs (kind={}, k={}); audit: {} exact checks, {} outside exact regime",
        ds.graphs.len(),
        cfg.pipeline.aug_kind.as_str(),
        cfg.pipeline.k,
        ds.graphs.len() - inexact,
        inexact
    );
    if violations > 0 {
        return Err(Error::Internal(format!(
            "delta decreased on {violations} graphs; augmentation audit failed"
        )));
    }
    let exact_limit = DEFAULT_EXACT_LIMIT;
    let _ = exact_limit;
    Ok(())
}

fn cmd_pretrain(cfg: &RunConfig) -> Result<()> {
    let ds = load_dataset(cfg)?;
    let base = embed_dataset(&ds.graphs, &cfg.policy, cfg.pipeline.n_lap_eigs)?;
    let x_std = standardize(&base.matrix, &base.means, &base.stds);

    let mut aug_error: Option<Error> = None;
    let (params, history) = pretrain(
        &x_std,
        |epoch| {
            let epoch_seed = derive_seed_indexed(cfg.train.seed, "cgcl", epoch as u64);
            match cgcl_core::eval::augmented_view_matrix(
                &ds.graphs,
                &base,
                &cfg.policy,
                &cfg.pipeline,
                epoch_seed,
                true,
            ) {
                Ok(m) => m,
                Err(e) => {
                    aug_error = Some(e);
                    nalgebra::DMatrix::zeros(x_std.nrows(), x_std.ncols())
                }
            }
        },
        &cfg.train,
    )?;
    if let Some(e) = aug_error {
        return Err(e);
    }

    ensure_out(cfg)?;
    let fp = cfg.fingerprint();
    let ckpt = cfg.out.join("checkpoint.bin");
    save_checkpoint(&ckpt, &params, fp)?;
    let mut loss_csv = format!("# fingerprint={fp:016x}\nepoch,mean_loss\n");
    for (e, l) in history.iter().enumerate() {
        loss_csv.push_str(&format!("{e},{l:.17e}\n"));
    }
    write_file(&cfg.out.join("loss_history.csv"), &loss_csv)?;
    println!(
        "pretrained {} epochs; loss {:.4} -> {:.4}; checkpoint {}",
        history.len(),
        history.first().copied().unwrap_or(0.0),
        history.last().copied().unwrap_or(0.0),
        ckpt.display()
    );
    Ok(())
}

fn results_csv(dataset: &str, reports: &[(Method, &EvalReport)], fingerprint: u64) -> (String, String) {
    let mut results = format!("# fingerprint={fingerprint:016x}\ndataset,method,repetition,fold,accuracy\n");
    let mut summary = format!("# fingerprint={fingerprint:016x}\ndataset,method,mean,std\n");
    for (method, report) in reports {
        for r in &report.records {
            results.push_str(&format!(
                "{dataset},{},{},{},{:.17e}\n",
                method.as_str(),
                r.repetition,
                r.fold,
                r.accuracy
            ));
        }
        summary.push_str(&format!(
            "{dataset},{},{:.17e},{:.17e}\n",
            method.as_str(),
            report.mean,
            report.std
        ));
    }
    (results, summary)
}

fn cmd_evaluate(cfg: &RunConfig) -> Result<()> {
    let ds = load_dataset(cfg)?;
    let base = embed_dataset(&ds.graphs, &cfg.policy, cfg.pipeline.n_lap_eigs)?;
    let x_std = standardize(&base.matrix, &base.means, &base.stds);
    let labels = ds.labels();

    let (method, representations) = match cfg.method.as_str() {
        "baseline" => (Method::Baseline, x_std),
        "cgcl" => {
            let path = cfg
                .checkpoint
                .clone()
                .unwrap_or_else(|| cfg.out.join("checkpoint.bin"));
            let ckpt = load_checkpoint(&path)?;
            (Method::Cgcl, encode_all(&ckpt.params, &x_std)?)
        }
        other => {
            return Err(Error::Parse {
                file: "method".into(),
                line: 0,
                msg: format!("unknown method '{other}' (expected baseline | cgcl)"),
            })
        }
    };

    let report = evaluate(&representations, &labels, &cfg.protocol)?;
    ensure_out(cfg)?;
    let fp = cfg.fingerprint();
    let (results, summary) = results_csv(&ds.name, &[(method, &report)], fp);
    write_file(&cfg.out.join(format!("{}_results.csv", ds.name)), &results)?;
    write_file(&cfg.out.join(format!("{}_summary.csv", ds.name)), &summary)?;
    println!(
        "{} on {}: accuracy {:.2} ± {:.2} over {} folds x {} reps",
        method.as_str(),
        ds.name,
        100.0 * report.mean,
        100.0 * report.std,
        cfg.protocol.folds,
        cfg.protocol.repetitions
    );
    Ok(())
}

fn cmd_report(cfg: &RunConfig) -> Result<()> {
    let ds = load_dataset(cfg)?;
    let ablation = run_ablation(&ds, &cfg.policy, &cfg.train, &cfg.protocol, &cfg.pipeline)?;
    print!("{}", ablation.table());

    ensure_out(cfg)?;
    let fp = cfg.fingerprint();
    let reports = [
        (Method::Baseline, &ablation.baseline),
        (Method::RandomCgcl, &ablation.random_cgcl),
        (Method::Cgcl, &ablation.cgcl),
    ];
    let (results, summary) = results_csv(&ds.name, &reports, fp);
    write_file(&cfg.out.join(format!("{}_ablation_results.csv", ds.name)), &results)?;
    write_file(&cfg.out.join(format!("{}_ablation_summary.csv", ds.name)), &summary)?;
    Ok(())
}

fn error_code(e: &Error) -> &'static str {
    match e {
        Error::InvalidGraph(_) => "invalid_graph",
        Error::InvalidLeaders(_) => "invalid_leaders",
        Error::Stability(_) => "stability",
        Error::UnreachableState { .. } => "unreachable_state",
        Error::ShapeMismatch(_) => "shape_mismatch",
        Error::EmptyDataset => "empty_dataset",
        Error::DegenerateLabels(_) => "degenerate_labels",
        Error::Parse { .. } => "parse",
        Error::Io { .. } => "io",
        Error::FormatMismatch(_) => "format_mismatch",
        Error::Internal(_) => "internal",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match build_config(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error code={} msg=\"{}\"", error_code(&e), e);
            return ExitCode::FAILURE;
        }
    };
    let result = match cli.command {
        Command::Ingest => cmd_ingest(&cfg),
        Command::Embed => cmd_embed(&cfg),
        Command::Augment => cmd_augment(&cfg),
        Command::Pretrain => cmd_pretrain(&cfg),
        Command::Evaluate => cmd_evaluate(&cfg),
        Command::Report => cmd_report(&cfg),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error code={} msg=\"{}\"", error_code(&e), e);
            ExitCode::FAILURE
        }
    }
}
