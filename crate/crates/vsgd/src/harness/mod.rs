//! Experiment configuration, multi-seed training loops, grid search,
//! statistical comparison, quadratic-world demos, and CSV trace emission.
//!
//! Runs are deterministic: the dataset stream is seeded by a fixed constant
//! (so every seed trains on identical data) and each run owns a generator
//! derived from its seed, consumed in a fixed order (initialization, warmup,
//! per-epoch shuffles). Runs execute independently and in parallel.

mod config;
mod csv;
mod csweep;
mod demo;
mod grid;
mod presets;
mod record;
mod stats;

pub use config::{parse_config_file, parse_config_str, parse_grid_file, parse_grid_str};
pub use csv::{
    emit_csv, emit_grid_csv, final_test_errors, grid_to_csv, parse_csv, parse_csv_str,
    records_to_csv, CsvRow, RECORD_HEADER,
};
pub use csweep::{c_sweep, CSweepRow, CSweepTable, INSTABILITY_THRESHOLD};
pub use demo::{
    demo_to_csv, quad_demo, quad_demo_compute, AlgoTrace, BowlTrack, QuadDemoData, QuadDemoKind,
};
pub use grid::{grid_search, GridOutcome, GridRow, GridSpec};
pub use presets::{layer_sizes, loss_kind as task_loss_kind, tuned_baseline};
pub use record::{param_checksum, EpochStat, RunRecord};
pub use stats::{compare, CompareError, CompareOutcome, WelchReport};

use crate::data::{self, center, Dataset, Targets};
use crate::nn::{self, backprop, bbprop_diag, HvMethod, LossKind, Network, Target};
use crate::optim::{
    AdaGradState, AlmeidaState, AmariState, Optimizer, SgdSchedule, SmdState, VsgdOptions,
    VsgdState, VsgdVariant,
};
use crate::quad::{NoisyQuadratic, ShiftSchedule};
use crate::rng::SeededRng;
use rayon::prelude::*;
use std::io;
use std::path::PathBuf;
use std::time::Instant;
use thiserror::Error;

/// Stream tags so dataset generation, per-run state, and demo noise never
/// share a generator.
const STREAM_DATASET: u64 = 0xDA7A;
const STREAM_RUN: u64 = 0x40B5;
const STREAM_WARMUP: u64 = 0x3A97;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    MissingData(String),
    #[error(transparent)]
    Data(#[from] data::DataError),
    #[error("every run diverged")]
    AllDiverged,
    #[error("writing {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
}

impl BenchError {
    /// Process exit code contract: 0 success, 1 usage, 2 data, 3 divergence.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Usage(_) => 1,
            BenchError::MissingData(_) | BenchError::Data(_) | BenchError::Io { .. } => 2,
            BenchError::AllDiverged => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    M0,
    M1,
    M2,
    C0,
    C1,
    Cr,
    Quad,
    Nonstat,
    Xor,
    Clusters,
}

impl Task {
    pub fn parse(s: &str) -> Result<Self, BenchError> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "m0" => Task::M0,
            "m1" => Task::M1,
            "m2" => Task::M2,
            "c0" => Task::C0,
            "c1" => Task::C1,
            "cr" => Task::Cr,
            "quad" => Task::Quad,
            "nonstat" => Task::Nonstat,
            "xor" => Task::Xor,
            "clusters" => Task::Clusters,
            other => return Err(BenchError::Usage(format!("unknown task '{other}'"))),
        })
    }

    pub fn is_quadratic(self) -> bool {
        matches!(self, Task::Quad | Task::Nonstat)
    }

    pub fn needs_data_dir(self) -> bool {
        matches!(
            self,
            Task::M0 | Task::M1 | Task::M2 | Task::C0 | Task::C1 | Task::Cr
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            Task::M0 => "m0",
            Task::M1 => "m1",
            Task::M2 => "m2",
            Task::C0 => "c0",
            Task::C1 => "c1",
            Task::Cr => "cr",
            Task::Quad => "quad",
            Task::Nonstat => "nonstat",
            Task::Xor => "xor",
            Task::Clusters => "clusters",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptimizerKind {
    Sgd,
    VsgdL,
    VsgdG,
    VsgdB,
    AdaGrad,
    Amari,
    Almeida,
    Smd,
    /// True greedy-optimal rates; only valid on the quadratic tasks.
    Oracle,
}

impl OptimizerKind {
    pub fn parse(s: &str) -> Result<Self, BenchError> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "sgd" => OptimizerKind::Sgd,
            "vsgd-l" | "vsgdl" => OptimizerKind::VsgdL,
            "vsgd-g" | "vsgdg" => OptimizerKind::VsgdG,
            "vsgd-b" | "vsgdb" => OptimizerKind::VsgdB,
            "adagrad" => OptimizerKind::AdaGrad,
            "amari" => OptimizerKind::Amari,
            "almeida" => OptimizerKind::Almeida,
            "smd" => OptimizerKind::Smd,
            "oracle" => OptimizerKind::Oracle,
            other => return Err(BenchError::Usage(format!("unknown optimizer '{other}'"))),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            OptimizerKind::Sgd => "sgd",
            OptimizerKind::VsgdL => "vsgd-l",
            OptimizerKind::VsgdG => "vsgd-g",
            OptimizerKind::VsgdB => "vsgd-b",
            OptimizerKind::AdaGrad => "adagrad",
            OptimizerKind::Amari => "amari",
            OptimizerKind::Almeida => "almeida",
            OptimizerKind::Smd => "smd",
            OptimizerKind::Oracle => "oracle",
        }
    }

    pub fn is_vsgd(self) -> bool {
        matches!(
            self,
            OptimizerKind::VsgdL | OptimizerKind::VsgdG | OptimizerKind::VsgdB
        )
    }
}

/// Free hyper-parameters; unset fields fall back to the tuned benchmark
/// defaults where those exist. `gamma` is in per-epoch units and is divided
/// by the training-set size when a schedule is built for a data task.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Hyper {
    pub eta0: Option<f64>,
    pub gamma: Option<f64>,
    pub tau: Option<f64>,
    pub mu: Option<f64>,
    pub c: Option<f64>,
}

impl Hyper {
    /// Field-wise `self` over `fallback`.
    pub fn or(self, fallback: Hyper) -> Hyper {
        Hyper {
            eta0: self.eta0.or(fallback.eta0),
            gamma: self.gamma.or(fallback.gamma),
            tau: self.tau.or(fallback.tau),
            mu: self.mu.or(fallback.mu),
            c: self.c.or(fallback.c),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub task: Task,
    pub optimizer: OptimizerKind,
    pub hyper: Hyper,
    pub epochs: usize,
    pub seeds: Vec<u64>,
    pub lambda: f64,
    pub data_dir: Option<PathBuf>,
    // Synthetic-task knobs.
    pub n_train: usize,
    pub n_test: usize,
    pub dim: usize,
    pub classes: usize,
    pub separation: f64,
    pub jitter: f64,
    pub hidden: Vec<usize>,
    // Quadratic-task knobs.
    pub quad_steps: usize,
    pub quad_sigma: f64,
    pub quad_theta0: f64,
    pub shift_period: u64,
    pub jump_scale: Option<f64>,
    /// Warmup sample count override; the default is
    /// `max(1, floor(0.001 * n_train))` (10 on the quadratic tasks).
    pub warmup_n0: Option<usize>,
}

impl ExperimentConfig {
    pub fn for_task(task: Task, optimizer: OptimizerKind) -> Self {
        let mut cfg = Self {
            task,
            optimizer,
            hyper: Hyper::default(),
            epochs: 6,
            seeds: (0..10).collect(),
            lambda: 1e-4,
            data_dir: None,
            n_train: 2500,
            n_test: 2500,
            dim: 20,
            classes: 5,
            separation: 5.0,
            jitter: 0.25,
            hidden: Vec::new(),
            quad_steps: 2000,
            quad_sigma: 1.0,
            quad_theta0: 5.0,
            shift_period: 300,
            jump_scale: None,
            warmup_n0: None,
        };
        match task {
            Task::Xor => {
                cfg.n_train = 10_000;
                cfg.n_test = 2000;
                cfg.hidden = vec![10];
            }
            Task::Quad | Task::Nonstat => {
                cfg.dim = 1;
                if task == Task::Nonstat {
                    cfg.quad_steps = 3000;
                }
            }
            _ => {}
        }
        cfg
    }

    /// Config hyper-parameters over the tuned benchmark defaults.
    pub fn resolved_hyper(&self) -> Hyper {
        match tuned_baseline(self.task, self.optimizer) {
            Some(preset) => self.hyper.or(preset),
            None => self.hyper,
        }
    }

    pub fn warmup_samples(&self, n_train: usize) -> usize {
        self.warmup_n0
            .unwrap_or_else(|| if self.task.is_quadratic() { 10 } else { (n_train / 1000).max(1) })
    }

    fn validate(&self) -> Result<(), BenchError> {
        if self.seeds.is_empty() {
            return Err(BenchError::Usage("at least one seed is required".into()));
        }
        if self.optimizer == OptimizerKind::Oracle && !self.task.is_quadratic() {
            return Err(BenchError::Usage(
                "the oracle optimizer needs the true optimum and is only valid on quad/nonstat"
                    .into(),
            ));
        }
        Ok(())
    }

    fn resolve_data_dir(&self) -> Result<PathBuf, BenchError> {
        if let Some(dir) = &self.data_dir {
            return Ok(dir.clone());
        }
        if let Ok(dir) = std::env::var("VSGD_DATA_DIR") {
            if !dir.is_empty() {
                return Ok(PathBuf::from(dir));
            }
        }
        Err(BenchError::MissingData(format!(
            "task {} needs a dataset directory (--data-dir or VSGD_DATA_DIR)",
            self.task.name()
        )))
    }
}

pub(crate) struct NetTaskData {
    pub train: Dataset,
    pub test: Dataset,
    pub sizes: Vec<usize>,
    pub loss: LossKind,
}

enum Prepared {
    Net(NetTaskData),
    Quad {
        world: NoisyQuadratic,
        theta0: Vec<f64>,
        steps: usize,
    },
}

fn prepare(cfg: &ExperimentConfig) -> Result<Prepared, BenchError> {
    match cfg.task {
        Task::M0 | Task::M1 | Task::M2 => {
            let dir = cfg.resolve_data_dir()?;
            let (train, test) = data::load_mnist(&dir)?;
            let (train, test) = center(train, test)?;
            Ok(Prepared::Net(NetTaskData {
                train,
                test,
                sizes: layer_sizes(cfg.task).unwrap(),
                loss: LossKind::CrossEntropy,
            }))
        }
        Task::C0 | Task::C1 => {
            let dir = cfg.resolve_data_dir()?;
            let (train, test) = data::load_cifar10(&dir)?;
            let (train, test) = center(train, test)?;
            Ok(Prepared::Net(NetTaskData {
                train,
                test,
                sizes: layer_sizes(cfg.task).unwrap(),
                loss: LossKind::CrossEntropy,
            }))
        }
        Task::Cr => {
            let dir = cfg.resolve_data_dir()?;
            let (train, test) = data::load_cifar10(&dir)?;
            let (mut train, mut test) = center(train, test)?;
            // The centered input is its own reconstruction target.
            train.targets = Targets::Reconstruction;
            test.targets = Targets::Reconstruction;
            Ok(Prepared::Net(NetTaskData {
                train,
                test,
                sizes: layer_sizes(Task::Cr).unwrap(),
                loss: LossKind::MeanSquaredError,
            }))
        }
        Task::Xor => {
            let mut rng = SeededRng::with_stream(STREAM_DATASET, 0);
            let all = data::gen_xor(cfg.n_train + cfg.n_test, cfg.jitter, &mut rng);
            let (train, test) = all.split_at(cfg.n_train);
            let (train, test) = center(train, test)?;
            // An empty hidden list gives plain softmax regression.
            let mut sizes = vec![2];
            sizes.extend(cfg.hidden.iter().copied());
            sizes.push(2);
            Ok(Prepared::Net(NetTaskData {
                train,
                test,
                sizes,
                loss: LossKind::CrossEntropy,
            }))
        }
        Task::Clusters => {
            let mut rng = SeededRng::with_stream(STREAM_DATASET, 1);
            let all = data::gen_clusters(
                cfg.dim,
                cfg.classes,
                cfg.n_train + cfg.n_test,
                cfg.separation,
                &mut rng,
            );
            let (train, test) = all.split_at(cfg.n_train);
            let (train, test) = center(train, test)?;
            let mut sizes = vec![cfg.dim];
            sizes.extend(cfg.hidden.iter().copied());
            sizes.push(cfg.classes);
            Ok(Prepared::Net(NetTaskData {
                train,
                test,
                sizes,
                loss: LossKind::CrossEntropy,
            }))
        }
        Task::Quad | Task::Nonstat => {
            let d = cfg.dim.max(1);
            let mut world = NoisyQuadratic::new(
                vec![1.0; d],
                vec![0.0; d],
                vec![cfg.quad_sigma; d],
            )
            .map_err(|e| BenchError::Usage(e.to_string()))?;
            if cfg.task == Task::Nonstat {
                let jump = cfg.jump_scale.unwrap_or(10.0 * cfg.quad_sigma);
                world = world
                    .with_shift(ShiftSchedule {
                        period: cfg.shift_period,
                        jump_scale: jump,
                    })
                    .map_err(|e| BenchError::Usage(e.to_string()))?;
            }
            Ok(Prepared::Quad {
                world,
                theta0: vec![cfg.quad_theta0; d],
                steps: cfg.quad_steps,
            })
        }
    }
}

/// Mean loss (L2 penalty included) and error rate over a dataset.
/// Error is the misclassification fraction for labeled data and the mean
/// data-part loss for regression/reconstruction targets.
pub fn evaluate(net: &Network, ds: &Dataset) -> (f64, f64) {
    let n = ds.len().max(1) as f64;
    let mut data_loss = 0.0;
    let mut errors = 0.0;
    for i in 0..ds.len() {
        let (y, _) = net.forward(ds.input(i)).expect("dataset matches network");
        let target = ds.target(i);
        let l = net.data_loss(&y, target).expect("targets validated");
        data_loss += l;
        match target {
            Target::Class(c) => {
                if nn::argmax(&y) != c {
                    errors += 1.0;
                }
            }
            Target::Vector(_) => errors += l,
        }
    }
    let mean_loss = data_loss / n + net.l2_penalty();
    (mean_loss, errors / n)
}

/// Runs the configured experiment once per seed, in parallel, collecting
/// per-epoch traces. Divergent runs are flagged rather than failing the
/// batch.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<RunRecord>, BenchError> {
    cfg.validate()?;
    let prepared = prepare(cfg)?;
    cfg.seeds
        .par_iter()
        .enumerate()
        .map(|(run_id, &seed)| match &prepared {
            Prepared::Net(data) => run_net_task(cfg, data, run_id, seed),
            Prepared::Quad {
                world,
                theta0,
                steps,
            } => run_quad_task(cfg, world, theta0, *steps, run_id, seed),
        })
        .collect()
}

fn require(h: Option<f64>, what: &str, kind: OptimizerKind) -> Result<f64, BenchError> {
    h.ok_or_else(|| {
        BenchError::Usage(format!(
            "optimizer {} needs {what} (no tuned default for this task)",
            kind.name()
        ))
    })
}

/// Draws warmup samples and builds a vSGD state at the initial parameters.
fn vsgd_warmup_on_data(
    cfg: &ExperimentConfig,
    net: &Network,
    train: &Dataset,
    rng: &mut SeededRng,
) -> Result<VsgdState, BenchError> {
    let n0 = cfg.warmup_samples(train.len());
    let mut grads = Vec::with_capacity(n0);
    let mut hesses = Vec::with_capacity(n0);
    for _ in 0..n0 {
        let i = rng.index(train.len());
        let (_, cache) = net.forward(train.input(i)).expect("shapes fixed");
        let target = train.target(i);
        grads.push(backprop(net, &cache, target).expect("targets validated"));
        hesses.push(bbprop_diag(net, &cache, target).expect("targets validated"));
    }
    let variant = match cfg.optimizer {
        OptimizerKind::VsgdL => VsgdVariant::Local,
        OptimizerKind::VsgdG => VsgdVariant::Global,
        OptimizerKind::VsgdB => VsgdVariant::Block,
        _ => unreachable!("warmup only for vSGD"),
    };
    let mut opts = VsgdOptions::new(variant);
    if let Some(c) = cfg.resolved_hyper().c {
        opts = opts.with_c(c);
    }
    if variant == VsgdVariant::Block {
        opts = opts.with_blocks(net.block_partition());
    }
    VsgdState::warmup(&grads, &hesses, &opts).map_err(|e| BenchError::Usage(e.to_string()))
}

fn build_net_optimizer(
    cfg: &ExperimentConfig,
    net: &Network,
    train: &Dataset,
    rng: &mut SeededRng,
) -> Result<Optimizer, BenchError> {
    let h = cfg.resolved_hyper();
    let kind = cfg.optimizer;
    let d = net.num_params();
    Ok(match kind {
        OptimizerKind::Sgd => {
            let eta0 = require(h.eta0, "eta0", kind)?;
            let gamma = h.gamma.unwrap_or(0.0) / train.len() as f64;
            Optimizer::sgd(
                SgdSchedule::new(eta0, gamma).map_err(|e| BenchError::Usage(e.to_string()))?,
            )
        }
        OptimizerKind::VsgdL | OptimizerKind::VsgdG | OptimizerKind::VsgdB => {
            Optimizer::Vsgd(vsgd_warmup_on_data(cfg, net, train, rng)?)
        }
        OptimizerKind::AdaGrad => {
            Optimizer::AdaGrad(AdaGradState::new(require(h.eta0, "eta0", kind)?, d))
        }
        OptimizerKind::Amari => Optimizer::Amari(AmariState::new(
            require(h.eta0, "eta0", kind)?,
            require(h.tau, "tau", kind)?,
            d,
        )),
        OptimizerKind::Almeida => Optimizer::Almeida(AlmeidaState::new(
            require(h.eta0, "eta0", kind)?,
            require(h.tau, "tau", kind)?,
            d,
        )),
        OptimizerKind::Smd => Optimizer::Smd(SmdState::new(
            require(h.eta0, "eta0", kind)?,
            require(h.mu, "mu", kind)?,
            require(h.tau, "tau", kind)?,
            d,
        )),
        OptimizerKind::Oracle => unreachable!("validated"),
    })
}

fn run_net_task(
    cfg: &ExperimentConfig,
    data: &NetTaskData,
    run_id: usize,
    seed: u64,
) -> Result<RunRecord, BenchError> {
    let start = Instant::now();
    let mut rng = SeededRng::with_stream(seed, STREAM_RUN);
    let mut net = Network::new(&data.sizes, data.loss, cfg.lambda, &mut rng)
        .map_err(|e| BenchError::Usage(e.to_string()))?;
    let mut opt = build_net_optimizer(cfg, &net, &data.train, &mut rng)?;

    let mut stats = Vec::with_capacity(cfg.epochs + 1);
    let mut lr_trace = Vec::new();
    let mut diverged = false;

    let (train_loss, train_err) = evaluate(&net, &data.train);
    let (_, test_err) = evaluate(&net, &data.test);
    stats.push(EpochStat {
        index: 0,
        train_loss,
        train_err,
        test_err,
        lr_min: 0.0,
        lr_max: 0.0,
        wall_ms: start.elapsed().as_millis() as u64,
    });

    let mut order: Vec<usize> = (0..data.train.len()).collect();
    let mut step: u64 = 0;
    'epochs: for epoch in 1..=cfg.epochs {
        rng.shuffle(&mut order);
        let mut ep_lr = (f64::INFINITY, f64::NEG_INFINITY);
        for &i in &order {
            let x = data.train.input(i);
            let target = data.train.target(i);
            let (y, cache) = net.forward(x).expect("shapes fixed");
            let loss = net.loss(&y, target).expect("targets validated");
            if !loss.is_finite() {
                diverged = true;
                break 'epochs;
            }
            let grad = backprop(&net, &cache, target).expect("targets validated");
            let hess = if opt.needs_curvature() {
                Some(bbprop_diag(&net, &cache, target).expect("targets validated"))
            } else {
                None
            };
            let stepped = if opt.needs_hvp() {
                let frozen = &net;
                let mut hvp_fn = |v: &[f64]| {
                    nn::hvp(frozen, x, target, v, HvMethod::Exact).expect("shapes fixed")
                };
                opt.step(&grad, hess.as_deref(), Some(&mut hvp_fn))
            } else {
                opt.step(&grad, hess.as_deref(), None)
            };
            let delta = match stepped {
                Ok(d) => d,
                Err(_) => {
                    diverged = true;
                    break 'epochs;
                }
            };
            net.apply_delta(&delta);
            step += 1;
            if step % 100 == 1 {
                let (lo, hi) = opt.rate_range();
                lr_trace.push((step, lo, hi));
                ep_lr = (ep_lr.0.min(lo), ep_lr.1.max(hi));
            }
        }
        let (train_loss, train_err) = evaluate(&net, &data.train);
        let (_, test_err) = evaluate(&net, &data.test);
        if !train_loss.is_finite() || !test_err.is_finite() {
            diverged = true;
        }
        let (lr_min, lr_max) = if ep_lr.0.is_finite() {
            ep_lr
        } else {
            (0.0, 0.0)
        };
        stats.push(EpochStat {
            index: epoch,
            train_loss,
            train_err,
            test_err,
            lr_min,
            lr_max,
            wall_ms: start.elapsed().as_millis() as u64,
        });
        if diverged {
            break;
        }
    }

    Ok(RunRecord {
        run_id,
        seed,
        stats,
        lr_trace,
        diverged,
        checksum: param_checksum(&net.params_flat()),
        wall_ms: start.elapsed().as_millis() as u64,
    })
}

enum QuadStepper {
    Std(Optimizer),
    Oracle { last: (f64, f64) },
}

fn build_quad_optimizer(
    cfg: &ExperimentConfig,
    world: &NoisyQuadratic,
    theta0: &[f64],
    seed: u64,
) -> Result<QuadStepper, BenchError> {
    let h = cfg.hyper;
    let kind = cfg.optimizer;
    let d = world.dim();
    Ok(match kind {
        OptimizerKind::Oracle => QuadStepper::Oracle { last: (0.0, 0.0) },
        OptimizerKind::Sgd => {
            let eta0 = require(h.eta0, "eta0", kind)?;
            // No dataset size here: gamma applies per step as given.
            let gamma = h.gamma.unwrap_or(0.0);
            QuadStepper::Std(Optimizer::sgd(
                SgdSchedule::new(eta0, gamma).map_err(|e| BenchError::Usage(e.to_string()))?,
            ))
        }
        OptimizerKind::VsgdL | OptimizerKind::VsgdG | OptimizerKind::VsgdB => {
            let n0 = cfg.warmup_samples(0);
            let mut rng = SeededRng::with_stream(seed, STREAM_WARMUP);
            let mut grads = Vec::with_capacity(n0);
            let mut hesses = Vec::with_capacity(n0);
            for _ in 0..n0 {
                let c = world.sample_optimum(&mut rng);
                grads.push(world.per_sample_gradient(theta0, &c));
                hesses.push(world.curvatures().to_vec());
            }
            let variant = match kind {
                OptimizerKind::VsgdL => VsgdVariant::Local,
                // Without layer structure the block variant degenerates to
                // one global block.
                _ => VsgdVariant::Global,
            };
            let mut opts = VsgdOptions::new(variant);
            if let Some(c) = h.c {
                opts = opts.with_c(c);
            }
            let state = VsgdState::warmup(&grads, &hesses, &opts)
                .map_err(|e| BenchError::Usage(e.to_string()))?;
            QuadStepper::Std(Optimizer::Vsgd(state))
        }
        OptimizerKind::AdaGrad => QuadStepper::Std(Optimizer::AdaGrad(AdaGradState::new(
            require(h.eta0, "eta0", kind)?,
            d,
        ))),
        OptimizerKind::Amari => QuadStepper::Std(Optimizer::Amari(AmariState::new(
            require(h.eta0, "eta0", kind)?,
            require(h.tau, "tau", kind)?,
            d,
        ))),
        OptimizerKind::Almeida => QuadStepper::Std(Optimizer::Almeida(AlmeidaState::new(
            require(h.eta0, "eta0", kind)?,
            require(h.tau, "tau", kind)?,
            d,
        ))),
        OptimizerKind::Smd => QuadStepper::Std(Optimizer::Smd(SmdState::new(
            require(h.eta0, "eta0", kind)?,
            require(h.mu, "mu", kind)?,
            require(h.tau, "tau", kind)?,
            d,
        ))),
    })
}

fn run_quad_task(
    cfg: &ExperimentConfig,
    world: &NoisyQuadratic,
    theta0: &[f64],
    steps: usize,
    run_id: usize,
    seed: u64,
) -> Result<RunRecord, BenchError> {
    let start = Instant::now();
    let mut world = world.clone();
    let mut theta = theta0.to_vec();
    let mut stepper = build_quad_optimizer(cfg, &world, theta0, seed)?;
    let mut rng = SeededRng::with_stream(seed, STREAM_RUN);

    let mut stats = Vec::new();
    let mut lr_trace = Vec::new();
    let mut diverged = false;
    let curvatures = world.curvatures().to_vec();

    let push_stat = |stats: &mut Vec<EpochStat>,
                     index: usize,
                     loss: f64,
                     lr: (f64, f64),
                     wall: u64| {
        stats.push(EpochStat {
            index,
            train_loss: loss,
            train_err: loss,
            test_err: loss,
            lr_min: lr.0,
            lr_max: lr.1,
            wall_ms: wall,
        });
    };

    push_stat(
        &mut stats,
        0,
        world.expected_loss(&theta),
        (0.0, 0.0),
        start.elapsed().as_millis() as u64,
    );

    for t in 0..steps {
        world.advance_nonstationary(t as u64, &mut rng);
        let c = world.sample_optimum(&mut rng);
        let grad = world.per_sample_gradient(&theta, &c);
        let (delta, lr) = match &mut stepper {
            QuadStepper::Oracle { last } => {
                let rates = world.oracle_local_rate(&theta);
                let delta: Vec<f64> = rates.iter().zip(&grad).map(|(&r, &g)| -r * g).collect();
                let lo = rates.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = rates.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                *last = (lo, hi);
                (delta, *last)
            }
            QuadStepper::Std(opt) => {
                let hess = if opt.needs_curvature() {
                    Some(curvatures.as_slice())
                } else {
                    None
                };
                let stepped = if opt.needs_hvp() {
                    let mut hvp_fn =
                        |v: &[f64]| v.iter().zip(&curvatures).map(|(&vi, &hi)| hi * vi).collect();
                    opt.step(&grad, hess, Some(&mut hvp_fn))
                } else {
                    opt.step(&grad, hess, None)
                };
                match stepped {
                    Ok(d) => {
                        let lr = opt.rate_range();
                        (d, lr)
                    }
                    Err(_) => {
                        diverged = true;
                        break;
                    }
                }
            }
        };
        for (th, d) in theta.iter_mut().zip(&delta) {
            *th += d;
        }
        let loss = world.expected_loss(&theta);
        if !loss.is_finite() {
            diverged = true;
            break;
        }
        let step_no = (t + 1) as u64;
        if step_no.is_multiple_of(100) || t + 1 == steps {
            lr_trace.push((step_no, lr.0, lr.1));
            push_stat(
                &mut stats,
                t + 1,
                loss,
                lr,
                start.elapsed().as_millis() as u64,
            );
        }
    }

    Ok(RunRecord {
        run_id,
        seed,
        stats,
        lr_trace,
        diverged,
        checksum: param_checksum(&theta),
        wall_ms: start.elapsed().as_millis() as u64,
    })
}
