//! Quadratic-world demo protocols with CSV emission.
//!
//! Three canned setups:
//!
//! - `bowl`: 400-step trajectories in a 2-d noisy bowl with a 10x curvature
//!   ratio, comparing vSGD against three fixed/cooling SGD schedules.
//! - `median1000`: the d=1, h=1, sigma=1 noisy quadratic; median loss and
//!   learning-rate traces over 1000 runs of 2000 steps for fixed rates 1.0
//!   and 0.2, cooling schedules 1/t and 0.2/t, vSGD, and the oracle.
//! - `nonstat`: the same world with the optimum re-drawn every 300 steps
//!   (jump scale 10 sigma), 3000 steps, median traces over 101 runs.
//!
//! All algorithms within one run share a common noise stream, so the
//! comparisons are paired.

use super::BenchError;
use crate::optim::{Optimizer, SgdSchedule, VsgdOptions, VsgdState, VsgdVariant};
use crate::quad::{NoisyQuadratic, ShiftSchedule};
use crate::rng::SeededRng;
use rayon::prelude::*;
use std::fmt::Write as _;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadDemoKind {
    Bowl,
    Median1000,
    Nonstat,
}

impl QuadDemoKind {
    pub fn parse(s: &str) -> Result<Self, BenchError> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "bowl" => QuadDemoKind::Bowl,
            "median1000" => QuadDemoKind::Median1000,
            "nonstat" => QuadDemoKind::Nonstat,
            other => {
                return Err(BenchError::Usage(format!(
                    "unknown demo kind '{other}' (bowl|median1000|nonstat)"
                )))
            }
        })
    }
}

/// Per-algorithm summary of a traced demo. `median_loss` has one entry per
/// step plus the final state; `median_lr` one entry per step taken.
#[derive(Debug, Clone)]
pub struct AlgoTrace {
    pub name: String,
    pub median_loss: Vec<f64>,
    pub median_lr: Vec<f64>,
    pub mean_loss: Vec<f64>,
    /// Mean expected loss over all runs and steps.
    pub time_avg_loss: f64,
}

#[derive(Debug, Clone)]
pub struct BowlTrack {
    pub name: String,
    pub path: Vec<(f64, f64)>,
    pub loss: Vec<f64>,
}

#[derive(Debug, Clone)]
pub enum QuadDemoData {
    Traces {
        steps: usize,
        shift_period: Option<u64>,
        algos: Vec<AlgoTrace>,
    },
    Bowl {
        tracks: Vec<BowlTrack>,
    },
}

#[derive(Debug, Clone, Copy)]
enum DemoAlgo {
    Fixed(f64),
    Cooling { eta0: f64, gamma: f64 },
    Vsgd,
    Oracle,
}

const DEMO_WARMUP: usize = 10;
const STREAM_DEMO_NOISE: u64 = 0xDE30;
const STREAM_DEMO_WARMUP: u64 = 0xDE31;

/// The schedule matrix shared by the traced demos.
fn schedule_matrix() -> Vec<(String, DemoAlgo)> {
    vec![
        ("sgd-eta1.0".into(), DemoAlgo::Fixed(1.0)),
        ("sgd-eta0.2".into(), DemoAlgo::Fixed(0.2)),
        (
            "sgd-1overt".into(),
            DemoAlgo::Cooling {
                eta0: 1.0,
                gamma: 1.0,
            },
        ),
        (
            "sgd-0.2overt".into(),
            DemoAlgo::Cooling {
                eta0: 0.2,
                gamma: 1.0,
            },
        ),
        ("vsgd".into(), DemoAlgo::Vsgd),
        ("oracle".into(), DemoAlgo::Oracle),
    ]
}

/// One trajectory; returns per-step pre-step losses plus the final loss, and
/// the per-step rates used (max across dimensions).
fn run_one(
    world_template: &NoisyQuadratic,
    theta0: &[f64],
    steps: usize,
    algo: DemoAlgo,
    run_seed: u64,
) -> (Vec<f64>, Vec<f64>, Vec<Vec<f64>>) {
    let mut world = world_template.clone();
    let mut theta = theta0.to_vec();
    let mut rng = SeededRng::with_stream(run_seed, STREAM_DEMO_NOISE);
    let curvatures = world.curvatures().to_vec();

    let mut opt = match algo {
        DemoAlgo::Fixed(eta) => Some(Optimizer::sgd(SgdSchedule::constant(eta).unwrap())),
        DemoAlgo::Cooling { eta0, gamma } => {
            Some(Optimizer::sgd(SgdSchedule::new(eta0, gamma).unwrap()))
        }
        DemoAlgo::Vsgd => {
            let mut wrng = SeededRng::with_stream(run_seed, STREAM_DEMO_WARMUP);
            let mut grads = Vec::with_capacity(DEMO_WARMUP);
            let mut hesses = Vec::with_capacity(DEMO_WARMUP);
            for _ in 0..DEMO_WARMUP {
                let c = world.sample_optimum(&mut wrng);
                grads.push(world.per_sample_gradient(theta0, &c));
                hesses.push(curvatures.clone());
            }
            let state =
                VsgdState::warmup(&grads, &hesses, &VsgdOptions::new(VsgdVariant::Local))
                    .expect("non-empty warmup");
            Some(Optimizer::Vsgd(state))
        }
        DemoAlgo::Oracle => None,
    };

    let mut losses = Vec::with_capacity(steps + 1);
    let mut rates = Vec::with_capacity(steps);
    let mut path = Vec::with_capacity(steps + 1);
    for t in 0..steps {
        world.advance_nonstationary(t as u64, &mut rng);
        losses.push(world.expected_loss(&theta));
        path.push(theta.clone());
        let c = world.sample_optimum(&mut rng);
        let grad = world.per_sample_gradient(&theta, &c);
        let delta: Vec<f64> = match &mut opt {
            Some(optimizer) => {
                let hess = optimizer.needs_curvature().then_some(curvatures.as_slice());
                let d = optimizer
                    .step(&grad, hess, None)
                    .expect("bounded rates on the quadratic");
                rates.push(optimizer.rate_range().1);
                d
            }
            None => {
                let r = world.oracle_local_rate(&theta);
                rates.push(r.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
                r.iter().zip(&grad).map(|(&ri, &g)| -ri * g).collect()
            }
        };
        for (th, d) in theta.iter_mut().zip(&delta) {
            *th += d;
        }
    }
    losses.push(world.expected_loss(&theta));
    path.push(theta);
    (losses, rates, path)
}

fn median_of(mut column: Vec<f64>) -> f64 {
    column.sort_by(|a, b| a.partial_cmp(b).expect("finite losses"));
    column[column.len() / 2]
}

fn traced_demo(
    world: &NoisyQuadratic,
    theta0: &[f64],
    steps: usize,
    runs: usize,
) -> Vec<AlgoTrace> {
    schedule_matrix()
        .into_iter()
        .map(|(name, algo)| {
            let per_run: Vec<(Vec<f64>, Vec<f64>)> = (0..runs)
                .into_par_iter()
                .map(|r| {
                    let (losses, rates, _) = run_one(world, theta0, steps, algo, 1000 + r as u64);
                    (losses, rates)
                })
                .collect();
            let median_loss: Vec<f64> = (0..=steps)
                .map(|t| median_of(per_run.iter().map(|(l, _)| l[t]).collect()))
                .collect();
            let mean_loss: Vec<f64> = (0..=steps)
                .map(|t| per_run.iter().map(|(l, _)| l[t]).sum::<f64>() / runs as f64)
                .collect();
            let median_lr: Vec<f64> = (0..steps)
                .map(|t| median_of(per_run.iter().map(|(_, r)| r[t]).collect()))
                .collect();
            let time_avg_loss = per_run
                .iter()
                .map(|(l, _)| l[..steps].iter().sum::<f64>() / steps as f64)
                .sum::<f64>()
                / runs as f64;
            AlgoTrace {
                name,
                median_loss,
                median_lr,
                mean_loss,
                time_avg_loss,
            }
        })
        .collect()
}

pub fn quad_demo_compute(kind: QuadDemoKind) -> QuadDemoData {
    match kind {
        QuadDemoKind::Median1000 => {
            let world = NoisyQuadratic::new(vec![1.0], vec![0.0], vec![1.0]).unwrap();
            QuadDemoData::Traces {
                steps: 2000,
                shift_period: None,
                algos: traced_demo(&world, &[5.0], 2000, 1000),
            }
        }
        QuadDemoKind::Nonstat => {
            let world = NoisyQuadratic::new(vec![1.0], vec![0.0], vec![1.0])
                .unwrap()
                .with_shift(ShiftSchedule {
                    period: 300,
                    jump_scale: 10.0,
                })
                .unwrap();
            QuadDemoData::Traces {
                steps: 3000,
                shift_period: Some(300),
                algos: traced_demo(&world, &[5.0], 3000, 101),
            }
        }
        QuadDemoKind::Bowl => {
            let world =
                NoisyQuadratic::new(vec![10.0, 1.0], vec![0.0, 0.0], vec![0.5, 0.5]).unwrap();
            let theta0 = [1.5, -2.0];
            let algos = vec![
                ("vsgd".to_string(), DemoAlgo::Vsgd),
                ("sgd-eta0.1".to_string(), DemoAlgo::Fixed(0.1)),
                ("sgd-eta0.02".to_string(), DemoAlgo::Fixed(0.02)),
                (
                    "sgd-cooling".to_string(),
                    DemoAlgo::Cooling {
                        eta0: 0.1,
                        gamma: 0.5,
                    },
                ),
            ];
            let tracks = algos
                .into_iter()
                .map(|(name, algo)| {
                    let (loss, _, path) = run_one(&world, &theta0, 400, algo, 7);
                    BowlTrack {
                        name,
                        path: path.into_iter().map(|p| (p[0], p[1])).collect(),
                        loss,
                    }
                })
                .collect();
            QuadDemoData::Bowl { tracks }
        }
    }
}

pub fn demo_to_csv(data: &QuadDemoData) -> String {
    match data {
        QuadDemoData::Traces { steps, algos, .. } => {
            let mut out = String::from("step,algo,median_loss,median_lr,mean_loss\n");
            for algo in algos {
                for t in 0..=*steps {
                    let lr = if t < *steps {
                        algo.median_lr[t]
                    } else {
                        algo.median_lr[*steps - 1]
                    };
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{}",
                        t, algo.name, algo.median_loss[t], lr, algo.mean_loss[t]
                    );
                }
            }
            out
        }
        QuadDemoData::Bowl { tracks } => {
            let mut out = String::from("step,algo,theta1,theta2,loss\n");
            for track in tracks {
                for (t, ((x, y), loss)) in track.path.iter().zip(&track.loss).enumerate() {
                    let _ = writeln!(out, "{},{},{},{},{}", t, track.name, x, y, loss);
                }
            }
            out
        }
    }
}

/// Runs the demo and writes its CSV. Returns the computed data for callers
/// that want the numbers as well.
pub fn quad_demo(kind: QuadDemoKind, out_path: impl AsRef<Path>) -> Result<QuadDemoData, BenchError> {
    let data = quad_demo_compute(kind);
    let path = out_path.as_ref();
    std::fs::write(path, demo_to_csv(&data)).map_err(|source| BenchError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bowl_tracks_have_full_paths() {
        let data = quad_demo_compute(QuadDemoKind::Bowl);
        let QuadDemoData::Bowl { tracks } = data else {
            panic!("bowl demo returns tracks");
        };
        assert_eq!(tracks.len(), 4);
        for track in &tracks {
            assert_eq!(track.path.len(), 401);
            assert!(track.loss.iter().all(|l| l.is_finite()));
        }
        // vSGD ends much closer to the optimum than the oscillating fixed rate.
        let final_loss = |name: &str| {
            tracks
                .iter()
                .find(|t| t.name == name)
                .unwrap()
                .loss
                .last()
                .copied()
                .unwrap()
        };
        assert!(final_loss("vsgd") < final_loss("sgd-eta0.1"));
    }

    #[test]
    fn demo_runs_are_deterministic() {
        let world = NoisyQuadratic::new(vec![1.0], vec![0.0], vec![1.0]).unwrap();
        let (a, ra, _) = run_one(&world, &[5.0], 50, DemoAlgo::Vsgd, 3);
        let (b, rb, _) = run_one(&world, &[5.0], 50, DemoAlgo::Vsgd, 3);
        assert_eq!(a, b);
        assert_eq!(ra, rb);
    }

    #[test]
    fn paired_noise_streams_across_algorithms() {
        // With a common stream every algorithm sees the same sampled optima.
        // Recover the first draw c from one step of each algorithm: the unit
        // fixed rate lands exactly on c, the oracle contracts by 25/26.
        let world = NoisyQuadratic::new(vec![1.0], vec![0.0], vec![1.0]).unwrap();
        let theta0 = 5.0;
        let (_, _, fixed_path) = run_one(&world, &[theta0], 1, DemoAlgo::Fixed(1.0), 11);
        let (_, _, oracle_path) = run_one(&world, &[theta0], 1, DemoAlgo::Oracle, 11);
        let c_fixed = fixed_path[1][0];
        let eta_star = theta0 * theta0 / (theta0 * theta0 + 1.0);
        let c_oracle = theta0 - (theta0 - oracle_path[1][0]) / eta_star;
        assert!((c_fixed - c_oracle).abs() < 1e-12);
    }
}
