//! Benchmark task shapes and the tuned baseline hyper-parameters found by
//! exhaustive search, used as defaults when the config does not pin them.

use super::{Hyper, OptimizerKind, Task};
use crate::nn::LossKind;

/// Layer sizes of the fixed benchmark networks; `None` for tasks whose shape
/// comes from the config (xor, clusters) or that have no network (quad).
pub fn layer_sizes(task: Task) -> Option<Vec<usize>> {
    match task {
        Task::M0 => Some(vec![784, 10]),
        Task::M1 => Some(vec![784, 120, 10]),
        Task::M2 => Some(vec![784, 500, 300, 10]),
        Task::C0 => Some(vec![3072, 10]),
        Task::C1 => Some(vec![3072, 360, 10]),
        Task::Cr => Some(vec![3072, 120, 3072]),
        _ => None,
    }
}

pub fn loss_kind(task: Task) -> LossKind {
    match task {
        Task::Cr => LossKind::MeanSquaredError,
        _ => LossKind::CrossEntropy,
    }
}

/// Best-found baseline settings per benchmark. `gamma` is in per-epoch units
/// (divided by the training-set size when the schedule is built).
pub fn tuned_baseline(task: Task, optimizer: OptimizerKind) -> Option<Hyper> {
    use OptimizerKind::*;
    let mut h = Hyper::default();
    match (task, optimizer) {
        (Task::M0, Sgd) => {
            h.eta0 = Some(3e-2);
            h.gamma = Some(1.0);
        }
        (Task::M1, Sgd) => {
            h.eta0 = Some(3e-2);
            h.gamma = Some(0.5);
        }
        (Task::M2, Sgd) => {
            h.eta0 = Some(1e-2);
            h.gamma = Some(0.5);
        }
        (Task::C0, Sgd) | (Task::Cr, Sgd) => {
            h.eta0 = Some(3e-3);
            h.gamma = Some(1.0);
        }
        (Task::C1, Sgd) => {
            h.eta0 = Some(1e-2);
            h.gamma = Some(1.0);
        }
        (Task::M0, AdaGrad) | (Task::M1, AdaGrad) => h.eta0 = Some(1e-1),
        (Task::M2, AdaGrad) => h.eta0 = Some(3e-2),
        (Task::C0, AdaGrad) | (Task::Cr, AdaGrad) => h.eta0 = Some(1e-2),
        (Task::C1, AdaGrad) => h.eta0 = Some(3e-3),
        (Task::M0, Amari) => {
            h.eta0 = Some(1e-5);
            h.tau = Some(1e4);
        }
        (Task::M1, Amari) => {
            h.eta0 = Some(1e-6);
            h.tau = Some(5e3);
        }
        (Task::M2, Amari) => {
            h.eta0 = Some(3e-7);
            h.tau = Some(5e3);
        }
        (Task::M0, Smd) => {
            h.eta0 = Some(1e-1);
            h.mu = Some(1e-3);
            h.tau = Some(1e3);
        }
        (Task::M1, Smd) => {
            h.eta0 = Some(3e-2);
            h.mu = Some(1e-4);
            h.tau = Some(1e4);
        }
        (Task::M2, Smd) => {
            h.eta0 = Some(3e-2);
            h.mu = Some(1e-3);
            h.tau = Some(1e2);
        }
        (Task::M0, Almeida) => {
            h.eta0 = Some(1e-3);
            h.tau = Some(1e3);
        }
        (Task::M1, Almeida) | (Task::M2, Almeida) => {
            h.eta0 = Some(1e-3);
            h.tau = Some(1e4);
        }
        _ => return None,
    }
    Some(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn m0_amari_setting() {
        let h = tuned_baseline(Task::M0, OptimizerKind::Amari).unwrap();
        assert_eq!(h.eta0, Some(1e-5));
        assert_eq!(h.tau, Some(1e4));
    }

    #[test]
    fn m0_sgd_setting() {
        let h = tuned_baseline(Task::M0, OptimizerKind::Sgd).unwrap();
        assert_eq!(h.eta0, Some(3e-2));
        assert_eq!(h.gamma, Some(1.0));
    }

    #[test]
    fn vsgd_has_no_tuned_setting() {
        assert!(tuned_baseline(Task::M0, OptimizerKind::VsgdL).is_none());
    }

    #[test]
    fn shapes() {
        assert_eq!(layer_sizes(Task::M2).unwrap(), vec![784, 500, 300, 10]);
        assert_eq!(layer_sizes(Task::Cr).unwrap(), vec![3072, 120, 3072]);
        assert!(layer_sizes(Task::Xor).is_none());
        assert_eq!(loss_kind(Task::Cr), LossKind::MeanSquaredError);
        assert_eq!(loss_kind(Task::C1), LossKind::CrossEntropy);
    }
}
