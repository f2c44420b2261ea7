//! Welch's two-sample t-test for comparing final test errors.

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum CompareError {
    #[error("each side needs at least two records, got {a} and {b}")]
    TooFewSamples { a: usize, b: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompareOutcome {
    /// First sample has the significantly lower mean.
    ABetter,
    /// Second sample has the significantly lower mean.
    BBetter,
    /// No statistically significant difference.
    Equivalent,
}

#[derive(Debug, Clone, Copy)]
pub struct WelchReport {
    pub outcome: CompareOutcome,
    pub t: f64,
    pub dof: f64,
    pub p_value: f64,
    pub mean_a: f64,
    pub mean_b: f64,
}

fn mean_var(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Welch two-sample t-test at significance `alpha`. Zero variance on both
/// sides with equal means is equivalent; with different means it is a
/// perfect separation.
pub fn compare(a: &[f64], b: &[f64], alpha: f64) -> Result<WelchReport, CompareError> {
    if a.len() < 2 || b.len() < 2 {
        return Err(CompareError::TooFewSamples {
            a: a.len(),
            b: b.len(),
        });
    }
    let (mean_a, var_a) = mean_var(a);
    let (mean_b, var_b) = mean_var(b);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let se_sq = var_a / na + var_b / nb;

    if se_sq == 0.0 {
        let outcome = if mean_a == mean_b {
            CompareOutcome::Equivalent
        } else if mean_a < mean_b {
            CompareOutcome::ABetter
        } else {
            CompareOutcome::BBetter
        };
        return Ok(WelchReport {
            outcome,
            t: if mean_a == mean_b { 0.0 } else { f64::INFINITY },
            dof: na + nb - 2.0,
            p_value: if mean_a == mean_b { 1.0 } else { 0.0 },
            mean_a,
            mean_b,
        });
    }

    let t = (mean_a - mean_b) / se_sq.sqrt();
    let dof = se_sq * se_sq
        / ((var_a / na) * (var_a / na) / (na - 1.0) + (var_b / nb) * (var_b / nb) / (nb - 1.0));
    let p_value = student_t_two_sided_p(t.abs(), dof);
    let outcome = if p_value < alpha {
        if mean_a < mean_b {
            CompareOutcome::ABetter
        } else {
            CompareOutcome::BBetter
        }
    } else {
        CompareOutcome::Equivalent
    };
    Ok(WelchReport {
        outcome,
        t,
        dof,
        p_value,
        mean_a,
        mean_b,
    })
}

/// `P(|T| > t)` for Student's t with `dof` degrees of freedom:
/// the regularized incomplete beta `I_x(dof/2, 1/2)` at `x = dof/(dof + t^2)`.
pub fn student_t_two_sided_p(t_abs: f64, dof: f64) -> f64 {
    debug_assert!(t_abs >= 0.0 && dof > 0.0);
    reg_inc_beta(dof / 2.0, 0.5, dof / (dof + t_abs * t_abs))
}

/// Lanczos approximation of ln Gamma.
fn ln_gamma(x: f64) -> f64 {
    const COEF: [f64; 6] = [
        76.180_091_729_471_46,
        -86.505_320_329_416_77,
        24.014_098_240_830_91,
        -1.231_739_572_450_155,
        0.120_865_097_386_617_7e-2,
        -0.539_523_938_495_3e-5,
    ];
    let mut y = x;
    let tmp = x + 5.5;
    let tmp = tmp - (x + 0.5) * tmp.ln();
    let mut ser = 1.000_000_000_190_015;
    for c in COEF {
        y += 1.0;
        ser += c / y;
    }
    -tmp + (2.506_628_274_631_000_5 * ser / x).ln()
}

/// Regularized incomplete beta `I_x(a, b)` by Lentz's continued fraction.
fn reg_inc_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let front = (ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b)
        + a * x.ln()
        + b * (1.0 - x).ln())
    .exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(a, b, x) / a
    } else {
        1.0 - front * beta_cf(b, a, 1.0 - x) / b
    }
}

fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    const MAX_ITER: usize = 200;
    const EPS: f64 = 3e-16;
    const TINY: f64 = 1e-300;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn incomplete_beta_reference_values() {
        // Frozen against an independent reference implementation.
        assert_relative_eq!(reg_inc_beta(0.5, 0.5, 0.25), 1.0 / 3.0, max_relative = 1e-10);
        assert_relative_eq!(reg_inc_beta(5.0, 0.5, 0.9), 0.3166429150200122, max_relative = 1e-10);
        assert_relative_eq!(reg_inc_beta(2.0, 3.0, 0.4), 0.5248, max_relative = 1e-10);
        assert_relative_eq!(
            reg_inc_beta(7.3, 0.5, 0.62),
            0.009353799554707365,
            max_relative = 1e-9
        );
    }

    #[test]
    fn t_distribution_reference_values() {
        assert_relative_eq!(
            student_t_two_sided_p(2.0, 10.0),
            0.07338803477074039,
            max_relative = 1e-9
        );
        assert_relative_eq!(
            student_t_two_sided_p(1.0, 5.0),
            0.36321746764912255,
            max_relative = 1e-9
        );
        assert_relative_eq!(
            student_t_two_sided_p(2.5, 30.0),
            0.018115649068066706,
            max_relative = 1e-9
        );
        assert_relative_eq!(
            student_t_two_sided_p(3.2, 12.7),
            0.007153180243658395,
            max_relative = 1e-9
        );
    }

    #[test]
    fn identical_sets_are_equivalent() {
        let a = [0.07, 0.08, 0.075, 0.072];
        let r = compare(&a, &a, 0.01).unwrap();
        assert_eq!(r.outcome, CompareOutcome::Equivalent);
    }

    #[test]
    fn extreme_separation_is_better() {
        let a = [10.0, 10.01, 9.99, 10.0, 10.02, 9.98, 10.0, 10.01, 9.99, 10.0];
        let b = [50.0, 50.01, 49.99, 50.0, 50.02, 49.98, 50.0, 50.01, 49.99, 50.0];
        let r = compare(&a, &b, 0.01).unwrap();
        assert_eq!(r.outcome, CompareOutcome::ABetter);
        let r = compare(&b, &a, 0.01).unwrap();
        assert_eq!(r.outcome, CompareOutcome::BBetter);
    }

    #[test]
    fn borderline_case_matches_independent_statistic() {
        // Statistic, dof and p frozen from an independent implementation.
        let a = [
            0.071, 0.065, 0.068, 0.070, 0.066, 0.072, 0.069, 0.064, 0.073, 0.0695,
        ];
        let b = [
            0.075, 0.071, 0.0735, 0.0725, 0.070, 0.0745, 0.0715, 0.0765, 0.069, 0.0720,
        ];
        let r = compare(&a, &b, 0.01).unwrap();
        assert_relative_eq!(r.t, -3.163616808820792, max_relative = 1e-12);
        assert_relative_eq!(r.dof, 17.005586518617356, max_relative = 1e-12);
        assert_relative_eq!(r.p_value, 0.005672767052086162, max_relative = 1e-9);
        assert_eq!(r.outcome, CompareOutcome::ABetter);
        // At alpha = 0.001 the same data is only equivalent.
        let r = compare(&a, &b, 0.001).unwrap();
        assert_eq!(r.outcome, CompareOutcome::Equivalent);
    }

    #[test]
    fn zero_variance_cases() {
        let a = [0.5, 0.5, 0.5];
        let b = [0.5, 0.5, 0.5];
        assert_eq!(
            compare(&a, &b, 0.01).unwrap().outcome,
            CompareOutcome::Equivalent
        );
        let c = [0.4, 0.4, 0.4];
        assert_eq!(
            compare(&c, &a, 0.01).unwrap().outcome,
            CompareOutcome::ABetter
        );
    }

    #[test]
    fn too_few_samples() {
        assert!(compare(&[1.0], &[1.0, 2.0], 0.01).is_err());
    }
}
