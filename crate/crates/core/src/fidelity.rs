//! Average transfer fidelity of an `m`-level superposition sent through a
//! dephasing network.
//!
//! After a perfect swap the only damage is the suppression `D(n, n')` of
//! each Fock coherence, so the fidelity of one input with coefficients
//! `c_n` is `sum_{n,n'} |c_n|^2 |c_n'|^2 D(n, n')`. Averaging the
//! coefficients over the uniform (Haar) measure replaces
//! `|c_n|^2 |c_n'|^2` by `(1 + delta_{nn'}) / (m (m + 1))`, giving the
//! closed form reported here; the quoted fidelity is the square root of
//! that average overlap. A Monte Carlo estimator over explicit random
//! superpositions provides an independent check.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::bath::{dephasing_table, BathSpec, DephasingTable};
use crate::error::{Error, Result};
use crate::fmt::sig12;

/// Smallest accepted Monte Carlo sample count.
pub const MIN_MC_SAMPLES: usize = 100;

/// How a fidelity value was obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FidelityMethod {
    HaarClosedForm,
    MonteCarlo { samples: usize, std_error: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityResult {
    pub value: f64,
    pub method: FidelityMethod,
}

fn check_levels(table: &DephasingTable, m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidParameter {
            name: "m",
            message: "superposition needs at least one level".into(),
        });
    }
    if table.cutoff() + 1 < m {
        return Err(Error::CutoffMismatch {
            expected: m - 1,
            found: table.cutoff(),
        });
    }
    Ok(())
}

/// Haar-average fidelity over `m`-level superpositions:
/// `sqrt((2m + sum_{n != n'} D(n, n')) / (m (m + 1)))`.
pub fn average_fidelity_haar(table: &DephasingTable, m: usize) -> Result<FidelityResult> {
    check_levels(table, m)?;
    let mut off_diagonal = 0.0;
    for n in 0..m {
        for np in 0..m {
            if n != np {
                off_diagonal += table.total(n, np);
            }
        }
    }
    let mf = m as f64;
    let value = ((2.0 * mf + off_diagonal) / (mf * (mf + 1.0))).sqrt();
    Ok(FidelityResult {
        value,
        method: FidelityMethod::HaarClosedForm,
    })
}

/// Monte Carlo estimate of the same average from explicit Haar-random
/// superpositions.
///
/// Sample `i` draws from its own counter-mode stream of a ChaCha8 generator
/// seeded with `seed`, so results do not depend on evaluation order.
pub fn average_fidelity_mc(
    table: &DephasingTable,
    m: usize,
    samples: usize,
    seed: u64,
) -> Result<FidelityResult> {
    check_levels(table, m)?;
    if samples < MIN_MC_SAMPLES {
        return Err(Error::TooFewSamples {
            got: samples,
            min: MIN_MC_SAMPLES,
        });
    }

    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut weights = vec![0.0f64; m];
    for i in 0..samples {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let mut norm_sq = 0.0;
        for w in weights.iter_mut() {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            *w = re * re + im * im;
            norm_sq += *w;
        }
        let mut overlap = 0.0;
        for n in 0..m {
            for np in 0..m {
                overlap += weights[n] * weights[np] * table.total(n, np);
            }
        }
        overlap /= norm_sq * norm_sq;
        sum += overlap;
        sum_sq += overlap * overlap;
    }

    let mean = sum / samples as f64;
    let variance = (sum_sq / samples as f64 - mean * mean).max(0.0);
    let sem = (variance / samples as f64).sqrt();
    let value = mean.sqrt();
    // d sqrt(x) / dx = 1 / (2 sqrt(x)) propagates the standard error.
    let std_error = if value > 0.0 { sem / (2.0 * value) } else { sem };
    Ok(FidelityResult {
        value,
        method: FidelityMethod::MonteCarlo { samples, std_error },
    })
}

/// Physical inputs held fixed across a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepParams {
    /// Bath number-coupling strength.
    pub r: f64,
    /// Ohmic bath strength.
    pub gamma: f64,
    /// Ohmic cutoff frequency.
    pub cutoff: f64,
    /// Superposition levels `0..m`.
    pub m: usize,
    /// Chain length the transfer runs across (its time is `pi / lambda`).
    pub chain_n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub lambda: f64,
    pub temperature: f64,
    pub result: FidelityResult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FidelitySweep {
    pub params: SweepParams,
    pub points: Vec<SweepPoint>,
}

/// Haar-average fidelity over a grid of coupling scales and temperatures.
///
/// Each `lambda` sets the transfer time `pi / lambda`; points are emitted
/// with `lambda` outermost, in the given grid order.
pub fn fidelity_sweep(
    params: SweepParams,
    lambdas: &[f64],
    temperatures: &[f64],
) -> Result<FidelitySweep> {
    if lambdas.is_empty() {
        return Err(Error::EmptyGrid {
            name: "lambda grid",
        });
    }
    if temperatures.is_empty() {
        return Err(Error::EmptyGrid {
            name: "temperature grid",
        });
    }
    if params.chain_n < 2 {
        return Err(Error::InvalidParameter {
            name: "chain_n",
            message: format!("chain needs at least 2 nodes, got {}", params.chain_n),
        });
    }
    let spec = BathSpec::ohmic(params.gamma, params.cutoff, params.r)?;
    let mut points = Vec::with_capacity(lambdas.len() * temperatures.len());
    for &lambda in lambdas {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidParameter {
                name: "lambda",
                message: format!("coupling scale must be positive and finite, got {lambda}"),
            });
        }
        let tau = std::f64::consts::PI / lambda;
        for &temperature in temperatures {
            let table = dephasing_table(&spec, params.m.saturating_sub(1), tau, temperature)?;
            let result = average_fidelity_haar(&table, params.m)?;
            points.push(SweepPoint {
                lambda,
                temperature,
                result,
            });
        }
    }
    Ok(FidelitySweep { params, points })
}

/// Sweep entries that break the expected trends: fidelity must not drop as
/// `lambda` grows at fixed temperature, nor rise as temperature grows at
/// fixed `lambda`. Allows `1e-12` of slack for roundoff.
pub fn monotonicity_violations(sweep: &FidelitySweep) -> Vec<String> {
    const SLACK: f64 = 1e-12;
    let mut violations = Vec::new();

    let mut temperatures: Vec<f64> = sweep.points.iter().map(|p| p.temperature).collect();
    temperatures.sort_by(f64::total_cmp);
    temperatures.dedup();
    for &t in &temperatures {
        let mut along: Vec<&SweepPoint> = sweep
            .points
            .iter()
            .filter(|p| p.temperature == t)
            .collect();
        along.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
        for pair in along.windows(2) {
            if pair[1].result.value < pair[0].result.value - SLACK {
                violations.push(format!(
                    "fidelity falls from {} to {} as lambda grows {} -> {} at temperature {}",
                    sig12(pair[0].result.value),
                    sig12(pair[1].result.value),
                    sig12(pair[0].lambda),
                    sig12(pair[1].lambda),
                    sig12(t),
                ));
            }
        }
    }

    let mut lambdas: Vec<f64> = sweep.points.iter().map(|p| p.lambda).collect();
    lambdas.sort_by(f64::total_cmp);
    lambdas.dedup();
    for &l in &lambdas {
        let mut along: Vec<&SweepPoint> =
            sweep.points.iter().filter(|p| p.lambda == l).collect();
        along.sort_by(|a, b| a.temperature.total_cmp(&b.temperature));
        for pair in along.windows(2) {
            if pair[1].result.value > pair[0].result.value + SLACK {
                violations.push(format!(
                    "fidelity rises from {} to {} as temperature grows {} -> {} at lambda {}",
                    sig12(pair[0].result.value),
                    sig12(pair[1].result.value),
                    sig12(pair[0].temperature),
                    sig12(pair[1].temperature),
                    sig12(l),
                ));
            }
        }
    }

    violations
}

/// Write a sweep as CSV: `lambda,temperature,fidelity,method,std_error`.
pub fn write_sweep_csv<W: std::io::Write>(
    sweep: &FidelitySweep,
    writer: &mut W,
) -> std::io::Result<()> {
    writeln!(writer, "lambda,temperature,fidelity,method,std_error")?;
    for point in &sweep.points {
        let (method, std_error) = match point.result.method {
            FidelityMethod::HaarClosedForm => ("haar", String::new()),
            FidelityMethod::MonteCarlo { std_error, .. } => ("mc", sig12(std_error)),
        };
        writeln!(
            writer,
            "{},{},{},{},{}",
            sig12(point.lambda),
            sig12(point.temperature),
            sig12(point.result.value),
            method,
            std_error,
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn table(gamma: f64, cutoff: usize, tau: f64, temperature: f64) -> DephasingTable {
        let spec = BathSpec::ohmic(gamma, 1.0, 1.0).unwrap();
        dephasing_table(&spec, cutoff, tau, temperature).unwrap()
    }

    #[test]
    fn two_level_closed_form() {
        let t = table(0.8, 1, 1.2, 0.5);
        let d = t.total(0, 1);
        let got = average_fidelity_haar(&t, 2).unwrap();
        assert_relative_eq!(got.value, ((4.0 + 2.0 * d) / 6.0).sqrt(), epsilon = 1e-15);
        assert_eq!(got.method, FidelityMethod::HaarClosedForm);
    }

    #[test]
    fn uncoupled_bath_gives_exactly_one() {
        let spec = BathSpec::ohmic(1.0, 1.0, 0.0).unwrap();
        let t = dephasing_table(&spec, 3, 2.0, 1.5).unwrap();
        for m in 1..=4usize {
            assert_eq!(average_fidelity_haar(&t, m).unwrap().value, 1.0);
        }
    }

    #[test]
    fn full_dephasing_approaches_the_floor() {
        // With every off-diagonal suppressed to zero the average fidelity is
        // sqrt(2 / (m + 1)).
        let t = table(200.0, 3, 5.0, 0.0);
        for m in 2..=4usize {
            let got = average_fidelity_haar(&t, m).unwrap().value;
            let floor = (2.0 / (m as f64 + 1.0)).sqrt();
            assert_relative_eq!(got, floor, epsilon = 1e-6);
        }
    }

    #[test]
    fn monte_carlo_agrees_with_closed_form() {
        let t = table(0.5, 2, 1.0, 0.7);
        let exact = average_fidelity_haar(&t, 3).unwrap().value;
        let mc = average_fidelity_mc(&t, 3, 20_000, 42).unwrap();
        let FidelityMethod::MonteCarlo { samples, std_error } = mc.method else {
            panic!("wrong method tag");
        };
        assert_eq!(samples, 20_000);
        assert!(std_error < 0.01);
        assert!(
            (mc.value - exact).abs() < 4.0 * std_error.max(1e-4),
            "mc {} vs exact {} (sigma {})",
            mc.value,
            exact,
            std_error
        );
    }

    #[test]
    fn monte_carlo_is_deterministic_per_seed() {
        let t = table(0.5, 1, 1.0, 0.0);
        let a = average_fidelity_mc(&t, 2, 500, 7).unwrap();
        let b = average_fidelity_mc(&t, 2, 500, 7).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        let c = average_fidelity_mc(&t, 2, 500, 8).unwrap();
        assert_ne!(a.value.to_bits(), c.value.to_bits());
    }

    #[test]
    fn level_and_sample_validation() {
        let t = table(0.5, 1, 1.0, 0.0);
        assert!(matches!(
            average_fidelity_haar(&t, 3),
            Err(Error::CutoffMismatch { .. })
        ));
        assert!(matches!(
            average_fidelity_haar(&t, 0),
            Err(Error::InvalidParameter { .. })
        ));
        assert!(matches!(
            average_fidelity_mc(&t, 2, 99, 0),
            Err(Error::TooFewSamples { got: 99, min: 100 })
        ));
    }

    fn demo_params() -> SweepParams {
        SweepParams {
            r: 0.6,
            gamma: 0.4,
            cutoff: 2.0,
            m: 3,
            chain_n: 5,
        }
    }

    #[test]
    fn sweep_covers_the_grid_in_order() {
        let sweep = fidelity_sweep(demo_params(), &[1.0, 2.0], &[0.0, 0.5, 1.0]).unwrap();
        assert_eq!(sweep.points.len(), 6);
        assert_eq!(sweep.points[0].lambda, 1.0);
        assert_eq!(sweep.points[0].temperature, 0.0);
        assert_eq!(sweep.points[2].temperature, 1.0);
        assert_eq!(sweep.points[3].lambda, 2.0);
        assert!(monotonicity_violations(&sweep).is_empty());
    }

    #[test]
    fn sweep_rejects_empty_grids_and_bad_lambda() {
        assert!(matches!(
            fidelity_sweep(demo_params(), &[], &[1.0]),
            Err(Error::EmptyGrid { .. })
        ));
        assert!(matches!(
            fidelity_sweep(demo_params(), &[1.0], &[]),
            Err(Error::EmptyGrid { .. })
        ));
        assert!(fidelity_sweep(demo_params(), &[-1.0], &[1.0]).is_err());
    }

    #[test]
    fn trend_violations_are_reported() {
        let mut sweep = fidelity_sweep(demo_params(), &[1.0, 2.0], &[0.5]).unwrap();
        // Corrupt the larger-lambda point so fidelity drops where it should
        // not.
        sweep.points[1].result.value = sweep.points[0].result.value - 0.1;
        let violations = monotonicity_violations(&sweep);
        assert_eq!(violations.len(), 1);
        assert!(violations[0].contains("lambda grows"));
    }

    #[test]
    fn csv_shape() {
        let sweep = fidelity_sweep(demo_params(), &[1.0, 2.0], &[0.0, 1.0]).unwrap();
        let mut buf = Vec::new();
        write_sweep_csv(&sweep, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "lambda,temperature,fidelity,method,std_error"
        );
        let rows: Vec<&str> = lines.collect();
        assert_eq!(rows.len(), 4);
        for row in rows {
            let fields: Vec<&str> = row.split(',').collect();
            assert_eq!(fields.len(), 5);
            assert_eq!(fields[3], "haar");
            assert!(fields[4].is_empty());
            let fidelity: f64 = fields[2].parse().unwrap();
            assert!(fidelity > 0.0 && fidelity <= 1.0);
        }
    }
}
