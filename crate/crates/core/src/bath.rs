//! Pure-dephasing environments: one independent bath per resonator, coupled
//! to the local photon number with strength `r`.
//!
//! Every reduced quantity here factorizes over bath modes. A Fock
//! superposition component with photon-number difference `dn` between nodes
//! `n` and `n'` is suppressed after time `tau` by
//!
//! * a vacuum factor `prod_j exp(-z_j / 2)` and
//! * a thermal factor `prod_j exp(-z_j nbar_j)`,
//!
//! where `z_j = dn^2 r^2 |xi_j|^2 |eta_j(tau)|^2`, the mode response is
//! `|eta_j(t)|^2 = 4 sin^2(omega_j t / 2) / omega_j^2`, and
//! `nbar_j = 1 / (e^(omega_j / T) - 1)` is the thermal occupation.
//!
//! For the Ohmic family `J(omega) = gamma omega e^(-omega / cutoff)` the sums
//! become integrals with `|xi_j|^2 -> J(omega) d omega`, evaluated here by
//! adaptive quadrature. The bath also shifts dressed energy levels through
//! the lag integral `F(t) = 2 int d omega J(omega) (t - sin(omega t) /
//! omega) / omega`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;
use crate::states::FockVector;

/// One discrete bath mode: frequency and squared coupling weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathMode {
    pub omega: f64,
    pub xi_sq: f64,
}

/// Spectral content of a bath.
#[derive(Debug, Clone, PartialEq)]
pub enum BathKind {
    /// `J(omega) = gamma omega e^(-omega / cutoff)`.
    Ohmic { gamma: f64, cutoff: f64 },
    /// Explicit mode list.
    Discrete(Vec<BathMode>),
}

/// A bath plus the dimensionless number-coupling strength `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct BathSpec {
    kind: BathKind,
    r: f64,
}

/// `sin(x) / x`, stable through `x = 0`.
fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// `t - sin(omega t) / omega`, stable for small `omega t`.
fn lag(omega: f64, t: f64) -> f64 {
    let x = omega * t;
    if x.abs() < 1e-4 {
        let x2 = x * x;
        t * x2 * (1.0 / 6.0 - x2 / 120.0 + x2 * x2 / 5040.0)
    } else {
        t - x.sin() / omega
    }
}

/// Squared mode response `|eta(t)|^2 = 4 sin^2(omega t / 2) / omega^2`.
pub fn eta_abs_sq(omega: f64, t: f64) -> f64 {
    let s = sinc(0.5 * omega * t);
    t * t * s * s
}

/// `omega / (e^(omega / temperature) - 1)`, continued to `temperature` at
/// `omega = 0`.
fn bose_weight(omega: f64, temperature: f64) -> f64 {
    let x = omega / temperature;
    if x == 0.0 {
        temperature
    } else {
        omega / x.exp_m1()
    }
}

fn require_finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            message: format!("must be finite, got {value}"),
        })
    }
}

impl BathSpec {
    /// Ohmic bath with strength `gamma`, exponential cutoff, and coupling `r`.
    pub fn ohmic(gamma: f64, cutoff: f64, r: f64) -> Result<Self> {
        require_finite("gamma", gamma)?;
        require_finite("cutoff", cutoff)?;
        require_finite("r", r)?;
        if gamma < 0.0 {
            return Err(Error::InvalidParameter {
                name: "gamma",
                message: format!("bath strength must be nonnegative, got {gamma}"),
            });
        }
        if cutoff <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "cutoff",
                message: format!("cutoff frequency must be positive, got {cutoff}"),
            });
        }
        if r < 0.0 {
            return Err(Error::InvalidParameter {
                name: "r",
                message: format!("coupling must be nonnegative, got {r}"),
            });
        }
        Ok(Self {
            kind: BathKind::Ohmic { gamma, cutoff },
            r,
        })
    }

    /// Bath from an explicit mode list.
    pub fn discrete(modes: Vec<BathMode>, r: f64) -> Result<Self> {
        require_finite("r", r)?;
        if r < 0.0 {
            return Err(Error::InvalidParameter {
                name: "r",
                message: format!("coupling must be nonnegative, got {r}"),
            });
        }
        for (j, mode) in modes.iter().enumerate() {
            if !(mode.omega > 0.0) || !mode.omega.is_finite() {
                return Err(Error::InvalidParameter {
                    name: "omega",
                    message: format!("mode {j} frequency must be positive, got {}", mode.omega),
                });
            }
            if !(mode.xi_sq >= 0.0) || !mode.xi_sq.is_finite() {
                return Err(Error::InvalidParameter {
                    name: "xi_sq",
                    message: format!("mode {j} weight must be nonnegative, got {}", mode.xi_sq),
                });
            }
        }
        Ok(Self {
            kind: BathKind::Discrete(modes),
            r,
        })
    }

    /// Read modes from a CSV file with columns `omega,xi_sq`.
    pub fn discrete_from_csv(path: &std::path::Path, r: f64) -> Result<Self> {
        let as_string = path.display().to_string();
        let mut reader = csv::Reader::from_path(path).map_err(|source| Error::Csv {
            path: as_string.clone(),
            source,
        })?;
        let mut modes = Vec::new();
        for record in reader.deserialize() {
            let mode: BathMode = record.map_err(|source| Error::Csv {
                path: as_string.clone(),
                source,
            })?;
            modes.push(mode);
        }
        Self::discrete(modes, r)
    }

    /// Sample an Ohmic bath onto a geometric frequency grid.
    ///
    /// Cell `j` spans `[e_j, e_j+1]` with `|xi_j|^2 = J(m_j) (e_j+1 - e_j)`
    /// at the geometric midpoint `m_j`, covering `1e-5 cutoff` up to
    /// `60 cutoff`.
    pub fn discretized_ohmic(gamma: f64, cutoff: f64, r: f64, n_modes: usize) -> Result<Self> {
        let ohmic = Self::ohmic(gamma, cutoff, r)?;
        if n_modes == 0 {
            return Err(Error::InvalidParameter {
                name: "n_modes",
                message: "discretization needs at least one mode".into(),
            });
        }
        let lo = 1e-5 * cutoff;
        let hi = 60.0 * cutoff;
        let ratio = (hi / lo).powf(1.0 / n_modes as f64);
        let mut modes = Vec::with_capacity(n_modes);
        let mut left = lo;
        for _ in 0..n_modes {
            let right = left * ratio;
            let mid = (left * right).sqrt();
            modes.push(BathMode {
                omega: mid,
                xi_sq: ohmic.spectral_density(mid)? * (right - left),
            });
            left = right;
        }
        Self::discrete(modes, r)
    }

    pub fn kind(&self) -> &BathKind {
        &self.kind
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// `J(omega)` of an Ohmic bath.
    pub fn spectral_density(&self, omega: f64) -> Result<f64> {
        match self.kind {
            BathKind::Ohmic { gamma, cutoff } => Ok(gamma * omega * (-omega / cutoff).exp()),
            BathKind::Discrete(_) => Err(Error::WrongBathKind { expected: "Ohmic" }),
        }
    }

    /// Lag integral `F(t) = 2 int d omega J(omega) (t - sin(omega t) /
    /// omega) / omega`, an odd function of `t`.
    pub fn f_number(&self, t: f64) -> Result<f64> {
        require_finite("t", t)?;
        match &self.kind {
            BathKind::Ohmic { gamma, cutoff } => {
                let (gamma, big) = (*gamma, *cutoff);
                if gamma == 0.0 {
                    return Ok(0.0);
                }
                let integrand = move |omega: f64| (-omega / big).exp() * lag(omega, t);
                let q = quad::integrate_default(integrand, 0.0, 50.0 * big)?;
                Ok(2.0 * gamma * q.value)
            }
            BathKind::Discrete(modes) => Ok(2.0
                * modes
                    .iter()
                    .map(|m| m.xi_sq * lag(m.omega, t) / m.omega)
                    .sum::<f64>()),
        }
    }

    /// Sum or integral of `|xi|^2 |eta(tau)|^2` over the bath.
    fn response_weight(&self, tau: f64) -> Result<f64> {
        match &self.kind {
            BathKind::Ohmic { gamma, cutoff } => {
                let (gamma, big) = (*gamma, *cutoff);
                if gamma == 0.0 {
                    return Ok(0.0);
                }
                let integrand =
                    move |omega: f64| gamma * omega * (-omega / big).exp() * eta_abs_sq(omega, tau);
                Ok(quad::integrate_default(integrand, 0.0, 50.0 * big)?.value)
            }
            BathKind::Discrete(modes) => Ok(modes
                .iter()
                .map(|m| m.xi_sq * eta_abs_sq(m.omega, tau))
                .sum()),
        }
    }

    /// Vacuum suppression of a coherence with photon-number difference
    /// `delta_n` after time `tau`: `exp(-sum_j z_j / 2)`.
    pub fn vacuum_factor(&self, delta_n: i64, tau: f64) -> Result<f64> {
        require_finite("tau", tau)?;
        let dn2 = (delta_n * delta_n) as f64;
        if dn2 == 0.0 || self.r == 0.0 {
            return Ok(1.0);
        }
        let z = dn2 * self.r * self.r * self.response_weight(tau)?;
        Ok((-0.5 * z).exp())
    }

    /// Thermal integral `int d omega e^(-omega / cutoff) sin^2(omega tau /
    /// 2) / (omega (e^(omega / T) - 1))` of an Ohmic bath.
    ///
    /// Increases in both `tau` and `temperature`; zero at `temperature = 0`.
    pub fn thermal_integral(&self, tau: f64, temperature: f64) -> Result<f64> {
        require_finite("tau", tau)?;
        require_finite("temperature", temperature)?;
        let BathKind::Ohmic { cutoff, .. } = self.kind else {
            return Err(Error::WrongBathKind { expected: "Ohmic" });
        };
        if temperature < 0.0 {
            return Err(Error::InvalidParameter {
                name: "temperature",
                message: format!("temperature must be nonnegative, got {temperature}"),
            });
        }
        if temperature == 0.0 {
            return Ok(0.0);
        }
        let quarter_tau_sq = 0.25 * tau * tau;
        let integrand = move |omega: f64| {
            let s = sinc(0.5 * omega * tau);
            (-omega / cutoff).exp() * quarter_tau_sq * s * s * bose_weight(omega, temperature)
        };
        let upper = (50.0 * cutoff).max(20.0 * temperature);
        Ok(quad::integrate_default(integrand, 0.0, upper)?.value)
    }

    /// Thermal suppression `exp(-sum_j z_j nbar_j)` of a coherence with
    /// photon-number difference `delta_n`.
    pub fn thermal_factor(&self, delta_n: i64, tau: f64, temperature: f64) -> Result<f64> {
        require_finite("tau", tau)?;
        require_finite("temperature", temperature)?;
        if temperature < 0.0 {
            return Err(Error::InvalidParameter {
                name: "temperature",
                message: format!("temperature must be nonnegative, got {temperature}"),
            });
        }
        let dn2 = (delta_n * delta_n) as f64;
        if dn2 == 0.0 || self.r == 0.0 || temperature == 0.0 {
            return Ok(1.0);
        }
        let scale = dn2 * self.r * self.r;
        match &self.kind {
            BathKind::Ohmic { gamma, .. } => {
                let integral = self.thermal_integral(tau, temperature)?;
                Ok((-4.0 * gamma * scale * integral).exp())
            }
            BathKind::Discrete(modes) => {
                let exponent: f64 = modes
                    .iter()
                    .map(|m| {
                        let z = m.xi_sq * eta_abs_sq(m.omega, tau);
                        let nbar = bose_weight(m.omega, temperature) / m.omega;
                        z * nbar
                    })
                    .sum();
                Ok((-scale * exponent).exp())
            }
        }
    }
}

/// Precomputed dephasing factors on a photon-number grid `0..=cutoff`.
#[derive(Debug, Clone)]
pub struct DephasingTable {
    cutoff: usize,
    vacuum: DMatrix<f64>,
    thermal: DMatrix<f64>,
    tau: f64,
    temperature: f64,
}

impl DephasingTable {
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn vacuum(&self, n: usize, n_prime: usize) -> f64 {
        self.vacuum[(n, n_prime)]
    }

    pub fn thermal(&self, n: usize, n_prime: usize) -> f64 {
        self.thermal[(n, n_prime)]
    }

    /// Combined suppression `D(n, n') = D_vacuum D_thermal`.
    pub fn total(&self, n: usize, n_prime: usize) -> f64 {
        self.vacuum[(n, n_prime)] * self.thermal[(n, n_prime)]
    }
}

/// Tabulate vacuum and thermal factors for all photon-number pairs up to
/// `cutoff`.
pub fn dephasing_table(
    spec: &BathSpec,
    cutoff: usize,
    tau: f64,
    temperature: f64,
) -> Result<DephasingTable> {
    let size = cutoff + 1;
    // Both factors depend only on |n - n'|, so compute one column of
    // differences and spread it over the table.
    let mut by_diff_vacuum = Vec::with_capacity(size);
    let mut by_diff_thermal = Vec::with_capacity(size);
    for dn in 0..size {
        by_diff_vacuum.push(spec.vacuum_factor(dn as i64, tau)?);
        by_diff_thermal.push(spec.thermal_factor(dn as i64, tau, temperature)?);
    }
    let vacuum = DMatrix::from_fn(size, size, |n, np| by_diff_vacuum[n.abs_diff(np)]);
    let thermal = DMatrix::from_fn(size, size, |n, np| by_diff_thermal[n.abs_diff(np)]);
    Ok(DephasingTable {
        cutoff,
        vacuum,
        thermal,
        tau,
        temperature,
    })
}

/// Transform Fock coefficients through a dressed transfer: each `c_n` picks
/// up the swap phase `conj(p0)^n` and the bath-induced level shift
/// `exp(-i n (n + 1) r^2 F(-tau) / 2)`.
pub fn dressed_coefficients(
    fock: &FockVector,
    spec: &BathSpec,
    p0: Complex64,
    tau: f64,
) -> Result<FockVector> {
    let f_reverse = spec.f_number(-tau)?;
    let r_sq = spec.r * spec.r;
    let conj = p0.conj();
    let coeffs = fock
        .coeffs()
        .iter()
        .enumerate()
        .map(|(n, c)| {
            let n = n as f64;
            let shift = Complex64::from_polar(1.0, -0.5 * n * (n + 1.0) * r_sq * f_reverse);
            c * conj.powu(n as u32) * shift
        })
        .collect();
    FockVector::new(coeffs)
}
