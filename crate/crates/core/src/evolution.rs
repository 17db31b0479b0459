//! Spectral propagators `e^{iKt}` and mirror-swap certification.
//!
//! All hopping matrices here are real symmetric, so every propagator comes
//! from one eigendecomposition: `e^{iKt} = U^T diag(e^{i lambda t}) U` with
//! the rows of `U` holding orthonormal eigenvectors.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::topology::{antipode, CouplingMatrix, Family};

/// Tolerance below which a propagator counts as a perfect mirror swap.
pub const DEFAULT_SWAP_TOLERANCE: f64 = 1e-9;

const SYMMETRY_TOL: f64 = 1e-12;

/// Eigenpairs of a real symmetric matrix, sorted by ascending eigenvalue.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: DVector<f64>,
    u: DMatrix<f64>,
}

impl SpectralDecomposition {
    /// Decompose a real symmetric matrix.
    pub fn new(matrix: &DMatrix<f64>) -> Result<Self> {
        let n = matrix.nrows();
        if matrix.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: matrix.ncols(),
            });
        }
        let mut max_asym = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                max_asym = max_asym.max((matrix[(i, j)] - matrix[(j, i)]).abs());
            }
        }
        if max_asym > SYMMETRY_TOL {
            return Err(Error::NotSymmetric {
                max_asymmetry: max_asym,
            });
        }

        let eigen = matrix.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eigen.eigenvalues[a].total_cmp(&eigen.eigenvalues[b]));

        let mut eigenvalues = DVector::zeros(n);
        let mut u = DMatrix::zeros(n, n);
        for (row, &k) in order.iter().enumerate() {
            eigenvalues[row] = eigen.eigenvalues[k];
            u.row_mut(row).copy_from(&eigen.eigenvectors.column(k).transpose());
        }
        Ok(Self { eigenvalues, u })
    }

    pub fn n_nodes(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    /// Orthonormal eigenvectors as matrix rows, in eigenvalue order.
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.u
    }

    /// Entry `[to, from]` of `e^{iKt}` from an O(n) eigenvalue scan.
    pub fn amplitude(&self, from: usize, to: usize, t: f64) -> Complex64 {
        let n = self.n_nodes();
        assert!(from < n && to < n, "node index out of range");
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..n {
            let weight = self.u[(k, to)] * self.u[(k, from)];
            acc += weight * Complex64::from_polar(1.0, self.eigenvalues[k] * t);
        }
        acc
    }

    /// Full propagator `e^{iKt}`.
    pub fn propagator(&self, t: f64) -> Propagator {
        let uc = self.u.map(|x| Complex64::new(x, 0.0));
        let mut scaled = uc.clone();
        for (k, mut row) in scaled.row_iter_mut().enumerate() {
            let phase = Complex64::from_polar(1.0, self.eigenvalues[k] * t);
            row *= phase;
        }
        Propagator {
            matrix: uc.transpose() * scaled,
            time: t,
        }
    }

    /// Rebuild the original matrix, `U^T diag(lambda) U`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let mut scaled = self.u.clone();
        for (k, mut row) in scaled.row_iter_mut().enumerate() {
            row *= self.eigenvalues[k];
        }
        self.u.transpose() * scaled
    }
}

/// Unitary `e^{iKt}` evaluated at a fixed time.
#[derive(Debug, Clone)]
pub struct Propagator {
    matrix: DMatrix<Complex64>,
    time: f64,
}

impl Propagator {
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// Transport a vector of node amplitudes.
    pub fn apply(&self, amplitudes: &DVector<Complex64>) -> Result<DVector<Complex64>> {
        if amplitudes.len() != self.matrix.nrows() {
            return Err(Error::DimensionMismatch {
                expected: self.matrix.nrows(),
                found: amplitudes.len(),
            });
        }
        Ok(&self.matrix * amplitudes)
    }

    /// Largest entry of `P P^dagger - I`, zero for an exact unitary.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.matrix.nrows();
        let gram = &self.matrix * self.matrix.adjoint();
        let mut defect = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let expected = if i == j { 1.0 } else { 0.0 };
                defect = defect.max((gram[(i, j)] - Complex64::new(expected, 0.0)).norm());
            }
        }
        defect
    }
}

/// `i^p` computed exactly from `p mod 4`.
pub fn i_power(p: u64) -> Complex64 {
    match p % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Shape of an analytic mirror swap: which power of `i` its propagator
/// carries at the transfer time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwapKind {
    /// Power `g` of a path base with `theta + 1` nodes; phase `i^(theta g)`.
    PathPower { theta: u8, g: u32 },
    /// Engineered chain of `n` nodes; phase `i^(n-1)`.
    Chain { n: usize },
}

impl SwapKind {
    pub fn from_family(family: Family) -> Result<Self> {
        match family {
            Family::Path2 => Ok(SwapKind::PathPower { theta: 1, g: 1 }),
            Family::Path3 => Ok(SwapKind::PathPower { theta: 2, g: 1 }),
            Family::Hypercube { theta, g } => Ok(SwapKind::PathPower { theta, g }),
            Family::EngineeredChain { n } => Ok(SwapKind::Chain { n }),
            Family::Custom => Err(Error::InvalidFamily {
                expected: "path power or engineered chain",
                found: Family::Custom.to_string(),
            }),
        }
    }

    /// Exponent `p` in the analytic swap phase `i^p`.
    pub fn i_exponent(&self) -> u64 {
        match *self {
            SwapKind::PathPower { theta, g } => theta as u64 * g as u64,
            SwapKind::Chain { n } => n as u64 - 1,
        }
    }

    /// Analytic swap phase `i^p` of the hopping propagator alone.
    pub fn swap_phase(&self) -> Complex64 {
        i_power(self.i_exponent())
    }
}

/// Phase multiplying each transferred photon when the resonators share the
/// on-site frequency `omega`: `e^{i omega tau} i^p`.
pub fn transfer_phase(kind: SwapKind, omega: f64, tau: f64) -> Complex64 {
    Complex64::from_polar(1.0, omega * tau) * kind.swap_phase()
}

/// Transfer phases for several co-located modes of frequencies `omegas`.
pub fn multimode_phases(kind: SwapKind, omegas: &[f64], tau: f64) -> Vec<Complex64> {
    omegas
        .iter()
        .map(|&omega| transfer_phase(kind, omega, tau))
        .collect()
}

/// Outcome of checking `e^{iK t}` against the analytic mirror swap.
#[derive(Debug, Clone, Copy)]
pub struct SwapCertificate {
    pub is_perfect: bool,
    pub optimal_time: f64,
    /// Time the propagator was evaluated at; differs from `optimal_time`
    /// only for deliberate off-time checks.
    pub evaluated_time: f64,
    /// Measured corner entry `P[n-1, 0]`.
    pub global_phase: Complex64,
    /// Largest entry of `P - i^p R`, `R` the mirror permutation.
    pub max_deviation: f64,
    pub tolerance: f64,
}

/// Certify a mirror swap at the network's analytic transfer time, with the
/// default tolerance.
pub fn verify_swap(k: &CouplingMatrix) -> Result<SwapCertificate> {
    verify_swap_with_tolerance(k, DEFAULT_SWAP_TOLERANCE)
}

/// Certify a mirror swap at the network's analytic transfer time.
pub fn verify_swap_with_tolerance(k: &CouplingMatrix, tolerance: f64) -> Result<SwapCertificate> {
    let tau = k.optimal_time()?;
    verify_swap_at(k, tau, tolerance)
}

/// Certify a mirror swap with the propagator evaluated at an arbitrary
/// time. The phase target stays the analytic one, so off-time evaluations
/// report their full deviation instead of silently passing.
pub fn verify_swap_at(k: &CouplingMatrix, time: f64, tolerance: f64) -> Result<SwapCertificate> {
    let kind = SwapKind::from_family(k.family())?;
    let optimal_time = k.optimal_time()?;
    let decomp = SpectralDecomposition::new(k.matrix())?;
    let prop = decomp.propagator(time);
    let n = k.n_nodes();
    let target = kind.swap_phase();
    let mut max_deviation = 0.0f64;
    for u in 0..n {
        for v in 0..n {
            let expected = if u == antipode(n, v) { target } else { Complex64::new(0.0, 0.0) };
            max_deviation = max_deviation.max((prop.matrix()[(u, v)] - expected).norm());
        }
    }
    Ok(SwapCertificate {
        is_perfect: max_deviation <= tolerance,
        optimal_time,
        evaluated_time: time,
        global_phase: prop.matrix()[(n - 1, 0)],
        max_deviation,
        tolerance,
    })
}

/// Best transfer found by scanning `|[e^{iKt}]_{to,from}|` over `(0, t_max]`.
#[derive(Debug, Clone, Copy)]
pub struct TransferSearch {
    pub time: f64,
    /// Transfer amplitude at the best time.
    pub phase: Complex64,
    /// `1 - |amplitude|` at the best time.
    pub deviation: f64,
}

/// Locate the time maximizing `|[e^{iKt}]_{to,from}|` by a uniform scan of
/// `grid` points followed by golden-section refinement.
pub fn find_transfer_time(
    decomp: &SpectralDecomposition,
    from: usize,
    to: usize,
    t_max: f64,
    grid: usize,
) -> Result<TransferSearch> {
    let n = decomp.n_nodes();
    for &idx in &[from, to] {
        if idx >= n {
            return Err(Error::IndexOutOfRange { index: idx, size: n });
        }
    }
    if !(t_max > 0.0) || !t_max.is_finite() {
        return Err(Error::InvalidParameter {
            name: "t_max",
            message: format!("search horizon must be positive and finite, got {t_max}"),
        });
    }
    if grid < 2 {
        return Err(Error::EmptyGrid { name: "time grid" });
    }

    let objective = |t: f64| 1.0 - decomp.amplitude(from, to, t).norm();
    let step = t_max / grid as f64;
    let mut best_t = step;
    let mut best_val = objective(step);
    for i in 2..=grid {
        let t = step * i as f64;
        let val = objective(t);
        if val < best_val {
            best_val = val;
            best_t = t;
        }
    }

    let lo = (best_t - step).max(step * 1e-6);
    let hi = (best_t + step).min(t_max + step);
    let time = golden_min(objective, lo, hi, 1e-12 * t_max.max(1.0));
    let amp = decomp.amplitude(from, to, time);
    Ok(TransferSearch {
        time,
        phase: amp,
        deviation: 1.0 - amp.norm(),
    })
}

/// Golden-section minimizer for a unimodal scalar function on `[a, b]`,
/// run until the bracket is narrower than `tol`.
pub fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let ratio = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}
