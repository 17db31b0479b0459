//! Brute-force references: exact Fock-space evolution of the full photon
//! Hamiltonian and exact single-mode dephasing, used to validate the
//! analytic transfer and bath results.
//!
//! The network Hamiltonian `H = Omega sum_u n_u + sum_uv K_uv a+_u a_v` is
//! real symmetric in the product Fock basis, so exact evolution is one
//! symmetric eigendecomposition for small spaces and a Lanczos propagator
//! with full reorthogonalization for large ones.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::evolution::SpectralDecomposition;
use crate::states::FockVector;
use crate::topology::CouplingMatrix;

/// Largest allowed product-basis dimension.
pub const DEFAULT_MAX_FOCK_DIM: usize = 100_000;
/// Dimension up to which evolution goes through a dense eigendecomposition.
pub const DENSE_EIGEN_LIMIT: usize = 2000;

const KRYLOV_DIM: usize = 48;
const KRYLOV_RESIDUAL_TOL: f64 = 1e-8;

/// Product Fock basis of `n_nodes` resonators truncated at `cutoff` photons
/// each, indexed with node 0 most significant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockSpace {
    n_nodes: usize,
    cutoff: usize,
    dim: usize,
}

impl FockSpace {
    pub fn new(n_nodes: usize, cutoff: usize) -> Result<Self> {
        Self::new_limited(n_nodes, cutoff, DEFAULT_MAX_FOCK_DIM)
    }

    pub fn new_limited(n_nodes: usize, cutoff: usize, max_dim: usize) -> Result<Self> {
        if n_nodes == 0 {
            return Err(Error::InvalidParameter {
                name: "n_nodes",
                message: "Fock space needs at least one node".into(),
            });
        }
        let base = cutoff as u128 + 1;
        let dim = base
            .checked_pow(n_nodes as u32)
            .filter(|&d| d <= max_dim as u128)
            .ok_or(Error::FockSpaceTooLarge {
                dim: base
                    .checked_pow(n_nodes as u32)
                    .map_or(usize::MAX, |d| d.min(usize::MAX as u128) as usize),
                limit: max_dim,
            })? as usize;
        Ok(Self {
            n_nodes,
            cutoff,
            dim,
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Basis index of an occupation tuple.
    pub fn index(&self, occupations: &[usize]) -> Result<usize> {
        if occupations.len() != self.n_nodes {
            return Err(Error::DimensionMismatch {
                expected: self.n_nodes,
                found: occupations.len(),
            });
        }
        let mut idx = 0usize;
        for &n in occupations {
            if n > self.cutoff {
                return Err(Error::CutoffMismatch {
                    expected: self.cutoff,
                    found: n,
                });
            }
            idx = idx * (self.cutoff + 1) + n;
        }
        Ok(idx)
    }

    /// Occupation tuple of a basis index.
    pub fn occupations(&self, index: usize) -> Vec<usize> {
        assert!(index < self.dim, "basis index out of range");
        let base = self.cutoff + 1;
        let mut out = vec![0usize; self.n_nodes];
        let mut rest = index;
        for slot in out.iter_mut().rev() {
            *slot = rest % base;
            rest /= base;
        }
        out
    }
}

/// Real symmetric sparse matrix in compressed-row form.
#[derive(Debug, Clone)]
pub struct SparseHamiltonian {
    dim: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseHamiltonian {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// `y = H x`.
    pub fn mul_vec(&self, x: &DVector<Complex64>, y: &mut DVector<Complex64>) {
        for i in 0..self.dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            y[i] = acc;
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                out[(i, self.col_idx[k])] += self.values[k];
            }
        }
        out
    }

    /// Upper bound on the spectral radius from row sums.
    fn gershgorin_bound(&self) -> f64 {
        let mut bound = 0.0f64;
        for i in 0..self.dim {
            let row: f64 = (self.row_ptr[i]..self.row_ptr[i + 1])
                .map(|k| self.values[k].abs())
                .sum();
            bound = bound.max(row);
        }
        bound
    }
}

/// Assemble `H = Omega sum_u n_u + sum_uv K_uv a+_u a_v` on a truncated
/// product basis. Raising a node past the cutoff annihilates, which keeps
/// the truncated matrix symmetric.
pub fn build_hamiltonian(
    space: &FockSpace,
    k: &CouplingMatrix,
    omega: f64,
) -> Result<SparseHamiltonian> {
    if k.n_nodes() != space.n_nodes() {
        return Err(Error::DimensionMismatch {
            expected: space.n_nodes(),
            found: k.n_nodes(),
        });
    }
    let n_nodes = space.n_nodes();
    let base = space.cutoff() + 1;
    let mut strides = vec![1usize; n_nodes];
    for u in (0..n_nodes.saturating_sub(1)).rev() {
        strides[u] = strides[u + 1] * base;
    }

    let mut row_ptr = Vec::with_capacity(space.dim() + 1);
    let mut col_idx = Vec::new();
    let mut values = Vec::new();
    row_ptr.push(0);

    let km = k.matrix();
    let mut entries: Vec<(usize, f64)> = Vec::new();
    for i in 0..space.dim() {
        let occ = space.occupations(i);
        entries.clear();

        let total: usize = occ.iter().sum();
        if omega != 0.0 && total > 0 {
            entries.push((i, omega * total as f64));
        }

        // a+_u a_v moves one photon from v to u.
        for u in 0..n_nodes {
            for v in 0..n_nodes {
                if u == v {
                    continue;
                }
                let coupling = km[(u, v)];
                if coupling == 0.0 || occ[v] == 0 || occ[u] + 1 > space.cutoff() {
                    continue;
                }
                let j = i + strides[u] - strides[v];
                let amp = coupling * ((occ[v] * (occ[u] + 1)) as f64).sqrt();
                entries.push((j, amp));
            }
        }

        entries.sort_by_key(|&(j, _)| j);
        for &(j, val) in entries.iter() {
            col_idx.push(j);
            values.push(val);
        }
        row_ptr.push(col_idx.len());
    }

    Ok(SparseHamiltonian {
        dim: space.dim(),
        row_ptr,
        col_idx,
        values,
    })
}

/// Evolve `psi` by `e^{-iHt}`, choosing dense or Krylov propagation by
/// dimension.
pub fn evolve_exact(
    h: &SparseHamiltonian,
    psi: &DVector<Complex64>,
    t: f64,
) -> Result<DVector<Complex64>> {
    if psi.len() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: psi.len(),
        });
    }
    if h.dim() <= DENSE_EIGEN_LIMIT {
        evolve_dense(h, psi, t)
    } else {
        evolve_krylov(h, psi, t)
    }
}

fn evolve_dense(
    h: &SparseHamiltonian,
    psi: &DVector<Complex64>,
    t: f64,
) -> Result<DVector<Complex64>> {
    let decomp = SpectralDecomposition::new(&h.to_dense())?;
    let u = decomp.basis();
    let dim = h.dim();
    // Project onto the eigenbasis, phase, and project back; U is real so the
    // products stay cheap.
    let mut modal = DVector::from_element(dim, Complex64::new(0.0, 0.0));
    for k in 0..dim {
        let mut acc = Complex64::new(0.0, 0.0);
        for m in 0..dim {
            acc += u[(k, m)] * psi[m];
        }
        modal[k] = acc * Complex64::from_polar(1.0, -decomp.eigenvalues()[k] * t);
    }
    let mut out = DVector::from_element(dim, Complex64::new(0.0, 0.0));
    for k in 0..dim {
        let coeff = modal[k];
        if coeff.norm_sqr() == 0.0 {
            continue;
        }
        for m in 0..dim {
            out[m] += u[(k, m)] * coeff;
        }
    }
    Ok(out)
}

/// Krylov propagator for dimensions past the dense limit: Lanczos with full
/// reorthogonalization, stepping so each substep stays well inside the
/// Krylov approximation range. Public so small cases can cross-check it
/// against the dense path.
pub fn evolve_krylov(
    h: &SparseHamiltonian,
    psi: &DVector<Complex64>,
    t: f64,
) -> Result<DVector<Complex64>> {
    if psi.len() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: psi.len(),
        });
    }
    let scale = h.gershgorin_bound() * t.abs();
    let substeps = ((scale / 10.0).ceil() as usize).max(1);
    let dt = t / substeps as f64;
    let mut state = psi.clone();
    for _ in 0..substeps {
        state = krylov_step(h, &state, dt)?;
    }
    Ok(state)
}

fn krylov_step(
    h: &SparseHamiltonian,
    psi: &DVector<Complex64>,
    dt: f64,
) -> Result<DVector<Complex64>> {
    let norm0 = psi.norm();
    if norm0 == 0.0 {
        return Ok(psi.clone());
    }
    let dim = h.dim();
    let m_max = KRYLOV_DIM.min(dim);

    let mut basis: Vec<DVector<Complex64>> = Vec::with_capacity(m_max);
    basis.push(psi.unscale(norm0));
    let mut alphas: Vec<f64> = Vec::with_capacity(m_max);
    let mut betas: Vec<f64> = Vec::with_capacity(m_max);
    let mut w = DVector::from_element(dim, Complex64::new(0.0, 0.0));
    let mut breakdown = false;

    for j in 0..m_max {
        h.mul_vec(&basis[j], &mut w);
        let alpha = basis[j].dotc(&w).re;
        alphas.push(alpha);
        w -= basis[j].scale(alpha);
        if j > 0 {
            let beta_prev = betas[j - 1];
            w -= basis[j - 1].scale(beta_prev);
        }
        // Full reorthogonalization, twice, to hold the basis orthonormal.
        for _ in 0..2 {
            for v in basis.iter() {
                let overlap = v.dotc(&w);
                w -= v * overlap;
            }
        }
        let beta = w.norm();
        if beta < 1e-14 * norm0.max(1.0) {
            breakdown = true;
            break;
        }
        if j + 1 < m_max {
            betas.push(beta);
            basis.push(w.unscale(beta));
        } else {
            betas.push(beta);
        }
    }

    let k = alphas.len();
    let mut tridiag = DMatrix::zeros(k, k);
    for j in 0..k {
        tridiag[(j, j)] = alphas[j];
        if j + 1 < k {
            tridiag[(j, j + 1)] = betas[j];
            tridiag[(j + 1, j)] = betas[j];
        }
    }
    let eig = tridiag.symmetric_eigen();

    // y = e^{-i T dt} e_1 * norm0 in the Krylov coordinates.
    let mut y = vec![Complex64::new(0.0, 0.0); k];
    for col in 0..k {
        let phase = Complex64::from_polar(1.0, -eig.eigenvalues[col] * dt);
        let first = eig.eigenvectors[(0, col)];
        for row in 0..k {
            y[row] += eig.eigenvectors[(row, col)] * phase * first * norm0;
        }
    }

    if !breakdown && k == m_max {
        let residual = betas[k - 1] * y[k - 1].norm();
        if residual > KRYLOV_RESIDUAL_TOL * norm0.max(1.0) {
            return Err(Error::KrylovDidNotConverge { residual });
        }
    }

    let mut out = DVector::from_element(dim, Complex64::new(0.0, 0.0));
    for (j, v) in basis.iter().enumerate() {
        out += v * y[j];
    }
    Ok(out)
}

/// Dephasing factor of a discrete bath from the thermal expectation of a
/// displacement: `prod_j exp(-|beta_j|^2 (nbar_j + 1/2))` with
/// `|beta_j|^2 = dn^2 r^2 |xi_j|^2 |eta_j(tau)|^2`.
///
/// This reaches the same number as `vacuum_factor * thermal_factor` through
/// the Gaussian closed form of the displacement average instead of the
/// vacuum/thermal split, so agreement is a meaningful cross-check.
pub fn discrete_dephasing_exact(
    delta_n: i64,
    spec: &crate::bath::BathSpec,
    tau: f64,
    temperature: f64,
) -> Result<f64> {
    let crate::bath::BathKind::Discrete(modes) = spec.kind() else {
        return Err(Error::WrongBathKind {
            expected: "discrete",
        });
    };
    if temperature < 0.0 {
        return Err(Error::InvalidParameter {
            name: "temperature",
            message: format!("temperature must be nonnegative, got {temperature}"),
        });
    }
    let dn_r_sq = (delta_n * delta_n) as f64 * spec.r() * spec.r();
    let mut product = 1.0f64;
    for mode in modes {
        let beta_sq = dn_r_sq * mode.xi_sq * crate::bath::eta_abs_sq(mode.omega, tau);
        let nbar = if temperature == 0.0 {
            0.0
        } else {
            1.0 / (mode.omega / temperature).exp_m1()
        };
        product *= (-beta_sq * (nbar + 0.5)).exp();
    }
    Ok(product)
}

/// Per-node cutoff that keeps a truncated coherent state's discarded
/// probability below 1e-8: `ceil(|alpha|^2 + 8 |alpha| + 8)`.
pub fn coherent_cutoff(alpha: Complex64) -> usize {
    let a = alpha.norm();
    (a * a + 8.0 * a + 8.0).ceil() as usize
}

/// Truncated coherent-state coefficients, renormalized, plus the weight
/// lost to truncation.
pub fn coherent_fock_coeffs(alpha: Complex64, cutoff: usize) -> Result<(FockVector, f64)> {
    let mut coeffs = Vec::with_capacity(cutoff + 1);
    let mut c = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    coeffs.push(c);
    for n in 1..=cutoff {
        c *= alpha / (n as f64).sqrt();
        coeffs.push(c);
    }
    let kept: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
    let tail = (1.0 - kept).max(0.0);
    Ok((FockVector::normalized(coeffs)?, tail))
}

/// Tensor product of per-node Fock vectors as a full-space amplitude vector.
pub fn product_state(space: &FockSpace, nodes: &[FockVector]) -> Result<DVector<Complex64>> {
    if nodes.len() != space.n_nodes() {
        return Err(Error::DimensionMismatch {
            expected: space.n_nodes(),
            found: nodes.len(),
        });
    }
    for node in nodes {
        if node.cutoff() != space.cutoff() {
            return Err(Error::CutoffMismatch {
                expected: space.cutoff(),
                found: node.cutoff(),
            });
        }
    }
    let mut amps = vec![Complex64::new(1.0, 0.0)];
    for node in nodes {
        let mut next = Vec::with_capacity(amps.len() * node.coeffs().len());
        for &a in &amps {
            for &c in node.coeffs() {
                next.push(a * c);
            }
        }
        amps = next;
    }
    Ok(DVector::from_vec(amps))
}

/// `<sum_u n_u>` of a full-space state.
pub fn total_photon_expectation(space: &FockSpace, psi: &DVector<Complex64>) -> Result<f64> {
    if psi.len() != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            found: psi.len(),
        });
    }
    let mut acc = 0.0;
    for i in 0..space.dim() {
        let weight = psi[i].norm_sqr();
        if weight > 0.0 {
            let total: usize = space.occupations(i).iter().sum();
            acc += weight * total as f64;
        }
    }
    Ok(acc)
}

/// Exact reduced coherence of one resonator coupled to one bath mode.
///
/// Evolves `H_n = omega b+ b + n r xi (b + b+)` on a truncated bath ladder
/// for both photon sectors and returns
/// `sum_k p_k <k| e^{i H_n' tau} e^{-i H_n tau} |k>` over the thermal
/// distribution `p_k`. This is the factor multiplying the `(n, n')`
/// coherence, computed without any influence-functional input.
pub fn single_mode_coherence(
    omega: f64,
    xi_sq: f64,
    r: f64,
    n: usize,
    n_prime: usize,
    tau: f64,
    temperature: f64,
    bath_cutoff: usize,
) -> Result<Complex64> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::InvalidParameter {
            name: "omega",
            message: format!("mode frequency must be positive, got {omega}"),
        });
    }
    if xi_sq < 0.0 || temperature < 0.0 || r < 0.0 {
        return Err(Error::InvalidParameter {
            name: "single_mode_coherence",
            message: "xi_sq, r and temperature must be nonnegative".into(),
        });
    }
    let dim = bath_cutoff + 1;
    let g = r * xi_sq.sqrt();

    let sector = |photons: usize| -> DMatrix<f64> {
        let shift = photons as f64 * g;
        let mut h = DMatrix::zeros(dim, dim);
        for k in 0..dim {
            h[(k, k)] = omega * k as f64;
            if k + 1 < dim {
                let hop = shift * ((k + 1) as f64).sqrt();
                h[(k, k + 1)] = hop;
                h[(k + 1, k)] = hop;
            }
        }
        h
    };

    let decomp_n = SpectralDecomposition::new(&sector(n))?;
    let decomp_np = SpectralDecomposition::new(&sector(n_prime))?;
    let evolve = |decomp: &SpectralDecomposition, k: usize, t: f64| -> DVector<Complex64> {
        let u = decomp.basis();
        let mut out = DVector::from_element(dim, Complex64::new(0.0, 0.0));
        for mode in 0..dim {
            let coeff = u[(mode, k)] * Complex64::from_polar(1.0, -decomp.eigenvalues()[mode] * t);
            for row in 0..dim {
                out[row] += u[(mode, row)] * coeff;
            }
        }
        out
    };

    let mut total = Complex64::new(0.0, 0.0);
    if temperature == 0.0 {
        let lhs = evolve(&decomp_np, 0, tau);
        let rhs = evolve(&decomp_n, 0, tau);
        total = lhs.dotc(&rhs);
    } else {
        let x = omega / temperature;
        let ground = -(-x).exp_m1();
        let mut k = 0usize;
        loop {
            let weight = ground * (-(k as f64) * x).exp();
            if weight < 1e-14 {
                break;
            }
            if k > dim / 2 {
                // Keep headroom above the highest populated level so the
                // displaced evolution does not hit the truncation edge.
                return Err(Error::InvalidParameter {
                    name: "bath_cutoff",
                    message: format!(
                        "thermal occupation still {weight:.3e} at level {k}; raise the cutoff"
                    ),
                });
            }
            let lhs = evolve(&decomp_np, k, tau);
            let rhs = evolve(&decomp_n, k, tau);
            total += weight * lhs.dotc(&rhs);
            k += 1;
        }
    }
    Ok(total)
}
