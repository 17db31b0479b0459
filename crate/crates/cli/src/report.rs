//! JSON report shapes. Every float is rounded to 12 significant digits and
//! every phase is a `[re, im]` pair; each report embeds the scenario it was
//! produced from so results stay self-describing.

use num_complex::Complex64;
use serde::Serialize;
use serde_json::Value;

use resonet::fmt::sig12;

use crate::scenario::Scenario;

/// A float as a JSON number carrying at most 12 significant digits.
pub fn num(x: f64) -> Value {
    match sig12(x).parse::<f64>() {
        Ok(v) => Value::from(v),
        Err(_) => Value::Null,
    }
}

pub fn nums<I: IntoIterator<Item = f64>>(xs: I) -> Vec<Value> {
    xs.into_iter().map(num).collect()
}

/// A complex number as a `[re, im]` pair.
pub fn phase(z: Complex64) -> [Value; 2] {
    [num(z.re), num(z.im)]
}

#[derive(Serialize)]
pub struct EdgeReport {
    pub from: usize,
    pub to: usize,
    pub coupling: Value,
}

#[derive(Serialize)]
pub struct TopologyReport {
    pub family: String,
    pub n_nodes: usize,
    pub n_edges: usize,
    pub edges: Vec<EdgeReport>,
    /// `antipode_map[u] = [u, mirror of u]`.
    pub antipode_map: Vec<[usize; 2]>,
    /// Coupling-matrix eigenvalues, ascending.
    pub eigenvalues: Vec<Value>,
    /// Bond strengths along tridiagonal families, node 0 outward.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bond_couplings: Option<Vec<Value>>,
    pub scenario: Scenario,
}

/// Fock-space cross-check outcome: either the dimensions were too large to
/// attempt it, or the measured overlap with the mirrored state.
#[derive(Serialize)]
#[serde(untagged)]
pub enum OracleReport {
    Skipped {
        skipped: String,
    },
    Ran {
        dim: usize,
        cutoff: usize,
        /// `scenario-state` or `random-fock`.
        input: String,
        /// Total coherent-state weight discarded by truncation.
        truncation_tail: Value,
        overlap: Value,
        /// `overlap >= 1 - threshold` counts as a pass.
        threshold: Value,
        passed: bool,
    },
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        match self {
            OracleReport::Skipped { .. } => true,
            OracleReport::Ran { passed, .. } => *passed,
        }
    }
}

#[derive(Serialize)]
pub struct VerifyReport {
    pub family: String,
    pub n_nodes: usize,
    pub optimal_time: Value,
    pub evaluated_time: Value,
    pub tolerance: Value,
    pub max_deviation: Value,
    pub is_perfect: bool,
    /// Corner propagator entry `P[n-1, 0]`.
    pub measured_phase: [Value; 2],
    /// `i^p` for the named families; absent for custom networks.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub analytic_phase: Option<[Value; 2]>,
    /// Full single-photon transfer phase including the on-site rotation.
    pub transfer_phase: [Value; 2],
    pub oracle: OracleReport,
    pub passed: bool,
    pub scenario: Scenario,
}

#[derive(Serialize)]
pub struct SweepReport {
    pub rows: usize,
    pub out: String,
    pub vacuum_out: String,
    pub monotonicity_violations: Vec<String>,
    pub scenario: Scenario,
}

#[derive(Serialize)]
pub struct MonteCarloReport {
    pub value: Value,
    pub std_error: Value,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Serialize)]
pub struct FidelityReport {
    pub m: usize,
    pub tau: Value,
    pub temperature: Value,
    pub haar: Value,
    pub monte_carlo: MonteCarloReport,
    /// |haar - mc| in units of the Monte Carlo standard error.
    pub gap_sigmas: Value,
    pub scenario: Scenario,
}
