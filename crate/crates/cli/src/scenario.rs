//! Scenario documents: one JSON file describing the network, bath, initial
//! state, and run parameters of an experiment.

use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use resonet::bath::{BathMode, BathSpec};
use resonet::states::NodeState;
use resonet::topology::{
    coupling_from_graph, engineered_chain, hypercube, path_graph, CouplingMatrix, Graph,
};

use crate::CliError;

/// Root of a scenario document. Blocks a subcommand does not use may be
/// omitted; each subcommand validates the ones it needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub network: Option<NetworkSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bath: Option<BathBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<Vec<NodeState>>,
    #[serde(default)]
    pub run: RunBlock,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::input(format!("{}: {e}", path.display())))
    }

    pub fn network(&self) -> Result<&NetworkSpec, CliError> {
        self.network
            .as_ref()
            .ok_or_else(|| CliError::input("scenario has no network block".into()))
    }

    pub fn bath(&self) -> Result<&BathBlock, CliError> {
        self.bath
            .as_ref()
            .ok_or_else(|| CliError::input("scenario has no bath block".into()))
    }
}

/// Network description, tagged by family. `omega` is the common on-site
/// frequency and defaults to zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum NetworkSpec {
    Path2 {
        kappa: f64,
        #[serde(default)]
        omega: f64,
    },
    Path3 {
        kappa: f64,
        #[serde(default)]
        omega: f64,
    },
    Hypercube {
        theta: u8,
        g: u32,
        kappa: f64,
        #[serde(default)]
        omega: f64,
    },
    EngineeredChain {
        n: usize,
        lambda: f64,
        #[serde(default)]
        omega: f64,
    },
    Custom {
        adjacency: Vec<Vec<f64>>,
        kappa: f64,
        #[serde(default)]
        omega: f64,
    },
}

impl NetworkSpec {
    /// Build the coupling matrix this block describes.
    pub fn coupling(&self) -> Result<CouplingMatrix, CliError> {
        let k = match self {
            NetworkSpec::Path2 { kappa, .. } => {
                coupling_from_graph(&path_graph(2).map_err(CliError::from_input)?, *kappa)
            }
            NetworkSpec::Path3 { kappa, .. } => {
                coupling_from_graph(&path_graph(3).map_err(CliError::from_input)?, *kappa)
            }
            NetworkSpec::Hypercube {
                theta, g, kappa, ..
            } => coupling_from_graph(
                &hypercube(*theta, *g).map_err(CliError::from_input)?,
                *kappa,
            ),
            NetworkSpec::EngineeredChain { n, lambda, .. } => engineered_chain(*n, *lambda),
            NetworkSpec::Custom {
                adjacency, kappa, ..
            } => {
                let rows = adjacency.len();
                if rows == 0 {
                    return Err(CliError::input("custom adjacency is empty".into()));
                }
                if adjacency.iter().any(|row| row.len() != rows) {
                    return Err(CliError::input(format!(
                        "custom adjacency must be square, got {rows} rows of lengths {:?}",
                        adjacency.iter().map(Vec::len).collect::<Vec<_>>()
                    )));
                }
                let m = DMatrix::from_fn(rows, rows, |i, j| adjacency[i][j]);
                coupling_from_graph(&Graph::custom(m).map_err(CliError::from_input)?, *kappa)
            }
        };
        k.map_err(CliError::from_input)
    }

    pub fn omega(&self) -> f64 {
        match self {
            NetworkSpec::Path2 { omega, .. }
            | NetworkSpec::Path3 { omega, .. }
            | NetworkSpec::Hypercube { omega, .. }
            | NetworkSpec::EngineeredChain { omega, .. }
            | NetworkSpec::Custom { omega, .. } => *omega,
        }
    }
}

/// Bath description, tagged by kind. Discrete baths list their modes inline
/// or point at a CSV file with `omega,xi_sq` columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BathBlock {
    Ohmic {
        gamma: f64,
        cutoff: f64,
        r: f64,
    },
    Discrete {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        modes: Option<Vec<BathMode>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        csv: Option<String>,
        r: f64,
    },
}

impl BathBlock {
    /// Build the bath spec; `base` resolves a relative CSV path against the
    /// scenario file's directory.
    pub fn to_spec(&self, base: Option<&Path>) -> Result<BathSpec, CliError> {
        match self {
            BathBlock::Ohmic { gamma, cutoff, r } => {
                BathSpec::ohmic(*gamma, *cutoff, *r).map_err(CliError::from_input)
            }
            BathBlock::Discrete { modes, csv, r } => match (modes, csv) {
                (Some(modes), None) => {
                    BathSpec::discrete(modes.clone(), *r).map_err(CliError::from_input)
                }
                (None, Some(csv)) => {
                    let raw = Path::new(csv);
                    let resolved = match base {
                        Some(dir) if raw.is_relative() => dir.join(raw),
                        _ => raw.to_path_buf(),
                    };
                    BathSpec::discrete_from_csv(&resolved, *r).map_err(CliError::from_input)
                }
                (Some(_), Some(_)) => Err(CliError::input(
                    "discrete bath: give either inline modes or a csv path, not both".into(),
                )),
                (None, None) => Err(CliError::input(
                    "discrete bath needs inline modes or a csv path".into(),
                )),
            },
        }
    }
}

/// Run parameters. Everything is optional here; each subcommand checks for
/// the fields it requires, and command-line flags override these values.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunBlock {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// Evaluation time override for `verify`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time: Option<f64>,
    /// Transfer time for `dephasing` and `fidelity`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub temperature: Option<f64>,
    /// Superposition levels `0..m`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub temperature_grid: Option<Vec<f64>>,
    /// Chain length the sweep reports its transfers for.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chain_n: Option<usize>,
    /// Search horizon for custom-network transfer times.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    /// Scan resolution for custom-network transfer times.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
}
