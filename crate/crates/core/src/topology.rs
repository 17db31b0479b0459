//! Resonator network layouts: path bases, Cartesian powers of paths, and
//! chains with position-dependent couplings.
//!
//! Nodes are indexed `0..n`. A Cartesian power of an `n_b`-node path orders
//! its nodes by tuple digits, most significant first, so node `m` has digits
//! `d_j = (m / n_b^(g-1-j)) % n_b`. Reversing every digit reverses the index,
//! which makes the mirror node of `m` simply `n - 1 - m`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Default cap on network size for dense spectral work.
pub const DEFAULT_MAX_NODES: usize = 4096;

/// Tolerance used when validating that a custom adjacency is symmetric.
const SYMMETRY_TOL: f64 = 1e-12;

/// Network family, recording how a layout was built.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Two-node path, the base with `theta = 1`.
    Path2,
    /// Three-node path, the base with `theta = 2`.
    Path3,
    /// `g`-th Cartesian power of the `theta + 1`-node path.
    Hypercube { theta: u8, g: u32 },
    /// Chain of `n` nodes with bond couplings `lambda/2 * sqrt(u(n-u))`.
    EngineeredChain { n: usize },
    /// User-supplied symmetric adjacency.
    Custom,
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Family::Path2 => write!(f, "2-node path"),
            Family::Path3 => write!(f, "3-node path"),
            Family::Hypercube { theta, g } => {
                write!(f, "power {g} of the {}-node path", theta + 1)
            }
            Family::EngineeredChain { n } => write!(f, "engineered chain of {n} nodes"),
            Family::Custom => write!(f, "custom network"),
        }
    }
}

/// Undirected weighted graph with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n_nodes: usize,
    adjacency: DMatrix<f64>,
    family: Family,
}

impl Graph {
    /// Wrap an arbitrary symmetric, zero-diagonal adjacency matrix.
    pub fn custom(adjacency: DMatrix<f64>) -> Result<Self> {
        let n = adjacency.nrows();
        if adjacency.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: adjacency.ncols(),
            });
        }
        if n == 0 {
            return Err(Error::InvalidParameter {
                name: "adjacency",
                message: "matrix is empty".into(),
            });
        }
        let mut max_asym = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                max_asym = max_asym.max((adjacency[(i, j)] - adjacency[(j, i)]).abs());
            }
        }
        if max_asym > SYMMETRY_TOL {
            return Err(Error::NotSymmetric {
                max_asymmetry: max_asym,
            });
        }
        if let Some(i) = (0..n).find(|&i| adjacency[(i, i)] != 0.0) {
            return Err(Error::NonzeroDiagonal { index: i });
        }
        Ok(Self {
            n_nodes: n,
            adjacency,
            family: Family::Custom,
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn adjacency(&self) -> &DMatrix<f64> {
        &self.adjacency
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// Upper-triangle edges as `(u, v, weight)` with `u < v`.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for u in 0..self.n_nodes {
            for v in (u + 1)..self.n_nodes {
                let w = self.adjacency[(u, v)];
                if w != 0.0 {
                    out.push((u, v, w));
                }
            }
        }
        out
    }

    /// Weighted degree of one node.
    pub fn degree(&self, node: usize) -> Result<f64> {
        if node >= self.n_nodes {
            return Err(Error::IndexOutOfRange {
                index: node,
                size: self.n_nodes,
            });
        }
        Ok(self.adjacency.row(node).iter().sum())
    }
}

/// Unweighted path on `n` nodes, restricted to the transfer bases `n = 2, 3`.
pub fn path_graph(n: usize) -> Result<Graph> {
    let family = match n {
        2 => Family::Path2,
        3 => Family::Path3,
        other => return Err(Error::InvalidPathLength(other)),
    };
    let mut adjacency = DMatrix::zeros(n, n);
    for u in 0..n - 1 {
        adjacency[(u, u + 1)] = 1.0;
        adjacency[(u + 1, u)] = 1.0;
    }
    Ok(Graph {
        n_nodes: n,
        adjacency,
        family,
    })
}

/// `g`-th Cartesian power of a path base, capped at `DEFAULT_MAX_NODES`.
pub fn cartesian_power(base: &Graph, g: u32) -> Result<Graph> {
    cartesian_power_limited(base, g, DEFAULT_MAX_NODES)
}

/// `g`-th Cartesian power of a path base with an explicit node cap.
///
/// The adjacency is the Kronecker sum of `g` copies of the base adjacency,
/// assembled digit by digit rather than through explicit Kronecker products.
pub fn cartesian_power_limited(base: &Graph, g: u32, max_nodes: usize) -> Result<Graph> {
    let theta = match base.family {
        Family::Path2 => 1u8,
        Family::Path3 => 2u8,
        other => {
            return Err(Error::InvalidFamily {
                expected: "2-node or 3-node path base",
                found: other.to_string(),
            })
        }
    };
    if g == 0 {
        return Err(Error::InvalidParameter {
            name: "g",
            message: "power must be at least 1".into(),
        });
    }
    let nb = base.n_nodes;
    let n = (nb as u128)
        .checked_pow(g)
        .filter(|&total| total <= max_nodes as u128)
        .ok_or(Error::NetworkTooLarge {
            nodes: (nb as u128)
                .checked_pow(g)
                .map_or(usize::MAX, |t| t.min(usize::MAX as u128) as usize),
            limit: max_nodes,
        })? as usize;

    let mut adjacency = DMatrix::zeros(n, n);
    for m in 0..n {
        let mut stride = n / nb;
        let mut rest = m;
        for _ in 0..g {
            let digit = rest / stride;
            rest %= stride;
            for e in 0..nb {
                let w = base.adjacency[(digit, e)];
                if w != 0.0 {
                    let offset = (e as isize - digit as isize) * stride as isize;
                    let neighbor = (m as isize + offset) as usize;
                    adjacency[(m, neighbor)] += w;
                }
            }
            stride = std::cmp::max(stride / nb, 1);
        }
    }

    Ok(Graph {
        n_nodes: n,
        adjacency,
        family: Family::Hypercube { theta, g },
    })
}

/// Power `g` of the `theta + 1`-node path.
pub fn hypercube(theta: u8, g: u32) -> Result<Graph> {
    let base = path_graph(theta as usize + 1)?;
    cartesian_power(&base, g)
}

/// Mirror node of `node` in an `n_nodes` network.
pub fn antipode(n_nodes: usize, node: usize) -> usize {
    debug_assert!(node < n_nodes);
    n_nodes - 1 - node
}

/// Hopping matrix `K` of a network, together with the scale parameters
/// needed to place its perfect-transfer time.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrix {
    n_nodes: usize,
    k: DMatrix<f64>,
    uniform_kappa: Option<f64>,
    lambda: Option<f64>,
    family: Family,
}

impl CouplingMatrix {
    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.k
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn uniform_kappa(&self) -> Option<f64> {
        self.uniform_kappa
    }

    pub fn lambda(&self) -> Option<f64> {
        self.lambda
    }

    /// Consecutive-bond couplings `K[u, u+1]`, meaningful for chain layouts.
    pub fn bond_couplings(&self) -> Vec<f64> {
        (0..self.n_nodes.saturating_sub(1))
            .map(|u| self.k[(u, u + 1)])
            .collect()
    }

    /// Time at which the propagator `e^{i K t}` acts as the mirror swap.
    ///
    /// For path powers this is `pi / (2^(1/theta) kappa)`; for the engineered
    /// chain it is `pi / lambda`. Custom networks carry no analytic time.
    pub fn optimal_time(&self) -> Result<f64> {
        match self.family {
            Family::Path2 => Ok(std::f64::consts::PI / (2.0 * self.kappa()?)),
            Family::Path3 => Ok(std::f64::consts::PI / (std::f64::consts::SQRT_2 * self.kappa()?)),
            Family::Hypercube { theta, .. } => {
                let root = 2.0f64.powf(1.0 / theta as f64);
                Ok(std::f64::consts::PI / (root * self.kappa()?))
            }
            Family::EngineeredChain { .. } => {
                let lambda = self.lambda.ok_or(Error::InvalidParameter {
                    name: "lambda",
                    message: "engineered chain is missing its coupling scale".into(),
                })?;
                Ok(std::f64::consts::PI / lambda)
            }
            Family::Custom => Err(Error::InvalidFamily {
                expected: "path power or engineered chain",
                found: Family::Custom.to_string(),
            }),
        }
    }

    fn kappa(&self) -> Result<f64> {
        self.uniform_kappa.ok_or(Error::InvalidParameter {
            name: "kappa",
            message: "network is missing its uniform coupling".into(),
        })
    }
}

/// Scale a graph's adjacency by a uniform coupling `kappa > 0`.
pub fn coupling_from_graph(graph: &Graph, kappa: f64) -> Result<CouplingMatrix> {
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::InvalidParameter {
            name: "kappa",
            message: format!("coupling must be positive and finite, got {kappa}"),
        });
    }
    Ok(CouplingMatrix {
        n_nodes: graph.n_nodes,
        k: graph.adjacency.scale(kappa),
        uniform_kappa: Some(kappa),
        lambda: None,
        family: graph.family,
    })
}

/// Chain of `n` nodes whose bond `u` (1-based) couples with
/// `lambda/2 * sqrt(u(n-u))`, giving the equally spaced spectrum
/// `lambda * (u - (n-1)/2)`.
pub fn engineered_chain(n: usize, lambda: f64) -> Result<CouplingMatrix> {
    if n < 2 {
        return Err(Error::InvalidParameter {
            name: "n",
            message: format!("chain needs at least 2 nodes, got {n}"),
        });
    }
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParameter {
            name: "lambda",
            message: format!("coupling scale must be positive and finite, got {lambda}"),
        });
    }
    let mut k = DMatrix::zeros(n, n);
    for u in 1..n {
        let coupling = 0.5 * lambda * (u as f64 * (n - u) as f64).sqrt();
        k[(u - 1, u)] = coupling;
        k[(u, u - 1)] = coupling;
    }
    Ok(CouplingMatrix {
        n_nodes: n,
        k,
        uniform_kappa: None,
        lambda: Some(lambda),
        family: Family::EngineeredChain { n },
    })
}
