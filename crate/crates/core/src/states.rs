//! Photonic state descriptors for network nodes and the mirror-swap action
//! on them.
//!
//! A perfect transfer sends the content of node `u` to node `n - 1 - u` and
//! multiplies each photon by the conjugate transfer phase. Fock vectors pick
//! up that phase per excitation, coherent amplitudes are rotated by it, and
//! multi-node entangled branches accumulate one factor per photon in the
//! excited branch.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::topology::antipode;

/// Tolerance on `|norm^2 - 1|` for Fock coefficient vectors.
pub const NORM_TOL: f64 = 1e-12;

/// Fock-basis coefficients `c_0..c_cutoff` of a single resonator mode.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    coeffs: Vec<Complex64>,
}

impl FockVector {
    /// Wrap coefficients that are already normalized.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidParameter {
                name: "coeffs",
                message: "Fock vector needs at least the vacuum coefficient".into(),
            });
        }
        let norm_sqr: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        let defect = (norm_sqr - 1.0).abs();
        if defect > NORM_TOL {
            return Err(Error::NotNormalized { defect });
        }
        Ok(Self { coeffs })
    }

    /// Normalize arbitrary coefficients.
    pub fn normalized(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidParameter {
                name: "coeffs",
                message: "Fock vector needs at least the vacuum coefficient".into(),
            });
        }
        let norm_sqr: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        if norm_sqr <= 0.0 || !norm_sqr.is_finite() {
            return Err(Error::InvalidParameter {
                name: "coeffs",
                message: format!("cannot normalize coefficients with norm^2 = {norm_sqr}"),
            });
        }
        let scale = norm_sqr.sqrt().recip();
        Ok(Self {
            coeffs: coeffs.into_iter().map(|c| c * scale).collect(),
        })
    }

    /// Basis state `|n>` represented up to `cutoff` photons.
    pub fn single(n: usize, cutoff: usize) -> Result<Self> {
        if n > cutoff {
            return Err(Error::CutoffMismatch {
                expected: n,
                found: cutoff,
            });
        }
        let mut coeffs = vec![Complex64::new(0.0, 0.0); cutoff + 1];
        coeffs[n] = Complex64::new(1.0, 0.0);
        Ok(Self { coeffs })
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Highest representable photon number.
    pub fn cutoff(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Multiply coefficient `c_n` by `phase^n`.
    pub fn phase_map(&self, phase: Complex64) -> Self {
        let mut acc = Complex64::new(1.0, 0.0);
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                let out = c * acc;
                acc *= phase;
                out
            })
            .collect();
        Self { coeffs }
    }
}

/// Complex amplitude of a coherent state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentAmplitude(pub Complex64);

/// Marker for one branch of a shared entangled state: this node holds
/// `m_photons` photons in the excited branch and vacuum in the other.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EntangledTag {
    m_photons: usize,
}

impl EntangledTag {
    pub fn new(m_photons: usize) -> Result<Self> {
        if m_photons == 0 {
            return Err(Error::InvalidParameter {
                name: "m_photons",
                message: "entangled branch must hold at least one photon".into(),
            });
        }
        Ok(Self { m_photons })
    }

    pub fn m_photons(&self) -> usize {
        self.m_photons
    }
}

/// State attached to one network node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NodeStateRepr", into = "NodeStateRepr")]
pub enum NodeState {
    Vacuum,
    Fock(FockVector),
    Coherent(CoherentAmplitude),
    Ghz(EntangledTag),
}

/// Wire format: tagged by `kind`, complex numbers as `[re, im]` pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum NodeStateRepr {
    Vacuum,
    Fock { coeffs: Vec<[f64; 2]> },
    Coherent { alpha: [f64; 2] },
    Ghz { m: usize },
}

impl From<NodeState> for NodeStateRepr {
    fn from(state: NodeState) -> Self {
        match state {
            NodeState::Vacuum => NodeStateRepr::Vacuum,
            NodeState::Fock(f) => NodeStateRepr::Fock {
                coeffs: f.coeffs().iter().map(|c| [c.re, c.im]).collect(),
            },
            NodeState::Coherent(CoherentAmplitude(a)) => NodeStateRepr::Coherent {
                alpha: [a.re, a.im],
            },
            NodeState::Ghz(tag) => NodeStateRepr::Ghz {
                m: tag.m_photons(),
            },
        }
    }
}

impl TryFrom<NodeStateRepr> for NodeState {
    type Error = Error;

    fn try_from(repr: NodeStateRepr) -> Result<Self> {
        Ok(match repr {
            NodeStateRepr::Vacuum => NodeState::Vacuum,
            NodeStateRepr::Fock { coeffs } => NodeState::Fock(FockVector::new(
                coeffs
                    .into_iter()
                    .map(|[re, im]| Complex64::new(re, im))
                    .collect(),
            )?),
            NodeStateRepr::Coherent { alpha } => {
                NodeState::Coherent(CoherentAmplitude(Complex64::new(alpha[0], alpha[1])))
            }
            NodeStateRepr::Ghz { m } => NodeState::Ghz(EntangledTag::new(m)?),
        })
    }
}

/// One state descriptor per network node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NetworkState {
    nodes: Vec<NodeState>,
}

impl NetworkState {
    pub fn new(nodes: Vec<NodeState>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidParameter {
                name: "nodes",
                message: "network needs at least one node".into(),
            });
        }
        Ok(Self { nodes })
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[NodeState] {
        &self.nodes
    }

    pub fn node(&self, u: usize) -> Result<&NodeState> {
        self.nodes.get(u).ok_or(Error::IndexOutOfRange {
            index: u,
            size: self.nodes.len(),
        })
    }
}

/// Mirror an all-Fock network: node `u` moves to `n - 1 - u` with
/// coefficient `c_m` multiplied by `conj(p0)^m`.
pub fn mirror_fock(state: &NetworkState, p0: Complex64) -> Result<NetworkState> {
    let n = state.n_nodes();
    let phase = p0.conj();
    let mut nodes = vec![NodeState::Vacuum; n];
    for (u, node) in state.nodes().iter().enumerate() {
        nodes[antipode(n, u)] = match node {
            NodeState::Vacuum => NodeState::Vacuum,
            NodeState::Fock(f) => NodeState::Fock(f.phase_map(phase)),
            _ => {
                return Err(Error::MixedStateKinds {
                    context: "Fock mirror accepts only Fock and vacuum nodes",
                })
            }
        };
    }
    NetworkState::new(nodes)
}

/// Mirror an all-coherent network: `alpha_u` becomes `conj(p0) alpha_u` at
/// the opposite node.
pub fn apply_swap_coherent(state: &NetworkState, p0: Complex64) -> Result<NetworkState> {
    let n = state.n_nodes();
    let phase = p0.conj();
    let mut nodes = vec![NodeState::Vacuum; n];
    for (u, node) in state.nodes().iter().enumerate() {
        nodes[antipode(n, u)] = match node {
            NodeState::Vacuum => NodeState::Vacuum,
            NodeState::Coherent(CoherentAmplitude(a)) => {
                NodeState::Coherent(CoherentAmplitude(phase * a))
            }
            _ => {
                return Err(Error::MixedStateKinds {
                    context: "coherent swap accepts only coherent and vacuum nodes",
                })
            }
        };
    }
    NetworkState::new(nodes)
}

/// Mirror a network holding one shared entangled state, returning the new
/// layout and the relative phase `prod_u conj(p0)^(m_u)` acquired by the
/// excited branch.
pub fn apply_swap_entangled(
    state: &NetworkState,
    p0: Complex64,
) -> Result<(NetworkState, Complex64)> {
    let n = state.n_nodes();
    let conj = p0.conj();
    let mut nodes = vec![NodeState::Vacuum; n];
    let mut branch_phase = Complex64::new(1.0, 0.0);
    let mut tagged = 0usize;
    for (u, node) in state.nodes().iter().enumerate() {
        nodes[antipode(n, u)] = match node {
            NodeState::Vacuum => NodeState::Vacuum,
            NodeState::Ghz(tag) => {
                tagged += 1;
                branch_phase *= conj.powu(tag.m_photons() as u32);
                NodeState::Ghz(*tag)
            }
            _ => {
                return Err(Error::MixedStateKinds {
                    context: "entangled swap accepts only ghz-tagged and vacuum nodes",
                })
            }
        };
    }
    if tagged == 0 {
        return Err(Error::InvalidParameter {
            name: "state",
            message: "entangled swap needs at least one ghz-tagged node".into(),
        });
    }
    Ok((NetworkState::new(nodes)?, branch_phase))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn fock_constructor_enforces_normalization() {
        let ok = FockVector::new(vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        assert_relative_eq!(ok.norm_sqr(), 1.0, epsilon = 1e-15);

        let bad = FockVector::new(vec![c(1.0, 0.0), c(0.5, 0.0)]);
        assert!(matches!(bad, Err(Error::NotNormalized { .. })));

        assert!(FockVector::new(vec![]).is_err());
    }

    #[test]
    fn normalized_rescales() {
        let f = FockVector::normalized(vec![c(3.0, 0.0), c(4.0, 0.0)]).unwrap();
        assert_relative_eq!(f.coeffs()[0].re, 0.6, epsilon = 1e-15);
        assert_relative_eq!(f.coeffs()[1].re, 0.8, epsilon = 1e-15);
        assert!(FockVector::normalized(vec![c(0.0, 0.0)]).is_err());
    }

    #[test]
    fn single_basis_vector() {
        let f = FockVector::single(2, 4).unwrap();
        assert_eq!(f.cutoff(), 4);
        assert_eq!(f.coeffs()[2], c(1.0, 0.0));
        assert_relative_eq!(f.norm_sqr(), 1.0);
        assert!(FockVector::single(5, 4).is_err());
    }

    #[test]
    fn phase_map_raises_phase_per_level() {
        let third = 3.0f64.sqrt().recip();
        let f = FockVector::new(vec![c(third, 0.0); 3]).unwrap();
        let mapped = f.phase_map(c(0.0, -1.0));
        assert!((mapped.coeffs()[0] - c(third, 0.0)).norm() < 1e-15);
        assert!((mapped.coeffs()[1] - c(0.0, -third)).norm() < 1e-15);
        assert!((mapped.coeffs()[2] - c(-third, 0.0)).norm() < 1e-15);
        assert_relative_eq!(mapped.norm_sqr(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn fock_mirror_moves_and_phases() {
        let f = FockVector::single(1, 1).unwrap();
        let state =
            NetworkState::new(vec![NodeState::Fock(f), NodeState::Vacuum, NodeState::Vacuum])
                .unwrap();
        // p0 = i: each photon at the mirrored node carries conj(i) = -i.
        let out = mirror_fock(&state, c(0.0, 1.0)).unwrap();
        assert_eq!(out.node(0).unwrap(), &NodeState::Vacuum);
        assert_eq!(out.node(1).unwrap(), &NodeState::Vacuum);
        match out.node(2).unwrap() {
            NodeState::Fock(f) => {
                assert!((f.coeffs()[1] - c(0.0, -1.0)).norm() < 1e-15);
            }
            other => panic!("expected Fock node, got {other:?}"),
        }
    }

    #[test]
    fn double_mirror_with_unit_phase_is_identity() {
        let f = FockVector::normalized(vec![c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.5)]).unwrap();
        let state = NetworkState::new(vec![NodeState::Fock(f), NodeState::Vacuum]).unwrap();
        let once = mirror_fock(&state, c(1.0, 0.0)).unwrap();
        let twice = mirror_fock(&once, c(1.0, 0.0)).unwrap();
        assert_eq!(&twice, &state);
    }

    #[test]
    fn coherent_swap_rotates_amplitude() {
        let alpha = c(0.5, 0.2);
        let state = NetworkState::new(vec![
            NodeState::Coherent(CoherentAmplitude(alpha)),
            NodeState::Vacuum,
        ])
        .unwrap();
        let p0 = Complex64::from_polar(1.0, 0.4);
        let out = apply_swap_coherent(&state, p0).unwrap();
        assert_eq!(out.node(0).unwrap(), &NodeState::Vacuum);
        match out.node(1).unwrap() {
            NodeState::Coherent(CoherentAmplitude(b)) => {
                assert!((b - p0.conj() * alpha).norm() < 1e-15);
            }
            other => panic!("expected coherent node, got {other:?}"),
        }
    }

    #[test]
    fn entangled_swap_accumulates_branch_phase() {
        let state = NetworkState::new(vec![
            NodeState::Ghz(EntangledTag::new(2).unwrap()),
            NodeState::Vacuum,
            NodeState::Ghz(EntangledTag::new(1).unwrap()),
        ])
        .unwrap();
        // conj(i)^2 * conj(i)^1 = (-1)(-i) = i.
        let (out, phase) = apply_swap_entangled(&state, c(0.0, 1.0)).unwrap();
        assert!((phase - c(0.0, 1.0)).norm() < 1e-15);
        assert_eq!(
            out.node(0).unwrap(),
            &NodeState::Ghz(EntangledTag::new(1).unwrap())
        );
        assert_eq!(out.node(1).unwrap(), &NodeState::Vacuum);
        assert_eq!(
            out.node(2).unwrap(),
            &NodeState::Ghz(EntangledTag::new(2).unwrap())
        );
    }

    #[test]
    fn kind_mixing_is_rejected() {
        let mixed = NetworkState::new(vec![
            NodeState::Fock(FockVector::single(0, 0).unwrap()),
            NodeState::Coherent(CoherentAmplitude(c(0.1, 0.0))),
        ])
        .unwrap();
        assert!(matches!(
            mirror_fock(&mixed, c(1.0, 0.0)),
            Err(Error::MixedStateKinds { .. })
        ));
        assert!(matches!(
            apply_swap_coherent(&mixed, c(1.0, 0.0)),
            Err(Error::MixedStateKinds { .. })
        ));
        assert!(matches!(
            apply_swap_entangled(&mixed, c(1.0, 0.0)),
            Err(Error::MixedStateKinds { .. })
        ));

        let all_vacuum = NetworkState::new(vec![NodeState::Vacuum; 2]).unwrap();
        assert!(apply_swap_entangled(&all_vacuum, c(1.0, 0.0)).is_err());
    }

    #[test]
    fn ghz_needs_at_least_one_photon() {
        assert!(EntangledTag::new(0).is_err());
        assert_eq!(EntangledTag::new(3).unwrap().m_photons(), 3);
    }

    #[test]
    fn node_state_json_round_trip() {
        let states = vec![
            NodeState::Vacuum,
            NodeState::Fock(FockVector::normalized(vec![c(1.0, 0.0), c(0.0, 1.0)]).unwrap()),
            NodeState::Coherent(CoherentAmplitude(c(0.3, -0.1))),
            NodeState::Ghz(EntangledTag::new(2).unwrap()),
        ];
        let json = serde_json::to_string(&states).unwrap();
        let back: Vec<NodeState> = serde_json::from_str(&json).unwrap();
        assert_eq!(states, back);
    }

    #[test]
    fn node_state_json_shapes() {
        let json = serde_json::to_value(NodeState::Coherent(CoherentAmplitude(c(0.25, -0.5))))
            .unwrap();
        assert_eq!(json["kind"], "coherent");
        assert_eq!(json["alpha"][0], 0.25);
        assert_eq!(json["alpha"][1], -0.5);

        let parsed: NodeState =
            serde_json::from_str(r#"{"kind":"fock","coeffs":[[0.6,0.0],[0.0,0.8]]}"#).unwrap();
        match parsed {
            NodeState::Fock(f) => assert_eq!(f.cutoff(), 1),
            other => panic!("expected Fock, got {other:?}"),
        }
    }

    #[test]
    fn node_state_json_rejects_bad_input() {
        assert!(serde_json::from_str::<NodeState>(r#"{"kind":"squeezed"}"#).is_err());
        assert!(serde_json::from_str::<NodeState>(
            r#"{"kind":"fock","coeffs":[[1.0,0.0],[1.0,0.0]]}"#
        )
        .is_err());
        assert!(serde_json::from_str::<NodeState>(r#"{"kind":"ghz","m":0}"#).is_err());
    }
}
