//! First-order adiabatic gauge potential (AGP) for the interpolating TFIM
//!
//! ```text
//! H(lambda) = -(1 - lambda) g sum_j X_j - lambda J sum_<ij> Z_i Z_j
//! ```
//!
//! With `O0 = dH/dlambda`, `O1 = [H, O0]`, `O2 = [H, O1]`, the first-order
//! nested-commutator ansatz `A = i alpha1 O1` minimizes the action
//! `Tr((O0 + alpha1 O2)^dagger (O0 + alpha1 O2))` at
//! `alpha1 = -Tr(O1^dagger O1) / Tr(O2^dagger O2)`. On any graph
//! `O1 = -2igJ sum_<ij> (Y_i Z_j + Z_i Y_j)`, so
//! `A = 2gJ alpha1 sum_<ij> (Y_i Z_j + Z_i Y_j)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Geometry, LatticeGraph};
use crate::pauli::{Pauli, PauliString, PauliSum};

const LAMBDA_TOLERANCE: f64 = 1e-12;
const MIN_DENOMINATOR: f64 = 1e-30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgpMethod {
    VariationalTrace,
    ChainObcClosedForm,
    PeriodicContinuum,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgpCoefficient {
    pub lambda: f64,
    /// Units of 1/energy^2.
    pub alpha1: f64,
    pub method: AgpMethod,
}

/// Rejects lambda outside `[0, 1]` beyond a 1e-12 slack and clamps the slack.
pub fn check_lambda(lambda: f64) -> Result<f64> {
    if !lambda.is_finite() || !(-LAMBDA_TOLERANCE..=1.0 + LAMBDA_TOLERANCE).contains(&lambda) {
        return Err(Error::LambdaOutOfRange(lambda));
    }
    Ok(lambda.clamp(0.0, 1.0))
}

pub(crate) fn check_couplings(g: f64, j: f64) -> Result<()> {
    if !(g.is_finite() && j.is_finite() && g > 0.0 && j > 0.0) {
        return Err(Error::param(format!("need g, J > 0, got g = {g}, J = {j}")));
    }
    Ok(())
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn field_and_coupling(graph: &LatticeGraph, field: f64, coupling: f64) -> PauliSum {
    let n = graph.n_sites();
    let mut h = PauliSum::zero(n);
    for site in 0..n {
        h.add_term(PauliString::single(n, site, Pauli::X).unwrap(), real(field))
            .unwrap();
    }
    for &(a, b) in graph.edges() {
        h.add_term(
            PauliString::pair(n, (a, Pauli::Z), (b, Pauli::Z)).unwrap(),
            real(coupling),
        )
        .unwrap();
    }
    // from_terms-style pruning of exact zeros (lambda = 0 or 1)
    PauliSum::from_terms(n, h.iter().map(|(s, c)| (s.clone(), *c))).unwrap()
}

/// `H(lambda)` on the graph.
pub fn tfim_hamiltonian(graph: &LatticeGraph, g: f64, j: f64, lambda: f64) -> PauliSum {
    field_and_coupling(graph, -(1.0 - lambda) * g, -lambda * j)
}

/// `O0 = dH/dlambda = g sum X - J sum ZZ`.
pub fn tfim_lambda_derivative(graph: &LatticeGraph, g: f64, j: f64) -> PauliSum {
    field_and_coupling(graph, g, -j)
}

/// `sum_<ij> (Y_i Z_j + Z_i Y_j)`, both orientations once per edge.
pub fn yz_zy_sum(graph: &LatticeGraph) -> PauliSum {
    let n = graph.n_sites();
    let terms = graph.edges().iter().flat_map(|&(a, b)| {
        [
            PauliString::pair(n, (a, Pauli::Y), (b, Pauli::Z)).unwrap(),
            PauliString::pair(n, (a, Pauli::Z), (b, Pauli::Y)).unwrap(),
        ]
    });
    PauliSum::from_terms(n, terms.map(|s| (s, real(1.0)))).unwrap()
}

/// The CD operator `A = 2 g J alpha1 sum (YZ + ZY)`.
pub fn agp_operator(graph: &LatticeGraph, g: f64, j: f64, alpha1: f64) -> PauliSum {
    yz_zy_sum(graph).scaled(real(2.0 * g * j * alpha1))
}

/// Variational `alpha1` from the trace engine: builds `H`, `O0`, `O1`, `O2`
/// explicitly at this lambda.
pub fn alpha1_variational(graph: &LatticeGraph, g: f64, j: f64, lambda: f64) -> Result<AgpCoefficient> {
    check_couplings(g, j)?;
    let lambda = check_lambda(lambda)?;
    let h = tfim_hamiltonian(graph, g, j, lambda);
    let o0 = tfim_lambda_derivative(graph, g, j);
    let o1 = h.commutator(&o0)?;
    let o2 = h.commutator(&o1)?;
    let num = o1.hs_inner(&o1)?.re;
    let den = o2.hs_inner(&o2)?.re;
    if den < MIN_DENOMINATOR {
        return Err(Error::SingularAction(den));
    }
    Ok(AgpCoefficient {
        lambda,
        alpha1: -num / den,
        method: AgpMethod::VariationalTrace,
    })
}

/// Closed form for an open chain of `n` sites.
pub fn alpha1_chain_obc(n: usize, g: f64, j: f64, lambda: f64) -> Result<AgpCoefficient> {
    if n < 2 {
        return Err(Error::InvalidSize(format!("chain needs n >= 2, got {n}")));
    }
    check_couplings(g, j)?;
    let lambda = check_lambda(lambda)?;
    let bonds = (n - 1) as f64;
    let den = 16.0 * g * g * bonds * (lambda - 1.0).powi(2)
        + 4.0 * j * j * (4.0 * bonds - 3.0) * lambda * lambda;
    Ok(AgpCoefficient {
        lambda,
        alpha1: -bonds / den,
        method: AgpMethod::ChainObcClosedForm,
    })
}

/// Periodic chain in the continuum (thermodynamic) limit.
pub fn alpha1_periodic_continuum(g: f64, j: f64, lambda: f64) -> Result<AgpCoefficient> {
    check_couplings(g, j)?;
    let lambda = check_lambda(lambda)?;
    let s = lambda * lambda * j * j + (1.0 - lambda).powi(2) * g * g;
    Ok(AgpCoefficient {
        lambda,
        alpha1: -1.0 / (16.0 * s),
        method: AgpMethod::PeriodicContinuum,
    })
}

/// Precomputed variational action for fast repeated evaluation.
///
/// `O1` does not depend on lambda and `O2(lambda) = (1 - lambda) P + lambda Q`
/// with `P = [H(0), O1]`, `Q = [H(1), O1]`, so the denominator is a quadratic
/// in lambda whose three coefficients are computed once.
#[derive(Clone, Debug)]
pub struct VariationalAgp {
    o1_norm: f64,
    pp: f64,
    pq: f64,
    qq: f64,
}

impl VariationalAgp {
    pub fn new(graph: &LatticeGraph, g: f64, j: f64) -> Result<Self> {
        check_couplings(g, j)?;
        let o0 = tfim_lambda_derivative(graph, g, j);
        let o1 = tfim_hamiltonian(graph, g, j, 0.0).commutator(&o0)?;
        let p = tfim_hamiltonian(graph, g, j, 0.0).commutator(&o1)?;
        let q = tfim_hamiltonian(graph, g, j, 1.0).commutator(&o1)?;
        Ok(Self {
            o1_norm: o1.hs_inner(&o1)?.re,
            pp: p.hs_inner(&p)?.re,
            pq: p.hs_inner(&q)?.re,
            qq: q.hs_inner(&q)?.re,
        })
    }

    pub fn alpha1(&self, lambda: f64) -> Result<f64> {
        let l = check_lambda(lambda)?;
        let den = (1.0 - l).powi(2) * self.pp + 2.0 * l * (1.0 - l) * self.pq + l * l * self.qq;
        if den < MIN_DENOMINATOR {
            return Err(Error::SingularAction(den));
        }
        Ok(-self.o1_norm / den)
    }
}

/// Where a circuit or oracle takes its `alpha1(lambda)` from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum AlphaSource {
    /// Chain closed form for open chains, periodic continuum for rings,
    /// variational trace otherwise.
    #[default]
    Auto,
    ChainClosedForm,
    Variational,
    PeriodicContinuum,
    /// A fixed value, used to inject e.g. `alpha1 = 0`.
    Constant(f64),
}

/// An [`AlphaSource`] bound to a graph and couplings.
#[derive(Clone, Debug)]
pub enum AlphaSchedule {
    Chain { n: usize, g: f64, j: f64 },
    Variational(VariationalAgp),
    Periodic { g: f64, j: f64 },
    Constant(f64),
}

impl AlphaSchedule {
    pub fn new(source: AlphaSource, graph: &LatticeGraph, g: f64, j: f64) -> Result<Self> {
        check_couplings(g, j)?;
        let resolved = match (source, graph.geometry()) {
            (AlphaSource::Auto, Geometry::Chain) => AlphaSource::ChainClosedForm,
            (AlphaSource::Auto, Geometry::Ring) => AlphaSource::PeriodicContinuum,
            (AlphaSource::Auto, _) => AlphaSource::Variational,
            (other, _) => other,
        };
        Ok(match resolved {
            AlphaSource::ChainClosedForm => {
                if graph.geometry() != Geometry::Chain {
                    return Err(Error::Unsupported(format!(
                        "chain closed form requested for a {:?} lattice",
                        graph.geometry()
                    )));
                }
                AlphaSchedule::Chain {
                    n: graph.n_sites(),
                    g,
                    j,
                }
            }
            AlphaSource::PeriodicContinuum => AlphaSchedule::Periodic { g, j },
            AlphaSource::Variational => AlphaSchedule::Variational(VariationalAgp::new(graph, g, j)?),
            AlphaSource::Constant(v) => AlphaSchedule::Constant(v),
            AlphaSource::Auto => unreachable!(),
        })
    }

    pub fn alpha1(&self, lambda: f64) -> Result<f64> {
        match self {
            AlphaSchedule::Chain { n, g, j } => Ok(alpha1_chain_obc(*n, *g, *j, lambda)?.alpha1),
            AlphaSchedule::Variational(v) => v.alpha1(lambda),
            AlphaSchedule::Periodic { g, j } => Ok(alpha1_periodic_continuum(*g, *j, lambda)?.alpha1),
            AlphaSchedule::Constant(v) => {
                check_lambda(lambda)?;
                Ok(*v)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn o1_matches_closed_expression() {
        let g = LatticeGraph::chain(2).unwrap();
        let h = tfim_hamiltonian(&g, 1.0, 1.0, 0.3);
        let o1 = h.commutator(&tfim_lambda_derivative(&g, 1.0, 1.0)).unwrap();
        let expected = yz_zy_sum(&g).scaled(Complex64::new(0.0, -2.0));
        assert_eq!(o1.len(), 2);
        for (s, c) in expected.iter() {
            assert!((o1.coefficient(s) - c).norm() < 1e-14);
        }
    }

    #[test]
    fn chain_closed_form_values() {
        assert_eq!(alpha1_chain_obc(2, 1.0, 1.0, 1.0).unwrap().alpha1, -0.25);
        assert!((alpha1_chain_obc(2, 1.0, 1.0, 0.5).unwrap().alpha1 + 0.2).abs() < 1e-15);
        for n in [2, 5, 100] {
            let a = alpha1_chain_obc(n, 2.0, 1.0, 0.0).unwrap().alpha1;
            assert!((a + 1.0 / 64.0).abs() < 1e-15);
        }
        // n = 100, g = J = 1, lambda = 1/2: -99 / (4*99 + 393)
        let a = alpha1_chain_obc(100, 1.0, 1.0, 0.5).unwrap().alpha1;
        assert!(rel(a, -99.0 / 789.0) < 1e-14);
        assert!(alpha1_chain_obc(1, 1.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn periodic_continuum_values() {
        assert_eq!(alpha1_periodic_continuum(1.0, 1.0, 0.5).unwrap().alpha1, -0.125);
        assert_eq!(alpha1_periodic_continuum(1.0, 1.0, 0.0).unwrap().alpha1, -1.0 / 16.0);
        // thermodynamic limit of the open-chain closed form
        for lambda in [0.1, 0.5, 0.9] {
            let big = alpha1_chain_obc(1_000_000, 1.0, 1.0, lambda).unwrap().alpha1;
            let lim = alpha1_periodic_continuum(1.0, 1.0, lambda).unwrap().alpha1;
            assert!(rel(big, lim) < 1e-6);
        }
    }

    #[test]
    fn variational_small_chain() {
        let g = LatticeGraph::chain(2).unwrap();
        let a = alpha1_variational(&g, 1.0, 1.0, 1.0).unwrap();
        assert!((a.alpha1 + 0.25).abs() < 1e-14);
        assert_eq!(a.method, AgpMethod::VariationalTrace);
    }

    #[test]
    fn variational_matches_chain_closed_form() {
        for n in 2..=10 {
            let graph = LatticeGraph::chain(n).unwrap();
            for step in 0..=10 {
                let lambda = step as f64 / 10.0;
                let v = alpha1_variational(&graph, 1.0, 1.0, lambda).unwrap().alpha1;
                let c = alpha1_chain_obc(n, 1.0, 1.0, lambda).unwrap().alpha1;
                assert!(rel(v, c) < 1e-10, "n={n} lambda={lambda}: {v} vs {c}");
            }
        }
    }

    #[test]
    fn precomputed_matches_direct() {
        for graph in [
            LatticeGraph::square(3, 3).unwrap(),
            LatticeGraph::heavy_hex(1, 1).unwrap(),
            LatticeGraph::ring(6).unwrap(),
        ] {
            let pre = VariationalAgp::new(&graph, 0.7, 1.3).unwrap();
            for lambda in [0.0, 0.2, 0.5, 0.77, 1.0] {
                let direct = alpha1_variational(&graph, 0.7, 1.3, lambda).unwrap().alpha1;
                assert!(rel(pre.alpha1(lambda).unwrap(), direct) < 1e-12);
            }
        }
    }

    #[test]
    fn alpha_is_negative_and_scales() {
        let graph = LatticeGraph::square(2, 3).unwrap();
        for lambda in [0.0, 0.3, 0.6, 1.0] {
            let base = alpha1_variational(&graph, 1.0, 0.8, lambda).unwrap().alpha1;
            assert!(base < 0.0);
            let scaled = alpha1_variational(&graph, 2.5, 2.0, lambda).unwrap().alpha1;
            assert!(rel(scaled, base / 6.25) < 1e-12);
            let c = alpha1_chain_obc(7, 2.5, 2.0, lambda).unwrap().alpha1;
            assert!(rel(c, alpha1_chain_obc(7, 1.0, 0.8, lambda).unwrap().alpha1 / 6.25) < 1e-12);
        }
    }

    #[test]
    fn cd_strength_peaks_at_critical_point() {
        let t = 1.0;
        let (mut best, mut arg) = (0.0, 0.0);
        for i in 0..=1000 {
            let lambda = i as f64 / 1000.0;
            let v = (alpha1_periodic_continuum(1.0, 1.0, lambda).unwrap().alpha1 / t).abs();
            if v > best {
                best = v;
                arg = lambda;
            }
        }
        assert!((arg - 0.5).abs() <= 1e-3);
    }

    #[test]
    fn lambda_validation() {
        assert!(check_lambda(1.0 + 1e-13).is_ok());
        assert_eq!(check_lambda(-1e-13).unwrap(), 0.0);
        assert!(matches!(check_lambda(1.01), Err(Error::LambdaOutOfRange(_))));
        assert!(check_lambda(f64::NAN).is_err());
        assert!(alpha1_periodic_continuum(0.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn alpha_schedule_resolution() {
        let chain = LatticeGraph::chain(6).unwrap();
        let s = AlphaSchedule::new(AlphaSource::Auto, &chain, 1.0, 1.0).unwrap();
        assert!(matches!(s, AlphaSchedule::Chain { n: 6, .. }));
        let sq = LatticeGraph::square(2, 2).unwrap();
        assert!(matches!(
            AlphaSchedule::new(AlphaSource::Auto, &sq, 1.0, 1.0).unwrap(),
            AlphaSchedule::Variational(_)
        ));
        assert!(AlphaSchedule::new(AlphaSource::ChainClosedForm, &sq, 1.0, 1.0).is_err());
        let zero = AlphaSchedule::new(AlphaSource::Constant(0.0), &sq, 1.0, 1.0).unwrap();
        assert_eq!(zero.alpha1(0.4).unwrap(), 0.0);
    }
}
