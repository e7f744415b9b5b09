//! Dense statevector simulation.
//!
//! Amplitudes are little-endian: bit `i` of the basis index is the Z-basis
//! outcome of site `i`. Exported bitstrings put site 0 first (leftmost).

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::agp::{tfim_hamiltonian, yz_zy_sum, AlphaSchedule};
use crate::circuit::{Gate, GateKind, GateSequence, QuenchConfig};
use crate::error::{Error, Result};
use crate::lattice::{Geometry, LatticeGraph};
use crate::ode::rk4;
use crate::pauli::{Pauli, PauliSum};
use crate::stats::KinkPmf;

pub const MAX_DENSE_SITES: usize = 26;
pub const MAX_ORACLE_SITES: usize = 12;
pub const MAX_PMF_SITES: usize = 22;

/// Minimum number of RK4 substeps of the continuous-evolution oracle.
pub const ORACLE_MIN_SUBSTEPS: usize = 4000;

fn capacity(what: &'static str, requested: usize, limit: usize) -> Result<()> {
    if requested > limit {
        return Err(Error::Capacity {
            what,
            requested,
            limit,
        });
    }
    Ok(())
}

/// One measured configuration of `n_sites` qubits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Bitstring {
    n_sites: usize,
    index: usize,
}

impl Bitstring {
    pub fn new(n_sites: usize, index: usize) -> Result<Self> {
        capacity("bitstring", n_sites, MAX_DENSE_SITES)?;
        if index >> n_sites != 0 {
            return Err(Error::param(format!("index {index} does not fit {n_sites} sites")));
        }
        Ok(Self { n_sites, index })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// Little-endian basis index.
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn bit(&self, site: usize) -> bool {
        (self.index >> site) & 1 == 1
    }
}

impl fmt::Display for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for site in 0..self.n_sites {
            f.write_str(if self.bit(site) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Bitstring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::param("empty bitstring"));
        }
        let n_sites = s.chars().count();
        capacity("bitstring", n_sites, MAX_DENSE_SITES)?;
        let mut index = 0;
        for (site, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => index |= 1 << site,
                other => return Err(Error::param(format!("bad character '{other}' in bitstring"))),
            }
        }
        Bitstring::new(n_sites, index)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_sites: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// `|+>^n`.
    pub fn init_plus(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSize("state needs at least one site".into()));
        }
        capacity("statevector", n, MAX_DENSE_SITES)?;
        let dim = 1usize << n;
        let a = Complex64::new((dim as f64).sqrt().recip(), 0.0);
        Ok(Self {
            n_sites: n,
            amplitudes: vec![a; dim],
        })
    }

    /// `|0...0>`, the input state of a [`GateSequence`], whose first layer is
    /// Hadamards.
    pub fn zeros(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSize("state needs at least one site".into()));
        }
        Self::basis(n, 0)
    }

    pub fn basis(n: usize, index: usize) -> Result<Self> {
        capacity("statevector", n, MAX_DENSE_SITES)?;
        let b = Bitstring::new(n, index)?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n];
        amplitudes[b.index] = Complex64::new(1.0, 0.0);
        Ok(Self {
            n_sites: n,
            amplitudes,
        })
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let dim = amplitudes.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::InvalidSize(format!("{dim} amplitudes is not a power of two >= 2")));
        }
        let n_sites = dim.trailing_zeros() as usize;
        capacity("statevector", n_sites, MAX_DENSE_SITES)?;
        Ok(Self {
            n_sites,
            amplitudes,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        self.same_size(other.n_sites)?;
        let overlap: Complex64 = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(overlap.norm_sqr())
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    fn same_size(&self, n: usize) -> Result<()> {
        if n != self.n_sites {
            return Err(Error::SizeMismatch {
                left: self.n_sites,
                right: n,
            });
        }
        Ok(())
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.n_sites)?;
        match gate.kind {
            GateKind::Hadamard => {
                let h = std::f64::consts::FRAC_1_SQRT_2;
                let m = [[h, h], [h, -h]].map(|row| row.map(|x| Complex64::new(x, 0.0)));
                self.apply_1q(gate.qubits[0], &m);
            }
            GateKind::Rx => {
                let (s, c) = (gate.angle.unwrap_or(0.0) / 2.0).sin_cos();
                let m = [
                    [Complex64::new(c, 0.0), Complex64::new(0.0, -s)],
                    [Complex64::new(0.0, -s), Complex64::new(c, 0.0)],
                ];
                self.apply_1q(gate.qubits[0], &m);
            }
            GateKind::Rzz | GateKind::Ryz | GateKind::Rzy => {
                let word = match gate.kind {
                    GateKind::Rzz => [Pauli::Z, Pauli::Z],
                    GateKind::Ryz => [Pauli::Y, Pauli::Z],
                    _ => [Pauli::Z, Pauli::Y],
                };
                let m = pauli_rotation(word, gate.angle.unwrap_or(0.0));
                self.apply_2q(gate.qubits[0], gate.qubits[1], &m);
            }
        }
        Ok(())
    }

    pub fn run(&mut self, seq: &GateSequence) -> Result<()> {
        self.same_size(seq.n_sites)?;
        for gate in seq.gates() {
            self.apply_gate(gate)?;
        }
        Ok(())
    }

    fn apply_1q(&mut self, q: usize, m: &[[Complex64; 2]; 2]) {
        let bit = 1usize << q;
        for i0 in (0..self.amplitudes.len()).filter(|i| i & bit == 0) {
            let i1 = i0 | bit;
            let (a0, a1) = (self.amplitudes[i0], self.amplitudes[i1]);
            self.amplitudes[i0] = m[0][0] * a0 + m[0][1] * a1;
            self.amplitudes[i1] = m[1][0] * a0 + m[1][1] * a1;
        }
    }

    /// `m` acts on the local index `b(q0) + 2 b(q1)`.
    fn apply_2q(&mut self, q0: usize, q1: usize, m: &[[Complex64; 4]; 4]) {
        let (b0, b1) = (1usize << q0, 1usize << q1);
        for base in (0..self.amplitudes.len()).filter(|i| i & (b0 | b1) == 0) {
            let idx = [base, base | b0, base | b1, base | b0 | b1];
            let a = idx.map(|i| self.amplitudes[i]);
            for (row, &i) in idx.iter().enumerate() {
                self.amplitudes[i] = (0..4).map(|col| m[row][col] * a[col]).sum();
            }
        }
    }
}

fn single_pauli(p: Pauli) -> [[Complex64; 2]; 2] {
    let (o, one, i) = (
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
    );
    match p {
        Pauli::X => [[o, one], [one, o]],
        Pauli::Y => [[o, -i], [i, o]],
        Pauli::Z => [[one, o], [o, -one]],
    }
}

/// `exp(-i theta/2 P0 P1) = cos(theta/2) I - i sin(theta/2) P0 P1` in the
/// local index `b0 + 2 b1`.
fn pauli_rotation(word: [Pauli; 2], theta: f64) -> [[Complex64; 4]; 4] {
    let (p0, p1) = (single_pauli(word[0]), single_pauli(word[1]));
    let (s, c) = (theta / 2.0).sin_cos();
    std::array::from_fn(|row| {
        std::array::from_fn(|col| {
            let p = p0[row & 1][col & 1] * p1[row >> 1][col >> 1];
            let diag = if row == col { c } else { 0.0 };
            Complex64::new(diag, 0.0) - Complex64::new(0.0, s) * p
        })
    })
}

pub fn run(seq: &GateSequence, mut state: StateVector) -> Result<StateVector> {
    state.run(seq)?;
    Ok(state)
}

/// Inverse-CDF sampling with a ChaCha8 stream seeded by `seed`.
pub fn sample_bitstrings(state: &StateVector, shots: usize, seed: u64) -> Result<Vec<Bitstring>> {
    if shots == 0 {
        return Err(Error::param("shots must be positive"));
    }
    let mut cumulative = Vec::with_capacity(state.amplitudes.len());
    let mut acc = 0.0;
    for a in &state.amplitudes {
        acc += a.norm_sqr();
        cumulative.push(acc);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let last = cumulative.len() - 1;
    Ok((0..shots)
        .map(|_| {
            let u = rng.random::<f64>() * acc;
            let index = cumulative.partition_point(|&c| c <= u).min(last);
            Bitstring {
                n_sites: state.n_sites,
                index,
            }
        })
        .collect())
}

fn check_graph(state: &StateVector, graph: &LatticeGraph) -> Result<()> {
    state.same_size(graph.n_sites())
}

/// Exact `<n_def>` = expected kink count over `N_e`.
pub fn kink_expectation(state: &StateVector, graph: &LatticeGraph) -> Result<f64> {
    check_graph(state, graph)?;
    let total: f64 = graph
        .edges()
        .iter()
        .map(|&(a, b)| {
            let mask = (1usize << a) | (1usize << b);
            let zz: f64 = state
                .amplitudes
                .iter()
                .enumerate()
                .map(|(i, amp)| {
                    let sign = if (i & mask).count_ones() == 1 { -1.0 } else { 1.0 };
                    sign * amp.norm_sqr()
                })
                .sum();
            0.5 * (1.0 - zz)
        })
        .sum();
    Ok(total / graph.n_edges() as f64)
}

/// Exact kink-count distribution by enumeration of all basis states.
pub fn kink_distribution_exact(state: &StateVector, graph: &LatticeGraph) -> Result<KinkPmf> {
    capacity("exact kink distribution", state.n_sites, MAX_PMF_SITES)?;
    check_graph(state, graph)?;
    let mut pmf = vec![0.0; graph.n_edges() + 1];
    for (i, amp) in state.amplitudes.iter().enumerate() {
        pmf[graph.kinks_in_basis_state(i)] += amp.norm_sqr();
    }
    Ok(KinkPmf {
        n_e: graph.n_edges(),
        probabilities: pmf,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    #[default]
    Open,
    Periodic,
}

/// The graph the oracle evolves on: chains gain their wrap-around edge for
/// periodic runs.
pub fn oracle_graph(graph: &LatticeGraph, boundary: Boundary) -> Result<LatticeGraph> {
    match (boundary, graph.geometry()) {
        (Boundary::Open, _) | (Boundary::Periodic, Geometry::Ring) => Ok(graph.clone()),
        (Boundary::Periodic, Geometry::Chain) => LatticeGraph::ring(graph.n_sites()),
        (Boundary::Periodic, other) => Err(Error::Unsupported(format!(
            "periodic boundary is only defined for chains, not {other:?}"
        ))),
    }
}

/// A Pauli sum compiled to basis-state masks.
struct CompiledSum {
    diagonal: Vec<f64>,
    off_diagonal: Vec<(usize, usize, Complex64)>,
}

impl CompiledSum {
    fn new(sum: &PauliSum) -> Self {
        let dim = 1usize << sum.n_sites();
        let mut diagonal = vec![0.0; dim];
        let mut off_diagonal = Vec::new();
        for (string, &coeff) in sum.iter() {
            let (x, z, n_y) = string.masks();
            let (x, z) = (x as usize, z as usize);
            let phase = Complex64::new(0.0, 1.0).powu(n_y) * coeff;
            if x == 0 {
                for (b, d) in diagonal.iter_mut().enumerate() {
                    let sign = if (b & z).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
                    *d += sign * phase.re;
                }
            } else {
                off_diagonal.push((x, z, phase));
            }
        }
        Self {
            diagonal,
            off_diagonal,
        }
    }

    /// `out += scale * S y`.
    fn apply(&self, scale: f64, y: &[Complex64], out: &mut [Complex64]) {
        if scale == 0.0 {
            return;
        }
        for (b, (o, d)) in out.iter_mut().zip(&self.diagonal).enumerate() {
            if *d != 0.0 {
                *o += y[b] * (scale * d);
            }
        }
        for &(x, z, c) in &self.off_diagonal {
            let c = c * scale;
            for (b, o) in out.iter_mut().enumerate() {
                let src = b ^ x;
                let sign = if (src & z).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
                *o += c * y[src] * sign;
            }
        }
    }

    fn norm_bound(&self) -> f64 {
        let diag = self.diagonal.iter().fold(0.0f64, |m, d| m.max(d.abs()));
        diag + self.off_diagonal.iter().map(|(_, _, c)| c.norm()).sum::<f64>()
    }
}

/// Continuous evolution of `|+...+>` under `H(lambda) + cd * lambda' A`.
///
/// RK4 runs in `lambda = t / T`, where the generator is `T H(lambda) + A`.
pub fn brute_force_evolve(graph: &LatticeGraph, cfg: &QuenchConfig, boundary: Boundary) -> Result<StateVector> {
    capacity("continuous-evolution oracle", graph.n_sites(), MAX_ORACLE_SITES)?;
    crate::agp::check_couplings(cfg.g, cfg.j)?;
    let t = cfg.t_total;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::param(format!("T must be positive, got {t}")));
    }
    let graph = oracle_graph(graph, boundary)?;

    let field = CompiledSum::new(&tfim_hamiltonian(&graph, cfg.g, cfg.j, 0.0));
    let coupling = CompiledSum::new(&tfim_hamiltonian(&graph, cfg.g, cfg.j, 1.0));
    let (cd_ops, schedule) = if cfg.cd {
        (
            Some(CompiledSum::new(&yz_zy_sum(&graph))),
            Some(AlphaSchedule::new(cfg.alpha_source, &graph, cfg.g, cfg.j)?),
        )
    } else {
        (None, None)
    };

    let mut cd_bound: f64 = 0.0;
    if let (Some(ops), Some(s)) = (&cd_ops, &schedule) {
        for i in 0..=100 {
            let alpha = s.alpha1(i as f64 / 100.0)?;
            cd_bound = cd_bound.max(2.0 * cfg.g * cfg.j * alpha.abs() * ops.norm_bound());
        }
    }
    let generator_bound = t * field.norm_bound().max(coupling.norm_bound()) + cd_bound;
    let steps = ORACLE_MIN_SUBSTEPS.max((100.0 * generator_bound).ceil() as usize);

    let mut psi = StateVector::init_plus(graph.n_sites())?.amplitudes;
    let mut failure = None;
    let minus_i = Complex64::new(0.0, -1.0);
    rk4(&mut psi, 0.0, 1.0, steps, |lambda, y, dy| {
        dy.fill(Complex64::new(0.0, 0.0));
        field.apply(t * (1.0 - lambda), y, dy);
        coupling.apply(t * lambda, y, dy);
        if let (Some(ops), Some(s)) = (&cd_ops, &schedule) {
            match s.alpha1(lambda) {
                Ok(alpha) => ops.apply(2.0 * cfg.g * cfg.j * alpha, y, dy),
                Err(e) => failure = Some(e),
            }
        }
        for v in dy.iter_mut() {
            *v *= minus_i;
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    StateVector::from_amplitudes(psi)
}
