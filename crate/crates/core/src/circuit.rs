//! First-order Trotterized quench circuits.
//!
//! A sequence starts with a Hadamard layer preparing `|+...+>`. Each of the
//! `M` steps then applies, at the sampled `lambda_m`,
//!
//! ```text
//! Rx(theta_x) on every site        theta_x  = -2 dt (1 - lambda_m) g
//! Rzz(theta_zz) on every edge      theta_zz = -2 dt lambda_m J
//! Ryz(theta_cd), Rzy(theta_cd)     theta_cd = 4 g J alpha1(lambda_m) dt / T
//! ```
//!
//! with `R_P(theta) = exp(-i theta P / 2)`. For `Ryz` on qubits `[a, b]` the
//! `Y` acts on `a`; for `Rzy` the `Z` acts on `a`. Two-qubit gates of each
//! kind are packed into layers by greedy colouring of their conflict graph.

use serde::{Deserialize, Serialize};

use crate::agp::{AlphaSchedule, AlphaSource};
use crate::error::{Error, Result};
use crate::lattice::LatticeGraph;

/// Where `lambda` is sampled inside step `m` (1-based) of `M`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalPolicy {
    Left,
    #[default]
    Mid,
    Right,
}

impl EvalPolicy {
    pub fn lambda(self, step: usize, steps: usize) -> f64 {
        let m = step as f64;
        let offset = match self {
            EvalPolicy::Left => 1.0,
            EvalPolicy::Mid => 0.5,
            EvalPolicy::Right => 0.0,
        };
        ((m - offset) / steps as f64).clamp(0.0, 1.0)
    }
}

impl std::str::FromStr for EvalPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "left" => Ok(EvalPolicy::Left),
            "mid" | "midpoint" => Ok(EvalPolicy::Mid),
            "right" => Ok(EvalPolicy::Right),
            other => Err(Error::param(format!("unknown eval policy '{other}'"))),
        }
    }
}

/// Sign convention of the `Rx` and `Rzz` angles.
///
/// `Negative` follows `exp(-i H dt)` with the minus signs of `H`. `Positive`
/// drops them. Z-basis statistics are identical under both: the positive
/// evolution is the complex conjugate of the negative one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldSign {
    #[default]
    Negative,
    Positive,
}

impl FieldSign {
    fn factor(self) -> f64 {
        match self {
            FieldSign::Negative => 1.0,
            FieldSign::Positive => -1.0,
        }
    }
}

/// Step-count rule: below `freeze_threshold` (units of `1/J`) the requested
/// `dt` is honoured; at or above it the step count is capped.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepPolicy {
    pub freeze_threshold: f64,
    pub cap: usize,
}

impl Default for StepPolicy {
    fn default() -> Self {
        Self {
            freeze_threshold: 0.8,
            cap: 6,
        }
    }
}

impl StepPolicy {
    /// Returns `(M, dt)` with `dt = T / M`.
    pub fn apply(&self, t_total: f64, dt_requested: f64) -> Result<(usize, f64)> {
        if !(t_total > 0.0 && t_total.is_finite()) {
            return Err(Error::param(format!("T must be positive, got {t_total}")));
        }
        if !(dt_requested > 0.0 && dt_requested.is_finite()) {
            return Err(Error::param(format!("dt must be positive, got {dt_requested}")));
        }
        if self.cap == 0 {
            return Err(Error::param("step cap must be positive"));
        }
        let raw = ((t_total / dt_requested).round() as usize).max(1);
        let steps = if t_total >= self.freeze_threshold {
            raw.min(self.cap)
        } else {
            raw
        };
        Ok((steps, t_total / steps as f64))
    }

    fn caps(&self, t_total: f64) -> bool {
        t_total >= self.freeze_threshold
    }
}

/// The default step policy: freeze at `T >= 0.8/J`, at most six steps.
pub fn apply_step_policy(t_total: f64, dt_requested: f64) -> Result<(usize, f64)> {
    StepPolicy::default().apply(t_total, dt_requested)
}

/// Parameters of one quench. Times are in units of `1/J`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuenchConfig {
    pub g: f64,
    pub j: f64,
    pub t_total: f64,
    pub steps: usize,
    pub dt: f64,
    pub cd: bool,
    pub eval_policy: EvalPolicy,
    pub step_cap: Option<usize>,
    pub field_sign: FieldSign,
    pub alpha_source: AlphaSource,
}

impl QuenchConfig {
    /// `g = J = 1`, no CD, midpoint sampling, `steps` uniform steps.
    pub fn new(t_total: f64, steps: usize) -> Self {
        Self {
            g: 1.0,
            j: 1.0,
            t_total,
            steps,
            dt: if steps > 0 { t_total / steps as f64 } else { f64::NAN },
            cd: false,
            eval_policy: EvalPolicy::Mid,
            step_cap: None,
            field_sign: FieldSign::Negative,
            alpha_source: AlphaSource::Auto,
        }
    }

    /// Resolves the step count through `policy`.
    pub fn with_step_policy(t_total: f64, dt_requested: f64, policy: &StepPolicy) -> Result<Self> {
        let (steps, _) = policy.apply(t_total, dt_requested)?;
        let mut cfg = Self::new(t_total, steps);
        if policy.caps(t_total) {
            cfg.step_cap = Some(policy.cap);
        }
        Ok(cfg)
    }

    pub fn couplings(mut self, g: f64, j: f64) -> Self {
        self.g = g;
        self.j = j;
        self
    }

    pub fn cd(mut self, on: bool) -> Self {
        self.cd = on;
        self
    }

    pub fn eval_policy(mut self, policy: EvalPolicy) -> Self {
        self.eval_policy = policy;
        self
    }

    pub fn field_sign(mut self, sign: FieldSign) -> Self {
        self.field_sign = sign;
        self
    }

    pub fn alpha_source(mut self, source: AlphaSource) -> Self {
        self.alpha_source = source;
        self
    }

    pub fn validate(&self) -> Result<()> {
        crate::agp::check_couplings(self.g, self.j)?;
        if !(self.t_total > 0.0 && self.t_total.is_finite()) {
            return Err(Error::param(format!("T must be positive, got {}", self.t_total)));
        }
        if self.steps == 0 {
            return Err(Error::param("need at least one Trotter step"));
        }
        if (self.dt * self.steps as f64 - self.t_total).abs() > 1e-12 * self.t_total.max(1.0) {
            return Err(Error::param(format!(
                "dt = {} with {} steps does not reach T = {}",
                self.dt, self.steps, self.t_total
            )));
        }
        if let Some(cap) = self.step_cap {
            if self.steps > cap {
                return Err(Error::param(format!("{} steps exceed the cap of {cap}", self.steps)));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateKind {
    Hadamard,
    Rx,
    Rzz,
    Ryz,
    Rzy,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::Hadamard | GateKind::Rx => 1,
            GateKind::Rzz | GateKind::Ryz | GateKind::Rzy => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle: Option<f64>,
}

impl Gate {
    pub fn hadamard(q: usize) -> Self {
        Self {
            kind: GateKind::Hadamard,
            qubits: vec![q],
            angle: None,
        }
    }

    pub fn rx(q: usize, angle: f64) -> Self {
        Self {
            kind: GateKind::Rx,
            qubits: vec![q],
            angle: Some(angle),
        }
    }

    pub fn two(kind: GateKind, a: usize, b: usize, angle: f64) -> Self {
        Self {
            kind,
            qubits: vec![a, b],
            angle: Some(angle),
        }
    }

    /// Checks arity, distinct qubits, range and angle presence.
    pub fn validate(&self, n_sites: usize) -> Result<()> {
        if self.qubits.len() != self.kind.arity() {
            return Err(Error::param(format!(
                "{:?} needs {} qubit(s), got {:?}",
                self.kind,
                self.kind.arity(),
                self.qubits
            )));
        }
        if self.qubits.iter().any(|&q| q >= n_sites) {
            return Err(Error::param(format!("qubits {:?} out of range for {n_sites} sites", self.qubits)));
        }
        if self.qubits.len() == 2 && self.qubits[0] == self.qubits[1] {
            return Err(Error::param(format!("repeated qubit in {:?}", self.qubits)));
        }
        match (self.kind, self.angle) {
            (GateKind::Hadamard, _) => Ok(()),
            (_, Some(a)) if a.is_finite() => Ok(()),
            _ => Err(Error::param(format!("{:?} needs a finite angle", self.kind))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub lambda: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha1: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateSequence {
    pub n_sites: usize,
    pub layers: Vec<Vec<Gate>>,
    #[serde(default)]
    pub steps: Vec<StepRecord>,
}

impl GateSequence {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let seq: GateSequence = serde_json::from_str(text)?;
        seq.validate()?;
        Ok(seq)
    }

    /// Checks every gate and the pairwise disjointness inside each layer.
    pub fn validate(&self) -> Result<()> {
        for (index, layer) in self.layers.iter().enumerate() {
            let mut used = vec![false; self.n_sites];
            for gate in layer {
                gate.validate(self.n_sites)?;
                for &q in &gate.qubits {
                    if std::mem::replace(&mut used[q], true) {
                        return Err(Error::param(format!("layer {index} touches qubit {q} twice")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn gates(&self) -> impl Iterator<Item = &Gate> {
        self.layers.iter().flatten()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateCounts {
    pub depth: usize,
    pub one_qubit: usize,
    pub two_qubit: usize,
}

pub fn gate_counts(seq: &GateSequence) -> GateCounts {
    let mut counts = GateCounts {
        depth: seq.layers.iter().filter(|l| !l.is_empty()).count(),
        one_qubit: 0,
        two_qubit: 0,
    };
    for gate in seq.gates() {
        match gate.kind.arity() {
            1 => counts.one_qubit += 1,
            _ => counts.two_qubit += 1,
        }
    }
    counts
}

/// Greedy colouring of the gate conflict graph in input order: each gate goes
/// to the first layer none of whose gates shares a qubit with it.
pub fn layer_gates(gates: &[Gate]) -> Vec<Vec<Gate>> {
    let mut layers: Vec<Vec<Gate>> = Vec::new();
    let mut occupied: Vec<std::collections::HashSet<usize>> = Vec::new();
    for gate in gates {
        let slot = occupied
            .iter()
            .position(|used| gate.qubits.iter().all(|q| !used.contains(q)));
        let slot = match slot {
            Some(s) => s,
            None => {
                layers.push(Vec::new());
                occupied.push(Default::default());
                layers.len() - 1
            }
        };
        occupied[slot].extend(gate.qubits.iter().copied());
        layers[slot].push(gate.clone());
    }
    layers
}

pub fn build_trotter(graph: &LatticeGraph, cfg: &QuenchConfig) -> Result<GateSequence> {
    cfg.validate()?;
    let n = graph.n_sites();
    let schedule = if cfg.cd {
        Some(AlphaSchedule::new(cfg.alpha_source, graph, cfg.g, cfg.j)?)
    } else {
        None
    };
    let sign = cfg.field_sign.factor();

    let mut layers = vec![(0..n).map(Gate::hadamard).collect::<Vec<_>>()];
    let mut records = Vec::with_capacity(cfg.steps);
    for m in 1..=cfg.steps {
        let lambda = cfg.eval_policy.lambda(m, cfg.steps);
        let theta_x = -2.0 * cfg.dt * (1.0 - lambda) * cfg.g * sign;
        let theta_zz = -2.0 * cfg.dt * lambda * cfg.j * sign;

        layers.push((0..n).map(|q| Gate::rx(q, theta_x)).collect());
        let zz: Vec<Gate> = graph
            .edges()
            .iter()
            .map(|&(a, b)| Gate::two(GateKind::Rzz, a, b, theta_zz))
            .collect();
        layers.extend(layer_gates(&zz));

        let alpha1 = match &schedule {
            Some(s) => {
                let alpha1 = s.alpha1(lambda)?;
                let theta = 4.0 * cfg.g * cfg.j * alpha1 * cfg.dt / cfg.t_total;
                for kind in [GateKind::Ryz, GateKind::Rzy] {
                    let gates: Vec<Gate> = graph
                        .edges()
                        .iter()
                        .map(|&(a, b)| Gate::two(kind, a, b, theta))
                        .collect();
                    layers.extend(layer_gates(&gates));
                }
                Some(alpha1)
            }
            None => None,
        };
        records.push(StepRecord { lambda, alpha1 });
    }

    Ok(GateSequence {
        n_sites: n,
        layers,
        steps: records,
    })
}
