//! Exact periodic 1D quench in the free-fermion two-level picture.
//!
//! For momenta `k = (2m - 1) pi / N`, `m = 1..N/2`, each mode evolves under
//!
//! ```text
//! H_k = 2[(1 - lambda) g - lambda J cos k] Z + 2 lambda J sin k X  (+ h_k Y)
//! h_k = lambda' g J sin k / (2 [lambda^2 J^2 + (1 - lambda)^2 g^2])
//! ```
//!
//! from `(phi1, phi2) = (0, 1)`. The mode ends excited with probability
//! `p_k = |sin(k/2) phi1 + cos(k/2) phi2|^2`, and an excited `(k, -k)` pair
//! carries two kinks.
//!
//! Integration runs in the variable `lambda = t / T`, where the CD term
//! `T h_k` no longer depends on `T`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::agp::check_couplings;
use crate::circuit::QuenchConfig;
use crate::error::{Error, Result};
use crate::ode::rk4;
use crate::stats::KinkPmf;

/// Below this `T J` the sudden-quench formulas replace integration.
pub const SUDDEN_THRESHOLD: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeGrid {
    n_sites: usize,
    momenta: Vec<f64>,
}

impl ModeGrid {
    pub fn new(n_sites: usize) -> Result<Self> {
        if n_sites < 2 || n_sites % 2 != 0 {
            return Err(Error::InvalidSize(format!(
                "mode grid needs an even number of sites >= 2, got {n_sites}"
            )));
        }
        let n = n_sites as f64;
        let momenta = (1..=n_sites / 2)
            .map(|m| (2 * m - 1) as f64 * PI / n)
            .collect();
        Ok(Self { n_sites, momenta })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn momenta(&self) -> &[f64] {
        &self.momenta
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModeState {
    pub phi1: Complex64,
    pub phi2: Complex64,
}

impl ModeState {
    pub fn initial() -> Self {
        Self {
            phi1: Complex64::new(0.0, 0.0),
            phi2: Complex64::new(1.0, 0.0),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.phi1.norm_sqr() + self.phi2.norm_sqr()
    }
}

fn check_momentum(k: f64) -> Result<()> {
    if !(k > 0.0 && k < PI) {
        return Err(Error::param(format!("momentum {k} outside (0, pi)")));
    }
    Ok(())
}

/// Number of RK4 substeps for a run of length `t_total`.
pub fn substeps(t_total: f64, g: f64, j: f64) -> usize {
    let by_j = (40.0 * t_total * j).ceil();
    let by_scale = (500.0 * t_total * g.max(j)).ceil();
    2000usize.max(by_j as usize).max(by_scale as usize)
}

/// Integrates one mode from `lambda = 0` to `1` over time `cfg.t_total`.
pub fn evolve_mode(k: f64, cfg: &QuenchConfig, with_cd: bool) -> Result<ModeState> {
    check_momentum(k)?;
    check_couplings(cfg.g, cfg.j)?;
    let t = cfg.t_total;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::param(format!(
            "T = {t} is not positive; use sudden_pk_nocd or sudden_pk_cd for the T -> 0 limit"
        )));
    }
    let (g, j) = (cfg.g, cfg.j);
    let (sin_k, cos_k) = k.sin_cos();
    let i = Complex64::new(0.0, 1.0);

    let mut psi = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
    rk4(&mut psi, 0.0, 1.0, substeps(t, g, j), |lambda, y, dy| {
        let z = t * 2.0 * ((1.0 - lambda) * g - lambda * j * cos_k);
        let x = t * 2.0 * lambda * j * sin_k;
        let y_coeff = if with_cd {
            g * j * sin_k / (2.0 * (lambda * lambda * j * j + (1.0 - lambda).powi(2) * g * g))
        } else {
            0.0
        };
        // (z Z + x X + y Y) applied to (a, b) is (z a + (x - iy) b, (x + iy) a - z b)
        let off_lo = Complex64::new(x, -y_coeff);
        let off_hi = Complex64::new(x, y_coeff);
        let h0 = y[0] * z + off_lo * y[1];
        let h1 = off_hi * y[0] - y[1] * z;
        dy[0] = -i * h0;
        dy[1] = -i * h1;
    });
    Ok(ModeState {
        phi1: psi[0],
        phi2: psi[1],
    })
}

pub fn excitation_probability(k: f64, state: &ModeState) -> f64 {
    let (s, c) = (k / 2.0).sin_cos();
    (state.phi1 * s + state.phi2 * c).norm_sqr().clamp(0.0, 1.0)
}

/// `T -> 0` without CD: the state never moves, `p_k = cos^2(k/2)`.
pub fn sudden_pk_nocd(k: f64) -> f64 {
    (k / 2.0).cos().powi(2)
}

/// `T -> 0` with CD at `g = J`: only the CD rotation by
/// `s = int h_k dt = (pi/4) sin k` about `Y` survives.
pub fn sudden_pk_cd(k: f64, g: f64, j: f64) -> Result<f64> {
    check_momentum(k)?;
    check_couplings(g, j)?;
    if (g - j).abs() > 1e-12 * g.max(j) {
        return Err(Error::Unsupported(format!(
            "sudden CD limit is implemented for g = J only (g = {g}, J = {j})"
        )));
    }
    let s = PI / 4.0 * k.sin();
    let (sh, ch) = (k / 2.0).sin_cos();
    let p = ch * ch * s.cos().powi(2) + sh * sh * s.sin().powi(2) - 0.5 * k.sin() * (2.0 * s).sin();
    Ok(p.clamp(0.0, 1.0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExcitationProfile {
    pub grid: ModeGrid,
    pub probabilities: Vec<f64>,
}

impl ExcitationProfile {
    pub fn new(grid: ModeGrid, probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.len() != grid.momenta().len() {
            return Err(Error::SizeMismatch {
                left: probabilities.len(),
                right: grid.momenta().len(),
            });
        }
        if probabilities
            .iter()
            .any(|&p| !(-1e-12..=1.0 + 1e-12).contains(&p))
        {
            return Err(Error::param("excitation probability outside [0, 1]"));
        }
        Ok(Self {
            grid,
            probabilities,
        })
    }

    pub fn from_fn(grid: ModeGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let probabilities = grid.momenta().iter().map(|&k| f(k)).collect();
        Self::new(grid, probabilities)
    }
}

/// Excitation probabilities over the full grid. Runs with `T J` below
/// [`SUDDEN_THRESHOLD`] use the sudden formulas where they apply.
pub fn excitation_profile(n_sites: usize, cfg: &QuenchConfig, with_cd: bool) -> Result<ExcitationProfile> {
    let grid = ModeGrid::new(n_sites)?;
    check_couplings(cfg.g, cfg.j)?;
    let sudden = cfg.t_total * cfg.j < SUDDEN_THRESHOLD;
    if sudden && !with_cd {
        return ExcitationProfile::from_fn(grid, sudden_pk_nocd);
    }
    if sudden && (cfg.g - cfg.j).abs() <= 1e-12 * cfg.g.max(cfg.j) {
        let probabilities = grid
            .momenta()
            .iter()
            .map(|&k| sudden_pk_cd(k, cfg.g, cfg.j))
            .collect::<Result<Vec<_>>>()?;
        return ExcitationProfile::new(grid, probabilities);
    }
    let probabilities = grid
        .momenta()
        .iter()
        .map(|&k| evolve_mode(k, cfg, with_cd).map(|s| excitation_probability(k, &s)))
        .collect::<Result<Vec<_>>>()?;
    ExcitationProfile::new(grid, probabilities)
}

/// How per-mode terms add up to kink-number cumulants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CumulantConvention {
    /// Each excited pair carries two kinks: `(2p, 4p(1-p), 8p(1-p)(1-2p))`.
    #[default]
    PairModel,
    /// Continuum integrals taken term by term with weight `pi / N`:
    /// `(2p, 2p(1-p), 2p(1-p)(1-2p))`.
    LiteralIntegral,
}

/// Cumulants of the kink number (not yet divided by `N`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cumulants {
    pub kappa1: f64,
    pub kappa2: f64,
    pub kappa3: f64,
}

impl Cumulants {
    /// Density convention on a ring, where `N_e = N`.
    pub fn density(&self, n_sites: usize) -> [f64; 3] {
        let n = n_sites as f64;
        [self.kappa1 / n, self.kappa2 / n, self.kappa3 / n]
    }
}

/// Sums mode contributions in ascending `k`.
pub fn cumulants_from_profile(profile: &ExcitationProfile, convention: CumulantConvention) -> Cumulants {
    let (w2, w3) = match convention {
        CumulantConvention::PairModel => (4.0, 8.0),
        CumulantConvention::LiteralIntegral => (2.0, 2.0),
    };
    let mut c = Cumulants {
        kappa1: 0.0,
        kappa2: 0.0,
        kappa3: 0.0,
    };
    for &p in &profile.probabilities {
        c.kappa1 += 2.0 * p;
        c.kappa2 += w2 * p * (1.0 - p);
        c.kappa3 += w3 * p * (1.0 - p) * (1.0 - 2.0 * p);
    }
    c
}

/// Kink-number PMF of the pair model, by sequential convolution of the
/// two-point distributions `{0: 1 - p_k, 2: p_k}`.
pub fn kink_distribution(profile: &ExcitationProfile) -> KinkPmf {
    let n = profile.grid.n_sites();
    let mut pmf = vec![0.0; n + 1];
    pmf[0] = 1.0;
    let mut top = 0;
    for &p in &profile.probabilities {
        for kinks in (0..=top).rev().step_by(2) {
            let mass = pmf[kinks];
            pmf[kinks + 2] += mass * p;
            pmf[kinks] = mass * (1.0 - p);
        }
        top += 2;
    }
    KinkPmf {
        n_e: n,
        probabilities: pmf,
    }
}
