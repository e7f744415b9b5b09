//! Kink statistics in the density convention.
//!
//! For a graph with `N_e` edges the defect density of a bitstring is
//! `n = K / N_e` with `K` the number of kink edges. The cumulants are
//! `kappa1 = <n>`, `kappa2 = N_e <(n - <n>)^2>`, `kappa3 = N_e^2 <(n - <n>)^3>`,
//! i.e. the kink-number cumulants divided by `N_e`. Moments are the plain
//! (biased) sample moments.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Continuous, Normal};

use crate::error::{Error, Result};
use crate::lattice::LatticeGraph;
use crate::statevector::Bitstring;

pub const BOOTSTRAP_RESAMPLES: usize = 200;
pub const BOOTSTRAP_SEED: u64 = 0x6b69_6e6b;

/// Mean, variance and third central moment of a kink-count distribution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
    pub third: f64,
}

impl Moments {
    /// Density cumulants `(kappa1, kappa2, kappa3)` for `n_e` edges.
    pub fn density(&self, n_e: usize) -> [f64; 3] {
        let n = n_e as f64;
        [self.mean / n, self.variance / n, self.third / n]
    }
}

/// Probability mass function over kink counts `0..=n_e`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KinkPmf {
    pub n_e: usize,
    pub probabilities: Vec<f64>,
}

impl KinkPmf {
    pub fn new(n_e: usize, probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.len() != n_e + 1 {
            return Err(Error::SizeMismatch {
                left: probabilities.len(),
                right: n_e + 1,
            });
        }
        if probabilities.iter().any(|&p| !(p >= -1e-12 && p.is_finite())) {
            return Err(Error::param("negative or non-finite probability"));
        }
        Ok(Self { n_e, probabilities })
    }

    pub fn point_mass(n_e: usize, kinks: usize) -> Self {
        let mut probabilities = vec![0.0; n_e + 1];
        probabilities[kinks] = 1.0;
        Self { n_e, probabilities }
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    pub fn moments(&self) -> Moments {
        let mean: f64 = self
            .probabilities
            .iter()
            .enumerate()
            .map(|(k, p)| k as f64 * p)
            .sum();
        let (mut variance, mut third) = (0.0, 0.0);
        for (k, p) in self.probabilities.iter().enumerate() {
            let d = k as f64 - mean;
            variance += p * d * d;
            third += p * d * d * d;
        }
        Moments {
            mean,
            variance,
            third,
        }
    }

    pub fn density_cumulants(&self) -> [f64; 3] {
        self.moments().density(self.n_e)
    }

    /// `(kinks, probability)` pairs with non-zero mass.
    pub fn support(&self) -> Vec<(usize, f64)> {
        self.probabilities
            .iter()
            .enumerate()
            .filter(|(_, &p)| p != 0.0)
            .map(|(k, &p)| (k, p))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefectStats {
    pub kappa1: f64,
    pub kappa2: f64,
    pub kappa3: f64,
    /// Bootstrap standard errors of the three cumulants.
    pub se: [f64; 3],
    pub n_e: usize,
    pub shots: usize,
    /// `(density, count)` for every attainable density `k / n_e`.
    pub histogram: Vec<(f64, u64)>,
}

impl DefectStats {
    /// Exact statistics from a PMF: zero standard errors, no histogram.
    pub fn from_pmf(pmf: &KinkPmf) -> Self {
        let [kappa1, kappa2, kappa3] = pmf.density_cumulants();
        Self {
            kappa1,
            kappa2,
            kappa3,
            se: [0.0; 3],
            n_e: pmf.n_e,
            shots: 0,
            histogram: Vec::new(),
        }
    }

    /// Statistics of a list of kink counts on a graph with `n_e` edges.
    pub fn from_kink_counts(counts: &[usize], n_e: usize) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::EmptySamples);
        }
        if n_e == 0 {
            return Err(Error::param("graph has no edges"));
        }
        if let Some(&bad) = counts.iter().find(|&&c| c > n_e) {
            return Err(Error::param(format!("{bad} kinks on {n_e} edges")));
        }
        let [kappa1, kappa2, kappa3] = sample_moments(counts.iter().copied()).density(n_e);

        let mut rng = ChaCha8Rng::seed_from_u64(BOOTSTRAP_SEED);
        let mut sums = [0.0; 3];
        let mut squares = [0.0; 3];
        let mut resample = vec![0usize; counts.len()];
        for _ in 0..BOOTSTRAP_RESAMPLES {
            for slot in resample.iter_mut() {
                *slot = counts[rng.random_range(0..counts.len())];
            }
            let est = sample_moments(resample.iter().copied()).density(n_e);
            for q in 0..3 {
                sums[q] += est[q];
                squares[q] += est[q] * est[q];
            }
        }
        let b = BOOTSTRAP_RESAMPLES as f64;
        let se = std::array::from_fn(|q| {
            let mean = sums[q] / b;
            (squares[q] / b - mean * mean).max(0.0).sqrt()
        });

        let mut bins = vec![0u64; n_e + 1];
        for &c in counts {
            bins[c] += 1;
        }
        Ok(Self {
            kappa1,
            kappa2,
            kappa3,
            se,
            n_e,
            shots: counts.len(),
            histogram: density_bins(&bins, n_e),
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn sample_moments(counts: impl Iterator<Item = usize> + Clone) -> Moments {
    let (mut n, mut sum) = (0usize, 0.0);
    for c in counts.clone() {
        n += 1;
        sum += c as f64;
    }
    let mean = sum / n as f64;
    let (mut m2, mut m3) = (0.0, 0.0);
    for c in counts {
        let d = c as f64 - mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    Moments {
        mean,
        variance: m2 / n as f64,
        third: m3 / n as f64,
    }
}

fn density_bins(bins: &[u64], n_e: usize) -> Vec<(f64, u64)> {
    bins.iter()
        .enumerate()
        .map(|(k, &count)| (k as f64 / n_e as f64, count))
        .collect()
}

fn kink_counts(bitstrings: &[Bitstring], graph: &LatticeGraph) -> Result<Vec<usize>> {
    if bitstrings.is_empty() {
        return Err(Error::EmptySamples);
    }
    bitstrings
        .iter()
        .map(|b| {
            if b.n_sites() != graph.n_sites() {
                return Err(Error::SizeMismatch {
                    left: b.n_sites(),
                    right: graph.n_sites(),
                });
            }
            Ok(graph.kinks_in_basis_state(b.index()))
        })
        .collect()
}

pub fn cumulants_from_samples(bitstrings: &[Bitstring], graph: &LatticeGraph) -> Result<DefectStats> {
    DefectStats::from_kink_counts(&kink_counts(bitstrings, graph)?, graph.n_edges())
}

/// Counts per attainable density `k / N_e`, `k = 0..=N_e`.
pub fn histogram(bitstrings: &[Bitstring], graph: &LatticeGraph) -> Result<Vec<(f64, u64)>> {
    let n_e = graph.n_edges();
    let mut bins = vec![0u64; n_e + 1];
    for c in kink_counts(bitstrings, graph)? {
        bins[c] += 1;
    }
    Ok(density_bins(&bins, n_e))
}

/// Large-size limit of the `|+...+>` density distribution: a Gaussian with
/// mean 1/2 and variance `1 / (4 N_e)`.
#[derive(Clone, Debug)]
pub struct NormalReference {
    normal: Normal,
}

impl NormalReference {
    pub fn mean(&self) -> f64 {
        0.5
    }

    pub fn variance(&self) -> f64 {
        let sd = statrs::statistics::Distribution::std_dev(&self.normal).unwrap_or(0.0);
        sd * sd
    }

    pub fn pdf(&self, density: f64) -> f64 {
        self.normal.pdf(density)
    }
}

pub fn normal_reference(n_e: usize) -> Result<NormalReference> {
    if n_e == 0 {
        return Err(Error::param("need at least one edge"));
    }
    let normal = Normal::new(0.5, 0.5 / (n_e as f64).sqrt())
        .map_err(|e| Error::param(e.to_string()))?;
    Ok(NormalReference { normal })
}

/// Exact density cumulants of `|+...+>` on a triangle-free graph.
///
/// Products of `Z_i Z_j` over distinct edges average to zero unless every
/// site appears an even number of times, which for one or two edges never
/// happens and for three edges requires a triangle.
pub fn initial_state_cumulants(graph: &LatticeGraph) -> Result<[f64; 3]> {
    if let Some((a, b, c)) = graph.find_triangle() {
        return Err(Error::NotTriangleFree(a, b, c));
    }
    Ok([0.5, 0.25, 0.0])
}
