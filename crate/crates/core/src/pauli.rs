//! Sparse Pauli-string algebra.
//!
//! A [`PauliString`] stores only its non-identity letters, sorted by site, so
//! that ordering and hashing are canonical. A [`PauliSum`] keeps its terms in
//! a `BTreeMap` which gives deterministic iteration and reproducible sums.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Coefficients with magnitude at or below this are dropped after every
/// arithmetic operation.
pub const PRUNE_TOLERANCE: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    /// Single-site product `self * other` as `(power of i, letter)`; `None`
    /// letter means identity.
    fn mul(self, other: Pauli) -> (u8, Option<Pauli>) {
        use Pauli::*;
        match (self, other) {
            (a, b) if a == b => (0, None),
            (X, Y) => (1, Some(Z)),
            (Y, Z) => (1, Some(X)),
            (Z, X) => (1, Some(Y)),
            (Y, X) => (3, Some(Z)),
            (Z, Y) => (3, Some(X)),
            (X, Z) => (3, Some(Y)),
            _ => unreachable!(),
        }
    }

    fn symbol(self) -> char {
        match self {
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

fn i_power(p: u8) -> Complex64 {
    match p % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n_sites: usize,
    letters: Vec<(usize, Pauli)>,
}

impl PauliString {
    pub fn identity(n_sites: usize) -> Self {
        Self {
            n_sites,
            letters: Vec::new(),
        }
    }

    /// Builds a string from `(site, letter)` pairs in any order.
    pub fn new(n_sites: usize, letters: impl IntoIterator<Item = (usize, Pauli)>) -> Result<Self> {
        let mut letters: Vec<_> = letters.into_iter().collect();
        letters.sort_unstable();
        if let Some(&(site, _)) = letters.iter().find(|(s, _)| *s >= n_sites) {
            return Err(Error::param(format!(
                "site {site} out of range for {n_sites} sites"
            )));
        }
        if letters.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::param("a site appears twice in a Pauli string"));
        }
        Ok(Self { n_sites, letters })
    }

    pub fn single(n_sites: usize, site: usize, p: Pauli) -> Result<Self> {
        Self::new(n_sites, [(site, p)])
    }

    pub fn pair(n_sites: usize, a: (usize, Pauli), b: (usize, Pauli)) -> Result<Self> {
        Self::new(n_sites, [a, b])
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn letters(&self) -> &[(usize, Pauli)] {
        &self.letters
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn weight(&self) -> usize {
        self.letters.len()
    }

    pub fn letter_at(&self, site: usize) -> Option<Pauli> {
        self.letters
            .binary_search_by_key(&site, |&(s, _)| s)
            .ok()
            .map(|i| self.letters[i].1)
    }

    fn check_size(&self, other: &PauliString) -> Result<()> {
        if self.n_sites != other.n_sites {
            return Err(Error::SizeMismatch {
                left: self.n_sites,
                right: other.n_sites,
            });
        }
        Ok(())
    }

    /// `self * other = phase * result`, with `phase` in `{±1, ±i}`.
    pub fn multiply(&self, other: &PauliString) -> Result<(Complex64, PauliString)> {
        self.check_size(other)?;
        let (power, result) = self.mul_unchecked(other);
        Ok((i_power(power), result))
    }

    fn mul_unchecked(&self, other: &PauliString) -> (u8, PauliString) {
        let (a, b) = (&self.letters, &other.letters);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let mut power = 0u8;
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push(a[i]);
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                out.push(b[j]);
                j += 1;
            } else {
                let (p, letter) = a[i].1.mul(b[j].1);
                power += p;
                if let Some(l) = letter {
                    out.push((a[i].0, l));
                }
                i += 1;
                j += 1;
            }
        }
        (
            power % 4,
            PauliString {
                n_sites: self.n_sites,
                letters: out,
            },
        )
    }

    /// True when the two strings anticommute (odd number of sites carrying
    /// different non-identity letters).
    pub fn anticommutes_with(&self, other: &PauliString) -> bool {
        let (a, b) = (&self.letters, &other.letters);
        let (mut i, mut j) = (0, 0);
        let mut clashes = 0usize;
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    if a[i].1 != b[j].1 {
                        clashes += 1;
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        clashes % 2 == 1
    }

    /// Bit masks for acting on computational basis states (bit `i` is site
    /// `i`): `P|b> = i^n_y (-1)^popcount(b & z_mask) |b ^ x_mask>`.
    pub fn masks(&self) -> (u64, u64, u32) {
        let (mut x, mut z, mut y) = (0u64, 0u64, 0u32);
        for &(site, p) in &self.letters {
            let bit = 1u64 << site;
            match p {
                Pauli::X => x |= bit,
                Pauli::Z => z |= bit,
                Pauli::Y => {
                    x |= bit;
                    z |= bit;
                    y += 1;
                }
            }
        }
        (x, z, y)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "I");
        }
        for (k, (site, p)) in self.letters.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}{}", p.symbol(), site)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    n_sites: usize,
    terms: BTreeMap<PauliString, Complex64>,
}

impl PauliSum {
    pub fn zero(n_sites: usize) -> Self {
        Self {
            n_sites,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms(
        n_sites: usize,
        terms: impl IntoIterator<Item = (PauliString, Complex64)>,
    ) -> Result<Self> {
        let mut sum = Self::zero(n_sites);
        for (s, c) in terms {
            sum.add_term(s, c)?;
        }
        sum.prune();
        Ok(sum)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PauliString, &Complex64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, s: &PauliString) -> Complex64 {
        self.terms.get(s).copied().unwrap_or_default()
    }

    /// Adds `coeff * s` (no pruning; call sites prune once at the end).
    pub fn add_term(&mut self, s: PauliString, coeff: Complex64) -> Result<()> {
        if s.n_sites != self.n_sites {
            return Err(Error::SizeMismatch {
                left: self.n_sites,
                right: s.n_sites,
            });
        }
        *self.terms.entry(s).or_default() += coeff;
        Ok(())
    }

    fn prune(&mut self) {
        self.terms.retain(|_, c| c.norm() > PRUNE_TOLERANCE);
    }

    fn check_size(&self, other: &PauliSum) -> Result<()> {
        if self.n_sites != other.n_sites {
            return Err(Error::SizeMismatch {
                left: self.n_sites,
                right: other.n_sites,
            });
        }
        Ok(())
    }

    pub fn scaled(&self, factor: Complex64) -> PauliSum {
        let mut out = PauliSum {
            n_sites: self.n_sites,
            terms: self.terms.iter().map(|(s, c)| (s.clone(), c * factor)).collect(),
        };
        out.prune();
        out
    }

    pub fn add(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_size(other)?;
        let mut out = self.clone();
        for (s, c) in &other.terms {
            *out.terms.entry(s.clone()).or_default() += c;
        }
        out.prune();
        Ok(out)
    }

    pub fn multiply(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_size(other)?;
        let mut out = PauliSum::zero(self.n_sites);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let (p, r) = a.mul_unchecked(b);
                *out.terms.entry(r).or_default() += i_power(p) * ca * cb;
            }
        }
        out.prune();
        Ok(out)
    }

    /// `[self, other] = self*other - other*self`. Commuting string pairs
    /// contribute nothing; anticommuting pairs contribute `2*a*b`.
    pub fn commutator(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_size(other)?;
        let mut out = PauliSum::zero(self.n_sites);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                if a.anticommutes_with(b) {
                    let (p, r) = a.mul_unchecked(b);
                    *out.terms.entry(r).or_default() += 2.0 * i_power(p) * ca * cb;
                }
            }
        }
        out.prune();
        Ok(out)
    }

    /// Normalized Hilbert-Schmidt inner product `Tr(A^dagger B) / 2^N`.
    pub fn hs_inner(&self, other: &PauliSum) -> Result<Complex64> {
        self.check_size(other)?;
        Ok(self
            .terms
            .iter()
            .filter_map(|(s, ca)| other.terms.get(s).map(|cb| ca.conj() * cb))
            .sum())
    }

    pub fn dagger(&self) -> PauliSum {
        PauliSum {
            n_sites: self.n_sites,
            terms: self.terms.iter().map(|(s, c)| (s.clone(), c.conj())).collect(),
        }
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.terms.values().all(|c| c.im.abs() <= tol)
    }
}

fn fmt_coeff(c: Complex64) -> String {
    let sign = if c.im < 0.0 { '-' } else { '+' };
    format!("({}{}{}i)", c.re, sign, c.im.abs())
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (s, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}·{}", fmt_coeff(*c), s)?;
        }
        Ok(())
    }
}
