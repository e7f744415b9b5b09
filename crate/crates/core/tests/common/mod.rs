//! Dense-matrix helpers shared by the integration tests.

#![allow(dead_code)]

use cdquench::pauli::{Pauli, PauliString, PauliSum};
use cdquench::Complex64;
use nalgebra::DMatrix;

pub type Dense = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn single(p: Option<Pauli>) -> Dense {
    let (o, one, i) = (c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0));
    let entries = match p {
        None => [one, o, o, one],
        Some(Pauli::X) => [o, one, one, o],
        Some(Pauli::Y) => [o, -i, i, o],
        Some(Pauli::Z) => [one, o, o, -one],
    };
    DMatrix::from_row_slice(2, 2, &entries)
}

/// Kronecker product with site 0 as the least significant factor.
pub fn string_matrix(s: &PauliString) -> Dense {
    let mut m = DMatrix::from_element(1, 1, c(1.0, 0.0));
    for site in 0..s.n_sites() {
        m = single(s.letter_at(site)).kronecker(&m);
    }
    m
}

pub fn sum_matrix(sum: &PauliSum) -> Dense {
    let dim = 1usize << sum.n_sites();
    let mut m = DMatrix::zeros(dim, dim);
    for (s, coeff) in sum.iter() {
        m += string_matrix(s) * *coeff;
    }
    m
}

/// `Tr(A^dagger B) / dim`.
pub fn hs(a: &Dense, b: &Dense) -> Complex64 {
    (a.adjoint() * b).trace() / a.nrows() as f64
}

pub fn max_abs_diff(a: &Dense, b: &Dense) -> f64 {
    (a - b).iter().fold(0.0, |m, z| m.max(z.norm()))
}

/// Golden-section minimization of a unimodal function on `[lo, hi]`.
pub fn golden_section(mut lo: f64, mut hi: f64, tol: f64, f: impl Fn(f64) -> f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

/// alpha1 from a dense scan of `Tr((O0 + a O2)^dagger (O0 + a O2))`.
pub fn dense_alpha1(graph: &cdquench::LatticeGraph, g: f64, j: f64, lambda: f64) -> f64 {
    let n = graph.n_sites();
    let dim = 1usize << n;
    let mut x = DMatrix::zeros(dim, dim);
    let mut zz = DMatrix::zeros(dim, dim);
    for site in 0..n {
        x += string_matrix(&PauliString::single(n, site, Pauli::X).unwrap());
    }
    for &(a, b) in graph.edges() {
        zz += string_matrix(&PauliString::pair(n, (a, Pauli::Z), (b, Pauli::Z)).unwrap());
    }
    let h = &x * c(-(1.0 - lambda) * g, 0.0) + &zz * c(-lambda * j, 0.0);
    let o0 = &x * c(g, 0.0) - &zz * c(j, 0.0);
    let o1 = &h * &o0 - &o0 * &h;
    let o2 = &h * &o1 - &o1 * &h;
    let action = |alpha: f64| {
        let m = &o0 + &o2 * c(alpha, 0.0);
        hs(&m, &m).re
    };
    golden_section(-10.0 / (g * g + j * j), 0.0, 1e-14, action)
}
