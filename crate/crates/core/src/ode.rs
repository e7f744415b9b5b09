//! Fixed-step classical RK4 for complex state vectors.

use num_complex::Complex64;

/// Integrates `dy/dt = f(t, y)` from `t0` to `t1` in `steps` uniform steps.
///
/// `f` writes the derivative into its third argument. Scratch buffers are
/// allocated once.
pub(crate) fn rk4<F>(y: &mut [Complex64], t0: f64, t1: f64, steps: usize, mut f: F)
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    let n = y.len();
    let h = (t1 - t0) / steps as f64;
    let mut k1 = vec![Complex64::default(); n];
    let mut k2 = vec![Complex64::default(); n];
    let mut k3 = vec![Complex64::default(); n];
    let mut k4 = vec![Complex64::default(); n];
    let mut tmp = vec![Complex64::default(); n];

    for step in 0..steps {
        let t = t0 + step as f64 * h;
        f(t, y, &mut k1);
        for i in 0..n {
            tmp[i] = y[i] + k1[i] * (0.5 * h);
        }
        f(t + 0.5 * h, &tmp, &mut k2);
        for i in 0..n {
            tmp[i] = y[i] + k2[i] * (0.5 * h);
        }
        f(t + 0.5 * h, &tmp, &mut k3);
        for i in 0..n {
            tmp[i] = y[i] + k3[i] * h;
        }
        f(t + h, &tmp, &mut k4);
        for i in 0..n {
            y[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
        }
    }
}
