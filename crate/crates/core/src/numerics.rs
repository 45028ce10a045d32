//! Small numerical kernels shared by the modules: composite Simpson
//! quadrature with a Richardson error estimate, the Thomas recurrence for
//! tridiagonal systems, trapezoidal sums and linear interpolation on a
//! uniform mesh.

use crate::Error;

/// Composite Simpson rule with `panels` panels (rounded up to even).
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let n = (panels.max(2) + 1) & !1;
    let h = (b - a) / n as f64;
    let mut odd = 0.0;
    let mut even = 0.0;
    for i in 1..n {
        let v = f(a + i as f64 * h);
        if i % 2 == 1 {
            odd += v;
        } else {
            even += v;
        }
    }
    h / 3.0 * (f(a) + f(b) + 4.0 * odd + 2.0 * even)
}

/// Result of [`simpson_to_tolerance`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    /// Richardson estimate `|S_2n − S_n| / 15` of the remaining error.
    pub error_estimate: f64,
    pub panels: usize,
}

/// Doubles the Simpson panel count until the Richardson estimate drops
/// below `tol` (or `2^20` panels are reached). The returned value is the
/// Richardson-extrapolated one.
pub fn simpson_to_tolerance<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Quadrature {
    if a == b {
        return Quadrature {
            value: 0.0,
            error_estimate: 0.0,
            panels: 0,
        };
    }
    let mut n = 16;
    let mut coarse = simpson(&f, a, b, n);
    loop {
        let fine = simpson(&f, a, b, 2 * n);
        let est = (fine - coarse).abs() / 15.0;
        n *= 2;
        if est < tol || n >= 1 << 20 {
            return Quadrature {
                value: fine + (fine - coarse) / 15.0,
                error_estimate: est,
                panels: n,
            };
        }
        coarse = fine;
    }
}

/// Solves `lower[i]·x[i-1] + diag[i]·x[i] + upper[i]·x[i+1] = rhs[i]` in place
/// (`rhs` is overwritten by the solution, `upper` by the eliminated
/// coefficients). Requires strict diagonal dominance.
pub fn thomas_solve(
    lower: &[f64],
    diag: &[f64],
    upper: &mut [f64],
    rhs: &mut [f64],
) -> Result<(), Error> {
    let n = rhs.len();
    debug_assert!(lower.len() == n && diag.len() == n && upper.len() == n);
    if n == 0 {
        return Ok(());
    }
    for i in 0..n {
        let off =
            if i > 0 { lower[i].abs() } else { 0.0 } + if i + 1 < n { upper[i].abs() } else { 0.0 };
        if !(diag[i].abs() > off) {
            return Err(Error::NotDiagonallyDominant { row: i });
        }
    }
    upper[0] /= diag[0];
    rhs[0] /= diag[0];
    for i in 1..n {
        let den = diag[i] - lower[i] * upper[i - 1];
        upper[i] /= den;
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / den;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= upper[i] * rhs[i + 1];
    }
    Ok(())
}

/// Trapezoidal sum of nodal values on a uniform mesh.
pub fn trapezoid(values: &[f64], dx: f64) -> f64 {
    match values {
        [] | [_] => 0.0,
        [first, inner @ .., last] => dx * (0.5 * (first + last) + inner.iter().sum::<f64>()),
    }
}

/// Linear interpolation of nodal `values` (uniform spacing `dx` from `x0`)
/// at `x`. Returns `None` outside the mesh.
pub fn interpolate(values: &[f64], x0: f64, dx: f64, x: f64) -> Option<f64> {
    let n = values.len();
    let s = (x - x0) / dx;
    if !(s >= 0.0) || s > (n - 1) as f64 {
        return None;
    }
    let i = (s as usize).min(n - 2);
    let w = s - i as f64;
    Some((1.0 - w) * values[i] + w * values[i + 1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn simpson_is_exact_for_cubics() {
        let v = simpson(|x| x * x * x - 2.0 * x + 1.0, -1.0, 2.0, 2);
        assert!((v - 3.75).abs() < 1e-14);
    }

    #[test]
    fn richardson_tolerance_reached() {
        let q = simpson_to_tolerance(libm::sin, 0.0, core::f64::consts::PI, 1e-12);
        assert!(q.error_estimate < 1e-12);
        assert!((q.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn thomas_matches_dense_solution() {
        let lower = [0.0, -1.0, -1.0, -1.0];
        let diag = [4.0, 4.0, 4.0, 4.0];
        let mut upper = [-1.0, -1.0, -1.0, 0.0];
        let x = [1.0, -2.0, 0.5, 3.0];
        let mut rhs = vec![0.0; 4];
        for i in 0..4 {
            rhs[i] = diag[i] * x[i];
            if i > 0 {
                rhs[i] += lower[i] * x[i - 1];
            }
            if i < 3 {
                rhs[i] += upper[i] * x[i + 1];
            }
        }
        thomas_solve(&lower, &diag, &mut upper, &mut rhs).unwrap();
        for i in 0..4 {
            assert!((rhs[i] - x[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn thomas_rejects_weak_diagonal() {
        let mut upper = [1.0, 0.0];
        let mut rhs = [1.0, 1.0];
        let err = thomas_solve(&[0.0, 1.0], &[1.0, 2.0], &mut upper, &mut rhs).unwrap_err();
        assert_eq!(err, Error::NotDiagonallyDominant { row: 0 });
    }

    #[test]
    fn trapezoid_and_interpolation() {
        let v = [0.0, 1.0, 2.0, 3.0];
        assert!((trapezoid(&v, 0.5) - 2.25).abs() < 1e-15);
        assert_eq!(interpolate(&v, 1.0, 0.5, 1.25), Some(0.5));
        assert_eq!(interpolate(&v, 1.0, 0.5, 2.5), Some(3.0));
        assert_eq!(interpolate(&v, 1.0, 0.5, 2.6), None);
        assert_eq!(interpolate(&v, 1.0, 0.5, 0.9), None);
    }
}
