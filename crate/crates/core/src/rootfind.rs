//! Bracketing scalar root finders and a small 2D Newton refinement.

use crate::num::Real;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RootError {
    #[error("root is not bracketed: f({a}) = {fa}, f({b}) = {fb}")]
    NotBracketed { a: f64, b: f64, fa: f64, fb: f64 },
    #[error("root finder did not converge within {0} iterations")]
    NoConvergence(usize),
}

/// Brent's method on a bracketing interval [a, b].
///
/// `tol` is an absolute tolerance on the abscissa; a relative guard at
/// machine precision is always applied.
pub fn brent<R: Real>(
    mut f: impl FnMut(R) -> R,
    a: R,
    b: R,
    tol: R,
    max_iter: usize,
) -> Result<R, RootError> {
    let mut a = a;
    let mut b = b;
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == R::zero() {
        return Ok(a);
    }
    if fb == R::zero() {
        return Ok(b);
    }
    if (fa > R::zero()) == (fb > R::zero()) {
        return Err(RootError::NotBracketed {
            a: a.to_f64().unwrap_or(f64::NAN),
            b: b.to_f64().unwrap_or(f64::NAN),
            fa: fa.to_f64().unwrap_or(f64::NAN),
            fb: fb.to_f64().unwrap_or(f64::NAN),
        });
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    let two = R::of(2.0);
    let three = R::of(3.0);
    let half = R::of(0.5);
    for _ in 0..max_iter {
        if fb.abs() > fc.abs() {
            // Ensure b is the best approximation.
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let eps = R::of(f64::EPSILON);
        let tol1 = two * eps * b.abs() + half * tol;
        let xm = half * (c - b);
        if xm.abs() <= tol1 || fb == R::zero() {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                // Secant.
                p = two * xm * s;
                q = R::one() - s;
            } else {
                // Inverse quadratic interpolation.
                let q0 = fa / fc;
                let r = fb / fc;
                p = s * (two * xm * q0 * (q0 - r) - (b - a) * (r - R::one()));
                q = (q0 - R::one()) * (r - R::one()) * (s - R::one());
            }
            if p > R::zero() {
                q = -q;
            }
            p = p.abs();
            let min1 = three * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if two * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        if d.abs() > tol1 {
            b = b + d;
        } else {
            b = b + if xm > R::zero() { tol1 } else { -tol1 };
        }
        fb = f(b);
        if (fb > R::zero()) == (fc > R::zero()) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
    }
    Err(RootError::NoConvergence(max_iter))
}

/// Plain bisection; used as an independent cross-check of [`brent`].
pub fn bisect<R: Real>(
    mut f: impl FnMut(R) -> R,
    a: R,
    b: R,
    tol: R,
    max_iter: usize,
) -> Result<R, RootError> {
    let mut lo = a;
    let mut hi = b;
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == R::zero() {
        return Ok(lo);
    }
    if fhi == R::zero() {
        return Ok(hi);
    }
    if (flo > R::zero()) == (fhi > R::zero()) {
        return Err(RootError::NotBracketed {
            a: lo.to_f64().unwrap_or(f64::NAN),
            b: hi.to_f64().unwrap_or(f64::NAN),
            fa: flo.to_f64().unwrap_or(f64::NAN),
            fb: fhi.to_f64().unwrap_or(f64::NAN),
        });
    }
    for _ in 0..max_iter {
        let mid = (lo + hi) / R::of(2.0);
        if (hi - lo).abs() <= tol + R::of(f64::EPSILON) * mid.abs() {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == R::zero() {
            return Ok(mid);
        }
        if (fm > R::zero()) == (flo > R::zero()) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Err(RootError::NoConvergence(max_iter))
}

/// Two-variable Newton iteration with a finite-difference Jacobian.
///
/// Solves f(x) = 0 for f: R^2 -> R^2 starting from `x0`; `scale` sets the
/// FD increment per component. Returns the solution and the final residual
/// sup-norm.
pub fn newton2d(
    mut f: impl FnMut([f64; 2]) -> [f64; 2],
    x0: [f64; 2],
    scale: [f64; 2],
    tol: f64,
    max_iter: usize,
) -> Result<([f64; 2], f64), RootError> {
    let mut x = x0;
    let mut damping_budget = 8usize;
    for _ in 0..max_iter {
        let r = f(x);
        let res = r[0].abs().max(r[1].abs());
        if res < tol {
            return Ok((x, res));
        }
        let h0 = 1e-7 * scale[0].abs().max(1e-12);
        let h1 = 1e-7 * scale[1].abs().max(1e-12);
        let rx = f([x[0] + h0, x[1]]);
        let ry = f([x[0], x[1] + h1]);
        let j = [
            [(rx[0] - r[0]) / h0, (ry[0] - r[0]) / h1],
            [(rx[1] - r[1]) / h0, (ry[1] - r[1]) / h1],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == 0.0 || !det.is_finite() {
            return Err(RootError::NoConvergence(max_iter));
        }
        let dx = [
            (r[0] * j[1][1] - r[1] * j[0][1]) / det,
            (r[1] * j[0][0] - r[0] * j[1][0]) / det,
        ];
        let mut lambda = 1.0;
        loop {
            let cand = [x[0] - lambda * dx[0], x[1] - lambda * dx[1]];
            let rc = f(cand);
            if rc[0].abs().max(rc[1].abs()) < res || lambda < 1.0 / 64.0 {
                x = cand;
                break;
            }
            lambda /= 2.0;
            if damping_budget == 0 {
                x = cand;
                break;
            }
            damping_budget -= 1;
        }
    }
    Err(RootError::NoConvergence(max_iter))
}
