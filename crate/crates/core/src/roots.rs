//! Bracketed scalar root finders.

use crate::error::{Error, Result};

/// Plain bisection on `[lo, hi]`; stops when the bracket is narrower than `xtol`.
pub fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, xtol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() || flo.is_nan() || fhi.is_nan() {
        return Err(Error::NoBracket(format!(
            "f({lo}) = {flo}, f({hi}) = {fhi}"
        )));
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo) <= xtol || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Brent's method (inverse quadratic interpolation guarded by bisection).
pub fn brent<F>(mut f: F, a: f64, b: f64, xtol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (a, b);
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.is_nan() || fb.is_nan() || fa.signum() == fb.signum() {
        return Err(Error::NoBracket(format!("f({a}) = {fa}, f({b}) = {fb}")));
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
    }
    Err(Error::NonConvergence("brent: iteration budget exhausted".into()))
}

/// Scans `f` on `[from, to]` with a fixed step and returns the first
/// subinterval on which it changes sign.
pub fn scan_bracket<F>(mut f: F, from: f64, to: f64, step: f64) -> Option<(f64, f64)>
where
    F: FnMut(f64) -> f64,
{
    let n = ((to - from) / step).ceil() as usize;
    let mut x0 = from;
    let mut f0 = f(x0);
    for k in 1..=n {
        let x1 = (from + k as f64 * step).min(to);
        let f1 = f(x1);
        if f0 == 0.0 || f0.signum() != f1.signum() {
            return Some((x0, x1));
        }
        x0 = x1;
        f0 = f1;
    }
    None
}
