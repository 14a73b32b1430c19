use std::cmp::Ordering;

use rug::Float;
use serde::{Deserialize, Serialize};

use crate::{round_to, NumericsError, Real};

/// A line y = slope·x + intercept plus its goodness of fit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: Real,
    pub intercept: Real,
    pub r_squared: Real,
}

const GUARD_BITS: u32 = 64;

fn check(xs: &[Real], ys: &[Real]) -> Result<u32, NumericsError> {
    if xs.len() != ys.len() {
        return Err(NumericsError::DegenerateInput("xs and ys differ in length"));
    }
    if xs.len() < 2 {
        return Err(NumericsError::DegenerateInput("need at least two points"));
    }
    if xs.iter().all(|x| *x == xs[0]) {
        return Err(NumericsError::DegenerateInput("all abscissae equal"));
    }
    Ok(xs[0].prec())
}

/// Ordinary least squares, computed with 64 guard bits and rounded once.
pub fn linear_fit(xs: &[Real], ys: &[Real]) -> Result<FitResult, NumericsError> {
    let prec = check(xs, ys)?;
    let wp = prec + GUARD_BITS;
    let n = Float::with_val(wp, xs.len());
    let mut mx = Float::new(wp);
    let mut my = Float::new(wp);
    for (x, y) in xs.iter().zip(ys) {
        mx += x;
        my += y;
    }
    mx /= &n;
    my /= &n;
    let mut sxx = Float::new(wp);
    let mut sxy = Float::new(wp);
    let mut syy = Float::new(wp);
    for (x, y) in xs.iter().zip(ys) {
        let dx = Float::with_val(wp, x - &mx);
        let dy = Float::with_val(wp, y - &my);
        sxx += Float::with_val(wp, &dx * &dx);
        sxy += Float::with_val(wp, &dx * &dy);
        syy += Float::with_val(wp, &dy * &dy);
    }
    let slope = Float::with_val(wp, &sxy / &sxx);
    let intercept = Float::with_val(wp, &my - &slope * &mx);
    let mut ss_res = Float::new(wp);
    for (x, y) in xs.iter().zip(ys) {
        let e = Float::with_val(wp, y - &slope * x) - &intercept;
        ss_res += Float::with_val(wp, &e * &e);
    }
    let r2 = if syy.is_zero() {
        Float::with_val(wp, 1)
    } else {
        let v = Float::with_val(wp, 1) - Float::with_val(wp, &ss_res / &syy);
        v.clamp(&0, &1)
    };
    Ok(FitResult {
        slope: round_to(&slope, prec),
        intercept: round_to(&intercept, prec),
        r_squared: round_to(&r2, prec),
    })
}

// cross of (b-a) and (c-a)
fn cross(a: &(Real, Real), b: &(Real, Real), c: &(Real, Real)) -> Real {
    let p = a.0.prec() + GUARD_BITS;
    let l = Float::with_val(p, &b.0 - &a.0) * Float::with_val(p, &c.1 - &a.1);
    let r = Float::with_val(p, &b.1 - &a.1) * Float::with_val(p, &c.0 - &a.0);
    l - r
}

/// Monotone-chain hull. `upper` keeps clockwise turns.
fn hull(xs: &[Real], ys: &[Real], upper: bool) -> Vec<(Real, Real)> {
    let mut pts: Vec<(Real, Real)> = xs.iter().cloned().zip(ys.iter().cloned()).collect();
    pts.sort_by(|a, b| {
        let o = a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal);
        let t = a.1.partial_cmp(&b.1).unwrap_or(Ordering::Equal);
        o.then(if upper { t.reverse() } else { t })
    });
    // one point per abscissa: the extreme one in the hull's direction
    pts.dedup_by(|b, a| a.0 == b.0);
    let mut h: Vec<(Real, Real)> = Vec::with_capacity(pts.len());
    for p in pts {
        while h.len() >= 2 {
            let c = cross(&h[h.len() - 2], &h[h.len() - 1], &p);
            let pop = if upper { c >= 0 } else { c <= 0 };
            if !pop {
                break;
            }
            h.pop();
        }
        h.push(p);
    }
    h
}

fn edge_line(a: &(Real, Real), b: &(Real, Real)) -> FitResult {
    let prec = a.0.prec();
    let wp = prec + GUARD_BITS;
    let slope = Float::with_val(wp, &b.1 - &a.1) / Float::with_val(wp, &b.0 - &a.0);
    let intercept = Float::with_val(wp, &a.1 - &slope * &a.0);
    FitResult {
        slope: round_to(&slope, prec),
        intercept: round_to(&intercept, prec),
        r_squared: Float::with_val(prec, 1),
    }
}

/// Smallest dominating line y ≤ B₁x + B₂ taken from the upper convex hull.
///
/// Every hull edge dominates all samples; the leftmost one has the least
/// intercept when the abscissae are non-negative, and the least slope among
/// the lines attaining it.
pub fn upper_envelope_fit(xs: &[Real], ys: &[Real]) -> Result<FitResult, NumericsError> {
    check(xs, ys)?;
    let h = hull(xs, ys, true);
    Ok(edge_line(&h[0], &h[1]))
}

/// Steepest line lying below every sample: the rightmost lower-hull edge.
pub fn lower_envelope_fit(xs: &[Real], ys: &[Real]) -> Result<FitResult, NumericsError> {
    check(xs, ys)?;
    let h = hull(xs, ys, false);
    let n = h.len();
    Ok(edge_line(&h[n - 2], &h[n - 1]))
}
