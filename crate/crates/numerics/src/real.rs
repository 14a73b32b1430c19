use rug::float::Round;
use rug::ops::AssignRound;
use rug::Float;

use crate::NumericsError;

/// Every real scalar in the workspace.
pub type Real = Float;

/// Smallest mantissa width accepted anywhere.
pub const MIN_PRECISION: u32 = 53;

pub fn real(prec: u32, v: f64) -> Real {
    Float::with_val(prec, v)
}

pub fn int(prec: u32, v: i64) -> Real {
    Float::with_val(prec, v)
}

/// Parses a decimal string, rounding once at `prec` bits.
pub fn parse_real(s: &str, prec: u32) -> Result<Real, NumericsError> {
    let p = Float::parse(s.trim()).map_err(|_| NumericsError::Parse(s.to_string()))?;
    Ok(Float::with_val(prec, p))
}

/// Decimal string with enough digits to round-trip at the value's precision.
pub fn to_decimal(x: &Real) -> String {
    x.to_string_radix(10, None)
}

/// 2^e at `prec` bits (exact).
pub fn pow2(prec: u32, e: i32) -> Real {
    let mut x = Float::with_val(prec, 1);
    x <<= e;
    x
}

/// Default tolerance 2^{-prec+16}.
pub fn default_tol(prec: u32) -> Real {
    pow2(prec, 16 - prec as i32)
}

pub fn pi(prec: u32) -> Real {
    Float::with_val(prec, rug::float::Constant::Pi)
}

pub fn two_pi(prec: u32) -> Real {
    let mut p = pi(prec);
    p <<= 1;
    p
}

/// Rounds `x` to `prec` bits, nearest.
pub fn round_to(x: &Real, prec: u32) -> Real {
    let mut y = Float::new(prec);
    y.assign_round(x, Round::Nearest);
    y
}

/// Floor as a signed integer; panics if the value does not fit.
pub fn floor_i64(x: &Real) -> i64 {
    x.clone()
        .floor()
        .to_integer()
        .and_then(|i| i.to_i64())
        .expect("floor out of i64 range")
}

/// Fractional part in [0,1).
pub fn frac(x: &Real) -> Real {
    let f = x.clone().floor();
    let mut r = x.clone();
    r -= &f;
    r
}

pub fn min_real<'a>(a: &'a Real, b: &'a Real) -> &'a Real {
    if a <= b {
        a
    } else {
        b
    }
}

pub fn max_real<'a>(a: &'a Real, b: &'a Real) -> &'a Real {
    if a >= b {
        a
    } else {
        b
    }
}

/// Bisection for an increasing `g`: returns x in [lo,hi] with g(x) ≈ target.
/// Runs until the bracket stops shrinking at the working precision.
pub fn bisect_increasing<G>(g: G, target: &Real, lo: &Real, hi: &Real) -> Real
where
    G: Fn(&Real) -> Real,
{
    let prec = lo.prec().max(hi.prec());
    let mut a = round_to(lo, prec);
    let mut b = round_to(hi, prec);
    for _ in 0..(prec as usize + 8) {
        let mut m = Float::with_val(prec, &a + &b);
        m >>= 1;
        if m == a || m == b {
            break;
        }
        if g(&m) < *target {
            a = m;
        } else {
            b = m;
        }
    }
    let mut m = Float::with_val(prec, &a + &b);
    m >>= 1;
    m
}

/// Chebyshev points of the first kind on [a,b], m of them.
pub fn chebyshev_nodes(a: &Real, b: &Real, m: usize) -> Vec<Real> {
    let prec = a.prec();
    let mid = Float::with_val(prec, a + b) / 2u32;
    let half = Float::with_val(prec, b - a) / 2u32;
    (0..m)
        .map(|k| {
            let t = pi(prec) * Float::with_val(prec, 2 * k + 1) / Float::with_val(prec, 2 * m);
            Float::with_val(prec, &mid + &half * t.cos())
        })
        .collect()
}
