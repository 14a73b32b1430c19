use cfrac::{compare_prefix, cylinder_width, ContinuedFraction, PrefixOrder};
use numerics::{pow2, Real};
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::orbit::{heights, ORBIT_BUDGET, HeightRun, HeightStop, Orbit};
use crate::spec::CircleMapSpec;
use crate::CircleMapError;

fn run_to_cf(run: &HeightRun) -> ContinuedFraction {
    let mut q = run.heights.clone();
    let terminated = match run.stop {
        HeightStop::Infinite => {
            // a height reaching the global cap is the infinite one, not a quotient
            if q.len() == run.pairs.len() {
                q.pop();
            }
            true
        }
        _ => false,
    };
    ContinuedFraction { quotients: q, terminated }
}

/// First `depth` partial quotients of ρ(F), read off as heights.
pub fn rotation_number(spec: &CircleMapSpec, depth: usize) -> Result<ContinuedFraction, CircleMapError> {
    let mut orbit = Orbit::new(spec);
    let run = heights(&mut orbit, depth, ORBIT_BUDGET, |_| u64::MAX, |_, _| false);
    if matches!(run.stop, HeightStop::PrecisionExhausted | HeightStop::Budget) {
        return Err(CircleMapError::PrecisionExhausted { level: run.heights.len() });
    }
    Ok(run_to_cf(&run))
}

/// (F^n(x) − x)/n.
pub fn birkhoff_rotation(spec: &CircleMapSpec, x: &Real, n: usize) -> Real {
    let mut y = x.clone();
    for _ in 0..n {
        y = spec.lift(&y);
    }
    (y - x) / n as u32
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TuneReport {
    pub spec: CircleMapSpec,
    /// Final ω bracket; every ω in it shares the matched prefix.
    pub lo: Real,
    pub hi: Real,
    /// Number of quotients that were matched.
    pub depth: usize,
    pub quotients: ContinuedFraction,
}

/// Smallest n ≥ depth whose cylinder is no wider than tol.
fn effective_depth(target: &ContinuedFraction, depth: usize, tol: &Real) -> Result<usize, CircleMapError> {
    let mut n = depth;
    loop {
        if n > target.len() {
            return Err(CircleMapError::TargetUnattainable(format!(
                "target prefix of length {} cannot certify tolerance {}",
                target.len(),
                tol.to_f64()
            )));
        }
        let w = cylinder_width(target, n).expect("n within target length");
        if Float::with_val(tol.prec(), &w) <= *tol {
            return Ok(n);
        }
        n += 1;
    }
}

fn compare_at<B>(family: &B, omega: &Real, target: &ContinuedFraction, n: usize) -> Result<(PrefixOrder, ContinuedFraction), CircleMapError>
where
    B: Fn(&Real) -> Result<CircleMapSpec, CircleMapError>,
{
    let spec = family(omega)?;
    let mut orbit = Orbit::new(&spec);
    let t = &target.quotients;
    let run = heights(&mut orbit, n, ORBIT_BUDGET, |i| t[i] + 1, |i, k| k != t[i]);
    if matches!(run.stop, HeightStop::PrecisionExhausted | HeightStop::Budget) {
        return Err(CircleMapError::PrecisionExhausted { level: run.heights.len() });
    }
    let cf = run_to_cf(&run);
    Ok((compare_prefix(&cf, target, n), cf))
}

fn bisect<B>(
    family: &B,
    target: &ContinuedFraction,
    n: usize,
    mut lo: Real,
    mut hi: Real,
) -> Result<TuneReport, CircleMapError>
where
    B: Fn(&Real) -> Result<CircleMapSpec, CircleMapError>,
{
    let prec = lo.prec();
    let floor = pow2(prec, 16 - prec as i32);
    loop {
        let (mid, ord, cf) = split(family, &lo, &hi, target, n)?;
        match ord {
            PrefixOrder::Equal => {
                return Ok(TuneReport { spec: family(&mid)?, lo, hi, depth: n, quotients: cf });
            }
            PrefixOrder::Less => lo = mid,
            PrefixOrder::Greater => hi = mid,
        }
        if Float::with_val(prec, &hi - &lo) < floor {
            return Err(CircleMapError::TargetUnattainable(format!(
                "ω bracket collapsed near {} without matching {} quotients",
                lo.to_f64(),
                n
            )));
        }
    }
}

/// Bracket midpoint, nudged off parameters where the family degenerates
/// (colliding critical points).
fn split<B>(
    family: &B,
    lo: &Real,
    hi: &Real,
    target: &ContinuedFraction,
    n: usize,
) -> Result<(Real, PrefixOrder, ContinuedFraction), CircleMapError>
where
    B: Fn(&Real) -> Result<CircleMapSpec, CircleMapError>,
{
    let prec = lo.prec();
    let w = Float::with_val(prec, hi - lo);
    let mut last = None;
    for num in [32u32, 33, 31, 34, 30] {
        let mid = Float::with_val(prec, &w * num) / 64u32 + lo;
        match compare_at(family, &mid, target, n) {
            Ok((ord, cf)) => return Ok((mid, ord, cf)),
            Err(e @ CircleMapError::Degenerate(..)) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap())
}

/// Precision used for the cheap first pass of tuning.
const COARSE_BITS: u32 = 96;

/// Bisection on ω until the rotation number shares a prefix with `target`
/// long enough to put it within `tol`. At high precision a coarse pass
/// first narrows the bracket, which is then checked and refined at full
/// precision.
pub fn tune<B>(family: B, target: &ContinuedFraction, depth: usize, tol: &Real) -> Result<TuneReport, CircleMapError>
where
    B: Fn(&Real) -> Result<CircleMapSpec, CircleMapError>,
{
    let prec = tol.prec();
    let n = effective_depth(target, depth, tol)?;
    let zero = Float::new(prec);
    let one = Float::with_val(prec, 1);
    if prec <= COARSE_BITS + 32 {
        return bisect(&family, target, n, zero, one);
    }
    let coarse = |w: &Real| family(&Float::with_val(COARSE_BITS, w)).and_then(|s| s.with_precision(COARSE_BITS));
    let Ok(rough) = bisect(&coarse, target, n, Float::new(COARSE_BITS), Float::with_val(COARSE_BITS, 1)) else {
        return bisect(&family, target, n, zero, one);
    };
    // widen the coarse bracket until it brackets at full precision
    let centre = Float::with_val(prec, rough.spec.omega());
    let mut half = Float::with_val(prec, &rough.hi - &rough.lo).max(&pow2(prec, -(COARSE_BITS as i32) + 8));
    for _ in 0..8 {
        let lo = Float::with_val(prec, &centre - &half).max(&zero);
        let hi = Float::with_val(prec, &centre + &half).min(&one);
        let (olo, _) = compare_at(&family, &lo, target, n)?;
        let (ohi, _) = compare_at(&family, &hi, target, n)?;
        if olo != PrefixOrder::Greater && ohi != PrefixOrder::Less {
            return bisect(&family, target, n, lo, hi);
        }
        half *= 16u32;
    }
    bisect(&family, target, n, zero, one)
}
