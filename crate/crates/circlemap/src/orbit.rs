use numerics::{pow2, Real};
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::spec::CircleMapSpec;

/// Lazily extended orbit of the marked critical point, x_i = F^i(0) on the lift.
#[derive(Clone, Debug)]
pub struct Orbit<'a> {
    spec: &'a CircleMapSpec,
    xs: Vec<Real>,
}

impl<'a> Orbit<'a> {
    pub fn new(spec: &'a CircleMapSpec) -> Self {
        Orbit { spec, xs: vec![Float::new(spec.prec())] }
    }

    pub fn spec(&self) -> &CircleMapSpec {
        self.spec
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn extend_to(&mut self, i: usize) {
        while self.xs.len() <= i {
            let next = self.spec.lift(self.xs.last().unwrap());
            self.xs.push(next);
        }
    }

    /// F^i(0), computing the orbit up to i if needed.
    pub fn at(&mut self, i: usize) -> &Real {
        self.extend_to(i);
        &self.xs[i]
    }

    /// F^q(0) − p.
    pub fn residual(&mut self, q: u64, p: i64) -> Real {
        let x = self.at(q as usize);
        Float::with_val(x.prec(), x - p)
    }

    pub fn points(&self) -> &[Real] {
        &self.xs
    }
}

/// Why a height run ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HeightStop {
    /// All requested levels were computed.
    Depth,
    /// A height was infinite within precision (periodic orbit, rational ρ).
    Infinite,
    /// Return distances fell below the resolvable scale 2^{-b/2}.
    PrecisionExhausted,
    /// A caller-supplied cap was hit; the true height exceeds the cap.
    Capped,
    /// The caller's stop predicate fired.
    Stopped,
    /// The orbit needed to resolve the next height exceeds the budget.
    Budget,
}

/// Heights of successive renormalizations of the pair at the marked point.
///
/// `pairs[n]` is (q_η, p_η, q_ξ, p_ξ) of the level-(n−1) pair, so `pairs[0]` is
/// (F, T^{-1}) and `heights[n]` is the height of `pairs[n]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeightRun {
    pub heights: Vec<u64>,
    pub pairs: Vec<(u64, i64, u64, i64)>,
    pub stop: HeightStop,
}

/// Maximum single height before declaring it infinite.
pub const HEIGHT_CAP: u64 = 1_000_000;

/// Default longest orbit a height run may compute.
pub const ORBIT_BUDGET: u64 = 1 << 21;

/// Extract up to `depth` heights. `cap(level)` bounds the height at each
/// level; hitting it ends the run with `Capped` (used by tuning, where a
/// height above target+1 already decides the comparison). `stop_after`
/// ends the run right after the first height that returns true. No orbit
/// point past index `budget` is computed.
pub fn heights<C, S>(orbit: &mut Orbit, depth: usize, budget: u64, cap: C, stop_after: S) -> HeightRun
where
    C: Fn(usize) -> u64,
    S: Fn(usize, u64) -> bool,
{
    let prec = orbit.spec().prec();
    let resolve = pow2(prec, -(prec as i32) / 2);
    let stall = pow2(prec, 20 - prec as i32);
    let (mut qa, mut pa, mut qb, mut pb) = (1u64, 0i64, 0u64, 1i64);
    let mut out = HeightRun { heights: Vec::new(), pairs: Vec::new(), stop: HeightStop::Depth };
    for level in 0..depth {
        out.pairs.push((qa, pa, qb, pb));
        let e0 = orbit.residual(qa, pa);
        // an exact return up to accumulated rounding means a periodic orbit,
        // as long as that rounding is itself below the resolvable scale
        let noise = Float::with_val(prec, &stall * qa);
        if e0.is_zero() || e0.clone().abs() <= noise {
            out.stop = if e0.is_zero() || noise < resolve { HeightStop::Infinite } else { HeightStop::PrecisionExhausted };
            return out;
        }
        if e0.clone().abs() < resolve {
            out.stop = HeightStop::PrecisionExhausted;
            return out;
        }
        let s: i32 = if e0.is_sign_positive() { -1 } else { 1 };
        let limit = cap(level).min(HEIGHT_CAP);
        let mut k = 0u64;
        let mut last: Option<Real> = None;
        loop {
            let idx = qb + (k + 1) * qa;
            if idx > budget {
                out.stop = HeightStop::Budget;
                return out;
            }
            let p = pb + (k as i64 + 1) * pa;
            let v = orbit.residual(idx, p) * s;
            if v.is_sign_negative() && !v.is_zero() {
                break;
            }
            if let Some(prev) = &last {
                if Float::with_val(prec, prev - &v).abs() < stall {
                    out.stop = HeightStop::Infinite;
                    return out;
                }
            }
            last = Some(v);
            k += 1;
            if k >= limit {
                out.heights.push(k);
                out.stop = if limit >= HEIGHT_CAP { HeightStop::Infinite } else { HeightStop::Capped };
                return out;
            }
        }
        out.heights.push(k);
        if stop_after(level, k) {
            out.stop = HeightStop::Stopped;
            return out;
        }
        (qa, pa, qb, pb) = (qb + k * qa, pb + k as i64 * pa, qa, pa);
    }
    out
}
