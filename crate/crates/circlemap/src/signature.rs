use cfrac::ContinuedFraction;
use numerics::{frac, pow2, Real};
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::orbit::{heights, HeightStop, Orbit};
use crate::rotation::{tune, TuneReport};
use crate::spec::CircleMapSpec;
use crate::CircleMapError;

/// (ρ; N; d_0..; δ_0..) with δ_i the invariant measure of [c_i, c_{i+1}).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Signature {
    pub rho: Real,
    pub n: usize,
    pub criticalities: Vec<u32>,
    pub deltas: Vec<Real>,
    /// Heuristic error 3 log(L)/L of the visit frequencies.
    pub error: Real,
}

/// Longest prefix the orbit supports, as an approximation to ρ.
fn rho_estimate(spec: &CircleMapSpec, orbit_len: usize) -> Result<Real, CircleMapError> {
    let mut orbit = Orbit::new(spec);
    let run = heights(&mut orbit, 64, orbit_len as u64, |_| u64::MAX, |_, _| false);
    if run.stop == HeightStop::Infinite {
        return Err(CircleMapError::RationalRotationNumber);
    }
    Ok(ContinuedFraction::new(run.heights).value_real(spec.prec()))
}

/// Critical points in circle order starting from the marked one at 0.
fn circle_order(spec: &CircleMapSpec) -> Vec<(Real, u32)> {
    spec.sorted_critical_points()
}

/// Signature from visit frequencies of the orbit of 0.
pub fn signature(spec: &CircleMapSpec, orbit_len: usize) -> Result<Signature, CircleMapError> {
    let prec = spec.prec();
    let crit = circle_order(spec);
    let n = crit.len();
    if n == 0 {
        let rho = rho_estimate(spec, orbit_len)?;
        return Ok(Signature { rho, n, criticalities: vec![], deltas: vec![], error: Float::new(prec) });
    }
    let rho = rho_estimate(spec, orbit_len)?;
    let mut counts = vec![0usize; n];
    let mut x = Float::new(prec);
    for _ in 0..orbit_len {
        let t = frac(&x);
        // count of critical points ≤ t, minus one, wrapping to the last gap
        let k = crit.iter().filter(|(c, _)| *c <= t).count();
        counts[(k + n - 1) % n] += 1;
        x = spec.lift(&x);
    }
    let deltas = counts.iter().map(|&c| Float::with_val(prec, c) / orbit_len as u32).collect();
    let l = Float::with_val(prec, orbit_len);
    let error = Float::with_val(prec, l.ln_ref()) * 3u32 / &l;
    Ok(Signature { rho, n, criticalities: crit.into_iter().map(|(_, d)| d).collect(), deltas, error })
}

/// δ_0 = h(c_1) where h conjugates F to R_ρ with h(0)=0: h is known exactly
/// on the orbit of 0 (h(F^i(0)) = {iρ}), and interpolated linearly between
/// the two orbit points that bracket c_1. Exact when c_1 is an orbit point.
/// `rho` must be accurate to well below 1/orbit_len², otherwise the values
/// {iρ} stop being monotone along the circle and an error is returned.
pub fn delta0_by_partition(spec: &CircleMapSpec, rho: &Real, orbit_len: usize) -> Result<Real, CircleMapError> {
    let prec = spec.prec();
    let crit = circle_order(spec);
    if crit.len() < 2 {
        return Ok(Float::with_val(prec, 1));
    }
    let c1 = &crit[1].0;
    let mut below: (Real, Real) = (Float::new(prec), Float::new(prec));
    let mut above: (Real, Real) = (Float::with_val(prec, 1), Float::with_val(prec, 1));
    let mut x = Float::new(prec);
    for i in 0..orbit_len {
        let t = frac(&x);
        if t <= *c1 && t >= below.0 {
            if t == *c1 {
                return Ok(frac(&Float::with_val(prec, rho * i as u64)));
            }
            below = (t.clone(), frac(&Float::with_val(prec, rho * i as u64)));
        } else if t > *c1 && t < above.0 {
            above = (t, frac(&Float::with_val(prec, rho * i as u64)));
        }
        x = spec.lift(&x);
    }
    let (xl, hl) = below;
    // with no orbit point above c_1 the bracket closes at 1 ≡ 0, where h = 1
    let (xu, hu) = above;
    if hu < hl {
        return Err(CircleMapError::TargetUnattainable(format!(
            "ρ is too coarse for an orbit of length {orbit_len}"
        )));
    }
    let w = Float::with_val(prec, c1 - &xl) / Float::with_val(prec, &xu - &xl);
    Ok(Float::with_val(prec, &hu - &hl) * w + hl)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchedMap {
    pub beta: Real,
    pub delta0: Real,
    pub tune: TuneReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchReport {
    pub f: MatchedMap,
    pub g: MatchedMap,
}

/// Parameters of the nested (β outer, ω inner) solve.
#[derive(Clone, Debug)]
pub struct MatchConfig {
    pub depth: usize,
    pub tol: Real,
    /// Orbit length of the δ_0 estimator.
    pub orbit_len: usize,
    pub max_iter: usize,
}

fn match_one<B>(
    builder: &B,
    bracket: (&Real, &Real),
    rho: &ContinuedFraction,
    delta0: &Real,
    cfg: &MatchConfig,
) -> Result<MatchedMap, CircleMapError>
where
    B: Fn(&Real, &Real) -> Result<CircleMapSpec, CircleMapError>,
{
    let prec = cfg.tol.prec();
    let rho_val = rho.value_real(prec);
    let eval = |beta: &Real| -> Result<(Real, TuneReport), CircleMapError> {
        let t = tune(|w: &Real| builder(beta, w), rho, cfg.depth, &cfg.tol)?;
        let d = delta0_by_partition(&t.spec, &rho_val, cfg.orbit_len)?;
        Ok((d - delta0, t))
    };
    let (mut a, mut b) = (bracket.0.clone(), bracket.1.clone());
    let (mut fa, ta) = eval(&a)?;
    let (mut fb, tb) = eval(&b)?;
    for (x, fx, t) in [(&a, &fa, &ta), (&b, &fb, &tb)] {
        if fx.clone().abs() <= cfg.tol {
            return Ok(MatchedMap { beta: x.clone(), delta0: Float::with_val(prec, fx + delta0), tune: t.clone() });
        }
    }
    if fa.is_sign_positive() == fb.is_sign_positive() {
        return Err(CircleMapError::TargetUnattainable(format!(
            "δ₀ target {} not bracketed by β ∈ [{}, {}]",
            delta0.to_f64(),
            a.to_f64(),
            b.to_f64()
        )));
    }
    let floor = pow2(prec, 16 - prec as i32);
    // Illinois variant of regula falsi
    let mut side = 0i32;
    for _ in 0..cfg.max_iter {
        let c = Float::with_val(prec, &a * &fb - Float::with_val(prec, &b * &fa)) / Float::with_val(prec, &fb - &fa);
        let (fc, tc) = eval(&c)?;
        if fc.clone().abs() <= cfg.tol || Float::with_val(prec, &b - &a).abs() < floor {
            return Ok(MatchedMap { beta: c, delta0: Float::with_val(prec, &fc + delta0), tune: tc });
        }
        if fc.is_sign_positive() == fb.is_sign_positive() {
            b = c;
            fb = fc;
            if side == -1 {
                fa /= 2u32;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb /= 2u32;
            }
            side = 1;
        }
    }
    Err(CircleMapError::TargetUnattainable(format!("δ₀ solve did not converge in {} steps", cfg.max_iter)))
}

/// Tune two families to a common signature (ρ, δ_0): β is solved for δ_0
/// by regula falsi, with ω re-tuned for ρ at every β.
pub fn match_signature<F, G>(
    f_builder: F,
    f_bracket: (&Real, &Real),
    g_builder: G,
    g_bracket: (&Real, &Real),
    target_rho: &ContinuedFraction,
    target_delta0: &Real,
    cfg: &MatchConfig,
) -> Result<MatchReport, CircleMapError>
where
    F: Fn(&Real, &Real) -> Result<CircleMapSpec, CircleMapError>,
    G: Fn(&Real, &Real) -> Result<CircleMapSpec, CircleMapError>,
{
    let f = match_one(&f_builder, f_bracket, target_rho, target_delta0, cfg)?;
    let g = match_one(&g_builder, g_bracket, target_rho, target_delta0, cfg)?;
    Ok(MatchReport { f, g })
}
