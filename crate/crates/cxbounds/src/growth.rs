use numerics::{lower_envelope_fit, Cx, FitResult, Real};
use renorm::NormalizedPair;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::geometry::Interval;
use crate::CxError;

/// Path steps per ray when deciding membership in the domain of a branch.
const RAY_STEPS: usize = 64;
const MIN_SAMPLES: usize = 4;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LevelGrowth {
    pub level: i64,
    pub fit: FitResult,
    pub samples: usize,
}

/// Lower envelope |R^n f(z)| ≥ c|z|^d + b, pooled and per level.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GrowthReport {
    pub d: u32,
    pub pooled: FitResult,
    pub per_level: Vec<LevelGrowth>,
    /// c > 0 at every level.
    pub success: bool,
}

impl GrowthReport {
    pub fn c(&self) -> &Real {
        &self.pooled.slope
    }

    pub fn b(&self) -> &Real {
        &self.pooled.intercept
    }
}

/// Walks the ray from 0 towards `end`, keeping the image inside |w| < r and
/// letting it cross ℝ only through `gate`. Returns the image at each of the
/// `marks` (fractions of RAY_STEPS) reached before the walk leaves the domain.
fn walk<E>(eval: E, end: &Cx, r: &Real, gate: &Interval, marks: &[usize]) -> Vec<Option<Real>>
where
    E: Fn(&Cx) -> Cx,
{
    let prec = end.prec();
    let mut out = vec![None; marks.len()];
    let mut prev = eval(&Cx::zero(prec));
    for k in 1..=RAY_STEPS {
        let z = end.scale(&Float::with_val(prec, k as f64 / RAY_STEPS as f64));
        let w = eval(&z);
        if !w.is_finite() || w.abs() >= *r {
            break;
        }
        let crossed = k > 1 && (prev.im.is_sign_positive() != w.im.is_sign_positive() || w.im.is_zero());
        if crossed {
            // where the chord prev → w meets ℝ
            let dim = Float::with_val(prec, &prev.im - &w.im);
            let x = if dim.is_zero() {
                w.re.clone()
            } else {
                let t = Float::with_val(prec, &prev.im / &dim);
                Float::with_val(prec, &prev.re + t * Float::with_val(prec, &w.re - &prev.re))
            };
            if !gate.contains(&x) {
                break;
            }
        }
        for (slot, &m) in out.iter_mut().zip(marks) {
            if m == k {
                *slot = Some(w.abs());
            }
        }
        prev = w;
    }
    out
}

/// Samples z = radius·(i/radial)·e^{iπj/(rays+1)} in the upper half disk; a
/// sample counts for η (ξ) when the path from 0 to z stays in the branch
/// domain over {|w| < radius} ∩ ℂ_{η(I_η)} (ℂ_{ξ(I_ξ)}). Real symmetry covers
/// the lower half.
pub fn growth_check(pairs: &[NormalizedPair], radius: &Real, n_samples: usize) -> Result<GrowthReport, CxError> {
    if radius < &1u32 {
        return Err(CxError::RadiusTooSmall(radius.to_f64()));
    }
    let Some(first) = pairs.first() else {
        return Err(CxError::TooFewValidSamples { level: None, found: 0 });
    };
    let d = first.pair.spec.marked_criticality().ok_or(CxError::NotCritical)?;
    let prec = radius.prec();
    let rays = ((n_samples as f64 / 2.0).sqrt().ceil() as usize).max(2);
    let radial = (n_samples / rays).max(2);
    let marks: Vec<usize> = (1..=radial).map(|i| i * RAY_STEPS / radial).collect();
    let pi = numerics::pi(prec);
    let (mut all_x, mut all_y) = (Vec::new(), Vec::new());
    let mut per_level = Vec::new();
    for pair in pairs {
        if pair.pair.spec.marked_criticality() != Some(d) {
            return Err(CxError::NotCritical);
        }
        let xi0 = pair.xi0();
        let one = Float::with_val(prec, -1);
        let eta_gate = Interval::spanned(&pair.eta0(), &pair.eta(&xi0));
        let xi_gate = Interval::spanned(&pair.xi(&one), &xi0);
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        // z = 0 itself
        xs.push(Float::with_val(prec, 0));
        ys.push(pair.eta0().abs());
        xs.push(Float::with_val(prec, 0));
        ys.push(xi0.clone().abs());
        for j in 1..=rays {
            let th = Float::with_val(prec, &pi * j as u32) / (rays as u32 + 1);
            let (s, c) = th.sin_cos(Float::new(prec));
            let end = Cx::new(Float::with_val(prec, radius * c), Float::with_val(prec, radius * s));
            let hits_e = walk(|z| pair.eta_cx(z).0, &end, radius, &eta_gate, &marks);
            let hits_x = walk(|z| pair.xi_cx(z).0, &end, radius, &xi_gate, &marks);
            for (i, &m) in marks.iter().enumerate() {
                let zabs = Float::with_val(prec, radius * m as u32) / RAY_STEPS as u32;
                let zd = Float::with_val(prec, rug::ops::Pow::pow(&zabs, d));
                for v in [&hits_e[i], &hits_x[i]].into_iter().flatten() {
                    xs.push(zd.clone());
                    ys.push(v.clone());
                }
            }
        }
        if xs.len() < MIN_SAMPLES || xs.iter().all(|x| x.is_zero()) {
            return Err(CxError::TooFewValidSamples { level: Some(pair.pair.level), found: xs.len() });
        }
        let fit = lower_envelope_fit(&xs, &ys)?;
        per_level.push(LevelGrowth { level: pair.pair.level, fit, samples: xs.len() });
        all_x.extend(xs);
        all_y.extend(ys);
    }
    let pooled = lower_envelope_fit(&all_x, &all_y)?;
    let success = per_level.iter().all(|l| l.fit.slope.is_sign_positive() && !l.fit.slope.is_zero());
    Ok(GrowthReport { d, pooled, per_level, success })
}
