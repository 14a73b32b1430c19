use std::io::Write;

use circlemap::CircleMapSpec;
use numerics::{default_tol, frac, newton_root_guarded, pow2, upper_envelope_fit, Cx, NewtonOptions, NumericsError, Real};
use partition::{closest_returns_on, BaseOrbit, PartitionError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::geometry::{angle_to_interval, Interval};
use crate::CxError;

const NEWTON_ITER: usize = 60;
/// Guard disk radius around J_{-(k+1)}, in units of |J_{-(k+1)}|.
const GUARD: u32 = 8;
/// Continuation gives up once a sub-step is shorter than 2^-MAX_HALVINGS.
const MAX_HALVINGS: u32 = 8;
/// Largest admissible fraction of lost samples.
const MAX_LOST: f64 = 0.1;
const ANGULAR_STRATA: usize = 8;

fn level_error(e: PartitionError) -> CxError {
    match e {
        PartitionError::PrecisionExhausted { level } => CxError::PrecisionExhausted { level },
        PartitionError::RationalRotationNumber => CxError::RationalRotationNumber,
        other => CxError::Partition(other.to_string()),
    }
}

/// The backward J-orbit of level n on the lift:
/// J_{-k} = F^{q_{n+1}-k}(I_n) − p_{n+1} for k = 0..q_{n+1}−1, so F maps
/// J_{-(k+1)} onto J_{-k} exactly and J_0 sits next to 0.
#[derive(Clone, Debug)]
pub struct JOrbit<'a> {
    spec: &'a CircleMapSpec,
    pub n: usize,
    pub q_n: u64,
    pub q_next: u64,
    /// I_n = [0, F^{q_n}(0) − p_n] sorted.
    pub i_n: Interval,
    /// J_0, J_{-1}, ..., J_{-(q_{n+1}-1)} = f(I_n).
    pub j: Vec<Interval>,
}

impl<'a> JOrbit<'a> {
    pub fn new(spec: &'a CircleMapSpec, n: usize) -> Result<Self, CxError> {
        let prec = spec.prec();
        let mut orbit = BaseOrbit::new(spec, &spec.zero());
        let rt = closest_returns_on(&mut orbit, n + 1).map_err(level_error)?;
        let (q_n, p_n, q1, p1) = (rt.q[n], rt.p[n], rt.q[n + 1], rt.p[n + 1]);
        let i_n = Interval::spanned(&spec.zero(), &rt.residual[n]);
        let mut j = Vec::with_capacity(q1 as usize);
        for k in 0..q1 {
            let i = q1 - k;
            let a = Float::with_val(prec, orbit.at(i) - p1);
            let b = Float::with_val(prec, orbit.at(q_n + i) - (p_n + p1));
            j.push(Interval::spanned(&a, &b));
        }
        Ok(JOrbit { spec, n, q_n, q_next: q1, i_n, j })
    }

    pub fn spec(&self) -> &CircleMapSpec {
        self.spec
    }

    /// f(I_n) on the lift, the last interval of the orbit.
    pub fn f_i_n(&self) -> &Interval {
        self.j.last().unwrap()
    }

    /// Follows a univalent inverse branch along the J-orbit from z near J_0.
    pub fn pull_back(&self, z: &Cx) -> Result<InverseOrbit, CxError> {
        let spec = self.spec;
        let prec = spec.prec();
        let mut zs = vec![z.clone()];
        for k in 0..self.j.len() - 1 {
            let cur = zs.last().unwrap();
            let (now, next) = (&self.j[k], &self.j[k + 1]);
            let w = if cur.is_real() && now.contains(&cur.re) {
                // real dynamics: the inverse of an increasing map
                Cx::from_real(&spec.lift_inv_in(&cur.re, &next.lo, &next.hi))
            } else {
                track(spec, cur, now, next).map_err(|e| match e {
                    NumericsError::Escaped { .. } => CxError::BranchLost { step: k + 1 },
                    e => CxError::Numerics(e),
                })?
            };
            zs.push(w);
        }
        let mut ratios = Vec::with_capacity(zs.len());
        let mut angles = Vec::with_capacity(zs.len());
        for (w, jk) in zs.iter().zip(&self.j) {
            ratios.push(Float::with_val(prec, jk.dist(w) / jk.len()));
            angles.push(angle_to_interval(w, jk)?);
        }
        Ok(InverseOrbit { z_points: zs, j_intervals: self.j.clone(), ratios, angles })
    }
}

/// Solves F(w) = target near `next` by continuation from the real preimage
/// of the projection of `target` onto `now`.
fn track(spec: &CircleMapSpec, target: &Cx, now: &Interval, next: &Interval) -> Result<Cx, NumericsError> {
    let prec = spec.prec();
    let len = next.len();
    let margin = Float::with_val(prec, &len / 100u32);
    let y = now.clamp(&target.re);
    let seed = spec.lift_inv_in(&y, &next.lo, &next.hi);
    let seed = Interval {
        lo: Float::with_val(prec, &next.lo + &margin),
        hi: Float::with_val(prec, &next.hi - &margin),
    }
    .clamp(&seed);
    // the seed's own image is the start of the target path
    let start = Cx::from_real(&spec.lift(&seed));
    let guard = Float::with_val(prec, &len * GUARD);
    let opts = NewtonOptions { tol: default_tol(prec), max_iter: NEWTON_ITER, max_step: Some(guard.clone()) };
    let keep = |w: &Cx| next.dist(w) <= guard;
    let delta = target - &start;
    let min_h = pow2(prec, -(MAX_HALVINGS as i32));
    let mut w = Cx::from_real(&seed);
    let mut s = Float::with_val(prec, 0);
    let mut h = Float::with_val(prec, 1);
    loop {
        let t_next = Float::with_val(prec, &s + &h);
        let t = if t_next >= 1 { Float::with_val(prec, 1) } else { t_next };
        let goal = &start + &delta.scale(&t);
        let g = |v: &Cx| {
            let (fv, dv) = spec.lift_cx_d(v);
            (&fv - &goal, dv)
        };
        match newton_root_guarded(g, &w, &opts, keep) {
            Ok(v) => {
                w = v;
                if t >= 1 {
                    return Ok(w);
                }
                s = t;
                h *= 2u32;
            }
            Err(e) => {
                h /= 2u32;
                if h < min_h {
                    return Err(e);
                }
            }
        }
    }
}

pub fn pull_back(spec: &CircleMapSpec, n: usize, z: &Cx) -> Result<InverseOrbit, CxError> {
    JOrbit::new(spec, n)?.pull_back(z)
}

/// z_0 = z, z_{-1}, ..., z_{-(q_{n+1}-1)} with f(z_{-(k+1)}) = z_{-k}.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InverseOrbit {
    pub z_points: Vec<Cx>,
    pub j_intervals: Vec<Interval>,
    /// dist(z_{-k}, J_{-k}) / |J_{-k}|.
    pub ratios: Vec<Real>,
    pub angles: Vec<Real>,
}

impl InverseOrbit {
    /// max_k |F(z_{-(k+1)}) − z_{-k}|.
    pub fn step_residual(&self, spec: &CircleMapSpec) -> Real {
        let mut worst = Float::with_val(spec.prec(), 0);
        for w in self.z_points.windows(2) {
            let r = (&spec.lift_cx(&w[1]) - &w[0]).abs();
            worst = worst.max(&r);
        }
        worst
    }

    /// |F^{q_{n+1}-1}(z_last) − z_0|.
    pub fn recomposition_error(&self, spec: &CircleMapSpec) -> Real {
        let mut w = self.z_points.last().unwrap().clone();
        for _ in 1..self.z_points.len() {
            w = spec.lift_cx(&w);
        }
        (&w - &self.z_points[0]).abs()
    }

    pub fn min_angle(&self) -> Real {
        self.angles.iter().min_by(|a, b| a.partial_cmp(b).unwrap()).unwrap().clone()
    }
}

/// H_m = [F^{q_{m+1}}(0) − p_{m+1}, F^{q_m − q_{m+1}}(0) + p_{m+1} − p_m] on the lift.
pub fn h_interval(spec: &CircleMapSpec, m: usize) -> Result<Interval, CxError> {
    let prec = spec.prec();
    let mut orbit = BaseOrbit::new(spec, &spec.zero());
    let rt = closest_returns_on(&mut orbit, m + 1).map_err(level_error)?;
    let (q0, p0, q1, p1) = (rt.q[m], rt.p[m], rt.q[m + 1], rt.p[m + 1]);
    let a = Float::with_val(prec, orbit.at(q1) - p1);
    let shift = p1 - p0;
    let b = if q0 >= q1 {
        Float::with_val(prec, orbit.at(q0 - q1) + shift)
    } else {
        let mut x = Float::with_val(prec, shift);
        for _ in 0..q1 - q0 {
            x = spec.lift_inv(&x);
        }
        x
    };
    Ok(Interval::spanned(&a, &b))
}

/// Level m from which I_m(0) ∪ I_{m+1}(0) holds no other critical point,
/// plus 2. Maps with a single critical point (or none) get 2.
pub fn default_anchor(spec: &CircleMapSpec, max_level: usize) -> Result<usize, CxError> {
    let prec = spec.prec();
    let zero = spec.zero();
    let others: Vec<Real> = spec
        .critical_points()
        .into_iter()
        .map(|c| frac(&c))
        .filter(|c| {
            let far = pow2(prec, -(prec as i32) / 4);
            *c > far && Float::with_val(prec, 1u32 - c) > far
        })
        .collect();
    if others.is_empty() {
        return Ok(2);
    }
    let rt = closest_returns_on(&mut BaseOrbit::new(spec, &zero), max_level + 1).map_err(level_error)?;
    for m in 0..=max_level {
        let span = Interval::spanned(&rt.residual[m], &rt.residual[m + 1]);
        let hit = others.iter().any(|c| {
            let below = Float::with_val(prec, c - 1u32);
            (span.lo < *c && *c < span.hi) || (span.lo < below && below < span.hi)
        });
        if !hit {
            return Ok(m + 2);
        }
    }
    Err(CxError::PrecisionExhausted { level: max_level })
}

/// Sample points of Ω_{n,M}: the upper half of D_{n−M} in angular × radial
/// strata, then real points of J_0.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProbeDomain {
    pub n: usize,
    pub anchor: usize,
    pub h: Interval,
    pub j0: Interval,
    pub samples: Vec<Cx>,
}

impl ProbeDomain {
    /// `seed` jitters each sample inside its stratum; `None` takes centers.
    pub fn new(level: &JOrbit, anchor: usize, n_samples: usize, seed: Option<u64>) -> Result<Self, CxError> {
        let spec = level.spec;
        let prec = spec.prec();
        if anchor > level.n {
            return Err(CxError::AnchorTooDeep { n: level.n, anchor });
        }
        let h = h_interval(spec, level.n - anchor)?;
        let j0 = level.j[0].clone();
        let radial = (n_samples / (ANGULAR_STRATA + 1)).max(1);
        let mut rng = seed.map(ChaCha8Rng::seed_from_u64);
        let mut offset = || match rng.as_mut() {
            Some(r) => r.gen_range(0.05..0.95),
            None => 0.5,
        };
        let (ctr, rad) = (h.mid(), Float::with_val(prec, h.len() / 2u32));
        let pi = numerics::pi(prec);
        let mut samples = Vec::with_capacity((ANGULAR_STRATA + 1) * radial);
        for ia in 0..ANGULAR_STRATA {
            for ir in 0..radial {
                let th = Float::with_val(prec, &pi * (ia as f64 + offset())) / ANGULAR_STRATA as u32;
                let r = Float::with_val(prec, &rad * (ir as f64 + offset())) / radial as u32;
                let (s, c) = th.sin_cos(Float::new(prec));
                samples.push(Cx::new(Float::with_val(prec, &ctr + &r * c), Float::with_val(prec, &r * s)));
            }
        }
        let len = j0.len();
        for ir in 0..radial {
            let t = Float::with_val(prec, &len * (ir as f64 + offset())) / radial as u32;
            samples.push(Cx::from_real(&Float::with_val(prec, &j0.lo + t)));
        }
        Ok(ProbeDomain { n: level.n, anchor, h, j0, samples })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SampleStatus {
    Ok,
    BranchLost,
    NoConvergence,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProbeSample {
    pub id: usize,
    pub z: Cx,
    /// dist(z, J_0)/|J_0|.
    pub input: Option<Real>,
    /// dist(z_{-(q_{n+1}-1)}, f(I_n))/|f(I_n)|.
    pub output: Option<Real>,
    pub min_angle: Option<Real>,
    pub status: SampleStatus,
}

/// Least line y = B1·x + B2 over the (input, output) ratios of the probe.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EnvelopeReport {
    pub n: usize,
    pub anchor: usize,
    pub b1: Real,
    pub b2: Real,
    pub per_sample: Vec<ProbeSample>,
    pub violations: usize,
    pub lost: usize,
}

impl EnvelopeReport {
    pub fn lost_fraction(&self) -> f64 {
        self.lost as f64 / self.per_sample.len() as f64
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), CxError> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["id", "re", "im", "input", "output", "min_angle", "status"])?;
        let show = |v: &Option<Real>| v.as_ref().map(numerics::to_decimal).unwrap_or_default();
        for s in &self.per_sample {
            out.write_record([
                s.id.to_string(),
                numerics::to_decimal(&s.z.re),
                numerics::to_decimal(&s.z.im),
                show(&s.input),
                show(&s.output),
                show(&s.min_angle),
                format!("{:?}", s.status),
            ])?;
        }
        out.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn summary(&self) -> String {
        format!(
            "n={} M={} B1={:.6e} B2={:.6e} violations={} lost={}/{}",
            self.n,
            self.anchor,
            self.b1.to_f64(),
            self.b2.to_f64(),
            self.violations,
            self.lost,
            self.per_sample.len()
        )
    }
}

pub fn main_lemma_probe(spec: &CircleMapSpec, n: usize, anchor: usize, n_samples: usize) -> Result<EnvelopeReport, CxError> {
    main_lemma_probe_seeded(spec, n, anchor, n_samples, None)
}

pub fn main_lemma_probe_seeded(
    spec: &CircleMapSpec,
    n: usize,
    anchor: usize,
    n_samples: usize,
    seed: Option<u64>,
) -> Result<EnvelopeReport, CxError> {
    if n_samples < ANGULAR_STRATA {
        return Err(CxError::TooFewSamples(n_samples));
    }
    let prec = spec.prec();
    let level = JOrbit::new(spec, n)?;
    if level.q_next < 2 {
        return Err(CxError::AnchorTooDeep { n, anchor });
    }
    let domain = ProbeDomain::new(&level, anchor, n_samples, seed)?;
    let target = level.f_i_n().clone();
    let per_sample: Vec<ProbeSample> = domain
        .samples
        .par_iter()
        .enumerate()
        .map(|(id, z)| {
            let input = Some(Float::with_val(prec, domain.j0.dist(z) / domain.j0.len()));
            match level.pull_back(z) {
                Ok(orbit) => {
                    let last = orbit.z_points.last().unwrap();
                    ProbeSample {
                        id,
                        z: z.clone(),
                        input,
                        output: Some(Float::with_val(prec, target.dist(last) / target.len())),
                        min_angle: Some(orbit.min_angle()),
                        status: SampleStatus::Ok,
                    }
                }
                Err(e) => ProbeSample {
                    id,
                    z: z.clone(),
                    input,
                    output: None,
                    min_angle: None,
                    status: if matches!(e, CxError::BranchLost { .. }) {
                        SampleStatus::BranchLost
                    } else {
                        SampleStatus::NoConvergence
                    },
                },
            }
        })
        .collect();
    let lost = per_sample.iter().filter(|s| s.status != SampleStatus::Ok).count();
    if lost as f64 > MAX_LOST * per_sample.len() as f64 {
        return Err(CxError::TooManyBranchFailures { lost, total: per_sample.len() });
    }
    let (xs, ys): (Vec<Real>, Vec<Real>) = per_sample
        .iter()
        .filter_map(|s| Some((s.input.clone()?, s.output.clone()?)))
        .unzip();
    let fit = upper_envelope_fit(&xs, &ys)?;
    let slack = pow2(prec, 20 - prec as i32);
    let violations = xs
        .iter()
        .zip(&ys)
        .filter(|(x, y)| {
            let line = Float::with_val(prec, &fit.slope * *x) + &fit.intercept;
            **y > line + Float::with_val(prec, &slack * (1u32 + Float::with_val(prec, y.abs_ref())))
        })
        .count();
    Ok(EnvelopeReport { n, anchor, b1: fit.slope, b2: fit.intercept, per_sample, violations, lost })
}
