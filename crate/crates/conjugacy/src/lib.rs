//! Topological conjugacy between two circle maps with the same rotation
//! number, represented on the endpoints of matching dynamical partitions,
//! and oscillation diagnostics for its derivative.
//!
//! h is known exactly on the orbit of 0: h(F^i(0)) = G^i(0). Nothing is
//! interpolated except the one critical-point residual.

use std::io::Write;

use circlemap::CircleMapSpec;
use numerics::{frac, linear_fit, to_decimal, FitResult, Real};
use partition::{closest_returns_on, partition_from, BaseOrbit, IntervalKind, PartitionError, ReturnTimes};
use rug::Float;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConjugacyError {
    #[error("rotation numbers differ at partial quotient {index}")]
    RotationNumberMismatch { index: usize },
    #[error("knots are not order preserving at level {level}")]
    NotMonotone { level: usize },
    #[error("tables are not consecutive levels of one pair")]
    LevelMismatch,
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Numerics(#[from] numerics::NumericsError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

/// h(x) = y on the circle, x = {F^i(0)}, y = {G^i(0)}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Knot {
    pub index: u64,
    pub x: Real,
    pub y: Real,
}

/// A partition interval of f and its image under h, an interval of g.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalRatio {
    pub kind: IntervalKind,
    pub index: u64,
    pub len_f: Real,
    pub len_g: Real,
    /// |h(I)|/|I|.
    pub ratio: Real,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConjugacyTable {
    pub level: usize,
    /// Circle order from x = 0.
    pub knots: Vec<Knot>,
    /// Circle order of f's partition; entry k starts at knots[k].
    pub ratios: Vec<IntervalRatio>,
    /// Circle distance |h(c_f) − c_g| between the second critical points,
    /// h interpolated linearly between knots. None unless both maps are
    /// bi-critical.
    pub critical_residual: Option<Real>,
}

/// a_0 = q_1, a_k = (q_{k+1} − q_{k−1})/q_k.
fn quotients(rt: &ReturnTimes) -> Vec<u64> {
    let mut a = vec![rt.q[1]];
    for k in 1..rt.q.len() - 1 {
        a.push((rt.q[k + 1] - rt.q[k - 1]) / rt.q[k]);
    }
    a
}

fn circle_dist(a: &Real, b: &Real) -> Real {
    let d = frac(&Float::with_val(a.prec(), a - b));
    let e = Float::with_val(a.prec(), 1u32 - &d);
    d.min(&e)
}

/// h at t by linear interpolation between the knots around it.
fn interpolate(knots: &[Knot], t: &Real) -> Real {
    let prec = t.prec();
    let t = frac(t);
    let k = knots.partition_point(|k| k.x <= t) - 1;
    let a = &knots[k];
    let (bx, by) = match knots.get(k + 1) {
        Some(b) => (b.x.clone(), b.y.clone()),
        None => (Float::with_val(prec, &knots[0].x + 1u32), Float::with_val(prec, &knots[0].y + 1u32)),
    };
    let s = Float::with_val(prec, &t - &a.x) / Float::with_val(prec, &bx - &a.x);
    frac(&(Float::with_val(prec, &by - &a.y) * s + &a.y))
}

pub fn build_conjugacy(f: &CircleMapSpec, g: &CircleMapSpec, n: usize) -> Result<ConjugacyTable, ConjugacyError> {
    let prec = f.prec();
    let mut of = BaseOrbit::new(f, &f.zero());
    let mut og = BaseOrbit::new(g, &g.zero());
    let rf = closest_returns_on(&mut of, n + 1)?;
    let rg = closest_returns_on(&mut og, n + 1)?;
    if let Some(index) = quotients(&rf).iter().zip(quotients(&rg)).position(|(a, b)| *a != b) {
        return Err(ConjugacyError::RotationNumberMismatch { index });
    }
    let pf = partition_from(&mut of, &rf, n);
    let pg = partition_from(&mut og, &rg, n);
    let count = pf.q_n + pf.q_next;
    let mut knots: Vec<Knot> = (0..count)
        .map(|i| Knot { index: i, x: frac(of.at(i)), y: frac(og.at(i)) })
        .collect();
    knots.sort_by(|a, b| a.x.partial_cmp(&b.x).expect("finite orbit"));
    if knots.windows(2).any(|w| w[0].y >= w[1].y) {
        return Err(ConjugacyError::NotMonotone { level: n });
    }
    let pair = |a: &partition::PartitionInterval, b: &partition::PartitionInterval| {
        let (len_f, len_g) = (a.length(), b.length());
        IntervalRatio { kind: a.kind, index: a.index, ratio: Float::with_val(prec, &len_g / &len_f), len_f, len_g }
    };
    let mut ratios: Vec<(Real, IntervalRatio)> = pf
        .long_intervals
        .iter()
        .zip(&pg.long_intervals)
        .chain(pf.short_intervals.iter().zip(&pg.short_intervals))
        .map(|(a, b)| (a.left.clone(), pair(a, b)))
        .collect();
    ratios.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite endpoints"));
    let cf = f.sorted_critical_points();
    let cg = g.sorted_critical_points();
    let critical_residual = (cf.len() == 2 && cg.len() == 2).then(|| circle_dist(&interpolate(&knots, &cf[1].0), &cg[1].0));
    Ok(ConjugacyTable { level: n, knots, ratios: ratios.into_iter().map(|r| r.1).collect(), critical_residual })
}

impl ConjugacyTable {
    /// Rows level, knot index, x, y, ratio of the interval starting there.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), ConjugacyError> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["level", "knot", "x", "y", "ratio"])?;
        for (k, r) in self.knots.iter().zip(&self.ratios) {
            out.write_record([
                self.level.to_string(),
                k.index.to_string(),
                to_decimal(&k.x),
                to_decimal(&k.y),
                to_decimal(&r.ratio),
            ])?;
        }
        out.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    /// Largest jump of log(|h(I)|/|I|) between circle-adjacent intervals.
    pub fn oscillation(&self) -> Real {
        let logs: Vec<Real> = self.ratios.iter().map(|r| r.ratio.clone().ln()).collect();
        let mut worst = Float::new(logs[0].prec());
        for k in 0..logs.len() {
            let next = &logs[(k + 1) % logs.len()];
            worst = worst.max(&Float::with_val(next.prec(), next - &logs[k]).abs());
        }
        worst
    }

    /// max − min of log(|h(I)|/|I|) over the whole partition.
    pub fn spread(&self) -> Real {
        let logs: Vec<Real> = self.ratios.iter().map(|r| r.ratio.clone().ln()).collect();
        let hi = logs.iter().max_by(|a, b| a.partial_cmp(b).unwrap()).unwrap();
        let lo = logs.iter().min_by(|a, b| a.partial_cmp(b).unwrap()).unwrap();
        Float::with_val(hi.prec(), hi - lo)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RigidityReport {
    pub levels: Vec<usize>,
    /// Adjacent-interval oscillation of the log-derivative proxy.
    pub osc: Vec<Real>,
    /// Global max − min of the same proxy.
    pub spread: Vec<Real>,
    /// osc against the level; absent for identical maps.
    pub fit: Option<FitResult>,
    pub identical: bool,
    /// Fitted slope < 0.
    pub smooth: bool,
}

pub fn derivative_diagnostics(tables: &[ConjugacyTable]) -> Result<RigidityReport, ConjugacyError> {
    if tables.is_empty() || tables.windows(2).any(|w| w[1].level != w[0].level + 1) {
        return Err(ConjugacyError::LevelMismatch);
    }
    let prec = tables[0].knots[0].x.prec();
    let levels: Vec<usize> = tables.iter().map(|t| t.level).collect();
    let osc: Vec<Real> = tables.iter().map(ConjugacyTable::oscillation).collect();
    let spread = tables.iter().map(ConjugacyTable::spread).collect();
    let identical = osc.iter().all(|o| o.is_zero());
    let fit = if identical || tables.len() < 2 {
        None
    } else {
        let xs: Vec<Real> = levels.iter().map(|&l| Float::with_val(prec, l)).collect();
        Some(linear_fit(&xs, &osc)?)
    };
    let smooth = fit.as_ref().is_some_and(|f| f.slope.is_sign_negative() && !f.slope.is_zero());
    Ok(RigidityReport { levels, osc, spread, fit, identical, smooth })
}

impl RigidityReport {
    pub fn summary(&self) -> String {
        match &self.fit {
            Some(f) => format!(
                "osc slope={:.6e} intercept={:.6e} r2={:.4} smooth={}",
                f.slope.to_f64(),
                f.intercept.to_f64(),
                f.r_squared.to_f64(),
                self.smooth
            ),
            None if self.identical => "identical maps: osc = 0 at every level".to_string(),
            None => "too few levels to fit".to_string(),
        }
    }
}
