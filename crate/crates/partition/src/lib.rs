//! Closest returns and the dynamical partitions P_n(x) of a circle map.
//!
//! Everything is computed on the lift from one forward orbit of the base
//! point: I_n(x) = [x, F^{q_n}(x) − p_n] (as an oriented pair, sorted), its
//! iterates F^i(I_n) − (winding), and likewise for I_{n+1}.

use std::io::Write;

use circlemap::CircleMapSpec;
use numerics::{frac, pow2, to_decimal, Real};
use rug::Float;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PartitionError {
    #[error("return distance underflows at level {level}")]
    PrecisionExhausted { level: usize },
    #[error("orbit returns exactly: rational rotation number")]
    RationalRotationNumber,
    #[error("partitions are not at consecutive levels of one base point")]
    LevelsNotConsecutive,
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

/// Longest orbit computed while searching for the next return.
pub const RETURN_BUDGET: u64 = 1 << 21;

/// Forward orbit of a base point on the lift.
#[derive(Clone, Debug)]
pub struct BaseOrbit<'a> {
    spec: &'a CircleMapSpec,
    xs: Vec<Real>,
}

impl<'a> BaseOrbit<'a> {
    pub fn new(spec: &'a CircleMapSpec, x: &Real) -> Self {
        BaseOrbit { spec, xs: vec![Float::with_val(spec.prec(), x)] }
    }

    pub fn at(&mut self, i: u64) -> &Real {
        while self.xs.len() as u64 <= i {
            let y = self.spec.lift(self.xs.last().unwrap());
            self.xs.push(y);
        }
        &self.xs[i as usize]
    }

    /// F^i(x) − x.
    pub fn displacement(&mut self, i: u64) -> Real {
        let x0 = self.xs[0].clone();
        Float::with_val(x0.prec(), self.at(i) - &x0)
    }
}

/// Closest-return times and windings; `residual[n]` = F^{q_n}(x) − x − p_n.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReturnTimes {
    pub q: Vec<u64>,
    pub p: Vec<i64>,
    pub residual: Vec<Real>,
}

impl ReturnTimes {
    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }
}

/// q_0 = 1, p_0 = 0, then q_{n+1} = q_{n-1} + a_n q_n where a_n counts how
/// many q_n-steps from F^{q_{n-1}}(x) stay on the side of x opposite to
/// F^{q_n}(x). This is the order-theoretic closest return: [x, F^{q_n}(x)]
/// holds no earlier iterate. Returns levels 0..=n_max.
pub fn closest_returns_on(orbit: &mut BaseOrbit, n_max: usize) -> Result<ReturnTimes, PartitionError> {
    let prec = orbit.spec.prec();
    let floor_dist = pow2(prec, -(prec as i32) / 2);
    // (q_n, p_n) and (q_{n-1}, p_{n-1}) with q_{-1} = 0, p_{-1} = 1
    let (mut qa, mut pa, mut qb, mut pb) = (1u64, 0i64, 0u64, 1i64);
    let mut rt = ReturnTimes { q: vec![1], p: vec![0], residual: vec![orbit.displacement(1)] };
    for n in 0..n_max {
        let e = rt.residual[n].clone();
        if e.is_zero() {
            return Err(PartitionError::RationalRotationNumber);
        }
        if e.clone().abs() < floor_dist {
            return Err(PartitionError::PrecisionExhausted { level: n });
        }
        let s: i32 = if e.is_sign_positive() { -1 } else { 1 };
        let mut k = 0u64;
        loop {
            let idx = qb + (k + 1) * qa;
            if idx > RETURN_BUDGET {
                return Err(PartitionError::PrecisionExhausted { level: n + 1 });
            }
            let v = (orbit.displacement(idx) - (pb + (k as i64 + 1) * pa)) * s;
            if v.is_sign_negative() && !v.is_zero() {
                break;
            }
            k += 1;
        }
        (qa, pa, qb, pb) = (qb + k * qa, pb + k as i64 * pa, qa, pa);
        let r = Float::with_val(prec, orbit.displacement(qa) - pa);
        rt.q.push(qa);
        rt.p.push(pa);
        rt.residual.push(r);
    }
    Ok(rt)
}

pub fn closest_returns(spec: &CircleMapSpec, x: &Real, n_max: usize) -> Result<ReturnTimes, PartitionError> {
    closest_returns_on(&mut BaseOrbit::new(spec, x), n_max)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum IntervalKind {
    /// F^i(I_n), 0 ≤ i < q_{n+1}.
    Long,
    /// F^j(I_{n+1}), 0 ≤ j < q_n.
    Short,
}

/// [left, right] on the lift with left ∈ [0,1).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionInterval {
    pub kind: IntervalKind,
    pub index: u64,
    pub left: Real,
    pub right: Real,
}

impl PartitionInterval {
    pub fn length(&self) -> Real {
        Float::with_val(self.left.prec(), &self.right - &self.left)
    }

    /// Whether t (mod 1) lies in the interior.
    pub fn contains_interior(&self, t: &Real) -> bool {
        let mut u = frac(t);
        if u <= self.left {
            u += 1u32;
        }
        u > self.left && u < self.right
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DynamicalPartition {
    pub level: usize,
    pub base_point: Real,
    pub q_n: u64,
    pub q_next: u64,
    pub long_intervals: Vec<PartitionInterval>,
    pub short_intervals: Vec<PartitionInterval>,
}

fn image_interval(orbit: &mut BaseOrbit, kind: IntervalKind, i: u64, q: u64, p: i64) -> PartitionInterval {
    let a = orbit.at(i).clone();
    let b = Float::with_val(a.prec(), orbit.at(i + q) - p);
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    let shift = lo.clone().floor();
    PartitionInterval { kind, index: i, left: Float::with_val(lo.prec(), &lo - &shift), right: hi - shift }
}

/// Build P_n from an orbit whose returns are known to level n+1.
pub fn partition_from(orbit: &mut BaseOrbit, rt: &ReturnTimes, n: usize) -> DynamicalPartition {
    let (qn, pn, qm, pm) = (rt.q[n], rt.p[n], rt.q[n + 1], rt.p[n + 1]);
    let long = (0..qm).map(|i| image_interval(orbit, IntervalKind::Long, i, qn, pn)).collect();
    let short = (0..qn).map(|j| image_interval(orbit, IntervalKind::Short, j, qm, pm)).collect();
    DynamicalPartition {
        level: n,
        base_point: orbit.xs[0].clone(),
        q_n: qn,
        q_next: qm,
        long_intervals: long,
        short_intervals: short,
    }
}

pub fn build_partition(spec: &CircleMapSpec, x: &Real, n: usize) -> Result<DynamicalPartition, PartitionError> {
    let mut orbit = BaseOrbit::new(spec, x);
    let rt = closest_returns_on(&mut orbit, n + 1)?;
    Ok(partition_from(&mut orbit, &rt, n))
}

/// How well a partition tiles the circle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoveringReport {
    /// Largest gap or overlap between circle-consecutive intervals.
    pub max_mismatch: Real,
    /// |Σ lengths − 1|.
    pub length_defect: Real,
}

impl CoveringReport {
    pub fn defect(&self) -> Real {
        self.max_mismatch.clone().max(&self.length_defect)
    }
}

impl DynamicalPartition {
    pub fn count(&self) -> usize {
        self.long_intervals.len() + self.short_intervals.len()
    }

    /// All intervals in circle order starting at the smallest left endpoint.
    pub fn circle_order(&self) -> Vec<&PartitionInterval> {
        let mut v: Vec<&PartitionInterval> = self.long_intervals.iter().chain(&self.short_intervals).collect();
        v.sort_by(|a, b| a.left.partial_cmp(&b.left).expect("finite endpoints"));
        v
    }

    pub fn covering(&self) -> CoveringReport {
        let prec = self.base_point.prec();
        let v = self.circle_order();
        let mut worst = Float::new(prec);
        let mut total = Float::new(prec);
        for (k, iv) in v.iter().enumerate() {
            total += iv.length();
            let next_left = match v.get(k + 1) {
                Some(nx) => nx.left.clone(),
                None => Float::with_val(prec, &v[0].left + 1u32),
            };
            worst = worst.max(&Float::with_val(prec, &iv.right - &next_left).abs());
        }
        CoveringReport { max_mismatch: worst, length_defect: (total - 1u32).abs() }
    }

    /// CSV rows: level, type, index, left, right, length.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), PartitionError> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["level", "type", "index", "left", "right", "length"])?;
        for iv in self.long_intervals.iter().chain(&self.short_intervals) {
            let kind = match iv.kind {
                IntervalKind::Long => "long",
                IntervalKind::Short => "short",
            };
            out.write_record([
                self.level.to_string(),
                kind.to_string(),
                iv.index.to_string(),
                to_decimal(&iv.left),
                to_decimal(&iv.right),
                to_decimal(&iv.length()),
            ])?;
        }
        out.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefinementReport {
    pub pass: bool,
    /// Worst endpoint mismatch, relative to the length of the interval being tiled.
    pub worst_mismatch: Real,
    /// (pieces of type F^•(I_{n+1}), pieces of type F^•(I_{n+2})) per long interval of P_n.
    pub pieces: Vec<(usize, usize)>,
    /// a_{n+1} = (q_{n+2} − q_n)/q_{n+1}.
    pub expected_long: u64,
}

/// Check that every long interval of P_n is tiled by a_{n+1} long and one
/// short interval of P_{n+1}, and that the short intervals of P_n survive
/// unchanged (as long intervals of P_{n+1}).
pub fn refinement_check(pn: &DynamicalPartition, pm: &DynamicalPartition) -> Result<RefinementReport, PartitionError> {
    if pm.level != pn.level + 1 || pm.base_point != pn.base_point || pm.q_n != pn.q_next {
        return Err(PartitionError::LevelsNotConsecutive);
    }
    let prec = pn.base_point.prec();
    let tol = pow2(prec, -(prec as i32) / 2);
    let expected_long = (pm.q_next - pn.q_n) / pn.q_next;
    let fine = pm.circle_order();
    let mut pass = true;
    let mut worst = Float::new(prec);
    let mut pieces = Vec::with_capacity(pn.long_intervals.len());
    for big in &pn.long_intervals {
        let len = big.length();
        let slack = Float::with_val(prec, &tol * &len);
        // first fine interval starting at big.left (mod 1)
        let start = fine.partition_point(|iv| iv.left < Float::with_val(prec, &big.left - &slack));
        let mut at = big.left.clone();
        let (mut nl, mut ns) = (0usize, 0usize);
        let mut k = start;
        let mut wrap = Float::new(prec);
        loop {
            if k == fine.len() {
                k = 0;
                wrap += 1u32;
            }
            let iv = fine[k];
            let left = Float::with_val(prec, &iv.left + &wrap);
            let gap = Float::with_val(prec, &left - &at).abs() / &len;
            worst = worst.max(&gap);
            if gap > tol {
                pass = false;
                break;
            }
            match iv.kind {
                IntervalKind::Long => nl += 1,
                IntervalKind::Short => ns += 1,
            }
            at = Float::with_val(prec, &iv.right + &wrap);
            k += 1;
            let remaining = Float::with_val(prec, &big.right - &at) / &len;
            if remaining <= tol {
                worst = worst.max(&remaining.abs());
                break;
            }
            if nl + ns > fine.len() {
                pass = false;
                break;
            }
        }
        if nl as u64 != expected_long || ns != 1 {
            pass = false;
        }
        pieces.push((nl, ns));
    }
    for s in &pn.short_intervals {
        match pm.long_intervals.get(s.index as usize) {
            Some(l) if l.index == s.index => {
                let d = Float::with_val(prec, &l.left - &s.left).abs().max(&Float::with_val(prec, &l.right - &s.right).abs());
                worst = worst.max(&d);
                if d > Float::with_val(prec, &tol * &s.length()) {
                    pass = false;
                }
            }
            _ => pass = false,
        }
    }
    Ok(RefinementReport { pass, worst_mismatch: worst, pieces, expected_long })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Commensurability {
    pub level: usize,
    /// max over circle-adjacent pairs of max(|I|/|J|, |J|/|I|).
    pub c: Real,
    /// I_n(c) ∪ I_{n+1}(c) still contains another critical point.
    pub pre_asymptotic: bool,
}

/// C(n) for the partitions P_n(c), n in `levels`.
pub fn commensurability(
    spec: &CircleMapSpec,
    c: &Real,
    levels: std::ops::RangeInclusive<usize>,
) -> Result<Vec<Commensurability>, PartitionError> {
    let prec = spec.prec();
    let mut orbit = BaseOrbit::new(spec, c);
    let rt = closest_returns_on(&mut orbit, *levels.end() + 1)?;
    let others: Vec<Real> = spec
        .critical_points()
        .into_iter()
        .filter(|p| {
            let d = frac(&Float::with_val(prec, p - c));
            let d = d.clone().min(&Float::with_val(prec, 1u32 - &d));
            d > pow2(prec, -(prec as i32) / 4)
        })
        .collect();
    let mut out = Vec::new();
    for n in levels {
        let part = partition_from(&mut orbit, &rt, n);
        let v = part.circle_order();
        let mut worst = Float::with_val(prec, 1);
        for k in 0..v.len() {
            let a = v[k].length();
            let b = v[(k + 1) % v.len()].length();
            let r = Float::with_val(prec, &a / &b);
            let r = r.clone().max(&Float::with_val(prec, r.recip_ref()));
            worst = worst.max(&r);
        }
        // I_n(c) and I_{n+1}(c) lie on opposite sides of c
        let i_n = &part.long_intervals[0];
        let i_m = &part.short_intervals[0];
        let pre = others.iter().any(|p| i_n.contains_interior(p) || i_m.contains_interior(p));
        out.push(Commensurability { level: n, c: worst, pre_asymptotic: pre });
    }
    Ok(out)
}
