use std::sync::Arc;

use circlemap::{heights, CircleMapSpec, HeightStop, Orbit, HEIGHT_CAP, ORBIT_BUDGET};
use numerics::{pow2, Cx, Real};
use rug::Float;

use crate::program::Program;
use crate::RenormError;

/// (η, ξ) around the critical point 0 in canonical orientation η(0) < 0 < ξ(0).
///
/// In original lift coordinates η and ξ are the programs `eta`, `xi`; the
/// pair acts in u = s·x, so η(u) = s·eta(s·u). Parity is 1 when s = −1.
#[derive(Clone, Debug)]
pub struct CommutingPair {
    pub spec: Arc<CircleMapSpec>,
    pub eta: Program,
    pub xi: Program,
    pub sign: i32,
    pub eta0: Real,
    pub xi0: Real,
    /// Level n of the map the pair came from (−1 for (F, T^{-1})).
    pub level: i64,
    /// Number of pre-renormalizations applied since construction.
    pub depth: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Height {
    Finite(u64),
    Infinite,
}

fn flip(s: i32, x: Real) -> Real {
    if s < 0 {
        -x
    } else {
        x
    }
}

fn flip_cx(s: i32, z: Cx) -> Cx {
    if s < 0 {
        -z
    } else {
        z
    }
}

impl CommutingPair {
    /// Orient two programs so that η(0) < 0.
    pub fn from_programs(
        spec: Arc<CircleMapSpec>,
        eta: Program,
        xi: Program,
        level: i64,
        depth: usize,
    ) -> Result<Self, RenormError> {
        let zero = Float::new(spec.prec());
        let e = eta.eval(&spec, &zero);
        let lvl = level.max(0) as usize;
        if e.is_zero() {
            return Err(RenormError::NotIrrational { level: lvl });
        }
        let sign = if e.is_sign_positive() { -1 } else { 1 };
        let xi0 = flip(sign, xi.eval(&spec, &zero));
        if !xi0.is_sign_positive() || xi0.is_zero() {
            return Err(RenormError::PrecisionExhausted { level: lvl });
        }
        Ok(CommutingPair { eta0: flip(sign, e), xi0, spec, eta, xi, sign, level, depth })
    }

    pub fn parity(&self) -> u8 {
        u8::from(self.sign < 0)
    }

    pub fn prec(&self) -> u32 {
        self.spec.prec()
    }

    pub fn eta(&self, u: &Real) -> Real {
        flip(self.sign, self.eta.eval(&self.spec, &flip(self.sign, u.clone())))
    }

    pub fn xi(&self, u: &Real) -> Real {
        flip(self.sign, self.xi.eval(&self.spec, &flip(self.sign, u.clone())))
    }

    /// (η(u), η'(u)); the two orientation flips cancel in the derivative.
    pub fn eta_d(&self, u: &Real) -> (Real, Real) {
        let (v, d) = self.eta.eval_d(&self.spec, &flip(self.sign, u.clone()));
        (flip(self.sign, v), d)
    }

    pub fn xi_d(&self, u: &Real) -> (Real, Real) {
        let (v, d) = self.xi.eval_d(&self.spec, &flip(self.sign, u.clone()));
        (flip(self.sign, v), d)
    }

    pub fn eta_cx(&self, z: &Cx) -> (Cx, Cx) {
        let (v, d) = self.eta.eval_cx(&self.spec, &flip_cx(self.sign, z.clone()));
        (flip_cx(self.sign, v), d)
    }

    pub fn xi_cx(&self, z: &Cx) -> (Cx, Cx) {
        let (v, d) = self.xi.eval_cx(&self.spec, &flip_cx(self.sign, z.clone()));
        (flip_cx(self.sign, v), d)
    }

    /// |η(ξ(0)) − ξ(η(0))|.
    pub fn commutation_residual(&self) -> Real {
        let a = self.eta(&self.xi0);
        let b = self.xi(&self.eta0);
        Float::with_val(self.prec(), a - b).abs()
    }

    /// Default commutation tolerance q·2^{-b+20}, q the larger iterate count.
    pub fn commutation_tol(&self) -> Real {
        let q = self.eta.net().q.max(self.xi.net().q).max(1);
        pow2(self.prec(), 20 - self.prec() as i32) * q
    }

    /// (|η'(0)|, |ξ'(0)|).
    pub fn critical_derivatives(&self) -> (Real, Real) {
        let zero = Float::new(self.prec());
        (self.eta_d(&zero).1.abs(), self.xi_d(&zero).1.abs())
    }

    /// Pre-renormalization (η^a∘ξ, η), re-oriented; its level is one higher.
    pub fn prerenormalize(&self) -> Result<CommutingPair, RenormError> {
        let a = match height(self, HEIGHT_CAP)? {
            Height::Finite(a) => a,
            Height::Infinite => return Err(RenormError::InfiniteHeight),
        };
        let v = self.xi(&self.eta0);
        if v.is_sign_negative() && !v.is_zero() || v > self.xi0 {
            return Err(RenormError::PreconditionFailed { value: v.to_f64() });
        }
        let eta = self.eta.power(a).after(&self.xi);
        CommutingPair::from_programs(self.spec.clone(), eta, self.eta.clone(), self.level + 1, self.depth + 1)
    }

    pub fn normalize(&self) -> Result<NormalizedPair, RenormError> {
        let len = self.eta0.clone().abs();
        if len.is_zero() {
            return Err(RenormError::DegenerateInterval);
        }
        let scale = Float::with_val(self.prec(), len.recip_ref());
        Ok(NormalizedPair { pair: self.clone(), len, scale })
    }
}

/// Smallest a with η^{a+1}(ξ(0)) < 0 ≤ η^a(ξ(0)), iterating η from ξ(0).
pub fn height(pair: &CommutingPair, a_max: u64) -> Result<Height, RenormError> {
    let prec = pair.prec();
    let stall = pow2(prec, 20 - prec as i32);
    let mut y = pair.xi0.clone();
    let mut a = 0u64;
    loop {
        let next = pair.eta(&y);
        if next.is_sign_negative() && !next.is_zero() {
            return Ok(Height::Finite(a));
        }
        if Float::with_val(prec, &next - &y).abs() < stall {
            return Ok(Height::Infinite);
        }
        a += 1;
        if a > a_max {
            return Err(RenormError::HeightExceedsCap { cap: a_max });
        }
        y = next;
    }
}

/// ζ_{-1} = (F, T^{-1}), whose height is a_0.
pub fn base_pair(spec: &CircleMapSpec) -> Result<CommutingPair, RenormError> {
    CommutingPair::from_programs(Arc::new(spec.clone()), Program::block(1, 0), Program::block(0, 1), -1, 0)
}

/// Iterate data (q_{n+1}, p_{n+1}, q_n, p_n) for levels 0..=n_max, or the
/// level at which the recursion stopped.
fn level_data(spec: &CircleMapSpec, n_max: usize) -> (Vec<(u64, i64, u64, i64)>, Option<RenormError>) {
    let mut orbit = Orbit::new(spec);
    let run = heights(&mut orbit, n_max + 2, ORBIT_BUDGET, |_| u64::MAX, |_, _| false);
    // pairs[k] is the level k−1 pair
    let have: Vec<_> = run.pairs.iter().skip(1).copied().collect();
    if have.len() > n_max {
        return (have[..=n_max].to_vec(), None);
    }
    let level = have.len();
    let err = match run.stop {
        HeightStop::Infinite => RenormError::NotIrrational { level },
        _ => RenormError::PrecisionExhausted { level },
    };
    (have, Some(err))
}

fn pair_from_data(spec: &Arc<CircleMapSpec>, d: (u64, i64, u64, i64), n: usize) -> Result<CommutingPair, RenormError> {
    let (qa, pa, qb, pb) = d;
    CommutingPair::from_programs(spec.clone(), Program::block(qa, pa), Program::block(qb, pb), n as i64, 0)
}

/// (η, ξ) = (F^{q_{n+1}} − p_{n+1}, F^{q_n} − p_n), canonically oriented.
pub fn pair_at_level(spec: &CircleMapSpec, n: usize) -> Result<CommutingPair, RenormError> {
    let (data, err) = level_data(spec, n);
    match data.get(n) {
        Some(&d) => pair_from_data(&Arc::new(spec.clone()), d, n),
        None => Err(err.expect("missing level implies an error")),
    }
}

/// A pair rescaled by 1/|I_ξ|: η̃(t) = η(L t)/L with L = |η(0)|.
#[derive(Clone, Debug)]
pub struct NormalizedPair {
    pub pair: CommutingPair,
    /// L = |I_ξ|.
    pub len: Real,
    /// 1/L.
    pub scale: Real,
}

impl NormalizedPair {
    fn up(&self, t: &Real) -> Real {
        Float::with_val(t.prec(), t * &self.len)
    }

    pub fn eta(&self, t: &Real) -> Real {
        self.pair.eta(&self.up(t)) / &self.len
    }

    pub fn xi(&self, t: &Real) -> Real {
        self.pair.xi(&self.up(t)) / &self.len
    }

    pub fn eta_d(&self, t: &Real) -> (Real, Real) {
        let (v, d) = self.pair.eta_d(&self.up(t));
        (v / &self.len, d)
    }

    pub fn xi_d(&self, t: &Real) -> (Real, Real) {
        let (v, d) = self.pair.xi_d(&self.up(t));
        (v / &self.len, d)
    }

    pub fn eta_cx(&self, z: &Cx) -> (Cx, Cx) {
        let inv = Float::with_val(self.len.prec(), self.len.recip_ref());
        let (v, d) = self.pair.eta_cx(&z.scale(&self.len));
        (v.scale(&inv), d)
    }

    pub fn xi_cx(&self, z: &Cx) -> (Cx, Cx) {
        let inv = Float::with_val(self.len.prec(), self.len.recip_ref());
        let (v, d) = self.pair.xi_cx(&z.scale(&self.len));
        (v.scale(&inv), d)
    }

    /// η̃(0); exactly −1.
    pub fn eta0(&self) -> Real {
        Float::with_val(self.len.prec(), &self.pair.eta0 / &self.len)
    }

    /// ξ̃(0) = |I_η|/|I_ξ|.
    pub fn xi0(&self) -> Real {
        Float::with_val(self.len.prec(), &self.pair.xi0 / &self.len)
    }

    /// Normalizing again changes nothing.
    pub fn normalize(&self) -> NormalizedPair {
        self.clone()
    }
}

/// The levels 1..=depth normalized, with the error that cut the orbit short.
#[derive(Clone, Debug)]
pub struct RenormOrbit {
    pub pairs: Vec<NormalizedPair>,
    pub error: Option<RenormError>,
}

pub fn renorm_orbit(spec: &CircleMapSpec, depth: usize) -> RenormOrbit {
    if depth == 0 {
        return RenormOrbit { pairs: vec![], error: None };
    }
    let arc = Arc::new(spec.clone());
    let (data, mut error) = level_data(spec, depth);
    let mut pairs = Vec::new();
    for (n, &d) in data.iter().enumerate().skip(1) {
        match pair_from_data(&arc, d, n).and_then(|p| p.normalize()) {
            Ok(p) => pairs.push(p),
            Err(e) => {
                error = Some(e);
                break;
            }
        }
    }
    RenormOrbit { pairs, error }
}
