//! Continued fractions: the Gauss map, partial quotients and convergents.
//!
//! The production path works on [`Real`]; an exact rational path
//! ([`cf_of_rational`]) backs the tests.

use std::cmp::Ordering;
use std::fmt;

use numerics::{pow2, Real};
use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CfError {
    #[error("argument outside (0,1)")]
    OutOfDomain,
    #[error("precision exhausted after {} quotients", partial.quotients.len())]
    PrecisionExhausted { partial: ContinuedFraction },
    #[error("asked for {wanted} convergents but only {have} quotients are known")]
    NotEnoughQuotients { wanted: usize, have: usize },
}

/// α = [a_0, a_1, ...] meaning α = 1/(a_0 + 1/(a_1 + ...)).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContinuedFraction {
    pub quotients: Vec<u64>,
    /// The number is rational and the list ends at its last quotient.
    pub terminated: bool,
}

impl ContinuedFraction {
    pub fn new(quotients: Vec<u64>) -> Self {
        debug_assert!(quotients.iter().all(|&a| a >= 1));
        ContinuedFraction { quotients, terminated: false }
    }

    pub fn periodic(pattern: &[u64], len: usize) -> Self {
        Self::new(pattern.iter().copied().cycle().take(len).collect())
    }

    pub fn golden(len: usize) -> Self {
        Self::periodic(&[1], len)
    }

    pub fn silver(len: usize) -> Self {
        Self::periodic(&[2], len)
    }

    pub fn len(&self) -> usize {
        self.quotients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quotients.is_empty()
    }

    pub fn truncate(&self, n: usize) -> Self {
        let n = n.min(self.len());
        ContinuedFraction {
            quotients: self.quotients[..n].to_vec(),
            terminated: self.terminated && n == self.len(),
        }
    }

    /// Exact value of the (truncated) expansion.
    pub fn value(&self) -> Rational {
        let mut v = Rational::new();
        for &a in self.quotients.iter().rev() {
            v += a;
            v.recip_mut();
        }
        v
    }

    pub fn value_real(&self, prec: u32) -> Real {
        Float::with_val(prec, &self.value())
    }
}

impl fmt::Display for ContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q: Vec<String> = self.quotients.iter().map(|a| a.to_string()).collect();
        write!(f, "[{}]", q.join(","))
    }
}

/// p_n/q_n for n = 0..=N.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Convergents {
    pub p: Vec<Integer>,
    pub q: Vec<Integer>,
}

/// G(α) = {1/α}. Returns exactly 0 when 1/α is within 2^{-b+16} of an integer.
pub fn gauss(alpha: &Real) -> Result<Real, CfError> {
    if *alpha <= 0 || *alpha >= 1 {
        return Err(CfError::OutOfDomain);
    }
    let prec = alpha.prec();
    Ok(gauss_step(alpha, &pow2(prec, 16 - prec as i32)).1)
}

fn gauss_step(alpha: &Real, snap: &Real) -> (u64, Real) {
    let prec = alpha.prec();
    let inv = Float::with_val(prec, alpha.recip_ref());
    let near = inv.clone().round();
    let gap = Float::with_val(prec, &inv - &near).abs();
    if gap <= *snap {
        let a = near.to_integer().and_then(|i| i.to_u64()).expect("quotient overflow");
        return (a, Float::new(prec));
    }
    let fl = inv.clone().floor();
    let a = fl.to_integer().and_then(|i| i.to_u64()).expect("quotient overflow");
    (a, inv - fl)
}

/// First `depth` partial quotients along the Gauss orbit of α.
///
/// Stops once some 1/α_i lies within 2^{-b/2} of an integer: if that happens right at
/// `depth` the result is flagged terminated, earlier it is an error carrying
/// the partial expansion.
pub fn cf_expand(alpha: &Real, depth: usize) -> Result<ContinuedFraction, CfError> {
    if *alpha <= 0 || *alpha >= 1 {
        return Err(CfError::OutOfDomain);
    }
    let prec = alpha.prec();
    let snap = pow2(prec, -(prec as i32) / 2);
    let mut x = alpha.clone();
    let mut out = Vec::with_capacity(depth);
    while out.len() < depth {
        let (a, next) = gauss_step(&x, &snap);
        out.push(a);
        if next.is_zero() {
            let cf = ContinuedFraction { quotients: out, terminated: true };
            if cf.len() < depth {
                return Err(CfError::PrecisionExhausted { partial: cf });
            }
            return Ok(cf);
        }
        x = next;
    }
    Ok(ContinuedFraction::new(out))
}

/// Euclidean algorithm on num/den with 0 < num < den.
pub fn cf_of_rational(r: &Rational) -> Result<ContinuedFraction, CfError> {
    if *r <= 0 || *r >= 1 {
        return Err(CfError::OutOfDomain);
    }
    let (mut a, mut b) = (r.denom().clone(), r.numer().clone());
    let mut out = Vec::new();
    while b != 0 {
        let (q, rem) = a.div_rem_floor(b.clone());
        out.push(q.to_u64().expect("quotient overflow"));
        a = b;
        b = rem;
    }
    Ok(ContinuedFraction { quotients: out, terminated: true })
}

/// Convergents p_0..p_n, q_0..q_n with q_0 = 1, q_1 = a_0 and
/// q_{k+1} = a_k q_k + q_{k-1}.
pub fn convergents(cf: &ContinuedFraction, n: usize) -> Result<Convergents, CfError> {
    if n > cf.len() {
        return Err(CfError::NotEnoughQuotients { wanted: n, have: cf.len() });
    }
    // seeds (p_{-1}, q_{-1}) = (1, 0)
    let mut p = vec![Integer::from(0)];
    let mut q = vec![Integer::from(1)];
    let (mut pm, mut qm) = (Integer::from(1), Integer::from(0));
    for k in 0..n {
        let a = cf.quotients[k];
        let pn = Integer::from(&p[k] * a) + &pm;
        let qn = Integer::from(&q[k] * a) + &qm;
        pm = p[k].clone();
        qm = q[k].clone();
        p.push(pn);
        q.push(qn);
    }
    Ok(Convergents { p, q })
}

/// sup a_i ≤ K on an irrational expansion.
pub fn is_bounded_type(cf: &ContinuedFraction, k: u64) -> bool {
    !cf.terminated && !cf.is_empty() && cf.quotients.iter().all(|&a| a <= k)
}

/// Width of the set of numbers whose expansion starts with `cf`'s first n
/// quotients: 1/(q_n (q_n + q_{n-1})).
pub fn cylinder_width(cf: &ContinuedFraction, n: usize) -> Result<Rational, CfError> {
    let c = convergents(cf, n)?;
    let qn = &c.q[n];
    let qm = if n == 0 { Integer::from(0) } else { c.q[n - 1].clone() };
    let d = qn * Integer::from(qn + &qm);
    Ok(Rational::from((Integer::from(1), d)))
}

/// Outcome of comparing a (possibly partial) expansion against a target.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrefixOrder {
    Less,
    Greater,
    /// Agreement on every compared quotient.
    Equal,
}

/// Orders two numbers by their leading quotients.
///
/// A larger quotient at an even index means a smaller number. A missing
/// quotient in a terminated expansion counts as infinity.
pub fn compare_prefix(a: &ContinuedFraction, target: &ContinuedFraction, n: usize) -> PrefixOrder {
    for i in 0..n {
        let x = a.quotients.get(i).copied();
        let y = target.quotients.get(i).copied();
        let ord = match (x, y) {
            (Some(x), Some(y)) => x.cmp(&y),
            (None, Some(_)) if a.terminated => Ordering::Greater,
            (Some(_), None) if target.terminated => Ordering::Less,
            _ => Ordering::Equal,
        };
        match ord {
            Ordering::Equal => {
                if x.is_none() || y.is_none() {
                    return PrefixOrder::Equal;
                }
            }
            o => {
                let bigger_quotient = o == Ordering::Greater;
                let smaller_number = bigger_quotient == (i % 2 == 0);
                return if smaller_number { PrefixOrder::Less } else { PrefixOrder::Greater };
            }
        }
    }
    PrefixOrder::Equal
}
