use numerics::{Cx, Real};
use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::jet::Jet;
use crate::CircleMapError;

/// h_{β,d}(x) = x + Σ_j b_j sin(2πj(x−β))/(2π), the antiderivative of
/// c_d (1 − cos 2π(x−β))^{(d−1)/2} that fixes β.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalFactor {
    pub beta: Real,
    pub d: u32,
    /// b_1..b_k, index j-1.
    coeffs: Vec<Real>,
}

/// Trig coefficients A_0..A_k of (1 − cos u)^k = Σ A_j cos(ju).
fn cosine_power_coefficients(k: u32) -> Vec<Rational> {
    let mut a = vec![Rational::new(); k as usize + 1];
    for m in 0..=k {
        let sign = if m % 2 == 0 { 1 } else { -1 };
        let outer = Integer::from(Integer::binomial_u(k, m)) * sign;
        for l in 0..=m {
            let j = (m as i64 - 2 * l as i64).unsigned_abs() as usize;
            let inner = Integer::from(Integer::binomial_u(m, l));
            let denom = Integer::from(1) << m;
            a[j] += Rational::from((Integer::from(&outer * &inner), denom));
        }
    }
    a
}

impl CriticalFactor {
    pub fn new(beta: Real, d: u32) -> Result<Self, CircleMapError> {
        if d < 3 || d % 2 == 0 {
            return Err(CircleMapError::BadCriticality(d));
        }
        let prec = beta.prec();
        let a = cosine_power_coefficients((d - 1) / 2);
        let cd = Rational::from(a[0].recip_ref());
        let coeffs = (1..a.len())
            .map(|j| {
                let b = Rational::from(&cd * &a[j]) / j as u32;
                Float::with_val(prec, &b)
            })
            .collect();
        Ok(CriticalFactor { beta, d, coeffs })
    }

    /// The normalizing constant c_d as an exact rational.
    pub fn normalization(d: u32) -> Rational {
        let a = cosine_power_coefficients((d - 1) / 2);
        Rational::from(a[0].recip_ref())
    }

    fn phase(&self, x: &Real, two_pi: &Real) -> Real {
        Float::with_val(x.prec(), x - &self.beta) * two_pi
    }

    pub fn eval(&self, x: &Real, two_pi: &Real) -> Real {
        let prec = x.prec();
        let u = self.phase(x, two_pi);
        let mut acc = Float::new(prec);
        if self.coeffs.len() == 1 {
            acc = Float::with_val(prec, u.sin_ref()) * &self.coeffs[0];
        } else {
            for (j, b) in self.coeffs.iter().enumerate() {
                let s = Float::with_val(prec, &u * (j as u32 + 1)).sin();
                acc += s * b;
            }
        }
        acc /= two_pi;
        acc + x
    }

    /// (h(x), h'(x))
    pub fn eval_d(&self, x: &Real, two_pi: &Real) -> (Real, Real) {
        let prec = x.prec();
        let u = self.phase(x, two_pi);
        let mut v = Float::new(prec);
        let mut d = Float::with_val(prec, 1);
        for (j, b) in self.coeffs.iter().enumerate() {
            let jj = j as u32 + 1;
            let (s, c) = Float::with_val(prec, &u * jj).sin_cos(Float::new(prec));
            v += s * b;
            d += c * b * jj;
        }
        v /= two_pi;
        (v + x, d)
    }

    pub fn eval_cx(&self, z: &Cx, two_pi: &Real) -> (Cx, Cx) {
        let prec = z.prec();
        let u = z.sub_real(&self.beta).scale(two_pi);
        let mut v = Cx::zero(prec);
        let mut d = Cx::from_real(&Float::with_val(prec, 1));
        for (j, b) in self.coeffs.iter().enumerate() {
            let jj = Float::with_val(prec, j + 1);
            let (s, c) = u.scale(&jj).sin_cos();
            v = &v + &s.scale(b);
            d = &d + &c.scale(&Float::with_val(prec, b * &jj));
        }
        let v = v.scale(&Float::with_val(prec, two_pi.recip_ref()));
        (&v + z, d)
    }

    pub(crate) fn eval_jet(&self, x: &Jet, two_pi: &Real) -> Jet {
        let u = x.add_const(&-self.beta.clone()).scale(two_pi);
        let mut acc = x.clone();
        let inv = Float::with_val(two_pi.prec(), two_pi.recip_ref());
        for (j, b) in self.coeffs.iter().enumerate() {
            let (s, _) = u.scale(&Float::with_val(two_pi.prec(), j + 1)).sin_cos();
            acc = acc.add(&s.scale(&Float::with_val(two_pi.prec(), b * &inv)));
        }
        acc
    }
}

/// One stage of a composition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Factor {
    Critical(CriticalFactor),
    /// φ(x) = x + e·sin(2πx)/(2π), a real-analytic circle diffeomorphism
    /// for |e| < 1 fixing 0.
    Diffeo { amplitude: Real },
}

impl Factor {
    pub fn critical(beta: Real, d: u32) -> Result<Self, CircleMapError> {
        Ok(Factor::Critical(CriticalFactor::new(beta, d)?))
    }

    pub fn diffeo(amplitude: Real) -> Result<Self, CircleMapError> {
        if amplitude.clone().abs() >= 1 {
            return Err(CircleMapError::BadAmplitude);
        }
        Ok(Factor::Diffeo { amplitude })
    }

    pub fn is_critical(&self) -> bool {
        matches!(self, Factor::Critical(_))
    }

    pub fn eval(&self, x: &Real, two_pi: &Real) -> Real {
        match self {
            Factor::Critical(h) => h.eval(x, two_pi),
            Factor::Diffeo { amplitude } => {
                let prec = x.prec();
                let s = Float::with_val(prec, x * two_pi).sin();
                s * amplitude / two_pi + x
            }
        }
    }

    pub fn eval_d(&self, x: &Real, two_pi: &Real) -> (Real, Real) {
        match self {
            Factor::Critical(h) => h.eval_d(x, two_pi),
            Factor::Diffeo { amplitude } => {
                let prec = x.prec();
                let (s, c) = Float::with_val(prec, x * two_pi).sin_cos(Float::new(prec));
                (s * amplitude / two_pi + x, c * amplitude + 1u32)
            }
        }
    }

    pub fn eval_cx(&self, z: &Cx, two_pi: &Real) -> (Cx, Cx) {
        match self {
            Factor::Critical(h) => h.eval_cx(z, two_pi),
            Factor::Diffeo { amplitude } => {
                let prec = z.prec();
                let (s, c) = z.scale(two_pi).sin_cos();
                let k = Float::with_val(prec, amplitude / two_pi);
                (&z.clone() + &s.scale(&k), c.scale(amplitude).add_real(&Float::with_val(prec, 1)))
            }
        }
    }

    pub(crate) fn eval_jet(&self, x: &Jet, two_pi: &Real) -> Jet {
        match self {
            Factor::Critical(h) => h.eval_jet(x, two_pi),
            Factor::Diffeo { amplitude } => {
                let (s, _) = x.scale(two_pi).sin_cos();
                let k = Float::with_val(two_pi.prec(), amplitude / two_pi);
                x.add(&s.scale(&k))
            }
        }
    }
}
