use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rug::Float;
use serde::{Deserialize, Serialize};

use crate::Real;

/// Complex number over [`Real`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cx {
    pub re: Real,
    pub im: Real,
}

impl Cx {
    pub fn new(re: Real, im: Real) -> Self {
        Cx { re, im }
    }

    pub fn from_real(re: &Real) -> Self {
        Cx { re: re.clone(), im: Float::new(re.prec()) }
    }

    pub fn zero(prec: u32) -> Self {
        Cx { re: Float::new(prec), im: Float::new(prec) }
    }

    pub fn from_f64(prec: u32, re: f64, im: f64) -> Self {
        Cx { re: Float::with_val(prec, re), im: Float::with_val(prec, im) }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    /// |z| via hypot, no intermediate overflow.
    pub fn abs(&self) -> Real {
        Float::with_val(self.prec(), self.re.hypot_ref(&self.im))
    }

    pub fn conj(&self) -> Self {
        Cx { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn scale(&self, s: &Real) -> Self {
        let p = self.prec();
        Cx { re: Float::with_val(p, &self.re * s), im: Float::with_val(p, &self.im * s) }
    }

    pub fn add_real(&self, s: &Real) -> Self {
        Cx { re: Float::with_val(self.prec(), &self.re + s), im: self.im.clone() }
    }

    pub fn sub_real(&self, s: &Real) -> Self {
        Cx { re: Float::with_val(self.prec(), &self.re - s), im: self.im.clone() }
    }

    pub fn div(&self, o: &Cx) -> Self {
        let p = self.prec();
        // Smith's algorithm keeps |o| large or small inputs in range.
        if o.re.clone().abs() >= o.im.clone().abs() {
            let r = Float::with_val(p, &o.im / &o.re);
            let d = Float::with_val(p, &o.re + &r * &o.im);
            Cx {
                re: Float::with_val(p, &self.re + &r * &self.im) / &d,
                im: Float::with_val(p, &self.im - &r * &self.re) / &d,
            }
        } else {
            let r = Float::with_val(p, &o.re / &o.im);
            let d = Float::with_val(p, &o.im + &r * &o.re);
            Cx {
                re: Float::with_val(p, &r * &self.re + &self.im) / &d,
                im: Float::with_val(p, &r * &self.im - &self.re) / &d,
            }
        }
    }

    /// (sin z, cos z) together; shares the real trig and hyperbolic parts.
    pub fn sin_cos(&self) -> (Cx, Cx) {
        let p = self.prec();
        let (s, c) = self.re.clone().sin_cos(Float::new(p));
        if self.im.is_zero() {
            return (Cx::from_real(&s), Cx::from_real(&c));
        }
        let (sh, ch) = self.im.clone().sinh_cosh(Float::new(p));
        let sin = Cx { re: Float::with_val(p, &s * &ch), im: Float::with_val(p, &c * &sh) };
        let cos = Cx { re: Float::with_val(p, &c * &ch), im: -Float::with_val(p, &s * &sh) };
        (sin, cos)
    }

    pub fn sin(&self) -> Cx {
        self.sin_cos().0
    }

    pub fn cos(&self) -> Cx {
        self.sin_cos().1
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

impl<'a> Add<&'a Cx> for &'a Cx {
    type Output = Cx;
    fn add(self, o: &Cx) -> Cx {
        let p = self.prec();
        Cx { re: Float::with_val(p, &self.re + &o.re), im: Float::with_val(p, &self.im + &o.im) }
    }
}

impl<'a> Sub<&'a Cx> for &'a Cx {
    type Output = Cx;
    fn sub(self, o: &Cx) -> Cx {
        let p = self.prec();
        Cx { re: Float::with_val(p, &self.re - &o.re), im: Float::with_val(p, &self.im - &o.im) }
    }
}

impl<'a> Mul<&'a Cx> for &'a Cx {
    type Output = Cx;
    fn mul(self, o: &Cx) -> Cx {
        let p = self.prec();
        if self.im.is_zero() && o.im.is_zero() {
            return Cx::from_real(&Float::with_val(p, &self.re * &o.re));
        }
        let re = Float::with_val(p, &self.re * &o.re) - Float::with_val(p, &self.im * &o.im);
        let im = Float::with_val(p, &self.re * &o.im) + Float::with_val(p, &self.im * &o.re);
        Cx { re, im }
    }
}

impl Neg for Cx {
    type Output = Cx;
    fn neg(self) -> Cx {
        Cx { re: -self.re, im: -self.im }
    }
}

impl fmt::Display for Cx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (re, im) = self.to_f64();
        write!(f, "{re:e}{im:+e}i")
    }
}
