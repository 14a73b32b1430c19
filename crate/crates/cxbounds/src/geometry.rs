use numerics::{pi, pow2, Cx, Real};
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::CxError;

/// Closed real interval [lo, hi].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: Real,
    pub hi: Real,
}

impl Interval {
    /// The interval spanned by two points in either order.
    pub fn spanned(a: &Real, b: &Real) -> Self {
        if a <= b {
            Interval { lo: a.clone(), hi: b.clone() }
        } else {
            Interval { lo: b.clone(), hi: a.clone() }
        }
    }

    pub fn len(&self) -> Real {
        Float::with_val(self.lo.prec(), &self.hi - &self.lo)
    }

    pub fn mid(&self) -> Real {
        Float::with_val(self.lo.prec(), &self.hi + &self.lo) / 2u32
    }

    pub fn contains(&self, x: &Real) -> bool {
        self.lo <= *x && *x <= self.hi
    }

    pub fn clamp(&self, x: &Real) -> Real {
        if *x < self.lo {
            self.lo.clone()
        } else if *x > self.hi {
            self.hi.clone()
        } else {
            x.clone()
        }
    }

    /// Euclidean distance from z to the segment.
    pub fn dist(&self, z: &Cx) -> Real {
        let p = z.prec();
        let dx = Float::with_val(p, &z.re - &self.clamp(&z.re));
        dx.hypot(&z.im)
    }
}

/// D_θ(J): the two disk caps over the chord J whose boundary arcs meet ℝ at
/// angle θ. Equal to the disk with diameter J at θ = π/2, shrinking to J
/// as θ → π.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoincareDisk {
    pub j: Interval,
    pub theta: Real,
}

impl PoincareDisk {
    pub fn new(j: Interval, theta: Real) -> Result<Self, CxError> {
        if !(theta.is_sign_positive() && !theta.is_zero() && theta < pi(theta.prec())) {
            return Err(CxError::BadAngle(theta.to_f64()));
        }
        if j.lo >= j.hi {
            return Err(CxError::EmptyInterval);
        }
        Ok(PoincareDisk { j, theta })
    }

    /// Signed height of the upper cap's center above the chord, and the cap radius.
    fn cap(&self) -> (Real, Real) {
        let p = self.theta.prec();
        let half = self.j.len() / 2u32;
        let (s, c) = self.theta.clone().sin_cos(Float::new(p));
        (Float::with_val(p, &half * &c) / &s, half / s)
    }

    /// Largest distance between two points of the region: ((1+cos θ)/sin θ)|J|
    /// while the caps are at least half disks, |J| once they are thinner.
    pub fn diameter(&self) -> Real {
        let p = self.theta.prec();
        let (s, c) = self.theta.clone().sin_cos(Float::new(p));
        let d = Float::with_val(p, 1 + c) / s * self.j.len();
        let len = self.j.len();
        if d > len {
            d
        } else {
            len
        }
    }

    /// Closed membership with a few ulps of slack on the cap circles.
    pub fn contains(&self, z: &Cx) -> bool {
        let p = z.prec();
        let (h, r) = self.cap();
        let dx = Float::with_val(p, &z.re - &self.j.mid());
        // upper cap for Im z ≥ 0, its mirror image below
        let dy = Float::with_val(p, z.im.clone().abs() - &h);
        let d = dx.hypot(&dy);
        let slack = Float::with_val(p, &r * &pow2(p, 6 - p as i32));
        d <= Float::with_val(p, &r + &slack)
    }
}

pub fn poincare_diameter(pd: &PoincareDisk) -> Real {
    pd.diameter()
}

pub fn poincare_contains(pd: &PoincareDisk, z: &Cx) -> bool {
    pd.contains(z)
}

/// r(θ) = log cot(θ/4), the hyperbolic radius of D_θ(J) around J in ℂ_J.
pub fn hyperbolic_radius(theta: &Real) -> Real {
    let q = Float::with_val(theta.prec(), theta / 4u32);
    q.cot().ln()
}

/// Least of the angles at a between [a, z] and the ray towards −∞, and at b
/// between [b, z] and the ray towards +∞; in [0, π].
pub fn angle_to_interval(z: &Cx, j: &Interval) -> Result<Real, CxError> {
    let p = z.prec();
    let at = |e: &Real| {
        let re = Float::with_val(p, &z.re - e);
        if re.is_zero() && z.im.is_zero() {
            None
        } else {
            Some(z.im.clone().abs().atan2(&re))
        }
    };
    let (Some(ta), Some(tb)) = (at(&j.lo), at(&j.hi)) else {
        return Err(CxError::DegeneratePoint);
    };
    let at_a = Float::with_val(p, pi(p) - ta);
    Ok(if at_a < tb { at_a } else { tb })
}
