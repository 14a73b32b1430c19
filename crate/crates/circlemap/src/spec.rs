use numerics::{bisect_increasing, frac, pow2, two_pi, Cx, Real};
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::factor::Factor;
use crate::jet::Jet;
use crate::CircleMapError;

/// An analytic circle map given as a composition of factors and a rotation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircleMapSpec {
    omega: Real,
    factors: Vec<Factor>,
    precision_bits: u32,
    two_pi: Real,
    /// Number of leading factors applied before the rotation.
    rot_at: usize,
}

impl CircleMapSpec {
    pub fn new(omega: Real, factors: Vec<Factor>, precision_bits: u32) -> Result<Self, CircleMapError> {
        let prec = precision_bits;
        let factors: Vec<Factor> = factors
            .into_iter()
            .map(|f| match f {
                Factor::Critical(h) => Factor::critical(Float::with_val(prec, &h.beta), h.d),
                Factor::Diffeo { amplitude } => Factor::diffeo(Float::with_val(prec, amplitude)),
            })
            .collect::<Result<_, _>>()?;
        let rot_at = factors.iter().position(|f| f.is_critical()).map_or(factors.len(), |i| i + 1);
        let spec = CircleMapSpec {
            omega: Float::with_val(prec, omega),
            factors,
            precision_bits: prec,
            two_pi: two_pi(prec),
            rot_at,
        };
        spec.check_distinct()?;
        Ok(spec)
    }

    pub fn omega(&self) -> &Real {
        &self.omega
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    /// Same composition with a different rotation parameter.
    pub fn with_omega(&self, omega: &Real) -> Self {
        let mut s = self.clone();
        s.omega = Float::with_val(self.precision_bits, omega);
        s
    }

    /// Same map rebuilt at another mantissa width.
    pub fn with_precision(&self, prec: u32) -> Result<Self, CircleMapError> {
        CircleMapSpec::new(self.omega.clone(), self.factors.clone(), prec)
    }

    pub fn prec(&self) -> u32 {
        self.precision_bits
    }

    pub fn zero(&self) -> Real {
        Float::new(self.precision_bits)
    }

    pub fn criticalities(&self) -> Vec<u32> {
        self.factors
            .iter()
            .filter_map(|f| match f {
                Factor::Critical(h) => Some(h.d),
                _ => None,
            })
            .collect()
    }

    /// Criticality at the origin, if the origin is critical.
    pub fn marked_criticality(&self) -> Option<u32> {
        let prec = self.prec();
        let tol = pow2(prec, -(prec as i32) / 2);
        self.critical_points_with_order().into_iter().find_map(|(d, c)| {
            let near = Float::with_val(prec, 1u32 - &c);
            (c <= tol || near <= tol).then_some(d)
        })
    }

    /// The lift F on the real line.
    pub fn lift(&self, x: &Real) -> Real {
        let mut y = x.clone();
        for (i, f) in self.factors.iter().enumerate() {
            if i == self.rot_at {
                y += &self.omega;
            }
            y = f.eval(&y, &self.two_pi);
        }
        if self.rot_at == self.factors.len() {
            y += &self.omega;
        }
        y
    }

    /// (F(x), F'(x)) in closed form.
    pub fn lift_d(&self, x: &Real) -> (Real, Real) {
        let mut y = x.clone();
        let mut d = Float::with_val(self.prec(), 1);
        for (i, f) in self.factors.iter().enumerate() {
            if i == self.rot_at {
                y += &self.omega;
            }
            let (v, dv) = f.eval_d(&y, &self.two_pi);
            y = v;
            d *= dv;
        }
        if self.rot_at == self.factors.len() {
            y += &self.omega;
        }
        (y, d)
    }

    /// F on a complex argument (the lift is entire).
    pub fn lift_cx(&self, z: &Cx) -> Cx {
        self.lift_cx_d(z).0
    }

    /// (F(z), F'(z)).
    pub fn lift_cx_d(&self, z: &Cx) -> (Cx, Cx) {
        let prec = self.prec();
        let mut y = z.clone();
        let mut d = Cx::from_real(&Float::with_val(prec, 1));
        for (i, f) in self.factors.iter().enumerate() {
            if i == self.rot_at {
                y = y.add_real(&self.omega);
            }
            let (v, dv) = f.eval_cx(&y, &self.two_pi);
            y = v;
            d = &d * &dv;
        }
        if self.rot_at == self.factors.len() {
            y = y.add_real(&self.omega);
        }
        (y, d)
    }

    /// F, F', ..., F^{(order)} at x from a Taylor jet.
    pub fn derivatives(&self, x: &Real, order: usize) -> Vec<Real> {
        let mut j = Jet::variable(x, order);
        for (i, f) in self.factors.iter().enumerate() {
            if i == self.rot_at {
                j = j.add_const(&self.omega);
            }
            j = f.eval_jet(&j, &self.two_pi);
        }
        if self.rot_at == self.factors.len() {
            j = j.add_const(&self.omega);
        }
        j.derivatives()
    }

    /// Input to factor `k`: the stages before it, rotation included when it precedes k.
    fn input_to(&self, x: &Real, k: usize) -> Real {
        let mut y = x.clone();
        for (i, f) in self.factors.iter().enumerate().take(k) {
            if i == self.rot_at {
                y += &self.omega;
            }
            y = f.eval(&y, &self.two_pi);
        }
        if self.rot_at == k {
            y += &self.omega;
        }
        y
    }

    fn critical_points_with_order(&self) -> Vec<(u32, Real)> {
        let prec = self.prec();
        let mut out = Vec::new();
        for (k, f) in self.factors.iter().enumerate() {
            let Factor::Critical(h) = f else { continue };
            // solve G(x) ≡ β mod 1 where G is the input to factor k
            let g = |x: &Real| self.input_to(x, k);
            let g0 = g(&Float::new(prec));
            let mut t = Float::with_val(prec, &h.beta - &g0);
            t = frac(&t);
            t += &g0;
            let lo = Float::new(prec);
            let hi = Float::with_val(prec, 1);
            let x = bisect_increasing(g, &t, &lo, &hi);
            out.push((h.d, frac(&x)));
        }
        out
    }

    /// Critical points in [0,1), one per critical factor, in factor order.
    pub fn critical_points(&self) -> Vec<Real> {
        self.critical_points_with_order().into_iter().map(|(_, c)| c).collect()
    }

    /// Critical points sorted along [0,1) with their orders.
    pub fn sorted_critical_points(&self) -> Vec<(Real, u32)> {
        let mut v: Vec<(Real, u32)> = self.critical_points_with_order().into_iter().map(|(d, c)| (c, d)).collect();
        v.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        v
    }

    fn check_distinct(&self) -> Result<(), CircleMapError> {
        let pts = self.critical_points();
        let tol = pow2(self.prec(), -(self.prec() as i32) / 4);
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                let mut gap = frac(&Float::with_val(self.prec(), &pts[i] - &pts[j]));
                let other = Float::with_val(self.prec(), 1u32 - &gap);
                if other < gap {
                    gap = other;
                }
                if gap <= tol {
                    return Err(CircleMapError::Degenerate(i, j));
                }
            }
        }
        Ok(())
    }

    /// Inverse of the lift by bisection (F is increasing).
    pub fn lift_inv(&self, y: &Real) -> Real {
        let prec = self.prec();
        // each factor moves points by less than 1
        let pad = self.factors.len() as u32 + 1;
        let lo = Float::with_val(prec, y - &self.omega) - pad;
        let hi = Float::with_val(prec, y - &self.omega) + pad;
        bisect_increasing(|x| self.lift(x), y, &lo, &hi)
    }

    /// Inverse restricted to a bracket known to contain it.
    pub fn lift_inv_in(&self, y: &Real, lo: &Real, hi: &Real) -> Real {
        bisect_increasing(|x| self.lift(x), y, lo, hi)
    }
}

/// h_{β,3} ∘ R_ω ∘ h_{0,3}, marked cubic critical point at 0.
pub fn make_bicubic(omega: &Real, beta: &Real) -> Result<CircleMapSpec, CircleMapError> {
    let prec = omega.prec();
    CircleMapSpec::new(
        omega.clone(),
        vec![Factor::critical(Float::new(prec), 3)?, Factor::critical(beta.clone(), 3)?],
        prec,
    )
}

/// R_ω ∘ h_{0,d}.
pub fn make_single(omega: &Real, d: u32) -> Result<CircleMapSpec, CircleMapError> {
    let prec = omega.prec();
    CircleMapSpec::new(omega.clone(), vec![Factor::critical(Float::new(prec), d)?], prec)
}

pub fn make_rigid(omega: &Real) -> CircleMapSpec {
    CircleMapSpec::new(omega.clone(), vec![], omega.prec()).expect("rigid rotation is always valid")
}
