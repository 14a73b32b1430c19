//! Truncated Taylor series, enough to read off derivatives at a point.

use numerics::Real;
use rug::Float;

/// c[k] is the k-th Taylor coefficient (f^{(k)}/k!).
#[derive(Clone, Debug)]
pub struct Jet {
    pub c: Vec<Real>,
}

impl Jet {
    pub fn variable(x: &Real, order: usize) -> Self {
        let prec = x.prec();
        let mut c = vec![Float::new(prec); order + 1];
        c[0] = x.clone();
        if order >= 1 {
            c[1] = Float::with_val(prec, 1);
        }
        Jet { c }
    }

    pub fn add(&self, o: &Jet) -> Jet {
        Jet { c: self.c.iter().zip(&o.c).map(|(a, b)| Float::with_val(a.prec(), a + b)).collect() }
    }

    pub fn add_const(&self, k: &Real) -> Jet {
        let mut c = self.c.clone();
        c[0] += k;
        Jet { c }
    }

    pub fn scale(&self, k: &Real) -> Jet {
        Jet { c: self.c.iter().map(|a| Float::with_val(a.prec(), a * k)).collect() }
    }

    /// sin and cos of a jet by the usual coupled recurrence.
    pub fn sin_cos(&self) -> (Jet, Jet) {
        let n = self.c.len();
        let prec = self.c[0].prec();
        let (s0, c0) = self.c[0].clone().sin_cos(Float::new(prec));
        let mut s = vec![s0];
        let mut c = vec![c0];
        for k in 1..n {
            let mut sk = Float::new(prec);
            let mut ck = Float::new(prec);
            for m in 1..=k {
                let mu = Float::with_val(prec, &self.c[m] * m as u32);
                sk += Float::with_val(prec, &mu * &c[k - m]);
                ck -= Float::with_val(prec, &mu * &s[k - m]);
            }
            s.push(sk / k as u32);
            c.push(ck / k as u32);
        }
        (Jet { c: s }, Jet { c })
    }

    /// Derivatives f^{(k)} = k!·c[k].
    pub fn derivatives(&self) -> Vec<Real> {
        let mut fact = Float::with_val(self.c[0].prec(), 1);
        self.c
            .iter()
            .enumerate()
            .map(|(k, a)| {
                if k > 1 {
                    fact *= k as u32;
                }
                Float::with_val(a.prec(), a * &fact)
            })
            .collect()
    }
}
