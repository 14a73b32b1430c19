use rug::Float;

use crate::{pow2, Cx, NumericsError, Real};

/// Knobs for [`newton_root_guarded`].
#[derive(Clone, Debug)]
pub struct NewtonOptions {
    pub tol: Real,
    pub max_iter: usize,
    /// Steps longer than this are shortened before damping starts.
    pub max_step: Option<Real>,
}

impl NewtonOptions {
    pub fn new(tol: Real, max_iter: usize) -> Self {
        NewtonOptions { tol, max_iter, max_step: None }
    }
}

const MAX_HALVINGS: usize = 40;

/// Damped Newton for `g(w) = 0`; `g` returns (g(w), g'(w)).
///
/// A step is accepted once it lowers |g|; otherwise it is halved, at most 40
/// times.
pub fn newton_root<G>(g: G, seed: &Cx, tol: &Real, max_iter: usize) -> Result<Cx, NumericsError>
where
    G: Fn(&Cx) -> (Cx, Cx),
{
    newton_root_guarded(g, seed, &NewtonOptions::new(tol.clone(), max_iter), |_| true)
}

/// As [`newton_root`], but every accepted iterate must satisfy `keep`.
pub fn newton_root_guarded<G, K>(
    g: G,
    seed: &Cx,
    opts: &NewtonOptions,
    keep: K,
) -> Result<Cx, NumericsError>
where
    G: Fn(&Cx) -> (Cx, Cx),
    K: Fn(&Cx) -> bool,
{
    let prec = seed.prec();
    let tiny = pow2(prec, 8 - prec as i32);
    let mut w = seed.clone();
    let (mut r, mut d) = g(&w);
    for iter in 0..opts.max_iter {
        let res = r.abs();
        if res <= opts.tol {
            return Ok(w);
        }
        if d.abs() < tiny {
            return Err(NumericsError::DerivativeVanished { iter });
        }
        let mut step = r.div(&d);
        if let Some(cap) = &opts.max_step {
            let len = step.abs();
            if len > *cap {
                step = step.scale(&Float::with_val(prec, cap / &len));
            }
        }
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let cand = &w - &step;
            if cand.is_finite() {
                let (rc, dc) = g(&cand);
                if rc.is_finite() && rc.abs() < res {
                    accepted = Some((cand, rc, dc));
                    break;
                }
            }
            step = step.scale(&Float::with_val(prec, 0.5));
        }
        let Some((cand, rc, dc)) = accepted else {
            return Err(NumericsError::NoConvergence { max_iter: opts.max_iter });
        };
        if !keep(&cand) {
            return Err(NumericsError::Escaped { iter });
        }
        w = cand;
        r = rc;
        d = dc;
    }
    if r.abs() <= opts.tol {
        return Ok(w);
    }
    Err(NumericsError::NoConvergence { max_iter: opts.max_iter })
}
