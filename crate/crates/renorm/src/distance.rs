use std::io::Write;

use circlemap::CircleMapSpec;
use numerics::{chebyshev_nodes, linear_fit, to_decimal, FitResult, Real};
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::pair::{renorm_orbit, NormalizedPair};
use crate::RenormError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairDistance {
    /// sup |η̃₁ − η̃₂|, |ξ̃₁ − ξ̃₂| on the common domains, plus |ξ̃₁(0) − ξ̃₂(0)|.
    pub c0: Real,
    /// Same sup for the derivatives.
    pub c1: Real,
}

/// Sup-distances on a Chebyshev mesh of `grid` points per side.
pub fn pair_distance(p1: &NormalizedPair, p2: &NormalizedPair, grid: usize) -> Result<PairDistance, RenormError> {
    let prec = p1.len.prec();
    let (x1, x2) = (p1.xi0(), p2.xi0());
    let right = x1.clone().min(&x2);
    if !right.is_sign_positive() || right.is_zero() {
        return Err(RenormError::IncompatiblePairs);
    }
    let grid = grid.max(16);
    let zero = Float::new(prec);
    let mut c0 = Float::new(prec);
    let mut c1 = Float::new(prec);
    let mut take = |a: (Real, Real), b: (Real, Real)| {
        c0 = c0.clone().max(&Float::with_val(prec, &a.0 - &b.0).abs());
        c1 = c1.clone().max(&Float::with_val(prec, &a.1 - &b.1).abs());
    };
    for t in chebyshev_nodes(&zero, &right, grid) {
        take(p1.eta_d(&t), p2.eta_d(&t));
    }
    for t in chebyshev_nodes(&Float::with_val(prec, -1), &zero, grid) {
        take(p1.xi_d(&t), p2.xi_d(&t));
    }
    c0 += Float::with_val(prec, &x1 - &x2).abs();
    Ok(PairDistance { c0, c1 })
}

/// Distances between the normalized renormalizations of two maps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub levels: Vec<usize>,
    pub c0_dist: Vec<Real>,
    pub c1_dist: Vec<Real>,
    /// Fit of ln c0 against the level; absent when some distance is 0.
    pub lambda_hat: Option<FitResult>,
    /// Every distance was exactly zero (f and g coincide).
    pub identical: bool,
    /// slope < 0 and r² ≥ 0.9.
    pub success: bool,
    /// Set when the orbits stopped before `depth`.
    pub error: Option<String>,
}

/// First level entering the fit.
pub const FIT_FROM: usize = 3;

pub fn convergence_experiment(f: &CircleMapSpec, g: &CircleMapSpec, depth: usize, grid: usize) -> ConvergenceReport {
    let (of, og) = std::thread::scope(|s| {
        let a = s.spawn(|| renorm_orbit(f, depth));
        let b = renorm_orbit(g, depth);
        (a.join().expect("renormalization thread"), b)
    });
    let mut report = ConvergenceReport {
        levels: vec![],
        c0_dist: vec![],
        c1_dist: vec![],
        lambda_hat: None,
        identical: false,
        success: false,
        error: of.error.or(og.error).map(|e| e.to_string()),
    };
    // pairs[k] is level k+1
    for (pf, pg) in of.pairs.iter().zip(&og.pairs).skip(FIT_FROM - 1) {
        match pair_distance(pf, pg, grid) {
            Ok(d) => {
                report.levels.push(pf.pair.level as usize);
                report.c0_dist.push(d.c0);
                report.c1_dist.push(d.c1);
            }
            Err(e) => {
                report.error = Some(e.to_string());
                break;
            }
        }
    }
    report.identical = !report.c0_dist.is_empty() && report.c0_dist.iter().all(|d| d.is_zero());
    if report.c0_dist.len() >= 2 && report.c0_dist.iter().all(|d| !d.is_zero()) {
        let prec = f.prec();
        let xs: Vec<Real> = report.levels.iter().map(|&l| Float::with_val(prec, l)).collect();
        let ys: Vec<Real> = report.c0_dist.iter().map(|d| d.clone().ln()).collect();
        if let Ok(fit) = linear_fit(&xs, &ys) {
            report.success = fit.slope.is_sign_negative() && fit.r_squared >= 0.9;
            report.lambda_hat = Some(fit);
        }
    }
    report
}

impl ConvergenceReport {
    /// Rows level,c0,c1.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), RenormError> {
        let err = |e: csv::Error| RenormError::Csv(e.to_string());
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["level", "c0", "c1"]).map_err(err)?;
        for ((l, a), b) in self.levels.iter().zip(&self.c0_dist).zip(&self.c1_dist) {
            out.write_record([l.to_string(), to_decimal(a), to_decimal(b)]).map_err(err)?;
        }
        out.flush().map_err(|e| RenormError::Csv(e.to_string()))
    }

    /// One line: slope, intercept, r², success.
    pub fn summary(&self) -> String {
        match &self.lambda_hat {
            Some(f) => format!(
                "lambda_hat slope={} intercept={} r2={} success={}",
                f.slope.to_f64(),
                f.intercept.to_f64(),
                f.r_squared.to_f64(),
                self.success
            ),
            None if self.identical => "exact-equality: all distances zero".to_string(),
            None => "no fit".to_string(),
        }
    }
}
