use circlemap::CircleMapSpec;
use numerics::{Cx, Real};
use rug::Float;
use serde::{Deserialize, Serialize};

/// x ↦ F^q(x) − p on the lift.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub q: u64,
    pub p: i64,
}

/// A composition of blocks, applied first to last. Because F commutes with
/// integer translation, every program equals a single block (q, p) in exact
/// arithmetic; keeping the blocks preserves the evaluation path.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Program {
    pub blocks: Vec<Block>,
}

impl Program {
    pub fn block(q: u64, p: i64) -> Self {
        Program { blocks: vec![Block { q, p }] }
    }

    /// Total iterate count and winding.
    pub fn net(&self) -> Block {
        self.blocks.iter().fold(Block { q: 0, p: 0 }, |a, b| Block { q: a.q + b.q, p: a.p + b.p })
    }

    /// `self ∘ inner`.
    pub fn after(&self, inner: &Program) -> Program {
        let mut blocks = inner.blocks.clone();
        blocks.extend_from_slice(&self.blocks);
        Program { blocks }
    }

    pub fn power(&self, a: u64) -> Program {
        let mut blocks = Vec::with_capacity(self.blocks.len() * a as usize);
        for _ in 0..a {
            blocks.extend_from_slice(&self.blocks);
        }
        Program { blocks }
    }

    pub fn eval(&self, spec: &CircleMapSpec, x: &Real) -> Real {
        let mut y = x.clone();
        for b in &self.blocks {
            for _ in 0..b.q {
                y = spec.lift(&y);
            }
            y -= b.p;
        }
        y
    }

    /// Value and derivative (chain rule over closed-form F').
    pub fn eval_d(&self, spec: &CircleMapSpec, x: &Real) -> (Real, Real) {
        let mut y = x.clone();
        let mut d = Float::with_val(x.prec(), 1);
        for b in &self.blocks {
            for _ in 0..b.q {
                let (v, dv) = spec.lift_d(&y);
                y = v;
                d *= dv;
            }
            y -= b.p;
        }
        (y, d)
    }

    pub fn eval_cx(&self, spec: &CircleMapSpec, z: &Cx) -> (Cx, Cx) {
        let prec = z.prec();
        let mut y = z.clone();
        let mut d = Cx::from_real(&Float::with_val(prec, 1));
        for b in &self.blocks {
            for _ in 0..b.q {
                let (v, dv) = spec.lift_cx_d(&y);
                y = v;
                d = &d * &dv;
            }
            y = y.sub_real(&Float::with_val(prec, b.p));
        }
        (y, d)
    }
}
