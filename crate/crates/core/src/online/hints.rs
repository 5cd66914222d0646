//! Running a learner for curved sets on a general body through `K_t`.

use serde::{Deserialize, Serialize};

use crate::body::ConvexBody;
use crate::curving::{choose_t_for_eps, CurvedBody, CurvedOracle, TChoice};
use crate::error::{Error, Result};
use crate::oracle::Vector;

use super::ftl::{FtlLearner, GameTrace, Learner};

/// An inner learner playing on `K_t ⊆ K`, with `t` chosen so that
/// `K ⊆ (1 + ε)·K_t`.
#[derive(Debug, Clone)]
pub struct HintsReduction<L> {
    pub base: ConvexBody,
    pub curved: CurvedBody,
    pub choice: TChoice,
    pub eps: f64,
    pub inner: L,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HintsReport {
    pub t: f64,
    pub eps: f64,
    /// `σ_K(s_T)`.
    pub opt: f64,
    /// Certified lower bound on `σ_{K_t}(s_T)`.
    pub opt_curved: f64,
    pub ratio: f64,
    /// `OPT_{K_t} ≥ (1 - ε)·OPT`.
    pub holds: bool,
    /// Largest gauge in `K` over the played actions.
    pub max_action_gauge: f64,
    pub feasible: bool,
}

/// Builds `K_t` from the sandwich radii of `base` and hands it to `factory`
/// to create the inner learner.
pub fn hints_reduction<L, F>(base: ConvexBody, eps: f64, factory: F) -> Result<HintsReduction<L>>
where
    F: FnOnce(&CurvedBody) -> L,
{
    let radii = base.sandwich_radii();
    let choice = choose_t_for_eps(radii.r, radii.big_r, eps)?;
    let curved = CurvedBody::new(base.clone(), radii.r, choice.t)?;
    let inner = factory(&curved);
    Ok(HintsReduction { base, curved, choice, eps, inner })
}

impl HintsReduction<FtlLearner<CurvedOracle>> {
    /// The default inner learner: FTL over `K_t` with δ-precision linear optimization.
    pub fn ftl(base: ConvexBody, eps: f64, delta: f64) -> Result<Self> {
        hints_reduction(base, eps, |curved| {
            FtlLearner::new(CurvedOracle::new(curved.clone(), delta), Vector::zeros(curved.dim()))
        })
    }
}

impl<L> HintsReduction<L> {
    /// Compares the best fixed actions in `K` and `K_t` for the realized gains
    /// and checks the played actions against `K`.
    pub fn report(&self, trace: &GameTrace) -> Result<HintsReport> {
        let s = trace.final_sum();
        let opt = self.base.support(s);
        let opt_curved = if s.iter().all(|&v| v == 0.0) {
            0.0
        } else {
            let delta = 1e-9 * (1.0 + s.norm());
            self.curved
                .weak_optimize(s, delta, 1000)
                .map_err(|e| Error::OracleFailure(Box::new(e)))?
                .value
        };
        let ratio = if opt > 0.0 { opt_curved / opt } else { 1.0 };
        let max_action_gauge = trace.actions.iter().map(|x| self.base.gauge(x)).fold(0.0, f64::max);
        Ok(HintsReport {
            t: self.choice.t,
            eps: self.eps,
            opt,
            opt_curved,
            ratio,
            holds: opt_curved >= (1.0 - self.eps) * opt,
            max_action_gauge,
            feasible: max_action_gauge <= 1.0 + 1e-9,
        })
    }
}

impl<L: Learner> Learner for HintsReduction<L> {
    fn act(&mut self, hint: Option<&Vector>) -> Result<Vector> {
        self.inner.act(hint)
    }

    fn observe(&mut self, gain: &Vector) {
        self.inner.observe(gain)
    }
}
