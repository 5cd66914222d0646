use crate::body::ConvexBody;
use crate::error::{Error, Result};
use crate::oracle::{GaugeBody, LinearOracle, Vector};

use super::adversary::Adversary;

/// Gauge slack allowed for played actions.
const FEASIBILITY_TOL: f64 = 1e-9;

pub trait Learner {
    /// The action for the next round, given the hint for that round if any.
    fn act(&mut self, hint: Option<&Vector>) -> Result<Vector>;

    fn observe(&mut self, gain: &Vector);
}

impl<L: Learner + ?Sized> Learner for Box<L> {
    fn act(&mut self, hint: Option<&Vector>) -> Result<Vector> {
        (**self).act(hint)
    }

    fn observe(&mut self, gain: &Vector) {
        (**self).observe(gain)
    }
}

/// The FTL action: the maximizer of the cumulative gain, or `fallback` before any gain.
pub fn ftl_step(body: &ConvexBody, s_prev: &Vector, fallback: &Vector) -> Vector {
    if s_prev.iter().all(|&v| v == 0.0) {
        fallback.clone()
    } else {
        body.support_argmax(s_prev)
    }
}

/// Follow the Leader over any linear oracle.
#[derive(Debug, Clone)]
pub struct FtlLearner<O> {
    oracle: O,
    sum: Vector,
    fallback: Vector,
}

impl<O: LinearOracle> FtlLearner<O> {
    pub fn new(oracle: O, fallback: Vector) -> Self {
        let sum = Vector::zeros(oracle.dim());
        Self { oracle, sum, fallback }
    }

    pub fn oracle(&self) -> &O {
        &self.oracle
    }
}

impl FtlLearner<ConvexBody> {
    /// FTL over a body, starting from its anchor point.
    pub fn on_body(body: ConvexBody) -> Self {
        let fallback = body.anchor();
        Self::new(body, fallback)
    }
}

impl<O: LinearOracle> Learner for FtlLearner<O> {
    fn act(&mut self, _hint: Option<&Vector>) -> Result<Vector> {
        if self.sum.iter().all(|&v| v == 0.0) {
            return Ok(self.fallback.clone());
        }
        Ok(self.oracle.maximize(&self.sum)?.point)
    }

    fn observe(&mut self, gain: &Vector) {
        self.sum += gain;
    }
}

/// A played game. Index `t - 1` holds round `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct GameTrace {
    pub gains: Vec<Vector>,
    pub actions: Vec<Vector>,
    /// `s_t = g_1 + … + g_t`.
    pub prefix_sums: Vec<Vector>,
    /// `⟨g_t, x_t⟩`.
    pub round_gains: Vec<f64>,
    pub hints: Option<Vec<Vector>>,
}

impl GameTrace {
    pub fn horizon(&self) -> usize {
        self.gains.len()
    }

    pub fn realized_gain(&self) -> f64 {
        self.round_gains.iter().sum()
    }

    pub fn final_sum(&self) -> &Vector {
        self.prefix_sums.last().expect("non-empty trace")
    }
}

/// Plays `horizon` rounds: the learner acts, then the adversary's gain is revealed.
pub fn play_game<B, L>(
    body: &B,
    learner: &mut L,
    adversary: &Adversary,
    horizon: usize,
) -> Result<GameTrace>
where
    B: GaugeBody + ?Sized,
    L: Learner + ?Sized,
{
    if horizon == 0 {
        return Err(Error::DomainError("horizon must be at least 1".into()));
    }
    let schedule = adversary.schedule(body.dim(), horizon)?;
    let mut actions = Vec::with_capacity(horizon);
    let mut prefix_sums = Vec::with_capacity(horizon);
    let mut round_gains = Vec::with_capacity(horizon);
    let mut s = Vector::zeros(body.dim());
    for (i, g) in schedule.gains.iter().enumerate() {
        let hint = schedule.hints.as_ref().map(|h| &h[i]);
        let x = learner.act(hint)?;
        let gauge = body.gauge(&x);
        if !(gauge <= 1.0 + FEASIBILITY_TOL) {
            return Err(Error::InfeasibleAction { round: i + 1, gauge });
        }
        learner.observe(g);
        s += g;
        round_gains.push(g.dot(&x));
        actions.push(x);
        prefix_sums.push(s.clone());
    }
    Ok(GameTrace { gains: schedule.gains, actions, prefix_sums, round_gains, hints: schedule.hints })
}
