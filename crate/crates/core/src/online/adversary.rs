//! Oblivious adversaries. Every sequence is generated up front from the seed
//! and checked against the adversary's own promise before it is played.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::Vector;
use crate::rng::{stream_rng, streams, unit_vector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoisePattern {
    /// Noise magnitude uniform in `[-N, N]`.
    Uniform,
    /// Noise of full magnitude with alternating sign.
    Alternating,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AdversaryKind {
    /// `g_t = G·e₁ + ξ_t` with `ξ_t ⊥ e₁` and `‖ξ_t‖ ≤ √(M² - G²)`, so
    /// `‖s_t‖ ≥ ⟨s_t, e₁⟩ = tG` and `‖g_t‖ ≤ M`.
    GrowthCondition { g: f64, m: f64, pattern: NoisePattern },
    /// i.i.d. gains with coordinates uniform in `[0, M/√d]`.
    NonNegative { m: f64 },
    /// `g₁ = (1, 0.01)`, then `(1, -0.1)` and `(1, 0.1)` alternating. Two dimensions only.
    AlternatingBad,
    /// Random gains of norm at most `M` with unit hints satisfying `⟨h, g⟩ ≥ α‖g‖`.
    Hinted { alpha: f64, m: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Adversary {
    pub kind: AdversaryKind,
    pub seed: u64,
}

/// A full gain sequence, with hints for the hinted adversary.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub gains: Vec<Vector>,
    pub hints: Option<Vec<Vector>>,
}

fn orthogonal_unit(rng: &mut crate::rng::SeededRng, to: &Vector) -> Vector {
    let d = to.len();
    if d == 1 {
        return Vector::zeros(1);
    }
    loop {
        let w = unit_vector(rng, d);
        let w = &w - to * to.dot(&w);
        let n = w.norm();
        if n > 1e-8 {
            return w / n;
        }
    }
}

impl Adversary {
    pub fn new(kind: AdversaryKind, seed: u64) -> Self {
        Self { kind, seed }
    }

    fn validate(&self, dim: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::DomainError(msg));
        match self.kind {
            AdversaryKind::GrowthCondition { g, m, .. } => {
                if !(g > 0.0 && m >= g) {
                    return bad(format!("growth adversary needs 0 < G ≤ M, got G = {g}, M = {m}"));
                }
            }
            AdversaryKind::NonNegative { m } => {
                if !(m > 0.0) {
                    return bad(format!("M must be positive, got {m}"));
                }
            }
            AdversaryKind::AlternatingBad => {
                if dim != 2 {
                    return bad(format!("the alternating adversary lives in two dimensions, got {dim}"));
                }
            }
            AdversaryKind::Hinted { alpha, m } => {
                if !(alpha > 0.0 && alpha <= 1.0 && m > 0.0) {
                    return bad(format!("hinted adversary needs α ∈ (0, 1] and M > 0, got α = {alpha}, M = {m}"));
                }
            }
        }
        Ok(())
    }

    /// The gains for rounds `1..=horizon`, verified against the adversary's promise.
    pub fn schedule(&self, dim: usize, horizon: usize) -> Result<Schedule> {
        self.validate(dim)?;
        let mut rng = stream_rng(self.seed, streams::GAINS);
        let mut hints = None;
        let gains: Vec<Vector> = match self.kind {
            AdversaryKind::GrowthCondition { g, m, pattern } => {
                let e = {
                    let mut e = Vector::zeros(dim);
                    e[0] = 1.0;
                    e
                };
                let noise = (m * m - g * g).max(0.0).sqrt();
                // alternating noise uses one fixed direction so consecutive rounds cancel
                let fixed = orthogonal_unit(&mut stream_rng(self.seed, streams::AUX), &e);
                (0..horizon)
                    .map(|t| match pattern {
                        NoisePattern::Uniform => {
                            let w = orthogonal_unit(&mut rng, &e);
                            &e * g + w * rng.random_range(-noise..=noise)
                        }
                        NoisePattern::Alternating => {
                            let sign = if t % 2 == 0 { 1.0 } else { -1.0 };
                            &e * g + &fixed * (sign * noise)
                        }
                    })
                    .collect()
            }
            AdversaryKind::NonNegative { m } => {
                let scale = m / (dim as f64).sqrt();
                (0..horizon)
                    .map(|_| Vector::from_fn(dim, |_, _| scale * rng.random::<f64>()))
                    .collect()
            }
            AdversaryKind::AlternatingBad => (0..horizon)
                .map(|t| match t {
                    0 => Vector::from_vec(vec![1.0, 0.01]),
                    t if t % 2 == 1 => Vector::from_vec(vec![1.0, -0.1]),
                    _ => Vector::from_vec(vec![1.0, 0.1]),
                })
                .collect(),
            AdversaryKind::Hinted { alpha, m } => {
                let mut hs = Vec::with_capacity(horizon);
                let gs = (0..horizon)
                    .map(|_| {
                        let dir = unit_vector(&mut rng, dim);
                        let size = m * rng.random::<f64>();
                        let h = if dim == 1 {
                            dir.clone()
                        } else {
                            // cosine with the gain drawn in [α, 1]
                            let lo = alpha.min(1.0).acos();
                            let angle = rng.random_range(0.0..=lo.min(PI));
                            let w = orthogonal_unit(&mut rng, &dir);
                            &dir * angle.cos() + w * angle.sin()
                        };
                        hs.push(h);
                        dir * size
                    })
                    .collect();
                hints = Some(hs);
                gs
            }
        };
        let schedule = Schedule { gains, hints };
        self.verify(&schedule)?;
        Ok(schedule)
    }

    /// Checks the adversary's promise on a realized sequence.
    pub fn verify(&self, schedule: &Schedule) -> Result<()> {
        let violation = |round: usize, reason: String| Err(Error::AdversaryViolation { round, reason });
        match self.kind {
            AdversaryKind::GrowthCondition { g, m, .. } => {
                let mut s = Vector::zeros(schedule.gains.first().map_or(0, |v| v.len()));
                for (i, gt) in schedule.gains.iter().enumerate() {
                    let t = i + 1;
                    s += gt;
                    if s.norm() < t as f64 * g * (1.0 - 1e-12) {
                        return violation(t, format!("‖s_t‖ = {} < tG = {}", s.norm(), t as f64 * g));
                    }
                    if gt.norm() > m * (1.0 + 1e-12) {
                        return violation(t, format!("‖g_t‖ = {} > M = {m}", gt.norm()));
                    }
                }
            }
            AdversaryKind::NonNegative { m } => {
                for (i, gt) in schedule.gains.iter().enumerate() {
                    if gt.iter().any(|&v| v < 0.0) {
                        return violation(i + 1, "negative coordinate".into());
                    }
                    if gt.norm() > m * (1.0 + 1e-12) {
                        return violation(i + 1, format!("‖g_t‖ = {} > M = {m}", gt.norm()));
                    }
                }
            }
            AdversaryKind::AlternatingBad => {}
            AdversaryKind::Hinted { alpha, .. } => {
                let hints = schedule.hints.as_ref().ok_or_else(|| Error::AdversaryViolation {
                    round: 0,
                    reason: "missing hints".into(),
                })?;
                for (i, (gt, h)) in schedule.gains.iter().zip(hints).enumerate() {
                    if (h.norm() - 1.0).abs() > 1e-12 {
                        return violation(i + 1, format!("hint norm {}", h.norm()));
                    }
                    if h.dot(gt) < alpha * gt.norm() - 1e-12 {
                        return violation(i + 1, format!("⟨h, g⟩ = {} < α‖g‖", h.dot(gt)));
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn growth_condition_holds() {
        for pattern in [NoisePattern::Uniform, NoisePattern::Alternating] {
            let adv = Adversary::new(AdversaryKind::GrowthCondition { g: 0.5, m: 1.0, pattern }, 3);
            let sch = adv.schedule(3, 500).unwrap();
            assert_eq!(sch.gains.len(), 500);
            assert!(sch.gains.iter().all(|g| g.norm() <= 1.0 + 1e-12));
        }
    }

    #[test]
    fn nonnegative_and_hinted() {
        let sch = Adversary::new(AdversaryKind::NonNegative { m: 1.0 }, 1).schedule(5, 100).unwrap();
        assert!(sch.gains.iter().all(|g| g.iter().all(|&v| v >= 0.0) && g.norm() <= 1.0));
        let sch = Adversary::new(AdversaryKind::Hinted { alpha: 0.3, m: 2.0 }, 1).schedule(3, 100).unwrap();
        assert_eq!(sch.hints.unwrap().len(), 100);
    }

    #[test]
    fn alternating_sequence() {
        let sch = Adversary::new(AdversaryKind::AlternatingBad, 0).schedule(2, 4).unwrap();
        let want = [[1.0, 0.01], [1.0, -0.1], [1.0, 0.1], [1.0, -0.1]];
        for (g, w) in sch.gains.iter().zip(want) {
            assert_eq!(g.as_slice(), &w);
        }
        assert!(Adversary::new(AdversaryKind::AlternatingBad, 0).schedule(3, 4).is_err());
    }

    #[test]
    fn verify_catches_broken_promise() {
        let adv = Adversary::new(
            AdversaryKind::GrowthCondition { g: 0.5, m: 1.0, pattern: NoisePattern::Uniform },
            0,
        );
        let bad = Schedule {
            gains: vec![Vector::from_vec(vec![1.0, 0.0]), Vector::from_vec(vec![-1.0, 0.0])],
            hints: None,
        };
        assert!(matches!(adv.verify(&bad), Err(Error::AdversaryViolation { round: 2, .. })));
    }
}
