//! Self-critical sequence loss and its mix with maximum likelihood.

use crate::rouge::Reward;

use super::{ModelError, TokenId, Vocab};

/// Weight of the reinforcement term in the combined loss.
pub const DEFAULT_GAMMA: f64 = 0.9;

#[derive(Debug, Clone)]
pub struct RlLossInputs {
    /// Greedy-search output.
    pub greedy: Vec<TokenId>,
    /// Sampled output.
    pub sampled: Vec<TokenId>,
    /// Ground truth.
    pub reference: Vec<TokenId>,
    /// `log P(sampled | x)`, natural log, at most 0.
    pub sampled_logprob: f64,
    pub reward: Reward,
    pub gamma: f64,
    /// Maximum-likelihood loss, at least 0.
    pub ml_loss: f64,
}

impl RlLossInputs {
    pub fn validate(&self) -> Result<(), ModelError> {
        check_gamma(self.gamma)?;
        if self.sampled_logprob.is_nan() || self.sampled_logprob > 0.0 {
            return Err(ModelError::InvalidLossInput(format!(
                "log-probability must be <= 0, got {}",
                self.sampled_logprob
            )));
        }
        if self.ml_loss.is_nan() || self.ml_loss < 0.0 {
            return Err(ModelError::InvalidLossInput(format!(
                "ML loss must be >= 0, got {}",
                self.ml_loss
            )));
        }
        Ok(())
    }

    /// `γ·L_RL + (1 − γ)·L_ML` for these inputs.
    pub fn total_loss(&self, vocab: &Vocab) -> Result<f64, ModelError> {
        combined_loss(rl_loss(self, vocab)?, self.ml_loss, self.gamma)
    }
}

fn check_gamma(gamma: f64) -> Result<(), ModelError> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(ModelError::InvalidLossInput(format!(
            "gamma must be in [0, 1], got {gamma}"
        )));
    }
    Ok(())
}

/// `(R(greedy, y) − R(sampled, y)) · log P(sampled | x)`.
pub fn rl_loss_from_rewards(greedy_reward: f64, sampled_reward: f64, sampled_logprob: f64) -> f64 {
    (greedy_reward - sampled_reward) * sampled_logprob
}

/// Scores both outputs against the reference on their detokenized text.
pub fn rl_loss(inputs: &RlLossInputs, vocab: &Vocab) -> Result<f64, ModelError> {
    inputs.validate()?;
    let reference = vocab.decode(&inputs.reference);
    let greedy = inputs.reward.score_text(&vocab.decode(&inputs.greedy), &reference);
    let sampled = inputs.reward.score_text(&vocab.decode(&inputs.sampled), &reference);
    if greedy == sampled {
        return Ok(0.0);
    }
    Ok(rl_loss_from_rewards(greedy, sampled, inputs.sampled_logprob))
}

pub fn combined_loss(l_rl: f64, l_ml: f64, gamma: f64) -> Result<f64, ModelError> {
    check_gamma(gamma)?;
    Ok(gamma * l_rl + (1.0 - gamma) * l_ml)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::EOS;

    fn vocab() -> Vocab {
        Vocab::from_words(["acute", "kidney", "injury", "sepsis"])
    }

    fn ids(v: &Vocab, text: &str) -> Vec<TokenId> {
        let mut out = v.encode(text);
        out.push(EOS);
        out
    }

    fn inputs(v: &Vocab, greedy: &str, sampled: &str, logprob: f64) -> RlLossInputs {
        RlLossInputs {
            greedy: ids(v, greedy),
            sampled: ids(v, sampled),
            reference: ids(v, "acute kidney injury"),
            sampled_logprob: logprob,
            reward: Reward::default(),
            gamma: DEFAULT_GAMMA,
            ml_loss: 1.0,
        }
    }

    #[test]
    fn worked_examples() {
        let l = rl_loss_from_rewards(0.5, 0.7, -2.0);
        assert!((l - 0.4).abs() < 1e-15);
        let c = combined_loss(0.4, 1.0, 0.9).unwrap();
        assert!((c - 0.46).abs() < 1e-15);
        assert_eq!(combined_loss(0.3, 0.3, 0.25).unwrap(), 0.3);
        assert_eq!(combined_loss(0.4, 1.7, 0.0).unwrap(), 1.7);
    }

    #[test]
    fn identical_outputs_give_zero() {
        let v = vocab();
        let x = inputs(&v, "acute sepsis", "acute sepsis", -3.0);
        assert_eq!(rl_loss(&x, &v).unwrap(), 0.0);
    }

    #[test]
    fn equal_rewards_give_zero() {
        let v = vocab();
        // Both share exactly one token with the reference.
        let x = inputs(&v, "acute sepsis", "kidney sepsis", -1.5);
        assert_eq!(rl_loss(&x, &v).unwrap(), 0.0);
    }

    #[test]
    fn better_sample_is_rewarded() {
        let v = vocab();
        let x = inputs(&v, "sepsis", "acute kidney injury", -1.0);
        // Greedy scores 0, sample scores 1: loss = (0 − 1)·(−1) = 1.
        assert_eq!(rl_loss(&x, &v).unwrap(), 1.0);
        let total = x.total_loss(&v).unwrap();
        assert!((total - (0.9 * 1.0 + 0.1 * 1.0)).abs() < 1e-15);
    }

    #[test]
    fn invalid_inputs() {
        let v = vocab();
        let mut x = inputs(&v, "a", "b", 0.5);
        assert!(rl_loss(&x, &v).is_err());
        x.sampled_logprob = -1.0;
        x.gamma = 1.5;
        assert!(rl_loss(&x, &v).is_err());
        assert!(combined_loss(0.0, 0.0, -0.1).is_err());
    }
}
