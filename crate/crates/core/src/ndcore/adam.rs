//! Adam optimizer with first/second moment accumulators and bias correction.

use serde::{Deserialize, Serialize};

use super::element::Element;
use super::tensor::Tensor;
use crate::error::{Error, Result};

/// Optimizer hyperparameters.
///
/// `decoupled_weight_decay = false` (the default) applies weight decay as a
/// classic L2 term, `grad += weight_decay * param`, before the moment
/// update; `true` switches to the decoupled variant applied directly to the
/// parameters.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub weight_decay: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    #[serde(default)]
    pub decoupled_weight_decay: bool,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            learning_rate: 3e-4,
            weight_decay: 1e-5,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            decoupled_weight_decay: false,
        }
    }
}

/// Per-parameter moment state; aligned index-for-index with the parameter list.
pub struct AdamState<E: Element> {
    config: AdamConfig,
    step: u64,
    m: Vec<Vec<E>>,
    v: Vec<Vec<E>>,
}

impl<E: Element> AdamState<E> {
    pub fn new(config: AdamConfig, params: &[Tensor<E>]) -> Self {
        AdamState {
            config,
            step: 0,
            m: params.iter().map(|p| vec![E::ZERO; p.len()]).collect(),
            v: params.iter().map(|p| vec![E::ZERO; p.len()]).collect(),
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    pub fn config(&self) -> &AdamConfig {
        &self.config
    }

    /// One update over all parameters; `grads` must align with `params`.
    pub fn step(&mut self, params: &mut [Tensor<E>], grads: &[&Tensor<E>]) -> Result<()> {
        if params.len() != grads.len() || params.len() != self.m.len() {
            return Err(Error::invalid(
                "adam_step",
                format!(
                    "param/grad/state length mismatch: {} vs {} vs {}",
                    params.len(),
                    grads.len(),
                    self.m.len()
                ),
            ));
        }
        for (p, g) in params.iter().zip(grads.iter()) {
            if p.shape() != g.shape() {
                return Err(Error::ShapeMismatch {
                    op: "adam_step",
                    lhs: p.shape().to_vec(),
                    rhs: g.shape().to_vec(),
                });
            }
        }
        self.step += 1;
        let t = self.step as i32;
        let b1 = E::from_f64(self.config.beta1);
        let b2 = E::from_f64(self.config.beta2);
        let one_m_b1 = E::from_f64(1.0 - self.config.beta1);
        let one_m_b2 = E::from_f64(1.0 - self.config.beta2);
        let eps = E::from_f64(self.config.epsilon);
        let lr = E::from_f64(self.config.learning_rate);
        let wd = E::from_f64(self.config.weight_decay);
        // Bias correction folded into a step-dependent scale.
        let corr1 = E::from_f64(1.0 - self.config.beta1.powi(t));
        let corr2 = E::from_f64(1.0 - self.config.beta2.powi(t));
        let decoupled = self.config.decoupled_weight_decay;

        for ((p, g), (m, v)) in params
            .iter_mut()
            .zip(grads.iter())
            .zip(self.m.iter_mut().zip(self.v.iter_mut()))
        {
            let gd = g.data();
            p.update_in_place(|pd| {
                for i in 0..pd.len() {
                    let mut gi = gd[i];
                    if !decoupled {
                        gi += wd * pd[i];
                    }
                    m[i] = b1 * m[i] + one_m_b1 * gi;
                    v[i] = b2 * v[i] + one_m_b2 * gi * gi;
                    let m_hat = m[i] / corr1;
                    let v_hat = v[i] / corr2;
                    let mut upd = lr * m_hat / (v_hat.sqrt() + eps);
                    if decoupled {
                        upd += lr * wd * pd[i];
                    }
                    pd[i] -= upd;
                }
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(lr: f64, wd: f64) -> AdamConfig {
        AdamConfig {
            learning_rate: lr,
            weight_decay: wd,
            ..AdamConfig::default()
        }
    }

    #[test]
    fn zero_grad_zero_decay_is_fixed_point() {
        let mut params = vec![Tensor::<f64>::new(vec![3], vec![1.0, -2.0, 0.5]).unwrap()];
        let before = params[0].to_vec();
        let grads = [Tensor::<f64>::zeros(vec![3])];
        let mut state = AdamState::new(cfg(3e-4, 0.0), &params);
        for _ in 0..5 {
            let grefs: Vec<&Tensor<f64>> = grads.iter().collect();
            state.step(&mut params, &grefs).unwrap();
        }
        assert_eq!(params[0].to_vec(), before);
    }

    #[test]
    fn first_step_moves_by_learning_rate() {
        // Bias-corrected first step with grad 1 moves by ≈ lr.
        let mut params = vec![Tensor::<f64>::new(vec![1], vec![1.0]).unwrap()];
        let grads = [Tensor::<f64>::new(vec![1], vec![1.0]).unwrap()];
        let mut state = AdamState::new(cfg(3e-4, 0.0), &params);
        let grefs: Vec<&Tensor<f64>> = grads.iter().collect();
        state.step(&mut params, &grefs).unwrap();
        let moved = 1.0 - params[0].data()[0];
        assert!((moved - 3e-4).abs() < 1e-9, "moved {moved}");
        assert_eq!(state.step_count(), 1);
    }

    #[test]
    fn descends_scalar_quadratic() {
        // 100 steps on (w - 3)^2 from w = 0 with lr = 0.1 gets close to 3.
        let mut params = vec![Tensor::<f64>::new(vec![1], vec![0.0]).unwrap()];
        let mut state = AdamState::new(cfg(0.1, 0.0), &params);
        for _ in 0..100 {
            let w = params[0].data()[0];
            let grad = Tensor::<f64>::new(vec![1], vec![2.0 * (w - 3.0)]).unwrap();
            state.step(&mut params, &[&grad]).unwrap();
        }
        let w = params[0].data()[0];
        assert!((w - 3.0).abs() < 0.5, "w = {w}");
    }

    #[test]
    fn shape_mismatch_is_error() {
        let mut params = vec![Tensor::<f64>::zeros(vec![2])];
        let grad = Tensor::<f64>::zeros(vec![3]);
        let mut state = AdamState::new(AdamConfig::default(), &params);
        assert!(state.step(&mut params, &[&grad]).is_err());
    }

    #[test]
    fn step_counter_increments() {
        let mut params = vec![Tensor::<f64>::zeros(vec![1])];
        let grad = Tensor::<f64>::zeros(vec![1]);
        let mut state = AdamState::new(AdamConfig::default(), &params);
        for expect in 1..=4 {
            state.step(&mut params, &[&grad]).unwrap();
            assert_eq!(state.step_count(), expect);
        }
    }
}
