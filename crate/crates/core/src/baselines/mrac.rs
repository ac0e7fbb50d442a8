//! Model reference adaptive control in the rate domain.
//!
//! The plant abstraction is the same first-order `ẋ = f(x) + ĝu` used by
//! DNAC. The adaptive law drives `x` toward a reference model
//! `ẋ_m = A_m x_m + B_m r` with the rate command
//! `v = A_m x + B_m r − K_e e_m − Ŵᵀφ(x)`, `e_m = x − x_m`, and the output
//! torque is `ĝ⁻¹ v`. With `f = Wᵀφ` the model-following error obeys
//! `ė_m = (A_m − K_e) e_m − W̃ᵀφ`, and `Ŵ̇ = Γ φ e_mᵀ P` makes
//! `V = e_mᵀPe_m + tr(W̃ᵀΓ⁻¹W̃)` non-increasing.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{is_positive_definite, solve_lyapunov, Matrix};
use crate::ode::rk4_step;
use crate::scalar::{all_finite, Real};

/// Reference model, gains and basis-independent settings shared by MRAC and
/// DMRAC.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MracConfig {
    /// Reference-model state matrix, row-major rows.
    pub a_m: Vec<Vec<f64>>,
    pub b_m: Vec<Vec<f64>>,
    /// Weighting in `A_mᵀP + PA_m = −Q`.
    pub q: Vec<Vec<f64>>,
    /// Scalar adaptation gain `Γ_m`.
    pub gamma: f64,
    /// Diagonal feedback on the model-following error.
    pub k_e: Vec<f64>,
    /// Diagonal control-effectiveness estimate.
    pub g_hat: Vec<f64>,
    /// `‖Ŵ‖_F` above this is treated as divergence.
    pub w_norm_bound: f64,
}

fn diag(v: f64, n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { v } else { 0.0 }).collect())
        .collect()
}

impl Default for MracConfig {
    fn default() -> Self {
        Self {
            a_m: diag(-4.0, 2),
            b_m: diag(4.0, 2),
            q: diag(1.0, 2),
            gamma: 10.0,
            k_e: vec![1.0, 1.0],
            g_hat: vec![100.0, 100.0],
            w_norm_bound: 1e3,
        }
    }
}

fn to_matrix<T: Real>(rows: &[Vec<f64>], n: usize, name: &str) -> Result<Matrix<T>> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(Error::config(format!("mrac: {name} must be {n}x{n}")));
    }
    Matrix::from_row_major(n, n, rows.iter().flatten().map(|&v| T::lit(v)).collect())
}

impl MracConfig {
    pub fn state_dim(&self) -> usize {
        self.g_hat.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.state_dim();
        if n == 0 || self.k_e.len() != n {
            return Err(Error::config("mrac: g_hat and k_e must have the same non-zero length"));
        }
        if self.g_hat.iter().any(|&g| !(g > 0.0)) || self.k_e.iter().any(|&k| !(k >= 0.0)) {
            return Err(Error::config("mrac: g_hat must be positive and k_e non-negative"));
        }
        if !(self.gamma > 0.0) || !(self.w_norm_bound > 0.0) {
            return Err(Error::config("mrac: gamma and w_norm_bound must be positive"));
        }
        ModelReferenceLaw::<f64>::new(self).map(|_| ())
    }
}

/// `ẋ_m = A_m x_m + B_m r`, advanced with RK4 under a held `r`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceModel<T: Real> {
    a_m: Matrix<T>,
    b_m: Matrix<T>,
    x_m: Vec<T>,
}

impl<T: Real> ReferenceModel<T> {
    pub fn new(a_m: Matrix<T>, b_m: Matrix<T>) -> Result<Self> {
        let n = a_m.rows();
        if a_m.cols() != n || b_m.rows() != n {
            return Err(Error::config("reference model: A_m must be square and B_m match it"));
        }
        Ok(Self {
            a_m,
            b_m,
            x_m: vec![T::zero(); n],
        })
    }

    pub fn state(&self) -> &[T] {
        &self.x_m
    }

    pub fn reset(&mut self, x0: &[T]) -> Result<()> {
        if x0.len() != self.x_m.len() {
            return Err(Error::config("reference model reset: wrong dimension"));
        }
        self.x_m = x0.to_vec();
        Ok(())
    }

    pub fn derivative(&self, x_m: &[T], r: &[T]) -> Vec<T> {
        let ax = self.a_m.mul_vec(x_m);
        let br = self.b_m.mul_vec(r);
        ax.iter().zip(&br).map(|(&a, &b)| a + b).collect()
    }

    pub fn step(&mut self, r: &[T], dt: T) -> Result<()> {
        if r.len() != self.b_m.cols() {
            return Err(Error::config("reference model: wrong input dimension"));
        }
        self.x_m = rk4_step(&self.x_m, dt, |x: &Vec<T>| Ok(self.derivative(x, r)))?;
        Ok(())
    }
}

/// Fixed quadratic basis `[1, x_i, x_i², x_i x_j (i < j)]`; for two states
/// this is `[1, φ, θ, φ², θ², φθ]`.
pub fn quadratic_basis<T: Real>(x: &[T]) -> Vec<T> {
    let n = x.len();
    let mut out = Vec::with_capacity(1 + 2 * n + n * (n - 1) / 2);
    out.push(T::one());
    out.extend_from_slice(x);
    out.extend(x.iter().map(|&v| v * v));
    for i in 0..n {
        for j in i + 1..n {
            out.push(x[i] * x[j]);
        }
    }
    out
}

pub fn quadratic_basis_len(n: usize) -> usize {
    1 + 2 * n + n * (n - 1) / 2
}

/// Output of one model-reference control step.
#[derive(Clone, Debug, PartialEq)]
pub struct AdaptiveOutput<T> {
    /// Added torque (N·m).
    pub torque: Vec<T>,
    /// Uncertainty estimate `Ŵᵀφ(x)` used in the command.
    pub estimate: Vec<T>,
    /// `x − x_m` before the reference model advanced.
    pub model_error: Vec<T>,
}

/// Reference model plus the Lyapunov adaptive law, independent of the basis.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelReferenceLaw<T: Real> {
    reference: ReferenceModel<T>,
    p: Matrix<T>,
    q: Matrix<T>,
    gamma: T,
    k_e: Vec<T>,
    g_hat: Vec<T>,
    w_norm_bound: T,
}

impl<T: Real> ModelReferenceLaw<T> {
    pub fn new(config: &MracConfig) -> Result<Self> {
        let n = config.state_dim();
        let a_m = to_matrix(&config.a_m, n, "a_m")?;
        let b_m = to_matrix(&config.b_m, n, "b_m")?;
        let q = to_matrix(&config.q, n, "q")?;
        if !is_positive_definite(&q) {
            return Err(Error::config("mrac: Q must be positive definite"));
        }
        let p = solve_lyapunov(&a_m, &q)?;
        if !is_positive_definite(&p) {
            return Err(Error::config("mrac: A_m is not Hurwitz"));
        }
        let lift = |v: &[f64]| v.iter().map(|&g| T::lit(g)).collect::<Vec<T>>();
        Ok(Self {
            reference: ReferenceModel::new(a_m, b_m)?,
            p,
            q,
            gamma: T::lit(config.gamma),
            k_e: lift(&config.k_e),
            g_hat: lift(&config.g_hat),
            w_norm_bound: T::lit(config.w_norm_bound),
        })
    }

    pub fn dim(&self) -> usize {
        self.g_hat.len()
    }

    pub fn reference(&self) -> &ReferenceModel<T> {
        &self.reference
    }

    pub fn reference_mut(&mut self) -> &mut ReferenceModel<T> {
        &mut self.reference
    }

    /// Solution of `A_mᵀP + PA_m = −Q`.
    pub fn p(&self) -> &Matrix<T> {
        &self.p
    }

    pub fn q(&self) -> &Matrix<T> {
        &self.q
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    pub fn g_hat(&self) -> &[T] {
        &self.g_hat
    }

    pub fn model_error(&self, x: &[T]) -> Vec<T> {
        x.iter().zip(self.reference.state()).map(|(&a, &b)| a - b).collect()
    }

    /// `ĝ⁻¹(A_m x + B_m r − K_e e_m − estimate)`
    pub fn command(&self, x: &[T], r: &[T], estimate: &[T]) -> Result<Vec<T>> {
        let e_m = self.model_error(x);
        let desired = self.reference.derivative(x, r);
        let u: Vec<T> = (0..self.dim())
            .map(|i| (desired[i] - self.k_e[i] * e_m[i] - estimate[i]) / self.g_hat[i])
            .collect();
        if !all_finite(&u) {
            return Err(Error::ControllerFault("non-finite model-reference command".into()));
        }
        Ok(u)
    }

    /// Euler step of `Ŵ̇ = Γ φ e_mᵀ P`, rejected if it diverges.
    pub fn adapt(&self, w: &Matrix<T>, phi: &[T], e_m: &[T], dt: T) -> Result<Matrix<T>> {
        let pe = self.p.mul_vec(e_m);
        let mut next = w.clone();
        next.add_outer(self.gamma * dt, phi, &pe);
        if !next.is_finite() {
            return Err(Error::ControllerFault("non-finite adaptive weights".into()));
        }
        let norm = next.frobenius_norm();
        if norm > self.w_norm_bound {
            return Err(Error::ControllerFault(format!(
                "adaptive weight norm {norm} exceeds bound {}",
                self.w_norm_bound
            )));
        }
        Ok(next)
    }

    /// Full step: command from the current weights, reference model advance,
    /// then the weight update. On a fault the reference model has still
    /// advanced but the weights are unchanged.
    pub(crate) fn step(
        &mut self,
        w: &mut Matrix<T>,
        phi: &[T],
        x: &[T],
        r: &[T],
        dt: T,
    ) -> Result<AdaptiveOutput<T>> {
        let n = self.dim();
        if x.len() != n || r.len() != n {
            return Err(Error::config(format!("model-reference step expects {n} states")));
        }
        if !(dt > T::zero()) {
            return Err(Error::config("model-reference step needs dt > 0"));
        }
        if !all_finite(x) || !all_finite(r) {
            return Err(Error::input("non-finite model-reference input"));
        }
        let e_m = self.model_error(x);
        let estimate = w.tr_mul_vec(phi);
        let torque = self.command(x, r, &estimate)?;
        self.reference.step(r, dt)?;
        *w = self.adapt(w, phi, &e_m, dt)?;
        Ok(AdaptiveOutput {
            torque,
            estimate,
            model_error: e_m,
        })
    }
}

/// Classical MRAC with the fixed quadratic basis.
#[derive(Clone, Debug, PartialEq)]
pub struct MracState<T: Real> {
    law: ModelReferenceLaw<T>,
    weights: Matrix<T>,
}

impl<T: Real> MracState<T> {
    pub fn new(config: &MracConfig) -> Result<Self> {
        config.validate()?;
        let law = ModelReferenceLaw::new(config)?;
        let n = law.dim();
        Ok(Self {
            weights: Matrix::zeros(quadratic_basis_len(n), n),
            law,
        })
    }

    pub fn law(&self) -> &ModelReferenceLaw<T> {
        &self.law
    }

    pub fn reset_reference(&mut self, x0: &[T]) -> Result<()> {
        self.law.reference_mut().reset(x0)
    }

    pub fn weights(&self) -> &Matrix<T> {
        &self.weights
    }

    pub fn weights_mut(&mut self) -> &mut Matrix<T> {
        &mut self.weights
    }

    pub fn weight_norm(&self) -> T {
        self.weights.frobenius_norm()
    }

    pub fn step(&mut self, x: &[T], r: &[T], dt: T) -> Result<AdaptiveOutput<T>> {
        let phi = quadratic_basis(x);
        self.law.step(&mut self.weights, &phi, x, r, dt)
    }
}
