//! State-space models and their modal (eigen) decomposition.
//!
//! A linear system `x[n] = A·x[n−1] + B·u[n]`, `y[n] = C·x[n] + D·u[n]`
//! (note the *current-input* state update, matching the one-pole neuron
//! recursion `s[n] = p·s[n−1] + u[n]`) has impulse response
//! `r[t] = C·Aᵗ·B + D·δ_t`. Diagonalizing `A = V·Λ·V⁻¹` splits this into
//! parallel first-order sections:
//!
//! ```text
//! r[t] = Σ_i (C·v_i)(u_iᴴ·B) · λ_iᵗ  +  D·δ_t,     u_iᴴ = row i of V⁻¹
//! ```
//!
//! i.e. exactly a [`PoleWeightForm`](super::PoleWeightForm) with poles = eigenvalues,
//! weights = `(C·v_i)(u_iᴴ·B)` and a single skip tap `D`. This equivalence is
//! why a bank of independent one-pole neurons loses no expressiveness against
//! a fully coupled recurrent state matrix.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use super::{DeconvError, PoleWeightForm, MIN_POLE_SEPARATION};

use crate::math::eig;
use crate::math::linalg::CMat;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Discrete-time linear state-space model.
///
/// Shapes: `a` is M×M, `b` is M×n_in, `c` is n_out×M, `d` is n_out×n_in.
#[derive(Clone, Debug)]
pub struct StateSpaceModel {
    pub a: CMat,
    pub b: CMat,
    pub c: CMat,
    pub d: CMat,
}

impl StateSpaceModel {
    /// Validates shape consistency.
    pub fn check_dims(&self) -> Result<(), DeconvError> {
        let m = self.a.rows;
        if self.a.cols != m
            || self.b.rows != m
            || self.c.cols != m
            || self.d.rows != self.c.rows
            || self.d.cols != self.b.cols
        {
            return Err(DeconvError::DimensionMismatch);
        }
        Ok(())
    }

    /// Number of inputs.
    pub fn n_inputs(&self) -> usize {
        self.b.cols
    }

    /// Number of outputs.
    pub fn n_outputs(&self) -> usize {
        self.c.rows
    }

    /// Runs the recursion `x[n] = A·x[n−1] + B·u[n]`, `y[n] = C·x[n] + D·u[n]`
    /// from a zero initial state. `u` is T×n_in; the result is T×n_out.
    pub fn simulate(&self, u: &CMat) -> CMat {
        assert_eq!(u.cols, self.n_inputs(), "input width mismatch");
        let m = self.a.rows;
        let t_len = u.rows;
        let mut state = vec![ZERO; m];
        let mut out = CMat::zeros(t_len, self.n_outputs());
        let mut next = vec![ZERO; m];
        for t in 0..t_len {
            for i in 0..m {
                let mut acc = ZERO;
                for k in 0..m {
                    acc += self.a[(i, k)] * state[k];
                }
                for k in 0..self.b.cols {
                    acc += self.b[(i, k)] * u[(t, k)];
                }
                next[i] = acc;
            }
            core::mem::swap(&mut state, &mut next);
            for o in 0..self.c.rows {
                let mut acc = ZERO;
                for k in 0..m {
                    acc += self.c[(o, k)] * state[k];
                }
                for k in 0..self.d.cols {
                    acc += self.d[(o, k)] * u[(t, k)];
                }
                out[(t, o)] = acc;
            }
        }
        out
    }
}

/// Modal decomposition of a stable, diagonalizable state-space model into one
/// [`PoleWeightForm`] per (output, input) pair, indexed `result[out][in]`.
///
/// Fails with [`DeconvError::UnstableSystem`] when the spectral radius
/// reaches 1, and [`DeconvError::IllConditionedEigenbasis`] when eigenvalues
/// come closer than the simple-pole separation or the eigenbasis cannot be
/// inverted reliably.
pub fn modal_decomposition(
    ss: &StateSpaceModel,
) -> Result<Vec<Vec<PoleWeightForm>>, DeconvError> {
    ss.check_dims()?;
    let m = ss.a.rows;
    if m == 0 {
        return Err(DeconvError::DimensionMismatch);
    }
    let lambdas = eig::eigenvalues(&ss.a).map_err(|_| DeconvError::IllConditionedEigenbasis)?;
    let radius = lambdas.iter().map(|l| l.norm()).fold(0.0, f64::max);
    if radius >= 1.0 {
        return Err(DeconvError::UnstableSystem {
            spectral_radius: radius,
        });
    }
    let mut min_sep = f64::INFINITY;
    for i in 0..m {
        for j in i + 1..m {
            min_sep = min_sep.min((lambdas[i] - lambdas[j]).norm());
        }
    }
    if min_sep < MIN_POLE_SEPARATION {
        return Err(DeconvError::IllConditionedEigenbasis);
    }
    let v = eig::right_eigenvectors(&ss.a, &lambdas, 1e-8)
        .ok_or(DeconvError::IllConditionedEigenbasis)?;
    let vinv = v.invert().ok_or(DeconvError::IllConditionedEigenbasis)?;
    // Per mode: gains C·v_i (n_out) and u_iᴴ·B (n_in).
    let cv = ss.c.mul(&v); // n_out × m
    let ub = vinv.mul(&ss.b); // m × n_in
    let mut out = Vec::with_capacity(ss.n_outputs());
    for o in 0..ss.n_outputs() {
        let mut row = Vec::with_capacity(ss.n_inputs());
        for i in 0..ss.n_inputs() {
            let weights: Vec<Complex64> =
                (0..m).map(|k| cv[(o, k)] * ub[(k, i)]).collect();
            row.push(PoleWeightForm {
                poles: lambdas.clone(),
                weights,
                skip_taps: vec![ss.d[(o, i)]],
            });
        }
        out.push(row);
    }
    Ok(out)
}

/// Convenience wrapper for single-input single-output models.
pub fn modal_decomposition_siso(ss: &StateSpaceModel) -> Result<PoleWeightForm, DeconvError> {
    if ss.n_inputs() != 1 || ss.n_outputs() != 1 {
        return Err(DeconvError::DimensionMismatch);
    }
    Ok(modal_decomposition(ss)?.remove(0).remove(0))
}
