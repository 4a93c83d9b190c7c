//! The L^p affine energy
//! `𝓔_p(f) = c_{n,p} (∫_{S^{n−1}} ‖D_v f‖_p^{−n} dv)^{−1/n}`
//! evaluated with a spherical quadrature rule, next to the Euclidean
//! `‖∇f‖_p` it is compared against.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::c_np;
use crate::error::{param, Error, Result};
use crate::grid::{GridFunction, VectorField};

/// Relative size below which a directional norm counts as degenerate.
const DEGENERATE_REL: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphericalQuadrature {
    dim: usize,
    directions: Vec<Vec<f64>>,
    weights: Vec<f64>,
    /// For `n = 2` with even `M`, direction `j + M/2` is `−v_j`.
    antipodal: bool,
}

impl SphericalQuadrature {
    /// `n = 2`: `M` equally spaced angles. `n = 3`: Fibonacci sphere points.
    /// Weights are uniform and sum to the area of the sphere.
    pub fn new(dim: usize, count: usize) -> Result<Self> {
        if count < 4 {
            return param(format!("need at least 4 quadrature directions, got {count}"));
        }
        match dim {
            2 => {
                let directions = (0..count)
                    .map(|j| {
                        let t = 2.0 * PI * j as f64 / count as f64;
                        vec![t.cos(), t.sin()]
                    })
                    .collect();
                Ok(SphericalQuadrature {
                    dim,
                    directions,
                    weights: vec![2.0 * PI / count as f64; count],
                    antipodal: count.is_multiple_of(2),
                })
            }
            3 => {
                let golden = PI * (3.0 - 5f64.sqrt());
                let directions = (0..count)
                    .map(|j| {
                        let z = 1.0 - (2 * j + 1) as f64 / count as f64;
                        let rho = (1.0 - z * z).sqrt();
                        let phi = golden * j as f64;
                        vec![rho * phi.cos(), rho * phi.sin(), z]
                    })
                    .collect();
                Ok(SphericalQuadrature {
                    dim,
                    directions,
                    weights: vec![4.0 * PI / count as f64; count],
                    antipodal: false,
                })
            }
            _ => param(format!("spherical quadrature supports n = 2, 3; got {dim}")),
        }
    }

    /// 512 directions in the plane, 1000 on the sphere.
    pub fn default_for(dim: usize) -> Result<Self> {
        Self::new(dim, if dim == 3 { 1000 } else { 512 })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn directions(&self) -> &[Vec<f64>] {
        &self.directions
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `Σ_j w_j g(v_j)`.
    pub fn integrate<F: Fn(&[f64]) -> f64>(&self, g: F) -> f64 {
        self.directions
            .iter()
            .zip(&self.weights)
            .map(|(v, w)| w * g(v))
            .sum()
    }
}

/// `‖v · ∇f‖_p`.
pub fn directional_lp_norm(f: &GridFunction, v: &[f64], p: f64) -> Result<f64> {
    check_p(p)?;
    if v.len() != f.spec().dim() {
        return param("direction dimension does not match the grid");
    }
    Ok(f.gradient().directional_lp_norm(v, p))
}

/// `‖∇f‖_p` with the Euclidean norm of the gradient.
pub fn gradient_lp_norm(f: &GridFunction, p: f64) -> Result<f64> {
    check_p(p)?;
    Ok(gradient_field_norm(&f.gradient(), p))
}

fn gradient_field_norm(grad: &VectorField, p: f64) -> f64 {
    grad.integral_magnitude_pow(p).powf(1.0 / p)
}

fn check_p(p: f64) -> Result<()> {
    if !(p >= 1.0) || !p.is_finite() {
        return param(format!("need p >= 1, got {p}"));
    }
    Ok(())
}

/// `𝓔_p(f)`.
pub fn affine_energy(f: &GridFunction, p: f64, quad: &SphericalQuadrature) -> Result<f64> {
    Ok(EnergyComparison::compute(f, p, quad)?.affine_energy)
}

/// Affine energy and gradient norm of one function, sharing its gradient.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyComparison {
    pub affine_energy: f64,
    pub gradient_norm: f64,
    /// `𝓔_p(f) / ‖∇f‖_p`, at most 1 up to discretisation error.
    pub ratio: f64,
}

impl EnergyComparison {
    pub fn compute(f: &GridFunction, p: f64, quad: &SphericalQuadrature) -> Result<Self> {
        check_p(p)?;
        if quad.dim != f.spec().dim() {
            return param(format!(
                "quadrature on S^{} used for a {}-dimensional grid",
                quad.dim - 1,
                f.spec().dim()
            ));
        }
        if f.is_zero() {
            return Err(Error::DegenerateInput("affine energy of the zero function".into()));
        }
        let grad = f.gradient();
        let gradient_norm = gradient_field_norm(&grad, p);
        let affine_energy = affine_energy_of_gradient(&grad, p, quad, gradient_norm)?;
        Ok(EnergyComparison {
            affine_energy,
            gradient_norm,
            ratio: affine_energy / gradient_norm,
        })
    }
}

fn affine_energy_of_gradient(
    grad: &VectorField,
    p: f64,
    quad: &SphericalQuadrature,
    gradient_norm: f64,
) -> Result<f64> {
    let n = quad.dim;
    let m = quad.len();
    let distinct = if quad.antipodal { m / 2 } else { m };

    let norms: Vec<f64> = if p == 2.0 {
        let g = grad.second_moment();
        quad.directions[..distinct]
            .iter()
            .map(|v| {
                let mut q = 0.0;
                for k in 0..n {
                    for l in 0..n {
                        q += v[k] * g[k * n + l] * v[l];
                    }
                }
                q.max(0.0).sqrt()
            })
            .collect()
    } else {
        quad.directions[..distinct]
            .par_iter()
            .map(|v| grad.directional_lp_norm(v, p))
            .collect()
    };

    let floor = DEGENERATE_REL * gradient_norm;
    let mut terms = Vec::with_capacity(m);
    for j in 0..m {
        let norm = norms[j % distinct];
        if !(norm > floor) {
            return Err(Error::DegenerateDirection {
                direction: quad.directions[j].clone(),
                norm,
                gradient_norm,
            });
        }
        terms.push(quad.weights[j].ln() - n as f64 * norm.ln());
    }
    let log_integral = log_sum_exp(&terms);
    Ok(c_np(n, p)? * (-log_integral / n as f64).exp())
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = terms.iter().map(|t| (t - max).exp()).sum();
    max + sum.ln()
}
