//! Degree-based parameterizations of the two mixture families.

use super::{check_positive, BetaBernoulliParams, DirichletCategoricalParams};
use crate::error::{Error, Result};
use crate::graph::GraphSpace;
use serde::{Deserialize, Serialize};

/// Expectation and standard deviation of the mean degree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanDegreeParams {
    pub mu_d: f64,
    pub sigma_d: f64,
}

/// Mean non-null degree, reciprocation rate and non-null degree dispersion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonNullDegreeParams {
    pub mu_nnd: f64,
    pub r: f64,
    pub sigma_nnd: f64,
}

impl NonNullDegreeParams {
    /// Expected mutual degree, r·μ_nnd.
    pub fn mu_md(&self) -> f64 {
        self.r * self.mu_nnd
    }
}

fn degree_scale(space: GraphSpace) -> Result<f64> {
    if space.n_vertices < 2 {
        return Err(Error::Domain(format!(
            "degree parameterizations need at least 2 vertices, got {}",
            space.n_vertices
        )));
    }
    Ok((space.n_vertices - 1) as f64)
}

fn check_mean(name: &str, mu: f64, nm1: f64) -> Result<()> {
    if mu > 0.0 && mu < nm1 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} = {mu} outside (0, {nm1})")))
    }
}

/// Maps (μ_d, σ_d) to the beta mixing parameters for a graph of this order.
pub fn params_from_mean_degree(md: MeanDegreeParams, space: GraphSpace) -> Result<BetaBernoulliParams> {
    let nm1 = degree_scale(space)?;
    check_mean("mu_d", md.mu_d, nm1)?;
    check_positive("sigma_d", md.sigma_d)?;
    let p = md.mu_d / nm1;
    let var = (md.sigma_d / nm1).powi(2);
    if var >= p * (1.0 - p) * (1.0 - 1e-12) {
        return Err(Error::InvalidDispersion {
            index: None,
            message: format!(
                "Var(density) = {var} must be below E(density)(1 - E(density)) = {}",
                p * (1.0 - p)
            ),
        });
    }
    let k = md.mu_d * nm1 / (md.sigma_d * md.sigma_d) * (1.0 - p) - 1.0;
    BetaBernoulliParams::new(p * k, (1.0 - p) * k)
}

/// d(α, β) / d(μ_d, σ_d), rows α and β.
pub fn mean_degree_jacobian(md: MeanDegreeParams, space: GraphSpace) -> Result<[[f64; 2]; 2]> {
    let nm1 = degree_scale(space)?;
    let (mu, s) = (md.mu_d, md.sigma_d);
    let p = mu / nm1;
    let k = p * (1.0 - p) * nm1 * nm1 / (s * s) - 1.0;
    let dp_dmu = 1.0 / nm1;
    let dk_dmu = (1.0 - 2.0 * p) * nm1 / (s * s);
    let dk_ds = -2.0 * p * (1.0 - p) * nm1 * nm1 / (s * s * s);
    Ok([
        [dp_dmu * k + p * dk_dmu, p * dk_ds],
        [-dp_dmu * k + (1.0 - p) * dk_dmu, (1.0 - p) * dk_ds],
    ])
}

/// Maps (μ_nnd, r, σ_nnd) to Dirichlet parameters for a graph of this order,
/// using the Beta(α+β, γ) marginal of m + a and the Beta(α, β+γ) marginal of m.
pub fn params_from_nnd(nn: NonNullDegreeParams, space: GraphSpace) -> Result<DirichletCategoricalParams> {
    let nm1 = degree_scale(space)?;
    check_mean("mu_nnd", nn.mu_nnd, nm1)?;
    check_positive("sigma_nnd", nn.sigma_nnd)?;
    if !(nn.r > 0.0 && nn.r < 1.0) {
        return Err(Error::Domain(format!("r = {} outside (0, 1)", nn.r)));
    }
    let s2 = nn.sigma_nnd * nn.sigma_nnd;
    let spread = nn.mu_nnd * (nm1 - nn.mu_nnd);
    let slack = spread - s2;
    // relative guard so a boundary value that rounds just inside is still rejected
    if slack <= 1e-12 * spread {
        return Err(Error::InvalidDispersion {
            index: None,
            message: format!(
                "mu_nnd (N_V - 1 - mu_nnd) = {} must exceed sigma_nnd^2 = {s2}",
                nn.mu_nnd * (nm1 - nn.mu_nnd)
            ),
        });
    }
    let c = slack / (nm1 * s2);
    DirichletCategoricalParams::new(
        nn.r * nn.mu_nnd * c,
        (1.0 - nn.r) * nn.mu_nnd * c,
        (nm1 - nn.mu_nnd) * c,
    )
}

/// d(α, β, γ) / d(μ_nnd, r, σ_nnd), rows α, β, γ.
pub fn nnd_jacobian(nn: NonNullDegreeParams, space: GraphSpace) -> Result<[[f64; 3]; 3]> {
    let nm1 = degree_scale(space)?;
    let NonNullDegreeParams {
        mu_nnd: mu,
        r,
        sigma_nnd: s,
    } = nn;
    let s2 = s * s;
    let c = (mu * (nm1 - mu) - s2) / (nm1 * s2);
    let dc_dmu = (nm1 - 2.0 * mu) / (nm1 * s2);
    // c = mu (nm1 - mu) / (nm1 s^2) - 1 / nm1
    let dc_ds = -2.0 * mu * (nm1 - mu) / (nm1 * s2 * s);
    Ok([
        [r * (c + mu * dc_dmu), mu * c, r * mu * dc_ds],
        [(1.0 - r) * (c + mu * dc_dmu), -mu * c, (1.0 - r) * mu * dc_ds],
        [-c + (nm1 - mu) * dc_dmu, 0.0, (nm1 - mu) * dc_ds],
    ])
}
