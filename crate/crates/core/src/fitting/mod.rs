//! Pooled likelihoods over collections of independent graphs, their
//! gradients, and maximum-likelihood fitting.

mod mle;
mod optim;

pub use mle::{
    fit_mle, identifiability_check, model_comparison, ComparisonRow, Degeneracy, FitConfig, FitResult,
    Identifiability, Scale,
};

use crate::error::{Error, Result};
use crate::graph::{DyadCensus, Graph, GraphSpace};
use crate::models::{
    log_pmf_beta_bernoulli_counts, log_pmf_dc_census, params_from_mean_degree, params_from_nnd,
    mean_degree_jacobian, nnd_jacobian, BernoulliParams, BetaBernoulliParams, DirichletCategoricalParams, MeanDegreeParams,
    Model, NonNullDegreeParams,
};
use crate::special::{digamma_diff, ln_gamma, xlogy};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq)]
struct GraphStats {
    space: GraphSpace,
    edges: usize,
    census: Option<DyadCensus>,
}

/// An ordered collection of k ≥ 1 graphs sharing directedness and loop
/// policy. Vertex counts may differ.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSet {
    graphs: Vec<Graph>,
    stats: Vec<GraphStats>,
}

impl GraphSet {
    pub fn new(graphs: Vec<Graph>) -> Result<Self> {
        let first = graphs
            .first()
            .ok_or_else(|| Error::Domain("a graph set needs at least one graph".into()))?
            .space();
        for (i, g) in graphs.iter().enumerate() {
            let s = g.space();
            if s.directed != first.directed || s.loops != first.loops {
                return Err(Error::Mismatch(format!(
                    "graph {} differs from graph 1 in directedness or loop policy",
                    i + 1
                )));
            }
        }
        let stats = graphs
            .iter()
            .map(|g| GraphStats {
                space: g.space(),
                edges: g.edge_count(),
                census: g.dyad_census().ok(),
            })
            .collect();
        Ok(Self { graphs, stats })
    }

    pub fn graphs(&self) -> &[Graph] {
        &self.graphs
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    pub fn directed(&self) -> bool {
        self.stats[0].space.directed
    }

    pub fn loops(&self) -> bool {
        self.stats[0].space.loops
    }

    /// Σ e* over the graphs.
    pub fn total_edge_vars(&self) -> usize {
        self.stats.iter().map(|s| s.space.edge_vars()).sum()
    }

    pub fn total_edges(&self) -> usize {
        self.stats.iter().map(|s| s.edges).sum()
    }

    fn censuses(&self) -> Result<Vec<DyadCensus>> {
        self.stats
            .iter()
            .map(|s| {
                s.census.ok_or_else(|| {
                    Error::UnsupportedSpace("dyad census needs directed loopless graphs".into())
                })
            })
            .collect()
    }
}

/// Families that can be fitted by maximum likelihood.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Bernoulli,
    BetaBernoulli,
    DirichletCategorical,
    BetaBernoulliMeandeg,
    DcNnd,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::Bernoulli,
        Family::BetaBernoulli,
        Family::DirichletCategorical,
        Family::BetaBernoulliMeandeg,
        Family::DcNnd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Bernoulli => "bernoulli",
            Family::BetaBernoulli => "beta-bernoulli",
            Family::DirichletCategorical => "dirichlet-categorical",
            Family::BetaBernoulliMeandeg => "beta-bernoulli-meandeg",
            Family::DcNnd => "dc-nnd",
        }
    }

    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            Family::Bernoulli => &["delta"],
            Family::BetaBernoulli => &["alpha", "beta"],
            Family::DirichletCategorical => &["alpha", "beta", "gamma"],
            Family::BetaBernoulliMeandeg => &["mu_d", "sigma_d"],
            Family::DcNnd => &["mu_nnd", "r", "sigma_nnd"],
        }
    }

    pub fn n_params(self) -> usize {
        self.param_names().len()
    }

    /// Fewest graphs from which the family's parameters are identified.
    pub fn min_graphs(self) -> usize {
        match self {
            Family::Bernoulli => 1,
            Family::BetaBernoulli | Family::BetaBernoulliMeandeg => 2,
            Family::DirichletCategorical | Family::DcNnd => 3,
        }
    }

    pub fn is_dyadic(self) -> bool {
        matches!(self, Family::DirichletCategorical | Family::DcNnd)
    }

    /// Builds the model from a parameter vector in `param_names` order.
    pub fn model(self, theta: &[f64]) -> Result<Model> {
        if theta.len() != self.n_params() {
            return Err(Error::Domain(format!(
                "{} takes {} parameters, got {}",
                self.name(),
                self.n_params(),
                theta.len()
            )));
        }
        Ok(match self {
            Family::Bernoulli => Model::Bernoulli(BernoulliParams::new(theta[0])?),
            Family::BetaBernoulli => Model::BetaBernoulli(BetaBernoulliParams::new(theta[0], theta[1])?),
            Family::DirichletCategorical => {
                Model::DirichletCategorical(DirichletCategoricalParams::new(theta[0], theta[1], theta[2])?)
            }
            Family::BetaBernoulliMeandeg => Model::BetaBernoulliMeandeg(MeanDegreeParams {
                mu_d: theta[0],
                sigma_d: theta[1],
            }),
            Family::DcNnd => Model::DcNnd(NonNullDegreeParams {
                mu_nnd: theta[0],
                r: theta[1],
                sigma_nnd: theta[2],
            }),
        })
    }

    /// Family and parameter vector of a model, if it is a fittable family.
    pub fn of_model(model: &Model) -> Option<(Family, Vec<f64>)> {
        Some(match *model {
            Model::Bernoulli(p) => (Family::Bernoulli, vec![p.delta]),
            Model::BetaBernoulli(p) => (Family::BetaBernoulli, vec![p.alpha, p.beta]),
            Model::DirichletCategorical(p) => (Family::DirichletCategorical, vec![p.alpha, p.beta, p.gamma]),
            Model::BetaBernoulliMeandeg(p) => (Family::BetaBernoulliMeandeg, vec![p.mu_d, p.sigma_d]),
            Model::DcNnd(p) => (Family::DcNnd, vec![p.mu_nnd, p.r, p.sigma_nnd]),
            Model::Cug { .. } | Model::Uman(_) => return None,
        })
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown family '{s}'")))
    }
}

fn with_index(e: Error, index: usize) -> Error {
    match e {
        Error::InvalidDispersion { message, .. } => Error::InvalidDispersion {
            index: Some(index + 1),
            message,
        },
        other => other,
    }
}

fn graph_loglik(s: &GraphStats, model: &Model) -> Result<f64> {
    let e_star = s.space.edge_vars();
    let dyadic = || {
        s.census
            .ok_or_else(|| Error::UnsupportedSpace("dyad census needs directed loopless graphs".into()))
    };
    match *model {
        Model::Bernoulli(p) => {
            if !(p.delta > 0.0 && p.delta < 1.0) {
                return Err(Error::Domain(format!("delta = {} outside (0, 1)", p.delta)));
            }
            Ok(s.edges as f64 * p.delta.ln() + (e_star - s.edges) as f64 * (-p.delta).ln_1p())
        }
        Model::BetaBernoulli(p) => {
            p.validate()?;
            Ok(log_pmf_beta_bernoulli_counts(s.edges, e_star, p))
        }
        Model::BetaBernoulliMeandeg(md) => {
            let p = params_from_mean_degree(md, s.space)?;
            Ok(log_pmf_beta_bernoulli_counts(s.edges, e_star, p))
        }
        Model::DirichletCategorical(p) => {
            p.validate()?;
            Ok(log_pmf_dc_census(dyadic()?, p))
        }
        Model::DcNnd(nn) => {
            let c = dyadic()?;
            Ok(log_pmf_dc_census(c, params_from_nnd(nn, s.space)?))
        }
        Model::Cug { .. } | Model::Uman(_) => Err(Error::Domain(
            "pooled likelihoods cover the Bernoulli and mixture families".into(),
        )),
    }
}

/// Sum over graphs of the exact log-pmf. Reparameterized models are mapped
/// through each graph's own vertex count.
pub fn pooled_loglik(gs: &GraphSet, model: &Model) -> Result<f64> {
    let mut total = 0.0;
    for (i, s) in gs.stats.iter().enumerate() {
        total += graph_loglik(s, model).map_err(|e| with_index(e, i))?;
    }
    Ok(total)
}

/// Bernoulli log-likelihood allowing δ on the closed interval.
pub(crate) fn bernoulli_loglik_closed(gs: &GraphSet, delta: f64) -> f64 {
    let e = gs.total_edges() as f64;
    let n = (gs.total_edge_vars() - gs.total_edges()) as f64;
    xlogy(e, delta) + xlogy(n, 1.0 - delta)
}

fn bb_grad(edges: usize, e_star: usize, p: BetaBernoulliParams) -> [f64; 2] {
    let tot = digamma_diff(p.alpha + p.beta, e_star);
    [
        digamma_diff(p.alpha, edges) - tot,
        digamma_diff(p.beta, e_star - edges) - tot,
    ]
}

fn dc_grad(c: DyadCensus, p: DirichletCategoricalParams) -> [f64; 3] {
    let tot = digamma_diff(p.total(), c.total());
    [
        digamma_diff(p.alpha, c.mutual) - tot,
        digamma_diff(p.beta, c.asymmetric) - tot,
        digamma_diff(p.gamma, c.null) - tot,
    ]
}

/// Gradient of [`pooled_loglik`] with respect to the model's own parameters,
/// in the order of [`Family::param_names`].
pub fn grad_pooled_loglik(gs: &GraphSet, model: &Model) -> Result<Vec<f64>> {
    let (family, _) = Family::of_model(model)
        .ok_or_else(|| Error::Domain("gradients cover the Bernoulli and mixture families".into()))?;
    let mut grad = vec![0.0; family.n_params()];
    for (i, s) in gs.stats.iter().enumerate() {
        let e_star = s.space.edge_vars();
        let fail = |e: Error| with_index(e, i);
        match *model {
            Model::Bernoulli(p) => {
                if !(p.delta > 0.0 && p.delta < 1.0) {
                    return Err(Error::Domain(format!("delta = {} outside (0, 1)", p.delta)));
                }
                grad[0] += s.edges as f64 / p.delta - (e_star - s.edges) as f64 / (1.0 - p.delta);
            }
            Model::BetaBernoulli(p) => {
                p.validate()?;
                let g = bb_grad(s.edges, e_star, p);
                grad[0] += g[0];
                grad[1] += g[1];
            }
            Model::BetaBernoulliMeandeg(md) => {
                let p = params_from_mean_degree(md, s.space).map_err(fail)?;
                let g = bb_grad(s.edges, e_star, p);
                let jac = mean_degree_jacobian(md, s.space)?;
                for (col, slot) in grad.iter_mut().enumerate() {
                    *slot += g[0] * jac[0][col] + g[1] * jac[1][col];
                }
            }
            Model::DirichletCategorical(p) => {
                p.validate()?;
                let c = s.census.ok_or_else(|| Error::UnsupportedSpace("dyad census needs directed loopless graphs".into()))?;
                let g = dc_grad(c, p);
                for k in 0..3 {
                    grad[k] += g[k];
                }
            }
            Model::DcNnd(nn) => {
                let c = s.census.ok_or_else(|| Error::UnsupportedSpace("dyad census needs directed loopless graphs".into()))?;
                let p = params_from_nnd(nn, s.space).map_err(fail)?;
                let g = dc_grad(c, p);
                let jac = nnd_jacobian(nn, s.space)?;
                for (col, slot) in grad.iter_mut().enumerate() {
                    *slot += (0..3).map(|row| g[row] * jac[row][col]).sum::<f64>();
                }
            }
            Model::Cug { .. } | Model::Uman(_) => unreachable!("filtered above"),
        }
    }
    Ok(grad)
}

fn positive_stat(v: usize, index: usize, statistic: &'static str) -> Result<f64> {
    if v == 0 {
        Err(Error::ZeroStatistic {
            index: index + 1,
            statistic,
        })
    } else {
        Ok(v as f64)
    }
}

/// Unnormalized potential of the offset approximation, in which each
/// ln Γ(statistic + parameter) is replaced by ln Γ(statistic) + parameter ·
/// ln(statistic). Defined for beta-Bernoulli with α, β ≥ 1 and for
/// Dirichlet-categorical with α, β, γ > 1.
pub fn pooled_loglik_offset_approx(gs: &GraphSet, model: &Model) -> Result<f64> {
    match *model {
        Model::BetaBernoulli(p) => {
            p.validate()?;
            if p.alpha < 1.0 || p.beta < 1.0 {
                return Err(Error::ConstraintViolation(format!(
                    "offset form needs alpha, beta >= 1, got ({}, {})",
                    p.alpha, p.beta
                )));
            }
            let mut total = 0.0;
            for (i, s) in gs.stats.iter().enumerate() {
                let e = positive_stat(s.edges, i, "e")?;
                let n = positive_stat(s.space.edge_vars() - s.edges, i, "n")?;
                total += ln_gamma(e) + ln_gamma(n) + p.alpha * e.ln() + p.beta * n.ln();
            }
            Ok(total)
        }
        Model::DirichletCategorical(p) => {
            p.validate()?;
            if p.alpha <= 1.0 || p.beta <= 1.0 || p.gamma <= 1.0 {
                return Err(Error::ConstraintViolation(format!(
                    "offset form needs alpha, beta, gamma > 1, got ({}, {}, {})",
                    p.alpha, p.beta, p.gamma
                )));
            }
            let censuses = gs.censuses()?;
            let mut total = 0.0;
            for (i, c) in censuses.into_iter().enumerate() {
                let m = positive_stat(c.mutual, i, "M")?;
                let a = positive_stat(c.asymmetric, i, "A")?;
                let n = positive_stat(c.null, i, "N")?;
                total += ln_gamma(m) + ln_gamma(a) + ln_gamma(n) - a * std::f64::consts::LN_2
                    + p.alpha * m.ln()
                    + p.beta * a.ln()
                    + p.gamma * n.ln();
            }
            Ok(total)
        }
        _ => Err(Error::Domain(
            "the offset form is defined for beta-bernoulli and dirichlet-categorical".into(),
        )),
    }
}
