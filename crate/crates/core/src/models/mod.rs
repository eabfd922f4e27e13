//! Exact mass functions, full conditionals and moments for the baseline
//! graph families and their beta/Dirichlet mixtures.
//!
//! All pmfs are evaluated in log space through [`ln_gamma`]. The mixing
//! variables (the density δ, the dyad rates m, a, n) never appear here
//! except in [`Moments`]; the samplers are the only place they are drawn.

mod reparam;

pub use reparam::{
    mean_degree_jacobian, nnd_jacobian, params_from_mean_degree, params_from_nnd, MeanDegreeParams,
    NonNullDegreeParams,
};

use crate::error::{Error, Result};
use crate::graph::{DyadCensus, Graph, GraphSpace};
use crate::special::{ln_choose, ln_gamma_ratio, prob_from_log_weights, xlogy};
use serde::{Deserialize, Serialize};
use std::f64::consts::LN_2;

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be finite and > 0, got {v}")))
    }
}

/// Beta mixing distribution over the Bernoulli density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaBernoulliParams {
    pub alpha: f64,
    pub beta: f64,
}

impl BetaBernoulliParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        let p = Self { alpha, beta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("alpha", self.alpha)?;
        check_positive("beta", self.beta)
    }
}

/// Dirichlet mixing distribution over the (mutual, asymmetric, null) dyad rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirichletCategoricalParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl DirichletCategoricalParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        let p = Self { alpha, beta, gamma };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("alpha", self.alpha)?;
        check_positive("beta", self.beta)?;
        check_positive("gamma", self.gamma)
    }

    pub fn total(&self) -> f64 {
        self.alpha + self.beta + self.gamma
    }
}

/// Homogeneous Bernoulli graph. `delta` in [0, 1]; the pmf needs the open interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BernoulliParams {
    pub delta: f64,
}

impl BernoulliParams {
    pub fn new(delta: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&delta) {
            Ok(Self { delta })
        } else {
            Err(Error::Domain(format!("delta must lie in [0, 1], got {delta}")))
        }
    }
}

/// U|man dyad-state probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UmanParams {
    pub m: f64,
    pub a: f64,
    pub n: f64,
}

impl UmanParams {
    pub const SIMPLEX_TOL: f64 = 1e-12;

    pub fn new(m: f64, a: f64, n: f64) -> Result<Self> {
        let p = Self { m, a, n };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let Self { m, a, n } = *self;
        let in_unit = |v: f64| (0.0..=1.0).contains(&v);
        if in_unit(m) && in_unit(a) && in_unit(n) && (m + a + n - 1.0).abs() <= Self::SIMPLEX_TOL
        {
            Ok(())
        } else {
            Err(Error::InvalidSimplex { m, a, n })
        }
    }
}

/// Any of the graph families, in natural or reparameterized form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Model {
    Bernoulli(BernoulliParams),
    Cug { edges: usize },
    Uman(UmanParams),
    BetaBernoulli(BetaBernoulliParams),
    DirichletCategorical(DirichletCategoricalParams),
    BetaBernoulliMeandeg(MeanDegreeParams),
    DcNnd(NonNullDegreeParams),
}

impl Model {
    pub fn log_pmf(&self, g: &Graph) -> Result<f64> {
        match *self {
            Model::Bernoulli(p) => log_pmf_bernoulli(g, p),
            Model::Cug { edges } => log_pmf_cug(g, edges),
            Model::Uman(p) => log_pmf_uman(g, p),
            Model::BetaBernoulli(p) => log_pmf_beta_bernoulli(g, p),
            Model::DirichletCategorical(p) => log_pmf_dirichlet_categorical(g, p),
            Model::BetaBernoulliMeandeg(md) => {
                log_pmf_beta_bernoulli(g, params_from_mean_degree(md, g.space())?)
            }
            Model::DcNnd(nn) => log_pmf_dirichlet_categorical(g, params_from_nnd(nn, g.space())?),
        }
    }

    /// Whether the family's pmf is defined on `space`.
    pub fn supports(&self, space: GraphSpace) -> bool {
        match self {
            Model::Uman(_) | Model::DirichletCategorical(_) | Model::DcNnd(_) => {
                space.supports_dyads()
            }
            _ => true,
        }
    }

    pub fn moments(&self, space: GraphSpace) -> Result<Moments> {
        moments(self, space)
    }
}

/// e(y) ln δ + n(y) ln(1 - δ).
pub fn log_pmf_bernoulli(g: &Graph, p: BernoulliParams) -> Result<f64> {
    let d = p.delta;
    if !(d > 0.0 && d < 1.0) {
        return Err(Error::Domain(format!("delta must lie in (0, 1), got {d}")));
    }
    let c = g.edge_counts();
    Ok(c.edges as f64 * d.ln() + c.nulls as f64 * (-d).ln_1p())
}

/// Conditional uniform graph given `edges` edges.
pub fn log_pmf_cug(g: &Graph, edges: usize) -> Result<f64> {
    let e_star = g.space().edge_vars();
    if edges > e_star {
        return Err(Error::InvalidEdgeCount {
            count: edges,
            max: e_star,
        });
    }
    Ok(if g.edge_count() == edges {
        -ln_choose(e_star as u64, edges as u64)
    } else {
        f64::NEG_INFINITY
    })
}

/// U|man pmf; asymmetric dyads carry a factor 1/2 for their orientation.
pub fn log_pmf_uman(g: &Graph, p: UmanParams) -> Result<f64> {
    p.validate()?;
    let c = g.dyad_census()?;
    Ok(-(c.asymmetric as f64) * LN_2
        + xlogy(c.mutual as f64, p.m)
        + xlogy(c.asymmetric as f64, p.a)
        + xlogy(c.null as f64, p.n))
}

/// Beta-Bernoulli log-pmf from the edge count alone.
pub fn log_pmf_beta_bernoulli_counts(edges: usize, e_star: usize, p: BetaBernoulliParams) -> f64 {
    let (a, b) = (p.alpha, p.beta);
    // Grouped as ratios Γ(x + k) / Γ(x), which stay accurate for large α, β.
    ln_gamma_ratio(a, edges) + ln_gamma_ratio(b, e_star - edges) - ln_gamma_ratio(a + b, e_star)
}

pub fn log_pmf_beta_bernoulli(g: &Graph, p: BetaBernoulliParams) -> Result<f64> {
    p.validate()?;
    Ok(log_pmf_beta_bernoulli_counts(
        g.edge_count(),
        g.space().edge_vars(),
        p,
    ))
}

/// Probability that a focal edge variable is 1 given `e_rest` edges among the others.
pub fn cond_edge_prob_bb(e_rest: usize, space: GraphSpace, p: BetaBernoulliParams) -> Result<f64> {
    p.validate()?;
    let e_star = space.edge_vars();
    if e_star == 0 || e_rest > e_star - 1 {
        return Err(Error::Domain(format!(
            "e_rest = {e_rest} outside 0..={}",
            e_star.saturating_sub(1)
        )));
    }
    Ok((e_rest as f64 + p.alpha) / ((e_star - 1) as f64 + p.alpha + p.beta))
}

/// Dirichlet-categorical log-pmf from the dyad census alone.
pub fn log_pmf_dc_census(c: DyadCensus, p: DirichletCategoricalParams) -> f64 {
    let DirichletCategoricalParams { alpha, beta, gamma } = p;
    -(c.asymmetric as f64) * LN_2
        + ln_gamma_ratio(alpha, c.mutual)
        + ln_gamma_ratio(beta, c.asymmetric)
        + ln_gamma_ratio(gamma, c.null)
        - ln_gamma_ratio(alpha + beta + gamma, c.total())
}

pub fn log_pmf_dirichlet_categorical(g: &Graph, p: DirichletCategoricalParams) -> Result<f64> {
    p.validate()?;
    Ok(log_pmf_dc_census(g.dyad_census()?, p))
}

fn check_census_rest(census_rest: DyadCensus, space: GraphSpace) -> Result<()> {
    space.require_dyadic()?;
    let d = space.dyads();
    if d == 0 || census_rest.total() != d - 1 {
        return Err(Error::InconsistentCensus(format!(
            "census excluding the focal dyad sums to {}, expected {}",
            census_rest.total(),
            d.saturating_sub(1)
        )));
    }
    Ok(())
}

/// Probability that y_ij = 1 given the reverse tie `y_ji` and the census of
/// every other dyad, under the Dirichlet-categorical family.
///
/// Computed as the log-ratio of the two completed pmfs.
pub fn cond_edge_prob_dc(
    census_rest: DyadCensus,
    y_ji: bool,
    space: GraphSpace,
    p: DirichletCategoricalParams,
) -> Result<f64> {
    p.validate()?;
    check_census_rest(census_rest, space)?;
    let DyadCensus {
        mutual: m,
        asymmetric: a,
        null: n,
    } = census_rest;
    let (with_edge, without_edge) = if y_ji {
        (DyadCensus::new(m + 1, a, n), DyadCensus::new(m, a + 1, n))
    } else {
        (DyadCensus::new(m, a + 1, n), DyadCensus::new(m, a, n + 1))
    };
    let p1 = prob_from_log_weights(
        log_pmf_dc_census(with_edge, p),
        log_pmf_dc_census(without_edge, p),
    );
    p1.ok_or_else(|| Error::Domain("both completions have zero mass".into()))
}

/// Closed-form counterpart of [`cond_edge_prob_dc`], in terms of the census
/// of the other dyads.
pub fn cond_edge_prob_dc_closed_form(
    census_rest: DyadCensus,
    y_ji: bool,
    p: DirichletCategoricalParams,
) -> f64 {
    let m = census_rest.mutual as f64 + p.alpha;
    let half_a = 0.5 * (census_rest.asymmetric as f64 + p.beta);
    let n = census_rest.null as f64 + p.gamma;
    if y_ji {
        m / (m + half_a)
    } else {
        half_a / (half_a + n)
    }
}

/// Unnormalized log prior mass of each state of one dyad given the census of
/// all other dyads: `[mutual, i->j only, j->i only, null]`.
pub fn dyad_state_log_weights(census_rest: DyadCensus, p: DirichletCategoricalParams) -> [f64; 4] {
    let m = (census_rest.mutual as f64 + p.alpha).ln();
    let a = (0.5 * (census_rest.asymmetric as f64 + p.beta)).ln();
    let n = (census_rest.null as f64 + p.gamma).ln();
    [m, a, a, n]
}

/// Family-specific moment summaries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Moments {
    Bernoulli {
        density: f64,
        mean_degree: f64,
    },
    Cug {
        density: f64,
    },
    BetaBernoulli {
        mean_density: f64,
        var_density: f64,
        mean_degree: f64,
        sd_mean_degree: f64,
    },
    DirichletCategorical {
        mean_m: f64,
        mean_a: f64,
        mean_n: f64,
        mean_density: f64,
        /// α / (α + β): expected share of non-null dyads that are mutual.
        reciprocation_rate: f64,
    },
    Uman {
        density: f64,
        edgewise_reciprocity: Option<f64>,
    },
}

/// Mixing-distribution moments for any family on `space`.
pub fn moments(model: &Model, space: GraphSpace) -> Result<Moments> {
    let nm1 = space.n_vertices.saturating_sub(1) as f64;
    Ok(match *model {
        Model::Bernoulli(p) => Moments::Bernoulli {
            density: p.delta,
            mean_degree: nm1 * p.delta,
        },
        Model::Cug { edges } => {
            let e_star = space.edge_vars();
            if edges > e_star {
                return Err(Error::InvalidEdgeCount {
                    count: edges,
                    max: e_star,
                });
            }
            Moments::Cug {
                density: if e_star == 0 {
                    0.0
                } else {
                    edges as f64 / e_star as f64
                },
            }
        }
        Model::Uman(p) => {
            p.validate()?;
            let ties = 2.0 * p.m + p.a;
            Moments::Uman {
                density: p.m + p.a / 2.0,
                edgewise_reciprocity: (ties > 0.0).then(|| 2.0 * p.m / ties),
            }
        }
        Model::BetaBernoulli(p) => beta_moments(p, nm1)?,
        Model::BetaBernoulliMeandeg(md) => beta_moments(params_from_mean_degree(md, space)?, nm1)?,
        Model::DirichletCategorical(p) => dirichlet_moments(p)?,
        Model::DcNnd(nn) => dirichlet_moments(params_from_nnd(nn, space)?)?,
    })
}

fn beta_moments(p: BetaBernoulliParams, nm1: f64) -> Result<Moments> {
    p.validate()?;
    let s = p.alpha + p.beta;
    let mean = p.alpha / s;
    let var = p.alpha * p.beta / (s * s * (s + 1.0));
    Ok(Moments::BetaBernoulli {
        mean_density: mean,
        var_density: var,
        mean_degree: nm1 * mean,
        sd_mean_degree: nm1 * var.sqrt(),
    })
}

fn dirichlet_moments(p: DirichletCategoricalParams) -> Result<Moments> {
    p.validate()?;
    let s = p.total();
    let (mean_m, mean_a, mean_n) = (p.alpha / s, p.beta / s, p.gamma / s);
    Ok(Moments::DirichletCategorical {
        mean_m,
        mean_a,
        mean_n,
        mean_density: mean_m + mean_a / 2.0,
        reciprocation_rate: p.alpha / (p.alpha + p.beta),
    })
}
