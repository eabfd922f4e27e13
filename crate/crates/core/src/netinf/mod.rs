//! Inference of a criterion graph from several error-prone reports of it.
//!
//! Each report ("slice") sees every edge variable; a present edge is
//! reported with probability 1 - fn and an absent one with probability fp.
//! The posterior over the graph and the two error rates is explored with a
//! systematic-scan Gibbs sampler under a Bernoulli, beta-Bernoulli or
//! Dirichlet-categorical graph prior.

mod experiment;

pub use experiment::{run_experiment, write_experiment_csv, ExperimentDesign, ExperimentRow};

use crate::error::{Error, Result};
use crate::graph::{Graph, GraphSpace};
use crate::models::{
    dyad_state_log_weights, BernoulliParams, BetaBernoulliParams, DirichletCategoricalParams, Model,
    UmanParams,
};
use crate::rng::{GraphRng, RngSeed};
use crate::samplers::{adjust, dyad_state, sample_beta};
use crate::special::prob_from_log_weights;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Reports of one graph space from several sources.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationSet {
    space: GraphSpace,
    slices: Vec<Graph>,
}

impl ObservationSet {
    pub fn new(space: GraphSpace, slices: Vec<Graph>) -> Result<Self> {
        if slices.iter().any(|s| s.space() != space) {
            return Err(Error::SpaceMismatch);
        }
        Ok(Self { space, slices })
    }

    pub fn space(&self) -> GraphSpace {
        self.space
    }

    pub fn slices(&self) -> &[Graph] {
        &self.slices
    }

    pub fn len(&self) -> usize {
        self.slices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slices.is_empty()
    }

    /// The first `k` slices.
    pub fn truncated(&self, k: usize) -> Self {
        Self {
            space: self.space,
            slices: self.slices[..k.min(self.slices.len())].to_vec(),
        }
    }

    /// Number of sources reporting (i, j).
    pub fn report_count(&self, i: usize, j: usize) -> usize {
        self.slices.iter().filter(|s| s.has_edge(i, j)).count()
    }

    /// Majority vote per cell; ties go to 0.
    pub fn majority(&self) -> Graph {
        let mut g = Graph::empty(self.space);
        for (i, j) in self.space.edge_var_list() {
            if 2 * self.report_count(i, j) > self.slices.len() {
                g.set(i, j, true);
            }
        }
        g
    }

    /// Log-likelihood of every slice's report of (i, j) given the true state.
    /// Returns (ln Pr | edge, ln Pr | no edge); ln 0 is `-inf`.
    pub fn cell_log_likelihood(&self, i: usize, j: usize, fp: f64, fn_rate: f64) -> (f64, f64) {
        let c = self.report_count(i, j);
        counts_log_likelihood(c, self.slices.len(), fp, fn_rate)
    }
}

/// `count * ln p`, with `0 * ln 0 = 0`.
fn term(count: usize, ln_p: f64) -> f64 {
    if count == 0 {
        0.0
    } else {
        count as f64 * ln_p
    }
}

fn counts_log_likelihood(reported: usize, slices: usize, fp: f64, fn_rate: f64) -> (f64, f64) {
    let missed = slices - reported;
    (
        term(reported, (1.0 - fn_rate).ln()) + term(missed, fn_rate.ln()),
        term(reported, fp.ln()) + term(missed, (1.0 - fp).ln()),
    )
}

/// Beta hyperparameters for one error rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaPrior {
    pub a: f64,
    pub b: f64,
}

impl BetaPrior {
    pub fn mean(&self) -> f64 {
        self.a / (self.a + self.b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pooling {
    /// One fp and one fn shared by every source.
    #[default]
    Global,
    PerSource,
}

/// Priors on the false-positive and false-negative rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ErrorModel {
    pub fp_prior: BetaPrior,
    pub fn_prior: BetaPrior,
    pub pooling: Pooling,
    /// Known (fp, fn); disables the rate updates.
    pub fixed_rates: Option<(f64, f64)>,
}

impl Default for ErrorModel {
    fn default() -> Self {
        Self {
            fp_prior: BetaPrior { a: 1.0, b: 11.0 },
            fn_prior: BetaPrior { a: 1.0, b: 11.0 },
            pooling: Pooling::Global,
            fixed_rates: None,
        }
    }
}

impl ErrorModel {
    pub fn fixed(fp: f64, fn_rate: f64) -> Self {
        Self {
            fixed_rates: Some((fp, fn_rate)),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("fp", self.fp_prior), ("fn", self.fn_prior)] {
            if !(p.a.is_finite() && p.a > 0.0 && p.b.is_finite() && p.b > 0.0) {
                return Err(Error::Domain(format!(
                    "{name} prior hyperparameters must be finite and > 0, got ({}, {})",
                    p.a, p.b
                )));
            }
        }
        if let Some((fp, fnr)) = self.fixed_rates {
            if !((0.0..=1.0).contains(&fp) && (0.0..=1.0).contains(&fnr)) {
                return Err(Error::Domain(format!(
                    "fixed error rates must lie in [0, 1], got ({fp}, {fnr})"
                )));
            }
        }
        Ok(())
    }
}

/// Prior on the criterion graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum GraphPrior {
    Bernoulli(f64),
    BetaBernoulli(BetaBernoulliParams),
    DirichletCategorical(DirichletCategoricalParams),
}

impl GraphPrior {
    pub fn validate(&self) -> Result<()> {
        match *self {
            GraphPrior::Bernoulli(d) => BernoulliParams::new(d).map(|_| ()),
            GraphPrior::BetaBernoulli(p) => p.validate(),
            GraphPrior::DirichletCategorical(p) => p.validate(),
        }
    }

    pub fn model(&self) -> Model {
        match *self {
            GraphPrior::Bernoulli(delta) => Model::Bernoulli(BernoulliParams { delta }),
            GraphPrior::BetaBernoulli(p) => Model::BetaBernoulli(p),
            GraphPrior::DirichletCategorical(p) => Model::DirichletCategorical(p),
        }
    }
}

impl fmt::Display for GraphPrior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphPrior::Bernoulli(d) => write!(f, "bernoulli:{d}"),
            GraphPrior::BetaBernoulli(p) => write!(f, "beta-bernoulli:{}:{}", p.alpha, p.beta),
            GraphPrior::DirichletCategorical(p) => {
                write!(f, "dirichlet-categorical:{}:{}:{}", p.alpha, p.beta, p.gamma)
            }
        }
    }
}

impl FromStr for GraphPrior {
    type Err = Error;

    /// `bernoulli:0.05`, `beta-bernoulli:0.5,0.5`, `dirichlet-categorical:1:1:1`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("invalid prior '{s}'"));
        let (name, rest) = s.trim().split_once(':').ok_or_else(bad)?;
        let v: Vec<f64> = rest
            .split([',', ':'])
            .map(|t| t.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        let prior = match (name.trim(), v.as_slice()) {
            ("bernoulli", &[d]) => GraphPrior::Bernoulli(d),
            ("beta-bernoulli", &[alpha, beta]) => {
                GraphPrior::BetaBernoulli(BetaBernoulliParams { alpha, beta })
            }
            ("dirichlet-categorical", &[alpha, beta, gamma]) => {
                GraphPrior::DirichletCategorical(DirichletCategoricalParams { alpha, beta, gamma })
            }
            _ => return Err(bad()),
        };
        prior.validate()?;
        Ok(prior)
    }
}

impl TryFrom<String> for GraphPrior {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<GraphPrior> for String {
    fn from(p: GraphPrior) -> String {
        p.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct GibbsConfig {
    pub chains: usize,
    pub burn_in: usize,
    /// Retained draws per chain.
    pub draws: usize,
    pub thin: usize,
}

impl Default for GibbsConfig {
    fn default() -> Self {
        Self {
            chains: 3,
            burn_in: 100,
            draws: 100,
            thin: 1,
        }
    }
}

/// Retained states of one chain. Rates hold one entry per source under
/// per-source pooling and a single entry otherwise.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Chain {
    pub graphs: Vec<Graph>,
    pub fp: Vec<Vec<f64>>,
    pub fn_rate: Vec<Vec<f64>>,
}

/// Post-burn-in output of [`posterior_gibbs`].
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorDraws {
    space: GraphSpace,
    pub chains: Vec<Chain>,
    pub burn_in: usize,
    pub thin: usize,
}

impl PosteriorDraws {
    pub fn new(space: GraphSpace, chains: Vec<Chain>, burn_in: usize, thin: usize) -> Result<Self> {
        if let Some(first) = chains.first() {
            let len = first.graphs.len();
            for c in &chains {
                if c.graphs.len() != len || c.fp.len() != len || c.fn_rate.len() != len {
                    return Err(Error::Mismatch("chains have unequal lengths".into()));
                }
                if c.graphs.iter().any(|g| g.space() != space) {
                    return Err(Error::SpaceMismatch);
                }
            }
        }
        Ok(Self {
            space,
            chains,
            burn_in,
            thin,
        })
    }

    pub fn space(&self) -> GraphSpace {
        self.space
    }

    pub fn n_draws(&self) -> usize {
        self.chains.iter().map(|c| c.graphs.len()).sum()
    }

    fn graphs(&self) -> impl Iterator<Item = &Graph> {
        self.chains.iter().flat_map(|c| c.graphs.iter())
    }

    fn edge_tallies(&self) -> Vec<usize> {
        let vars = self.space.edge_var_list();
        let mut counts = vec![0usize; vars.len()];
        for g in self.graphs() {
            for (k, &(i, j)) in vars.iter().enumerate() {
                counts[k] += usize::from(g.has_edge(i, j));
            }
        }
        counts
    }

    /// Pooled Pr(y_ij = 1) for each edge variable, in lexicographic order.
    pub fn marginals(&self) -> Result<Vec<f64>> {
        let total = self.n_draws();
        if total == 0 {
            return Err(Error::EmptyDraws);
        }
        Ok(self
            .edge_tallies()
            .into_iter()
            .map(|c| c as f64 / total as f64)
            .collect())
    }

    /// Edgewise marginal mode; a marginal of exactly one half gives no edge.
    pub fn point_estimate(&self) -> Result<Graph> {
        let total = self.n_draws();
        if total == 0 {
            return Err(Error::EmptyDraws);
        }
        let mut g = Graph::empty(self.space);
        for ((i, j), c) in self.space.edge_var_list().into_iter().zip(self.edge_tallies()) {
            if 2 * c > total {
                g.set(i, j, true);
            }
        }
        Ok(g)
    }

    /// Posterior mean of the graph density.
    pub fn density_summary(&self) -> Result<f64> {
        let total = self.n_draws();
        if total == 0 {
            return Err(Error::EmptyDraws);
        }
        Ok(self.graphs().map(density).sum::<f64>() / total as f64)
    }

    /// Posterior means of (fp, fn), averaged over sources.
    pub fn mean_rates(&self) -> Result<(f64, f64)> {
        let total = self.n_draws();
        if total == 0 {
            return Err(Error::EmptyDraws);
        }
        let avg = |v: &Vec<f64>| v.iter().sum::<f64>() / v.len() as f64;
        let fp = self.chains.iter().flat_map(|c| c.fp.iter().map(avg)).sum::<f64>();
        let fnr = self.chains.iter().flat_map(|c| c.fn_rate.iter().map(avg)).sum::<f64>();
        Ok((fp / total as f64, fnr / total as f64))
    }

    /// Posterior means of (fp, fn) for each source; one entry under global pooling.
    pub fn mean_source_rates(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let total = self.n_draws();
        if total == 0 {
            return Err(Error::EmptyDraws);
        }
        let sources = self.chains[0].fp.first().map_or(0, Vec::len);
        let mut fp = vec![0.0; sources];
        let mut fnr = vec![0.0; sources];
        for c in &self.chains {
            for (f, n) in c.fp.iter().zip(&c.fn_rate) {
                for k in 0..sources {
                    fp[k] += f[k] / total as f64;
                    fnr[k] += n[k] / total as f64;
                }
            }
        }
        Ok((fp, fnr))
    }

    pub fn psrf_density(&self) -> Result<f64> {
        let series: Vec<Vec<f64>> = self
            .chains
            .iter()
            .map(|c| c.graphs.iter().map(density).collect())
            .collect();
        psrf(&series)
    }

    /// Largest scale reduction over the per-source false-positive series.
    pub fn psrf_fp(&self) -> Result<f64> {
        self.psrf_rates(|c| &c.fp)
    }

    pub fn psrf_fn(&self) -> Result<f64> {
        self.psrf_rates(|c| &c.fn_rate)
    }

    fn psrf_rates(&self, pick: impl Fn(&Chain) -> &Vec<Vec<f64>>) -> Result<f64> {
        let sources = self
            .chains
            .first()
            .and_then(|c| pick(c).first())
            .map_or(0, |v| v.len());
        let mut worst = f64::NEG_INFINITY;
        for s in 0..sources.max(1) {
            let series: Vec<Vec<f64>> = self
                .chains
                .iter()
                .map(|c| pick(c).iter().map(|v| v.get(s).copied().unwrap_or(f64::NAN)).collect())
                .collect();
            worst = worst.max(psrf(&series)?);
        }
        Ok(worst)
    }
}

fn density(g: &Graph) -> f64 {
    let e_star = g.space().edge_vars();
    if e_star == 0 {
        0.0
    } else {
        g.edge_count() as f64 / e_star as f64
    }
}

/// Gelman-Rubin potential scale reduction factor.
///
/// Returns 1 when every draw of every chain is identical and `+inf` when
/// the chains are constant at different values.
pub fn psrf(chains: &[Vec<f64>]) -> Result<f64> {
    let m = chains.len();
    if m < 2 {
        return Err(Error::InsufficientChains(format!("need at least 2 chains, got {m}")));
    }
    let n = chains[0].len();
    if chains.iter().any(|c| c.len() != n) {
        return Err(Error::InsufficientChains("chains have unequal lengths".into()));
    }
    if n < 10 {
        return Err(Error::InsufficientChains(format!("need at least 10 draws per chain, got {n}")));
    }
    let nf = n as f64;
    let means: Vec<f64> = chains.iter().map(|c| c.iter().sum::<f64>() / nf).collect();
    let grand = means.iter().sum::<f64>() / m as f64;
    let b = nf * means.iter().map(|x| (x - grand).powi(2)).sum::<f64>() / (m - 1) as f64;
    let w = chains
        .iter()
        .zip(&means)
        .map(|(c, mu)| c.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / (nf - 1.0))
        .sum::<f64>()
        / m as f64;
    if w == 0.0 {
        return Ok(if b == 0.0 { 1.0 } else { f64::INFINITY });
    }
    Ok(((nf - 1.0) / nf + b / (nf * w)).sqrt())
}

/// U|man dyad rates with the given expected density and edgewise reciprocity.
pub fn uman_from_density_reciprocity(density: f64, reciprocity: f64) -> Result<UmanParams> {
    let infeasible = || Error::Infeasible {
        density,
        reciprocity,
    };
    if !((0.0..=1.0).contains(&density) && (0.0..=1.0).contains(&reciprocity)) {
        return Err(infeasible());
    }
    let m = density * reciprocity;
    let a = 2.0 * density * (1.0 - reciprocity);
    let n = 1.0 - m - a;
    if n < -UmanParams::SIMPLEX_TOL || a > 1.0 {
        return Err(infeasible());
    }
    UmanParams::new(m, a, n.max(0.0))
}

/// Independent error-prone reports of `criterion`.
pub fn simulate_css(
    criterion: &Graph,
    fp: f64,
    fn_rate: f64,
    n_slices: usize,
    rng: &mut GraphRng,
) -> Result<ObservationSet> {
    if !((0.0..=1.0).contains(&fp) && (0.0..=1.0).contains(&fn_rate)) {
        return Err(Error::Domain(format!(
            "error rates must lie in [0, 1], got ({fp}, {fn_rate})"
        )));
    }
    let space = criterion.space();
    let vars = space.edge_var_list();
    let slices = (0..n_slices)
        .map(|_| {
            let mut s = Graph::empty(space);
            for &(i, j) in &vars {
                let u: f64 = rng.random();
                let p = if criterion.has_edge(i, j) { 1.0 - fn_rate } else { fp };
                if u < p {
                    s.set(i, j, true);
                }
            }
            s
        })
        .collect();
    ObservationSet::new(space, slices)
}

/// Fraction of edge variables on which `est` agrees with `criterion`.
pub fn hamming_accuracy(est: &Graph, criterion: &Graph) -> Result<f64> {
    if est.space() != criterion.space() {
        return Err(Error::SpaceMismatch);
    }
    let vars = est.space().edge_var_list();
    if vars.is_empty() {
        return Ok(1.0);
    }
    let agree = vars
        .iter()
        .filter(|&&(i, j)| est.has_edge(i, j) == criterion.has_edge(i, j))
        .count();
    Ok(agree as f64 / vars.len() as f64)
}

/// Observation data flattened for the sampler.
struct Prepared<'a> {
    obs: &'a ObservationSet,
    vars: Vec<(usize, usize)>,
    dyads: Vec<(usize, usize)>,
    /// Reports per cell, indexed `i * n + j`.
    counts: Vec<usize>,
}

impl<'a> Prepared<'a> {
    fn new(obs: &'a ObservationSet) -> Self {
        let space = obs.space();
        let n = space.n_vertices;
        let mut counts = vec![0; n * n];
        for s in obs.slices() {
            for (i, j) in s.edges() {
                counts[i * n + j] += 1;
            }
        }
        Self {
            obs,
            vars: space.edge_var_list(),
            dyads: space.dyad_list(),
            counts,
        }
    }

    fn n(&self) -> usize {
        self.obs.space().n_vertices
    }
}

/// Per-chain sampler state.
struct ChainState<'a> {
    data: &'a Prepared<'a>,
    prior: GraphPrior,
    em: ErrorModel,
    y: Graph,
    fp: Vec<f64>,
    fn_rate: Vec<f64>,
    /// ln Pr(reports | edge) and ln Pr(reports | no edge) per cell.
    ll1: Vec<f64>,
    ll0: Vec<f64>,
}

fn clamp_rate(r: f64) -> f64 {
    r.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON)
}

impl<'a> ChainState<'a> {
    fn new(data: &'a Prepared<'a>, prior: GraphPrior, em: ErrorModel) -> Self {
        let sources = match em.pooling {
            Pooling::Global => 1,
            Pooling::PerSource => data.obs.len(),
        };
        let (fp0, fn0) = em
            .fixed_rates
            .unwrap_or((em.fp_prior.mean(), em.fn_prior.mean()));
        let cells = data.n() * data.n();
        Self {
            data,
            prior,
            em,
            y: data.obs.majority(),
            fp: vec![fp0; sources],
            fn_rate: vec![fn0; sources],
            ll1: vec![0.0; cells],
            ll0: vec![0.0; cells],
        }
    }

    fn update_rates(&mut self, rng: &mut GraphRng) -> Result<()> {
        if self.em.fixed_rates.is_some() {
            return Ok(());
        }
        let s = self.data.obs.len();
        let n = self.data.n();
        // Tallies per source: false positives, true negatives, false negatives, true positives.
        let mut tallies = vec![[0usize; 4]; self.fp.len()];
        match self.em.pooling {
            Pooling::Global => {
                let t = &mut tallies[0];
                for &(i, j) in &self.data.vars {
                    let c = self.data.counts[i * n + j];
                    if self.y.has_edge(i, j) {
                        t[2] += s - c;
                        t[3] += c;
                    } else {
                        t[0] += c;
                        t[1] += s - c;
                    }
                }
            }
            Pooling::PerSource => {
                for (k, slice) in self.data.obs.slices().iter().enumerate() {
                    let t = &mut tallies[k];
                    for &(i, j) in &self.data.vars {
                        let r = slice.has_edge(i, j);
                        let idx = 2 * usize::from(self.y.has_edge(i, j)) + usize::from(r == self.y.has_edge(i, j));
                        // idx: 0 = fp, 1 = tn, 2 = fn, 3 = tp
                        t[idx] += 1;
                    }
                }
            }
        }
        let (fpp, fnp) = (self.em.fp_prior, self.em.fn_prior);
        for (k, t) in tallies.iter().enumerate() {
            let fp = sample_beta(
                BetaBernoulliParams {
                    alpha: fpp.a + t[0] as f64,
                    beta: fpp.b + t[1] as f64,
                },
                rng,
            )?;
            let fnr = sample_beta(
                BetaBernoulliParams {
                    alpha: fnp.a + t[2] as f64,
                    beta: fnp.b + t[3] as f64,
                },
                rng,
            )?;
            self.fp[k] = clamp_rate(fp);
            self.fn_rate[k] = clamp_rate(fnr);
        }
        Ok(())
    }

    fn refresh_likelihoods(&mut self) {
        let n = self.data.n();
        let s = self.data.obs.len();
        match self.em.pooling {
            Pooling::Global => {
                let (fp, fnr) = (self.fp[0], self.fn_rate[0]);
                for &(i, j) in &self.data.vars {
                    let idx = i * n + j;
                    let (a, b) = counts_log_likelihood(self.data.counts[idx], s, fp, fnr);
                    self.ll1[idx] = a;
                    self.ll0[idx] = b;
                }
            }
            Pooling::PerSource => {
                let logs: Vec<[f64; 4]> = self
                    .fp
                    .iter()
                    .zip(&self.fn_rate)
                    .map(|(&fp, &fnr)| [(1.0 - fnr).ln(), fnr.ln(), fp.ln(), (1.0 - fp).ln()])
                    .collect();
                for &(i, j) in &self.data.vars {
                    let (mut a, mut b) = (0.0, 0.0);
                    for (slice, l) in self.data.obs.slices().iter().zip(&logs) {
                        if slice.has_edge(i, j) {
                            a += l[0];
                            b += l[2];
                        } else {
                            a += l[1];
                            b += l[3];
                        }
                    }
                    let idx = i * n + j;
                    self.ll1[idx] = a;
                    self.ll0[idx] = b;
                }
            }
        }
    }

    fn sweep(&mut self, rng: &mut GraphRng) -> Result<()> {
        self.refresh_likelihoods();
        match self.prior {
            GraphPrior::Bernoulli(d) => {
                self.edge_sweep(rng, d.ln(), (1.0 - d).ln())
            }
            GraphPrior::BetaBernoulli(p) => {
                let e_star = self.data.vars.len();
                let mut edges = self.y.edge_count();
                let n = self.data.n();
                for k in 0..self.data.vars.len() {
                    let (i, j) = self.data.vars[k];
                    let cur = self.y.has_edge(i, j);
                    let e_rest = edges - usize::from(cur);
                    let idx = i * n + j;
                    let w1 = (e_rest as f64 + p.alpha).ln() + self.ll1[idx];
                    let w0 = ((e_star - 1 - e_rest) as f64 + p.beta).ln() + self.ll0[idx];
                    let prob = prob_from_log_weights(w1, w0)
                        .ok_or(Error::ImpossibleObservation { i: i + 1, j: j + 1 })?;
                    let new = rng.random::<f64>() < prob;
                    self.y.set(i, j, new);
                    edges = e_rest + usize::from(new);
                }
                Ok(())
            }
            GraphPrior::DirichletCategorical(p) => self.dyad_sweep(p, rng),
        }
    }

    /// Independent edges with fixed prior log weights.
    fn edge_sweep(&mut self, rng: &mut GraphRng, p1: f64, p0: f64) -> Result<()> {
        let n = self.data.n();
        for k in 0..self.data.vars.len() {
            let (i, j) = self.data.vars[k];
            let idx = i * n + j;
            let prob = prob_from_log_weights(p1 + self.ll1[idx], p0 + self.ll0[idx])
                .ok_or(Error::ImpossibleObservation { i: i + 1, j: j + 1 })?;
            let new = rng.random::<f64>() < prob;
            self.y.set(i, j, new);
        }
        Ok(())
    }

    fn dyad_sweep(&mut self, p: DirichletCategoricalParams, rng: &mut GraphRng) -> Result<()> {
        let n = self.data.n();
        let mut census = self.y.dyad_census()?;
        for k in 0..self.data.dyads.len() {
            let (i, j) = self.data.dyads[k];
            adjust(&mut census, dyad_state(&self.y, i, j), false);
            let prior = dyad_state_log_weights(census, p);
            let (ij, ji) = (i * n + j, j * n + i);
            let obs = [
                self.ll1[ij] + self.ll1[ji],
                self.ll1[ij] + self.ll0[ji],
                self.ll0[ij] + self.ll1[ji],
                self.ll0[ij] + self.ll0[ji],
            ];
            let w: [f64; 4] = std::array::from_fn(|s| prior[s] + obs[s]);
            let state = sample_log_weights(&w, rng)
                .ok_or(Error::ImpossibleObservation { i: i + 1, j: j + 1 })?;
            let (a, b) = match state {
                0 => (true, true),
                1 => (true, false),
                2 => (false, true),
                _ => (false, false),
            };
            self.y.set(i, j, a);
            self.y.set(j, i, b);
            adjust(&mut census, dyad_state(&self.y, i, j), true);
        }
        Ok(())
    }
}

/// Index drawn with probability proportional to `exp(w)`; `None` if every weight is `-inf`.
fn sample_log_weights(w: &[f64], rng: &mut GraphRng) -> Option<usize> {
    let max = w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return None;
    }
    let p: Vec<f64> = w.iter().map(|v| (v - max).exp()).collect();
    let total: f64 = p.iter().sum();
    let mut u = rng.random::<f64>() * total;
    let mut last = 0;
    for (k, &pk) in p.iter().enumerate() {
        if pk > 0.0 {
            if u < pk {
                return Some(k);
            }
            u -= pk;
            last = k;
        }
    }
    Some(last)
}

fn run_chain(
    data: &Prepared<'_>,
    prior: GraphPrior,
    em: ErrorModel,
    cfg: GibbsConfig,
    seed: RngSeed,
) -> Result<Chain> {
    let mut rng = seed.rng();
    let mut st = ChainState::new(data, prior, em);
    let mut chain = Chain::default();
    let total = cfg.burn_in + cfg.draws * cfg.thin;
    for it in 1..=total {
        st.update_rates(&mut rng)?;
        st.sweep(&mut rng)?;
        if it > cfg.burn_in && (it - cfg.burn_in) % cfg.thin == 0 {
            chain.graphs.push(st.y.clone());
            chain.fp.push(st.fp.clone());
            chain.fn_rate.push(st.fn_rate.clone());
        }
    }
    Ok(chain)
}

/// Gibbs sampler for the criterion graph and error rates.
///
/// Each iteration draws the error rates given the current graph, then
/// sweeps the graph given the rates. Chains start from the majority vote
/// and the prior-mean rates, each on a stream seeded from `rng`.
pub fn posterior_gibbs(
    obs: &ObservationSet,
    prior: GraphPrior,
    em: ErrorModel,
    cfg: GibbsConfig,
    rng: &mut GraphRng,
) -> Result<PosteriorDraws> {
    if obs.is_empty() {
        return Err(Error::Domain("at least one observation slice is required".into()));
    }
    if cfg.chains == 0 || cfg.draws == 0 || cfg.thin == 0 {
        return Err(Error::Domain(
            "chains, draws and thin must all be at least 1".into(),
        ));
    }
    prior.validate()?;
    em.validate()?;
    if matches!(prior, GraphPrior::DirichletCategorical(_)) {
        obs.space().require_dyadic()?;
    }
    let data = Prepared::new(obs);
    let seeds: Vec<RngSeed> = (0..cfg.chains).map(|_| RngSeed(rng.random())).collect();
    let chains = seeds
        .into_par_iter()
        .map(|s| run_chain(&data, prior, em, cfg, s))
        .collect::<Result<Vec<_>>>()?;
    PosteriorDraws::new(obs.space(), chains, cfg.burn_in, cfg.thin)
}
