//! Exact samplers for every family, the contagion dynamics and a Gibbs
//! sweep for the Dirichlet-categorical family.

use crate::error::{Error, Result};
use crate::graph::{DyadCensus, GliRecord, Graph, GraphSpace};
use crate::io::fmt_float;
use crate::models::{
    cond_edge_prob_bb, cond_edge_prob_dc, params_from_mean_degree, params_from_nnd, BernoulliParams,
    BetaBernoulliParams, DirichletCategoricalParams, Model, UmanParams,
};
use crate::rng::GraphRng;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Gamma};
use std::io::Write;

pub fn sample_bernoulli_graph(space: GraphSpace, p: BernoulliParams, rng: &mut GraphRng) -> Graph {
    let mut g = Graph::empty(space);
    for (i, j) in space.edge_var_list() {
        if rng.random::<f64>() < p.delta {
            g.set(i, j, true);
        }
    }
    g
}

/// Uniform draw from the graphs with exactly `edges` edges.
pub fn sample_cug(space: GraphSpace, edges: usize, rng: &mut GraphRng) -> Result<Graph> {
    let mut vars = space.edge_var_list();
    if edges > vars.len() {
        return Err(Error::InvalidEdgeCount {
            count: edges,
            max: vars.len(),
        });
    }
    let (chosen, _) = vars.partial_shuffle(rng, edges);
    let mut g = Graph::empty(space);
    for &(i, j) in chosen.iter() {
        g.set(i, j, true);
    }
    Ok(g)
}

/// Independent dyads with state probabilities (m, a, n); asymmetric dyads
/// are oriented by a fair coin.
pub fn sample_uman(space: GraphSpace, p: UmanParams, rng: &mut GraphRng) -> Result<Graph> {
    space.require_dyadic()?;
    p.validate()?;
    let mut g = Graph::empty(space);
    for (i, j) in space.dyad_list() {
        let u: f64 = rng.random();
        if u < p.m {
            g.set(i, j, true);
            g.set(j, i, true);
        } else if u < p.m + p.a {
            if rng.random::<bool>() {
                g.set(i, j, true);
            } else {
                g.set(j, i, true);
            }
        }
    }
    Ok(g)
}

fn gamma_variate(shape: f64, rng: &mut GraphRng) -> f64 {
    Gamma::new(shape, 1.0)
        .expect("shape validated by caller")
        .sample(rng)
}

/// Normalizes independent gamma variates. If every variate underflowed to 0
/// (all shapes tiny), the mass goes to one coordinate chosen with
/// probability proportional to its shape, which is the limiting law.
fn simplex_from_gammas(shapes: &[f64], rng: &mut GraphRng) -> Vec<f64> {
    let draws: Vec<f64> = shapes.iter().map(|&s| gamma_variate(s, rng)).collect();
    let total: f64 = draws.iter().sum();
    if total > 0.0 {
        return draws.iter().map(|d| d / total).collect();
    }
    let shape_total: f64 = shapes.iter().sum();
    let mut u = rng.random::<f64>() * shape_total;
    let mut out = vec![0.0; shapes.len()];
    for (k, &s) in shapes.iter().enumerate() {
        if u < s || k + 1 == shapes.len() {
            out[k] = 1.0;
            break;
        }
        u -= s;
    }
    out
}

pub fn sample_beta(p: BetaBernoulliParams, rng: &mut GraphRng) -> Result<f64> {
    p.validate()?;
    Ok(simplex_from_gammas(&[p.alpha, p.beta], rng)[0])
}

pub fn sample_dirichlet(p: DirichletCategoricalParams, rng: &mut GraphRng) -> Result<(f64, f64, f64)> {
    p.validate()?;
    let v = simplex_from_gammas(&[p.alpha, p.beta, p.gamma], rng);
    Ok((v[0], v[1], v[2]))
}

/// Draws δ ~ Beta(α, β), then a Bernoulli(δ) graph. Returns both.
pub fn sample_beta_bernoulli(
    space: GraphSpace,
    p: BetaBernoulliParams,
    rng: &mut GraphRng,
) -> Result<(Graph, f64)> {
    let delta = sample_beta(p, rng)?;
    Ok((sample_bernoulli_graph(space, BernoulliParams { delta }, rng), delta))
}

/// Draws (m, a, n) ~ Dirichlet(α, β, γ), then a U|man graph. Returns both.
pub fn sample_dirichlet_categorical(
    space: GraphSpace,
    p: DirichletCategoricalParams,
    rng: &mut GraphRng,
) -> Result<(Graph, (f64, f64, f64))> {
    space.require_dyadic()?;
    let (m, a, _) = sample_dirichlet(p, rng)?;
    // n is recomputed so the simplex check holds to rounding.
    let n = (1.0 - m - a).max(0.0);
    let rates = UmanParams { m, a, n };
    Ok((sample_uman(space, rates, rng)?, (m, a, n)))
}

/// One exact draw from any family; reparameterized families are mapped to
/// their natural parameters on `space` first.
pub fn sample_model(space: GraphSpace, model: &Model, rng: &mut GraphRng) -> Result<Graph> {
    match *model {
        Model::Bernoulli(p) => Ok(sample_bernoulli_graph(space, BernoulliParams::new(p.delta)?, rng)),
        Model::Cug { edges } => sample_cug(space, edges, rng),
        Model::Uman(p) => sample_uman(space, p, rng),
        Model::BetaBernoulli(p) => Ok(sample_beta_bernoulli(space, p, rng)?.0),
        Model::DirichletCategorical(p) => Ok(sample_dirichlet_categorical(space, p, rng)?.0),
        Model::BetaBernoulliMeandeg(md) => {
            Ok(sample_beta_bernoulli(space, params_from_mean_degree(md, space)?, rng)?.0)
        }
        Model::DcNnd(nn) => Ok(sample_dirichlet_categorical(space, params_from_nnd(nn, space)?, rng)?.0),
    }
}

/// Graph-level indices recorded along a contagion run.
#[derive(Debug, Clone, PartialEq)]
pub struct ContagionTrace {
    pub steps: Vec<u64>,
    pub gli: Vec<GliRecord>,
    pub final_graph: Graph,
}

impl ContagionTrace {
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "step,density,reciprocity,connectedness")?;
        for (t, r) in self.steps.iter().zip(&self.gli) {
            let rec = r.edgewise_reciprocity.map(fmt_float).unwrap_or_default();
            writeln!(
                out,
                "{t},{},{rec},{}",
                fmt_float(r.density),
                fmt_float(r.connectedness)
            )?;
        }
        Ok(())
    }
}

/// Discrete-time contagious tie formation.
///
/// Each round picks an ordered pair (i, j), i ≠ j, uniformly; actor i then
/// holds a tie to j iff a uniform deviate falls below the beta-Bernoulli full
/// conditional given every other tie. The state is recorded at round 0 and
/// after every `thin` rounds.
pub fn run_contagion(
    y0: &Graph,
    p: BetaBernoulliParams,
    rounds: u64,
    thin: u64,
    rng: &mut GraphRng,
) -> Result<ContagionTrace> {
    let space = y0.space();
    if !space.directed || space.loops {
        return Err(Error::UnsupportedSpace(
            "contagion runs on directed loopless graphs".into(),
        ));
    }
    let n = space.n_vertices;
    if n < 2 {
        return Err(Error::UnsupportedSpace(format!(
            "contagion needs at least one ordered pair, got {n} vertices"
        )));
    }
    if thin == 0 {
        return Err(Error::Domain("thin must be at least 1".into()));
    }
    p.validate()?;

    let mut y = y0.clone();
    let mut edges = y.edge_count();
    let mut steps = vec![0];
    let mut gli = vec![y.gli()];
    for t in 1..=rounds {
        let i = rng.random_range(0..n);
        let mut j = rng.random_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let current = y.has_edge(i, j);
        let e_rest = edges - usize::from(current);
        let prob = cond_edge_prob_bb(e_rest, space, p)?;
        let next = rng.random::<f64>() < prob;
        if next != current {
            y.set(i, j, next);
            edges = e_rest + usize::from(next);
        }
        if t % thin == 0 {
            steps.push(t);
            gli.push(y.gli());
        }
    }
    Ok(ContagionTrace {
        steps,
        gli,
        final_graph: y,
    })
}

pub(crate) fn dyad_state(y: &Graph, i: usize, j: usize) -> u8 {
    u8::from(y.has_edge(i, j)) + u8::from(y.has_edge(j, i))
}

pub(crate) fn adjust(c: &mut DyadCensus, state: u8, add: bool) {
    let slot = match state {
        2 => &mut c.mutual,
        1 => &mut c.asymmetric,
        _ => &mut c.null,
    };
    if add {
        *slot += 1;
    } else {
        *slot -= 1;
    }
}

/// One systematic-scan sweep over every edge variable, row-major, each drawn
/// from its Dirichlet-categorical full conditional.
pub fn gibbs_sweep_dc(y: &Graph, p: DirichletCategoricalParams, rng: &mut GraphRng) -> Result<Graph> {
    let space = y.space();
    space.require_dyadic()?;
    p.validate()?;
    let mut y = y.clone();
    let mut census = y.dyad_census()?;
    for (i, j) in space.edge_var_list() {
        let before = dyad_state(&y, i, j);
        adjust(&mut census, before, false);
        let prob = cond_edge_prob_dc(census, y.has_edge(j, i), space, p)?;
        y.set(i, j, rng.random::<f64>() < prob);
        adjust(&mut census, dyad_state(&y, i, j), true);
    }
    Ok(y)
}
