//! Exhaustive enumeration of small graph spaces, for exact reference values.

use crate::error::{Error, Result};
use crate::graph::{Graph, GraphSpace};
use crate::io::fmt_float;
use crate::models::Model;
use crate::netinf::ObservationSet;
use crate::special::log_sum_exp;
use rayon::prelude::*;
use std::io::Write;

/// Largest number of edge variables that will be enumerated.
pub const MAX_EDGE_VARS: usize = 24;

fn check_cap(space: GraphSpace) -> Result<usize> {
    let e_star = space.edge_vars();
    if e_star > MAX_EDGE_VARS {
        Err(Error::SpaceTooLarge { edge_vars: e_star })
    } else {
        Ok(e_star)
    }
}

/// Every graph of `space`, ordered by canonical encoding.
pub fn enumerate_graphs(space: GraphSpace) -> Result<impl Iterator<Item = Graph>> {
    let e_star = check_cap(space)?;
    Ok((0..1u64 << e_star).map(move |code| Graph::decode(space, code).expect("code within range")))
}

/// Exact probabilities of every graph, keyed by canonical encoding.
#[derive(Debug, Clone, PartialEq)]
pub struct EnumeratedDistribution {
    pub space: GraphSpace,
    /// `(encoding, probability)` in encoding order.
    pub entries: Vec<(u64, f64)>,
    pub total: f64,
}

impl EnumeratedDistribution {
    pub fn probability(&self, code: u64) -> f64 {
        self.entries[code as usize].1
    }

    /// Pr(y_ij = 1) for each edge variable, in lexicographic order.
    pub fn marginals(&self) -> Vec<f64> {
        let e_star = self.space.edge_vars();
        let mut m = vec![0.0; e_star];
        for &(code, p) in &self.entries {
            for (k, slot) in m.iter_mut().enumerate() {
                if code >> k & 1 == 1 {
                    *slot += p;
                }
            }
        }
        m
    }

    /// Pr(e(Y) = e) for e = 0..=e*.
    pub fn edge_count_distribution(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.space.edge_vars() + 1];
        for &(code, p) in &self.entries {
            d[code.count_ones() as usize] += p;
        }
        d
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "encoding,probability")?;
        for &(code, p) in &self.entries {
            writeln!(out, "{code},{}", fmt_float(p))?;
        }
        Ok(())
    }
}

fn log_masses(space: GraphSpace, f: impl Fn(&Graph) -> Result<f64> + Sync) -> Result<Vec<f64>> {
    let e_star = check_cap(space)?;
    (0..1u64 << e_star)
        .into_par_iter()
        .map(|code| f(&Graph::decode(space, code)?))
        .collect()
}

/// exp(log_pmf) of every graph; `total` is their plain sum, not renormalized.
pub fn exact_distribution(space: GraphSpace, model: &Model) -> Result<EnumeratedDistribution> {
    let logs = log_masses(space, |g| model.log_pmf(g))?;
    let entries: Vec<(u64, f64)> = logs.iter().enumerate().map(|(k, l)| (k as u64, l.exp())).collect();
    let total = entries.iter().map(|e| e.1).sum();
    Ok(EnumeratedDistribution {
        space,
        entries,
        total,
    })
}

/// Posterior over graphs given slices observed with known error rates.
pub fn exact_posterior(
    space: GraphSpace,
    prior: &Model,
    obs: &ObservationSet,
    fp: f64,
    fn_rate: f64,
) -> Result<EnumeratedDistribution> {
    if obs.space() != space {
        return Err(Error::SpaceMismatch);
    }
    let cells: Vec<((usize, usize), (f64, f64))> = space
        .edge_var_list()
        .into_iter()
        .map(|(i, j)| ((i, j), obs.cell_log_likelihood(i, j, fp, fn_rate)))
        .collect();
    let logs = log_masses(space, |g| {
        let lp = prior.log_pmf(g)?;
        let ll: f64 = cells
            .iter()
            .map(|&((i, j), (l1, l0))| if g.has_edge(i, j) { l1 } else { l0 })
            .sum();
        Ok(lp + ll)
    })?;
    let norm = log_sum_exp(&logs);
    if !norm.is_finite() {
        return Err(Error::Domain("observations have zero probability under every graph".into()));
    }
    let entries: Vec<(u64, f64)> = logs
        .iter()
        .enumerate()
        .map(|(k, l)| (k as u64, (l - norm).exp()))
        .collect();
    let total = entries.iter().map(|e| e.1).sum();
    Ok(EnumeratedDistribution {
        space,
        entries,
        total,
    })
}
