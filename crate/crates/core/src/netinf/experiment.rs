//! Replication harness: simulated criterion graphs, noisy slices, and
//! posterior accuracy by prior and number of slices.

use super::{
    hamming_accuracy, posterior_gibbs, simulate_css, uman_from_density_reciprocity, ErrorModel,
    GibbsConfig, GraphPrior,
};
use crate::error::{Error, Result};
use crate::graph::GraphSpace;
use crate::io::fmt_float;
use crate::rng::RngSeed;
use crate::samplers::sample_uman;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentDesign {
    pub n_vertices: usize,
    #[serde(default)]
    pub density_levels: Vec<f64>,
    #[serde(default)]
    pub reciprocity_levels: Vec<f64>,
    /// Explicit (density, reciprocity) pairs; replaces the full crossing of
    /// the two level lists when present.
    #[serde(default)]
    pub conditions: Option<Vec<(f64, f64)>>,
    pub n_criterion: usize,
    pub fp_rate: f64,
    pub fn_rate: f64,
    pub max_slices: usize,
    pub priors: Vec<GraphPrior>,
    pub slice_schedule: Vec<usize>,
    #[serde(default)]
    pub error_model: ErrorModel,
    #[serde(default)]
    pub gibbs: GibbsConfig,
}

impl ExperimentDesign {
    /// The (density, reciprocity) conditions in run order.
    pub fn condition_list(&self) -> Vec<(f64, f64)> {
        match &self.conditions {
            Some(c) => c.clone(),
            None => self
                .density_levels
                .iter()
                .flat_map(|&d| self.reciprocity_levels.iter().map(move |&r| (d, r)))
                .collect(),
        }
    }

    /// Number of result rows the design produces.
    pub fn n_rows(&self) -> usize {
        self.condition_list().len() * self.priors.len() * self.slice_schedule.len() * self.n_criterion
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_vertices < 2 {
            return Err(Error::Domain("n_vertices must be at least 2".into()));
        }
        for (name, r) in [("fp_rate", self.fp_rate), ("fn_rate", self.fn_rate)] {
            if !(0.0..=1.0).contains(&r) {
                return Err(Error::Domain(format!("{name} must lie in [0, 1], got {r}")));
            }
        }
        if self.slice_schedule.is_empty() || self.slice_schedule.contains(&0) {
            return Err(Error::Domain("slice schedule must be non-empty and positive".into()));
        }
        if self.slice_schedule.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Domain("slice schedule must be non-decreasing".into()));
        }
        if self.slice_schedule.iter().any(|&s| s > self.max_slices) {
            return Err(Error::Domain(format!(
                "slice schedule exceeds max_slices = {}",
                self.max_slices
            )));
        }
        for (d, r) in self.condition_list() {
            uman_from_density_reciprocity(d, r)?;
        }
        for p in &self.priors {
            p.validate()?;
        }
        self.error_model.validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRow {
    pub density: f64,
    pub reciprocity: f64,
    pub prior: GraphPrior,
    pub n_slices: usize,
    pub replicate: usize,
    pub accuracy: f64,
    pub inferred_density: f64,
    pub psrf_density: f64,
    pub psrf_fp: f64,
    pub psrf_fn: f64,
}

/// Runs every (condition, replicate, prior, slice count) cell.
///
/// Streams are derived from `seed` by position in the design, so the rows
/// do not depend on thread count. Rows are ordered by condition, prior,
/// slice count, then replicate.
pub fn run_experiment(design: &ExperimentDesign, seed: RngSeed) -> Result<Vec<ExperimentRow>> {
    design.validate()?;
    let conditions = design.condition_list();
    let space = GraphSpace::directed(design.n_vertices);
    let jobs: Vec<(usize, usize)> = (0..conditions.len())
        .flat_map(|c| (0..design.n_criterion).map(move |r| (c, r)))
        .collect();
    let per_job = jobs
        .par_iter()
        .map(|&(c, r)| {
            let (density, reciprocity) = conditions[c];
            let mut rng = seed.derive_rng(&[c as u64, r as u64]);
            let rates = uman_from_density_reciprocity(density, reciprocity)?;
            let criterion = sample_uman(space, rates, &mut rng)?;
            let obs = simulate_css(&criterion, design.fp_rate, design.fn_rate, design.max_slices, &mut rng)?;
            let cells: Vec<(usize, usize)> = (0..design.priors.len())
                .flat_map(|p| (0..design.slice_schedule.len()).map(move |s| (p, s)))
                .collect();
            cells
                .par_iter()
                .map(|&(p, s)| {
                    let prior = design.priors[p];
                    let n_slices = design.slice_schedule[s];
                    let mut chain_rng = seed.derive_rng(&[c as u64, r as u64, p as u64, s as u64]);
                    let draws = posterior_gibbs(
                        &obs.truncated(n_slices),
                        prior,
                        design.error_model,
                        design.gibbs,
                        &mut chain_rng,
                    )?;
                    let est = draws.point_estimate()?;
                    Ok(((c, p, s, r), ExperimentRow {
                        density,
                        reciprocity,
                        prior,
                        n_slices,
                        replicate: r,
                        accuracy: hamming_accuracy(&est, &criterion)?,
                        inferred_density: draws.density_summary()?,
                        psrf_density: draws.psrf_density().unwrap_or(f64::NAN),
                        psrf_fp: draws.psrf_fp().unwrap_or(f64::NAN),
                        psrf_fn: draws.psrf_fn().unwrap_or(f64::NAN),
                    }))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut keyed: Vec<_> = per_job.into_iter().flatten().collect();
    keyed.sort_by_key(|(k, _)| *k);
    Ok(keyed.into_iter().map(|(_, row)| row).collect())
}

pub fn write_experiment_csv<W: Write>(rows: &[ExperimentRow], mut out: W) -> Result<()> {
    writeln!(
        out,
        "density,reciprocity,prior,n_slices,replicate,accuracy,inferred_density,psrf_density,psrf_fp,psrf_fn"
    )?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            fmt_float(r.density),
            fmt_float(r.reciprocity),
            r.prior,
            r.n_slices,
            r.replicate,
            fmt_float(r.accuracy),
            fmt_float(r.inferred_density),
            fmt_float(r.psrf_density),
            fmt_float(r.psrf_fp),
            fmt_float(r.psrf_fn),
        )?;
    }
    Ok(())
}
