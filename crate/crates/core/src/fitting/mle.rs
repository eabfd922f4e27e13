use super::optim::{fd_hessian, invert, minimize, Objective, Settings};
use super::{bernoulli_loglik_closed, grad_pooled_loglik, pooled_loglik, Family, GraphSet};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    pub max_iter: usize,
    /// Restrict α, β (, γ) to values above 1, the region where the offset
    /// approximation is proper, by optimizing log(θ - 1).
    pub approx: bool,
    /// Cap on the absolute value of each transformed parameter.
    pub bound: f64,
    pub gtol: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            max_iter: 1000,
            approx: false,
            bound: 30.0,
            gtol: 1e-6,
        }
    }
}

/// Scale on which the optimizer worked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scale {
    /// Closed-form estimate, no transform.
    Natural,
    Log,
    LogMinusOne,
    /// Log for the positive parameters, logit for the reciprocation rate.
    LogLogit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Transform {
    Log,
    LogMinusOne,
    Logit,
}

impl Transform {
    fn to_natural(self, x: f64) -> f64 {
        match self {
            Transform::Log => x.exp(),
            Transform::LogMinusOne => 1.0 + x.exp(),
            Transform::Logit => 1.0 / (1.0 + (-x).exp()),
        }
    }

    fn from_natural(self, t: f64) -> f64 {
        match self {
            Transform::Log => t.ln(),
            Transform::LogMinusOne => (t - 1.0).ln(),
            Transform::Logit => (t / (1.0 - t)).ln(),
        }
    }

    /// dθ/dx at natural value θ.
    fn slope(self, t: f64) -> f64 {
        match self {
            Transform::Log => t,
            Transform::LogMinusOne => t - 1.0,
            Transform::Logit => t * (1.0 - t),
        }
    }
}

fn transforms(family: Family, approx: bool) -> (Vec<Transform>, Scale) {
    let n = family.n_params();
    match family {
        Family::DcNnd => (vec![Transform::Log, Transform::Logit, Transform::Log], Scale::LogLogit),
        _ if approx => (vec![Transform::LogMinusOne; n], Scale::LogMinusOne),
        _ => (vec![Transform::Log; n], Scale::Log),
    }
}

/// Why a family's likelihood has no interior maximum on this data.
#[derive(Debug, Clone, PartialEq)]
pub enum Degeneracy {
    InsufficientObservations {
        k: usize,
        required: usize,
        /// Description of the ray along which the likelihood keeps rising.
        recession: Option<String>,
    },
    ZeroDispersion,
}

impl fmt::Display for Degeneracy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degeneracy::InsufficientObservations {
                k,
                required,
                recession,
            } => {
                write!(f, "insufficient observations: k = {k}, at least {required} graphs needed")?;
                if let Some(r) = recession {
                    write!(f, "; likelihood increases without bound along {r}")?;
                }
                Ok(())
            }
            Degeneracy::ZeroDispersion => {
                f.write_str("zero dispersion: every graph has the same sufficient-statistic proportions")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Identifiability {
    Ok,
    Degenerate(Degeneracy),
}

fn recession_direction(gs: &GraphSet, family: Family) -> Option<String> {
    if gs.len() != 1 {
        return None;
    }
    let s = &gs.stats[0];
    match family {
        Family::BetaBernoulli | Family::BetaBernoulliMeandeg => Some(format!(
            "alpha/(alpha+beta) = e/e* = {}/{}",
            s.edges,
            s.space.edge_vars()
        )),
        Family::DirichletCategorical | Family::DcNnd => s.census.map(|c| {
            format!(
                "(alpha, beta, gamma) proportional to (M, A, N) = ({}, {}, {})",
                c.mutual, c.asymmetric, c.null
            )
        }),
        Family::Bernoulli => None,
    }
}

/// Flags data from which `family` cannot be estimated.
pub fn identifiability_check(gs: &GraphSet, family: Family) -> Identifiability {
    let k = gs.len();
    if k < family.min_graphs() {
        return Identifiability::Degenerate(Degeneracy::InsufficientObservations {
            k,
            required: family.min_graphs(),
            recession: recession_direction(gs, family),
        });
    }
    let all_same = match family {
        Family::Bernoulli => false,
        Family::BetaBernoulli | Family::BetaBernoulliMeandeg => {
            let first = &gs.stats[0];
            let (e0, v0) = (first.edges as u128, first.space.edge_vars() as u128);
            gs.stats
                .iter()
                .all(|s| s.edges as u128 * v0 == e0 * s.space.edge_vars() as u128)
        }
        Family::DirichletCategorical | Family::DcNnd => match gs.censuses() {
            Ok(cs) => {
                let c0 = cs[0];
                let d0 = c0.total() as u128;
                cs.iter().all(|c| {
                    let d = c.total() as u128;
                    c.mutual as u128 * d0 == c0.mutual as u128 * d
                        && c.asymmetric as u128 * d0 == c0.asymmetric as u128 * d
                })
            }
            Err(_) => false,
        },
    };
    if all_same {
        Identifiability::Degenerate(Degeneracy::ZeroDispersion)
    } else {
        Identifiability::Ok
    }
}

/// Outcome of a maximum-likelihood fit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub family: Family,
    pub estimates: BTreeMap<String, f64>,
    pub std_errors: BTreeMap<String, f64>,
    pub scale: Scale,
    #[serde(rename = "logLik")]
    pub log_likelihood: f64,
    pub deviance: f64,
    #[serde(rename = "nullDeviance")]
    pub null_deviance: f64,
    pub aic: f64,
    pub converged: bool,
    pub flags: Vec<String>,
    /// Residual degrees of freedom, Σ e* minus the parameter count.
    pub df: usize,
    #[serde(skip)]
    pub degenerate: Option<Degeneracy>,
    #[serde(skip)]
    data_key: u64,
}

impl FitResult {
    /// Estimates in the family's parameter order.
    pub fn estimate_vec(&self) -> Vec<f64> {
        self.family
            .param_names()
            .iter()
            .map(|n| self.estimates.get(*n).copied().unwrap_or(f64::NAN))
            .collect()
    }

    pub fn std_error_vec(&self) -> Vec<f64> {
        self.family
            .param_names()
            .iter()
            .map(|n| self.std_errors.get(*n).copied().unwrap_or(f64::NAN))
            .collect()
    }

    pub fn n_params(&self) -> usize {
        self.family.n_params()
    }
}

fn data_key(gs: &GraphSet) -> u64 {
    let mut h = DefaultHasher::new();
    for g in gs.graphs() {
        g.hash(&mut h);
    }
    h.finish()
}

fn named(family: Family, values: &[f64]) -> BTreeMap<String, f64> {
    family
        .param_names()
        .iter()
        .zip(values)
        .map(|(n, v)| (n.to_string(), *v))
        .collect()
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = if xs.len() > 1 {
        xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (m, v)
}

/// Method-of-moments (α, β), correcting the between-graph density variance
/// for binomial noise. `None` when the moments admit no beta solution.
fn moments_beta(gs: &GraphSet) -> Option<[f64; 2]> {
    let d: Vec<f64> = gs
        .stats
        .iter()
        .map(|s| s.edges as f64 / s.space.edge_vars() as f64)
        .collect();
    let (m, v) = mean_var(&d);
    let noise = gs
        .stats
        .iter()
        .map(|s| m * (1.0 - m) / s.space.edge_vars() as f64)
        .sum::<f64>()
        / gs.len() as f64;
    let vd = v - noise;
    if !(m > 0.0 && m < 1.0 && vd > 0.0 && vd < m * (1.0 - m)) {
        return None;
    }
    let k = m * (1.0 - m) / vd - 1.0;
    Some([m * k, (1.0 - m) * k])
}

fn moments_dirichlet(gs: &GraphSet) -> Option<[f64; 3]> {
    let cs = gs.censuses().ok()?;
    let mut props = [vec![], vec![], vec![]];
    let mut noise_d = 0.0;
    for c in &cs {
        let d = c.total() as f64;
        props[0].push(c.mutual as f64 / d);
        props[1].push(c.asymmetric as f64 / d);
        props[2].push(c.null as f64 / d);
        noise_d += 1.0 / d;
    }
    noise_d /= cs.len() as f64;
    let mut means = [0.0; 3];
    let (mut spread, mut var) = (0.0, 0.0);
    for k in 0..3 {
        let (m, v) = mean_var(&props[k]);
        means[k] = m;
        spread += m * (1.0 - m);
        var += v - m * (1.0 - m) * noise_d;
    }
    if means.iter().any(|&m| m <= 0.0) || var <= 0.0 || var >= spread {
        return None;
    }
    let s = spread / var - 1.0;
    Some([means[0] * s, means[1] * s, means[2] * s])
}

fn feasible(gs: &GraphSet, family: Family, theta: &[f64]) -> bool {
    family
        .model(theta)
        .and_then(|m| pooled_loglik(gs, &m))
        .map(|v| v.is_finite())
        .unwrap_or(false)
}

/// Shrinks the dispersion parameter until every graph accepts the point.
fn shrink_to_feasible(gs: &GraphSet, family: Family, mut theta: Vec<f64>, sigma_index: usize) -> Option<Vec<f64>> {
    for _ in 0..200 {
        if feasible(gs, family, &theta) {
            return Some(theta);
        }
        theta[sigma_index] *= 0.7;
    }
    None
}

fn initial_point(gs: &GraphSet, family: Family, approx: bool) -> Option<Vec<f64>> {
    let min_nm1 = gs.stats.iter().map(|s| s.space.n_vertices).min()? as f64 - 1.0;
    let mean_nm1 = gs.stats.iter().map(|s| s.space.n_vertices as f64 - 1.0).sum::<f64>() / gs.len() as f64;
    let floor = |v: Vec<f64>| -> Vec<f64> {
        if approx {
            v.into_iter().map(|t| t.max(1.5)).collect()
        } else {
            v
        }
    };
    match family {
        Family::Bernoulli => None,
        Family::BetaBernoulli => Some(floor(moments_beta(gs).unwrap_or([1.0, 1.0]).to_vec())),
        Family::DirichletCategorical => Some(floor(moments_dirichlet(gs).unwrap_or([1.0, 1.0, 1.0]).to_vec())),
        Family::BetaBernoulliMeandeg => {
            let [a, b] = moments_beta(gs).unwrap_or([1.0, 1.0]);
            let s = a + b;
            let mu = (a / s * mean_nm1).min(0.9 * min_nm1);
            let sd = (a * b / (s * s * (s + 1.0))).sqrt() * mean_nm1;
            shrink_to_feasible(gs, family, vec![mu, sd], 1)
        }
        Family::DcNnd => {
            let [a, b, c] = moments_dirichlet(gs).unwrap_or([1.0, 1.0, 1.0]);
            let s = a + b + c;
            let mu = ((a + b) / s * mean_nm1).min(0.9 * min_nm1);
            let sd = ((a + b) * c / (s * s * (s + 1.0))).sqrt() * mean_nm1;
            shrink_to_feasible(gs, family, vec![mu, a / (a + b), sd], 2)
        }
    }
}

/// Direction, on the transformed scale, along which the likelihood of
/// zero-dispersion data keeps increasing: total concentration up, or the
/// degree dispersion down.
fn recession_step(family: Family) -> Vec<f64> {
    match family {
        Family::BetaBernoulliMeandeg => vec![0.0, -1.0],
        Family::DcNnd => vec![0.0, 0.0, -1.0],
        f => vec![1.0; f.n_params()],
    }
}

fn degenerate_result(gs: &GraphSet, family: Family, scale: Scale, null_dev: f64, why: Degeneracy) -> FitResult {
    FitResult {
        family,
        estimates: BTreeMap::new(),
        std_errors: BTreeMap::new(),
        scale,
        log_likelihood: f64::NAN,
        deviance: f64::NAN,
        null_deviance: null_dev,
        aic: f64::NAN,
        converged: false,
        flags: vec![format!("degenerate: {why}")],
        df: gs.total_edge_vars().saturating_sub(family.n_params()),
        degenerate: Some(why),
        data_key: data_key(gs),
    }
}

/// Maximum-likelihood fit of `family` to the pooled graphs.
///
/// The deviance baseline (`nullDeviance`) is the zero-parameter uniform
/// Bernoulli graph, δ = 1/2, for which the deviance is 2 ln 2 · Σ e*.
pub fn fit_mle(gs: &GraphSet, family: Family, cfg: &FitConfig) -> Result<FitResult> {
    let total_vars = gs.total_edge_vars();
    let null_dev = 2.0 * std::f64::consts::LN_2 * total_vars as f64;
    let df = total_vars.saturating_sub(family.n_params());
    if family.is_dyadic() {
        gs.censuses()?;
    }
    if cfg.approx && !matches!(family, Family::BetaBernoulli | Family::DirichletCategorical) {
        return Err(Error::Domain(format!(
            "the offset-approximate fit covers beta-bernoulli and dirichlet-categorical, not {family}"
        )));
    }
    let (tr, scale) = if family == Family::Bernoulli {
        (vec![], Scale::Natural)
    } else {
        transforms(family, cfg.approx)
    };

    let identifiability = identifiability_check(gs, family);
    if let Identifiability::Degenerate(why @ Degeneracy::InsufficientObservations { .. }) = &identifiability {
        return Ok(degenerate_result(gs, family, scale, null_dev, why.clone()));
    }

    if family == Family::Bernoulli {
        let delta = gs.total_edges() as f64 / total_vars as f64;
        let ll = bernoulli_loglik_closed(gs, delta);
        let se = (delta * (1.0 - delta) / total_vars as f64).sqrt();
        return Ok(FitResult {
            family,
            estimates: named(family, &[delta]),
            std_errors: named(family, &[se]),
            scale,
            log_likelihood: ll,
            deviance: -2.0 * ll,
            null_deviance: null_dev,
            aic: -2.0 * ll + 2.0,
            converged: true,
            flags: vec![],
            df,
            degenerate: None,
            data_key: data_key(gs),
        });
    }

    let to_theta = |x: &[f64]| -> Vec<f64> { x.iter().zip(&tr).map(|(&v, t)| t.to_natural(v)).collect() };
    let objective = |x: &[f64]| -> Option<(f64, Vec<f64>)> {
        let theta = to_theta(x);
        let model = family.model(&theta).ok()?;
        let ll = pooled_loglik(gs, &model).ok()?;
        let g = grad_pooled_loglik(gs, &model).ok()?;
        let gx = g
            .iter()
            .zip(&theta)
            .zip(&tr)
            .map(|((gi, &t), tf)| -gi * tf.slope(t))
            .collect();
        Some((-ll, gx))
    };
    let obj: &Objective<'_> = &objective;

    let theta0 = initial_point(gs, family, cfg.approx)
        .ok_or_else(|| Error::Domain(format!("no feasible starting point for {family} on this data")))?;
    let x0: Vec<f64> = theta0.iter().zip(&tr).map(|(&t, tf)| tf.from_natural(t)).collect();
    let settings = Settings {
        bound: cfg.bound,
        gtol: cfg.gtol,
        max_iter: cfg.max_iter,
    };
    let out = minimize(obj, &x0, settings)
        .ok_or_else(|| Error::Domain(format!("{family} likelihood is not finite at the starting point")))?;

    let mut out = out;
    // Data without overdispersion put the supremum at infinity along the
    // concentration ray, where the gradient fades before the cap is reached.
    // If the likelihood does not drop along that ray, follow it to the cap.
    {
        let dir = recession_step(family);
        let room = out
            .x
            .iter()
            .zip(&dir)
            .filter(|(_, d)| **d != 0.0)
            .map(|(x, d)| (cfg.bound - x * d.signum()) / d.abs())
            .fold(f64::INFINITY, f64::min);
        let xb: Vec<f64> = out.x.iter().zip(&dir).map(|(x, d)| (x + room * d).clamp(-cfg.bound, cfg.bound)).collect();
        if let Some((fb, _)) = objective(&xb) {
            if fb <= out.f + 1e-9 * out.f.abs().max(1.0) {
                out.x = xb;
                out.f = fb;
                out.at_bound = true;
            }
        }
    }
    let theta = to_theta(&out.x);
    let ll = -out.f;
    let mut flags = Vec::new();
    let mut ses = vec![f64::NAN; theta.len()];
    if out.at_bound {
        flags.push(format!(
            "boundary: a transformed parameter reached the cap |x| = {}",
            cfg.bound
        ));
    } else {
        match fd_hessian(obj, &out.x).and_then(|h| invert(&h)) {
            Some(cov) if (0..theta.len()).all(|i| cov[i][i] > 0.0 && cov[i][i].is_finite()) => {
                for i in 0..theta.len() {
                    ses[i] = tr[i].slope(theta[i]) * cov[i][i].sqrt();
                }
            }
            _ => flags.push("singular-hessian: standard errors unavailable".into()),
        }
    }
    if !out.converged {
        flags.push(format!(
            "not-converged: projected gradient norm {:.3e} after {} iterations",
            out.projected_grad_norm, out.iterations
        ));
    }
    let degenerate = match identifiability {
        Identifiability::Degenerate(d) => {
            flags.push(format!("degenerate: {d}"));
            Some(d)
        }
        Identifiability::Ok => None,
    };
    Ok(FitResult {
        family,
        estimates: named(family, &theta),
        std_errors: named(family, &ses),
        scale,
        log_likelihood: ll,
        deviance: -2.0 * ll,
        null_deviance: null_dev,
        aic: -2.0 * ll + 2.0 * family.n_params() as f64,
        converged: out.converged && !out.at_bound,
        flags,
        df,
        degenerate,
        data_key: data_key(gs),
    })
}

/// One row of a model-comparison table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub family: Family,
    pub deviance: f64,
    pub df: usize,
    pub aic: f64,
}

/// Rows (family, deviance, residual df, AIC) sorted by increasing AIC.
pub fn model_comparison(fits: &[FitResult]) -> Result<Vec<ComparisonRow>> {
    if let Some(first) = fits.first() {
        if fits.iter().any(|f| f.data_key != first.data_key) {
            return Err(Error::Mismatch("fits were computed on different graph sets".into()));
        }
    }
    let mut rows: Vec<ComparisonRow> = fits
        .iter()
        .map(|f| ComparisonRow {
            family: f.family,
            deviance: f.deviance,
            df: f.df,
            aic: f.aic,
        })
        .collect();
    rows.sort_by(|a, b| a.aic.total_cmp(&b.aic));
    Ok(rows)
}
