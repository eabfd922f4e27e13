//! Acceptance checks. Runs without the libtest harness and prints one
//! PASS/FAIL line per criterion; exits non-zero if any criterion fails.

use graphmix::fitting::{
    fit_mle, grad_pooled_loglik, model_comparison, pooled_loglik, Degeneracy, Family, FitConfig, GraphSet,
};
use graphmix::graph::{DyadCensus, Graph, GraphSpace};
use graphmix::models::{
    cond_edge_prob_bb, cond_edge_prob_dc, BernoulliParams, BetaBernoulliParams, DirichletCategoricalParams,
    MeanDegreeParams, Model, NonNullDegreeParams, UmanParams,
};
use graphmix::netinf::{
    posterior_gibbs, run_experiment, simulate_css, ErrorModel, ExperimentDesign, ExperimentRow, GibbsConfig,
    GraphPrior,
};
use graphmix::oracle::{exact_distribution, exact_posterior};
use graphmix::rng::RngSeed;
use graphmix::samplers::{run_contagion, sample_beta_bernoulli, sample_dirichlet_categorical};
use graphmix::special::{ln_beta, ln_choose};
use rand::Rng;
use rayon::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use std::process::Command;
use std::time::{Duration, Instant};

const GRID: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 5.0];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

/// Chi-square p-value, pooling adjacent cells until each expects at least 5.
fn chi2_pvalue(observed: &[u64], probs: &[f64]) -> f64 {
    let total: u64 = observed.iter().sum();
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut o, mut e) = (0.0, 0.0);
    for (&ob, &p) in observed.iter().zip(probs) {
        o += ob as f64;
        e += p * total as f64;
        if e >= 5.0 {
            cells.push((o, e));
            o = 0.0;
            e = 0.0;
        }
    }
    if e > 0.0 || o > 0.0 {
        match cells.last_mut() {
            Some(last) => {
                last.0 += o;
                last.1 += e;
            }
            None => cells.push((o, e)),
        }
    }
    let stat: f64 = cells.iter().map(|(o, e)| (o - e).powi(2) / e).sum();
    let df = (cells.len() - 1) as f64;
    1.0 - ChiSquared::new(df).unwrap().cdf(stat)
}

fn grid_models(space: GraphSpace) -> Vec<Model> {
    let mut out = Vec::new();
    for &d in GRID.iter().filter(|&&d| d < 1.0) {
        out.push(Model::Bernoulli(BernoulliParams { delta: d }));
    }
    for e in 0..=space.edge_vars() {
        out.push(Model::Cug { edges: e });
    }
    for &a in &GRID {
        for &b in &GRID {
            out.push(Model::BetaBernoulli(BetaBernoulliParams { alpha: a, beta: b }));
            if graphmix::models::params_from_mean_degree(MeanDegreeParams { mu_d: a, sigma_d: b }, space).is_ok() {
                out.push(Model::BetaBernoulliMeandeg(MeanDegreeParams { mu_d: a, sigma_d: b }));
            }
        }
    }
    if space.supports_dyads() {
        for &a in &GRID {
            for &b in &GRID {
                for &c in &GRID {
                    out.push(Model::DirichletCategorical(DirichletCategoricalParams {
                        alpha: a,
                        beta: b,
                        gamma: c,
                    }));
                    let s = a + b + c;
                    out.push(Model::Uman(UmanParams {
                        m: a / s,
                        a: b / s,
                        n: 1.0 - a / s - b / s,
                    }));
                    if b < 1.0 {
                        let nn = NonNullDegreeParams {
                            mu_nnd: a,
                            r: b,
                            sigma_nnd: c,
                        };
                        if graphmix::models::params_from_nnd(nn, space).is_ok() {
                            out.push(Model::DcNnd(nn));
                        }
                    }
                }
            }
        }
    }
    out
}

fn c1_normalization() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for space in [GraphSpace::directed(3), GraphSpace::undirected(4)] {
        for m in grid_models(space) {
            let d = exact_distribution(space, &m).expect("enumerable");
            worst = worst.max((d.total - 1.0).abs());
            count += 1;
        }
    }
    outcome(worst <= 1e-10, format!("{count} (space, model) pairs, max |total - 1| = {worst:.2e}"))
}

fn c2_edge_count_law() -> Outcome {
    let space = GraphSpace::directed(3);
    let mut worst: f64 = 0.0;
    for &a in &GRID {
        for &b in &GRID {
            let d = exact_distribution(space, &Model::BetaBernoulli(BetaBernoulliParams { alpha: a, beta: b }))
                .unwrap()
                .edge_count_distribution();
            for (e, &p) in d.iter().enumerate() {
                let n = 6 - e;
                let exact = (ln_choose(6, e as u64) + ln_beta(e as f64 + a, n as f64 + b) - ln_beta(a, b)).exp();
                worst = worst.max((p - exact).abs());
            }
        }
    }
    outcome(worst <= 1e-12, format!("25 grid points, max abs difference {worst:.2e}"))
}

fn c3_conditionals() -> Outcome {
    let space = GraphSpace::directed(3);
    let vars = space.edge_var_list();
    let mut worst: f64 = 0.0;
    let mut checks = 0usize;
    for &a in &GRID {
        for &b in &GRID {
            let bb = BetaBernoulliParams { alpha: a, beta: b };
            let pb = exact_distribution(space, &Model::BetaBernoulli(bb)).unwrap();
            for &c in &GRID {
                let dc = DirichletCategoricalParams {
                    alpha: a,
                    beta: b,
                    gamma: c,
                };
                let pd = exact_distribution(space, &Model::DirichletCategorical(dc)).unwrap();
                for code in 0..64u64 {
                    for (k, &(i, j)) in vars.iter().enumerate() {
                        let (on, off) = (code | 1 << k, code & !(1 << k));
                        let g = Graph::decode(space, off).unwrap();
                        if c == GRID[0] {
                            let ratio = pb.probability(on) / (pb.probability(on) + pb.probability(off));
                            worst = worst.max((cond_edge_prob_bb(g.edge_count(), space, bb).unwrap() - ratio).abs());
                            checks += 1;
                        }
                        let mut rest = g.clone();
                        rest.set(j, i, false);
                        let cs = rest.dyad_census().unwrap();
                        let census_rest = DyadCensus::new(cs.mutual, cs.asymmetric, cs.null - 1);
                        let ratio = pd.probability(on) / (pd.probability(on) + pd.probability(off));
                        let p = cond_edge_prob_dc(census_rest, g.has_edge(j, i), space, dc).unwrap();
                        worst = worst.max((p - ratio).abs());
                        checks += 1;
                    }
                }
            }
        }
    }
    outcome(worst <= 1e-12, format!("{checks} conditionals, max abs difference {worst:.2e}"))
}

fn random_set(seed: u64, family: Family, theta: &[f64]) -> GraphSet {
    let mut rng = RngSeed(seed).rng();
    let graphs = (0..6)
        .map(|_| {
            let n = rng.random_range(5..12);
            let space = GraphSpace::directed(n);
            match family {
                Family::DirichletCategorical | Family::DcNnd => {
                    let p = DirichletCategoricalParams {
                        alpha: theta[0].max(0.5),
                        beta: 1.0,
                        gamma: 2.0,
                    };
                    sample_dirichlet_categorical(space, p, &mut rng).unwrap().0
                }
                _ => sample_beta_bernoulli(space, BetaBernoulliParams { alpha: 2.0, beta: 3.0 }, &mut rng)
                    .unwrap()
                    .0,
            }
        })
        .collect();
    GraphSet::new(graphs).unwrap()
}

fn c4_gradients() -> Outcome {
    let mut rng = RngSeed(404).rng();
    let mut worst: f64 = 0.0;
    let mut points = 0;
    let families = [
        Family::BetaBernoulli,
        Family::DirichletCategorical,
        Family::BetaBernoulliMeandeg,
        Family::DcNnd,
    ];
    while points < 20 {
        let family = families[points % families.len()];
        let theta: Vec<f64> = match family {
            Family::BetaBernoulli => vec![rng.random_range(0.2..8.0), rng.random_range(0.2..8.0)],
            Family::DirichletCategorical => (0..3).map(|_| rng.random_range(0.2..8.0)).collect(),
            Family::BetaBernoulliMeandeg => vec![rng.random_range(1.5..3.5), rng.random_range(0.2..1.0)],
            _ => vec![rng.random_range(1.0..2.5), rng.random_range(0.1..0.9), rng.random_range(0.1..0.6)],
        };
        let gs = random_set(rng.random(), family, &theta);
        let model = family.model(&theta).unwrap();
        let (Ok(_), Ok(g)) = (pooled_loglik(&gs, &model), grad_pooled_loglik(&gs, &model)) else {
            // Reparameterized point infeasible for one of the graph sizes; draw again.
            continue;
        };
        let h = 1e-5;
        let mut ok = true;
        for k in 0..theta.len() {
            let (mut up, mut dn) = (theta.clone(), theta.clone());
            up[k] += h;
            dn[k] -= h;
            let (Ok(fu), Ok(fd)) = (
                pooled_loglik(&gs, &family.model(&up).unwrap()),
                pooled_loglik(&gs, &family.model(&dn).unwrap()),
            ) else {
                ok = false;
                break;
            };
            let fdg = (fu - fd) / (2.0 * h);
            worst = worst.max((fdg - g[k]).abs() / g[k].abs().max(1.0));
        }
        if ok {
            points += 1;
        }
    }
    outcome(worst <= 1e-5, format!("{points} points over 4 families, max relative error {worst:.2e}"))
}

fn c5_samplers() -> Outcome {
    let draws = 50_000;
    let space = GraphSpace::directed(4);
    let bb = BetaBernoulliParams { alpha: 2.0, beta: 5.0 };
    let mut rng = RngSeed(505).rng();
    let mut counts = vec![0u64; space.edge_vars() + 1];
    for _ in 0..draws {
        counts[sample_beta_bernoulli(space, bb, &mut rng).unwrap().0.edge_count()] += 1;
    }
    let exact = exact_distribution(space, &Model::BetaBernoulli(bb))
        .unwrap()
        .edge_count_distribution();
    let p_bb = chi2_pvalue(&counts, &exact);

    let s2 = GraphSpace::directed(2);
    let dc = DirichletCategoricalParams {
        alpha: 1.0,
        beta: 1.0,
        gamma: 1.0,
    };
    let mut states = vec![0u64; 4];
    for _ in 0..draws {
        let g = sample_dirichlet_categorical(s2, dc, &mut rng).unwrap().0;
        states[g.encode().unwrap() as usize] += 1;
    }
    // Encoding order: null, 1->2 only, 2->1 only, mutual.
    let p_dc = chi2_pvalue(&states, &[1.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 3.0]);
    outcome(
        p_bb > 1e-3 && p_dc > 1e-3,
        format!("beta-Bernoulli p = {p_bb:.3}, Dirichlet-categorical p = {p_dc:.3}"),
    )
}

fn batch_se(x: &[f64], batches: usize) -> (f64, f64) {
    let size = x.len() / batches;
    let means: Vec<f64> = x.chunks(size).take(batches).map(|c| c.iter().sum::<f64>() / c.len() as f64).collect();
    let mean = means.iter().sum::<f64>() / batches as f64;
    let var = means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (batches - 1) as f64;
    (mean, (var / batches as f64).sqrt())
}

fn c6_contagion() -> Outcome {
    let space = GraphSpace::directed(8);
    let e_star = space.edge_vars() as u64;
    let p = BetaBernoulliParams { alpha: 1.0, beta: 1.0 };
    let retained = 2000;
    let uniform = vec![1.0 / (e_star + 1) as f64; e_star as usize + 1];

    // Independent chains from the empty graph, each run far past its relaxation time.
    let root = RngSeed(606);
    let finals: Vec<usize> = (0..retained as u64)
        .into_par_iter()
        .map(|c| {
            let mut rng = root.derive_rng(&[c]);
            let t = run_contagion(&Graph::empty(space), p, 400 * e_star, e_star, &mut rng).unwrap();
            t.final_graph.edge_count()
        })
        .collect();
    let mut counts = vec![0u64; e_star as usize + 1];
    for e in finals {
        counts[e] += 1;
    }
    let p_ind = chi2_pvalue(&counts, &uniform);

    // One chain from an exact draw, thinned at e*.
    let mut rng = root.derive_rng(&[u64::MAX]);
    let y0 = sample_beta_bernoulli(space, p, &mut rng).unwrap().0;
    let trace = run_contagion(&y0, p, retained as u64 * e_star, e_star, &mut rng).unwrap();
    let dens: Vec<f64> = trace.gli[1..].iter().map(|g| g.density).collect();
    let mut single = vec![0u64; e_star as usize + 1];
    for d in &dens {
        single[(d * e_star as f64).round() as usize] += 1;
    }
    let p_single = chi2_pvalue(&single, &uniform);
    let half = dens.len() / 2;
    let (m1, se1) = batch_se(&dens[..half], 20);
    let (m2, se2) = batch_se(&dens[half..], 20);
    let z = (m1 - m2).abs() / (se1 * se1 + se2 * se2).sqrt();
    outcome(
        p_ind > 1e-3 && z < 4.0,
        format!(
            "{retained} independent chains p = {p_ind:.3}; exact-start halves differ by {z:.2} SE; \
             single thinned chain p = {p_single:.2e} (autocorrelated, not judged)"
        ),
    )
}

fn coverage_run(family: Family, truth: &[f64], n_vertices: usize, seed: RngSeed) -> (Vec<usize>, f64) {
    let reps = 100;
    let fits: Vec<(Vec<f64>, Vec<f64>)> = (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = seed.derive_rng(&[r]);
            let space = GraphSpace::directed(n_vertices);
            let graphs: Vec<Graph> = (0..200)
                .map(|_| match family {
                    Family::BetaBernoulli => {
                        let p = BetaBernoulliParams {
                            alpha: truth[0],
                            beta: truth[1],
                        };
                        sample_beta_bernoulli(space, p, &mut rng).unwrap().0
                    }
                    _ => {
                        let p = DirichletCategoricalParams {
                            alpha: truth[0],
                            beta: truth[1],
                            gamma: truth[2],
                        };
                        sample_dirichlet_categorical(space, p, &mut rng).unwrap().0
                    }
                })
                .collect();
            let fit = fit_mle(&GraphSet::new(graphs).unwrap(), family, &FitConfig::default()).unwrap();
            (fit.estimate_vec(), fit.std_error_vec())
        })
        .collect();
    let mut covered = vec![0; truth.len()];
    let mut rel: Vec<f64> = Vec::new();
    for (est, se) in &fits {
        for k in 0..truth.len() {
            if (est[k] - truth[k]).abs() <= 1.96 * se[k] {
                covered[k] += 1;
            }
        }
        rel.push((est[0] - truth[0]).abs() / truth[0]);
    }
    rel.sort_by(f64::total_cmp);
    let median = 0.5 * (rel[49] + rel[50]);
    (covered, median)
}

fn c7_recovery() -> Outcome {
    let (cov_bb, med_bb) = coverage_run(Family::BetaBernoulli, &[2.0, 5.0], 30, RngSeed(707));
    let (cov_dc, med_dc) = coverage_run(Family::DirichletCategorical, &[1.0, 2.0, 3.0], 20, RngSeed(708));
    let pass = cov_bb.iter().chain(&cov_dc).all(|&c| c >= 88) && med_bb < 0.15 && med_dc < 0.15;
    outcome(
        pass,
        format!(
            "beta-Bernoulli coverage {cov_bb:?}/100, median rel. error {med_bb:.3}; \
             Dirichlet-categorical coverage {cov_dc:?}/100, median rel. error {med_dc:.3}"
        ),
    )
}

fn c8_degeneracy() -> Outcome {
    let mut rng = RngSeed(808).rng();
    let mut all_ok = true;
    for k in 0..20 {
        let space = GraphSpace::directed(5 + k % 10);
        let g = sample_beta_bernoulli(space, BetaBernoulliParams { alpha: 2.0, beta: 5.0 }, &mut rng)
            .unwrap()
            .0;
        let fit = fit_mle(&GraphSet::new(vec![g]).unwrap(), Family::BetaBernoulli, &FitConfig::default()).unwrap();
        let diagnosed = matches!(fit.degenerate, Some(Degeneracy::InsufficientObservations { .. }));
        all_ok &= diagnosed && !fit.converged && fit.flags.iter().any(|f| f.contains("insufficient observations"));
    }
    outcome(all_ok, "20 single-graph fits: all flagged degenerate (insufficient observations), none converged")
}

fn c9_posterior_oracle() -> Outcome {
    let space = GraphSpace::directed(3);
    let mut rng = RngSeed(909).rng();
    let criterion = Graph::from_edges(space, &[(0, 1), (1, 0), (1, 2)]).unwrap();
    let obs = simulate_css(&criterion, 0.05, 0.5, 2, &mut rng).unwrap();
    let cfg = GibbsConfig {
        chains: 3,
        burn_in: 100,
        draws: 100_000,
        thin: 1,
    };
    let mut parts = Vec::new();
    let mut pass = true;
    for prior in ["bernoulli:0.5", "beta-bernoulli:1,1", "dirichlet-categorical:1,1,1"] {
        let prior: GraphPrior = prior.parse().unwrap();
        let draws = posterior_gibbs(&obs, prior, ErrorModel::fixed(0.05, 0.5), cfg, &mut rng).unwrap();
        let exact = exact_posterior(space, &prior.model(), &obs, 0.05, 0.5).unwrap().marginals();
        let worst = draws
            .marginals()
            .unwrap()
            .iter()
            .zip(&exact)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        pass &= worst <= 0.01;
        parts.push(format!("{prior} max diff {worst:.4}"));
    }
    outcome(pass, parts.join("; "))
}

fn mean_se(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let v = x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

fn c10_desk_replication() -> Outcome {
    let priors: Vec<GraphPrior> = [
        "bernoulli:0.05",
        "bernoulli:0.5",
        "beta-bernoulli:0.5,0.5",
        "dirichlet-categorical:0.5,0.5,0.5",
    ]
    .iter()
    .map(|s| s.parse().unwrap())
    .collect();
    let design = ExperimentDesign {
        n_vertices: 30,
        density_levels: vec![],
        reciprocity_levels: vec![],
        conditions: Some(vec![(0.25, 0.5), (0.25, 0.95), (0.05, 0.5)]),
        n_criterion: 30,
        fp_rate: 0.05,
        fn_rate: 0.5,
        max_slices: 15,
        priors: priors.clone(),
        slice_schedule: vec![2, 3, 5, 10, 15],
        error_model: ErrorModel::default(),
        gibbs: GibbsConfig::default(),
    };
    let rows = run_experiment(&design, RngSeed(1010)).unwrap();
    let cell = |c: (f64, f64), p: GraphPrior, s: usize, f: fn(&ExperimentRow) -> f64| -> (f64, f64) {
        let v: Vec<f64> = rows
            .iter()
            .filter(|r| (r.density, r.reciprocity) == c && r.prior == p && r.n_slices == s)
            .map(f)
            .collect();
        mean_se(&v)
    };
    let acc = |r: &ExperimentRow| r.accuracy;
    let dens = |r: &ExperimentRow| r.inferred_density;
    let conditions = design.condition_list();
    let (b05, bb, dc) = (priors[0], priors[2], priors[3]);

    let mut a_ok = true;
    let mut a_min: f64 = 1.0;
    for &c in &conditions {
        let m = cell(c, dc, 5, acc).0;
        a_min = a_min.min(m);
        a_ok &= m >= 0.90;
    }

    let mut b_ok = true;
    let mut b_gap = f64::INFINITY;
    for &c in conditions.iter().filter(|c| c.0 == 0.25) {
        let base = cell(c, b05, 2, acc).0;
        for p in [bb, dc] {
            let gap = cell(c, p, 2, acc).0 - base;
            b_gap = b_gap.min(gap);
            b_ok &= gap >= 0.02;
        }
    }

    let mut c_ok = true;
    let mut c_worst: f64 = 0.0;
    for &c in &conditions {
        for p in [bb, dc] {
            let rel = (cell(c, p, 5, dens).0 - c.0).abs() / c.0;
            c_worst = c_worst.max(rel);
            c_ok &= rel <= 0.10;
        }
    }

    let mut d_ok = true;
    let mut d_worst = f64::NEG_INFINITY;
    for &c in &conditions {
        for &p in &priors {
            for w in design.slice_schedule.windows(2) {
                let (m0, s0) = cell(c, p, w[0], acc);
                let (m1, s1) = cell(c, p, w[1], acc);
                let drop_in_se = (m0 - m1) / (s0 * s0 + s1 * s1).sqrt().max(1e-12);
                d_worst = d_worst.max(drop_in_se);
                d_ok &= m1 >= m0 - 2.0 * (s0 * s0 + s1 * s1).sqrt();
            }
        }
    }
    let mark = |b: bool| if b { "ok" } else { "FAILED" };
    outcome(
        a_ok && b_ok && c_ok && d_ok,
        format!(
            "{} rows; (a) min DC accuracy at 5 slices {a_min:.3} {}; (b) min gap over Bernoulli(0.05) at 2 slices {b_gap:.3} {}; \
             (c) worst relative density error {c_worst:.3} {}; (d) largest accuracy drop {d_worst:.2} SE {}",
            rows.len(),
            mark(a_ok),
            mark(b_ok),
            mark(c_ok),
            mark(d_ok)
        ),
    )
}

fn c11_aic_ordering() -> Outcome {
    let root = RngSeed(1111);
    let firsts: Vec<bool> = (0..100u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = root.derive_rng(&[r]);
            let space = GraphSpace::directed(10);
            let p = DirichletCategoricalParams {
                alpha: 1.0,
                beta: 3.0,
                gamma: 2.0,
            };
            let graphs = (0..60).map(|_| sample_dirichlet_categorical(space, p, &mut rng).unwrap().0).collect();
            let gs = GraphSet::new(graphs).unwrap();
            let fits: Vec<_> = [Family::Bernoulli, Family::BetaBernoulli, Family::DirichletCategorical]
                .iter()
                .map(|&f| fit_mle(&gs, f, &FitConfig::default()).unwrap())
                .collect();
            model_comparison(&fits).unwrap()[0].family == Family::DirichletCategorical
        })
        .collect();
    let wins = firsts.iter().filter(|&&b| b).count();
    outcome(wins >= 95, format!("Dirichlet-categorical ranked first in {wins}/100 sets"))
}

fn c12_reproducibility() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_graphmix");
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    let run = |args: &[&str]| -> bool {
        Command::new(bin)
            .args(args)
            .output()
            .map(|o| o.status.success())
            .unwrap_or(false)
    };
    // Inputs for the commands that read files.
    let graphs = p("graphs.json");
    run(&[
        "simulate", "--family", "dirichlet-categorical", "--params", "1,3,2", "--n-vertices", "8",
        "--n-graphs", "12", "--seed", "1", "-o", &graphs,
    ]);
    let obs = p("obs.json");
    std::fs::write(
        &obs,
        r#"{"n": 4, "directed": true, "slices": [[[0,1,0,0],[1,0,0,0],[0,0,0,1],[0,0,0,0]],
            [[0,1,0,0],[0,0,0,0],[0,1,0,1],[0,0,0,0]], [[0,1,1,0],[1,0,0,0],[0,0,0,0],[0,0,1,0]]]}"#,
    )
    .unwrap();
    let design = p("design.json");
    std::fs::write(
        &design,
        r#"{"n_vertices": 8, "conditions": [[0.25, 0.5], [0.05, 0.5]], "n_criterion": 3,
            "fp_rate": 0.05, "fn_rate": 0.5, "max_slices": 5,
            "priors": ["bernoulli:0.05", "dirichlet-categorical:0.5,0.5,0.5"], "slice_schedule": [2, 5],
            "gibbs": {"chains": 3, "burn_in": 20, "draws": 30}}"#,
    )
    .unwrap();

    let commands: Vec<(&str, Vec<String>)> = vec![
        ("simulate", vec!["simulate", "--family", "beta-bernoulli", "--params", "2,5", "--n-vertices", "10", "--n-graphs", "5"]),
        ("simulate-reparam", vec!["simulate", "--family", "dc-nnd", "--params", "2,0.5,0.6", "--n-vertices", "9", "--n-graphs", "3"]),
        ("contagion", vec!["contagion", "--alpha", "1", "--beta", "1", "--n-vertices", "8", "--rounds", "5600", "--thin", "56", "--init", "exact"]),
        ("fit", vec!["fit", "--input", &graphs, "--family", "dirichlet-categorical"]),
        ("fit-compare", vec!["fit", "--input", &graphs, "--compare"]),
        ("infer", vec!["infer", "--input", &obs, "--prior", "beta-bernoulli:0.5,0.5", "--draws", "200"]),
        ("experiment", vec!["experiment", "--design", &design]),
        ("oracle", vec!["oracle", "--family", "beta-bernoulli", "--params", "2,5", "--n-vertices", "3"]),
    ]
    .into_iter()
    .map(|(n, v)| (n, v.into_iter().map(String::from).collect()))
    .collect();
    let mut bad = Vec::new();
    for (name, args) in &commands {
        let outs: Vec<Option<Vec<u8>>> = (0..2)
            .map(|k| {
                let out = p(&format!("{name}-{k}.out"));
                let mut full: Vec<&str> = args.iter().map(String::as_str).collect();
                full.extend(["--seed", "12345", "-o", &out]);
                if run(&full) {
                    std::fs::read(&out).ok()
                } else {
                    None
                }
            })
            .collect();
        match (&outs[0], &outs[1]) {
            (Some(a), Some(b)) if a == b && !a.is_empty() => {}
            _ => bad.push(*name),
        }
    }
    outcome(
        bad.is_empty(),
        if bad.is_empty() {
            format!("{} commands byte-identical across two runs", commands.len())
        } else {
            format!("differing or failing: {}", bad.join(", "))
        },
    )
}

fn main() {
    let criteria: Vec<(&str, fn() -> Outcome, Option<Duration>)> = vec![
        ("exact normalization", c1_normalization, Some(Duration::from_secs(10))),
        ("beta-binomial edge-count law", c2_edge_count_law, Some(Duration::from_secs(5))),
        ("conditional-marginal consistency", c3_conditionals, None),
        ("gradient check", c4_gradients, None),
        ("sampler correctness", c5_samplers, Some(Duration::from_secs(30))),
        ("contagion equilibrium", c6_contagion, Some(Duration::from_secs(60))),
        ("MLE recovery", c7_recovery, Some(Duration::from_secs(300))),
        ("degeneracy detection", c8_degeneracy, None),
        ("small-space posterior oracle", c9_posterior_oracle, Some(Duration::from_secs(120))),
        ("desk-scale inference replication", c10_desk_replication, Some(Duration::from_secs(1800))),
        ("AIC ordering", c11_aic_ordering, None),
        ("CLI reproducibility", c12_reproducibility, None),
    ];
    let mut failed = 0;
    for (k, (name, check, limit)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let out = std::panic::catch_unwind(check).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        let took = start.elapsed();
        let in_time = limit.is_none_or(|l| took <= l);
        let pass = out.pass && in_time;
        if !pass {
            failed += 1;
        }
        let budget = limit.map_or(String::new(), |l| format!(" / limit {}s", l.as_secs()));
        println!(
            "[{}] {:>2}. {name}: {} ({:.1}s{budget})",
            if pass { "PASS" } else { "FAIL" },
            k + 1,
            out.detail,
            took.as_secs_f64()
        );
    }
    println!("acceptance: {} of 12 criteria passed", 12 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
