use graphmix::fitting::{pooled_loglik, GraphSet};
use graphmix::graph::{Graph, GraphSpace};
use graphmix::io::{parse_graphset, parse_observations, write_graphset, write_observations};
use graphmix::models::{BetaBernoulliParams, DirichletCategoricalParams, Model};
use graphmix::netinf::ObservationSet;
use graphmix::oracle::{exact_distribution, exact_posterior};
use proptest::prelude::*;

fn directed_graph(n: usize) -> impl Strategy<Value = Graph> {
    let space = GraphSpace::directed(n);
    prop::collection::vec(any::<bool>(), space.edge_vars())
        .prop_map(move |states| Graph::from_edge_states(space, &states).unwrap())
}

fn perm(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mixtures_normalize(a in 0.05f64..20.0, b in 0.05f64..20.0, c in 0.05f64..20.0) {
        let s = GraphSpace::directed(3);
        let bb = exact_distribution(s, &Model::BetaBernoulli(BetaBernoulliParams { alpha: a, beta: b })).unwrap();
        prop_assert!((bb.total - 1.0).abs() < 1e-10);
        let dc = Model::DirichletCategorical(DirichletCategoricalParams { alpha: a, beta: b, gamma: c });
        let d = exact_distribution(s, &dc).unwrap();
        prop_assert!((d.total - 1.0).abs() < 1e-10);
        let u = exact_distribution(GraphSpace::undirected(4), &Model::BetaBernoulli(BetaBernoulliParams { alpha: a, beta: b })).unwrap();
        prop_assert!((u.total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn pmfs_are_exchangeable((g, p) in directed_graph(6).prop_flat_map(|g| (Just(g), perm(6))),
                             a in 0.1f64..10.0, b in 0.1f64..10.0, c in 0.1f64..10.0) {
        let h = g.permuted(&p);
        for m in [
            Model::BetaBernoulli(BetaBernoulliParams { alpha: a, beta: b }),
            Model::DirichletCategorical(DirichletCategoricalParams { alpha: a, beta: b, gamma: c }),
        ] {
            let (x, y) = (m.log_pmf(&g).unwrap(), m.log_pmf(&h).unwrap());
            prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
        }
    }

    #[test]
    fn pooled_loglik_ignores_graph_order(gs in prop::collection::vec(directed_graph(4), 2..6), a in 0.1f64..5.0) {
        let m = Model::DirichletCategorical(DirichletCategoricalParams { alpha: a, beta: 1.0, gamma: 2.0 });
        let fwd = pooled_loglik(&GraphSet::new(gs.clone()).unwrap(), &m).unwrap();
        let mut rev = gs;
        rev.reverse();
        let back = pooled_loglik(&GraphSet::new(rev).unwrap(), &m).unwrap();
        prop_assert!((fwd - back).abs() <= 1e-12 * fwd.abs().max(1.0));
    }

    #[test]
    fn posterior_ignores_slice_order(slices in prop::collection::vec(directed_graph(3), 1..5),
                                     p in perm(4), fp in 0.01f64..0.3, fnr in 0.05f64..0.7) {
        let s = GraphSpace::directed(3);
        let prior = Model::BetaBernoulli(BetaBernoulliParams { alpha: 0.5, beta: 0.5 });
        let k = slices.len();
        let shuffled: Vec<Graph> = p.iter().filter(|&&i| i < k).map(|&i| slices[i].clone()).collect();
        let a = exact_posterior(s, &prior, &ObservationSet::new(s, slices).unwrap(), fp, fnr).unwrap();
        let b = exact_posterior(s, &prior, &ObservationSet::new(s, shuffled).unwrap(), fp, fnr).unwrap();
        for (x, y) in a.marginals().iter().zip(b.marginals()) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn graphsets_round_trip(gs in prop::collection::vec(directed_graph(5), 1..5)) {
        let mut buf = Vec::new();
        write_graphset(&gs, &mut buf).unwrap();
        let back = parse_graphset(std::str::from_utf8(&buf).unwrap()).unwrap();
        prop_assert_eq!(back.graphs(), &gs[..]);
    }

    #[test]
    fn observations_round_trip(slices in prop::collection::vec(directed_graph(4), 1..4)) {
        let obs = ObservationSet::new(GraphSpace::directed(4), slices).unwrap();
        let mut buf = Vec::new();
        write_observations(&obs, &mut buf).unwrap();
        let back = parse_observations(std::str::from_utf8(&buf).unwrap()).unwrap();
        prop_assert_eq!(back.slices(), obs.slices());
    }

    #[test]
    fn encoding_round_trips(g in directed_graph(5)) {
        let code = g.encode().unwrap();
        prop_assert_eq!(Graph::decode(g.space(), code).unwrap(), g.clone());
        prop_assert_eq!(code.count_ones() as usize, g.edge_count());
    }
}
