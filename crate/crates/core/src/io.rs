//! File formats: graph sets, observation sets and numeric formatting.

use crate::error::{Error, Result};
use crate::fitting::GraphSet;
use crate::graph::{Graph, GraphSpace};
use crate::netinf::ObservationSet;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphRecord {
    n: usize,
    /// Per-graph override; must agree with the file-level flag.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    directed: Option<bool>,
    edges: Vec<(usize, usize)>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphSetFile {
    directed: bool,
    #[serde(default)]
    loops: bool,
    graphs: Vec<GraphRecord>,
}

/// Parses the graph-set JSON format. Vertices are 1-indexed.
pub fn parse_graphset(text: &str) -> Result<GraphSet> {
    let file: GraphSetFile = serde_json::from_str(text)?;
    if file.graphs.is_empty() {
        return Err(Error::Parse("graph set must contain at least one graph".into()));
    }
    let mut graphs = Vec::with_capacity(file.graphs.len());
    for (k, rec) in file.graphs.iter().enumerate() {
        if rec.directed.is_some_and(|d| d != file.directed) {
            return Err(Error::Mismatch(format!(
                "graph {} has directed = {}, the set has directed = {}",
                k + 1,
                !file.directed,
                file.directed
            )));
        }
        let space = GraphSpace::new(rec.n, file.directed, file.loops);
        let mut g = Graph::empty(space);
        for &(i, j) in &rec.edges {
            if i == 0 || j == 0 {
                return Err(Error::SupportViolation {
                    i,
                    j,
                    reason: format!("vertices are numbered from 1 (graph {})", k + 1),
                });
            }
            g.try_set(i - 1, j - 1, true)?;
        }
        graphs.push(g);
    }
    GraphSet::new(graphs)
}

pub fn load_graphset(path: impl AsRef<Path>) -> Result<GraphSet> {
    parse_graphset(&std::fs::read_to_string(path)?)
}

/// Writes graphs in the graph-set JSON format.
pub fn write_graphset<W: Write>(graphs: &[Graph], mut out: W) -> Result<()> {
    let first = graphs
        .first()
        .ok_or_else(|| Error::Domain("no graphs to write".into()))?
        .space();
    let file = GraphSetFile {
        directed: first.directed,
        loops: first.loops,
        graphs: graphs
            .iter()
            .map(|g| GraphRecord {
                n: g.n_vertices(),
                directed: None,
                edges: g.edges().into_iter().map(|(i, j)| (i + 1, j + 1)).collect(),
            })
            .collect(),
    };
    serde_json::to_writer(&mut out, &file)?;
    writeln!(out)?;
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ObservationFile {
    n: usize,
    directed: bool,
    #[serde(default)]
    loops: bool,
    slices: Vec<Vec<Vec<u8>>>,
}

/// Parses the observation JSON format: one 0/1 adjacency matrix per slice.
pub fn parse_observations(text: &str) -> Result<ObservationSet> {
    let file: ObservationFile = serde_json::from_str(text)?;
    let space = GraphSpace::new(file.n, file.directed, file.loops);
    let mut slices = Vec::with_capacity(file.slices.len());
    for (k, m) in file.slices.iter().enumerate() {
        if m.len() != file.n || m.iter().any(|row| row.len() != file.n) {
            return Err(Error::Parse(format!(
                "slice {} is not a {n} x {n} matrix",
                k + 1,
                n = file.n
            )));
        }
        let mut g = Graph::empty(space);
        for (i, row) in m.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                let at = |reason: String| Error::SupportViolation {
                    i: i + 1,
                    j: j + 1,
                    reason: format!("{reason} (slice {})", k + 1),
                };
                match v {
                    0 => {}
                    1 => {
                        if i == j && !file.loops {
                            return Err(at("loops are not permitted".into()));
                        }
                        if !file.directed && m[j][i] != 1 {
                            return Err(at("undirected slice is not symmetric".into()));
                        }
                        g.set(i, j, true);
                    }
                    _ => return Err(at(format!("entry {v} is not 0 or 1"))),
                }
            }
        }
        slices.push(g);
    }
    ObservationSet::new(space, slices)
}

pub fn load_observations(path: impl AsRef<Path>) -> Result<ObservationSet> {
    parse_observations(&std::fs::read_to_string(path)?)
}

pub fn write_observations<W: Write>(obs: &ObservationSet, mut out: W) -> Result<()> {
    let space = obs.space();
    let n = space.n_vertices;
    let file = ObservationFile {
        n,
        directed: space.directed,
        loops: space.loops,
        slices: obs
            .slices()
            .iter()
            .map(|g| (0..n).map(|i| (0..n).map(|j| u8::from(g.has_edge(i, j))).collect()).collect())
            .collect(),
    };
    serde_json::to_writer(&mut out, &file)?;
    writeln!(out)?;
    Ok(())
}

/// Formats a float to 12 significant digits, shortest form.
pub fn fmt_float(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "NaN".into()
        } else if x > 0.0 {
            "Inf".into()
        } else {
            "-Inf".into()
        };
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("valid float literal");
    if rounded == 0.0 {
        return "0".into();
    }
    format!("{rounded}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graphset_examples() {
        let gs = parse_graphset(r#"{"directed": true, "loops": false, "graphs": [{"n": 2, "edges": [[1, 2]]}]}"#)
            .unwrap();
        assert_eq!(gs.len(), 1);
        assert_eq!(gs.total_edges(), 1);

        let err = parse_graphset(r#"{"directed": true, "loops": false, "graphs": [{"n": 2, "edges": [[1, 1]]}]}"#)
            .unwrap_err();
        assert!(matches!(err, Error::SupportViolation { i: 1, j: 1, .. }));
        assert!(err.to_string().contains("(1, 1)"));

        assert!(matches!(
            parse_graphset(r#"{"directed": true, "loops": false, "graphs": []}"#),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            parse_graphset(r#"{"directed": true, "graphs": [{"n": 3, "edges": [[1, 4]]}]}"#),
            Err(Error::SupportViolation { i: 1, j: 4, .. })
        ));
        assert!(matches!(
            parse_graphset(r#"{"directed": true, "graphs": [{"n": 2, "directed": false, "edges": []}]}"#),
            Err(Error::Mismatch(_))
        ));
        assert!(matches!(parse_graphset("{not json"), Err(Error::Parse(_))));
    }

    #[test]
    fn graphset_round_trip() {
        let d = GraphSpace::directed(4);
        let u = GraphSpace::undirected(5);
        for graphs in [
            vec![
                Graph::from_edges(d, &[(0, 1), (1, 0), (3, 2)]).unwrap(),
                Graph::empty(d),
            ],
            vec![Graph::from_edges(u, &[(0, 4), (2, 3)]).unwrap()],
        ] {
            let mut buf = Vec::new();
            write_graphset(&graphs, &mut buf).unwrap();
            let back = parse_graphset(std::str::from_utf8(&buf).unwrap()).unwrap();
            assert_eq!(back.graphs(), graphs.as_slice());
        }
    }

    #[test]
    fn observation_round_trip_and_checks() {
        let s = GraphSpace::directed(3);
        let obs = ObservationSet::new(
            s,
            vec![Graph::from_edges(s, &[(0, 1)]).unwrap(), Graph::from_edges(s, &[(2, 0), (0, 1)]).unwrap()],
        )
        .unwrap();
        let mut buf = Vec::new();
        write_observations(&obs, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(r#"{"n":3,"directed":true,"loops":false,"slices":[[[0,1,0]"#));
        assert_eq!(parse_observations(&text).unwrap(), obs);

        let loop_cell = r#"{"n": 2, "directed": true, "slices": [[[1, 0], [0, 0]]]}"#;
        assert!(matches!(
            parse_observations(loop_cell),
            Err(Error::SupportViolation { i: 1, j: 1, .. })
        ));
        let ragged = r#"{"n": 2, "directed": true, "slices": [[[0, 1]]]}"#;
        assert!(matches!(parse_observations(ragged), Err(Error::Parse(_))));
        let asym = r#"{"n": 2, "directed": false, "slices": [[[0, 1], [0, 0]]]}"#;
        assert!(matches!(parse_observations(asym), Err(Error::SupportViolation { .. })));
        let two = r#"{"n": 2, "directed": true, "slices": [[[0, 2], [0, 0]]]}"#;
        assert!(matches!(parse_observations(two), Err(Error::SupportViolation { i: 1, j: 2, .. })));
    }

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_float(0.0), "0");
        assert_eq!(fmt_float(-0.0), "0");
        assert_eq!(fmt_float(0.25), "0.25");
        assert_eq!(fmt_float(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_float(2.0 / 3.0 * 1e6), "666666.666667");
        assert_eq!(fmt_float(1.0), "1");
        assert_eq!(fmt_float(f64::INFINITY), "Inf");
    }
}
