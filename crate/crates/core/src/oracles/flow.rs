use std::collections::VecDeque;

use crate::error::{check_finite, OfwError, Result};
use crate::iterate::BoundaryAtom;

/// A DAG with a source and a sink. Its flow polytope is the convex hull of
/// the edge-indicator vectors of source-to-sink paths.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowGraph {
    nodes: usize,
    edges: Vec<(usize, usize)>,
    source: usize,
    sink: usize,
    topo: Vec<usize>,
    out: Vec<Vec<usize>>,
    longest: usize,
}

impl FlowGraph {
    pub fn new(nodes: usize, edges: Vec<(usize, usize)>, source: usize, sink: usize) -> Result<Self> {
        if source >= nodes || sink >= nodes || source == sink {
            return Err(OfwError::Parameter(format!(
                "source {source} and sink {sink} must be distinct nodes of {nodes}"
            )));
        }
        let mut out = vec![Vec::new(); nodes];
        let mut indeg = vec![0usize; nodes];
        for (e, &(u, v)) in edges.iter().enumerate() {
            if u >= nodes || v >= nodes {
                return Err(OfwError::Parameter(format!("edge {e} ({u}, {v}) out of range")));
            }
            if u == v {
                return Err(OfwError::Parameter(format!("self-loop at node {u}")));
            }
            out[u].push(e);
            indeg[v] += 1;
        }
        let mut queue: VecDeque<usize> = (0..nodes).filter(|&v| indeg[v] == 0).collect();
        let mut topo = Vec::with_capacity(nodes);
        while let Some(u) = queue.pop_front() {
            topo.push(u);
            for &e in &out[u] {
                let v = edges[e].1;
                indeg[v] -= 1;
                if indeg[v] == 0 {
                    queue.push_back(v);
                }
            }
        }
        if topo.len() != nodes {
            return Err(OfwError::Parameter("flow graph has a cycle".into()));
        }
        // longest s-t path, in edges
        let mut depth: Vec<Option<usize>> = vec![None; nodes];
        depth[source] = Some(0);
        for &u in &topo {
            if let Some(du) = depth[u] {
                for &e in &out[u] {
                    let v = edges[e].1;
                    depth[v] = Some(depth[v].map_or(du + 1, |dv| dv.max(du + 1)));
                }
            }
        }
        let longest = depth[sink]
            .ok_or_else(|| OfwError::Infeasible(format!("no path from {source} to {sink}")))?;
        Ok(Self { nodes, edges, source, sink, topo, out, longest })
    }

    /// Parses `nodes <m> edges <k> <s> <t>` followed by `k` lines `u v`.
    /// Node ids are 0-based; the `nodes`/`edges` keywords are optional.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines
            .next()
            .ok_or(OfwError::Parse { line: 1, msg: "empty graph file".into() })?;
        let nums: Vec<usize> = header
            .split_whitespace()
            .filter(|tok| *tok != "nodes" && *tok != "edges")
            .map(|tok| {
                tok.parse()
                    .map_err(|_| OfwError::Parse { line: hline, msg: format!("bad header token `{tok}`") })
            })
            .collect::<Result<_>>()?;
        let [nodes, k, s, t] = nums[..] else {
            return Err(OfwError::Parse {
                line: hline,
                msg: "header must be `nodes <m> edges <k> <s> <t>`".into(),
            });
        };
        let mut edges = Vec::with_capacity(k);
        for (line, l) in lines.by_ref().take(k) {
            let pair: Vec<usize> = l
                .split_whitespace()
                .map(|tok| tok.parse().map_err(|_| OfwError::Parse { line, msg: format!("bad node id `{tok}`") }))
                .collect::<Result<_>>()?;
            let [u, v] = pair[..] else {
                return Err(OfwError::Parse { line, msg: "edge line must be `u v`".into() });
            };
            edges.push((u, v));
        }
        if edges.len() != k {
            return Err(OfwError::Parse { line: hline, msg: format!("expected {k} edges, found {}", edges.len()) });
        }
        if let Some((line, _)) = lines.next() {
            return Err(OfwError::Parse { line, msg: "trailing content after edge list".into() });
        }
        Self::new(nodes, edges, s, t)
    }

    pub fn node_count(&self) -> usize {
        self.nodes
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    pub fn topological_order(&self) -> &[usize] {
        &self.topo
    }

    pub fn out_edges(&self, u: usize) -> &[usize] {
        &self.out[u]
    }

    /// Number of edges on the longest source-to-sink path.
    pub fn longest_path_len(&self) -> usize {
        self.longest
    }

    pub(crate) fn is_unit_flow(&self, x: &[f64], tol: f64) -> bool {
        if x.iter().any(|&v| v < -tol || v > 1.0 + tol) {
            return false;
        }
        let mut balance = vec![0.0; self.nodes];
        for (&(u, v), &f) in self.edges.iter().zip(x) {
            balance[u] += f;
            balance[v] -= f;
        }
        balance.iter().enumerate().all(|(v, &b)| {
            let want = if v == self.source {
                1.0
            } else if v == self.sink {
                -1.0
            } else {
                0.0
            };
            (b - want).abs() <= tol
        })
    }
}

/// Minimum-cost source-to-sink path as an edge-indicator vector, by one pass
/// of dynamic programming in topological order. Negative costs are fine.
/// Ties keep the lowest-indexed predecessor edge.
pub fn lmo_flow_dag(graph: &FlowGraph, c: &[f64]) -> Result<BoundaryAtom> {
    if c.len() != graph.edge_count() {
        return Err(OfwError::Shape(format!("{} edge costs for {} edges", c.len(), graph.edge_count())));
    }
    check_finite(c, "edge cost")?;
    let mut dist = vec![f64::INFINITY; graph.nodes];
    let mut pred = vec![usize::MAX; graph.nodes];
    dist[graph.source] = 0.0;
    for &u in &graph.topo {
        if dist[u] == f64::INFINITY {
            continue;
        }
        for &e in &graph.out[u] {
            let v = graph.edges[e].1;
            let nd = dist[u] + c[e];
            if nd < dist[v] || (nd == dist[v] && e < pred[v]) {
                dist[v] = nd;
                pred[v] = e;
            }
        }
    }
    if dist[graph.sink] == f64::INFINITY {
        return Err(OfwError::Infeasible("sink unreachable".into()));
    }
    let mut x = vec![0.0; graph.edge_count()];
    let mut v = graph.sink;
    while v != graph.source {
        let e = pred[v];
        x[e] = 1.0;
        v = graph.edges[e].0;
    }
    Ok(BoundaryAtom::Dense(x))
}
