//! Small network-flow kernels shared by the placement and fabric solvers.

use std::collections::VecDeque;

#[derive(Debug, Clone)]
struct Edge<C> {
    to: usize,
    cap: i64,
    cost: C,
}

/// Residual graph with paired forward/backward edges. Edge `e ^ 1` is the
/// reverse of edge `e`.
#[derive(Debug, Clone)]
struct Graph<C> {
    adj: Vec<Vec<usize>>,
    edges: Vec<Edge<C>>,
    original: Vec<i64>,
}

impl<C: Copy> Graph<C> {
    fn new(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
            edges: Vec::new(),
            original: Vec::new(),
        }
    }

    fn add_edge(&mut self, from: usize, to: usize, cap: i64, cost: C, rev_cost: C) -> usize {
        let id = self.edges.len();
        self.edges.push(Edge { to, cap, cost });
        self.edges.push(Edge {
            to: from,
            cap: 0,
            cost: rev_cost,
        });
        self.original.push(cap);
        self.original.push(0);
        self.adj[from].push(id);
        self.adj[to].push(id + 1);
        id
    }

    fn flow(&self, edge: usize) -> i64 {
        self.original[edge] - self.edges[edge].cap
    }
}

/// Integer max-flow by shortest augmenting paths (Edmonds-Karp). Adjacency is
/// scanned in insertion order, so results are deterministic.
#[derive(Debug, Clone)]
pub(crate) struct MaxFlow {
    g: Graph<()>,
}

impl MaxFlow {
    pub fn new(n: usize) -> Self {
        MaxFlow { g: Graph::new(n) }
    }

    pub fn add_edge(&mut self, from: usize, to: usize, cap: i64) -> usize {
        self.g.add_edge(from, to, cap, (), ())
    }

    pub fn flow(&self, edge: usize) -> i64 {
        self.g.flow(edge)
    }

    pub fn run(&mut self, source: usize, sink: usize) -> i64 {
        let n = self.g.adj.len();
        let mut total = 0;
        loop {
            let mut prev = vec![usize::MAX; n];
            let mut seen = vec![false; n];
            seen[source] = true;
            let mut queue = VecDeque::from([source]);
            while let Some(u) = queue.pop_front() {
                if u == sink {
                    break;
                }
                for &e in &self.g.adj[u] {
                    let edge = &self.g.edges[e];
                    if edge.cap > 0 && !seen[edge.to] {
                        seen[edge.to] = true;
                        prev[edge.to] = e;
                        queue.push_back(edge.to);
                    }
                }
            }
            if !seen[sink] {
                return total;
            }
            let mut push = i64::MAX;
            let mut v = sink;
            while v != source {
                let e = prev[v];
                push = push.min(self.g.edges[e].cap);
                v = self.g.edges[e ^ 1].to;
            }
            let mut v = sink;
            while v != source {
                let e = prev[v];
                self.g.edges[e].cap -= push;
                self.g.edges[e ^ 1].cap += push;
                v = self.g.edges[e ^ 1].to;
            }
            total += push;
        }
    }
}

const GAIN_EPS: f64 = 1e-9;

/// Maximum-gain flow: augments along the highest-gain residual path until no
/// path with positive gain remains. Correct when the initial graph has no
/// positive-gain cycle (true for the layered graphs built here).
#[derive(Debug, Clone)]
pub(crate) struct MaxGainFlow {
    g: Graph<f64>,
}

impl MaxGainFlow {
    pub fn new(n: usize) -> Self {
        MaxGainFlow { g: Graph::new(n) }
    }

    pub fn add_edge(&mut self, from: usize, to: usize, cap: i64, gain: f64) -> usize {
        self.g.add_edge(from, to, cap, gain, -gain)
    }

    pub fn flow(&self, edge: usize) -> i64 {
        self.g.flow(edge)
    }

    pub fn run(&mut self, source: usize, sink: usize) -> f64 {
        let n = self.g.adj.len();
        let mut total = 0.0;
        loop {
            // Bellman-Ford (queue based) for the longest path in gain terms.
            let mut best = vec![f64::NEG_INFINITY; n];
            let mut prev = vec![usize::MAX; n];
            let mut queued = vec![false; n];
            best[source] = 0.0;
            let mut queue = VecDeque::from([source]);
            queued[source] = true;
            while let Some(u) = queue.pop_front() {
                queued[u] = false;
                for &e in &self.g.adj[u] {
                    let edge = &self.g.edges[e];
                    if edge.cap <= 0 {
                        continue;
                    }
                    let cand = best[u] + edge.cost;
                    if cand > best[edge.to] + GAIN_EPS {
                        best[edge.to] = cand;
                        prev[edge.to] = e;
                        if !queued[edge.to] {
                            queued[edge.to] = true;
                            queue.push_back(edge.to);
                        }
                    }
                }
            }
            if best[sink] <= GAIN_EPS {
                return total;
            }
            let mut push = i64::MAX;
            let mut v = sink;
            while v != source {
                let e = prev[v];
                push = push.min(self.g.edges[e].cap);
                v = self.g.edges[e ^ 1].to;
            }
            let mut v = sink;
            while v != source {
                let e = prev[v];
                self.g.edges[e].cap -= push;
                self.g.edges[e ^ 1].cap += push;
                v = self.g.edges[e ^ 1].to;
            }
            total += best[sink] * push as f64;
        }
    }
}
