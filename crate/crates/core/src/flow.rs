//! Dinic's maximum flow on real capacities.

use std::collections::VecDeque;

const FLOW_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
struct Edge {
    to: usize,
    cap: f64,
}

#[derive(Debug, Clone)]
pub struct FlowNetwork {
    edges: Vec<Edge>,
    adj: Vec<Vec<usize>>,
    incident: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutSide {
    Source,
    Sink,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        FlowNetwork {
            edges: Vec::new(),
            adj: vec![Vec::new(); nodes],
            incident: vec![false; nodes],
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.adj.len()
    }

    pub fn add_edge(&mut self, u: usize, v: usize, cap: f64) {
        assert!(cap >= 0.0, "negative capacity");
        self.adj[u].push(self.edges.len());
        self.edges.push(Edge { to: v, cap });
        self.adj[v].push(self.edges.len());
        self.edges.push(Edge { to: u, cap: 0.0 });
        self.incident[u] = true;
        self.incident[v] = true;
    }

    fn bfs(&self, s: usize, level: &mut [i64]) {
        level.iter_mut().for_each(|l| *l = -1);
        level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.adj[u] {
                let Edge { to, cap } = self.edges[e];
                if cap > FLOW_TOL && level[to] < 0 {
                    level[to] = level[u] + 1;
                    queue.push_back(to);
                }
            }
        }
    }

    fn dfs(&mut self, u: usize, t: usize, pushed: f64, level: &[i64], iter: &mut [usize]) -> f64 {
        if u == t {
            return pushed;
        }
        while iter[u] < self.adj[u].len() {
            let e = self.adj[u][iter[u]];
            let Edge { to, cap } = self.edges[e];
            if cap > FLOW_TOL && level[to] == level[u] + 1 {
                let got = self.dfs(to, t, pushed.min(cap), level, iter);
                if got > FLOW_TOL {
                    self.edges[e].cap -= got;
                    self.edges[e ^ 1].cap += got;
                    return got;
                }
            }
            iter[u] += 1;
        }
        0.0
    }

    /// Saturates the network and returns the flow value.
    pub fn max_flow(&mut self, s: usize, t: usize) -> f64 {
        let n = self.num_nodes();
        let mut level = vec![-1i64; n];
        let mut total = 0.0;
        loop {
            self.bfs(s, &mut level);
            if level[t] < 0 {
                return total;
            }
            let mut iter = vec![0usize; n];
            loop {
                let f = self.dfs(s, t, f64::INFINITY, &level, &mut iter);
                if f <= FLOW_TOL {
                    break;
                }
                total += f;
            }
        }
    }

    /// Nodes reachable from `s` in the residual network.
    fn residual_reach(&self, s: usize) -> Vec<bool> {
        let mut level = vec![-1i64; self.num_nodes()];
        self.bfs(s, &mut level);
        level.iter().map(|&l| l >= 0).collect()
    }
}

/// Maximum flow value and one side of a minimum cut. The returned side
/// omits both terminals and nodes without incident edges.
pub fn min_cut_side(net: &FlowNetwork, s: usize, t: usize, side: CutSide) -> (f64, Vec<usize>) {
    let mut work = net.clone();
    let value = work.max_flow(s, t);
    let reach = work.residual_reach(s);
    let nodes = (0..net.num_nodes())
        .filter(|&v| v != s && v != t && net.incident[v])
        .filter(|&v| match side {
            CutSide::Source => reach[v],
            CutSide::Sink => !reach[v],
        })
        .collect();
    (value, nodes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_arc() {
        let mut net = FlowNetwork::new(2);
        net.add_edge(0, 1, 0.7);
        let (v, side) = min_cut_side(&net, 0, 1, CutSide::Sink);
        assert!((v - 0.7).abs() < 1e-12);
        assert!(side.is_empty());
    }

    #[test]
    fn two_routes() {
        let mut net = FlowNetwork::new(4);
        net.add_edge(0, 1, 1.0);
        net.add_edge(1, 3, 1.0);
        net.add_edge(0, 2, 1.0);
        net.add_edge(2, 3, 1.0);
        let (v, _) = min_cut_side(&net, 0, 3, CutSide::Source);
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn isolated_nodes_are_dropped() {
        let mut net = FlowNetwork::new(5);
        net.add_edge(0, 1, 0.3);
        net.add_edge(1, 4, 1.0);
        let (v, sink_side) = min_cut_side(&net, 0, 4, CutSide::Sink);
        assert!((v - 0.3).abs() < 1e-12);
        assert_eq!(sink_side, vec![1]);
    }
}
