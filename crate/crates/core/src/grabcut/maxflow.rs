//! s-t max-flow / min-cut on undirected networks with terminal links.
//!
//! The solver grows two search trees, one from each terminal, and augments
//! along the path found where they meet, then repairs the trees by adopting
//! orphaned nodes (Boykov and Kolmogorov's method). Nodes left in the source
//! tree at termination are exactly those reachable from the source in the
//! residual graph.

use std::collections::VecDeque;

/// Pixel nodes plus two implicit terminals. Source = foreground, sink = background.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowNetwork {
    source_cap: Vec<f64>,
    sink_cap: Vec<f64>,
    edges: Vec<(u32, u32, f64)>,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        Self {
            source_cap: vec![0.0; nodes],
            sink_cap: vec![0.0; nodes],
            edges: Vec::new(),
        }
    }

    pub fn with_edge_capacity(nodes: usize, edges: usize) -> Self {
        let mut net = Self::new(nodes);
        net.edges.reserve(edges);
        net
    }

    pub fn node_count(&self) -> usize {
        self.source_cap.len()
    }

    pub fn set_terminals(&mut self, node: usize, source: f64, sink: f64) {
        debug_assert!(source >= 0.0 && sink >= 0.0 && source.is_finite() && sink.is_finite());
        self.source_cap[node] = source;
        self.sink_cap[node] = sink;
    }

    /// Undirected neighbour link: the same capacity in both directions.
    pub fn add_edge(&mut self, u: usize, v: usize, cap: f64) {
        debug_assert!(u != v && cap >= 0.0 && cap.is_finite());
        self.edges.push((u as u32, v as u32, cap));
    }

    pub fn source_caps(&self) -> &[f64] {
        &self.source_cap
    }

    pub fn sink_caps(&self) -> &[f64] {
        &self.sink_cap
    }

    pub fn edges(&self) -> &[(u32, u32, f64)] {
        &self.edges
    }

    /// Capacity of the cut that puts `source_side` nodes with the source.
    pub fn cut_capacity(&self, source_side: &[bool]) -> f64 {
        let mut total = 0.0;
        for (i, &s) in source_side.iter().enumerate() {
            total += if s { self.sink_cap[i] } else { self.source_cap[i] };
        }
        for &(u, v, c) in &self.edges {
            if source_side[u as usize] != source_side[v as usize] {
                total += c;
            }
        }
        total
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxFlow {
    pub flow: f64,
    /// `true` for nodes on the source (foreground) side of the minimum cut.
    pub source_side: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tree {
    Free,
    Source,
    Sink,
}

const TERMINAL: u32 = u32::MAX;
const ORPHAN: u32 = u32::MAX - 1;
const NONE: u32 = u32::MAX - 2;

struct Solver {
    // arcs come in sister pairs (2i, 2i+1)
    head: Vec<u32>,
    rcap: Vec<f64>,
    // CSR adjacency of outgoing arcs
    offsets: Vec<usize>,
    out_arcs: Vec<u32>,

    residual_terminal: Vec<f64>,
    tree: Vec<Tree>,
    /// Arc in the direction of flow: parent -> node in the source tree,
    /// node -> parent in the sink tree.
    parent: Vec<u32>,
    stamp: Vec<u64>,
    dist: Vec<u32>,
    in_queue: Vec<bool>,

    active: VecDeque<u32>,
    orphans: Vec<u32>,
    time: u64,
    flow: f64,
}

impl Solver {
    fn new(net: &FlowNetwork) -> Self {
        let n = net.node_count();
        let m = net.edges.len();
        let mut head = Vec::with_capacity(2 * m);
        let mut rcap = Vec::with_capacity(2 * m);
        let mut degree = vec![0usize; n + 1];
        for &(u, v, c) in &net.edges {
            head.push(v);
            rcap.push(c);
            head.push(u);
            rcap.push(c);
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = vec![0usize; n + 1];
        for i in 0..n {
            offsets[i + 1] = offsets[i] + degree[i];
        }
        let mut fill = offsets.clone();
        let mut out_arcs = vec![0u32; 2 * m];
        for (e, &(u, v, _)) in net.edges.iter().enumerate() {
            out_arcs[fill[u as usize]] = (2 * e) as u32;
            fill[u as usize] += 1;
            out_arcs[fill[v as usize]] = (2 * e + 1) as u32;
            fill[v as usize] += 1;
        }

        let mut s = Solver {
            head,
            rcap,
            offsets,
            out_arcs,
            residual_terminal: vec![0.0; n],
            tree: vec![Tree::Free; n],
            parent: vec![NONE; n],
            stamp: vec![0; n],
            dist: vec![0; n],
            in_queue: vec![false; n],
            active: VecDeque::new(),
            orphans: Vec::new(),
            time: 0,
            flow: 0.0,
        };
        for i in 0..n {
            let (src, snk) = (net.source_cap[i], net.sink_cap[i]);
            // push the shared part straight through the node
            s.flow += src.min(snk);
            let r = src - snk;
            s.residual_terminal[i] = r;
            if r != 0.0 {
                s.tree[i] = if r > 0.0 { Tree::Source } else { Tree::Sink };
                s.parent[i] = TERMINAL;
                s.dist[i] = 1;
                s.activate(i as u32);
            }
        }
        s
    }

    #[inline]
    fn tail(&self, arc: u32) -> u32 {
        self.head[(arc ^ 1) as usize]
    }

    #[inline]
    fn arcs(&self, node: u32) -> std::ops::Range<usize> {
        self.offsets[node as usize]..self.offsets[node as usize + 1]
    }

    fn activate(&mut self, node: u32) {
        if !self.in_queue[node as usize] {
            self.in_queue[node as usize] = true;
            self.active.push_back(node);
        }
    }

    /// Next node of the tree walk towards the root through `arc`.
    #[inline]
    fn parent_node(&self, tree: Tree, arc: u32) -> u32 {
        match tree {
            Tree::Source => self.tail(arc),
            _ => self.head[arc as usize],
        }
    }

    /// Grows the tree of `p` by one layer. Returns an arc from a source-tree
    /// node to a sink-tree node if the trees touch.
    fn grow(&mut self, p: u32) -> Option<u32> {
        let side = self.tree[p as usize];
        for k in self.arcs(p) {
            let a = self.out_arcs[k];
            let q = self.head[a as usize];
            // arc carrying flow away from the source side
            let along = if side == Tree::Source { a } else { a ^ 1 };
            if self.rcap[along as usize] <= 0.0 {
                continue;
            }
            match self.tree[q as usize] {
                Tree::Free => {
                    self.tree[q as usize] = side;
                    self.parent[q as usize] = along;
                    self.stamp[q as usize] = self.stamp[p as usize];
                    self.dist[q as usize] = self.dist[p as usize] + 1;
                    self.activate(q);
                }
                t if t != side => return Some(along),
                _ => {}
            }
        }
        None
    }

    fn augment(&mut self, middle: u32) {
        let mut bottleneck = self.rcap[middle as usize];
        for (start, side) in [(self.tail(middle), Tree::Source), (self.head[middle as usize], Tree::Sink)] {
            let mut x = start;
            loop {
                let a = self.parent[x as usize];
                if a == TERMINAL {
                    let r = self.residual_terminal[x as usize];
                    bottleneck = bottleneck.min(if side == Tree::Source { r } else { -r });
                    break;
                }
                bottleneck = bottleneck.min(self.rcap[a as usize]);
                x = self.parent_node(side, a);
            }
        }

        self.rcap[middle as usize] -= bottleneck;
        self.rcap[(middle ^ 1) as usize] += bottleneck;
        for (start, side) in [(self.tail(middle), Tree::Source), (self.head[middle as usize], Tree::Sink)] {
            let mut x = start;
            loop {
                let a = self.parent[x as usize];
                if a == TERMINAL {
                    let r = &mut self.residual_terminal[x as usize];
                    if side == Tree::Source {
                        *r -= bottleneck;
                    } else {
                        *r += bottleneck;
                    }
                    if *r == 0.0 {
                        self.make_orphan(x);
                    }
                    break;
                }
                let next = self.parent_node(side, a);
                self.rcap[a as usize] -= bottleneck;
                self.rcap[(a ^ 1) as usize] += bottleneck;
                if self.rcap[a as usize] == 0.0 {
                    self.make_orphan(x);
                }
                x = next;
            }
        }
        self.flow += bottleneck;
    }

    fn make_orphan(&mut self, node: u32) {
        self.parent[node as usize] = ORPHAN;
        self.orphans.push(node);
    }

    /// Distance from `q` to its terminal, or `None` if the walk hits an orphan.
    /// Caches distances along the walk under the current timestamp.
    fn root_distance(&mut self, q: u32) -> Option<u32> {
        let side = self.tree[q as usize];
        let mut steps = 0u32;
        let mut x = q;
        let total = loop {
            if self.stamp[x as usize] == self.time {
                break steps + self.dist[x as usize];
            }
            match self.parent[x as usize] {
                TERMINAL => {
                    self.stamp[x as usize] = self.time;
                    self.dist[x as usize] = 1;
                    break steps + 1;
                }
                ORPHAN | NONE => return None,
                a => {
                    steps += 1;
                    x = self.parent_node(side, a);
                }
            }
        };
        let mut d = total;
        let mut x = q;
        while self.stamp[x as usize] != self.time {
            self.stamp[x as usize] = self.time;
            self.dist[x as usize] = d;
            d -= 1;
            x = self.parent_node(side, self.parent[x as usize]);
        }
        Some(total)
    }

    fn adopt(&mut self, p: u32) {
        let side = self.tree[p as usize];
        let mut best: Option<(u32, u32)> = None;
        for k in self.arcs(p) {
            let a = self.out_arcs[k];
            let q = self.head[a as usize];
            if self.tree[q as usize] != side {
                continue;
            }
            let toward_p = if side == Tree::Source { a ^ 1 } else { a };
            if self.rcap[toward_p as usize] <= 0.0 {
                continue;
            }
            if let Some(d) = self.root_distance(q) {
                if best.is_none_or(|(_, bd)| d < bd) {
                    best = Some((toward_p, d));
                }
            }
        }
        if let Some((arc, d)) = best {
            self.parent[p as usize] = arc;
            self.stamp[p as usize] = self.time;
            self.dist[p as usize] = d + 1;
            return;
        }

        for k in self.arcs(p) {
            let a = self.out_arcs[k];
            let q = self.head[a as usize];
            if self.tree[q as usize] != side {
                continue;
            }
            let toward_p = if side == Tree::Source { a ^ 1 } else { a };
            if self.rcap[toward_p as usize] > 0.0 {
                self.activate(q);
            }
            let q_parent = self.parent[q as usize];
            let from_p = if side == Tree::Source { a } else { a ^ 1 };
            if q_parent == from_p {
                self.make_orphan(q);
            }
        }
        self.tree[p as usize] = Tree::Free;
        self.parent[p as usize] = NONE;
    }

    fn run(mut self) -> MaxFlow {
        while let Some(p) = self.active.pop_front() {
            self.in_queue[p as usize] = false;
            if self.tree[p as usize] == Tree::Free {
                continue;
            }
            let Some(middle) = self.grow(p) else {
                continue;
            };
            // p may touch the other tree again
            self.in_queue[p as usize] = true;
            self.active.push_front(p);

            self.time += 1;
            self.augment(middle);
            while let Some(o) = self.orphans.pop() {
                self.adopt(o);
            }
        }
        MaxFlow {
            flow: self.flow,
            source_side: self.tree.iter().map(|&t| t == Tree::Source).collect(),
        }
    }
}

/// Exact maximum flow and the source side of a minimum cut.
pub fn max_flow(net: &FlowNetwork) -> MaxFlow {
    Solver::new(net).run()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Cheapest cut over all 2^n source/sink assignments.
    fn brute_force_min_cut(net: &FlowNetwork) -> f64 {
        let n = net.node_count();
        (0u32..(1 << n))
            .map(|bits| {
                let side: Vec<bool> = (0..n).map(|i| (bits >> i) & 1 == 1).collect();
                net.cut_capacity(&side)
            })
            .fold(f64::INFINITY, f64::min)
    }

    fn random_network(rng: &mut ChaCha8Rng, n: usize) -> FlowNetwork {
        let mut net = FlowNetwork::new(n);
        for i in 0..n {
            net.set_terminals(i, rng.random_range(0..=10) as f64, rng.random_range(0..=10) as f64);
        }
        for u in 0..n {
            for v in u + 1..n {
                if rng.random_bool(0.5) {
                    net.add_edge(u, v, rng.random_range(0..=10) as f64);
                }
            }
        }
        net
    }

    #[test]
    fn single_node() {
        let mut net = FlowNetwork::new(1);
        net.set_terminals(0, 3.0, 5.0);
        let r = max_flow(&net);
        assert_eq!(r.flow, 3.0);
        assert_eq!(r.source_side, vec![false]);
    }

    #[test]
    fn isolated_node_goes_to_sink() {
        let mut net = FlowNetwork::new(2);
        net.set_terminals(0, 4.0, 1.0);
        let r = max_flow(&net);
        assert_eq!(r.flow, 1.0);
        assert_eq!(r.source_side, vec![true, false]);
    }

    #[test]
    fn chain_through_neighbours() {
        // s -5-> 0 -2- 1 -4-> t : bottleneck is the middle link
        let mut net = FlowNetwork::new(2);
        net.set_terminals(0, 5.0, 0.0);
        net.set_terminals(1, 0.0, 4.0);
        net.add_edge(0, 1, 2.0);
        let r = max_flow(&net);
        assert_eq!(r.flow, 2.0);
        assert_eq!(r.source_side, vec![true, false]);
    }

    #[test]
    fn matches_brute_force_on_small_random_networks() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..300 {
            let n = rng.random_range(1..=8);
            let net = random_network(&mut rng, n);
            let r = max_flow(&net);
            assert_eq!(r.flow, brute_force_min_cut(&net));
            assert_eq!(net.cut_capacity(&r.source_side), r.flow);
        }
    }

    #[test]
    fn grid_cut_equals_flow() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (w, h) = (30, 20);
        let mut net = FlowNetwork::new(w * h);
        for i in 0..w * h {
            net.set_terminals(i, rng.random_range(0.0..10.0), rng.random_range(0.0..10.0));
        }
        for y in 0..h {
            for x in 0..w {
                let i = y * w + x;
                if x + 1 < w {
                    net.add_edge(i, i + 1, rng.random_range(0.0..6.0));
                }
                if y + 1 < h {
                    net.add_edge(i, i + w, rng.random_range(0.0..6.0));
                }
                if x + 1 < w && y + 1 < h {
                    net.add_edge(i, i + w + 1, rng.random_range(0.0..4.0));
                }
                if x > 0 && y + 1 < h {
                    net.add_edge(i, i + w - 1, rng.random_range(0.0..4.0));
                }
            }
        }
        let r = max_flow(&net);
        let cut = net.cut_capacity(&r.source_side);
        assert!((cut - r.flow).abs() <= 1e-9 * r.flow.max(1.0), "{cut} vs {}", r.flow);
    }
}
