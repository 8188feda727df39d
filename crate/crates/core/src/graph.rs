//! Simple connected graphs, their orientations, and the named families
//! used throughout the crate.
//!
//! Vertex ids are contiguous `0..n`. Edges are stored normalised as
//! `(low, high)` in insertion order; an orientation is a bit-vector over
//! that edge order where bit `i` clear means edge `i` points `low -> high`.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

/// Hard cap so vertex sets and orientations fit in a `u64`.
pub const MAX_VERTICES: usize = 64;
pub const MAX_EDGES: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("graph has no edges")]
    Empty,
    #[error("line {line}: malformed edge `{text}`")]
    Malformed { line: usize, text: String },
    #[error("line {line}: self-loop at vertex {vertex}")]
    SelfLoop { line: usize, vertex: usize },
    #[error("line {line}: duplicate edge {u}-{v}")]
    DuplicateEdge { line: usize, u: usize, v: usize },
    #[error("graph is disconnected ({components} components)")]
    Disconnected { components: usize },
    #[error("vertex {vertex} out of range for {vertex_count} vertices")]
    VertexOutOfRange { vertex: usize, vertex_count: usize },
    #[error("graph too large: {what} = {value} exceeds {limit}")]
    TooLarge { what: &'static str, value: usize, limit: usize },
    #[error("invalid family parameters: {0}")]
    Family(String),
    #[error("orientation bits {bits:#x} do not fit {edges} edges")]
    BadOrientation { bits: u64, edges: usize },
}

/// A simple, connected, undirected graph on vertices `0..vertex_count`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph, rejecting loops, duplicate edges and disconnected input.
    pub fn new(vertex_count: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, GraphError> {
        Self::from_lines(vertex_count, edges.into_iter().enumerate().map(|(i, e)| (i + 1, e)))
    }

    fn from_lines(
        vertex_count: usize,
        edges: impl IntoIterator<Item = (usize, (usize, usize))>,
    ) -> Result<Self, GraphError> {
        if vertex_count > MAX_VERTICES {
            return Err(GraphError::TooLarge { what: "vertices", value: vertex_count, limit: MAX_VERTICES });
        }
        let mut seen = BTreeSet::new();
        let mut list = Vec::new();
        let mut adjacency = vec![Vec::new(); vertex_count];
        for (line, (u, v)) in edges {
            for w in [u, v] {
                if w >= vertex_count {
                    return Err(GraphError::VertexOutOfRange { vertex: w, vertex_count });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop { line, vertex: u });
            }
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                return Err(GraphError::DuplicateEdge { line, u, v });
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
            list.push(key);
        }
        if list.is_empty() {
            return Err(GraphError::Empty);
        }
        if list.len() > MAX_EDGES {
            return Err(GraphError::TooLarge { what: "edges", value: list.len(), limit: MAX_EDGES });
        }
        let graph = Graph { vertex_count, edges: list, adjacency };
        let components = graph.component_count();
        if components != 1 {
            return Err(GraphError::Disconnected { components });
        }
        Ok(graph)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(low, high)` pairs in canonical order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn is_tree(&self) -> bool {
        self.edges.len() + 1 == self.vertex_count
    }

    fn component_count(&self) -> usize {
        let mut seen = vec![false; self.vertex_count];
        let mut count = 0;
        for start in 0..self.vertex_count {
            if seen[start] {
                continue;
            }
            count += 1;
            seen[start] = true;
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &w in &self.adjacency[v] {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        count
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(|V|={}, |E|={})", self.vertex_count, self.edges.len())
    }
}

/// Parses whitespace-separated `u v` lines. Blank lines and `#` comments are skipped.
pub fn parse_edge_list(text: &str) -> Result<Graph, GraphError> {
    let mut edges = Vec::new();
    let mut max_id = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let malformed = || GraphError::Malformed { line, text: raw.to_string() };
        let mut parts = body.split_whitespace();
        let u: usize = parts.next().ok_or_else(malformed)?.parse().map_err(|_| malformed())?;
        let v: usize = parts.next().ok_or_else(malformed)?.parse().map_err(|_| malformed())?;
        if parts.next().is_some() {
            return Err(malformed());
        }
        max_id = Some(max_id.unwrap_or(0).max(u).max(v));
        edges.push((line, (u, v)));
    }
    let vertex_count = max_id.map_or(0, |m| m + 1);
    if vertex_count > MAX_VERTICES {
        return Err(GraphError::TooLarge { what: "vertices", value: vertex_count, limit: MAX_VERTICES });
    }
    Graph::from_lines(vertex_count, edges)
}

/// Named graph families. Constructors fix the vertex labelling: the hub or
/// common vertex is always vertex 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FamilySpec {
    Cycle(usize),
    Path(usize),
    /// Star `K_{1,t}` with centre 0.
    Star(usize),
    /// Wheel `W_{n+1} = C_n + K_1` with hub 0 and rim `1..=n`.
    Wheel(usize),
    /// `copies` cycles of length `cycle_len` sharing vertex 0.
    Friendship {
        cycle_len: usize,
        copies: usize,
    },
    /// Cycles of mixed lengths `(len, copies)` sharing vertex 0.
    GeneralFriendship(Vec<(usize, usize)>),
    /// `paths` internally disjoint paths of order `order` between
    /// vertex 0 (`u1`) and the last vertex (`u2`).
    Joost {
        order: usize,
        paths: usize,
    },
}

impl FamilySpec {
    fn check(&self) -> Result<(), GraphError> {
        let fail = |msg: String| Err(GraphError::Family(msg));
        match self {
            FamilySpec::Cycle(n) if *n < 3 => fail(format!("cycle needs n >= 3, got {n}")),
            FamilySpec::Path(n) if *n < 2 => fail(format!("path needs n >= 2, got {n}")),
            FamilySpec::Star(t) if *t < 1 => fail(format!("star needs t >= 1, got {t}")),
            FamilySpec::Wheel(n) if *n < 3 => fail(format!("wheel needs rim n >= 3, got {n}")),
            FamilySpec::Friendship { cycle_len, copies } => {
                if *cycle_len < 3 {
                    fail(format!("friendship cycle length must be >= 3, got {cycle_len}"))
                } else if *copies < 1 {
                    fail(format!("friendship needs copies >= 1, got {copies}"))
                } else {
                    Ok(())
                }
            }
            FamilySpec::GeneralFriendship(list) => {
                if list.is_empty() {
                    return fail("general friendship needs at least one cycle family".into());
                }
                for &(len, copies) in list {
                    if len < 3 {
                        return fail(format!("cycle length must be >= 3, got {len}"));
                    }
                    if copies < 1 {
                        return fail(format!("copies must be >= 1, got {copies}"));
                    }
                }
                Ok(())
            }
            FamilySpec::Joost { order, paths } => {
                if *order < 3 {
                    fail(format!("joost path order must be >= 3, got {order}"))
                } else if *paths < 1 {
                    fail(format!("joost needs paths >= 1, got {paths}"))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = match self {
            FamilySpec::Cycle(n) => format!("cycle:{n}"),
            FamilySpec::Path(n) => format!("path:{n}"),
            FamilySpec::Star(t) => format!("star:{t}"),
            FamilySpec::Wheel(n) => format!("wheel:{n}"),
            FamilySpec::Friendship { cycle_len, copies } => format!("friendship:{cycle_len},{copies}"),
            FamilySpec::GeneralFriendship(list) => {
                let parts: Vec<String> = list.iter().map(|(l, c)| format!("{l}x{c}")).collect();
                format!("genfriendship:{}", parts.join("+"))
            }
            FamilySpec::Joost { order, paths } => format!("joost:{order},{paths}"),
        };
        f.pad(&text)
    }
}

/// Builds the canonical labelled member of a family.
pub fn build_family(spec: &FamilySpec) -> Result<Graph, GraphError> {
    spec.check()?;
    match spec {
        FamilySpec::Cycle(n) => {
            let mut edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
            edges.push((0, n - 1));
            Graph::new(*n, edges)
        }
        FamilySpec::Path(n) => Graph::new(*n, (0..n - 1).map(|i| (i, i + 1))),
        FamilySpec::Star(t) => Graph::new(t + 1, (1..=*t).map(|i| (0, i))),
        FamilySpec::Wheel(n) => {
            let mut edges: Vec<_> = (1..=*n).map(|i| (0, i)).collect();
            edges.extend((1..*n).map(|i| (i, i + 1)));
            edges.push((1, *n));
            Graph::new(n + 1, edges)
        }
        FamilySpec::Friendship { cycle_len, copies } => friendship(&[(*cycle_len, *copies)]),
        FamilySpec::GeneralFriendship(list) => friendship(list),
        FamilySpec::Joost { order, paths } => {
            let inner = order - 2;
            let last = 1 + paths * inner;
            let mut edges = Vec::new();
            for j in 0..*paths {
                let first = 1 + j * inner;
                edges.push((0, first));
                edges.extend((first..first + inner - 1).map(|v| (v, v + 1)));
                edges.push((first + inner - 1, last));
            }
            Graph::new(last + 1, edges)
        }
    }
}

fn friendship(families: &[(usize, usize)]) -> Result<Graph, GraphError> {
    let mut edges = Vec::new();
    let mut next = 1;
    for &(len, copies) in families {
        for _ in 0..copies {
            let rim: Vec<usize> = (next..next + len - 1).collect();
            next += len - 1;
            edges.push((0, rim[0]));
            edges.extend(rim.windows(2).map(|w| (w[0], w[1])));
            edges.push((0, rim[rim.len() - 1]));
        }
    }
    Graph::new(next, edges)
}

/// An orientation of a [`Graph`]: arc `i` is edge `i` with a chosen direction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Digraph {
    base: Graph,
    bits: u64,
    arcs: Vec<(usize, usize)>,
    out_arcs: Vec<Vec<usize>>,
    in_arcs: Vec<Vec<usize>>,
}

impl Digraph {
    pub fn new(base: Graph, bits: u64) -> Result<Self, GraphError> {
        let m = base.edge_count();
        if m < 64 && bits >> m != 0 {
            return Err(GraphError::BadOrientation { bits, edges: m });
        }
        let n = base.vertex_count();
        let mut arcs = Vec::with_capacity(m);
        let mut out_arcs = vec![Vec::new(); n];
        let mut in_arcs = vec![Vec::new(); n];
        for (i, &(a, b)) in base.edges().iter().enumerate() {
            let (t, h) = if bits >> i & 1 == 0 { (a, b) } else { (b, a) };
            arcs.push((t, h));
            out_arcs[t].push(i);
            in_arcs[h].push(i);
        }
        Ok(Digraph { base, bits, arcs, out_arcs, in_arcs })
    }

    /// Orients each edge as the given `(tail, head)` pair; every edge must
    /// appear exactly once.
    pub fn from_arcs(base: Graph, arcs: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut bits = 0u64;
        let mut covered = vec![false; base.edge_count()];
        for &(t, h) in arcs {
            let key = (t.min(h), t.max(h));
            let idx = base
                .edges()
                .iter()
                .position(|&e| e == key)
                .ok_or(GraphError::Malformed { line: 0, text: format!("{t}->{h} is not an edge") })?;
            if covered[idx] {
                return Err(GraphError::DuplicateEdge { line: 0, u: t, v: h });
            }
            covered[idx] = true;
            if t > h {
                bits |= 1 << idx;
            }
        }
        if covered.iter().any(|c| !c) {
            return Err(GraphError::Malformed { line: 0, text: "orientation does not cover every edge".into() });
        }
        Digraph::new(base, bits)
    }

    pub fn base(&self) -> &Graph {
        &self.base
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn vertex_count(&self) -> usize {
        self.base.vertex_count()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    /// `(tail, head)` of arc `i`.
    pub fn arc(&self, i: usize) -> (usize, usize) {
        self.arcs[i]
    }

    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    pub fn out_arcs(&self, v: usize) -> &[usize] {
        &self.out_arcs[v]
    }

    pub fn in_arcs(&self, v: usize) -> &[usize] {
        &self.in_arcs[v]
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.out_arcs[v].len()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.in_arcs[v].len()
    }

    /// Kahn's algorithm; `None` when the orientation has a directed cycle.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.vertex_count();
        let mut indeg: Vec<usize> = (0..n).map(|v| self.in_degree(v)).collect();
        let mut queue: VecDeque<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &a in &self.out_arcs[v] {
                let h = self.arcs[a].1;
                indeg[h] -= 1;
                if indeg[h] == 0 {
                    queue.push_back(h);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_some()
    }
}

/// Streams every acyclic orientation of `g` exactly once, in increasing
/// lexicographic order of the orientation bit-vector (edge 0 first).
pub fn acyclic_orientations(g: &Graph) -> impl Iterator<Item = Digraph> + '_ {
    AcyclicBits::new(g).map(move |bits| Digraph::new(g.clone(), bits).expect("bits fit edge count"))
}

/// Sort key realising the enumeration order: edge 0 is the most significant position.
pub fn orientation_order_key(bits: u64, edge_count: usize) -> u64 {
    if edge_count == 0 {
        0
    } else {
        bits.reverse_bits() >> (64 - edge_count)
    }
}

/// Same enumeration as [`acyclic_orientations`], yielding only the bit-vectors.
pub fn acyclic_orientation_bits(g: &Graph) -> AcyclicBits {
    AcyclicBits::new(g)
}

/// Depth-first enumeration with an incremental reachability check: adding
/// `t -> h` closes a cycle iff `h` already reaches `t`.
pub struct AcyclicBits {
    edges: Vec<(usize, usize)>,
    // reach[d][v]: vertices reachable from v using the arcs fixed at depth < d
    reach: Vec<Vec<u64>>,
    next_choice: Vec<u8>,
    bits: u64,
    started: bool,
}

impl AcyclicBits {
    fn new(g: &Graph) -> Self {
        let m = g.edge_count();
        AcyclicBits {
            edges: g.edges().to_vec(),
            reach: vec![vec![0; g.vertex_count()]; m + 1],
            next_choice: Vec::with_capacity(m),
            bits: 0,
            started: false,
        }
    }
}

impl Iterator for AcyclicBits {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if !self.started {
            self.started = true;
            self.next_choice.push(0);
        }
        let m = self.edges.len();
        while let Some(depth) = self.next_choice.len().checked_sub(1) {
            let choice = self.next_choice[depth];
            if choice > 1 {
                self.next_choice.pop();
                continue;
            }
            self.next_choice[depth] += 1;
            let (a, b) = self.edges[depth];
            let (t, h) = if choice == 0 { (a, b) } else { (b, a) };
            if self.reach[depth][h] >> t & 1 == 1 {
                continue;
            }
            if choice == 0 {
                self.bits &= !(1u64 << depth);
            } else {
                self.bits |= 1u64 << depth;
            }
            if depth + 1 == m {
                return Some(self.bits);
            }
            let (lower, upper) = self.reach.split_at_mut(depth + 1);
            let cur = &lower[depth];
            let next = &mut upper[0];
            let gained = cur[h] | (1u64 << h);
            for (v, slot) in next.iter_mut().enumerate() {
                *slot = if v == t || cur[v] >> t & 1 == 1 { cur[v] | gained } else { cur[v] };
            }
            self.next_choice.push(0);
        }
        None
    }
}
