//! Regular graphs, their bipartite double covers, and the port numbering that
//! fixes `Γ_i(v)` and global edge ids.
//!
//! Vertex ids for bipartite graphs run over both sides: left vertex `v` is
//! `v`, right vertex `u` is `n + u`. Edge `(v, i)` (left vertex `v`, slot `i`)
//! has global id `v·d + i`.

use std::collections::{HashSet, VecDeque};
use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::error::{GraphError, ParseError};
use crate::rng::SplitMix64;

const MAX_PAIRING_TRIES: usize = 200;
const MAX_RESTARTS: usize = 1000;

/// A `d`-regular graph with ordered adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularGraph {
    n: usize,
    d: usize,
    adj: Vec<usize>,
}

impl RegularGraph {
    /// Validates and wraps adjacency lists.
    pub fn from_adjacency(lists: Vec<Vec<usize>>) -> Result<Self, GraphError> {
        let n = lists.len();
        let d = lists.first().map_or(0, Vec::len);
        for (v, l) in lists.iter().enumerate() {
            if l.len() != d {
                return Err(GraphError::Invalid(format!(
                    "vertex {v} has degree {} (expected {d})",
                    l.len()
                )));
            }
            let mut seen = HashSet::new();
            for &u in l {
                if u >= n {
                    return Err(GraphError::Invalid(format!("neighbor {u} of {v} out of range")));
                }
                if !seen.insert(u) {
                    return Err(GraphError::Invalid(format!("multi-edge {v}-{u}")));
                }
                if !lists[u].contains(&v) {
                    return Err(GraphError::Invalid(format!("edge {v}-{u} is not symmetric")));
                }
            }
        }
        Ok(Self {
            n,
            d,
            adj: lists.into_iter().flatten().collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v * self.d..(v + 1) * self.d]
    }

    pub fn has_loops(&self) -> bool {
        (0..self.n).any(|v| self.neighbors(v).contains(&v))
    }

    /// Number of connected components.
    pub fn components(&self) -> usize {
        count_components(self.n, |v| self.neighbors(v).to_vec())
    }

    pub fn complete(n: usize) -> Result<Self, GraphError> {
        if n < 2 {
            return Err(GraphError::InvalidParams("complete graph needs n >= 2".into()));
        }
        Self::from_adjacency((0..n).map(|v| (0..n).filter(|&u| u != v).collect()).collect())
    }

    /// `K_n` with a loop at every vertex; `d = n` and the double cover is `K_{n,n}`.
    pub fn complete_with_loops(n: usize) -> Result<Self, GraphError> {
        if n < 1 {
            return Err(GraphError::InvalidParams("need n >= 1".into()));
        }
        Self::from_adjacency((0..n).map(|_| (0..n).collect()).collect())
    }

    pub fn cycle(n: usize) -> Result<Self, GraphError> {
        if n < 3 {
            return Err(GraphError::InvalidParams("cycle needs n >= 3".into()));
        }
        Self::from_adjacency((0..n).map(|v| vec![(v + n - 1) % n, (v + 1) % n]).collect())
    }

    /// Disjoint union; vertices of `other` are shifted by `self.n()`.
    pub fn disjoint_union(&self, other: &RegularGraph) -> Result<Self, GraphError> {
        let mut lists: Vec<Vec<usize>> = (0..self.n).map(|v| self.neighbors(v).to_vec()).collect();
        lists.extend((0..other.n).map(|v| other.neighbors(v).iter().map(|u| u + self.n).collect()));
        Self::from_adjacency(lists)
    }

    /// Random simple `d`-regular graph from the pairing model. Pairs that would
    /// create a loop or a multi-edge are redrawn; a dead end restarts from scratch.
    pub fn random_regular(n: usize, d: usize, seed: u64) -> Result<Self, GraphError> {
        if !(n * d).is_multiple_of(2) {
            return Err(GraphError::InvalidParams(format!("n·d must be even (n={n}, d={d})")));
        }
        if d >= n {
            return Err(GraphError::InvalidParams(format!("need d < n (n={n}, d={d})")));
        }
        let mut rng = SplitMix64::new(seed);
        'restart: for _ in 0..MAX_RESTARTS {
            let mut points: Vec<usize> = (0..n * d).map(|p| p / d).collect();
            let mut lists: Vec<Vec<usize>> = vec![Vec::with_capacity(d); n];
            let mut edges: HashSet<(usize, usize)> = HashSet::with_capacity(n * d / 2);
            while !points.is_empty() {
                let mut placed = false;
                for _ in 0..MAX_PAIRING_TRIES {
                    let i = rng.index(points.len());
                    let mut j = rng.index(points.len() - 1);
                    if j >= i {
                        j += 1;
                    }
                    let (u, v) = (points[i], points[j]);
                    let key = (u.min(v), u.max(v));
                    if u == v || edges.contains(&key) {
                        continue;
                    }
                    edges.insert(key);
                    lists[u].push(v);
                    lists[v].push(u);
                    let (hi, lo) = (i.max(j), i.min(j));
                    points.swap_remove(hi);
                    points.swap_remove(lo);
                    placed = true;
                    break;
                }
                if !placed {
                    continue 'restart;
                }
            }
            return Self::from_adjacency(lists);
        }
        Err(GraphError::GenerationFailed { restarts: MAX_RESTARTS })
    }

    /// `regular n d` header followed by one adjacency line per vertex.
    pub fn to_text(&self) -> String {
        let mut s = format!("regular {} {}\n", self.n, self.d);
        for v in 0..self.n {
            let line: Vec<String> = self.neighbors(v).iter().map(usize::to_string).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }
}

/// A `d`-regular bipartite graph with `n` vertices per side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteGraph {
    n: usize,
    d: usize,
    /// `left_ports[v·d + i] = (u, j)`: slot `i` of left `v` meets slot `j` of right `u`.
    left_ports: Vec<(u32, u32)>,
    /// `right_edges[u·d + j]` = global id of the edge in slot `j` of right `u`.
    right_edges: Vec<u32>,
}

impl BipartiteGraph {
    /// Builds from the left port table; checks that it is a bijection onto right slots.
    pub fn from_ports(n: usize, d: usize, left_ports: Vec<(usize, usize)>) -> Result<Self, GraphError> {
        if left_ports.len() != n * d {
            return Err(GraphError::Invalid(format!(
                "expected {} ports, got {}",
                n * d,
                left_ports.len()
            )));
        }
        let mut right_edges = vec![u32::MAX; n * d];
        for (e, &(u, j)) in left_ports.iter().enumerate() {
            if u >= n || j >= d {
                return Err(GraphError::Invalid(format!("port {u}:{j} out of range")));
            }
            let slot = &mut right_edges[u * d + j];
            if *slot != u32::MAX {
                return Err(GraphError::Invalid(format!("right port {u}:{j} used twice")));
            }
            *slot = e as u32;
        }
        let g = Self {
            n,
            d,
            left_ports: left_ports.into_iter().map(|(u, j)| (u as u32, j as u32)).collect(),
            right_edges,
        };
        g.validate()?;
        Ok(g)
    }

    /// Port involution and simplicity check.
    pub fn validate(&self) -> Result<(), GraphError> {
        for e in 0..self.edge_count() {
            let (u, j) = self.left_ports[e];
            if self.right_edges[u as usize * self.d + j as usize] as usize != e {
                return Err(GraphError::Invalid(format!(
                    "port map is not an involution at edge {e}"
                )));
            }
        }
        for v in 0..self.n {
            let mut seen = HashSet::new();
            for i in 0..self.d {
                if !seen.insert(self.left_ports[v * self.d + i].0) {
                    return Err(GraphError::Invalid(format!("multi-edge at left vertex {v}")));
                }
            }
        }
        Ok(())
    }

    /// Bipartite double cover; neighbor orders are inherited from `g`.
    pub fn double_cover(g: &RegularGraph) -> Self {
        let (n, d) = (g.n(), g.d());
        let ports = (0..n)
            .flat_map(|v| {
                g.neighbors(v).iter().map(move |&u| {
                    let j = g
                        .neighbors(u)
                        .iter()
                        .position(|&w| w == v)
                        .expect("symmetric adjacency");
                    (u, j)
                })
            })
            .collect();
        Self::from_ports(n, d, ports).expect("double cover of a valid graph is valid")
    }

    /// `K_{n,n}` with slot `i` of every vertex pointing at vertex `i`.
    pub fn complete_bipartite(n: usize) -> Self {
        let ports = (0..n).flat_map(|v| (0..n).map(move |u| (u, v))).collect();
        Self::from_ports(n, n, ports).expect("complete bipartite graph is valid")
    }

    /// Disjoint union; right vertices of `other` are shifted by `self.n()`.
    pub fn disjoint_union(&self, other: &BipartiteGraph) -> Result<Self, GraphError> {
        if self.d != other.d {
            return Err(GraphError::InvalidParams("degrees differ".into()));
        }
        let mut ports: Vec<(usize, usize)> = self.left_ports.iter().map(|&(u, j)| (u as usize, j as usize)).collect();
        ports.extend(other.left_ports.iter().map(|&(u, j)| (u as usize + self.n, j as usize)));
        Self::from_ports(self.n + other.n, self.d, ports)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn vertex_count(&self) -> usize {
        2 * self.n
    }

    pub fn edge_count(&self) -> usize {
        self.n * self.d
    }

    pub fn is_left(&self, x: usize) -> bool {
        x < self.n
    }

    /// Right endpoint and slot of the edge in slot `i` of left `v`.
    pub fn left_port(&self, v: usize, i: usize) -> (usize, usize) {
        let (u, j) = self.left_ports[v * self.d + i];
        (u as usize, j as usize)
    }

    /// Global id of the edge in slot `j` of right `u`.
    pub fn right_edge(&self, u: usize, j: usize) -> usize {
        self.right_edges[u * self.d + j] as usize
    }

    /// Global id of the edge at `slot` of vertex `x` (either side).
    #[inline]
    pub fn edge_at(&self, x: usize, slot: usize) -> usize {
        if x < self.n {
            x * self.d + slot
        } else {
            self.right_edges[(x - self.n) * self.d + slot] as usize
        }
    }

    /// Global ids of the edges at vertex `x`, in slot order.
    pub fn incident(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.d).map(move |s| self.edge_at(x, s))
    }

    /// `(left vertex id, right vertex id)` of an edge, both as global vertex ids.
    #[inline]
    pub fn endpoints(&self, e: usize) -> (usize, usize) {
        (e / self.d, self.n + self.left_ports[e].0 as usize)
    }

    /// Slot of edge `e` at its endpoint `x`.
    #[inline]
    pub fn slot_of(&self, e: usize, x: usize) -> usize {
        if x < self.n {
            debug_assert_eq!(e / self.d, x);
            e % self.d
        } else {
            debug_assert_eq!(self.left_ports[e].0 as usize + self.n, x);
            self.left_ports[e].1 as usize
        }
    }

    /// The endpoint of `e` other than `x`.
    #[inline]
    pub fn other_end(&self, e: usize, x: usize) -> usize {
        let (l, r) = self.endpoints(e);
        if x == l {
            r
        } else {
            l
        }
    }

    /// Connected components of the whole bipartite graph.
    pub fn components(&self) -> usize {
        count_components(2 * self.n, |x| self.incident(x).map(|e| self.other_end(e, x)).collect())
    }

    /// `bipartite n d` header, then per left vertex `d` pairs `u:j`.
    pub fn to_text(&self) -> String {
        let mut s = format!("bipartite {} {}\n", self.n, self.d);
        for v in 0..self.n {
            for i in 0..self.d {
                let (u, j) = self.left_port(v, i);
                if i > 0 {
                    s.push(' ');
                }
                let _ = write!(s, "{u}:{j}");
            }
            s.push('\n');
        }
        s
    }
}

fn count_components(count: usize, neighbors: impl Fn(usize) -> Vec<usize>) -> usize {
    let mut seen = vec![false; count];
    let mut comps = 0;
    for s in 0..count {
        if seen[s] {
            continue;
        }
        comps += 1;
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for y in neighbors(x) {
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
    }
    comps
}

/// Either kind of graph file or construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnyGraph {
    Regular(RegularGraph),
    Bipartite(BipartiteGraph),
}

impl AnyGraph {
    /// The bipartite graph a code is built on: the double cover of a base graph,
    /// or a directly supplied bipartite graph.
    pub fn to_bipartite(&self) -> BipartiteGraph {
        match self {
            AnyGraph::Regular(g) => BipartiteGraph::double_cover(g),
            AnyGraph::Bipartite(b) => b.clone(),
        }
    }

    pub fn to_text(&self) -> String {
        match self {
            AnyGraph::Regular(g) => g.to_text(),
            AnyGraph::Bipartite(b) => b.to_text(),
        }
    }
}

impl FromStr for AnyGraph {
    type Err = GraphError;

    /// Parses the text formats written by `to_text`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut lines = s
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| ParseError::new("empty graph file"))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let [kind, n, d] = fields[..] else {
            return Err(ParseError::new(format!("bad graph header {header:?}")).into());
        };
        let n: usize = n.parse().map_err(|_| ParseError::new("bad vertex count"))?;
        let d: usize = d.parse().map_err(|_| ParseError::new("bad degree"))?;
        let body: Vec<&str> = lines.collect();
        if body.len() != n {
            return Err(ParseError::new(format!("expected {n} adjacency lines, got {}", body.len())).into());
        }
        match kind {
            "regular" => {
                let lists = body
                    .iter()
                    .map(|l| {
                        l.split_whitespace()
                            .map(|t| {
                                t.parse::<usize>()
                                    .map_err(|_| ParseError::new(format!("bad neighbor {t:?}")))
                            })
                            .collect::<Result<Vec<_>, _>>()
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let g = RegularGraph::from_adjacency(lists)?;
                if g.d() != d {
                    return Err(GraphError::Invalid(format!(
                        "header degree {d} but lines have {}",
                        g.d()
                    )));
                }
                Ok(AnyGraph::Regular(g))
            }
            "bipartite" => {
                let mut ports = Vec::with_capacity(n * d);
                for l in body {
                    let toks: Vec<&str> = l.split_whitespace().collect();
                    if toks.len() != d {
                        return Err(ParseError::new(format!("expected {d} ports per line")).into());
                    }
                    for t in toks {
                        let (u, j) = t
                            .split_once(':')
                            .ok_or_else(|| ParseError::new(format!("bad port {t:?}")))?;
                        let u = u.parse().map_err(|_| ParseError::new(format!("bad port {t:?}")))?;
                        let j = j.parse().map_err(|_| ParseError::new(format!("bad port {t:?}")))?;
                        ports.push((u, j));
                    }
                }
                Ok(AnyGraph::Bipartite(BipartiteGraph::from_ports(n, d, ports)?))
            }
            other => Err(ParseError::new(format!("unknown graph kind {other:?}")).into()),
        }
    }
}

/// Recipe for a graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphSpec {
    Complete(usize),
    CompleteWithLoops(usize),
    Cycle(usize),
    RandomRegular { n: usize, d: usize },
    CompleteBipartite(usize),
    File(String),
}

impl FromStr for GraphSpec {
    type Err = ParseError;

    /// `complete:N`, `complete_with_loops:N`, `cycle:N`, `random_regular:N:D`,
    /// `complete_bipartite:N`, `file:PATH`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some(path) = s.strip_prefix("file:") {
            return Ok(GraphSpec::File(path.to_string()));
        }
        let parts: Vec<&str> = s.split(':').collect();
        let num = |i: usize| -> Result<usize, ParseError> {
            parts
                .get(i)
                .and_then(|p| p.parse().ok())
                .ok_or_else(|| ParseError::new(format!("bad or missing number in graph spec {s:?}")))
        };
        match parts[0] {
            "complete" => Ok(GraphSpec::Complete(num(1)?)),
            "complete_with_loops" => Ok(GraphSpec::CompleteWithLoops(num(1)?)),
            "cycle" => Ok(GraphSpec::Cycle(num(1)?)),
            "random_regular" => Ok(GraphSpec::RandomRegular { n: num(1)?, d: num(2)? }),
            "complete_bipartite" => Ok(GraphSpec::CompleteBipartite(num(1)?)),
            other => Err(ParseError::new(format!("unknown graph kind {other:?}"))),
        }
    }
}

impl fmt::Display for GraphSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphSpec::Complete(n) => write!(f, "complete:{n}"),
            GraphSpec::CompleteWithLoops(n) => write!(f, "complete_with_loops:{n}"),
            GraphSpec::Cycle(n) => write!(f, "cycle:{n}"),
            GraphSpec::RandomRegular { n, d } => write!(f, "random_regular:{n}:{d}"),
            GraphSpec::CompleteBipartite(n) => write!(f, "complete_bipartite:{n}"),
            GraphSpec::File(p) => write!(f, "file:{p}"),
        }
    }
}

/// Builds a graph. `seed` is only consulted by `RandomRegular`.
pub fn make_graph(spec: &GraphSpec, seed: u64) -> Result<AnyGraph, GraphError> {
    Ok(match *spec {
        GraphSpec::Complete(n) => AnyGraph::Regular(RegularGraph::complete(n)?),
        GraphSpec::CompleteWithLoops(n) => AnyGraph::Regular(RegularGraph::complete_with_loops(n)?),
        GraphSpec::Cycle(n) => AnyGraph::Regular(RegularGraph::cycle(n)?),
        GraphSpec::RandomRegular { n, d } => AnyGraph::Regular(RegularGraph::random_regular(n, d, seed)?),
        GraphSpec::CompleteBipartite(n) => AnyGraph::Bipartite(BipartiteGraph::complete_bipartite(n)),
        GraphSpec::File(ref path) => std::fs::read_to_string(path)
            .map_err(|e| GraphError::Invalid(format!("cannot read {path}: {e}")))?
            .parse()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn involution_holds(g: &BipartiteGraph) -> bool {
        (0..g.n()).all(|v| {
            (0..g.d()).all(|i| {
                let (u, j) = g.left_port(v, i);
                g.right_edge(u, j) == v * g.d() + i
            })
        })
    }

    #[test]
    fn double_cover_of_k4() {
        let k4 = RegularGraph::complete(4).unwrap();
        let b = BipartiteGraph::double_cover(&k4);
        assert_eq!((b.n(), b.d(), b.edge_count()), (4, 3, 12));
        assert!(involution_holds(&b));
        // K_{4,4} minus the perfect matching v_L – v_R.
        for v in 0..4 {
            let rights: HashSet<usize> = (0..3).map(|i| b.left_port(v, i).0).collect();
            assert!(!rights.contains(&v));
            assert_eq!(rights.len(), 3);
        }
    }

    #[test]
    fn double_cover_of_single_edge() {
        let g = RegularGraph::from_adjacency(vec![vec![1], vec![0]]).unwrap();
        let b = BipartiteGraph::double_cover(&g);
        assert_eq!(b.edge_count(), 2);
        assert_eq!(b.components(), 2);
    }

    #[test]
    fn double_cover_of_even_cycle_splits() {
        let b = BipartiteGraph::double_cover(&RegularGraph::cycle(6).unwrap());
        assert_eq!((b.n(), b.d()), (6, 2));
        // The base graph is bipartite, so its double cover is two disjoint copies.
        assert_eq!(b.components(), 2);
        let odd = BipartiteGraph::double_cover(&RegularGraph::cycle(5).unwrap());
        assert_eq!(odd.components(), 1);
    }

    #[test]
    fn complete_with_loops_covers_to_complete_bipartite() {
        let g = RegularGraph::complete_with_loops(3).unwrap();
        assert_eq!(g.d(), 3);
        let b = BipartiteGraph::double_cover(&g);
        for v in 0..3 {
            let rights: HashSet<usize> = (0..3).map(|i| b.left_port(v, i).0).collect();
            assert_eq!(rights.len(), 3);
        }
    }

    #[test]
    fn random_regular_is_simple_and_deterministic() {
        let g = RegularGraph::random_regular(64, 8, 7).unwrap();
        assert_eq!((g.n(), g.d()), (64, 8));
        assert!(!g.has_loops());
        assert_eq!(g, RegularGraph::random_regular(64, 8, 7).unwrap());
        assert!(involution_holds(&BipartiteGraph::double_cover(&g)));
        assert!(RegularGraph::random_regular(5, 3, 1).is_err());
    }

    #[test]
    fn endpoints_and_slots_agree() {
        let b = BipartiteGraph::double_cover(&RegularGraph::random_regular(20, 4, 3).unwrap());
        for x in 0..b.vertex_count() {
            for (s, e) in b.incident(x).enumerate() {
                assert_eq!(b.slot_of(e, x), s);
                let (l, r) = b.endpoints(e);
                assert!(x == l || x == r);
            }
        }
    }

    #[test]
    fn text_round_trip() {
        let g = RegularGraph::random_regular(10, 3, 2).unwrap();
        let parsed: AnyGraph = g.to_text().parse().unwrap();
        assert_eq!(parsed, AnyGraph::Regular(g.clone()));
        let b = BipartiteGraph::double_cover(&g);
        let parsed: AnyGraph = b.to_text().parse().unwrap();
        assert_eq!(parsed, AnyGraph::Bipartite(b));
    }

    #[test]
    fn malformed_files_are_rejected() {
        assert!("bipartite 2 1\n0:0\n0:0\n".parse::<AnyGraph>().is_err());
        assert!("regular 3 1\n1\n0\n0\n".parse::<AnyGraph>().is_err());
        assert!("regular 2 1\n1\n".parse::<AnyGraph>().is_err());
        assert!("triangle 3 2\n".parse::<AnyGraph>().is_err());
    }

    #[test]
    fn specs_parse() {
        assert_eq!("complete:4".parse::<GraphSpec>().unwrap(), GraphSpec::Complete(4));
        assert_eq!(
            "random_regular:64:8".parse::<GraphSpec>().unwrap(),
            GraphSpec::RandomRegular { n: 64, d: 8 }
        );
        let b = make_graph(&"complete_bipartite:3".parse().unwrap(), 0).unwrap();
        assert_eq!(b.to_bipartite().d(), 3);
        assert!("wheel:5".parse::<GraphSpec>().is_err());
    }
}
