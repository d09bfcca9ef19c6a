//! Confusability graphs, strong products and exact independence numbers,
//! giving lower bounds on zero-error capacity.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::arith::Rational;
use crate::error::{Error, Result};

/// Default vertex cap for the exact solver.
pub const DEFAULT_VERTEX_CAP: usize = 200;

#[derive(Clone, PartialEq, Eq, Hash)]
struct BitSet(Vec<u64>);

impl BitSet {
    fn new(n: usize) -> Self {
        BitSet(vec![0; n.div_ceil(64)])
    }

    fn full(n: usize) -> Self {
        let mut s = BitSet::new(n);
        for v in 0..n {
            s.insert(v);
        }
        s
    }

    fn insert(&mut self, v: usize) {
        self.0[v / 64] |= 1 << (v % 64);
    }

    fn remove(&mut self, v: usize) {
        self.0[v / 64] &= !(1 << (v % 64));
    }

    fn contains(&self, v: usize) -> bool {
        self.0[v / 64] >> (v % 64) & 1 == 1
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn and(&self, other: &BitSet) -> BitSet {
        BitSet(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn and_not(&self, other: &BitSet) -> BitSet {
        BitSet(self.0.iter().zip(&other.0).map(|(a, b)| a & !b).collect())
    }

    fn first(&self) -> Option<usize> {
        self.0
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + b)
            })
        })
    }
}

/// Simple undirected graph on `0..n`.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<BitSet>,
}

impl Graph {
    pub fn edgeless(n: usize) -> Self {
        Graph {
            n,
            adj: vec![BitSet::new(n); n],
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Graph::edgeless(n);
        for u in 0..n {
            for v in u + 1..n {
                g.connect(u, v);
            }
        }
        g
    }

    /// `C_n` for `n >= 3`.
    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::Invalid("a cycle needs at least 3 vertices".into()));
        }
        let mut g = Graph::edgeless(n);
        for u in 0..n {
            g.connect(u, (u + 1) % n);
        }
        Ok(g)
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::edgeless(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        if u >= self.n || v >= self.n {
            return Err(Error::Invalid(format!(
                "edge ({u}, {v}) outside 0..{}",
                self.n
            )));
        }
        if u == v {
            return Err(Error::Invalid(format!("self-loop at {u}")));
        }
        self.connect(u, v);
        Ok(())
    }

    fn connect(&mut self, u: usize, v: usize) {
        self.adj[u].insert(v);
        self.adj[v].insert(u);
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(BitSet::count).sum::<usize>() / 2
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(v)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            out.extend(self.adj[u].iter().filter(|&v| v > u).map(|v| (u, v)));
        }
        out
    }

    pub fn is_independent(&self, set: &[usize]) -> bool {
        set.iter()
            .enumerate()
            .all(|(i, &u)| set[i + 1..].iter().all(|&v| u != v && !self.has_edge(u, v)))
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("vertices", &self.n)
            .field("edges", &self.edges())
            .finish()
    }
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl Serialize for Graph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GraphJson {
            vertices: self.n,
            edges: self.edges(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let g = GraphJson::deserialize(d)?;
        Graph::from_edges(g.vertices, &g.edges).map_err(serde::de::Error::custom)
    }
}

/// Text format: vertex count on the first line, then one `u v` edge per
/// line with 0-based vertices. Blank lines and `#` comments are skipped.
impl FromStr for Graph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (_, first) = lines
            .next()
            .ok_or_else(|| Error::Invalid("empty graph file".into()))?;
        let n: usize = first
            .parse()
            .map_err(|_| Error::Invalid(format!("line 1: bad vertex count `{first}`")))?;
        let mut g = Graph::edgeless(n);
        for (lineno, line) in lines {
            let parts: Vec<&str> = line.split_whitespace().collect();
            let (u, v) = match parts.as_slice() {
                [u, v] => (u.parse::<usize>(), v.parse::<usize>()),
                _ => return Err(Error::Invalid(format!("line {lineno}: expected `u v`"))),
            };
            match (u, v) {
                (Ok(u), Ok(v)) => g
                    .add_edge(u, v)
                    .map_err(|e| Error::Invalid(format!("line {lineno}: {e}")))?,
                _ => return Err(Error::Invalid(format!("line {lineno}: bad vertex"))),
            }
        }
        Ok(g)
    }
}

/// Row-stochastic matrix of a discrete memoryless channel.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<Rational>>", into = "Vec<Vec<Rational>>")]
pub struct ChannelMatrix {
    rows: Vec<Vec<Rational>>,
}

impl ChannelMatrix {
    pub fn new(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let width = rows.first().map(Vec::len).unwrap_or(0);
        if rows.is_empty() || width == 0 {
            return Err(Error::Invalid("channel needs at least one input and output".into()));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(Error::Invalid(format!("row {i} has {} entries, expected {width}", row.len())));
            }
            if row.iter().any(Rational::is_negative) {
                return Err(Error::Invalid(format!("row {i} has a negative entry")));
            }
            let sum = row.iter().fold(Rational::zero(), |acc, p| acc + p);
            if sum != Rational::one() {
                return Err(Error::Invalid(format!("row {i} sums to {sum}")));
            }
        }
        Ok(ChannelMatrix { rows })
    }

    /// Input `i` is received as `i` or `i + 1 (mod 5)` with probability 1/2 each.
    pub fn pentagon() -> Self {
        let half = Rational::new(1, 2).unwrap_or_else(|_| unreachable!());
        let rows = (0..5)
            .map(|i| {
                (0..5)
                    .map(|j| {
                        if j == i || j == (i + 1) % 5 {
                            half.clone()
                        } else {
                            Rational::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        ChannelMatrix { rows }
    }

    pub fn inputs(&self) -> usize {
        self.rows.len()
    }

    pub fn outputs(&self) -> usize {
        self.rows[0].len()
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }
}

impl TryFrom<Vec<Vec<Rational>>> for ChannelMatrix {
    type Error = Error;
    fn try_from(rows: Vec<Vec<Rational>>) -> Result<Self> {
        ChannelMatrix::new(rows)
    }
}

impl From<ChannelMatrix> for Vec<Vec<Rational>> {
    fn from(w: ChannelMatrix) -> Self {
        w.rows
    }
}

/// Inputs joined when some output is reachable from both.
pub fn confusability_graph(w: &ChannelMatrix) -> Graph {
    let n = w.inputs();
    let mut g = Graph::edgeless(n);
    for u in 0..n {
        for v in u + 1..n {
            let shared = (0..w.outputs())
                .any(|j| w.rows[u][j].is_positive() && w.rows[v][j].is_positive());
            if shared {
                g.connect(u, v);
            }
        }
    }
    g
}

/// `G ⊠ H`; vertex `(u, v)` is numbered `u * |H| + v`.
pub fn strong_product(g: &Graph, h: &Graph) -> Graph {
    let (ng, nh) = (g.n, h.n);
    let mut p = Graph::edgeless(ng * nh);
    let close = |gr: &Graph, a: usize, b: usize| a == b || gr.has_edge(a, b);
    for u1 in 0..ng {
        for u2 in 0..nh {
            let a = u1 * nh + u2;
            for v1 in 0..ng {
                if !close(g, u1, v1) {
                    continue;
                }
                for v2 in 0..nh {
                    let b = v1 * nh + v2;
                    if b > a && close(h, u2, v2) {
                        p.connect(a, b);
                    }
                }
            }
        }
    }
    p
}

/// `G^{⊠k}`, refusing to build anything above `cap` vertices.
pub fn strong_power(g: &Graph, k: u32, cap: usize) -> Result<Graph> {
    if k == 0 {
        return Err(Error::Precondition("power must be >= 1".into()));
    }
    let size = g.n.checked_pow(k).unwrap_or(usize::MAX);
    if size > cap {
        return Err(Error::TooLarge { vertices: size, cap });
    }
    let mut p = g.clone();
    for _ in 1..k {
        p = strong_product(&p, g);
    }
    Ok(p)
}

struct Solver<'a> {
    g: &'a Graph,
    /// Vertices by degree descending, ties by index.
    order: Vec<usize>,
    best: Vec<usize>,
}

impl Solver<'_> {
    /// Number of cliques in a greedy clique cover of `cand`; bounds the
    /// independence number of the induced subgraph.
    fn cover_bound(&self, cand: &BitSet) -> usize {
        let mut left = cand.clone();
        let mut cliques = 0;
        for &u in &self.order {
            if !left.contains(u) {
                continue;
            }
            cliques += 1;
            left.remove(u);
            let mut grow = left.and(&self.g.adj[u]);
            while let Some(w) = grow.first() {
                left.remove(w);
                grow = grow.and(&self.g.adj[w]);
                grow.remove(w);
            }
        }
        cliques
    }

    fn expand(&mut self, cand: BitSet, current: &mut Vec<usize>) {
        if cand.is_empty() {
            if current.len() > self.best.len() {
                self.best = current.clone();
            }
            return;
        }
        if current.len() + cand.count() <= self.best.len()
            || current.len() + self.cover_bound(&cand) <= self.best.len()
        {
            return;
        }
        let v = self
            .order
            .iter()
            .copied()
            .find(|&u| cand.contains(u))
            .unwrap_or_else(|| unreachable!());
        let mut without = cand.clone();
        without.remove(v);
        let with = without.and_not(&self.g.adj[v]);
        current.push(v);
        self.expand(with, current);
        current.pop();
        // a vertex isolated within cand is always worth taking
        if !cand.and(&self.g.adj[v]).is_empty() {
            self.expand(without, current);
        }
    }
}

/// A maximum independent set, found by branch and bound.
pub fn maximum_independent_set(g: &Graph, cap: usize) -> Result<Vec<usize>> {
    if g.n > cap {
        return Err(Error::TooLarge { vertices: g.n, cap });
    }
    let mut order: Vec<usize> = (0..g.n).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    let mut solver = Solver {
        g,
        order,
        best: Vec::new(),
    };
    solver.expand(BitSet::full(g.n), &mut Vec::new());
    let mut best = solver.best;
    best.sort_unstable();
    Ok(best)
}

/// `α(G)` with the default vertex cap.
pub fn independence_number(g: &Graph) -> Result<usize> {
    independence_number_capped(g, DEFAULT_VERTEX_CAP)
}

pub fn independence_number_capped(g: &Graph, cap: usize) -> Result<usize> {
    Ok(maximum_independent_set(g, cap)?.len())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerEntry {
    pub n: u32,
    pub alpha: u64,
    pub witness: Vec<usize>,
    /// `α^{1/n}` to six decimals, display only.
    pub root_display: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitCheck {
    pub l: u32,
    pub k: u32,
    pub alpha_sum: u64,
    pub alpha_product: u64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CapacityReport {
    pub powers: Vec<PowerEntry>,
    pub splits: Vec<SplitCheck>,
    pub supermultiplicative: bool,
}

/// Exact `α(G^{⊠n})` for `n = 1..=max_power` and the checks
/// `α_{l+k} >= α_l α_k`.
pub fn capacity_lower_bounds(g: &Graph, max_power: u32, cap: usize) -> Result<CapacityReport> {
    if max_power == 0 {
        return Err(Error::Precondition("max_power must be >= 1".into()));
    }
    // fail before doing any work if the largest power is over the cap
    let largest = g.n.checked_pow(max_power).unwrap_or(usize::MAX);
    if largest > cap {
        return Err(Error::TooLarge { vertices: largest, cap });
    }
    let mut powers = Vec::new();
    for n in 1..=max_power {
        let p = strong_power(g, n, cap)?;
        let witness = maximum_independent_set(&p, cap)?;
        let alpha = witness.len() as u64;
        powers.push(PowerEntry {
            n,
            alpha,
            witness,
            root_display: format!("{:.6}", (alpha as f64).powf(1.0 / n as f64)),
        });
    }
    let mut splits = Vec::new();
    for l in 1..=max_power {
        for k in l..=max_power - l {
            let a = |i: u32| powers[(i - 1) as usize].alpha;
            let (sum, prod) = (a(l + k), a(l) * a(k));
            splits.push(SplitCheck {
                l,
                k,
                alpha_sum: sum,
                alpha_product: prod,
                holds: sum >= prod,
            });
        }
    }
    let supermultiplicative = splits.iter().all(|s| s.holds);
    Ok(CapacityReport {
        powers,
        splits,
        supermultiplicative,
    })
}
