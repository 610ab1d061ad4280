//! Graphs of groups: a finite connected graph with edge involution, abelian
//! vertex and edge groups, and injective finite-index edge maps.
//!
//! Edges come in pairs: edge `2k` is the listed edge and `2k + 1` its reverse.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use thiserror::Error;

use crate::abelian::{AbElement, AbHom, AbelianError, FgAbelianGroup, Index};

pub type VertexId = usize;
pub type EdgeId = usize;

pub fn reverse(e: EdgeId) -> EdgeId {
    e ^ 1
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GogError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid graph of groups: {0}")]
    Invalid(ValidationReport),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("edge {0} has range at the base vertex, anchor edge undefined")]
    AnchorAtBase(String),
    #[error("{0}")]
    Group(#[from] AbelianError),
    #[error("expected a graph of groups, found a ray document")]
    NotAGraph,
    #[error("{0}")]
    Ray(String),
}

/// One invariant violation found by validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NoVertices,
    Disconnected { unreachable: Vec<String> },
    NotInjective { edge: String },
    NotWellDefined { edge: String },
    BadMatrix { edge: String, msg: String },
    InfiniteIndex { edge: String },
    Singular { vertex: String, edge: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoVertices => write!(f, "no vertices"),
            Violation::Disconnected { unreachable } => {
                write!(f, "graph is disconnected: unreachable {}", unreachable.join(", "))
            }
            Violation::NotInjective { edge } => write!(f, "alpha_{edge} is not injective"),
            Violation::NotWellDefined { edge } => {
                write!(f, "alpha_{edge} is not well defined on the edge group torsion")
            }
            Violation::BadMatrix { edge, msg } => write!(f, "alpha_{edge}: {msg}"),
            Violation::InfiniteIndex { edge } => write!(f, "alpha_{edge} has infinite index"),
            Violation::Singular { vertex, edge } => write!(
                f,
                "nonsingularity fails at {vertex}: {edge} is the only edge with range {vertex} and alpha_{edge} is onto"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub name: String,
    pub range: VertexId,
    pub source: VertexId,
    pub alpha: AbHom,
    /// Canonical transversal of `G_range / alpha(G_e)`, identity first.
    pub sigma: Vec<AbElement>,
}

/// Unvalidated description of a graph of groups.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GogSpec {
    pub vertices: Vec<(String, FgAbelianGroup)>,
    /// name, range, source, edge group, alpha_e matrix, alpha_ebar matrix
    pub edges: Vec<EdgeSpec>,
    pub base: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeSpec {
    pub name: String,
    pub range: String,
    pub source: String,
    pub group: FgAbelianGroup,
    pub alpha: Vec<Vec<BigInt>>,
    pub alpha_bar: Vec<Vec<BigInt>>,
}

impl GogSpec {
    pub fn vertex(&mut self, name: &str, group: FgAbelianGroup) -> &mut Self {
        self.vertices.push((name.to_string(), group));
        self
    }

    pub fn edge(
        &mut self,
        name: &str,
        range: &str,
        source: &str,
        group: FgAbelianGroup,
        alpha: Vec<Vec<BigInt>>,
        alpha_bar: Vec<Vec<BigInt>>,
    ) -> &mut Self {
        self.edges.push(EdgeSpec {
            name: name.to_string(),
            range: range.to_string(),
            source: source.to_string(),
            group,
            alpha,
            alpha_bar,
        });
        self
    }

    /// Edge between `Z` vertices given by multipliers.
    pub fn z_edge(
        &mut self,
        name: &str,
        range: &str,
        source: &str,
        w: i64,
        wbar: i64,
    ) -> &mut Self {
        self.edge(
            name,
            range,
            source,
            FgAbelianGroup::integers(),
            vec![vec![BigInt::from(w)]],
            vec![vec![BigInt::from(wbar)]],
        )
    }

    /// Edge between trivial vertex groups.
    pub fn trivial_edge(&mut self, name: &str, range: &str, source: &str) -> &mut Self {
        self.edge(
            name,
            range,
            source,
            FgAbelianGroup::trivial(),
            vec![],
            vec![],
        )
    }

    pub fn base(&mut self, name: &str) -> &mut Self {
        self.base = Some(name.to_string());
        self
    }

    /// Validates and builds. Name errors are reported as `GogError`, invariant
    /// violations as `GogError::Invalid`.
    pub fn build(&self) -> Result<GraphOfGroups, GogError> {
        let mut vindex = BTreeMap::new();
        for (i, (name, _)) in self.vertices.iter().enumerate() {
            if vindex.insert(name.clone(), i).is_some() {
                return Err(GogError::Parse {
                    line: 0,
                    msg: format!("duplicate vertex `{name}`"),
                });
            }
        }
        let mut names = BTreeSet::new();
        for e in &self.edges {
            let bar = format!("~{}", e.name);
            if !names.insert(e.name.clone()) || !names.insert(bar) {
                return Err(GogError::Parse {
                    line: 0,
                    msg: format!("duplicate edge `{}`", e.name),
                });
            }
        }
        let lookup = |n: &str| {
            vindex
                .get(n)
                .copied()
                .ok_or_else(|| GogError::UnknownVertex(n.to_string()))
        };
        let mut report = ValidationReport::default();
        if self.vertices.is_empty() {
            report.violations.push(Violation::NoVertices);
            return Err(GogError::Invalid(report));
        }
        let base = match &self.base {
            Some(b) => lookup(b)?,
            None => 0,
        };
        let vgroups: Vec<FgAbelianGroup> = self.vertices.iter().map(|(_, g)| g.clone()).collect();
        let mut edges: Vec<Edge> = Vec::new();
        for e in &self.edges {
            let r = lookup(&e.range)?;
            let s = lookup(&e.source)?;
            for (name, rng, src, m) in [
                (e.name.clone(), r, s, &e.alpha),
                (format!("~{}", e.name), s, r, &e.alpha_bar),
            ] {
                let hom = AbHom::new(e.group.clone(), vgroups[rng].clone(), m.clone());
                match hom {
                    Ok(alpha) => {
                        let sigma = match alpha.transversal() {
                            Ok(t) => t,
                            Err(_) => {
                                report
                                    .violations
                                    .push(Violation::InfiniteIndex { edge: name.clone() });
                                vec![]
                            }
                        };
                        edges.push(Edge {
                            name,
                            range: rng,
                            source: src,
                            alpha,
                            sigma,
                        });
                    }
                    Err(err) => {
                        report.violations.push(match err {
                            AbelianError::NotInjective => Violation::NotInjective { edge: name },
                            AbelianError::NotWellDefined(_) => {
                                Violation::NotWellDefined { edge: name }
                            }
                            AbelianError::MatrixShape { .. } => {
                                return Err(GogError::Parse {
                                    line: 0,
                                    msg: format!("alpha_{name}: {err}"),
                                })
                            }
                            other => Violation::BadMatrix {
                                edge: name,
                                msg: other.to_string(),
                            },
                        });
                    }
                }
            }
        }
        if !report.is_valid() {
            return Err(GogError::Invalid(report));
        }
        // connectivity
        let n = vgroups.len();
        let mut seen = vec![false; n];
        seen[base] = true;
        let mut queue = VecDeque::from([base]);
        while let Some(x) = queue.pop_front() {
            for e in &edges {
                if e.range == x && !seen[e.source] {
                    seen[e.source] = true;
                    queue.push_back(e.source);
                }
            }
        }
        let unreachable: Vec<String> = (0..n)
            .filter(|&i| !seen[i])
            .map(|i| self.vertices[i].0.clone())
            .collect();
        if !unreachable.is_empty() {
            report
                .violations
                .push(Violation::Disconnected { unreachable });
        }
        // nonsingularity
        for x in 0..n {
            let into: Vec<&Edge> = edges.iter().filter(|e| e.range == x).collect();
            if into.len() == 1 && into[0].alpha.is_surjective() {
                report.violations.push(Violation::Singular {
                    vertex: self.vertices[x].0.clone(),
                    edge: into[0].name.clone(),
                });
            }
        }
        if !report.is_valid() {
            return Err(GogError::Invalid(report));
        }
        let names = self.vertices.iter().map(|(n, _)| n.clone()).collect();
        let mut g = GraphOfGroups {
            vertex_names: names,
            vertex_groups: vgroups,
            edges,
            base,
            tree: SpanningTree::default(),
        };
        g.tree = SpanningTree::bfs(&g, base);
        Ok(g)
    }

    /// Runs validation and returns the report, also for name-level errors that
    /// are not invariant violations.
    pub fn validate(&self) -> Result<ValidationReport, GogError> {
        match self.build() {
            Ok(_) => Ok(ValidationReport::default()),
            Err(GogError::Invalid(r)) => Ok(r),
            Err(e) => Err(e),
        }
    }
}

/// A validated graph of groups with its BFS spanning tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphOfGroups {
    vertex_names: Vec<String>,
    vertex_groups: Vec<FgAbelianGroup>,
    edges: Vec<Edge>,
    base: VertexId,
    tree: SpanningTree,
}

/// Maximal subtree from a BFS at the base vertex.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SpanningTree {
    pub base: VertexId,
    /// `toward[y]` is the tree edge with source `y` on the path to the base.
    pub toward: Vec<Option<EdgeId>>,
    /// Geometric tree edges, both orientations.
    pub edges: BTreeSet<EdgeId>,
}

impl SpanningTree {
    pub fn bfs(g: &GraphOfGroups, base: VertexId) -> Self {
        let n = g.num_vertices();
        let mut toward = vec![None; n];
        let mut seen = vec![false; n];
        seen[base] = true;
        let mut queue = VecDeque::from([base]);
        let mut edges = BTreeSet::new();
        while let Some(w) = queue.pop_front() {
            for f in g.edges_into(w) {
                let y = g.source(f);
                if !seen[y] {
                    seen[y] = true;
                    toward[y] = Some(f);
                    edges.insert(f);
                    edges.insert(reverse(f));
                    queue.push_back(y);
                }
            }
        }
        SpanningTree {
            base,
            toward,
            edges,
        }
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.edges.contains(&e)
    }

    /// `[v, x]`: edges from the base outward, range of the first is the base.
    pub fn from_base(&self, g: &GraphOfGroups, x: VertexId) -> Vec<EdgeId> {
        let mut out = Vec::new();
        let mut y = x;
        while let Some(f) = self.toward[y] {
            out.push(f);
            y = g.range(f);
        }
        out.reverse();
        out
    }

    /// `[x, y]`: the reduced tree path with range `x` and source `y`.
    pub fn path(&self, g: &GraphOfGroups, x: VertexId, y: VertexId) -> Vec<EdgeId> {
        let px = self.from_base(g, x);
        let py = self.from_base(g, y);
        let common = px.iter().zip(&py).take_while(|(a, b)| a == b).count();
        let mut out: Vec<EdgeId> = px[common..].iter().rev().map(|&f| reverse(f)).collect();
        out.extend_from_slice(&py[common..]);
        out
    }

    /// The sourcemost edge of `[v, r(e)]`.
    pub fn anchor_edge(&self, g: &GraphOfGroups, e: EdgeId) -> Result<EdgeId, GogError> {
        self.toward[g.range(e)].ok_or_else(|| GogError::AnchorAtBase(g.edge_name(e).to_string()))
    }
}

impl GraphOfGroups {
    pub fn num_vertices(&self) -> usize {
        self.vertex_names.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn base(&self) -> VertexId {
        self.base
    }

    pub fn tree(&self) -> &SpanningTree {
        &self.tree
    }

    /// A spanning tree rooted somewhere else.
    pub fn spanning_tree(&self, v: VertexId) -> SpanningTree {
        SpanningTree::bfs(self, v)
    }

    pub fn vertex_name(&self, x: VertexId) -> &str {
        &self.vertex_names[x]
    }

    pub fn vertex_group(&self, x: VertexId) -> &FgAbelianGroup {
        &self.vertex_groups[x]
    }

    pub fn vertex_id(&self, name: &str) -> Result<VertexId, GogError> {
        self.vertex_names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| GogError::UnknownVertex(name.to_string()))
    }

    pub fn edge_id(&self, name: &str) -> Result<EdgeId, GogError> {
        self.edges
            .iter()
            .position(|e| e.name == name)
            .ok_or_else(|| GogError::UnknownEdge(name.to_string()))
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e]
    }

    pub fn edge_name(&self, e: EdgeId) -> &str {
        &self.edges[e].name
    }

    pub fn range(&self, e: EdgeId) -> VertexId {
        self.edges[e].range
    }

    pub fn source(&self, e: EdgeId) -> VertexId {
        self.edges[e].source
    }

    pub fn alpha(&self, e: EdgeId) -> &AbHom {
        &self.edges[e].alpha
    }

    pub fn edge_group(&self, e: EdgeId) -> &FgAbelianGroup {
        self.edges[e].alpha.source()
    }

    pub fn sigma(&self, e: EdgeId) -> &[AbElement] {
        &self.edges[e].sigma
    }

    pub fn sigma_size(&self, e: EdgeId) -> usize {
        self.edges[e].sigma.len()
    }

    pub fn is_loop(&self, e: EdgeId) -> bool {
        self.range(e) == self.source(e)
    }

    /// Edges with range `x`, in id order.
    pub fn edges_into(&self, x: VertexId) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.edges.len()).filter(move |&e| self.edges[e].range == x)
    }

    pub fn betti_number(&self) -> usize {
        self.edges.len() / 2 + 1 - self.num_vertices()
    }

    /// Whether every vertex and edge group is trivial.
    pub fn is_trivial_groups(&self) -> bool {
        self.vertex_groups.iter().all(|g| g.is_trivial())
    }

    /// Whether every vertex and edge group is infinite cyclic.
    pub fn is_gbs(&self) -> bool {
        self.vertex_groups.iter().all(|g| g.is_infinite_cyclic())
            && self
                .edges
                .iter()
                .all(|e| e.alpha.source().is_infinite_cyclic())
    }

    /// The multiplier `omega_e` of a GBS edge.
    pub fn omega(&self, e: EdgeId) -> Option<&BigInt> {
        self.edges[e].alpha.multiplier()
    }

    pub fn is_surjective(&self, e: EdgeId) -> bool {
        self.edges[e].alpha.is_surjective()
    }

    /// True if `e` lies on some cycle without repeated vertices.
    pub fn on_cycle(&self, e: EdgeId) -> bool {
        if self.is_loop(e) {
            return true;
        }
        // not a bridge: source still reaches range without the pair {e, ~e}
        let (a, b) = (self.range(e), self.source(e));
        let mut seen = vec![false; self.num_vertices()];
        seen[b] = true;
        let mut queue = VecDeque::from([b]);
        while let Some(x) = queue.pop_front() {
            if x == a {
                return true;
            }
            for f in self.edges_into(x) {
                if f == e || f == reverse(e) {
                    continue;
                }
                let y = self.source(f);
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        false
    }

    /// Whether the whole graph is one cycle (a loop counts).
    pub fn is_minimal_cycle(&self) -> bool {
        (0..self.num_vertices()).all(|x| self.edges_into(x).count() == 2)
    }

    /// Edges of the cycle in a consistent orientation `e1 e2 ... en` with
    /// `s(e_i) = r(e_{i+1})`, starting at the lowest edge id.
    pub fn cycle_orientation(&self) -> Option<Vec<EdgeId>> {
        if !self.is_minimal_cycle() {
            return None;
        }
        let mut out = vec![0];
        loop {
            let last = *out.last().unwrap();
            let x = self.source(last);
            let next = self
                .edges_into(x)
                .find(|&f| f != reverse(last))
                .expect("cycle vertex has two incoming edges");
            if next == out[0] {
                return Some(out);
            }
            out.push(next);
        }
    }

    /// Spec that reproduces this graph.
    pub fn to_spec(&self) -> GogSpec {
        let mut spec = GogSpec::default();
        for (n, g) in self.vertex_names.iter().zip(&self.vertex_groups) {
            spec.vertex(n, g.clone());
        }
        for k in 0..self.edges.len() / 2 {
            let e = &self.edges[2 * k];
            let eb = &self.edges[2 * k + 1];
            spec.edge(
                &e.name,
                &self.vertex_names[e.range],
                &self.vertex_names[e.source],
                e.alpha.source().clone(),
                e.alpha.matrix().to_vec(),
                eb.alpha.matrix().to_vec(),
            );
        }
        spec.base(&self.vertex_names[self.base]);
        spec
    }

    /// `BS(m, n)`: one `Z` vertex with a loop, `alpha_e = n`, `alpha_ebar = m`.
    pub fn baumslag_solitar(m: i64, n: i64) -> Result<Self, GogError> {
        let mut s = GogSpec::default();
        s.vertex("x", FgAbelianGroup::integers())
            .z_edge("e", "x", "x", n, m)
            .base("x");
        s.build()
    }

    /// Edge of `Z` groups with indices `nx` at `x` and `ny` at `y`.
    pub fn z_edge_of_groups(nx: i64, ny: i64) -> Result<Self, GogError> {
        let mut s = GogSpec::default();
        s.vertex("x", FgAbelianGroup::integers())
            .vertex("y", FgAbelianGroup::integers())
            .z_edge("e", "x", "y", nx, ny)
            .base("x");
        s.build()
    }

    /// Graph of trivial groups on the given vertices and geometric edges.
    pub fn trivial(vertices: &[&str], edges: &[(&str, &str, &str)]) -> Result<Self, GogError> {
        let mut s = GogSpec::default();
        for v in vertices {
            s.vertex(v, FgAbelianGroup::trivial());
        }
        for (n, r, src) in edges {
            s.trivial_edge(n, r, src);
        }
        if let Some(v) = vertices.first() {
            s.base(v);
        }
        s.build()
    }

    /// Loop of groups with `G_e = Z/n` and `G_x = Z/n + Z/n`, `alpha_e(1) = (1,0)`,
    /// `alpha_ebar(1) = (0,1)`.
    pub fn hnn_torsion(n: u64) -> Result<Self, GogError> {
        let zn = FgAbelianGroup::cyclic(n)?;
        let gx = FgAbelianGroup::new(0, vec![n.into(), n.into()])?;
        let one = BigInt::one;
        let zero = || BigInt::from(0);
        let mut s = GogSpec::default();
        s.vertex("x", gx)
            .edge(
                "e",
                "x",
                "x",
                zn,
                vec![vec![one()], vec![zero()]],
                vec![vec![zero()], vec![one()]],
            )
            .base("x");
        s.build()
    }
}

/// Infinite ray of groups `G_0 > G_1 > ...` inside `Z`, with
/// `[G_{i-1} : G_i] = indices[i]` given as prefix plus repeating period.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RaySpec {
    pub prefix: Vec<u64>,
    pub period: Vec<u64>,
}

impl RaySpec {
    pub fn new(prefix: Vec<u64>, period: Vec<u64>) -> Result<Self, GogError> {
        if period.is_empty() {
            return Err(GogError::Ray("ray period must be nonempty".into()));
        }
        if prefix.iter().chain(&period).any(|&i| i == 0) {
            return Err(GogError::Ray("ray indices must be positive".into()));
        }
        let r = RaySpec { prefix, period };
        if r.index(1) < 2 {
            return Err(GogError::Ray(
                "nonsingularity fails at the root: first index must exceed 1".into(),
            ));
        }
        Ok(r)
    }

    /// `[G_{i-1} : G_i]` for `i >= 1`.
    pub fn index(&self, i: usize) -> u64 {
        let k = i - 1;
        if k < self.prefix.len() {
            self.prefix[k]
        } else {
            self.period[(k - self.prefix.len()) % self.period.len()]
        }
    }

    /// Whether infinitely many indices exceed 1.
    pub fn infinitely_many_proper(&self) -> bool {
        self.period.iter().any(|&i| i > 1)
    }

    /// `|x_0 G^n|` for the ray.
    pub fn level_size(&self, n: usize) -> BigInt {
        (1..=n).fold(BigInt::one(), |a, i| a * BigInt::from(self.index(i)))
    }

    /// Supernatural number `prod [G_{i-1}:G_i]` as `p^k` factors, `None` exponent for infinity.
    pub fn supernatural(&self) -> BTreeMap<u64, Option<u64>> {
        let mut out: BTreeMap<u64, Option<u64>> = BTreeMap::new();
        for &i in &self.prefix {
            for (p, k) in factor(i) {
                let e = out.entry(p).or_insert(Some(0));
                if let Some(x) = e {
                    *x += k;
                }
            }
        }
        for &i in &self.period {
            for (p, _) in factor(i) {
                out.insert(p, None);
            }
        }
        out
    }

    pub fn supernatural_string(&self) -> String {
        let s = self.supernatural();
        if s.is_empty() {
            return "1".into();
        }
        s.iter()
            .map(|(p, k)| match k {
                None => format!("{p}^inf"),
                Some(k) => format!("{p}^{k}"),
            })
            .collect::<Vec<_>>()
            .join(" * ")
    }
}

impl fmt::Display for RaySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let j = |v: &[u64]| {
            v.iter()
                .map(|i| i.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        };
        write!(f, "{} ; {}", j(&self.prefix), j(&self.period))
    }
}

fn factor(mut n: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        let mut k = 0;
        while n.is_multiple_of(p) {
            n /= p;
            k += 1;
        }
        if k > 0 {
            out.push((p, k));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// A parsed input document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Document {
    Graph(GogSpec),
    Ray(RaySpec),
}

impl Document {
    pub fn build(&self) -> Result<Built, GogError> {
        match self {
            Document::Graph(s) => Ok(Built::Graph(s.build()?)),
            Document::Ray(r) => Ok(Built::Ray(r.clone())),
        }
    }
}

/// A validated document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Built {
    Graph(GraphOfGroups),
    Ray(RaySpec),
}

/// Splits on commas outside brackets.
fn split_top(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in s.chars() {
        match c {
            '[' | '(' => {
                depth += 1;
                cur.push(c);
            }
            ']' | ')' => {
                depth -= 1;
                cur.push(c);
            }
            ',' if depth == 0 => out.push(std::mem::take(&mut cur)),
            _ => cur.push(c),
        }
    }
    out.push(cur);
    out.into_iter().map(|p| p.trim().to_string()).collect()
}

/// Parses `[[a, b], [c, d]]` (row-major) or `[]`.
pub fn parse_matrix(s: &str) -> Result<Vec<Vec<BigInt>>, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let inner = t
        .strip_prefix('[')
        .and_then(|x| x.strip_suffix(']'))
        .ok_or_else(|| format!("bad matrix `{s}`"))?;
    if inner.is_empty() {
        return Ok(vec![]);
    }
    let mut rows = Vec::new();
    for part in split_top(inner) {
        let row = part
            .strip_prefix('[')
            .and_then(|x| x.strip_suffix(']'))
            .ok_or_else(|| format!("bad matrix row `{part}`"))?;
        if row.is_empty() {
            rows.push(vec![]);
            continue;
        }
        let vals: Result<Vec<BigInt>, _> = row.split(',').map(|x| x.parse::<BigInt>()).collect();
        rows.push(vals.map_err(|_| format!("bad matrix row `{part}`"))?);
    }
    let w = rows[0].len();
    if rows.iter().any(|r| r.len() != w) {
        return Err(format!("ragged matrix `{s}`"));
    }
    Ok(rows)
}

fn is_ident(s: &str) -> bool {
    !s.is_empty()
        && !s.starts_with('~')
        && s.chars()
            .all(|c| c.is_alphanumeric() || c == '_' || c == '-' || c == '.' || c == '\'')
}

/// Parses a `.gog` document.
pub fn parse_document(text: &str) -> Result<Document, GogError> {
    #[derive(PartialEq)]
    enum Sec {
        None,
        Vertices,
        Edges,
        Base,
        Ray,
    }
    let err = |line: usize, msg: String| GogError::Parse { line, msg };
    let mut sec = Sec::None;
    let mut spec = GogSpec::default();
    let mut ray: Option<RaySpec> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let mut body = line;
        if line.starts_with('[') && !line.starts_with("[[") {
            let close = line
                .find(']')
                .ok_or_else(|| err(line_no, "unclosed section header".into()))?;
            let name = line[1..close].trim();
            sec = match name {
                "vertices" => Sec::Vertices,
                "edges" => Sec::Edges,
                "base" => Sec::Base,
                "ray" => Sec::Ray,
                other => return Err(err(line_no, format!("unknown section `{other}`"))),
            };
            body = line[close + 1..].trim();
            if body.is_empty() {
                continue;
            }
        }
        match sec {
            Sec::None => return Err(err(line_no, "content outside any section".into())),
            Sec::Vertices => {
                let (name, group) = body
                    .split_once('=')
                    .ok_or_else(|| err(line_no, "expected `vertex = group`".into()))?;
                let name = name.trim();
                if !is_ident(name) {
                    return Err(err(line_no, format!("bad vertex name `{name}`")));
                }
                let g = FgAbelianGroup::parse(group).map_err(|e| err(line_no, e.to_string()))?;
                if spec.vertices.iter().any(|(n, _)| n == name) {
                    return Err(err(line_no, format!("duplicate vertex `{name}`")));
                }
                spec.vertex(name, g);
            }
            Sec::Edges => {
                let (name, rest) = body.split_once(':').ok_or_else(|| {
                    err(
                        line_no,
                        "expected `edge: range, source, alpha, alpha_bar`".into(),
                    )
                })?;
                let name = name.trim();
                if !is_ident(name) {
                    return Err(err(line_no, format!("bad edge name `{name}`")));
                }
                if spec.edges.iter().any(|e| e.name == name) {
                    return Err(err(line_no, format!("duplicate edge `{name}`")));
                }
                let fields = split_top(rest);
                if fields.len() != 4 && fields.len() != 5 {
                    return Err(err(
                        line_no,
                        format!("edge `{name}` needs 4 or 5 fields, got {}", fields.len()),
                    ));
                }
                let a = parse_matrix(&fields[2]).map_err(|m| err(line_no, m))?;
                let ab = parse_matrix(&fields[3]).map_err(|m| err(line_no, m))?;
                let group = if fields.len() == 5 {
                    FgAbelianGroup::parse(&fields[4]).map_err(|e| err(line_no, e.to_string()))?
                } else {
                    FgAbelianGroup::free(a.first().map_or(0, |r| r.len()))
                };
                spec.edge(name, &fields[0], &fields[1], group, a, ab);
            }
            Sec::Base => {
                if spec.base.is_some() {
                    return Err(err(line_no, "base given twice".into()));
                }
                if !is_ident(body) {
                    return Err(err(line_no, format!("bad base `{body}`")));
                }
                spec.base(body);
            }
            Sec::Ray => {
                let (key, val) = body
                    .split_once('=')
                    .ok_or_else(|| err(line_no, "expected `indices = prefix ; period`".into()))?;
                if key.trim() != "indices" {
                    return Err(err(line_no, format!("unknown ray key `{}`", key.trim())));
                }
                let (pre, per) = val
                    .split_once(';')
                    .ok_or_else(|| err(line_no, "ray indices need `prefix ; period`".into()))?;
                let nums = |s: &str| -> Result<Vec<u64>, GogError> {
                    s.split(|c: char| c == ',' || c.is_whitespace())
                        .filter(|x| !x.is_empty())
                        .map(|x| {
                            x.parse::<u64>()
                                .map_err(|_| err(line_no, format!("bad index `{x}`")))
                        })
                        .collect()
                };
                let r = RaySpec::new(nums(pre)?, nums(per)?)
                    .map_err(|e| err(line_no, e.to_string()))?;
                ray = Some(r);
            }
        }
    }
    if let Some(r) = ray {
        if !spec.vertices.is_empty() || !spec.edges.is_empty() {
            return Err(err(0, "a ray document has no vertices or edges".into()));
        }
        return Ok(Document::Ray(r));
    }
    // names must resolve and shapes must match before validation
    for e in &spec.edges {
        for v in [&e.range, &e.source] {
            if !spec.vertices.iter().any(|(n, _)| n == v) {
                return Err(err(
                    0,
                    format!("edge `{}` uses unknown vertex `{v}`", e.name),
                ));
            }
        }
        for (m, tgt, nm) in [
            (&e.alpha, &e.range, e.name.clone()),
            (&e.alpha_bar, &e.source, format!("~{}", e.name)),
        ] {
            let tdim = spec
                .vertices
                .iter()
                .find(|(n, _)| n == tgt)
                .unwrap()
                .1
                .dim();
            let sdim = e.group.dim();
            let ok = if tdim == 0 {
                m.is_empty()
            } else {
                m.len() == tdim && m.iter().all(|r| r.len() == sdim)
            };
            if !ok {
                return Err(err(0, format!("alpha_{nm} must be {tdim}x{sdim}")));
            }
        }
    }
    if let Some(b) = &spec.base {
        if !spec.vertices.iter().any(|(n, _)| n == b) {
            return Err(err(0, format!("unknown base vertex `{b}`")));
        }
    }
    Ok(Document::Graph(spec))
}

fn fmt_matrix(m: &[Vec<BigInt>]) -> String {
    let rows: Vec<String> = m
        .iter()
        .map(|r| {
            format!(
                "[{}]",
                r.iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            )
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

impl fmt::Display for GogSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[vertices]")?;
        for (n, g) in &self.vertices {
            writeln!(f, "{n} = {g}")?;
        }
        writeln!(f, "[edges]")?;
        for e in &self.edges {
            writeln!(
                f,
                "{}: {}, {}, {}, {}, {}",
                e.name,
                e.range,
                e.source,
                fmt_matrix(&e.alpha),
                fmt_matrix(&e.alpha_bar),
                e.group
            )?;
        }
        if let Some(b) = &self.base {
            writeln!(f, "[base] {b}")?;
        }
        Ok(())
    }
}

/// Index of `alpha_e` as a machine integer, for finite-index edges.
pub fn edge_index(g: &GraphOfGroups, e: EdgeId) -> u64 {
    match g.alpha(e).index() {
        Index::Finite(n) => n.to_u64().unwrap_or(u64::MAX),
        Index::Infinite => u64::MAX,
    }
}

/// Absolute multiplier as `u64` (GBS edges only).
pub fn omega_abs(g: &GraphOfGroups, e: EdgeId) -> Option<u64> {
    g.omega(e).and_then(|w| w.abs().to_u64())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_abc() -> GraphOfGroups {
        let mut s = GogSpec::default();
        s.vertex("a", FgAbelianGroup::integers())
            .vertex("b", FgAbelianGroup::integers())
            .vertex("c", FgAbelianGroup::integers())
            .z_edge("f", "a", "b", 2, 2)
            .z_edge("g", "c", "b", 2, 3)
            .base("a");
        s.build().unwrap()
    }

    #[test]
    fn validate_examples() {
        assert!(GraphOfGroups::baumslag_solitar(2, 3).is_ok());
        assert!(GraphOfGroups::z_edge_of_groups(2, 3).is_ok());
        let mut s = GogSpec::default();
        s.vertex("x", FgAbelianGroup::integers())
            .vertex("y", FgAbelianGroup::integers())
            .z_edge("e", "x", "y", 1, 1);
        let r = s.validate().unwrap();
        assert_eq!(r.violations.len(), 2);
        assert!(r
            .violations
            .iter()
            .all(|v| matches!(v, Violation::Singular { .. })));
    }

    #[test]
    fn validate_detects_group_failures() {
        let mut s = GogSpec::default();
        s.vertex("x", FgAbelianGroup::integers())
            .z_edge("e", "x", "x", 0, 2);
        assert!(matches!(
            s.validate().unwrap().violations[0],
            Violation::NotInjective { .. }
        ));

        let mut s = GogSpec::default();
        s.vertex("x", FgAbelianGroup::free(2)).edge(
            "e",
            "x",
            "x",
            FgAbelianGroup::integers(),
            vec![vec![1.into()], vec![0.into()]],
            vec![vec![0.into()], vec![1.into()]],
        );
        assert!(matches!(
            s.validate().unwrap().violations[0],
            Violation::InfiniteIndex { .. }
        ));

        let mut s = GogSpec::default();
        s.vertex("x", FgAbelianGroup::integers())
            .vertex("y", FgAbelianGroup::integers())
            .z_edge("e", "x", "x", 2, 3);
        assert!(matches!(
            s.validate().unwrap().violations[0],
            Violation::Disconnected { .. }
        ));
    }

    #[test]
    fn spanning_tree_examples() {
        let bs = GraphOfGroups::baumslag_solitar(2, 3).unwrap();
        assert!(bs.tree().edges.is_empty());
        let ed = GraphOfGroups::z_edge_of_groups(2, 3).unwrap();
        assert_eq!(ed.tree().edges.len(), 2);
        let theta = GraphOfGroups::trivial(
            &["a", "b"],
            &[("e", "a", "b"), ("f", "a", "b"), ("g", "a", "b")],
        )
        .unwrap();
        assert_eq!(theta.tree().edges.len(), 2);
        assert_eq!(theta.betti_number(), 2);
        assert_eq!(SpanningTree::bfs(&theta, 0), SpanningTree::bfs(&theta, 0));
    }

    #[test]
    fn tree_path_examples() {
        let g = path_abc();
        let t = g.tree();
        assert!(t.path(&g, 1, 1).is_empty());
        let f = g.edge_id("f").unwrap();
        let gg = g.edge_id("g").unwrap();
        // [a,c]: range a, source c
        assert_eq!(t.path(&g, 0, 2), vec![f, gg ^ 1]);
        assert_eq!(t.path(&g, 2, 0), vec![gg, f ^ 1]);
        for x in 0..3 {
            for y in 0..3 {
                let p = t.path(&g, x, y);
                let q: Vec<EdgeId> = t.path(&g, y, x).iter().rev().map(|&e| reverse(e)).collect();
                assert_eq!(p, q);
                if let Some(&first) = p.first() {
                    assert_eq!(g.range(first), x);
                    assert_eq!(g.source(*p.last().unwrap()), y);
                }
            }
        }
    }

    #[test]
    fn anchor_edge_examples() {
        let ed = GraphOfGroups::z_edge_of_groups(2, 3).unwrap();
        let e = ed.edge_id("e").unwrap();
        // ~e has range y, and the anchor of ~e is its own reverse
        assert_eq!(ed.tree().anchor_edge(&ed, reverse(e)).unwrap(), e);
        assert!(ed.tree().anchor_edge(&ed, e).is_err());
        let g = path_abc();
        let gg = g.edge_id("g").unwrap();
        assert_eq!(g.tree().anchor_edge(&g, gg).unwrap(), gg ^ 1);
        for e in 0..g.num_edges() {
            if let Ok(a) = g.tree().anchor_edge(&g, e) {
                assert_ne!(a, e);
            }
        }
    }

    #[test]
    fn betti_examples() {
        assert_eq!(path_abc().betti_number(), 0);
        assert_eq!(
            GraphOfGroups::baumslag_solitar(2, 3)
                .unwrap()
                .betti_number(),
            1
        );
        let f8 = GraphOfGroups::trivial(&["v"], &[("a", "v", "v"), ("b", "v", "v")]).unwrap();
        assert_eq!(f8.betti_number(), 2);
    }

    #[test]
    fn cycles() {
        let tri = GraphOfGroups::trivial(
            &["a", "b", "c"],
            &[("e", "a", "b"), ("f", "b", "c"), ("g", "c", "a")],
        );
        // a cycle of trivial groups is nonsingular since every vertex has two incoming edges
        let tri = tri.unwrap();
        assert!(tri.is_minimal_cycle());
        let c = tri.cycle_orientation().unwrap();
        assert_eq!(c.len(), 3);
        for i in 0..3 {
            assert_eq!(tri.source(c[i]), tri.range(c[(i + 1) % 3]));
        }
        assert!((0..tri.num_edges()).all(|e| tri.on_cycle(e)));
        assert!(!path_abc().on_cycle(0));
        assert!(!path_abc().is_minimal_cycle());
    }

    #[test]
    fn parse_roundtrip() {
        let text = "# BS(2,3)\n[vertices]\nx = Z\n[edges]\ne: x, x, [[3]], [[2]]\n[base] x\n";
        let Document::Graph(spec) = parse_document(text).unwrap() else {
            panic!()
        };
        let g = spec.build().unwrap();
        assert_eq!(g, GraphOfGroups::baumslag_solitar(2, 3).unwrap());
        let again = parse_document(&spec.to_string()).unwrap();
        assert_eq!(again, Document::Graph(spec));
    }

    #[test]
    fn parse_torsion_and_trivial() {
        let text =
            "[vertices]\nx = Z/2 + Z/2\n[edges]\ne: x, x, [[1],[0]], [[0],[1]], Z/2\n[base]\nx\n";
        let Document::Graph(spec) = parse_document(text).unwrap() else {
            panic!()
        };
        assert_eq!(
            spec.build().unwrap(),
            GraphOfGroups::hnn_torsion(2).unwrap()
        );
        let text = "[vertices]\nv = 1\n[edges]\na: v, v, [], []\nb: v, v, [], []\n";
        let Document::Graph(spec) = parse_document(text).unwrap() else {
            panic!()
        };
        assert_eq!(spec.build().unwrap().betti_number(), 2);
    }

    #[test]
    fn parse_errors() {
        for bad in [
            "[vertices]\nx = Q\n",
            "[vertices]\nx = Z\nx = Z\n",
            "[vertices]\nx = Z\n[edges]\ne: x, y, [[1]], [[2]]\n",
            "[vertices]\nx = Z\n[edges]\ne: x, x, [[1, 2]], [[2]]\n",
            "[vertices]\nx = Z\n[edges]\ne: x, x, [[1]]\n",
            "x = Z\n",
            "[nonsense]\n",
            "[ray]\nindices = 1 ; 2\n",
            "[ray]\nindices = 2 ;\n",
        ] {
            assert!(
                matches!(parse_document(bad), Err(GogError::Parse { .. })),
                "{bad}"
            );
        }
    }

    #[test]
    fn ray_spec() {
        let Document::Ray(r) = parse_document("[ray]\nindices = ; 2\n").unwrap() else {
            panic!()
        };
        assert_eq!(r.index(1), 2);
        assert_eq!(r.index(7), 2);
        assert!(r.infinitely_many_proper());
        assert_eq!(r.supernatural_string(), "2^inf");
        let r = RaySpec::new(vec![2, 3, 3], vec![1]).unwrap();
        assert!(!r.infinitely_many_proper());
        assert_eq!(r.supernatural_string(), "2^1 * 3^2");
        assert_eq!(r.level_size(5), BigInt::from(18));
        let r = RaySpec::new(vec![3], vec![2, 6]).unwrap();
        assert_eq!(r.supernatural_string(), "2^inf * 3^inf");
    }
}
