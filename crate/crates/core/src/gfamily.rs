//! Finite models of G-families: the directed graph `E_G`, symbolic products
//! of spanning monomials `s_mu u_g s_nu*`, and truncations of the regular
//! representation on the orbit of an eventually periodic boundary point.

use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write as _};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::abelian::AbElement;
use crate::gog::{reverse, EdgeId, GraphOfGroups, VertexId};
use crate::par::{par_map, Exec};
use crate::words::{concat_unchecked, parse_word, GWord, WordError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GFamilyError {
    #[error("invalid boundary point: {0}")]
    BadPoint(String),
    #[error("result depth {depth} exceeds the depth guard {guard}")]
    DepthGuard { depth: usize, guard: usize },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("{0}")]
    Word(#[from] WordError),
}

type Step = (AbElement, EdgeId);

fn one(g: &GraphOfGroups, e: EdgeId) -> AbElement {
    g.sigma(e)[0].clone()
}

/// Whether `b` may follow `a` in a reduced path.
fn composable(g: &GraphOfGroups, a: &Step, b: &Step) -> bool {
    g.source(a.1) == g.range(b.1) && !(b.1 == reverse(a.1) && b.0.is_zero())
}

/// An eventually periodic reduced infinite G-path `prefix (cycle)^inf` at `vertex`.
/// Canonical: the cycle is primitive and the prefix is as short as possible.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BPoint {
    pub vertex: VertexId,
    pub prefix: Vec<Step>,
    pub cycle: Vec<Step>,
}

impl BPoint {
    pub fn new(
        g: &GraphOfGroups,
        vertex: VertexId,
        prefix: Vec<Step>,
        cycle: Vec<Step>,
    ) -> Result<Self, GFamilyError> {
        if cycle.is_empty() {
            return Err(GFamilyError::BadPoint("empty repeating block".into()));
        }
        let all: Vec<&Step> = prefix.iter().chain(&cycle).collect();
        if g.range(all[0].1) != vertex {
            return Err(GFamilyError::BadPoint(
                "first edge does not start at the vertex".into(),
            ));
        }
        for (h, f) in &all {
            if !g.sigma(*f).contains(h) {
                return Err(GFamilyError::BadPoint(format!(
                    "label {h} is not a transversal element for {}",
                    g.edge_name(*f)
                )));
            }
        }
        let mut pairs: Vec<(&Step, &Step)> = all.windows(2).map(|w| (w[0], w[1])).collect();
        pairs.push((cycle.last().unwrap(), &cycle[0]));
        if pairs.iter().any(|(a, b)| !composable(g, a, b)) {
            return Err(GFamilyError::BadPoint(
                "path is not composable and reduced".into(),
            ));
        }
        Ok(Self::canonical(vertex, prefix, cycle))
    }

    fn canonical(vertex: VertexId, mut prefix: Vec<Step>, mut cycle: Vec<Step>) -> Self {
        let n = cycle.len();
        if let Some(d) = (1..n).find(|&d| n.is_multiple_of(d) && (0..n).all(|i| cycle[i] == cycle[i % d])) {
            cycle.truncate(d);
        }
        while prefix.last().is_some_and(|s| s == cycle.last().unwrap()) {
            prefix.pop();
            cycle.rotate_right(1);
        }
        BPoint {
            vertex,
            prefix,
            cycle,
        }
    }

    /// The `i`-th step of the infinite path.
    pub fn step(&self, i: usize) -> &Step {
        if i < self.prefix.len() {
            &self.prefix[i]
        } else {
            &self.cycle[(i - self.prefix.len()) % self.cycle.len()]
        }
    }

    /// First `n` steps as a G-path.
    pub fn truncate(&self, n: usize) -> GWord {
        GWord {
            vertex: self.vertex,
            steps: (0..n).map(|i| self.step(i).clone()).collect(),
            tail: None,
        }
    }

    pub fn in_cylinder(&self, mu: &GWord) -> bool {
        mu.vertex == self.vertex && mu.steps.iter().enumerate().all(|(i, s)| self.step(i) == s)
    }

    /// The point with the first `k` steps removed.
    fn drop_front(&self, g: &GraphOfGroups, k: usize) -> Self {
        let vertex = if k == 0 {
            self.vertex
        } else {
            g.source(self.step(k - 1).1)
        };
        let (prefix, cycle) = if k <= self.prefix.len() {
            (self.prefix[k..].to_vec(), self.cycle.clone())
        } else {
            let r = (k - self.prefix.len()) % self.cycle.len();
            let mut c = self.cycle.clone();
            c.rotate_left(r);
            (vec![], c)
        };
        Self::canonical(vertex, prefix, cycle)
    }

    pub fn show(&self, g: &GraphOfGroups) -> String {
        let part = |steps: &[Step]| {
            let mut out = Vec::new();
            for (h, f) in steps {
                if h.dim() > 0 {
                    out.push(h.to_string());
                }
                out.push(g.edge_name(*f).to_string());
            }
            out.join(" ")
        };
        let p = part(&self.prefix);
        let c = part(&self.cycle);
        if p.is_empty() {
            format!("[{c}]^inf")
        } else {
            format!("{p} [{c}]^inf")
        }
    }
}

/// Parses `prefix | cycle`, for example `(2) e | (1) e`. An empty prefix
/// starts at `default`.
pub fn parse_point(g: &GraphOfGroups, s: &str, default: VertexId) -> Result<BPoint, GFamilyError> {
    let (p, c) = s
        .split_once('|')
        .ok_or_else(|| GFamilyError::BadPoint(format!("expected `prefix | cycle`, got `{s}`")))?;
    let path = |text: &str, at: VertexId| -> Result<Vec<Step>, GFamilyError> {
        if text.trim().is_empty() {
            return Ok(vec![]);
        }
        let w = parse_word(g, text, at)?;
        if w.tail.is_some() || w.vertex != at {
            return Err(GFamilyError::BadPoint(format!(
                "`{}` is not a reduced path at {}",
                text.trim(),
                g.vertex_name(at)
            )));
        }
        Ok(w.steps)
    };
    let pre_word = if p.trim().is_empty() {
        None
    } else {
        Some(parse_word(g, p, default)?)
    };
    let vertex = pre_word.as_ref().map_or(default, |w| w.vertex);
    let prefix = match pre_word {
        Some(w) if w.tail.is_some() => {
            return Err(GFamilyError::BadPoint(format!(
                "`{}` is not a reduced path",
                p.trim()
            )));
        }
        Some(w) => w.steps,
        None => vec![],
    };
    let at = prefix.last().map_or(vertex, |(_, f)| g.source(*f));
    let cycle = path(c, at)?;
    BPoint::new(g, vertex, prefix, cycle)
}

/// A default point at the base: follow the lowest admissible edge until an
/// edge repeats.
pub fn default_point(g: &GraphOfGroups) -> BPoint {
    let mut steps: Vec<Step> = Vec::new();
    let mut seen: HashMap<EdgeId, usize> = HashMap::new();
    let mut at = g.base();
    loop {
        let prev = steps.last().map(|(_, f)| *f);
        let f = g
            .edges_into(at)
            .find(|&f| Some(reverse(f)) != prev || g.sigma_size(f) > 1)
            .expect("nonsingular vertices have an admissible edge");
        let h = if Some(reverse(f)) == prev {
            g.sigma(f)[1].clone()
        } else {
            one(g, f)
        };
        if let Some(&i) = seen.get(&f) {
            if steps[i].0 == h {
                let cycle = steps.split_off(i);
                return BPoint::canonical(g.base(), steps, cycle);
            }
        }
        seen.insert(f, steps.len());
        steps.push((h, f));
        at = g.source(f);
    }
}

/// `S_e p`, or `None` for zero.
pub fn apply_s(g: &GraphOfGroups, e: EdgeId, p: &BPoint) -> Option<BPoint> {
    if p.vertex != g.source(e) {
        return None;
    }
    let first = p.step(0);
    if first.1 == reverse(e) && first.0.is_zero() {
        return None;
    }
    let mut prefix = vec![(one(g, e), e)];
    prefix.extend(p.prefix.iter().cloned());
    Some(BPoint::canonical(g.range(e), prefix, p.cycle.clone()))
}

/// `S_e* p`, or `None` for zero.
pub fn apply_s_star(g: &GraphOfGroups, e: EdgeId, p: &BPoint) -> Option<BPoint> {
    let first = p.step(0);
    if p.vertex != g.range(e) || first.1 != e || !first.0.is_zero() {
        return None;
    }
    Some(p.drop_front(g, 1))
}

/// Bound on carry steps through the repeating block before giving up.
const CARRY_LIMIT: usize = 4096;

/// `U_{x,h} p`: `Ok(None)` for zero, `Err(())` if the carry never settles.
#[allow(clippy::result_unit_err)]
pub fn apply_u(
    g: &GraphOfGroups,
    x: VertexId,
    h: &AbElement,
    p: &BPoint,
) -> Result<Option<BPoint>, ()> {
    if p.vertex != x {
        return Ok(None);
    }
    let mut carry = h.clone();
    let mut out: Vec<Step> = Vec::new();
    let mut states: HashMap<(usize, AbElement), usize> = HashMap::new();
    let plen = p.prefix.len();
    for i in 0..plen + CARRY_LIMIT {
        if carry.is_zero() {
            let rest = p.drop_front(g, i);
            out.extend(rest.prefix);
            return Ok(Some(BPoint::canonical(x, out, rest.cycle)));
        }
        if i >= plen {
            let k = (i - plen) % p.cycle.len();
            if let Some(&j) = states.get(&(k, carry.clone())) {
                let cycle = out.split_off(j);
                return Ok(Some(BPoint::canonical(x, out, cycle)));
            }
            states.insert((k, carry.clone()), out.len());
        }
        let (lab, f) = p.step(i);
        let at = g.range(*f);
        let sum = g.vertex_group(at).add(&carry, lab);
        let (t, k) = g.alpha(*f).decompose_unchecked(&sum).map_err(|_| ())?;
        out.push((t, *f));
        carry = g.alpha(reverse(*f)).apply_unchecked(&k);
    }
    Err(())
}

/// A generator of the G-family.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gen {
    S(EdgeId),
    SStar(EdgeId),
    U(VertexId, AbElement),
}

impl Gen {
    pub fn adjoint(&self, g: &GraphOfGroups) -> Gen {
        match self {
            Gen::S(e) => Gen::SStar(*e),
            Gen::SStar(e) => Gen::S(*e),
            Gen::U(x, h) => Gen::U(*x, g.vertex_group(*x).neg(h)),
        }
    }

    pub fn name(&self, g: &GraphOfGroups) -> String {
        match self {
            Gen::S(e) => format!("S[{}]", g.edge_name(*e)),
            Gen::SStar(e) => format!("S*[{}]", g.edge_name(*e)),
            Gen::U(x, h) => format!("U[{},{}]", g.vertex_name(*x), h),
        }
    }

    /// Image of a point: `Ok(None)` is zero, `Err` is unrepresentable.
    fn apply(&self, g: &GraphOfGroups, p: &BPoint) -> Result<Option<BPoint>, ()> {
        match self {
            Gen::S(e) => Ok(apply_s(g, *e, p)),
            Gen::SStar(e) => Ok(apply_s_star(g, *e, p)),
            Gen::U(x, h) => apply_u(g, *x, h, p),
        }
    }
}

/// Column-sparse exact matrix; a `None` column is undefined (its image leaves the basis).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseOp {
    pub dim: usize,
    pub cols: Vec<Option<Vec<(usize, BigRational)>>>,
}

impl SparseOp {
    pub fn identity(dim: usize) -> Self {
        SparseOp {
            dim,
            cols: (0..dim)
                .map(|j| Some(vec![(j, BigRational::one())]))
                .collect(),
        }
    }

    pub fn zero(dim: usize) -> Self {
        SparseOp {
            dim,
            cols: vec![Some(vec![]); dim],
        }
    }

    /// `self * other`.
    pub fn mul(&self, other: &SparseOp) -> SparseOp {
        let cols = other
            .cols
            .iter()
            .map(|c| {
                let c = c.as_ref()?;
                let mut acc: BTreeMap<usize, BigRational> = BTreeMap::new();
                for (i, v) in c {
                    for (r, w) in self.cols[*i].as_ref()? {
                        *acc.entry(*r).or_insert_with(BigRational::zero) += v * w;
                    }
                }
                Some(acc.into_iter().filter(|(_, v)| !v.is_zero()).collect())
            })
            .collect();
        SparseOp {
            dim: self.dim,
            cols,
        }
    }

    fn combine(&self, other: &SparseOp, sign: i32) -> SparseOp {
        let cols = self
            .cols
            .iter()
            .zip(&other.cols)
            .map(|(a, b)| {
                let (a, b) = (a.as_ref()?, b.as_ref()?);
                let mut acc: BTreeMap<usize, BigRational> = a.iter().cloned().collect();
                for (r, w) in b {
                    let e = acc.entry(*r).or_insert_with(BigRational::zero);
                    if sign > 0 {
                        *e += w;
                    } else {
                        *e -= w;
                    }
                }
                Some(acc.into_iter().filter(|(_, v)| !v.is_zero()).collect())
            })
            .collect();
        SparseOp {
            dim: self.dim,
            cols,
        }
    }

    pub fn add(&self, other: &SparseOp) -> SparseOp {
        self.combine(other, 1)
    }

    pub fn sub(&self, other: &SparseOp) -> SparseOp {
        self.combine(other, -1)
    }

    pub fn defined(&self) -> impl Iterator<Item = bool> + '_ {
        self.cols.iter().map(|c| c.is_some())
    }

    /// Coordinate triplets `row col value`, then one `# undefined col` line per undefined column.
    pub fn triplets(&self) -> String {
        let mut s = String::new();
        let nnz: usize = self.cols.iter().flatten().map(|c| c.len()).sum();
        let _ = writeln!(s, "% {} {} {}", self.dim, self.dim, nnz);
        for (j, c) in self.cols.iter().enumerate() {
            if let Some(c) = c {
                for (i, v) in c {
                    let _ = writeln!(s, "{i} {j} {v}");
                }
            }
        }
        for (j, c) in self.cols.iter().enumerate() {
            if c.is_none() {
                let _ = writeln!(s, "# undefined col {j}");
            }
        }
        s
    }
}

/// Largest absolute entry of `a - b` over columns where both are defined, with the count of such columns.
fn defect(a: &SparseOp, b: &SparseOp) -> (BigRational, Vec<bool>) {
    let d = a.sub(b);
    let mut worst = BigRational::zero();
    for c in d.cols.iter().flatten() {
        for (_, v) in c {
            if v.abs() > worst {
                worst = v.abs();
            }
        }
    }
    (worst, d.defined().collect())
}

/// A truncation of the regular representation on `l^2` of the orbit of `xi`.
#[derive(Debug, Clone)]
pub struct TruncatedRep<'a> {
    pub g: &'a GraphOfGroups,
    pub xi: BPoint,
    pub depth: usize,
    pub basis: Vec<BPoint>,
    pub layer: Vec<usize>,
    index: HashMap<BPoint, usize>,
    pub gens: Vec<Gen>,
    ops: BTreeMap<Gen, SparseOp>,
}

/// Group elements whose `U` operators enter the relations.
fn relation_elements(g: &GraphOfGroups) -> Vec<(VertexId, AbElement)> {
    let mut out: Vec<(VertexId, AbElement)> = Vec::new();
    for x in 0..g.num_vertices() {
        let grp = g.vertex_group(x);
        out.push((x, grp.identity()));
        if let Some(all) = grp.elements().filter(|a| a.len() <= 64) {
            out.extend(all.into_iter().map(|h| (x, h)));
        }
        for s in grp.generators() {
            out.push((x, grp.neg(&s)));
            out.push((x, s));
        }
        for f in g.edges_into(x) {
            for h in g.sigma(f) {
                out.push((x, h.clone()));
                out.push((x, grp.neg(h)));
            }
        }
    }
    for e in 0..g.num_edges() {
        for k in edge_sample(g, e) {
            out.push((g.range(e), g.alpha(e).apply_unchecked(&k)));
            out.push((g.source(e), g.alpha(reverse(e)).apply_unchecked(&k)));
        }
    }
    let mut seen = std::collections::HashSet::new();
    out.retain(|p| seen.insert(p.clone()));
    out
}

/// Elements of `G_e` used for (G2): all of a finite group, else generators with inverses.
fn edge_sample(g: &GraphOfGroups, e: EdgeId) -> Vec<AbElement> {
    let grp = g.edge_group(e);
    if let Some(all) = grp.elements() {
        return all;
    }
    let mut out = vec![grp.identity()];
    for s in grp.generators() {
        out.push(grp.neg(&s));
        out.push(s);
    }
    out
}

impl<'a> TruncatedRep<'a> {
    /// Orbit points within `depth` generator steps of `xi`, in BFS order.
    pub fn build(
        g: &'a GraphOfGroups,
        xi: BPoint,
        depth: usize,
        exec: Exec,
    ) -> Result<Self, GFamilyError> {
        if depth < 2 {
            return Err(GFamilyError::Precondition(
                "truncation depth must be at least 2".into(),
            ));
        }
        let mut gens: Vec<Gen> = Vec::new();
        for e in 0..g.num_edges() {
            gens.push(Gen::S(e));
            gens.push(Gen::SStar(e));
        }
        for (x, h) in relation_elements(g) {
            if !h.is_zero() {
                gens.push(Gen::U(x, h));
            }
        }
        let mut basis = vec![xi.clone()];
        let mut layer = vec![0];
        let mut index: HashMap<BPoint, usize> = HashMap::from([(xi.clone(), 0)]);
        let mut frontier = vec![0usize];
        for d in 1..=depth {
            let images: Vec<Vec<BPoint>> = par_map(exec, &frontier, |&i| {
                gens.iter()
                    .filter_map(|s| s.apply(g, &basis[i]).ok().flatten())
                    .collect()
            });
            let mut next = Vec::new();
            for p in images.into_iter().flatten() {
                if !index.contains_key(&p) {
                    index.insert(p.clone(), basis.len());
                    next.push(basis.len());
                    basis.push(p);
                    layer.push(d);
                }
            }
            frontier = next;
        }
        let mut rep = TruncatedRep {
            g,
            xi,
            depth,
            basis,
            layer,
            index,
            gens: gens.clone(),
            ops: BTreeMap::new(),
        };
        let mats = par_map(exec, &gens, |s| rep.assemble(s));
        for (s, m) in gens.into_iter().zip(mats) {
            rep.ops.insert(s, m);
        }
        Ok(rep)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn index_of(&self, p: &BPoint) -> Option<usize> {
        self.index.get(p).copied()
    }

    fn assemble(&self, s: &Gen) -> SparseOp {
        let cols = self
            .basis
            .iter()
            .map(|p| match s.apply(self.g, p) {
                Ok(None) => Some(vec![]),
                Ok(Some(q)) => self.index.get(&q).map(|&i| vec![(i, BigRational::one())]),
                Err(()) => None,
            })
            .collect();
        SparseOp {
            dim: self.dim(),
            cols,
        }
    }

    /// Matrix of a generator, assembled on demand.
    pub fn op(&self, s: &Gen) -> SparseOp {
        match self.ops.get(s) {
            Some(m) => m.clone(),
            None => self.assemble(s),
        }
    }

    fn u(&self, x: VertexId, h: &AbElement) -> SparseOp {
        self.op(&Gen::U(x, h.clone()))
    }

    /// `S_mu = U_{g1} S_{e1} ... U_{gn} S_{en}`; the vertex projection for the empty path.
    pub fn s_path(&self, mu: &GWord) -> SparseOp {
        let g = self.g;
        let mut m = self.u(mu.vertex, &g.vertex_group(mu.vertex).identity());
        for (h, f) in &mu.steps {
            m = m.mul(&self.u(g.range(*f), h)).mul(&self.op(&Gen::S(*f)));
        }
        m
    }

    /// `S_mu*`.
    pub fn s_path_star(&self, mu: &GWord) -> SparseOp {
        let g = self.g;
        let mut m = self.u(mu.vertex, &g.vertex_group(mu.vertex).identity());
        for (h, f) in &mu.steps {
            let x = g.range(*f);
            m = self
                .op(&Gen::SStar(*f))
                .mul(&self.u(x, &g.vertex_group(x).neg(h)))
                .mul(&m);
        }
        m
    }

    /// Matrix of a spanning monomial.
    pub fn monomial(&self, m: &Monomial) -> SparseOp {
        let x = m.mu.source(self.g);
        let mut out = self
            .s_path(&m.mu)
            .mul(&self.u(x, &m.g))
            .mul(&self.s_path_star(&m.nu));
        for c in out.cols.iter_mut().flatten() {
            for (_, v) in c.iter_mut() {
                *v *= &m.scalar;
            }
        }
        out
    }
}

/// Outcome of one relation family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationRow {
    pub name: String,
    pub instances: usize,
    pub checked_columns: usize,
    pub boundary_columns: usize,
    pub max_defect: BigRational,
}

impl RelationRow {
    pub fn holds(&self) -> bool {
        self.max_defect.is_zero()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationReport {
    pub basis_dim: usize,
    pub interior_dim: usize,
    pub rows: Vec<RelationRow>,
}

impl RelationReport {
    pub fn all_hold(&self) -> bool {
        self.rows.iter().all(|r| r.holds())
    }

    pub fn row(&self, name: &str) -> Option<&RelationRow> {
        self.rows.iter().find(|r| r.name == name)
    }
}

/// One relation instance: both sides as matrices.
struct Instance {
    family: &'static str,
    lhs: SparseOp,
    rhs: SparseOp,
}

fn relation_instances(rep: &TruncatedRep<'_>, exec: Exec) -> Vec<Instance> {
    let g = rep.g;
    let unit = |x: VertexId| rep.u(x, &g.vertex_group(x).identity());
    let dim = rep.dim();
    let mut specs: Vec<(&'static str, usize, usize)> = Vec::new();
    for x in 0..g.num_vertices() {
        for y in 0..g.num_vertices() {
            if x != y {
                specs.push(("G1", x, y));
            }
        }
    }
    for e in 0..g.num_edges() {
        for k in 0..edge_sample(g, e).len() {
            specs.push(("G2", e, k));
        }
        specs.push(("G3", e, 0));
        specs.push(("G4", e, 0));
    }
    for (k, _) in rep.gens.iter().enumerate() {
        specs.push(("partial isometry", k, 0));
        specs.push(("adjoint", k, 0));
    }
    let eg = build_eg(g);
    for k in 0..eg.edges.len() {
        specs.push(("CK1", k, 0));
    }
    for k in 0..eg.vertices.len() {
        specs.push(("CK2", k, 0));
        specs.push(("cylinder projection", k, 0));
    }
    par_map(exec, &specs, |&(family, a, b)| match family {
        "G1" => Instance {
            family,
            lhs: unit(a).mul(&unit(b)),
            rhs: SparseOp::zero(dim),
        },
        "G2" => {
            let e = a;
            let k = &edge_sample(g, e)[b];
            let left = rep
                .u(g.range(e), &g.alpha(e).apply_unchecked(k))
                .mul(&rep.op(&Gen::S(e)));
            let right = rep
                .op(&Gen::S(e))
                .mul(&rep.u(g.source(e), &g.alpha(reverse(e)).apply_unchecked(k)));
            Instance {
                family,
                lhs: left,
                rhs: right,
            }
        }
        "G3" => {
            let e = a;
            let se = rep.op(&Gen::S(e));
            let sse = rep.op(&Gen::SStar(e));
            let sb = rep.op(&Gen::S(reverse(e)));
            let ssb = rep.op(&Gen::SStar(reverse(e)));
            Instance {
                family,
                lhs: unit(g.source(e)),
                rhs: sse.mul(&se).add(&sb.mul(&ssb)),
            }
        }
        "G4" => {
            let e = a;
            let x = g.source(e);
            let grp = g.vertex_group(x);
            let lhs = rep.op(&Gen::SStar(e)).mul(&rep.op(&Gen::S(e)));
            let mut rhs = SparseOp::zero(dim);
            for f in g.edges_into(x) {
                for h in g.sigma(f) {
                    if f == reverse(e) && h.is_zero() {
                        continue;
                    }
                    let t = rep
                        .u(x, h)
                        .mul(&rep.op(&Gen::S(f)))
                        .mul(&rep.op(&Gen::SStar(f)))
                        .mul(&rep.u(x, &grp.neg(h)));
                    rhs = rhs.add(&t);
                }
            }
            Instance { family, lhs, rhs }
        }
        "partial isometry" => {
            let s = &rep.gens[a];
            let m = rep.op(s);
            let ms = rep.op(&s.adjoint(g));
            Instance {
                family,
                lhs: m.mul(&ms).mul(&m),
                rhs: m,
            }
        }
        "adjoint" => {
            let s = &rep.gens[a];
            let m = rep.op(s);
            let ms = rep.op(&s.adjoint(g));
            Instance {
                family,
                lhs: transpose_where_defined(&m, &ms),
                rhs: ms,
            }
        }
        "CK1" => {
            let mu = &eg.edges[a];
            let se = &eg.vertices[eg.source[a]];
            let t = rep.s_path(mu).mul(&rep.s_path_star(se));
            let ts = rep.s_path(se).mul(&rep.s_path_star(mu));
            Instance {
                family,
                lhs: ts.mul(&t),
                rhs: rep.s_path(se).mul(&rep.s_path_star(se)),
            }
        }
        "CK2" => {
            let nu = &eg.vertices[a];
            let mut lhs = SparseOp::zero(dim);
            for (k, mu) in eg.edges.iter().enumerate() {
                if eg.range[k] != a {
                    continue;
                }
                let se = &eg.vertices[eg.source[k]];
                let t = rep.s_path(mu).mul(&rep.s_path_star(se));
                let ts = rep.s_path(se).mul(&rep.s_path_star(mu));
                lhs = lhs.add(&t.mul(&ts));
            }
            Instance {
                family,
                lhs,
                rhs: rep.s_path(nu).mul(&rep.s_path_star(nu)),
            }
        }
        _ => {
            let nu = &eg.vertices[a];
            let diag = SparseOp {
                dim,
                cols: rep
                    .basis
                    .iter()
                    .enumerate()
                    .map(|(j, p)| {
                        Some(if p.in_cylinder(nu) {
                            vec![(j, BigRational::one())]
                        } else {
                            vec![]
                        })
                    })
                    .collect(),
            };
            Instance {
                family,
                lhs: rep.s_path(nu).mul(&rep.s_path_star(nu)),
                rhs: diag,
            }
        }
    })
}

/// The transpose of `m`, restricted to the columns where `shape` is defined
/// and to rows whose column of `m` is defined.
fn transpose_where_defined(m: &SparseOp, shape: &SparseOp) -> SparseOp {
    let mut rows: Vec<Vec<(usize, BigRational)>> = vec![vec![]; m.dim];
    for (j, c) in m.cols.iter().enumerate() {
        if let Some(c) = c {
            for (i, v) in c {
                rows[*i].push((j, v.clone()));
            }
        }
    }
    let cols = shape
        .cols
        .iter()
        .enumerate()
        .map(|(i, c)| {
            c.as_ref()?;
            // every row index that could map into i must be known
            let row = &rows[i];
            let complete = shape.cols[i]
                .as_ref()
                .unwrap()
                .iter()
                .all(|(j, _)| m.cols[*j].is_some());
            complete.then(|| row.clone())
        })
        .collect();
    SparseOp { dim: m.dim, cols }
}

/// Checks (G1)-(G4), (CK1), (CK2), partial isometries, adjoints and the
/// cylinder projections on the interior of the truncation.
pub fn verify_relations(rep: &TruncatedRep<'_>, exec: Exec) -> RelationReport {
    let insts = relation_instances(rep, exec);
    let dim = rep.dim();
    let results: Vec<(BigRational, Vec<bool>)> = par_map(exec, &insts, |i| defect(&i.lhs, &i.rhs));
    let mut interior = vec![true; dim];
    let mut rows: Vec<RelationRow> = Vec::new();
    for (inst, (d, def)) in insts.iter().zip(results) {
        let checked = def.iter().filter(|&&b| b).count();
        for (a, b) in interior.iter_mut().zip(&def) {
            *a &= *b;
        }
        match rows.iter_mut().find(|r| r.name == inst.family) {
            Some(r) => {
                r.instances += 1;
                r.checked_columns += checked;
                r.boundary_columns += dim - checked;
                if d > r.max_defect {
                    r.max_defect = d;
                }
            }
            None => rows.push(RelationRow {
                name: inst.family.to_string(),
                instances: 1,
                checked_columns: checked,
                boundary_columns: dim - checked,
                max_defect: d,
            }),
        }
    }
    RelationReport {
        basis_dim: dim,
        interior_dim: interior.iter().filter(|&&b| b).count(),
        rows,
    }
}

/// The directed graph with vertices `G^1` and edges `G^2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedGraphEG {
    pub vertices: Vec<GWord>,
    pub edges: Vec<GWord>,
    pub range: Vec<usize>,
    pub source: Vec<usize>,
}

impl DirectedGraphEG {
    /// Every vertex receives an edge.
    pub fn has_no_sources(&self) -> bool {
        (0..self.vertices.len()).all(|v| self.range.contains(&v))
    }

    pub fn is_row_finite(&self) -> bool {
        true
    }

    pub fn to_dot(&self, g: &GraphOfGroups) -> String {
        let mut s = String::from("digraph eg {\n");
        for v in &self.vertices {
            let _ = writeln!(s, "  \"{}\";", v.show(g));
        }
        for (k, mu) in self.edges.iter().enumerate() {
            let _ = writeln!(
                s,
                "  \"{}\" -> \"{}\" [label=\"{}\"];",
                self.vertices[self.source[k]].show(g),
                self.vertices[self.range[k]].show(g),
                mu.show(g)
            );
        }
        s.push_str("}\n");
        s
    }
}

/// All one-step G-paths `h f`.
fn g1(g: &GraphOfGroups) -> Vec<GWord> {
    let mut out = Vec::new();
    for f in 0..g.num_edges() {
        for h in g.sigma(f) {
            out.push(GWord::identity(g.range(f)).child(h.clone(), f));
        }
    }
    out
}

/// One-step extensions `hf` of a G-path ending at `x` (after `last`).
fn extensions(g: &GraphOfGroups, x: VertexId, last: Option<EdgeId>) -> Vec<Step> {
    let mut out = Vec::new();
    for f in g.edges_into(x) {
        for h in g.sigma(f) {
            if Some(reverse(f)) == last && h.is_zero() {
                continue;
            }
            out.push((h.clone(), f));
        }
    }
    out
}

pub fn build_eg(g: &GraphOfGroups) -> DirectedGraphEG {
    let vertices = g1(g);
    let index: HashMap<GWord, usize> = vertices
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, v)| (v, i))
        .collect();
    let mut edges = Vec::new();
    let mut range = Vec::new();
    let mut source = Vec::new();
    for (i, v) in vertices.iter().enumerate() {
        let (_, e) = &v.steps[0];
        for (h, f) in extensions(g, g.source(*e), Some(*e)) {
            edges.push(v.child(h.clone(), f));
            range.push(i);
            source.push(index[&GWord::identity(g.range(f)).child(h, f)]);
        }
    }
    DirectedGraphEG {
        vertices,
        edges,
        range,
        source,
    }
}

/// `scalar * s_mu u_{s(mu), g} s_nu*`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Monomial {
    pub mu: GWord,
    pub g: AbElement,
    pub nu: GWord,
    pub scalar: BigRational,
}

impl Monomial {
    pub fn new(g: &GraphOfGroups, mu: GWord, h: AbElement, nu: GWord) -> Self {
        debug_assert_eq!(mu.source(g), nu.source(g));
        Monomial {
            mu,
            g: h,
            nu,
            scalar: BigRational::one(),
        }
    }

    /// `s_nu s_nu*`.
    pub fn projection(g: &GraphOfGroups, nu: &GWord) -> Self {
        let x = nu.source(g);
        Self::new(g, nu.clone(), g.vertex_group(x).identity(), nu.clone())
    }

    pub fn adjoint(&self, g: &GraphOfGroups) -> Self {
        let x = self.mu.source(g);
        Monomial {
            mu: self.nu.clone(),
            g: g.vertex_group(x).neg(&self.g),
            nu: self.mu.clone(),
            scalar: self.scalar.clone(),
        }
    }

    pub fn show(&self, g: &GraphOfGroups) -> String {
        let coef = if self.scalar.is_one() {
            String::new()
        } else {
            format!("{} ", self.scalar)
        };
        format!(
            "{coef}s[{}] u{} s*[{}]",
            self.mu.show(g),
            self.g,
            self.nu.show(g)
        )
    }
}

/// `h . path = path' h'` as a G-path and trailing element.
fn push_through(g: &GraphOfGroups, h: &AbElement, path: &GWord) -> (GWord, AbElement) {
    let w = concat_unchecked(g, &GWord::element(path.vertex, h.clone()), path);
    let x = path.source(g);
    let tail = w
        .tail
        .clone()
        .unwrap_or_else(|| g.vertex_group(x).identity());
    (w.as_path(), tail)
}

/// Concatenation of G-paths, `None` when the junction is `e 1 ~e` (product zero).
fn join(g: &GraphOfGroups, a: &GWord, b: &GWord) -> Option<GWord> {
    if let (Some(e), Some(first)) = (a.last_edge(), b.steps.first()) {
        if !composable(g, &(one(g, e), e), first) {
            return None;
        }
    }
    let mut steps = a.steps.clone();
    steps.extend(b.steps.iter().cloned());
    Some(GWord {
        vertex: a.vertex,
        steps,
        tail: None,
    })
}

fn guard(m: Monomial, n: usize) -> Result<Monomial, GFamilyError> {
    let depth = m.mu.len().max(m.nu.len());
    if depth > n {
        Err(GFamilyError::DepthGuard { depth, guard: n })
    } else {
        Ok(m)
    }
}

/// `s_mu1 u_g1 s_{hf} s_{hf}* u_g2 s_nu2*` summed over the given steps.
fn expand_middle(
    g: &GraphOfGroups,
    a: &Monomial,
    b: &Monomial,
    steps: Vec<Step>,
    n: usize,
) -> Result<Vec<Monomial>, GFamilyError> {
    let mut out = Vec::new();
    for (h, f) in steps {
        let x = g.range(f);
        let grp = g.vertex_group(x);
        let hf = GWord::identity(x).child(h, f);
        let (left, k1) = push_through(g, &a.g, &hf);
        let (right, k2) = push_through(g, &grp.neg(&b.g), &hf);
        let (Some(mu), Some(nu)) = (join(g, &a.mu, &left), join(g, &b.nu, &right)) else {
            continue;
        };
        let y = g.source(f);
        let m = Monomial {
            mu,
            g: g.vertex_group(y).sub(&k1, &k2),
            nu,
            scalar: &a.scalar * &b.scalar,
        };
        out.push(guard(m, n)?);
    }
    Ok(out)
}

/// The product `a b` expanded in the spanning set.
pub fn monomial_product(
    g: &GraphOfGroups,
    a: &Monomial,
    b: &Monomial,
    n: usize,
) -> Result<Vec<Monomial>, GFamilyError> {
    let (nu1, mu2) = (&a.nu, &b.mu);
    if nu1.vertex != mu2.vertex {
        return Ok(vec![]);
    }
    let scalar = &a.scalar * &b.scalar;
    if nu1.is_prefix_of(mu2) && nu1.len() < mu2.len() {
        let rest = GWord {
            vertex: nu1.source(g),
            steps: mu2.steps[nu1.len()..].to_vec(),
            tail: None,
        };
        let (moved, k) = push_through(g, &a.g, &rest);
        let Some(mu) = join(g, &a.mu, &moved) else {
            return Ok(vec![]);
        };
        let y = rest.source(g);
        let m = Monomial {
            mu,
            g: g.vertex_group(y).add(&k, &b.g),
            nu: b.nu.clone(),
            scalar,
        };
        return Ok(vec![guard(m, n)?]);
    }
    if mu2.is_prefix_of(nu1) && mu2.len() < nu1.len() {
        let rest = GWord {
            vertex: mu2.source(g),
            steps: nu1.steps[mu2.len()..].to_vec(),
            tail: None,
        };
        let x = mu2.source(g);
        let (moved, k) = push_through(g, &g.vertex_group(x).neg(&b.g), &rest);
        let Some(nu) = join(g, &b.nu, &moved) else {
            return Ok(vec![]);
        };
        let y = rest.source(g);
        let m = Monomial {
            mu: a.mu.clone(),
            g: g.vertex_group(y).sub(&a.g, &k),
            nu,
            scalar,
        };
        return Ok(vec![guard(m, n)?]);
    }
    if nu1 != mu2 {
        return Ok(vec![]);
    }
    match nu1.last_edge() {
        None => {
            let x = nu1.vertex;
            let m = Monomial {
                mu: a.mu.clone(),
                g: g.vertex_group(x).add(&a.g, &b.g),
                nu: b.nu.clone(),
                scalar,
            };
            Ok(vec![guard(m, n)?])
        }
        Some(e) => expand_middle(g, a, b, extensions(g, g.source(e), Some(e)), n),
    }
}

/// Linear combination of monomials keyed by `(mu, g, nu)`.
pub type Combination = BTreeMap<(GWord, AbElement, GWord), BigRational>;

/// Rewrites every monomial so that `|nu| = depth`, using
/// `s_nu* = s_e* s_e s_nu*` and (G3), (G4) for the middle projection.
pub fn normalize(
    g: &GraphOfGroups,
    terms: &[Monomial],
    depth: usize,
) -> Result<Combination, GFamilyError> {
    let mut out = Combination::new();
    let mut work: Vec<Monomial> = terms.to_vec();
    while let Some(m) = work.pop() {
        if m.nu.len() > depth {
            return Err(GFamilyError::DepthGuard {
                depth: m.nu.len(),
                guard: depth,
            });
        }
        if m.nu.len() == depth {
            let key = (m.mu, m.g, m.nu);
            let v = out.entry(key.clone()).or_insert_with(BigRational::zero);
            *v += m.scalar;
            if v.is_zero() {
                out.remove(&key);
            }
            continue;
        }
        let x = m.nu.source(g);
        let steps = extensions(g, x, m.nu.last_edge());
        let unit = Monomial {
            mu: m.nu.clone(),
            g: g.vertex_group(x).identity(),
            nu: m.nu.clone(),
            scalar: BigRational::one(),
        };
        work.extend(expand_middle(g, &m, &unit, steps, usize::MAX)?);
    }
    Ok(out)
}

/// Outcome of the symbolic Cuntz-Krieger check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CkReport {
    pub ck1_checked: usize,
    pub ck1_failed: usize,
    pub ck2_checked: usize,
    pub ck2_failed: usize,
}

impl CkReport {
    pub fn holds(&self) -> bool {
        self.ck1_failed == 0 && self.ck2_failed == 0
    }
}

/// (CK1) and (CK2) for `P_nu = s_nu s_nu*`, `T_mu = s_mu s_{s_E(mu)}*` by the monomial calculus.
pub fn verify_ck_symbolic(
    g: &GraphOfGroups,
    depth_guard: usize,
    exec: Exec,
) -> Result<CkReport, GFamilyError> {
    let eg = build_eg(g);
    let t = |k: usize| {
        let mu = eg.edges[k].clone();
        let se = eg.vertices[eg.source[k]].clone();
        let x = se.source(g);
        Monomial::new(g, mu, g.vertex_group(x).identity(), se)
    };
    let check = |lhs: Vec<Monomial>, rhs: Vec<Monomial>| -> Result<bool, GFamilyError> {
        let d = lhs
            .iter()
            .chain(&rhs)
            .map(|m| m.nu.len())
            .max()
            .unwrap_or(0);
        Ok(normalize(g, &lhs, d)? == normalize(g, &rhs, d)?)
    };
    let ck1: Vec<Result<bool, GFamilyError>> =
        par_map(exec, &(0..eg.edges.len()).collect::<Vec<_>>(), |&k| {
            let tm = t(k);
            let lhs = monomial_product(g, &tm.adjoint(g), &tm, depth_guard)?;
            check(
                lhs,
                vec![Monomial::projection(g, &eg.vertices[eg.source[k]])],
            )
        });
    let ck2: Vec<Result<bool, GFamilyError>> =
        par_map(exec, &(0..eg.vertices.len()).collect::<Vec<_>>(), |&v| {
            let mut lhs = Vec::new();
            for k in (0..eg.edges.len()).filter(|&k| eg.range[k] == v) {
                let tm = t(k);
                lhs.extend(monomial_product(g, &tm, &tm.adjoint(g), depth_guard)?);
            }
            check(lhs, vec![Monomial::projection(g, &eg.vertices[v])])
        });
    let count = |rs: Vec<Result<bool, GFamilyError>>| -> Result<(usize, usize), GFamilyError> {
        let mut bad = 0;
        let n = rs.len();
        for r in rs {
            if !r? {
                bad += 1;
            }
        }
        Ok((n, bad))
    };
    let (c1, f1) = count(ck1)?;
    let (c2, f2) = count(ck2)?;
    Ok(CkReport {
        ck1_checked: c1,
        ck1_failed: f1,
        ck2_checked: c2,
        ck2_failed: f2,
    })
}

/// Values of the vector functional `f(b) = <b delta_xi, u delta_xi>` on `BS(m, n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Example39Report {
    pub m: i64,
    pub n: i64,
    pub xi: String,
    pub f_u: BigRational,
    pub pairs: usize,
    pub nonzero: Vec<(String, String)>,
}

/// `f(u)` and `f(s_mu s_nu*)` for all G-paths of length at most `depth`, with
/// `xi = (n-1) e ((n-m) e)^inf`.
pub fn example39_functional(
    m: i64,
    n: i64,
    depth: usize,
    exec: Exec,
) -> Result<Example39Report, GFamilyError> {
    if !(n > m && m >= 1) {
        return Err(GFamilyError::Precondition(format!(
            "need n > m >= 1, got m = {m}, n = {n}"
        )));
    }
    let g = GraphOfGroups::baumslag_solitar(m, n)
        .map_err(|e| GFamilyError::Precondition(e.to_string()))?;
    let x = 0;
    let e = 0;
    let grp = g.vertex_group(x);
    let el = |k: i64| grp.element_i64(&[k]).expect("integer element");
    let xi = BPoint::new(&g, x, vec![(el(n - 1), e)], vec![(el(n - m), e)])?;
    let a = el(1);
    let a_xi = apply_u(&g, x, &a, &xi)
        .ok()
        .flatten()
        .ok_or_else(|| GFamilyError::Precondition("carry did not settle".into()))?;
    // pi(b) maps point masses to point masses or zero, so f(b) is 1 or 0
    let f = |image: Option<BPoint>| {
        if image.as_ref() == Some(&a_xi) {
            BigRational::one()
        } else {
            BigRational::zero()
        }
    };
    let f_u = f(apply_u(&g, x, &a, &xi).ok().flatten());
    let paths: Vec<GWord> = (0..=depth)
        .flat_map(|d| crate::bstree::enumerate_paths(&g, x, d))
        .collect();
    // s_nu* delta_xi, then s_mu applied
    let strip: Vec<Option<BPoint>> = paths
        .iter()
        .map(|nu| apply_path_star(&g, nu, &xi))
        .collect();
    let rows: Vec<Vec<(String, String)>> = par_map(exec, &paths, |mu| {
        let mut bad = Vec::new();
        for (nu, p) in paths.iter().zip(&strip) {
            let Some(p) = p else { continue };
            if nu.source(&g) != mu.source(&g) {
                continue;
            }
            if !f(apply_path(&g, mu, p)).is_zero() {
                bad.push((mu.show(&g), nu.show(&g)));
            }
        }
        bad
    });
    Ok(Example39Report {
        m,
        n,
        xi: xi.show(&g),
        f_u,
        pairs: paths.len() * paths.len(),
        nonzero: rows.into_iter().flatten().collect(),
    })
}

/// `S_mu p` pointwise.
pub fn apply_path(g: &GraphOfGroups, mu: &GWord, p: &BPoint) -> Option<BPoint> {
    let mut q = p.clone();
    for (h, f) in mu.steps.iter().rev() {
        q = apply_s(g, *f, &q)?;
        q = apply_u(g, g.range(*f), h, &q).ok()??;
    }
    (q.vertex == mu.vertex).then_some(q)
}

/// `S_mu* p` pointwise.
pub fn apply_path_star(g: &GraphOfGroups, mu: &GWord, p: &BPoint) -> Option<BPoint> {
    if p.vertex != mu.vertex {
        return None;
    }
    let mut q = p.clone();
    for (h, f) in &mu.steps {
        let x = g.range(*f);
        q = apply_u(g, x, &g.vertex_group(x).neg(h), &q).ok()??;
        q = apply_s_star(g, *f, &q)?;
    }
    Some(q)
}

impl fmt::Display for RelationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "basis: {}", self.basis_dim)?;
        writeln!(f, "interior: {}", self.interior_dim)?;
        for r in &self.rows {
            writeln!(
                f,
                "{}: instances={} checked={} boundary={} max_defect={}",
                r.name, r.instances, r.checked_columns, r.boundary_columns, r.max_defect
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs23() -> GraphOfGroups {
        GraphOfGroups::baumslag_solitar(2, 3).unwrap()
    }

    fn eight() -> GraphOfGroups {
        GraphOfGroups::trivial(&["x"], &[("a", "x", "x"), ("b", "x", "x")]).unwrap()
    }

    #[test]
    fn eg_sizes() {
        let eg = build_eg(&eight());
        assert_eq!(eg.vertices.len(), 4);
        assert!(eg.has_no_sources());
        let g = GraphOfGroups::hnn_torsion(2).unwrap();
        let eg = build_eg(&g);
        assert_eq!(
            eg.vertices.len(),
            crate::bstree::enumerate_paths(&g, 0, 1).len()
        );
        assert_eq!(eg.vertices.len(), 4);
        assert_eq!(
            eg.edges.len(),
            crate::bstree::enumerate_paths(&g, 0, 2).len()
        );
        assert!(eg.has_no_sources());
    }

    #[test]
    fn point_canonical_and_carry() {
        let g = bs23();
        let xi = parse_point(&g, "(2) e | (1) e", 0).unwrap();
        assert_eq!(xi.show(&g), "(2) e [(1) e]^inf");
        let a = g.vertex_group(0).element_i64(&[1]).unwrap();
        let axi = apply_u(&g, 0, &a, &xi).unwrap().unwrap();
        assert_eq!(axi.show(&g), "[(0) e]^inf");
        let p = parse_point(&g, "(1) e (1) e | (1) e", 0).unwrap();
        assert_eq!(p.show(&g), "[(1) e]^inf");
        assert!(parse_point(&g, "(1) e | (0) ~e", 0).is_err());
    }

    #[test]
    fn s_and_s_star() {
        let g = bs23();
        let xi = parse_point(&g, " | (1) e", 0).unwrap();
        let p = apply_s(&g, 0, &xi).unwrap();
        assert_eq!(apply_s_star(&g, 0, &p), Some(xi.clone()));
        let q = parse_point(&g, "(0) ~e | (1) e", 0).unwrap();
        assert_eq!(apply_s(&g, 0, &q), None);
    }

    #[test]
    fn products() {
        let g = eight();
        let a = g.edge_id("a").unwrap();
        let b = g.edge_id("b").unwrap();
        let one = g.vertex_group(0).identity();
        let pa = GWord::identity(0).child(one.clone(), a);
        let pb = GWord::identity(0).child(one.clone(), b);
        let x = GWord::identity(0);
        let m1 = Monomial::new(&g, x.clone(), one.clone(), pa.clone());
        let m2 = Monomial::new(&g, pb.clone(), one.clone(), x.clone());
        assert!(monomial_product(&g, &m1, &m2, 4).unwrap().is_empty());
        let pab = pa.child(one.clone(), b);
        let p1 = Monomial::projection(&g, &pa);
        let p2 = Monomial::projection(&g, &pab);
        assert_eq!(monomial_product(&g, &p1, &p2, 4).unwrap(), vec![p2.clone()]);
        let lhs = monomial_product(&g, &p1, &p1, 4).unwrap();
        assert_eq!(
            normalize(&g, &lhs, 2).unwrap(),
            normalize(&g, &[p1], 2).unwrap()
        );
    }

    #[test]
    fn symbolic_ck() {
        for g in [eight(), bs23(), GraphOfGroups::hnn_torsion(2).unwrap()] {
            let r = verify_ck_symbolic(&g, 4, Exec::default()).unwrap();
            assert!(r.holds(), "{r:?}");
        }
    }

    #[test]
    fn relations_bs23() {
        let g = bs23();
        let xi = parse_point(&g, "(2) e | (1) e", 0).unwrap();
        let rep = TruncatedRep::build(&g, xi, 4, Exec::default()).unwrap();
        let r = verify_relations(&rep, Exec::default());
        assert!(r.all_hold(), "{r}");
        assert!(r.interior_dim >= 20, "{r}");
    }

    #[test]
    fn relations_ex38_and_eight() {
        let g = GraphOfGroups::hnn_torsion(2).unwrap();
        let xi = parse_point(&g, "(1,0) ~e (0,1) e | (0,0) e", 0).unwrap();
        let rep = TruncatedRep::build(&g, xi, 4, Exec::default()).unwrap();
        let r = verify_relations(&rep, Exec::default());
        assert!(r.all_hold(), "{r}");
        assert!(r.interior_dim >= 20, "{r}");
        let g = eight();
        let xi = parse_point(&g, " | a b", 0).unwrap();
        let rep = TruncatedRep::build(&g, xi, 4, Exec::default()).unwrap();
        let r = verify_relations(&rep, Exec::default());
        assert!(r.all_hold(), "{r}");
        assert!(r.interior_dim >= 20, "{r}");
    }

    #[test]
    fn monomial_matches_matrices() {
        let g = bs23();
        let xi = parse_point(&g, "(2) e | (1) e", 0).unwrap();
        let rep = TruncatedRep::build(&g, xi, 4, Exec::default()).unwrap();
        let paths: Vec<GWord> = (0..=2)
            .flat_map(|d| crate::bstree::enumerate_paths(&g, 0, d))
            .collect();
        let grp = g.vertex_group(0);
        let mons: Vec<Monomial> = paths
            .iter()
            .flat_map(|mu| paths.iter().map(move |nu| (mu, nu)))
            .filter(|(mu, nu)| mu.len() + nu.len() <= 2)
            .map(|(mu, nu)| {
                Monomial::new(&g, mu.clone(), grp.element_i64(&[1]).unwrap(), nu.clone())
            })
            .collect();
        let mats: Vec<SparseOp> = mons.iter().map(|m| rep.monomial(m)).collect();
        let mut checked = 0;
        for (a, ma) in mons.iter().zip(&mats) {
            for (b, mb) in mons.iter().zip(&mats) {
                let prod = monomial_product(&g, a, b, 4).unwrap();
                let lhs = ma.mul(mb);
                let mut rhs = SparseOp::zero(rep.dim());
                for m in &prod {
                    rhs = rhs.add(&rep.monomial(m));
                }
                let (d, def) = defect(&lhs, &rhs);
                assert!(d.is_zero(), "{} * {}", a.show(&g), b.show(&g));
                checked += def.iter().filter(|&&b| b).count();
            }
        }
        assert!(checked > 0);
    }

    #[test]
    fn example39() {
        let r = example39_functional(2, 3, 3, Exec::default()).unwrap();
        assert!(r.f_u.is_one());
        assert!(r.nonzero.is_empty());
        assert!(example39_functional(3, 3, 2, Exec::default()).is_err());
    }
}
