//! The Bass-Serre tree as the inverse system of G-paths, cylinder sets in its
//! boundary, and the action of the fundamental groupoid on both.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt::Write as _;

use num_bigint::BigInt;
use thiserror::Error;

use crate::abelian::AbElement;
use crate::gog::{reverse, EdgeId, GraphOfGroups, SpanningTree, VertexId};
use crate::par::{par_map, Exec};
use crate::words::{concat_unchecked, epsilon_edge, epsilon_group, invert, GWord, WordError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("lookahead of length {have} is shorter than the acting word ({need})")]
    InsufficientLookahead { have: usize, need: usize },
    #[error("lookahead does not extend the path")]
    NotAnExtension,
    #[error("word source does not match the path range")]
    EndpointMismatch,
    #[error("{0}")]
    Word(#[from] WordError),
}

/// One-step extensions `mu h f` in deterministic order.
pub fn children(g: &GraphOfGroups, mu: &GWord) -> Vec<GWord> {
    let x = mu.source(g);
    let last = mu.last_edge();
    let mut out = Vec::new();
    for f in g.edges_into(x) {
        for h in g.sigma(f) {
            if Some(reverse(f)) == last && h.is_zero() {
                continue;
            }
            out.push(mu.child(h.clone(), f));
        }
    }
    out
}

/// Number of one-step extensions after `last` at vertex `x`.
pub fn child_count(g: &GraphOfGroups, x: VertexId, last: Option<EdgeId>) -> usize {
    let total: usize = g.edges_into(x).map(|f| g.sigma_size(f)).sum();
    match last {
        Some(e) if g.range(reverse(e)) == x => total - 1,
        _ => total,
    }
}

/// All G-paths of length `n` extending `mu`'s last step.
pub fn descendants(g: &GraphOfGroups, mu: &GWord, n: usize) -> Vec<GWord> {
    let mut level = vec![mu.clone()];
    for _ in 0..n {
        level = level.iter().flat_map(|p| children(g, p)).collect();
    }
    level
}

/// `x G^n` in deterministic order.
pub fn enumerate_paths(g: &GraphOfGroups, x: VertexId, n: usize) -> Vec<GWord> {
    descendants(g, &GWord::identity(x), n)
}

/// Count of depth-`n` extensions of a path ending at `x` via `last`.
pub fn extension_count(g: &GraphOfGroups, x: VertexId, last: Option<EdgeId>, n: usize) -> u128 {
    let mut memo: HashMap<(VertexId, Option<EdgeId>, usize), u128> = HashMap::new();
    fn go(
        g: &GraphOfGroups,
        x: VertexId,
        last: Option<EdgeId>,
        n: usize,
        memo: &mut HashMap<(VertexId, Option<EdgeId>, usize), u128>,
    ) -> u128 {
        if n == 0 {
            return 1;
        }
        if let Some(&c) = memo.get(&(x, last, n)) {
            return c;
        }
        let mut total = 0u128;
        for f in g.edges_into(x) {
            let mut k = g.sigma_size(f) as u128;
            if Some(reverse(f)) == last {
                k -= 1;
            }
            if k > 0 {
                total += k * go(g, g.source(f), Some(f), n - 1, memo);
            }
        }
        memo.insert((x, last, n), total);
        total
    }
    go(g, x, last, n, &mut memo)
}

/// Valence histograms per depth `0..=n` of the tree rooted at `x`.
pub fn tree_valences(g: &GraphOfGroups, x: VertexId, n: usize) -> Vec<BTreeMap<usize, usize>> {
    let mut out = Vec::new();
    let mut level = vec![GWord::identity(x)];
    for d in 0..=n {
        let mut hist = BTreeMap::new();
        for p in &level {
            let v = child_count(g, p.source(g), p.last_edge()) + usize::from(d > 0);
            *hist.entry(v).or_insert(0) += 1;
        }
        out.push(hist);
        if d < n {
            level = level.iter().flat_map(|p| children(g, p)).collect();
        }
    }
    out
}

/// Depth-`|mu|` truncation of `gamma` applied to boundary points through `ext`.
pub fn act_on_path(
    g: &GraphOfGroups,
    gamma: &GWord,
    mu: &GWord,
    ext: &GWord,
) -> Result<GWord, TreeError> {
    if gamma.source(g) != mu.vertex {
        return Err(TreeError::EndpointMismatch);
    }
    if !mu.is_prefix_of(ext) {
        return Err(TreeError::NotAnExtension);
    }
    let have = ext.len() - mu.len();
    if have < gamma.len() {
        return Err(TreeError::InsufficientLookahead {
            have,
            need: gamma.len(),
        });
    }
    let w = concat_unchecked(g, gamma, &ext.as_path());
    Ok(w.prefix(mu.len()))
}

/// Images of `Z(nu)` under `gamma` as a list of cylinders.
fn image_pieces(g: &GraphOfGroups, gamma: &GWord, nu: &GWord, out: &mut Vec<GWord>) {
    let w = concat_unchecked(g, gamma, nu);
    let cancelled = (gamma.len() + nu.len() - w.len()) / 2;
    if cancelled < nu.len() {
        out.push(w.as_path());
    } else {
        for c in children(g, nu) {
            image_pieces(g, gamma, &c, out);
        }
    }
}

/// A subset of `x dW` given as a union of depth-`depth` cylinders, or the
/// complement of such a union. Canonical: the depth is minimal and the
/// complement form is used only when it lists fewer cylinders.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CylinderSet {
    pub fiber: VertexId,
    pub depth: usize,
    pub members: Vec<GWord>,
    pub complement: bool,
}

impl CylinderSet {
    /// Canonical union of cylinders in the fiber over `x`.
    pub fn from_cylinders(g: &GraphOfGroups, x: VertexId, cyls: &[GWord]) -> Self {
        let depth = cyls.iter().map(|c| c.len()).max().unwrap_or(0);
        let mut set: BTreeSet<GWord> = BTreeSet::new();
        for c in cyls {
            debug_assert_eq!(c.vertex, x);
            for d in descendants(g, c, depth - c.len()) {
                set.insert(d);
            }
        }
        Self::from_level(g, x, depth, set)
    }

    /// Canonical form of a set of depth-`depth` paths.
    fn from_level(g: &GraphOfGroups, x: VertexId, depth: usize, set: BTreeSet<GWord>) -> Self {
        // coarsen to the smallest depth at which the set is saturated
        let mut d = 0;
        let members: Vec<GWord> = loop {
            if d == depth {
                break set.into_iter().collect();
            }
            let mut groups: BTreeMap<GWord, u128> = BTreeMap::new();
            for p in &set {
                *groups.entry(p.prefix(d)).or_insert(0) += 1;
            }
            let saturated = groups
                .iter()
                .all(|(p, &n)| n == extension_count(g, p.source(g), p.last_edge(), depth - d));
            if saturated {
                break groups.into_keys().collect();
            }
            d += 1;
        };
        let total = extension_count(g, x, None, d) as usize;
        if members.len() * 2 > total {
            let have: HashSet<&GWord> = members.iter().collect();
            let rest = enumerate_paths(g, x, d)
                .into_iter()
                .filter(|p| !have.contains(p))
                .collect();
            CylinderSet {
                fiber: x,
                depth: d,
                members: rest,
                complement: true,
            }
        } else {
            CylinderSet {
                fiber: x,
                depth: d,
                members,
                complement: false,
            }
        }
    }

    pub fn cylinder(g: &GraphOfGroups, mu: &GWord) -> Self {
        Self::from_cylinders(g, mu.vertex, std::slice::from_ref(mu))
    }

    pub fn whole(g: &GraphOfGroups, x: VertexId) -> Self {
        Self::cylinder(g, &GWord::identity(x))
    }

    pub fn complement_of(&self, g: &GraphOfGroups) -> Self {
        let set: BTreeSet<GWord> = self.level(g, self.depth).into_iter().collect();
        let all = enumerate_paths(g, self.fiber, self.depth);
        let rest = all.into_iter().filter(|p| !set.contains(p)).collect();
        Self::from_level(g, self.fiber, self.depth, rest)
    }

    /// Members refined to depth `n >= self.depth`, without complement.
    pub fn level(&self, g: &GraphOfGroups, n: usize) -> Vec<GWord> {
        let base: Vec<GWord> = if self.complement {
            let have: HashSet<&GWord> = self.members.iter().collect();
            enumerate_paths(g, self.fiber, self.depth)
                .into_iter()
                .filter(|p| !have.contains(p))
                .collect()
        } else {
            self.members.clone()
        };
        base.iter()
            .flat_map(|p| descendants(g, p, n - self.depth))
            .collect()
    }

    /// Whether boundary points through `xi` (with `|xi| >= depth`) lie in the set.
    pub fn contains(&self, xi: &GWord) -> bool {
        if xi.vertex != self.fiber {
            return false;
        }
        let p = xi.prefix(self.depth);
        let listed = self.members.binary_search(&p).is_ok();
        listed != self.complement
    }

    pub fn is_empty(&self) -> bool {
        !self.complement && self.members.is_empty()
    }

    pub fn show(&self, g: &GraphOfGroups) -> String {
        let list: Vec<String> = self
            .members
            .iter()
            .map(|m| format!("Z({})", m.show(g)))
            .collect();
        let body = format!("{{{}}}", list.join(", "));
        if self.complement {
            format!("complement of {body} in {} dW", g.vertex_name(self.fiber))
        } else {
            body
        }
    }
}

/// `gamma Z(mu)` as a canonical cylinder set.
pub fn act_on_cylinder(
    g: &GraphOfGroups,
    gamma: &GWord,
    mu: &GWord,
) -> Result<CylinderSet, TreeError> {
    if gamma.source(g) != mu.vertex {
        return Err(TreeError::EndpointMismatch);
    }
    let mut pieces = Vec::new();
    image_pieces(g, gamma, mu, &mut pieces);
    Ok(CylinderSet::from_cylinders(g, gamma.vertex, &pieces))
}

/// `gamma S` for a cylinder set `S`.
pub fn act_on_set(
    g: &GraphOfGroups,
    gamma: &GWord,
    s: &CylinderSet,
) -> Result<CylinderSet, TreeError> {
    if gamma.source(g) != s.fiber {
        return Err(TreeError::EndpointMismatch);
    }
    let mut pieces = Vec::new();
    for m in s.level(g, s.depth) {
        image_pieces(g, gamma, &m, &mut pieces);
    }
    Ok(CylinderSet::from_cylinders(g, gamma.vertex, &pieces))
}

/// Which clause of the generator-action formulas produced an image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ActionCase {
    GroupDeep,
    GroupRootOutside,
    GroupRootInside,
    GroupRootBase,
    EdgeDeep,
    EdgeBacktrackTree,
    EdgeBacktrack,
    EdgeRootFixed,
    EdgeRoot,
}

fn literal_prefix(g: &GraphOfGroups, v: VertexId, edges: &[EdgeId], rho: &GWord) -> bool {
    rho.vertex == v
        && rho.len() >= edges.len()
        && rho
            .steps
            .iter()
            .zip(edges)
            .all(|((h, e), f)| e == f && h.is_zero())
        && edges.first().is_none_or(|&f| g.range(f) == v)
}

/// `eps(x, h) Z(rho)` from the closed-form clauses, for every clause whose
/// hypotheses match `rho` literally.
pub fn closed_form_group(
    g: &GraphOfGroups,
    t: &SpanningTree,
    x: VertexId,
    h: &AbElement,
    rho: &GWord,
) -> Vec<(ActionCase, CylinderSet)> {
    let v = t.base;
    let p = t.path(g, v, x);
    let mut out = Vec::new();
    if !literal_prefix(g, v, &p, rho) {
        return out;
    }
    let pw = GWord::along(g, v, &p);
    if rho.len() > p.len() {
        let mu = GWord {
            vertex: x,
            steps: rho.steps[p.len()..].to_vec(),
            tail: None,
        };
        let hmu = concat_unchecked(g, &GWord::element(x, h.clone()), &mu);
        let img = concat_unchecked(g, &pw, &hmu).as_path();
        // the clause needs `[v,x] h mu` to stay reduced at the junction
        if img.len() == rho.len() {
            out.push((ActionCase::GroupDeep, CylinderSet::cylinder(g, &img)));
        }
    } else if x == v {
        out.push((ActionCase::GroupRootBase, CylinderSet::whole(g, v)));
    } else {
        let f = t.path(g, x, v)[0];
        if g.alpha(f).in_image(h).unwrap_or(false) {
            out.push((ActionCase::GroupRootInside, CylinderSet::cylinder(g, &pw)));
        } else {
            let hf = concat_unchecked(g, &GWord::element(x, h.clone()), &GWord::along(g, x, &[f]));
            let img = concat_unchecked(g, &pw, &hf).as_path();
            out.push((
                ActionCase::GroupRootOutside,
                CylinderSet::cylinder(g, &img).complement_of(g),
            ));
        }
    }
    out
}

/// `eps(e) Z(rho)` from the closed-form clauses.
pub fn closed_form_edge(
    g: &GraphOfGroups,
    t: &SpanningTree,
    e: EdgeId,
    rho: &GWord,
) -> Vec<(ActionCase, CylinderSet)> {
    let v = t.base;
    let ps = t.path(g, v, g.source(e));
    let pr = GWord::along(g, v, &t.path(g, v, g.range(e)));
    let mut out = Vec::new();
    if !literal_prefix(g, v, &ps, rho) {
        return out;
    }
    let in_tree = t.contains(e);
    let k = ps.len();
    if rho.len() == k {
        if in_tree || g.source(e) == v {
            out.push((ActionCase::EdgeRootFixed, CylinderSet::cylinder(g, rho)));
        } else {
            let f = reverse(t.anchor_edge(g, reverse(e)).expect("s(e) is not the base"));
            let tail = GWord::along(g, g.range(e), &[e, f]);
            let img = concat_unchecked(g, &pr, &tail).as_path();
            out.push((
                ActionCase::EdgeRoot,
                CylinderSet::cylinder(g, &img).complement_of(g),
            ));
        }
        return out;
    }
    let (h1, f1) = &rho.steps[k];
    let backtrack = *f1 == reverse(e) && h1.is_zero();
    if backtrack && rho.len() == k + 1 {
        if in_tree {
            out.push((ActionCase::EdgeBacktrackTree, CylinderSet::cylinder(g, &pr)));
        } else {
            let img = concat_unchecked(g, &pr, &GWord::along(g, g.range(e), &[e])).as_path();
            out.push((
                ActionCase::EdgeBacktrack,
                CylinderSet::cylinder(g, &img).complement_of(g),
            ));
        }
    } else if !backtrack {
        let mu = GWord {
            vertex: g.source(e),
            steps: rho.steps[k..].to_vec(),
            tail: None,
        };
        let emu = concat_unchecked(g, &GWord::along(g, g.range(e), &[e]), &mu);
        let img = concat_unchecked(g, &pr, &emu).as_path();
        out.push((ActionCase::EdgeDeep, CylinderSet::cylinder(g, &img)));
    }
    out
}

/// Elements of `G_x` used to sample group generators: every non-identity
/// element of a finite group, otherwise the box `[-2, 2]^dim` minus zero.
pub fn group_sample(g: &GraphOfGroups, x: VertexId) -> Vec<AbElement> {
    let grp = g.vertex_group(x);
    let all = grp.elements().unwrap_or_else(|| grp.box_elements(2));
    all.into_iter().filter(|h| !h.is_zero()).collect()
}

/// Generators of the fundamental group at the base: `eps(e)` for edges off the
/// tree and `eps(x, s)` for standard generators `s`, with inverses.
pub fn epsilon_generators(g: &GraphOfGroups) -> Vec<(String, GWord)> {
    let t = g.tree();
    let mut out = Vec::new();
    for e in (0..g.num_edges()).step_by(2) {
        if !t.contains(e) {
            out.push((format!("eps({})", g.edge_name(e)), epsilon_edge(g, t, e)));
            out.push((
                format!("eps({})", g.edge_name(reverse(e))),
                epsilon_edge(g, t, reverse(e)),
            ));
        }
    }
    for x in 0..g.num_vertices() {
        let grp = g.vertex_group(x);
        for s in grp.generators() {
            let w = epsilon_group(g, t, x, &s).expect("generator lies in the group");
            let wi = invert(g, &w);
            out.push((format!("eps({},{})", g.vertex_name(x), s), w));
            out.push((format!("eps({},-{})", g.vertex_name(x), s), wi));
        }
    }
    out.retain(|(_, w)| !w.is_identity());
    let mut seen = HashSet::new();
    out.retain(|(_, w)| seen.insert(w.clone()));
    out
}

/// Distinct group elements of generator-word length at most `radius`, in BFS order.
pub fn ball(g: &GraphOfGroups, radius: usize) -> Vec<GWord> {
    let gens: Vec<GWord> = epsilon_generators(g).into_iter().map(|(_, w)| w).collect();
    let start = GWord::identity(g.base());
    let mut seen: HashSet<GWord> = HashSet::from([start.clone()]);
    let mut out = vec![start.clone()];
    let mut frontier = vec![start];
    for _ in 0..radius {
        let mut next = Vec::new();
        for w in &frontier {
            for s in &gens {
                let p = concat_unchecked(g, w, s);
                if seen.insert(p.clone()) {
                    out.push(p.clone());
                    next.push(p);
                }
            }
        }
        frontier = next;
    }
    out
}

/// Loops of word length at most `wordlen` fixing every depth-`depth`
/// refinement of `Z(prefix)` setwise.
pub fn isotropy_candidates(
    g: &GraphOfGroups,
    prefix: &GWord,
    wordlen: usize,
    depth: usize,
    exec: Exec,
) -> Vec<GWord> {
    let refinements = descendants(g, prefix, depth.saturating_sub(prefix.len()));
    let elements = ball(g, wordlen);
    let fixes: Vec<bool> = par_map(exec, &elements, |gamma| {
        refinements.iter().all(|nu| {
            act_on_cylinder(g, gamma, nu)
                .is_ok_and(|s| !s.complement && s.members.len() == 1 && s.members[0] == *nu)
        })
    });
    elements
        .into_iter()
        .zip(fixes)
        .filter_map(|(w, f)| f.then_some(w))
        .collect()
}

/// The depth-`n` tree at `x` in DOT format. Node ids are canonical path strings.
pub fn to_dot(g: &GraphOfGroups, x: VertexId, n: usize) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "digraph bstree {{");
    let _ = writeln!(s, "  node [shape=box];");
    let mut queue = VecDeque::from([GWord::identity(x)]);
    while let Some(p) = queue.pop_front() {
        let id = p.show(g);
        let _ = writeln!(
            s,
            "  \"{id}\" [label=\"{id}\\n{}\"];",
            g.vertex_name(p.source(g))
        );
        if p.len() < n {
            for c in children(g, &p) {
                let (h, f) = c.steps.last().unwrap();
                let label = if h.dim() > 0 {
                    format!("{} {}", h, g.edge_name(*f))
                } else {
                    g.edge_name(*f).to_string()
                };
                let _ = writeln!(s, "  \"{id}\" -> \"{}\" [label=\"{label}\"];", c.show(g));
                queue.push_back(c);
            }
        }
    }
    let _ = writeln!(s, "}}");
    s
}

/// Sizes `|x G^d|` for `d = 0..=n`.
pub fn level_sizes(g: &GraphOfGroups, x: VertexId, n: usize) -> Vec<BigInt> {
    (0..=n)
        .map(|d| BigInt::from(extension_count(g, x, None, d)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::FgAbelianGroup;
    use crate::words::parse_word;

    #[test]
    fn enumerate_examples() {
        let ed = GraphOfGroups::z_edge_of_groups(2, 3).unwrap();
        assert_eq!(enumerate_paths(&ed, 0, 1).len(), 2);
        let bs = GraphOfGroups::baumslag_solitar(2, 3).unwrap();
        assert_eq!(enumerate_paths(&bs, 0, 1).len(), 5);
        assert_eq!(enumerate_paths(&bs, 0, 0), vec![GWord::identity(0)]);
        assert_eq!(
            enumerate_paths(&bs, 0, 3).len() as u128,
            extension_count(&bs, 0, None, 3)
        );
    }

    #[test]
    fn valences() {
        let ed = GraphOfGroups::z_edge_of_groups(2, 3).unwrap();
        let h = tree_valences(&ed, 0, 4);
        assert_eq!(h[0], BTreeMap::from([(2, 1)]));
        assert_eq!(h[1], BTreeMap::from([(3, 2)]));
        assert_eq!(h[2], BTreeMap::from([(2, 4)]));
        let bs = GraphOfGroups::baumslag_solitar(2, 3).unwrap();
        for (d, m) in tree_valences(&bs, 0, 3).iter().enumerate() {
            assert_eq!(m.keys().copied().collect::<Vec<_>>(), vec![5], "depth {d}");
        }
    }

    #[test]
    fn act_on_path_examples() {
        let g = GraphOfGroups::hnn_torsion(2).unwrap();
        let gamma = parse_word(&g, "(0,1)", 0).unwrap();
        let mu = parse_word(&g, "(1,0) ~e (0,1) e", 0).unwrap();
        let moved = concat_unchecked(&g, &gamma, &mu);
        assert_eq!(moved.show(&g), "(1,0) ~e (0,1) e (0,1)");
        let id = GWord::identity(0);
        assert_eq!(act_on_path(&g, &id, &mu, &mu).unwrap(), mu);
        let short = act_on_path(&g, &parse_word(&g, "e", 0).unwrap(), &mu, &mu);
        assert!(matches!(
            short,
            Err(TreeError::InsufficientLookahead { .. })
        ));
    }

    #[test]
    fn cylinder_canonical() {
        let bs = GraphOfGroups::baumslag_solitar(2, 3).unwrap();
        let all = CylinderSet::from_cylinders(&bs, 0, &enumerate_paths(&bs, 0, 2));
        assert_eq!(all, CylinderSet::whole(&bs, 0));
        assert_eq!(all.depth, 0);
        let one = parse_word(&bs, "(1) e", 0).unwrap().as_path();
        let z = CylinderSet::cylinder(&bs, &one);
        let c = z.complement_of(&bs);
        assert!(c.complement);
        assert_eq!(c.complement_of(&bs), z);
        assert!(c.contains(&parse_word(&bs, "(2) e", 0).unwrap()));
        assert!(!c.contains(&parse_word(&bs, "(1) e (1) e", 0).unwrap().as_path()));
    }

    #[test]
    fn generator_actions_match_closed_forms() {
        let mut s = crate::gog::GogSpec::default();
        s.vertex("a", FgAbelianGroup::integers())
            .vertex("b", FgAbelianGroup::integers())
            .z_edge("e", "a", "b", 2, 3)
            .z_edge("f", "b", "a", 2, 2);
        let g = s.build().unwrap();
        let t = g.tree();
        for rho in (0..=2).flat_map(|d| enumerate_paths(&g, 0, d)) {
            for e in 0..g.num_edges() {
                let gamma = epsilon_edge(&g, t, e);
                let got = act_on_cylinder(&g, &gamma, &rho).unwrap();
                for (case, want) in closed_form_edge(&g, t, e, &rho) {
                    assert_eq!(got, want, "{case:?} e={e} rho={}", rho.show(&g));
                }
            }
            for x in 0..2 {
                for h in group_sample(&g, x) {
                    let gamma = epsilon_group(&g, t, x, &h).unwrap();
                    let got = act_on_cylinder(&g, &gamma, &rho).unwrap();
                    for (case, want) in closed_form_group(&g, t, x, &h, &rho) {
                        assert_eq!(got, want, "{case:?} x={x} h={h} rho={}", rho.show(&g));
                    }
                }
            }
        }
    }

    #[test]
    fn isotropy_bs22_contains_central_power() {
        let g = GraphOfGroups::baumslag_solitar(2, 2).unwrap();
        let prefix = parse_word(&g, "(1) e", 0).unwrap().as_path();
        let c = isotropy_candidates(&g, &prefix, 3, 3, Exec::default());
        let a2 = GWord::element(0, FgAbelianGroup::integers().element_i64(&[2]).unwrap());
        assert!(c.contains(&a2));
    }

    #[test]
    fn isotropy_figure_eight_trivial() {
        let g = GraphOfGroups::trivial(&["v"], &[("a", "v", "v"), ("b", "v", "v")]).unwrap();
        let prefix = parse_word(&g, "a b ~a ~b", 0).unwrap();
        let c = isotropy_candidates(&g, &prefix, 4, 6, Exec::default());
        assert_eq!(c, vec![GWord::identity(0)]);
    }

    #[test]
    fn dot_is_stable() {
        let g = GraphOfGroups::z_edge_of_groups(2, 3).unwrap();
        let d = to_dot(&g, 0, 2);
        assert_eq!(d, to_dot(&g, 0, 2));
        assert!(d.contains("\"1_x\" -> \"(0) e\""));
        assert_eq!(d.matches("->").count(), 2 + 4);
    }
}
