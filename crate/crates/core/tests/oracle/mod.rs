//! Brute-force references shared by the integration and acceptance tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};

use gogkit::gog::{parse_document, reverse, Built, EdgeId};
use gogkit::words::GWord;
use gogkit::{AbElement, GraphOfGroups};

pub const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures");

pub fn fixture_path(name: &str) -> String {
    format!("{FIXTURES}/{name}.gog")
}

pub fn load(name: &str) -> Built {
    let text = std::fs::read_to_string(fixture_path(name)).expect("fixture exists");
    parse_document(&text)
        .expect("fixture parses")
        .build()
        .expect("fixture is valid")
}

pub fn load_graph(name: &str) -> GraphOfGroups {
    match load(name) {
        Built::Graph(g) => g,
        Built::Ray(_) => panic!("{name} is a ray"),
    }
}

/// Edge group elements with coordinates in `[-r, r]`, or all of a finite group.
fn edge_candidates(g: &GraphOfGroups, e: EdgeId, r: i64) -> Vec<AbElement> {
    let grp = g.edge_group(e);
    grp.elements().unwrap_or_else(|| grp.box_elements(r))
}

fn max_coord(h: &AbElement) -> i64 {
    h.coords()
        .iter()
        .map(|c| i64::try_from(c.magnitude().clone()).unwrap_or(i64::MAX / 4))
        .max()
        .unwrap_or(0)
}

/// `h = t + alpha_e(k)` with `t` in the transversal, by search.
pub fn decompose(g: &GraphOfGroups, e: EdgeId, h: &AbElement) -> (AbElement, AbElement) {
    let grp = g.vertex_group(g.range(e));
    let sigma = g.sigma(e);
    let mut found = None;
    for k in edge_candidates(g, e, max_coord(h) + 2) {
        let t = grp.sub(h, &g.alpha(e).apply(&k).unwrap());
        if sigma.contains(&t) {
            assert!(found.is_none(), "decomposition is not unique");
            found = Some((t, k));
        }
    }
    found.expect("some coset representative")
}

/// `k` with `alpha_e(k) = h`, by search.
pub fn preimage(g: &GraphOfGroups, e: EdgeId, h: &AbElement) -> Option<AbElement> {
    edge_candidates(g, e, max_coord(h) + 2)
        .into_iter()
        .find(|k| g.alpha(e).apply(k).unwrap() == *h)
}

/// Raw word as the element list `g_1 .. g_{n+1}` and edge list.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Raw {
    elems: Vec<AbElement>,
    edges: Vec<EdgeId>,
}

fn to_raw(g: &GraphOfGroups, w: &GWord) -> Raw {
    let mut elems: Vec<AbElement> = w.steps.iter().map(|(h, _)| h.clone()).collect();
    let end = w.source(g);
    elems.push(
        w.tail
            .clone()
            .unwrap_or_else(|| g.vertex_group(end).identity()),
    );
    Raw {
        elems,
        edges: w.edges().collect(),
    }
}

fn from_raw(vertex: usize, r: &Raw) -> GWord {
    let n = r.edges.len();
    let tail = r.elems[n].clone();
    GWord {
        vertex,
        steps: r.elems[..n]
            .iter()
            .cloned()
            .zip(r.edges.iter().copied())
            .collect(),
        tail: (!tail.is_zero()).then_some(tail),
    }
}

/// Vertex group sitting before position `i`.
fn group_at(g: &GraphOfGroups, vertex: usize, r: &Raw, i: usize) -> usize {
    if i == 0 {
        vertex
    } else {
        g.source(r.edges[i - 1])
    }
}

/// Every one-step rewrite by the path group relations.
fn rewrites(g: &GraphOfGroups, vertex: usize, r: &Raw) -> Vec<Raw> {
    let mut out = Vec::new();
    for i in 0..r.edges.len() {
        let e = r.edges[i];
        // g_i e = t e alpha_ebar(k) when g_i = t + alpha_e(k)
        let (t, k) = decompose(g, e, &r.elems[i]);
        if t != r.elems[i] {
            let mut s = r.clone();
            s.elems[i] = t;
            let nxt = g.vertex_group(g.source(e));
            s.elems[i + 1] = nxt.add(&s.elems[i + 1], &g.alpha(reverse(e)).apply(&k).unwrap());
            out.push(s);
        }
        // e alpha_ebar(k) ~e = alpha_e(k)
        if i + 1 < r.edges.len() && r.edges[i + 1] == reverse(e) {
            if let Some(k) = preimage(g, reverse(e), &r.elems[i + 1]) {
                let grp = g.vertex_group(group_at(g, vertex, r, i));
                let merged = grp.add(
                    &grp.add(&r.elems[i], &g.alpha(e).apply(&k).unwrap()),
                    &r.elems[i + 2],
                );
                let mut s = r.clone();
                s.edges.drain(i..i + 2);
                s.elems.drain(i..i + 3);
                s.elems.insert(i, merged);
                out.push(s);
            }
        }
    }
    out
}

/// All irreducible words reachable from `w` under every rewrite order.
pub fn rewrite_normal_forms(g: &GraphOfGroups, w: &GWord) -> BTreeSet<GWord> {
    let start = to_raw(g, w);
    let mut seen = BTreeSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    let mut terminal = BTreeSet::new();
    while let Some(r) = queue.pop_front() {
        let next = rewrites(g, w.vertex, &r);
        if next.is_empty() {
            terminal.insert(from_raw(w.vertex, &r));
        }
        for s in next {
            if seen.insert(s.clone()) {
                queue.push_back(s);
            }
        }
        assert!(seen.len() < 200_000, "rewrite search exploded");
    }
    terminal
}

/// Seeded sampler for reproducible corpora.
pub struct Stream(StdRng);

impl Stream {
    pub fn new(seed: u64) -> Self {
        Stream(StdRng::seed_from_u64(seed))
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.0.random_range(0..n)
    }
}

fn random_element(g: &GraphOfGroups, x: usize, s: &mut Stream) -> AbElement {
    let grp = g.vertex_group(x);
    let coords: Vec<i64> = (0..grp.dim()).map(|_| s.below(9) as i64 - 4).collect();
    grp.element_i64(&coords).unwrap()
}

/// A raw word of `len` edges from `vertex` with small random labels.
pub fn random_word(g: &GraphOfGroups, vertex: usize, len: usize, s: &mut Stream) -> GWord {
    let mut at = vertex;
    let mut steps = Vec::new();
    for _ in 0..len {
        let into: Vec<EdgeId> = g.edges_into(at).collect();
        let e = into[s.below(into.len())];
        steps.push((random_element(g, at, s), e));
        at = g.source(e);
    }
    let t = random_element(g, at, s);
    GWord {
        vertex,
        steps,
        tail: (!t.is_zero()).then_some(t),
    }
}

/// Invariant factors and free rank of the cokernel of an integer matrix.
pub fn smith(mut a: Vec<Vec<i64>>) -> (Vec<i64>, usize) {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut diag = Vec::new();
    let mut r0 = 0;
    for c0 in 0..cols {
        if r0 == rows {
            break;
        }
        loop {
            // pivot: smallest nonzero entry in the lower-right block
            let mut best: Option<(usize, usize)> = None;
            for i in r0..rows {
                for j in c0..cols {
                    if a[i][j] != 0 && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return finish(diag, rows);
            };
            a.swap(r0, pi);
            for row in a.iter_mut() {
                row.swap(c0, pj);
            }
            let p = a[r0][c0];
            let mut clean = true;
            for i in r0 + 1..rows {
                let q = a[i][c0] / p;
                for j in c0..cols {
                    a[i][j] -= q * a[r0][j];
                }
                clean &= a[i][c0] == 0;
            }
            for j in c0 + 1..cols {
                let q = a[r0][j] / p;
                for i in r0..rows {
                    a[i][j] -= q * a[i][c0];
                }
                clean &= a[r0][j] == 0;
            }
            if clean {
                let divides = (r0 + 1..rows).all(|i| (c0 + 1..cols).all(|j| a[i][j] % p == 0));
                if divides {
                    diag.push(p.abs());
                    r0 += 1;
                    break;
                }
                // fold a non-divisible row into the pivot row
                let i = (r0 + 1..rows)
                    .find(|&i| (c0 + 1..cols).any(|j| a[i][j] % p != 0))
                    .unwrap();
                for j in c0..cols {
                    a[r0][j] += a[i][j];
                }
            }
        }
    }
    finish(diag, rows)
}

fn finish(diag: Vec<i64>, rows: usize) -> (Vec<i64>, usize) {
    let free = rows - diag.len();
    (diag.into_iter().filter(|&d| d > 1).collect(), free)
}

/// `K_0` and `K_1` of the graph algebra of `E_G` for a graph of trivial
/// groups, as (torsion, rank of K_0, rank of K_1), from `1 - A`.
pub fn graph_algebra_k_theory(g: &GraphOfGroups) -> (Vec<i64>, usize, usize) {
    // vertices of E_G are the edges of the graph; e feeds f when f follows e without backtracking
    let n = g.num_edges();
    let mut m = vec![vec![0i64; n]; n];
    for e in 0..n {
        for f in g.edges_into(g.source(e)) {
            if f != reverse(e) {
                m[e][f] += 1;
            }
        }
    }
    for (i, row) in m.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = i64::from(i == j) - *v;
        }
    }
    let (torsion, free) = smith(m);
    (torsion, free, free)
}
