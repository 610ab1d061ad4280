//! G-words in the fundamental groupoid and their reduced normal form.
//!
//! A word `g1 e1 g2 e2 ... gn en g(n+1)` is stored as its range vertex, the
//! `(g_i, e_i)` steps and an optional trailing element. In reduced form every
//! `g_i` lies in the transversal of `e_i`, no `e (1) ~e` backtrack remains, and
//! the trailing element is `None` exactly when it is the identity.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use thiserror::Error;

use crate::abelian::{AbElement, AbelianError};
use crate::gog::{reverse, EdgeId, GogError, GraphOfGroups, SpanningTree, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("edges {0} and {1} are not composable")]
    NotComposable(String, String),
    #[error("word ends at {0} but the next starts at {1}")]
    EndpointMismatch(String, String),
    #[error("q is only defined for GBS graphs of groups")]
    NotGbs,
    #[error("bad word literal: {0}")]
    Literal(String),
    #[error("{0}")]
    Group(#[from] AbelianError),
    #[error("{0}")]
    Graph(#[from] GogError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GWord {
    pub vertex: VertexId,
    pub steps: Vec<(AbElement, EdgeId)>,
    pub tail: Option<AbElement>,
}

impl GWord {
    pub fn identity(vertex: VertexId) -> Self {
        GWord {
            vertex,
            steps: vec![],
            tail: None,
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn range(&self) -> VertexId {
        self.vertex
    }

    pub fn source(&self, g: &GraphOfGroups) -> VertexId {
        self.steps.last().map_or(self.vertex, |(_, e)| g.source(*e))
    }

    /// Identity of a reduced word: no edges and no trailing element.
    pub fn is_identity(&self) -> bool {
        self.steps.is_empty() && self.tail.is_none()
    }

    pub fn edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.steps.iter().map(|(_, e)| *e)
    }

    pub fn last_edge(&self) -> Option<EdgeId> {
        self.steps.last().map(|(_, e)| *e)
    }

    /// The G-path obtained by dropping the trailing element.
    pub fn as_path(&self) -> GWord {
        GWord {
            vertex: self.vertex,
            steps: self.steps.clone(),
            tail: None,
        }
    }

    /// First `n` steps as a G-path.
    pub fn prefix(&self, n: usize) -> GWord {
        GWord {
            vertex: self.vertex,
            steps: self.steps[..n].to_vec(),
            tail: None,
        }
    }

    pub fn is_prefix_of(&self, other: &GWord) -> bool {
        self.vertex == other.vertex
            && self.steps.len() <= other.steps.len()
            && other.steps.starts_with(&self.steps)
    }

    /// Appends one step `h f` to a G-path.
    pub fn child(&self, h: AbElement, f: EdgeId) -> GWord {
        let mut steps = self.steps.clone();
        steps.push((h, f));
        GWord {
            vertex: self.vertex,
            steps,
            tail: None,
        }
    }

    /// Length-0 word consisting of a single element of `G_x`.
    pub fn element(vertex: VertexId, g: AbElement) -> Self {
        let tail = if g.is_zero() { None } else { Some(g) };
        GWord {
            vertex,
            steps: vec![],
            tail,
        }
    }

    /// Word `1 e1 1 e2 ... 1 en` along the given edges.
    pub fn along(g: &GraphOfGroups, vertex: VertexId, edges: &[EdgeId]) -> Self {
        GWord {
            vertex,
            steps: edges
                .iter()
                .map(|&e| (g.vertex_group(g.range(e)).identity(), e))
                .collect(),
            tail: None,
        }
    }

    /// Renders with edge and vertex names.
    pub fn show(&self, g: &GraphOfGroups) -> String {
        let mut parts = Vec::new();
        for (h, e) in &self.steps {
            if h.dim() > 0 {
                parts.push(h.to_string());
            }
            parts.push(g.edge_name(*e).to_string());
        }
        if let Some(t) = &self.tail {
            if parts.is_empty() {
                parts.push(format!("1_{}", g.vertex_name(self.vertex)));
            }
            parts.push(t.to_string());
        }
        if parts.is_empty() {
            format!("1_{}", g.vertex_name(self.vertex))
        } else {
            parts.join(" ")
        }
    }
}

/// Checks composability and element membership of a raw word.
pub fn check_word(g: &GraphOfGroups, w: &GWord) -> Result<(), WordError> {
    let mut at = w.vertex;
    let mut prev: Option<EdgeId> = None;
    for (h, e) in &w.steps {
        if g.range(*e) != at {
            let p = prev.map_or_else(
                || format!("1_{}", g.vertex_name(at)),
                |p| g.edge_name(p).to_string(),
            );
            return Err(WordError::NotComposable(p, g.edge_name(*e).to_string()));
        }
        g.vertex_group(at).check(h)?;
        at = g.source(*e);
        prev = Some(*e);
    }
    if let Some(t) = &w.tail {
        g.vertex_group(at).check(t)?;
    }
    Ok(())
}

/// Continues a reduction: `stack` is already reduced, `carry` sits after it.
fn reduce_onto<'a, I>(
    g: &GraphOfGroups,
    vertex: VertexId,
    mut stack: Vec<(AbElement, EdgeId)>,
    mut carry: AbElement,
    steps: I,
    tail: Option<&AbElement>,
) -> GWord
where
    I: IntoIterator<Item = &'a (AbElement, EdgeId)>,
{
    for (h0, e) in steps {
        let e = *e;
        let grp = g.vertex_group(g.range(e));
        carry = grp.add(&carry, h0);
        let (t, h) = g
            .alpha(e)
            .decompose_unchecked(&carry)
            .expect("validated edges have finite index");
        let cancels = t.is_zero() && stack.last().is_some_and(|(_, f)| *f == reverse(e));
        if cancels {
            let (tp, _) = stack.pop().unwrap();
            let back = g.alpha(reverse(e)).apply_unchecked(&h);
            carry = g.vertex_group(g.source(e)).add(&tp, &back);
        } else {
            stack.push((t, e));
            carry = g.alpha(reverse(e)).apply_unchecked(&h);
        }
    }
    let end = stack.last().map_or(vertex, |(_, e)| g.source(*e));
    if let Some(t) = tail {
        carry = g.vertex_group(end).add(&carry, t);
    }
    GWord {
        vertex,
        steps: stack,
        tail: if carry.is_zero() { None } else { Some(carry) },
    }
}

/// The unique reduced word representing the same groupoid element.
pub fn reduce(g: &GraphOfGroups, w: &GWord) -> Result<GWord, WordError> {
    check_word(g, w)?;
    Ok(reduce_unchecked(g, w))
}

pub(crate) fn reduce_unchecked(g: &GraphOfGroups, w: &GWord) -> GWord {
    let id = g.vertex_group(w.vertex).identity();
    reduce_onto(
        g,
        w.vertex,
        Vec::with_capacity(w.steps.len()),
        id,
        &w.steps,
        w.tail.as_ref(),
    )
}

/// Product `w1 w2` of reduced words, requiring `s(w1) = r(w2)`.
pub fn concat(g: &GraphOfGroups, w1: &GWord, w2: &GWord) -> Result<GWord, WordError> {
    let s = w1.source(g);
    if s != w2.vertex {
        return Err(WordError::EndpointMismatch(
            g.vertex_name(s).to_string(),
            g.vertex_name(w2.vertex).to_string(),
        ));
    }
    check_word(g, w1)?;
    check_word(g, w2)?;
    Ok(concat_unchecked(g, w1, w2))
}

pub(crate) fn concat_unchecked(g: &GraphOfGroups, w1: &GWord, w2: &GWord) -> GWord {
    let s = w1.source(g);
    let carry = w1
        .tail
        .clone()
        .unwrap_or_else(|| g.vertex_group(s).identity());
    reduce_onto(
        g,
        w1.vertex,
        w1.steps.clone(),
        carry,
        &w2.steps,
        w2.tail.as_ref(),
    )
}

/// The groupoid inverse.
pub fn invert(g: &GraphOfGroups, w: &GWord) -> GWord {
    let n = w.steps.len();
    let mut steps = Vec::with_capacity(n);
    let s = w.source(g);
    let mut cur = w
        .tail
        .clone()
        .unwrap_or_else(|| g.vertex_group(s).identity());
    for i in (0..n).rev() {
        let (h, e) = &w.steps[i];
        steps.push((g.vertex_group(g.source(*e)).neg(&cur), reverse(*e)));
        cur = h.clone();
    }
    let tail = g.vertex_group(w.vertex).neg(&cur);
    let raw = GWord {
        vertex: s,
        steps,
        tail: Some(tail),
    };
    reduce_unchecked(g, &raw)
}

/// `eps(e) = [v, r(e)] e [s(e), v]`.
pub fn epsilon_edge(g: &GraphOfGroups, t: &SpanningTree, e: EdgeId) -> GWord {
    let mut edges = t.path(g, t.base, g.range(e));
    edges.push(e);
    edges.extend(t.path(g, g.source(e), t.base));
    reduce_unchecked(g, &GWord::along(g, t.base, &edges))
}

/// `eps(x, h) = [v, x] h [x, v]`.
pub fn epsilon_group(
    g: &GraphOfGroups,
    t: &SpanningTree,
    x: VertexId,
    h: &AbElement,
) -> Result<GWord, WordError> {
    g.vertex_group(x).check(h)?;
    let to = GWord::along(g, t.base, &t.path(g, t.base, x));
    let mid = GWord::element(x, h.clone());
    let back = GWord::along(g, x, &t.path(g, x, t.base));
    let w = concat_unchecked(g, &to, &mid);
    Ok(concat_unchecked(g, &w, &back))
}

/// `q(w) = prod omega(~e_i) / omega(e_i)` for GBS graphs of groups.
pub fn q_ratio(g: &GraphOfGroups, w: &GWord) -> Result<BigRational, WordError> {
    if !g.is_gbs() {
        return Err(WordError::NotGbs);
    }
    let mut q = BigRational::one();
    for e in w.edges() {
        let num = g.omega(reverse(e)).ok_or(WordError::NotGbs)?.clone();
        let den = g.omega(e).ok_or(WordError::NotGbs)?.clone();
        q *= BigRational::new(num, den);
    }
    Ok(q)
}

/// Lowest-terms positive denominator.
pub fn denominator(r: &BigRational) -> BigInt {
    r.denom().clone()
}

fn tokenize(s: &str) -> Result<Vec<String>, WordError> {
    let mut out = Vec::new();
    let mut chars = s.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c == '(' {
            let mut tok = String::new();
            for d in chars.by_ref() {
                if !d.is_whitespace() {
                    tok.push(d);
                }
                if d == ')' {
                    break;
                }
            }
            if !tok.ends_with(')') {
                return Err(WordError::Literal(format!("unclosed element in `{s}`")));
            }
            out.push(tok);
        } else {
            let mut tok = String::new();
            while let Some(&d) = chars.peek() {
                if d.is_whitespace() || d == '(' {
                    break;
                }
                tok.push(d);
                chars.next();
            }
            out.push(tok);
        }
    }
    Ok(out)
}

fn parse_element(g: &GraphOfGroups, x: VertexId, tok: &str) -> Result<AbElement, WordError> {
    let inner = &tok[1..tok.len() - 1];
    let coords: Result<Vec<BigInt>, _> = if inner.is_empty() {
        Ok(vec![])
    } else {
        inner.split(',').map(|c| c.parse::<BigInt>()).collect()
    };
    let coords = coords.map_err(|_| WordError::Literal(format!("bad element `{tok}`")))?;
    Ok(g.vertex_group(x).element(coords)?)
}

/// Parses a word literal such as `(2) e (0,1) ~f` or `1_x (3)` and reduces it.
/// Elements may be omitted (identity); `default` is the range when there are no edges.
pub fn parse_word(g: &GraphOfGroups, s: &str, default: VertexId) -> Result<GWord, WordError> {
    let toks = tokenize(s)?;
    let mut vertex: Option<VertexId> = None;
    let mut body: Vec<&str> = Vec::new();
    for t in &toks {
        if let Some(name) = t.strip_prefix("1_") {
            let x = g.vertex_id(name)?;
            if let Some(v) = vertex {
                if v != x || !body.is_empty() {
                    return Err(WordError::Literal(format!("misplaced `{t}`")));
                }
            }
            vertex = Some(x);
        } else {
            body.push(t);
        }
    }
    let first_edge = body
        .iter()
        .find(|t| !t.starts_with('('))
        .map(|t| g.edge_id(t))
        .transpose()?;
    let range = match (vertex, first_edge) {
        (Some(v), Some(e)) if g.range(e) != v => {
            return Err(WordError::NotComposable(
                format!("1_{}", g.vertex_name(v)),
                g.edge_name(e).to_string(),
            ))
        }
        (Some(v), _) => v,
        (None, Some(e)) => g.range(e),
        (None, None) => default,
    };
    let mut at = range;
    let mut acc = g.vertex_group(at).identity();
    let mut steps = Vec::new();
    for t in body {
        if t.starts_with('(') {
            let h = parse_element(g, at, t)?;
            acc = g.vertex_group(at).add(&acc, &h);
        } else {
            let e = g.edge_id(t)?;
            if g.range(e) != at {
                let p = steps.last().map_or_else(
                    || format!("1_{}", g.vertex_name(at)),
                    |(_, p): &(AbElement, EdgeId)| g.edge_name(*p).to_string(),
                );
                return Err(WordError::NotComposable(p, t.to_string()));
            }
            steps.push((acc, e));
            at = g.source(e);
            acc = g.vertex_group(at).identity();
        }
    }
    let raw = GWord {
        vertex: range,
        steps,
        tail: Some(acc),
    };
    Ok(reduce_unchecked(g, &raw))
}

/// Whether `w` is a reduced G-path (transversal labels, no backtrack, no tail).
pub fn is_reduced_path(g: &GraphOfGroups, w: &GWord) -> bool {
    w.tail.is_none() && check_word(g, w).is_ok() && reduce_unchecked(g, w) == *w
}

pub struct Shown<'a>(pub &'a GraphOfGroups, pub &'a GWord);

impl fmt::Display for Shown<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.1.show(self.0))
    }
}
