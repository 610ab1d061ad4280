//! Finitely generated abelian groups `Z^r + Z/n1 + ... + Z/nk` and injective
//! homomorphisms between them.
//!
//! Elements are stored in canonical coordinates: free coordinates are arbitrary
//! integers, torsion coordinates are reduced into `[0, n_i)`. Homomorphisms are
//! integer matrices acting on coordinate vectors; index, transversal and coset
//! decomposition are read off a column Hermite form of the image lattice.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AbelianError {
    #[error("torsion order {0} is not at least 2")]
    BadTorsion(BigInt),
    #[error("element has {got} coordinates, group needs {want}")]
    Dimension { got: usize, want: usize },
    #[error("coordinate {index} = {value} is not reduced modulo {modulus}")]
    NotCanonical {
        index: usize,
        value: BigInt,
        modulus: BigInt,
    },
    #[error("matrix is {rows}x{cols}, expected {want_rows}x{want_cols}")]
    MatrixShape {
        rows: usize,
        cols: usize,
        want_rows: usize,
        want_cols: usize,
    },
    #[error("homomorphism is not well defined on torsion generator {0}")]
    NotWellDefined(usize),
    #[error("homomorphism is not injective")]
    NotInjective,
    #[error("image has infinite index")]
    InfiniteIndex,
    #[error("bad group spec `{0}`")]
    BadSpec(String),
}

/// `Z^rank + Z/torsion[0] + ... `.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FgAbelianGroup {
    rank: usize,
    torsion: Vec<BigInt>,
}

/// Canonical coordinate vector; the owning group is carried by context.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AbElement {
    coords: Vec<BigInt>,
}

impl AbElement {
    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

impl fmt::Display for AbElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl FgAbelianGroup {
    pub fn new(rank: usize, torsion: Vec<BigInt>) -> Result<Self, AbelianError> {
        for t in &torsion {
            if *t < BigInt::from(2) {
                return Err(AbelianError::BadTorsion(t.clone()));
            }
        }
        Ok(FgAbelianGroup { rank, torsion })
    }

    pub fn trivial() -> Self {
        FgAbelianGroup {
            rank: 0,
            torsion: vec![],
        }
    }

    pub fn integers() -> Self {
        Self::free(1)
    }

    pub fn free(rank: usize) -> Self {
        FgAbelianGroup {
            rank,
            torsion: vec![],
        }
    }

    pub fn cyclic(n: u64) -> Result<Self, AbelianError> {
        Self::new(0, vec![BigInt::from(n)])
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn torsion(&self) -> &[BigInt] {
        &self.torsion
    }

    pub fn dim(&self) -> usize {
        self.rank + self.torsion.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_finite(&self) -> bool {
        self.rank == 0
    }

    pub fn is_infinite_cyclic(&self) -> bool {
        self.rank == 1 && self.torsion.is_empty()
    }

    pub fn order(&self) -> Option<BigInt> {
        if self.rank > 0 {
            return None;
        }
        Some(self.torsion.iter().fold(BigInt::one(), |a, b| a * b))
    }

    /// Modulus of coordinate `i`, `None` for a free coordinate.
    fn modulus(&self, i: usize) -> Option<&BigInt> {
        if i < self.rank {
            None
        } else {
            Some(&self.torsion[i - self.rank])
        }
    }

    fn canon(&self, mut coords: Vec<BigInt>) -> AbElement {
        for (i, c) in coords.iter_mut().enumerate() {
            if let Some(m) = self.modulus(i) {
                *c = c.mod_floor(m);
            }
        }
        AbElement { coords }
    }

    pub fn identity(&self) -> AbElement {
        AbElement {
            coords: vec![BigInt::zero(); self.dim()],
        }
    }

    /// Builds an element from arbitrary integer coordinates, reducing torsion parts.
    pub fn element(&self, coords: Vec<BigInt>) -> Result<AbElement, AbelianError> {
        if coords.len() != self.dim() {
            return Err(AbelianError::Dimension {
                got: coords.len(),
                want: self.dim(),
            });
        }
        Ok(self.canon(coords))
    }

    pub fn element_i64(&self, coords: &[i64]) -> Result<AbElement, AbelianError> {
        self.element(coords.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// Checks that `g` has the right length and canonical torsion coordinates.
    pub fn check(&self, g: &AbElement) -> Result<(), AbelianError> {
        if g.coords.len() != self.dim() {
            return Err(AbelianError::Dimension {
                got: g.coords.len(),
                want: self.dim(),
            });
        }
        for (i, c) in g.coords.iter().enumerate() {
            if let Some(m) = self.modulus(i) {
                if c.is_negative() || c >= m {
                    return Err(AbelianError::NotCanonical {
                        index: i,
                        value: c.clone(),
                        modulus: m.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn contains(&self, g: &AbElement) -> bool {
        self.check(g).is_ok()
    }

    /// The group law.
    pub fn op(&self, g: &AbElement, h: &AbElement) -> Result<AbElement, AbelianError> {
        self.check(g)?;
        self.check(h)?;
        Ok(self.add(g, h))
    }

    /// Unchecked group law for callers that already hold members of `self`.
    pub fn add(&self, g: &AbElement, h: &AbElement) -> AbElement {
        let coords = g.coords.iter().zip(&h.coords).map(|(a, b)| a + b).collect();
        self.canon(coords)
    }

    pub fn neg(&self, g: &AbElement) -> AbElement {
        self.canon(g.coords.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, g: &AbElement, h: &AbElement) -> AbElement {
        self.add(g, &self.neg(h))
    }

    pub fn scale(&self, g: &AbElement, k: &BigInt) -> AbElement {
        self.canon(g.coords.iter().map(|c| c * k).collect())
    }

    /// Standard generators, one per coordinate.
    pub fn generators(&self) -> Vec<AbElement> {
        (0..self.dim())
            .map(|i| {
                let mut c = vec![BigInt::zero(); self.dim()];
                c[i] = BigInt::one();
                self.canon(c)
            })
            .collect()
    }

    /// All elements of a finite group in lexicographic order.
    pub fn elements(&self) -> Option<Vec<AbElement>> {
        if !self.is_finite() {
            return None;
        }
        let mut out = vec![vec![]];
        for m in &self.torsion {
            let mut next = Vec::new();
            for prefix in &out {
                let mut k = BigInt::zero();
                while &k < m {
                    let mut p: Vec<BigInt> = prefix.clone();
                    p.push(k.clone());
                    next.push(p);
                    k += 1;
                }
            }
            out = next;
        }
        Some(out.into_iter().map(|coords| AbElement { coords }).collect())
    }

    /// Elements with free coordinates in `[-radius, radius]` (all torsion values).
    pub fn box_elements(&self, radius: i64) -> Vec<AbElement> {
        let mut out: Vec<Vec<BigInt>> = vec![vec![]];
        for i in 0..self.dim() {
            let values: Vec<BigInt> = match self.modulus(i) {
                None => (-radius..=radius).map(BigInt::from).collect(),
                Some(m) => {
                    let mut v = Vec::new();
                    let mut k = BigInt::zero();
                    while &k < m {
                        v.push(k.clone());
                        k += 1;
                    }
                    v
                }
            };
            let mut next = Vec::new();
            for prefix in &out {
                for val in &values {
                    let mut p = prefix.clone();
                    p.push(val.clone());
                    next.push(p);
                }
            }
            out = next;
        }
        out.into_iter().map(|coords| AbElement { coords }).collect()
    }

    /// Parses "1", "Z", "Z^r", "Z/n" and sums of these joined by `+`.
    pub fn parse(spec: &str) -> Result<Self, AbelianError> {
        let s: String = spec.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || AbelianError::BadSpec(spec.trim().to_string());
        if s.is_empty() {
            return Err(bad());
        }
        let mut rank = 0usize;
        let mut torsion = Vec::new();
        for term in s.split('+') {
            if term == "1" || term == "0" {
                continue;
            }
            if let Some(n) = term.strip_prefix("Z/") {
                let n: BigInt = n.parse().map_err(|_| bad())?;
                if n == BigInt::one() {
                    continue;
                }
                if n < BigInt::from(2) {
                    return Err(bad());
                }
                torsion.push(n);
            } else if let Some(r) = term.strip_prefix("Z^") {
                rank += r.parse::<usize>().map_err(|_| bad())?;
            } else if term == "Z" {
                rank += 1;
            } else {
                return Err(bad());
            }
        }
        Self::new(rank, torsion)
    }
}

impl fmt::Display for FgAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for t in &self.torsion {
            parts.push(format!("Z/{t}"));
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Index of a subgroup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Index {
    Finite(BigInt),
    Infinite,
}

/// Column Hermite data for the lattice `im(A) + torsion relations` in the target
/// coordinate space. `basis[j]` has its first nonzero entry at row `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Lattice {
    basis: Vec<Vec<BigInt>>,
    /// Source coordinates of the preimage of `basis[j]`.
    preimage: Vec<Vec<BigInt>>,
}

/// An injective homomorphism given by a target-by-source integer matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbHom {
    source: FgAbelianGroup,
    target: FgAbelianGroup,
    matrix: Vec<Vec<BigInt>>,
    index: Index,
    lattice: Option<Lattice>,
}

/// Column-style Hermite reduction of an `n x m` matrix, tracking the unimodular
/// column transform. Returns the reduced matrix, the transform and the pivot rows.
fn column_hermite(
    mut m: Vec<Vec<BigInt>>,
    cols: usize,
) -> (Vec<Vec<BigInt>>, Vec<Vec<BigInt>>, Vec<usize>) {
    let rows = m.len();
    let mut u: Vec<Vec<BigInt>> = (0..cols)
        .map(|i| {
            (0..cols)
                .map(|j| {
                    if i == j {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect()
        })
        .collect();
    let col_op =
        |m: &mut Vec<Vec<BigInt>>, u: &mut Vec<Vec<BigInt>>, dst: usize, src: usize, q: &BigInt| {
            for row in m.iter_mut() {
                let v = &row[src] * q;
                row[dst] -= v;
            }
            for row in u.iter_mut() {
                let v = &row[src] * q;
                row[dst] -= v;
            }
        };
    let swap = |m: &mut Vec<Vec<BigInt>>, u: &mut Vec<Vec<BigInt>>, a: usize, b: usize| {
        for row in m.iter_mut() {
            row.swap(a, b);
        }
        for row in u.iter_mut() {
            row.swap(a, b);
        }
    };
    let mut pivots = Vec::new();
    let mut pc = 0usize;
    for r in 0..rows {
        if pc >= cols {
            break;
        }
        loop {
            let best = (pc..cols)
                .filter(|&k| !m[r][k].is_zero())
                .min_by(|&a, &b| m[r][a].abs().cmp(&m[r][b].abs()));
            let Some(k) = best else { break };
            swap(&mut m, &mut u, pc, k);
            let mut done = true;
            for k2 in pc + 1..cols {
                if !m[r][k2].is_zero() {
                    let q = m[r][k2].div_floor(&m[r][pc]);
                    col_op(&mut m, &mut u, k2, pc, &q);
                    if !m[r][k2].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if m[r][pc].is_zero() {
            continue;
        }
        if m[r][pc].is_negative() {
            for row in m.iter_mut() {
                row[pc] = -&row[pc];
            }
            for row in u.iter_mut() {
                row[pc] = -&row[pc];
            }
        }
        pivots.push(r);
        pc += 1;
    }
    (m, u, pivots)
}

impl AbHom {
    /// Builds `φ: source → target` from a `target.dim() x source.dim()` matrix,
    /// certifying well-definedness and injectivity.
    pub fn new(
        source: FgAbelianGroup,
        target: FgAbelianGroup,
        matrix: Vec<Vec<BigInt>>,
    ) -> Result<Self, AbelianError> {
        let n = target.dim();
        let s = source.dim();
        let shape_ok = matrix.len() == n && matrix.iter().all(|row| row.len() == s);
        if !shape_ok {
            return Err(AbelianError::MatrixShape {
                rows: matrix.len(),
                cols: matrix.first().map_or(0, |r| r.len()),
                want_rows: n,
                want_cols: s,
            });
        }
        // torsion generators of the source must map to zero after scaling
        for j in source.rank..s {
            let d = &source.torsion[j - source.rank];
            let col: Vec<BigInt> = (0..n).map(|i| &matrix[i][j] * d).collect();
            if !target.canon(col).is_zero() {
                return Err(AbelianError::NotWellDefined(j));
            }
        }
        // M = [A | D_T]
        let t = target.torsion.len();
        let cols = s + t;
        let mut m: Vec<Vec<BigInt>> = Vec::with_capacity(n);
        for (i, row) in matrix.iter().enumerate() {
            let mut r = row.clone();
            for k in 0..t {
                if i == target.rank + k {
                    r.push(target.torsion[k].clone());
                } else {
                    r.push(BigInt::zero());
                }
            }
            m.push(r);
        }
        let (h, u, pivots) = column_hermite(m, cols);
        let rank = pivots.len();
        // kernel columns: their source part must vanish in the source group
        for j in rank..cols {
            for i in 0..s {
                let x = &u[i][j];
                let zero = match source.modulus(i) {
                    None => x.is_zero(),
                    Some(d) => x.mod_floor(d).is_zero(),
                };
                if !zero {
                    return Err(AbelianError::NotInjective);
                }
            }
        }
        let (index, lattice) = if rank == n && pivots.iter().enumerate().all(|(j, &r)| r == j) {
            let basis: Vec<Vec<BigInt>> = (0..n)
                .map(|j| (0..n).map(|i| h[i][j].clone()).collect())
                .collect();
            let preimage: Vec<Vec<BigInt>> = (0..n)
                .map(|j| (0..s).map(|i| u[i][j].clone()).collect())
                .collect();
            let idx = (0..n).fold(BigInt::one(), |a, j| a * &basis[j][j]);
            (Index::Finite(idx), Some(Lattice { basis, preimage }))
        } else {
            (Index::Infinite, None)
        };
        Ok(AbHom {
            source,
            target,
            matrix,
            index,
            lattice,
        })
    }

    pub fn from_i64(
        source: FgAbelianGroup,
        target: FgAbelianGroup,
        matrix: &[&[i64]],
    ) -> Result<Self, AbelianError> {
        let m = matrix
            .iter()
            .map(|row| row.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        Self::new(source, target, m)
    }

    /// Multiplication by `w` on `Z`.
    pub fn multiplication(w: i64) -> Result<Self, AbelianError> {
        Self::from_i64(
            FgAbelianGroup::integers(),
            FgAbelianGroup::integers(),
            &[&[w]],
        )
    }

    pub fn source(&self) -> &FgAbelianGroup {
        &self.source
    }

    pub fn target(&self) -> &FgAbelianGroup {
        &self.target
    }

    pub fn matrix(&self) -> &[Vec<BigInt>] {
        &self.matrix
    }

    pub fn index(&self) -> &Index {
        &self.index
    }

    pub fn is_surjective(&self) -> bool {
        self.index == Index::Finite(BigInt::one())
    }

    /// The multiplier of a homomorphism `Z → Z`.
    pub fn multiplier(&self) -> Option<&BigInt> {
        if self.source.is_infinite_cyclic() && self.target.is_infinite_cyclic() {
            Some(&self.matrix[0][0])
        } else {
            None
        }
    }

    pub fn apply(&self, g: &AbElement) -> Result<AbElement, AbelianError> {
        self.source.check(g)?;
        Ok(self.apply_unchecked(g))
    }

    pub(crate) fn apply_unchecked(&self, g: &AbElement) -> AbElement {
        let coords = self
            .matrix
            .iter()
            .map(|row| row.iter().zip(&g.coords).map(|(a, b)| a * b).sum())
            .collect();
        self.target.canon(coords)
    }

    /// Size of the transversal, i.e. `[target : image]` as a machine integer.
    pub fn index_usize(&self) -> Option<usize> {
        match &self.index {
            Index::Finite(n) => usize::try_from(n).ok(),
            Index::Infinite => None,
        }
    }

    /// Canonical transversal in lexicographic order; the identity comes first.
    pub fn transversal(&self) -> Result<Vec<AbElement>, AbelianError> {
        let lat = self.lattice.as_ref().ok_or(AbelianError::InfiniteIndex)?;
        let n = self.target.dim();
        let mut out: Vec<Vec<BigInt>> = vec![vec![]];
        for j in 0..n {
            let d = &lat.basis[j][j];
            let mut next = Vec::new();
            for p in &out {
                let mut k = BigInt::zero();
                while &k < d {
                    let mut q = p.clone();
                    q.push(k.clone());
                    next.push(q);
                    k += 1;
                }
            }
            out = next;
        }
        Ok(out.into_iter().map(|coords| AbElement { coords }).collect())
    }

    /// Writes `g = t + φ(h)` with `t` in the transversal.
    pub fn decompose(&self, g: &AbElement) -> Result<(AbElement, AbElement), AbelianError> {
        self.target.check(g)?;
        self.decompose_unchecked(g)
    }

    pub(crate) fn decompose_unchecked(
        &self,
        g: &AbElement,
    ) -> Result<(AbElement, AbElement), AbelianError> {
        let lat = self.lattice.as_ref().ok_or(AbelianError::InfiniteIndex)?;
        let n = self.target.dim();
        let s = self.source.dim();
        let mut t = g.coords.clone();
        let mut h = vec![BigInt::zero(); s];
        for j in 0..n {
            let b = &lat.basis[j];
            let q = t[j].div_floor(&b[j]);
            if q.is_zero() {
                continue;
            }
            for (ti, bi) in t.iter_mut().zip(b).skip(j) {
                *ti -= &q * bi;
            }
            for (hi, pi) in h.iter_mut().zip(&lat.preimage[j]) {
                *hi += &q * pi;
            }
        }
        Ok((AbElement { coords: t }, self.source.canon(h)))
    }

    /// Preimage of `g` if it lies in the image.
    pub fn preimage(&self, g: &AbElement) -> Result<Option<AbElement>, AbelianError> {
        let (t, h) = self.decompose(g)?;
        Ok(if t.is_zero() { Some(h) } else { None })
    }

    /// Whether `g` lies in the image.
    pub fn in_image(&self, g: &AbElement) -> Result<bool, AbelianError> {
        Ok(self.decompose(g)?.0.is_zero())
    }
}

/// `g + h` in `group`.
pub fn ab_op(
    group: &FgAbelianGroup,
    g: &AbElement,
    h: &AbElement,
) -> Result<AbElement, AbelianError> {
    group.op(g, h)
}

pub fn hom_apply(phi: &AbHom, g: &AbElement) -> Result<AbElement, AbelianError> {
    phi.apply(g)
}

pub fn subgroup_index(phi: &AbHom) -> Index {
    phi.index.clone()
}

pub fn transversal(phi: &AbHom) -> Result<Vec<AbElement>, AbelianError> {
    phi.transversal()
}

pub fn coset_decompose(phi: &AbHom, g: &AbElement) -> Result<(AbElement, AbElement), AbelianError> {
    phi.decompose(g)
}
