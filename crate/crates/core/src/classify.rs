//! Classification reports assembled from the dynamics verdicts.

use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

use crate::abelian::FgAbelianGroup;
use crate::dynamics::{
    classify_min_lc_trichotomy, is_effective, is_locally_contractive, is_minimal,
    is_topologically_free, ray_is_effective, ray_is_locally_contractive, ray_is_minimal,
    ray_is_topologically_free, ray_trichotomy, Trichotomy, Truth, Verdict, Witness,
};
use crate::gog::{GraphOfGroups, RaySpec};
use crate::par::{par_map, Exec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("K-theory is only computed for graphs of trivial groups")]
    NotTrivialGroups,
    #[error("algebra is not simple (first Betti number {0})")]
    NotSimple(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dichotomy {
    Kirchberg,
    StableBunceDeddens,
    NotSimple,
    Unknown,
}

impl fmt::Display for Dichotomy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dichotomy::Kirchberg => "kirchberg",
            Dichotomy::StableBunceDeddens => "stable_bunce_deddens",
            Dichotomy::NotSimple => "not_simple",
            Dichotomy::Unknown => "unknown",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KTheory {
    pub betti: usize,
    pub k0: FgAbelianGroup,
    pub k1: FgAbelianGroup,
    pub unit_class: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub minimal: Verdict,
    pub topologically_free: Verdict,
    pub locally_contractive: Verdict,
    pub effective: Verdict,
    pub trichotomy: Option<Trichotomy>,
    pub simple: Verdict,
    pub nuclear: Verdict,
    pub purely_infinite: Verdict,
    pub dichotomy: Dichotomy,
    pub k_theory: Option<KTheory>,
    pub supernatural: Option<String>,
    pub notes: Vec<String>,
}

fn verdict(
    value: Truth,
    clause: &'static str,
    witness: Witness,
    detail: impl Into<String>,
) -> Verdict {
    Verdict {
        value,
        clause,
        witness,
        detail: detail.into(),
    }
}

fn simplicity(minimal: &Verdict, free: &Verdict) -> Verdict {
    let clause = "simple iff minimal and topologically free";
    match (minimal.value, free.value) {
        (Truth::False, _) => verdict(
            Truth::False,
            clause,
            Witness::Derived(Truth::False),
            "action is not minimal",
        ),
        (_, Truth::False) => verdict(
            Truth::False,
            clause,
            Witness::Derived(Truth::False),
            "action is not topologically free",
        ),
        (Truth::True, Truth::True) => verdict(
            Truth::True,
            clause,
            Witness::Derived(Truth::True),
            "action is minimal and topologically free",
        ),
        _ => verdict(
            Truth::Unknown,
            clause,
            Witness::Blocked,
            "minimality or topological freeness undecided",
        ),
    }
}

fn standard_notes() -> Vec<String> {
    vec![
        "separable: countable groups acting on a second countable space".into(),
        "UCT: crossed product of an amenable etale groupoid".into(),
    ]
}

fn nuclear() -> Verdict {
    verdict(
        Truth::True,
        "amenable action",
        Witness::Exhaustive,
        "abelian vertex groups give an amenable boundary action",
    )
}

/// Classification of a finite graph of groups.
pub fn classify(g: &GraphOfGroups) -> Classification {
    let minimal = is_minimal(g);
    let free = is_topologically_free(g);
    let lc = is_locally_contractive(g);
    let effective = is_effective(g);
    let trichotomy = classify_min_lc_trichotomy(g).ok();
    let simple = simplicity(&minimal, &free);
    let purely_infinite = match (simple.value, lc.value) {
        (Truth::True, Truth::True) => verdict(
            Truth::True,
            "simple and locally contractive",
            Witness::Derived(Truth::True),
            "simple with a locally contractive action",
        ),
        (Truth::True, _) => verdict(
            Truth::Unknown,
            "simple and locally contractive",
            Witness::Blocked,
            "local contractivity not established",
        ),
        _ => verdict(
            Truth::Unknown,
            "simple and locally contractive",
            Witness::Blocked,
            "algebra not known to be simple",
        ),
    };
    let dichotomy = match simple.value {
        Truth::False => Dichotomy::NotSimple,
        Truth::True if lc.is_true() => Dichotomy::Kirchberg,
        _ => Dichotomy::Unknown,
    };
    let k_theory = if g.is_trivial_groups() && simple.is_true() {
        k_theory_trivial(g).ok()
    } else {
        None
    };
    let mut notes = standard_notes();
    if g.is_gbs() && simple.is_true() {
        notes.push("simple GBS algebra: Kirchberg or stable Bunce-Deddens".into());
    }
    Classification {
        minimal,
        topologically_free: free,
        locally_contractive: lc,
        effective,
        trichotomy,
        simple,
        nuclear: nuclear(),
        purely_infinite,
        dichotomy,
        k_theory,
        supernatural: None,
        notes,
    }
}

/// Classification of the odometer of a ray of subgroups of `Z`.
pub fn classify_ray(r: &RaySpec) -> Classification {
    let minimal = ray_is_minimal(r);
    let free = ray_is_topologically_free(r);
    let lc = ray_is_locally_contractive(r);
    let effective = ray_is_effective(r);
    let simple = simplicity(&minimal, &free);
    let purely_infinite = verdict(
        Truth::False,
        "invariant measure",
        Witness::Exhaustive,
        "the Haar measure on the inverse limit gives a faithful tracial state",
    );
    let dichotomy = if simple.is_true() {
        Dichotomy::StableBunceDeddens
    } else {
        Dichotomy::NotSimple
    };
    let mut notes = standard_notes();
    let supernatural = r.supernatural_string();
    if simple.is_true() {
        notes.push(format!("Bunce-Deddens algebra BD({supernatural})"));
    }
    Classification {
        minimal,
        topologically_free: free,
        locally_contractive: lc,
        effective,
        trichotomy: Some(ray_trichotomy(r)),
        simple,
        nuclear: nuclear(),
        purely_infinite,
        dichotomy,
        k_theory: None,
        supernatural: Some(supernatural),
        notes,
    }
}

/// `K_0 = Z^n + Z/(n-1)`, `K_1 = Z^n` for a simple graph of trivial groups
/// with first Betti number `n`.
pub fn k_theory_trivial(g: &GraphOfGroups) -> Result<KTheory, ClassifyError> {
    if !g.is_trivial_groups() {
        return Err(ClassifyError::NotTrivialGroups);
    }
    let n = g.betti_number();
    if n < 2 {
        return Err(ClassifyError::NotSimple(n));
    }
    let torsion = if n > 2 {
        vec![BigInt::from(n - 1)]
    } else {
        vec![]
    };
    let k0 = FgAbelianGroup::new(n, torsion).expect("valid invariants");
    let k1 = FgAbelianGroup::free(n);
    let unit_class = if n > 2 {
        format!("[1] generates the torsion subgroup Z/{}", n - 1)
    } else {
        "[1] = 0".into()
    };
    Ok(KTheory {
        betti: n,
        k0,
        k1,
        unit_class,
    })
}

/// One cell of the Baumslag-Solitar grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridCell {
    pub m: i64,
    pub n: i64,
    pub minimal: Truth,
    pub topologically_free: Truth,
    pub dichotomy: Dichotomy,
}

/// Classifies `BS(m, n)` for `1 <= |m|, |n| <= bound`.
pub fn bs_grid(bound: i64, exec: Exec) -> Vec<GridCell> {
    let vals: Vec<i64> = (-bound..=bound).filter(|&k| k != 0).collect();
    let pairs: Vec<(i64, i64)> = vals
        .iter()
        .flat_map(|&m| vals.iter().map(move |&n| (m, n)))
        .collect();
    par_map(exec, &pairs, |&(m, n)| {
        let g =
            GraphOfGroups::baumslag_solitar(m, n).expect("nonzero multipliers give a valid loop");
        let c = classify(&g);
        GridCell {
            m,
            n,
            minimal: c.minimal.value,
            topologically_free: c.topologically_free.value,
            dichotomy: c.dichotomy,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bs23_is_kirchberg() {
        let c = classify(&GraphOfGroups::baumslag_solitar(2, 3).unwrap());
        assert!(c.simple.is_true());
        assert!(c.nuclear.is_true());
        assert!(c.purely_infinite.is_true());
        assert_eq!(c.dichotomy, Dichotomy::Kirchberg);
        assert_eq!(c.trichotomy, Some(Trichotomy::LocallyContractive));
    }

    #[test]
    fn odometer_is_bunce_deddens() {
        let c = classify_ray(&RaySpec::new(vec![], vec![2]).unwrap());
        assert!(c.simple.is_true());
        assert_eq!(c.dichotomy, Dichotomy::StableBunceDeddens);
        assert_eq!(c.supernatural.as_deref(), Some("2^inf"));
        assert!(c.purely_infinite.is_false());
    }

    #[test]
    fn figure_eight_k_theory() {
        let g = GraphOfGroups::trivial(&["x"], &[("a", "x", "x"), ("b", "x", "x")]).unwrap();
        let c = classify(&g);
        assert_eq!(c.dichotomy, Dichotomy::Kirchberg);
        let k = c.k_theory.unwrap();
        assert_eq!(k.k0.to_string(), "Z^2");
        assert_eq!(k.k1.to_string(), "Z^2");
    }

    #[test]
    fn k_theory_errors() {
        let g = GraphOfGroups::trivial(&["x"], &[("a", "x", "x")]).unwrap();
        assert_eq!(k_theory_trivial(&g), Err(ClassifyError::NotSimple(1)));
        let g = GraphOfGroups::baumslag_solitar(2, 3).unwrap();
        assert_eq!(k_theory_trivial(&g), Err(ClassifyError::NotTrivialGroups));
    }
}
