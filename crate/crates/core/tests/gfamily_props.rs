mod oracle;

use gogkit::bstree::enumerate_paths;
use gogkit::gfamily::{
    apply_path, apply_path_star, apply_s, apply_s_star, apply_u, build_eg, monomial_product,
    parse_point, BPoint, Monomial, TruncatedRep,
};
use gogkit::par::Exec;
use gogkit::words::GWord;
use gogkit::GraphOfGroups;
use oracle::load_graph;
use proptest::prelude::*;

fn bs23() -> GraphOfGroups {
    load_graph("bs23")
}

fn xi(g: &GraphOfGroups) -> BPoint {
    parse_point(g, "(2) e | (1) e", 0).unwrap()
}

/// Points in the orbit of `xi` under short generator words.
fn orbit_points(g: &GraphOfGroups) -> Vec<BPoint> {
    let rep = TruncatedRep::build(g, xi(g), 3, Exec::Sequential).unwrap();
    rep.basis
}

#[test]
fn eg_counts_match_path_enumeration() {
    for name in ["bs23", "ex38", "figure-eight", "edge23", "theta-gbs"] {
        let g = load_graph(name);
        let eg = build_eg(&g);
        let g1: usize = (0..g.num_vertices())
            .map(|x| enumerate_paths(&g, x, 1).len())
            .sum();
        let g2: usize = (0..g.num_vertices())
            .map(|x| enumerate_paths(&g, x, 2).len())
            .sum();
        assert_eq!(eg.vertices.len(), g1, "{name}");
        assert_eq!(eg.edges.len(), g2, "{name}");
        assert!(eg.has_no_sources(), "{name}");
    }
}

#[test]
fn s_star_inverts_s() {
    let g = bs23();
    for p in orbit_points(&g) {
        for e in 0..g.num_edges() {
            if let Some(q) = apply_s(&g, e, &p) {
                assert_eq!(apply_s_star(&g, e, &q), Some(p.clone()));
            }
        }
    }
}

#[test]
fn u_is_a_group_action() {
    let g = bs23();
    let grp = g.vertex_group(0);
    let pts = orbit_points(&g);
    for a in -3i64..=3 {
        for b in -3i64..=3 {
            let (ha, hb) = (
                grp.element_i64(&[a]).unwrap(),
                grp.element_i64(&[b]).unwrap(),
            );
            let hab = grp.add(&ha, &hb);
            for p in &pts {
                let two = apply_u(&g, 0, &hb, p)
                    .unwrap()
                    .and_then(|q| apply_u(&g, 0, &ha, &q).unwrap());
                assert_eq!(
                    two,
                    apply_u(&g, 0, &hab, p).unwrap(),
                    "a={a} b={b} p={}",
                    p.show(&g)
                );
            }
        }
    }
}

/// `u_h` moves `Z(mu)` onto `Z(h mu)` truncated to the same length.
#[test]
fn u_respects_cylinders() {
    let g = bs23();
    let grp = g.vertex_group(0);
    for p in orbit_points(&g) {
        for a in -4i64..=4 {
            let h = grp.element_i64(&[a]).unwrap();
            let q = apply_u(&g, 0, &h, &p).unwrap().unwrap();
            for n in 0..4 {
                let mu = p.truncate(n);
                let moved = gogkit::words::concat(&g, &GWord::element(0, h.clone()), &mu).unwrap();
                assert!(q.in_cylinder(&moved.as_path()), "a={a} p={}", p.show(&g));
            }
        }
    }
}

fn paths(g: &GraphOfGroups, n: usize) -> Vec<GWord> {
    (0..=n).flat_map(|d| enumerate_paths(g, 0, d)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    /// The product formula agrees with the pointwise action on orbit points.
    #[test]
    fn products_match_pointwise(i in 0usize..40, j in 0usize..40, k in 0usize..40, l in 0usize..40, a in -2i64..=2, b in -2i64..=2, pi in 0usize..64) {
        let g = bs23();
        let ps = paths(&g, 2);
        let (mu1, nu1, mu2, nu2) = (&ps[i % ps.len()], &ps[j % ps.len()], &ps[k % ps.len()], &ps[l % ps.len()]);
        let grp = g.vertex_group(0);
        let m1 = Monomial::new(&g, mu1.clone(), grp.element_i64(&[a]).unwrap(), nu1.clone());
        let m2 = Monomial::new(&g, mu2.clone(), grp.element_i64(&[b]).unwrap(), nu2.clone());
        let pts = orbit_points(&g);
        let p = &pts[pi % pts.len()];
        let apply = |m: &Monomial, p: &BPoint| -> Option<BPoint> {
            let q = apply_path_star(&g, &m.nu, p)?;
            let q = apply_u(&g, 0, &m.g, &q).ok()??;
            apply_path(&g, &m.mu, &q)
        };
        let direct = apply(&m2, p).and_then(|q| apply(&m1, &q));
        let terms = monomial_product(&g, &m1, &m2, 8).unwrap();
        let hits: Vec<BPoint> = terms.iter().filter_map(|m| apply(m, p)).collect();
        prop_assert!(hits.len() <= 1);
        prop_assert_eq!(direct, hits.into_iter().next());
    }
}
