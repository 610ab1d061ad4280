//! Acceptance checks, one line per criterion.

#[path = "../../core/tests/oracle/mod.rs"]
mod oracle;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use gogkit::bstree::{
    act_on_cylinder, closed_form_edge, closed_form_group, enumerate_paths, group_sample,
    tree_valences,
};
use gogkit::classify::{bs_grid, classify_ray, k_theory_trivial, Dichotomy};
use gogkit::dynamics::{is_minimal, orbit_avoidance, orbit_minimality, Truth};
use gogkit::gfamily::{example39_functional, parse_point, verify_relations, TruncatedRep};
use gogkit::gog::Built;
use gogkit::par::Exec;
use gogkit::words::{concat, epsilon_edge, epsilon_group, invert, reduce, GWord};
use gogkit::GraphOfGroups;
use oracle::{
    fixture_path, graph_algebra_k_theory, load, load_graph, random_word, rewrite_normal_forms,
    Stream,
};

type Outcome = Result<String, String>;
type Criterion = fn() -> Outcome;

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(start: Instant, limit: Duration) -> Result<Duration, String> {
    let t = start.elapsed();
    check(t < limit, format!("took {t:.1?}, limit {limit:?}"))?;
    Ok(t)
}

fn words_roundtrip() -> Outcome {
    let start = Instant::now();
    let names = ["bs23", "edge23", "ex38", "figure-eight", "theta-gbs"];
    let mut stream = Stream::new(0x6f67);
    let (mut total, mut oracle_checked) = (0, 0);
    for name in names {
        let g = load_graph(name);
        for i in 0..2000 {
            let len = i % 9;
            let x = stream.below(g.num_vertices());
            let w = random_word(&g, x, len, &mut stream);
            let r = reduce(&g, &w).map_err(|e| format!("{name}: {e}"))?;
            check(
                reduce(&g, &r).as_ref() == Ok(&r),
                format!("{name}: reduce not idempotent on {}", w.show(&g)),
            )?;
            let inv = invert(&g, &r);
            let p = concat(&g, &r, &inv).map_err(|e| format!("{name}: {e}"))?;
            check(
                p == GWord::identity(x),
                format!("{name}: w w^-1 = {}", p.show(&g)),
            )?;
            check(
                invert(&g, &inv) == r,
                format!("{name}: double inverse of {}", r.show(&g)),
            )?;
            if len <= 4 {
                let forms = rewrite_normal_forms(&g, &w);
                check(
                    forms.len() == 1 && forms.contains(&r),
                    format!("{name}: normal form disagrees on {}", w.show(&g)),
                )?;
                oracle_checked += 1;
            }
            total += 1;
        }
    }
    let t = within(start, Duration::from_secs(60))?;
    Ok(format!(
        "{total} words, {oracle_checked} against rewriting, {t:.1?}"
    ))
}

fn valences() -> Outcome {
    let g = load_graph("edge23");
    let levels = tree_valences(&g, g.base(), 6);
    check(
        levels.len() == 7,
        format!("edge23: {} levels", levels.len()),
    )?;
    for (d, h) in levels.iter().enumerate() {
        let want = if d % 2 == 0 { 2 } else { 3 };
        check(
            h.keys().eq([want].iter()),
            format!("edge23 level {d}: {h:?}"),
        )?;
    }
    let g = GraphOfGroups::baumslag_solitar(2, 3).map_err(|e| e.to_string())?;
    for (d, h) in tree_valences(&g, 0, 6).iter().enumerate() {
        check(h.keys().eq([5].iter()), format!("BS(2,3) level {d}: {h:?}"))?;
    }
    Ok("edge23 alternates 2/3, BS(2,3) is 5-regular to depth 6".into())
}

fn closed_forms() -> Outcome {
    let mut matched = 0;
    for name in ["bs23", "edge23", "theta-gbs", "bs-chain"] {
        let g = load_graph(name);
        let t = g.tree();
        let v = t.base;
        let mut gens = Vec::new();
        for e in 0..g.num_edges() {
            gens.push((epsilon_edge(&g, t, e), None, Some(e)));
        }
        for x in 0..g.num_vertices() {
            for h in group_sample(&g, x) {
                let w = epsilon_group(&g, t, x, &h).map_err(|e| e.to_string())?;
                gens.push((w, Some((x, h)), None));
            }
        }
        for rho in (0..=3).flat_map(|d| enumerate_paths(&g, v, d)) {
            for (gamma, grp, edge) in &gens {
                let forms = match (grp, edge) {
                    (Some((x, h)), _) => closed_form_group(&g, t, *x, h, &rho),
                    (_, Some(e)) => closed_form_edge(&g, t, *e, &rho),
                    _ => unreachable!(),
                };
                if forms.is_empty() {
                    continue;
                }
                let got = act_on_cylinder(&g, gamma, &rho).map_err(|e| e.to_string())?;
                for (case, want) in forms {
                    check(
                        got == want,
                        format!(
                            "{name}: {case:?} on Z({}) gives {}",
                            rho.show(&g),
                            got.show(&g)
                        ),
                    )?;
                    matched += 1;
                }
            }
        }
    }
    check(matched > 0, "no closed form applied")?;
    Ok(format!("{matched} generator/cylinder pairs on 4 fixtures"))
}

fn bs_classification() -> Outcome {
    let start = Instant::now();
    let cells = bs_grid(5, Exec::default());
    check(cells.len() == 100, format!("{} cells", cells.len()))?;
    for c in &cells {
        let (m, n) = (c.m.abs(), c.n.abs());
        let kirchberg = m != n && m.min(n) >= 2;
        check(
            (c.dichotomy == Dichotomy::Kirchberg) == kirchberg,
            format!("BS({},{}) dichotomy {}", c.m, c.n, c.dichotomy),
        )?;
        let want_min = if m.min(n) == 1 {
            Truth::False
        } else {
            Truth::True
        };
        check(
            c.minimal == want_min,
            format!("BS({},{}) minimal {}", c.m, c.n, c.minimal),
        )?;
        let want_free = if m == n { Truth::False } else { Truth::True };
        check(
            c.topologically_free == want_free,
            format!(
                "BS({},{}) topologically free {}",
                c.m, c.n, c.topologically_free
            ),
        )?;
    }
    let t = within(start, Duration::from_secs(10))?;
    Ok(format!("100 cells in {t:.1?}"))
}

fn minimality_oracle() -> Outcome {
    let names = [
        "bs23",
        "bs12",
        "bs22",
        "bs2m2",
        "edge23",
        "figure-eight",
        "triangle",
        "theta-gbs",
        "ex38",
        "bs-chain",
    ];
    let (mut yes, mut no) = (0, 0);
    for name in names {
        let g = load_graph(name);
        match is_minimal(&g).value {
            Truth::True => {
                let o = orbit_minimality(&g, 2, 6, Exec::default());
                check(
                    o.all_reached(),
                    format!("{name}: {} of {} pairs missed", o.missed, o.pairs),
                )?;
                yes += 1;
            }
            Truth::False => {
                let (_, avoided) =
                    orbit_avoidance(&g, 6, Exec::default()).ok_or(format!("{name}: no witness"))?;
                check(avoided, format!("{name}: witness cylinder was entered"))?;
                no += 1;
            }
            Truth::Unknown => return Err(format!("{name}: undecided")),
        }
    }
    Ok(format!(
        "{yes} minimal and {no} non-minimal verdicts confirmed"
    ))
}

fn k_theory() -> Outcome {
    for (name, n) in [("figure-eight", 2usize), ("betti3", 3), ("betti4", 4)] {
        let g = load_graph(name);
        let k = k_theory_trivial(&g).map_err(|e| format!("{name}: {e}"))?;
        let torsion: Vec<String> = k.k0.torsion().iter().map(|t| t.to_string()).collect();
        let want: Vec<String> = if n > 2 {
            vec![(n - 1).to_string()]
        } else {
            vec![]
        };
        check(k.betti == n, format!("{name}: betti {}", k.betti))?;
        check(
            k.k0.rank() == n && torsion == want,
            format!("{name}: K0 = {}", k.k0),
        )?;
        check(
            k.k1.rank() == n && k.k1.torsion().is_empty(),
            format!("{name}: K1 = {}", k.k1),
        )?;
        let (t, r0, r1) = graph_algebra_k_theory(&g);
        let snf: Vec<String> = t.iter().map(|t| t.to_string()).collect();
        check(
            snf == torsion && r0 == n && r1 == n,
            format!("{name}: Smith form gives {snf:?}, ranks {r0}/{r1}"),
        )?;
    }
    Ok("K0 = Z^n + Z/(n-1), K1 = Z^n for n = 2, 3, 4".into())
}

fn relations() -> Outcome {
    let start = Instant::now();
    let cases: [(&str, GraphOfGroups, &str); 3] = [
        ("ex38", load_graph("ex38"), "(1,0) ~e (0,1) e | (0,0) e"),
        ("BS(2,3)", load_graph("bs23"), "(2) e | (1) e"),
        ("figure-eight", load_graph("figure-eight"), " | a b"),
    ];
    let mut parts = Vec::new();
    for (name, g, xi) in cases {
        let p = parse_point(&g, xi, g.base()).map_err(|e| format!("{name}: {e}"))?;
        let rep =
            TruncatedRep::build(&g, p, 4, Exec::default()).map_err(|e| format!("{name}: {e}"))?;
        let r = verify_relations(&rep, Exec::default());
        check(r.all_hold(), format!("{name}: {r}"))?;
        check(
            r.interior_dim >= 20,
            format!("{name}: interior {}", r.interior_dim),
        )?;
        parts.push(format!("{name} interior {}", r.interior_dim));
    }
    let t = within(start, Duration::from_secs(120))?;
    Ok(format!("{}, {t:.1?}", parts.join(", ")))
}

fn functional() -> Outcome {
    let r = example39_functional(2, 3, 3, Exec::default()).map_err(|e| e.to_string())?;
    check(r.f_u.to_string() == "1", format!("f(u) = {}", r.f_u))?;
    check(
        r.nonzero.is_empty(),
        format!("nonzero values {:?}", r.nonzero),
    )?;
    Ok(format!("f(u) = 1 and {} pairs vanish", r.pairs))
}

fn odometer() -> Outcome {
    let Built::Ray(ray) = load("odometer") else {
        return Err("odometer is not a ray".into());
    };
    let c = classify_ray(&ray);
    check(c.simple.is_true(), format!("simple {}", c.simple.value))?;
    check(
        c.dichotomy == Dichotomy::StableBunceDeddens,
        format!("dichotomy {}", c.dichotomy),
    )?;
    check(
        c.supernatural.as_deref() == Some("2^inf"),
        format!("supernatural {:?}", c.supernatural),
    )?;
    check(
        c.effective.is_true(),
        format!("effective {}", c.effective.value),
    )?;
    check(
        c.topologically_free.is_true(),
        format!("topologically free {}", c.topologically_free.value),
    )?;
    Ok("simple, stable Bunce-Deddens, 2^inf".into())
}

const ALL_FIXTURES: [&str; 16] = [
    "betti3",
    "betti4",
    "bs-chain",
    "bs12",
    "bs22",
    "bs23",
    "bs2m2",
    "dihedral",
    "edge23",
    "ex38",
    "figure-eight",
    "odometer",
    "ray-finite",
    "singular",
    "theta-gbs",
    "triangle",
];

fn run_cli(args: &[&str], threads: &str) -> (Vec<u8>, Vec<u8>, Option<i32>) {
    let out = Command::new(env!("CARGO_BIN_EXE_gogkit"))
        .args(args)
        .env("GOGKIT_THREADS", threads)
        .output()
        .expect("binary runs");
    (out.stdout, out.stderr, out.status.code())
}

fn determinism() -> Outcome {
    let mut runs = 0;
    for name in ALL_FIXTURES {
        let path = fixture_path(name);
        let commands: Vec<Vec<&str>> = vec![
            vec!["validate"],
            vec!["tree"],
            vec!["analyze"],
            vec!["classify"],
            vec!["--depth", "2", "gfamily-verify"],
            vec!["export-dot"],
            vec!["export-dot", "--eg"],
        ];
        for cmd in commands {
            for format in ["text", "machine"] {
                if cmd[0] == "export-dot" && format == "machine" {
                    continue;
                }
                let mut args = cmd.clone();
                args.extend(["--format", format, path.as_str()]);
                let first = run_cli(&args, "1");
                let second = run_cli(&args, "4");
                check(
                    first == second,
                    format!("{name}: `{}` differs between runs", args.join(" ")),
                )?;
                check(
                    first.2.is_some(),
                    format!("{name}: `{}` was killed", args.join(" ")),
                )?;
                runs += 1;
            }
        }
    }
    Ok(format!(
        "{runs} command/fixture pairs byte-identical across runs and thread counts"
    ))
}

fn main() {
    let criteria: [(&str, Criterion); 10] = [
        ("word reduction", words_roundtrip),
        ("tree valences", valences),
        ("generator actions", closed_forms),
        ("Baumslag-Solitar grid", bs_classification),
        ("minimality oracle", minimality_oracle),
        ("K-theory", k_theory),
        ("G-family relations", relations),
        ("functional", functional),
        ("odometer", odometer),
        ("CLI determinism", determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(detail) => {
                println!("criterion {}: FAIL {name}: {detail}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
