//! Deterministic reports: human text, a line-oriented machine format and DOT.

use std::fmt::Write as _;

use crate::bstree::{act_on_cylinder, level_sizes, tree_valences, CylinderSet, TreeError};
use crate::classify::Classification;
use crate::dynamics::{
    nontrivial_treelike_edges, orbit_minimality, orbit_minimality_ray, FlowGraph, OrbitReport,
    Verdict,
};
use crate::gfamily::{CkReport, DirectedGraphEG, RelationReport};
use crate::gog::{GraphOfGroups, RaySpec, ValidationReport, VertexId};
use crate::par::Exec;
use crate::words::GWord;

/// Header line of the machine format.
pub const MACHINE_HEADER: &str = "gogkit-machine 1";

/// Ordered key/value report.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    pub command: String,
    pub entries: Vec<(String, String)>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.to_string(),
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.entries.push((key.into(), value.to_string()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    fn verdict(&mut self, key: &str, v: &Verdict) -> &mut Self {
        self.push(key, v.value);
        self.push(format!("{key}.clause"), v.clause);
        self.push(format!("{key}.detail"), &v.detail)
    }

    pub fn text(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(s, "{k}: {v}");
        }
        s
    }

    pub fn machine(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{MACHINE_HEADER}");
        let _ = writeln!(s, "command={}", self.command);
        for (k, v) in &self.entries {
            let key = k.replace(' ', "_");
            let val = v.replace('\\', "\\\\").replace('\n', "\\n");
            let _ = writeln!(s, "{key}={val}");
        }
        s
    }
}

fn histogram(h: &std::collections::BTreeMap<usize, usize>) -> String {
    let parts: Vec<String> = h.iter().map(|(v, c)| format!("{v}x{c}")).collect();
    parts.join(" ")
}

pub fn validation_report(g: &GraphOfGroups) -> Report {
    let mut r = Report::new("validate");
    r.push("status", "valid");
    r.push("vertices", g.num_vertices());
    r.push("edges", g.num_edges() / 2);
    r.push("base", g.vertex_name(g.base()));
    for x in 0..g.num_vertices() {
        r.push(format!("vertex.{}", g.vertex_name(x)), g.vertex_group(x));
    }
    for e in 0..g.num_edges() {
        let sigma: Vec<String> = g.sigma(e).iter().map(|h| h.to_string()).collect();
        r.push(
            format!("edge.{}", g.edge_name(e)),
            format!(
                "{} <- {} index {} transversal [{}]",
                g.vertex_name(g.range(e)),
                g.vertex_name(g.source(e)),
                g.sigma_size(e),
                sigma.join(", ")
            ),
        );
    }
    r.push("betti", g.betti_number());
    r
}

pub fn invalid_report(v: &ValidationReport) -> Report {
    let mut r = Report::new("validate");
    r.push("status", "invalid");
    for (i, x) in v.violations.iter().enumerate() {
        r.push(format!("violation.{i}"), x);
    }
    r
}

pub fn ray_validation_report(ray: &RaySpec) -> Report {
    let mut r = Report::new("validate");
    r.push("status", "valid");
    r.push("kind", "ray");
    r.push("prefix", join_u64(&ray.prefix));
    r.push("period", join_u64(&ray.period));
    r
}

fn join_u64(v: &[u64]) -> String {
    let parts: Vec<String> = v.iter().map(|i| i.to_string()).collect();
    parts.join(" ")
}

pub fn tree_report(g: &GraphOfGroups, x: VertexId, depth: usize) -> Report {
    let mut r = Report::new("tree");
    r.push("root", g.vertex_name(x));
    r.push("depth", depth);
    for (d, (h, n)) in tree_valences(g, x, depth)
        .iter()
        .zip(level_sizes(g, x, depth))
        .enumerate()
    {
        r.push(format!("level.{d}.size"), n);
        r.push(format!("level.{d}.valence"), histogram(h));
    }
    r
}

pub fn act_report(g: &GraphOfGroups, gamma: &GWord, mu: &GWord) -> Result<Report, TreeError> {
    let image: CylinderSet = act_on_cylinder(g, gamma, mu)?;
    let mut r = Report::new("act");
    r.push("element", gamma.show(g));
    r.push("cylinder", format!("Z({})", mu.show(g)));
    r.push("image", image.show(g));
    r.push("image.depth", image.depth);
    r.push("image.complement", image.complement);
    r.push("image.count", image.members.len());
    Ok(r)
}

fn orbit(r: &mut Report, o: &OrbitReport) {
    r.push("orbit.depth", o.depth);
    r.push("orbit.wordlen", o.wordlen);
    r.push("orbit.elements", o.elements);
    r.push("orbit.pairs", o.pairs);
    r.push("orbit.missed", o.missed);
}

fn verdicts(r: &mut Report, c: &Classification) {
    r.verdict("minimal", &c.minimal);
    r.verdict("topologically_free", &c.topologically_free);
    r.verdict("locally_contractive", &c.locally_contractive);
    r.verdict("effective", &c.effective);
    r.push(
        "trichotomy",
        c.trichotomy
            .map_or_else(|| "not_applicable".to_string(), |t| t.to_string()),
    );
}

pub fn analyze_report(
    g: &GraphOfGroups,
    c: &Classification,
    depth: usize,
    wordlen: usize,
    exec: Exec,
) -> Report {
    let mut r = Report::new("analyze");
    verdicts(&mut r, c);
    let flow = FlowGraph::new(g);
    for (i, comp) in flow.cyclic_components().iter().enumerate() {
        let names: Vec<&str> = comp.iter().map(|&e| g.edge_name(e)).collect();
        r.push(format!("flow.component.{i}"), names.join(" "));
    }
    let tl: Vec<&str> = nontrivial_treelike_edges(g)
        .iter()
        .map(|&e| g.edge_name(e))
        .collect();
    r.push(
        "treelike_edges",
        if tl.is_empty() {
            "none".to_string()
        } else {
            tl.join(" ")
        },
    );
    orbit(&mut r, &orbit_minimality(g, depth, wordlen, exec));
    r
}

pub fn analyze_ray_report(
    ray: &RaySpec,
    c: &Classification,
    depth: usize,
    wordlen: usize,
) -> Report {
    let mut r = Report::new("analyze");
    r.push("kind", "ray");
    verdicts(&mut r, c);
    orbit(&mut r, &orbit_minimality_ray(ray, depth, wordlen));
    r
}

pub fn classify_report(c: &Classification) -> Report {
    let mut r = Report::new("classify");
    verdicts(&mut r, c);
    r.verdict("simple", &c.simple);
    r.verdict("nuclear", &c.nuclear);
    r.verdict("purely_infinite", &c.purely_infinite);
    r.push("dichotomy", c.dichotomy);
    if let Some(k) = &c.k_theory {
        r.push("betti", k.betti);
        r.push("K0", &k.k0);
        r.push("K1", &k.k1);
        r.push("unit_class", &k.unit_class);
    }
    if let Some(s) = &c.supernatural {
        r.push("supernatural", s);
    }
    for (i, n) in c.notes.iter().enumerate() {
        r.push(format!("note.{i}"), n);
    }
    r
}

pub fn gfamily_report(
    xi: &str,
    depth: usize,
    eg: &DirectedGraphEG,
    ck: &CkReport,
    rel: &RelationReport,
) -> Report {
    let mut r = Report::new("gfamily-verify");
    r.push("E0", eg.vertices.len());
    r.push("E1", eg.edges.len());
    r.push("row_finite", eg.is_row_finite());
    r.push("no_sources", eg.has_no_sources());
    r.push(
        "symbolic.CK1",
        format!("{}/{}", ck.ck1_checked - ck.ck1_failed, ck.ck1_checked),
    );
    r.push(
        "symbolic.CK2",
        format!("{}/{}", ck.ck2_checked - ck.ck2_failed, ck.ck2_checked),
    );
    r.push("xi", xi);
    r.push("truncation", depth);
    r.push("basis", rel.basis_dim);
    r.push("interior", rel.interior_dim);
    for row in &rel.rows {
        r.push(
            format!("relation.{}", row.name),
            format!(
                "instances={} checked={} boundary={} max_defect={}",
                row.instances, row.checked_columns, row.boundary_columns, row.max_defect
            ),
        );
    }
    r.push(
        "status",
        if rel.all_hold() && ck.holds() {
            "hold"
        } else {
            "fail"
        },
    );
    r
}
