use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use aspstruct::graphs::{incidence_graph, primal_graph, typed_primal_graphs, Graph};
use aspstruct::kernel::{decide_consistency_vc, incidence_rule_vertex, kernelize_extended, kernelize_incidence, kernelize_primal};
use aspstruct::oracle::{check_mapping, check_projection, enumerate_answer_sets, is_consistent, CheckMode, OracleBudget};
use aspstruct::program::render_program;
use aspstruct::reductions::{
    bound_degree, parse_dimacs, reduce_fvs, reduce_fvs_almost_paths, reduce_td, reduce_td_localized, sat_to_asp,
    sat_to_asp_exclusive, DegreeScheme, FvsOptions, ReductionOutput, TdMode,
};
use aspstruct::structparams::{
    annotate, cuthill_mckee, exact_bandwidth, exact_cutwidth, is_sparse, layout_bandwidth, layout_cutwidth, make_nice,
    min_fvs, min_sparse_fvs, min_vertex_cover, path_decomposition, tree_decomposition, treedepth_witness_from_fvs, verify_fvs,
    verify_pd, verify_td, verify_tremaux, verify_vertex_cover, Optimality, PdStrategy, TdStrategy, TreeDecomposition,
    EXACT_LIMIT,
};
use aspstruct::{parse_program, Program};
use serde_json::{json, Value};

use crate::io::{emit, names, read_input, read_program, Report};
use crate::{GraphFormat, GraphKind, KernelMode, ParamsArgs, ReduceMode, Scheme, SolveMethod, VerifyMode};

pub const CONSISTENT: u8 = 10;
pub const INCONSISTENT: u8 = 20;

pub fn graph(file: &Path, kind: GraphKind, format: GraphFormat) -> Result<u8> {
    let (p, _) = read_program(file)?;
    let render = |g: &Graph| match format {
        GraphFormat::Dot => g.to_dot(),
        GraphFormat::Json => g.to_json().to_string() + "\n",
    };
    let text = match kind {
        GraphKind::Primal => render(&primal_graph(&p)),
        GraphKind::Incidence => render(&incidence_graph(&p)),
        GraphKind::Typed => {
            let (g0, g1, g2) = typed_primal_graphs(&p);
            match format {
                GraphFormat::Dot => [g0, g1, g2].iter().map(|g| g.to_dot()).collect(),
                GraphFormat::Json => json!({"type0": g0.to_json(), "type1": g1.to_json(), "type2": g2.to_json()}).to_string() + "\n",
            }
        }
    };
    emit(None, &text)?;
    Ok(0)
}

fn optimality(o: Optimality) -> &'static str {
    match o {
        Optimality::Exact => "exact",
        Optimality::UpperBound => "upper-bound",
    }
}

fn bags(p: &Program, bags: &[BTreeSet<usize>]) -> Vec<Vec<String>> {
    bags.iter().map(|b| names(p, b.iter().copied())).collect()
}

fn ensure(ok: bool, what: &str) -> Result<()> {
    if !ok {
        bail!("witness verification failed: {what}");
    }
    Ok(())
}

pub fn params(a: &ParamsArgs) -> Result<u8> {
    let (p, digest) = read_program(&a.file)?;
    let all = !(a.vc || a.fvs || a.sparse_fvs || a.td || a.pd || a.layout || a.tremaux);
    let g = primal_graph(&p);
    let mut rep = Report::new(Some(digest));
    rep.put("graph", json!({"atoms": p.num_atoms(), "rules": p.num_rules(), "primal_edges": g.num_edges()}));
    if all || a.vc {
        let s = min_vertex_cover(&g, None).ok_or_else(|| anyhow!("no vertex cover found"))?;
        ensure(verify_vertex_cover(&g, &s), "vertex cover")?;
        rep.put("vc", json!({"size": s.len(), "witness": names(&p, s), "optimality": "exact"}));
    }
    if all || a.fvs {
        let s = min_fvs(&g);
        ensure(verify_fvs(&g, &s), "feedback vertex set")?;
        rep.put("fvs", json!({"size": s.len(), "witness": names(&p, s), "optimality": "exact"}));
    }
    if all || a.sparse_fvs {
        let s = min_sparse_fvs(&p);
        ensure(verify_fvs(&g, &s) && is_sparse(&p, &s), "sparse feedback vertex set")?;
        rep.put("sparse_fvs", json!({"size": s.len(), "witness": names(&p, s), "optimality": "exact"}));
    }
    if all || a.td {
        let (td, o) = tree_decomposition(&g, if a.exact { TdStrategy::Exact } else { TdStrategy::MinFill });
        ensure(verify_td(&g, &td), "tree decomposition")?;
        rep.put(
            "td",
            json!({"width": td.width(), "optimality": optimality(o), "bags": bags(&p, &td.bags), "parent": td.parent, "root": td.root}),
        );
    }
    if all || a.pd {
        let (pd, o) = path_decomposition(&g, if a.exact { PdStrategy::Exact } else { PdStrategy::Heuristic });
        ensure(verify_pd(&g, &pd), "path decomposition")?;
        rep.put("pd", json!({"width": pd.width(), "optimality": optimality(o), "bags": bags(&p, &pd.bags)}));
    }
    if all || a.layout {
        let n = g.num_vertices();
        let (bw, bw_layout, cw, cw_layout, o) = if a.exact && n <= EXACT_LIMIT {
            let (bw, f) = exact_bandwidth(&g);
            let (cw, h) = exact_cutwidth(&g);
            (bw, f, cw, h, Optimality::Exact)
        } else {
            let f = cuthill_mckee(&g);
            (layout_bandwidth(&g, &f)?, f.clone(), layout_cutwidth(&g, &f)?, f, Optimality::UpperBound)
        };
        ensure(layout_bandwidth(&g, &bw_layout)? == bw && layout_cutwidth(&g, &cw_layout)? == cw, "linear layout")?;
        rep.put(
            "layout",
            json!({
                "bandwidth": bw,
                "bandwidth_order": names(&p, bw_layout.order.iter().copied()),
                "cutwidth": cw,
                "cutwidth_order": names(&p, cw_layout.order.iter().copied()),
                "optimality": optimality(o),
            }),
        );
    }
    if all || a.tremaux {
        let s: Vec<usize> = min_fvs(&g).into_iter().collect();
        let t = treedepth_witness_from_fvs(&g, &s)?;
        let height = verify_tremaux(&g, &t)?;
        let parent: Vec<Option<&str>> = t.parent.iter().map(|q| q.map(|v| p.name(v))).collect();
        rep.put("tremaux", json!({"height": height, "parent": parent, "optimality": "upper-bound"}));
    }
    emit(None, &rep.pretty())?;
    Ok(0)
}

fn read_names(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(text.lines().map(|l| l.split('%').next().unwrap_or("")).flat_map(str::split_whitespace).map(String::from).collect())
}

fn atom_ids(p: &Program, names: &[String]) -> Result<Vec<usize>> {
    names.iter().map(|n| p.atom_id(n).ok_or_else(|| anyhow!("unknown atom `{n}`"))).collect()
}

pub fn kernel(
    file: &Path,
    mode: KernelMode,
    c: Option<usize>,
    cover: Option<&Path>,
    output: Option<&Path>,
    report: Option<&Path>,
) -> Result<u8> {
    let (p, digest) = read_program(file)?;
    let c = c.unwrap_or_else(|| p.max_rule_size().max(1));
    let given = cover.map(read_names).transpose()?;
    let k = match mode {
        KernelMode::Primal => {
            let s = match given {
                Some(n) => atom_ids(&p, &n)?.into_iter().collect(),
                None => min_vertex_cover(&primal_graph(&p), None).expect("unbounded search finds a cover"),
            };
            kernelize_primal(&p, &s, c)?
        }
        KernelMode::Extended => {
            let s = match given {
                Some(n) => atom_ids(&p, &n)?.into_iter().collect(),
                None => min_vertex_cover(&typed_primal_graphs(&p).0, None).expect("unbounded search finds a cover"),
            };
            kernelize_extended(&p, &s, c)?
        }
        KernelMode::Incidence => {
            let s = match given {
                Some(n) => n
                    .iter()
                    .map(|x| p.atom_id(x).or_else(|| incidence_rule_vertex(&p, x)).ok_or_else(|| anyhow!("unknown atom or rule `{x}`")))
                    .collect::<Result<BTreeSet<usize>>>()?,
                None => min_vertex_cover(&incidence_graph(&p), None).expect("unbounded search finds a cover"),
            };
            kernelize_incidence(&p, &s, c)?
        }
    };
    emit(output, &render_program(&k.program))?;
    if let Some(path) = report {
        let mut rep = Report::new(Some(digest));
        rep.put(
            "kernel",
            json!({
                "c": c,
                "cover": k.cover,
                "atoms_before": p.num_atoms(),
                "atoms_after": k.program.num_atoms(),
                "rules_after": k.program.num_rules(),
                "bounds": k.bounds,
                "log": k.log,
            }),
        );
        emit(Some(path), &rep.pretty())?;
    }
    Ok(0)
}

fn read_td(path: &Path, g: &Graph) -> Result<TreeDecomposition> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let (td, n) = TreeDecomposition::from_pace(&text)?;
    if n != g.num_vertices() {
        bail!("decomposition is over {n} vertices, the primal graph has {}", g.num_vertices());
    }
    Ok(td)
}

fn write_reduction(dir: &Path, program: &Program, sidecar: &Value) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    emit(Some(&dir.join("program.lp")), &render_program(program))?;
    emit(Some(&dir.join("sidecar.json")), &(serde_json::to_string_pretty(sidecar)? + "\n"))
}

pub fn reduce(file: &Path, mode: ReduceMode, witness: Option<&Path>, out: &Path, literal: bool, scheme: Scheme) -> Result<u8> {
    let (p, digest) = read_program(file)?;
    let g = primal_graph(&p);
    let td_mode = if literal { TdMode::Literal } else { TdMode::Sound };
    let mut rep = Report::new(Some(digest));
    let summary = |o: &ReductionOutput| json!({"atoms": o.program.num_atoms(), "rules": o.program.num_rules(), "parameters": o.params, "witness": o.witness});
    match mode {
        ReduceMode::Fvs | ReduceMode::FvsPaths => {
            let s = match witness {
                Some(w) => atom_ids(&p, &read_names(w)?)?,
                None if mode == ReduceMode::FvsPaths => p.used_atoms(),
                None => min_sparse_fvs(&p).into_iter().collect(),
            };
            let o = if mode == ReduceMode::Fvs {
                reduce_fvs(&p, &s, &FvsOptions::default())?
            } else {
                reduce_fvs_almost_paths(&p, &s, &FvsOptions::default())?
            };
            write_reduction(out, &o.program, &o.sidecar())?;
            rep.put("reduction", summary(&o));
        }
        ReduceMode::Td | ReduceMode::TdLocal => {
            let td = match witness {
                Some(w) => read_td(w, &g)?,
                None if mode == ReduceMode::TdLocal => path_decomposition(&g, PdStrategy::Heuristic).0.to_td(),
                None => tree_decomposition(&g, TdStrategy::MinFill).0,
            };
            let a = annotate(&make_nice(&td), &p)?;
            let o = if mode == ReduceMode::Td { reduce_td(&p, &a, td_mode)? } else { reduce_td_localized(&p, &a, td_mode)? };
            write_reduction(out, &o.program, &o.sidecar())?;
            rep.put("reduction", summary(&o));
        }
        ReduceMode::Degree => {
            let td = match witness {
                Some(w) => read_td(w, &g)?,
                None => tree_decomposition(&g, TdStrategy::MinFill).0,
            };
            let scheme = match scheme {
                Scheme::Paired => DegreeScheme::Paired,
                Scheme::Ring => DegreeScheme::Ring,
            };
            let d = bound_degree(&p, &td, scheme)?;
            let map: Vec<[&str; 2]> = d.map.iter().enumerate().map(|(o, &s)| [d.program.name(o), p.name(s)]).collect();
            let sidecar = json!({
                "map": map,
                "witness": {
                    "bags": bags(&d.program, &d.witness.bags),
                    "parent": d.witness.parent,
                    "root": d.witness.root,
                    "width": d.witness.width(),
                },
                "parameters": {"kind": "degree", "scheme": format!("{scheme:?}").to_lowercase()},
            });
            write_reduction(out, &d.program, &sidecar)?;
            let (pg, ig) = (primal_graph(&d.program), incidence_graph(&d.program));
            rep.put(
                "reduction",
                json!({
                    "atoms": d.program.num_atoms(),
                    "rules": d.program.num_rules(),
                    "primal_max_degree": pg.max_degree(),
                    "incidence_max_degree": ig.max_degree(),
                    "witness_width": d.witness.width(),
                }),
            );
        }
    }
    emit(None, &rep.pretty())?;
    Ok(0)
}

pub fn solve(file: &Path, method: SolveMethod, c: Option<usize>, count: bool, models: bool) -> Result<u8> {
    let (p, digest) = read_program(file)?;
    let budget = OracleBudget::from_env();
    let mut rep = Report::new(Some(digest));
    let consistent = match method {
        SolveMethod::Oracle if count || models => {
            let sets = enumerate_answer_sets(&p, &budget)?;
            let mut r = json!({"consistent": !sets.is_empty(), "answer_sets": sets.len()});
            if models {
                r["models"] = json!(sets.iter().map(|m| p.set_names(m)).collect::<Vec<_>>());
            }
            rep.put("solve", r);
            !sets.is_empty()
        }
        SolveMethod::Oracle => {
            let ok = is_consistent(&p, &budget)?;
            rep.put("solve", json!({"consistent": ok}));
            ok
        }
        SolveMethod::Vc => {
            let c = c.unwrap_or_else(|| p.max_rule_size().max(3));
            let d = decide_consistency_vc(&p, c, &budget)?;
            rep.put("solve", json!(d));
            d.consistent
        }
    };
    emit(None, &rep.pretty())?;
    Ok(if consistent { CONSISTENT } else { INCONSISTENT })
}

pub fn verify(src: &Path, out_dir: &Path, mode: VerifyMode) -> Result<u8> {
    let (p, digest) = read_program(src)?;
    let (o, _) = read_program(&out_dir.join("program.lp"))?;
    let sidecar_path = out_dir.join("sidecar.json");
    let sidecar: Value = serde_json::from_str(&fs::read_to_string(&sidecar_path).with_context(|| format!("reading {}", sidecar_path.display()))?)
        .with_context(|| format!("parsing {}", sidecar_path.display()))?;
    let mode = match mode {
        VerifyMode::Set => CheckMode::Set,
        VerifyMode::Bijection => CheckMode::Bijection,
        VerifyMode::Consistency => CheckMode::Consistency,
    };
    let budget = OracleBudget::from_env();
    let report = if let Some(map) = sidecar.get("map").and_then(Value::as_array) {
        let mut pairs = Vec::with_capacity(map.len());
        for entry in map {
            let pair = entry.as_array().filter(|e| e.len() == 2).ok_or_else(|| anyhow!("malformed map entry {entry}"))?;
            let name = |v: &Value| v.as_str().map(String::from).ok_or_else(|| anyhow!("malformed map entry {entry}"));
            let (on, sn) = (name(&pair[0])?, name(&pair[1])?);
            let oid = o.atom_id(&on).ok_or_else(|| anyhow!("unknown output atom `{on}`"))?;
            let sid = p.atom_id(&sn).ok_or_else(|| anyhow!("unknown source atom `{sn}`"))?;
            pairs.push((oid, sid));
        }
        check_mapping(&p, &o, &pairs, mode, &budget)?
    } else {
        let projection: Vec<String> = sidecar
            .get("projection")
            .and_then(Value::as_array)
            .ok_or_else(|| anyhow!("sidecar has neither `map` nor `projection`"))?
            .iter()
            .map(|v| v.as_str().map(String::from).ok_or_else(|| anyhow!("malformed projection entry {v}")))
            .collect::<Result<_>>()?;
        check_projection(&p, &o, &projection, mode, &budget)?
    };
    let pass = report.pass;
    let mut rep = Report::new(Some(digest));
    rep.put("verify", json!(report));
    emit(None, &rep.pretty())?;
    if !pass {
        bail!("correspondence check failed");
    }
    Ok(0)
}

pub fn sat2asp(file: &Path, exclusive: bool, output: Option<&Path>) -> Result<u8> {
    let input = read_input(file)?;
    let f = parse_dimacs(&input.text).with_context(|| format!("parsing {}", file.display()))?;
    let p = if exclusive { sat_to_asp_exclusive(&f)? } else { sat_to_asp(&f)? };
    let text = render_program(&p);
    debug_assert!(parse_program(&text).is_ok());
    emit(output, &text)?;
    Ok(0)
}
