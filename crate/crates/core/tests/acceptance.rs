//! One line per acceptance criterion; exits non-zero when any criterion fails.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use aspstruct::generate::{random_3cnf, random_fully_tight, random_normalized_program, random_tight_program, random_two_bag_pd, rng};
use aspstruct::graphs::{incidence_graph, primal_graph};
use aspstruct::kernel::kernelize_primal;
use aspstruct::oracle::{check_mapping, check_projection, enumerate_answer_sets, is_consistent, CheckMode, OracleBudget};
use aspstruct::program::{completion, is_fully_tight, parse_program, Program};
use aspstruct::reductions::{
    bound_degree, ceil_log2, fvs_witness_for_reduced, model_count_brute, reduce_fvs, reduce_td, sat_to_asp,
    td_witness_for_reduced, DegreeScheme, FvsOptions, ReductionOutput, TdMode,
};
use aspstruct::structparams::{
    annotate, bandwidth_layout_from_pd, exact_bandwidth, exact_cutwidth, layout_bandwidth, layout_cutwidth, pd_bandwidth_bound,
    make_nice, min_fvs, min_sparse_fvs, min_vertex_cover, path_decomposition, tree_decomposition, treedepth_witness_from_fvs,
    verify_tremaux, PdStrategy, TdStrategy,
};

const PI1: &str = "b :- not a.\nb :- a, c.\na | d.\nc :- a, not d.";
const PI2: [&str; 11] = [
    "b :- not a.",
    "b :- a, c.",
    "a | d.",
    "c :- a, not d.",
    "r1_b | r2_b :- b.",
    ":- a, r1_b.",
    ":- r2_b, not a.",
    ":- r2_b, not c.",
    ":- a, d.",
    ":- c, not a.",
    ":- c, d.",
];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn names(p: &Program, s: &BTreeSet<usize>) -> BTreeSet<String> {
    s.iter().map(|&v| p.name(v).to_string()).collect()
}

fn set_pass(p: &Program, out: &ReductionOutput, budget: &OracleBudget) -> bool {
    check_projection(p, &out.program, &out.projection, CheckMode::Set, budget).is_ok_and(|r| r.pass)
}

fn c1() -> Outcome {
    let p = parse_program(PI1).unwrap();
    let sets: BTreeSet<BTreeSet<String>> =
        enumerate_answer_sets(&p, &OracleBudget::default()).unwrap().iter().map(|m| names(&p, m)).collect();
    let want: BTreeSet<BTreeSet<String>> =
        [vec!["b", "d"], vec!["a", "b", "c"]].iter().map(|s| s.iter().map(|x| x.to_string()).collect()).collect();
    let g = primal_graph(&p);
    let mut edges: Vec<(String, String)> = g
        .edges()
        .iter()
        .map(|&(u, v)| {
            let (a, b) = (p.name(u).to_string(), p.name(v).to_string());
            if a < b { (a, b) } else { (b, a) }
        })
        .collect();
    edges.sort();
    let fig: Vec<(String, String)> =
        [("a", "b"), ("a", "c"), ("a", "d"), ("b", "c"), ("c", "d")].iter().map(|&(a, b)| (a.into(), b.into())).collect();
    let inc = incidence_graph(&p).num_edges();
    outcome(sets == want && edges == fig && inc == 10, format!("answer sets {sets:?}, primal edges {}, incidence edges {inc}", edges.len()))
}

fn c2() -> Outcome {
    let p = parse_program(PI1).unwrap();
    let g = primal_graph(&p);
    let vc = min_vertex_cover(&g, None).unwrap();
    let fvs = min_fvs(&g);
    let sparse = min_sparse_fvs(&p);
    let tw = tree_decomposition(&g, TdStrategy::Exact).0.width();
    let pw = path_decomposition(&g, PdStrategy::Exact).0.width();
    let bw = exact_bandwidth(&g).0;
    let cw = exact_cutwidth(&g).0;
    let fvs_list: Vec<usize> = fvs.iter().copied().collect();
    let height = verify_tremaux(&g, &treedepth_witness_from_fvs(&g, &fvs_list).unwrap()).unwrap();
    let vc_names = names(&p, &vc);
    let fvs_names = names(&p, &fvs);
    let fvs_ok = fvs.len() == 1 && (fvs_names.contains("a") || fvs_names.contains("c"));
    let checks = [
        ("vc", vc.len() == 2 && vc_names == BTreeSet::from(["a".to_string(), "c".to_string()])),
        ("fvs", fvs_ok),
        ("sparse-fvs", sparse.len() == 2),
        ("tw", tw == 2),
        ("pw", pw == 2),
        ("bandwidth", bw == 2),
        ("cutwidth", cw == 3),
        ("tremaux", height == 2),
    ];
    let failed: Vec<&str> = checks.iter().filter(|(_, ok)| !ok).map(|(n, _)| *n).collect();
    outcome(
        failed.is_empty(),
        format!(
            "vc={} {vc_names:?}, fvs={} {fvs_names:?}, sparse-fvs={} {:?}, tw={tw}, pw={pw}, bw={bw}, cw={cw}, height={height}; mismatched: {failed:?}",
            vc.len(),
            fvs.len(),
            sparse.len(),
            names(&p, &sparse)
        ),
    )
}

fn c3() -> Outcome {
    let c = completion(&parse_program(PI1).unwrap(), true);
    let got: Vec<String> = c.rules().iter().map(|r| c.render_rule(r)).collect();
    let want = parse_program(&PI2.join("\n")).unwrap();
    let want: Vec<String> = want.rules().iter().map(|r| want.render_rule(r)).collect();
    let same = got.len() == want.len() && got.iter().zip(&want).all(|(a, b)| canon(a) == canon(b));
    let ft = is_fully_tight(&c, 16).unwrap_or(false);
    outcome(same && ft, format!("{} rules, rule-for-rule match {same}, fully tight {ft}", got.len()))
}

/// Rule text with body and head atoms sorted, so atom numbering does not matter.
fn canon(rule: &str) -> String {
    let r = rule.trim_end_matches('.');
    let (head, body) = r.split_once(":-").map(|(h, b)| (h.trim(), b.trim())).unwrap_or((r.trim(), ""));
    let mut h: Vec<&str> = head.split('|').map(str::trim).filter(|s| !s.is_empty()).collect();
    let mut b: Vec<&str> = body.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    h.sort();
    b.sort();
    format!("{}:-{}", h.join("|"), b.join(","))
}

fn c4() -> Outcome {
    let mut r = rng(4);
    let budget = OracleBudget::default();
    let (mut agree, mut within, mut total) = (0, 0, 0);
    for i in 0..500 {
        let atoms = 4 + i % 9;
        let p = random_normalized_program(&mut r, atoms, atoms + 2);
        let cover = min_vertex_cover(&primal_graph(&p), None).unwrap();
        let k = kernelize_primal(&p, &cover, 3).unwrap();
        total += 1;
        if is_consistent(&p, &budget).unwrap() == is_consistent(&k.program, &budget).unwrap() {
            agree += 1;
        }
        if k.program.num_atoms() as u128 <= k.bounds.stated {
            within += 1;
        }
    }
    outcome(agree == total && within == total, format!("{total} programs, consistency agrees {agree}, within bound {within}"))
}

fn c5() -> Outcome {
    let mut r = rng(5);
    let budget = OracleBudget::default();
    let mut set_ok = 0;
    let mut sizes = BTreeSet::new();
    for _ in 0..50 {
        let p = random_fully_tight(&mut r, 3);
        let s: Vec<usize> = min_sparse_fvs(&p).into_iter().collect();
        let out = reduce_fvs(&p, &s, &FvsOptions::default()).unwrap();
        sizes.insert(out.program.num_atoms());
        if set_pass(&p, &out, &budget) {
            set_ok += 1;
        }
    }
    let mut cons_ok = 0;
    for _ in 0..50 {
        let p = random_fully_tight(&mut r, 5);
        let s: Vec<usize> = min_sparse_fvs(&p).into_iter().collect();
        let out = reduce_fvs(&p, &s, &FvsOptions::default()).unwrap();
        if check_projection(&p, &out.program, &out.projection, CheckMode::Consistency, &budget).is_ok_and(|r| r.pass) {
            cons_ok += 1;
        }
    }
    let (lo, hi) = (sizes.first().copied().unwrap_or(0), sizes.last().copied().unwrap_or(0));
    outcome(set_ok == 50 && cons_ok == 50, format!("set 50/{set_ok} (output {lo}..{hi} atoms), consistency 50/{cons_ok}"))
}

fn c6() -> Outcome {
    let p2 = completion(&parse_program(PI1).unwrap(), true);
    let s: Vec<usize> = ["a", "r1_b", "c"].iter().map(|n| p2.atom_id(n).unwrap()).collect();
    let out = reduce_fvs(&p2, &s, &FvsOptions { floor: true, check: false }).unwrap();
    let o = &out.program;
    let bits: BTreeSet<&str> = o
        .names()
        .iter()
        .map(String::as_str)
        .filter(|n| n.len() == 4 && n.starts_with('b') && n.as_bytes()[2] == b'_')
        .collect();
    let r4 = o.atom_id("sat_r4").unwrap();
    let rules_for = |fams: &[u8]| -> BTreeSet<String> {
        fams.iter()
            .flat_map(|&f| out.family_rules(f))
            .filter(|&i| o.rule(i).pos.contains(&r4))
            .map(|i| canon(&o.render_rule(o.rule(i))))
            .collect()
    };
    let want4: BTreeSet<String> =
        ["sat :- sat_r4, b1_0.", "sat :- sat_r4, b1_1.", "sat :- sat_r4, b2_0.", "sat :- sat_r4, b2_1_bar."].iter().map(|s| canon(s)).collect();
    let want68: BTreeSet<String> = ["sat :- sat_r4, v1_bar.", "sat :- sat_r4, v2.", "sat :- sat_r4, d."].iter().map(|s| canon(s)).collect();
    let (f4, f68) = (rules_for(&[4]), rules_for(&[6, 7, 8]));
    outcome(
        bits.len() == 6 && f4 == want4 && f68 == want68,
        format!("{} positive bit atoms, family (4) for r4 {:?}, families (6)-(8) for r4 {:?}", bits.len(), f4, f68),
    )
}

fn c7() -> Outcome {
    let mut r = rng(7);
    let limit = Duration::from_secs(1);
    let (mut fvs_ok, mut td_ok, mut slow) = (0, 0, 0);
    let mut worst_td = (0, 0);
    for _ in 0..40 {
        let p = random_fully_tight(&mut r, 4);
        let t = Instant::now();
        let s: Vec<usize> = min_sparse_fvs(&p).into_iter().collect();
        let out = reduce_fvs(&p, &s, &FvsOptions::default()).unwrap();
        if fvs_witness_for_reduced(&out).is_ok_and(|w| w.set.len() <= 6 * ceil_log2(s.len()).max(1) + 8) {
            fvs_ok += 1;
        }
        let (td, _) = tree_decomposition(&primal_graph(&p), TdStrategy::MinFill);
        let a = annotate(&make_nice(&td), &p).unwrap();
        let bound = 20 * ceil_log2(a.td.width()).max(1) + 14;
        let out = reduce_td(&p, &a, TdMode::Sound).unwrap();
        if let Ok(w) = td_witness_for_reduced(&out, &a) {
            if w.width <= bound {
                td_ok += 1;
            }
            worst_td = worst_td.max((w.width, bound));
        }
        if t.elapsed() > limit {
            slow += 1;
        }
    }
    outcome(
        fvs_ok == 40 && td_ok == 40 && slow == 0,
        format!("FVS witness 40/{fvs_ok}, TD witness 40/{td_ok} (widest {} vs bound {}), over 1 s: {slow}", worst_td.0, worst_td.1),
    )
}

fn c8() -> Outcome {
    let mut r = rng(8);
    let (mut bw_ok, mut cw_ok) = (0, 0);
    for i in 0..200 {
        let (g, pd) = random_two_bag_pd(&mut r, 3 + i % 6, 1 + i % 4);
        let f = bandwidth_layout_from_pd(&g, &pd).unwrap();
        let bw = layout_bandwidth(&g, &f).unwrap();
        if bw <= pd_bandwidth_bound(pd.width()) {
            bw_ok += 1;
        }
        if layout_cutwidth(&g, &f).unwrap() <= g.max_degree() * bw {
            cw_ok += 1;
        }
    }
    outcome(bw_ok == 200 && cw_ok == 200, format!("bandwidth ≤ 2k-1: 200/{bw_ok}, cutwidth ≤ maxdeg·bandwidth: 200/{cw_ok}"))
}

fn c9() -> Outcome {
    let mut r = rng(9);
    let budget = OracleBudget::default();
    let (mut deg_ok, mut checked, mut bij_ok) = (0, 0, 0);
    for i in 0..100 {
        let atoms = 4 + i % 5;
        let p = random_tight_program(&mut r, atoms, atoms + 1);
        let (td, _) = tree_decomposition(&primal_graph(&p), TdStrategy::MinFill);
        let d = bound_degree(&p, &td, DegreeScheme::Ring).unwrap();
        if primal_graph(&d.program).max_degree() <= 4 && incidence_graph(&d.program).max_degree() <= 3 {
            deg_ok += 1;
        }
        if let Ok(rep) = check_mapping(&p, &d.program, &d.pairs(), CheckMode::Bijection, &budget) {
            checked += 1;
            if rep.pass {
                bij_ok += 1;
            }
        }
    }
    outcome(deg_ok == 100 && bij_ok == checked, format!("degrees within bounds 100/{deg_ok}, bijection {checked}/{bij_ok} in budget"))
}

fn c10() -> Outcome {
    let mut r = rng(10);
    let budget = OracleBudget::default();
    let mut ok = 0;
    for i in 0..200 {
        let vars = 1 + i % 15;
        let clauses = vars + (i * 7) % (3 * vars + 1);
        let f = random_3cnf(&mut r, vars, clauses);
        let want = model_count_brute(&f).unwrap() as usize;
        if enumerate_answer_sets(&sat_to_asp(&f).unwrap(), &budget).is_ok_and(|s| s.len() == want) {
            ok += 1;
        }
    }
    outcome(ok == 200, format!("answer-set count equals model count 200/{ok}"))
}

/// Name, check, time limit in seconds.
type Criterion = (&'static str, fn() -> Outcome, u64);

fn main() {
    let criteria: [Criterion; 10] = [
        ("running example: answer sets and graphs", c1, 1),
        ("running example: structural parameters", c2, 5),
        ("completion regression", c3, 1),
        ("kernel soundness and size bound", c4, 600),
        ("R_fvs answer-set correspondence", c5, 1800),
        ("R_fvs worked example", c6, 1),
        ("witness size formulas", c7, 60),
        ("layout lemmas", c8, 60),
        ("degree bound", c9, 600),
        ("SAT pipeline", c10, 300),
    ];
    let mut failures = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = run();
        let secs = t.elapsed().as_secs_f64();
        let pass = o.pass && secs < *limit as f64;
        if !pass {
            failures += 1;
        }
        println!("criterion {:>2} {}: {name} [{secs:.2}s / {limit}s] {}", i + 1, if pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
