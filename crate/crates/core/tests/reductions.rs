use std::collections::BTreeSet;

use aspstruct::generate::{random_3cnf, random_fully_tight, random_tight_program, rng};
use aspstruct::graphs::{incidence_graph, primal_graph};
use aspstruct::oracle::{check_mapping, check_projection, enumerate_answer_sets, CheckMode, OracleBudget};
use aspstruct::program::{parse_program, Program};
use aspstruct::reductions::{
    bound_degree, ceil_log2, fvs_witness_for_reduced, localized_pd_witness, model_count_brute, reduce_fvs,
    reduce_fvs_almost_paths, reduce_td, reduce_td_localized, sat_to_asp, sat_to_asp_exclusive, td_witness_for_reduced,
    DegreeScheme, FvsOptions, ReductionOutput, TdMode,
};
use aspstruct::structparams::{
    annotate, bandwidth_layout_from_pd, check_almost_paths, layout_bandwidth, pd_bandwidth_bound, make_nice, min_sparse_fvs,
    tree_decomposition, AnnotatedTD, PathDecomposition, TdStrategy, TreeDecomposition,
};
use proptest::prelude::*;

fn set_pass(p: &Program, out: &ReductionOutput) -> bool {
    let rep = check_projection(p, &out.program, &out.projection, CheckMode::Set, &OracleBudget::default()).unwrap();
    rep.pass
}

fn annotated(p: &Program) -> AnnotatedTD {
    let (td, _) = tree_decomposition(&primal_graph(p), TdStrategy::MinFill);
    annotate(&make_nice(&td), p).unwrap()
}

#[test]
fn fvs_on_generated_programs() {
    let mut r = rng(11);
    for _ in 0..25 {
        let p = random_fully_tight(&mut r, 3);
        let s: Vec<usize> = min_sparse_fvs(&p).into_iter().collect();
        let out = reduce_fvs(&p, &s, &FvsOptions::default()).unwrap();
        assert!(set_pass(&p, &out), "{p}");
        let w = fvs_witness_for_reduced(&out).unwrap();
        assert!(w.set.len() <= 6 * ceil_log2(s.len()).max(1) + 8);
        assert_eq!(out.provenance.len(), out.program.num_rules());
    }
}

#[test]
fn almost_paths_with_all_atoms() {
    let mut r = rng(12);
    for _ in 0..15 {
        let p = random_fully_tight(&mut r, 3);
        let all = p.used_atoms();
        let out = reduce_fvs_almost_paths(&p, &all, &FvsOptions::default()).unwrap();
        assert!(set_pass(&p, &out), "{p}");
        let w = fvs_witness_for_reduced(&out).unwrap();
        let ap = check_almost_paths(&incidence_graph(&out.program), &w.set);
        assert!(ap.ok, "{ap:?}");
    }
}

#[test]
fn saturation_shape() {
    let p = parse_program("a :- not b.\nb :- not a.\n:- a, b.").unwrap();
    let out = reduce_fvs(&p, &[0, 1], &FvsOptions::default()).unwrap();
    let fixed: BTreeSet<usize> = (0..out.program.num_atoms())
        .filter(|&a| {
            let n = out.program.name(a);
            !["a", "b", "a_bar", "b_bar"].contains(&n)
        })
        .collect();
    for m in enumerate_answer_sets(&out.program, &OracleBudget::default()).unwrap() {
        assert!(fixed.is_subset(&m));
    }
}

#[test]
fn td_on_generated_programs() {
    let mut r = rng(13);
    for _ in 0..12 {
        let p = random_fully_tight(&mut r, 3);
        let a = annotated(&p);
        let out = reduce_td(&p, &a, TdMode::Sound).unwrap();
        assert!(set_pass(&p, &out), "{p}");
        let w = td_witness_for_reduced(&out, &a).unwrap();
        assert!(w.width <= 20 * ceil_log2(a.td.width()).max(1) + 14);
    }
}

#[test]
fn localized_on_paths() {
    let mut r = rng(14);
    for _ in 0..6 {
        let p = random_fully_tight(&mut r, 3);
        let all: BTreeSet<usize> = (0..p.num_atoms()).collect();
        let a = annotate(&make_nice(&TreeDecomposition::single(all)), &p).unwrap();
        let out = reduce_td_localized(&p, &a, TdMode::Sound).unwrap();
        assert!(set_pass(&p, &out), "{p}");
        let pd = localized_pd_witness(&out, &a).unwrap();
        let g = primal_graph(&out.program);
        let f = bandwidth_layout_from_pd(&g, &pd).unwrap();
        assert!(layout_bandwidth(&g, &f).unwrap() <= pd_bandwidth_bound(pd.width()));
    }
}

#[test]
fn degree_bound_on_random_programs() {
    let mut r = rng(15);
    for i in 0..30 {
        let p = random_tight_program(&mut r, 6, 7);
        let (td, _) = tree_decomposition(&primal_graph(&p), TdStrategy::MinFill);
        let scheme = if i % 2 == 0 { DegreeScheme::Paired } else { DegreeScheme::Ring };
        let d = bound_degree(&p, &td, scheme).unwrap();
        assert!(primal_graph(&d.program).max_degree() <= 4);
        if scheme == DegreeScheme::Ring {
            let g = incidence_graph(&d.program);
            assert!((0..d.program.num_atoms()).all(|v| g.degree(v) <= 3));
        }
        let rep = check_mapping(&p, &d.program, &d.pairs(), CheckMode::Bijection, &OracleBudget::default()).unwrap();
        assert!(rep.pass, "{rep:?}");
    }
}

#[test]
fn degree_width_on_paths() {
    let p = parse_program("a :- not b.\nb :- not c.\nc :- not d.\nd :- a.").unwrap();
    let pd = PathDecomposition { bags: vec![[0, 1, 3].into(), [1, 2, 3].into()] };
    let d = bound_degree(&p, &pd.to_td(), DegreeScheme::Paired).unwrap();
    assert!(d.witness.width() <= 2 * pd.width() + 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sat_encoding_counts(seed in any::<u64>(), vars in 1usize..9, clauses in 0usize..10) {
        let f = random_3cnf(&mut rng(seed), vars, clauses);
        let count = model_count_brute(&f).unwrap() as usize;
        let b = OracleBudget::default();
        prop_assert_eq!(enumerate_answer_sets(&sat_to_asp(&f).unwrap(), &b).unwrap().len(), count);
        prop_assert_eq!(enumerate_answer_sets(&sat_to_asp_exclusive(&f).unwrap(), &b).unwrap().len(), count);
    }

    #[test]
    fn fvs_consistency_equivalence(seed in any::<u64>()) {
        let p = random_fully_tight(&mut rng(seed), 4);
        let s: Vec<usize> = min_sparse_fvs(&p).into_iter().collect();
        let out = reduce_fvs(&p, &s, &FvsOptions::default()).unwrap();
        let rep = check_projection(&p, &out.program, &out.projection, CheckMode::Consistency, &OracleBudget::default()).unwrap();
        prop_assert!(rep.pass);
    }
}
