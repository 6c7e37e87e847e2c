use std::fmt::Write as _;

use anyhow::Result;
use aspstruct::generate::{random_fully_tight, rng};
use aspstruct::graphs::primal_graph;
use aspstruct::oracle::{check_projection, CheckMode, OracleBudget};
use aspstruct::reductions::{ceil_log2, reduce_fvs, reduce_td, td_witness_for_reduced, FvsOptions, TdMode, Witness};
use aspstruct::structparams::{annotate, make_nice, min_sparse_fvs, tree_decomposition, TdStrategy};
use clap::{Args, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::io::{emit, threads};

#[derive(Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 20)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Shape::NormalizedTight)]
    shape: Shape,
    /// Largest number of base atoms; instance i has 2 + i mod (atoms - 1).
    #[arg(long, default_value_t = 4)]
    atoms: usize,
    /// Check R_fvs answer-set correspondence with the oracle.
    #[arg(long)]
    verify: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Shape {
    /// Normalized, tight and closed under completion (so also fully tight).
    NormalizedTight,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

const COLUMNS: [&str; 14] = [
    "instance",
    "atoms",
    "rules",
    "sparse_fvs",
    "treewidth",
    "fvs_out_atoms",
    "fvs_witness",
    "fvs_bound",
    "fvs_within",
    "td_out_atoms",
    "td_witness",
    "td_bound",
    "td_within",
    "verified",
];

fn instance(seed: u64, i: usize, max_atoms: usize, verify: bool) -> Result<Vec<Value>> {
    let mut r = rng(seed.wrapping_add(i as u64));
    let atoms = 2 + i % max_atoms.saturating_sub(1).max(1);
    let p = random_fully_tight(&mut r, atoms);
    let s: Vec<usize> = min_sparse_fvs(&p).into_iter().collect();
    let fvs = reduce_fvs(&p, &s, &FvsOptions::default())?;
    let fvs_witness = match &fvs.witness {
        Some(Witness::Fvs { size, .. }) => *size,
        _ => unreachable!("R_fvs always attaches its witness"),
    };
    let fvs_bound = 6 * ceil_log2(s.len()).max(1) + 8;

    let (td, _) = tree_decomposition(&primal_graph(&p), TdStrategy::MinFill);
    let a = annotate(&make_nice(&td), &p)?;
    let tdo = reduce_td(&p, &a, TdMode::Sound)?;
    let w = td_witness_for_reduced(&tdo, &a)?;
    let td_bound = 20 * ceil_log2(td.width()).max(1) + 14;

    let verified = if verify {
        match check_projection(&p, &fvs.program, &fvs.projection, CheckMode::Set, &OracleBudget::from_env()) {
            Ok(rep) => json!(rep.pass),
            Err(_) => json!("over-budget"),
        }
    } else {
        json!("skipped")
    };
    Ok(vec![
        json!(i),
        json!(p.num_atoms()),
        json!(p.num_rules()),
        json!(s.len()),
        json!(td.width()),
        json!(fvs.program.num_atoms()),
        json!(fvs_witness),
        json!(fvs_bound),
        json!(fvs_witness <= fvs_bound),
        json!(tdo.program.num_atoms()),
        json!(w.width),
        json!(td_bound),
        json!(w.width <= td_bound),
        verified,
    ])
}

pub fn run(args: &BenchArgs) -> Result<u8> {
    let Shape::NormalizedTight = args.shape;
    let work = || (0..args.n).into_par_iter().map(|i| instance(args.seed, i, args.atoms, args.verify)).collect::<Result<Vec<_>>>();
    let rows = match threads() {
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n).build()?.install(work)?,
        None => work()?,
    };
    let text = match args.format {
        Format::Csv => {
            let mut s = COLUMNS.join(",");
            s.push('\n');
            for row in &rows {
                let cells: Vec<String> = row.iter().map(|v| v.as_str().map_or_else(|| v.to_string(), String::from)).collect();
                let _ = writeln!(s, "{}", cells.join(","));
            }
            s
        }
        Format::Json => {
            let objs: Vec<Value> =
                rows.iter().map(|row| Value::Object(COLUMNS.iter().map(|c| c.to_string()).zip(row.iter().cloned()).collect())).collect();
            serde_json::to_string_pretty(&json!({"seed": args.seed, "shape": "normalized-tight", "instances": objs}))? + "\n"
        }
    };
    emit(None, &text)?;
    let failed = rows.iter().any(|r| r[8] == json!(false) || r[12] == json!(false) || r[13] == json!(false));
    Ok(u8::from(failed))
}
