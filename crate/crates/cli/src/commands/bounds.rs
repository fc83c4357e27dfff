//! `bounds`: one CSV row collecting the Cheeger constant, the two-sided
//! classic estimate, and the reduced bound of every configured strategy.
//!
//! Column order is fixed: model identification, phi with the method that
//! found it, the classic pair, then three cells per strategy in the
//! configured order, then the dense gap when available, the best reduced
//! bound, and the minimization domain the reduced numbers were computed
//! in. A skipped strategy leaves its three cells empty rather than
//! reporting numbers that were never computed.

use cheeger_gap::{ModelSpec, ReductionStrategy, Result};

use crate::config::RunConfig;
use crate::output::{csv_line, emit, fmt_float};
use crate::pipeline::{self, BoundsSummary};

fn column_tag(s: ReductionStrategy) -> &'static str {
    match s {
        ReductionStrategy::CutOnly => "cut_only",
        ReductionStrategy::CutPlusPaths => "cut_plus_paths",
        ReductionStrategy::FullGraph => "full",
    }
}

pub fn header(strategies: &[ReductionStrategy]) -> String {
    let mut cols: Vec<String> = ["model", "params", "phi", "phi_method", "two_phi", "classic_lower"]
        .map(String::from)
        .to_vec();
    for s in strategies {
        let tag = column_tag(*s);
        cols.push(format!("{tag}_c"));
        cols.push(format!("{tag}_phi_tilde"));
        cols.push(format!("{tag}_bound"));
    }
    cols.extend(["delta", "generalized_lower", "mode"].map(String::from));
    csv_line(&cols)
}

pub fn row(spec: &ModelSpec, cfg: &RunConfig, bs: &BoundsSummary) -> String {
    let mut cells = vec![
        spec.name().to_string(),
        spec.params(),
        fmt_float(bs.cut.phi),
        bs.cut.method.to_string(),
        fmt_float(bs.upper),
        fmt_float(bs.classic),
    ];
    for s in &bs.strategies {
        if s.skipped.is_some() {
            cells.extend([String::new(), String::new(), String::new()]);
        } else {
            cells.push(fmt_float(s.constriction));
            cells.push(fmt_float(s.phi_tilde));
            cells.push(fmt_float(s.bound));
        }
    }
    cells.push(if bs.dense { fmt_float(bs.gap) } else { String::new() });
    cells.push(fmt_float(bs.generalized));
    cells.push(cfg.mode.to_string());
    csv_line(&cells)
}

pub fn run(spec: &ModelSpec, cfg: &RunConfig) -> Result<()> {
    let an = pipeline::analyze(spec, cfg)?;
    let bs = pipeline::bounds_summary(&an, spec, cfg)?;
    let text = format!("{}\n{}\n", header(&cfg.strategies), row(spec, cfg, &bs));
    emit(&text, cfg.output.as_deref())
}
