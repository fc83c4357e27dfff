//! `gap`: the two lowest eigenvalues, their difference, and the solver
//! residuals for one model, as a single CSV row.

use cheeger_gap::{ModelSpec, Result};

use crate::config::RunConfig;
use crate::output::{csv_line, emit, fmt_float};
use crate::pipeline;

pub const HEADER: &str = "model,params,lambda0,lambda1,delta,residual0,residual1,method";

pub fn run(spec: &ModelSpec, cfg: &RunConfig) -> Result<()> {
    let an = pipeline::analyze(spec, cfg)?;
    let sp = &an.sp;
    let row = csv_line(&[
        spec.name().to_string(),
        spec.params(),
        fmt_float(sp.lambda0),
        fmt_float(sp.lambda1),
        fmt_float(sp.gap()),
        fmt_float(sp.residual0),
        fmt_float(sp.residual1),
        sp.method.to_string(),
    ]);
    emit(&format!("{HEADER}\n{row}\n"), cfg.output.as_deref())
}
