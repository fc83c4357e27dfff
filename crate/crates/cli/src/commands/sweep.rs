//! `sweep`: the bounds pipeline over a field range or a size range, one
//! CSV row per point.
//!
//! A field sweep holds the model size fixed and steps B, matching how
//! gapped-versus-gapless phase structure is usually plotted. A size
//! sweep holds the couplings fixed and grows the system, which is where
//! the reduced bound earns its keep (the classic lower bound decays with
//! size). Points are evaluated in parallel; rows are buffered and
//! emitted in sweep order, so output bytes do not depend on the worker
//! count.

use cheeger_gap::{Error, ModelSpec, Result};

use crate::cli::SweepArgs;
use crate::config::RunConfig;
use crate::output::{csv_line, emit, fmt_float};
use crate::parallel;
use crate::pipeline;

pub const FIELD_HEADER: &str = "B,delta,two_phi,classic_lower,generalized_lower,mode";
pub const SIZE_HEADER: &str = "n,phi,classic_lower,generalized_lower,delta,mode";

enum Axis {
    Field { values: Vec<f64> },
    Size { values: Vec<usize> },
}

fn axis(args: &SweepArgs) -> Result<Axis> {
    let field = (args.b_start, args.b_stop);
    let size = (args.n_start, args.n_stop);
    match (field, size) {
        ((Some(start), Some(stop)), (None, None)) => {
            let step = args
                .b_step
                .ok_or_else(|| Error::Validation("a B sweep needs --B-step".into()))?;
            if !(step > 0.0) || stop < start {
                return Err(Error::Validation(
                    "need --B-step > 0 and --B-stop >= --B-start".into(),
                ));
            }
            // Count from the range so accumulated rounding cannot drop
            // the final point; 0.2 steps land at 14.999... without help.
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            let values = (0..count).map(|i| start + step * i as f64).collect();
            Ok(Axis::Field { values })
        }
        ((None, None), (Some(start), Some(stop))) => {
            let step = args.n_step.unwrap_or(1);
            if step == 0 || stop < start {
                return Err(Error::Validation(
                    "need --n-step > 0 and --n-stop >= --n-start".into(),
                ));
            }
            let values = (start..=stop).step_by(step).collect();
            Ok(Axis::Size { values })
        }
        _ => Err(Error::Validation(
            "give exactly one range: --B-start/--B-stop/--B-step or --n-start/--n-stop".into(),
        )),
    }
}

fn field_spec(args: &SweepArgs, b: f64) -> Result<ModelSpec> {
    let family = args
        .model
        .model
        .as_deref()
        .ok_or_else(|| Error::Validation("--model is required".into()))?;
    let n = args
        .model
        .n
        .ok_or_else(|| Error::Validation("a B sweep needs --n".into()))?;
    match family {
        "transverse" => Ok(ModelSpec::TransverseField { n, b }),
        "ising" => Ok(ModelSpec::IsingChain { n, b }),
        other => Err(Error::Validation(format!(
            "a B sweep supports transverse and ising, not \"{other}\""
        ))),
    }
}

fn size_spec(args: &SweepArgs, size: usize) -> Result<ModelSpec> {
    let family = args
        .model
        .model
        .as_deref()
        .ok_or_else(|| Error::Validation("--model is required".into()))?;
    match family {
        "ring" => Ok(ModelSpec::Ring {
            n: size,
            t: args.model.t.unwrap_or(1.0),
        }),
        "transverse" => Ok(ModelSpec::TransverseField {
            n: size,
            b: args.model.b.unwrap_or(1.0),
        }),
        "ising" => Ok(ModelSpec::IsingChain {
            n: size,
            b: args.model.b.unwrap_or(1.0),
        }),
        other => Err(Error::Validation(format!(
            "an n sweep supports ring, transverse, and ising, not \"{other}\""
        ))),
    }
}

fn field_row(spec: &ModelSpec, b: f64, cfg: &RunConfig) -> Result<String> {
    let an = pipeline::analyze(spec, cfg)?;
    let bs = pipeline::bounds_summary(&an, spec, cfg)?;
    Ok(csv_line(&[
        fmt_float(b),
        if bs.dense { fmt_float(bs.gap) } else { String::new() },
        fmt_float(bs.upper),
        fmt_float(bs.classic),
        fmt_float(bs.generalized),
        cfg.mode.to_string(),
    ]))
}

fn size_row(spec: &ModelSpec, size: usize, cfg: &RunConfig) -> Result<String> {
    let an = pipeline::analyze(spec, cfg)?;
    let bs = pipeline::bounds_summary(&an, spec, cfg)?;
    Ok(csv_line(&[
        size.to_string(),
        fmt_float(bs.cut.phi),
        fmt_float(bs.classic),
        fmt_float(bs.generalized),
        if bs.dense { fmt_float(bs.gap) } else { String::new() },
        cfg.mode.to_string(),
    ]))
}

pub fn run(args: &SweepArgs) -> Result<()> {
    let cfg = RunConfig::resolve(&args.common)?;
    let axis = axis(args)?;
    let (header, rows) = match &axis {
        Axis::Field { values } => {
            // Validate the template once up front so a bad model fails
            // before any work is spawned.
            field_spec(args, values[0])?;
            let workers = parallel::thread_count(values.len());
            let rows = parallel::ordered_map(values.len(), workers, |i| {
                let b = values[i];
                field_row(&field_spec(args, b)?, b, &cfg)
            });
            (FIELD_HEADER, rows)
        }
        Axis::Size { values } => {
            size_spec(args, values[0])?;
            let workers = parallel::thread_count(values.len());
            let rows = parallel::ordered_map(values.len(), workers, |i| {
                let size = values[i];
                size_row(&size_spec(args, size)?, size, &cfg)
            });
            (SIZE_HEADER, rows)
        }
    };
    let mut text = String::from(header);
    text.push('\n');
    for row in rows {
        text.push_str(&row?);
        text.push('\n');
    }
    emit(&text, cfg.output.as_deref())
}
