//! `export-graph` and `export-network`: text dumps of the dressed graph
//! and of the certification flow network with its maximum flow.

use cheeger_gap::{
    apply_strategy, build_network, graph_to_text, max_flow, network_to_text, positive_support,
    reduced_cheeger, Error, ModelSpec, ReductionStrategy, Result,
};

use crate::cli::ExportNetworkArgs;
use crate::config::RunConfig;
use crate::output::emit;
use crate::pipeline;

pub fn graph(spec: &ModelSpec, cfg: &RunConfig) -> Result<()> {
    let an = pipeline::analyze(spec, cfg)?;
    emit(&graph_to_text(&an.g), cfg.output.as_deref())
}

pub fn network(args: &ExportNetworkArgs) -> Result<()> {
    let cfg = RunConfig::resolve(&args.common)?;
    let spec = args.model.required()?;
    let strategy: ReductionStrategy = args.strategy.parse().map_err(Error::Validation)?;
    let an = pipeline::analyze(&spec, &cfg)?;
    let side = match args.support.as_str() {
        "cut" => pipeline::best_cut(&an.g, Some(&spec), &cfg)?.cut.subset,
        "positive" => positive_support(&an.sp)?.support().to_vec(),
        other => {
            return Err(Error::Validation(format!(
                "unknown support \"{other}\" (expected cut or positive)"
            )))
        }
    };
    let rg = apply_strategy(&an.g, &side, strategy)?;
    let rc = reduced_cheeger(&rg, cfg.mode, cfg.cap_tol, cfg.subset_limit, cfg.enum_limit)?;
    let net = build_network(&rg, &side, rc.phi_tilde)?;
    let flow = max_flow(&net)?;
    emit(&network_to_text(&net, &flow.flows), cfg.output.as_deref())
}
