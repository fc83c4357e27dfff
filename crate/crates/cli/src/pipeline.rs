//! The model-to-bounds pipeline behind `bounds` and `sweep`.
//!
//! One [`Analysis`] holds the matrix, its low spectral pair, and the
//! dressed graph. [`best_cut`] picks the Cheeger cut, exhaustively when
//! the graph is small enough and otherwise as the best member of cut
//! families suited to the model's structure. [`bounds_summary`] then
//! assembles the two-sided classic estimate and the per-strategy reduced
//! bounds in one place so every command prints identical numbers.

use cheeger_gap::{
    best_of, cheeger_candidate, cheeger_exact, classic_bounds, evaluate_strategies, graph_from,
    low_spectrum, CheegerResult, CutFamily, Error, ModelSpec, Result, SpectralPair,
    StoquasticMatrix, StrategySummary, WeightedGraph,
};

use crate::config::RunConfig;

pub struct Analysis {
    pub h: StoquasticMatrix,
    pub sp: SpectralPair,
    pub g: WeightedGraph,
}

pub fn analyze(spec: &ModelSpec, cfg: &RunConfig) -> Result<Analysis> {
    let h = spec.build()?;
    let sp = low_spectrum(&h, &cfg.eigen_options())?;
    let g = graph_from(&h, &sp.ground())?;
    Ok(Analysis { h, sp, g })
}

/// Cut families worth scanning when exhaustive enumeration is out of
/// reach. Hypercube-structured models get coordinate halves and Hamming
/// balls, rings get contiguous arcs, and anything else falls back to
/// single vertices, which are always feasible on a connected graph.
fn families(spec: Option<&ModelSpec>, n: usize) -> Vec<CutFamily> {
    match spec {
        Some(ModelSpec::Ring { .. }) => vec![CutFamily::RingArcs { n }],
        _ if n.is_power_of_two() && n > 1 => {
            let bits = n.trailing_zeros() as usize;
            vec![
                CutFamily::CoordinateHalves { bits },
                CutFamily::HammingLevels { bits },
            ]
        }
        _ => vec![CutFamily::Explicit((0..n).map(|i| vec![i]).collect())],
    }
}

pub fn best_cut(g: &WeightedGraph, spec: Option<&ModelSpec>, cfg: &RunConfig) -> Result<CheegerResult> {
    if g.n() <= cfg.enum_limit {
        return cheeger_exact(g, cfg.cap_tol);
    }
    let mut best: Option<CheegerResult> = None;
    for family in families(spec, g.n()) {
        let res = cheeger_candidate(g, &family, cfg.cap_tol)?;
        if best.as_ref().map_or(true, |b| res.phi < b.phi) {
            best = Some(res);
        }
    }
    best.ok_or_else(|| Error::Validation("no cut family produced a feasible cut".into()))
}

pub struct BoundsSummary {
    pub cut: CheegerResult,
    /// 2 phi, the upper side of the classic estimate.
    pub upper: f64,
    /// phi^2 / (2 |lambda0|), the lower side.
    pub classic: f64,
    /// Per-strategy outcomes, parallel to the configured strategy list.
    pub strategies: Vec<StrategySummary>,
    /// Best per-strategy bound; zero when every strategy degenerated or
    /// was skipped.
    pub generalized: f64,
    pub gap: f64,
    /// Whether the gap came from the dense eigensolver.
    pub dense: bool,
}

pub fn bounds_summary(an: &Analysis, spec: &ModelSpec, cfg: &RunConfig) -> Result<BoundsSummary> {
    let cut = best_cut(&an.g, Some(spec), cfg)?;
    let (upper, classic) = classic_bounds(cut.phi, an.g.lambda0());
    let strategies = evaluate_strategies(
        &an.g,
        &cut.cut.subset,
        &cfg.strategies,
        cfg.mode,
        cfg.cap_tol,
        cfg.subset_limit,
        cfg.enum_limit,
    );
    let generalized = best_of(&strategies).map(|s| s.bound).unwrap_or(0.0);
    Ok(BoundsSummary {
        cut,
        upper,
        classic,
        strategies,
        generalized,
        gap: an.sp.gap(),
        dense: an.h.dim() <= cfg.dense_limit,
    })
}
