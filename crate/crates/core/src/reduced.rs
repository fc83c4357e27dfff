//! Reduced-graph machinery behind the generalized lower bound.
//!
//! A reduction keeps a subset of the parent's off-diagonal edges. Its
//! constriction c is the maximum kept-weight-to-mass ratio over vertices,
//! never above |lambda0|. The reduced Cheeger value minimizes kept crossing
//! flow over mass on a configurable domain, and the resulting gap bound is
//! phi_tilde^2 / (2 c).
//!
//! Two domains are supported. The conservative one ranges over every
//! capacity-feasible subset of the whole vertex set and is the default. The
//! other ranges over nonempty subsets of the reference cut side S only (no
//! capacity filter; S itself already satisfies it); results computed there
//! are labeled with the mode. For cuts larger than `SUBSET_LIMIT` the
//! subset-domain minimum is still available in closed form whenever no kept
//! edge lies inside S: crossing flow is then additive over S, so the minimum
//! sits on a single vertex (mediant inequality), computable in O(|S|).

use std::cmp::Ordering;

use crate::cheeger::{cmp_ratio, CAP_TOL};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

/// Largest |S| for brute-force enumeration of subsets of S.
pub const SUBSET_LIMIT: usize = 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReductionStrategy {
    /// Keep only edges crossing the cut.
    CutOnly,
    /// Crossing edges plus BFS shortest-path trees connecting every vertex
    /// of S to a cut-incident vertex, inside S.
    CutPlusPaths,
    /// Keep every off-diagonal edge.
    FullGraph,
}

impl std::fmt::Display for ReductionStrategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ReductionStrategy::CutOnly => "cut-only",
            ReductionStrategy::CutPlusPaths => "cut-plus-paths",
            ReductionStrategy::FullGraph => "full",
        })
    }
}

impl std::str::FromStr for ReductionStrategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "cut-only" => Ok(ReductionStrategy::CutOnly),
            "cut-plus-paths" => Ok(ReductionStrategy::CutPlusPaths),
            "full" => Ok(ReductionStrategy::FullGraph),
            other => Err(format!(
                "unknown strategy \"{other}\" (expected cut-only, cut-plus-paths, or full)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DomainMode {
    /// Every nonempty subset of V with capacity <= 1/2 + cap_tol.
    #[default]
    AllFeasible,
    /// Every nonempty subset of the reference cut side.
    SubsetsOfCut,
}

impl std::fmt::Display for DomainMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DomainMode::AllFeasible => "all-feasible",
            DomainMode::SubsetsOfCut => "subsets-of-cut",
        })
    }
}

impl std::str::FromStr for DomainMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "all-feasible" => Ok(DomainMode::AllFeasible),
            "subsets-of-cut" => Ok(DomainMode::SubsetsOfCut),
            other => Err(format!(
                "unknown domain mode \"{other}\" (expected all-feasible or subsets-of-cut)"
            )),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReducedGraph<'g> {
    parent: &'g WeightedGraph,
    strategy: ReductionStrategy,
    cut: Vec<usize>,
    kept: Vec<bool>,
    kept_count: usize,
    /// Sum of kept edge weights per vertex (self-loops never enter).
    reduced_weight: Vec<f64>,
    constriction: f64,
}

impl<'g> ReducedGraph<'g> {
    pub fn parent(&self) -> &'g WeightedGraph {
        self.parent
    }

    pub fn strategy(&self) -> ReductionStrategy {
        self.strategy
    }

    /// Reference cut side S, sorted.
    pub fn cut(&self) -> &[usize] {
        &self.cut
    }

    pub fn edge_count(&self) -> usize {
        self.kept_count
    }

    pub fn kept_edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.parent
            .edges()
            .iter()
            .zip(&self.kept)
            .filter(|(_, &k)| k)
            .map(|(&e, _)| e)
    }

    /// Kept weight over mass at one vertex.
    pub fn vertex_constriction(&self, i: usize) -> f64 {
        self.reduced_weight[i] / self.parent.pi()[i]
    }

    /// c = max_i of vertex_constriction; bounded by |lambda0|.
    pub fn constriction(&self) -> f64 {
        self.constriction
    }

    pub fn reduced_weight(&self) -> &[f64] {
        &self.reduced_weight
    }

    /// True when some kept edge has both endpoints in S, which breaks the
    /// additivity that the closed-form minimum relies on.
    pub fn has_internal_edges(&self) -> bool {
        let mut in_s = vec![false; self.parent.n()];
        for &v in &self.cut {
            in_s[v] = true;
        }
        self.kept_edges().any(|(i, j, _)| in_s[i] && in_s[j])
    }

    fn finalize(
        parent: &'g WeightedGraph,
        strategy: ReductionStrategy,
        cut: Vec<usize>,
        kept: Vec<bool>,
    ) -> Result<Self> {
        let kept_count = kept.iter().filter(|&&k| k).count();
        if kept_count == 0 {
            return Err(Error::DegenerateReduction("no edges kept".into()));
        }
        let mut reduced_weight = vec![0.0; parent.n()];
        for (&(i, j, w), &k) in parent.edges().iter().zip(&kept) {
            if k {
                reduced_weight[i] += w;
                reduced_weight[j] += w;
            }
        }
        let constriction = (0..parent.n())
            .map(|i| reduced_weight[i] / parent.pi()[i])
            .fold(0.0f64, f64::max);
        Ok(ReducedGraph { parent, strategy, cut, kept, kept_count, reduced_weight, constriction })
    }
}

fn checked_cut(g: &WeightedGraph, s: &[usize]) -> Result<Vec<usize>> {
    let mut cut: Vec<usize> = s.to_vec();
    cut.sort_unstable();
    cut.dedup();
    if cut.is_empty() || cut.len() == g.n() {
        return Err(Error::DegenerateCut("cut side must be nonempty and proper".into()));
    }
    if let Some(&v) = cut.iter().find(|&&v| v >= g.n()) {
        return Err(Error::DegenerateCut(format!("vertex {v} out of range")));
    }
    let capacity: f64 = cut.iter().map(|&v| g.pi()[v]).sum();
    if capacity > 0.5 + CAP_TOL {
        return Err(Error::DegenerateCut(format!(
            "cut side capacity {capacity} exceeds one half"
        )));
    }
    Ok(cut)
}

pub fn reduce_cut_only<'g>(g: &'g WeightedGraph, s: &[usize]) -> Result<ReducedGraph<'g>> {
    let cut = checked_cut(g, s)?;
    let mut in_s = vec![false; g.n()];
    for &v in &cut {
        in_s[v] = true;
    }
    let kept: Vec<bool> = g.edges().iter().map(|&(i, j, _)| in_s[i] != in_s[j]).collect();
    ReducedGraph::finalize(g, ReductionStrategy::CutOnly, cut, kept)
}

pub fn reduce_cut_plus_paths<'g>(g: &'g WeightedGraph, s: &[usize]) -> Result<ReducedGraph<'g>> {
    let cut = checked_cut(g, s)?;
    let mut in_s = vec![false; g.n()];
    for &v in &cut {
        in_s[v] = true;
    }
    let mut kept: Vec<bool> = g.edges().iter().map(|&(i, j, _)| in_s[i] != in_s[j]).collect();

    // Multi-source BFS inside S from the cut-incident vertices, ascending
    // seed and neighbor order, marking tree edges as kept.
    let mut reached = vec![false; g.n()];
    let mut queue = std::collections::VecDeque::new();
    for &v in &cut {
        if g.neighbors(v).iter().any(|&(u, _)| !in_s[u]) {
            reached[v] = true;
            queue.push_back(v);
        }
    }
    while let Some(v) = queue.pop_front() {
        for &(u, _) in g.neighbors(v) {
            if in_s[u] && !reached[u] {
                reached[u] = true;
                kept[edge_index(g, v, u)] = true;
                queue.push_back(u);
            }
        }
    }
    if let Some(&v) = cut.iter().find(|&&v| !reached[v]) {
        // Connectivity of the parent makes this unreachable; kept as a guard.
        return Err(Error::DegenerateReduction(format!(
            "vertex {v} of S cannot reach a cut edge inside S"
        )));
    }
    ReducedGraph::finalize(g, ReductionStrategy::CutPlusPaths, cut, kept)
}

pub fn reduce_full<'g>(g: &'g WeightedGraph, s: &[usize]) -> Result<ReducedGraph<'g>> {
    let cut = checked_cut(g, s)?;
    let kept = vec![true; g.edges().len()];
    ReducedGraph::finalize(g, ReductionStrategy::FullGraph, cut, kept)
}

pub fn apply_strategy<'g>(
    g: &'g WeightedGraph,
    s: &[usize],
    strategy: ReductionStrategy,
) -> Result<ReducedGraph<'g>> {
    match strategy {
        ReductionStrategy::CutOnly => reduce_cut_only(g, s),
        ReductionStrategy::CutPlusPaths => reduce_cut_plus_paths(g, s),
        ReductionStrategy::FullGraph => reduce_full(g, s),
    }
}

fn edge_index(g: &WeightedGraph, a: usize, b: usize) -> usize {
    let key = (a.min(b), a.max(b));
    g.edges()
        .binary_search_by(|&(i, j, _)| (i, j).cmp(&key))
        .expect("adjacent vertices have an edge")
}

#[derive(Debug, Clone)]
pub struct ReducedCheegerResult {
    pub phi_tilde: f64,
    /// Witness subset attaining the minimum, sorted global indices.
    pub argmin: Vec<usize>,
    pub mode: DomainMode,
    /// Reference cut side of the reduction.
    pub cut: Vec<usize>,
    /// A zero-flow subset was feasible, so the bound degenerates to zero.
    pub degenerate: bool,
    pub evaluated: u64,
    /// Minimum came from the additive single-vertex formula rather than
    /// enumeration.
    pub closed_form: bool,
}

/// Minimum reduced flow over mass for the reduction's domain. See the module
/// docs for the three computation paths.
pub fn reduced_cheeger(
    rg: &ReducedGraph,
    mode: DomainMode,
    cap_tol: f64,
    subset_limit: usize,
    enum_limit: usize,
) -> Result<ReducedCheegerResult> {
    match mode {
        DomainMode::SubsetsOfCut => subsets_of_cut_minimum(rg, subset_limit),
        DomainMode::AllFeasible => all_feasible_minimum(rg, cap_tol, enum_limit),
    }
}

fn subsets_of_cut_minimum(
    rg: &ReducedGraph,
    subset_limit: usize,
) -> Result<ReducedCheegerResult> {
    let s = rg.cut().to_vec();
    if s.len() > subset_limit {
        if rg.has_internal_edges() {
            return Err(Error::SizeLimit {
                what: "reduced Cheeger enumeration over subsets of the cut",
                requested: s.len(),
                limit: subset_limit,
            });
        }
        return Ok(closed_form_minimum(rg, s));
    }

    let g = rg.parent();
    let pi = g.pi();
    // Kept-edge adjacency for incremental updates during the Gray walk.
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); g.n()];
    for (i, j, w) in rg.kept_edges() {
        adj[i].push((j, w));
        adj[j].push((i, w));
    }

    let mut in_sub = vec![false; g.n()];
    let mut flow = 0.0f64;
    let mut cap = 0.0f64;
    let mut best: Option<(f64, f64, Vec<usize>)> = None;
    let states = 1u64 << s.len();
    for k in 1..states {
        let v = s[k.trailing_zeros() as usize];
        if in_sub[v] {
            cap -= pi[v];
            for &(u, w) in &adj[v] {
                flow += if in_sub[u] { w } else { -w };
            }
        } else {
            for &(u, w) in &adj[v] {
                flow -= if in_sub[u] { w } else { -w };
            }
            cap += pi[v];
        }
        in_sub[v] = !in_sub[v];

        let better = match &best {
            None => true,
            Some((bf, bc, bs)) => match cmp_ratio(flow, cap, *bf, *bc) {
                Ordering::Less => true,
                Ordering::Greater => false,
                Ordering::Equal => collect(&in_sub) < *bs,
            },
        };
        if better {
            let subset = collect(&in_sub);
            let (f, c) = fresh_flow(rg, &subset);
            best = Some((f, c, subset));
        }
    }
    let (flow, cap, argmin) = best.expect("nonempty cut yields candidates");
    let phi_tilde = flow / cap;
    Ok(ReducedCheegerResult {
        phi_tilde,
        argmin,
        mode: DomainMode::SubsetsOfCut,
        cut: s,
        degenerate: phi_tilde == 0.0,
        evaluated: states - 1,
        closed_form: false,
    })
}

/// With no kept edge inside S, each subset's crossing flow is the sum of its
/// vertices' kept weights, so the minimum ratio over subsets of S equals the
/// minimum over single vertices.
fn closed_form_minimum(rg: &ReducedGraph, s: Vec<usize>) -> ReducedCheegerResult {
    let pi = rg.parent().pi();
    let mut arg = s[0];
    for &v in &s[1..] {
        if cmp_ratio(rg.reduced_weight()[v], pi[v], rg.reduced_weight()[arg], pi[arg])
            == Ordering::Less
        {
            arg = v;
        }
    }
    let phi_tilde = rg.reduced_weight()[arg] / pi[arg];
    let evaluated = s.len() as u64;
    ReducedCheegerResult {
        phi_tilde,
        argmin: vec![arg],
        mode: DomainMode::SubsetsOfCut,
        cut: s,
        degenerate: phi_tilde == 0.0,
        evaluated,
        closed_form: true,
    }
}

fn all_feasible_minimum(
    rg: &ReducedGraph,
    cap_tol: f64,
    enum_limit: usize,
) -> Result<ReducedCheegerResult> {
    let g = rg.parent();
    let n = g.n();
    if n > enum_limit {
        return Err(Error::SizeLimit {
            what: "reduced Cheeger enumeration over all feasible subsets",
            requested: n,
            limit: enum_limit,
        });
    }
    let pi = g.pi();
    let total_pi = g.pi_total();
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (i, j, w) in rg.kept_edges() {
        adj[i].push((j, w));
        adj[j].push((i, w));
    }

    let mut in_sub = vec![false; n];
    let mut flow = 0.0f64;
    let mut cap = 0.0f64;
    let mut best: Option<(f64, f64, Vec<usize>)> = None;
    let mut evaluated = 0u64;
    let states = 1u64 << (n - 1);
    for k in 1..states {
        let v = k.trailing_zeros() as usize + 1;
        if in_sub[v] {
            cap -= pi[v];
            for &(u, w) in &adj[v] {
                flow += if in_sub[u] { w } else { -w };
            }
        } else {
            for &(u, w) in &adj[v] {
                flow -= if in_sub[u] { w } else { -w };
            }
            cap += pi[v];
        }
        in_sub[v] = !in_sub[v];

        for complemented in [false, true] {
            let c = if complemented { total_pi - cap } else { cap };
            if c > 0.5 + cap_tol {
                continue;
            }
            evaluated += 1;
            let better = match &best {
                None => true,
                Some((bf, bc, bs)) => match cmp_ratio(flow, c, *bf, *bc) {
                    Ordering::Less => true,
                    Ordering::Greater => false,
                    Ordering::Equal => collect_side(&in_sub, complemented) < *bs,
                },
            };
            if better {
                let subset = collect_side(&in_sub, complemented);
                let (f, c) = fresh_flow(rg, &subset);
                best = Some((f, c, subset));
            }
        }
    }
    let (flow, cap, argmin) =
        best.ok_or_else(|| Error::DegenerateCut("no feasible subset".into()))?;
    let phi_tilde = flow / cap;
    Ok(ReducedCheegerResult {
        phi_tilde,
        argmin,
        mode: DomainMode::AllFeasible,
        cut: rg.cut().to_vec(),
        degenerate: phi_tilde == 0.0,
        evaluated,
        closed_form: false,
    })
}

fn collect(in_sub: &[bool]) -> Vec<usize> {
    in_sub
        .iter()
        .enumerate()
        .filter(|&(_, &m)| m)
        .map(|(i, _)| i)
        .collect()
}

fn collect_side(in_sub: &[bool], complemented: bool) -> Vec<usize> {
    in_sub
        .iter()
        .enumerate()
        .filter(|&(_, &m)| m != complemented)
        .map(|(i, _)| i)
        .collect()
}

/// From-scratch kept crossing flow and capacity: fixed summation order over
/// the kept edge list, immune to incremental drift.
fn fresh_flow(rg: &ReducedGraph, subset: &[usize]) -> (f64, f64) {
    let mut in_sub = vec![false; rg.parent().n()];
    for &v in subset {
        in_sub[v] = true;
    }
    let mut flow = 0.0;
    for (i, j, w) in rg.kept_edges() {
        if in_sub[i] != in_sub[j] {
            flow += w;
        }
    }
    let cap = subset.iter().map(|&v| rg.parent().pi()[v]).sum();
    (flow, cap)
}

/// phi_tilde^2 / (2c).
pub fn generalized_bound(phi_tilde: f64, c: f64) -> Result<f64> {
    if !(c > 0.0) {
        return Err(Error::DegenerateReduction(format!("constriction {c} is not positive")));
    }
    Ok(phi_tilde * phi_tilde / (2.0 * c))
}

#[derive(Debug, Clone)]
pub struct StrategySummary {
    pub strategy: ReductionStrategy,
    pub edge_count: usize,
    pub constriction: f64,
    pub phi_tilde: f64,
    pub bound: f64,
    pub degenerate: bool,
    /// Reason the strategy could not produce a bound, when it couldn't.
    pub skipped: Option<String>,
}

/// Runs every strategy, never failing: errors become `skipped` entries.
pub fn evaluate_strategies(
    g: &WeightedGraph,
    s: &[usize],
    strategies: &[ReductionStrategy],
    mode: DomainMode,
    cap_tol: f64,
    subset_limit: usize,
    enum_limit: usize,
) -> Vec<StrategySummary> {
    strategies
        .iter()
        .map(|&strategy| {
            let outcome = apply_strategy(g, s, strategy).and_then(|rg| {
                let rc = reduced_cheeger(&rg, mode, cap_tol, subset_limit, enum_limit)?;
                let bound = generalized_bound(rc.phi_tilde, rg.constriction())?;
                Ok((rg.edge_count(), rg.constriction(), rc.phi_tilde, bound, rc.degenerate))
            });
            match outcome {
                Ok((edge_count, constriction, phi_tilde, bound, degenerate)) => StrategySummary {
                    strategy,
                    edge_count,
                    constriction,
                    phi_tilde,
                    bound,
                    degenerate,
                    skipped: None,
                },
                Err(err) => StrategySummary {
                    strategy,
                    edge_count: 0,
                    constriction: 0.0,
                    phi_tilde: 0.0,
                    bound: 0.0,
                    degenerate: true,
                    skipped: Some(err.to_string()),
                },
            }
        })
        .collect()
}

/// The non-degenerate summary with the largest bound; earlier strategies win
/// ties so the choice is deterministic.
pub fn best_of(summaries: &[StrategySummary]) -> Option<&StrategySummary> {
    summaries
        .iter()
        .filter(|s| s.skipped.is_none() && !s.degenerate)
        .fold(None, |best: Option<&StrategySummary>, s| match best {
            Some(b) if b.bound >= s.bound => Some(b),
            _ => Some(s),
        })
}

/// Best strategy end to end: the winning reduction, its reduced Cheeger
/// result, and the per-strategy report. Errors when every strategy is
/// degenerate or skipped.
pub fn best_reduction<'g>(
    g: &'g WeightedGraph,
    s: &[usize],
    strategies: &[ReductionStrategy],
    mode: DomainMode,
    cap_tol: f64,
    subset_limit: usize,
    enum_limit: usize,
) -> Result<(ReducedGraph<'g>, ReducedCheegerResult, f64, Vec<StrategySummary>)> {
    if strategies.is_empty() {
        return Err(Error::DegenerateReduction("no strategies supplied".into()));
    }
    let summaries = evaluate_strategies(g, s, strategies, mode, cap_tol, subset_limit, enum_limit);
    let best = best_of(&summaries).ok_or_else(|| {
        Error::DegenerateReduction("every strategy was degenerate or skipped".into())
    })?;
    let rg = apply_strategy(g, s, best.strategy)?;
    let rc = reduced_cheeger(&rg, mode, cap_tol, subset_limit, enum_limit)?;
    let bound = generalized_bound(rc.phi_tilde, rg.constriction())?;
    Ok((rg, rc, bound, summaries))
}
