//! `verify`: the invariant check suites, one CSV row per check.
//!
//! Four suites. `laplacian` checks the structural identities of the
//! dressed generator. `sandwich` checks the two-sided conductance
//! estimate and the variational upper bound on random partitions.
//! `generalized` checks soundness of the reduced bound for every
//! configured strategy in both minimization domains. `theorem1` builds
//! the flow network for a fixed instance list plus seeded random
//! instances and checks the min-cut value claim, source saturation, sink
//! feasibility, the end-to-end gap bound, the chained Rayleigh bound,
//! and two guards on the machinery itself: a brute-force min-cut
//! comparison on small networks and a negative control that inflates
//! phi and must break the value equality.
//!
//! Rows carry a three-way status. `pass` and `fail` mean what they say
//! and only `fail` affects the exit code. `evidence` marks an instance
//! where a claimed equality genuinely fails while the capacity premise
//! it rests on (cross-arc inflow at most the receiving mass, or the
//! conservative minimization domain) is itself violated, so the row
//! documents a real limitation of the claim rather than a bug. The
//! suites run serially and draw every random object from seeded
//! generators, so output is byte-identical across runs.

use std::fmt;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use cheeger_gap::{
    apply_strategy, brute_force_min_cut, build_network, classic_bounds, evaluate_strategies,
    graph_from, low_spectrum, max_flow, positive_support, random_stoquastic, rayleigh_chain_bound,
    reduced_cheeger, variational_upper, verify_laplacian, verify_theorem1, DomainMode, Error,
    ModelSpec, ReductionStrategy, Result, StoquasticMatrix, Theorem1Report, WeightedGraph,
};

use crate::cli::VerifyArgs;
use crate::config::RunConfig;
use crate::output::{emit, fmt_float};
use crate::pipeline;

pub const HEADER: &str = "check,suite,case,status,detail";
pub const SUITES: [&str; 4] = ["laplacian", "sandwich", "generalized", "theorem1"];

/// Instances per random batch in the matrix suites.
const RANDOM_INSTANCES: usize = 100;
/// Random instances in the flow-certification suite.
const THEOREM_INSTANCES: usize = 25;
/// Partitions tried per instance by the variational check.
const PARTITIONS: usize = 100;
/// Absolute slack for inequality checks between computed floats.
const SLACK: f64 = 1e-9;
/// Residual ceiling for the structural identity checks.
const IDENTITY_TOL: f64 = 1e-8;
/// Dimension cap for the independent dense gap oracle.
const ORACLE_LIMIT: usize = 64;
/// Node cap for brute-force min-cut enumeration.
const BRUTE_LIMIT: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Evidence,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Evidence => "evidence",
        })
    }
}

fn pass_fail(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

#[derive(Debug, Clone)]
pub struct CheckRow {
    pub check: &'static str,
    pub suite: &'static str,
    pub case: String,
    pub status: Status,
    pub detail: String,
}

pub struct VerifyRun {
    pub rows: Vec<CheckRow>,
}

impl VerifyRun {
    pub fn first_failure(&self) -> Option<&CheckRow> {
        self.rows.iter().find(|r| r.status == Status::Fail)
    }

    pub fn render(&self) -> String {
        let mut text = String::from(HEADER);
        text.push('\n');
        for r in &self.rows {
            text.push_str(&format!(
                "{},{},{},{},{}\n",
                r.check, r.suite, r.case, r.status, r.detail
            ));
        }
        text
    }
}

pub fn run_command(args: &VerifyArgs) -> Result<u8> {
    let cfg = RunConfig::resolve(&args.common)?;
    let model = args.model.optional()?;
    let run = run(&cfg, args.only.as_deref(), model.as_ref(), args.inflate_phi)?;
    emit(&run.render(), cfg.output.as_deref())?;
    if let Some(fail) = run.first_failure() {
        eprintln!(
            "first failing check: {} ({}/{})",
            fail.check, fail.suite, fail.case
        );
        return Ok(1);
    }
    Ok(0)
}

pub fn run(
    cfg: &RunConfig,
    only: Option<&str>,
    model: Option<&ModelSpec>,
    inflate: f64,
) -> Result<VerifyRun> {
    if let Some(name) = only {
        if !SUITES.contains(&name) {
            return Err(Error::Validation(format!(
                "unknown suite \"{name}\" (expected one of {})",
                SUITES.join(", ")
            )));
        }
    }
    if !(inflate > 0.0) {
        return Err(Error::Validation("--inflate-phi must be positive".into()));
    }
    let wants = |name: &str| only.map_or(true, |o| o == name);
    let mut rows = Vec::new();
    if wants("laplacian") || wants("sandwich") || wants("generalized") {
        let instances = matrix_instances(cfg, model)?;
        if wants("laplacian") {
            laplacian_suite(cfg, &instances, &mut rows)?;
        }
        if wants("sandwich") {
            sandwich_suite(cfg, model, &instances, &mut rows)?;
        }
        if wants("generalized") {
            generalized_suite(cfg, model, &instances, &mut rows)?;
        }
    }
    if wants("theorem1") {
        theorem1_suite(cfg, model, inflate, &mut rows)?;
    }
    Ok(VerifyRun { rows })
}

fn case_name(spec: &ModelSpec) -> String {
    format!("{}[{}]", spec.name(), spec.params())
}

/// One shared instance list so every matrix suite sees the same draws.
fn matrix_instances(
    cfg: &RunConfig,
    model: Option<&ModelSpec>,
) -> Result<Vec<(String, StoquasticMatrix)>> {
    if let Some(spec) = model {
        return Ok(vec![(case_name(spec), spec.build()?)]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    Ok((0..RANDOM_INSTANCES)
        .map(|i| (format!("random-{i:02}"), random_stoquastic(&mut rng)))
        .collect())
}

fn solve(h: &StoquasticMatrix, cfg: &RunConfig) -> Result<(cheeger_gap::SpectralPair, WeightedGraph)> {
    let sp = low_spectrum(h, &cfg.eigen_options())?;
    let g = graph_from(h, &sp.ground())?;
    Ok((sp, g))
}

fn laplacian_suite(
    cfg: &RunConfig,
    instances: &[(String, StoquasticMatrix)],
    rows: &mut Vec<CheckRow>,
) -> Result<()> {
    for (case, h) in instances {
        let sp = low_spectrum(h, &cfg.eigen_options())?;
        let report = verify_laplacian(h, &sp, IDENTITY_TOL, IDENTITY_TOL, ORACLE_LIMIT)?;
        let gap_diff = report
            .gap_difference
            .map(fmt_float)
            .unwrap_or_else(|| "n/a".into());
        rows.push(CheckRow {
            check: "laplacian-identities",
            suite: "laplacian",
            case: case.clone(),
            status: pass_fail(report.pass),
            detail: format!(
                "row_sum={};stationary={};transport={};gap_diff={gap_diff}",
                fmt_float(report.max_row_sum),
                fmt_float(report.max_stationary_residual),
                fmt_float(report.transport_residual),
            ),
        });
    }
    Ok(())
}

fn random_side<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    loop {
        let side: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
        if !side.is_empty() && side.len() < n {
            return side;
        }
    }
}

fn sandwich_suite(
    cfg: &RunConfig,
    model: Option<&ModelSpec>,
    instances: &[(String, StoquasticMatrix)],
    rows: &mut Vec<CheckRow>,
) -> Result<()> {
    // Partitions come from their own stream so the instance draws stay
    // aligned with the other suites.
    let mut prng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x7061_7274);
    for (case, h) in instances {
        let (sp, g) = solve(h, cfg)?;
        let gap = sp.gap();
        let cut = pipeline::best_cut(&g, model, cfg)?;
        let (upper, lower) = classic_bounds(cut.phi, g.lambda0());
        let ok = upper + SLACK >= gap && gap + SLACK >= lower;
        rows.push(CheckRow {
            check: "cheeger-sandwich",
            suite: "sandwich",
            case: case.clone(),
            status: pass_fail(ok),
            detail: format!(
                "phi={};method={};upper={};gap={};lower={}",
                fmt_float(cut.phi),
                cut.method,
                fmt_float(upper),
                fmt_float(gap),
                fmt_float(lower)
            ),
        });

        let mut min_upper = f64::INFINITY;
        for _ in 0..PARTITIONS {
            let side = random_side(&mut prng, g.n());
            min_upper = min_upper.min(variational_upper(&g, &side)?);
        }
        rows.push(CheckRow {
            check: "variational-upper",
            suite: "sandwich",
            case: case.clone(),
            status: pass_fail(min_upper + SLACK >= gap),
            detail: format!(
                "partitions={PARTITIONS};min_upper={};gap={}",
                fmt_float(min_upper),
                fmt_float(gap)
            ),
        });
    }
    Ok(())
}

fn generalized_suite(
    cfg: &RunConfig,
    model: Option<&ModelSpec>,
    instances: &[(String, StoquasticMatrix)],
    rows: &mut Vec<CheckRow>,
) -> Result<()> {
    for (case, h) in instances {
        let (sp, g) = solve(h, cfg)?;
        let gap = sp.gap();
        let cut = pipeline::best_cut(&g, model, cfg)?;
        for mode in [DomainMode::AllFeasible, DomainMode::SubsetsOfCut] {
            let summaries = evaluate_strategies(
                &g,
                &cut.cut.subset,
                &cfg.strategies,
                mode,
                cfg.cap_tol,
                cfg.subset_limit,
                cfg.enum_limit,
            );
            for s in &summaries {
                let case_id = format!("{case}/{}/{mode}", s.strategy);
                let (status, detail) = match &s.skipped {
                    Some(reason) => (
                        Status::Pass,
                        format!("skipped={}", reason.replace(',', ";")),
                    ),
                    None => {
                        let sound = s.bound <= gap + SLACK;
                        let detail = format!(
                            "phi_tilde={};c={};bound={};gap={}",
                            fmt_float(s.phi_tilde),
                            fmt_float(s.constriction),
                            fmt_float(s.bound),
                            fmt_float(gap)
                        );
                        if sound {
                            (Status::Pass, detail)
                        } else if mode == DomainMode::SubsetsOfCut {
                            // This domain skips subsets that leave the cut,
                            // so its minimum can sit above the sound one;
                            // record the overshoot instead of failing.
                            (Status::Evidence, detail)
                        } else {
                            (Status::Fail, detail)
                        }
                    }
                };
                rows.push(CheckRow {
                    check: "generalized-soundness",
                    suite: "generalized",
                    case: case_id,
                    status,
                    detail,
                });
            }
        }
    }
    Ok(())
}

/// How `theorem1_case` picks the support side of the network.
#[derive(Debug, Clone, Copy)]
pub enum SupportRule {
    /// Try the Cheeger cut, then the positive overlap support, each with
    /// the path-augmented and the cut-only reduction, keeping the first
    /// configuration whose report passes outright.
    Auto,
    /// Force the positive overlap support with one fixed reduction.
    PositiveSupport(ReductionStrategy),
}

pub struct Theorem1Outcome {
    pub case: String,
    /// Support and reduction that produced `report`.
    pub config: String,
    pub report: Option<Theorem1Report>,
    /// Node count of the network behind `report`.
    pub nodes: usize,
    /// (max-flow value, brute-force min cut) on networks small enough to
    /// enumerate.
    pub oracle: Option<(f64, f64)>,
    /// Whether inflating phi by 1.5 broke the value equality, as it
    /// must; `None` when the control could not run, with the reason in
    /// `control_note`.
    pub control_failed: Option<bool>,
    pub control_note: Option<&'static str>,
    pub gap: f64,
    pub chain: Option<f64>,
    pub chain_note: Option<String>,
}

struct CandidateOutcome {
    report: Theorem1Report,
    nodes: usize,
    oracle: Option<(f64, f64)>,
    control_failed: Option<bool>,
    control_note: Option<&'static str>,
}

fn evaluate_candidate(
    g: &WeightedGraph,
    side: &[usize],
    strategy: ReductionStrategy,
    cfg: &RunConfig,
    inflate: f64,
    gap: f64,
) -> Result<Option<CandidateOutcome>> {
    if side.is_empty() || side.len() >= g.n() {
        return Ok(None);
    }
    let Ok(rg) = apply_strategy(g, side, strategy) else {
        return Ok(None);
    };
    // The certification needs the minimum over subsets of the support
    // itself; the conservative domain would certify a different claim.
    let Ok(rc) = reduced_cheeger(
        &rg,
        DomainMode::SubsetsOfCut,
        cfg.cap_tol,
        cfg.subset_limit,
        cfg.enum_limit,
    ) else {
        return Ok(None);
    };
    if rc.degenerate {
        return Ok(None);
    }
    let phi = rc.phi_tilde * inflate;
    let report = verify_theorem1(&rg, side, phi, Some(gap))?;
    let net = build_network(&rg, side, phi)?;
    let nodes = net.nodes();
    let oracle = if nodes <= BRUTE_LIMIT {
        let flow = max_flow(&net)?;
        let brute = brute_force_min_cut(&net)?;
        Some((flow.value, brute))
    } else {
        None
    };
    // A source-side cut through the phi argmin undercuts the inflated
    // claim by at least (phi_c - phi) * mass(argmin). When that shift
    // sits below the value check's relative resolution, the inflated and
    // honest claims are indistinguishable by construction and the
    // control is skipped rather than reported as a failure.
    let argmin_mass: f64 = rc.argmin.iter().map(|&i| g.pi()[i]).sum();
    let predicted_shift =
        0.5 * phi * argmin_mass / ((1.0 + 1.5 * phi) * report.support_capacity);
    let (control_failed, control_note) = if !(phi > 0.0) {
        (None, Some("zero phi leaves nothing to inflate"))
    } else if predicted_shift <= 2e-6 {
        (
            None,
            Some("a 1.5x inflation shifts the claim below the value check's resolution"),
        )
    } else {
        (
            verify_theorem1(&rg, side, phi * 1.5, Some(gap))
                .ok()
                .map(|r| !r.value_matches),
            None,
        )
    };
    Ok(Some(CandidateOutcome {
        report,
        nodes,
        oracle,
        control_failed,
        control_note,
    }))
}

pub fn theorem1_case(
    case: &str,
    spec: Option<&ModelSpec>,
    h: &StoquasticMatrix,
    cfg: &RunConfig,
    inflate: f64,
    rule: SupportRule,
) -> Result<Theorem1Outcome> {
    let (sp, g) = solve(h, cfg)?;
    let gap = sp.gap();

    let ps = positive_support(&sp);
    let (chain, chain_note) = match &ps {
        Ok(p) => match rayleigh_chain_bound(&g, p) {
            Ok(b) => (Some(b), None),
            Err(e) => (None, Some(e.to_string())),
        },
        Err(e) => (None, Some(e.to_string())),
    };

    let mut candidates: Vec<(String, Vec<usize>, ReductionStrategy)> = Vec::new();
    match rule {
        SupportRule::PositiveSupport(strategy) => {
            let Ok(p) = &ps else {
                return Err(Error::Validation(format!(
                    "{case}: positive support unavailable"
                )));
            };
            candidates.push((
                format!("positive-support+{strategy}"),
                p.support().to_vec(),
                strategy,
            ));
        }
        SupportRule::Auto => {
            let cut = pipeline::best_cut(&g, spec, cfg)?;
            for strategy in [ReductionStrategy::CutPlusPaths, ReductionStrategy::CutOnly] {
                candidates.push((
                    format!("cheeger-cut+{strategy}"),
                    cut.cut.subset.clone(),
                    strategy,
                ));
            }
            if let Ok(p) = &ps {
                let side = p.support().to_vec();
                if !side.is_empty() && side.len() < g.n() && side != cut.cut.subset {
                    for strategy in [ReductionStrategy::CutPlusPaths, ReductionStrategy::CutOnly] {
                        candidates.push((
                            format!("positive-support+{strategy}"),
                            side.clone(),
                            strategy,
                        ));
                    }
                }
            }
        }
    }

    let mut picked: Option<(String, CandidateOutcome)> = None;
    for (label, side, strategy) in candidates {
        let Some(out) = evaluate_candidate(&g, &side, strategy, cfg, inflate, gap)? else {
            continue;
        };
        let done = out.report.pass;
        if picked.is_none() || done {
            picked = Some((label, out));
        }
        if done {
            break;
        }
    }

    let (config, report, nodes, oracle, control_failed, control_note) = match picked {
        Some((label, out)) => (
            label,
            Some(out.report),
            out.nodes,
            out.oracle,
            out.control_failed,
            out.control_note,
        ),
        None => ("none".into(), None, 0, None, None, None),
    };
    Ok(Theorem1Outcome {
        case: case.into(),
        config,
        report,
        nodes,
        oracle,
        control_failed,
        control_note,
        gap,
        chain,
        chain_note,
    })
}

fn theorem1_cases(
    cfg: &RunConfig,
    model: Option<&ModelSpec>,
) -> Result<Vec<(String, StoquasticMatrix, Option<ModelSpec>, SupportRule)>> {
    if let Some(spec) = model {
        return Ok(vec![(
            case_name(spec),
            spec.build()?,
            Some(spec.clone()),
            SupportRule::Auto,
        )]);
    }
    let named = [
        ("transverse-n2-B1", ModelSpec::TransverseField { n: 2, b: 1.0 }),
        ("transverse-n3-B1", ModelSpec::TransverseField { n: 3, b: 1.0 }),
        ("ring-N8-t1", ModelSpec::Ring { n: 8, t: 1.0 }),
        ("ising-n3-B0.5", ModelSpec::IsingChain { n: 3, b: 0.5 }),
        ("ising-n4-B0.05", ModelSpec::IsingChain { n: 4, b: 0.05 }),
        ("ising-n5-B0.25", ModelSpec::IsingChain { n: 5, b: 0.25 }),
        ("ising-n6-B0.05", ModelSpec::IsingChain { n: 6, b: 0.05 }),
    ];
    let mut out = Vec::new();
    for (case, spec) in named {
        out.push((case.to_string(), spec.build()?, Some(spec), SupportRule::Auto));
    }
    // A permanent specimen where the cross-arc inflow premise fails and
    // the value equality genuinely breaks; its rows come out as evidence.
    let specimen = ModelSpec::IsingChain { n: 3, b: 2.0 };
    out.push((
        "ising-n3-B2-positive-support".to_string(),
        specimen.build()?,
        Some(specimen),
        SupportRule::PositiveSupport(ReductionStrategy::CutPlusPaths),
    ));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for i in 0..THEOREM_INSTANCES {
        out.push((
            format!("random-{i:02}"),
            random_stoquastic(&mut rng),
            None,
            SupportRule::Auto,
        ));
    }
    Ok(out)
}

fn theorem1_suite(
    cfg: &RunConfig,
    model: Option<&ModelSpec>,
    inflate: f64,
    rows: &mut Vec<CheckRow>,
) -> Result<()> {
    for (case, h, spec, rule) in theorem1_cases(cfg, model)? {
        let outcome = theorem1_case(&case, spec.as_ref(), &h, cfg, inflate, rule)?;
        push_theorem_rows(&outcome, cfg.flow_tol, rows);
    }
    Ok(())
}

fn push_theorem_rows(tc: &Theorem1Outcome, flow_tol: f64, rows: &mut Vec<CheckRow>) {
    let case = || tc.case.clone();
    match &tc.report {
        None => rows.push(CheckRow {
            check: "flow-value",
            suite: "theorem1",
            case: case(),
            status: Status::Pass,
            detail: "skipped=every candidate reduction was degenerate or infeasible".into(),
        }),
        Some(r) => {
            // A failed equality downgrades to evidence when the premise
            // it rests on is itself violated on this instance.
            let soft = |ok: bool| {
                if ok {
                    Status::Pass
                } else if !r.inflow_ok {
                    Status::Evidence
                } else {
                    Status::Fail
                }
            };
            rows.push(CheckRow {
                check: "flow-value",
                suite: "theorem1",
                case: case(),
                status: soft(r.value_matches),
                detail: format!(
                    "config={};flow={};expected={};residual={};inflow_excess={}",
                    tc.config,
                    fmt_float(r.flow_value),
                    fmt_float(r.expected_value),
                    fmt_float(r.value_residual),
                    fmt_float(r.inflow_excess)
                ),
            });
            rows.push(CheckRow {
                check: "source-saturation",
                suite: "theorem1",
                case: case(),
                status: soft(r.sources_saturated),
                detail: format!(
                    "config={};residual={}",
                    tc.config,
                    fmt_float(r.saturation_residual)
                ),
            });
            rows.push(CheckRow {
                check: "sink-feasibility",
                suite: "theorem1",
                case: case(),
                status: pass_fail(r.sink_feasible),
                detail: format!(
                    "config={};residual={}",
                    tc.config,
                    fmt_float(r.sink_residual)
                ),
            });
            if let Some(ok) = r.bound_below_gap {
                rows.push(CheckRow {
                    check: "gap-bound",
                    suite: "theorem1",
                    case: case(),
                    status: pass_fail(ok),
                    detail: format!(
                        "config={};bound={};gap={}",
                        tc.config,
                        fmt_float(r.bound),
                        fmt_float(tc.gap)
                    ),
                });
            }
            match tc.control_failed {
                Some(failed) => rows.push(CheckRow {
                    check: "negative-control",
                    suite: "theorem1",
                    case: case(),
                    status: pass_fail(failed),
                    detail: format!(
                        "config={};phi inflated by 1.5 must break the value equality",
                        tc.config
                    ),
                }),
                None => rows.push(CheckRow {
                    check: "negative-control",
                    suite: "theorem1",
                    case: case(),
                    status: Status::Pass,
                    detail: format!(
                        "skipped={}",
                        tc.control_note.unwrap_or("control could not run")
                    ),
                }),
            }
            if let Some((flow, brute)) = tc.oracle {
                let ok = (flow - brute).abs() <= flow_tol * brute.abs().max(1.0);
                rows.push(CheckRow {
                    check: "flow-oracle",
                    suite: "theorem1",
                    case: case(),
                    status: pass_fail(ok),
                    detail: format!(
                        "nodes={};flow={};brute_force={}",
                        tc.nodes,
                        fmt_float(flow),
                        fmt_float(brute)
                    ),
                });
            }
        }
    }
    match (tc.chain, &tc.chain_note) {
        (Some(bound), _) => rows.push(CheckRow {
            check: "chain-bound",
            suite: "theorem1",
            case: case(),
            status: pass_fail(bound <= tc.gap + SLACK),
            detail: format!(
                "bound={};gap={};factor={}",
                fmt_float(bound),
                fmt_float(tc.gap),
                fmt_float(bound / tc.gap)
            ),
        }),
        (None, Some(note)) => rows.push(CheckRow {
            check: "chain-bound",
            suite: "theorem1",
            case: case(),
            status: Status::Pass,
            detail: format!("skipped={}", note.replace(',', ";")),
        }),
        (None, None) => {}
    }
}
