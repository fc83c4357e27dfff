//! Flow-network certification of the generalized bound.
//!
//! From a spectral pair this module extracts the signed overlap vector
//! e_i = psi1_i * psi0_i, its positive support, and the Rayleigh quotient
//! that lower-bounds the gap along that support. It then builds the
//! four-rule capacitated network whose min cut must equal
//! (1 + phi_tilde) * C_support whenever phi_tilde is a valid reduced
//! Cheeger value for the support, computes max flow, and checks the
//! claimed equalities plus per-arc feasibility.
//!
//! Max flow runs Dinic on capacities scaled by 2^30 and rounded to
//! integers, which terminates exactly. Rounding can displace tied cuts by
//! a few integer units, so a float augmentation pass follows on the real
//! capacities (shortest augmenting paths, hence terminating) until no
//! residual path remains. The result is the real-valued maximum flow, and
//! saturation checks hold to 1e-9 rather than to the quantization step.

use crate::cheeger::CAP_TOL;
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::reduced::{generalized_bound, ReducedGraph};
use crate::spectra::SpectralPair;

#[derive(Debug, Clone)]
pub struct PositiveSupport {
    e: Vec<f64>,
    support: Vec<usize>,
    ehat: Vec<f64>,
    capacity: f64,
    flipped: bool,
}

impl PositiveSupport {
    /// Signed overlap e_i = psi1_i * psi0_i, after the sign convention.
    pub fn e(&self) -> &[f64] {
        &self.e
    }

    /// Sorted vertices with e_i above the zero threshold.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    /// e_i / pi_i on the support, zero elsewhere.
    pub fn ehat(&self) -> &[f64] {
        &self.ehat
    }

    /// Total mass of the support; at most 1/2 by the sign convention.
    pub fn capacity(&self) -> f64 {
        self.capacity
    }

    /// Whether the global sign of psi1 was flipped to shrink the support.
    pub fn flipped(&self) -> bool {
        self.flipped
    }
}

/// Positive side of psi1 weighted by the ground state. Components within
/// 1e-12 * ||e||_inf of zero count as zero and stay outside the support,
/// which can only weaken the inequalities checked downstream.
pub fn positive_support(sp: &SpectralPair) -> Result<PositiveSupport> {
    if sp.near_degenerate {
        return Err(Error::NearDegenerate { gap: sp.gap() });
    }
    let n = sp.psi0.len();
    let mut e: Vec<f64> = (0..n).map(|i| sp.psi1[i] * sp.psi0[i]).collect();
    let norm_inf = e.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    let zero_tol = 1e-12 * norm_inf;

    let side = |e: &[f64]| -> (Vec<usize>, f64) {
        let support: Vec<usize> = (0..n).filter(|&i| e[i] > zero_tol).collect();
        let capacity = support.iter().map(|&i| sp.psi0[i] * sp.psi0[i]).sum();
        (support, capacity)
    };

    let (mut support, mut capacity) = side(&e);
    let mut flipped = false;
    if capacity > 0.5 + CAP_TOL {
        for x in &mut e {
            *x = -*x;
        }
        flipped = true;
        (support, capacity) = side(&e);
    }
    if support.is_empty() || support.len() == n {
        return Err(Error::Support(format!(
            "positive side of psi1 has {} of {} vertices",
            support.len(),
            n
        )));
    }

    let mut ehat = vec![0.0; n];
    for &i in &support {
        ehat[i] = e[i] / (sp.psi0[i] * sp.psi0[i]);
    }
    Ok(PositiveSupport { e, support, ehat, capacity, flipped })
}

/// Rayleigh quotient of ehat over the graph: edge energy divided by the
/// support mass of ehat^2. Never exceeds the spectral gap.
pub fn rayleigh_chain_bound(g: &WeightedGraph, ps: &PositiveSupport) -> Result<f64> {
    let ehat = ps.ehat();
    let numerator: f64 =
        g.edges().iter().map(|&(i, j, w)| w * (ehat[i] - ehat[j]) * (ehat[i] - ehat[j])).sum();
    let denominator: f64 =
        ps.support().iter().map(|&i| g.pi()[i] * ehat[i] * ehat[i]).sum();
    if !(denominator > 0.0) {
        return Err(Error::Support("ehat vanishes on its support".into()));
    }
    Ok(numerator / denominator)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArcKind {
    /// Rule 1: source to x_i, capacity (1 + phi_tilde) * pi_i.
    Source,
    /// Rule 2: x_i to y_j for each kept edge (i, j), capacity w_ij.
    Cross,
    /// Rule 3: x_i to y_i, capacity pi_i + w_ii.
    Direct,
    /// Rule 4: y_j to sink, capacity pi_j.
    Sink,
    /// Hand-built arc without a rule role.
    Plain,
}

#[derive(Debug, Clone, Copy)]
pub struct Arc {
    pub from: usize,
    pub to: usize,
    pub capacity: f64,
    pub kind: ArcKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeLabel {
    Source,
    Sink,
    /// Support-layer copy of a graph vertex.
    X(usize),
    /// Vertex-layer copy of a graph vertex.
    Y(usize),
    Plain,
}

#[derive(Debug, Clone)]
pub struct FlowNetwork {
    nodes: usize,
    source: usize,
    sink: usize,
    arcs: Vec<Arc>,
    labels: Vec<NodeLabel>,
}

impl FlowNetwork {
    /// Network from explicit arcs, for tests and oracles.
    pub fn from_arcs(
        nodes: usize,
        source: usize,
        sink: usize,
        arcs: &[(usize, usize, f64)],
    ) -> Result<Self> {
        if source >= nodes || sink >= nodes || source == sink {
            return Err(Error::Validation("source and sink must be distinct nodes".into()));
        }
        let mut built = Vec::with_capacity(arcs.len());
        for &(from, to, capacity) in arcs {
            if from >= nodes || to >= nodes {
                return Err(Error::Validation(format!("arc ({from}, {to}) out of range")));
            }
            if !(capacity >= 0.0) || !capacity.is_finite() {
                return Err(Error::Validation(format!(
                    "arc ({from}, {to}) capacity {capacity} must be finite and non-negative"
                )));
            }
            built.push(Arc { from, to, capacity, kind: ArcKind::Plain });
        }
        let mut labels = vec![NodeLabel::Plain; nodes];
        labels[source] = NodeLabel::Source;
        labels[sink] = NodeLabel::Sink;
        Ok(FlowNetwork { nodes, source, sink, arcs: built, labels })
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn labels(&self) -> &[NodeLabel] {
        &self.labels
    }

    /// Sum of source-arc capacities.
    pub fn source_capacity(&self) -> f64 {
        self.arcs.iter().filter(|a| a.from == self.source).map(|a| a.capacity).sum()
    }
}

/// The four-rule network for a reduction, a support set, and a reduced
/// Cheeger value. Nodes are source, sink, one x node per support vertex,
/// and one y node per graph vertex, in that order.
pub fn build_network(
    rg: &ReducedGraph,
    support: &[usize],
    phi_tilde: f64,
) -> Result<FlowNetwork> {
    let g = rg.parent();
    let n = g.n();
    let mut sup: Vec<usize> = support.to_vec();
    sup.sort_unstable();
    sup.dedup();
    if sup.is_empty() {
        return Err(Error::Support("network support is empty".into()));
    }
    if let Some(&v) = sup.iter().find(|&&v| v >= n) {
        return Err(Error::Support(format!("support vertex {v} out of range")));
    }
    if !(phi_tilde >= 0.0) || !phi_tilde.is_finite() {
        return Err(Error::Validation(format!("phi_tilde {phi_tilde} must be non-negative")));
    }

    let mut x_of = vec![usize::MAX; n];
    for (k, &v) in sup.iter().enumerate() {
        x_of[v] = 2 + k;
    }
    let y_of = |j: usize| 2 + sup.len() + j;

    let mut arcs = Vec::with_capacity(2 * sup.len() + n + 2 * rg.edge_count());
    for &i in &sup {
        arcs.push(Arc {
            from: 0,
            to: x_of[i],
            capacity: (1.0 + phi_tilde) * g.pi()[i],
            kind: ArcKind::Source,
        });
    }
    for (i, j, w) in rg.kept_edges() {
        if x_of[i] != usize::MAX {
            arcs.push(Arc { from: x_of[i], to: y_of(j), capacity: w, kind: ArcKind::Cross });
        }
        if x_of[j] != usize::MAX {
            arcs.push(Arc { from: x_of[j], to: y_of(i), capacity: w, kind: ArcKind::Cross });
        }
    }
    for &i in &sup {
        arcs.push(Arc {
            from: x_of[i],
            to: y_of(i),
            capacity: g.pi()[i] + g.self_loops()[i],
            kind: ArcKind::Direct,
        });
    }
    for j in 0..n {
        arcs.push(Arc { from: y_of(j), to: 1, capacity: g.pi()[j], kind: ArcKind::Sink });
    }

    let mut labels = vec![NodeLabel::Plain; 2 + sup.len() + n];
    labels[0] = NodeLabel::Source;
    labels[1] = NodeLabel::Sink;
    for &i in &sup {
        labels[x_of[i]] = NodeLabel::X(i);
    }
    for j in 0..n {
        labels[y_of(j)] = NodeLabel::Y(j);
    }
    Ok(FlowNetwork { nodes: labels.len(), source: 0, sink: 1, arcs, labels })
}

#[derive(Debug, Clone)]
pub struct FlowResult {
    /// Net flow out of the source.
    pub value: f64,
    /// Per-arc flow, parallel to the network's arc list.
    pub flows: Vec<f64>,
    /// Min-cut certificate: nodes the source still reaches in the
    /// residual graph, sorted.
    pub source_side: Vec<usize>,
}

const FLOW_SCALE: f64 = (1u64 << 30) as f64;

fn integer_scale(arcs: &[Arc]) -> Result<f64> {
    let max_cap = arcs.iter().fold(0.0f64, |m, a| m.max(a.capacity));
    let m = arcs.len().max(1) as f64;
    let mut scale = FLOW_SCALE;
    // Keep the total integer capacity far from i64 range.
    while max_cap * scale > (i64::MAX / 4) as f64 / m {
        scale *= 0.5;
    }
    let resolution = 0.5 / scale;
    if resolution > 1e-6 * max_cap.max(1.0) {
        return Err(Error::FlowPrecision(resolution));
    }
    Ok(scale)
}

struct Dinic {
    to: Vec<usize>,
    cap: Vec<i64>,
    adj: Vec<Vec<usize>>,
}

impl Dinic {
    fn new(nodes: usize) -> Self {
        Dinic { to: Vec::new(), cap: Vec::new(), adj: vec![Vec::new(); nodes] }
    }

    fn add(&mut self, from: usize, to: usize, cap: i64) {
        self.adj[from].push(self.to.len());
        self.to.push(to);
        self.cap.push(cap);
        self.adj[to].push(self.to.len());
        self.to.push(from);
        self.cap.push(0);
    }

    fn levels(&self, source: usize) -> Vec<i32> {
        let mut level = vec![-1; self.adj.len()];
        level[source] = 0;
        let mut queue = std::collections::VecDeque::from([source]);
        while let Some(v) = queue.pop_front() {
            for &a in &self.adj[v] {
                if self.cap[a] > 0 && level[self.to[a]] < 0 {
                    level[self.to[a]] = level[v] + 1;
                    queue.push_back(self.to[a]);
                }
            }
        }
        level
    }

    fn push(
        &mut self,
        v: usize,
        sink: usize,
        limit: i64,
        level: &[i32],
        iter: &mut [usize],
    ) -> i64 {
        if v == sink {
            return limit;
        }
        while iter[v] < self.adj[v].len() {
            let a = self.adj[v][iter[v]];
            let u = self.to[a];
            if self.cap[a] > 0 && level[u] == level[v] + 1 {
                let pushed = self.push(u, sink, limit.min(self.cap[a]), level, iter);
                if pushed > 0 {
                    self.cap[a] -= pushed;
                    self.cap[a ^ 1] += pushed;
                    return pushed;
                }
            }
            iter[v] += 1;
        }
        0
    }

    fn run(&mut self, source: usize, sink: usize) {
        loop {
            let level = self.levels(source);
            if level[sink] < 0 {
                return;
            }
            let mut iter = vec![0usize; self.adj.len()];
            while self.push(source, sink, i64::MAX, &level, &mut iter) > 0 {}
        }
    }
}

/// Maximum flow. Integer Dinic at a power-of-two scale does the bulk of
/// the work; shortest-path float augmentation then removes the residual
/// quantization slack, so the returned value is the real max flow up to
/// roundoff.
pub fn max_flow(net: &FlowNetwork) -> Result<FlowResult> {
    let scale = integer_scale(&net.arcs)?;
    let mut dinic = Dinic::new(net.nodes);
    // Capacities round down, so the integer solution is feasible in the
    // real network and, being dyadic, conserves flow exactly. Rounding to
    // nearest would need a clip back under the real capacity, and that
    // clip breaks conservation at interior nodes, which no source-to-sink
    // augmentation can repair.
    for arc in &net.arcs {
        dinic.add(arc.from, arc.to, (arc.capacity * scale).floor() as i64);
    }
    dinic.run(net.source, net.sink);

    // Flow on arc k is what moved onto its reverse pair.
    let mut flows: Vec<f64> = net
        .arcs
        .iter()
        .enumerate()
        .map(|(k, _)| dinic.cap[2 * k + 1] as f64 / scale)
        .collect();

    polish(net, &mut flows);

    let value = net
        .arcs
        .iter()
        .zip(&flows)
        .map(|(arc, &f)| {
            if arc.from == net.source {
                f
            } else if arc.to == net.source {
                -f
            } else {
                0.0
            }
        })
        .sum();
    let source_side = residual_reachable(net, &flows);
    Ok(FlowResult { value, flows, source_side })
}

/// Shortest-path augmentation on the real capacities until no residual
/// path remains. Terminates by the standard shortest-augmenting-path
/// argument regardless of capacity values. The traversal threshold sits a
/// few ulps above zero: large enough that augmenting always saturates the
/// bottleneck arc past it despite roundoff, small enough that the final
/// value undershoots the true max flow by at most arc-count ulps.
fn polish(net: &FlowNetwork, flows: &mut [f64]) {
    let max_cap = net.arcs.iter().fold(0.0f64, |m, a| m.max(a.capacity));
    let eps = 32.0 * f64::EPSILON * max_cap.max(1.0);
    let mut fwd: Vec<Vec<usize>> = vec![Vec::new(); net.nodes];
    let mut bwd: Vec<Vec<usize>> = vec![Vec::new(); net.nodes];
    for (k, arc) in net.arcs.iter().enumerate() {
        fwd[arc.from].push(k);
        bwd[arc.to].push(k);
    }
    // Parent arc per node: (arc index, true when traversed forward).
    let mut parent: Vec<Option<(usize, bool)>> = vec![None; net.nodes];
    loop {
        for p in &mut parent {
            *p = None;
        }
        parent[net.source] = Some((usize::MAX, true));
        let mut queue = std::collections::VecDeque::from([net.source]);
        'bfs: while let Some(v) = queue.pop_front() {
            for &k in &fwd[v] {
                let arc = &net.arcs[k];
                if parent[arc.to].is_none() && arc.capacity - flows[k] > eps {
                    parent[arc.to] = Some((k, true));
                    if arc.to == net.sink {
                        break 'bfs;
                    }
                    queue.push_back(arc.to);
                }
            }
            for &k in &bwd[v] {
                let arc = &net.arcs[k];
                if parent[arc.from].is_none() && flows[k] > eps {
                    parent[arc.from] = Some((k, false));
                    if arc.from == net.sink {
                        break 'bfs;
                    }
                    queue.push_back(arc.from);
                }
            }
        }
        if parent[net.sink].is_none() {
            return;
        }
        let mut bottleneck = f64::INFINITY;
        let mut v = net.sink;
        while v != net.source {
            let (k, forward) = parent[v].expect("path reaches the source");
            let arc = &net.arcs[k];
            if forward {
                bottleneck = bottleneck.min(arc.capacity - flows[k]);
                v = arc.from;
            } else {
                bottleneck = bottleneck.min(flows[k]);
                v = arc.to;
            }
        }
        let mut v = net.sink;
        while v != net.source {
            let (k, forward) = parent[v].expect("path reaches the source");
            if forward {
                flows[k] = (flows[k] + bottleneck).min(net.arcs[k].capacity);
                v = net.arcs[k].from;
            } else {
                flows[k] = (flows[k] - bottleneck).max(0.0);
                v = net.arcs[k].to;
            }
        }
    }
}

fn residual_reachable(net: &FlowNetwork, flows: &[f64]) -> Vec<usize> {
    let max_cap = net.arcs.iter().fold(0.0f64, |m, a| m.max(a.capacity));
    let eps = 1e-9 * max_cap.max(1.0);
    let mut fwd: Vec<Vec<usize>> = vec![Vec::new(); net.nodes];
    let mut bwd: Vec<Vec<usize>> = vec![Vec::new(); net.nodes];
    for (k, arc) in net.arcs.iter().enumerate() {
        fwd[arc.from].push(k);
        bwd[arc.to].push(k);
    }
    let mut seen = vec![false; net.nodes];
    seen[net.source] = true;
    let mut queue = std::collections::VecDeque::from([net.source]);
    while let Some(v) = queue.pop_front() {
        for &k in &fwd[v] {
            if !seen[net.arcs[k].to] && net.arcs[k].capacity - flows[k] > eps {
                seen[net.arcs[k].to] = true;
                queue.push_back(net.arcs[k].to);
            }
        }
        for &k in &bwd[v] {
            if !seen[net.arcs[k].from] && flows[k] > eps {
                seen[net.arcs[k].from] = true;
                queue.push_back(net.arcs[k].from);
            }
        }
    }
    (0..net.nodes).filter(|&v| seen[v]).collect()
}

/// Minimum cut by enumerating every source/sink node partition. Oracle
/// for `max_flow` on networks of at most 16 nodes.
pub fn brute_force_min_cut(net: &FlowNetwork) -> Result<f64> {
    if net.nodes > 16 {
        return Err(Error::SizeLimit {
            what: "brute-force min-cut enumeration",
            requested: net.nodes,
            limit: 16,
        });
    }
    let free: Vec<usize> =
        (0..net.nodes).filter(|&v| v != net.source && v != net.sink).collect();
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << free.len()) {
        let mut in_source_side = vec![false; net.nodes];
        in_source_side[net.source] = true;
        for (b, &v) in free.iter().enumerate() {
            in_source_side[v] = (mask >> b) & 1 == 1;
        }
        let value: f64 = net
            .arcs
            .iter()
            .filter(|a| in_source_side[a.from] && !in_source_side[a.to])
            .map(|a| a.capacity)
            .sum();
        best = best.min(value);
    }
    Ok(best)
}

#[derive(Debug, Clone)]
pub struct Theorem1Report {
    pub phi_tilde: f64,
    pub support_capacity: f64,
    /// (1 + phi_tilde) * support_capacity, the claimed min-cut value.
    pub expected_value: f64,
    pub flow_value: f64,
    /// Relative gap between flow value and the claim.
    pub value_residual: f64,
    pub value_matches: bool,
    /// Worst absolute slack on a source arc; the claim saturates them all.
    pub saturation_residual: f64,
    pub sources_saturated: bool,
    /// Worst overshoot of inflow into a y node above its mass.
    pub sink_residual: f64,
    pub sink_feasible: bool,
    /// Worst excess of total cross-arc capacity into a y node over its
    /// mass. When positive, a cut can bypass those arcs through the
    /// cheaper sink arc and undercut the claimed value, so the min-cut
    /// equality is not guaranteed for this instance.
    pub inflow_excess: f64,
    pub inflow_ok: bool,
    /// phi_tilde^2 / (2c) for the reduction under test.
    pub bound: f64,
    pub oracle_gap: Option<f64>,
    pub bound_below_gap: Option<bool>,
    pub pass: bool,
}

/// Builds the four-rule network, runs max flow, and checks the min-cut
/// value claim, source saturation, sink feasibility, and (given an oracle
/// gap) the end-to-end gap bound. `inflow_ok` reports whether the
/// instance satisfies the structural premise the value claim needs
/// (cross-arc capacity into each vertex bounded by its mass); when it
/// does and phi_tilde is the subset minimum for the support, the first
/// two checks are guaranteed.
pub fn verify_theorem1(
    rg: &ReducedGraph,
    support: &[usize],
    phi_tilde: f64,
    oracle_gap: Option<f64>,
) -> Result<Theorem1Report> {
    let g = rg.parent();
    let net = build_network(rg, support, phi_tilde)?;
    let res = max_flow(&net)?;

    let support_capacity: f64 = net
        .arcs()
        .iter()
        .filter(|a| a.kind == ArcKind::Source)
        .map(|a| a.capacity)
        .sum::<f64>()
        / (1.0 + phi_tilde);
    let expected_value = (1.0 + phi_tilde) * support_capacity;
    let value_residual = (res.value - expected_value).abs() / expected_value.abs().max(1.0);
    let value_matches = value_residual <= 1e-6;

    let saturation_residual = net
        .arcs()
        .iter()
        .zip(&res.flows)
        .filter(|(a, _)| a.kind == ArcKind::Source)
        .fold(0.0f64, |m, (a, &f)| m.max((a.capacity - f).abs()));
    let sources_saturated = saturation_residual <= 1e-9;

    let mut inflow = vec![0.0f64; net.nodes()];
    let mut cross_cap = vec![0.0f64; net.nodes()];
    for (arc, &f) in net.arcs().iter().zip(&res.flows) {
        if matches!(arc.kind, ArcKind::Cross | ArcKind::Direct) {
            inflow[arc.to] += f;
        }
        if arc.kind == ArcKind::Cross {
            cross_cap[arc.to] += arc.capacity;
        }
    }
    let mut sink_residual = 0.0f64;
    let mut inflow_excess = f64::NEG_INFINITY;
    for (node, label) in net.labels().iter().enumerate() {
        if let NodeLabel::Y(j) = label {
            sink_residual = sink_residual.max(inflow[node] - g.pi()[*j]);
            inflow_excess = inflow_excess.max(cross_cap[node] - g.pi()[*j]);
        }
    }
    let sink_feasible = sink_residual <= 1e-9;
    let inflow_ok = inflow_excess <= 1e-9;

    let bound = generalized_bound(phi_tilde, rg.constriction())?;
    let bound_below_gap = oracle_gap.map(|gap| gap + 1e-9 >= bound);
    let pass =
        value_matches && sources_saturated && sink_feasible && bound_below_gap.unwrap_or(true);
    Ok(Theorem1Report {
        phi_tilde,
        support_capacity,
        expected_value,
        flow_value: res.value,
        value_residual,
        value_matches,
        saturation_residual,
        sources_saturated,
        sink_residual,
        sink_feasible,
        inflow_excess,
        inflow_ok,
        bound,
        oracle_gap,
        bound_below_gap,
        pass,
    })
}

/// Text dump: node list with layer tags, then one line per arc with its
/// capacity and flow.
pub fn network_to_text(net: &FlowNetwork, flows: &[f64]) -> String {
    let mut out = String::from("network 1\n");
    out.push_str(&format!("nodes {}\n", net.nodes()));
    for (id, label) in net.labels().iter().enumerate() {
        match label {
            NodeLabel::Source => out.push_str(&format!("node {id} source\n")),
            NodeLabel::Sink => out.push_str(&format!("node {id} sink\n")),
            NodeLabel::X(v) => out.push_str(&format!("node {id} x {v}\n")),
            NodeLabel::Y(v) => out.push_str(&format!("node {id} y {v}\n")),
            NodeLabel::Plain => out.push_str(&format!("node {id} plain\n")),
        }
    }
    out.push_str(&format!("arcs {}\n", net.arcs().len()));
    for (k, arc) in net.arcs().iter().enumerate() {
        let flow = flows.get(k).copied().unwrap_or(0.0);
        out.push_str(&format!("{} {} {:.16e} {:.16e}\n", arc.from, arc.to, arc.capacity, flow));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cheeger::{cheeger_exact, CAP_TOL, ENUM_LIMIT};
    use crate::graph::graph_from;
    use crate::model::{ising_chain, random_stoquastic, ring, transverse_field};
    use crate::reduced::{
        reduce_cut_only, reduce_cut_plus_paths, reduced_cheeger, DomainMode, SUBSET_LIMIT,
    };
    use crate::spectra::{low_spectrum, EigenOptions};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pair_and_graph(
        h: &crate::model::StoquasticMatrix,
    ) -> (crate::spectra::SpectralPair, WeightedGraph) {
        let sp = low_spectrum(h, &EigenOptions::default()).unwrap();
        let g = graph_from(h, &sp.ground()).unwrap();
        (sp, g)
    }

    #[test]
    fn two_level_support_is_analytic() {
        let (sp, g) = pair_and_graph(&transverse_field(1, 1.0).unwrap());
        let ps = positive_support(&sp).unwrap();
        assert!((ps.e()[0] - 0.5).abs() < 1e-12);
        assert!((ps.e()[1] + 0.5).abs() < 1e-12);
        assert_eq!(ps.support(), &[0]);
        assert!((ps.capacity() - 0.5).abs() < 1e-12);
        assert!((ps.ehat()[0] - 1.0).abs() < 1e-12);
        assert_eq!(ps.ehat()[1], 0.0);
        let bound = rayleigh_chain_bound(&g, &ps).unwrap();
        assert!((bound - 1.0).abs() < 1e-9);
    }

    #[test]
    fn overlap_vector_sums_to_zero() {
        for h in [
            ring(4, 1.0).unwrap(),
            ring(8, 1.0).unwrap(),
            ising_chain(3, 2.0).unwrap(),
            transverse_field(3, 1.0).unwrap(),
        ] {
            let (sp, _) = pair_and_graph(&h);
            let ps = positive_support(&sp).unwrap();
            let sum: f64 = ps.e().iter().sum();
            assert!(sum.abs() <= 1e-12, "sum {sum}");
            assert!(!ps.support().is_empty() && ps.support().len() < h.dim());
            assert!(ps.capacity() <= 0.5 + 1e-12);
        }
    }

    #[test]
    fn chain_bound_stays_below_the_gap() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut models = vec![
            ring(8, 1.0).unwrap(),
            transverse_field(3, 1.0).unwrap(),
            ising_chain(3, 2.0).unwrap(),
        ];
        for _ in 0..10 {
            models.push(random_stoquastic(&mut rng));
        }
        for h in models {
            let (sp, g) = pair_and_graph(&h);
            let ps = positive_support(&sp).unwrap();
            let bound = rayleigh_chain_bound(&g, &ps).unwrap();
            assert!(
                bound <= sp.gap() + 1e-9,
                "chain bound {bound} above gap {}",
                sp.gap()
            );
        }
    }

    #[test]
    fn series_network_bottleneck() {
        let net = FlowNetwork::from_arcs(3, 0, 2, &[(0, 1, 3.0), (1, 2, 2.0)]).unwrap();
        let res = max_flow(&net).unwrap();
        assert!((res.value - 2.0).abs() < 1e-12);
        assert_eq!(res.source_side, vec![0, 1]);
        assert!((res.flows[0] - 2.0).abs() < 1e-12);
        assert!((res.flows[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn square_network_arcs_and_value() {
        let h = transverse_field(2, 1.0).unwrap();
        let (_, g) = pair_and_graph(&h);
        let s = cheeger_exact(&g, CAP_TOL).unwrap().cut.subset;
        assert_eq!(s, vec![0, 1]);
        let rg = reduce_cut_only(&g, &s).unwrap();
        let rc =
            reduced_cheeger(&rg, DomainMode::SubsetsOfCut, CAP_TOL, SUBSET_LIMIT, ENUM_LIMIT)
                .unwrap();
        assert!((rc.phi_tilde - 1.0).abs() < 1e-12);
        let net = build_network(&rg, &s, rc.phi_tilde).unwrap();
        assert_eq!(net.nodes(), 2 + 2 + 4);
        assert_eq!(net.arcs().len(), 10);
        let caps_by_kind = |kind: ArcKind| -> Vec<f64> {
            net.arcs().iter().filter(|a| a.kind == kind).map(|a| a.capacity).collect()
        };
        for cap in caps_by_kind(ArcKind::Source) {
            assert!((cap - 0.5).abs() < 1e-12);
        }
        for kind in [ArcKind::Cross, ArcKind::Direct, ArcKind::Sink] {
            let caps = caps_by_kind(kind);
            assert_eq!(caps.len(), if kind == ArcKind::Sink { 4 } else { 2 });
            for cap in caps {
                assert!((cap - 0.25).abs() < 1e-12);
            }
        }
        let res = max_flow(&net).unwrap();
        assert!((res.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn single_vertex_support_builds_a_star() {
        let h = transverse_field(2, 1.0).unwrap();
        let (_, g) = pair_and_graph(&h);
        let rg = reduce_cut_only(&g, &[0, 1]).unwrap();
        let net = build_network(&rg, &[0], 1.0).unwrap();
        // One source arc, one kept edge out of vertex 0, one direct arc,
        // four sink arcs.
        assert_eq!(net.arcs().len(), 1 + 1 + 1 + 4);
    }

    #[test]
    fn flow_matches_brute_force_on_random_networks() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let nodes = rng.gen_range(4..=9);
            let mut arcs = Vec::new();
            for from in 0..nodes {
                for to in 0..nodes {
                    if from != to && rng.gen_bool(0.4) {
                        arcs.push((from, to, rng.gen_range(0.0..2.0)));
                    }
                }
            }
            let net = FlowNetwork::from_arcs(nodes, 0, nodes - 1, &arcs).unwrap();
            let res = max_flow(&net).unwrap();
            let oracle = brute_force_min_cut(&net).unwrap();
            assert!(
                (res.value - oracle).abs() <= 1e-9 * oracle.max(1.0),
                "flow {} vs cut {oracle}",
                res.value
            );
        }
    }

    #[test]
    fn flows_respect_capacity_and_conservation() {
        let h = ising_chain(3, 2.0).unwrap();
        let (sp, g) = pair_and_graph(&h);
        let ps = positive_support(&sp).unwrap();
        let rg = reduce_cut_plus_paths(&g, ps.support()).unwrap();
        let rc =
            reduced_cheeger(&rg, DomainMode::SubsetsOfCut, CAP_TOL, SUBSET_LIMIT, ENUM_LIMIT)
                .unwrap();
        let net = build_network(&rg, ps.support(), rc.phi_tilde).unwrap();
        let res = max_flow(&net).unwrap();
        for (arc, &f) in net.arcs().iter().zip(&res.flows) {
            assert!(f >= -1e-12 && f <= arc.capacity + 1e-9);
        }
        let mut net_out = vec![0.0f64; net.nodes()];
        for (arc, &f) in net.arcs().iter().zip(&res.flows) {
            net_out[arc.from] += f;
            net_out[arc.to] -= f;
        }
        for v in 0..net.nodes() {
            if v != net.source() && v != net.sink() {
                assert!(net_out[v].abs() < 1e-9, "node {v} imbalance {}", net_out[v]);
            }
        }
        assert!((net_out[net.source()] - res.value).abs() < 1e-9);
    }

    #[test]
    fn theorem_holds_on_the_test_models() {
        // Cheeger-cut supports on models whose per-vertex kept inflow
        // stays within the mass, which is what the value claim needs.
        for (h, s, paths) in [
            (transverse_field(2, 1.0).unwrap(), vec![0, 1], false),
            (transverse_field(3, 1.0).unwrap(), vec![0, 1, 2, 3], false),
            (ring(8, 1.0).unwrap(), vec![0, 1, 2, 3], true),
            (ring(6, 1.0).unwrap(), vec![0, 1, 2], true),
        ] {
            let (sp, g) = pair_and_graph(&h);
            assert_eq!(cheeger_exact(&g, CAP_TOL).unwrap().cut.subset, s);
            let rg = if paths {
                reduce_cut_plus_paths(&g, &s).unwrap()
            } else {
                reduce_cut_only(&g, &s).unwrap()
            };
            let rc =
                reduced_cheeger(&rg, DomainMode::SubsetsOfCut, CAP_TOL, SUBSET_LIMIT, ENUM_LIMIT)
                    .unwrap();
            let report = verify_theorem1(&rg, &s, rc.phi_tilde, Some(sp.gap())).unwrap();
            assert!(report.inflow_ok, "{h:?}: {report:?}");
            assert!(report.pass, "{h:?}: {report:?}");
        }
    }

    #[test]
    fn capped_inflow_voids_the_value_claim() {
        // The psi1-positive side of this chain funnels more kept weight
        // into single vertices than their mass: the premise diagnostic
        // must flag it, and the min cut indeed lands below the claim.
        let h = ising_chain(3, 2.0).unwrap();
        let (sp, g) = pair_and_graph(&h);
        let ps = positive_support(&sp).unwrap();
        let rg = reduce_cut_plus_paths(&g, ps.support()).unwrap();
        let rc =
            reduced_cheeger(&rg, DomainMode::SubsetsOfCut, CAP_TOL, SUBSET_LIMIT, ENUM_LIMIT)
                .unwrap();
        assert!(rc.phi_tilde > 0.0);
        let report = verify_theorem1(&rg, ps.support(), rc.phi_tilde, Some(sp.gap())).unwrap();
        assert!(!report.inflow_ok, "{report:?}");
        assert!(!report.value_matches, "{report:?}");
        assert!(report.flow_value < report.expected_value);
        // The flow itself is still a valid flow: feasibility never breaks.
        assert!(report.sink_feasible);
    }

    #[test]
    fn ring_flow_value_is_three_quarters() {
        let h = ring(8, 1.0).unwrap();
        let (_, g) = pair_and_graph(&h);
        let s = vec![0, 1, 2, 3];
        let rg = reduce_cut_plus_paths(&g, &s).unwrap();
        let rc =
            reduced_cheeger(&rg, DomainMode::SubsetsOfCut, CAP_TOL, SUBSET_LIMIT, ENUM_LIMIT)
                .unwrap();
        let report = verify_theorem1(&rg, &s, rc.phi_tilde, None).unwrap();
        assert!((report.flow_value - 0.75).abs() < 1e-9);
        assert!(report.pass);
    }

    #[test]
    fn inflated_phi_breaks_the_value_claim() {
        for (h, s, paths) in [
            (transverse_field(2, 1.0).unwrap(), vec![0, 1], false),
            (ring(8, 1.0).unwrap(), vec![0, 1, 2, 3], true),
        ] {
            let (sp, g) = pair_and_graph(&h);
            let rg = if paths {
                reduce_cut_plus_paths(&g, &s).unwrap()
            } else {
                reduce_cut_only(&g, &s).unwrap()
            };
            let rc =
                reduced_cheeger(&rg, DomainMode::SubsetsOfCut, CAP_TOL, SUBSET_LIMIT, ENUM_LIMIT)
                    .unwrap();
            assert!(rc.phi_tilde > 0.0);
            let honest = verify_theorem1(&rg, &s, rc.phi_tilde, Some(sp.gap())).unwrap();
            assert!(honest.pass, "{honest:?}");
            let inflated = verify_theorem1(&rg, &s, 1.5 * rc.phi_tilde, Some(sp.gap())).unwrap();
            assert!(!inflated.value_matches, "{inflated:?}");
            assert!(inflated.flow_value < inflated.expected_value);
            assert!(!inflated.pass);
        }
    }

    #[test]
    fn network_dump_lists_nodes_and_arcs() {
        let h = transverse_field(2, 1.0).unwrap();
        let (_, g) = pair_and_graph(&h);
        let rg = reduce_cut_only(&g, &[0, 1]).unwrap();
        let net = build_network(&rg, &[0, 1], 1.0).unwrap();
        let res = max_flow(&net).unwrap();
        let text = network_to_text(&net, &res.flows);
        assert!(text.starts_with("network 1\nnodes 8\n"));
        assert!(text.contains("node 2 x 0\n"));
        assert!(text.contains("node 4 y 0\n"));
        assert!(text.contains("arcs 10\n"));
        assert_eq!(text.lines().count(), 2 + 8 + 1 + 10);
    }

    #[test]
    fn degenerate_pair_is_rejected() {
        // Two decoupled 2-vertex blocks share the ground energy, which the
        // solver flags; the support extraction must then refuse.
        let sp = SpectralPair {
            lambda0: -1.0,
            lambda1: -1.0 + 1e-12,
            psi0: vec![0.5; 4],
            psi1: vec![0.5, 0.5, -0.5, -0.5],
            residual0: 0.0,
            residual1: 0.0,
            near_degenerate: true,
            method: crate::spectra::SolveMethod::Dense,
        };
        assert!(matches!(
            positive_support(&sp),
            Err(Error::NearDegenerate { .. })
        ));
    }
}
