//! Cheeger constant of the dressed graph, exactly or over candidate cut
//! families, plus the classic two-sided gap bounds and the two-valued
//! variational upper bound.
//!
//! A cut subset S is feasible when its capacity C_S stays within cap_tol of
//! one half; the Cheeger constant minimizes F_S / C_S over feasible subsets.
//! Exact minimization enumerates subsets in Gray-code order with incremental
//! flow/capacity updates, pinning vertex 0 outside S and checking both
//! orientations, so each of the 2^(N-1) states costs O(degree).

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

/// Slack on the C_S <= 1/2 feasibility test; uniform-mass graphs with an
/// even vertex count hit 1/2 exactly and must stay feasible.
pub const CAP_TOL: f64 = 1e-12;

/// Largest N for exact enumeration (2^23 subsets at the limit).
pub const ENUM_LIMIT: usize = 24;

/// Relative tolerance under which two flow/capacity ratios count as tied.
const RATIO_TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct Cut {
    /// Sorted vertex indices of S.
    pub subset: Vec<usize>,
    /// Total weight crossing the cut (self-loops never contribute).
    pub flow: f64,
    /// Total pi-mass of S.
    pub capacity: f64,
}

impl Cut {
    pub fn ratio(&self) -> f64 {
        self.flow / self.capacity
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheegerMethod {
    Exact,
    CandidateFamily,
}

impl std::fmt::Display for CheegerMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CheegerMethod::Exact => "exact",
            CheegerMethod::CandidateFamily => "candidate-family",
        })
    }
}

#[derive(Debug, Clone)]
pub struct CheegerResult {
    pub phi: f64,
    pub cut: Cut,
    pub method: CheegerMethod,
    pub subsets_scanned: u64,
    pub feasible_seen: u64,
}

/// Exact flow and capacity of a proper subset. The flow sums over the global
/// edge list, so F_S and F_{S complement} are computed in the identical
/// floating-point order and compare bitwise equal.
pub fn flow_capacity(g: &WeightedGraph, subset: &[usize]) -> Result<Cut> {
    let subset = sanitize_subset(g.n(), subset)?;
    let mut in_s = vec![false; g.n()];
    for &v in &subset {
        in_s[v] = true;
    }
    let mut flow = 0.0;
    for &(i, j, w) in g.edges() {
        if in_s[i] != in_s[j] {
            flow += w;
        }
    }
    let capacity = subset.iter().map(|&v| g.pi()[v]).sum();
    Ok(Cut { subset, flow, capacity })
}

fn sanitize_subset(n: usize, subset: &[usize]) -> Result<Vec<usize>> {
    let mut s: Vec<usize> = subset.to_vec();
    s.sort_unstable();
    s.dedup();
    if let Some(&v) = s.iter().find(|&&v| v >= n) {
        return Err(Error::DegenerateCut(format!("vertex {v} out of range for {n}")));
    }
    if s.is_empty() {
        return Err(Error::DegenerateCut("empty subset".into()));
    }
    if s.len() == n {
        return Err(Error::DegenerateCut("subset is the whole vertex set".into()));
    }
    Ok(s)
}

/// Less means strictly better (smaller ratio); ratios within a relative
/// tie tolerance compare equal so the lexicographic rule can take over.
pub(crate) fn cmp_ratio(f1: f64, c1: f64, f2: f64, c2: f64) -> std::cmp::Ordering {
    let a = f1 * c2;
    let b = f2 * c1;
    if (a - b).abs() <= RATIO_TIE_TOL * a.abs().max(b.abs()).max(f64::MIN_POSITIVE) {
        std::cmp::Ordering::Equal
    } else {
        a.partial_cmp(&b).expect("finite ratios")
    }
}

/// Exhaustive Cheeger constant. Vertex 0 is pinned outside the enumerated
/// side; both a subset and its complement are tested for capacity
/// feasibility, and ties go to the lexicographically smallest subset.
pub fn cheeger_exact(g: &WeightedGraph, cap_tol: f64) -> Result<CheegerResult> {
    let n = g.n();
    if n > ENUM_LIMIT {
        return Err(Error::SizeLimit {
            what: "exact Cheeger enumeration (use a candidate family instead)",
            requested: n,
            limit: ENUM_LIMIT,
        });
    }
    let total_pi = g.pi_total();
    let states = 1u64 << (n - 1);

    let mut in_s = vec![false; n];
    let mut flow = 0.0f64;
    let mut cap = 0.0f64;
    let mut best: Option<(f64, f64, Vec<usize>)> = None;
    let mut feasible_seen = 0u64;

    // Gray-code walk: at step k flip the vertex given by the low set bit.
    for k in 1..states {
        let v = k.trailing_zeros() as usize + 1;
        if in_s[v] {
            cap -= g.pi()[v];
            for &(u, w) in g.neighbors(v) {
                if in_s[u] {
                    flow += w;
                } else {
                    flow -= w;
                }
            }
        } else {
            for &(u, w) in g.neighbors(v) {
                if in_s[u] {
                    flow -= w;
                } else {
                    flow += w;
                }
            }
            cap += g.pi()[v];
        }
        in_s[v] = !in_s[v];

        for complemented in [false, true] {
            let c = if complemented { total_pi - cap } else { cap };
            if c > 0.5 + cap_tol {
                continue;
            }
            feasible_seen += 1;
            let better = match &best {
                None => true,
                Some((bf, bc, bs)) => match cmp_ratio(flow, c, *bf, *bc) {
                    std::cmp::Ordering::Less => true,
                    std::cmp::Ordering::Greater => false,
                    std::cmp::Ordering::Equal => {
                        collect_side(&in_s, complemented) < *bs
                    }
                },
            };
            if better {
                let subset = collect_side(&in_s, complemented);
                // Fresh O(E) recompute at adoption kills incremental drift.
                let cut = flow_capacity(g, &subset)?;
                best = Some((cut.flow, cut.capacity, subset));
            }
        }
    }

    let (flow, capacity, subset) =
        best.ok_or_else(|| Error::DegenerateCut("no feasible subset".into()))?;
    Ok(CheegerResult {
        phi: flow / capacity,
        cut: Cut { subset, flow, capacity },
        method: CheegerMethod::Exact,
        subsets_scanned: states - 1,
        feasible_seen,
    })
}

fn collect_side(in_s: &[bool], complemented: bool) -> Vec<usize> {
    in_s.iter()
        .enumerate()
        .filter(|&(_, &m)| m != complemented)
        .map(|(i, _)| i)
        .collect()
}

/// Cut generators for sizes beyond exact enumeration. Members are visited in
/// a fixed order so candidate searches are deterministic.
#[derive(Debug, Clone)]
pub enum CutFamily {
    /// For 2^bits vertices: the half with bit k clear, one member per k.
    CoordinateHalves { bits: usize },
    /// For 2^bits vertices: all vertices of Hamming weight <= level.
    HammingLevels { bits: usize },
    /// Every contiguous arc of length 1..=n/2 on a ring of n vertices.
    RingArcs { n: usize },
    Explicit(Vec<Vec<usize>>),
}

impl CutFamily {
    pub fn for_each<F: FnMut(&[usize])>(&self, mut f: F) {
        match self {
            CutFamily::CoordinateHalves { bits } => {
                let dim = 1usize << bits;
                let mut member = Vec::with_capacity(dim / 2);
                for k in 0..*bits {
                    member.clear();
                    member.extend((0..dim).filter(|v| v & (1 << k) == 0));
                    f(&member);
                }
            }
            CutFamily::HammingLevels { bits } => {
                let dim = 1usize << bits;
                let mut member = Vec::new();
                for level in 0..*bits {
                    member.clear();
                    member.extend((0..dim).filter(|v: &usize| v.count_ones() as usize <= level));
                    f(&member);
                }
            }
            CutFamily::RingArcs { n } => {
                let mut member = Vec::with_capacity(n / 2);
                for start in 0..*n {
                    for len in 1..=(n / 2) {
                        member.clear();
                        member.extend((0..len).map(|o| (start + o) % n));
                        member.sort_unstable();
                        f(&member);
                    }
                }
            }
            CutFamily::Explicit(members) => {
                for member in members {
                    f(member);
                }
            }
        }
    }
}

/// Minimum ratio over a cut family: an upper estimate of the exact Cheeger
/// constant. Both orientations of each member are considered; infeasible or
/// malformed members are skipped.
pub fn cheeger_candidate(
    g: &WeightedGraph,
    family: &CutFamily,
    cap_tol: f64,
) -> Result<CheegerResult> {
    let total_pi = g.pi_total();
    let mut best: Option<Cut> = None;
    let mut scanned = 0u64;
    let mut feasible_seen = 0u64;
    let mut complement = Vec::new();
    family.for_each(|member| {
        scanned += 1;
        let cut = match flow_capacity(g, member) {
            Ok(cut) => cut,
            Err(_) => return,
        };
        complement.clear();
        let mut idx = 0;
        for v in 0..g.n() {
            if idx < cut.subset.len() && cut.subset[idx] == v {
                idx += 1;
            } else {
                complement.push(v);
            }
        }
        for (subset, capacity) in [
            (&cut.subset, cut.capacity),
            (&complement, total_pi - cut.capacity),
        ] {
            if capacity > 0.5 + cap_tol {
                continue;
            }
            feasible_seen += 1;
            let better = match &best {
                None => true,
                Some(b) => match cmp_ratio(cut.flow, capacity, b.flow, b.capacity) {
                    std::cmp::Ordering::Less => true,
                    std::cmp::Ordering::Greater => false,
                    std::cmp::Ordering::Equal => *subset < b.subset,
                },
            };
            if better {
                best = Some(Cut { subset: subset.clone(), flow: cut.flow, capacity });
            }
        }
    });
    let cut = best.ok_or(Error::EmptyFamily)?;
    Ok(CheegerResult {
        phi: cut.ratio(),
        cut,
        method: CheegerMethod::CandidateFamily,
        subsets_scanned: scanned,
        feasible_seen,
    })
}

/// The two-sided gap estimate from a Cheeger value: (2 phi, phi^2 / (2 |lambda0|)).
pub fn classic_bounds(phi: f64, lambda0: f64) -> (f64, f64) {
    assert!(phi >= 0.0, "negative Cheeger value");
    assert!(lambda0 < 0.0, "lambda0 must be negative");
    (2.0 * phi, phi * phi / (2.0 * lambda0.abs()))
}

/// Rayleigh quotient of the two-valued test vector (+1/C_A on A, -1/C_B on
/// the complement): F * (1/C_A + 1/C_B). Upper-bounds the spectral gap for
/// every nontrivial bipartition.
pub fn variational_upper(g: &WeightedGraph, side_a: &[usize]) -> Result<f64> {
    let cut = flow_capacity(g, side_a).map_err(|_| Error::DegeneratePartition)?;
    let c_b = g.pi_total() - cut.capacity;
    if !(cut.capacity > 0.0 && c_b > 0.0) {
        return Err(Error::DegeneratePartition);
    }
    Ok(cut.flow * (1.0 / cut.capacity + 1.0 / c_b))
}
