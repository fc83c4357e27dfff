//! Stoquastic matrix representation, example model builders, and file I/O.
//!
//! A matrix is stoquastic here when it is real symmetric with every entry
//! non-positive. Irreducibility (connected off-diagonal support) is what the
//! Perron-Frobenius argument needs, so validation reports it alongside the
//! sign check.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::Rng;

use crate::error::{Error, Result};

/// Largest qubit count accepted by the 2^n-dimensional builders.
pub const MAX_QUBITS: usize = 20;

/// Real symmetric matrix stored as canonical upper-triangle coordinates
/// (row <= col, sorted, exact zeros dropped). Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct StoquasticMatrix {
    dim: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl StoquasticMatrix {
    /// Builds from coordinate triplets. Either triangle (or both, with equal
    /// values) may be supplied; the result is canonicalized. Exact duplicates
    /// of the same ordered pair and conflicting symmetric values are errors,
    /// zero values are dropped after those checks.
    pub fn from_entries(
        dim: usize,
        entries: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidModel(format!(
                "dimension must be at least 2, got {dim}"
            )));
        }
        // value plus which orientations have been seen: (upper, lower)
        let mut map: BTreeMap<(usize, usize), (f64, bool, bool)> = BTreeMap::new();
        for (i, j, v) in entries {
            if i >= dim || j >= dim {
                return Err(Error::InvalidModel(format!(
                    "entry ({i},{j}) out of range for dimension {dim}"
                )));
            }
            if !v.is_finite() {
                return Err(Error::InvalidModel(format!(
                    "entry ({i},{j}) is not finite"
                )));
            }
            let key = (i.min(j), i.max(j));
            let upper = i <= j;
            match map.get_mut(&key) {
                None => {
                    map.insert(key, (v, upper, !upper));
                }
                Some((old, seen_upper, seen_lower)) => {
                    let seen_this = if upper { *seen_upper } else { *seen_lower };
                    if seen_this {
                        return Err(Error::DuplicateEntry { row: i, col: j });
                    }
                    if *old != v {
                        return Err(Error::Asymmetry {
                            row: key.0,
                            col: key.1,
                            a: *old,
                            b: v,
                        });
                    }
                    *seen_upper |= upper;
                    *seen_lower |= !upper;
                }
            }
        }
        let entries: Vec<_> = map
            .into_iter()
            .filter(|(_, (v, _, _))| *v != 0.0)
            .map(|((i, j), (v, _, _))| (i, j, v))
            .collect();
        Ok(StoquasticMatrix { dim, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Canonical entries: row <= col, sorted lexicographically, no zeros.
    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    /// Dense diagonal (zeros where no entry is stored).
    pub fn diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.dim];
        for &(i, j, v) in &self.entries {
            if i == j {
                d[i] = v;
            }
        }
        d
    }

    /// Off-diagonal neighbor lists, ascending by neighbor index.
    pub fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.dim];
        for &(i, j, v) in &self.entries {
            if i != j {
                adj[i].push((j, v));
                adj[j].push((i, v));
            }
        }
        for list in &mut adj {
            list.sort_unstable_by_key(|&(j, _)| j);
        }
        adj
    }

    /// y = H x over the stored coordinates.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim, "matvec dimension mismatch");
        let mut y = vec![0.0; self.dim];
        for &(i, j, v) in &self.entries {
            y[i] += v * x[j];
            if i != j {
                y[j] += v * x[i];
            }
        }
        y
    }

    /// Row sums of absolute values; max is a cheap upper bound on the
    /// spectral radius.
    pub fn abs_row_sums(&self) -> Vec<f64> {
        let mut r = vec![0.0; self.dim];
        for &(i, j, v) in &self.entries {
            r[i] += v.abs();
            if i != j {
                r[j] += v.abs();
            }
        }
        r
    }

    /// Sign and connectivity diagnostics without failing.
    pub fn validate(&self) -> ValidationReport {
        let sign_violations: Vec<_> = self
            .entries
            .iter()
            .copied()
            .filter(|&(_, _, v)| v > 0.0)
            .collect();
        let components = self.component_count();
        ValidationReport {
            sign_ok: sign_violations.is_empty(),
            sign_violations,
            connected: components == 1,
            components,
        }
    }

    /// Errors unless the matrix is stoquastic and irreducible.
    pub fn require_valid(&self) -> Result<()> {
        let report = self.validate();
        if let Some(&(i, j, v)) = report.sign_violations.first() {
            return Err(Error::Validation(format!(
                "positive entry {v} at ({i},{j})"
            )));
        }
        if !report.connected {
            return Err(Error::Validation(format!(
                "reducible: off-diagonal support has {} components",
                report.components
            )));
        }
        Ok(())
    }

    fn component_count(&self) -> usize {
        let adj = self.adjacency();
        let mut seen = vec![false; self.dim];
        let mut components = 0;
        let mut stack = Vec::new();
        for start in 0..self.dim {
            if seen[start] {
                continue;
            }
            components += 1;
            seen[start] = true;
            stack.push(start);
            while let Some(v) = stack.pop() {
                for &(u, _) in &adj[v] {
                    if !seen[u] {
                        seen[u] = true;
                        stack.push(u);
                    }
                }
            }
        }
        components
    }
}

#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub sign_ok: bool,
    pub sign_violations: Vec<(usize, usize, f64)>,
    pub connected: bool,
    pub components: usize,
}

/// Cycle of n sites with uniform negative hopping -t between neighbors.
pub fn ring(n: usize, t: f64) -> Result<StoquasticMatrix> {
    if n < 3 {
        return Err(Error::InvalidModel(format!(
            "ring needs at least 3 sites, got {n}"
        )));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidModel(format!("ring hopping must be positive, got {t}")));
    }
    let entries = (0..n).map(|i| (i, (i + 1) % n, -t));
    StoquasticMatrix::from_entries(n, entries)
}

/// n spins under a uniform transverse field of strength b: dimension 2^n,
/// off-diagonal -b between basis states at Hamming distance 1, zero diagonal.
/// The off-diagonal support is the n-dimensional hypercube graph.
pub fn transverse_field(n: usize, b: f64) -> Result<StoquasticMatrix> {
    check_qubits(n, b)?;
    let dim = 1usize << n;
    let mut entries = Vec::with_capacity(dim * n / 2);
    for x in 0..dim {
        for k in 0..n {
            let y = x ^ (1 << k);
            if y > x {
                entries.push((x, y, -b));
            }
        }
    }
    StoquasticMatrix::from_entries(dim, entries)
}

/// Open chain of n Ising spins with a transverse field: the hypercube
/// off-diagonal part of `transverse_field` plus the diagonal coupling
/// -sum_k (s_k s_{k+1} + 2), where s_k = +1 when bit k of the basis index is
/// clear and -1 when set. The +2 offset keeps every entry non-positive.
pub fn ising_chain(n: usize, b: f64) -> Result<StoquasticMatrix> {
    check_qubits(n, b)?;
    let dim = 1usize << n;
    let mut entries = Vec::with_capacity(dim * (n / 2 + 1));
    for x in 0..dim {
        let mut coupling = 0.0;
        for k in 0..n.saturating_sub(1) {
            let aligned = ((x >> k) & 1) == ((x >> (k + 1)) & 1);
            coupling += if aligned { 3.0 } else { 1.0 };
        }
        if coupling > 0.0 {
            entries.push((x, x, -coupling));
        }
        for k in 0..n {
            let y = x ^ (1 << k);
            if y > x {
                entries.push((x, y, -b));
            }
        }
    }
    StoquasticMatrix::from_entries(dim, entries)
}

fn check_qubits(n: usize, b: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidModel("need at least one spin".into()));
    }
    if n > MAX_QUBITS {
        return Err(Error::SizeLimit {
            what: "qubit count",
            requested: n,
            limit: MAX_QUBITS,
        });
    }
    if !(b > 0.0 && b.is_finite()) {
        return Err(Error::InvalidModel(format!(
            "field strength must be positive, got {b}"
        )));
    }
    Ok(())
}

/// Random irreducible stoquastic matrix for property suites: size 4..=12,
/// each off-diagonal pair present with probability 1/2 (support redrawn until
/// connected), present off-diagonals uniform in [-1, -0.1], diagonal uniform
/// in [-1, 0]. Fully determined by the RNG state.
pub fn random_stoquastic<R: Rng + ?Sized>(rng: &mut R) -> StoquasticMatrix {
    let n = rng.gen_range(4..=12usize);
    let support = loop {
        let mut support = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.gen_bool(0.5) {
                    support.push((i, j));
                }
            }
        }
        if connected_support(n, &support) {
            break support;
        }
    };
    let mut entries: Vec<(usize, usize, f64)> = support
        .into_iter()
        .map(|(i, j)| (i, j, rng.gen_range(-1.0..-0.1)))
        .collect();
    for i in 0..n {
        entries.push((i, i, rng.gen_range(-1.0..0.0)));
    }
    StoquasticMatrix::from_entries(n, entries).expect("generator produces valid coordinates")
}

fn connected_support(n: usize, support: &[(usize, usize)]) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut merges = 0;
    for &(i, j) in support {
        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
        if a != b {
            parent[a] = b;
            merges += 1;
        }
    }
    merges == n - 1
}

/// Model selection for the CLI and test drivers.
#[derive(Debug, Clone)]
pub enum ModelSpec {
    Ring { n: usize, t: f64 },
    TransverseField { n: usize, b: f64 },
    IsingChain { n: usize, b: f64 },
    File { path: PathBuf },
}

impl ModelSpec {
    pub fn build(&self) -> Result<StoquasticMatrix> {
        match self {
            ModelSpec::Ring { n, t } => ring(*n, *t),
            ModelSpec::TransverseField { n, b } => transverse_field(*n, *b),
            ModelSpec::IsingChain { n, b } => ising_chain(*n, *b),
            ModelSpec::File { path } => load_matrix(path),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::Ring { .. } => "ring",
            ModelSpec::TransverseField { .. } => "transverse",
            ModelSpec::IsingChain { .. } => "ising",
            ModelSpec::File { .. } => "file",
        }
    }

    /// Parameter summary without commas, safe to embed in a CSV field.
    pub fn params(&self) -> String {
        match self {
            ModelSpec::Ring { n, t } => format!("N={n} t={t}"),
            ModelSpec::TransverseField { n, b } => format!("n={n} B={b}"),
            ModelSpec::IsingChain { n, b } => format!("n={n} B={b}"),
            ModelSpec::File { path } => path.display().to_string().replace(',', "_"),
        }
    }
}

/// Text format: "stoq 1" magic line, then "N nnz", then nnz canonical
/// "i j value" lines with 17 significant digits. '#' starts a comment line.
pub fn save_matrix(h: &StoquasticMatrix, path: &Path) -> Result<()> {
    std::fs::write(path, matrix_to_text(h))?;
    Ok(())
}

pub fn load_matrix(path: &Path) -> Result<StoquasticMatrix> {
    let text = std::fs::read_to_string(path)?;
    matrix_from_text(&text)
}

pub fn matrix_to_text(h: &StoquasticMatrix) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "stoq 1");
    let _ = writeln!(out, "{} {}", h.dim, h.entries.len());
    for &(i, j, v) in &h.entries {
        let _ = writeln!(out, "{i} {j} {v:.16e}");
    }
    out
}

pub fn matrix_from_text(text: &str) -> Result<StoquasticMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(idx, line)| (idx + 1, line.trim()))
        .filter(|(_, line)| !line.is_empty() && !line.starts_with('#'));

    let (line_no, magic) = lines
        .next()
        .ok_or_else(|| Error::Parse { line: 0, msg: "empty file".into() })?;
    if magic != "stoq 1" {
        return Err(Error::Parse {
            line: line_no,
            msg: format!("expected header \"stoq 1\", got \"{magic}\""),
        });
    }

    let (line_no, header) = lines
        .next()
        .ok_or_else(|| Error::Parse { line: line_no, msg: "missing size line".into() })?;
    let mut parts = header.split_whitespace();
    let dim: usize = parse_field(parts.next(), line_no, "matrix dimension")?;
    let nnz: usize = parse_field(parts.next(), line_no, "entry count")?;
    if parts.next().is_some() {
        return Err(Error::Parse { line: line_no, msg: "trailing tokens on size line".into() });
    }

    let mut entries = Vec::with_capacity(nnz);
    for _ in 0..nnz {
        let (line_no, entry) = lines
            .next()
            .ok_or_else(|| Error::Parse { line: 0, msg: format!("expected {nnz} entries") })?;
        let mut parts = entry.split_whitespace();
        let i: usize = parse_field(parts.next(), line_no, "row index")?;
        let j: usize = parse_field(parts.next(), line_no, "column index")?;
        let v: f64 = parse_field(parts.next(), line_no, "value")?;
        if parts.next().is_some() {
            return Err(Error::Parse { line: line_no, msg: "trailing tokens on entry line".into() });
        }
        entries.push((i, j, v));
    }
    if let Some((line_no, _)) = lines.next() {
        return Err(Error::Parse { line: line_no, msg: "unexpected extra line".into() });
    }
    StoquasticMatrix::from_entries(dim, entries)
}

fn parse_field<T: std::str::FromStr>(
    token: Option<&str>,
    line: usize,
    what: &str,
) -> Result<T> {
    let token = token.ok_or_else(|| Error::Parse { line, msg: format!("missing {what}") })?;
    token
        .parse()
        .map_err(|_| Error::Parse { line, msg: format!("bad {what}: \"{token}\"") })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn canonicalizes_and_drops_zeros() {
        let h = StoquasticMatrix::from_entries(3, vec![(1, 0, -2.0), (2, 2, 0.0), (1, 2, -1.0)])
            .unwrap();
        assert_eq!(h.entries(), &[(0, 1, -2.0), (1, 2, -1.0)]);
    }

    #[test]
    fn symmetric_pair_with_equal_values_is_accepted() {
        let h = StoquasticMatrix::from_entries(2, vec![(0, 1, -1.5), (1, 0, -1.5)]).unwrap();
        assert_eq!(h.entries(), &[(0, 1, -1.5)]);
    }

    #[test]
    fn conflicting_pair_is_rejected() {
        let err = StoquasticMatrix::from_entries(2, vec![(0, 1, -1.0), (1, 0, -2.0)]).unwrap_err();
        assert!(matches!(err, Error::Asymmetry { row: 0, col: 1, .. }));
    }

    #[test]
    fn repeated_ordered_pair_is_rejected() {
        let err = StoquasticMatrix::from_entries(2, vec![(0, 1, -1.0), (0, 1, -1.0)]).unwrap_err();
        assert!(matches!(err, Error::DuplicateEntry { row: 0, col: 1 }));
    }

    #[test]
    fn ring_structure() {
        let h = ring(4, 1.0).unwrap();
        assert_eq!(h.entries(), &[(0, 1, -1.0), (0, 3, -1.0), (1, 2, -1.0), (2, 3, -1.0)]);
        h.require_valid().unwrap();
        assert!(ring(2, 1.0).is_err());
        assert!(ring(4, 0.0).is_err());
    }

    #[test]
    fn transverse_field_is_hypercube() {
        let h = transverse_field(3, 2.0).unwrap();
        assert_eq!(h.dim(), 8);
        let offdiag: Vec<_> = h.entries().iter().filter(|&&(i, j, _)| i != j).collect();
        assert_eq!(offdiag.len(), 12); // 3 * 2^3 / 2 edges of Q3
        assert!(offdiag.iter().all(|&&(i, j, v)| v == -2.0 && (i ^ j).count_ones() == 1));
        assert!(transverse_field(MAX_QUBITS + 1, 1.0).is_err());
    }

    #[test]
    fn ising_chain_diagonal_fixture() {
        // Two spins: aligned configurations couple at -3, anti-aligned at -1.
        let h = ising_chain(2, 1.0).unwrap();
        assert_eq!(h.diagonal(), vec![-3.0, -1.0, -1.0, -3.0]);
        let h3 = ising_chain(3, 2.0).unwrap();
        let d = h3.diagonal();
        assert_eq!(d[0b000], -6.0);
        assert_eq!(d[0b010], -2.0);
        assert_eq!(d[0b011], -4.0);
        assert!(d.iter().all(|&v| (-6.0..=-2.0).contains(&v)));
    }

    #[test]
    fn validation_flags_signs_and_disconnection() {
        let bad = StoquasticMatrix::from_entries(3, vec![(0, 1, 0.5), (1, 2, -1.0)]).unwrap();
        let report = bad.validate();
        assert!(!report.sign_ok);
        assert_eq!(report.sign_violations, vec![(0, 1, 0.5)]);
        assert!(bad.require_valid().is_err());

        let split = StoquasticMatrix::from_entries(4, vec![(0, 1, -1.0), (2, 3, -1.0)]).unwrap();
        let report = split.validate();
        assert!(report.sign_ok && !report.connected);
        assert_eq!(report.components, 2);
        assert!(split.require_valid().is_err());
    }

    #[test]
    fn matvec_matches_dense_expansion() {
        let h = ising_chain(3, 1.5).unwrap();
        let x: Vec<f64> = (0..8).map(|i| (i as f64) * 0.25 - 1.0).collect();
        let y = h.matvec(&x);
        let mut dense = vec![vec![0.0; 8]; 8];
        for &(i, j, v) in h.entries() {
            dense[i][j] = v;
            dense[j][i] = v;
        }
        for i in 0..8 {
            let want: f64 = (0..8).map(|j| dense[i][j] * x[j]).sum();
            assert!((y[i] - want).abs() < 1e-14);
        }
    }

    #[test]
    fn text_roundtrip_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let h = random_stoquastic(&mut rng);
            let restored = matrix_from_text(&matrix_to_text(&h)).unwrap();
            assert_eq!(h, restored);
        }
    }

    #[test]
    fn parser_accepts_comments_and_rejects_junk() {
        let text = "# comment\nstoq 1\n\n2 1\n0 1 -1.0\n";
        let h = matrix_from_text(text).unwrap();
        assert_eq!(h.entries(), &[(0, 1, -1.0)]);

        assert!(matches!(
            matrix_from_text("stoq 2\n2 0\n"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            matrix_from_text("stoq 1\n2 2\n0 1 -1.0\n"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            matrix_from_text("stoq 1\n2 1\n0 1 -1.0\n0 0 -1.0\n"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn random_instances_are_valid_and_reproducible() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..20 {
            let h = random_stoquastic(&mut rng);
            assert!((4..=12).contains(&h.dim()));
            h.require_valid().unwrap();
        }
        let a = random_stoquastic(&mut ChaCha8Rng::seed_from_u64(5));
        let b = random_stoquastic(&mut ChaCha8Rng::seed_from_u64(5));
        assert_eq!(a, b);
    }
}
