//! Weighted graph and non-symmetric Laplacian attached to a stoquastic
//! matrix through its ground state.
//!
//! With alpha the positive unit ground vector and lambda0 its eigenvalue,
//! edge weights are w_ij = -alpha_i H_ij alpha_j (non-negative), vertex
//! masses are pi_i = alpha_i^2 (summing to one), and weighted degrees obey
//! d_i = |lambda0| pi_i exactly. The Laplacian L = -lambda0 I + D^-1 H D has
//! zero row sums, pi as a stationary left null vector, and the same spectral
//! gap as H.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::model::StoquasticMatrix;
use crate::spectra::{GroundState, SpectralPair};

#[derive(Debug, Clone)]
pub struct WeightedGraph {
    n: usize,
    lambda0: f64,
    edges: Vec<(usize, usize, f64)>,
    self_loops: Vec<f64>,
    pi: Vec<f64>,
    degree: Vec<f64>,
    adj: Vec<Vec<(usize, f64)>>,
}

impl WeightedGraph {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lambda0(&self) -> f64 {
        self.lambda0
    }

    /// Off-diagonal edges, i < j, sorted, weights strictly positive.
    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    /// Self-loop weight per vertex (zero where H has no diagonal entry).
    pub fn self_loops(&self) -> &[f64] {
        &self.self_loops
    }

    pub fn pi(&self) -> &[f64] {
        &self.pi
    }

    pub fn pi_total(&self) -> f64 {
        self.pi.iter().sum()
    }

    /// Weighted degree including the self-loop; equals |lambda0| pi_i.
    pub fn degree(&self) -> &[f64] {
        &self.degree
    }

    /// Off-diagonal neighbors in ascending order.
    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.adj[i]
    }
}

/// Dresses the matrix with a ground state. The degree identity
/// d_i = |lambda0| pi_i is checked on every vertex; a mismatch means the
/// ground state does not belong to this matrix (or is too inaccurate).
pub fn graph_from(h: &StoquasticMatrix, gs: &GroundState) -> Result<WeightedGraph> {
    let n = h.dim();
    if gs.psi0.len() != n {
        return Err(Error::StaleGroundState { residual: f64::INFINITY });
    }
    let alpha = &gs.psi0;
    let pi: Vec<f64> = alpha.iter().map(|a| a * a).collect();

    let mut edges = Vec::new();
    let mut self_loops = vec![0.0; n];
    let mut degree = vec![0.0; n];
    for &(i, j, v) in h.entries() {
        let w = -alpha[i] * v * alpha[j];
        if i == j {
            self_loops[i] = w;
            degree[i] += w;
        } else {
            edges.push((i, j, w));
            degree[i] += w;
            degree[j] += w;
        }
    }

    let scale = 1f64.max(gs.lambda0.abs());
    let mut worst = 0.0f64;
    for i in 0..n {
        worst = worst.max((degree[i] - gs.lambda0.abs() * pi[i]).abs());
    }
    if worst > 1e-9 * scale {
        return Err(Error::StaleGroundState { residual: worst });
    }

    let mut adj = vec![Vec::new(); n];
    for &(i, j, w) in &edges {
        adj[i].push((j, w));
        adj[j].push((i, w));
    }
    for list in &mut adj {
        list.sort_unstable_by_key(|&(j, _)| j);
    }

    Ok(WeightedGraph { n, lambda0: gs.lambda0, edges, self_loops, pi, degree, adj })
}

/// The similarity-transformed Laplacian, kept in coordinate form. Row i of
/// the off-diagonal part holds L_ij = (alpha_j / alpha_i) H_ij, so the matrix
/// is not symmetric, but it shares eigenvalues with H - lambda0 I.
#[derive(Debug, Clone)]
pub struct LaplacianMatrix {
    n: usize,
    lambda0: f64,
    diag: Vec<f64>,
    /// (i, j, L_ij, L_ji) with i < j.
    off: Vec<(usize, usize, f64, f64)>,
    pi: Vec<f64>,
}

pub fn laplacian(h: &StoquasticMatrix, gs: &GroundState) -> Result<LaplacianMatrix> {
    let n = h.dim();
    if gs.psi0.len() != n {
        return Err(Error::StaleGroundState { residual: f64::INFINITY });
    }
    let alpha = &gs.psi0;
    let mut diag = vec![-gs.lambda0; n];
    let mut off = Vec::new();
    for &(i, j, v) in h.entries() {
        if i == j {
            diag[i] += v;
        } else {
            off.push((i, j, alpha[j] / alpha[i] * v, alpha[i] / alpha[j] * v));
        }
    }
    let pi = alpha.iter().map(|a| a * a).collect();
    Ok(LaplacianMatrix { n, lambda0: gs.lambda0, diag, off, pi })
}

impl LaplacianMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lambda0(&self) -> f64 {
        self.lambda0
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n, "matvec dimension mismatch");
        let mut y: Vec<f64> = (0..self.n).map(|i| self.diag[i] * x[i]).collect();
        for &(i, j, lij, lji) in &self.off {
            y[i] += lij * x[j];
            y[j] += lji * x[i];
        }
        y
    }

    /// All zero for an exact ground state.
    pub fn row_sums(&self) -> Vec<f64> {
        let mut r = self.diag.clone();
        for &(i, j, lij, lji) in &self.off {
            r[i] += lij;
            r[j] += lji;
        }
        r
    }

    /// pi^T L, the stationary-vector residual; all zero in exact arithmetic.
    pub fn stationary_residual(&self) -> Vec<f64> {
        let mut r: Vec<f64> = (0..self.n).map(|i| self.pi[i] * self.diag[i]).collect();
        for &(i, j, lij, lji) in &self.off {
            r[j] += self.pi[i] * lij;
            r[i] += self.pi[j] * lji;
        }
        r
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            m[(i, i)] = self.diag[i];
        }
        for &(i, j, lij, lji) in &self.off {
            m[(i, j)] = lij;
            m[(j, i)] = lji;
        }
        m
    }

    /// Gap between the two lowest eigenvalues, from a dense non-symmetric
    /// eigensolve. Expensive; serves as an independent cross-check of the
    /// symmetric path.
    pub fn dense_gap(&self, limit: usize) -> Result<f64> {
        if self.n > limit {
            return Err(Error::SizeLimit { what: "dense Laplacian eigensolve", requested: self.n, limit });
        }
        let eigs = self.to_dense().complex_eigenvalues();
        let scale = 1f64.max(self.lambda0.abs());
        let mut re: Vec<f64> = Vec::with_capacity(self.n);
        for e in eigs.iter() {
            if e.im.abs() > 1e-7 * scale {
                return Err(Error::Validation(format!(
                    "Laplacian eigenvalue has imaginary part {:.3e}; similarity to a symmetric matrix should forbid this",
                    e.im
                )));
            }
            re.push(e.re);
        }
        re.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
        Ok(re[1] - re[0])
    }
}

#[derive(Debug, Clone)]
pub struct LaplacianReport {
    /// max_i |sum_j L_ij|
    pub max_row_sum: f64,
    /// max_j |(pi^T L)_j|
    pub max_stationary_residual: f64,
    /// ||L u - gap u||_inf / ||u||_inf for u = psi1 / alpha
    pub transport_residual: f64,
    pub gap_h: f64,
    pub gap_l: Option<f64>,
    pub gap_difference: Option<f64>,
    pub pass: bool,
}

/// Checks the structural identities tying L to H: zero row sums, stationary
/// pi, the transported excited eigenvector, and (below `oracle_limit`) gap
/// agreement against the dense non-symmetric eigensolve.
pub fn verify_laplacian(
    h: &StoquasticMatrix,
    sp: &SpectralPair,
    tol: f64,
    gap_tol: f64,
    oracle_limit: usize,
) -> Result<LaplacianReport> {
    let l = laplacian(h, &sp.ground())?;
    let max_row_sum = l.row_sums().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let max_stationary_residual =
        l.stationary_residual().iter().fold(0.0f64, |m, v| m.max(v.abs()));

    let u: Vec<f64> = sp.psi1.iter().zip(&sp.psi0).map(|(b, a)| b / a).collect();
    let lu = l.matvec(&u);
    let gap_h = sp.gap();
    let u_scale = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let transport_residual = lu
        .iter()
        .zip(&u)
        .map(|(y, x)| (y - gap_h * x).abs())
        .fold(0.0f64, f64::max)
        / u_scale;

    let (gap_l, gap_difference) = if h.dim() <= oracle_limit {
        let g = l.dense_gap(oracle_limit)?;
        (Some(g), Some((g - gap_h).abs()))
    } else {
        (None, None)
    };

    let pass = max_row_sum <= tol
        && max_stationary_residual <= tol
        && transport_residual <= tol.max(1e-8)
        && gap_difference.map_or(true, |d| d <= gap_tol);
    Ok(LaplacianReport {
        max_row_sum,
        max_stationary_residual,
        transport_residual,
        gap_h,
        gap_l,
        gap_difference,
        pass,
    })
}

/// Text dump: "graph 1" header, "N m" counts, edge lines "i j w" (self-loops
/// as i == j), then vertex lines "v i pi".
pub fn graph_to_text(g: &WeightedGraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "graph 1");
    let loops: Vec<(usize, f64)> = g
        .self_loops
        .iter()
        .copied()
        .enumerate()
        .filter(|&(_, w)| w != 0.0)
        .collect();
    let _ = writeln!(out, "{} {}", g.n, g.edges.len() + loops.len());
    for &(i, j, w) in &g.edges {
        let _ = writeln!(out, "{i} {j} {w:.16e}");
    }
    for &(i, w) in &loops {
        let _ = writeln!(out, "{i} {i} {w:.16e}");
    }
    for (i, p) in g.pi.iter().enumerate() {
        let _ = writeln!(out, "v {i} {p:.16e}");
    }
    out
}

pub fn export_graph(g: &WeightedGraph, path: &Path) -> Result<()> {
    std::fs::write(path, graph_to_text(g))?;
    Ok(())
}
