//! Unimodular lattices `g·ℤⁿ`, basis reduction, certified short-vector
//! enumeration, systoles and the Mahler boundedness probe.
//!
//! A lattice is stored through a basis matrix whose *columns* are the basis
//! vectors. Every constructor and group action rescales the basis so that
//! `det = 1` within [`DET_TOL`].

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::flows::DiagonalElement;
use crate::{Error, Result};

/// Tolerance on `|det(basis) - 1|`.
pub const DET_TOL: f64 = 1e-9;

/// Lovász parameter of the reduction.
pub const LLL_DELTA: f64 = 0.75;

// Relative slack on length comparisons against a user bound.
const LEN_SLACK: f64 = 1e-12;

/// A point of `SL_n(ℝ)/SL_n(ℤ)`, represented by a basis of determinant one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LatticeJson", into = "LatticeJson")]
pub struct UnimodularLattice {
    basis: DMatrix<f64>,
}

/// Wire format: `{"dim": n, "basis": [row-major n² reals]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LatticeJson {
    pub dim: usize,
    pub basis: Vec<f64>,
}

impl TryFrom<LatticeJson> for UnimodularLattice {
    type Error = Error;

    fn try_from(value: LatticeJson) -> Result<Self> {
        UnimodularLattice::from_row_major(value.dim, &value.basis)
    }
}

impl From<UnimodularLattice> for LatticeJson {
    fn from(l: UnimodularLattice) -> Self {
        let n = l.dim();
        let mut basis = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                basis.push(l.basis[(i, j)]);
            }
        }
        LatticeJson { dim: n, basis }
    }
}

/// A nonzero lattice vector: integer coordinates in the lattice basis and the
/// embedded vector in `ℝⁿ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeVector {
    pub coords: Vec<i64>,
    pub embedding: Vec<f64>,
}

impl LatticeVector {
    pub fn length(&self) -> f64 {
        self.embedding.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }
}

/// Builds a unimodular lattice from an arbitrary nonsingular basis.
///
/// The basis is rescaled by `|det|^{-1/n}`; if the determinant is negative the
/// first column is negated, which does not change the lattice.
pub fn make_lattice(basis: DMatrix<f64>) -> Result<UnimodularLattice> {
    UnimodularLattice::new(basis)
}

impl UnimodularLattice {
    pub fn new(mut basis: DMatrix<f64>) -> Result<Self> {
        let n = basis.nrows();
        if n < 2 || basis.ncols() != n {
            return Err(Error::Invalid(format!(
                "basis must be square with n >= 2, got {}x{}",
                basis.nrows(),
                basis.ncols()
            )));
        }
        if basis.iter().any(|x| !x.is_finite()) {
            return Err(Error::Invalid("non-finite basis entry".into()));
        }
        let det = basis.determinant();
        let col_scale: f64 = basis.column_iter().map(|c| c.norm()).product();
        if !det.is_finite() || col_scale == 0.0 || det.abs() <= 1e-14 * col_scale {
            return Err(Error::DegenerateBasis);
        }
        if det < 0.0 {
            basis.column_mut(0).neg_mut();
        }
        basis *= det.abs().powf(-1.0 / n as f64);
        let lattice = UnimodularLattice { basis };
        lattice.check_unimodular()?;
        Ok(lattice)
    }

    pub fn from_row_major(dim: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(dim, dim, entries))
    }

    /// The standard lattice `ℤⁿ`.
    pub fn identity(n: usize) -> Self {
        UnimodularLattice {
            basis: DMatrix::identity(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn determinant(&self) -> f64 {
        self.basis.determinant()
    }

    fn check_unimodular(&self) -> Result<()> {
        let det = self.determinant();
        if (det - 1.0).abs() > DET_TOL {
            return Err(Error::Invalid(format!("determinant {det} drifted from 1")));
        }
        Ok(())
    }

    /// Returns the lattice `g·L`, renormalising the determinant to one.
    ///
    /// `g` must have positive determinant; group elements of `SL_n(ℝ)` always do.
    pub fn left_multiply(&self, g: &DMatrix<f64>) -> Result<Self> {
        let n = self.dim();
        if g.nrows() != n || g.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: g.nrows(),
            });
        }
        let mut basis = g * &self.basis;
        let det = basis.determinant();
        if !(det.is_finite() && det > 0.0) {
            return Err(Error::DegenerateBasis);
        }
        basis *= det.powf(-1.0 / n as f64);
        let out = UnimodularLattice { basis };
        debug_assert!((out.determinant() - 1.0).abs() <= DET_TOL);
        Ok(out)
    }

    /// The lattice vector with the given integer coordinates.
    pub fn vector(&self, coords: &[i64]) -> Result<LatticeVector> {
        if coords.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: coords.len(),
            });
        }
        let embedding = (0..self.dim())
            .map(|i| {
                coords
                    .iter()
                    .enumerate()
                    .map(|(j, &c)| self.basis[(i, j)] * c as f64)
                    .sum()
            })
            .collect();
        Ok(LatticeVector {
            coords: coords.to_vec(),
            embedding,
        })
    }

    pub fn reduce(&self) -> Self {
        self.reduce_with_transform().0
    }

    /// LLL reduction (`δ = 0.75`). Returns the reduced lattice together with the
    /// integer matrix `U ∈ SL_n(ℤ)` such that `reduced = basis · U`.
    pub fn reduce_with_transform(&self) -> (Self, Vec<Vec<i64>>) {
        let n = self.dim();
        let mut b: Vec<Vec<f64>> = (0..n)
            .map(|j| self.basis.column(j).iter().copied().collect())
            .collect();
        // u[k] holds the coordinates of b[k] in the input basis
        let mut u: Vec<Vec<i64>> = (0..n)
            .map(|j| (0..n).map(|i| i64::from(i == j)).collect())
            .collect();

        let max_iter = 10_000 * n * n;
        let mut k = 1;
        let mut iter = 0;
        while k < n && iter < max_iter {
            iter += 1;
            let (mut mu, _) = gram_schmidt(&b);
            for j in (0..k).rev() {
                let q = mu[k][j].round();
                if q != 0.0 {
                    let qi = q as i64;
                    for r in 0..n {
                        b[k][r] -= q * b[j][r];
                        u[k][r] -= qi * u[j][r];
                    }
                    for l in 0..j {
                        mu[k][l] -= q * mu[j][l];
                    }
                    mu[k][j] -= q;
                }
            }
            let (mu, bstar) = gram_schmidt(&b);
            if bstar[k] >= (LLL_DELTA - mu[k][k - 1] * mu[k][k - 1]) * bstar[k - 1] {
                k += 1;
            } else {
                b.swap(k, k - 1);
                u.swap(k, k - 1);
                k = (k - 1).max(1);
            }
        }

        // swaps flip orientation; keep U in SL_n(ℤ)
        if integer_det_sign(&u) < 0 {
            for x in b[n - 1].iter_mut() {
                *x = -*x;
            }
            for x in u[n - 1].iter_mut() {
                *x = -*x;
            }
        }

        let basis = DMatrix::from_fn(n, n, |i, j| b[j][i]);
        // U as row-major integer matrix: U[i][j] = u[j][i]
        let transform = (0..n).map(|i| (0..n).map(|j| u[j][i]).collect()).collect();
        (UnimodularLattice { basis }, transform)
    }

    pub fn shortest_vectors(&self, bound: f64) -> Result<Vec<LatticeVector>> {
        self.shortest_vectors_with_cap(bound, crate::cell_cap_from_env())
    }

    /// All nonzero lattice vectors of length at most `bound`, one per `±` pair,
    /// sorted by length.
    ///
    /// The search box is taken in the coordinates of the reduced basis `B'`:
    /// coordinate `k` of any vector `w` satisfies `|c_k| ≤ ‖row_k(B'⁻¹)‖·‖w‖`,
    /// so the box certifiably contains every solution.
    pub fn shortest_vectors_with_cap(&self, bound: f64, cap: u64) -> Result<Vec<LatticeVector>> {
        if !(bound > 0.0 && bound.is_finite()) {
            return Err(Error::Precondition(format!("bound must be positive, got {bound}")));
        }
        let n = self.dim();
        let (reduced, transform) = self.reduce_with_transform();
        let inv = reduced
            .basis
            .clone()
            .try_inverse()
            .ok_or(Error::DegenerateBasis)?;
        let slack_bound = bound * (1.0 + LEN_SLACK);
        let radii: Vec<i64> = (0..n)
            .map(|k| (slack_bound * inv.row(k).norm() + 1e-9).floor() as i64)
            .collect();
        let cells: f64 = radii.iter().map(|&r| (2 * r + 1) as f64).product();
        if cells > cap as f64 {
            return Err(Error::BudgetExceeded { cells, cap });
        }

        let columns: Vec<Vec<f64>> = (0..n)
            .map(|j| reduced.basis.column(j).iter().copied().collect())
            .collect();
        let mut found = Vec::new();
        let mut coords = vec![0i64; n];
        let mut partial = vec![vec![0.0; n]; n + 1];
        enumerate_box(
            0,
            &radii,
            &columns,
            slack_bound * slack_bound,
            true,
            &mut coords,
            &mut partial,
            &mut found,
        );

        let mut out: Vec<LatticeVector> = found
            .into_iter()
            .map(|(c_red, w)| {
                let mut coords: Vec<i64> = (0..n)
                    .map(|i| (0..n).map(|j| transform[i][j] * c_red[j]).sum())
                    .collect();
                let mut embedding = w;
                if coords.iter().find(|&&c| c != 0).is_some_and(|&c| c < 0) {
                    coords.iter_mut().for_each(|c| *c = -*c);
                    embedding.iter_mut().for_each(|x| *x = -*x);
                }
                LatticeVector { coords, embedding }
            })
            .collect();
        out.sort_by(|a, b| {
            a.length()
                .total_cmp(&b.length())
                .then_with(|| a.coords.cmp(&b.coords))
        });
        Ok(out)
    }

    pub fn systole(&self) -> Result<f64> {
        self.systole_with_cap(crate::cell_cap_from_env())
    }

    /// Length of the shortest nonzero vector. The search bound starts at
    /// `min(1, shortest reduced basis column)` and doubles until a vector shows up.
    pub fn systole_with_cap(&self, cap: u64) -> Result<f64> {
        let reduced = self.reduce();
        let shortest_col = reduced
            .basis
            .column_iter()
            .map(|c| c.norm())
            .fold(f64::INFINITY, f64::min);
        let mut bound = shortest_col.min(1.0);
        loop {
            let vs = reduced.shortest_vectors_with_cap(bound, cap)?;
            if let Some(v) = vs.first() {
                return Ok(v.length());
            }
            bound *= 2.0;
        }
    }
}

/// Free-function form of [`UnimodularLattice::shortest_vectors`].
pub fn shortest_vectors(lattice: &UnimodularLattice, bound: f64) -> Result<Vec<LatticeVector>> {
    lattice.shortest_vectors(bound)
}

pub fn systole(lattice: &UnimodularLattice) -> Result<f64> {
    lattice.systole()
}

pub fn reduce(lattice: &UnimodularLattice) -> UnimodularLattice {
    lattice.reduce()
}

fn gram_schmidt(b: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let n = b.len();
    let mut bstar: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut norms = vec![0.0; n];
    let mut mu = vec![vec![0.0; n]; n];
    for i in 0..n {
        let mut v = b[i].clone();
        for j in 0..i {
            let m = dot(&b[i], &bstar[j]) / norms[j];
            mu[i][j] = m;
            for (x, y) in v.iter_mut().zip(&bstar[j]) {
                *x -= m * y;
            }
        }
        norms[i] = dot(&v, &v);
        bstar.push(v);
    }
    (mu, norms)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn integer_det_sign(cols: &[Vec<i64>]) -> i32 {
    let m = DMatrix::from_fn(cols.len(), cols.len(), |i, j| cols[j][i] as f64);
    if m.determinant() < 0.0 {
        -1
    } else {
        1
    }
}

// Odometer over the box, keeping one representative per ±pair: the first
// nonzero coordinate is positive.
#[allow(clippy::too_many_arguments)]
fn enumerate_box(
    level: usize,
    radii: &[i64],
    columns: &[Vec<f64>],
    bound_sq: f64,
    leading_zero: bool,
    coords: &mut Vec<i64>,
    partial: &mut Vec<Vec<f64>>,
    out: &mut Vec<(Vec<i64>, Vec<f64>)>,
) {
    let n = radii.len();
    if level == n {
        if leading_zero {
            return;
        }
        let w = &partial[n];
        if dot(w, w) <= bound_sq {
            out.push((coords.clone(), w.clone()));
        }
        return;
    }
    let lo = if leading_zero { 0 } else { -radii[level] };
    for c in lo..=radii[level] {
        coords[level] = c;
        let (head, tail) = partial.split_at_mut(level + 1);
        let prev = &head[level];
        let next = &mut tail[0];
        for r in 0..n {
            next[r] = prev[r] + c as f64 * columns[level][r];
        }
        enumerate_box(
            level + 1,
            radii,
            columns,
            bound_sq,
            leading_zero && c == 0,
            coords,
            partial,
            out,
        );
    }
    coords[level] = 0;
}

/// Outcome of [`is_bounded_probe`].
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum ProbeVerdict {
    StaysAboveEps,
    DipsBelowEps { witness: DiagonalElement },
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeReport {
    pub verdict: ProbeVerdict,
    pub min_systole: f64,
    pub argmin: DiagonalElement,
    pub grid_size: usize,
}

impl ProbeReport {
    pub fn stays_above(&self) -> bool {
        matches!(self.verdict, ProbeVerdict::StaysAboveEps)
    }
}

pub fn is_bounded_probe(
    lattice: &UnimodularLattice,
    grid: &[DiagonalElement],
    eps: f64,
) -> Result<ProbeReport> {
    is_bounded_probe_with_cap(lattice, grid, eps, crate::cell_cap_from_env())
}

/// Evaluates `systole(a·L)` over the grid and reports the minimum. Mahler's
/// criterion reads a uniform positive lower bound as evidence of a bounded orbit.
pub fn is_bounded_probe_with_cap(
    lattice: &UnimodularLattice,
    grid: &[DiagonalElement],
    eps: f64,
    cap: u64,
) -> Result<ProbeReport> {
    if grid.is_empty() {
        return Err(Error::Precondition("probe grid is empty".into()));
    }
    if !(eps > 0.0) {
        return Err(Error::Precondition(format!("eps must be positive, got {eps}")));
    }
    let values: Vec<f64> = grid
        .par_iter()
        .map(|a| crate::flows::apply_diagonal(a, lattice)?.systole_with_cap(cap))
        .collect::<Result<_>>()?;
    // first index attaining the minimum keeps the report deterministic
    let (idx, &min_systole) = values
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(y.1).then(x.0.cmp(&y.0)))
        .expect("nonempty grid");
    let argmin = grid[idx].clone();
    let verdict = if min_systole < eps {
        ProbeVerdict::DipsBelowEps {
            witness: argmin.clone(),
        }
    } else {
        ProbeVerdict::StaysAboveEps
    };
    Ok(ProbeReport {
        verdict,
        min_systole,
        argmin,
        grid_size: grid.len(),
    })
}
