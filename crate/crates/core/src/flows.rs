//! Roots of `sl_n`, the actions of the diagonal group `A` and of root
//! unipotents on lattices, escape of mass along `AU`-orbits, and the
//! renormalization of sequences in `sl_n` towards a single root space.
//!
//! Roots are indexed 1-based: [`RootIndex`] `(i, j)` names
//! `α_ij(a) = e^{t_i - t_j}` with root space spanned by `E_ij`.

use std::fmt;
use std::io::Write;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::lattice::{LatticeVector, UnimodularLattice};
use crate::{Error, Result};

/// Tolerance on `|Σ t_i|` for log-coordinates of `A`, relative to `max(1, Σ|t_i|)`.
pub const LOG_SUM_TOL: f64 = 1e-12;

/// Initial extra flow time past `ln(|v|/eps)`.
pub const FLOW_MARGIN: f64 = 1e-6;

/// Root-value gap below which an element counts as singular.
pub const REGULARITY_TOL: f64 = 1e-9;

/// An element `a = diag(e^{t_1}, …, e^{t_n})` of `A`, stored by its logs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct DiagonalElement {
    logs: Vec<f64>,
}

impl TryFrom<Vec<f64>> for DiagonalElement {
    type Error = Error;

    fn try_from(logs: Vec<f64>) -> Result<Self> {
        DiagonalElement::new(logs)
    }
}

impl From<DiagonalElement> for Vec<f64> {
    fn from(a: DiagonalElement) -> Self {
        a.logs
    }
}

impl DiagonalElement {
    pub fn new(logs: Vec<f64>) -> Result<Self> {
        if logs.len() < 2 {
            return Err(Error::Invalid("diagonal element needs n >= 2".into()));
        }
        if logs.iter().any(|t| !t.is_finite()) {
            return Err(Error::Invalid("non-finite log coordinate".into()));
        }
        let sum: f64 = logs.iter().sum();
        let scale = logs.iter().map(|t| t.abs()).sum::<f64>().max(1.0);
        if sum.abs() > LOG_SUM_TOL * scale {
            return Err(Error::Invalid(format!(
                "log coordinates must sum to 0 (sum = {sum})"
            )));
        }
        Ok(DiagonalElement { logs })
    }

    /// Projects arbitrary logs onto the sum-zero hyperplane.
    pub fn projected(logs: Vec<f64>) -> Self {
        let mean = logs.iter().sum::<f64>() / logs.len() as f64;
        DiagonalElement {
            logs: logs.into_iter().map(|t| t - mean).collect(),
        }
    }

    pub fn identity(n: usize) -> Self {
        DiagonalElement { logs: vec![0.0; n] }
    }

    /// The flow `(n−1)t` at coordinate `k` (1-based) and `−t` elsewhere; for
    /// `t > 0` it contracts every vector whose `k`-th coordinate vanishes by `e^{−t}`.
    pub fn shrink_flow(n: usize, k: usize, t: f64) -> Self {
        assert!(k >= 1 && k <= n, "coordinate {k} out of range 1..={n}");
        let logs = (1..=n)
            .map(|i| if i == k { (n as f64 - 1.0) * t } else { -t })
            .collect();
        DiagonalElement { logs }
    }

    pub fn dim(&self) -> usize {
        self.logs.len()
    }

    pub fn logs(&self) -> &[f64] {
        &self.logs
    }

    pub fn norm(&self) -> f64 {
        self.logs.iter().map(|t| t * t).sum::<f64>().sqrt()
    }

    /// Group product `a·b`, i.e. the sum of log-coordinates.
    pub fn compose(&self, other: &DiagonalElement) -> Self {
        assert_eq!(self.dim(), other.dim());
        DiagonalElement {
            logs: self.logs.iter().zip(&other.logs).map(|(s, t)| s + t).collect(),
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        DiagonalElement {
            logs: self.logs.iter().map(|t| c * t).collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        self.scaled(-1.0)
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_iterator(
            self.dim(),
            self.logs.iter().map(|t| t.exp()),
        ))
    }

    pub fn is_regular(&self) -> bool {
        is_regular(self)
    }
}

/// The root `α_ij`, 1-based with `i ≠ j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RootIndex {
    pub i: usize,
    pub j: usize,
}

impl fmt::Display for RootIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.i, self.j)
    }
}

impl RootIndex {
    pub fn new(i: usize, j: usize) -> Result<Self> {
        if i == 0 || j == 0 || i == j {
            return Err(Error::Invalid(format!("invalid root index ({i},{j})")));
        }
        Ok(RootIndex { i, j })
    }

    /// All roots of `sl_n` in lexicographic order of `(i, j)`.
    pub fn all(n: usize) -> Vec<RootIndex> {
        let mut out = Vec::with_capacity(n * (n - 1));
        for i in 1..=n {
            for j in 1..=n {
                if i != j {
                    out.push(RootIndex { i, j });
                }
            }
        }
        out
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if self.i > n || self.j > n {
            return Err(Error::Invalid(format!("root {self} out of range for n = {n}")));
        }
        Ok(())
    }

    /// `α` as a vector `e_i − e_j` of `𝔞*` (trace form on diagonal matrices).
    pub fn weight(&self, n: usize) -> Vec<f64> {
        let mut w = vec![0.0; n];
        w[self.i - 1] += 1.0;
        w[self.j - 1] -= 1.0;
        w
    }

    /// `⟨α, β⟩` for the standard inner product; `|α|² = 2` for every root.
    pub fn inner(&self, other: &RootIndex) -> f64 {
        let d = |a: usize, b: usize| f64::from(u8::from(a == b));
        d(self.i, other.i) - d(self.i, other.j) - d(self.j, other.i) + d(self.j, other.j)
    }

    /// The elementary matrix `E_ij`.
    pub fn elementary(&self, n: usize) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(n, n);
        m[(self.i - 1, self.j - 1)] = 1.0;
        m
    }

    /// The unipotent `u(s) = exp(s E_ij) = I + s E_ij`.
    pub fn unipotent(&self, n: usize, s: f64) -> DMatrix<f64> {
        let mut m = DMatrix::identity(n, n);
        m[(self.i - 1, self.j - 1)] = s;
        m
    }
}

/// `α_ij(a) = e^{t_i − t_j}`, the eigenvalue of `Ad(a)` on `E_ij`.
pub fn root_value(a: &DiagonalElement, r: RootIndex) -> f64 {
    (a.logs[r.i - 1] - a.logs[r.j - 1]).exp()
}

/// True iff no root takes the value 1 on `a` (within [`REGULARITY_TOL`] in log scale).
pub fn is_regular(a: &DiagonalElement) -> bool {
    let t = &a.logs;
    (0..t.len()).all(|i| (i + 1..t.len()).all(|j| (t[i] - t[j]).abs() > REGULARITY_TOL))
}

pub fn apply_diagonal(a: &DiagonalElement, lattice: &UnimodularLattice) -> Result<UnimodularLattice> {
    if a.dim() != lattice.dim() {
        return Err(Error::DimensionMismatch {
            expected: lattice.dim(),
            got: a.dim(),
        });
    }
    lattice.left_multiply(&a.matrix())
}

pub fn apply_unipotent(r: RootIndex, s: f64, lattice: &UnimodularLattice) -> Result<UnimodularLattice> {
    r.check_dim(lattice.dim())?;
    lattice.left_multiply(&r.unipotent(lattice.dim(), s))
}

/// An element of `sl_n`, kept as a traceless matrix and read through the
/// decomposition `𝔞 ⊕ ⨁_α 𝔲_α`.
#[derive(Debug, Clone, PartialEq)]
pub struct LieAlgebraElement {
    mat: DMatrix<f64>,
}

impl LieAlgebraElement {
    pub fn new(mat: DMatrix<f64>) -> Result<Self> {
        let n = mat.nrows();
        if n < 2 || mat.ncols() != n {
            return Err(Error::Invalid("Lie algebra element must be square, n >= 2".into()));
        }
        let tr = mat.trace();
        if tr.abs() > 1e-12 * mat.norm().max(1.0) {
            return Err(Error::Invalid(format!("element is not traceless (trace {tr})")));
        }
        Ok(LieAlgebraElement { mat })
    }

    /// Recomposes `z + Σ u_α E_α` from its Cartan part and root coefficients.
    pub fn from_parts(n: usize, cartan: &[f64], roots: &[(RootIndex, f64)]) -> Result<Self> {
        if cartan.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: cartan.len(),
            });
        }
        let mut mat = DMatrix::from_diagonal(&DVector::from_column_slice(cartan));
        for &(r, c) in roots {
            r.check_dim(n)?;
            mat[(r.i - 1, r.j - 1)] += c;
        }
        Self::new(mat)
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub fn cartan(&self) -> Vec<f64> {
        self.mat.diagonal().iter().copied().collect()
    }

    pub fn root_coefficient(&self, r: RootIndex) -> f64 {
        self.mat[(r.i - 1, r.j - 1)]
    }

    pub fn root_components(&self) -> Vec<(RootIndex, f64)> {
        RootIndex::all(self.dim())
            .into_iter()
            .map(|r| (r, self.root_coefficient(r)))
            .collect()
    }

    pub fn is_cartan(&self) -> bool {
        self.root_components().iter().all(|&(_, c)| c == 0.0)
    }

    pub fn norm(&self) -> f64 {
        self.mat.norm()
    }

    /// `Ad(a)X = a X a⁻¹`; scales the `E_ij` coefficient by `α_ij(a)`.
    pub fn adjoint(&self, a: &DiagonalElement) -> Self {
        let n = self.dim();
        let mat = DMatrix::from_fn(n, n, |i, j| self.mat[(i, j)] * (a.logs[i] - a.logs[j]).exp());
        LieAlgebraElement { mat }
    }
}

// ---------------------------------------------------------------------------
// Escape of mass along AU-orbits

/// What [`escape_step`] prescribes for a given vector.
#[derive(Debug, Clone, PartialEq)]
pub enum EscapePlan {
    /// The vector already has a vanishing coordinate `k` (1-based).
    ShrinkFlow { k: usize },
    /// Apply `u(s)` along `root` to zero coordinate `root.i`, then shrink at `k = root.i`.
    UnipotentThenFlow { root: RootIndex, s: f64, k: usize },
}

impl EscapePlan {
    pub fn shrink_coordinate(&self) -> usize {
        match *self {
            EscapePlan::ShrinkFlow { k } | EscapePlan::UnipotentThenFlow { k, .. } => k,
        }
    }
}

fn is_vanishing(w: &[f64], k: usize) -> bool {
    let scale = w.iter().map(|x| x * x).sum::<f64>().sqrt();
    w[k - 1].abs() <= 1e-12 * scale
}

/// One step of the constructive unboundedness argument for `AU`-orbits with
/// `U = {exp(s E_{i1})}`: if `v_1 = 0` shrink at coordinate 1; if `v_i = 0`
/// shrink at `i`; otherwise `u(−v_i/v_1)` zeroes coordinate `i` first.
pub fn escape_step(lattice: &UnimodularLattice, v: &LatticeVector, udir: RootIndex) -> Result<EscapePlan> {
    if udir.j != 1 {
        return Err(Error::Precondition(format!(
            "U-direction must have the form (i,1), got {udir}; use escape_run_along"
        )));
    }
    plan_along(lattice, v, udir)
}

fn plan_along(lattice: &UnimodularLattice, v: &LatticeVector, udir: RootIndex) -> Result<EscapePlan> {
    udir.check_dim(lattice.dim())?;
    if v.embedding.len() != lattice.dim() {
        return Err(Error::DimensionMismatch {
            expected: lattice.dim(),
            got: v.embedding.len(),
        });
    }
    if v.is_zero() || v.length() == 0.0 {
        return Err(Error::ZeroVector);
    }
    let w = &v.embedding;
    if is_vanishing(w, udir.j) {
        return Ok(EscapePlan::ShrinkFlow { k: udir.j });
    }
    if is_vanishing(w, udir.i) {
        return Ok(EscapePlan::ShrinkFlow { k: udir.i });
    }
    let s = -w[udir.i - 1] / w[udir.j - 1];
    Ok(EscapePlan::UnipotentThenFlow {
        root: udir,
        s,
        k: udir.i,
    })
}

/// An element applied during an escape run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "params", rename_all = "lowercase")]
pub enum AppliedElement {
    Diag { logs: Vec<f64> },
    Unipotent { i: usize, j: usize, s: f64 },
}

/// One JSON-lines record of an escape trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    #[serde(flatten)]
    pub element: AppliedElement,
    pub systole: f64,
}

#[derive(Debug, Clone)]
pub struct EscapeOutcome {
    pub trace: Vec<TraceRecord>,
    pub lattice: UnimodularLattice,
    /// Flow time of the shrink flow.
    pub t: f64,
    /// Coordinates of the tracked vector (unchanged by the group action).
    pub coords: Vec<i64>,
    /// Length of the image of the tracked vector in the final lattice.
    pub image_length: f64,
    pub final_systole: f64,
}

impl EscapeOutcome {
    pub fn unipotent_steps(&self) -> usize {
        self.trace
            .iter()
            .filter(|r| matches!(r.element, AppliedElement::Unipotent { .. }))
            .count()
    }

    pub fn write_jsonl<W: Write>(&self, w: W) -> std::io::Result<()> {
        write_trace_jsonl(&self.trace, w)
    }
}

pub fn write_trace_jsonl<W: Write>(trace: &[TraceRecord], mut w: W) -> std::io::Result<()> {
    for rec in trace {
        let rec = TraceRecord {
            element: match &rec.element {
                AppliedElement::Diag { logs } => AppliedElement::Diag {
                    logs: logs.iter().map(|&t| crate::round_sig(t, 12)).collect(),
                },
                AppliedElement::Unipotent { i, j, s } => AppliedElement::Unipotent {
                    i: *i,
                    j: *j,
                    s: crate::round_sig(*s, 12),
                },
            },
            systole: crate::round_sig(rec.systole, 12),
        };
        serde_json::to_writer(&mut w, &rec)?;
        writeln!(w)?;
    }
    Ok(())
}

/// Drives `v` below `eps` using at most one unipotent along `udir = (i,1)`
/// followed by a shrink flow.
pub fn escape_run(
    lattice: &UnimodularLattice,
    v: &LatticeVector,
    udir: RootIndex,
    eps: f64,
    t_max: f64,
) -> Result<EscapeOutcome> {
    if udir.j != 1 {
        return Err(Error::Precondition(format!(
            "U-direction must have the form (i,1), got {udir}; use escape_run_along"
        )));
    }
    escape_run_along(lattice, v, udir, eps, t_max)
}

/// [`escape_run`] for an arbitrary root direction `(i, j)`; this is the
/// coordinate-permuted form of the `(i, 1)` procedure.
pub fn escape_run_along(
    lattice: &UnimodularLattice,
    v: &LatticeVector,
    udir: RootIndex,
    eps: f64,
    t_max: f64,
) -> Result<EscapeOutcome> {
    if !(eps > 0.0) {
        return Err(Error::Precondition(format!("eps must be positive, got {eps}")));
    }
    let n = lattice.dim();
    let plan = plan_along(lattice, v, udir)?;
    let mut current = lattice.clone();
    let mut trace = Vec::new();

    if let EscapePlan::UnipotentThenFlow { root, s, .. } = plan {
        current = apply_unipotent(root, s, &current)?;
        trace.push(TraceRecord {
            element: AppliedElement::Unipotent { i: root.i, j: root.j, s },
            systole: current.systole()?,
        });
    }

    let image = current.vector(&v.coords)?;
    let len = image.length();
    let mut t = 0.0;
    if len >= eps {
        // off the vanishing coordinate the flow scales by exactly e^{-t}; the
        // margin absorbs rounding in the stretched basis and grows until the
        // enumerated systole confirms the bound
        let needed = (len / eps).ln();
        let base = current.clone();
        let mut margin = FLOW_MARGIN;
        loop {
            t = needed + margin;
            if t > t_max {
                return Err(Error::FlowBudgetExceeded { needed, t_max });
            }
            let a = DiagonalElement::shrink_flow(n, plan.shrink_coordinate(), t);
            let moved = apply_diagonal(&a, &base)?;
            let systole = moved.systole()?;
            if systole < eps || margin >= 1.0 {
                current = moved;
                trace.push(TraceRecord {
                    element: AppliedElement::Diag { logs: a.logs.clone() },
                    systole,
                });
                break;
            }
            margin *= 10.0;
        }
    }

    let image_length = current.vector(&v.coords)?.length();
    if image_length >= eps || trace.last().is_some_and(|r| r.systole >= eps) {
        // the vanishing coordinate was not numerically zero and got expanded
        return Err(Error::FlowBudgetExceeded { needed: t, t_max });
    }
    let final_systole = match trace.last() {
        Some(r) => r.systole,
        None => current.systole()?,
    };
    Ok(EscapeOutcome {
        trace,
        lattice: current,
        t,
        coords: v.coords.clone(),
        image_length,
        final_systole,
    })
}

/// Runs the escape on the current shortest vector of the lattice.
///
/// Picking the shortest vector is a heuristic: any nonzero vector works.
pub fn escape_shortest(
    lattice: &UnimodularLattice,
    udir: RootIndex,
    eps: f64,
    t_max: f64,
) -> Result<EscapeOutcome> {
    let s = lattice.systole()?;
    let v = lattice
        .shortest_vectors(s * (1.0 + 1e-9))?
        .into_iter()
        .next()
        .ok_or(Error::ZeroVector)?;
    escape_run_along(lattice, &v, udir, eps, t_max)
}

// ---------------------------------------------------------------------------
// Renormalization towards a root space

/// Component of `sl_n` tracked by the decay report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Component {
    Cartan,
    Root(RootIndex),
}

#[derive(Debug, Clone)]
pub struct Renormalization {
    /// The selected root `α₀`.
    pub root_class: RootIndex,
    /// `Ad(exp(t_N a))·r_N` for the last element of the sequence.
    pub limit: LieAlgebraElement,
    /// `t_n·a` for every element.
    pub conjugators: Vec<DiagonalElement>,
    pub conjugated: Vec<LieAlgebraElement>,
    /// Fitted power-law exponent (in the 1-based sequence index) of the norm
    /// of every other component of the conjugated sequence. Components that
    /// vanish identically are omitted.
    pub decay: Vec<(Component, f64)>,
}

impl Renormalization {
    pub fn decay_of(&self, c: Component) -> Option<f64> {
        self.decay.iter().find(|(k, _)| *k == c).map(|&(_, e)| e)
    }
}

/// Conjugates a sequence `r_n → 0` by `exp(t_n a)` so that its `α₀` component
/// has unit norm, where `α(a) = ⟨α, α₀⟩` and `e^{t_n} = |u_{n,α₀}|^{-1/|α₀|²}`.
///
/// `α₀` maximises `|u_α|^{1/|α|}` at the last element; in `sl_n` all roots have
/// the same length, so this is the largest root coefficient, with ties going
/// to the lexicographically smallest `(i, j)`.
pub fn renormalize(seq: &[LieAlgebraElement]) -> Result<Renormalization> {
    let last = seq
        .iter()
        .rev()
        .find(|x| !x.is_cartan())
        .ok_or(Error::NoRootComponent)?;
    let n = last.dim();
    if let Some(bad) = seq.iter().find(|x| x.dim() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: bad.dim(),
        });
    }

    let mut root_class = None;
    let mut best = 0.0f64;
    for (r, c) in last.root_components() {
        let m = c.abs().powf(1.0 / 2f64.sqrt());
        if m > best * (1.0 + 1e-12) {
            best = m;
            root_class = Some(r);
        }
    }
    let root_class = root_class.ok_or(Error::NoRootComponent)?;
    let norm_sq = root_class.inner(&root_class);
    // α(a) = ⟨α, α₀⟩ is realised by a = e_i − e_j
    let direction = DiagonalElement::new(root_class.weight(n))?;

    let mut conjugators = Vec::with_capacity(seq.len());
    let mut conjugated = Vec::with_capacity(seq.len());
    for (idx, x) in seq.iter().enumerate() {
        let u0 = x.root_coefficient(root_class).abs();
        if u0 == 0.0 {
            return Err(Error::VanishingRootComponent {
                root: root_class.to_string(),
                index: idx + 1,
            });
        }
        let t_n = -u0.ln() / norm_sq;
        let a = direction.scaled(t_n);
        conjugated.push(x.adjoint(&a));
        conjugators.push(a);
    }

    let mut components = vec![Component::Cartan];
    components.extend(
        RootIndex::all(n)
            .into_iter()
            .filter(|&r| r != root_class)
            .map(Component::Root),
    );
    let decay = components
        .into_iter()
        .filter_map(|c| {
            let pts: Vec<(f64, f64)> = conjugated
                .iter()
                .enumerate()
                .filter_map(|(idx, x)| {
                    let mag = match c {
                        Component::Cartan => x.cartan().iter().map(|z| z * z).sum::<f64>().sqrt(),
                        Component::Root(r) => x.root_coefficient(r).abs(),
                    };
                    (mag > 0.0).then(|| (((idx + 1) as f64).ln(), mag.ln()))
                })
                .collect();
            fit_slope(&pts).map(|s| (c, s))
        })
        .collect();

    Ok(Renormalization {
        root_class,
        limit: conjugated.last().cloned().expect("nonempty sequence"),
        conjugators,
        conjugated,
        decay,
    })
}

fn fit_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

/// Points of `step·ℤ^{n−1}` (embedded in the sum-zero hyperplane by
/// `t_n = −Σ t_i`) inside the Euclidean ball of the given radius.
pub fn log_ball_grid(n: usize, radius: f64, step: f64) -> Result<Vec<DiagonalElement>> {
    if n < 2 || !(radius >= 0.0) || !(step > 0.0) {
        return Err(Error::Precondition(format!(
            "grid needs n >= 2, radius >= 0, step > 0 (got {n}, {radius}, {step})"
        )));
    }
    let m = (radius / step + 1e-9).floor() as i64;
    let free = n - 1;
    let side = (2 * m + 1) as usize;
    let total = side.checked_pow(free as u32).ok_or_else(|| Error::Precondition("grid too large".into()))?;
    let mut out = Vec::new();
    let mut idx = vec![-m; free];
    for _ in 0..total {
        let mut logs: Vec<f64> = idx.iter().map(|&k| k as f64 * step).collect();
        logs.push(-logs.iter().sum::<f64>());
        let r = logs.iter().map(|t| t * t).sum::<f64>().sqrt();
        if r <= radius * (1.0 + 1e-12) {
            out.push(DiagonalElement { logs });
        }
        for slot in idx.iter_mut() {
            if *slot < m {
                *slot += 1;
                break;
            }
            *slot = -m;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn root_value_examples() {
        let id = DiagonalElement::identity(3);
        for r in RootIndex::all(3) {
            assert_eq!(root_value(&id, r), 1.0);
        }
        let a = DiagonalElement::new(vec![2.0, -1.0, -1.0]).unwrap();
        assert!(close(root_value(&a, RootIndex::new(1, 2).unwrap()), 3f64.exp(), 1e-12));
        assert!(close(root_value(&a, RootIndex::new(1, 2).unwrap()), 20.0855, 1e-4));
    }

    #[test]
    fn regularity() {
        assert!(!is_regular(&DiagonalElement::identity(3)));
        assert!(!is_regular(&DiagonalElement::new(vec![2.0, -1.0, -1.0]).unwrap()));
        assert!(is_regular(&DiagonalElement::new(vec![3.0, 1.0, -4.0]).unwrap()));
    }

    #[test]
    fn diagonal_requires_sum_zero() {
        assert!(DiagonalElement::new(vec![1.0, 1.0, 1.0]).is_err());
        let p = DiagonalElement::projected(vec![1.0, 2.0, 3.0]);
        assert_eq!(p.logs(), &[-1.0, 0.0, 1.0]);
    }

    #[test]
    fn root_inner_products() {
        let a12 = RootIndex::new(1, 2).unwrap();
        assert_eq!(a12.inner(&a12), 2.0);
        assert_eq!(a12.inner(&RootIndex::new(2, 1).unwrap()), -2.0);
        assert_eq!(a12.inner(&RootIndex::new(1, 3).unwrap()), 1.0);
        assert_eq!(a12.inner(&RootIndex::new(3, 2).unwrap()), 1.0);
        assert_eq!(a12.inner(&RootIndex::new(2, 3).unwrap()), -1.0);
        assert!(RootIndex::new(2, 2).is_err());
    }

    #[test]
    fn unipotent_zeroes_coordinate() {
        let z3 = UnimodularLattice::identity(3);
        let l = apply_unipotent(RootIndex::new(2, 1).unwrap(), -1.0, &z3).unwrap();
        let v = l.vector(&[1, 1, 0]).unwrap();
        assert_eq!(v.embedding, vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn identity_action() {
        let l = UnimodularLattice::from_row_major(2, &[2.0, 1.0, 0.3, 0.7]).unwrap();
        let out = apply_diagonal(&DiagonalElement::identity(2), &l).unwrap();
        assert!((out.basis() - l.basis()).norm() < 1e-15);
        assert!(apply_diagonal(&DiagonalElement::identity(3), &l).is_err());
    }

    #[test]
    fn escape_step_examples() {
        let z3 = UnimodularLattice::identity(3);
        let u21 = RootIndex::new(2, 1).unwrap();

        let v = z3.vector(&[0, 1, 0]).unwrap();
        assert_eq!(escape_step(&z3, &v, u21).unwrap(), EscapePlan::ShrinkFlow { k: 1 });
        let a = DiagonalElement::shrink_flow(3, 1, 1.5);
        assert_eq!(a.logs(), &[3.0, -1.5, -1.5]);
        let img = apply_diagonal(&a, &z3).unwrap().vector(&[0, 1, 0]).unwrap();
        assert!(close(img.length(), (-1.5f64).exp(), 1e-15));

        let v = z3.vector(&[1, 1, 0]).unwrap();
        assert_eq!(
            escape_step(&z3, &v, u21).unwrap(),
            EscapePlan::UnipotentThenFlow { root: u21, s: -1.0, k: 2 }
        );

        let v = z3.vector(&[1, 0, 0]).unwrap();
        assert_eq!(escape_step(&z3, &v, u21).unwrap(), EscapePlan::ShrinkFlow { k: 2 });

        let v = z3.vector(&[2, 1, 1]).unwrap();
        assert_eq!(
            escape_step(&z3, &v, u21).unwrap(),
            EscapePlan::UnipotentThenFlow { root: u21, s: -0.5, k: 2 }
        );

        let zero = z3.vector(&[0, 0, 0]).unwrap();
        assert_eq!(escape_step(&z3, &zero, u21).unwrap_err(), Error::ZeroVector);
        assert!(escape_step(&z3, &v, RootIndex::new(2, 3).unwrap()).is_err());
    }

    #[test]
    fn trace_json_shape() {
        let rec = TraceRecord {
            element: AppliedElement::Unipotent { i: 2, j: 1, s: -1.0 },
            systole: 1.0,
        };
        let s = serde_json::to_string(&rec).unwrap();
        assert_eq!(s, r#"{"type":"unipotent","params":{"i":2,"j":1,"s":-1.0},"systole":1.0}"#);
        let rec = TraceRecord {
            element: AppliedElement::Diag { logs: vec![2.0, -1.0, -1.0] },
            systole: 0.5,
        };
        let s = serde_json::to_string(&rec).unwrap();
        assert_eq!(s, r#"{"type":"diag","params":{"logs":[2.0,-1.0,-1.0]},"systole":0.5}"#);
        let back: TraceRecord = serde_json::from_str(&s).unwrap();
        assert_eq!(back, rec);
    }

    #[test]
    fn renormalize_rejects_pure_cartan() {
        let seq: Vec<_> = (1..=5)
            .map(|n| {
                let c = 1.0 / n as f64;
                LieAlgebraElement::from_parts(3, &[c, -c, 0.0], &[]).unwrap()
            })
            .collect();
        let err = renormalize(&seq).unwrap_err();
        assert_eq!(err.to_string(), "no root component");
    }

    #[test]
    fn grid_counts() {
        let g = log_ball_grid(3, 0.0, 0.25).unwrap();
        assert_eq!(g.len(), 1);
        let g = log_ball_grid(2, 1.0, 0.5).unwrap();
        // t = (k/2, -k/2), |t| = |k|/√2 ≤ 1 keeps k in {-1, 0, 1}
        assert_eq!(g.len(), 3);
        for a in log_ball_grid(3, 5.0, 0.25).unwrap() {
            assert!(a.norm() <= 5.0 + 1e-9);
            assert!(a.logs().iter().sum::<f64>().abs() < 1e-12);
        }
    }
}
