//! Products of real linear forms `f(x) = ∏ᵢ (Lx)ᵢ`, their infima over integer
//! boxes, norm forms of totally real cubic orders, and detection of forms that
//! are real multiples of integer forms.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::lattice::UnimodularLattice;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LinearFormsProduct {
    coeff: DMatrix<f64>,
}

impl LinearFormsProduct {
    pub fn new(coeff: DMatrix<f64>) -> Result<Self> {
        let n = coeff.nrows();
        if n < 1 || coeff.ncols() != n {
            return Err(Error::Invalid("coefficient matrix must be square".into()));
        }
        if coeff.iter().any(|x| !x.is_finite()) {
            return Err(Error::Invalid("non-finite coefficient".into()));
        }
        let det = coeff.determinant();
        let scale: f64 = coeff.row_iter().map(|r| r.norm()).product();
        if scale == 0.0 || det.abs() <= 1e-14 * scale {
            return Err(Error::DegenerateBasis);
        }
        Ok(LinearFormsProduct { coeff })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Invalid("coefficient rows must form a square matrix".into()));
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn dim(&self) -> usize {
        self.coeff.nrows()
    }

    pub fn coeff(&self) -> &DMatrix<f64> {
        &self.coeff
    }

    /// The form `c·f`, realised by scaling the first linear form.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        let mut coeff = self.coeff.clone();
        coeff.row_mut(0).scale_mut(c);
        Self::new(coeff)
    }

    pub fn evaluate(&self, x: &[i64]) -> f64 {
        assert_eq!(x.len(), self.dim(), "dimension mismatch");
        self.coeff
            .row_iter()
            .map(|row| row.iter().zip(x).map(|(c, &xi)| c * xi as f64).sum::<f64>())
            .product()
    }

    /// Magnitude scale `∏ᵢ ‖Lᵢ‖·‖x‖` used to decide when a value counts as zero.
    fn magnitude(&self, x: &[i64]) -> f64 {
        let xn = x.iter().map(|&v| (v as f64).powi(2)).sum::<f64>().sqrt();
        self.coeff.row_iter().map(|r| r.norm() * xn).product()
    }

    /// Expands `f` as a homogeneous polynomial of degree `n`: exponent vectors
    /// mapped to coefficients.
    pub fn expand(&self) -> BTreeMap<Vec<u32>, f64> {
        let n = self.dim();
        let mut poly: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
        poly.insert(vec![0; n], 1.0);
        for row in self.coeff.row_iter() {
            let mut next: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
            for (mono, c) in &poly {
                for (j, &l) in row.iter().enumerate() {
                    if l == 0.0 {
                        continue;
                    }
                    let mut m = mono.clone();
                    m[j] += 1;
                    *next.entry(m).or_insert(0.0) += c * l;
                }
            }
            poly = next;
        }
        poly
    }
}

pub fn evaluate(f: &LinearFormsProduct, x: &[i64]) -> f64 {
    f.evaluate(x)
}

/// A monic integer cubic `x³ + c₂x² + c₁x + c₀` with three real roots that is
/// irreducible over ℚ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubicOrderSpec {
    pub c2: i64,
    pub c1: i64,
    pub c0: i64,
}

impl CubicOrderSpec {
    pub fn new(c2: i64, c1: i64, c0: i64) -> Result<Self> {
        let spec = CubicOrderSpec { c2, c1, c0 };
        if spec.discriminant() <= 0 {
            return Err(Error::NotTotallyReal);
        }
        if let Some(r) = spec.integer_root() {
            return Err(Error::ReducibleCubic(r));
        }
        Ok(spec)
    }

    pub fn discriminant(&self) -> i128 {
        let (b, c, d) = (self.c2 as i128, self.c1 as i128, self.c0 as i128);
        b * b * c * c - 4 * c * c * c - 4 * b * b * b * d - 27 * d * d + 18 * b * c * d
    }

    // A monic integer cubic is reducible over ℚ iff it has an integer root,
    // which must divide c₀.
    fn integer_root(&self) -> Option<i64> {
        let eval = |x: i128| {
            x * x * x + self.c2 as i128 * x * x + self.c1 as i128 * x + self.c0 as i128
        };
        if self.c0 == 0 {
            return Some(0);
        }
        let c0 = self.c0.unsigned_abs();
        let mut d = 1u64;
        while d * d <= c0 {
            if c0 % d == 0 {
                for q in [d, c0 / d] {
                    for cand in [q as i128, -(q as i128)] {
                        if eval(cand) == 0 {
                            return Some(cand as i64);
                        }
                    }
                }
            }
            d += 1;
        }
        None
    }

    fn eval(&self, x: f64) -> (f64, f64) {
        let (b, c, d) = (self.c2 as f64, self.c1 as f64, self.c0 as f64);
        let p = ((x + b) * x + c) * x + d;
        let dp = (3.0 * x + 2.0 * b) * x + c;
        (p, dp)
    }

    /// The three real roots in decreasing order, from the trigonometric
    /// formula polished by Newton's method.
    pub fn roots(&self) -> [f64; 3] {
        let (b, c, d) = (self.c2 as f64, self.c1 as f64, self.c0 as f64);
        // depressed cubic y³ + py + q with x = y − b/3
        let p = c - b * b / 3.0;
        let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = ((3.0 * q / (p * m)).clamp(-1.0, 1.0)).acos() / 3.0;
        let mut roots = [0.0; 3];
        for (k, r) in roots.iter_mut().enumerate() {
            let y = m * (arg - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos();
            let mut x = y - b / 3.0;
            for _ in 0..50 {
                let (fx, dfx) = self.eval(x);
                if fx.abs() <= 1e-13 || dfx == 0.0 {
                    break;
                }
                let step = fx / dfx;
                x -= step;
                if step.abs() <= 1e-16 * x.abs().max(1.0) {
                    break;
                }
            }
            *r = x;
        }
        roots.sort_by(|a, b| b.total_cmp(a));
        roots
    }
}

/// Rows `(1, θᵢ, θᵢ²)` over the real roots, not normalised; `f(x)` is the
/// field norm `N(x₁ + x₂θ + x₃θ²)`.
pub fn norm_form_unnormalized(spec: &CubicOrderSpec) -> Result<LinearFormsProduct> {
    let roots = spec.roots();
    LinearFormsProduct::from_rows(
        &roots
            .iter()
            .map(|&t| vec![1.0, t, t * t])
            .collect::<Vec<_>>(),
    )
}

/// The factor `1/|det L|` by which the normalised norm form differs from the norm.
pub fn normalization_constant(spec: &CubicOrderSpec) -> Result<f64> {
    Ok(1.0 / norm_form_unnormalized(spec)?.coeff.determinant().abs())
}

/// The norm form rescaled so that `|det L| = 1`; its values are `N(·)/|det|`.
pub fn norm_form(spec: &CubicOrderSpec) -> Result<LinearFormsProduct> {
    let raw = norm_form_unnormalized(spec)?;
    let det = raw.coeff.determinant().abs();
    LinearFormsProduct::new(raw.coeff * det.powf(-1.0 / 3.0))
}

/// The lattice spanned by the columns of the normalised norm-form matrix. Its
/// `A`-orbit is bounded since `|∏ᵢ wᵢ|` is bounded below on nonzero vectors.
pub fn cubic_field_lattice(spec: &CubicOrderSpec) -> Result<UnimodularLattice> {
    UnimodularLattice::new(norm_form(spec)?.coeff)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxInfimum {
    pub radius: i64,
    /// `min |f(x)|` over nonzero `x` in the box.
    pub min_abs: f64,
    pub argmin: Vec<i64>,
    /// Same statistic restricted to `f(x) ≠ 0`.
    pub min_nonzero: Option<f64>,
    pub argmin_nonzero: Option<Vec<i64>>,
    /// Number of `±` classes scanned.
    pub scanned: u64,
}

pub fn infimum_box(f: &LinearFormsProduct, radius: i64) -> Result<BoxInfimum> {
    infimum_box_with_cap(f, radius, crate::cell_cap_from_env())
}

/// Exhaustive scan of `[−r, r]ⁿ ∖ {0}`, one representative per `±` pair.
///
/// Minima are exact minima of the computed values. The reported witness is the
/// canonical point among those within relative `1e-9` of the minimum: smallest
/// ℓ¹ norm, then lexicographically largest coordinates, with the first nonzero
/// coordinate positive.
pub fn infimum_box_with_cap(f: &LinearFormsProduct, radius: i64, cap: u64) -> Result<BoxInfimum> {
    if radius < 1 {
        return Err(Error::Precondition(format!("radius must be >= 1, got {radius}")));
    }
    let n = f.dim();
    let cells = ((2 * radius + 1) as f64).powi(n as i32);
    if cells > cap as f64 {
        return Err(Error::BudgetExceeded { cells, cap });
    }

    let is_zero = |x: &[i64], v: f64| v.abs() <= 1e-12 * f.magnitude(x);

    // slabs over the first coordinate; x₀ ≥ 0 with the sign convention
    let slab_min = |x0: i64| -> (f64, f64) {
        let mut best = (f64::INFINITY, f64::INFINITY);
        for_each_in_slab(n, radius, x0, |x| {
            let v = f.evaluate(x);
            best.0 = best.0.min(v.abs());
            if !is_zero(x, v) {
                best.1 = best.1.min(v.abs());
            }
        });
        best
    };
    let (min_abs, min_nonzero) = (0..=radius)
        .into_par_iter()
        .map(slab_min)
        .reduce(|| (f64::INFINITY, f64::INFINITY), |a, b| (a.0.min(b.0), a.1.min(b.1)));

    let near = |v: f64, m: f64| {
        if m == 0.0 {
            v == 0.0
        } else {
            v <= m * (1.0 + 1e-9)
        }
    };
    let canonical_pick = |want_nonzero: bool, m: f64| -> Option<Vec<i64>> {
        (0..=radius)
            .into_par_iter()
            .filter_map(|x0| {
                let mut pick: Option<Vec<i64>> = None;
                for_each_in_slab(n, radius, x0, |x| {
                    let v = f.evaluate(x);
                    if want_nonzero && is_zero(x, v) {
                        return;
                    }
                    if near(v.abs(), m) && pick.as_deref().is_none_or(|p| canonical_lt(x, p)) {
                        pick = Some(x.to_vec());
                    }
                });
                pick
            })
            .reduce_with(|a, b| if canonical_lt(&b, &a) { b } else { a })
    };

    let argmin = canonical_pick(false, min_abs).expect("box has nonzero points");
    let (min_nonzero, argmin_nonzero) = if min_nonzero.is_finite() {
        (Some(min_nonzero), canonical_pick(true, min_nonzero))
    } else {
        (None, None)
    };
    Ok(BoxInfimum {
        radius,
        min_abs,
        argmin,
        min_nonzero,
        argmin_nonzero,
        scanned: ((cells as u64) - 1) / 2,
    })
}

fn canonical_lt(a: &[i64], b: &[i64]) -> bool {
    let l1 = |x: &[i64]| x.iter().map(|v| v.unsigned_abs()).sum::<u64>();
    (l1(a), std::cmp::Reverse(a)) < (l1(b), std::cmp::Reverse(b))
}

// Visits every x with x[0] = x0 whose first nonzero coordinate is positive.
fn for_each_in_slab(n: usize, r: i64, x0: i64, mut visit: impl FnMut(&[i64])) {
    let mut x = vec![0i64; n];
    x[0] = x0;
    if n == 1 {
        if x0 > 0 {
            visit(&x);
        }
        return;
    }
    for v in x.iter_mut().skip(1) {
        *v = -r;
    }
    loop {
        let leading_ok = match x.iter().find(|&&v| v != 0) {
            Some(&v) => v > 0,
            None => false,
        };
        if leading_ok {
            visit(&x);
        }
        let mut k = 1;
        loop {
            if k == n {
                return;
            }
            if x[k] < r {
                x[k] += 1;
                break;
            }
            x[k] = -r;
            k += 1;
        }
    }
}

/// An integer homogeneous form, `f = scale · Σ c_m x^m`, with coprime coefficients.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegerForm {
    pub terms: Vec<(Vec<u32>, i64)>,
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum RationalVerdict {
    Yes { form: IntegerForm, worst_residual: f64 },
    No { worst_residual: f64, reason: String },
}

impl RationalVerdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, RationalVerdict::Yes { .. })
    }
}

/// Last continued-fraction convergent of `x` with denominator `≤ max_den`.
pub fn best_convergent(x: f64, max_den: i64) -> (i64, i64) {
    let sign = if x < 0.0 { -1 } else { 1 };
    let mut y = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (0i64, 1i64, 1i64, 0i64);
    for _ in 0..64 {
        let a = y.floor();
        if a > i64::MAX as f64 / 4.0 {
            break;
        }
        let a = a as i64;
        let (p2, q2) = match (a.checked_mul(p1).and_then(|v| v.checked_add(p0)), a.checked_mul(q1).and_then(|v| v.checked_add(q0))) {
            (Some(p), Some(q)) => (p, q),
            _ => break,
        };
        if q2 > max_den {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = y - a as f64;
        if frac <= 1e-15 {
            break;
        }
        y = 1.0 / frac;
    }
    if q1 == 0 {
        (0, 1)
    } else {
        (sign * p1, q1)
    }
}

/// Decides whether `f` is a real multiple of a form with integer coefficients.
///
/// The expansion is scaled so its largest coefficient is 1, every coefficient
/// is replaced by its best convergent with denominator `≤ max_denominator`, and
/// the verdict is yes iff the common denominator `Q` stays within the cap and
/// every `|Q·c − round(Q·c)| < tol`.
pub fn is_rational_multiple(f: &LinearFormsProduct, tol: f64, max_denominator: i64) -> RationalVerdict {
    let poly = f.expand();
    let (_, &lead) = poly
        .iter()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .expect("nonempty expansion");
    let scaled: Vec<(Vec<u32>, f64)> = poly.iter().map(|(m, c)| (m.clone(), c / lead)).collect();

    let mut q_common: i64 = 1;
    for (_, c) in &scaled {
        let (_, q) = best_convergent(*c, max_denominator);
        q_common = q_common.lcm(&q);
        if q_common > max_denominator {
            return RationalVerdict::No {
                worst_residual: f64::NAN,
                reason: format!("common denominator exceeds {max_denominator}"),
            };
        }
    }

    let qf = q_common as f64;
    let mut worst = 0.0f64;
    let mut ints = Vec::with_capacity(scaled.len());
    for (m, c) in &scaled {
        let v = qf * c;
        let r = v.round();
        worst = worst.max((v - r).abs());
        ints.push((m.clone(), r as i64));
    }
    if worst >= tol {
        return RationalVerdict::No {
            worst_residual: worst,
            reason: format!("residual {worst:e} at denominator {q_common}"),
        };
    }
    let g = ints.iter().fold(0i64, |g, (_, c)| g.gcd(c)).max(1);
    let terms: Vec<(Vec<u32>, i64)> = ints
        .into_iter()
        .filter(|(_, c)| *c != 0)
        .map(|(m, c)| (m, c / g))
        .collect();
    RationalVerdict::Yes {
        form: IntegerForm {
            terms,
            scale: lead * g as f64 / qf,
        },
        worst_residual: worst,
    }
}

/// Form specification accepted on the wire: `{"coeff": …}` (rows, or a flat
/// row-major array) or `{"cubic": [c2, c1, c0]}`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum FormSpec {
    Coeff { coeff: CoeffJson },
    Cubic { cubic: [i64; 3] },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum CoeffJson {
    Rows(Vec<Vec<f64>>),
    Flat(Vec<f64>),
}

impl FormSpec {
    pub fn to_form(&self) -> Result<LinearFormsProduct> {
        match self {
            FormSpec::Coeff { coeff: CoeffJson::Rows(rows) } => LinearFormsProduct::from_rows(rows),
            FormSpec::Coeff { coeff: CoeffJson::Flat(flat) } => {
                let n = (flat.len() as f64).sqrt().round() as usize;
                if n * n != flat.len() {
                    return Err(Error::Invalid(format!("{} coefficients is not a square count", flat.len())));
                }
                LinearFormsProduct::new(DMatrix::from_row_slice(n, n, flat))
            }
            FormSpec::Cubic { cubic: [c2, c1, c0] } => norm_form(&CubicOrderSpec::new(*c2, *c1, *c0)?),
        }
    }
}
