//! Exact arithmetic in `ℤ[√−d]` and the classification of compact Cartan
//! orbits in `SL₂(ℂ)/SL₂(ℤ[√−d])`.
//!
//! For a semisimple `γ` of infinite order with `tr γ = a + b√−d`, the
//! `A`-action on the compact `C`-orbit defined by `γ` fails to be minimal iff
//! any of the following (equivalent) conditions holds:
//!
//! * some power `γⁿ` has real eigenvalues ([`eigen_power_test`]);
//! * the field generated by an eigenvalue is Galois over ℚ, detected here
//!   through the discriminant of `F(x) = (x² − τx + 1)(x² − τ̄x + 1)` being a
//!   square ([`disc_square_test`]);
//! * `(4−k)a² − k·d·b² = k(4−k)` for some `k ∈ {0,…,4}` ([`pell_test`]).
//!
//! The three tests are implemented independently so that [`classify`] can
//! cross-check them in strict mode.

use std::fmt;
use std::io::Write;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

use crate::{Error, Result};

/// Default power cap for [`eigen_power_test`]; the angles that occur are
/// `π/3, π/4, π/6`, so `n ≤ 12` always suffices.
pub const DEFAULT_MAX_POWER: u32 = 12;
pub const DEFAULT_POWER_TOL: f64 = 1e-9;

pub fn is_squarefree(d: i64) -> bool {
    if d < 1 {
        return false;
    }
    let mut d = d as u64;
    let mut p = 2u64;
    while p * p <= d {
        if d % p == 0 {
            d /= p;
            if d % p == 0 {
                return false;
            }
        }
        p += 1;
    }
    true
}

fn check_d(d: i64) -> Result<()> {
    if is_squarefree(d) {
        Ok(())
    } else {
        Err(Error::NotSquarefree(d))
    }
}

/// `a + b√−d` with `d ≥ 1` squarefree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadInt {
    pub a: BigInt,
    pub b: BigInt,
    d: i64,
}

impl QuadInt {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, d: i64) -> Result<Self> {
        check_d(d)?;
        Ok(QuadInt {
            a: a.into(),
            b: b.into(),
            d,
        })
    }

    fn raw(a: BigInt, b: BigInt, d: i64) -> Self {
        QuadInt { a, b, d }
    }

    pub fn zero(d: i64) -> Self {
        Self::raw(BigInt::zero(), BigInt::zero(), d)
    }

    pub fn one(d: i64) -> Self {
        Self::raw(BigInt::one(), BigInt::zero(), d)
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::raw(self.a.clone(), -&self.b, self.d)
    }

    /// `a² + d·b²`.
    pub fn norm(&self) -> BigInt {
        &self.a * &self.a + BigInt::from(self.d) * &self.b * &self.b
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(
            self.a.to_f64().unwrap_or(f64::NAN),
            self.b.to_f64().unwrap_or(f64::NAN) * (self.d as f64).sqrt(),
        )
    }
}

impl fmt::Display for QuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else if self.b.is_negative() {
            write!(f, "{} - {}√−{}", self.a, -&self.b, self.d)
        } else {
            write!(f, "{} + {}√−{}", self.a, self.b, self.d)
        }
    }
}

impl<'a> Add for &'a QuadInt {
    type Output = QuadInt;
    fn add(self, o: &'a QuadInt) -> QuadInt {
        debug_assert_eq!(self.d, o.d);
        QuadInt::raw(&self.a + &o.a, &self.b + &o.b, self.d)
    }
}

impl<'a> Sub for &'a QuadInt {
    type Output = QuadInt;
    fn sub(self, o: &'a QuadInt) -> QuadInt {
        debug_assert_eq!(self.d, o.d);
        QuadInt::raw(&self.a - &o.a, &self.b - &o.b, self.d)
    }
}

impl<'a> Mul for &'a QuadInt {
    type Output = QuadInt;
    fn mul(self, o: &'a QuadInt) -> QuadInt {
        debug_assert_eq!(self.d, o.d);
        let d = BigInt::from(self.d);
        QuadInt::raw(
            &self.a * &o.a - d * &self.b * &o.b,
            &self.a * &o.b + &self.b * &o.a,
            self.d,
        )
    }
}

impl Neg for &QuadInt {
    type Output = QuadInt;
    fn neg(self) -> QuadInt {
        QuadInt::raw(-&self.a, -&self.b, self.d)
    }
}

/// An element of `SL₂(ℤ[√−d])`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BianchiMatrix {
    d: i64,
    entries: [[QuadInt; 2]; 2],
}

impl BianchiMatrix {
    pub fn new(entries: [[QuadInt; 2]; 2]) -> Result<Self> {
        let d = entries[0][0].d;
        check_d(d)?;
        for e in entries.iter().flatten() {
            if e.d != d {
                return Err(Error::MixedOrders(d, e.d));
            }
        }
        let m = BianchiMatrix { d, entries };
        if m.det() != QuadInt::one(d) {
            return Err(Error::NotSpecialLinear);
        }
        Ok(m)
    }

    /// Builds a matrix from integer pairs `(re, coefficient of √−d)`.
    pub fn from_pairs(d: i64, pairs: [[(i64, i64); 2]; 2]) -> Result<Self> {
        check_d(d)?;
        let q = |(a, b): (i64, i64)| QuadInt::raw(a.into(), b.into(), d);
        Self::new([
            [q(pairs[0][0]), q(pairs[0][1])],
            [q(pairs[1][0]), q(pairs[1][1])],
        ])
    }

    /// The companion matrix `[[τ, 1], [−1, 0]]`, a canonical element with trace `τ`.
    pub fn companion(t: &QuadraticTrace) -> Self {
        let d = t.d;
        BianchiMatrix {
            d,
            entries: [
                [QuadInt::raw(t.a.clone(), t.b.clone(), d), QuadInt::one(d)],
                [-&QuadInt::one(d), QuadInt::zero(d)],
            ],
        }
    }

    pub fn identity(d: i64) -> Self {
        BianchiMatrix {
            d,
            entries: [
                [QuadInt::one(d), QuadInt::zero(d)],
                [QuadInt::zero(d), QuadInt::one(d)],
            ],
        }
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn entries(&self) -> &[[QuadInt; 2]; 2] {
        &self.entries
    }

    pub fn det(&self) -> QuadInt {
        let e = &self.entries;
        &(&e[0][0] * &e[1][1]) - &(&e[0][1] * &e[1][0])
    }

    pub fn trace(&self) -> QuadraticTrace {
        let t = &self.entries[0][0] + &self.entries[1][1];
        QuadraticTrace {
            a: t.a,
            b: t.b,
            d: self.d,
        }
    }

    /// Inverse via the adjugate (`det = 1`).
    pub fn inverse(&self) -> Self {
        let e = &self.entries;
        BianchiMatrix {
            d: self.d,
            entries: [[e[1][1].clone(), -&e[0][1]], [-&e[1][0], e[0][0].clone()]],
        }
    }

    pub fn pow(&self, mut n: u32) -> Self {
        let mut base = self.clone();
        let mut acc = BianchiMatrix::identity(self.d);
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            n >>= 1;
        }
        acc
    }
}

impl<'a> Mul for &'a BianchiMatrix {
    type Output = BianchiMatrix;
    fn mul(self, o: &'a BianchiMatrix) -> BianchiMatrix {
        debug_assert_eq!(self.d, o.d);
        let (x, y) = (&self.entries, &o.entries);
        let cell = |i: usize, j: usize| &(&x[i][0] * &y[0][j]) + &(&x[i][1] * &y[1][j]);
        BianchiMatrix {
            d: self.d,
            entries: [[cell(0, 0), cell(0, 1)], [cell(1, 0), cell(1, 1)]],
        }
    }
}

/// Wire format for `--matrix`: `{"d": 2, "entries": [[[re, im], [re, im]], [[re, im], [re, im]]]}`
/// where each pair is `re + im·√−d`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BianchiMatrixJson {
    pub d: i64,
    pub entries: [[(i64, i64); 2]; 2],
}

impl TryFrom<BianchiMatrixJson> for BianchiMatrix {
    type Error = Error;
    fn try_from(j: BianchiMatrixJson) -> Result<Self> {
        BianchiMatrix::from_pairs(j.d, j.entries)
    }
}

/// `tr γ = a + b√−d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadraticTrace {
    pub a: BigInt,
    pub b: BigInt,
    d: i64,
}

impl QuadraticTrace {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, d: i64) -> Result<Self> {
        check_d(d)?;
        Ok(QuadraticTrace {
            a: a.into(),
            b: b.into(),
            d,
        })
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    /// `b ≠ 0` or `|a| > 2`: the traces of semisimple elements of infinite order.
    pub fn is_loxodromic_or_hyperbolic(&self) -> bool {
        !self.b.is_zero() || self.a.abs() > BigInt::from(2)
    }

    pub fn to_complex(&self) -> Complex64 {
        QuadInt::raw(self.a.clone(), self.b.clone(), self.d).to_complex()
    }
}

impl fmt::Display for QuadraticTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        QuadInt::raw(self.a.clone(), self.b.clone(), self.d).fmt(f)
    }
}

/// Whether `γ` is semisimple of infinite order.
///
/// With `τ = tr γ = a + b√−d`:
/// * `b ≠ 0`: `τ ≠ ±2` so the eigenvalues are distinct (semisimple), and a root
///   of unity `λ` would give the real trace `λ + λ̄`, so the order is infinite;
/// * `b = 0, |a| > 2`: distinct real eigenvalues off the unit circle;
/// * `b = 0, |a| ≤ 1`: eigenvalues are primitive 3rd, 4th or 6th roots of unity;
/// * `b = 0, |a| = 2`: either `γ = ±I` (finite order) or not semisimple.
pub fn is_semisimple_infinite_order(gamma: &BianchiMatrix) -> bool {
    gamma.trace().is_loxodromic_or_hyperbolic()
}

/// Smallest `k ∈ {0,…,4}` with `(4−k)a² − k·d·b² = k(4−k)`, exactly.
pub fn pell_test(t: &QuadraticTrace) -> Option<u8> {
    let a2 = &t.a * &t.a;
    let db2 = BigInt::from(t.d) * &t.b * &t.b;
    (0u8..=4).find(|&k| {
        let k_big = BigInt::from(k);
        let rest = BigInt::from(4 - k as i64);
        &rest * &a2 - &k_big * &db2 == &k_big * &rest
    })
}

/// Coefficients of `F(x) = x⁴ − 2a x³ + (a² + b²d + 2)x² − 2a x + 1`, from `x⁴` down.
pub fn quartic_f(t: &QuadraticTrace) -> [BigInt; 5] {
    let two_a = BigInt::from(2) * &t.a;
    let mid = &t.a * &t.a + &t.b * &t.b * BigInt::from(t.d) + BigInt::from(2);
    [BigInt::one(), -&two_a, mid, -two_a, BigInt::one()]
}

/// `Δ(F) = 16 b⁴ d² ((a+2)² + b²d) ((a−2)² + b²d)`.
pub fn discriminant_formula(t: &QuadraticTrace) -> BigInt {
    let d = BigInt::from(t.d);
    let b2d = &t.b * &t.b * &d;
    let ap = &t.a + 2;
    let am = &t.a - 2;
    let plus = &ap * &ap + &b2d;
    let minus = &am * &am + &b2d;
    let b2 = &t.b * &t.b;
    BigInt::from(16) * &b2 * &b2 * &d * &d * plus * minus
}

pub fn is_perfect_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &r * &r == *n
}

/// `b = 0` passes outright; otherwise exact square test of [`discriminant_formula`].
pub fn disc_square_test(t: &QuadraticTrace) -> bool {
    t.b.is_zero() || is_perfect_square(&discriminant_formula(t))
}

/// The eigenvalue root of `x² − τx + 1` of larger modulus.
pub fn dominant_eigenvalue(t: &QuadraticTrace) -> Complex64 {
    let tau = t.to_complex();
    let s = (tau * tau - 4.0).sqrt();
    let l1 = (tau + s) / 2.0;
    let l2 = (tau - s) / 2.0;
    if l1.norm() >= l2.norm() {
        l1
    } else {
        l2
    }
}

/// Smallest `n ≤ max_power` such that `λⁿ` is real within relative `tol`.
///
/// Fails with a precondition error when the trace cannot belong to a
/// semisimple element of infinite order.
pub fn eigen_power_test(t: &QuadraticTrace, max_power: u32, tol: f64) -> Result<Option<u32>> {
    if !t.is_loxodromic_or_hyperbolic() {
        return Err(Error::Precondition(format!(
            "trace {t} is not that of a semisimple element of infinite order"
        )));
    }
    if max_power == 0 {
        return Err(Error::Precondition("max_power must be >= 1".into()));
    }
    let lambda = dominant_eigenvalue(t);
    let mut p = Complex64::new(1.0, 0.0);
    for n in 1..=max_power {
        p *= lambda;
        if p.im.abs() <= tol * p.norm() {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// `λ = (a/√k + √d·b/√(4−k)) · (√k + √(k−4))/2` for `k ∈ {1,2,3}` solving the Pell equation.
pub fn explicit_eigenvalue(t: &QuadraticTrace, k: u8) -> Result<Complex64> {
    if !(1..=3).contains(&k) {
        return Err(Error::Precondition(format!("k must be 1, 2 or 3, got {k}")));
    }
    if pell_test(t) != Some(k) {
        return Err(Error::Precondition(format!("pell_test({t}) is not {k}")));
    }
    let kf = k as f64;
    let a = t.a.to_f64().unwrap_or(f64::NAN);
    let b = t.b.to_f64().unwrap_or(f64::NAN);
    let d = t.d as f64;
    let real = a / kf.sqrt() + d.sqrt() * b / (4.0 - kf).sqrt();
    let unit = Complex64::new(kf.sqrt(), (4.0 - kf).sqrt()) / 2.0;
    Ok(unit * real)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Minimal,
    NotMinimal,
    NotApplicable,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Minimal => "Minimal",
            Verdict::NotMinimal => "NotMinimal",
            Verdict::NotApplicable => "NotApplicable",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub pell_k: u8,
    pub real_power_n: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationResult {
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub reason: String,
}

/// Options for [`Classifier::classify`].
#[derive(Debug, Clone, Copy)]
pub struct Classifier {
    /// Cross-check all three criteria and fail on disagreement.
    pub strict: bool,
    pub max_power: u32,
    pub tol: f64,
}

impl Default for Classifier {
    fn default() -> Self {
        Classifier {
            strict: false,
            max_power: DEFAULT_MAX_POWER,
            tol: DEFAULT_POWER_TOL,
        }
    }
}

impl Classifier {
    pub fn strict() -> Self {
        Classifier {
            strict: true,
            ..Default::default()
        }
    }

    pub fn classify(&self, gamma: &BianchiMatrix) -> Result<ClassificationResult> {
        if !is_semisimple_infinite_order(gamma) {
            return Ok(ClassificationResult {
                verdict: Verdict::NotApplicable,
                witness: None,
                reason: "γ is not semisimple of infinite order (b = 0 and |a| ≤ 2)".into(),
            });
        }
        self.classify_trace(&gamma.trace())
    }

    /// Classification from the trace alone; the trace must satisfy `b ≠ 0 or |a| > 2`.
    pub fn classify_trace(&self, t: &QuadraticTrace) -> Result<ClassificationResult> {
        if !t.is_loxodromic_or_hyperbolic() {
            return Ok(ClassificationResult {
                verdict: Verdict::NotApplicable,
                witness: None,
                reason: "trace has b = 0 and |a| ≤ 2".into(),
            });
        }
        let pell = pell_test(t);
        let power = eigen_power_test(t, self.max_power, self.tol)?;
        if self.strict {
            let square = disc_square_test(t);
            if pell.is_some() != square || square != power.is_some() {
                return Err(Error::EquivalenceViolation(format!(
                    "trace {t}: pell = {pell:?}, disc square = {square}, real power = {power:?}"
                )));
            }
        }
        Ok(match pell {
            Some(k) => ClassificationResult {
                verdict: Verdict::NotMinimal,
                witness: Some(Witness {
                    pell_k: k,
                    real_power_n: power,
                }),
                reason: format!("(4−k)a² − kdb² = k(4−k) holds with k = {k}"),
            },
            None => ClassificationResult {
                verdict: Verdict::Minimal,
                witness: None,
                reason: "no k ∈ {0,…,4} solves the Pell criterion".into(),
            },
        })
    }
}

pub fn classify(gamma: &BianchiMatrix) -> Result<ClassificationResult> {
    Classifier::default().classify(gamma)
}

fn ser_display<T: fmt::Display, S: Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// One row of a scan table (CSV column order is the field order).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub d: i64,
    pub a: i64,
    pub b: i64,
    pub verdict: Verdict,
    pub pell_k: Option<u8>,
    pub real_power_n: Option<u32>,
    #[serde(serialize_with = "ser_display")]
    pub disc: BigInt,
    pub disc_is_square: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanReport {
    pub d: i64,
    pub a_max: i64,
    pub b_max: i64,
    pub minimal: usize,
    pub not_minimal: usize,
    pub not_applicable: usize,
    /// Applicable traces in `(a, b)` order.
    pub rows: Vec<ScanRow>,
}

impl ScanReport {
    pub fn not_minimal_rows(&self) -> impl Iterator<Item = &ScanRow> {
        self.rows.iter().filter(|r| r.verdict == Verdict::NotMinimal)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "d,a,b,verdict,pell_k,real_power_n,disc,disc_is_square")?;
        let opt = |o: Option<String>| o.unwrap_or_default();
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{}",
                r.d,
                r.a,
                r.b,
                r.verdict,
                opt(r.pell_k.map(|k| k.to_string())),
                opt(r.real_power_n.map(|n| n.to_string())),
                r.disc,
                r.disc_is_square
            )?;
        }
        Ok(())
    }

    pub fn write_jsonl<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for r in &self.rows {
            serde_json::to_writer(&mut w, r)?;
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Classifies the companion matrix of every trace `a + b√−d` with
/// `|a| ≤ a_max`, `|b| ≤ b_max`, in strict mode.
pub fn scan(d: i64, a_max: i64, b_max: i64) -> Result<ScanReport> {
    check_d(d)?;
    if a_max < 0 || b_max < 0 {
        return Err(Error::Precondition("ranges must be non-negative".into()));
    }
    let classifier = Classifier::strict();
    let cells: Vec<(i64, i64)> = (-a_max..=a_max)
        .flat_map(|a| (-b_max..=b_max).map(move |b| (a, b)))
        .collect();
    let results: Vec<Option<ScanRow>> = cells
        .par_iter()
        .map(|&(a, b)| -> Result<Option<ScanRow>> {
            let t = QuadraticTrace::new(a, b, d)?;
            let gamma = BianchiMatrix::companion(&t);
            let res = classifier.classify(&gamma)?;
            if res.verdict == Verdict::NotApplicable {
                return Ok(None);
            }
            Ok(Some(ScanRow {
                d,
                a,
                b,
                verdict: res.verdict,
                pell_k: res.witness.map(|w| w.pell_k),
                real_power_n: res.witness.and_then(|w| w.real_power_n),
                disc: discriminant_formula(&t),
                disc_is_square: disc_square_test(&t),
            }))
        })
        .collect::<Result<_>>()?;

    let not_applicable = results.iter().filter(|r| r.is_none()).count();
    let rows: Vec<ScanRow> = results.into_iter().flatten().collect();
    let not_minimal = rows.iter().filter(|r| r.verdict == Verdict::NotMinimal).count();
    Ok(ScanReport {
        d,
        a_max,
        b_max,
        minimal: rows.len() - not_minimal,
        not_minimal,
        not_applicable,
        rows,
    })
}
