//! Compact Cartan orbits in SL₂(ℂ)/SL₂(ℤ[√−d]): classify the orbit of a
//! companion matrix by the Pell test, the discriminant test and the real
//! eigenvalue power test.
//!
//!     cargo run --example classify_trace -- [d a b]

use diagflow::bianchi::{
    disc_square_test, discriminant_formula, dominant_eigenvalue, eigen_power_test, explicit_eigenvalue,
    pell_test, quartic_f, BianchiMatrix, Classifier, QuadraticTrace,
};

fn main() -> diagflow::Result<()> {
    let args: Vec<i64> = std::env::args().skip(1).map(|s| s.parse().expect("integer")).collect();
    let cases = match args.as_slice() {
        [d, a, b] => vec![(*d, *a, *b)],
        _ => vec![(2, 3, 1), (2, 1, 1), (2, 3, 0), (1, 1, 1), (3, 3, 1), (7, 0, 1)],
    };
    let classifier = Classifier::strict();
    for (d, a, b) in cases {
        let t = QuadraticTrace::new(a, b, d)?;
        let gamma = BianchiMatrix::companion(&t);
        let res = classifier.classify(&gamma)?;
        println!("tr γ = {t}  (d = {d}): {}", res.verdict);
        println!("  F coefficients {:?}", quartic_f(&t).map(|c| c.to_string()));
        println!("  Δ = {}, square: {}", discriminant_formula(&t), disc_square_test(&t));
        if t.is_loxodromic_or_hyperbolic() {
            let lambda = dominant_eigenvalue(&t);
            println!("  λ = {lambda:.6}, first real power: {:?}", eigen_power_test(&t, 12, 1e-9)?);
            if let Some(k) = pell_test(&t).filter(|k| (1..=3).contains(k)) {
                let z = explicit_eigenvalue(&t, k)?;
                println!("  Pell k = {k}, closed-form eigenvalue {z:.6}");
            }
        }
        println!("  {}", res.reason);
    }
    Ok(())
}
