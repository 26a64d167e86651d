//! Conjugate a sequence r_n → 0 in sl_2 by diagonal elements so that its
//! dominant root component has unit size, and report how the rest decays.
//!
//!     cargo run --example renormalize_sequence -- [n]

use diagflow::flows::{renormalize, LieAlgebraElement, RootIndex};

fn main() -> diagflow::Result<()> {
    let n_max: usize = std::env::args().nth(1).map_or(1000, |s| s.parse().expect("n"));
    let e12 = RootIndex::new(1, 2)?;
    let e21 = RootIndex::new(2, 1)?;

    type Coeffs = fn(f64) -> [f64; 2];
    let cases: [(&str, Coeffs); 2] = [
        ("(1/n) E12 + (1/n²) E21", |n| [1.0 / n, 1.0 / (n * n)]),
        ("(1/n) (E12 + E21)", |n| [1.0 / n, 1.0 / n]),
    ];
    for (label, coeffs) in cases {
        let seq = (1..=n_max)
            .map(|n| {
                let [u, w] = coeffs(n as f64);
                LieAlgebraElement::from_parts(2, &[0.0, 0.0], &[(e12, u), (e21, w)])
            })
            .collect::<diagflow::Result<Vec<_>>>()?;
        let r = renormalize(&seq)?;
        println!("{label}: α₀ = {}", r.root_class);
        println!("  limit at n = {n_max}: {}", r.limit.matrix());
        println!("  conjugator logs at n = {n_max}: {:?}", r.conjugators.last().map(|a| a.logs()));
        for (c, rate) in &r.decay {
            println!("  {c:?} decays like n^{rate:.4}");
        }
    }
    Ok(())
}
