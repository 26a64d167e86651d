//! Roots of sl_3, their values on a diagonal element, and the adjoint action.
//!
//!     cargo run --example root_action

use diagflow::flows::{is_regular, root_value, DiagonalElement, LieAlgebraElement, RootIndex};

fn main() -> diagflow::Result<()> {
    let a = DiagonalElement::new(vec![0.5, 0.2, -0.7])?;
    println!("a = diag(exp {:?}), regular: {}", a.logs(), is_regular(&a));

    for r in RootIndex::all(3) {
        let others: Vec<String> = RootIndex::all(3)
            .iter()
            .map(|s| format!("{:+}", r.inner(s)))
            .collect();
        println!("α{r}: value {:.6}  inner products [{}]", root_value(&a, r), others.join(" "));
    }

    let x = LieAlgebraElement::from_parts(
        3,
        &[1.0, -1.0, 0.0],
        &[(RootIndex::new(1, 2)?, 1.0), (RootIndex::new(3, 1)?, 2.0)],
    )?;
    let y = x.adjoint(&a);
    println!("Ad(a) keeps the Cartan part {:?}", y.cartan());
    for (r, c) in y.root_components() {
        if c != 0.0 {
            println!("  u{r}: {} -> {:.6}", x.root_coefficient(r), c);
        }
    }

    // a singular element: α₁₂ is trivial on it
    let b = DiagonalElement::new(vec![1.0, 1.0, -2.0])?;
    println!("diag(e, e, e⁻²) regular: {}", is_regular(&b));
    Ok(())
}
