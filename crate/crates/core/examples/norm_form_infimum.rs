//! Box infima of products of linear forms: a cubic norm form, which stays
//! away from zero, and a generic form, whose infimum keeps shrinking.
//!
//!     cargo run --release --example norm_form_infimum -- [radius]

use diagflow::forms::{
    infimum_box, is_rational_multiple, norm_form, normalization_constant, CubicOrderSpec, LinearFormsProduct,
};

fn main() -> diagflow::Result<()> {
    let radius: i64 = std::env::args().nth(1).map_or(10, |s| s.parse().expect("radius"));

    let spec = CubicOrderSpec::new(1, -2, -1)?;
    println!("x³ + x² − 2x − 1: disc {}, roots {:?}", spec.discriminant(), spec.roots());
    let f = norm_form(&spec)?;
    let c = normalization_constant(&spec)?;
    for r in [2, radius / 2, radius] {
        let m = infimum_box(&f, r)?;
        println!(
            "  r = {r:>3}: min |f| = {:.12} at {:?}  (× |det| = {:.9})",
            m.min_abs,
            m.argmin,
            m.min_abs / c
        );
    }
    println!("  rational multiple: {}", is_rational_multiple(&f, 1e-8, 1_000_000).is_yes());

    let g = LinearFormsProduct::from_rows(&[
        vec![1.0, 2f64.sqrt(), 3f64.sqrt()],
        vec![1.0, -(2f64.sqrt()), 5f64.sqrt()],
        vec![1.0, std::f64::consts::FRAC_PI_4, -(7f64.sqrt())],
    ])?;
    println!("generic form:");
    for r in [2, radius / 2, radius] {
        let m = infimum_box(&g, r)?;
        println!("  r = {r:>3}: min |f| = {:.3e} at {:?}", m.min_abs, m.argmin);
    }
    println!("  rational multiple: {}", is_rational_multiple(&g, 1e-8, 1_000_000).is_yes());
    Ok(())
}
