//! Mahler probe: the lattice of the cubic order ℤ[θ], θ³ + θ² − 2θ − 1 = 0,
//! against the standard lattice over a ball of diagonal flows.
//!
//!     cargo run --release --example bounded_probe -- [radius] [step]

use diagflow::flows::log_ball_grid;
use diagflow::forms::{cubic_field_lattice, CubicOrderSpec};
use diagflow::lattice::{is_bounded_probe, UnimodularLattice};

fn main() -> diagflow::Result<()> {
    let mut args = std::env::args().skip(1);
    let radius: f64 = args.next().map_or(5.0, |s| s.parse().expect("radius"));
    let step: f64 = args.next().map_or(0.25, |s| s.parse().expect("step"));
    let eps = 0.1;

    let grid = log_ball_grid(3, radius, step)?;
    println!("{} grid points (radius {radius}, step {step})", grid.len());

    let cubic = cubic_field_lattice(&CubicOrderSpec::new(1, -2, -1)?)?;
    let rep = is_bounded_probe(&cubic, &grid, eps)?;
    println!(
        "cubic order lattice: min systole {:.9} at {:?} -> {}",
        rep.min_systole,
        rep.argmin.logs(),
        if rep.stays_above() { "stays above eps" } else { "dips below eps" }
    );
    println!("  AM-GM floor √3·7^(-1/3) = {:.9}", 3f64.sqrt() * 7f64.powf(-1.0 / 3.0));

    let rep = is_bounded_probe(&UnimodularLattice::identity(3), &grid, eps)?;
    println!(
        "standard lattice: min systole {:.3e} at {:?} -> {}",
        rep.min_systole,
        rep.argmin.logs(),
        serde_json::to_string(&rep.verdict).expect("json")
    );
    Ok(())
}
