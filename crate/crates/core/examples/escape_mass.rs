//! Push a lattice vector to zero with one unipotent step and a diagonal flow,
//! writing the trace as JSON lines.
//!
//!     cargo run --example escape_mass -- [eps]

use diagflow::flows::{escape_run, escape_step, RootIndex};
use diagflow::lattice::UnimodularLattice;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let eps: f64 = std::env::args().nth(1).map_or(1e-3, |s| s.parse().expect("eps"));
    let l = UnimodularLattice::from_row_major(3, &[1.0, 0.3, -0.2, 0.1, 1.0, 0.4, 0.5, -0.3, 1.0])?;
    let u = RootIndex::new(2, 1)?;

    for coords in [[0, 1, 0], [1, 1, 0], [2, -1, 1]] {
        let v = l.vector(&coords)?;
        println!("v = {coords:?}, |v| = {:.6}", v.length());
        println!("  plan: {:?}", escape_step(&l, &v, u)?);
        let out = escape_run(&l, &v, u, eps, 20.0)?;
        println!(
            "  t = {:.6}, |a·u·v| = {:.3e}, final systole = {:.3e}, unipotent steps = {}",
            out.t,
            out.image_length,
            out.final_systole,
            out.unipotent_steps()
        );
        out.write_jsonl(std::io::stdout().lock())?;
    }
    Ok(())
}
