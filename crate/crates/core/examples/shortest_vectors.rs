//! Reduce a skewed unimodular lattice and list its short vectors.
//!
//!     cargo run --example shortest_vectors -- [bound]

use diagflow::lattice::UnimodularLattice;

fn main() -> diagflow::Result<()> {
    let bound: f64 = std::env::args().nth(1).map_or(1.5, |s| s.parse().expect("bound"));

    // a sheared basis of det 5; construction rescales it to covolume 1
    let l = UnimodularLattice::from_row_major(3, &[1.0, 2.0, 0.0, 0.0, 1.0, 1.0, 2.0, 0.0, 1.0])?;
    println!("basis {}", l.basis());

    let (reduced, u) = l.reduce_with_transform();
    println!("LLL-reduced basis {}", reduced.basis());
    println!("transform U (reduced = B·U): {u:?}");

    let s = l.systole()?;
    println!("systole = {s:.12}");
    for v in l.shortest_vectors(bound * s)? {
        println!("  {:>12?}  |v| = {:.12}", v.coords, v.length());
    }
    Ok(())
}
