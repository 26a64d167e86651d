//! Scan traces a + b√−d over a rectangle and write the classification as CSV.
//!
//!     cargo run --release --example scan_bianchi -- [d] [amax] [bmax] > scan.csv

use diagflow::bianchi::scan;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1).map(|s| s.parse::<i64>().expect("integer"));
    let d = args.next().unwrap_or(2);
    let a_max = args.next().unwrap_or(20);
    let b_max = args.next().unwrap_or(10);

    let rep = scan(d, a_max, b_max)?;
    eprintln!(
        "d = {d}: {} minimal, {} not minimal, {} not applicable",
        rep.minimal, rep.not_minimal, rep.not_applicable
    );
    for r in rep.not_minimal_rows().filter(|r| r.b != 0) {
        eprintln!("  a = {:>3}, b = {:>3}: k = {:?}, n = {:?}", r.a, r.b, r.pell_k, r.real_power_n);
    }
    rep.write_csv(std::io::stdout().lock())?;
    Ok(())
}
