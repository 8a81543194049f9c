//! Set partitions in restricted-growth form and the Bell numbers counting them.
//!
//! ```text
//! cargo run --example bell -- 4
//! ```

use invcorr::partitions::{bell_number, clique_point, enumerate_partitions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let d: usize = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(4);
    let parts = enumerate_partitions(d)?;
    println!("B({d}) = {} ({} enumerated)", bell_number(d), parts.len());
    for p in parts.iter().take(20) {
        let c = clique_point(p);
        println!("{:?}  blocks {:?}  clique point {:?}", p.labels(), p.blocks(), c.upper_triangle());
    }
    if parts.len() > 20 {
        println!("... {} more", parts.len() - 20);
    }
    for d in [10, 25] {
        println!("B({d}) = {}", bell_number(d));
    }
    Ok(())
}
