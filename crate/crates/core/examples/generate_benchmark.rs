//! Regenerates the shipped benchmark files.
//!
//!     cargo run -p etd-quality --example generate_benchmark -- crates/core/data/benchmark

use std::path::PathBuf;

use etd_quality::evaluation::benchmark::{generate_standard, write_benchmark, STANDARD_SEED};
use etd_quality::Resources;

fn main() -> etd_quality::Result<()> {
    let dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| "benchmark".into());
    let b = generate_standard(STANDARD_SEED, &Resources::bundled()?)?;
    write_benchmark(&dir, &b)?;
    eprintln!("wrote {} records and {} labels to {}", b.corrupted.len(), b.labels.len(), dir.display());
    Ok(())
}
