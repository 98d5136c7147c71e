//! Writes the built-in corpus to a directory (default `corpus/`).

use std::path::PathBuf;

use lattice_median::corpus::Corpus;

fn main() -> lattice_median::Result<()> {
    let dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("corpus"));
    Corpus::builtin().write(&dir)?;
    println!("wrote {}", dir.display());
    Ok(())
}
