//! Writes the bundled three-slice synthetic corpus.
//!
//! Usage: `cargo run -p semtrail --example make_demo -- [out_dir] [tokens_per_slice]`

use std::path::PathBuf;

use semtrail::synth::{drift_corpus, DriftSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let out = PathBuf::from(args.next().unwrap_or_else(|| "demo".into()));
    let tokens: usize = args.next().map(|t| t.parse()).transpose()?.unwrap_or(30_000);
    let corpus = drift_corpus(&DriftSpec::new(vec![1850, 1860, 1870], tokens));
    corpus.write_to(&out, "demo", "mode = \"fixed_span\"\nspan_years = 10")?;
    println!("wrote {} documents to {}", corpus.documents.len(), out.display());
    Ok(())
}
