//! Writes a balanced gzip dataset and reads it back.

use pdagkit::dataset::{read_records, write_records, GenerateConfig, Generator, Sample};
use pdagkit::{HypothesisKind, Label};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let path = dir.path().join("samples.jsonl.gz");
    let cfg = GenerateConfig {
        kinds: vec![HypothesisKind::DirectCause, HypothesisKind::CommonEffect],
        ..GenerateConfig::default()
    };

    let mut samples = Vec::new();
    for n in 3..=5 {
        let gen = Generator::new(n)?;
        let (yes, no) = gen.label_counts(&cfg);
        println!("n={n}: {} classes, {yes} Yes / {no} No in the full stream", gen.mecs().len());
        samples.extend(gen.balanced(&cfg, 4, 1)?);
    }
    let written = write_records(&path, samples.iter().map(|s| &s.record), true)?;
    println!("wrote {written} records to {}", path.display());

    let back = read_records(&path)?;
    let parsed: Vec<Sample> = back.into_iter().map(Sample::from_record).collect::<Result<_, _>>()?;
    let yes = parsed.iter().filter(|s| s.label() == Label::Yes).count();
    println!("read {} records, {yes} Yes", parsed.len());
    println!("{}", serde_json::to_string_pretty(&parsed[0].record)?);
    Ok(())
}
