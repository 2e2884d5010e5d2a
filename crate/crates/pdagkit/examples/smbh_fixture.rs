//! Solves the pre-parsed black hole / host galaxy relation fixture.

use pdagkit::hypothesis::{evaluate_on_pdag, explain, EvalMode};
use pdagkit::premise::{parse_hypothesis, PremiseFixture};
use pdagkit::{run_engine, EngineOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/smbh.json");
    let fixture: PremiseFixture = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    let doc = fixture.to_doc()?;
    println!("{}\n", doc.raw_text);

    let trace = run_engine(&doc.variables, &doc.relations, EngineOptions::default())?;
    println!("{}", trace.final_matrix());
    for (a, b) in trace.final_matrix().directed_edges() {
        println!("  {} -> {}", doc.variables.display_name(a), doc.variables.display_name(b));
    }

    let text = fixture.hypothesis.as_deref().unwrap_or("Does central density affect black hole mass?");
    let h = parse_hypothesis(text, &doc.variables)?;
    let verdict = evaluate_on_pdag(&h, trace.final_matrix(), EvalMode::ExtensionQuantified)?;
    println!("\n{text} {:?}", verdict.answer);
    for line in explain(&h, trace.final_matrix())? {
        println!("  {line}");
    }
    Ok(())
}
