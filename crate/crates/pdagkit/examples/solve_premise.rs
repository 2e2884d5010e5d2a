//! Parses a premise, runs the step chain and answers several hypotheses.

use pdagkit::hypothesis::{evaluate_on_pdag, explain, EvalMode};
use pdagkit::premise::{parse_hypothesis, parse_premise};
use pdagkit::{run_engine, EngineOptions};

const PREMISE: &str = "Suppose that there is a closed system of 4 variables, A, B, C and D. \
All statistical relations among these 4 variables are as follows: A correlates with C. \
A correlates with D. B correlates with C. B correlates with D. C correlates with D. \
However, A is independent of B. A and D are independent given C. B and D are independent given C.";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let doc = parse_premise(PREMISE)?;
    let trace = run_engine(&doc.variables, &doc.relations, EngineOptions::default())?;
    println!("after independencies:\n{}", trace.after_conditional);
    println!("collider candidates: {}", trace.candidates.to_text(&doc.variables));
    println!("colliders kept:      {}", trace.filtered.to_text(&doc.variables));
    println!("oriented:\n{}", trace.oriented);

    let with_propagation = run_engine(
        &doc.variables,
        &doc.relations,
        EngineOptions { propagate: true, ..EngineOptions::default() },
    )?;
    println!("with propagation:\n{}", with_propagation.final_matrix());

    for text in [
        "A directly affects C.",
        "C directly affects D.",
        "A causes D.",
        "There exists at least one collider (i.e., common effect) of A and B.",
        "D directly affects C.",
    ] {
        let h = parse_hypothesis(text, &doc.variables)?;
        let m = trace.final_matrix();
        let quantified = evaluate_on_pdag(&h, m, EvalMode::ExtensionQuantified)?;
        let rules = evaluate_on_pdag(&h, m, EvalMode::RuleBased)?;
        println!("{text}\n  extensions: {:?}, rules: {:?}", quantified.answer, rules.answer);
        for line in explain(&h, m)? {
            println!("  {line}");
        }
    }
    Ok(())
}
