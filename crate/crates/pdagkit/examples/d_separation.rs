//! d-separation queries and the premise relations they imply.

use pdagkit::engine::{RelationSet, StatementSelection};
use pdagkit::graph::{all_dsep_statements, d_separated};
use pdagkit::premise::{PremiseDoc, RenderStyle};
use pdagkit::{Dag, VariableTable};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // A -> C <- B, C -> D
    let dag = Dag::new(4, [(0, 2), (1, 2), (2, 3)])?;
    let vars = VariableTable::letters(4);

    println!("A _||_ B          : {}", d_separated(&dag, 0, 1, &[])?);
    println!("A _||_ B | C      : {}", d_separated(&dag, 0, 1, &[2])?);
    println!("A _||_ B | D      : {}", d_separated(&dag, 0, 1, &[3])?);
    println!("A _||_ D | C      : {}", d_separated(&dag, 0, 3, &[2])?);

    println!("\nall statements with up to 2 conditioning variables:");
    for s in all_dsep_statements(&dag, 2)? {
        let given: Vec<&str> = s.cond.iter().map(|&v| vars.label(v)).collect();
        println!("  {} _||_ {} | {{{}}}", vars.label(s.x), vars.label(s.y), given.join(", "));
    }

    for selection in [StatementSelection::Minimal, StatementSelection::FullClosure] {
        let rels = RelationSet::from_dag(&dag, 2, selection)?;
        let doc = PremiseDoc::render(vars.clone(), rels, &RenderStyle::Symbolic)?;
        println!("\n{selection:?}:\n{}", doc.raw_text);
    }
    Ok(())
}
