//! Counts labeled DAGs and Markov equivalence classes for small graphs.
//!
//! cargo run --example enumerate_mecs -- 4

use pdagkit::graph::{enumerate_dags, group_mecs};
use pdagkit::{Dag, VariableTable};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let max: usize = std::env::args().nth(1).map_or(Ok(4), |s| s.parse())?;
    for n in 1..=max {
        let dags: Vec<Dag> = enumerate_dags(n)?.collect();
        let mecs = group_mecs(&dags)?;
        let largest = mecs.iter().map(|m| m.members().len()).max().unwrap_or(0);
        println!("n={n}: {} DAGs, {} classes, largest class {largest}", dags.len(), mecs.len());
    }

    // The classes on three nodes, as their pattern edges.
    let vars = VariableTable::letters(3);
    let dags: Vec<Dag> = enumerate_dags(3)?.collect();
    for mec in group_mecs(&dags)? {
        let (directed, undirected) = mec.cpdag_edges();
        let show = |edges: &[(usize, usize)], sep: &str| {
            edges
                .iter()
                .map(|&(a, b)| format!("{}{sep}{}", vars.label(a), vars.label(b)))
                .collect::<Vec<_>>()
                .join(" ")
        };
        println!(
            "  {} member(s): {} {}",
            mec.members().len(),
            show(&directed, "->"),
            show(&undirected, "--")
        );
    }
    Ok(())
}
