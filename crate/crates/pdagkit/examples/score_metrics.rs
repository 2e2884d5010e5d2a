//! Confusion counts to precision, recall, F1 and accuracy.

use pdagkit::harness::{Confusion, Metrics};

fn main() {
    for (name, c) in [
        ("mostly right", Confusion { tp: 13, fp: 1, tn: 14, fn_: 2 }),
        ("always Yes", Confusion { tp: 15, fp: 15, tn: 0, fn_: 0 }),
        ("always No", Confusion { tp: 0, fp: 0, tn: 15, fn_: 15 }),
    ] {
        let m = Metrics::from_counts(c);
        println!(
            "{name:<13} P={:.4} R={:.4} F1={:.4} Acc={:.4} {:?}",
            m.precision, m.recall, m.f1, m.accuracy, m.degenerate
        );
    }
}
