//! Evaluates the oracle-backed mock in every prompting mode, then replays
//! the recorded transcripts.

use pdagkit::dataset::{GenerateConfig, Generator};
use pdagkit::harness::{
    run_batch, score, EvalRecord, GroupBy, MockBackend, Mode, PipelineOptions, ReplayBackend,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut samples = Vec::new();
    for n in 3..=4 {
        samples.extend(Generator::new(n)?.balanced(&GenerateConfig::default(), 5, 42)?);
    }
    let opts = PipelineOptions::default();
    let mock = MockBackend::default();

    for mode in [Mode::StepByStep, Mode::FewShot, Mode::BaselineCot] {
        let records = run_batch(&samples, &mock, mode, &opts, 4);
        let report = score(&records, &[GroupBy::NVars])?;
        println!("{mode}\n{}", report.to_text());
    }

    let recorded = run_batch(&samples, &mock, Mode::StepByStep, &opts, 4);
    let replay = ReplayBackend::from_transcripts(recorded.iter().map(EvalRecord::transcript));
    let again = run_batch(&samples, &replay, Mode::StepByStep, &opts, 4);
    let same = recorded
        .iter()
        .zip(&again)
        .all(|(a, b)| a.steps == b.steps && a.predicted == b.predicted);
    println!("replay of {} transcripts identical: {same}", replay.len());
    Ok(())
}
