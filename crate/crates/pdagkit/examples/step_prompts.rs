//! Prints each prompt of the step-by-step chain and the mock model's reply
//! for one sample.

use pdagkit::dataset::{GenerateConfig, Generator};
use pdagkit::harness::{
    run_pipeline, BackendError, ChatBackend, Message, MockBackend, Mode, PipelineOptions, Reply,
};

/// Passes requests through to another backend and prints both sides.
struct Echo<B>(B);

impl<B: ChatBackend> ChatBackend for Echo<B> {
    fn name(&self) -> String {
        format!("echo:{}", self.0.name())
    }

    fn complete(&self, messages: &[Message]) -> Result<Reply, BackendError> {
        let prompt = &messages.last().expect("one message").content;
        println!("=== prompt ({} chars)\n{prompt}\n", prompt.len());
        let reply = self.0.complete(messages)?;
        println!("--- reply\n{}\n", reply.text);
        Ok(reply)
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sample = Generator::new(3)?.balanced(&GenerateConfig::default(), 1, 8)?.remove(0);
    let backend = Echo(MockBackend::default());
    let record = run_pipeline(&sample, &backend, Mode::StepByStep, &PipelineOptions::default());
    let matched: Vec<u8> = record.steps.iter().filter(|s| s.matched).map(|s| s.step).collect();
    println!("label {}, predicted {:?}, matched steps {matched:?}", record.label, record.predicted);
    Ok(())
}
