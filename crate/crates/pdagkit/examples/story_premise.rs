//! Renders one class as a symbolic and a story premise and parses both back.

use pdagkit::dataset::{storyify, GenerateConfig, Generator};
use pdagkit::premise::{parse_premise, Theme};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let gen = Generator::new(4)?;
    let sample = gen.balanced(&GenerateConfig::default(), 1, 3)?.remove(0);
    println!("[{}] {}\n{}\n", sample.label(), sample.record.hypothesis, sample.record.premise);

    for name in Theme::BUILTIN {
        let theme = Theme::builtin(name)?;
        let story = storyify(&sample, &theme, Some(7))?;
        let back = parse_premise(&story.record.premise)?;
        assert_eq!(back.relations, sample.relations);
        println!("{name}: {}\n  {}\n", story.record.hypothesis, story.record.premise);
    }

    let custom = Theme::custom(
        "garden",
        ["rainfall", "soil moisture", "tomato yield", "slug count"].map(String::from).to_vec(),
    )?;
    let story = storyify(&sample, &custom, None)?;
    println!("garden: {}\n  {}", story.record.hypothesis, story.record.premise);
    Ok(())
}
