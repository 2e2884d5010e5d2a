//! Sentence segmentation and the small lexical helpers shared by the grammar.

use serde::{Deserialize, Serialize};

/// Half-open byte range into the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn slice<'a>(&self, text: &'a str) -> &'a str {
        &text[self.start..self.end]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sentence<'a> {
    pub text: &'a str,
    pub span: Span,
}

/// Splits on `.`, `?` or `!` followed by whitespace or end of input. Empty
/// fragments are skipped; a trailing fragment without terminator counts.
pub fn sentences(text: &str) -> Vec<Sentence<'_>> {
    fn push<'a>(text: &'a str, s: usize, e: usize, out: &mut Vec<Sentence<'a>>) {
        let raw = &text[s..e];
        let lead = raw.len() - raw.trim_start().len();
        let trimmed = raw.trim();
        if !trimmed.is_empty() {
            let st = s + lead;
            out.push(Sentence {
                text: &text[st..st + trimmed.len()],
                span: Span {
                    start: st,
                    end: st + trimmed.len(),
                },
            });
        }
    }
    let mut out = Vec::new();
    let mut start = 0;
    let bytes = text.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        if matches!(b, b'.' | b'?' | b'!') {
            let next = bytes.get(i + 1);
            if next.is_none_or(|c| c.is_ascii_whitespace()) {
                push(text, start, i + 1, &mut out);
                start = i + 1;
            }
        }
    }
    if start < text.len() {
        push(text, start, text.len(), &mut out);
    }
    out
}

/// Collapses whitespace, folds typographic quotes and drops the terminator.
pub(crate) fn normalize(sentence: &str) -> String {
    let folded: String = sentence
        .chars()
        .map(|c| match c {
            '\u{2018}' | '\u{2019}' => '\'',
            '\u{201C}' | '\u{201D}' => '"',
            c => c,
        })
        .collect();
    let joined = folded.split_whitespace().collect::<Vec<_>>().join(" ");
    joined
        .trim_end_matches(['.', '?', '!'])
        .trim_end()
        .to_string()
}

const CONNECTIVES: &[&str] = &[
    "however",
    "moreover",
    "additionally",
    "furthermore",
    "in addition",
    "also",
    "conversely",
    "meanwhile",
    "besides",
];

/// Drops one leading discourse connective such as "However,".
pub(crate) fn strip_connective(s: &str) -> &str {
    let lower = s.to_ascii_lowercase();
    for c in CONNECTIVES {
        if let Some(rest) = lower.strip_prefix(c) {
            if rest.starts_with(',') || rest.starts_with(' ') {
                let cut = c.len();
                return s[cut..].trim_start_matches(',').trim_start();
            }
        }
    }
    s
}

/// `A, B and C` / `A, B, and C` / `A and B` / `A`.
pub(crate) fn split_list(s: &str) -> Vec<String> {
    let mut items = Vec::new();
    for chunk in s.split(',') {
        let chunk = chunk.trim();
        let chunk = chunk.strip_prefix("and ").unwrap_or(chunk);
        for part in split_word(chunk, "and") {
            let p = part.trim();
            if !p.is_empty() {
                items.push(p.to_string());
            }
        }
    }
    items
}

/// Split on a whole word, case-insensitively.
pub(crate) fn split_word<'a>(s: &'a str, word: &str) -> Vec<&'a str> {
    let lower = s.to_ascii_lowercase();
    let pat = format!(" {word} ");
    let mut parts = Vec::new();
    let mut last = 0;
    let mut from = 0;
    while let Some(pos) = lower[from..].find(&pat) {
        let at = from + pos;
        parts.push(&s[last..at]);
        last = at + pat.len();
        from = last;
    }
    parts.push(&s[last..]);
    parts
}

/// Digits or an English number word up to twelve.
pub(crate) fn parse_count(word: &str) -> Option<usize> {
    if let Ok(n) = word.parse() {
        return Some(n);
    }
    const WORDS: [&str; 13] = [
        "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
        "eleven", "twelve",
    ];
    WORDS.iter().position(|w| w.eq_ignore_ascii_case(word))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_sentences_with_spans() {
        let text = "A correlates with C.  However, A is independent of B.";
        let s = sentences(text);
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].text, "A correlates with C.");
        assert_eq!(s[1].span.slice(text), "However, A is independent of B.");
    }

    #[test]
    fn abbreviation_inside_parentheses_does_not_split() {
        let s = sentences("There exists at least one collider (i.e., common effect) of A and B.");
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn trailing_fragment_counts() {
        let s = sentences("A correlates with B. trailing words");
        assert_eq!(s.len(), 2);
        assert_eq!(s[1].text, "trailing words");
    }

    #[test]
    fn lists() {
        assert_eq!(split_list("A, B and C"), ["A", "B", "C"]);
        assert_eq!(split_list("A, B, and D"), ["A", "B", "D"]);
        assert_eq!(split_list("C"), ["C"]);
        assert_eq!(
            split_list("eating junk food, obesity, and watching television"),
            ["eating junk food", "obesity", "watching television"]
        );
    }

    #[test]
    fn connectives() {
        assert_eq!(strip_connective("However, A is independent of B"), "A is independent of B");
        assert_eq!(strip_connective("Also A correlates with B"), "A correlates with B");
        assert_eq!(strip_connective("Alsoa"), "Alsoa");
    }

    #[test]
    fn counts() {
        assert_eq!(parse_count("5"), Some(5));
        assert_eq!(parse_count("Three"), Some(3));
        assert_eq!(parse_count("many"), None);
    }
}
