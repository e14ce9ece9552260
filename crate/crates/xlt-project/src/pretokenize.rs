//! Word-boundary induction on raw translated sentences.
//!
//! Three modes: whitespace splitting, a rule-based cascade approximating
//! Moses-style tokenization, and a pass-through for externally pre-tokenized
//! input. The rule cascade only inserts boundaries; it never rewrites
//! characters, so concatenating the output tokens always reproduces the
//! input minus whitespace.

use thiserror::Error;

use crate::corpus::Sentence;

#[derive(Debug, Error)]
pub enum PretokenizeError {
    #[error("empty or all-whitespace input")]
    EmptyInput,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PretokenizerMode {
    /// Split on maximal runs of Unicode whitespace.
    WsTok,
    /// Whitespace split followed by the rule cascade below.
    RuleTok,
    /// Input is already tokenized; split on single spaces and take tokens
    /// verbatim.
    External,
}

/// Clause and sentence punctuation detached as separate tokens.
const PUNCT: &[char] = &['.', ',', ';', ':', '!', '?'];
/// Paired symbols always detached.
const PAIRED: &[char] = &['"', '\'', '(', ')', '[', ']', '{', '}'];

pub fn pretokenize(
    raw_text: &str,
    mode: PretokenizerMode,
) -> Result<Sentence, PretokenizeError> {
    let tokens: Vec<String> = match mode {
        PretokenizerMode::WsTok => raw_text
            .split_whitespace()
            .map(str::to_string)
            .collect(),
        PretokenizerMode::RuleTok => raw_text
            .split_whitespace()
            .flat_map(split_chunk)
            .collect(),
        PretokenizerMode::External => raw_text
            .trim_end_matches('\n')
            .split(' ')
            .filter(|t| !t.is_empty())
            .map(str::to_string)
            .collect(),
    };
    if tokens.is_empty() {
        return Err(PretokenizeError::EmptyInput);
    }
    Ok(Sentence::new(tokens))
}

/// Lossy single-space join for human inspection; never used in the data path.
pub fn detokenize_preview(sentence: &Sentence) -> String {
    sentence.tokens.join(" ")
}

/// Applies the rule cascade to one whitespace-delimited chunk.
///
/// Cascade order: clitic patterns ('s, n't) take precedence at their anchor
/// character, then paired symbols split as single tokens, then clause
/// punctuation splits unless the number/abbreviation guard keeps a period
/// word-internal (digit.digit, single capital letter + period).
fn split_chunk(chunk: &str) -> Vec<String> {
    let chars: Vec<char> = chunk.chars().collect();
    let mut tokens: Vec<String> = Vec::new();
    let mut current = String::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        // clitic "n't": do | n't
        if c == 'n'
            && i + 2 < chars.len()
            && chars[i + 1] == '\''
            && chars[i + 2] == 't'
            && i > 0
            && chars[i - 1].is_alphabetic()
            && (i + 3 == chars.len() || !chars[i + 3].is_alphanumeric())
        {
            flush(&mut tokens, &mut current);
            tokens.push("n't".to_string());
            i += 3;
            continue;
        }
        // clitic "'s": John | 's
        if c == '\''
            && i + 1 < chars.len()
            && chars[i + 1] == 's'
            && i > 0
            && chars[i - 1].is_alphabetic()
            && (i + 2 == chars.len() || !chars[i + 2].is_alphanumeric())
        {
            flush(&mut tokens, &mut current);
            tokens.push("'s".to_string());
            i += 2;
            continue;
        }
        if PAIRED.contains(&c) {
            flush(&mut tokens, &mut current);
            tokens.push(c.to_string());
            i += 1;
            continue;
        }
        if PUNCT.contains(&c) {
            if c == '.' && keep_period(&chars, i) {
                current.push(c);
            } else {
                flush(&mut tokens, &mut current);
                tokens.push(c.to_string());
            }
            i += 1;
            continue;
        }
        current.push(c);
        i += 1;
    }
    flush(&mut tokens, &mut current);
    tokens
}

fn flush(tokens: &mut Vec<String>, current: &mut String) {
    if !current.is_empty() {
        tokens.push(std::mem::take(current));
    }
}

/// Number/abbreviation guard: keep a period word-internal when it sits
/// between two digits ("3.5") or follows a single capital letter ("A.",
/// each period of "U.S.").
fn keep_period(chars: &[char], i: usize) -> bool {
    let prev = i.checked_sub(1).map(|p| chars[p]);
    let next = chars.get(i + 1);
    if let (Some(p), Some(n)) = (prev, next) {
        if p.is_ascii_digit() && n.is_ascii_digit() {
            return true;
        }
    }
    if let Some(p) = prev {
        let before_prev = i.checked_sub(2).map(|p| chars[p]);
        if p.is_uppercase() && before_prev.map_or(true, |b| !b.is_alphabetic()) {
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rule(text: &str) -> Vec<String> {
        pretokenize(text, PretokenizerMode::RuleTok)
            .unwrap()
            .tokens
    }

    #[test]
    fn ws_tok_splits_on_whitespace() {
        let s = pretokenize("This is New York", PretokenizerMode::WsTok).unwrap();
        assert_eq!(s.tokens, vec!["This", "is", "New", "York"]);
    }

    #[test]
    fn ws_tok_collapses_runs() {
        let s = pretokenize("  a \t b\u{a0}c  ", PretokenizerMode::WsTok).unwrap();
        assert_eq!(s.tokens, vec!["a", "b", "c"]);
    }

    #[test]
    fn rule_tok_detaches_final_period() {
        // golden fixture, cross-checked against sacremoses MosesTokenizer('de')
        assert_eq!(rule("Das ist New York."), vec!["Das", "ist", "New", "York", "."]);
    }

    #[test]
    fn rule_tok_keeps_number_internal_period() {
        // golden fixture, cross-checked against sacremoses MosesTokenizer('en')
        assert_eq!(rule("3.5 km"), vec!["3.5", "km"]);
    }

    #[test]
    fn rule_tok_detaches_comma_and_question_mark() {
        assert_eq!(rule("Hello, world?"), vec!["Hello", ",", "world", "?"]);
    }

    #[test]
    fn rule_tok_paired_symbols() {
        assert_eq!(rule("(see [here])"), vec!["(", "see", "[", "here", "]", ")"]);
        assert_eq!(rule("\"quote\""), vec!["\"", "quote", "\""]);
    }

    #[test]
    fn rule_tok_clitics() {
        assert_eq!(rule("John's dog"), vec!["John", "'s", "dog"]);
        assert_eq!(rule("don't stop"), vec!["do", "n't", "stop"]);
    }

    #[test]
    fn rule_tok_single_capital_abbreviation() {
        assert_eq!(rule("J. Smith"), vec!["J.", "Smith"]);
        assert_eq!(rule("the U.S. flag"), vec!["the", "U.S.", "flag"]);
    }

    #[test]
    fn external_mode_is_identity_on_single_space_text() {
        let s = pretokenize("a b c", PretokenizerMode::External).unwrap();
        assert_eq!(s.tokens, vec!["a", "b", "c"]);
    }

    #[test]
    fn empty_input_is_an_error() {
        for mode in [
            PretokenizerMode::WsTok,
            PretokenizerMode::RuleTok,
            PretokenizerMode::External,
        ] {
            assert!(matches!(
                pretokenize("   ", mode),
                Err(PretokenizeError::EmptyInput)
            ));
        }
    }

    #[test]
    fn detokenize_preview_joins() {
        assert_eq!(detokenize_preview(&Sentence::from_iter(["a", "b"])), "a b");
        assert_eq!(detokenize_preview(&Sentence::from_iter(["x"])), "x");
        assert_eq!(
            detokenize_preview(&Sentence::from_iter(["Das", "ist", "."])),
            "Das ist ."
        );
    }

    fn strip_ws(s: &str) -> String {
        s.chars().filter(|c| !c.is_whitespace()).collect()
    }

    #[test]
    fn character_conservation() {
        for text in [
            "Das ist New York.",
            "3.5 km, wow! (really?) \"it's\" J. Smith's idea; don't",
            "a{b}c:d",
        ] {
            for mode in [PretokenizerMode::WsTok, PretokenizerMode::RuleTok] {
                let tokens = pretokenize(text, mode).unwrap().tokens;
                assert_eq!(tokens.concat(), strip_ws(text), "mode {mode:?} on {text:?}");
            }
        }
    }

    #[test]
    fn ws_tok_idempotent_on_rejoin() {
        let first = pretokenize("  foo   bar baz ", PretokenizerMode::WsTok).unwrap();
        let rejoined = first.tokens.join(" ");
        let second = pretokenize(&rejoined, PretokenizerMode::WsTok).unwrap();
        assert_eq!(first, second);
    }
}
