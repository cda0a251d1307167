use crate::text;

/// Lowercased alphanumeric runs; punctuation and whitespace are dropped.
pub fn tokenize(text: &str) -> Vec<String> {
    text::words(text).map(str::to_lowercase).collect()
}
