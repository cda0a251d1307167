//! Word-boundary scanning shared by symbol extraction, tokenization and rendering.

/// A maximal run of either alphanumeric or non-alphanumeric characters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Segment<'a> {
    Word(&'a str),
    Gap(&'a str),
}

impl<'a> Segment<'a> {
    pub fn as_str(&self) -> &'a str {
        match self {
            Segment::Word(s) | Segment::Gap(s) => s,
        }
    }
}

/// Splits `text` into alternating word / gap segments. Concatenating the
/// segments reproduces `text` exactly.
pub fn segments(text: &str) -> Segments<'_> {
    Segments { rest: text }
}

pub struct Segments<'a> {
    rest: &'a str,
}

impl<'a> Iterator for Segments<'a> {
    type Item = Segment<'a>;

    fn next(&mut self) -> Option<Self::Item> {
        let first = self.rest.chars().next()?;
        let is_word = first.is_alphanumeric();
        let end = self
            .rest
            .char_indices()
            .find(|(_, c)| c.is_alphanumeric() != is_word)
            .map(|(i, _)| i)
            .unwrap_or(self.rest.len());
        let (head, tail) = self.rest.split_at(end);
        self.rest = tail;
        Some(if is_word {
            Segment::Word(head)
        } else {
            Segment::Gap(head)
        })
    }
}

/// Iterates the standalone word tokens of `text`, case preserved.
pub fn words(text: &str) -> impl Iterator<Item = &str> {
    segments(text).filter_map(|s| match s {
        Segment::Word(w) => Some(w),
        Segment::Gap(_) => None,
    })
}
