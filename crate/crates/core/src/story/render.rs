use serde::{Deserialize, Serialize};

use super::{NameMap, SubstitutionMap};
use crate::corpus::PlotFragment;
use crate::text::{segments, Segment};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rendered {
    pub text: String,
    /// Symbols left as-is because the name map had no entry for them.
    pub unnamed: Vec<String>,
}

/// Substitutes the fragment's symbols, then maps them to display names.
/// Only whole tokens change; pronouns are left alone.
pub fn render_fragment(fragment: &PlotFragment, subs: &SubstitutionMap, names: &NameMap) -> Rendered {
    let mut text = String::with_capacity(fragment.text.len() + 16);
    let mut unnamed: Vec<String> = Vec::new();
    for seg in segments(&fragment.text) {
        match seg {
            Segment::Word(w) if fragment.symbols.contains(w) => {
                let symbol = subs.apply(w);
                match names.get(symbol) {
                    Some(name) => text.push_str(name),
                    None => {
                        if !unnamed.iter().any(|u| u == symbol) {
                            unnamed.push(symbol.to_string());
                        }
                        text.push_str(symbol);
                    }
                }
            }
            other => text.push_str(other.as_str()),
        }
    }
    Rendered { text, unnamed }
}
