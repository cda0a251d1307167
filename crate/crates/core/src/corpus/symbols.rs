use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::text;

/// The set of tokens treated as character symbols in plot fragments.
///
/// A token is a symbol if it is listed explicitly, or if it is an all
/// uppercase ASCII code whose length falls inside `code_lengths`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolAlphabet {
    pub explicit: BTreeSet<String>,
    /// Inclusive length range for generic uppercase codes; `None` disables them.
    pub code_lengths: Option<(usize, usize)>,
}

impl Default for SymbolAlphabet {
    fn default() -> Self {
        Self {
            explicit: ["A", "B", "AUX"].iter().map(|s| s.to_string()).collect(),
            code_lengths: Some((2, 3)),
        }
    }
}

impl SymbolAlphabet {
    pub fn explicit_only<I, S>(symbols: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            explicit: symbols.into_iter().map(Into::into).collect(),
            code_lengths: None,
        }
    }

    pub fn is_symbol(&self, token: &str) -> bool {
        if self.explicit.contains(token) {
            return true;
        }
        match self.code_lengths {
            Some((lo, hi)) => {
                let len = token.len();
                len >= lo && len <= hi && token.bytes().all(|b| b.is_ascii_uppercase())
            }
            None => false,
        }
    }

    /// Symbols occurring as standalone tokens in `text`.
    pub fn extract(&self, text: &str) -> BTreeSet<String> {
        text::words(text)
            .filter(|w| self.is_symbol(w))
            .map(str::to_string)
            .collect()
    }
}
