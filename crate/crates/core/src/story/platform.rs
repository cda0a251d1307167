use std::borrow::Cow;

use super::{PlotTreeNode, StoryError};
use crate::embedding::{cosine_distance, fragment_doc_id, Embedder};

/// What the next platform or tilt should be close to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Context<'a> {
    /// A fragment already in the model; its trained vector is used as-is.
    Fragment(&'a str),
    /// Free text from the actors; a vector is inferred for it.
    Prompt(&'a str),
}

pub fn context_vector<'e, E: Embedder + ?Sized>(
    embedder: &'e E,
    context: Context<'_>,
) -> Result<Cow<'e, [f32]>, StoryError> {
    match context {
        Context::Fragment(id) => {
            let doc = fragment_doc_id(id);
            embedder
                .doc_vector(&doc)
                .map(Cow::Borrowed)
                .ok_or(StoryError::MissingVector(doc))
        }
        Context::Prompt(text) => {
            if text.trim().is_empty() {
                return Err(StoryError::EmptyContext);
            }
            Ok(Cow::Owned(embedder.infer_text(text)?.vector))
        }
    }
}

/// Chooses the child whose fragment vector is closest to the context, ties
/// broken by fragment id. `None` when `node` is a leaf.
pub fn next_platform<'t, E: Embedder + ?Sized>(
    embedder: &E,
    node: &'t PlotTreeNode,
    context: Context<'_>,
) -> Result<Option<(usize, &'t PlotTreeNode)>, StoryError> {
    if let Context::Prompt(p) = context {
        if p.trim().is_empty() {
            return Err(StoryError::EmptyContext);
        }
    }
    match node.children.len() {
        0 => return Ok(None),
        1 => return Ok(Some((0, &node.children[0]))),
        _ => {}
    }
    let query = context_vector(embedder, context)?;
    let mut best: Option<(f64, usize)> = None;
    for (i, child) in node.children.iter().enumerate() {
        let doc = fragment_doc_id(&child.fragment_id);
        let v = embedder.doc_vector(&doc).ok_or(StoryError::MissingVector(doc))?;
        let d = cosine_distance(&query, v);
        let better = match best {
            None => true,
            Some((bd, bi)) => d
                .total_cmp(&bd)
                .then_with(|| child.fragment_id.cmp(&node.children[bi].fragment_id))
                .is_lt(),
        };
        if better {
            best = Some((d, i));
        }
    }
    let (_, i) = best.expect("at least two children");
    Ok(Some((i, &node.children[i])))
}
