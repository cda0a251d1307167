use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{generate_plot_tree, next_platform, render_fragment, Context, NameMap, RootChoice, StoryError};
use crate::corpus::PlotGraph;
use crate::embedding::Embedder;

pub const DEFAULT_STORY_LENGTH: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Beat {
    pub fragment_id: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Story {
    pub beats: Vec<Beat>,
}

impl Story {
    pub fn fragment_ids(&self) -> Vec<&str> {
        self.beats.iter().map(|b| b.fragment_id.as_str()).collect()
    }

    /// Numbered beats, one per line.
    pub fn to_text(&self) -> String {
        self.beats
            .iter()
            .enumerate()
            .map(|(i, b)| format!("{}. {}\n", i + 1, b.text))
            .collect()
    }
}

/// Random root, then repeatedly the best-matching child of the current
/// platform, until a leaf or `length_limit` beats.
pub fn generate_story<E: Embedder + ?Sized, R: Rng + ?Sized>(
    graph: &PlotGraph,
    embedder: &E,
    names: &NameMap,
    length_limit: usize,
    rng: &mut R,
) -> Result<Story, StoryError> {
    let tree = generate_plot_tree(graph, &RootChoice::Random, length_limit, rng)?;
    let mut node = &tree;
    let mut beats = Vec::with_capacity(length_limit);
    loop {
        let fragment = graph.fragment(&node.fragment_id).expect("tree nodes come from the graph");
        beats.push(Beat {
            fragment_id: node.fragment_id.clone(),
            text: render_fragment(fragment, &node.accumulated_subs, names).text,
        });
        if beats.len() >= length_limit {
            break;
        }
        match next_platform(embedder, node, Context::Fragment(&node.fragment_id))? {
            Some((_, child)) => node = child,
            None => break,
        }
    }
    Ok(Story { beats })
}
