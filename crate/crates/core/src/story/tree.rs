use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{StoryError, SubstitutionMap};
use crate::corpus::PlotGraph;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum RootChoice {
    /// Uniform draw over fragments that have at least one successor.
    Random,
    Id(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlotTreeNode {
    pub fragment_id: String,
    pub depth: usize,
    /// Maps this fragment's symbols into the root's frame.
    pub accumulated_subs: SubstitutionMap,
    pub children: Vec<PlotTreeNode>,
}

impl PlotTreeNode {
    /// Follows child indices from this node.
    pub fn descend(&self, path: &[usize]) -> Option<&PlotTreeNode> {
        path.iter().try_fold(self, |node, &i| node.children.get(i))
    }

    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(PlotTreeNode::node_count).sum::<usize>()
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

/// Expands every successor breadth-complete to `max_depth` levels (a depth
/// of 1 yields the root alone). A fragment already on the root-to-node path
/// is not expanded again.
pub fn generate_plot_tree<R: Rng + ?Sized>(
    graph: &PlotGraph,
    root: &RootChoice,
    max_depth: usize,
    rng: &mut R,
) -> Result<PlotTreeNode, StoryError> {
    if max_depth == 0 {
        return Err(StoryError::InvalidDepth);
    }
    let root_id = match root {
        RootChoice::Id(id) => {
            if graph.fragment(id).is_none() {
                return Err(StoryError::UnknownRoot(id.clone()));
            }
            id.clone()
        }
        RootChoice::Random => {
            let candidates = graph.non_terminal_ids();
            if candidates.is_empty() {
                return Err(StoryError::NoNonTerminalFragment);
            }
            candidates[rng.random_range(0..candidates.len())].to_string()
        }
    };

    let mut path = vec![root_id.as_str()];
    Ok(expand(graph, &root_id, 0, SubstitutionMap::identity(), max_depth, &mut path))
}

fn expand<'g>(
    graph: &'g PlotGraph,
    id: &'g str,
    depth: usize,
    subs: SubstitutionMap,
    max_depth: usize,
    path: &mut Vec<&'g str>,
) -> PlotTreeNode {
    let mut children = Vec::new();
    if depth + 1 < max_depth {
        for edge in graph.successors(id) {
            if path.contains(&edge.to.as_str()) {
                continue;
            }
            let child_subs = SubstitutionMap::compose(&SubstitutionMap::from_edge(&edge.substitutions), &subs);
            path.push(edge.to.as_str());
            children.push(expand(graph, &edge.to, depth + 1, child_subs, max_depth, path));
            path.pop();
        }
    }
    PlotTreeNode {
        fragment_id: id.to_string(),
        depth,
        accumulated_subs: subs,
        children,
    }
}
