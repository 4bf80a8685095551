//! Dense-group detection on a single tree.
//!
//! Synchronized groups pile their baskets onto shared paths, so their nodes
//! sit deep and carry large scores, while organic baskets stop sharing a
//! few hops below the root. The detector draws a boundary — a depth and a
//! score floor — keeps every boundary node that clears the floor together
//! with its path and subtree, and credits each source with the scores of
//! its kept nodes.

use std::collections::BTreeSet;
use std::io::BufRead;

use crate::basket::{basket_mass, build_baskets, Mode};
use crate::error::{Error, Result};
use crate::graph::BipartiteGraph;
use crate::stree::{build_stree, NodeIdx, STree};

/// Fully resolved selection boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryParams {
    /// Score floor for boundary nodes.
    pub thickness: f64,
    /// Level (1-based) at which the boundary is drawn.
    pub depth: usize,
}

/// Optional boundary overrides; anything left unset falls back to the
/// tree-derived default.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BoundaryOverrides {
    pub thickness: Option<f64>,
    pub depth: Option<usize>,
}

/// Default score floor: the mean node score.
pub fn default_thickness(tree: &STree) -> Result<f64> {
    if tree.node_count() == 0 {
        return Err(Error::EmptyTree);
    }
    let total: f64 = (0..tree.node_count()).map(|i| tree.node(i).sus()).sum();
    Ok(total / tree.node_count() as f64)
}

/// Default boundary level: average path sharing per basket, i.e. how many
/// nodes a typical basket saves by reusing prefixes. Never below 1.
pub fn default_depth(tree: &STree) -> Result<usize> {
    if tree.baskets().is_empty() {
        return Err(Error::NoBaskets);
    }
    let saved = tree.mass() - tree.node_count();
    Ok((saved / tree.baskets().len()).max(1))
}

pub fn resolve_params(tree: &STree, overrides: BoundaryOverrides) -> Result<BoundaryParams> {
    Ok(BoundaryParams {
        thickness: match overrides.thickness {
            Some(t) => t,
            None => default_thickness(tree)?,
        },
        depth: match overrides.depth {
            Some(d) => d,
            None => default_depth(tree)?,
        },
    })
}

/// The set of selected (suspicious) tree nodes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SuspiciousSet {
    nodes: BTreeSet<NodeIdx>,
}

impl SuspiciousSet {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, idx: NodeIdx) -> bool {
        self.nodes.contains(&idx)
    }

    pub fn iter(&self) -> impl Iterator<Item = NodeIdx> + '_ {
        self.nodes.iter().copied()
    }

    pub fn is_superset(&self, other: &SuspiciousSet) -> bool {
        self.nodes.is_superset(&other.nodes)
    }
}

/// Every node at exactly the boundary depth whose score clears the floor
/// is taken, along with its full path and all of its descendants.
pub fn select_suspicious(tree: &STree, params: &BoundaryParams) -> SuspiciousSet {
    let mut nodes = BTreeSet::new();
    for idx in 0..tree.node_count() {
        let node = tree.node(idx);
        if node.depth() == params.depth && node.sus() >= params.thickness {
            nodes.extend(tree.path_of(idx));
            nodes.extend(tree.descendants(idx));
        }
    }
    SuspiciousSet { nodes }
}

/// Ranking of source labels by score, descending; ties ascending by label.
#[derive(Debug, Clone, PartialEq)]
pub struct SuspiciousnessRanking {
    entries: Vec<(String, f64)>,
}

impl SuspiciousnessRanking {
    pub fn from_entries(mut entries: Vec<(String, f64)>) -> Self {
        entries.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        SuspiciousnessRanking { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(String, f64)] {
        &self.entries
    }

    pub fn score_of(&self, label: &str) -> Option<f64> {
        self.entries
            .iter()
            .find(|(l, _)| l == label)
            .map(|&(_, s)| s)
    }

    /// One `label<TAB>score` line per source, best first.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (label, score) in &self.entries {
            out.push_str(label);
            out.push('\t');
            out.push_str(&score.to_string());
            out.push('\n');
        }
        out
    }

    pub fn from_tsv<R: BufRead>(reader: R) -> Result<Self> {
        let mut entries = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split('\t');
            let (Some(label), Some(score), None) =
                (fields.next(), fields.next(), fields.next())
            else {
                return Err(Error::Malformed {
                    line: i + 1,
                    what: "expected label<TAB>score".into(),
                });
            };
            let score: f64 = score.parse().map_err(|_| Error::Malformed {
                line: i + 1,
                what: format!("bad score {score:?}"),
            })?;
            entries.push((label.to_string(), score));
        }
        Ok(SuspiciousnessRanking::from_entries(entries))
    }
}

/// Credit every source with the summed scores of its selected nodes.
/// Sources with no selected node score zero; every source of the graph
/// appears in the ranking.
pub fn s_scores(
    tree: &STree,
    selected: &SuspiciousSet,
    graph: &BipartiteGraph,
) -> SuspiciousnessRanking {
    let mut scores = vec![0.0f64; graph.num_sources()];
    for idx in selected.iter() {
        let node = tree.node(idx);
        scores[node.sn().0 as usize] += node.sus();
    }
    SuspiciousnessRanking::from_entries(
        graph
            .sources()
            .map(|n| (graph.source_label(n).to_string(), scores[n.0 as usize]))
            .collect(),
    )
}

/// The full pipeline: baskets, tree, boundary, selection, ranking.
pub fn detect(
    graph: &BipartiteGraph,
    mode: Mode,
    c: f64,
    overrides: BoundaryOverrides,
) -> Result<SuspiciousnessRanking> {
    let (baskets, _) = build_baskets(graph, mode, c)?;
    basket_mass(&baskets, graph)?;
    let tree = build_stree(baskets);
    let params = resolve_params(&tree, overrides)?;
    let selected = select_suspicious(&tree, &params);
    Ok(s_scores(&tree, &selected, graph))
}
