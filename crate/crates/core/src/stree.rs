//! Suspiciousness tree: a prefix tree over ordered baskets.
//!
//! Every basket contributes one root-to-node path. Walking a basket reuses
//! existing children where the next source matches and extends otherwise;
//! each visited node absorbs the basket's score into `sus` and the basket's
//! target into `tn`. Two facts follow directly from construction and carry
//! the rest of the crate:
//!
//!  * a node's `tn` is exactly the set of baskets whose paths pass through
//!    it, so ancestors dominate descendants in both `sus` and `tn`;
//!  * node count never exceeds total basket mass, and tree depth never
//!    exceeds the longest basket.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::basket::Basket;
use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, SourceId, TargetId};

pub type NodeIdx = usize;

#[derive(Debug, Clone)]
pub struct STreeNode {
    sn: SourceId,
    sus: f64,
    tn: Vec<TargetId>,
    children: Vec<NodeIdx>,
    parent: Option<NodeIdx>,
    depth: u32,
}

impl STreeNode {
    pub fn sn(&self) -> SourceId {
        self.sn
    }

    pub fn sus(&self) -> f64 {
        self.sus
    }

    /// Targets whose baskets pass through this node, sorted ascending.
    pub fn tn(&self) -> &[TargetId] {
        &self.tn
    }

    /// Children in insertion order.
    pub fn children(&self) -> &[NodeIdx] {
        &self.children
    }

    pub fn parent(&self) -> Option<NodeIdx> {
        self.parent
    }

    /// Distance from the root: root children are depth 1.
    pub fn depth(&self) -> usize {
        self.depth as usize
    }
}

/// Structural role of a node, decided by its children.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeClass {
    /// No children.
    Leaf,
    /// Two or more children.
    Branch,
    /// One child covering strictly fewer targets: some baskets stop here.
    Narrow,
    /// One child covering the same targets: every basket continues.
    PassThrough,
}

#[derive(Debug, Clone)]
pub struct STree {
    nodes: Vec<STreeNode>,
    roots: Vec<NodeIdx>,
    /// Tip node of each stored basket's path, aligned with `baskets`;
    /// `None` for empty baskets.
    terminals: Vec<Option<NodeIdx>>,
    /// Position of each target's basket within `baskets`.
    basket_pos: HashMap<TargetId, usize>,
    baskets: Vec<Basket>,
    mass: usize,
}

/// Insert every basket's ordered sources as a root path. Empty baskets
/// insert nothing. The tree takes ownership of the baskets; they index the
/// tree's paths later (see [`STree::walk_basket`]).
///
/// Loading happens in two passes. The first lays out the structure with the
/// baskets in lexicographic member order, so every shared prefix sits in a
/// single contiguous run and extending the previous path replaces a
/// per-step child lookup; nodes allocate in preorder, which also keeps each
/// path's unique tail contiguous in memory. The second pass sweeps the
/// baskets in stored order and folds each basket's score and target into
/// every node on its path, so accumulation order never depends on how the
/// structure was laid out.
pub fn build_stree(baskets: Vec<Basket>) -> STree {
    let mut order: Vec<usize> = (0..baskets.len()).collect();
    order.sort_unstable_by(|&a, &b| {
        baskets[a]
            .ordered_sources
            .cmp(&baskets[b].ordered_sources)
            .then(a.cmp(&b))
    });

    let mass: usize = baskets.iter().map(|b| b.ordered_sources.len()).sum();
    let mut nodes: Vec<STreeNode> = Vec::with_capacity(mass);
    let mut roots: Vec<NodeIdx> = Vec::new();
    let mut terminals: Vec<Option<NodeIdx>> = vec![None; baskets.len()];
    let mut stack: Vec<NodeIdx> = Vec::new();
    let mut prev: &[SourceId] = &[];
    for &bi in &order {
        let members = &baskets[bi].ordered_sources;
        let lcp = prev
            .iter()
            .zip(members.iter())
            .take_while(|(a, b)| a == b)
            .count();
        stack.truncate(lcp);
        for &sn in &members[lcp..] {
            let parent = stack.last().copied();
            let idx = nodes.len();
            nodes.push(STreeNode {
                sn,
                sus: 0.0,
                tn: Vec::new(),
                children: Vec::new(),
                parent,
                depth: stack.len() as u32 + 1,
            });
            match parent {
                Some(p) => nodes[p].children.push(idx),
                None => roots.push(idx),
            }
            stack.push(idx);
        }
        terminals[bi] = stack.last().copied();
        prev = members;
    }

    for (bi, basket) in baskets.iter().enumerate() {
        let mut cur = terminals[bi];
        while let Some(idx) = cur {
            let node = &mut nodes[idx];
            node.sus += basket.f;
            node.tn.push(basket.m);
            cur = node.parent;
        }
    }
    for node in &mut nodes {
        node.tn.sort_unstable();
    }

    let basket_pos = baskets.iter().enumerate().map(|(i, b)| (b.m, i)).collect();
    STree {
        nodes,
        roots,
        terminals,
        basket_pos,
        baskets,
        mass,
    }
}

impl STree {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, idx: NodeIdx) -> &STreeNode {
        &self.nodes[idx]
    }

    /// Depth-1 nodes in insertion order.
    pub fn roots(&self) -> &[NodeIdx] {
        &self.roots
    }

    pub fn baskets(&self) -> &[Basket] {
        &self.baskets
    }

    /// Total basket mass (= edge count of the originating graph).
    pub fn mass(&self) -> usize {
        self.mass
    }

    pub fn max_depth(&self) -> usize {
        self.nodes.iter().map(|n| n.depth as usize).max().unwrap_or(0)
    }

    pub fn classify(&self, idx: NodeIdx) -> NodeClass {
        let node = &self.nodes[idx];
        match node.children.len() {
            0 => NodeClass::Leaf,
            1 => {
                // Construction guarantees child tn is a subset of ours, so a
                // length gap is exactly a strict-superset gap.
                let child = &self.nodes[node.children[0]];
                if node.tn.len() > child.tn.len() {
                    NodeClass::Narrow
                } else {
                    NodeClass::PassThrough
                }
            }
            _ => NodeClass::Branch,
        }
    }

    /// Nodes from the root down to and including `idx`, root excluded.
    pub fn path_of(&self, idx: NodeIdx) -> Vec<NodeIdx> {
        let mut path = vec![idx];
        let mut cur = idx;
        while let Some(p) = self.nodes[cur].parent {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }

    /// All nodes strictly below `idx`, in preorder.
    pub fn descendants(&self, idx: NodeIdx) -> Vec<NodeIdx> {
        let mut out = Vec::new();
        let mut stack: Vec<NodeIdx> = self.nodes[idx].children.iter().rev().copied().collect();
        while let Some(x) = stack.pop() {
            out.push(x);
            stack.extend(self.nodes[x].children.iter().rev());
        }
        out
    }

    /// Every node in preorder: roots in insertion order, children likewise.
    pub fn preorder(&self) -> Vec<NodeIdx> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack: Vec<NodeIdx> = self.roots.iter().rev().copied().collect();
        while let Some(x) = stack.pop() {
            out.push(x);
            stack.extend(self.nodes[x].children.iter().rev());
        }
        out
    }

    /// The path a basket's insertion carved, one node per source. Returns
    /// `None` for an empty basket or a basket this tree was not built from.
    pub fn walk_basket(&self, basket: &Basket) -> Option<Vec<NodeIdx>> {
        let &pos = self.basket_pos.get(&basket.m)?;
        if self.baskets[pos].ordered_sources != basket.ordered_sources {
            return None;
        }
        Some(self.path_of(self.terminals[pos]?))
    }

    /// Deterministic textual form: one preorder line per node carrying
    /// depth, source label, score, and target coverage.
    pub fn dump(&self, graph: &BipartiteGraph) -> String {
        let mut out = String::new();
        for idx in self.preorder() {
            let node = &self.nodes[idx];
            let _ = writeln!(
                out,
                "{}\t{}\t{:.6}\t{}",
                node.depth,
                graph.source_label(node.sn),
                node.sus,
                node.tn.len()
            );
        }
        out
    }

    /// Check the construction invariants: ancestor dominance in `sus` and
    /// `tn`, score consistency against basket scores, and the structural
    /// bounds on node count and depth.
    pub fn validate(&self) -> Result<()> {
        if self.node_count() > self.mass {
            return Err(Error::Invariant(format!(
                "node count {} exceeds basket mass {}",
                self.node_count(),
                self.mass
            )));
        }
        let max_basket = self
            .baskets
            .iter()
            .map(|b| b.ordered_sources.len())
            .max()
            .unwrap_or(0);
        if self.max_depth() > max_basket {
            return Err(Error::Invariant(format!(
                "depth {} exceeds longest basket {}",
                self.max_depth(),
                max_basket
            )));
        }
        let mut f_of: HashMap<TargetId, f64> = HashMap::new();
        for b in &self.baskets {
            f_of.insert(b.m, b.f);
        }
        for (idx, node) in self.nodes.iter().enumerate() {
            let expected: f64 = node
                .tn
                .iter()
                .map(|m| f_of.get(m).copied().unwrap_or(f64::NAN))
                .sum();
            let tol = 1e-9 * expected.abs().max(1.0);
            if !(node.sus - expected).abs().le(&tol) {
                return Err(Error::Invariant(format!(
                    "node {idx}: sus {} differs from basket-score sum {expected}",
                    node.sus
                )));
            }
            for &c in &node.children {
                let child = &self.nodes[c];
                if child.sus > node.sus + 1e-9 * node.sus.abs().max(1.0) {
                    return Err(Error::Invariant(format!(
                        "child {c} sus {} exceeds parent {idx} sus {}",
                        child.sus, node.sus
                    )));
                }
                let mut it = node.tn.iter();
                let covered = child.tn.iter().all(|m| it.any(|x| x == m));
                if !covered {
                    return Err(Error::Invariant(format!(
                        "child {c} tn is not contained in parent {idx} tn"
                    )));
                }
                if self.nodes[c].parent != Some(idx) {
                    return Err(Error::Invariant(format!(
                        "child {c} does not point back to parent {idx}"
                    )));
                }
            }
        }
        Ok(())
    }
}
