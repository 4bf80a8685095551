//! Exact enumeration of maximal half-isolated bicliques.
//!
//! A biclique (N', M') is half-isolated when at least one side keeps all of
//! its edges inside the pair: either every member source's neighborhood is
//! contained in M', or every member target's audience is contained in N'.
//! Maximality means no half-isolated biclique contains it on both sides.
//!
//! The fast path mines two suspiciousness trees. On the tree over target
//! baskets, groups with clean target sides collapse onto shared paths; on
//! the tree over the transposed graph, groups with clean source sides do.
//! Each maximal shared path yields one candidate, and a candidate survives
//! only if no node on its member basket's path in the opposite tree
//! represents a biclique properly containing it. Residual target sets of
//! distinct nodes are disjoint (every basket ends at exactly one node), so
//! two candidates from the same tree never contain one another and the
//! cross-tree check is the only one needed.

use std::collections::{BTreeSet, HashSet};

use serde::Serialize;

use crate::basket::{build_baskets_with, OrderingRule, Mode};
use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, SourceId, TargetId};
use crate::stree::{build_stree, NodeIdx, STree};

/// A complete bipartite subgraph in canonical form: both sides sorted
/// ascending by id. Ordered lexicographically, sources first.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Biclique {
    pub sources: Vec<SourceId>,
    pub targets: Vec<TargetId>,
}

impl Biclique {
    pub fn new(mut sources: Vec<SourceId>, mut targets: Vec<TargetId>) -> Self {
        sources.sort_unstable();
        sources.dedup();
        targets.sort_unstable();
        targets.dedup();
        Biclique { sources, targets }
    }
}

/// A set of bicliques with set equality and canonical iteration order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BicliqueSet(pub BTreeSet<Biclique>);

#[derive(Serialize)]
struct BicliqueLine<'a> {
    sources: Vec<&'a str>,
    targets: Vec<&'a str>,
}

impl BicliqueSet {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Biclique> {
        self.0.iter()
    }

    pub fn contains(&self, b: &Biclique) -> bool {
        self.0.contains(b)
    }

    /// One JSON object per line, bicliques in canonical order, labels in
    /// id order within each side.
    pub fn to_json_lines(&self, graph: &BipartiteGraph) -> String {
        let mut out = String::new();
        for b in &self.0 {
            let line = BicliqueLine {
                sources: b.sources.iter().map(|&n| graph.source_label(n)).collect(),
                targets: b.targets.iter().map(|&m| graph.target_label(m)).collect(),
            };
            out.push_str(&serde_json::to_string(&line).expect("plain strings serialize"));
            out.push('\n');
        }
        out
    }
}

/// The target set a node answers for: targets of baskets that stop at this
/// node. `None` when every basket continues into a child (nothing to emit).
fn node_residual(tree: &STree, idx: NodeIdx) -> Option<Vec<TargetId>> {
    let node = tree.node(idx);
    if node.children().is_empty() {
        return Some(node.tn().to_vec());
    }
    let mut covered: Vec<TargetId> = Vec::new();
    for &c in node.children() {
        covered.extend_from_slice(tree.node(c).tn());
    }
    covered.sort_unstable();
    let mut resid = Vec::new();
    let mut i = 0;
    for &m in node.tn() {
        while i < covered.len() && covered[i] < m {
            i += 1;
        }
        if i < covered.len() && covered[i] == m {
            i += 1;
        } else {
            resid.push(m);
        }
    }
    if resid.is_empty() {
        None
    } else {
        Some(resid)
    }
}

/// Walk the whole tree and emit one candidate per maximal shared path: the
/// path's sources paired with the targets of baskets ending at its tip.
/// Candidates are in the tree's own orientation.
pub fn find_mhi_candidates(tree: &STree) -> Vec<(Vec<SourceId>, Vec<TargetId>)> {
    let mut out = Vec::new();
    let mut path: Vec<SourceId> = Vec::new();
    // (node, entering) pairs; leaving pops the path.
    let mut stack: Vec<(NodeIdx, bool)> = tree.roots().iter().rev().map(|&r| (r, true)).collect();
    while let Some((idx, entering)) = stack.pop() {
        if !entering {
            path.pop();
            continue;
        }
        path.push(tree.node(idx).sn());
        stack.push((idx, false));
        if let Some(resid) = node_residual(tree, idx) {
            out.push((path.clone(), resid));
        }
        for &c in tree.node(idx).children().iter().rev() {
            stack.push((c, true));
        }
    }
    out
}

fn sorted_subset<T: Ord>(small: &[T], big: &[T]) -> bool {
    let mut i = 0;
    for x in small {
        while i < big.len() && big[i] < *x {
            i += 1;
        }
        if i < big.len() && big[i] == *x {
            i += 1;
        } else {
            return false;
        }
    }
    true
}

/// Is `cand` (original orientation, from the target-basket tree) properly
/// contained in a biclique represented somewhere in the transposed tree?
fn absorbed_by_transposed(cand: &Biclique, t1: &STree) -> bool {
    // Any member source works: a containing biclique includes it, so the
    // containing biclique's node lies on this basket's path.
    let n = cand.sources[0];
    let basket = &t1.baskets()[n.0 as usize];
    let path = t1
        .walk_basket(basket)
        .expect("member basket of a candidate maps a path in the transposed tree");
    let mut prefix: HashSet<u32> = HashSet::with_capacity(path.len());
    for (pos, &idx) in path.iter().enumerate() {
        prefix.insert(t1.node(idx).sn().0);
        let Some(resid) = node_residual(t1, idx) else {
            continue;
        };
        // Represented biclique: sources = resid (transposed targets),
        // targets = the path prefix (transposed sources).
        let sources_in = sorted_subset(
            &cand.sources.iter().map(|s| s.0).collect::<Vec<_>>(),
            &resid.iter().map(|t| t.0).collect::<Vec<_>>(),
        );
        if !sources_in {
            continue;
        }
        let targets_in = cand.targets.iter().all(|m| prefix.contains(&m.0));
        if !targets_in {
            continue;
        }
        let equal = cand.sources.len() == resid.len() && cand.targets.len() == pos + 1;
        if !equal {
            return true;
        }
    }
    false
}

/// Mirror image: is `cand` (original orientation, from the transposed tree)
/// properly contained in a biclique represented in the target-basket tree?
fn absorbed_by_original(cand: &Biclique, t: &STree) -> bool {
    let m = cand.targets[0];
    let basket = &t.baskets()[m.0 as usize];
    let path = t
        .walk_basket(basket)
        .expect("member basket of a candidate maps a path in the target tree");
    let mut prefix: HashSet<u32> = HashSet::with_capacity(path.len());
    for (pos, &idx) in path.iter().enumerate() {
        prefix.insert(t.node(idx).sn().0);
        let Some(resid) = node_residual(t, idx) else {
            continue;
        };
        let targets_in = sorted_subset(
            &cand.targets.iter().map(|t| t.0).collect::<Vec<_>>(),
            &resid.iter().map(|t| t.0).collect::<Vec<_>>(),
        );
        if !targets_in {
            continue;
        }
        let sources_in = cand.sources.iter().all(|n| prefix.contains(&n.0));
        if !sources_in {
            continue;
        }
        let equal = cand.targets.len() == resid.len() && cand.sources.len() == pos + 1;
        if !equal {
            return true;
        }
    }
    false
}

/// Combine candidates from both trees: drop any candidate properly
/// contained in a biclique the opposite tree represents; keep exact
/// duplicates once.
pub fn merge(
    cand_from_original: Vec<Biclique>,
    cand_from_transposed: Vec<Biclique>,
    t: &STree,
    t1: &STree,
) -> BicliqueSet {
    let mut out = BTreeSet::new();
    for cand in cand_from_original {
        if !absorbed_by_transposed(&cand, t1) {
            out.insert(cand);
        }
    }
    for cand in cand_from_transposed {
        if !absorbed_by_original(&cand, t) {
            out.insert(cand);
        }
    }
    BicliqueSet(out)
}

/// Exact maximal half-isolated biclique enumeration via two trees.
pub fn solve_mhibp(graph: &BipartiteGraph) -> Result<BicliqueSet> {
    solve_mhibp_with(graph, OrderingRule::GScoreDesc)
}

/// Same, under an explicit basket ordering. Any strict total order yields
/// the same set; the default g-order just maximizes prefix sharing.
pub fn solve_mhibp_with(graph: &BipartiteGraph, rule: OrderingRule) -> Result<BicliqueSet> {
    if graph.edge_count() == 0 {
        return Ok(BicliqueSet::default());
    }
    let (baskets, _) = build_baskets_with(graph, Mode::Arbg, 1.0, rule)?;
    let t = build_stree(baskets);
    let transposed = graph.transpose();
    let (baskets1, _) = build_baskets_with(&transposed, Mode::Arbg, 1.0, rule)?;
    let t1 = build_stree(baskets1);

    let cand_orig: Vec<Biclique> = find_mhi_candidates(&t)
        .into_iter()
        .map(|(sources, targets)| Biclique::new(sources, targets))
        .collect();
    // The transposed tree's sources are the graph's targets and vice versa.
    let cand_trans: Vec<Biclique> = find_mhi_candidates(&t1)
        .into_iter()
        .map(|(path, resid)| {
            Biclique::new(
                resid.into_iter().map(|t| SourceId(t.0)).collect(),
                path.into_iter().map(|s| TargetId(s.0)).collect(),
            )
        })
        .collect();
    Ok(merge(cand_orig, cand_trans, &t, &t1))
}

/// Exhaustive reference enumeration straight from the definition, refusing
/// anything larger than 14x14.
///
/// For a fixed target set M', a biclique with isolated sources needs every
/// member source to see all of M' (biclique) and nothing outside it
/// (isolation), i.e. its neighborhood equals M' exactly — so the unique
/// maximal source side is the equal-neighborhood class, and smaller source
/// sides are dominated by it. Enumerating every target subset therefore
/// yields every maximal source-isolated biclique; the symmetric loop over
/// source subsets yields every maximal target-isolated one. A final
/// pairwise pass drops candidates properly contained across the families.
pub fn brute_force_mhi(graph: &BipartiteGraph) -> Result<BicliqueSet> {
    let ns = graph.num_sources();
    let nt = graph.num_targets();
    if ns > 14 || nt > 14 {
        return Err(Error::TooLargeForExhaustive {
            sources: ns,
            targets: nt,
        });
    }
    let hmask: Vec<u32> = graph
        .sources()
        .map(|n| graph.targets_of(n).iter().fold(0u32, |acc, m| acc | 1 << m.0))
        .collect();
    let imask: Vec<u32> = graph
        .targets()
        .map(|m| graph.sources_of(m).iter().fold(0u32, |acc, n| acc | 1 << n.0))
        .collect();

    let mut raw: BTreeSet<(u32, u32)> = BTreeSet::new();
    for msub in 1u32..(1u32 << nt) {
        let mut nset = 0u32;
        for (n, &h) in hmask.iter().enumerate() {
            if h == msub {
                nset |= 1 << n;
            }
        }
        if nset != 0 {
            raw.insert((nset, msub));
        }
    }
    for nsub in 1u32..(1u32 << ns) {
        let mut mset = 0u32;
        for (m, &i) in imask.iter().enumerate() {
            if i == nsub {
                mset |= 1 << m;
            }
        }
        if mset != 0 {
            raw.insert((nsub, mset));
        }
    }

    let items: Vec<(u32, u32)> = raw.into_iter().collect();
    let mut out = BTreeSet::new();
    'outer: for &(n1, m1) in &items {
        for &(n2, m2) in &items {
            if (n1, m1) != (n2, m2) && n1 & n2 == n1 && m1 & m2 == m1 {
                continue 'outer;
            }
        }
        out.insert(Biclique::new(
            (0..ns as u32).filter(|b| n1 >> b & 1 == 1).map(SourceId).collect(),
            (0..nt as u32).filter(|b| m1 >> b & 1 == 1).map(TargetId).collect(),
        ));
    }
    Ok(BicliqueSet(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{ingest, GraphBuilder};
    use proptest::prelude::*;

    fn bc(g: &BipartiteGraph, sources: &[&str], targets: &[&str]) -> Biclique {
        Biclique::new(
            sources.iter().map(|s| g.source_id(s).unwrap()).collect(),
            targets.iter().map(|t| g.target_id(t).unwrap()).collect(),
        )
    }

    fn set_of(items: Vec<Biclique>) -> BicliqueSet {
        BicliqueSet(items.into_iter().collect())
    }

    #[test]
    fn star_is_a_single_maximal_biclique() {
        let g = ingest([("a", "1"), ("a", "2"), ("a", "3")]);
        let expected = set_of(vec![bc(&g, &["a"], &["1", "2", "3"])]);
        assert_eq!(brute_force_mhi(&g).unwrap(), expected);
        assert_eq!(solve_mhibp(&g).unwrap(), expected);
    }

    #[test]
    fn path_graph_yields_two_overlapping_answers() {
        let g = ingest([("a", "1"), ("b", "1"), ("b", "2")]);
        let expected = set_of(vec![
            bc(&g, &["a", "b"], &["1"]),
            bc(&g, &["b"], &["1", "2"]),
        ]);
        assert_eq!(brute_force_mhi(&g).unwrap(), expected);
        assert_eq!(solve_mhibp(&g).unwrap(), expected);
    }

    #[test]
    fn isolated_group_with_external_audience_edge() {
        // Complete {a,b} x {1,2} plus an outside source touching target 1:
        // the pair keeps a clean source side, and {a,b,z} x {1} keeps a
        // clean target side; the sub-pair {a,b} x {2} is absorbed.
        let g = ingest([("a", "1"), ("a", "2"), ("b", "1"), ("b", "2"), ("z", "1")]);
        let expected = set_of(vec![
            bc(&g, &["a", "b"], &["1", "2"]),
            bc(&g, &["a", "b", "z"], &["1"]),
        ]);
        assert_eq!(brute_force_mhi(&g).unwrap(), expected);
        assert_eq!(solve_mhibp(&g).unwrap(), expected);
    }

    #[test]
    fn disjoint_groups_are_both_found() {
        let mut edges = Vec::new();
        for s in ["a", "b", "c"] {
            for t in ["1", "2"] {
                edges.push((s, t));
            }
        }
        for s in ["x", "y"] {
            for t in ["8", "9"] {
                edges.push((s, t));
            }
        }
        let g = ingest(edges);
        let expected = set_of(vec![
            bc(&g, &["a", "b", "c"], &["1", "2"]),
            bc(&g, &["x", "y"], &["8", "9"]),
        ]);
        assert_eq!(brute_force_mhi(&g).unwrap(), expected);
        assert_eq!(solve_mhibp(&g).unwrap(), expected);
    }

    #[test]
    fn complete_group_collapses_to_one_answer_from_both_trees() {
        let mut edges = Vec::new();
        for s in ["d", "e", "f", "g", "h"] {
            for t in ["C", "D", "E"] {
                edges.push((s, t));
            }
        }
        let g = ingest(edges);
        let expected = set_of(vec![bc(&g, &["d", "e", "f", "g", "h"], &["C", "D", "E"])]);
        assert_eq!(solve_mhibp(&g).unwrap(), expected);
        assert_eq!(brute_force_mhi(&g).unwrap(), expected);
    }

    #[test]
    fn empty_graph_has_no_bicliques() {
        let g = ingest([]);
        assert!(brute_force_mhi(&g).unwrap().is_empty());
        assert!(solve_mhibp(&g).unwrap().is_empty());
    }

    #[test]
    fn oversized_graphs_are_refused_by_the_oracle() {
        let mut b = GraphBuilder::new();
        for i in 0..15 {
            b.add_edge(&format!("s{i}"), "t");
        }
        let g = b.build();
        assert!(matches!(
            brute_force_mhi(&g),
            Err(Error::TooLargeForExhaustive { sources: 15, targets: 1 })
        ));
    }

    #[test]
    fn fresh_audience_edges_do_not_disturb_the_target_side_candidate() {
        // The group keeps its clean target side when its sources wander off
        // to fresh targets, so the tree over target baskets still carries
        // the full group as one candidate.
        let base = vec![("a", "1"), ("a", "2"), ("b", "1"), ("b", "2")];
        let mut cammed = base.clone();
        cammed.push(("a", "x1"));
        cammed.push(("b", "x2"));
        for edges in [base, cammed] {
            let g = ingest(edges);
            let (baskets, _) =
                crate::basket::build_baskets(&g, Mode::Arbg, 1.0).unwrap();
            let t = build_stree(baskets);
            let cands: Vec<Biclique> = find_mhi_candidates(&t)
                .into_iter()
                .map(|(s, m)| Biclique::new(s, m))
                .collect();
            let want = bc(&g, &["a", "b"], &["1", "2"]);
            assert!(
                cands.contains(&want),
                "expected {want:?} among candidates {cands:?}"
            );
            assert_eq!(solve_mhibp(&g).unwrap(), brute_force_mhi(&g).unwrap());
        }
    }

    #[test]
    fn json_lines_are_canonical() {
        let g = ingest([("b", "2"), ("a", "1"), ("b", "1"), ("a", "2")]);
        let set = solve_mhibp(&g).unwrap();
        let text = set.to_json_lines(&g);
        assert_eq!(text, "{\"sources\":[\"b\",\"a\"],\"targets\":[\"2\",\"1\"]}\n");
    }

    /// Fully literal reference: test every (source subset, target subset)
    /// pair against the definition. Only viable for tiny graphs; used to
    /// pin down the faster oracle.
    fn literal_mhi(graph: &BipartiteGraph) -> BTreeSet<(u32, u32)> {
        let ns = graph.num_sources();
        let nt = graph.num_targets();
        let hmask: Vec<u32> = graph
            .sources()
            .map(|n| graph.targets_of(n).iter().fold(0u32, |a, m| a | 1 << m.0))
            .collect();
        let imask: Vec<u32> = graph
            .targets()
            .map(|m| graph.sources_of(m).iter().fold(0u32, |a, n| a | 1 << n.0))
            .collect();
        let mut hi = Vec::new();
        for nsub in 1u32..(1u32 << ns) {
            for msub in 1u32..(1u32 << nt) {
                let biclique = (0..ns)
                    .filter(|&n| nsub >> n & 1 == 1)
                    .all(|n| msub & hmask[n] == msub);
                if !biclique {
                    continue;
                }
                let src_iso = (0..ns)
                    .filter(|&n| nsub >> n & 1 == 1)
                    .all(|n| hmask[n] & !msub == 0);
                let tgt_iso = (0..nt)
                    .filter(|&m| msub >> m & 1 == 1)
                    .all(|m| imask[m] & !nsub == 0);
                if src_iso || tgt_iso {
                    hi.push((nsub, msub));
                }
            }
        }
        let mut out = BTreeSet::new();
        'outer: for &(n1, m1) in &hi {
            for &(n2, m2) in &hi {
                if (n1, m1) != (n2, m2) && n1 & n2 == n1 && m1 & m2 == m1 {
                    continue 'outer;
                }
            }
            out.insert((n1, m1));
        }
        out
    }

    fn to_masks(set: &BicliqueSet) -> BTreeSet<(u32, u32)> {
        set.iter()
            .map(|b| {
                (
                    b.sources.iter().fold(0u32, |a, n| a | 1 << n.0),
                    b.targets.iter().fold(0u32, |a, m| a | 1 << m.0),
                )
            })
            .collect()
    }

    fn graph_from_pairs(pairs: &[(u32, u32)]) -> BipartiteGraph {
        let labels: Vec<(String, String)> = pairs
            .iter()
            .map(|&(s, t)| (format!("s{s}"), format!("t{t}")))
            .collect();
        ingest(labels.iter().map(|(s, t)| (s.as_str(), t.as_str())))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn oracle_matches_the_literal_definition(
            edges in proptest::collection::vec((0u32..5, 0u32..5), 1..18),
        ) {
            let g = graph_from_pairs(&edges);
            prop_assert_eq!(to_masks(&brute_force_mhi(&g).unwrap()), literal_mhi(&g));
        }

        #[test]
        fn solver_matches_oracle_on_random_graphs(
            edges in proptest::collection::vec((0u32..7, 0u32..7), 1..30),
        ) {
            let g = graph_from_pairs(&edges);
            prop_assert_eq!(solve_mhibp(&g).unwrap(), brute_force_mhi(&g).unwrap());
        }

        #[test]
        fn solver_is_ordering_agnostic(
            edges in proptest::collection::vec((0u32..7, 0u32..7), 1..30),
        ) {
            let g = graph_from_pairs(&edges);
            prop_assert_eq!(
                solve_mhibp_with(&g, OrderingRule::NodeIdAsc).unwrap(),
                solve_mhibp_with(&g, OrderingRule::GScoreDesc).unwrap()
            );
        }
    }
}
