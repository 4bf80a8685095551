//! Bipartite graph over interned node labels.
//!
//! Node ids are dense indices assigned in first-appearance order, one id
//! space per side. The two sides are distinct types so source and target
//! ids cannot be mixed up; `transpose` swaps the roles wholesale.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// Index of a node on the source side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SourceId(pub u32);

/// Index of a node on the target side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TargetId(pub u32);

/// Immutable bipartite graph. Adjacency is stored in both directions,
/// sorted by id; edges are deduplicated at build time.
#[derive(Debug, Clone)]
pub struct BipartiteGraph {
    source_labels: Vec<String>,
    target_labels: Vec<String>,
    source_index: HashMap<String, SourceId>,
    target_index: HashMap<String, TargetId>,
    /// Per source: sorted target neighbors H(n).
    adj_source: Vec<Vec<TargetId>>,
    /// Per target: sorted source neighbors I(m).
    adj_target: Vec<Vec<SourceId>>,
    edge_count: usize,
}

impl BipartiteGraph {
    pub fn num_sources(&self) -> usize {
        self.source_labels.len()
    }

    pub fn num_targets(&self) -> usize {
        self.target_labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn source_label(&self, n: SourceId) -> &str {
        &self.source_labels[n.0 as usize]
    }

    pub fn target_label(&self, m: TargetId) -> &str {
        &self.target_labels[m.0 as usize]
    }

    pub fn source_id(&self, label: &str) -> Option<SourceId> {
        self.source_index.get(label).copied()
    }

    pub fn target_id(&self, label: &str) -> Option<TargetId> {
        self.target_index.get(label).copied()
    }

    /// Target neighbors H(n) of a source, sorted by id.
    pub fn targets_of(&self, n: SourceId) -> &[TargetId] {
        &self.adj_source[n.0 as usize]
    }

    /// Source neighbors I(m) of a target, sorted by id.
    pub fn sources_of(&self, m: TargetId) -> &[SourceId] {
        &self.adj_target[m.0 as usize]
    }

    pub fn source_degree(&self, n: SourceId) -> usize {
        self.adj_source[n.0 as usize].len()
    }

    pub fn target_degree(&self, m: TargetId) -> usize {
        self.adj_target[m.0 as usize].len()
    }

    pub fn has_edge(&self, n: SourceId, m: TargetId) -> bool {
        self.adj_source[n.0 as usize].binary_search(&m).is_ok()
    }

    pub fn sources(&self) -> impl Iterator<Item = SourceId> + '_ {
        (0..self.source_labels.len() as u32).map(SourceId)
    }

    pub fn targets(&self) -> impl Iterator<Item = TargetId> + '_ {
        (0..self.target_labels.len() as u32).map(TargetId)
    }

    /// All edges in (source, target) lexicographic order.
    pub fn edges(&self) -> Vec<(SourceId, TargetId)> {
        let mut out = Vec::with_capacity(self.edge_count);
        for n in self.sources() {
            for &m in self.targets_of(n) {
                out.push((n, m));
            }
        }
        out
    }

    /// Swap the two sides. Ids are preserved numerically: source i of the
    /// result is target i of the input. Applying twice restores the graph.
    pub fn transpose(&self) -> BipartiteGraph {
        BipartiteGraph {
            source_labels: self.target_labels.clone(),
            target_labels: self.source_labels.clone(),
            source_index: self
                .target_index
                .iter()
                .map(|(k, v)| (k.clone(), SourceId(v.0)))
                .collect(),
            target_index: self
                .source_index
                .iter()
                .map(|(k, v)| (k.clone(), TargetId(v.0)))
                .collect(),
            adj_source: self
                .adj_target
                .iter()
                .map(|v| v.iter().map(|s| TargetId(s.0)).collect())
                .collect(),
            adj_target: self
                .adj_source
                .iter()
                .map(|v| v.iter().map(|t| SourceId(t.0)).collect())
                .collect(),
            edge_count: self.edge_count,
        }
    }

    /// Serialize as a tab-separated edge list, one `source<TAB>target` line
    /// per edge, in (source, target) id order.
    pub fn write_edge_list<W: Write>(&self, w: &mut W) -> Result<()> {
        for (n, m) in self.edges() {
            writeln!(w, "{}\t{}", self.source_label(n), self.target_label(m))?;
        }
        Ok(())
    }
}

/// Incremental graph construction: intern nodes, collect edges, then build.
/// Nodes may be interned without edges; duplicate edges collapse.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    source_labels: Vec<String>,
    target_labels: Vec<String>,
    source_index: HashMap<String, SourceId>,
    target_index: HashMap<String, TargetId>,
    edges: Vec<(u32, u32)>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Start from an existing graph's nodes and edges, keeping its numeric
    /// ids, so the result extends it.
    pub fn from_graph(g: &BipartiteGraph) -> Self {
        let mut b = GraphBuilder::new();
        for label in &g.source_labels {
            b.intern_source(label);
        }
        for label in &g.target_labels {
            b.intern_target(label);
        }
        for (n, m) in g.edges() {
            b.add_edge_ids(n, m);
        }
        b
    }

    pub fn has_source(&self, label: &str) -> bool {
        self.source_index.contains_key(label)
    }

    pub fn has_target(&self, label: &str) -> bool {
        self.target_index.contains_key(label)
    }

    pub fn intern_source(&mut self, label: &str) -> SourceId {
        if let Some(&id) = self.source_index.get(label) {
            return id;
        }
        let id = SourceId(self.source_labels.len() as u32);
        self.source_labels.push(label.to_string());
        self.source_index.insert(label.to_string(), id);
        id
    }

    pub fn intern_target(&mut self, label: &str) -> TargetId {
        if let Some(&id) = self.target_index.get(label) {
            return id;
        }
        let id = TargetId(self.target_labels.len() as u32);
        self.target_labels.push(label.to_string());
        self.target_index.insert(label.to_string(), id);
        id
    }

    pub fn add_edge(&mut self, source: &str, target: &str) {
        let n = self.intern_source(source);
        let m = self.intern_target(target);
        self.add_edge_ids(n, m);
    }

    pub fn add_edge_ids(&mut self, n: SourceId, m: TargetId) {
        debug_assert!((n.0 as usize) < self.source_labels.len());
        debug_assert!((m.0 as usize) < self.target_labels.len());
        self.edges.push((n.0, m.0));
    }

    pub fn build(mut self) -> BipartiteGraph {
        self.edges.sort_unstable();
        self.edges.dedup();
        let mut adj_source = vec![Vec::new(); self.source_labels.len()];
        let mut adj_target = vec![Vec::new(); self.target_labels.len()];
        for &(n, m) in &self.edges {
            adj_source[n as usize].push(TargetId(m));
            adj_target[m as usize].push(SourceId(n));
        }
        // Edge order is (source, target) lexicographic, so per-source lists
        // are already sorted; per-target lists are too, since sources arrive
        // in increasing order.
        BipartiteGraph {
            source_labels: self.source_labels,
            target_labels: self.target_labels,
            source_index: self.source_index,
            target_index: self.target_index,
            adj_source,
            adj_target,
            edge_count: self.edges.len(),
        }
    }
}

/// Build a graph from (source, target) label pairs.
pub fn ingest<'a, I>(records: I) -> BipartiteGraph
where
    I: IntoIterator<Item = (&'a str, &'a str)>,
{
    let mut b = GraphBuilder::new();
    for (s, t) in records {
        b.add_edge(s, t);
    }
    b.build()
}

/// Parse a tab-separated edge list: one `source<TAB>target` record per line.
/// Blank lines and lines starting with `#` are skipped. Malformed records
/// are reported with their 1-based line number.
pub fn read_edge_list<R: BufRead>(reader: R) -> Result<BipartiteGraph> {
    let mut b = GraphBuilder::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 2 {
            return Err(Error::MalformedEdgeRecord {
                line: lineno,
                found: fields.len(),
            });
        }
        if fields[0].is_empty() {
            return Err(Error::EmptyLabel {
                line: lineno,
                side: "source",
            });
        }
        if fields[1].is_empty() {
            return Err(Error::EmptyLabel {
                line: lineno,
                side: "target",
            });
        }
        b.add_edge(fields[0], fields[1]);
    }
    Ok(b.build())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_edges_collapse() {
        let g = ingest([("a", "1"), ("a", "1"), ("a", "2")]);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.source_degree(SourceId(0)), 2);
    }

    #[test]
    fn empty_input_builds_empty_graph() {
        let g = ingest([]);
        assert_eq!(g.edge_count(), 0);
        assert_eq!(g.num_sources(), 0);
        assert_eq!(g.num_targets(), 0);
    }

    #[test]
    fn interning_is_first_appearance_order() {
        let g = ingest([("b", "2"), ("a", "1"), ("b", "1")]);
        assert_eq!(g.source_label(SourceId(0)), "b");
        assert_eq!(g.source_label(SourceId(1)), "a");
        assert_eq!(g.target_label(TargetId(0)), "2");
        assert_eq!(g.target_label(TargetId(1)), "1");
        assert_eq!(g.source_id("a"), Some(SourceId(1)));
        assert_eq!(g.target_id("missing"), None);
    }

    #[test]
    fn complete_five_by_three() {
        let sources = ["d", "e", "f", "g", "h"];
        let targets = ["C", "D", "E"];
        let mut edges = Vec::new();
        for s in sources {
            for t in targets {
                edges.push((s, t));
            }
        }
        let g = ingest(edges);
        assert_eq!(g.edge_count(), 15);
        assert_eq!(g.num_sources(), 5);
        assert_eq!(g.num_targets(), 3);
        for m in g.targets() {
            assert_eq!(g.target_degree(m), 5);
        }
    }

    #[test]
    fn neighbors_are_sorted_and_consistent() {
        let g = ingest([("x", "3"), ("x", "1"), ("y", "1"), ("x", "2")]);
        let hs: Vec<&str> = g
            .targets_of(SourceId(0))
            .iter()
            .map(|&m| g.target_label(m))
            .collect();
        assert_eq!(hs, ["3", "1", "2"]); // id order, i.e. appearance order
        assert!(g.has_edge(SourceId(0), TargetId(0)));
        assert!(!g.has_edge(SourceId(1), TargetId(2)));
        let degree_sum: usize = g.sources().map(|n| g.source_degree(n)).sum();
        assert_eq!(degree_sum, g.edge_count());
    }

    #[test]
    fn transpose_swaps_roles_and_is_an_involution() {
        let g = ingest([("a", "1"), ("a", "2"), ("b", "1")]);
        let t = g.transpose();
        assert_eq!(t.num_sources(), g.num_targets());
        assert_eq!(t.num_targets(), g.num_sources());
        assert_eq!(t.edge_count(), g.edge_count());
        assert_eq!(t.source_label(SourceId(0)), "1");
        assert!(t.has_edge(SourceId(0), TargetId(0)));
        assert!(t.has_edge(SourceId(1), TargetId(0)));
        assert!(!t.has_edge(SourceId(1), TargetId(1)));
        let back = t.transpose();
        assert_eq!(back.edges(), g.edges());
        assert_eq!(back.source_label(SourceId(0)), "a");
    }

    #[test]
    fn read_edge_list_skips_comments_and_reports_line_numbers() {
        let text = "# header\na\t1\n\nb\t1\n";
        let g = read_edge_list(text.as_bytes()).unwrap();
        assert_eq!(g.edge_count(), 2);

        let bad = "a\t1\nb\n";
        let err = read_edge_list(bad.as_bytes()).unwrap_err();
        match err {
            Error::MalformedEdgeRecord { line, found } => {
                assert_eq!(line, 2);
                assert_eq!(found, 1);
            }
            other => panic!("unexpected error: {other}"),
        }

        let empty_label = "a\t1\n\t2\n";
        match read_edge_list(empty_label.as_bytes()).unwrap_err() {
            Error::EmptyLabel { line: 2, side: "source" } => {}
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn write_edge_list_round_trips() {
        let g = ingest([("a", "2"), ("b", "1"), ("a", "1")]);
        let mut buf = Vec::new();
        g.write_edge_list(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "a\t2\na\t1\nb\t1\n");
        let back = read_edge_list(text.as_bytes()).unwrap();
        assert_eq!(back.edge_count(), 3);
        assert!(back.has_edge(back.source_id("b").unwrap(), back.target_id("1").unwrap()));
    }
}
