//! Multi-attribute datasets and score aggregation across per-attribute trees.
//!
//! A record dataset has one id column and K attribute columns. Every
//! attribute induces its own bipartite graph (id × attribute value), its
//! own tree, and its own per-id scores; a forest combines them as a
//! weighted sum, weighting each attribute by the self-information of its
//! value space: `w = ln(number of distinct values)`. Attributes on which
//! everyone agrees carry no information (`ln 1 = 0`) and drop out of the
//! total on their own.

use std::collections::{BTreeMap, HashMap};
use std::io::{BufRead, Read};
use std::str::FromStr;

use crate::basket::{build_baskets, Mode};
use crate::detector::{
    resolve_params, s_scores, select_suspicious, BoundaryOverrides, SuspiciousnessRanking,
};
use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, GraphBuilder};
use crate::stree::{build_stree, STree};

/// One attribute column: its name and the graph mode its values call for
/// (objects score by audience rarity, shared resources by audience size).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimensionSpec {
    pub name: String,
    pub mode: Mode,
}

/// A parsed record dataset: id column plus K ≥ 1 attribute columns, every
/// row carrying exactly one non-empty value per attribute.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KDataset {
    id_field: String,
    dims: Vec<DimensionSpec>,
    rows: Vec<(String, Vec<String>)>,
}

impl KDataset {
    pub fn new(
        id_field: String,
        dims: Vec<DimensionSpec>,
        rows: Vec<(String, Vec<String>)>,
    ) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::NoAttributes);
        }
        for (i, (id, values)) in rows.iter().enumerate() {
            let row = i + 1;
            if id.is_empty() {
                return Err(Error::MissingValue {
                    row,
                    column: id_field.clone(),
                });
            }
            if values.len() != dims.len() {
                return Err(Error::InvalidParam(format!(
                    "row {row} has {} attribute values, expected {}",
                    values.len(),
                    dims.len()
                )));
            }
            for (k, v) in values.iter().enumerate() {
                if v.is_empty() {
                    return Err(Error::MissingValue {
                        row,
                        column: dims[k].name.clone(),
                    });
                }
            }
        }
        Ok(KDataset { id_field, dims, rows })
    }

    /// Parse a CSV with a header line: first column is the id, the rest are
    /// attributes. Every attribute column must have a declared mode, and
    /// every declared mode must match a column.
    pub fn from_csv<R: Read>(reader: R, modes: &BTreeMap<String, Mode>) -> Result<Self> {
        let mut csv = csv::Reader::from_reader(reader);
        let header = csv.headers()?.clone();
        if header.len() < 2 {
            return Err(Error::NoAttributes);
        }
        let id_field = header[0].to_string();
        let mut dims = Vec::with_capacity(header.len() - 1);
        for name in header.iter().skip(1) {
            let mode = *modes
                .get(name)
                .ok_or_else(|| Error::UndeclaredMode(name.to_string()))?;
            dims.push(DimensionSpec { name: name.to_string(), mode });
        }
        for declared in modes.keys() {
            if !dims.iter().any(|d| &d.name == declared) {
                return Err(Error::UnknownColumn(declared.clone()));
            }
        }
        let mut rows = Vec::new();
        for record in csv.records() {
            let record = record?;
            let id = record[0].to_string();
            let values = record.iter().skip(1).map(str::to_string).collect();
            rows.push((id, values));
        }
        KDataset::new(id_field, dims, rows)
    }

    pub fn id_field(&self) -> &str {
        &self.id_field
    }

    pub fn dims(&self) -> &[DimensionSpec] {
        &self.dims
    }

    pub fn num_dims(&self) -> usize {
        self.dims.len()
    }

    pub fn rows(&self) -> &[(String, Vec<String>)] {
        &self.rows
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Append an attribute column, one value per existing row.
    pub fn push_dim(&mut self, name: &str, mode: Mode, values: Vec<String>) -> Result<()> {
        if values.len() != self.rows.len() {
            return Err(Error::InvalidParam(format!(
                "column {name} has {} values for {} rows",
                values.len(),
                self.rows.len()
            )));
        }
        if name == self.id_field || self.dims.iter().any(|d| d.name == name) {
            return Err(Error::InvalidParam(format!("duplicate column {name}")));
        }
        for (i, v) in values.iter().enumerate() {
            if v.is_empty() {
                return Err(Error::MissingValue {
                    row: i + 1,
                    column: name.to_string(),
                });
            }
        }
        self.dims.push(DimensionSpec { name: name.to_string(), mode });
        for (row, value) in self.rows.iter_mut().zip(values) {
            row.1.push(value);
        }
        Ok(())
    }

    /// The dataset without attribute `k`.
    pub fn drop_dim(&self, k: usize) -> Result<KDataset> {
        if k >= self.dims.len() {
            return Err(Error::InvalidParam(format!("no attribute {k}")));
        }
        if self.dims.len() == 1 {
            return Err(Error::NoAttributes);
        }
        let mut dims = self.dims.clone();
        dims.remove(k);
        let rows = self
            .rows
            .iter()
            .map(|(id, values)| {
                let mut values = values.clone();
                values.remove(k);
                (id.clone(), values)
            })
            .collect();
        Ok(KDataset { id_field: self.id_field.clone(), dims, rows })
    }

    /// The bipartite graph of attribute `k`: ids on the source side,
    /// distinct attribute values on the target side, duplicate (id, value)
    /// pairs collapsed.
    pub fn graph_for_dim(&self, k: usize) -> Result<BipartiteGraph> {
        if k >= self.dims.len() {
            return Err(Error::InvalidParam(format!("no attribute {k}")));
        }
        let mut b = GraphBuilder::new();
        for (id, values) in &self.rows {
            b.add_edge(id, &values[k]);
        }
        Ok(b.build())
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec![self.id_field.as_str()];
        header.extend(self.dims.iter().map(|d| d.name.as_str()));
        w.write_record(&header).expect("vec write");
        for (id, values) in &self.rows {
            let mut record = vec![id.as_str()];
            record.extend(values.iter().map(String::as_str));
            w.write_record(&record).expect("vec write");
        }
        String::from_utf8(w.into_inner().expect("vec flush")).expect("csv is utf-8")
    }
}

/// Parse a mode declaration file: one `column<TAB>mode` line per attribute
/// column, `#` comments and blank lines skipped.
pub fn read_mode_sidecar<R: BufRead>(reader: R) -> Result<BTreeMap<String, Mode>> {
    let mut modes = BTreeMap::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split('\t');
        let (Some(column), Some(mode), None) = (fields.next(), fields.next(), fields.next())
        else {
            return Err(Error::Malformed {
                line: i + 1,
                what: "expected column<TAB>mode".into(),
            });
        };
        let mode = Mode::from_str(mode).map_err(|_| Error::Malformed {
            line: i + 1,
            what: format!("unknown mode {mode:?}"),
        })?;
        if modes.insert(column.to_string(), mode).is_some() {
            return Err(Error::Malformed {
                line: i + 1,
                what: format!("column {column} declared twice"),
            });
        }
    }
    Ok(modes)
}

/// One graph, tree, and weight per attribute of a dataset.
#[derive(Debug)]
pub struct SForest {
    dims: Vec<DimensionSpec>,
    graphs: Vec<BipartiteGraph>,
    trees: Vec<STree>,
    weights: Vec<f64>,
}

impl SForest {
    pub fn num_dims(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[DimensionSpec] {
        &self.dims
    }

    pub fn graphs(&self) -> &[BipartiteGraph] {
        &self.graphs
    }

    pub fn trees(&self) -> &[STree] {
        &self.trees
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Build every per-attribute graph and tree; weight attribute k by
/// `ln(q_k)` where q_k is its number of distinct values.
pub fn build_forest(data: &KDataset, c: f64) -> Result<SForest> {
    let mut graphs = Vec::with_capacity(data.num_dims());
    let mut trees = Vec::with_capacity(data.num_dims());
    let mut weights = Vec::with_capacity(data.num_dims());
    for (k, dim) in data.dims().iter().enumerate() {
        let graph = data.graph_for_dim(k)?;
        let (baskets, _) = build_baskets(&graph, dim.mode, c)?;
        trees.push(build_stree(baskets));
        weights.push((graph.num_targets() as f64).ln());
        graphs.push(graph);
    }
    Ok(SForest {
        dims: data.dims().to_vec(),
        graphs,
        trees,
        weights,
    })
}

/// Left-to-right weighted sum of per-tree scores.
pub fn combined_score(weights: &[f64], scores: &[f64]) -> f64 {
    debug_assert_eq!(weights.len(), scores.len());
    weights
        .iter()
        .zip(scores)
        .fold(0.0, |acc, (w, s)| acc + w * s)
}

/// Run the detector on every tree and combine: each id's total is the
/// weighted sum of its per-tree scores, accumulated in attribute order.
/// `overrides` is either empty (every tree uses its own defaults) or one
/// entry per attribute.
pub fn forest_scores(
    forest: &SForest,
    overrides: &[BoundaryOverrides],
) -> Result<SuspiciousnessRanking> {
    let k = forest.num_dims();
    if !overrides.is_empty() && overrides.len() != k {
        return Err(Error::InvalidParam(format!(
            "{} boundary overrides for {k} attributes",
            overrides.len()
        )));
    }
    // Every row contributes its id to every attribute graph, so graph 0's
    // source side enumerates exactly the ids of the dataset.
    let ids = &forest.graphs[0];
    let mut totals: HashMap<&str, f64> = ids
        .sources()
        .map(|n| (ids.source_label(n), 0.0f64))
        .collect();
    for dim in 0..k {
        let tree = &forest.trees[dim];
        let graph = &forest.graphs[dim];
        let ov = overrides.get(dim).copied().unwrap_or_default();
        let params = resolve_params(tree, ov)?;
        let selected = select_suspicious(tree, &params);
        let ranking = s_scores(tree, &selected, graph);
        let w = forest.weights[dim];
        for (label, s) in ranking.entries() {
            let slot = totals.get_mut(label.as_str()).ok_or_else(|| {
                Error::Invariant(format!("id {label} missing from attribute 0"))
            })?;
            *slot += w * s;
        }
    }
    Ok(SuspiciousnessRanking::from_entries(
        ids.sources()
            .map(|n| {
                let label = ids.source_label(n);
                (label.to_string(), totals[label])
            })
            .collect(),
    ))
}
