//! Seeded synthetic data: random bipartite backgrounds, injected
//! synchronized groups, camouflage edges, and multi-attribute registration
//! datasets with ground truth.
//!
//! Everything here is deterministic under its seed, so experiments can pin
//! a handful of seeds and assert exact outcomes.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, Write};
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::basket::Mode;
use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, GraphBuilder, SourceId, TargetId};
use crate::sforest::{DimensionSpec, KDataset};

/// A synchronized group to be planted into a graph: `fraud_sources` fresh
/// accounts hitting a fresh pool of `fraud_targets`, each account picking
/// `round(density * fraud_targets)` distinct targets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InjectionSpec {
    pub fraud_sources: usize,
    pub fraud_targets: usize,
    /// Fraction of the target pool each account hits, in (0, 1].
    pub density: f64,
}

/// A graph together with its planted ground truth, carried by label so it
/// survives rebuilds.
#[derive(Debug, Clone)]
pub struct LabeledGraph {
    pub graph: BipartiteGraph,
    pub fraud_sources: BTreeSet<String>,
    pub fraud_targets: BTreeSet<String>,
}

impl LabeledGraph {
    /// Every source of the graph, marked fraudulent or not.
    pub fn labels(&self) -> BTreeMap<String, bool> {
        self.graph
            .sources()
            .map(|n| {
                let label = self.graph.source_label(n);
                (label.to_string(), self.fraud_sources.contains(label))
            })
            .collect()
    }
}

/// Which side of the planted group reaches out into the legitimate graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CamouflageKind {
    /// Fraud sources add edges to legitimate targets.
    Sources,
    /// Fraud targets gain edges from legitimate sources.
    Targets,
}

impl FromStr for CamouflageKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sources" => Ok(CamouflageKind::Sources),
            "targets" => Ok(CamouflageKind::Targets),
            other => Err(Error::InvalidParam(format!(
                "unknown camouflage kind {other:?} (expected sources or targets)"
            ))),
        }
    }
}

/// Random bipartite graph: sources `s0..`, targets `t0..`, each of the
/// `n_sources * n_targets` pairs present independently with `edge_prob`.
/// All nodes are interned even when isolated.
pub fn gen_background(
    n_sources: usize,
    n_targets: usize,
    edge_prob: f64,
    seed: u64,
) -> Result<BipartiteGraph> {
    if !(0.0..=1.0).contains(&edge_prob) {
        return Err(Error::InvalidParam(format!(
            "edge probability {edge_prob} is outside [0, 1]"
        )));
    }
    let mut b = GraphBuilder::new();
    for i in 0..n_sources {
        b.intern_source(&format!("s{i}"));
    }
    for j in 0..n_targets {
        b.intern_target(&format!("t{j}"));
    }
    let cells = n_sources as u64 * n_targets as u64;
    if edge_prob > 0.0 && cells > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // Jump between hits geometrically instead of flipping a coin per
        // cell; for p = 1 the jump degenerates to 0 and every cell is hit.
        let ln_miss = (1.0 - edge_prob).ln();
        let mut pos: u64 = 0;
        loop {
            let r: f64 = rng.random();
            let gap = ((1.0 - r).ln() / ln_miss).floor();
            pos = pos.saturating_add(gap as u64);
            if pos >= cells {
                break;
            }
            let i = (pos / n_targets as u64) as u32;
            let j = (pos % n_targets as u64) as u32;
            b.add_edge_ids(SourceId(i), TargetId(j));
            pos += 1;
        }
    }
    Ok(b.build())
}

/// Plant a synchronized group: fresh sources `fs0..` and targets `ft0..`
/// are added, and each fresh source connects to a uniform sample of
/// `round(density * fraud_targets)` distinct fresh targets. The group
/// touches nothing else, so before camouflage every edge at a fraud node
/// stays inside the group.
pub fn inject_group(
    bg: &BipartiteGraph,
    spec: &InjectionSpec,
    seed: u64,
) -> Result<LabeledGraph> {
    if spec.fraud_sources == 0 || spec.fraud_targets == 0 {
        return Err(Error::InvalidParam(
            "a planted group needs at least one source and one target".into(),
        ));
    }
    if !(spec.density > 0.0 && spec.density <= 1.0) {
        return Err(Error::InvalidParam(format!(
            "density {} is outside (0, 1]",
            spec.density
        )));
    }
    let per_source = (spec.density * spec.fraud_targets as f64).round() as usize;
    if per_source == 0 {
        return Err(Error::InvalidParam(format!(
            "density {} over {} targets rounds to zero edges per source",
            spec.density, spec.fraud_targets
        )));
    }
    let mut b = GraphBuilder::from_graph(bg);
    let mut fraud_sources = BTreeSet::new();
    let mut fraud_targets = BTreeSet::new();
    let mut source_ids = Vec::with_capacity(spec.fraud_sources);
    let mut target_ids = Vec::with_capacity(spec.fraud_targets);
    for i in 0..spec.fraud_sources {
        let label = format!("fs{i}");
        if b.has_source(&label) {
            return Err(Error::InvalidParam(format!(
                "source label {label} already exists in the host graph"
            )));
        }
        source_ids.push(b.intern_source(&label));
        fraud_sources.insert(label);
    }
    for j in 0..spec.fraud_targets {
        let label = format!("ft{j}");
        if b.has_target(&label) {
            return Err(Error::InvalidParam(format!(
                "target label {label} already exists in the host graph"
            )));
        }
        target_ids.push(b.intern_target(&label));
        fraud_targets.insert(label);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for &n in &source_ids {
        for idx in sample(&mut rng, spec.fraud_targets, per_source).iter() {
            b.add_edge_ids(n, target_ids[idx]);
        }
    }
    Ok(LabeledGraph {
        graph: b.build(),
        fraud_sources,
        fraud_targets,
    })
}

/// Blend the planted group into the crowd: every fraud node on the chosen
/// side gains `degree` distinct edges to uniformly sampled legitimate
/// counterparts. Ground truth and the group's internal edges are
/// untouched.
pub fn add_camouflage(
    lg: &LabeledGraph,
    kind: CamouflageKind,
    degree: usize,
    seed: u64,
) -> Result<LabeledGraph> {
    if degree == 0 {
        return Ok(lg.clone());
    }
    let g = &lg.graph;
    let mut b = GraphBuilder::from_graph(g);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match kind {
        CamouflageKind::Sources => {
            let pool: Vec<TargetId> = g
                .targets()
                .filter(|&m| !lg.fraud_targets.contains(g.target_label(m)))
                .collect();
            if degree > pool.len() {
                return Err(Error::InvalidParam(format!(
                    "{degree} camouflage edges per source, but only {} legitimate targets",
                    pool.len()
                )));
            }
            for n in g.sources() {
                if !lg.fraud_sources.contains(g.source_label(n)) {
                    continue;
                }
                for idx in sample(&mut rng, pool.len(), degree).iter() {
                    b.add_edge_ids(n, pool[idx]);
                }
            }
        }
        CamouflageKind::Targets => {
            let pool: Vec<SourceId> = g
                .sources()
                .filter(|&n| !lg.fraud_sources.contains(g.source_label(n)))
                .collect();
            if degree > pool.len() {
                return Err(Error::InvalidParam(format!(
                    "{degree} camouflage edges per target, but only {} legitimate sources",
                    pool.len()
                )));
            }
            for m in g.targets() {
                if !lg.fraud_targets.contains(g.target_label(m)) {
                    continue;
                }
                for idx in sample(&mut rng, pool.len(), degree).iter() {
                    b.add_edge_ids(pool[idx], m);
                }
            }
        }
    }
    Ok(LabeledGraph {
        graph: b.build(),
        fraud_sources: lg.fraud_sources.clone(),
        fraud_targets: lg.fraud_targets.clone(),
    })
}

/// Registration-style dataset: accounts `u0..`, the first
/// `round(n_accounts * fraud_fraction)` of them fraudulent. On every
/// critical attribute, fraudulent accounts draw from a pool of about one
/// value per fifty of them (heavy sharing) while legitimate accounts draw
/// from a pool twice their own number (rare collisions). On every noise
/// attribute, the whole population shares a five-value pool. Critical and
/// noise draws come from independent streams, so adding noise attributes
/// never changes the critical values.
pub fn gen_kdataset(
    n_accounts: usize,
    fraud_fraction: f64,
    critical_dims: usize,
    noise_dims: usize,
    seed: u64,
) -> Result<(KDataset, BTreeMap<String, bool>)> {
    if n_accounts == 0 {
        return Err(Error::InvalidParam("need at least one account".into()));
    }
    if !(0.0..=1.0).contains(&fraud_fraction) {
        return Err(Error::InvalidParam(format!(
            "fraud fraction {fraud_fraction} is outside [0, 1]"
        )));
    }
    if critical_dims + noise_dims == 0 {
        return Err(Error::NoAttributes);
    }
    let n_fraud = (n_accounts as f64 * fraud_fraction).round() as usize;
    let fraud_pool = (n_fraud / 50).max(1);
    let legit_pool = (2 * (n_accounts - n_fraud)).max(1);
    let noise_pool = 5;
    let mut critical_rng = ChaCha8Rng::seed_from_u64(seed);
    let mut noise_rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e3779b97f4a7c15);
    let mut dims = Vec::new();
    for d in 0..critical_dims {
        dims.push(DimensionSpec { name: format!("c{d}"), mode: Mode::Arbg });
    }
    for d in 0..noise_dims {
        dims.push(DimensionSpec { name: format!("n{d}"), mode: Mode::Arbg });
    }
    let mut rows = Vec::with_capacity(n_accounts);
    let mut labels = BTreeMap::new();
    for i in 0..n_accounts {
        let id = format!("u{i}");
        let fraud = i < n_fraud;
        let mut values = Vec::with_capacity(critical_dims + noise_dims);
        for d in 0..critical_dims {
            values.push(if fraud {
                format!("c{d}x{}", critical_rng.random_range(0..fraud_pool))
            } else {
                format!("c{d}v{}", critical_rng.random_range(0..legit_pool))
            });
        }
        for d in 0..noise_dims {
            values.push(format!("n{d}v{}", noise_rng.random_range(0..noise_pool)));
        }
        labels.insert(id.clone(), fraud);
        rows.push((id, values));
    }
    Ok((KDataset::new("account".into(), dims, rows)?, labels))
}

/// Write ground truth as `label<TAB>{0,1}` lines in label order.
pub fn write_labels<W: Write>(w: &mut W, labels: &BTreeMap<String, bool>) -> Result<()> {
    for (label, &fraud) in labels {
        writeln!(w, "{label}\t{}", fraud as u8)?;
    }
    Ok(())
}

/// Parse a `label<TAB>{0,1}` file; `#` comments and blank lines skipped.
pub fn read_labels<R: BufRead>(reader: R) -> Result<BTreeMap<String, bool>> {
    let mut labels = BTreeMap::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split('\t');
        let (Some(label), Some(value), None) = (fields.next(), fields.next(), fields.next())
        else {
            return Err(Error::Malformed {
                line: i + 1,
                what: "expected label<TAB>{0,1}".into(),
            });
        };
        let fraud = match value {
            "0" => false,
            "1" => true,
            other => {
                return Err(Error::Malformed {
                    line: i + 1,
                    what: format!("label value must be 0 or 1, found {other:?}"),
                })
            }
        };
        if labels.insert(label.to_string(), fraud).is_some() {
            return Err(Error::Malformed {
                line: i + 1,
                what: format!("duplicate label {label}"),
            });
        }
    }
    Ok(labels)
}
