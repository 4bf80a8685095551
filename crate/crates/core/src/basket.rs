//! Per-target baskets with suspiciousness scores.
//!
//! Each target m yields a basket: its source neighborhood I(m) sorted under
//! one global total order on sources, plus a score f(m). The default order
//! ranks sources by descending g(n) = sum of f over the source's targets,
//! with ascending id as the tie-break, so the order is always strict. Any
//! consistent total order works for exact mining; a node-id order is
//! provided as the alternative.

use std::cmp::Ordering as CmpOrdering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, SourceId, TargetId};

/// Interpretation of the target side, which picks the score formula.
///
/// `Aobg` treats targets as objects whose audiences are scored by rarity:
/// f(m) = ln(|E| / (|I(m)| + c)). `Arbg` treats targets as resources whose
/// sharing is scored by crowding: f(m) = ln(|I(m)| + c).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Aobg,
    Arbg,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "aobg" => Ok(Mode::Aobg),
            "arbg" => Ok(Mode::Arbg),
            other => Err(Error::InvalidParam(format!(
                "unknown mode {other:?} (expected aobg or arbg)"
            ))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Aobg => write!(f, "aobg"),
            Mode::Arbg => write!(f, "arbg"),
        }
    }
}

/// How baskets order their sources.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OrderingRule {
    /// Descending g-score, ties by ascending id.
    #[default]
    GScoreDesc,
    /// Ascending id. Exact mining is order-agnostic; this exercises that.
    NodeIdAsc,
}

/// The global total order on sources used to sort every basket.
#[derive(Debug, Clone)]
pub struct GOrder {
    g: Vec<f64>,
    rule: OrderingRule,
}

impl GOrder {
    pub fn g(&self, n: SourceId) -> f64 {
        self.g[n.0 as usize]
    }

    pub fn rule(&self) -> OrderingRule {
        self.rule
    }

    pub fn compare(&self, a: SourceId, b: SourceId) -> CmpOrdering {
        match self.rule {
            OrderingRule::GScoreDesc => self
                .g(b)
                .total_cmp(&self.g(a))
                .then(a.0.cmp(&b.0)),
            OrderingRule::NodeIdAsc => a.0.cmp(&b.0),
        }
    }

    pub fn sort(&self, nodes: &mut [SourceId]) {
        nodes.sort_unstable_by(|&a, &b| self.compare(a, b));
    }
}

/// A target together with its ordered source neighborhood and score.
#[derive(Debug, Clone, PartialEq)]
pub struct Basket {
    pub m: TargetId,
    pub ordered_sources: Vec<SourceId>,
    pub f: f64,
}

fn check_c(c: f64) -> Result<()> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::InvalidParam(format!(
            "smoothing constant c must be a positive finite number, got {c}"
        )));
    }
    Ok(())
}

/// Score of a single target under the given mode. Natural logarithm; the
/// smoothing constant keeps the argument positive for empty neighborhoods.
pub fn f_score(graph: &BipartiteGraph, m: TargetId, mode: Mode, c: f64) -> Result<f64> {
    check_c(c)?;
    if graph.edge_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    let i = graph.target_degree(m) as f64;
    Ok(match mode {
        Mode::Aobg => (graph.edge_count() as f64 / (i + c)).ln(),
        Mode::Arbg => (i + c).ln(),
    })
}

/// One basket per target, each sorted under the default g-order.
pub fn build_baskets(
    graph: &BipartiteGraph,
    mode: Mode,
    c: f64,
) -> Result<(Vec<Basket>, GOrder)> {
    build_baskets_with(graph, mode, c, OrderingRule::GScoreDesc)
}

/// One basket per target, sorted under the given ordering rule.
pub fn build_baskets_with(
    graph: &BipartiteGraph,
    mode: Mode,
    c: f64,
    rule: OrderingRule,
) -> Result<(Vec<Basket>, GOrder)> {
    check_c(c)?;
    if graph.edge_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    let mut f = Vec::with_capacity(graph.num_targets());
    for m in graph.targets() {
        f.push(f_score(graph, m, mode, c)?);
    }
    let mut g = vec![0.0; graph.num_sources()];
    for m in graph.targets() {
        for &n in graph.sources_of(m) {
            g[n.0 as usize] += f[m.0 as usize];
        }
    }
    let order = GOrder { g, rule };
    // Rather than sorting every basket, rank all sources once and deal
    // them out in rank order; each basket then fills already ordered.
    // This keeps the per-edge cost flat as baskets grow.
    let mut ranked: Vec<SourceId> = graph.sources().collect();
    order.sort(&mut ranked);
    let mut members: Vec<Vec<SourceId>> = graph
        .targets()
        .map(|m| Vec::with_capacity(graph.target_degree(m)))
        .collect();
    for &n in &ranked {
        for &m in graph.targets_of(n) {
            members[m.0 as usize].push(n);
        }
    }
    let baskets = graph
        .targets()
        .zip(members)
        .map(|(m, ordered_sources)| Basket {
            m,
            ordered_sources,
            f: f[m.0 as usize],
        })
        .collect();
    Ok((baskets, order))
}

/// Total number of basket elements. Must equal the graph's edge count;
/// anything else means the baskets do not belong to this graph.
pub fn basket_mass(baskets: &[Basket], graph: &BipartiteGraph) -> Result<usize> {
    let mass: usize = baskets.iter().map(|b| b.ordered_sources.len()).sum();
    if mass != graph.edge_count() {
        return Err(Error::MassMismatch {
            expected: graph.edge_count(),
            actual: mass,
        });
    }
    Ok(mass)
}
