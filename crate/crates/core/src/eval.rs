//! Ranking quality against binary ground truth: the probability that a
//! random positive outranks a random negative (rank-based, ties getting
//! half credit), and the best F1 over all score thresholds.

use std::collections::HashMap;

use crate::detector::SuspiciousnessRanking;
use crate::error::{Error, Result};

fn check_finite(scored: &[(f64, bool)]) -> Result<()> {
    for &(s, _) in scored {
        if !s.is_finite() {
            return Err(Error::InvalidParam(format!("non-finite score {s}")));
        }
    }
    Ok(())
}

/// Probability that a uniformly random positive scores above a uniformly
/// random negative, ties counting half. Computed by rank summation, so
/// it runs in O(n log n) rather than enumerating pairs.
pub fn auc(scored: &[(f64, bool)]) -> Result<f64> {
    check_finite(scored)?;
    let pos = scored.iter().filter(|&&(_, l)| l).count();
    let neg = scored.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::SingleClass);
    }
    let mut order: Vec<usize> = (0..scored.len()).collect();
    order.sort_unstable_by(|&a, &b| scored[a].0.total_cmp(&scored[b].0));
    // Average 1-based ranks across runs of equal scores, then sum the
    // positives' ranks.
    let mut rank_sum = 0.0f64;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && scored[order[j]].0 == scored[order[i]].0 {
            j += 1;
        }
        let avg_rank = (i + 1 + j) as f64 / 2.0;
        let positives_in_run = order[i..j]
            .iter()
            .filter(|&&idx| scored[idx].1)
            .count();
        rank_sum += avg_rank * positives_in_run as f64;
        i = j;
    }
    let u = rank_sum - (pos * (pos + 1)) as f64 / 2.0;
    Ok(u / (pos as f64 * neg as f64))
}

/// Maximum F1 over thresholds, predicting positive for score ≥ threshold;
/// candidate thresholds are the distinct observed scores.
pub fn best_f1(scored: &[(f64, bool)]) -> Result<f64> {
    check_finite(scored)?;
    let total_pos = scored.iter().filter(|&&(_, l)| l).count();
    if total_pos == 0 {
        return Err(Error::NoPositives);
    }
    let mut order: Vec<usize> = (0..scored.len()).collect();
    order.sort_unstable_by(|&a, &b| scored[b].0.total_cmp(&scored[a].0));
    let mut best = 0.0f64;
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        // Everything tied with the threshold lands on the positive side.
        while j < order.len() && scored[order[j]].0 == scored[order[i]].0 {
            if scored[order[j]].1 {
                tp += 1;
            } else {
                fp += 1;
            }
            j += 1;
        }
        let fneg = total_pos - tp;
        let f1 = 2.0 * tp as f64 / (2 * tp + fp + fneg) as f64;
        best = best.max(f1);
        i = j;
    }
    Ok(best)
}

/// Pair a ranking with ground truth. Every labeled node must appear in the
/// ranking; ranked nodes without a label are ignored. Pairs come out in
/// label order.
pub fn join(
    ranking: &SuspiciousnessRanking,
    labels: &std::collections::BTreeMap<String, bool>,
) -> Result<Vec<(f64, bool)>> {
    let scores: HashMap<&str, f64> = ranking
        .entries()
        .iter()
        .map(|(l, s)| (l.as_str(), *s))
        .collect();
    let mut out = Vec::with_capacity(labels.len());
    for (label, &fraud) in labels {
        let &score = scores
            .get(label.as_str())
            .ok_or_else(|| Error::UnrankedNode(label.clone()))?;
        out.push((score, fraud));
    }
    Ok(out)
}
