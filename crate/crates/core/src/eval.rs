//! Ranked hashtag prediction and the precision@1 / recall@10 / mean-rank
//! metrics.

use std::fmt::Write as _;
use std::io::Write;

use crate::data::{make_batches, EncodedDataset};
use crate::error::{Error, Result};
use crate::model::{self, ModelParams};

/// Cut-off for recall; clipped to the number of labels.
pub const RECALL_CUTOFF: usize = 10;

/// Labels sorted by descending posterior, ties by ascending label index.
#[derive(Clone, Debug, PartialEq)]
pub struct RankedPrediction {
    pub order: Vec<usize>,
    /// Posterior of `order[i]`.
    pub scores: Vec<f64>,
}

impl RankedPrediction {
    /// 1-based rank of every label, indexed by label.
    pub fn ranks(&self) -> Vec<usize> {
        let mut ranks = vec![0; self.order.len()];
        for (pos, &label) in self.order.iter().enumerate() {
            ranks[label] = pos + 1;
        }
        ranks
    }
}

pub fn rank(row: &[f64]) -> RankedPrediction {
    let mut order: Vec<usize> = (0..row.len()).collect();
    order.sort_by(|&a, &b| row[b].total_cmp(&row[a]).then(a.cmp(&b)));
    let scores = order.iter().map(|&i| row[i]).collect();
    RankedPrediction { order, scores }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExampleResult {
    pub gold: Vec<usize>,
    /// 1-based rank of each gold label, parallel to `gold`.
    pub gold_ranks: Vec<usize>,
    /// Leading labels of the ranking with their posteriors.
    pub top: Vec<(usize, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport {
    pub precision_at_1: f64,
    pub recall_at_10: f64,
    /// Averaged over (example, gold tag) pairs.
    pub mean_rank: f64,
    /// Per-example mean gold rank, averaged over examples.
    pub mean_rank_per_example: f64,
    pub evaluated: usize,
    pub dropped: usize,
    pub examples: Vec<ExampleResult>,
}

/// Number of leading labels kept per example in [`ExampleResult::top`].
pub const KEEP_TOP: usize = 10;

pub fn metrics(predictions: &[RankedPrediction], gold: &[Vec<usize>]) -> Result<EvalReport> {
    if predictions.len() != gold.len() {
        return Err(Error::Shape {
            op: "metrics",
            left: (predictions.len(), 1),
            right: (gold.len(), 1),
        });
    }
    if predictions.is_empty() {
        return Err(Error::Data("nothing to evaluate".into()));
    }
    let mut hits_at_1 = 0usize;
    let mut recall_sum = 0.0;
    let mut rank_sum = 0usize;
    let mut pairs = 0usize;
    let mut per_example_sum = 0.0;
    let mut examples = Vec::with_capacity(predictions.len());
    for (i, (pred, g)) in predictions.iter().zip(gold).enumerate() {
        assert!(!g.is_empty(), "example {i} has an empty gold set");
        let labels = pred.order.len();
        let ranks = pred.ranks();
        let gold_ranks: Vec<usize> = g
            .iter()
            .map(|&l| {
                ranks
                    .get(l)
                    .copied()
                    .ok_or(Error::Index {
                        index: l,
                        size: labels,
                        position: i,
                    })
            })
            .collect::<Result<_>>()?;
        if g.contains(&pred.order[0]) {
            hits_at_1 += 1;
        }
        let cutoff = RECALL_CUTOFF.min(labels);
        let found = gold_ranks.iter().filter(|&&r| r <= cutoff).count();
        recall_sum += found as f64 / g.len() as f64;
        rank_sum += gold_ranks.iter().sum::<usize>();
        pairs += g.len();
        per_example_sum += gold_ranks.iter().sum::<usize>() as f64 / g.len() as f64;
        examples.push(ExampleResult {
            gold: g.clone(),
            gold_ranks,
            top: pred
                .order
                .iter()
                .zip(&pred.scores)
                .take(KEEP_TOP)
                .map(|(&l, &s)| (l, s))
                .collect(),
        });
    }
    let n = predictions.len() as f64;
    Ok(EvalReport {
        precision_at_1: hits_at_1 as f64 / n,
        recall_at_10: recall_sum / n,
        mean_rank: rank_sum as f64 / pairs as f64,
        mean_rank_per_example: per_example_sum / n,
        evaluated: predictions.len(),
        dropped: 0,
        examples,
    })
}

/// Scores every example of `data`, `batch_size` rows at a time, in dataset order.
pub fn evaluate(params: &ModelParams, data: &EncodedDataset, batch_size: usize) -> Result<EvalReport> {
    let dims = params.dims();
    if data.table_size != dims.table_size || data.num_labels != dims.labels {
        return Err(Error::Config(format!(
            "dataset was encoded for {} symbols / {} labels, model has {} / {}",
            data.table_size, data.num_labels, dims.table_size, dims.labels
        )));
    }
    let mut predictions = Vec::with_capacity(data.len());
    let mut gold = Vec::with_capacity(data.len());
    for batch in make_batches(data, batch_size, None)? {
        let pass = model::forward(params, &batch.sequences)?;
        for (row, &id) in batch.ids.iter().enumerate() {
            predictions.push(rank(pass.posteriors.row(row)));
            gold.push(data.examples[id].labels.clone());
        }
    }
    let mut report = metrics(&predictions, &gold)?;
    report.dropped = data.dropped;
    Ok(report)
}

impl EvalReport {
    /// Flat `key=value` lines.
    pub fn to_record(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "precision_at_1={}", self.precision_at_1);
        let _ = writeln!(s, "recall_at_10={}", self.recall_at_10);
        let _ = writeln!(s, "mean_rank={}", self.mean_rank);
        let _ = writeln!(s, "mean_rank_per_example={}", self.mean_rank_per_example);
        let _ = writeln!(s, "evaluated={}", self.evaluated);
        let _ = writeln!(s, "dropped={}", self.dropped);
        s
    }

    /// One line per example: gold tags, a tab, then up to `k` ranked
    /// `tag:posterior` pairs.
    pub fn write_rankings(&self, out: &mut dyn Write, label_names: &[String], k: usize) -> std::io::Result<()> {
        for ex in &self.examples {
            let gold: Vec<&str> = ex.gold.iter().map(|&l| label_names[l].as_str()).collect();
            let top: Vec<String> = ex
                .top
                .iter()
                .take(k)
                .map(|&(l, p)| format!("{}:{p:.6}", label_names[l]))
                .collect();
            writeln!(out, "{}\t{}", gold.join(","), top.join(" "))?;
        }
        Ok(())
    }
}
