//! `summary.csv`, `runs.jsonl`, `histogram.csv` and `timings.csv`.

use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

use anyhow::Context;

use crate::experiment::{RunRecord, Timing};

pub const HIST_LO: f64 = 0.90;
pub const HIST_WIDTH: f64 = 0.002;
pub const HIST_BINS: usize = 50;

#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub graph: String,
    pub algo: String,
    pub p: String,
    pub runs: usize,
    pub min: f64,
    pub mean: f64,
    pub max: f64,
    pub best_known: Option<f64>,
}

impl SummaryRow {
    pub fn ratio(&self) -> Option<f64> {
        self.best_known.filter(|&b| b > 0.0).map(|b| self.max / b)
    }
}

/// One row per (graph, algo, p) in first-appearance order.
pub fn summarize(records: &[RunRecord], best_known: &HashMap<String, f64>) -> Vec<SummaryRow> {
    let mut rows: Vec<SummaryRow> = Vec::new();
    let mut index: HashMap<(String, String, String), usize> = HashMap::new();
    let mut sums: Vec<f64> = Vec::new();
    for r in records {
        let p = r.p.clone().unwrap_or_default();
        let key = (r.graph.clone(), r.algo.clone(), p.clone());
        let i = *index.entry(key).or_insert_with(|| {
            rows.push(SummaryRow {
                graph: r.graph.clone(),
                algo: r.algo.clone(),
                p,
                runs: 0,
                min: f64::INFINITY,
                mean: 0.0,
                max: f64::NEG_INFINITY,
                best_known: best_known.get(&r.graph).copied(),
            });
            sums.push(0.0);
            rows.len() - 1
        });
        let row = &mut rows[i];
        row.runs += 1;
        row.min = row.min.min(r.final_cut);
        row.max = row.max.max(r.final_cut);
        sums[i] += r.final_cut;
    }
    for (row, s) in rows.iter_mut().zip(sums) {
        row.mean = s / row.runs as f64;
    }
    rows
}

pub fn histogram_bin(ratio: f64) -> usize {
    let k = ((ratio - HIST_LO) / HIST_WIDTH + 1e-9).floor();
    if k < 0.0 {
        0
    } else {
        (k as usize).min(HIST_BINS - 1)
    }
}

/// Counts of `final_cut / best_known` per bin; ratios outside `[0.90, 1.00)`
/// land in the edge bins, records without a best-known value are skipped.
pub fn histogram(records: &[RunRecord], best_known: &HashMap<String, f64>) -> Vec<usize> {
    let mut counts = vec![0; HIST_BINS];
    for r in records {
        if let Some(&b) = best_known.get(&r.graph).filter(|&&b| b > 0.0) {
            counts[histogram_bin(r.final_cut / b)] += 1;
        }
    }
    counts
}

fn fmt_num(v: f64) -> String {
    let rounded = (v * 1e4).round() / 1e4;
    format!("{rounded}")
}

pub fn write_reports(
    dir: &Path,
    records: &[RunRecord],
    timings: &[Timing],
    best_known: &HashMap<String, f64>,
) -> anyhow::Result<Vec<SummaryRow>> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;

    let rows = summarize(records, best_known);
    let mut w = csv::Writer::from_path(dir.join("summary.csv"))?;
    w.write_record(["graph", "algo", "p", "runs", "min", "mean", "max", "best_known", "ratio"])?;
    for row in &rows {
        w.write_record([
            row.graph.clone(),
            row.algo.clone(),
            row.p.clone(),
            row.runs.to_string(),
            fmt_num(row.min),
            fmt_num(row.mean),
            fmt_num(row.max),
            row.best_known.map(fmt_num).unwrap_or_default(),
            row.ratio().map(|r| format!("{r:.5}")).unwrap_or_default(),
        ])?;
    }
    w.flush()?;

    let mut f = std::io::BufWriter::new(std::fs::File::create(dir.join("runs.jsonl"))?);
    for r in records {
        serde_json::to_writer(&mut f, r)?;
        f.write_all(b"\n")?;
    }
    f.flush()?;

    let mut w = csv::Writer::from_path(dir.join("histogram.csv"))?;
    w.write_record(["bin_left", "count"])?;
    for (k, c) in histogram(records, best_known).into_iter().enumerate() {
        w.write_record([format!("{:.3}", HIST_LO + HIST_WIDTH * k as f64), c.to_string()])?;
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(dir.join("timings.csv"))?;
    w.write_record(["graph", "algo", "p", "run", "seconds"])?;
    for t in timings {
        w.write_record([
            t.graph.clone(),
            t.algo.clone(),
            t.p.clone().unwrap_or_default(),
            t.run.to_string(),
            format!("{:.6}", t.seconds),
        ])?;
    }
    w.flush()?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(graph: &str, cut: f64) -> RunRecord {
        RunRecord {
            graph: graph.into(),
            algo: "SI".into(),
            p: Some("inf".into()),
            run: 0,
            seed: 0,
            iters: 10,
            n: 3,
            m: 3,
            sip: None,
            initial_cut: 0.0,
            final_cut: cut,
            best_r: 2.0 * cut,
            trajectory: None,
            metrics: None,
        }
    }

    #[test]
    fn summary_statistics() {
        let recs = vec![rec("G1", 11500.0), rec("G1", 11553.0), rec("G1", 11520.0)];
        let bk = HashMap::from([("G1".to_string(), 11624.0)]);
        let rows = summarize(&recs, &bk);
        assert_eq!(rows.len(), 1);
        let r = &rows[0];
        assert!(r.min <= r.mean && r.mean <= r.max);
        assert_eq!(format!("{:.5}", r.ratio().unwrap()), "0.99389");
        assert_eq!(r.runs, 3);
    }

    #[test]
    fn missing_best_known_leaves_ratio_empty() {
        let rows = summarize(&[rec("triangle", 2.0)], &HashMap::new());
        assert_eq!(rows[0].ratio(), None);
        assert!(histogram(&[rec("triangle", 2.0)], &HashMap::new()).iter().all(|&c| c == 0));
    }

    #[test]
    fn histogram_bins() {
        assert_eq!(histogram_bin(0.5), 0);
        assert_eq!(histogram_bin(0.9), 0);
        assert_eq!(histogram_bin(0.9021), 1);
        assert_eq!(histogram_bin(0.986), 43);
        assert_eq!(histogram_bin(1.0), HIST_BINS - 1);
        let bk = HashMap::from([("G1".to_string(), 100.0)]);
        let recs: Vec<_> = [99.0, 95.0, 80.0, 100.0].iter().map(|&c| rec("G1", c)).collect();
        assert_eq!(histogram(&recs, &bk).iter().sum::<usize>(), recs.len());
    }

    #[test]
    fn files_are_written() {
        let dir = tempfile::tempdir().unwrap();
        let recs = vec![rec("triangle", 2.0)];
        write_reports(dir.path(), &recs, &[], &HashMap::new()).unwrap();
        let summary = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
        assert_eq!(summary.lines().nth(1).unwrap(), "triangle,SI,inf,1,2,2,2,,");
        let runs = std::fs::read_to_string(dir.path().join("runs.jsonl")).unwrap();
        assert_eq!(runs.lines().count(), 1);
        let back: RunRecord = serde_json::from_str(runs.lines().next().unwrap()).unwrap();
        assert_eq!(back, recs[0]);
        let hist = std::fs::read_to_string(dir.path().join("histogram.csv")).unwrap();
        assert_eq!(hist.lines().count(), HIST_BINS + 1);
    }
}
