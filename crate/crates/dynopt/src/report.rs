//! Mean/std/rank tables over result rows.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::records::ResultRow;

#[derive(Debug, Clone, PartialEq)]
pub struct CellStats {
    pub algorithm: String,
    pub mean: f64,
    /// Sample standard deviation; zero for a single run.
    pub std: f64,
    pub runs: usize,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceRanks {
    pub instance_id: String,
    /// One cell per algorithm, in algorithm-name order.
    pub cells: Vec<CellStats>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankTable {
    /// Sorted by name.
    pub algorithms: Vec<String>,
    /// Sorted by instance id.
    pub instances: Vec<InstanceRanks>,
    pub average_rank: Vec<f64>,
}

/// Flat CSV form of a [`RankTable`]; the average row uses instance id
/// `average` and leaves mean/std empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub instance_id: String,
    pub algorithm: String,
    pub mean_rp: Option<f64>,
    pub std_rp: Option<f64>,
    pub runs: usize,
    pub rank: f64,
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Ranks algorithms per instance by ascending mean rp. Equal means share the
/// lower rank. Every (instance, algorithm) pair needs at least one run.
pub fn rank_report(rows: &[ResultRow]) -> Result<RankTable> {
    if rows.is_empty() {
        return Err(HarnessError::Report("no result rows".into()));
    }
    let algorithms: Vec<String> = rows.iter().map(|r| r.algorithm.clone()).collect::<BTreeSet<_>>().into_iter().collect();
    let mut grid: BTreeMap<&str, BTreeMap<&str, Vec<f64>>> = BTreeMap::new();
    for r in rows {
        if !r.rp.is_finite() {
            return Err(HarnessError::Report(format!("non-finite rp for {} / {}", r.instance_id, r.algorithm)));
        }
        grid.entry(&r.instance_id).or_default().entry(&r.algorithm).or_default().push(r.rp);
    }
    let mut instances = Vec::with_capacity(grid.len());
    let mut rank_sum = vec![0.0; algorithms.len()];
    for (inst, by_alg) in &grid {
        let mut cells = Vec::with_capacity(algorithms.len());
        for alg in &algorithms {
            let rps = by_alg
                .get(alg.as_str())
                .ok_or_else(|| HarnessError::Report(format!("missing cell: instance {inst}, algorithm {alg}")))?;
            let (mean, std) = mean_std(rps);
            cells.push(CellStats {
                algorithm: alg.clone(),
                mean,
                std,
                runs: rps.len(),
                rank: 0,
            });
        }
        let means: Vec<f64> = cells.iter().map(|c| c.mean).collect();
        for (k, c) in cells.iter_mut().enumerate() {
            c.rank = 1 + means.iter().filter(|&&m| m < means[k]).count();
            rank_sum[k] += c.rank as f64;
        }
        instances.push(InstanceRanks {
            instance_id: inst.to_string(),
            cells,
        });
    }
    let n = instances.len() as f64;
    Ok(RankTable {
        algorithms,
        instances,
        average_rank: rank_sum.into_iter().map(|s| s / n).collect(),
    })
}

/// Writes each row's rank from the per-instance table.
pub fn assign_ranks(rows: &mut [ResultRow]) -> Result<RankTable> {
    let table = rank_report(rows)?;
    let lookup: BTreeMap<(&str, &str), usize> = table
        .instances
        .iter()
        .flat_map(|i| i.cells.iter().map(move |c| ((i.instance_id.as_str(), c.algorithm.as_str()), c.rank)))
        .collect();
    for r in rows.iter_mut() {
        r.rank = lookup[&(r.instance_id.as_str(), r.algorithm.as_str())];
    }
    Ok(table)
}

impl RankTable {
    pub fn average_rank_of(&self, algorithm: &str) -> Option<f64> {
        self.algorithms.iter().position(|a| a == algorithm).map(|k| self.average_rank[k])
    }

    pub fn rows(&self) -> Vec<ReportRow> {
        let mut out = Vec::new();
        for inst in &self.instances {
            for c in &inst.cells {
                out.push(ReportRow {
                    instance_id: inst.instance_id.clone(),
                    algorithm: c.algorithm.clone(),
                    mean_rp: Some(c.mean),
                    std_rp: Some(c.std),
                    runs: c.runs,
                    rank: c.rank as f64,
                });
            }
        }
        for (a, r) in self.algorithms.iter().zip(&self.average_rank) {
            out.push(ReportRow {
                instance_id: "average".into(),
                algorithm: a.clone(),
                mean_rp: None,
                std_rp: None,
                runs: 0,
                rank: *r,
            });
        }
        out
    }

    /// Plain-text table: one line per instance with `mean±std (rank)` per
    /// algorithm, then the average rank.
    pub fn render(&self) -> String {
        let id_w = self.instances.iter().map(|i| i.instance_id.len()).max().unwrap_or(0).max(8);
        let col_w = self.algorithms.iter().map(|a| a.len()).max().unwrap_or(0).max(22);
        let mut s = format!("{:id_w$}", "instance");
        for a in &self.algorithms {
            let _ = write!(s, "  {a:>col_w$}");
        }
        s.push('\n');
        for inst in &self.instances {
            let _ = write!(s, "{:id_w$}", inst.instance_id);
            for c in &inst.cells {
                let cell = format!("{:.4e}±{:.2e} ({})", c.mean, c.std, c.rank);
                let _ = write!(s, "  {cell:>col_w$}");
            }
            s.push('\n');
        }
        let _ = write!(s, "{:id_w$}", "avg rank");
        for r in &self.average_rank {
            let _ = write!(s, "  {:>col_w$}", format!("{r:.4}"));
        }
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(inst: &str, alg: &str, run: usize, rp: f64) -> ResultRow {
        ResultRow {
            instance_id: inst.into(),
            algorithm: alg.into(),
            run,
            seed: run as u64,
            e_off: rp,
            e_rand: 1.0,
            rp,
            rank: 0,
        }
    }

    #[test]
    fn single_algorithm_ranks_first_everywhere() {
        let rows = vec![row("a", "x", 0, 0.3), row("b", "x", 0, 0.9)];
        let t = rank_report(&rows).unwrap();
        assert!(t.instances.iter().all(|i| i.cells[0].rank == 1));
        assert_eq!(t.average_rank, vec![1.0]);
    }

    #[test]
    fn better_mean_everywhere_gives_ranks_one_and_two() {
        let mut rows = Vec::new();
        for inst in ["p", "q", "r"] {
            rows.push(row(inst, "good", 0, 0.1));
            rows.push(row(inst, "bad", 0, 0.2));
        }
        let t = rank_report(&rows).unwrap();
        assert_eq!(t.average_rank_of("good"), Some(1.0));
        assert_eq!(t.average_rank_of("bad"), Some(2.0));
    }

    #[test]
    fn ties_share_the_lower_rank() {
        let rows = vec![row("a", "b", 0, 0.5), row("a", "a", 0, 0.5), row("a", "c", 0, 0.7)];
        let t = rank_report(&rows).unwrap();
        let ranks: Vec<(String, usize)> = t.instances[0].cells.iter().map(|c| (c.algorithm.clone(), c.rank)).collect();
        assert_eq!(ranks, vec![("a".into(), 1), ("b".into(), 1), ("c".into(), 3)]);
    }

    #[test]
    fn missing_cell_is_an_error() {
        let rows = vec![row("a", "x", 0, 0.1), row("a", "y", 0, 0.2), row("b", "x", 0, 0.3)];
        assert!(matches!(rank_report(&rows), Err(HarnessError::Report(_))));
        assert!(rank_report(&[]).is_err());
    }

    #[test]
    fn sample_deviation_over_runs() {
        let rows = vec![row("a", "x", 0, 1.0), row("a", "x", 1, 3.0)];
        let c = &rank_report(&rows).unwrap().instances[0].cells[0];
        assert_eq!((c.mean, c.runs), (2.0, 2));
        assert!((c.std - 2f64.sqrt()).abs() < 1e-12);
    }
}
