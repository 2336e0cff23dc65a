//! Seeded connectivity-threshold sweeps.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::connectivity::steiner_connectivity;
use crate::error::{Error, Result};
use crate::generate::{random_instance, InstanceParams};
use crate::packing::{decompose_and_pack, exact_pack, verify_packing, DecomposeConfig, PackOptions};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub seed: u64,
    pub n_min: usize,
    pub n_max: usize,
    /// Expected multiplicity of each vertex pair.
    pub density: f64,
    /// Number of terminal groups.
    pub t: usize,
    /// Vertices per group; 0 with `t == 1` makes every vertex a terminal.
    pub group_size: usize,
    pub k_min: usize,
    pub k_max: usize,
    pub trials: usize,
    /// Node budget for each exact search (0 = unlimited).
    pub budget: u64,
    pub decompose: DecomposeConfig,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            seed: 0,
            n_min: 5,
            n_max: 7,
            density: 1.0,
            t: 1,
            group_size: 0,
            k_min: 1,
            k_max: 2,
            trials: 10,
            budget: 200_000,
            decompose: DecomposeConfig { q: 9, ..DecomposeConfig::default() },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub id: u64,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub t: usize,
    pub connectivities: Vec<u64>,
    /// FEASIBLE, INFEASIBLE or TIMEOUT.
    pub exact: String,
    pub nodes: u64,
    /// FEASIBLE when the driver returned a verified packing, FAIL otherwise.
    pub decompose: String,
}

impl SweepRecord {
    pub fn min_connectivity(&self) -> u64 {
        self.connectivities.iter().copied().min().unwrap_or(0)
    }
}

/// Per-`k` counts of instances at or above a multiple of `k`, and how many
/// of those the exact search packed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub k: usize,
    pub factor: u64,
    pub instances: usize,
    pub feasible: usize,
    pub infeasible: usize,
    pub timeout: usize,
}

pub const REFERENCE_FACTORS: [u64; 3] = [2, 9, 36];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepReport {
    pub records: Vec<SweepRecord>,
    pub summary: Vec<SummaryRow>,
}

pub const CSV_HEADER: &str = "id,n,m,k,t,connectivities,exact,nodes,decompose";

impl SweepReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            let conn: Vec<String> = r.connectivities.iter().map(u64::to_string).collect();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.id,
                r.n,
                r.m,
                r.k,
                r.t,
                conn.join(";"),
                r.exact,
                r.nodes,
                r.decompose
            );
        }
        out
    }

    pub fn summary_csv(&self) -> String {
        let mut out = String::from("k,factor,instances,feasible,infeasible,timeout\n");
        for s in &self.summary {
            let _ = writeln!(out, "{},{},{},{},{},{}", s.k, s.factor, s.instances, s.feasible, s.infeasible, s.timeout);
        }
        out
    }
}

fn run_one(cfg: &SweepConfig, id: u64, n: usize, k: usize) -> Result<Option<SweepRecord>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(id));
    let params = InstanceParams {
        n,
        density: cfg.density,
        groups: cfg.t,
        group_size: cfg.group_size,
        min_connectivity: 0,
        max_tries: 1,
    };
    let Some((g, ts)) = random_instance(&mut rng, &params)? else {
        return Ok(None);
    };
    let mut connectivities = Vec::with_capacity(ts.groups.len());
    for grp in &ts.groups {
        connectivities.push(steiner_connectivity(&g, grp)?.0);
    }
    let (exact, stats) = exact_pack(&g, &ts, k, &PackOptions::with_budget(cfg.budget))?;
    let dec = decompose_and_pack(&g, &ts, k, &cfg.decompose)?;
    let decompose = match dec.packing() {
        Some(p) => {
            if !verify_packing(&g, &ts, p, &PackOptions::default()).passed() {
                return Err(Error::Invalid(format!("instance {id}: driver returned an invalid packing")));
            }
            "FEASIBLE"
        }
        None => "FAIL",
    };
    Ok(Some(SweepRecord {
        id,
        n,
        m: g.edge_count(),
        k,
        t: ts.groups.len(),
        connectivities,
        exact: exact.verdict().to_string(),
        nodes: stats.nodes,
        decompose: decompose.to_string(),
    }))
}

/// Runs every `(n, k, trial)` cell of the grid. Records are sorted by id, so
/// the CSV depends only on the configuration.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    if cfg.n_min > cfg.n_max || cfg.k_min > cfg.k_max || cfg.k_min == 0 {
        return Err(Error::Invalid("empty or invalid sweep range".into()));
    }
    let mut jobs = Vec::new();
    for n in cfg.n_min..=cfg.n_max {
        for k in cfg.k_min..=cfg.k_max {
            for _ in 0..cfg.trials {
                jobs.push((jobs.len() as u64, n, k));
            }
        }
    }
    let mut records: Vec<SweepRecord> = jobs
        .par_iter()
        .map(|&(id, n, k)| run_one(cfg, id, n, k))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    records.sort_by_key(|r| r.id);

    let mut summary = Vec::new();
    for k in cfg.k_min..=cfg.k_max {
        for f in REFERENCE_FACTORS {
            let hit: Vec<&SweepRecord> =
                records.iter().filter(|r| r.k == k && r.min_connectivity() >= f * k as u64).collect();
            let count = |v: &str| hit.iter().filter(|r| r.exact == v).count();
            summary.push(SummaryRow {
                k,
                factor: f,
                instances: hit.len(),
                feasible: count("FEASIBLE"),
                infeasible: count("INFEASIBLE"),
                timeout: count("TIMEOUT"),
            });
        }
    }
    Ok(SweepReport { records, summary })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k1_connected_instances_are_feasible() {
        let cfg = SweepConfig { n_min: 6, n_max: 6, k_min: 1, k_max: 1, trials: 20, density: 0.6, ..Default::default() };
        let rep = run_sweep(&cfg).unwrap();
        assert_eq!(rep.records.len(), 20);
        for r in &rep.records {
            if r.min_connectivity() >= 2 {
                assert_eq!(r.exact, "FEASIBLE", "{r:?}");
            }
        }
    }

    #[test]
    fn rerun_is_byte_identical() {
        let cfg = SweepConfig { n_min: 5, n_max: 6, k_min: 1, k_max: 2, trials: 4, t: 2, group_size: 2, ..Default::default() };
        let a = run_sweep(&cfg).unwrap();
        let b = run_sweep(&cfg).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        assert_eq!(a.summary_csv(), b.summary_csv());
        assert!(a.to_csv().starts_with(CSV_HEADER));
    }

    #[test]
    fn k2_records_infeasible_rows() {
        let cfg = SweepConfig { n_min: 5, n_max: 5, k_min: 2, k_max: 2, trials: 20, density: 0.5, ..Default::default() };
        let rep = run_sweep(&cfg).unwrap();
        assert!(rep.records.iter().any(|r| r.min_connectivity() < 2 && r.exact == "INFEASIBLE"));
    }
}
