//! Monte Carlo evaluation of (s, S) policies.
//!
//! Replication `r` draws from a ChaCha8 stream keyed by `(seed, r)`, so the
//! result does not depend on how replications are scheduled across threads.

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{Instance, PolicyParameters};

/// Replications used for 8-period studies.
pub const DEFAULT_REPLICATIONS: usize = 10_000;
/// Replications used for long horizons.
pub const LONG_HORIZON_REPLICATIONS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationResult {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(replications)`; 0 for one replication.
    pub std_error: f64,
    pub replications: usize,
    pub seed: u64,
    pub initial_inventory: f64,
    /// Demand draws that came out negative and were replaced by 0.
    pub truncated_draws: u64,
    pub total_draws: u64,
}

impl SimulationResult {
    /// False when a single replication leaves the standard error undefined.
    pub fn std_error_defined(&self) -> bool {
        self.replications > 1
    }

    pub fn truncation_rate(&self) -> f64 {
        if self.total_draws == 0 {
            0.0
        } else {
            self.truncated_draws as f64 / self.total_draws as f64
        }
    }
}

fn replication(instance: &Instance, policy: &PolicyParameters, seed: u64, r: u64) -> (f64, u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(r);
    let costs = instance.costs;
    let mut level = instance.initial_inventory;
    let mut cost = 0.0;
    let mut truncated = 0;
    for (t, d) in instance.demands.iter().enumerate() {
        let (s, big_s) = policy.period(t + 1);
        if level <= s {
            cost += costs.fixed + costs.unit * (big_s - level);
            level = big_s;
        }
        let z: f64 = StandardNormal.sample(&mut rng);
        let mut demand = d.mean + d.std_dev * z;
        if demand < 0.0 {
            demand = 0.0;
            truncated += 1;
        }
        level -= demand;
        cost += costs.holding * level.max(0.0) + costs.penalty * (-level).max(0.0);
    }
    (cost, truncated)
}

/// Expected total cost of `policy` from the instance's initial inventory.
pub fn simulate_policy(instance: &Instance, policy: &PolicyParameters, replications: usize, seed: u64) -> Result<SimulationResult> {
    instance.check()?;
    if policy.len() != instance.horizon() {
        return Err(Error::InvalidArgument(format!(
            "policy has {} periods, instance has {}",
            policy.len(),
            instance.horizon()
        )));
    }
    if replications == 0 {
        return Err(Error::InvalidArgument("at least one replication is required".into()));
    }
    let runs: Vec<(f64, u64)> = (0..replications as u64)
        .into_par_iter()
        .map(|r| replication(instance, policy, seed, r))
        .collect();
    let n = replications as f64;
    let mean = runs.iter().map(|r| r.0).sum::<f64>() / n;
    let std_error = if replications > 1 {
        let ss: f64 = runs.iter().map(|r| (r.0 - mean).powi(2)).sum();
        (ss / (n - 1.0)).sqrt() / n.sqrt()
    } else {
        0.0
    };
    Ok(SimulationResult {
        mean,
        std_error,
        replications,
        seed,
        initial_inventory: instance.initial_inventory,
        truncated_draws: runs.iter().map(|r| r.1).sum(),
        total_draws: (replications * instance.horizon()) as u64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapEstimate {
    /// `100 * (mean - oracle) / oracle`.
    pub gap_pct: f64,
    /// Standard error of `gap_pct`.
    pub std_error_pct: f64,
    pub simulation: SimulationResult,
}

/// Optimality gap of `policy` against an oracle cost from the same start level.
pub fn estimate_gap(
    instance: &Instance,
    policy: &PolicyParameters,
    oracle_cost: f64,
    replications: usize,
    seed: u64,
) -> Result<GapEstimate> {
    if !(oracle_cost > 0.0) {
        return Err(Error::InvalidArgument(format!("oracle cost must be positive, got {oracle_cost}")));
    }
    let simulation = simulate_policy(instance, policy, replications, seed)?;
    Ok(GapEstimate {
        gap_pct: 100.0 * (simulation.mean - oracle_cost) / oracle_cost,
        std_error_pct: 100.0 * simulation.std_error / oracle_cost,
        simulation,
    })
}

/// One line of a simulation result file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationRow {
    pub instance_id: String,
    pub method: String,
    pub mean: f64,
    pub stderr: f64,
    pub replications: usize,
    pub seed: u64,
    pub gap_pct: Option<f64>,
}

impl SimulationRow {
    pub fn new(instance_id: &str, method: &str, result: &SimulationResult, gap_pct: Option<f64>) -> Self {
        Self {
            instance_id: instance_id.to_string(),
            method: method.to_string(),
            mean: result.mean,
            stderr: result.std_error,
            replications: result.replications,
            seed: result.seed,
            gap_pct,
        }
    }
}

pub fn write_simulation_csv(path: impl AsRef<Path>, rows: &[SimulationRow]) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{CostParameters, NormalDemand};

    fn reference_policy() -> PolicyParameters {
        PolicyParameters::new(vec![15.0, 29.01, 58.1, 29.01], vec![70.2658, 53.9768, 116.553, 53.9768]).unwrap()
    }

    #[test]
    fn deterministic_demand_has_exact_cost() {
        let inst = Instance::new(
            CostParameters::new(50.0, 2.0, 1.0, 10.0),
            vec![NormalDemand::new(10.0, 0.0); 4],
            0.0,
        );
        let pol = PolicyParameters::new(vec![0.0; 4], vec![20.0, 10.0, 20.0, 10.0]).unwrap();
        let r = simulate_policy(&inst, &pol, 100, 1).unwrap();
        // orders of 20 in periods 1 and 3, 10 units held after periods 1 and 3
        assert_eq!(r.mean, 2.0 * (50.0 + 40.0) + 20.0);
        assert_eq!(r.std_error, 0.0);
        assert_eq!(r.truncated_draws, 0);
    }

    #[test]
    fn same_seed_same_bits() {
        let inst = Instance::worked_example();
        let a = simulate_policy(&inst, &reference_policy(), 5000, 42).unwrap();
        let b = simulate_policy(&inst, &reference_policy(), 5000, 42).unwrap();
        assert_eq!(a, b);
        let c = simulate_policy(&inst, &reference_policy(), 5000, 43).unwrap();
        assert_ne!(a.mean, c.mean);
    }

    #[test]
    fn thread_count_does_not_matter() {
        let inst = Instance::worked_example();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let serial = pool.install(|| simulate_policy(&inst, &reference_policy(), 3000, 9).unwrap());
        let parallel = simulate_policy(&inst, &reference_policy(), 3000, 9).unwrap();
        assert_eq!(serial, parallel);
    }

    #[test]
    fn prefix_of_replications_is_stable() {
        // replication r uses the same stream whatever the total count
        let inst = Instance::worked_example();
        let one = simulate_policy(&inst, &reference_policy(), 1, 5).unwrap();
        let (first, _) = replication(&inst, &reference_policy(), 5, 0);
        assert_eq!(one.mean, first);
        assert!(!one.std_error_defined());
        assert_eq!(one.std_error, 0.0);
    }

    #[test]
    fn standard_error_matches_definition() {
        let inst = Instance::worked_example();
        let pol = reference_policy();
        let r = simulate_policy(&inst, &pol, 200, 3).unwrap();
        let xs: Vec<f64> = (0..200).map(|i| replication(&inst, &pol, 3, i).0).collect();
        let m = xs.iter().sum::<f64>() / 200.0;
        let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / 199.0;
        assert!((r.mean - m).abs() < 1e-9);
        assert!((r.std_error - (var / 200.0).sqrt()).abs() < 1e-9);
    }

    #[test]
    fn length_mismatch_rejected() {
        let inst = Instance::worked_example();
        let pol = PolicyParameters::new(vec![0.0], vec![1.0]).unwrap();
        assert!(simulate_policy(&inst, &pol, 10, 0).is_err());
        assert!(simulate_policy(&inst, &reference_policy(), 0, 0).is_err());
    }

    #[test]
    fn degraded_policy_has_larger_gap() {
        let inst = Instance::worked_example();
        let good = reference_policy();
        let bad = PolicyParameters::new(
            good.order_up_to().iter().map(|s| s - 1.0).collect(),
            good.order_up_to().to_vec(),
        )
        .unwrap();
        let g = estimate_gap(&inst, &good, 362.58, 20_000, 11).unwrap();
        let d = estimate_gap(&inst, &bad, 362.58, 20_000, 11).unwrap();
        assert!(d.gap_pct > g.gap_pct + 3.0 * (d.std_error_pct + g.std_error_pct));
        assert!(estimate_gap(&inst, &good, 0.0, 10, 0).is_err());
    }

    #[test]
    fn truncation_is_rare_at_moderate_cv() {
        let inst = Instance::with_cv(CostParameters::new(100.0, 0.0, 1.0, 10.0), &[20.0; 6], 0.3, 0.0);
        let pol = PolicyParameters::new(vec![10.0; 6], vec![60.0; 6]).unwrap();
        let r = simulate_policy(&inst, &pol, 20_000, 2).unwrap();
        assert!(r.truncation_rate() < 0.01, "{}", r.truncation_rate());
        assert!(r.truncated_draws > 0);
    }
}
