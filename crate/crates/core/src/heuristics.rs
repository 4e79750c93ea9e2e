//! Policy heuristics built on the canonical models.
//!
//! Both work suffix by suffix: the parameters of period `k` come from models
//! over periods `k..T`. The joint heuristic solves the linked model once per
//! suffix; the binary search locates the reorder point by repeatedly solving
//! the reorder-point model with a fixed opening inventory.

use std::cell::Cell;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{Instance, PolicyParameters};
use crate::loss::{make_partition, Partition, PartitionStrategy};
use crate::model::{build_joint, build_minlp_s, ModelOptions, SegmentTable};
use crate::solver::{JointSolution, MilpBackend};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeuristicConfig {
    /// Linear pieces of each loss approximation (partition cells plus one).
    pub segments: usize,
    pub strategy: PartitionStrategy,
    /// Binary search step; `None` picks the horizon-dependent default.
    pub bs_step: Option<f64>,
    /// Lower end of the binary search. `None` starts from `-(sum mean + 6 sd)`
    /// of the suffix and widens the bracket when the reorder point lies lower.
    pub bs_lower_bound: Option<f64>,
    /// Cost band within which the binary search accepts a level.
    pub tolerance: f64,
    pub model: ModelOptions,
}

impl Default for HeuristicConfig {
    fn default() -> Self {
        Self {
            segments: 11,
            strategy: PartitionStrategy::Minimax,
            bs_step: None,
            bs_lower_bound: None,
            tolerance: 1e-4,
            model: ModelOptions::default(),
        }
    }
}

impl HeuristicConfig {
    pub fn check(&self) -> Result<()> {
        if self.segments < 3 {
            return Err(Error::InvalidArgument(format!(
                "need at least 3 linear pieces (2 partition cells), got {}",
                self.segments
            )));
        }
        if let Some(step) = self.bs_step {
            if !(step > 0.0) {
                return Err(Error::InvalidArgument(format!("step must be positive, got {step}")));
            }
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidArgument("tolerance must be positive".into()));
        }
        Ok(())
    }

    pub fn partition(&self) -> Result<Partition> {
        make_partition(self.segments - 1, self.strategy)
    }

    /// Step used for suffix `k` of a `horizon`-period instance: 1 for the
    /// first 15 suffixes of long horizons, 0.1 otherwise.
    pub fn step_for(&self, horizon: usize, k: usize) -> f64 {
        match self.bs_step {
            Some(s) => s,
            None if horizon > 16 && k <= 15 => 1.0,
            None => 0.1,
        }
    }
}

/// Policy with per-period diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeuristicPolicy {
    pub policy: PolicyParameters,
    /// `G_k^s(s_k)`, equal to `K + min G_k^s`.
    pub linked_costs: Vec<f64>,
    /// Another root of the cost link lies below `s_k` (joint heuristic).
    pub multiple_roots: Vec<bool>,
    /// The search ended on an empty bracket instead of the tolerance band.
    pub approximate: Vec<bool>,
    /// Fixed-inventory solves per period (binary search).
    pub evaluations: Vec<usize>,
}

fn suffix_data(instance: &Instance, k: usize, partition: &Partition) -> Result<(Instance, SegmentTable)> {
    let mut inst = instance.suffix(k)?;
    inst.initial_inventory = 0.0;
    let segs = SegmentTable::new(&inst, partition);
    Ok((inst, segs))
}

fn wrap<T>(k: usize, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Heuristic { k, source: Box::new(e) })
}

/// Joint-model heuristic: `S_k` and `s_k` from the linked model over `k..T`.
pub fn mp_policy(instance: &Instance, config: &HeuristicConfig, backend: &dyn MilpBackend) -> Result<HeuristicPolicy> {
    config.check()?;
    instance.check()?;
    let partition = config.partition()?;
    let n = instance.horizon();
    let per_k: Vec<Result<JointSolution>> = (1..=n)
        .into_par_iter()
        .map(|k| {
            wrap(k, (|| {
                let (inst, segs) = suffix_data(instance, k, &partition)?;
                let mut model = build_joint(&inst, &segs, &config.model)?;
                model.structure.offset = k;
                let result = backend.solve(&model)?;
                JointSolution::from_result(&model, &result)
            })())
        })
        .collect();
    let mut s = Vec::with_capacity(n);
    let mut big_s = Vec::with_capacity(n);
    let mut out = HeuristicPolicy {
        policy: PolicyParameters::new(vec![], vec![])?,
        linked_costs: vec![],
        multiple_roots: vec![],
        approximate: vec![false; n],
        evaluations: vec![0; n],
    };
    for r in per_k {
        let j = r?;
        s.push(j.reorder_point.min(j.order_up_to));
        big_s.push(j.order_up_to);
        out.linked_costs.push(j.linked_cost);
        out.multiple_roots.push(j.multiple_roots);
    }
    out.policy = PolicyParameters::new(s, big_s)?;
    Ok(out)
}

struct Search {
    s: f64,
    big_s: f64,
    linked: f64,
    approximate: bool,
    evaluations: usize,
}

fn search_suffix(instance: &Instance, k: usize, partition: &Partition, config: &HeuristicConfig, backend: &dyn MilpBackend) -> Result<Search> {
    let (inst, segs) = suffix_data(instance, k, partition)?;
    let mut free = build_minlp_s(&inst, &segs, None, &config.model)?;
    free.structure.offset = k;
    let free_sol = backend.solve(&free)?;
    let big_s = free_sol.value(&free, "I_s_0").expect("initial inventory variable");
    let g_min = free_sol.objective;
    let fixed = inst.costs.fixed;
    let linked = g_min + fixed;
    if fixed <= config.tolerance {
        return Ok(Search {
            s: big_s,
            big_s,
            linked,
            approximate: false,
            evaluations: 0,
        });
    }
    let step = config.step_for(instance.horizon(), k);
    let extendable = config.bs_lower_bound.is_none();
    let lower = config.bs_lower_bound.unwrap_or_else(|| {
        let mean: f64 = inst.demands.iter().map(|d| d.mean).sum();
        let var: f64 = inst.demands.iter().map(|d| d.std_dev.powi(2)).sum();
        -(mean + 6.0 * var.sqrt()).ceil()
    });
    let evaluations = Cell::new(0);
    let diff_at = |y: f64| -> Result<f64> {
        let model = build_minlp_s(&inst, &segs, Some(y), &config.model)?;
        evaluations.set(evaluations.get() + 1);
        Ok(backend.solve(&model)?.objective - g_min - fixed)
    };
    // the cost at the top of the bracket is K below the target
    let (mut low, mut high) = (lower, big_s);
    let (below, mut above) = (true, false);
    if extendable {
        // the default floor is a guess: probe it and double the bracket until
        // the cost there exceeds the target
        loop {
            let diff = diff_at(low)?;
            if diff > config.tolerance {
                above = true;
                low += step;
                break;
            }
            if diff >= -config.tolerance {
                return Ok(Search {
                    s: low,
                    big_s,
                    linked,
                    approximate: false,
                    evaluations: evaluations.get(),
                });
            }
            if big_s - low > 1e12 {
                return Err(Error::NotBracketed { low, high });
            }
            high = low - step;
            low = (big_s - 2.0 * (big_s - low)).floor();
        }
    }
    while low <= high {
        let mid = low + ((high - low) / (2.0 * step)).round() * step;
        let diff = diff_at(mid)?;
        if diff < -config.tolerance {
            high = mid - step;
        } else if diff > config.tolerance {
            above = true;
            low = mid + step;
        } else {
            return Ok(Search {
                s: mid,
                big_s,
                linked,
                approximate: false,
                evaluations: evaluations.get(),
            });
        }
    }
    if !(below && above) {
        return Err(Error::NotBracketed { low, high });
    }
    Ok(Search {
        s: (0.5 * (low + high)).min(big_s),
        big_s,
        linked,
        approximate: true,
        evaluations: evaluations.get(),
    })
}

/// Binary-search heuristic: `S_k` minimizes the free reorder-point model and
/// `s_k` is where its fixed-inventory cost reaches `K + min`.
pub fn bs_policy(instance: &Instance, config: &HeuristicConfig, backend: &dyn MilpBackend) -> Result<HeuristicPolicy> {
    config.check()?;
    instance.check()?;
    let partition = config.partition()?;
    let n = instance.horizon();
    let per_k: Vec<Result<Search>> = (1..=n)
        .into_par_iter()
        .map(|k| wrap(k, search_suffix(instance, k, &partition, config, backend)))
        .collect();
    let mut s = Vec::with_capacity(n);
    let mut big_s = Vec::with_capacity(n);
    let mut out = HeuristicPolicy {
        policy: PolicyParameters::new(vec![], vec![])?,
        linked_costs: vec![],
        multiple_roots: vec![false; n],
        approximate: vec![],
        evaluations: vec![],
    };
    for r in per_k {
        let r = r?;
        s.push(r.s);
        big_s.push(r.big_s);
        out.linked_costs.push(r.linked);
        out.approximate.push(r.approximate);
        out.evaluations.push(r.evaluations);
    }
    out.policy = PolicyParameters::new(s, big_s)?;
    Ok(out)
}

#[derive(Debug, Serialize, Deserialize)]
struct PolicyRow {
    t: usize,
    s_t: f64,
    #[serde(rename = "S_t")]
    big_s_t: f64,
    linked_cost: Option<f64>,
}

/// Writes `t,s_t,S_t,linked_cost` rows.
pub fn write_policy_csv(path: impl AsRef<Path>, policy: &PolicyParameters, linked_costs: Option<&[f64]>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path)?;
    for t in 1..=policy.len() {
        let (s, big_s) = policy.period(t);
        w.serialize(PolicyRow {
            t,
            s_t: s,
            big_s_t: big_s,
            linked_cost: linked_costs.map(|c| c[t - 1]),
        })?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads a policy file; rows must be numbered `1..=T` in order.
pub fn read_policy_csv(path: impl AsRef<Path>) -> Result<(PolicyParameters, Vec<Option<f64>>)> {
    let path = path.as_ref();
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
    let (mut s, mut big_s, mut costs) = (vec![], vec![], vec![]);
    for (i, row) in r.deserialize::<PolicyRow>().enumerate() {
        let row = row?;
        if row.t != i + 1 {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: i + 2,
                column: 1,
                message: format!("expected period {}, found {}", i + 1, row.t),
            });
        }
        s.push(row.s_t);
        big_s.push(row.big_s_t);
        costs.push(row.linked_cost);
    }
    if s.is_empty() {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            column: 1,
            message: "no policy rows".into(),
        });
    }
    Ok((PolicyParameters::new(s, big_s)?, costs))
}
