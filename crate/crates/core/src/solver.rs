//! Exact optimization of the canonical models at desk scale, and import of
//! solutions produced by external solvers.
//!
//! The binaries of these models only encode when orders happen. For a fixed
//! order pattern each cycle's expected cost is a convex piecewise-linear
//! function of its post-order level. Writing `z_k = y_k + (expected demand
//! before cycle k)`, non-negative order quantities become `z_1 <= z_2 <= ...`,
//! and the remaining problem is solved exactly by pooling adjacent violators.
//! Patterns are enumerated in waves of equal order count so that the fixed
//! cost bound prunes deterministically.

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{MilpModel, ModelKind, SegmentTable, SubmodelLayout, VarId};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    /// Constraint tolerance used to certify the returned assignment.
    pub tolerance: f64,
    /// Largest horizon handled by pattern enumeration.
    pub max_horizon: usize,
    /// Width at which the cost-link root bisection stops.
    pub root_tolerance: f64,
    /// Step of the downward scan that brackets the cost-link root.
    pub root_step: f64,
    /// Scan below the chosen root for further roots.
    pub detect_multiple_roots: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-7,
            max_horizon: 16,
            root_tolerance: 1e-10,
            root_step: 1.0,
            detect_multiple_roots: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    NodeLimit,
    /// Imported and validated, optimality not established.
    Feasible,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveResult {
    pub objective: f64,
    /// Values in model variable order.
    pub values: Vec<f64>,
    pub status: SolveStatus,
    /// Order patterns evaluated.
    pub node_count: u64,
    pub wall_time_secs: f64,
    /// Set for joint models when the cost link has another root below the
    /// one returned.
    pub multiple_roots: bool,
}

impl SolveResult {
    /// Equality of everything except the wall time.
    pub fn same_solution(&self, other: &SolveResult) -> bool {
        self.objective.to_bits() == other.objective.to_bits()
            && self.values.len() == other.values.len()
            && self.values.iter().zip(&other.values).all(|(a, b)| a.to_bits() == b.to_bits())
            && self.status == other.status
            && self.node_count == other.node_count
            && self.multiple_roots == other.multiple_roots
    }

    pub fn value(&self, model: &MilpModel, name: &str) -> Option<f64> {
        model.var_id(name).map(|i| self.values[i])
    }
}

/// Anything that can optimize a canonical model.
pub trait MilpBackend: Sync {
    fn solve(&self, model: &MilpModel) -> Result<SolveResult>;
}

/// Pattern enumeration with exact convex subproblems.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactBackend {
    pub options: SolveOptions,
}

impl MilpBackend for ExactBackend {
    fn solve(&self, model: &MilpModel) -> Result<SolveResult> {
        solve_exact(model, &self.options)
    }
}

// ---------------------------------------------------------------------------
// convex piecewise-linear pieces in the shifted coordinate z

#[derive(Clone)]
struct Block {
    base_slope: f64,
    kinks: Vec<(f64, f64)>,
    argmin: f64,
    cycles: usize,
}

/// Leftmost minimizer of the convex function with slope `base` at minus
/// infinity and slope increments `kinks`, restricted to `[lo, hi]`.
fn leftmost_argmin(base: f64, kinks: &mut [(f64, f64)], lo: f64, hi: f64) -> f64 {
    const FLAT: f64 = -1e-12;
    let raw = if base >= FLAT {
        f64::NEG_INFINITY
    } else {
        kinks.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut slope = base;
        let mut at = f64::INFINITY;
        for &(x, d) in kinks.iter() {
            slope += d;
            if slope >= FLAT {
                at = x;
                break;
            }
        }
        at
    };
    raw.clamp(lo, hi)
}

/// Data of one submodel needed to evaluate cycle costs.
struct Sub<'a> {
    segs: &'a SegmentTable,
    n: usize,
    fixed: f64,
    unit: f64,
    over: f64,
    under: f64,
    first_order: bool,
    /// allowed values of delta_t for t = 2..=n
    allowed: Vec<(bool, bool)>,
    lo: f64,
    hi: f64,
}

struct PatternSolution {
    value: f64,
    starts: Vec<usize>,
    levels: Vec<f64>,
}

impl<'a> Sub<'a> {
    fn new(model: &'a MilpModel, layout: &SubmodelLayout) -> Result<Self> {
        let inst = &model.structure.instance;
        let n = inst.horizon();
        let var = |id: VarId| &model.variables[id];
        let d1 = var(layout.delta[1]);
        if !d1.is_fixed() {
            return Err(Error::ModelBuild("first-period order indicator must be fixed".into()));
        }
        let allowed = (2..=n)
            .map(|t| {
                let v = var(layout.delta[t]);
                (v.lower <= 0.0, v.upper >= 1.0)
            })
            .collect();
        let init = var(layout.initial);
        Ok(Self {
            segs: &model.structure.segments,
            n,
            fixed: inst.costs.fixed,
            unit: inst.costs.unit,
            over: inst.costs.holding,
            under: inst.costs.penalty,
            first_order: d1.lower > 0.5,
            allowed,
            lo: init.lower,
            hi: init.upper,
        })
    }

    fn with_initial(&self, lo: f64, hi: f64) -> Sub<'a> {
        Sub {
            segs: self.segs,
            n: self.n,
            fixed: self.fixed,
            unit: self.unit,
            over: self.over,
            under: self.under,
            first_order: self.first_order,
            allowed: self.allowed.clone(),
            lo,
            hi,
        }
    }

    fn cycle_block(&self, a: usize, e: usize) -> Block {
        let slope = self.over + self.under;
        let mut base = -self.under * (e - a + 1) as f64;
        if a == 1 {
            base -= self.unit;
        }
        if e == self.n {
            base += self.unit;
        }
        let mut kinks = Vec::new();
        for t in a..=e {
            let piece = self.segs.piece(a, t);
            let shift = self.segs.cumulative_mean(t);
            for (x, p) in piece.breakpoints().iter().zip(piece.probabilities()) {
                kinks.push((shift + x, slope * p));
            }
        }
        Block {
            base_slope: base,
            kinks,
            argmin: 0.0,
            cycles: 1,
        }
    }

    fn cycle_cost(&self, a: usize, e: usize, z: f64, ordered: bool) -> f64 {
        let mut v = if ordered { self.fixed } else { 0.0 };
        for t in a..=e {
            let x = z - self.segs.cumulative_mean(t);
            let h = self.segs.piece(a, t).upper(x);
            v += self.over * h + self.under * (h - x);
        }
        if a == 1 {
            v -= self.unit * z;
        }
        if e == self.n {
            v += self.unit * (z - self.segs.cumulative_mean(self.n));
        }
        v
    }

    /// Optimal levels for the cycles starting at `starts` (first entry 1).
    fn solve_pattern(&self, starts: &[usize]) -> Result<PatternSolution> {
        let m = starts.len();
        let end = |k: usize| if k + 1 < m { starts[k + 1] - 1 } else { self.n };
        let mut stack: Vec<Block> = Vec::with_capacity(m);
        for k in 0..m {
            let mut blk = self.cycle_block(starts[k], end(k));
            let (lo, hi) = if k == 0 { (self.lo, self.hi) } else { (f64::NEG_INFINITY, f64::INFINITY) };
            blk.argmin = leftmost_argmin(blk.base_slope, &mut blk.kinks, lo, hi);
            stack.push(blk);
            while stack.len() >= 2 {
                let top = stack.len() - 1;
                if stack[top - 1].argmin <= stack[top].argmin {
                    break;
                }
                let last = stack.pop().unwrap();
                let prev = stack.last_mut().unwrap();
                prev.base_slope += last.base_slope;
                prev.kinks.extend(last.kinks);
                prev.cycles += last.cycles;
                let (lo, hi) = if stack.len() == 1 { (self.lo, self.hi) } else { (f64::NEG_INFINITY, f64::INFINITY) };
                let prev = stack.last_mut().unwrap();
                prev.argmin = leftmost_argmin(prev.base_slope, &mut prev.kinks, lo, hi);
            }
        }
        let mut levels = Vec::with_capacity(m);
        for blk in &stack {
            if !blk.argmin.is_finite() {
                return Err(Error::Unbounded(
                    "expected cost decreases without bound along an inventory level".into(),
                ));
            }
            levels.extend(std::iter::repeat(blk.argmin).take(blk.cycles));
        }
        let mut value = 0.0;
        for k in 0..m {
            let ordered = k > 0 || self.first_order;
            value += self.cycle_cost(starts[k], end(k), levels[k], ordered);
            // back to post-order levels
            levels[k] -= self.segs.cumulative_mean(starts[k] - 1);
        }
        Ok(PatternSolution {
            value,
            starts: starts.to_vec(),
            levels,
        })
    }

    /// Best pattern; ties go to the lexicographically smallest delta vector.
    fn enumerate(&self) -> Result<(PatternSolution, u64)> {
        if self.lo > self.hi {
            return Err(Error::Infeasible("initial inventory bounds are empty".into()));
        }
        let free: Vec<usize> = (0..self.n.saturating_sub(1)).filter(|&i| self.allowed[i].0 && self.allowed[i].1).collect();
        let forced: Vec<usize> = (0..self.n.saturating_sub(1)).filter(|&i| !self.allowed[i].0).collect();
        if (0..self.n.saturating_sub(1)).any(|i| !self.allowed[i].0 && !self.allowed[i].1) {
            return Err(Error::Infeasible("an order indicator has empty bounds".into()));
        }
        let prunable = self.unit == 0.0;
        let first = if self.first_order { 1.0 } else { 0.0 };
        let mut best: Option<(PatternSolution, Vec<bool>)> = None;
        let mut nodes = 0u64;
        for extra in 0..=free.len() {
            let orders = first + (forced.len() + extra) as f64;
            if let Some((b, _)) = &best {
                if prunable && self.fixed * orders > b.value {
                    break;
                }
            }
            let masks: Vec<u64> = (0u64..1 << free.len()).filter(|m| m.count_ones() as usize == extra).collect();
            nodes += masks.len() as u64;
            let wave: Vec<Result<(PatternSolution, Vec<bool>)>> = masks
                .par_iter()
                .map(|&mask| {
                    let mut delta = vec![false; self.n.saturating_sub(1)];
                    for &i in &forced {
                        delta[i] = true;
                    }
                    for (bit, &i) in free.iter().enumerate() {
                        if mask >> bit & 1 == 1 {
                            delta[i] = true;
                        }
                    }
                    let mut starts = vec![1];
                    starts.extend((0..delta.len()).filter(|&i| delta[i]).map(|i| i + 2));
                    Ok((self.solve_pattern(&starts)?, delta))
                })
                .collect();
            for r in wave {
                let cand = r?;
                let better = match &best {
                    None => true,
                    Some((b, d)) => cand.0.value < b.value || (cand.0.value == b.value && cand.1 < *d),
                };
                if better {
                    best = Some(cand);
                }
            }
        }
        let (sol, _) = best.ok_or_else(|| Error::Infeasible("no admissible order pattern".into()))?;
        Ok((sol, nodes))
    }
}

fn write_submodel(model: &MilpModel, layout: &SubmodelLayout, sol: &PatternSolution, values: &mut [f64]) {
    let segs = &model.structure.segments;
    let n = segs.horizon();
    values[layout.initial] = sol.levels[0];
    for t in 1..=n {
        values[layout.delta[t]] = if sol.starts.contains(&t) && (t > 1 || model.variables[layout.delta[1]].lower > 0.5) {
            1.0
        } else {
            0.0
        };
    }
    let mut k = 0;
    for t in 1..=n {
        while k + 1 < sol.starts.len() && sol.starts[k + 1] <= t {
            k += 1;
        }
        let a = sol.starts[k];
        let x = sol.levels[k] - segs.mean(a, t);
        let h = segs.piece(a, t).upper(x);
        values[layout.inventory[t]] = x;
        values[layout.holding[t]] = h;
        values[layout.shortfall[t]] = h - x;
        for j in 1..=t {
            values[layout.p[t][j]] = if j == a { 1.0 } else { 0.0 };
        }
    }
}

fn lower_scan_bound(model: &MilpModel) -> f64 {
    let inst = &model.structure.instance;
    let mean: f64 = inst.demands.iter().map(|d| d.mean).sum();
    let var: f64 = inst.demands.iter().map(|d| d.std_dev.powi(2)).sum();
    -(mean + 6.0 * var.sqrt())
}

/// Global optimum of a canonical model by order-pattern enumeration.
///
/// Joint models are solved by decomposition: the order-up-to part is
/// minimized, then the reorder level is the largest root of the cost link at
/// or below the order-up-to level.
pub fn solve_exact(model: &MilpModel, options: &SolveOptions) -> Result<SolveResult> {
    let started = Instant::now();
    let n = model.horizon();
    if n > options.max_horizon {
        return Err(Error::HorizonTooLarge {
            horizon: n,
            max: options.max_horizon,
        });
    }
    let mut values = vec![0.0; model.variables.len()];
    let mut nodes = 0;
    let mut multiple_roots = false;
    let st = &model.structure;
    match st.kind {
        ModelKind::ReorderPoint | ModelKind::OrderUpTo => {
            let layout = st.reorder.as_ref().or(st.order_up_to.as_ref()).expect("layout present");
            let sub = Sub::new(model, layout)?;
            let (sol, k) = sub.enumerate()?;
            nodes += k;
            write_submodel(model, layout, &sol, &mut values);
        }
        ModelKind::Joint => {
            let up_layout = st.order_up_to.as_ref().expect("joint has both parts");
            let re_layout = st.reorder.as_ref().expect("joint has both parts");
            let up = Sub::new(model, up_layout)?;
            let (up_sol, k) = up.enumerate()?;
            nodes += k;
            let target = up_sol.value;
            let big_s = up_sol.levels[0];
            let re = Sub::new(model, re_layout)?;
            // a free opening level has no hard floor: past the default one the
            // scan keeps going with a doubling stride
            let extendable = !re.lo.is_finite();
            let floor = if extendable { lower_scan_bound(model).min(big_s) } else { re.lo };
            let top = big_s.min(re.hi);
            let mut eval = |y: f64| -> Result<PatternSolution> {
                let (s, k) = re.with_initial(y, y).enumerate()?;
                nodes += k;
                Ok(s)
            };
            let at_top = eval(top)?;
            let root_sol;
            if at_top.value >= target - options.tolerance * 0.5 {
                root_sol = at_top;
            } else {
                // bracket: g(hi) < target <= g(lo)
                let mut hi = top;
                let mut hi_sol = at_top;
                let mut stride = options.root_step;
                let mut lo = hi - stride;
                loop {
                    if lo < floor && !extendable {
                        lo = floor;
                    }
                    let s = eval(lo)?;
                    if s.value >= target {
                        break;
                    }
                    if lo <= floor {
                        if !extendable || stride > 1e12 {
                            return Err(Error::NotBracketed { low: lo, high: top });
                        }
                        stride *= 2.0;
                    }
                    hi = lo;
                    hi_sol = s;
                    lo = hi - stride;
                }
                while hi - lo > options.root_tolerance * hi.abs().max(1.0) {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    let s = eval(mid)?;
                    if s.value >= target {
                        lo = mid;
                    } else {
                        hi = mid;
                        hi_sol = s;
                    }
                }
                if options.detect_multiple_roots {
                    let mut y = lo - options.root_step;
                    while y >= floor {
                        if eval(y)?.value < target - options.tolerance {
                            multiple_roots = true;
                            break;
                        }
                        y -= options.root_step;
                    }
                }
                root_sol = hi_sol;
            }
            write_submodel(model, up_layout, &up_sol, &mut values);
            write_submodel(model, re_layout, &root_sol, &mut values);
        }
    }
    model.verify(&values, options.tolerance)?;
    Ok(SolveResult {
        objective: model.objective_value(&values),
        values,
        status: SolveStatus::Optimal,
        node_count: nodes,
        wall_time_secs: started.elapsed().as_secs_f64(),
        multiple_roots,
    })
}

/// Reads `name value` lines (blank lines and `#` comments ignored), checks
/// every constraint within `1e-6` and recomputes the objective. Selector
/// variables of the LP lowering (`z_*`) are accepted and ignored.
pub fn import_solution(model: &MilpModel, path: impl AsRef<Path>) -> Result<SolveResult> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let started = Instant::now();
    let mut values = vec![f64::NAN; model.variables.len()];
    let mut seen = 0usize;
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(name), Some(raw), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: no + 1,
                column: 1,
                message: format!("expected `name value`, got `{line}`"),
            });
        };
        let value: f64 = raw.parse().map_err(|_| Error::Parse {
            path: path.to_path_buf(),
            line: no + 1,
            column: line.find(raw).unwrap_or(0) + 1,
            message: format!("`{raw}` is not a number"),
        })?;
        match model.var_id(name) {
            Some(id) => {
                if values[id].is_nan() {
                    seen += 1;
                }
                values[id] = value;
            }
            None if name.starts_with("z_") => {}
            None => return Err(Error::SolutionImport(format!("unknown variable `{name}` on line {}", no + 1))),
        }
    }
    if seen == 0 {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            column: 1,
            message: "no variable values".into(),
        });
    }
    if let Some(i) = values.iter().position(|v| v.is_nan()) {
        return Err(Error::SolutionImport(format!("missing value for `{}`", model.variables[i].name)));
    }
    model.verify(&values, 1e-6)?;
    Ok(SolveResult {
        objective: model.objective_value(&values),
        values,
        status: SolveStatus::Feasible,
        node_count: 0,
        wall_time_secs: started.elapsed().as_secs_f64(),
        multiple_roots: false,
    })
}

/// Per-period values of one submodel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubmodelValues {
    pub initial: f64,
    pub orders: Vec<bool>,
    pub inventory: Vec<f64>,
    pub holding: Vec<f64>,
    pub shortfall: Vec<f64>,
    /// Period whose order (or the opening stock, for 1) covers period t.
    pub cycle_start: Vec<usize>,
}

impl SubmodelValues {
    pub fn extract(layout: &SubmodelLayout, values: &[f64]) -> Self {
        let n = layout.inventory.len() - 1;
        Self {
            initial: values[layout.initial],
            orders: (1..=n).map(|t| values[layout.delta[t]] > 0.5).collect(),
            inventory: (1..=n).map(|t| values[layout.inventory[t]]).collect(),
            holding: (1..=n).map(|t| values[layout.holding[t]]).collect(),
            shortfall: (1..=n).map(|t| values[layout.shortfall[t]]).collect(),
            cycle_start: (1..=n)
                .map(|t| (1..=t).find(|&j| values[layout.p[t][j]] > 0.5).unwrap_or(0))
                .collect(),
        }
    }
}

/// Policy-relevant quantities of a solved joint model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointSolution {
    /// `I_S_0`, the order-up-to level.
    pub order_up_to: f64,
    /// `I_s_0`, the reorder point.
    pub reorder_point: f64,
    pub objective: f64,
    /// `C^S(I_S_0)`, equal to `G^s(I_s_0)` at the solution.
    pub linked_cost: f64,
    pub multiple_roots: bool,
    pub reorder: SubmodelValues,
    pub order_up_to_values: SubmodelValues,
}

impl JointSolution {
    pub fn from_result(model: &MilpModel, result: &SolveResult) -> Result<Self> {
        let st = &model.structure;
        let (Some(re), Some(up)) = (&st.reorder, &st.order_up_to) else {
            return Err(Error::InvalidArgument("not a joint model".into()));
        };
        let inst = &st.instance;
        let c = inst.costs;
        let mut linked = c.unit * st.segments.cumulative_mean(inst.horizon()) - c.unit * result.values[up.initial];
        for t in 1..=inst.horizon() {
            linked += c.fixed * result.values[up.delta[t]]
                + c.holding * result.values[up.holding[t]]
                + c.penalty * result.values[up.shortfall[t]];
        }
        linked += c.unit * result.values[up.inventory[inst.horizon()]];
        Ok(Self {
            order_up_to: result.values[up.initial],
            reorder_point: result.values[re.initial],
            objective: result.objective,
            linked_cost: linked,
            multiple_roots: result.multiple_roots,
            reorder: SubmodelValues::extract(re, &result.values),
            order_up_to_values: SubmodelValues::extract(up, &result.values),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{CostParameters, Instance, NormalDemand};
    use crate::loss::{make_partition, PartitionStrategy};
    use crate::model::{build_joint, build_minlp_S, build_minlp_s, ModelOptions};

    fn segs(inst: &Instance) -> SegmentTable {
        SegmentTable::new(inst, &make_partition(10, PartitionStrategy::Minimax).unwrap())
    }

    fn solve(model: &MilpModel) -> SolveResult {
        solve_exact(model, &SolveOptions::default()).unwrap()
    }

    #[test]
    fn free_reorder_model_matches_reference() {
        let inst = Instance::worked_example();
        let m = build_minlp_s(&inst, &segs(&inst), None, &ModelOptions::default()).unwrap();
        let r = solve(&m);
        assert!((r.objective - 266.1379).abs() < 1e-3, "{}", r.objective);
        assert!((r.value(&m, "I_s_0").unwrap() - 70.26579).abs() < 1e-4);
    }

    #[test]
    fn order_up_to_model_adds_k() {
        let inst = Instance::worked_example();
        let sg = segs(&inst);
        let free = solve(&build_minlp_s(&inst, &sg, None, &ModelOptions::default()).unwrap());
        let forced = solve(&build_minlp_S(&inst, &sg, &ModelOptions::default()).unwrap());
        assert!((forced.objective - free.objective - 100.0).abs() < 1e-7);
    }

    #[test]
    fn joint_model_reproduces_reference_levels() {
        let inst = Instance::worked_example();
        let m = build_joint(&inst, &segs(&inst), &ModelOptions::default()).unwrap();
        let r = solve(&m);
        let j = JointSolution::from_result(&m, &r).unwrap();
        assert!((j.order_up_to - 70.26579).abs() < 1e-4);
        assert!((j.reorder_point - 15.00084).abs() < 1e-4, "{}", j.reorder_point);
        assert!((j.linked_cost - 366.138).abs() < 1e-3);
        assert!(!j.multiple_roots);
        assert!(j.reorder_point <= j.order_up_to);
        assert!(j.order_up_to_values.orders[0] && !j.reorder.orders[0]);
    }

    #[test]
    fn zero_demand_costs_nothing() {
        let inst = Instance::new(
            CostParameters::new(50.0, 0.0, 1.0, 5.0),
            vec![NormalDemand::new(0.0, 0.0); 3],
            0.0,
        );
        let m = build_minlp_s(&inst, &segs(&inst), Some(0.0), &ModelOptions::default()).unwrap();
        let r = solve(&m);
        assert_eq!(r.objective, 0.0);
        for t in 1..=3 {
            assert_eq!(r.value(&m, &format!("delta_s_{t}")), Some(0.0));
        }
    }

    #[test]
    fn cut_rows_do_not_move_the_optimum() {
        let inst = Instance::worked_example();
        let sg = segs(&inst);
        let with = solve(&build_minlp_s(&inst, &sg, Some(15.0), &ModelOptions { cut_rows: true }).unwrap());
        let without = solve(&build_minlp_s(&inst, &sg, Some(15.0), &ModelOptions { cut_rows: false }).unwrap());
        assert_eq!(with.objective, without.objective);
    }

    #[test]
    fn fixed_pattern_skips_enumeration() {
        let inst = Instance::worked_example();
        let mut m = build_minlp_s(&inst, &segs(&inst), Some(20.0), &ModelOptions::default()).unwrap();
        for t in 2..=4 {
            m.set_bounds(&format!("delta_s_{t}"), 1.0, 1.0).unwrap();
        }
        let r = solve(&m);
        assert_eq!(r.node_count, 1);
        let mut relaxed = m.clone();
        relaxed.set_bounds("delta_s_3", 0.0, 1.0).unwrap();
        assert!(solve(&relaxed).objective <= r.objective);
    }

    #[test]
    fn deterministic_results() {
        let inst = Instance::worked_example();
        let m = build_joint(&inst, &segs(&inst), &ModelOptions::default()).unwrap();
        assert!(solve(&m).same_solution(&solve(&m)));
    }

    #[test]
    fn horizon_bound_is_enforced() {
        let inst = Instance::worked_example();
        let m = build_minlp_s(&inst, &segs(&inst), None, &ModelOptions::default()).unwrap();
        let opts = SolveOptions {
            max_horizon: 3,
            ..SolveOptions::default()
        };
        assert!(matches!(solve_exact(&m, &opts), Err(Error::HorizonTooLarge { .. })));
    }

    #[test]
    fn argmin_of_simple_functions() {
        let mut k = vec![(2.0, 1.0), (5.0, 1.0)];
        assert_eq!(leftmost_argmin(-1.0, &mut k, f64::NEG_INFINITY, f64::INFINITY), 2.0);
        assert_eq!(leftmost_argmin(-1.5, &mut k, f64::NEG_INFINITY, f64::INFINITY), 5.0);
        assert_eq!(leftmost_argmin(-1.5, &mut k, 0.0, 3.0), 3.0);
        assert_eq!(leftmost_argmin(-3.0, &mut k, f64::NEG_INFINITY, f64::INFINITY), f64::INFINITY);
    }
}
