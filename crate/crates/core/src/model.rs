//! Canonical mixed-integer descriptions of the cycle-based lot-sizing models.
//!
//! Each submodel has, per period `t`, the closing inventory `I_t` (expected
//! value), an order indicator `delta_t`, cycle-start selectors `P_jt`, and the
//! expected holding and shortfall `H_t`, `B_t`. The `S` variant forces an
//! order in period 1 and leaves the post-order level `I_S_0` free; the `s`
//! variant forbids it, so `I_s_0` is the opening inventory. The joint model
//! holds both and links their costs.
//!
//! Indicator and piecewise constraints are kept in semantic form. The LP
//! writer lowers them to big-M rows.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::loss::{Partition, PiecewiseLoss};

pub type VarId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VarKind {
    Continuous,
    Binary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
}

impl Variable {
    pub fn is_fixed(&self) -> bool {
        self.lower == self.upper
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    fn lp(&self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }
}

/// `sum(coef * var) <sense> rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearRow {
    pub name: String,
    pub terms: Vec<(VarId, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl LinearRow {
    fn new(name: impl Into<String>, terms: Vec<(VarId, f64)>, sense: Sense, rhs: f64) -> Self {
        Self {
            name: name.into(),
            terms,
            sense,
            rhs,
        }
    }

    pub fn activity(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|(v, a)| a * values[*v]).sum()
    }

    pub fn violation(&self, values: &[f64]) -> f64 {
        let lhs = self.activity(values);
        match self.sense {
            Sense::Le => (lhs - self.rhs).max(0.0),
            Sense::Ge => (self.rhs - lhs).max(0.0),
            Sense::Eq => (lhs - self.rhs).abs(),
        }
    }
}

/// `binary == active  =>  row`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Indicator {
    pub binary: VarId,
    pub active: bool,
    pub row: LinearRow,
}

/// `binary == 1  =>  target = max_i(a_i * argument + b_i) - (argument if shortfall)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseIndicator {
    pub name: String,
    pub binary: VarId,
    pub target: VarId,
    pub argument: VarId,
    pub lines: Vec<(f64, f64)>,
    pub shortfall: bool,
}

impl PiecewiseIndicator {
    pub fn value_at(&self, x: f64) -> f64 {
        let v = self
            .lines
            .iter()
            .map(|(a, b)| a * x + b)
            .fold(f64::NEG_INFINITY, f64::max);
        if self.shortfall {
            v - x
        } else {
            v
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelKind {
    /// No order in the first period; `I_s_0` is the opening inventory.
    ReorderPoint,
    /// Order forced in the first period; `I_S_0` is the post-order level.
    OrderUpTo,
    /// Both submodels with the cost link.
    Joint,
}

/// Piecewise approximations for every convolved demand `d_jt`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentTable {
    cum_means: Vec<f64>,
    // pieces[t][j], 0-based, j <= t; each centred at zero
    pieces: Vec<Vec<PiecewiseLoss>>,
    cells: usize,
}

impl SegmentTable {
    pub fn new(instance: &Instance, partition: &Partition) -> Self {
        let n = instance.horizon();
        let mut cum_means = vec![0.0; n + 1];
        for t in 0..n {
            cum_means[t + 1] = cum_means[t] + instance.demands[t].mean;
        }
        let pieces = (0..n)
            .map(|t| {
                (0..=t)
                    .map(|j| {
                        let var: f64 = instance.demands[j..=t].iter().map(|d| d.std_dev.powi(2)).sum();
                        PiecewiseLoss::new(partition, 0.0, var.sqrt())
                    })
                    .collect()
            })
            .collect();
        Self {
            cum_means,
            pieces,
            cells: partition.cells(),
        }
    }

    pub fn horizon(&self) -> usize {
        self.pieces.len()
    }

    /// Number of partition cells; each approximation has one more line.
    pub fn cells(&self) -> usize {
        self.cells
    }

    /// Approximation for the demand of periods `j..=t` (1-based), centred at zero.
    pub fn piece(&self, j: usize, t: usize) -> &PiecewiseLoss {
        &self.pieces[t - 1][j - 1]
    }

    /// Expected demand of periods `j..=t` (1-based).
    pub fn mean(&self, j: usize, t: usize) -> f64 {
        self.cum_means[t] - self.cum_means[j - 1]
    }

    /// Expected demand of periods `1..=t`.
    pub fn cumulative_mean(&self, t: usize) -> f64 {
        self.cum_means[t]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelOptions {
    /// Also emit the aggregated lower-bounding rows for `H` and `B`.
    pub cut_rows: bool,
}

impl Default for ModelOptions {
    fn default() -> Self {
        Self { cut_rows: true }
    }
}

/// Variable ids of one submodel; vectors are indexed by 1-based period with
/// slot 0 unused, `p[t][j]` likewise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubmodelLayout {
    pub tag: char,
    pub initial: VarId,
    pub inventory: Vec<VarId>,
    pub delta: Vec<VarId>,
    pub p: Vec<Vec<VarId>>,
    pub holding: Vec<VarId>,
    pub shortfall: Vec<VarId>,
}

/// Problem data the exact backend works from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelStructure {
    pub kind: ModelKind,
    /// First period of the suffix this model describes (1 for the full horizon).
    pub offset: usize,
    pub instance: Instance,
    pub segments: SegmentTable,
    pub reorder: Option<SubmodelLayout>,
    pub order_up_to: Option<SubmodelLayout>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MilpModel {
    pub variables: Vec<Variable>,
    pub rows: Vec<LinearRow>,
    pub cuts: Vec<LinearRow>,
    pub indicators: Vec<Indicator>,
    pub piecewise: Vec<PiecewiseIndicator>,
    pub objective: Vec<(VarId, f64)>,
    pub objective_constant: f64,
    pub big_m: f64,
    pub structure: ModelStructure,
    #[serde(skip)]
    index: HashMap<String, VarId>,
}

impl MilpModel {
    pub fn kind(&self) -> ModelKind {
        self.structure.kind
    }

    pub fn horizon(&self) -> usize {
        self.structure.instance.horizon()
    }

    pub fn var_id(&self, name: &str) -> Option<VarId> {
        if self.index.is_empty() {
            return self.variables.iter().position(|v| v.name == name);
        }
        self.index.get(name).copied()
    }

    pub fn binaries(&self) -> impl Iterator<Item = VarId> + '_ {
        self.variables
            .iter()
            .enumerate()
            .filter(|(_, v)| v.kind == VarKind::Binary)
            .map(|(i, _)| i)
    }

    /// Objective value of an assignment, constant included.
    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.objective_constant + self.objective.iter().map(|(v, a)| a * values[*v]).sum::<f64>()
    }

    /// Restricts the bounds of a variable.
    pub fn set_bounds(&mut self, name: &str, lower: f64, upper: f64) -> Result<()> {
        let id = self
            .var_id(name)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown variable `{name}`")))?;
        self.variables[id].lower = lower;
        self.variables[id].upper = upper;
        Ok(())
    }

    /// Largest constraint violation of an assignment, with the row name.
    /// Rows are scanned in declaration order; ties keep the first row.
    pub fn worst_violation(&self, values: &[f64]) -> (String, f64) {
        let mut worst = (String::new(), 0.0);
        let mut consider = |name: &str, v: f64| {
            if v > worst.1 || v.is_nan() {
                worst = (name.to_string(), if v.is_nan() { f64::INFINITY } else { v });
            }
        };
        for (i, var) in self.variables.iter().enumerate() {
            let x = values[i];
            let mut v = (var.lower - x).max(0.0).max(x - var.upper);
            if var.kind == VarKind::Binary {
                v = v.max((x - x.round()).abs());
            }
            consider(&format!("bound:{}", var.name), v);
        }
        for row in self.rows.iter().chain(&self.cuts) {
            consider(&row.name, row.violation(values));
        }
        for ind in &self.indicators {
            if (values[ind.binary] > 0.5) == ind.active {
                consider(&ind.row.name, ind.row.violation(values));
            }
        }
        for pw in &self.piecewise {
            if values[pw.binary] > 0.5 {
                let want = pw.value_at(values[pw.argument]);
                consider(&pw.name, (values[pw.target] - want).abs());
            }
        }
        worst
    }

    /// Checks an assignment against every constraint.
    pub fn verify(&self, values: &[f64], tolerance: f64) -> Result<()> {
        if values.len() != self.variables.len() {
            return Err(Error::InvalidArgument(format!(
                "assignment has {} values for {} variables",
                values.len(),
                self.variables.len()
            )));
        }
        let (row, violation) = self.worst_violation(values);
        if violation > tolerance {
            return Err(Error::ConstraintViolation { row, violation });
        }
        Ok(())
    }

    fn rebuild_index(&mut self) {
        self.index = self
            .variables
            .iter()
            .enumerate()
            .map(|(i, v)| (v.name.clone(), i))
            .collect();
    }

    /// Writes the model in CPLEX LP format; see [`MilpModel::to_lp_string`].
    pub fn export_lp(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_lp_string()).map_err(|e| Error::io(path, e))
    }

    /// LP text. Indicators become big-M rows with the model's `M`; piecewise
    /// indicators use `5M` and, in the joint model, selector binaries
    /// `z_<m>_<t>_<i>` for the upper envelope. Expected inventories are boxed
    /// to `[-2M, 2M]`. The objective constant is reported in a comment.
    pub fn to_lp_string(&self) -> String {
        LpWriter::new(self).write()
    }
}

struct Builder {
    vars: Vec<Variable>,
    rows: Vec<LinearRow>,
    links: Vec<LinearRow>,
    cuts: Vec<LinearRow>,
    indicators: Vec<Indicator>,
    piecewise: Vec<PiecewiseIndicator>,
}

impl Builder {
    fn new() -> Self {
        Self {
            vars: Vec::new(),
            rows: Vec::new(),
            links: Vec::new(),
            cuts: Vec::new(),
            indicators: Vec::new(),
            piecewise: Vec::new(),
        }
    }

    fn var(&mut self, name: String, kind: VarKind, lower: f64, upper: f64) -> VarId {
        self.vars.push(Variable {
            name,
            kind,
            lower,
            upper,
        });
        self.vars.len() - 1
    }

    fn submodel(&mut self, tag: char, segs: &SegmentTable, first_order: bool, initial: Option<f64>, cuts: bool) -> SubmodelLayout {
        let n = segs.horizon();
        let inf = f64::INFINITY;
        let (lo, hi) = initial.map_or((-inf, inf), |v| (v, v));
        let initial = self.var(format!("I_{tag}_0"), VarKind::Continuous, lo, hi);
        let mut inventory = vec![initial];
        let mut delta = vec![usize::MAX];
        let mut holding = vec![usize::MAX];
        let mut shortfall = vec![usize::MAX];
        let mut p = vec![Vec::new()];
        for t in 1..=n {
            inventory.push(self.var(format!("I_{tag}_{t}"), VarKind::Continuous, -inf, inf));
        }
        for t in 1..=n {
            let (lo, hi) = match (t, first_order) {
                (1, true) => (1.0, 1.0),
                (1, false) => (0.0, 0.0),
                _ => (0.0, 1.0),
            };
            delta.push(self.var(format!("delta_{tag}_{t}"), VarKind::Binary, lo, hi));
        }
        for t in 1..=n {
            let mut row = vec![usize::MAX];
            for j in 1..=t {
                row.push(self.var(format!("P_{tag}_{j}_{t}"), VarKind::Binary, 0.0, 1.0));
            }
            p.push(row);
        }
        for t in 1..=n {
            holding.push(self.var(format!("H_{tag}_{t}"), VarKind::Continuous, 0.0, inf));
            shortfall.push(self.var(format!("B_{tag}_{t}"), VarKind::Continuous, 0.0, inf));
        }

        if first_order {
            self.rows.push(LinearRow::new(
                format!("start_{tag}"),
                vec![(initial, 1.0), (inventory[1], -1.0)],
                Sense::Eq,
                segs.mean(1, 1),
            ));
        }
        for t in 1..=n {
            let d = segs.mean(t, t);
            let terms = vec![(inventory[t], 1.0), (inventory[t - 1], -1.0)];
            self.rows.push(LinearRow::new(format!("bal_{tag}_{t}"), terms.clone(), Sense::Ge, -d));
            self.indicators.push(Indicator {
                binary: delta[t],
                active: false,
                row: LinearRow::new(format!("nobal_{tag}_{t}"), terms, Sense::Le, -d),
            });
        }
        for t in 1..=n {
            let terms = (1..=t).map(|j| (p[t][j], 1.0)).collect();
            self.rows.push(LinearRow::new(format!("assign_{tag}_{t}"), terms, Sense::Eq, 1.0));
        }
        for t in 1..=n {
            for j in 1..=t {
                // P_jt >= delta_j - sum_{k=j+1..t} delta_k; the opening stock
                // starts the first cycle, so delta_1 reads as 1 here
                let mut terms = vec![(p[t][j], 1.0)];
                let mut rhs = 0.0;
                if j == 1 {
                    rhs = 1.0;
                } else {
                    terms.push((delta[j], -1.0));
                }
                terms.extend((j + 1..=t).map(|k| (delta[k], 1.0)));
                self.links.push(LinearRow::new(format!("link_{tag}_{j}_{t}"), terms, Sense::Ge, rhs));
            }
        }
        for t in 1..=n {
            for j in 1..=t {
                let lines = segs.piece(j, t).lines();
                self.piecewise.push(PiecewiseIndicator {
                    name: format!("pwH_{tag}_{j}_{t}"),
                    binary: p[t][j],
                    target: holding[t],
                    argument: inventory[t],
                    lines: lines.clone(),
                    shortfall: false,
                });
                self.piecewise.push(PiecewiseIndicator {
                    name: format!("pwB_{tag}_{j}_{t}"),
                    binary: p[t][j],
                    target: shortfall[t],
                    argument: inventory[t],
                    lines,
                    shortfall: true,
                });
            }
        }
        if cuts {
            for t in 1..=n {
                let lines: Vec<Vec<(f64, f64)>> = (1..=t).map(|j| segs.piece(j, t).lines()).collect();
                for i in 0..lines[0].len() {
                    let slope = lines[0][i].0;
                    let mut h = vec![(holding[t], 1.0), (inventory[t], -slope)];
                    let mut b = vec![(shortfall[t], 1.0), (inventory[t], 1.0 - slope)];
                    for j in 1..=t {
                        let c = lines[j - 1][i].1;
                        h.push((p[t][j], -c));
                        b.push((p[t][j], -c));
                    }
                    self.cuts.push(LinearRow::new(format!("cutH_{tag}_{t}_{i}"), h, Sense::Ge, 0.0));
                    self.cuts.push(LinearRow::new(format!("cutB_{tag}_{t}_{i}"), b, Sense::Ge, 0.0));
                }
            }
        }
        SubmodelLayout {
            tag,
            initial,
            inventory,
            delta,
            p,
            holding,
            shortfall,
        }
    }
}

/// Cost terms of one submodel without the constant `c * sum(mean)`.
fn cost_terms(layout: &SubmodelLayout, instance: &Instance, skip_first_period: bool) -> Vec<(VarId, f64)> {
    let c = instance.costs;
    let n = instance.horizon();
    let mut terms = vec![];
    if c.unit != 0.0 {
        terms.push((layout.initial, -c.unit));
    }
    for t in 1..=n {
        if skip_first_period && t == 1 {
            continue;
        }
        terms.push((layout.delta[t], c.fixed));
        terms.push((layout.holding[t], c.holding));
        terms.push((layout.shortfall[t], c.penalty));
    }
    if c.unit != 0.0 {
        terms.push((layout.inventory[n], c.unit));
    }
    terms
}

fn big_m(instance: &Instance, initial: f64) -> f64 {
    let mean: f64 = instance.demands.iter().map(|d| d.mean).sum();
    let var: f64 = instance.demands.iter().map(|d| d.std_dev.powi(2)).sum();
    // the reorder level can sit below zero by about K/b: the backlog at which
    // one period of shortfall pays for an order
    mean + 6.0 * var.sqrt() + initial.abs() + 2.0 * instance.costs.fixed / instance.costs.penalty
}

fn check_inputs(instance: &Instance, segments: &SegmentTable) -> Result<()> {
    if instance.horizon() == 0 {
        return Err(Error::ModelBuild("horizon 0".into()));
    }
    instance.check()?;
    if segments.horizon() != instance.horizon() {
        return Err(Error::ModelBuild(format!(
            "segments cover {} periods but the instance has {}; pairs (j,t) are missing",
            segments.horizon(),
            instance.horizon()
        )));
    }
    Ok(())
}

fn finish(b: Builder, objective: Vec<(VarId, f64)>, constant: f64, m: f64, structure: ModelStructure) -> MilpModel {
    let mut rows = b.rows;
    rows.extend(b.links);
    let mut model = MilpModel {
        variables: b.vars,
        rows,
        cuts: b.cuts,
        indicators: b.indicators,
        piecewise: b.piecewise,
        objective,
        objective_constant: constant,
        big_m: m,
        structure,
        index: HashMap::new(),
    };
    model.rebuild_index();
    model
}

/// Model without a first-period order. With `initial_inventory` set, the
/// opening inventory is fixed; otherwise it is free and the optimum
/// approximates `min_y G(y)`.
pub fn build_minlp_s(
    instance: &Instance,
    segments: &SegmentTable,
    initial_inventory: Option<f64>,
    options: &ModelOptions,
) -> Result<MilpModel> {
    check_inputs(instance, segments)?;
    let mut b = Builder::new();
    let layout = b.submodel('s', segments, false, initial_inventory, options.cut_rows);
    let objective = cost_terms(&layout, instance, false);
    let constant = instance.costs.unit * segments.cumulative_mean(instance.horizon());
    let m = big_m(instance, initial_inventory.unwrap_or(instance.initial_inventory));
    let structure = ModelStructure {
        kind: ModelKind::ReorderPoint,
        offset: 1,
        instance: instance.clone(),
        segments: segments.clone(),
        reorder: Some(layout),
        order_up_to: None,
    };
    Ok(finish(b, objective, constant, m, structure))
}

/// Model with a forced first-period order and a free order-up-to level.
#[allow(non_snake_case)]
pub fn build_minlp_S(instance: &Instance, segments: &SegmentTable, options: &ModelOptions) -> Result<MilpModel> {
    check_inputs(instance, segments)?;
    let mut b = Builder::new();
    let layout = b.submodel('S', segments, true, None, options.cut_rows);
    let objective = cost_terms(&layout, instance, false);
    let constant = instance.costs.unit * segments.cumulative_mean(instance.horizon());
    let m = big_m(instance, instance.initial_inventory);
    let structure = ModelStructure {
        kind: ModelKind::OrderUpTo,
        offset: 1,
        instance: instance.clone(),
        segments: segments.clone(),
        reorder: None,
        order_up_to: Some(layout),
    };
    Ok(finish(b, objective, constant, m, structure))
}

/// Both submodels, `I_s_0 <= I_S_1 + d_1`, and the cost link
/// `G^s(I_s_0) = C^S(I_S_1 + d_1)`. The objective is the order-up-to cost
/// plus the reorder-point cost without its first-period terms.
pub fn build_joint(instance: &Instance, segments: &SegmentTable, options: &ModelOptions) -> Result<MilpModel> {
    check_inputs(instance, segments)?;
    let mut b = Builder::new();
    let up = b.submodel('S', segments, true, None, options.cut_rows);
    let re = b.submodel('s', segments, false, None, options.cut_rows);
    let d1 = segments.mean(1, 1);
    b.links.push(LinearRow::new(
        "order_link",
        vec![(re.initial, 1.0), (up.inventory[1], -1.0)],
        Sense::Le,
        d1,
    ));
    // G^s(I_s_0) - C^S(I_S_1 + d_1) = 0; the shared constant cancels
    let c = instance.costs.unit;
    let mut link = cost_terms(&re, instance, false);
    for (v, a) in cost_terms(&up, instance, false) {
        if v == up.initial {
            link.push((up.inventory[1], -a));
        } else {
            link.push((v, -a));
        }
    }
    b.links.push(LinearRow::new("cost_link", link, Sense::Eq, -c * d1));
    let mut objective = cost_terms(&up, instance, false);
    objective.extend(cost_terms(&re, instance, true));
    let constant = 2.0 * c * segments.cumulative_mean(instance.horizon());
    let m = big_m(instance, instance.initial_inventory);
    let structure = ModelStructure {
        kind: ModelKind::Joint,
        offset: 1,
        instance: instance.clone(),
        segments: segments.clone(),
        reorder: Some(re),
        order_up_to: Some(up),
    };
    Ok(finish(b, objective, constant, m, structure))
}

struct LpWriter<'a> {
    model: &'a MilpModel,
    out: String,
    // P values forced by fixed deltas, when every delta is fixed
    forced: HashMap<VarId, f64>,
}

impl<'a> LpWriter<'a> {
    fn new(model: &'a MilpModel) -> Self {
        let mut forced = HashMap::new();
        for layout in [&model.structure.reorder, &model.structure.order_up_to].into_iter().flatten() {
            let n = layout.inventory.len() - 1;
            let fixed: Option<Vec<bool>> = (1..=n)
                .map(|t| {
                    let v = &model.variables[layout.delta[t]];
                    v.is_fixed().then_some(v.lower > 0.5)
                })
                .collect();
            if let Some(d) = fixed {
                let mut start = 1;
                for t in 1..=n {
                    if t > 1 && d[t - 1] {
                        start = t;
                    }
                    for j in 1..=t {
                        forced.insert(layout.p[t][j], if j == start { 1.0 } else { 0.0 });
                    }
                }
            }
        }
        Self {
            model,
            out: String::new(),
            forced,
        }
    }

    fn name(&self, v: VarId) -> &str {
        &self.model.variables[v].name
    }

    fn expr(&mut self, terms: &[(VarId, f64)]) {
        let mut merged: Vec<(VarId, f64)> = Vec::new();
        for &(v, a) in terms {
            match merged.iter_mut().find(|(w, _)| *w == v) {
                Some(slot) => slot.1 += a,
                None => merged.push((v, a)),
            }
        }
        merged.retain(|(_, a)| *a != 0.0);
        if merged.is_empty() {
            // an empty row still needs a variable
            merged.push((terms.first().map_or(0, |t| t.0), 0.0));
        }
        for (k, (v, a)) in merged.iter().enumerate() {
            if k > 0 && k % 6 == 0 {
                self.out.push_str("\n   ");
            }
            let sign = if *a < 0.0 { '-' } else { '+' };
            let name = self.model.variables[*v].name.clone();
            let _ = write!(self.out, " {sign} {} {name}", a.abs());
        }
    }

    fn row(&mut self, name: &str, terms: &[(VarId, f64)], sense: Sense, rhs: f64) {
        let _ = write!(self.out, " {name}:");
        self.expr(terms);
        let _ = writeln!(self.out, " {} {}", sense.lp(), rhs);
    }

    fn write(mut self) -> String {
        let m = self.model;
        let big = m.big_m;
        let pw_m = 5.0 * big;
        let kind = match m.structure.kind {
            ModelKind::ReorderPoint => "reorder-point",
            ModelKind::OrderUpTo => "order-up-to",
            ModelKind::Joint => "joint",
        };
        let _ = writeln!(self.out, "\\ model: {kind}, horizon {}, first period {}", m.horizon(), m.structure.offset);
        let _ = writeln!(self.out, "\\ big-M: {big}");
        let _ = writeln!(self.out, "\\ objective constant: {}", m.objective_constant);
        self.out.push_str("Minimize\n obj:");
        let obj = m.objective.clone();
        self.expr(&obj);
        self.out.push_str("\nSubject To\n");
        for r in &m.rows {
            self.row(&r.name, &r.terms, r.sense, r.rhs);
        }
        for r in &m.cuts {
            self.row(&r.name, &r.terms, r.sense, r.rhs);
        }
        for ind in &m.indicators {
            // delta = 0 => row (<=): row - M * delta <= rhs
            let mut terms = ind.row.terms.clone();
            let coef = if ind.active { big } else { -big };
            terms.push((ind.binary, coef));
            let rhs = ind.row.rhs + if ind.active { big } else { 0.0 };
            self.row(&ind.row.name, &terms, ind.row.sense, rhs);
        }
        let joint = m.structure.kind == ModelKind::Joint;
        let mut selectors: Vec<(String, Vec<String>)> = Vec::new();
        let mut z_names: HashMap<(VarId, usize), String> = HashMap::new();
        if joint {
            for layout in [&m.structure.order_up_to, &m.structure.reorder].into_iter().flatten() {
                let n = layout.inventory.len() - 1;
                let lines = m.structure.segments.cells() + 1;
                for t in 1..=n {
                    let names: Vec<String> = (0..lines).map(|i| format!("z_{}_{t}_{i}", layout.tag)).collect();
                    for (i, z) in names.iter().enumerate() {
                        z_names.insert((layout.inventory[t], i), z.clone());
                    }
                    selectors.push((format!("zsum_{}_{t}", layout.tag), names));
                }
            }
        }
        for pw in &m.piecewise {
            let shift = if pw.shortfall { 1.0 } else { 0.0 };
            for (i, (a, b)) in pw.lines.iter().enumerate() {
                let terms = [(pw.target, 1.0), (pw.argument, -(a - shift)), (pw.binary, -pw_m)];
                self.row(&format!("{}_lo{i}", pw.name), &terms, Sense::Ge, b - pw_m);
            }
        }
        if joint {
            for (name, zs) in &selectors {
                let _ = write!(self.out, " {name}:");
                for (k, z) in zs.iter().enumerate() {
                    if k > 0 && k % 6 == 0 {
                        self.out.push_str("\n   ");
                    }
                    let _ = write!(self.out, " + 1 {z}");
                }
                self.out.push_str(" = 1\n");
            }
            for pw in &m.piecewise {
                let shift = if pw.shortfall { 1.0 } else { 0.0 };
                for (i, (a, b)) in pw.lines.iter().enumerate() {
                    let z = &z_names[&(pw.argument, i)];
                    let _ = write!(self.out, " {}_up{i}:", pw.name);
                    let terms = [(pw.target, 1.0), (pw.argument, -(a - shift)), (pw.binary, pw_m)];
                    self.expr(&terms);
                    let _ = writeln!(self.out, " + {pw_m} {z} <= {}", b + 2.0 * pw_m);
                }
            }
        }
        self.out.push_str("Bounds\n");
        let inventory_vars: Vec<VarId> = [&m.structure.order_up_to, &m.structure.reorder]
            .into_iter()
            .flatten()
            .flat_map(|l| l.inventory.iter().copied())
            .collect();
        for (i, v) in m.variables.iter().enumerate() {
            let name = self.name(i).to_string();
            if let Some(val) = self.forced.get(&i) {
                let _ = writeln!(self.out, " {name} = {val}");
                continue;
            }
            let (mut lo, mut hi) = (v.lower, v.upper);
            if inventory_vars.contains(&i) {
                lo = lo.max(-2.0 * big);
                hi = hi.min(2.0 * big);
            }
            if v.kind == VarKind::Binary {
                if v.is_fixed() {
                    let _ = writeln!(self.out, " {name} = {lo}");
                }
                continue;
            }
            if lo == hi {
                let _ = writeln!(self.out, " {name} = {lo}");
            } else if lo == f64::NEG_INFINITY && hi == f64::INFINITY {
                let _ = writeln!(self.out, " {name} free");
            } else if hi == f64::INFINITY {
                let _ = writeln!(self.out, " {name} >= {lo}");
            } else if lo == f64::NEG_INFINITY {
                let _ = writeln!(self.out, " -inf <= {name} <= {hi}");
            } else {
                let _ = writeln!(self.out, " {lo} <= {name} <= {hi}");
            }
        }
        let mut binaries: Vec<String> = m
            .binaries()
            .filter(|b| !self.forced.contains_key(b) && !m.variables[*b].is_fixed())
            .map(|b| self.name(b).to_string())
            .collect();
        for (_, zs) in &selectors {
            binaries.extend(zs.iter().cloned());
        }
        if !binaries.is_empty() {
            self.out.push_str("Binary\n");
            for chunk in binaries.chunks(8) {
                let _ = writeln!(self.out, " {}", chunk.join(" "));
            }
        }
        self.out.push_str("End\n");
        self.out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loss::{make_partition, PartitionStrategy};

    fn segments(inst: &Instance) -> SegmentTable {
        SegmentTable::new(inst, &make_partition(10, PartitionStrategy::Minimax).unwrap())
    }

    #[test]
    fn assignment_rows_cover_each_p_once() {
        let inst = Instance::worked_example();
        let model = build_joint(&inst, &segments(&inst), &ModelOptions::default()).unwrap();
        for layout in [&model.structure.reorder, &model.structure.order_up_to].into_iter().flatten() {
            for t in 1..=4 {
                for j in 1..=t {
                    let p = layout.p[t][j];
                    let n = model
                        .rows
                        .iter()
                        .filter(|r| r.name.starts_with("assign_") && r.terms.iter().any(|(v, _)| *v == p))
                        .count();
                    assert_eq!(n, 1);
                }
            }
        }
        for ind in &model.indicators {
            assert_eq!(model.variables[ind.binary].kind, VarKind::Binary);
        }
    }

    #[test]
    fn names_follow_the_scheme() {
        let inst = Instance::worked_example();
        let model = build_joint(&inst, &segments(&inst), &ModelOptions::default()).unwrap();
        for name in ["I_s_3", "I_S_0", "delta_S_1", "P_s_2_4", "H_S_2", "B_s_4"] {
            assert!(model.var_id(name).is_some(), "{name}");
        }
        assert_eq!(model.variables[model.var_id("delta_S_1").unwrap()].lower, 1.0);
        assert_eq!(model.variables[model.var_id("delta_s_1").unwrap()].upper, 0.0);
    }

    #[test]
    fn missing_segments_rejected() {
        let inst = Instance::worked_example();
        let short = Instance::worked_example().suffix(2).unwrap();
        let err = build_minlp_s(&inst, &segments(&short), None, &ModelOptions::default()).unwrap_err();
        assert!(matches!(err, Error::ModelBuild(_)));
    }

    #[test]
    fn export_is_deterministic() {
        let inst = Instance::worked_example();
        let model = build_joint(&inst, &segments(&inst), &ModelOptions::default()).unwrap();
        let a = model.to_lp_string();
        assert_eq!(a, model.to_lp_string());
        assert!(a.contains("Minimize") && a.contains("Binary") && a.ends_with("End\n"));
    }

    #[test]
    fn fixed_pattern_exports_pure_lp() {
        let inst = Instance::worked_example();
        let mut model = build_minlp_s(&inst, &segments(&inst), Some(10.0), &ModelOptions::default()).unwrap();
        for t in 2..=4 {
            let v = if t == 3 { 1.0 } else { 0.0 };
            model.set_bounds(&format!("delta_s_{t}"), v, v).unwrap();
        }
        let lp = model.to_lp_string();
        assert!(!lp.contains("Binary"), "{lp}");
        assert!(lp.contains(" P_s_3_4 = 1\n"));
    }
}
