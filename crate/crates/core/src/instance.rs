//! Problem data: cost parameters, per-period normal demand, instances and
//! (s,S) policy parameters, plus the JSON instance file format.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Current version of the instance file schema.
pub const INSTANCE_SCHEMA_VERSION: u32 = 1;

/// Ordering, holding and penalty costs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostParameters {
    /// Fixed cost per order.
    pub fixed: f64,
    /// Cost per unit ordered.
    pub unit: f64,
    /// Holding cost per unit carried to the next period.
    pub holding: f64,
    /// Penalty per unit backordered at the end of a period.
    pub penalty: f64,
}

impl CostParameters {
    pub fn new(fixed: f64, unit: f64, holding: f64, penalty: f64) -> Self {
        Self {
            fixed,
            unit,
            holding,
            penalty,
        }
    }

    fn check(&self) -> Result<()> {
        let all = [self.fixed, self.unit, self.holding, self.penalty];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation("non-finite cost parameter".into()));
        }
        if self.fixed < 0.0 {
            return Err(Error::Validation("negative fixed ordering cost K".into()));
        }
        if self.unit < 0.0 {
            return Err(Error::Validation("negative unit cost c".into()));
        }
        if self.holding <= 0.0 {
            return Err(Error::Validation("holding cost h must be positive".into()));
        }
        if self.penalty <= 0.0 {
            return Err(Error::Validation("penalty cost b must be positive".into()));
        }
        Ok(())
    }
}

/// Normally distributed demand of one period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalDemand {
    pub mean: f64,
    pub std_dev: f64,
}

impl NormalDemand {
    pub fn new(mean: f64, std_dev: f64) -> Self {
        Self { mean, std_dev }
    }
}

/// A single-item, single-location stochastic lot-sizing instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub costs: CostParameters,
    pub demands: Vec<NormalDemand>,
    pub initial_inventory: f64,
}

impl Instance {
    pub fn new(costs: CostParameters, demands: Vec<NormalDemand>, initial_inventory: f64) -> Self {
        Self {
            costs,
            demands,
            initial_inventory,
        }
    }

    /// Instance with `std_dev = cv * mean` in every period.
    pub fn with_cv(costs: CostParameters, means: &[f64], cv: f64, initial_inventory: f64) -> Self {
        let demands = means
            .iter()
            .map(|&m| NormalDemand::new(m, cv * m))
            .collect();
        Self::new(costs, demands, initial_inventory)
    }

    /// The 4-period illustration used throughout the docs:
    /// K=100, c=0, h=1, b=10, means {20,40,60,40}, std_dev = 0.25 * mean.
    pub fn worked_example() -> Self {
        Self::with_cv(
            CostParameters::new(100.0, 0.0, 1.0, 10.0),
            &[20.0, 40.0, 60.0, 40.0],
            0.25,
            0.0,
        )
    }

    pub fn horizon(&self) -> usize {
        self.demands.len()
    }

    pub fn means(&self) -> Vec<f64> {
        self.demands.iter().map(|d| d.mean).collect()
    }

    pub fn std_devs(&self) -> Vec<f64> {
        self.demands.iter().map(|d| d.std_dev).collect()
    }

    /// Periods `k..=T` (1-based `k`) as a stand-alone instance.
    pub fn suffix(&self, k: usize) -> Result<Instance> {
        if k == 0 || k > self.horizon() {
            return Err(Error::InvalidArgument(format!(
                "suffix start {k} outside 1..={}",
                self.horizon()
            )));
        }
        Ok(Instance::new(
            self.costs,
            self.demands[k - 1..].to_vec(),
            self.initial_inventory,
        ))
    }

    /// Checks every invariant and reports the first violation.
    pub fn check(&self) -> Result<()> {
        if self.demands.is_empty() {
            return Err(Error::Validation("empty horizon".into()));
        }
        self.costs.check()?;
        if !self.initial_inventory.is_finite() {
            return Err(Error::Validation("non-finite initial inventory".into()));
        }
        for (i, d) in self.demands.iter().enumerate() {
            let t = i + 1;
            if !d.mean.is_finite() || !d.std_dev.is_finite() {
                return Err(Error::Validation(format!("non-finite demand in period {t}")));
            }
            if d.mean < 0.0 {
                return Err(Error::Validation(format!("negative mean in period {t}")));
            }
            if d.std_dev < 0.0 {
                return Err(Error::Validation(format!("negative std_dev in period {t}")));
            }
        }
        Ok(())
    }

    /// Returns the instance unchanged when all invariants hold.
    pub fn validate(self) -> Result<Self> {
        self.check()?;
        Ok(self)
    }
}

/// On-disk layout of an instance file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    version: u32,
    horizon: usize,
    #[serde(rename = "K")]
    fixed: f64,
    c: f64,
    h: f64,
    b: f64,
    initial_inventory: f64,
    demand_means: Vec<f64>,
    demand_std_devs: Vec<f64>,
}

impl From<&Instance> for InstanceFile {
    fn from(inst: &Instance) -> Self {
        Self {
            version: INSTANCE_SCHEMA_VERSION,
            horizon: inst.horizon(),
            fixed: inst.costs.fixed,
            c: inst.costs.unit,
            h: inst.costs.holding,
            b: inst.costs.penalty,
            initial_inventory: inst.initial_inventory,
            demand_means: inst.means(),
            demand_std_devs: inst.std_devs(),
        }
    }
}

fn parse_error(path: &Path, err: serde_json::Error) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line: err.line(),
        column: err.column(),
        message: err.to_string(),
    }
}

/// Parses an instance from JSON text. `origin` is only used in messages.
pub fn parse_instance(text: &str, origin: &Path) -> Result<Instance> {
    if text.trim().is_empty() {
        return Err(Error::Parse {
            path: origin.to_path_buf(),
            line: 1,
            column: 1,
            message: "empty file".into(),
        });
    }
    let raw: serde_json::Value = serde_json::from_str(text).map_err(|e| parse_error(origin, e))?;
    match raw.get("version").and_then(|v| v.as_u64()) {
        Some(v) if v as u32 == INSTANCE_SCHEMA_VERSION => {}
        Some(v) => {
            return Err(Error::SchemaVersion {
                path: origin.to_path_buf(),
                found: v as u32,
                expected: INSTANCE_SCHEMA_VERSION,
            })
        }
        None => {
            return Err(Error::Parse {
                path: origin.to_path_buf(),
                line: 1,
                column: 1,
                message: "missing integer field `version`".into(),
            })
        }
    }
    let file: InstanceFile = serde_json::from_str(text).map_err(|e| parse_error(origin, e))?;
    if file.demand_means.len() != file.horizon || file.demand_std_devs.len() != file.horizon {
        return Err(Error::Validation(format!(
            "horizon {} but {} means and {} std devs",
            file.horizon,
            file.demand_means.len(),
            file.demand_std_devs.len()
        )));
    }
    let demands = file
        .demand_means
        .iter()
        .zip(&file.demand_std_devs)
        .map(|(&m, &s)| NormalDemand::new(m, s))
        .collect();
    Instance::new(
        CostParameters::new(file.fixed, file.c, file.h, file.b),
        demands,
        file.initial_inventory,
    )
    .validate()
}

/// Serializes an instance to pretty-printed JSON.
pub fn instance_to_json(instance: &Instance) -> String {
    serde_json::to_string_pretty(&InstanceFile::from(instance)).expect("plain data serializes")
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<Instance> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_instance(&text, path)
}

pub fn write_instance(instance: &Instance, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut text = instance_to_json(instance);
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Per-period reorder points `s_t` and order-up-to levels `S_t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyParameters {
    reorder_points: Vec<f64>,
    order_up_to: Vec<f64>,
}

impl PolicyParameters {
    pub fn new(reorder_points: Vec<f64>, order_up_to: Vec<f64>) -> Result<Self> {
        if reorder_points.len() != order_up_to.len() {
            return Err(Error::InvalidArgument(format!(
                "{} reorder points but {} order-up-to levels",
                reorder_points.len(),
                order_up_to.len()
            )));
        }
        for (i, (s, big_s)) in reorder_points.iter().zip(&order_up_to).enumerate() {
            if !(s.is_finite() && big_s.is_finite()) || s > big_s {
                return Err(Error::InvalidArgument(format!(
                    "period {}: need s_t <= S_t, got s={s}, S={big_s}",
                    i + 1
                )));
            }
        }
        Ok(Self {
            reorder_points,
            order_up_to,
        })
    }

    pub fn len(&self) -> usize {
        self.order_up_to.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order_up_to.is_empty()
    }

    pub fn reorder_points(&self) -> &[f64] {
        &self.reorder_points
    }

    pub fn order_up_to(&self) -> &[f64] {
        &self.order_up_to
    }

    /// `(s_t, S_t)` for 1-based period `t`.
    pub fn period(&self, t: usize) -> (f64, f64) {
        (self.reorder_points[t - 1], self.order_up_to[t - 1])
    }
}
