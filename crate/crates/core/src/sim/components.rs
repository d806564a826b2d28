use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::stl::{robustness_series, Formula, SpecSet, Trace};

/// Names of the per-step components, in logging order.
pub const COMPONENT_NAMES: [&str; 10] = ["s1", "s2", "s3", "s4", "l1", "l2", "l3", "l4", "S", "L"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("specification set has no formula named {0:?}")]
pub struct MissingSpec(pub String);

/// Robustness of each landing-task component at one step.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ComponentRobustness {
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
    pub s4: f64,
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
    pub l4: f64,
    #[serde(rename = "S")]
    pub safety: f64,
    #[serde(rename = "L")]
    pub landing: f64,
}

impl ComponentRobustness {
    pub fn safety_parts(&self) -> [f64; 4] {
        [self.s1, self.s2, self.s3, self.s4]
    }

    pub fn landing_parts(&self) -> [f64; 4] {
        [self.l1, self.l2, self.l3, self.l4]
    }

    fn from_array(v: [f64; 10]) -> Self {
        let [s1, s2, s3, s4, l1, l2, l3, l4, safety, landing] = v;
        Self {
            s1,
            s2,
            s3,
            s4,
            l1,
            l2,
            l3,
            l4,
            safety,
            landing,
        }
    }
}

/// The ten per-step formulas pulled out of a [`SpecSet`].
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentSpecs {
    formulas: Vec<Formula>,
}

impl ComponentSpecs {
    pub fn from_set(set: &SpecSet) -> Result<Self, MissingSpec> {
        let formulas = COMPONENT_NAMES
            .iter()
            .map(|name| {
                set.get(name)
                    .cloned()
                    .ok_or_else(|| MissingSpec((*name).into()))
            })
            .collect::<Result<_, _>>()?;
        Ok(Self { formulas })
    }

    pub fn table1() -> Self {
        Self::from_set(&SpecSet::table1()).expect("bundled specification defines every component")
    }

    /// Per-step robustness of every component.
    pub fn evaluate(&self, trace: &Trace) -> Vec<ComponentRobustness> {
        let series: Vec<Vec<f64>> = self
            .formulas
            .iter()
            .map(|f| robustness_series(f, trace))
            .collect();
        (0..trace.len())
            .map(|i| {
                let mut row = [0.0; 10];
                for (slot, s) in row.iter_mut().zip(&series) {
                    *slot = s[i];
                }
                ComponentRobustness::from_array(row)
            })
            .collect()
    }
}
