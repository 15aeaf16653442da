// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::OpKind;
use crate::Duration;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorClass {
    pub name: String,
    #[serde(rename = "ops")]
    pub executes: Vec<OpKind>,
    pub latency: Duration,
}

impl OperatorClass {
    pub fn new(name: impl Into<String>, executes: &[OpKind], latency: Duration) -> Self {
        OperatorClass {
            name: name.into(),
            executes: executes.to_vec(),
            latency,
        }
    }
}

fn default_access() -> Duration {
    1
}

/// Ordered operator classes. Selection takes the first class executing a
/// symbol, so library order decides overlaps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorLibrary {
    pub classes: Vec<OperatorClass>,
    /// Informational; reported only.
    #[serde(default)]
    pub clock_hz: f64,
    /// Memory access time assumed while computing time windows.
    #[serde(default = "default_access")]
    pub access_latency: Duration,
}

impl OperatorLibrary {
    pub fn new(classes: Vec<OperatorClass>) -> Self {
        OperatorLibrary {
            classes,
            clock_hz: 0.0,
            access_latency: 1,
        }
    }

    /// Multiplier 2 cycles, adder and subtractor 1 cycle, memory access
    /// 1 cycle, 200 MHz clock.
    pub fn fft_reference() -> Self {
        OperatorLibrary {
            classes: vec![
                OperatorClass::new("sub", &[OpKind::Sub], 1),
                OperatorClass::new("add", &[OpKind::Add], 1),
                OperatorClass::new("mult", &[OpKind::Mul], 2),
            ],
            clock_hz: 200e6,
            access_latency: 1,
        }
    }

    /// Single-cycle multiplier and adder.
    pub fn unit_latency() -> Self {
        OperatorLibrary::new(vec![
            OperatorClass::new("mult", &[OpKind::Mul], 1),
            OperatorClass::new("add", &[OpKind::Add], 1),
            OperatorClass::new("sub", &[OpKind::Sub], 1),
        ])
    }

    pub fn select(&self, op: OpKind) -> Option<usize> {
        self.classes.iter().position(|c| c.executes.contains(&op))
    }

    pub fn class_index(&self, name: &str) -> Option<usize> {
        self.classes.iter().position(|c| c.name == name)
    }

    pub fn validate(&self) -> Result<()> {
        if self.access_latency == 0 {
            return Err(Error::Library("memory access latency must be at least 1".into()));
        }
        for (i, c) in self.classes.iter().enumerate() {
            if c.latency == 0 {
                return Err(Error::Library(format!("class `{}` has zero latency", c.name)));
            }
            if self.classes[..i].iter().any(|o| o.name == c.name) {
                return Err(Error::Library(format!("class `{}` declared twice", c.name)));
            }
        }
        Ok(())
    }

    /// Parses a library document:
    ///
    /// ```json
    /// { "clock_hz": 200e6, "access_latency": 1,
    ///   "classes": [ { "name": "mult", "ops": ["*"], "latency": 2 } ] }
    /// ```
    pub fn parse(text: &str) -> Result<Self> {
        let lib: OperatorLibrary = serde_json::from_str(text).map_err(Error::from_json)?;
        lib.validate()?;
        Ok(lib)
    }
}
