//! Versioned JSON report envelope shared by the CLI subcommands.

use serde::Serialize;

use crate::classify::{ST_SWEEP, UMST_OFFSETS, UMST_POINTS};
use crate::models::CACHE_SIZE;
use crate::moduli::{DELTA_GRID_LEN, STRONG_SWEEP, UC_SWEEP};
use crate::spec_file::ModelSpec;

/// Identifier of the report layout; bumped on incompatible changes.
pub const SCHEMA: &str = "planar-norms-report/1";

/// Resolution parameters every numeric result depends on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridParams {
    pub sphere_cache: usize,
    pub st_sweep: usize,
    pub uc_sweep: usize,
    pub strong_sweep: usize,
    pub delta_grid: usize,
    pub umst_points: usize,
    pub umst_offsets: usize,
}

impl Default for GridParams {
    fn default() -> Self {
        Self {
            sphere_cache: CACHE_SIZE,
            st_sweep: ST_SWEEP,
            uc_sweep: UC_SWEEP,
            strong_sweep: STRONG_SWEEP,
            delta_grid: DELTA_GRID_LEN,
            umst_points: UMST_POINTS,
            umst_offsets: UMST_OFFSETS,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report<T: Serialize> {
    pub schema: &'static str,
    pub tool_version: &'static str,
    pub command: String,
    pub model: Option<ModelSpec>,
    pub grid: GridParams,
    pub result: T,
}

impl<T: Serialize> Report<T> {
    pub fn new(command: impl Into<String>, model: Option<ModelSpec>, result: T) -> Self {
        Self {
            schema: SCHEMA,
            tool_version: env!("CARGO_PKG_VERSION"),
            command: command.into(),
            model,
            grid: GridParams::default(),
            result,
        }
    }

    /// Pretty JSON. Non-finite numbers are written as `null`; finite numbers
    /// use the shortest representation that round-trips exactly.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report types serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn envelope_fields() {
        let r = Report::new("test", Some(ModelSpec::Lp { p: 4.0 }), vec![0.1, f64::INFINITY]);
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["schema"], SCHEMA);
        assert_eq!(v["model"]["family"], "lp");
        assert_eq!(v["result"][0], 0.1);
        assert!(v["result"][1].is_null());
    }

    #[test]
    fn floats_round_trip() {
        let x: f64 = 0.1 + 0.2;
        let r = Report::new("t", None, x);
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["result"].as_f64().unwrap().to_bits(), x.to_bits());
    }
}
