//! Analytical GPU models: hardware occupancy and the MWP-CWP cycle
//! estimate, each as a direct implementation and as an emitted rational
//! program.

mod device;
mod emit;
mod mwpcwp;
mod occupancy;

pub use device::{DeviceError, DeviceProfile, FieldKind, KernelMetrics, LaunchConfig, MetricsError};
pub use emit::{
    emit_mwpcwp_rp, hardware_bindings, EmitError, MetricEvalError, MetricFunctions, MetricSource,
    CONFIG_INPUTS, INFEASIBLE, TOTAL_CYCLES,
};
pub use mwpcwp::{mwpcwp_cycles, mwpcwp_cycles_with, CaseInputs, CaseTag, ModelError, MwpCwpBreakdown, RepMode};
pub use occupancy::{active_blocks, active_warps, emit_occupancy_rp, occupancy, OCCUPANCY_INPUTS};
