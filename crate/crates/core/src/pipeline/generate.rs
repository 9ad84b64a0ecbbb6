use alloc::vec::Vec;

use super::{MetricModelSet, PipelineError};
use crate::perfmodel::{emit_mwpcwp_rp, emit_occupancy_rp, hardware_bindings, DeviceProfile, RepMode};
use crate::ratir::{validate, RationalProgram, Var};

fn checked(rp: RationalProgram) -> Result<RationalProgram, PipelineError> {
    let report = validate(&rp);
    if report.is_valid() {
        Ok(rp)
    } else {
        Err(PipelineError::InvalidProgram(report.violations))
    }
}

/// Cycle-estimate program with the fitted metrics inlined and the hardware
/// fields baked in as literals. Inputs are the used data parameters and
/// `bx by bz`.
pub fn generate_rp(
    models: &MetricModelSet,
    hw: &DeviceProfile,
    rep_mode: RepMode,
) -> Result<RationalProgram, PipelineError> {
    hw.validate()?;
    let metrics = models.metric_functions()?;
    let rp = emit_mwpcwp_rp(&models.param_names, &metrics, rep_mode)?;
    checked(rp.specialize(&hardware_bindings(hw)))
}

/// Occupancy program in `R Z T` with the device limits baked in. Its output
/// is `W_active`.
pub fn generate_occupancy_rp(hw: &DeviceProfile) -> Result<RationalProgram, PipelineError> {
    hw.validate()?;
    let limits: Vec<(Var, crate::Rational)> = hardware_bindings(hw)
        .into_iter()
        .filter(|(v, _)| ["R_max", "Z_max", "T_max", "B_max", "W_max"].contains(&v.as_str()))
        .collect();
    checked(emit_occupancy_rp().specialize(&limits))
}
