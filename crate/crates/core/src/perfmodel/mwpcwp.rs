use core::fmt;
use core::str::FromStr;

use super::occupancy::{active_blocks, active_warps};
use super::{DeviceProfile, KernelMetrics, LaunchConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RepMode {
    /// `total_blocks / (B_active * num_SM)` as a real number.
    #[default]
    Real,
    /// The same ratio rounded up to whole waves.
    Ceil,
}

impl FromStr for RepMode {
    type Err = alloc::string::String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "real" => Ok(RepMode::Real),
            "ceil" => Ok(RepMode::Ceil),
            _ => Err(alloc::format!("unknown rep mode `{s}` (expected real or ceil)")),
        }
    }
}

impl fmt::Display for RepMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RepMode::Real => "real",
            RepMode::Ceil => "ceil",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseTag {
    BothSaturated,
    CwpBound,
    MwpBound,
}

impl CaseTag {
    pub fn as_str(self) -> &'static str {
        match self {
            CaseTag::BothSaturated => "both_saturated",
            CaseTag::CwpBound => "cwp_bound",
            CaseTag::MwpBound => "mwp_bound",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MwpCwpBreakdown {
    pub b_active: u64,
    /// Active warps per SM as given by occupancy. The formulas use
    /// `max(w_active, 1)` so that a lone partial warp still counts.
    pub w_active: u64,
    pub mem_cycles: f64,
    pub comp_cycles: f64,
    pub mwp: f64,
    pub cwp: f64,
    pub rep: f64,
    pub case_tag: CaseTag,
    pub cycles_pre_synch: f64,
    pub synch_cost: f64,
    pub total_cycles: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("configuration {0} cannot launch (zero active blocks)")]
    ZeroOccupancy(LaunchConfig),
}

/// Quantities the three-way case split reads, for `mem_insts > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseInputs {
    pub n: f64,
    pub mwp: f64,
    pub cwp: f64,
    pub mem_cycles: f64,
    pub comp_cycles: f64,
    pub mem_insts: f64,
    pub mem_latency: f64,
    pub rep: f64,
}

impl CaseInputs {
    /// The case and the cycles before synchronization.
    pub fn cycles_pre_synch(&self) -> (CaseTag, f64) {
        let CaseInputs {
            n,
            mwp,
            cwp,
            mem_cycles,
            comp_cycles,
            mem_insts,
            mem_latency,
            rep,
        } = *self;
        let per_mem = comp_cycles / mem_insts;
        if mwp == n && cwp == n {
            let pre = (mem_cycles + comp_cycles + per_mem * (mwp - 1.0)) * rep;
            (CaseTag::BothSaturated, pre)
        } else if cwp >= mwp || comp_cycles > mem_cycles {
            let pre = (mem_cycles * n / mwp + per_mem * (mwp - 1.0)) * rep;
            (CaseTag::CwpBound, pre)
        } else {
            (CaseTag::MwpBound, (mem_latency + comp_cycles * n) * rep)
        }
    }
}

pub fn mwpcwp_cycles(
    hw: &DeviceProfile,
    m: &KernelMetrics,
    config: &LaunchConfig,
) -> Result<MwpCwpBreakdown, ModelError> {
    mwpcwp_cycles_with(hw, m, config, RepMode::Real)
}

pub fn mwpcwp_cycles_with(
    hw: &DeviceProfile,
    m: &KernelMetrics,
    config: &LaunchConfig,
    rep_mode: RepMode,
) -> Result<MwpCwpBreakdown, ModelError> {
    let t = config.threads();
    let b_active = active_blocks(hw, m.regs_per_thread, m.shared_words_per_block, t);
    if b_active == 0 {
        return Err(ModelError::ZeroOccupancy(*config));
    }
    let w_active = active_warps(hw, b_active, t);
    let n = w_active.max(1) as f64;

    let mem_insts = m.uncoal_mem_insts_per_thread + m.coal_mem_insts_per_thread;
    let mem_l_coal = hw.mem_latency_cycles;
    let mem_l_uncoal =
        hw.mem_latency_cycles + (hw.uncoal_per_mw as f64 - 1.0) * hw.departure_del_uncoal_cycles;
    let r_uncoal = if mem_insts == 0.0 {
        0.0
    } else {
        m.uncoal_mem_insts_per_thread / mem_insts
    };
    let weighted_mem_l = r_uncoal * mem_l_uncoal + (1.0 - r_uncoal) * mem_l_coal;
    let departure_delay = r_uncoal * hw.departure_del_uncoal_cycles * hw.uncoal_per_mw as f64
        + (1.0 - r_uncoal) * hw.departure_del_coal_cycles;
    let mem_cycles =
        m.uncoal_mem_insts_per_thread * mem_l_uncoal + m.coal_mem_insts_per_thread * mem_l_coal;
    let comp_cycles = hw.issue_cycles * (m.comp_insts_per_thread + mem_insts);

    let mwp_no_bw = weighted_mem_l / departure_delay;
    let bw_per_warp = hw.freq_ghz * hw.load_bytes_per_warp as f64 / hw.mem_latency_cycles;
    let mwp_peak_bw = hw.mem_bandwidth_gbps / (bw_per_warp * hw.num_sm as f64);
    let cwp = if comp_cycles == 0.0 {
        n
    } else {
        ((mem_cycles + comp_cycles) / comp_cycles).min(n)
    };

    let rep = {
        let r = m.total_blocks / (b_active as f64 * hw.num_sm as f64);
        match rep_mode {
            RepMode::Real => r,
            RepMode::Ceil => libm::ceil(r),
        }
    };

    let (mwp, case_tag, pre) = if mem_insts == 0.0 {
        // compute only: MWP := N and the memory terms vanish
        (n, CaseTag::CwpBound, comp_cycles * rep)
    } else {
        let mwp = mwp_no_bw.min(mwp_peak_bw).min(n).max(1.0);
        let (tag, pre) = CaseInputs {
            n,
            mwp,
            cwp,
            mem_cycles,
            comp_cycles,
            mem_insts,
            mem_latency: hw.mem_latency_cycles,
            rep,
        }
        .cycles_pre_synch();
        (mwp, tag, pre)
    };
    let synch_cost =
        departure_delay * (mwp - 1.0) * m.synch_insts_per_block * b_active as f64 * rep;

    Ok(MwpCwpBreakdown {
        b_active,
        w_active,
        mem_cycles,
        comp_cycles,
        mwp,
        cwp,
        rep,
        case_tag,
        cycles_pre_synch: pre,
        synch_cost,
        total_cycles: pre + synch_cost,
    })
}
