use core::fmt;

/// Hardware description of one GPU model. Field names double as the keys of
/// the key=value profile format and as the hardware input names of emitted
/// programs (see [`DeviceProfile::FIELDS`]).
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceProfile {
    /// Registers per thread block.
    pub r_max: u64,
    /// Shared-memory words per thread block.
    pub z_max: u64,
    /// Threads per block.
    pub t_max: u64,
    /// Blocks per SM.
    pub b_max: u64,
    /// Warps per SM.
    pub w_max: u64,
    pub num_sm: u64,
    pub freq_ghz: f64,
    pub mem_latency_cycles: f64,
    pub departure_del_coal_cycles: f64,
    pub departure_del_uncoal_cycles: f64,
    pub mem_bandwidth_gbps: f64,
    pub issue_cycles: f64,
    pub load_bytes_per_warp: u64,
    /// Transactions per non-coalesced warp access.
    pub uncoal_per_mw: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Count,
    Real,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DeviceError {
    #[error("unknown device field `{0}`")]
    UnknownField(alloc::string::String),
    #[error("device field `{field}` must be {expected}, got {value}")]
    BadValue {
        field: &'static str,
        expected: &'static str,
        value: f64,
    },
    #[error("T_max = {0} exceeds 1024")]
    TooManyThreads(u64),
}

impl DeviceProfile {
    pub const FIELDS: [(&'static str, FieldKind); 14] = [
        ("R_max", FieldKind::Count),
        ("Z_max", FieldKind::Count),
        ("T_max", FieldKind::Count),
        ("B_max", FieldKind::Count),
        ("W_max", FieldKind::Count),
        ("num_SM", FieldKind::Count),
        ("freq_GHz", FieldKind::Real),
        ("mem_latency_cycles", FieldKind::Real),
        ("departure_del_coal_cycles", FieldKind::Real),
        ("departure_del_uncoal_cycles", FieldKind::Real),
        ("mem_bandwidth_GBps", FieldKind::Real),
        ("issue_cycles", FieldKind::Real),
        ("load_bytes_per_warp", FieldKind::Count),
        ("uncoal_per_mw", FieldKind::Count),
    ];

    pub fn field_names() -> impl Iterator<Item = &'static str> {
        Self::FIELDS.iter().map(|(n, _)| *n)
    }

    pub fn get(&self, field: &str) -> Option<f64> {
        Some(match field {
            "R_max" => self.r_max as f64,
            "Z_max" => self.z_max as f64,
            "T_max" => self.t_max as f64,
            "B_max" => self.b_max as f64,
            "W_max" => self.w_max as f64,
            "num_SM" => self.num_sm as f64,
            "freq_GHz" => self.freq_ghz,
            "mem_latency_cycles" => self.mem_latency_cycles,
            "departure_del_coal_cycles" => self.departure_del_coal_cycles,
            "departure_del_uncoal_cycles" => self.departure_del_uncoal_cycles,
            "mem_bandwidth_GBps" => self.mem_bandwidth_gbps,
            "issue_cycles" => self.issue_cycles,
            "load_bytes_per_warp" => self.load_bytes_per_warp as f64,
            "uncoal_per_mw" => self.uncoal_per_mw as f64,
            _ => return None,
        })
    }

    /// Sets one field by name. Count fields must hold a non-negative integer.
    pub fn set(&mut self, field: &str, value: f64) -> Result<(), DeviceError> {
        let (name, kind) = Self::FIELDS
            .iter()
            .find(|(n, _)| *n == field)
            .copied()
            .ok_or_else(|| DeviceError::UnknownField(field.into()))?;
        if !value.is_finite() || value < 0.0 {
            return Err(DeviceError::BadValue {
                field: name,
                expected: "finite and non-negative",
                value,
            });
        }
        if kind == FieldKind::Count && (libm::trunc(value) != value || value > u64::MAX as f64) {
            return Err(DeviceError::BadValue {
                field: name,
                expected: "an integer",
                value,
            });
        }
        let n = value as u64;
        match name {
            "R_max" => self.r_max = n,
            "Z_max" => self.z_max = n,
            "T_max" => self.t_max = n,
            "B_max" => self.b_max = n,
            "W_max" => self.w_max = n,
            "num_SM" => self.num_sm = n,
            "freq_GHz" => self.freq_ghz = value,
            "mem_latency_cycles" => self.mem_latency_cycles = value,
            "departure_del_coal_cycles" => self.departure_del_coal_cycles = value,
            "departure_del_uncoal_cycles" => self.departure_del_uncoal_cycles = value,
            "mem_bandwidth_GBps" => self.mem_bandwidth_gbps = value,
            "issue_cycles" => self.issue_cycles = value,
            "load_bytes_per_warp" => self.load_bytes_per_warp = n,
            _ => self.uncoal_per_mw = n,
        }
        Ok(())
    }

    /// All fields positive and `T_max <= 1024`.
    pub fn validate(&self) -> Result<(), DeviceError> {
        for (name, _) in Self::FIELDS {
            let v = self.get(name).unwrap_or(0.0);
            if !(v.is_finite() && v > 0.0) {
                return Err(DeviceError::BadValue {
                    field: name,
                    expected: "positive",
                    value: v,
                });
            }
        }
        if self.t_max > 1024 {
            return Err(DeviceError::TooManyThreads(self.t_max));
        }
        Ok(())
    }

    /// A Fermi-class profile with made-up but plausible numbers, for tests
    /// and examples. Not measured on any real device.
    pub fn synthetic() -> Self {
        DeviceProfile {
            r_max: 32768,
            z_max: 12288,
            t_max: 1024,
            b_max: 8,
            w_max: 48,
            num_sm: 14,
            freq_ghz: 1.15,
            mem_latency_cycles: 420.0,
            departure_del_coal_cycles: 4.0,
            departure_del_uncoal_cycles: 10.0,
            mem_bandwidth_gbps: 144.0,
            issue_cycles: 4.0,
            load_bytes_per_warp: 128,
            uncoal_per_mw: 32,
        }
    }
}

/// Low-level metrics of one kernel at one (data size, launch config) point.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMetrics {
    pub regs_per_thread: u64,
    pub shared_words_per_block: u64,
    pub comp_insts_per_thread: f64,
    pub mem_insts_per_thread: f64,
    pub uncoal_mem_insts_per_thread: f64,
    pub coal_mem_insts_per_thread: f64,
    pub synch_insts_per_block: f64,
    pub total_blocks: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MetricsError {
    #[error("metric `{name}` must be finite and non-negative, got {value}")]
    Negative { name: &'static str, value: f64 },
    #[error("coalesced + uncoalesced = {sum} differs from mem_insts = {mem}")]
    MemMismatch { sum: f64, mem: f64 },
}

impl KernelMetrics {
    pub const NAMES: [&'static str; 8] = [
        "regs_per_thread",
        "shared_words_per_block",
        "comp_insts_per_thread",
        "mem_insts_per_thread",
        "uncoal_mem_insts_per_thread",
        "coal_mem_insts_per_thread",
        "synch_insts_per_block",
        "total_blocks",
    ];

    /// Builds metrics with `mem_insts = uncoal + coal`.
    pub fn new(
        regs_per_thread: u64,
        shared_words_per_block: u64,
        comp_insts_per_thread: f64,
        uncoal_mem_insts_per_thread: f64,
        coal_mem_insts_per_thread: f64,
        synch_insts_per_block: f64,
        total_blocks: f64,
    ) -> Result<Self, MetricsError> {
        let m = KernelMetrics {
            regs_per_thread,
            shared_words_per_block,
            comp_insts_per_thread,
            mem_insts_per_thread: uncoal_mem_insts_per_thread + coal_mem_insts_per_thread,
            uncoal_mem_insts_per_thread,
            coal_mem_insts_per_thread,
            synch_insts_per_block,
            total_blocks,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        Some(match name {
            "regs_per_thread" => self.regs_per_thread as f64,
            "shared_words_per_block" => self.shared_words_per_block as f64,
            "comp_insts_per_thread" => self.comp_insts_per_thread,
            "mem_insts_per_thread" => self.mem_insts_per_thread,
            "uncoal_mem_insts_per_thread" => self.uncoal_mem_insts_per_thread,
            "coal_mem_insts_per_thread" => self.coal_mem_insts_per_thread,
            "synch_insts_per_block" => self.synch_insts_per_block,
            "total_blocks" => self.total_blocks,
            _ => return None,
        })
    }

    pub fn validate(&self) -> Result<(), MetricsError> {
        for name in Self::NAMES {
            let value = self.get(name).unwrap_or(f64::NAN);
            if !(value.is_finite() && value >= 0.0) {
                return Err(MetricsError::Negative { name, value });
            }
        }
        let sum = self.uncoal_mem_insts_per_thread + self.coal_mem_insts_per_thread;
        let mem = self.mem_insts_per_thread;
        if (sum - mem).abs() > 1e-9 * mem.abs().max(1.0) {
            return Err(MetricsError::MemMismatch { sum, mem });
        }
        Ok(())
    }
}

/// Threads per block along each dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LaunchConfig {
    pub bx: u64,
    pub by: u64,
    pub bz: u64,
}

impl LaunchConfig {
    pub const MAX_THREADS: u64 = 1024;

    /// `None` unless every dimension is at least 1 and `bx*by*bz <= 1024`.
    pub fn new(bx: u64, by: u64, bz: u64) -> Option<Self> {
        let t = bx.checked_mul(by)?.checked_mul(bz)?;
        (bx >= 1 && by >= 1 && bz >= 1 && t <= Self::MAX_THREADS).then_some(LaunchConfig { bx, by, bz })
    }

    pub fn threads(&self) -> u64 {
        self.bx * self.by * self.bz
    }
}

impl fmt::Display for LaunchConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.bx, self.by, self.bz)
    }
}
