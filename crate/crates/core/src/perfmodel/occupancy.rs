use crate::ratir::{BinOp, Label, Operand, ProgramBuilder, RationalProgram, Var};

use super::DeviceProfile;

/// Resident blocks per SM: the tightest of the block, warp, register and
/// shared-memory limits, or 0 when the kernel cannot launch.
pub fn active_blocks(hw: &DeviceProfile, r: u64, z: u64, t: u64) -> u64 {
    if t == 0 || t > hw.t_max {
        return 0;
    }
    let mut b = hw.b_max.min(hw.w_max / t.div_ceil(32));
    if r > 0 {
        let per_block = r as u128 * t as u128;
        b = b.min((hw.r_max as u128 / per_block) as u64);
    }
    if let Some(limit) = hw.z_max.checked_div(z) {
        b = b.min(limit);
    }
    b
}

pub fn active_warps(hw: &DeviceProfile, b_active: u64, t: u64) -> u64 {
    let w = (b_active as u128 * t as u128 / 32).min(hw.w_max as u128);
    w as u64
}

/// `W_active / W_max`.
pub fn occupancy(hw: &DeviceProfile, r: u64, z: u64, t: u64) -> f64 {
    if hw.w_max == 0 {
        return 0.0;
    }
    let w = active_warps(hw, active_blocks(hw, r, z, t), t);
    w as f64 / hw.w_max as f64
}

/// Hardware input names of the occupancy program, in declaration order.
pub const OCCUPANCY_INPUTS: [&str; 8] = ["R_max", "Z_max", "T_max", "B_max", "W_max", "R", "Z", "T"];

/// Emits the block limit into `b`. Control falls through to the code placed
/// after this call; `fail` is taken when the kernel cannot launch.
pub(crate) fn emit_active_blocks(
    b: &mut ProgramBuilder,
    hw: [&Operand; 5],
    r: Operand,
    z: Operand,
    t: Operand,
    out: &str,
    fail: Label,
) -> Var {
    let [r_max, z_max, t_max, b_max, w_max] = hw;
    let b_active = Var::new(out);

    let c = b.cmp(BinOp::CmpLt, t.clone(), Operand::int(1));
    let next = b.label();
    b.branch(c, fail, next);
    b.place(next);
    let c = b.cmp(BinOp::CmpLt, t_max.clone(), t.clone());
    let next = b.label();
    b.branch(c, fail, next);
    b.place(next);

    let warps_per_block = b.bin(BinOp::CeilDiv, t.clone(), Operand::int(32));
    let warp_limit = b.bin(BinOp::FloorDiv, w_max.clone(), warps_per_block);
    let m = b.min(b_max.clone(), warp_limit);
    b.assign(&b_active, m);

    let c = b.cmp(BinOp::CmpEq, r.clone(), Operand::int(0));
    let (skip, limit) = (b.label(), b.label());
    b.branch(c, skip, limit);
    b.place(limit);
    let regs = b.bin(BinOp::Mul, r, t);
    let reg_limit = b.bin(BinOp::FloorDiv, r_max.clone(), regs);
    let m = b.min(Operand::Var(b_active.clone()), reg_limit);
    b.assign(&b_active, m);
    b.place(skip);

    let c = b.cmp(BinOp::CmpEq, z.clone(), Operand::int(0));
    let (skip, limit) = (b.label(), b.label());
    b.branch(c, skip, limit);
    b.place(limit);
    let shared_limit = b.bin(BinOp::FloorDiv, z_max.clone(), z);
    let m = b.min(Operand::Var(b_active.clone()), shared_limit);
    b.assign(&b_active, m);
    b.place(skip);

    let c = b.cmp(BinOp::CmpLt, Operand::Var(b_active.clone()), Operand::int(1));
    let next = b.label();
    b.branch(c, fail, next);
    b.place(next);
    b_active
}

/// Rational program in [`OCCUPANCY_INPUTS`] evaluating `W_active`. Launch
/// failure (including `T < 1`) returns 0.
pub fn emit_occupancy_rp() -> RationalProgram {
    let mut b = ProgramBuilder::new();
    let ins: [Operand; 8] = OCCUPANCY_INPUTS.map(|n| b.input(n));
    let [r_max, z_max, t_max, b_max, w_max, r, z, t] = ins;
    let out = Var::new("W_active");
    let (fail, done) = (b.label(), b.label());

    let b_active = emit_active_blocks(
        &mut b,
        [&r_max, &z_max, &t_max, &b_max, &w_max],
        r,
        z,
        t.clone(),
        "B_active",
        fail,
    );
    let threads = b.bin(BinOp::Mul, Operand::Var(b_active), t);
    let warps = b.bin(BinOp::FloorDiv, threads, Operand::int(32));
    let w = b.min(warps, w_max);
    b.assign(&out, w);
    b.jump(done);

    b.place(fail);
    b.assign(&out, Operand::int(0));
    b.place(done);
    b.halt(&out);
    b.finish(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_kernel_hits_block_limit() {
        let hw = DeviceProfile::synthetic();
        // T*B_max <= 32*W_max, R*T*B_max <= R_max, Z*B_max <= Z_max
        assert_eq!(active_blocks(&hw, 8, 256, 128), hw.b_max);
    }

    #[test]
    fn launch_failures() {
        let hw = DeviceProfile::synthetic();
        assert_eq!(active_blocks(&hw, 8, 0, 2048), 0);
        assert_eq!(active_blocks(&hw, 8, 0, 0), 0);
        assert_eq!(active_blocks(&hw, 64, 0, 1024), 0);
        assert_eq!(active_blocks(&hw, 0, hw.z_max + 1, 32), 0);
        assert_eq!(occupancy(&hw, 8, 0, 2048), 0.0);
    }

    #[test]
    fn warps_from_blocks() {
        let hw = DeviceProfile::synthetic();
        assert_eq!(active_warps(&hw, 8, 128), 32);
        assert_eq!(active_warps(&hw, 0, 128), 0);
        assert_eq!(active_warps(&hw, 8, 1024), 48);
    }

    #[test]
    fn full_occupancy_is_exactly_one() {
        let hw = DeviceProfile::synthetic();
        // 6 blocks of 256 threads = 48 warps
        assert_eq!(active_blocks(&hw, 16, 0, 256), 6);
        assert_eq!(occupancy(&hw, 16, 0, 256), 1.0);
    }
}
