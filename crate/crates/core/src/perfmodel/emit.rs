//! Rational-program emission of the MWP-CWP cycle estimate.
//!
//! The instruction set has no general division, so every quantity that may
//! be a quotient is carried as a pair `(num, den)` with `den != 0`: products
//! and sums combine pairs, a quotient swaps one pair, and `a < b` becomes a
//! sign test on `(a.num*b.den - b.num*a.den) * (a.den*b.den)`. Fitted metric
//! functions `p/q` enter as the pair `(p, q)`. The single output is the total
//! rounded down to a multiple of `2^-64`.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::polyfit::RationalFunction;
use crate::ratir::{BinOp, Label, Operand, ProgramBuilder, RationalProgram, Var};
use crate::Rational;

use super::occupancy::emit_active_blocks;
use super::{DeviceProfile, KernelMetrics, RepMode};

/// Launch-configuration inputs of the emitted program.
pub const CONFIG_INPUTS: [&str; 3] = ["bx", "by", "bz"];
/// Output variable of the emitted program.
pub const TOTAL_CYCLES: &str = "total_cycles";
/// Value returned for configurations that cannot run.
pub const INFEASIBLE: i64 = -1;

/// One kernel metric as a function of data and configuration parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum MetricSource {
    Constant(Rational),
    Fitted(RationalFunction),
}

/// The metrics the cycle model reads. `mem_insts_per_thread` is not listed:
/// it is always `uncoal + coal`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricFunctions {
    pub regs_per_thread: MetricSource,
    pub shared_words_per_block: MetricSource,
    pub comp_insts_per_thread: MetricSource,
    pub uncoal_mem_insts_per_thread: MetricSource,
    pub coal_mem_insts_per_thread: MetricSource,
    pub synch_insts_per_block: MetricSource,
    pub total_blocks: MetricSource,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EmitError {
    #[error("metric `{0}` is missing")]
    MissingMetric(&'static str),
    #[error("metric `{metric}` uses variable `{var}`, which is neither a data parameter nor bx/by/bz")]
    UnknownVariable { metric: &'static str, var: String },
    #[error("parameter name `{0}` is reserved or clashes with generated names")]
    BadParameterName(String),
    #[error("metric `{0}` has a non-finite coefficient")]
    NonFiniteCoefficient(&'static str),
    #[error("constant metric `{0}` is negative")]
    NegativeConstant(&'static str),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MetricEvalError {
    #[error("metric `{metric}` reads `{var}`, which has no value")]
    MissingVariable { metric: &'static str, var: String },
    #[error("metric `{0}` has a vanishing denominator here")]
    DenominatorZero(&'static str),
    #[error("metric `{metric}` is negative here ({value})")]
    Negative { metric: &'static str, value: f64 },
}

impl MetricFunctions {
    pub const NAMES: [&'static str; 7] = [
        "regs_per_thread",
        "shared_words_per_block",
        "comp_insts_per_thread",
        "uncoal_mem_insts_per_thread",
        "coal_mem_insts_per_thread",
        "synch_insts_per_block",
        "total_blocks",
    ];

    /// Collects the metrics by name.
    pub fn from_lookup(
        mut lookup: impl FnMut(&'static str) -> Option<MetricSource>,
    ) -> Result<Self, EmitError> {
        let mut take = |n| lookup(n).ok_or(EmitError::MissingMetric(n));
        Ok(MetricFunctions {
            regs_per_thread: take("regs_per_thread")?,
            shared_words_per_block: take("shared_words_per_block")?,
            comp_insts_per_thread: take("comp_insts_per_thread")?,
            uncoal_mem_insts_per_thread: take("uncoal_mem_insts_per_thread")?,
            coal_mem_insts_per_thread: take("coal_mem_insts_per_thread")?,
            synch_insts_per_block: take("synch_insts_per_block")?,
            total_blocks: take("total_blocks")?,
        })
    }

    pub fn get(&self, name: &str) -> Option<&MetricSource> {
        Some(match name {
            "regs_per_thread" => &self.regs_per_thread,
            "shared_words_per_block" => &self.shared_words_per_block,
            "comp_insts_per_thread" => &self.comp_insts_per_thread,
            "uncoal_mem_insts_per_thread" => &self.uncoal_mem_insts_per_thread,
            "coal_mem_insts_per_thread" => &self.coal_mem_insts_per_thread,
            "synch_insts_per_block" => &self.synch_insts_per_block,
            "total_blocks" => &self.total_blocks,
            _ => return None,
        })
    }

    fn iter(&self) -> impl Iterator<Item = (&'static str, &MetricSource)> {
        Self::NAMES.iter().map(move |&n| (n, self.get(n).expect("listed name")))
    }

    /// Binary64 evaluation at the point given by `names`/`values`.
    /// Register and shared-memory counts are rounded to the nearest integer
    /// (halves up).
    pub fn eval(&self, names: &[String], values: &[f64]) -> Result<KernelMetrics, MetricEvalError> {
        let lookup: BTreeMap<&str, f64> = names.iter().map(String::as_str).zip(values.iter().copied()).collect();
        let mut out = [0.0; 7];
        for (slot, (metric, src)) in out.iter_mut().zip(self.iter()) {
            let value = match src {
                MetricSource::Constant(c) => c.to_f64(),
                MetricSource::Fitted(f) => {
                    let point = f
                        .variables()
                        .iter()
                        .map(|v| {
                            lookup.get(v.as_str()).copied().ok_or_else(|| {
                                MetricEvalError::MissingVariable {
                                    metric,
                                    var: v.clone(),
                                }
                            })
                        })
                        .collect::<Result<Vec<f64>, _>>()?;
                    let p = f.num.eval(&point).unwrap_or(f64::NAN);
                    let q = f.den.eval(&point).unwrap_or(f64::NAN);
                    if q == 0.0 {
                        return Err(MetricEvalError::DenominatorZero(metric));
                    }
                    p / q
                }
            };
            if value.is_nan() || value < 0.0 {
                return Err(MetricEvalError::Negative { metric, value });
            }
            *slot = if metric == "regs_per_thread" || metric == "shared_words_per_block" {
                libm::floor(value + 0.5)
            } else {
                value
            };
        }
        let [r, z, comp, uncoal, coal, synch, blocks] = out;
        KernelMetrics::new(r as u64, z as u64, comp, uncoal, coal, synch, blocks).map_err(|_| {
            MetricEvalError::Negative {
                metric: "mem_insts_per_thread",
                value: uncoal + coal,
            }
        })
    }
}

/// Hardware field bindings for [`RationalProgram::specialize`] or evaluation.
pub fn hardware_bindings(hw: &DeviceProfile) -> Vec<(Var, Rational)> {
    DeviceProfile::field_names()
        .map(|n| {
            let v = hw.get(n).unwrap_or(0.0);
            (Var::new(n), Rational::from_f64(v).unwrap_or_else(Rational::zero))
        })
        .collect()
}

fn reserved(name: &str) -> bool {
    let generated = name
        .rsplit_once('_')
        .is_some_and(|(_, tail)| !tail.is_empty() && tail.bytes().all(|c| c.is_ascii_digit()));
    generated
        || name == TOTAL_CYCLES
        || CONFIG_INPUTS.contains(&name)
        || DeviceProfile::field_names().any(|f| f == name)
        || matches!(name, "B_active" | "W_active")
        || !Var::is_valid_name(name)
}

/// Rational program in the used data parameters, `bx by bz` and the
/// hardware fields, evaluating total cycles or [`INFEASIBLE`].
///
/// Data parameters no metric reads are left out of the inputs.
pub fn emit_mwpcwp_rp(
    params: &[String],
    metrics: &MetricFunctions,
    rep_mode: RepMode,
) -> Result<RationalProgram, EmitError> {
    for p in params {
        if reserved(p) {
            return Err(EmitError::BadParameterName(p.clone()));
        }
    }
    let mut used = Vec::new();
    for (metric, src) in metrics.iter() {
        match src {
            MetricSource::Constant(c) => {
                if c.is_negative() {
                    return Err(EmitError::NegativeConstant(metric));
                }
            }
            MetricSource::Fitted(f) => {
                let coeffs = f.num.coefficients.iter().chain(&f.den.coefficients);
                if coeffs.clone().any(|c| !c.is_finite()) {
                    return Err(EmitError::NonFiniteCoefficient(metric));
                }
                for v in f.variables() {
                    if !params.contains(v) && !CONFIG_INPUTS.contains(&v.as_str()) {
                        return Err(EmitError::UnknownVariable {
                            metric,
                            var: v.clone(),
                        });
                    }
                }
                used.extend(f.variables().iter().cloned());
            }
        }
    }

    let mut b = ProgramBuilder::new();
    let mut inputs: BTreeMap<String, Operand> = BTreeMap::new();
    for p in params.iter().filter(|p| used.contains(p)) {
        inputs.insert(p.clone(), b.input(p));
    }
    for c in CONFIG_INPUTS {
        inputs.insert(c.into(), b.input(c));
    }
    let hw: BTreeMap<&str, Operand> = DeviceProfile::field_names().map(|n| (n, b.input(n))).collect();

    let out = Var::new(TOTAL_CYCLES);
    let (fail, done) = (b.label(), b.label());
    let mut e = Emitter { b: &mut b, fail };

    let bxy = e.mul(inputs["bx"].clone(), inputs["by"].clone());
    let t = e.mul(bxy, inputs["bz"].clone());
    let c = e.b.cmp(BinOp::CmpLt, lit(1024), t.clone());
    e.fail_if(c);

    let mut vals: BTreeMap<&str, Frac> = BTreeMap::new();
    for (metric, src) in metrics.iter() {
        vals.insert(metric, e.metric(src, &inputs));
    }
    let r = e.round(&vals["regs_per_thread"]);
    let z = e.round(&vals["shared_words_per_block"]);
    let b_active = {
        let fail = e.fail;
        let b_active = emit_active_blocks(
            e.b,
            [&hw["R_max"], &hw["Z_max"], &hw["T_max"], &hw["B_max"], &hw["W_max"]],
            r,
            z,
            t.clone(),
            "B_active",
            fail,
        );
        Operand::Var(b_active)
    };
    let threads = e.mul(b_active.clone(), t);
    let warps = e.b.bin(BinOp::FloorDiv, threads, lit(32));
    let w_active = e.b.min(warps, hw["W_max"].clone());
    let n = {
        let wa = Var::new("W_active");
        e.b.assign(&wa, w_active);
        let one = e.b.cmp(BinOp::CmpLt, Operand::Var(wa.clone()), lit(1));
        let m = e.b.fresh("_n");
        let (lo, hi, join) = (e.b.label(), e.b.label(), e.b.label());
        e.b.branch(one, lo, hi);
        e.b.place(lo);
        e.b.assign(&m, lit(1));
        e.b.jump(join);
        e.b.place(hi);
        e.b.assign(&m, Operand::Var(wa));
        e.b.place(join);
        Frac::whole(Operand::Var(m))
    };

    let h = |k: &str| Frac::whole(hw[k].clone());
    let blocks_on_device = e.fmul(&Frac::whole(b_active.clone()), &h("num_SM"));
    let rep = {
        let r = e.fdiv(&vals["total_blocks"], &blocks_on_device);
        match rep_mode {
            RepMode::Real => r,
            RepMode::Ceil => Frac::whole(e.b.bin(BinOp::CeilDiv, r.n, r.d)),
        }
    };
    let uncoal = vals["uncoal_mem_insts_per_thread"].clone();
    let coal = vals["coal_mem_insts_per_thread"].clone();
    let comp = vals["comp_insts_per_thread"].clone();
    let synch = vals["synch_insts_per_block"].clone();
    let mem_insts = e.fadd(&uncoal, &coal);
    let comp_plus_mem = e.fadd(&comp, &mem_insts);
    let comp_cycles = e.fmul(&h("issue_cycles"), &comp_plus_mem);
    let total = e.slot();

    let no_mem = e.b.cmp(BinOp::CmpEq, mem_insts.n.clone(), lit(0));
    let (compute_only, with_mem, finish) = (e.b.label(), e.b.label(), e.b.label());
    e.b.branch(no_mem, compute_only, with_mem);

    // compute only: MWP := N, departure delay of coalesced accesses
    e.b.place(compute_only);
    {
        let pre = e.fmul(&comp_cycles, &rep);
        let n_minus_1 = e.fsub(&n, &Frac::one());
        let s = e.product(&[h("departure_del_coal_cycles"), n_minus_1, synch.clone(), Frac::whole(b_active.clone()), rep.clone()]);
        let sum = e.fadd(&pre, &s);
        e.store(&sum, &total);
        e.b.jump(finish);
    }

    e.b.place(with_mem);
    {
        let r_uncoal = e.fdiv(&uncoal, &mem_insts);
        let r_coal = e.fsub(&Frac::one(), &r_uncoal);
        let mem_l_coal = h("mem_latency_cycles");
        let per_mw_minus_1 = e.fsub(&h("uncoal_per_mw"), &Frac::one());
        let extra = e.fmul(&per_mw_minus_1, &h("departure_del_uncoal_cycles"));
        let mem_l_uncoal = e.fadd(&mem_l_coal, &extra);
        let wu = e.fmul(&r_uncoal, &mem_l_uncoal);
        let wc = e.fmul(&r_coal, &mem_l_coal);
        let weighted_mem_l = e.fadd(&wu, &wc);
        let du = e.product(&[r_uncoal.clone(), h("departure_del_uncoal_cycles"), h("uncoal_per_mw")]);
        let dc = e.fmul(&r_coal, &h("departure_del_coal_cycles"));
        let departure_delay = e.fadd(&du, &dc);
        let departure_delay = e.keep(&departure_delay);
        let mu = e.fmul(&uncoal, &mem_l_uncoal);
        let mc = e.fmul(&coal, &mem_l_coal);
        let mem_cycles = e.fadd(&mu, &mc);
        let mem_cycles = e.keep(&mem_cycles);
        let comp_cycles = e.keep(&comp_cycles);

        let mwp_no_bw = e.fdiv(&weighted_mem_l, &departure_delay);
        let load = e.fmul(&h("freq_GHz"), &h("load_bytes_per_warp"));
        let bw_per_warp = e.fdiv(&load, &h("mem_latency_cycles"));
        let per_device = e.fmul(&bw_per_warp, &h("num_SM"));
        let mwp_peak_bw = e.fdiv(&h("mem_bandwidth_GBps"), &per_device);
        let m1 = e.fmin(&mwp_no_bw, &mwp_peak_bw);
        let m2 = e.fmin(&m1, &n);
        let mwp = e.fmax(&m2, &Frac::one());

        let cwp = {
            let slot = e.slot();
            let zero = e.b.cmp(BinOp::CmpEq, comp_cycles.n.clone(), lit(0));
            let (is_zero, nonzero, join) = (e.b.label(), e.b.label(), e.b.label());
            e.b.branch(zero, is_zero, nonzero);
            e.b.place(is_zero);
            e.store(&n, &slot);
            e.b.jump(join);
            e.b.place(nonzero);
            let sum = e.fadd(&mem_cycles, &comp_cycles);
            let ratio = e.fdiv(&sum, &comp_cycles);
            let m = e.fmin(&ratio, &n);
            e.store(&m, &slot);
            e.b.place(join);
            slot
        };

        let pre = e.slot();
        let per_mem = e.fdiv(&comp_cycles, &mem_insts);
        let mwp_minus_1 = e.fsub(&mwp, &Frac::one());
        let overlap = e.fmul(&per_mem, &mwp_minus_1);

        let (saturated, cwp_bound, mwp_bound, join) = (e.b.label(), e.b.label(), e.b.label(), e.b.label());
        let (check_cwp, check_second, check_third) = (e.b.label(), e.b.label(), e.b.label());
        let c = e.feq(&mwp, &n);
        e.b.branch(c, check_cwp, check_second);
        e.b.place(check_cwp);
        let c = e.feq(&cwp, &n);
        e.b.branch(c, saturated, check_second);
        e.b.place(check_second);
        let c = e.flt(&cwp, &mwp);
        e.b.branch(c, check_third, cwp_bound);
        e.b.place(check_third);
        let c = e.flt(&mem_cycles, &comp_cycles);
        e.b.branch(c, cwp_bound, mwp_bound);

        e.b.place(saturated);
        let s = e.fadd(&mem_cycles, &comp_cycles);
        let s = e.fadd(&s, &overlap);
        let s = e.fmul(&s, &rep);
        e.store(&s, &pre);
        e.b.jump(join);

        e.b.place(cwp_bound);
        let s = e.fmul(&mem_cycles, &n);
        let s = e.fdiv(&s, &mwp);
        let s = e.fadd(&s, &overlap);
        let s = e.fmul(&s, &rep);
        e.store(&s, &pre);
        e.b.jump(join);

        e.b.place(mwp_bound);
        let s = e.fmul(&comp_cycles, &n);
        let s = e.fadd(&h("mem_latency_cycles"), &s);
        let s = e.fmul(&s, &rep);
        e.store(&s, &pre);
        e.b.place(join);

        let s = e.product(&[departure_delay, mwp_minus_1, synch, Frac::whole(b_active), rep]);
        let sum = e.fadd(&pre, &s);
        e.store(&sum, &total);
    }

    e.b.place(finish);
    let scale = Rational::from_bigint(num_bigint::BigInt::from(1u8) << 64u32);
    let scaled = e.mul(total.n.clone(), Operand::Lit(scale.clone()));
    let q = e.b.bin(BinOp::FloorDiv, scaled, total.d.clone());
    let inv = Rational::one().checked_div(&scale).expect("nonzero");
    e.b.bin_into(BinOp::Mul, &out, q, Operand::Lit(inv));
    e.b.jump(done);

    e.b.place(fail);
    e.b.assign(&out, lit(INFEASIBLE));
    e.b.place(done);
    e.b.halt(&out);
    Ok(b.finish(out))
}

fn lit(n: i64) -> Operand {
    Operand::int(n)
}

fn as_lit(o: &Operand) -> Option<&Rational> {
    match o {
        Operand::Lit(r) => Some(r),
        Operand::Var(_) => None,
    }
}

/// `n / d` with `d != 0` on every path that reaches a use.
#[derive(Debug, Clone)]
struct Frac {
    n: Operand,
    d: Operand,
}

impl Frac {
    fn whole(n: Operand) -> Self {
        Frac { n, d: lit(1) }
    }

    fn one() -> Self {
        Frac::whole(lit(1))
    }
}

struct Emitter<'a> {
    b: &'a mut ProgramBuilder,
    fail: Label,
}

impl Emitter<'_> {
    fn fail_if(&mut self, cond: Var) {
        let next = self.b.label();
        self.b.branch(cond, self.fail, next);
        self.b.place(next);
    }

    fn add(&mut self, x: Operand, y: Operand) -> Operand {
        match (as_lit(&x), as_lit(&y)) {
            (Some(a), Some(b)) => Operand::Lit(a + b),
            (Some(a), _) if a.is_zero() => y,
            (_, Some(b)) if b.is_zero() => x,
            _ => self.b.bin(BinOp::Add, x, y),
        }
    }

    fn sub(&mut self, x: Operand, y: Operand) -> Operand {
        match (as_lit(&x), as_lit(&y)) {
            (Some(a), Some(b)) => Operand::Lit(a - b),
            (_, Some(b)) if b.is_zero() => x,
            _ => self.b.bin(BinOp::Sub, x, y),
        }
    }

    fn mul(&mut self, x: Operand, y: Operand) -> Operand {
        match (as_lit(&x), as_lit(&y)) {
            (Some(a), Some(b)) => Operand::Lit(a * b),
            (Some(a), _) if a.is_zero() => lit(0),
            (_, Some(b)) if b.is_zero() => lit(0),
            (Some(a), _) if *a == 1 => y,
            (_, Some(b)) if *b == 1 => x,
            _ => self.b.bin(BinOp::Mul, x, y),
        }
    }

    fn fadd(&mut self, x: &Frac, y: &Frac) -> Frac {
        if x.d == y.d {
            let n = self.add(x.n.clone(), y.n.clone());
            return Frac { n, d: x.d.clone() };
        }
        let a = self.mul(x.n.clone(), y.d.clone());
        let c = self.mul(y.n.clone(), x.d.clone());
        let n = self.add(a, c);
        let d = self.mul(x.d.clone(), y.d.clone());
        Frac { n, d }
    }

    fn fsub(&mut self, x: &Frac, y: &Frac) -> Frac {
        if x.d == y.d {
            let n = self.sub(x.n.clone(), y.n.clone());
            return Frac { n, d: x.d.clone() };
        }
        let a = self.mul(x.n.clone(), y.d.clone());
        let c = self.mul(y.n.clone(), x.d.clone());
        let n = self.sub(a, c);
        let d = self.mul(x.d.clone(), y.d.clone());
        Frac { n, d }
    }

    fn fmul(&mut self, x: &Frac, y: &Frac) -> Frac {
        let n = self.mul(x.n.clone(), y.n.clone());
        let d = self.mul(x.d.clone(), y.d.clone());
        Frac { n, d }
    }

    /// `x / y`; sends a zero divisor to the failure label.
    fn fdiv(&mut self, x: &Frac, y: &Frac) -> Frac {
        if as_lit(&y.n).is_none() {
            let c = self.b.cmp(BinOp::CmpEq, y.n.clone(), lit(0));
            self.fail_if(c);
        }
        let n = self.mul(x.n.clone(), y.d.clone());
        let d = self.mul(x.d.clone(), y.n.clone());
        Frac { n, d }
    }

    fn product(&mut self, xs: &[Frac]) -> Frac {
        let mut acc = Frac::one();
        for x in xs {
            acc = self.fmul(&acc, x);
        }
        acc
    }

    /// Comparison variable for `x < y`.
    fn flt(&mut self, x: &Frac, y: &Frac) -> Var {
        let diff = self.fsub(x, y);
        let s = self.mul(diff.n, diff.d);
        self.b.cmp(BinOp::CmpLt, s, lit(0))
    }

    fn feq(&mut self, x: &Frac, y: &Frac) -> Var {
        let diff = self.fsub(x, y);
        self.b.cmp(BinOp::CmpEq, diff.n, lit(0))
    }

    /// Fresh pair of variables to merge values from several paths.
    fn slot(&mut self) -> Frac {
        Frac {
            n: Operand::Var(self.b.fresh("_fn")),
            d: Operand::Var(self.b.fresh("_fd")),
        }
    }

    fn store(&mut self, x: &Frac, slot: &Frac) {
        let (Operand::Var(n), Operand::Var(d)) = (&slot.n, &slot.d) else {
            unreachable!("slots are variables");
        };
        self.b.assign(n, x.n.clone());
        self.b.assign(d, x.d.clone());
    }

    /// Pins an expression to a pair of variables, so that later uses read
    /// the variables instead of the defining operands.
    fn keep(&mut self, x: &Frac) -> Frac {
        let s = self.slot();
        self.store(x, &s);
        s
    }

    fn fmin(&mut self, x: &Frac, y: &Frac) -> Frac {
        let slot = self.slot();
        let c = self.flt(y, x);
        let (take_y, take_x, join) = (self.b.label(), self.b.label(), self.b.label());
        self.b.branch(c, take_y, take_x);
        self.b.place(take_y);
        self.store(y, &slot);
        self.b.jump(join);
        self.b.place(take_x);
        self.store(x, &slot);
        self.b.place(join);
        slot
    }

    fn fmax(&mut self, x: &Frac, y: &Frac) -> Frac {
        let slot = self.slot();
        let c = self.flt(x, y);
        let (take_y, take_x, join) = (self.b.label(), self.b.label(), self.b.label());
        self.b.branch(c, take_y, take_x);
        self.b.place(take_y);
        self.store(y, &slot);
        self.b.jump(join);
        self.b.place(take_x);
        self.store(x, &slot);
        self.b.place(join);
        slot
    }

    /// `floor(x + 1/2)` as a single operand.
    fn round(&mut self, x: &Frac) -> Operand {
        if let (Some(n), Some(d)) = (as_lit(&x.n), as_lit(&x.d)) {
            let half = Rational::new(1, 2).expect("nonzero");
            let v = n.checked_div(d).expect("nonzero");
            return Operand::Lit((&v + &half).floor());
        }
        let two_n = self.mul(x.n.clone(), lit(2));
        let num = self.add(two_n, x.d.clone());
        let den = self.mul(x.d.clone(), lit(2));
        self.b.bin(BinOp::FloorDiv, num, den)
    }

    /// Numerator and denominator of a metric; a zero denominator or a
    /// negative value leads to the failure label.
    fn metric(&mut self, src: &MetricSource, inputs: &BTreeMap<String, Operand>) -> Frac {
        let f = match src {
            MetricSource::Constant(c) => return Frac::whole(Operand::Lit(c.clone())),
            MetricSource::Fitted(f) => f,
        };
        let point: Vec<Operand> = f.variables().iter().map(|v| inputs[v].clone()).collect();
        let p = self.poly(&f.num, &point);
        let q = self.poly(&f.den, &point);
        if as_lit(&q).is_none() {
            let c = self.b.cmp(BinOp::CmpEq, q.clone(), lit(0));
            self.fail_if(c);
        }
        let sign = self.mul(p.clone(), q.clone());
        if as_lit(&sign).is_none() {
            let c = self.b.cmp(BinOp::CmpLt, sign, lit(0));
            self.fail_if(c);
        }
        Frac { n: p, d: q }
    }

    fn poly(&mut self, p: &crate::polyfit::Polynomial, point: &[Operand]) -> Operand {
        let caps = p.degree_caps();
        let mut powers: Vec<Vec<Operand>> = Vec::new();
        for (x, &cap) in point.iter().zip(&caps) {
            let mut row = alloc::vec![lit(1)];
            for k in 1..=cap as usize {
                let next = self.mul(row[k - 1].clone(), x.clone());
                row.push(next);
            }
            powers.push(row);
        }
        let mut acc = lit(0);
        for (exps, &c) in p.basis.iter().zip(&p.coefficients) {
            if c == 0.0 {
                continue;
            }
            let mut term = Operand::Lit(Rational::from_f64(c).expect("finite"));
            for (row, &e) in powers.iter().zip(exps) {
                term = self.mul(term, row[e as usize].clone());
            }
            acc = self.add(acc, term);
        }
        acc
    }
}
