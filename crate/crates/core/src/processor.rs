//! The register bank: one register per candidate divisor, all executing
//! the same wiring diagram in lockstep.
//!
//! Registers are independent, so the bank is split into 64-register lane
//! blocks that may run on any number of worker threads. Results are merged
//! by register index and do not depend on the degree of parallelism.

use rayon::prelude::*;

use crate::bitcore::Register;
use crate::builders::{
    Divider, DivisionPorts, GateOutcome, ProblemSpec, SsDivider, StagePlan, Variant,
};
use crate::error::{Error, Result};
use crate::netlist::lanes::{LaneBlock, LANES};
use crate::netlist::{run_diagram, run_with_snapshots, Checkpoint, Layout, Role, WiringDiagram};
use crate::oracle::{StageRecord, StageTrace};

/// Largest supported divisor sub-register (2^20 registers per bank).
pub const MAX_BANK_BITS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum BankMode {
    /// Every `m`-bit pattern; 0 and 1 are masked.
    #[default]
    AllIntegers,
    /// Same registers, but only primes are valid.
    PrimesOnly,
}

/// Smallest even width, at least 4, that holds `value`.
pub fn padded_width(value: u64) -> usize {
    let bits = (u64::BITS - value.leading_zeros()) as usize;
    (bits + bits % 2).max(4)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BankSpec {
    dividend: u64,
    n: usize,
    mode: BankMode,
}

impl BankSpec {
    /// Bank for `dividend` at its padded width.
    pub fn new(dividend: u64, mode: BankMode) -> Result<Self> {
        Self::with_width(dividend, padded_width(dividend), mode)
    }

    pub fn with_width(dividend: u64, n: usize, mode: BankMode) -> Result<Self> {
        if n < 4 || !n.is_multiple_of(2) || n > ProblemSpec::MAX_N {
            return Err(Error::InvalidWidth(n));
        }
        if dividend < 2 || (n < 64 && dividend >> n != 0) {
            return Err(Error::InvalidDividend { value: dividend, n });
        }
        if n / 2 > MAX_BANK_BITS {
            return Err(Error::BankTooLarge(n / 2));
        }
        Ok(Self { dividend, n, mode })
    }

    pub fn dividend(&self) -> u64 {
        self.dividend
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Divisor sub-register width.
    pub fn m(&self) -> usize {
        self.n / 2
    }

    pub fn mode(&self) -> BankMode {
        self.mode
    }

    pub fn bank_size(&self) -> usize {
        1 << self.m()
    }
}

/// The registers plus which divisor each one holds and whether it counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegisterBank {
    spec: BankSpec,
    registers: Vec<Register>,
    valid: Vec<bool>,
    /// Subtractions performed per register (successive subtraction only).
    iterations: Option<Vec<u64>>,
}

impl RegisterBank {
    pub fn spec(&self) -> &BankSpec {
        &self.spec
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn len(&self) -> usize {
        self.registers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.registers.is_empty()
    }

    /// Register `i` holds divisor `i`.
    pub fn divisor_of(&self, index: usize) -> u64 {
        index as u64
    }

    pub fn is_valid(&self, index: usize) -> bool {
        self.valid[index]
    }

    pub fn valid_divisors(&self) -> Vec<u64> {
        (0..self.len())
            .filter(|&i| self.valid[i])
            .map(|i| self.divisor_of(i))
            .collect()
    }

    pub fn iterations(&self) -> Option<&[u64]> {
        self.iterations.as_deref()
    }
}

/// Sieve of Eratosthenes below `limit`.
pub fn primes_below(limit: usize) -> Vec<bool> {
    let mut is_prime = vec![true; limit];
    for v in is_prime.iter_mut().take(2) {
        *v = false;
    }
    let mut p = 2;
    while p * p < limit {
        if is_prime[p] {
            for q in (p * p..limit).step_by(p) {
                is_prime[q] = false;
            }
        }
        p += 1;
    }
    is_prime
}

/// One register per `m`-bit divisor pattern: dividend and divisor loaded,
/// every other line 0.
pub fn init_bank(spec: BankSpec, layout: &Layout) -> Result<RegisterBank> {
    let ports = DivisionPorts::from_layout(layout, spec.n())?;
    if ports.divisor.len() != spec.m() {
        return Err(Error::InvalidLayout(format!(
            "divisor bus has {} lines, bank expects {}",
            ports.divisor.len(),
            spec.m()
        )));
    }
    let size = spec.bank_size();
    let registers = (0..size as u64)
        .map(|d| ports.load(spec.dividend(), d))
        .collect::<Result<Vec<_>>>()?;
    let valid = match spec.mode() {
        BankMode::AllIntegers => (0..size).map(|d| d >= 2).collect(),
        BankMode::PrimesOnly => primes_below(size),
    };
    Ok(RegisterBank { spec, registers, valid, iterations: None })
}

fn with_workers<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if jobs <= 1 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

fn check_bank_width(bank: &RegisterBank, width: usize) -> Result<()> {
    match bank.registers.first() {
        Some(r) if r.width() != width => Err(Error::WidthMismatch {
            register: r.width(),
            diagram: width,
        }),
        _ => Ok(()),
    }
}

/// Run `diagram` on every register, valid or not, using `jobs` workers.
pub fn run_bank(bank: &RegisterBank, diagram: &WiringDiagram, jobs: usize) -> Result<RegisterBank> {
    check_bank_width(bank, diagram.width())?;
    let mut out = bank.clone();
    let width = diagram.width();
    let step = |chunk: &mut [Register]| {
        let mut block = LaneBlock::load(chunk, width);
        block.apply(diagram.gates());
        block.store(chunk);
    };
    with_workers(jobs, || {
        if jobs <= 1 {
            out.registers.chunks_mut(LANES).for_each(step);
        } else {
            out.registers.par_chunks_mut(LANES).for_each(step);
        }
    })?;
    Ok(out)
}

/// Reference execution: each register through [`run_diagram`] one at a time.
pub fn run_bank_sequential(bank: &RegisterBank, diagram: &WiringDiagram) -> Result<RegisterBank> {
    let mut out = bank.clone();
    for r in &mut out.registers {
        *r = run_diagram(diagram, r)?.0;
    }
    Ok(out)
}

/// Per-register result of the successive-subtraction driver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SsRun {
    pub register: Register,
    pub iterations: u64,
    /// False when the iteration cap was hit before the carry went to 0.
    pub finished: bool,
    /// `(remainder before, carry out)` per subtraction.
    pub trace: Vec<(u64, bool)>,
}

/// Drive one register through setup, subtractions until the carry is 0,
/// then the match test.
pub fn ss_drive_register(ss: &SsDivider, register: &Register) -> Result<SsRun> {
    let ports = DivisionPorts::from_layout(ss.layout(), ss.n)?;
    let (mut reg, _) = run_diagram(&ss.setup, register)?;
    let mut trace = Vec::new();
    let mut finished = false;
    while (trace.len() as u64) < ss.iteration_cap() {
        let before = reg.read_bus(ports.remainder)?;
        reg = run_diagram(&ss.subtract, &reg)?.0;
        let carry = reg.bit(ports.carry);
        trace.push((before, carry));
        if !carry {
            reg = run_diagram(&ss.match_test, &reg)?.0;
            finished = true;
            break;
        }
    }
    Ok(SsRun { register: reg, iterations: trace.len() as u64, finished, trace })
}

/// Successive subtraction over the bank. Each lane block subtracts in
/// lockstep; a lane's state is captured the first time its carry reads 0,
/// and the match test then runs on the captured states.
pub fn run_bank_ss(bank: &RegisterBank, ss: &SsDivider, jobs: usize) -> Result<RegisterBank> {
    check_bank_width(bank, ss.width())?;
    let ports = DivisionPorts::from_layout(ss.layout(), ss.n)?;
    let width = ss.width();
    let cap = ss.iteration_cap();
    let mut out = bank.clone();
    let mut iterations = vec![0u64; bank.len()];

    let step = |(regs, iters): (&mut [Register], &mut [u64])| {
        let mut block = LaneBlock::load(regs, width);
        block.apply(ss.setup.gates());
        let mut captured = block.clone();
        let mut live = block.lane_mask();
        let mut finished = 0u64;
        let mut round = 0u64;
        while live != 0 && round < cap {
            round += 1;
            block.apply(ss.subtract.gates());
            let done = live & !block.line(ports.carry);
            if done != 0 {
                captured.merge_from(&block, done);
                for (lane, it) in iters.iter_mut().enumerate() {
                    if done >> lane & 1 == 1 {
                        *it = round;
                    }
                }
                finished |= done;
            }
            live &= !done;
        }
        if live != 0 {
            captured.merge_from(&block, live);
            for (lane, it) in iters.iter_mut().enumerate() {
                if live >> lane & 1 == 1 {
                    *it = round;
                }
            }
        }
        let mut tested = captured.clone();
        tested.apply(ss.match_test.gates());
        captured.merge_from(&tested, finished);
        captured.store(regs);
    };
    with_workers(jobs, || {
        let chunks = out.registers.chunks_mut(LANES).zip(iterations.chunks_mut(LANES));
        if jobs <= 1 {
            chunks.for_each(step);
        } else {
            chunks.par_bridge().for_each(step);
        }
    })?;
    out.iterations = Some(iterations);
    Ok(out)
}

/// Divisors whose register raised the flag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorReport {
    pub dividend: u64,
    /// Ascending.
    pub divisors: Vec<u64>,
    /// `dividend / d` for each divisor.
    pub cofactors: Vec<u64>,
    /// Whether divisors above `⌊√N⌋` were dropped.
    pub filter_sqrt: bool,
}

impl DivisorReport {
    pub fn is_empty(&self) -> bool {
        self.divisors.is_empty()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.divisors.iter().copied().zip(self.cofactors.iter().copied())
    }
}

/// Read the flag of every valid register. Each flagged divisor is checked
/// with integer arithmetic before it is reported.
pub fn collect_divisors(bank: &RegisterBank, layout: &Layout, filter_sqrt: bool) -> Result<DivisorReport> {
    let ports = DivisionPorts::from_layout(layout, bank.spec.n())?;
    let value = bank.spec.dividend();
    let root = value.isqrt();
    let mut divisors = Vec::new();
    for (i, reg) in bank.registers.iter().enumerate() {
        if !bank.valid[i] || !reg.bit(ports.flag) {
            continue;
        }
        let d = bank.divisor_of(i);
        if !value.is_multiple_of(d) {
            return Err(Error::Internal(format!("register {i} flagged {d}, which does not divide {value}")));
        }
        if !filter_sqrt || d <= root {
            divisors.push(d);
        }
    }
    let cofactors = divisors.iter().map(|d| value / d).collect();
    Ok(DivisorReport { dividend: value, divisors, cofactors, filter_sqrt })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FactorOptions {
    pub variant: Variant,
    pub mode: BankMode,
    pub filter_sqrt: bool,
    pub jobs: usize,
}

impl Default for FactorOptions {
    fn default() -> Self {
        Self {
            variant: Variant::RestoringIrreversible,
            mode: BankMode::AllIntegers,
            filter_sqrt: true,
            jobs: 1,
        }
    }
}

/// Build, initialize, run and collect for one dividend.
pub fn find_divisors_with(value: u64, opts: &FactorOptions) -> Result<DivisorReport> {
    let bank_spec = BankSpec::new(value, opts.mode)?;
    let spec = ProblemSpec::new(bank_spec.n(), opts.variant)?;
    let divider = Divider::build(&spec)?;
    run_divider(&divider, bank_spec, opts)
}

/// As [`find_divisors_with`] with a prebuilt divider of matching width.
pub fn run_divider(divider: &Divider, bank_spec: BankSpec, opts: &FactorOptions) -> Result<DivisorReport> {
    let bank = init_bank(bank_spec, divider.layout())?;
    let ran = match divider {
        Divider::Restoring(d) => run_bank(&bank, d, opts.jobs)?,
        Divider::SuccessiveSubtraction(ss) => run_bank_ss(&bank, ss, opts.jobs)?,
    };
    collect_divisors(&ran, divider.layout(), opts.filter_sqrt)
}

/// Divisors of `value` in `[2, ⌊√value⌋]` found by the gate-level bank.
pub fn find_divisors(value: u64, variant: Variant) -> Result<DivisorReport> {
    find_divisors_with(value, &FactorOptions { variant, ..FactorOptions::default() })
}

/// Run one restoring division at gate level and read every stage back from
/// the register at the stage checkpoints.
pub fn trace_division(
    diagram: &WiringDiagram,
    spec: &ProblemSpec,
    dividend: u64,
    divisor: u64,
) -> Result<(GateOutcome, StageTrace)> {
    if !spec.variant().is_restoring() {
        return Err(Error::WrongVariant("stage trace", "restoring variants"));
    }
    let layout = diagram.layout();
    let ports = DivisionPorts::from_layout(layout, spec.n())?;
    let working = layout.require(Role::Carries)?.start();
    let restore = layout.require(Role::Restore)?;
    let plans = StagePlan::all(spec)?;

    let mut indices = vec![0];
    for p in &plans {
        for cp in [Checkpoint::Beta1, Checkpoint::Alpha, Checkpoint::Gamma] {
            let idx = diagram
                .mark(p.stage, cp)
                .ok_or_else(|| Error::Internal(format!("stage {} has no {cp} mark", p.stage)))?;
            indices.push(idx);
        }
    }
    indices.push(diagram.gate_count());
    let start = ports.load(dividend, divisor)?;
    let snaps = run_with_snapshots(diagram, &start, &indices)?;

    let mut stages = Vec::with_capacity(plans.len());
    let mut before = &snaps[0];
    for (p, at) in plans.iter().zip(snaps[1..].chunks(3)) {
        let (beta1, alpha, gamma) = (&at[0], &at[1], &at[2]);
        let carry = beta1.bit(working);
        let quotient_bit = match p.quotient_line {
            Some(q) => gamma.bit(q),
            None => carry,
        };
        stages.push(StageRecord {
            partial_before: before.read_bus(p.window)?,
            carry,
            restored: alpha.read_bus(restore)? != 0,
            quotient_bit,
            partial_after: gamma.read_bus(p.window)?,
        });
        before = gamma;
    }
    let outcome = ports.read(snaps.last().expect("final snapshot"))?;
    let trace = StageTrace { n: spec.n(), dividend, divisor, stages };
    Ok((outcome, trace))
}
