//! Circuit construction.
//!
//! All divider circuits share one vocabulary of buses: an `n`-bit dividend,
//! an `m = n/2`-bit divisor, and `k = m + 1`-bit adders (divisor plus sign
//! line). Builders are pure functions of a [`ProblemSpec`].

use std::fmt;
use std::str::FromStr;

use crate::bitcore::{LineRange, Register};
use crate::error::{Error, Result};
use crate::netlist::{resource_stats, Checkpoint, Gate, Layout, Marks, ResourceReport, Role, WiringDiagram};

mod adder;
mod restoring;
mod ss;

pub use adder::build_adder;
pub use restoring::{
    build_csa_stage, build_restoring_division, build_twos_complement, build_zero_test,
    restoring_layout, StagePlan,
};
pub use ss::{build_ss_divider, ss_layout, SsDivider};

pub(crate) use adder::ripple_add;

/// Which divider a diagram implements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    /// Restoring division with quotient lines, NOT/CNOT/TOFFOLI only.
    RestoringReversible,
    /// Restoring division using RESET/CRESET; the quotient is not kept.
    RestoringIrreversible,
    /// Repeated subtraction followed by a complement match test.
    SuccessiveSubtraction,
}

impl Variant {
    pub const ALL: [Variant; 3] = [
        Variant::RestoringReversible,
        Variant::RestoringIrreversible,
        Variant::SuccessiveSubtraction,
    ];

    /// Short tag used by the CLI and in reports.
    pub fn tag(self) -> &'static str {
        match self {
            Variant::RestoringReversible => "restoring",
            Variant::RestoringIrreversible => "restoring-irrev",
            Variant::SuccessiveSubtraction => "ss",
        }
    }

    pub fn is_restoring(self) -> bool {
        !matches!(self, Variant::SuccessiveSubtraction)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "restoring" | "restoring-rev" | "restoring_reversible" => Ok(Variant::RestoringReversible),
            "restoring-irrev" | "restoring_irreversible" => Ok(Variant::RestoringIrreversible),
            "ss" | "successive-subtraction" | "successive_subtraction" => {
                Ok(Variant::SuccessiveSubtraction)
            }
            _ => Err(format!("unknown variant `{s}` (expected restoring, restoring-irrev or ss)")),
        }
    }
}

/// Problem size and divider variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ProblemSpec {
    n: usize,
    variant: Variant,
}

impl ProblemSpec {
    pub const MAX_N: usize = 64;

    pub fn new(n: usize, variant: Variant) -> Result<Self> {
        check_n(n)?;
        if n > Self::MAX_N {
            return Err(Error::InvalidWidth(n));
        }
        Ok(Self { n, variant })
    }

    /// Dividend bits.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Divisor bits.
    pub fn m(&self) -> usize {
        self.n / 2
    }

    /// Adder width used by the restoring stages.
    pub fn k(&self) -> usize {
        self.m() + 1
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    /// Number of CSA stages.
    pub fn stages(&self) -> usize {
        self.n - 1
    }
}

fn check_n(n: usize) -> Result<()> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(Error::InvalidWidth(n));
    }
    Ok(())
}

/// Lines per register from the closed-form accounting (exact sums, not the
/// rounded asymptotes).
pub fn paper_bits(n: usize, variant: Variant) -> Result<usize> {
    check_n(n)?;
    let half = n / 2;
    Ok(match variant {
        Variant::RestoringReversible => {
            half + half + 3 * (half + 1) + (n - 2) + (n - 1) + (n - 1) + (half - 1)
        }
        Variant::RestoringIrreversible => half + half + 3 * (half + 1) + (n - 2) + (half - 1),
        // 3n lines plus the flag
        Variant::SuccessiveSubtraction => 3 * n + 1,
    })
}

/// Operation count from the closed-form accounting. Both restoring variants
/// share one expression; successive subtraction is the worst case of
/// `2^(n-1)` subtractions of `8n + 6` operations plus `3n` for the test.
pub fn paper_ops(n: usize, variant: Variant) -> Result<u128> {
    check_n(n)?;
    let n = n as u128;
    Ok(match variant {
        Variant::RestoringReversible | Variant::RestoringIrreversible => {
            let adder = 4 * n + 14;
            adder + 3 * n / 2 + (n - 1) * (2 * adder + 3 * n + 7) + n / 2 - 1
        }
        Variant::SuccessiveSubtraction => (8 * n + 6) * (1u128 << (n - 1)) + 3 * n,
    })
}

/// Rounded reference values quoted next to the exact sums:
/// `(bits, ops)` = `(6n−2 | 4n | 3n+1, 11n² | 11n·2^(n−1))`.
pub fn asymptotic_reference(n: usize, variant: Variant) -> (usize, u128) {
    let nn = n as u128;
    match variant {
        Variant::RestoringReversible => (6 * n - 2, 11 * nn * nn),
        Variant::RestoringIrreversible => (4 * n, 11 * nn * nn),
        Variant::SuccessiveSubtraction => (3 * n + 1, 11 * nn * (1u128 << (n - 1))),
    }
}

/// A built divider of any variant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Divider {
    Restoring(WiringDiagram),
    SuccessiveSubtraction(SsDivider),
}

impl Divider {
    pub fn build(spec: &ProblemSpec) -> Result<Self> {
        Ok(match spec.variant() {
            Variant::SuccessiveSubtraction => Divider::SuccessiveSubtraction(build_ss_divider(spec)?),
            _ => Divider::Restoring(build_restoring_division(spec)?),
        })
    }

    pub fn layout(&self) -> &Layout {
        match self {
            Divider::Restoring(d) => d.layout(),
            Divider::SuccessiveSubtraction(s) => s.layout(),
        }
    }

    pub fn width(&self) -> usize {
        self.layout().width()
    }

    pub fn resource_report(&self, spec: &ProblemSpec) -> Result<ResourceReport> {
        match self {
            Divider::Restoring(d) => resource_stats(d, spec.n(), spec.variant()),
            Divider::SuccessiveSubtraction(s) => s.resource_report(),
        }
    }
}

/// Measured and closed-form resources for one problem size.
pub fn resource_report(spec: &ProblemSpec) -> Result<ResourceReport> {
    Divider::build(spec)?.resource_report(spec)
}

/// Where a division diagram expects its inputs and leaves its outputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DivisionPorts {
    pub width: usize,
    /// `n` lines, LSB first. For restoring layouts this spans the dividend
    /// role and the low two lines of the first partial window.
    pub dividend: LineRange,
    pub divisor: LineRange,
    /// Final partial window (restoring) or subtraction bus (SS).
    pub remainder: LineRange,
    pub quotient: Option<LineRange>,
    pub flag: usize,
    /// Working carry / subtractor carry-out line.
    pub carry: usize,
}

impl DivisionPorts {
    pub fn from_layout(layout: &Layout, n: usize) -> Result<Self> {
        let dividend_role = layout.require(Role::Dividend)?;
        let dividend = LineRange::new(dividend_role.start(), n)?;
        if dividend.end() > layout.width() {
            return Err(Error::InvalidLayout("dividend input exceeds layout".into()));
        }
        let remainder = match layout.get(Role::Partial) {
            Some(p) => LineRange::new(dividend_role.start(), p.len())?,
            None => dividend_role,
        };
        Ok(Self {
            width: layout.width(),
            dividend,
            divisor: layout.require(Role::Divisor)?,
            remainder,
            quotient: layout.get(Role::Quotient),
            flag: layout.require(Role::Flag)?.start(),
            carry: layout.require(Role::Carries)?.start(),
        })
    }

    /// A register with the dividend and divisor loaded and every other line 0.
    pub fn load(&self, dividend: u64, divisor: u64) -> Result<Register> {
        let mut reg = Register::zeros(self.width);
        reg.write_bus_in_place(self.dividend, dividend)?;
        reg.write_bus_in_place(self.divisor, divisor)?;
        Ok(reg)
    }

    pub fn read(&self, reg: &Register) -> Result<GateOutcome> {
        Ok(GateOutcome {
            quotient: self.quotient.map(|q| reg.read_bus(q)).transpose()?,
            remainder: reg.read_bus(self.remainder)?,
            flag: reg.bit(self.flag),
        })
    }
}

/// Outputs read back from a register after a division diagram ran.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GateOutcome {
    /// Present only for layouts that keep quotient lines.
    pub quotient: Option<u64>,
    pub remainder: u64,
    pub flag: bool,
}

/// Gate list plus checkpoint marks under construction.
#[derive(Debug, Default)]
pub(crate) struct Emitter {
    pub(crate) gates: Vec<Gate>,
    pub(crate) marks: Marks,
}

impl Emitter {
    pub(crate) fn push(&mut self, g: Gate) {
        self.gates.push(g);
    }

    pub(crate) fn mark(&mut self, stage: usize, cp: Checkpoint) {
        self.marks.insert((stage, cp), self.gates.len());
    }

    /// Append another emitter's gates, shifting its marks.
    pub(crate) fn extend(&mut self, other: Emitter) {
        let offset = self.gates.len();
        self.marks
            .extend(other.marks.into_iter().map(|(k, i)| (k, i + offset)));
        self.gates.extend(other.gates);
    }
}

/// AND all `inputs` into `flag` with a balanced TOFFOLI tree, using
/// `inputs.len() - 2` scratch lines for the intermediate products. A single
/// input is passed through with a CNOT.
pub(crate) fn and_tree(e: &mut Emitter, inputs: &[usize], scratch: &[usize], flag: usize) {
    assert!(!inputs.is_empty());
    assert!(scratch.len() + 2 >= inputs.len(), "not enough AND-tree scratch");
    let mut queue: std::collections::VecDeque<usize> = inputs.iter().copied().collect();
    let mut free = scratch.iter().copied();
    while queue.len() > 2 {
        let a = queue.pop_front().expect("len > 2");
        let b = queue.pop_front().expect("len > 2");
        let t = free.next().expect("scratch checked above");
        e.push(Gate::toffoli(a, b, t));
        queue.push_back(t);
    }
    match (queue.pop_front(), queue.pop_front()) {
        (Some(a), Some(b)) => e.push(Gate::toffoli(a, b, flag)),
        (Some(a), None) => e.push(Gate::cnot(a, flag)),
        _ => unreachable!(),
    }
}

pub(crate) fn range(start: usize, len: usize) -> LineRange {
    LineRange::new(start, len).expect("builders never create empty ranges")
}
