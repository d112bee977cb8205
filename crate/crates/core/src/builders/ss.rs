//! Division by successive subtraction.
//!
//! ```text
//! divisor (m) | complement (n-m) | dividend (n) | adder_scratch (n-1) | carries (1) | flag
//! ```
//!
//! The divisor is loaded into the low half of an `n`-line bus; `setup`
//! turns that whole bus into the `n`-bit twos complement in place (inverting
//! every line yields the leading ones, then one is added). The
//! `complement` role names the upper half of that bus. `subtract` adds the
//! complement to the dividend bus once. The caller repeats it until the carry
//! out is 0 and then runs `match_test`, which sets the flag iff the
//! leftover equals the complement, i.e. the last non-negative remainder was 0.

use crate::builders::{and_tree, range, ripple_add, Emitter, ProblemSpec, Variant};
use crate::error::{Error, Result};
use crate::netlist::{Gate, Layout, Marks, ResourceReport, Role, WiringDiagram};

/// The three fragments of the successive-subtraction divider. They share one
/// layout and width.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SsDivider {
    pub n: usize,
    pub setup: WiringDiagram,
    pub subtract: WiringDiagram,
    pub match_test: WiringDiagram,
}

impl SsDivider {
    pub fn layout(&self) -> &Layout {
        self.setup.layout()
    }

    pub fn width(&self) -> usize {
        self.setup.width()
    }

    /// Subtractions needed in the worst case (divisor 2, dividend `2^n − 1`).
    pub fn worst_case_iterations(&self) -> u128 {
        1u128 << (self.n - 1)
    }

    /// Iteration cap used by the drivers.
    pub fn iteration_cap(&self) -> u64 {
        (1u64 << (self.n - 1)) + 1
    }

    /// Operations of the fixed-length lockstep schedule: setup, the
    /// worst-case number of subtractions, then the match test.
    pub fn lockstep_ops(&self) -> u128 {
        self.setup.gate_count() as u128
            + self.worst_case_iterations() * self.subtract.gate_count() as u128
            + self.match_test.gate_count() as u128
    }

    pub fn resource_report(&self) -> Result<ResourceReport> {
        let v = Variant::SuccessiveSubtraction;
        Ok(ResourceReport {
            n: self.n,
            variant: v,
            bits_measured: self.width(),
            ops_measured: self.lockstep_ops(),
            bits_paper: super::paper_bits(self.n, v)?,
            ops_paper: super::paper_ops(self.n, v)?,
        })
    }
}

struct Lines {
    bus: Vec<usize>,
    rem: Vec<usize>,
    scratch: Vec<usize>,
    carry: usize,
    flag: usize,
}

fn lines(n: usize) -> (Lines, Layout) {
    let m = n / 2;
    let layout = Layout::new([
        (Role::Divisor, range(0, m)),
        (Role::Complement, range(m, n - m)),
        (Role::Dividend, range(n, n)),
        (Role::AdderScratch, range(2 * n, n - 1)),
        (Role::Carries, range(3 * n - 1, 1)),
        (Role::Flag, range(3 * n, 1)),
    ])
    .expect("static layout tiles");
    let l = Lines {
        bus: (0..n).collect(),
        rem: (n..2 * n).collect(),
        scratch: (2 * n..3 * n - 1).collect(),
        carry: 3 * n - 1,
        flag: 3 * n,
    };
    (l, layout)
}

pub fn ss_layout(n: usize) -> Result<Layout> {
    ProblemSpec::new(n, Variant::SuccessiveSubtraction)?;
    Ok(lines(n).1)
}

pub fn build_ss_divider(spec: &ProblemSpec) -> Result<SsDivider> {
    if spec.variant() != Variant::SuccessiveSubtraction {
        return Err(Error::WrongVariant("successive-subtraction divider", "ss"));
    }
    let n = spec.n();
    let (l, layout) = lines(n);
    let diagram = |e: Emitter| WiringDiagram::new(layout.width(), e.gates, layout.clone(), Marks::new());

    let mut setup = Emitter::default();
    for &b in &l.bus {
        setup.push(Gate::not(b));
    }
    // bus = ~x with leading ones; add one taken from the idle carry line
    setup.push(Gate::not(l.carry));
    let one: Vec<Option<usize>> = std::iter::once(Some(l.carry))
        .chain(std::iter::repeat_n(None, n - 1))
        .collect();
    ripple_add(&mut setup, &one, &l.bus, &l.scratch, None);
    setup.push(Gate::not(l.carry));

    let mut subtract = Emitter::default();
    subtract.push(Gate::reset(l.carry));
    let complement: Vec<Option<usize>> = l.bus.iter().copied().map(Some).collect();
    ripple_add(&mut subtract, &complement, &l.rem, &l.scratch, Some(l.carry));

    let mut test = Emitter::default();
    test.push(Gate::not(l.carry));
    for &b in &l.bus {
        test.push(Gate::not(b));
    }
    for (&b, &r) in l.bus.iter().zip(&l.rem) {
        test.push(Gate::cnot(b, r));
    }
    // leftover is all ones iff it matched; the (now 1) carry joins the AND
    let inputs: Vec<usize> = l.rem.iter().copied().chain([l.carry]).collect();
    and_tree(&mut test, &inputs, &l.scratch, l.flag);

    Ok(SsDivider {
        n,
        setup: diagram(setup)?,
        subtract: diagram(subtract)?,
        match_test: diagram(test)?,
    })
}
