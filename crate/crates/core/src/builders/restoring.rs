//! Restoring division.
//!
//! Line map, LSB of every bus first:
//!
//! ```text
//! divisor (m) | complement (k) | restore (m) | adder_scratch (m) | carries
//! | dividend (n-2) | partial (k) | quotient (n-1, reversible) | zero_test_scratch | flag
//! ```
//!
//! `carries` is the working carry line followed, in the reversible variant,
//! by `n − 1` saved-carry lines that the gates never touch (the working
//! carry always returns to 0). The dividend and the first partial window are
//! adjacent, so the `n`-bit dividend is loaded at the start of `dividend`
//! and its top two bits land in the low lines of `partial`.
//!
//! Stage `j` works on the `k`-line window starting `j` lines below
//! `partial`. Moving the window down by one line is the shift at the end of
//! a stage: the vacated top line is 0 and the next dividend line becomes the
//! new LSB, without any gates.

use crate::bitcore::LineRange;
use crate::builders::{and_tree, range, ripple_add, Emitter, ProblemSpec, Variant};
use crate::error::{Error, Result};
use crate::netlist::{Checkpoint, Gate, Layout, Role, WiringDiagram};

/// Line assignment for one restoring problem size.
#[derive(Debug, Clone)]
struct Lines {
    n: usize,
    m: usize,
    k: usize,
    reversible: bool,
    divisor: Vec<usize>,
    complement: Vec<usize>,
    restore: Vec<usize>,
    scratch: Vec<usize>,
    working: usize,
    dividend_start: usize,
    quotient: Option<LineRange>,
    zero_scratch: Vec<usize>,
    flag: usize,
}

impl Lines {
    fn new(spec: &ProblemSpec) -> Result<(Self, Layout)> {
        let reversible = match spec.variant() {
            Variant::RestoringReversible => true,
            Variant::RestoringIrreversible => false,
            Variant::SuccessiveSubtraction => {
                return Err(Error::WrongVariant("restoring layout", "restoring variants"))
            }
        };
        let (n, m, k) = (spec.n(), spec.m(), spec.k());
        let mut roles = Vec::new();
        let mut next = 0;
        let mut take = |role: Role, len: usize| {
            let r = range(next, len);
            roles.push((role, r));
            next += len;
            r
        };
        let divisor = take(Role::Divisor, m);
        let complement = take(Role::Complement, k);
        let restore = take(Role::Restore, m);
        let scratch = take(Role::AdderScratch, k - 1);
        let carries = take(Role::Carries, if reversible { n } else { 1 });
        let dividend = take(Role::Dividend, n - 2);
        take(Role::Partial, k);
        let quotient = reversible.then(|| take(Role::Quotient, n - 1));
        let zero_scratch = (m > 2).then(|| take(Role::ZeroTestScratch, m - 2));
        let flag = take(Role::Flag, 1);

        let lines = Self {
            n,
            m,
            k,
            reversible,
            divisor: divisor.lines().collect(),
            complement: complement.lines().collect(),
            restore: restore.lines().collect(),
            scratch: scratch.lines().collect(),
            working: carries.start(),
            dividend_start: dividend.start(),
            quotient,
            zero_scratch: zero_scratch.map_or_else(Vec::new, |r| r.lines().collect()),
            flag: flag.start(),
        };
        Ok((lines, Layout::new(roles)?))
    }

    fn window(&self, stage: usize) -> LineRange {
        range(self.dividend_start + (self.n - 2 - stage), self.k)
    }

    fn plan(&self, stage: usize) -> StagePlan {
        let window = self.window(stage);
        StagePlan {
            stage,
            window,
            brought_down: if stage == 0 {
                vec![window.line(0), window.line(1)]
            } else {
                vec![window.line(0)]
            },
            quotient_line: self.quotient.map(|q| q.line(self.n - 2 - stage)),
        }
    }

    /// Restore bus as an adder operand: the divisor's sign line is always 0.
    fn restore_operand(&self) -> Vec<Option<usize>> {
        self.restore.iter().copied().map(Some).chain([None]).collect()
    }

    fn twos_complement(&self, e: &mut Emitter) {
        for (&x, &c) in self.divisor.iter().zip(&self.complement) {
            e.push(Gate::cnot(x, c));
            e.push(Gate::not(c));
        }
        e.push(Gate::not(self.complement[self.m]));
        // complement now holds ~x; add one through the restore bus
        e.push(Gate::not(self.restore[0]));
        ripple_add(e, &self.restore_operand(), &self.complement, &self.scratch, None);
        e.push(Gate::not(self.restore[0]));
    }

    /// Load (or unload) the restore bus with the divisor where `select` is 0.
    fn select_divisor_if_clear(&self, e: &mut Emitter, select: usize) {
        e.push(Gate::not(select));
        for (&x, &r) in self.divisor.iter().zip(&self.restore) {
            e.push(Gate::toffoli(select, x, r));
        }
        e.push(Gate::not(select));
    }

    fn csa_stage(&self, e: &mut Emitter, plan: &StagePlan) {
        let j = plan.stage;
        let partial: Vec<usize> = plan.window.lines().collect();
        let complement: Vec<Option<usize>> = self.complement.iter().copied().map(Some).collect();
        let w = self.working;

        // subtract: partial + complement, carry 1 means non-negative
        ripple_add(e, &complement, &partial, &self.scratch, Some(w));
        e.mark(j, Checkpoint::Beta1);

        if let Some(q) = plan.quotient_line {
            e.push(Gate::cnot(w, q));
            e.push(Gate::cnot(q, w));
            e.mark(j, Checkpoint::Beta2);
            self.select_divisor_if_clear(e, q);
            e.mark(j, Checkpoint::Alpha);
            ripple_add(e, &self.restore_operand(), &partial, &self.scratch, Some(w));
            e.mark(j, Checkpoint::Beta3);
            // the restoring carry is always ~q
            e.push(Gate::cnot(q, w));
            e.push(Gate::not(w));
            e.mark(j, Checkpoint::Beta4);
            self.select_divisor_if_clear(e, q);
        } else {
            self.select_divisor_if_clear(e, w);
            e.mark(j, Checkpoint::Alpha);
            e.push(Gate::reset(w));
            e.mark(j, Checkpoint::Beta2);
            ripple_add(e, &self.restore_operand(), &partial, &self.scratch, Some(w));
            e.mark(j, Checkpoint::Beta3);
            e.push(Gate::reset(w));
            e.mark(j, Checkpoint::Beta4);
            // restore line i can only be 1 where divisor line i is 1
            for (&x, &r) in self.divisor.iter().zip(&self.restore) {
                e.push(Gate::creset(x, r));
            }
            if j + 1 < self.n - 1 {
                e.push(Gate::reset(plan.window.line(self.k - 1)));
            }
        }
        e.mark(j, Checkpoint::Gamma);
    }

    fn zero_test(&self, e: &mut Emitter) {
        let inputs: Vec<usize> = (self.dividend_start..self.dividend_start + self.m).collect();
        for &i in &inputs {
            e.push(Gate::not(i));
        }
        and_tree(e, &inputs, &self.zero_scratch, self.flag);
        for &i in &inputs {
            e.push(Gate::not(i));
        }
    }
}

/// One CSA stage's geometry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StagePlan {
    /// `0 ..= n − 2`.
    pub stage: usize,
    /// The `k`-line partial-dividend bus this stage operates on.
    pub window: LineRange,
    /// Dividend lines entering the partial bus at this stage: the top two
    /// for stage 0, one afterwards.
    pub brought_down: Vec<usize>,
    /// Quotient bit written by this stage (reversible variant only).
    pub quotient_line: Option<usize>,
}

impl StagePlan {
    pub fn for_stage(spec: &ProblemSpec, stage: usize) -> Result<Self> {
        if stage >= spec.stages() {
            return Err(Error::InvalidLayout(format!(
                "stage {stage} out of range for n={}",
                spec.n()
            )));
        }
        Ok(Lines::new(spec)?.0.plan(stage))
    }

    pub fn all(spec: &ProblemSpec) -> Result<Vec<Self>> {
        let (lines, _) = Lines::new(spec)?;
        Ok((0..spec.stages()).map(|j| lines.plan(j)).collect())
    }
}

pub fn restoring_layout(spec: &ProblemSpec) -> Result<Layout> {
    Ok(Lines::new(spec)?.1)
}

fn finish(e: Emitter, layout: Layout) -> Result<WiringDiagram> {
    WiringDiagram::new(layout.width(), e.gates, layout, e.marks)
}

/// One restoring-division step on the full restoring layout. Marks are
/// relative to the fragment.
pub fn build_csa_stage(spec: &ProblemSpec, plan: &StagePlan) -> Result<WiringDiagram> {
    let (lines, layout) = Lines::new(spec)?;
    if *plan != lines.plan(plan.stage) {
        return Err(Error::InvalidLayout(format!(
            "stage plan {} does not match n={} {}",
            plan.stage,
            spec.n(),
            spec.variant()
        )));
    }
    let mut e = Emitter::default();
    lines.csa_stage(&mut e, plan);
    finish(e, layout)
}

/// Twos-complement generator fragment for `k`-bit arithmetic over roles
/// `divisor` (k−1), `complement` (k), `restore` (k−1), `adder_scratch` (k−1).
/// The carry out of the `+1` is never formed, so the result is
/// `(2^k − x) mod 2^k` with all scratch returned to 0.
pub fn build_twos_complement(k: usize) -> Result<WiringDiagram> {
    if k < 2 {
        return Err(Error::InvalidWidth(k));
    }
    let m = k - 1;
    let lines = Lines {
        n: 2 * m,
        m,
        k,
        reversible: true,
        divisor: (0..m).collect(),
        complement: (m..m + k).collect(),
        restore: (m + k..m + k + m).collect(),
        scratch: (2 * m + k..3 * m + k).collect(),
        working: 0,
        dividend_start: 0,
        quotient: None,
        zero_scratch: vec![],
        flag: 0,
    };
    let mut e = Emitter::default();
    lines.twos_complement(&mut e);
    let layout = Layout::new([
        (Role::Divisor, range(0, m)),
        (Role::Complement, range(m, k)),
        (Role::Restore, range(m + k, m)),
        (Role::AdderScratch, range(2 * m + k, m)),
    ])?;
    finish(e, layout)
}

/// Zero test over `k` input lines: `flag = 1` iff every input is 0.
/// Roles: `inputs` (k), `zero_test_scratch` (k−2, when k > 2), `flag`.
pub fn build_zero_test(k: usize) -> Result<WiringDiagram> {
    if k == 0 {
        return Err(Error::InvalidWidth(k));
    }
    let scratch_len = k.saturating_sub(2);
    let mut roles = vec![(Role::Inputs, range(0, k))];
    if scratch_len > 0 {
        roles.push((Role::ZeroTestScratch, range(k, scratch_len)));
    }
    let flag = k + scratch_len;
    roles.push((Role::Flag, range(flag, 1)));
    let inputs: Vec<usize> = (0..k).collect();
    let scratch: Vec<usize> = (k..flag).collect();
    let mut e = Emitter::default();
    for &i in &inputs {
        e.push(Gate::not(i));
    }
    and_tree(&mut e, &inputs, &scratch, flag);
    for &i in &inputs {
        e.push(Gate::not(i));
    }
    finish(e, Layout::new(roles)?)
}

/// Complete restoring divider: twos-complement generator, `n − 1` CSA
/// stages and the zero-remainder test setting `flag`.
pub fn build_restoring_division(spec: &ProblemSpec) -> Result<WiringDiagram> {
    let (lines, layout) = Lines::new(spec)?;
    debug_assert_eq!(lines.reversible, spec.variant() == Variant::RestoringReversible);
    let mut e = Emitter::default();
    lines.twos_complement(&mut e);
    for j in 0..spec.stages() {
        let mut stage = Emitter::default();
        lines.csa_stage(&mut stage, &lines.plan(j));
        e.extend(stage);
    }
    lines.zero_test(&mut e);
    finish(e, layout)
}
