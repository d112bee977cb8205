//! Gate primitives, wiring diagrams and their execution.
//!
//! A [`WiringDiagram`] is an ordered gate list over a fixed number of
//! lines. Every gate counts as one operation. Diagrams made only of
//! NOT / CNOT / TOFFOLI are reversible and can be inverted by reversing
//! the gate order; RESET and CRESET destroy information.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::bitcore::{LineRange, Register};
use crate::builders::{paper_bits, paper_ops, Variant};
use crate::error::{Error, Result};

pub mod lanes;
mod text;

pub use text::{parse_netlist, serialize_netlist};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    Not,
    Cnot,
    Toffoli,
    Reset,
    Creset,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::Not | GateKind::Reset => 0,
            GateKind::Cnot | GateKind::Creset => 1,
            GateKind::Toffoli => 2,
        }
    }

    pub fn is_reversible(self) -> bool {
        !matches!(self, GateKind::Reset | GateKind::Creset)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            GateKind::Not => "NOT",
            GateKind::Cnot => "CNOT",
            GateKind::Toffoli => "TOFFOLI",
            GateKind::Reset => "RESET",
            GateKind::Creset => "CRESET",
        }
    }
}

impl FromStr for GateKind {
    type Err = ();

    fn from_str(s: &str) -> std::result::Result<Self, ()> {
        Ok(match s {
            "NOT" => GateKind::Not,
            "CNOT" => GateKind::Cnot,
            "TOFFOLI" => GateKind::Toffoli,
            "RESET" => GateKind::Reset,
            "CRESET" => GateKind::Creset,
            _ => return Err(()),
        })
    }
}

/// One primitive operation on a register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Gate {
    kind: GateKind,
    target: usize,
    controls: [usize; 2],
}

impl Gate {
    pub fn not(target: usize) -> Self {
        Self { kind: GateKind::Not, target, controls: [0; 2] }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self { kind: GateKind::Cnot, target, controls: [control, 0] }
    }

    pub fn toffoli(c1: usize, c2: usize, target: usize) -> Self {
        Self { kind: GateKind::Toffoli, target, controls: [c1, c2] }
    }

    /// Unconditionally zero `target`.
    pub fn reset(target: usize) -> Self {
        Self { kind: GateKind::Reset, target, controls: [0; 2] }
    }

    /// Zero `target` when `control` is 1.
    pub fn creset(control: usize, target: usize) -> Self {
        Self { kind: GateKind::Creset, target, controls: [control, 0] }
    }

    /// Build a gate from a kind and its line list (controls first).
    pub fn from_parts(kind: GateKind, controls: &[usize], target: usize) -> Result<Self> {
        if controls.len() != kind.arity() {
            return Err(Error::InvalidLayout(format!(
                "{} takes {} controls, got {}",
                kind.as_str(),
                kind.arity(),
                controls.len()
            )));
        }
        let mut c = [0; 2];
        c[..controls.len()].copy_from_slice(controls);
        let gate = Self { kind, target, controls: c };
        if !gate.lines_distinct() {
            return Err(Error::DuplicateLine(gate.to_string()));
        }
        Ok(gate)
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn controls(&self) -> &[usize] {
        &self.controls[..self.kind.arity()]
    }

    pub fn is_reversible(&self) -> bool {
        self.kind.is_reversible()
    }

    fn lines_distinct(&self) -> bool {
        let c = self.controls();
        !c.contains(&self.target) && !(c.len() == 2 && c[0] == c[1])
    }

    fn max_line(&self) -> usize {
        self.controls().iter().copied().fold(self.target, usize::max)
    }

    pub(crate) fn check(&self, width: usize) -> Result<()> {
        if !self.lines_distinct() {
            return Err(Error::DuplicateLine(self.to_string()));
        }
        let line = self.max_line();
        if line >= width {
            return Err(Error::LineOutOfBounds {
                gate: self.to_string(),
                line,
                width,
            });
        }
        Ok(())
    }

    #[inline]
    pub(crate) fn apply_in_place(&self, reg: &mut Register) {
        let [a, b] = self.controls;
        let t = self.target;
        match self.kind {
            GateKind::Not => reg.flip(t),
            GateKind::Cnot => {
                if reg.get_unchecked(a) {
                    reg.flip(t)
                }
            }
            GateKind::Toffoli => {
                if reg.get_unchecked(a) && reg.get_unchecked(b) {
                    reg.flip(t)
                }
            }
            GateKind::Reset => reg.set(t, false),
            GateKind::Creset => {
                if reg.get_unchecked(a) {
                    reg.set(t, false)
                }
            }
        }
    }
}

impl fmt::Display for Gate {
    /// The netlist spelling without the `gate` keyword, e.g. `CNOT 1 2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kind.as_str())?;
        for c in self.controls() {
            write!(f, " {c}")?;
        }
        write!(f, " {}", self.target)
    }
}

/// Named groups of lines in a diagram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    /// Divisor `x`, without sign line.
    Divisor,
    /// Twos complement of the divisor.
    Complement,
    /// Operand bus the CSA stage loads with the divisor when restoring.
    Restore,
    /// Internal ripple carries, always returned to zero.
    AdderScratch,
    /// Working carry line first, then any saved-carry lines.
    Carries,
    /// Dividend lines that are brought down one per stage.
    Dividend,
    /// The first partial-dividend window (top two dividend bits plus zeros).
    Partial,
    /// One line per CSA stage, quotient LSB first.
    Quotient,
    ZeroTestScratch,
    Flag,
    /// Adder fragment operands.
    AddendA,
    AddendB,
    CarryOut,
    /// Inputs of a stand-alone zero-test fragment.
    Inputs,
}

impl Role {
    pub const ALL: [Role; 14] = [
        Role::Divisor,
        Role::Complement,
        Role::Restore,
        Role::AdderScratch,
        Role::Carries,
        Role::Dividend,
        Role::Partial,
        Role::Quotient,
        Role::ZeroTestScratch,
        Role::Flag,
        Role::AddendA,
        Role::AddendB,
        Role::CarryOut,
        Role::Inputs,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Role::Divisor => "divisor",
            Role::Complement => "complement",
            Role::Restore => "restore",
            Role::AdderScratch => "adder_scratch",
            Role::Carries => "carries",
            Role::Dividend => "dividend",
            Role::Partial => "partial",
            Role::Quotient => "quotient",
            Role::ZeroTestScratch => "zero_test_scratch",
            Role::Flag => "flag",
            Role::AddendA => "a",
            Role::AddendB => "b",
            Role::CarryOut => "carry_out",
            Role::Inputs => "inputs",
        }
    }
}

impl FromStr for Role {
    type Err = ();

    fn from_str(s: &str) -> std::result::Result<Self, ()> {
        Role::ALL.into_iter().find(|r| r.as_str() == s).ok_or(())
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Role → line-range map. Roles are disjoint and, when any are present,
/// tile `[0, width)` exactly.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Layout {
    // sorted by start line
    entries: Vec<(Role, LineRange)>,
}

impl Layout {
    pub fn new(entries: impl IntoIterator<Item = (Role, LineRange)>) -> Result<Self> {
        let mut entries: Vec<_> = entries.into_iter().collect();
        entries.sort_by_key(|(_, r)| r.start());
        for (i, (role, _)) in entries.iter().enumerate() {
            if entries[..i].iter().any(|(r, _)| r == role) {
                return Err(Error::InvalidLayout(format!("role {role} defined twice")));
            }
        }
        let mut next = 0;
        for (role, range) in &entries {
            if range.start() != next {
                return Err(Error::InvalidLayout(format!(
                    "role {role} starts at {} but line {next} is the next unassigned line",
                    range.start()
                )));
            }
            next = range.end();
        }
        Ok(Self { entries })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Lines covered by the roles.
    pub fn width(&self) -> usize {
        self.entries.last().map_or(0, |(_, r)| r.end())
    }

    pub fn get(&self, role: Role) -> Option<LineRange> {
        self.entries.iter().find(|(r, _)| *r == role).map(|(_, l)| *l)
    }

    pub fn require(&self, role: Role) -> Result<LineRange> {
        self.get(role)
            .ok_or_else(|| Error::InvalidLayout(format!("missing role {role}")))
    }

    pub fn iter(&self) -> impl Iterator<Item = (Role, LineRange)> + '_ {
        self.entries.iter().copied()
    }

    pub fn role_of(&self, line: usize) -> Option<Role> {
        self.entries
            .iter()
            .find(|(_, r)| r.contains(line))
            .map(|(role, _)| *role)
    }
}

/// Named points inside one CSA stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Checkpoint {
    /// Operand selected: restore bus holds the divisor or zeros.
    Alpha,
    /// Carry out of the subtracting adder.
    Beta1,
    /// Working carry cleared.
    Beta2,
    /// Carry out of the restoring adder.
    Beta3,
    /// Working carry cleared again.
    Beta4,
    /// End of stage; the partial window shifts by relabeling.
    Gamma,
}

impl Checkpoint {
    pub const ALL: [Checkpoint; 6] = [
        Checkpoint::Alpha,
        Checkpoint::Beta1,
        Checkpoint::Beta2,
        Checkpoint::Beta3,
        Checkpoint::Beta4,
        Checkpoint::Gamma,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Checkpoint::Alpha => "alpha",
            Checkpoint::Beta1 => "beta1",
            Checkpoint::Beta2 => "beta2",
            Checkpoint::Beta3 => "beta3",
            Checkpoint::Beta4 => "beta4",
            Checkpoint::Gamma => "gamma",
        }
    }
}

impl fmt::Display for Checkpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Checkpoint {
    type Err = ();

    fn from_str(s: &str) -> std::result::Result<Self, ()> {
        Checkpoint::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or(())
    }
}

/// `(stage, checkpoint)` → number of gates executed when the checkpoint is reached.
pub type Marks = BTreeMap<(usize, Checkpoint), usize>;

/// An immutable ordered gate list over `width` lines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WiringDiagram {
    width: usize,
    gates: Vec<Gate>,
    layout: Layout,
    marks: Marks,
    reversible: bool,
}

impl WiringDiagram {
    pub fn new(width: usize, gates: Vec<Gate>, layout: Layout, marks: Marks) -> Result<Self> {
        for g in &gates {
            g.check(width)?;
        }
        if !layout.is_empty() && layout.width() != width {
            return Err(Error::InvalidLayout(format!(
                "roles cover {} lines but the diagram has {width}",
                layout.width()
            )));
        }
        if let Some((&(stage, cp), &idx)) = marks.iter().find(|(_, &i)| i > gates.len()) {
            return Err(Error::InvalidLayout(format!(
                "mark {stage}:{} at gate {idx} is past the last gate",
                cp.as_str()
            )));
        }
        let reversible = gates.iter().all(Gate::is_reversible);
        Ok(Self { width, gates, layout, marks, reversible })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn marks(&self) -> &Marks {
        &self.marks
    }

    pub fn mark(&self, stage: usize, checkpoint: Checkpoint) -> Option<usize> {
        self.marks.get(&(stage, checkpoint)).copied()
    }

    pub fn is_reversible(&self) -> bool {
        self.reversible
    }

    /// Gate counts per kind.
    pub fn histogram(&self) -> BTreeMap<GateKind, usize> {
        let mut h = BTreeMap::new();
        for g in &self.gates {
            *h.entry(g.kind()).or_insert(0) += 1;
        }
        h
    }

    pub fn run(&self, register: &Register) -> Result<(Register, usize)> {
        run_diagram(self, register)
    }

    pub fn invert(&self) -> Result<WiringDiagram> {
        invert_diagram(self)
    }
}

pub fn apply_gate(register: &Register, gate: &Gate) -> Result<Register> {
    gate.check(register.width())?;
    let mut out = register.clone();
    gate.apply_in_place(&mut out);
    Ok(out)
}

/// Apply every gate in order. Returns the final register and the number
/// of gates applied, which is always the gate count.
pub fn run_diagram(diagram: &WiringDiagram, register: &Register) -> Result<(Register, usize)> {
    check_width(diagram, register)?;
    let mut out = register.clone();
    for g in &diagram.gates {
        g.apply_in_place(&mut out);
    }
    Ok((out, diagram.gates.len()))
}

/// Run `diagram` and return the register state after each prefix length
/// listed in `at` (in the order given).
pub fn run_with_snapshots(
    diagram: &WiringDiagram,
    register: &Register,
    at: &[usize],
) -> Result<Vec<Register>> {
    check_width(diagram, register)?;
    let mut order: Vec<usize> = (0..at.len()).collect();
    order.sort_by_key(|&i| at[i]);
    let mut out = vec![None; at.len()];
    let mut reg = register.clone();
    let mut done = 0;
    for i in order {
        let upto = at[i].min(diagram.gates.len());
        for g in &diagram.gates[done..upto] {
            g.apply_in_place(&mut reg);
        }
        done = done.max(upto);
        out[i] = Some(reg.clone());
    }
    Ok(out.into_iter().map(|r| r.expect("every snapshot filled")).collect())
}

fn check_width(diagram: &WiringDiagram, register: &Register) -> Result<()> {
    if register.width() != diagram.width {
        return Err(Error::WidthMismatch {
            register: register.width(),
            diagram: diagram.width,
        });
    }
    Ok(())
}

/// Reverse the gate order of a reversible diagram. Checkpoint marks are
/// mirrored so they still name the same intermediate state.
pub fn invert_diagram(diagram: &WiringDiagram) -> Result<WiringDiagram> {
    if let Some(g) = diagram.gates.iter().find(|g| !g.is_reversible()) {
        return Err(Error::NotInvertible(g.to_string()));
    }
    let len = diagram.gates.len();
    Ok(WiringDiagram {
        width: diagram.width,
        gates: diagram.gates.iter().rev().copied().collect(),
        layout: diagram.layout.clone(),
        marks: diagram.marks.iter().map(|(&k, &i)| (k, len - i)).collect(),
        reversible: true,
    })
}

/// Measured line and operation counts next to the closed-form ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResourceReport {
    pub n: usize,
    pub variant: Variant,
    pub bits_measured: usize,
    pub ops_measured: u128,
    pub bits_paper: usize,
    pub ops_paper: u128,
}

pub fn resource_stats(diagram: &WiringDiagram, n: usize, variant: Variant) -> Result<ResourceReport> {
    Ok(ResourceReport {
        n,
        variant,
        bits_measured: diagram.width(),
        ops_measured: diagram.gate_count() as u128,
        bits_paper: paper_bits(n, variant)?,
        ops_paper: paper_ops(n, variant)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn reg(bits: &[u8]) -> Register {
        Register::from_bits(&bits.iter().map(|&b| b == 1).collect::<Vec<_>>())
    }

    fn diagram(width: usize, gates: Vec<Gate>) -> WiringDiagram {
        WiringDiagram::new(width, gates, Layout::empty(), Marks::new()).unwrap()
    }

    #[test]
    fn toffoli_fires_on_both_controls() {
        let out = apply_gate(&reg(&[0, 1, 1]), &Gate::toffoli(1, 2, 0)).unwrap();
        assert_eq!(out, reg(&[1, 1, 1]));
        let out = apply_gate(&reg(&[0, 1, 0]), &Gate::toffoli(1, 2, 0)).unwrap();
        assert_eq!(out, reg(&[0, 1, 0]));
    }

    #[test]
    fn cnot_with_clear_control_is_identity() {
        let r = reg(&[0, 1, 0]);
        assert_eq!(apply_gate(&r, &Gate::cnot(0, 1)).unwrap(), r);
        assert_eq!(apply_gate(&r, &Gate::cnot(1, 2)).unwrap(), reg(&[0, 1, 1]));
    }

    #[test]
    fn reset_gates() {
        assert_eq!(apply_gate(&reg(&[1, 1]), &Gate::reset(0)).unwrap(), reg(&[0, 1]));
        assert_eq!(apply_gate(&reg(&[0, 1]), &Gate::reset(0)).unwrap(), reg(&[0, 1]));
        // b zeroed only when c = 1 and b = 1
        assert_eq!(apply_gate(&reg(&[1, 1]), &Gate::creset(0, 1)).unwrap(), reg(&[1, 0]));
        assert_eq!(apply_gate(&reg(&[0, 1]), &Gate::creset(0, 1)).unwrap(), reg(&[0, 1]));
        assert_eq!(apply_gate(&reg(&[1, 0]), &Gate::creset(0, 1)).unwrap(), reg(&[1, 0]));
    }

    #[test]
    fn gate_errors() {
        assert!(matches!(
            apply_gate(&reg(&[0, 0]), &Gate::not(2)),
            Err(Error::LineOutOfBounds { line: 2, .. })
        ));
        assert!(matches!(
            apply_gate(&reg(&[0, 0, 0]), &Gate::toffoli(1, 1, 0)),
            Err(Error::DuplicateLine(_))
        ));
        assert!(Gate::from_parts(GateKind::Cnot, &[5], 5).is_err());
        assert!(Gate::from_parts(GateKind::Not, &[1], 0).is_err());
    }

    #[test]
    fn run_counts_every_gate() {
        let r = reg(&[1, 0, 1, 0]);
        let empty = diagram(4, vec![]);
        assert_eq!(run_diagram(&empty, &r).unwrap(), (r.clone(), 0));
        let twice = diagram(4, vec![Gate::not(3), Gate::not(3)]);
        assert_eq!(run_diagram(&twice, &r).unwrap(), (r.clone(), 2));
        assert_eq!(
            run_diagram(&twice, &reg(&[1])),
            Err(Error::WidthMismatch { register: 1, diagram: 4 })
        );
    }

    #[test]
    fn invert_reverses_order() {
        let d = diagram(4, vec![Gate::not(3), Gate::cnot(1, 2)]);
        let inv = invert_diagram(&d).unwrap();
        assert_eq!(inv.gates(), &[Gate::cnot(1, 2), Gate::not(3)]);
        let bad = diagram(4, vec![Gate::not(3), Gate::reset(1)]);
        assert!(!bad.is_reversible());
        assert_eq!(invert_diagram(&bad), Err(Error::NotInvertible("RESET 1".into())));
    }

    #[test]
    fn layout_must_tile() {
        let r = |s, l| LineRange::new(s, l).unwrap();
        assert!(Layout::new([(Role::Divisor, r(0, 2)), (Role::Flag, r(2, 1))]).is_ok());
        assert!(Layout::new([(Role::Divisor, r(0, 2)), (Role::Flag, r(3, 1))]).is_err());
        assert!(Layout::new([(Role::Divisor, r(0, 2)), (Role::Flag, r(1, 1))]).is_err());
        assert!(Layout::new([(Role::Flag, r(0, 2)), (Role::Flag, r(2, 1))]).is_err());
        let l = Layout::new([(Role::Flag, r(2, 1)), (Role::Divisor, r(0, 2))]).unwrap();
        assert_eq!(l.width(), 3);
        assert_eq!(l.role_of(1), Some(Role::Divisor));
        let bad = WiringDiagram::new(4, vec![], l, Marks::new());
        assert!(bad.is_err());
    }

    #[test]
    fn snapshots_follow_prefixes() {
        let d = diagram(2, vec![Gate::not(0), Gate::cnot(0, 1), Gate::not(0)]);
        let snaps = run_with_snapshots(&d, &reg(&[0, 0]), &[3, 0, 1, 2]).unwrap();
        assert_eq!(snaps, vec![reg(&[0, 1]), reg(&[0, 0]), reg(&[1, 0]), reg(&[1, 1])]);
    }

    fn arb_gate(width: usize, reversible_only: bool) -> impl Strategy<Value = Gate> {
        let kinds = if reversible_only { 3 } else { 5 };
        let lines = proptest::sample::subsequence((0..width).collect::<Vec<_>>(), 3).prop_shuffle();
        (0..kinds, lines)
            .prop_map(|(k, l)| match k {
                0 => Gate::not(l[0]),
                1 => Gate::cnot(l[0], l[1]),
                2 => Gate::toffoli(l[0], l[1], l[2]),
                3 => Gate::reset(l[0]),
                _ => Gate::creset(l[0], l[1]),
            })
    }

    proptest! {
        #[test]
        fn reversible_gates_are_involutions(
            g in arb_gate(6, true),
            bits in proptest::collection::vec(any::<bool>(), 6),
        ) {
            let r = Register::from_bits(&bits);
            let twice = apply_gate(&apply_gate(&r, &g).unwrap(), &g).unwrap();
            prop_assert_eq!(twice, r);
        }

        #[test]
        fn resets_are_idempotent(
            c in 0usize..6, t in 0usize..6,
            bits in proptest::collection::vec(any::<bool>(), 6),
        ) {
            prop_assume!(c != t);
            let r = Register::from_bits(&bits);
            for g in [Gate::reset(t), Gate::creset(c, t)] {
                let once = apply_gate(&r, &g).unwrap();
                prop_assert_eq!(apply_gate(&once, &g).unwrap(), once);
            }
        }

        #[test]
        fn random_reversible_diagrams_invert(
            gates in proptest::collection::vec(arb_gate(8, true), 0..40),
            bits in proptest::collection::vec(any::<bool>(), 8),
        ) {
            let d = diagram(8, gates);
            let r = Register::from_bits(&bits);
            let (fwd, _) = run_diagram(&d, &r).unwrap();
            let (back, ops) = run_diagram(&invert_diagram(&d).unwrap(), &fwd).unwrap();
            prop_assert_eq!(back, r);
            prop_assert_eq!(ops, d.gate_count());
        }

        #[test]
        fn lanes_agree_with_scalar(
            gates in proptest::collection::vec(arb_gate(70, false), 0..60),
            seeds in proptest::collection::vec(any::<u64>(), 1..80),
        ) {
            let d = diagram(70, gates);
            let regs: Vec<Register> = seeds
                .iter()
                .map(|&s| {
                    let lo = Register::from_value(s, 70).unwrap();
                    Register::from_bits(
                        &lo.bits().enumerate().map(|(i, b)| b ^ (i >= 64 && s.count_ones() % 2 == 1)).collect::<Vec<_>>(),
                    )
                })
                .collect();
            let scalar: Vec<Register> = regs.iter().map(|r| run_diagram(&d, r).unwrap().0).collect();
            let mut lanes = regs.clone();
            lanes::run_registers(d.gates(), &mut lanes);
            prop_assert_eq!(lanes, scalar);
        }
    }
}
