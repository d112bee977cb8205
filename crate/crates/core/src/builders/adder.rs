//! Ripple-carry adder without carry-in.
//!
//! Forward pass: a TOFFOLI/CNOT/TOFFOLI "carry" block per bit computes the
//! carry into the next bit on a scratch line. The top bit gets its sum, then
//! a backward pass uncomputes each scratch carry and writes the remaining
//! sums. Only the carry-out line is left changed.

use crate::builders::{range, Emitter};
use crate::error::Result;
use crate::netlist::{Gate, Layout, Marks, Role, WiringDiagram};

/// Emit `B ← (A + B) mod 2^k` with optional carry-out.
///
/// `a[i] == None` marks an operand bit that is constant 0; gates that only
/// involve it are omitted. `carries` holds the `k − 1` internal carry lines,
/// which must be 0 on entry and are 0 again on exit. Without a carry-out
/// line the top carry is never formed and the sum is plain modular.
pub(crate) fn ripple_add(
    e: &mut Emitter,
    a: &[Option<usize>],
    b: &[usize],
    carries: &[usize],
    carry_out: Option<usize>,
) {
    let k = b.len();
    assert!(k >= 1 && a.len() == k && carries.len() == k - 1);
    let cin = |i: usize| if i == 0 { None } else { Some(carries[i - 1]) };

    let carry = |e: &mut Emitter, i: usize, t: usize| {
        if let Some(ai) = a[i] {
            e.push(Gate::toffoli(ai, b[i], t));
            e.push(Gate::cnot(ai, b[i]));
        }
        if let Some(c) = cin(i) {
            e.push(Gate::toffoli(c, b[i], t));
        }
    };
    let uncarry = |e: &mut Emitter, i: usize, t: usize| {
        if let Some(c) = cin(i) {
            e.push(Gate::toffoli(c, b[i], t));
        }
        if let Some(ai) = a[i] {
            e.push(Gate::cnot(ai, b[i]));
            e.push(Gate::toffoli(ai, b[i], t));
        }
    };
    let sum = |e: &mut Emitter, i: usize| {
        if let Some(ai) = a[i] {
            e.push(Gate::cnot(ai, b[i]));
        }
        if let Some(c) = cin(i) {
            e.push(Gate::cnot(c, b[i]));
        }
    };

    for i in 0..k - 1 {
        carry(e, i, carries[i]);
    }
    let top = k - 1;
    match carry_out {
        Some(out) => {
            // the carry block leaves a ^ b on the top line
            carry(e, top, out);
            if let Some(c) = cin(top) {
                e.push(Gate::cnot(c, b[top]));
            }
        }
        None => sum(e, top),
    }
    for i in (0..k - 1).rev() {
        uncarry(e, i, carries[i]);
        sum(e, i);
    }
}

/// Stand-alone `k`-bit adder over roles `a`, `b`, `adder_scratch`
/// (`k − 1` lines, omitted when `k = 1`) and `carry_out`.
pub fn build_adder(k: usize) -> Result<WiringDiagram> {
    assert!(k >= 1, "adder needs at least one bit");
    let a: Vec<Option<usize>> = (0..k).map(Some).collect();
    let b: Vec<usize> = (k..2 * k).collect();
    let scratch: Vec<usize> = (2 * k..3 * k - 1).collect();
    let out = 3 * k - 1;
    let mut e = Emitter::default();
    ripple_add(&mut e, &a, &b, &scratch, Some(out));

    let mut roles = vec![(Role::AddendA, range(0, k)), (Role::AddendB, range(k, k))];
    if k > 1 {
        roles.push((Role::AdderScratch, range(2 * k, k - 1)));
    }
    roles.push((Role::CarryOut, range(out, 1)));
    WiringDiagram::new(3 * k, e.gates, Layout::new(roles)?, Marks::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitcore::Register;
    use crate::netlist::run_diagram;

    fn add(k: usize, a: u64, b: u64) -> (u64, u64, bool, u64) {
        let d = build_adder(k).unwrap();
        let l = d.layout();
        let reg = Register::zeros(d.width())
            .write_bus(l.get(Role::AddendA).unwrap(), a)
            .unwrap()
            .write_bus(l.get(Role::AddendB).unwrap(), b)
            .unwrap();
        let (out, _) = run_diagram(&d, &reg).unwrap();
        let scratch = l.get(Role::AdderScratch).map_or(0, |r| out.read_bus(r).unwrap());
        (
            out.read_bus(l.get(Role::AddendA).unwrap()).unwrap(),
            out.read_bus(l.get(Role::AddendB).unwrap()).unwrap(),
            out.bit(l.get(Role::CarryOut).unwrap().start()),
            scratch,
        )
    }

    #[test]
    fn five_plus_three_overflows() {
        assert_eq!(add(3, 0b101, 0b011), (0b101, 0b000, true, 0));
    }

    #[test]
    fn zero_addend_is_identity() {
        for b in 0..8 {
            assert_eq!(add(3, 0, b), (0, b, false, 0));
        }
    }

    #[test]
    fn exhaustive_up_to_five_bits() {
        for k in 1..=5usize {
            let modulus = 1u64 << k;
            for a in 0..modulus {
                for b in 0..modulus {
                    let expect = (a, (a + b) % modulus, a + b >= modulus, 0);
                    assert_eq!(add(k, a, b), expect, "k={k} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn gate_count_is_eight_per_bit() {
        for k in 2..=33 {
            assert_eq!(build_adder(k).unwrap().gate_count(), 8 * k - 7);
        }
    }

    fn run_emitted(e: &Emitter, width: usize, reg: Register) -> Register {
        let d = WiringDiagram::new(width, e.gates.clone(), Layout::empty(), Marks::new()).unwrap();
        run_diagram(&d, &reg).unwrap().0
    }

    #[test]
    fn constant_zero_operand_bits_and_modular_form() {
        // a = lines 0..3 with its top bit absent, b = 3..7, carries 7..10
        let a = [Some(0), Some(1), Some(2), None];
        let b: Vec<usize> = (3..7).collect();
        let carries: Vec<usize> = (7..10).collect();
        for carry_out in [Some(10), None] {
            let mut e = Emitter::default();
            ripple_add(&mut e, &a, &b, &carries, carry_out);
            for x in 0..8u64 {
                for y in 0..16u64 {
                    let reg = Register::from_value(x | (y << 3), 11).unwrap();
                    let out = run_emitted(&e, 11, reg);
                    let sum = x + y;
                    assert_eq!(out.read_bus(range(3, 4)).unwrap(), sum % 16);
                    assert_eq!(out.read_bus(range(0, 3)).unwrap(), x);
                    assert_eq!(out.read_bus(range(7, 3)).unwrap(), 0);
                    assert_eq!(out.bit(10), carry_out.is_some() && sum >= 16);
                }
            }
        }
    }
}
