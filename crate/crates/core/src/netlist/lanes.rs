//! Bit-sliced lockstep execution: line `i` of up to 64 registers is packed
//! into one word, so each gate updates every register in the block with a
//! single word operation.

use crate::bitcore::Register;
use crate::netlist::{Gate, GateKind};

pub(crate) const LANES: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct LaneBlock {
    lines: Vec<u64>,
    lanes: usize,
}

impl LaneBlock {
    /// Transpose `regs` (at most 64, all of width `width`) into lane form.
    pub(crate) fn load(regs: &[Register], width: usize) -> Self {
        debug_assert!(regs.len() <= LANES);
        let mut lines = vec![0u64; width];
        for (lane, reg) in regs.iter().enumerate() {
            debug_assert_eq!(reg.width(), width);
            for (w, &word) in reg.words().iter().enumerate() {
                let mut bits = word;
                while bits != 0 {
                    let b = bits.trailing_zeros() as usize;
                    lines[w * 64 + b] |= 1 << lane;
                    bits &= bits - 1;
                }
            }
        }
        Self { lines, lanes: regs.len() }
    }

    pub(crate) fn store(&self, regs: &mut [Register]) {
        debug_assert_eq!(regs.len(), self.lanes);
        let width = self.lines.len();
        for reg in regs.iter_mut() {
            *reg = Register::zeros(width);
        }
        for (i, &word) in self.lines.iter().enumerate() {
            let mut bits = word & self.lane_mask();
            while bits != 0 {
                let lane = bits.trailing_zeros() as usize;
                regs[lane].set(i, true);
                bits &= bits - 1;
            }
        }
    }

    pub(crate) fn lane_mask(&self) -> u64 {
        if self.lanes == LANES {
            u64::MAX
        } else {
            (1u64 << self.lanes) - 1
        }
    }

    #[inline]
    pub(crate) fn line(&self, i: usize) -> u64 {
        self.lines[i]
    }

    /// Copy every line of the lanes selected by `mask` from `other`.
    pub(crate) fn merge_from(&mut self, other: &LaneBlock, mask: u64) {
        for (dst, &src) in self.lines.iter_mut().zip(&other.lines) {
            *dst = (*dst & !mask) | (src & mask);
        }
    }

    pub(crate) fn apply(&mut self, gates: &[Gate]) {
        let l = &mut self.lines;
        for g in gates {
            let t = g.target;
            let [a, b] = g.controls;
            match g.kind {
                GateKind::Not => l[t] = !l[t],
                GateKind::Cnot => l[t] ^= l[a],
                GateKind::Toffoli => l[t] ^= l[a] & l[b],
                GateKind::Reset => l[t] = 0,
                GateKind::Creset => l[t] &= !l[a],
            }
        }
    }
}

/// Run `gates` over `regs` in blocks of 64.
pub fn run_registers(gates: &[Gate], regs: &mut [Register]) {
    let Some(width) = regs.first().map(Register::width) else {
        return;
    };
    for chunk in regs.chunks_mut(LANES) {
        let mut block = LaneBlock::load(chunk, width);
        block.apply(gates);
        block.store(chunk);
    }
}
