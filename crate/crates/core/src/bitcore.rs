//! Fixed-width bit registers.
//!
//! Bit order is LSB-first everywhere: line `i` of a bus placed at
//! `start` carries weight `2^i`. Tableaux written MSB-first are reversed only
//! by the trace printers.

use std::fmt;

use crate::error::{Error, Result};

/// A contiguous group of lines, LSB at `start`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LineRange {
    start: usize,
    len: usize,
}

impl LineRange {
    pub fn new(start: usize, len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::EmptyRange);
        }
        Ok(Self { start, len })
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn len(&self) -> usize {
        self.len
    }

    /// Always false; ranges hold at least one line.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// One past the last line.
    pub fn end(&self) -> usize {
        self.start + self.len
    }

    /// Line index of bit `i` of the bus.
    pub fn line(&self, i: usize) -> usize {
        debug_assert!(i < self.len);
        self.start + i
    }

    pub fn lines(&self) -> std::ops::Range<usize> {
        self.start..self.end()
    }

    pub fn contains(&self, line: usize) -> bool {
        self.lines().contains(&line)
    }

    fn check(&self, width: usize) -> Result<()> {
        if self.end() > width {
            return Err(Error::RangeOutOfBounds {
                start: self.start,
                len: self.len,
                width,
            });
        }
        Ok(())
    }
}

impl fmt::Display for LineRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})", self.start, self.end())
    }
}

/// The state of one processor register: `width` binary lines.
///
/// Registers are values. The public operations return new registers and
/// leave the receiver untouched.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Register {
    width: usize,
    words: Vec<u64>,
}

impl Register {
    pub fn zeros(width: usize) -> Self {
        Self {
            width,
            words: vec![0; width.div_ceil(64)],
        }
    }

    /// Binary expansion of `value` over `width` lines.
    pub fn from_value(value: u64, width: usize) -> Result<Self> {
        if width < 64 && value >> width != 0 {
            return Err(Error::ValueTooLarge { value, width });
        }
        let mut reg = Self::zeros(width);
        if width > 0 {
            reg.words[0] = value;
        }
        Ok(reg)
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut reg = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            reg.set(i, b);
        }
        reg
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Value of line `i`. Panics if `i >= width`.
    pub fn bit(&self, i: usize) -> bool {
        assert!(i < self.width, "line {i} out of range for width {}", self.width);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.width).map(|i| self.bit(i))
    }

    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    pub fn read_bus(&self, range: LineRange) -> Result<u64> {
        range.check(self.width)?;
        if range.len() > 64 {
            return Err(Error::BusTooWide(range.len()));
        }
        Ok(range
            .lines()
            .enumerate()
            .fold(0u64, |acc, (i, line)| acc | (u64::from(self.bit(line)) << i)))
    }

    pub fn write_bus(&self, range: LineRange, value: u64) -> Result<Register> {
        let mut out = self.clone();
        out.write_bus_in_place(range, value)?;
        Ok(out)
    }

    pub(crate) fn write_bus_in_place(&mut self, range: LineRange, value: u64) -> Result<()> {
        range.check(self.width)?;
        if range.len() > 64 {
            return Err(Error::BusTooWide(range.len()));
        }
        if range.len() < 64 && value >> range.len() != 0 {
            return Err(Error::ValueTooLarge {
                value,
                width: range.len(),
            });
        }
        for (i, line) in range.lines().enumerate() {
            self.set(line, (value >> i) & 1 == 1);
        }
        Ok(())
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub(crate) fn get_unchecked(&self, i: usize) -> bool {
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize, value: bool) {
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    #[inline]
    pub(crate) fn flip(&mut self, i: usize) {
        self.words[i / 64] ^= 1u64 << (i % 64);
    }
}

impl fmt::Debug for Register {
    /// MSB-first, like the figures.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Register({}:", self.width)?;
        for i in (0..self.width).rev() {
            f.write_str(if self.bit(i) { "1" } else { "0" })?;
        }
        f.write_str(")")
    }
}
