//! Plain-integer reference implementations.
//!
//! Nothing here touches gates or layouts; these functions are the
//! independent witness the gate-level results are checked against.

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Quotient, remainder and zero-remainder flag of one division.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DivisionOutcome {
    pub quotient: u64,
    pub remainder: u64,
    pub flag: bool,
}

/// One subtract/restore step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StageRecord {
    /// Partial dividend entering the step.
    pub partial_before: u64,
    /// Carry out of `partial + complement`; this is the quotient bit.
    pub carry: bool,
    /// Whether the divisor was added back.
    pub restored: bool,
    pub quotient_bit: bool,
    /// Partial dividend after the step, before the next bit is brought down.
    pub partial_after: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageTrace {
    pub n: usize,
    pub dividend: u64,
    pub divisor: u64,
    pub stages: Vec<StageRecord>,
}

impl StageTrace {
    /// Adder width (divisor bits plus sign).
    pub fn k(&self) -> usize {
        self.n / 2 + 1
    }

    /// Quotient bits read MSB first.
    pub fn quotient(&self) -> u64 {
        self.stages
            .iter()
            .fold(0, |q, s| (q << 1) | u64::from(s.quotient_bit))
    }

    pub fn carries(&self) -> Vec<bool> {
        self.stages.iter().map(|s| s.carry).collect()
    }

    /// Long-division tableau, MSB first, carries in parentheses.
    ///
    /// ```text
    /// 1111 / 11  (n=4, k=3)
    /// complement of 011 is 101
    /// step 1:  011 + 101 = (1)000                      q=1
    /// ...
    /// ```
    pub fn render(&self) -> String {
        let k = self.k();
        let m = self.n / 2;
        let complement = ((1u64 << k) - self.divisor) & ((1 << k) - 1);
        let b = |v: u64, w: usize| format!("{v:0w$b}");
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{} / {}  (n={}, k={})",
            b(self.dividend, self.n),
            b(self.divisor, m),
            self.n,
            k
        );
        let _ = writeln!(out, "complement of {} is {}", b(self.divisor, k), b(complement, k));
        for (i, s) in self.stages.iter().enumerate() {
            let diff = (s.partial_before + complement) & ((1 << k) - 1);
            let mut line = format!(
                "step {}: {} + {} = ({}){}",
                i + 1,
                b(s.partial_before, k),
                b(complement, k),
                u8::from(s.carry),
                b(diff, k)
            );
            if s.restored {
                let _ = write!(
                    line,
                    "  restore: {} + {} = (1){}",
                    b(diff, k),
                    b(self.divisor, k),
                    b(s.partial_after, k)
                );
            }
            let _ = writeln!(out, "{line:<60} q={}", u8::from(s.quotient_bit));
        }
        let rem = self.stages.last().map_or(0, |s| s.partial_after);
        let _ = writeln!(
            out,
            "quotient {}  remainder {}  flag {}",
            b(self.quotient(), self.n - 1),
            b(rem, k),
            u8::from(rem == 0)
        );
        out
    }
}

fn check_divisor(d: u64) -> Result<()> {
    if d < 2 {
        return Err(Error::DegenerateDivisor(d));
    }
    Ok(())
}

/// Restoring long division with a sign line, carried out step by step on
/// `k = n/2 + 1`-bit words: the partial dividend starts as the top two
/// dividend bits, each step adds the twos complement of `d`, keeps the
/// carry as the quotient bit, adds `d` back when the carry is 0, and then
/// brings down the next dividend bit.
pub fn oracle_restoring_division(dividend: u64, d: u64, n: usize) -> Result<(DivisionOutcome, StageTrace)> {
    check_divisor(d)?;
    if n < 4 || !n.is_multiple_of(2) || n > 64 {
        return Err(Error::InvalidWidth(n));
    }
    if d >> (n / 2) != 0 {
        return Err(Error::ValueTooLarge { value: d, width: n / 2 });
    }
    if n < 64 && dividend >> n != 0 {
        return Err(Error::ValueTooLarge { value: dividend, width: n });
    }
    let k = n / 2 + 1;
    let mask = (1u64 << k) - 1;
    let complement = ((1u64 << k) - d) & mask;
    let bit = |i: usize| (dividend >> i) & 1;

    let mut partial = dividend >> (n - 2);
    let mut stages = Vec::with_capacity(n - 1);
    for j in 0..n - 1 {
        let sum = partial + complement;
        let carry = (sum >> k) & 1 == 1;
        let diff = sum & mask;
        let after = if carry { diff } else { (diff + d) & mask };
        stages.push(StageRecord {
            partial_before: partial,
            carry,
            restored: !carry,
            quotient_bit: carry,
            partial_after: after,
        });
        if j + 1 < n - 1 {
            partial = (after << 1) | bit(n - 3 - j);
        }
    }
    let trace = StageTrace { n, dividend, divisor: d, stages };
    let remainder = trace.stages.last().expect("n - 1 >= 3 stages").partial_after;
    let outcome = DivisionOutcome {
        quotient: trace.quotient(),
        remainder,
        flag: remainder == 0,
    };
    Ok((outcome, trace))
}

/// Result of repeated subtraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SsOutcome {
    pub flag: bool,
    /// Subtractions performed, including the one whose carry was 0.
    pub iterations: u64,
}

/// Subtract `d` from `dividend` on `n`-bit words until the carry out is 0,
/// then compare the leftover with the twos complement of `d`.
pub fn oracle_ss(dividend: u64, d: u64, n: usize) -> Result<SsOutcome> {
    check_divisor(d)?;
    if n == 0 || n > 64 {
        return Err(Error::InvalidWidth(n));
    }
    let modulus = 1u128 << n;
    let complement = (modulus - u128::from(d)) % modulus;
    let mut r = u128::from(dividend);
    let mut iterations = 0;
    loop {
        iterations += 1;
        let sum = r + complement;
        r = sum % modulus;
        if sum < modulus {
            break;
        }
    }
    Ok(SsOutcome { flag: r == complement, iterations })
}

/// All `d` in `[2, ⌊√N⌋]` dividing `N`, ascending.
pub fn brute_force_divisors(value: u64) -> Vec<u64> {
    (2u64..)
        .take_while(|&d| d.checked_mul(d).is_some_and(|sq| sq <= value))
        .filter(|d| value.is_multiple_of(*d))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fifteen_by_three() {
        let (o, t) = oracle_restoring_division(15, 3, 4).unwrap();
        assert_eq!(o, DivisionOutcome { quotient: 5, remainder: 0, flag: true });
        assert_eq!(t.carries(), [true, false, true]);
        assert_eq!(t.stages.iter().map(|s| s.restored).collect::<Vec<_>>(), [false, true, false]);
        assert_eq!(t.stages[0].partial_before, 0b011);
        assert_eq!(t.stages[1].partial_before, 0b001);
        assert_eq!(t.stages[2].partial_before, 0b011);
        assert_eq!(t.stages[2].partial_after, 0);
    }

    #[test]
    fn fifteen_by_two() {
        let (o, _) = oracle_restoring_division(15, 2, 4).unwrap();
        assert_eq!(o, DivisionOutcome { quotient: 7, remainder: 1, flag: false });
    }

    #[test]
    fn euclidean_identity_n12() {
        for d in 2..64u64 {
            for num in 0..4096u64 {
                let (o, t) = oracle_restoring_division(num, d, 12).unwrap();
                assert_eq!((o.quotient, o.remainder), (num / d, num % d));
                assert_eq!(o.flag, num % d == 0);
                assert_eq!(t.quotient(), o.quotient);
            }
        }
    }

    #[test]
    fn restoring_rejects_bad_input() {
        assert_eq!(oracle_restoring_division(15, 1, 4), Err(Error::DegenerateDivisor(1)));
        assert!(oracle_restoring_division(15, 4, 4).is_err());
        assert!(oracle_restoring_division(16, 3, 4).is_err());
        assert!(oracle_restoring_division(15, 3, 5).is_err());
    }

    #[test]
    fn render_shows_circled_carries() {
        let (_, t) = oracle_restoring_division(15, 3, 4).unwrap();
        let text = t.render();
        assert!(text.contains("complement of 011 is 101"), "{text}");
        assert!(text.contains("step 1: 011 + 101 = (1)000"), "{text}");
        assert!(text.contains("step 2: 001 + 101 = (0)110  restore: 110 + 011 = (1)001"), "{text}");
        assert!(text.contains("quotient 101  remainder 000  flag 1"), "{text}");
    }

    #[test]
    fn ss_examples() {
        assert_eq!(oracle_ss(6, 3, 4).unwrap(), SsOutcome { flag: true, iterations: 3 });
        assert_eq!(oracle_ss(7, 3, 4).unwrap(), SsOutcome { flag: false, iterations: 3 });
        assert_eq!(oracle_ss(1023, 2, 10).unwrap().iterations, 512);
        assert_eq!(oracle_ss(0, 2, 10).unwrap(), SsOutcome { flag: true, iterations: 1 });
        assert!(oracle_ss(6, 0, 4).is_err());
    }

    #[test]
    fn ss_flag_is_divisibility() {
        for n in [4usize, 6, 8] {
            for d in 2..(1u64 << (n / 2)) {
                for num in 0..(1u64 << n) {
                    let o = oracle_ss(num, d, n).unwrap();
                    assert_eq!(o.flag, num % d == 0);
                    assert_eq!(o.iterations, num / d + 1);
                }
            }
        }
    }

    #[test]
    fn brute_force_examples() {
        assert_eq!(brute_force_divisors(91), [7]);
        assert!(brute_force_divisors(13).is_empty());
        assert_eq!(brute_force_divisors(36), [2, 3, 4, 6]);
        assert_eq!(brute_force_divisors(16), [2, 4]);
        assert!(brute_force_divisors(2).is_empty());
    }
}
