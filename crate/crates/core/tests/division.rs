use proptest::prelude::*;

use qap_core::builders::{build_restoring_division, build_ss_divider, DivisionPorts};
use qap_core::netlist::{invert_diagram, run_diagram};
use qap_core::oracle::{oracle_restoring_division, oracle_ss};
use qap_core::processor::{init_bank, run_bank_ss, ss_drive_register, BankSpec};
use qap_core::{find_divisors_with, BankMode, FactorOptions, ProblemSpec, Variant};

fn wide_case() -> impl Strategy<Value = (usize, u64, u64)> {
    (2usize..=32).prop_flat_map(|m| {
        let n = 2 * m;
        let top = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        (Just(n), 0..=top, 2..(1u64 << m))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wide_restoring_matches_oracle((n, num, d) in wide_case()) {
        let (want, _) = oracle_restoring_division(num, d, n).unwrap();
        for v in [Variant::RestoringReversible, Variant::RestoringIrreversible] {
            let diagram = build_restoring_division(&ProblemSpec::new(n, v).unwrap()).unwrap();
            let ports = DivisionPorts::from_layout(diagram.layout(), n).unwrap();
            let out = run_diagram(&diagram, &ports.load(num, d).unwrap()).unwrap().0;
            let got = ports.read(&out).unwrap();
            prop_assert_eq!(got.remainder, want.remainder);
            prop_assert_eq!(got.flag, want.flag);
            if v == Variant::RestoringReversible {
                prop_assert_eq!(got.quotient, Some(want.quotient));
            }
        }
    }

    #[test]
    fn wide_reversible_round_trip((n, num, d) in wide_case()) {
        let diagram = build_restoring_division(&ProblemSpec::new(n, Variant::RestoringReversible).unwrap()).unwrap();
        let inv = invert_diagram(&diagram).unwrap();
        let ports = DivisionPorts::from_layout(diagram.layout(), n).unwrap();
        let start = ports.load(num, d).unwrap();
        let out = run_diagram(&diagram, &start).unwrap().0;
        prop_assert_eq!(run_diagram(&inv, &out).unwrap().0, start);
    }
}

#[test]
fn ss_bank_iterations_match_oracle() {
    let n = 10;
    let ss = build_ss_divider(&ProblemSpec::new(n, Variant::SuccessiveSubtraction).unwrap()).unwrap();
    let ports = DivisionPorts::from_layout(ss.layout(), n).unwrap();
    for num in [2u64, 97, 512, 1000, 1023] {
        let bank = init_bank(BankSpec::with_width(num, n, BankMode::AllIntegers).unwrap(), ss.layout()).unwrap();
        let ran = run_bank_ss(&bank, &ss, 2).unwrap();
        for d in 2..32u64 {
            let want = oracle_ss(num, d, n).unwrap();
            assert_eq!(ran.iterations().unwrap()[d as usize], want.iterations, "{num}/{d}");
            assert_eq!(ports.read(&ran.registers()[d as usize]).unwrap().flag, want.flag);
        }
    }
}

#[test]
fn ss_divisor_one_stops_at_cap() {
    let ss = build_ss_divider(&ProblemSpec::new(6, Variant::SuccessiveSubtraction).unwrap()).unwrap();
    let ports = DivisionPorts::from_layout(ss.layout(), 6).unwrap();
    let run = ss_drive_register(&ss, &ports.load(40, 1).unwrap()).unwrap();
    assert!(!run.finished);
    assert_eq!(run.iterations, ss.iteration_cap());
}

#[test]
fn primes_only_bank_reports_prime_divisors() {
    for v in Variant::ALL {
        let opts = FactorOptions {
            variant: v,
            mode: BankMode::PrimesOnly,
            filter_sqrt: false,
            ..FactorOptions::default()
        };
        // 840 = 2^3 * 3 * 5 * 7; the bank covers divisors below 32
        assert_eq!(find_divisors_with(840, &opts).unwrap().divisors, [2, 3, 5, 7]);
        let all = FactorOptions { mode: BankMode::AllIntegers, ..opts };
        assert_eq!(
            find_divisors_with(840, &all).unwrap().divisors,
            [2, 3, 4, 5, 6, 7, 8, 10, 12, 14, 15, 20, 21, 24, 28, 30]
        );
    }
}
