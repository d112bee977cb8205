//! `qap`: factor numbers on the simulated register bank, report line and
//! gate counts, export netlists and run the verification sweeps.
//!
//! Exit status is 0 on success, 1 when `factor` finds nothing or `verify`
//! sees a failure, and 2 on any usage or I/O error.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qap_core::builders::{asymptotic_reference, build_restoring_division, Divider, DivisionPorts};
use qap_core::netlist::lanes::run_registers;
use qap_core::netlist::{invert_diagram, run_diagram, serialize_netlist};
use qap_core::oracle::{oracle_restoring_division, oracle_ss};
use qap_core::processor::{run_divider, ss_drive_register, BankSpec, MAX_BANK_BITS};
use qap_core::{
    trace_division, BankMode, Error, FactorOptions, ProblemSpec, Register, Variant, WiringDiagram,
};

#[derive(Parser, Debug)]
#[command(name = "qap", version, about = "Divisor search on a simulated bank of gate-level dividers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Find the divisors of N.
    #[command(group(ArgGroup::new("range").args(["all", "sqrt_only"])))]
    Factor {
        /// Dividend, at least 2.
        dividend: String,
        #[arg(long, default_value = "restoring-irrev")]
        variant: Variant,
        /// Report every divisor the bank covers.
        #[arg(long)]
        all: bool,
        /// Report only divisors up to the integer square root (default).
        #[arg(long)]
        sqrt_only: bool,
        /// Print the divider's internal steps for each divisor found.
        #[arg(long)]
        trace: bool,
        #[arg(long, env = "QAP_JOBS", default_value_t = 1)]
        jobs: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Print measured and closed-form line and operation counts.
    Report {
        n: usize,
        #[arg(long, default_value = "restoring-irrev")]
        variant: Variant,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Write the divider netlist(s) in QAPNET text form.
    Export {
        n: usize,
        #[arg(long, default_value = "restoring-irrev")]
        variant: Variant,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Compare every divider against the arithmetic oracle and check inversion.
    Verify {
        #[arg(long, default_value_t = 12)]
        max_n: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Records,
}

/// A failed command: exit status and message for stderr.
struct Failure(u8, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::Internal(_)) { 1 } else { 2 };
        Failure(code, e.to_string())
    }
}

type Outcome = Result<u8, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure(2, msg.into())
}

fn parse_dividend(text: &str) -> Result<u64, Failure> {
    let value: u64 = text
        .trim()
        .parse()
        .map_err(|_| usage(format!("N must be an unsigned integer, got {text:?}")))?;
    if value < 2 {
        return Err(usage(format!("N must be at least 2, got {value}")));
    }
    Ok(value)
}

fn bits(v: u64, width: usize) -> String {
    format!("{v:0width$b}")
}

fn ss_trace(divider: &Divider, spec: &BankSpec, divisor: u64) -> Result<String, Failure> {
    let Divider::SuccessiveSubtraction(ss) = divider else {
        unreachable!("caller matched the variant")
    };
    let n = spec.n();
    let ports = DivisionPorts::from_layout(ss.layout(), n)?;
    let run = ss_drive_register(ss, &ports.load(spec.dividend(), divisor)?)?;
    let modulus = 1u128 << n;
    let complement = ((modulus - u128::from(divisor)) % modulus) as u64;
    let mut out = format!("trace d={divisor}: complement {}\n", bits(complement, n));
    for (i, &(before, carry)) in run.trace.iter().enumerate() {
        let after = ((u128::from(before) + u128::from(complement)) % modulus) as u64;
        let _ = writeln!(
            out,
            "  subtraction {}: {} + {} = ({}){}",
            i + 1,
            bits(before, n),
            bits(complement, n),
            u8::from(carry),
            bits(after, n)
        );
    }
    let leftover = run
        .trace
        .last()
        .map_or(spec.dividend(), |&(before, _)| ((u128::from(before) + u128::from(complement)) % modulus) as u64);
    let _ = writeln!(
        out,
        "  match: leftover {} vs complement {}  flag {}",
        bits(leftover, n),
        bits(complement, n),
        u8::from(run.register.bit(ports.flag))
    );
    Ok(out)
}

fn restoring_trace(divider: &Divider, spec: &BankSpec, variant: Variant, divisor: u64) -> Result<String, Failure> {
    let Divider::Restoring(d) = divider else {
        unreachable!("caller matched the variant")
    };
    let problem = ProblemSpec::new(spec.n(), variant)?;
    let (_, trace) = trace_division(d, &problem, spec.dividend(), divisor)?;
    Ok(format!("trace d={divisor}:\n{}", trace.render()))
}

fn cmd_factor(
    dividend: &str,
    variant: Variant,
    all: bool,
    trace: bool,
    jobs: usize,
    format: Format,
) -> Outcome {
    let value = parse_dividend(dividend)?;
    if jobs == 0 {
        return Err(usage("--jobs must be at least 1"));
    }
    let spec = BankSpec::new(value, BankMode::AllIntegers).map_err(|e| match e {
        Error::BankTooLarge(m) => usage(format!(
            "N = {value} needs a {m}-bit divisor register; at most {MAX_BANK_BITS} bits are supported"
        )),
        other => other.into(),
    })?;
    let divider = Divider::build(&ProblemSpec::new(spec.n(), variant)?)?;
    let opts = FactorOptions { variant, mode: BankMode::AllIntegers, filter_sqrt: !all, jobs };
    let report = run_divider(&divider, spec, &opts)?;

    let bound = if all { (1u64 << spec.m()) - 1 } else { value.isqrt() };
    let mut out = String::new();
    match format {
        Format::Text => {
            if report.is_empty() {
                let _ = writeln!(out, "no divisors ≤ {bound}");
            }
            for (d, c) in report.pairs() {
                let _ = writeln!(out, "{d} x {c}");
            }
        }
        Format::Records => {
            for (d, c) in report.pairs() {
                let _ = writeln!(out, "record=divisor dividend={value} divisor={d} cofactor={c}");
            }
            let _ = writeln!(
                out,
                "record=summary dividend={value} variant={} n={} registers={} bound={bound} divisors={}",
                variant.tag(),
                spec.n(),
                spec.bank_size(),
                report.divisors.len()
            );
        }
    }
    if trace {
        for &d in &report.divisors {
            let text = if variant.is_restoring() {
                restoring_trace(&divider, &spec, variant, d)?
            } else {
                ss_trace(&divider, &spec, d)?
            };
            out.push_str(&text);
        }
    }
    print!("{out}");
    Ok(if report.is_empty() { 1 } else { 0 })
}

fn cmd_report(n: usize, variant: Variant, format: Format) -> Outcome {
    let spec = ProblemSpec::new(n, variant)?;
    let r = qap_core::builders::resource_report(&spec)?;
    let (bits_ref, ops_ref) = asymptotic_reference(n, variant);
    let (bits_formula, ops_formula) = match variant {
        Variant::RestoringReversible => ("6n-2", "11n^2"),
        Variant::RestoringIrreversible => ("4n", "11n^2"),
        Variant::SuccessiveSubtraction => ("3n+1", "11n*2^(n-1)"),
    };
    let rows: [(&str, String); 7] = [
        ("variant", variant.tag().to_string()),
        ("n", n.to_string()),
        ("bits_measured", r.bits_measured.to_string()),
        ("bits_paper", r.bits_paper.to_string()),
        ("ops_measured", r.ops_measured.to_string()),
        ("ops_paper", r.ops_paper.to_string()),
        ("reference", format!("{bits_formula}={bits_ref} {ops_formula}={ops_ref}")),
    ];
    match format {
        Format::Text => {
            for (k, v) in rows {
                println!("{k:<14} {v}");
            }
        }
        Format::Records => {
            println!(
                "record=resources variant={} n={n} bits_measured={} bits_paper={} ops_measured={} ops_paper={} bits_reference={bits_ref} ops_reference={ops_ref}",
                variant.tag(),
                r.bits_measured,
                r.bits_paper,
                r.ops_measured,
                r.ops_paper
            );
        }
    }
    Ok(0)
}

fn write_netlist(path: &Path, diagram: &WiringDiagram) -> Result<(), Failure> {
    fs::write(path, serialize_netlist(diagram))
        .map_err(|e| Failure(2, format!("cannot write {}: {e}", path.display())))?;
    println!(
        "wrote {} ({} lines, {} gates)",
        path.display(),
        diagram.width(),
        diagram.gate_count()
    );
    Ok(())
}

fn cmd_export(n: usize, variant: Variant, output: &Path) -> Outcome {
    let divider = Divider::build(&ProblemSpec::new(n, variant)?)?;
    match &divider {
        Divider::Restoring(d) => write_netlist(output, d)?,
        Divider::SuccessiveSubtraction(ss) => {
            let stem = output.with_extension("");
            for (part, d) in [("setup", &ss.setup), ("subtract", &ss.subtract), ("match", &ss.match_test)] {
                let mut name = stem.clone().into_os_string();
                name.push(format!(".{part}.qapnet"));
                write_netlist(Path::new(&name), d)?;
            }
        }
    }
    Ok(0)
}

#[derive(Default)]
struct Tally {
    passed: u64,
    failed: u64,
}

impl Tally {
    fn check(&mut self, ok: bool) {
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
        }
    }
}

/// Dividends checked at width `n`: all of them up to 16 bits, otherwise a
/// fixed pseudo-random sample including both extremes.
fn dividends(n: usize, rng: &mut ChaCha8Rng) -> Vec<u64> {
    if n <= 16 {
        return (0..1u64 << n).collect();
    }
    let top = if n == 64 { u64::MAX } else { (1 << n) - 1 };
    let mut v = vec![0, top];
    v.extend((0..4096).map(|_| rng.random_range(0..=top)));
    v
}

fn divisors(n: usize, rng: &mut ChaCha8Rng) -> Vec<u64> {
    let m = n / 2;
    if m <= 6 {
        return (2..1u64 << m).collect();
    }
    let top = (1u64 << m) - 1;
    let mut v = vec![2, 3, top];
    v.extend((0..61).map(|_| rng.random_range(2..=top)));
    v
}

fn sweep_restoring(n: usize, variant: Variant, rng: &mut ChaCha8Rng) -> Result<Tally, Failure> {
    let spec = ProblemSpec::new(n, variant)?;
    let diagram = build_restoring_division(&spec)?;
    let ports = DivisionPorts::from_layout(diagram.layout(), n)?;
    let ds = divisors(n, rng);
    let mut tally = Tally::default();
    for num in dividends(n, rng) {
        let mut regs = ds.iter().map(|&d| ports.load(num, d)).collect::<Result<Vec<Register>, _>>()?;
        run_registers(diagram.gates(), &mut regs);
        for (&d, reg) in ds.iter().zip(&regs) {
            let got = ports.read(reg)?;
            let (want, _) = oracle_restoring_division(num, d, n)?;
            let quotient_ok = got.quotient.is_none_or(|q| q == want.quotient);
            tally.check(quotient_ok && got.remainder == want.remainder && got.flag == want.flag);
        }
    }
    Ok(tally)
}

fn sweep_ss(n: usize) -> Result<Tally, Failure> {
    let divider = Divider::build(&ProblemSpec::new(n, Variant::SuccessiveSubtraction)?)?;
    let Divider::SuccessiveSubtraction(ss) = &divider else {
        unreachable!("built the ss variant")
    };
    let ports = DivisionPorts::from_layout(ss.layout(), n)?;
    let mut tally = Tally::default();
    for num in 0..1u64 << n {
        for d in 2..1u64 << (n / 2) {
            let run = ss_drive_register(ss, &ports.load(num, d)?)?;
            let want = oracle_ss(num, d, n)?;
            tally.check(run.register.bit(ports.flag) == want.flag && run.iterations == want.iterations);
        }
    }
    Ok(tally)
}

fn reversibility(n: usize, rng: &mut ChaCha8Rng) -> Result<Tally, Failure> {
    let mut tally = Tally::default();
    let d = build_restoring_division(&ProblemSpec::new(n, Variant::RestoringReversible)?)?;
    let inv = invert_diagram(&d)?;
    for _ in 0..1000 {
        let bits: Vec<bool> = (0..d.width()).map(|_| rng.random()).collect();
        let r = Register::from_bits(&bits);
        let back = run_diagram(&inv, &run_diagram(&d, &r)?.0)?.0;
        tally.check(back == r);
    }
    let irr = build_restoring_division(&ProblemSpec::new(n, Variant::RestoringIrreversible)?)?;
    tally.check(matches!(invert_diagram(&irr), Err(Error::NotInvertible(_))));
    Ok(tally)
}

fn cmd_verify(max_n: usize) -> Outcome {
    if max_n < 4 || !max_n.is_multiple_of(2) || max_n > ProblemSpec::MAX_N {
        return Err(usage(format!("--max-n must be even and in [4, 64], got {max_n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x9a9);
    let mut failed = 0;
    let mut report = |name: String, t: Tally| {
        let status = if t.failed == 0 { "pass" } else { "FAIL" };
        println!("{status}  {name}: {} passed, {} failed", t.passed, t.failed);
        failed += t.failed;
    };
    for n in (4..=max_n).step_by(2) {
        for v in [Variant::RestoringReversible, Variant::RestoringIrreversible] {
            report(format!("oracle sweep n={n} {}", v.tag()), sweep_restoring(n, v, &mut rng)?);
        }
        if n <= 8 {
            report(format!("oracle sweep n={n} ss"), sweep_ss(n)?);
        }
        report(format!("reversibility n={n}"), reversibility(n, &mut rng)?);
    }
    Ok(if failed == 0 { 0 } else { 1 })
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Factor { dividend, variant, all, sqrt_only: _, trace, jobs, format } => {
            cmd_factor(&dividend, variant, all, trace, jobs, format)
        }
        Command::Report { n, variant, format } => cmd_report(n, variant, format),
        Command::Export { n, variant, output } => cmd_export(n, variant, &output),
        Command::Verify { max_n } => cmd_verify(max_n),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, msg)) => {
            eprintln!("qap: {msg}");
            ExitCode::from(code)
        }
    }
}
