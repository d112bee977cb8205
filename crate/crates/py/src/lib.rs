//! Python bindings: build and run divider netlists, factor numbers, and
//! query the arithmetic references.

use std::collections::BTreeMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use qap_core::builders::{self, build_restoring_division, build_ss_divider, Divider, DivisionPorts};
use qap_core::netlist::{invert_diagram, parse_netlist, run_diagram, serialize_netlist};
use qap_core::oracle;
use qap_core::{
    find_divisors_with, trace_division, BankMode, FactorOptions, ProblemSpec, Register, Variant,
    WiringDiagram,
};

fn err(e: qap_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn variant(tag: &str) -> PyResult<Variant> {
    tag.parse().map_err(PyValueError::new_err)
}

fn spec(n: usize, tag: &str) -> PyResult<ProblemSpec> {
    ProblemSpec::new(n, variant(tag)?).map_err(err)
}

/// An immutable wiring diagram.
#[pyclass(name = "Netlist", frozen, module = "pyqap")]
struct PyNetlist(WiringDiagram);

#[pymethods]
impl PyNetlist {
    /// Full restoring divider for `n`-bit dividends.
    #[staticmethod]
    #[pyo3(signature = (n, variant = "restoring-irrev"))]
    fn restoring(n: usize, variant: &str) -> PyResult<Self> {
        Ok(Self(build_restoring_division(&spec(n, variant)?).map_err(err)?))
    }

    /// The `(setup, subtract, match)` fragments of the successive-subtraction divider.
    #[staticmethod]
    fn successive_subtraction(n: usize) -> PyResult<(Self, Self, Self)> {
        let ss = build_ss_divider(&spec(n, "ss")?).map_err(err)?;
        Ok((Self(ss.setup), Self(ss.subtract), Self(ss.match_test)))
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(Self(parse_netlist(text).map_err(err)?))
    }

    fn serialize(&self) -> String {
        serialize_netlist(&self.0)
    }

    #[getter]
    fn width(&self) -> usize {
        self.0.width()
    }

    #[getter]
    fn gate_count(&self) -> usize {
        self.0.gate_count()
    }

    #[getter]
    fn is_reversible(&self) -> bool {
        self.0.is_reversible()
    }

    /// Gate kind name to count.
    fn histogram(&self) -> BTreeMap<&'static str, usize> {
        self.0.histogram().into_iter().map(|(k, c)| (k.as_str(), c)).collect()
    }

    /// Role name to `(start, len)`.
    fn layout(&self) -> BTreeMap<&'static str, (usize, usize)> {
        self.0
            .layout()
            .iter()
            .map(|(role, r)| (role.as_str(), (r.start(), r.len())))
            .collect()
    }

    fn invert(&self) -> PyResult<Self> {
        Ok(Self(invert_diagram(&self.0).map_err(err)?))
    }

    /// Run on a register given as one bool per line, LSB first.
    fn run(&self, bits: Vec<bool>) -> PyResult<Vec<bool>> {
        let (out, _) = run_diagram(&self.0, &Register::from_bits(&bits)).map_err(err)?;
        Ok(out.bits().collect())
    }

    /// Load `dividend` and `divisor`, run, and return `(quotient, remainder, flag)`.
    /// The quotient is `None` for the irreversible divider.
    fn divide(&self, n: usize, dividend: u64, divisor: u64) -> PyResult<(Option<u64>, u64, bool)> {
        let ports = DivisionPorts::from_layout(self.0.layout(), n).map_err(err)?;
        let reg = ports.load(dividend, divisor).map_err(err)?;
        let out = ports.read(&run_diagram(&self.0, &reg).map_err(err)?.0).map_err(err)?;
        Ok((out.quotient, out.remainder, out.flag))
    }

    fn __len__(&self) -> usize {
        self.0.gate_count()
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }

    fn __repr__(&self) -> String {
        format!("Netlist(width={}, gates={})", self.0.width(), self.0.gate_count())
    }
}

/// `(divisor, cofactor)` pairs found by the gate-level register bank.
#[pyfunction]
#[pyo3(signature = (value, variant = "restoring-irrev", all = false, primes_only = false, jobs = 1))]
fn find_divisors(
    py: Python<'_>,
    value: u64,
    variant: &str,
    all: bool,
    primes_only: bool,
    jobs: usize,
) -> PyResult<Vec<(u64, u64)>> {
    let opts = FactorOptions {
        variant: self::variant(variant)?,
        mode: if primes_only { BankMode::PrimesOnly } else { BankMode::AllIntegers },
        filter_sqrt: !all,
        jobs: jobs.max(1),
    };
    let report = py.detach(|| find_divisors_with(value, &opts)).map_err(err)?;
    Ok(report.pairs().collect())
}

#[pyfunction]
fn brute_force_divisors(value: u64) -> Vec<u64> {
    oracle::brute_force_divisors(value)
}

/// Plain-integer restoring division: `(quotient, remainder, flag)`.
#[pyfunction]
fn oracle_division(dividend: u64, divisor: u64, n: usize) -> PyResult<(u64, u64, bool)> {
    let (o, _) = oracle::oracle_restoring_division(dividend, divisor, n).map_err(err)?;
    Ok((o.quotient, o.remainder, o.flag))
}

/// Plain-integer successive subtraction: `(flag, iterations)`.
#[pyfunction]
fn oracle_ss(dividend: u64, divisor: u64, n: usize) -> PyResult<(bool, u64)> {
    let o = oracle::oracle_ss(dividend, divisor, n).map_err(err)?;
    Ok((o.flag, o.iterations))
}

/// Stage-by-stage tableau read from the gate-level restoring divider.
#[pyfunction]
#[pyo3(signature = (dividend, divisor, n, variant = "restoring"))]
fn trace(dividend: u64, divisor: u64, n: usize, variant: &str) -> PyResult<String> {
    let spec = spec(n, variant)?;
    let d = build_restoring_division(&spec).map_err(err)?;
    let (_, t) = trace_division(&d, &spec, dividend, divisor).map_err(err)?;
    Ok(t.render())
}

#[pyfunction]
fn paper_bits(n: usize, variant: &str) -> PyResult<usize> {
    builders::paper_bits(n, self::variant(variant)?).map_err(err)
}

#[pyfunction]
fn paper_ops(n: usize, variant: &str) -> PyResult<u128> {
    builders::paper_ops(n, self::variant(variant)?).map_err(err)
}

/// Measured and closed-form line and operation counts.
#[pyfunction]
fn resource_report(n: usize, variant: &str) -> PyResult<BTreeMap<&'static str, u128>> {
    let spec = spec(n, variant)?;
    let r = Divider::build(&spec).and_then(|d| d.resource_report(&spec)).map_err(err)?;
    let (bits_ref, ops_ref) = builders::asymptotic_reference(n, spec.variant());
    Ok(BTreeMap::from([
        ("n", n as u128),
        ("bits_measured", r.bits_measured as u128),
        ("bits_paper", r.bits_paper as u128),
        ("ops_measured", r.ops_measured),
        ("ops_paper", r.ops_paper),
        ("bits_reference", bits_ref as u128),
        ("ops_reference", ops_ref),
    ]))
}

#[pymodule]
fn pyqap(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyNetlist>()?;
    m.add_function(wrap_pyfunction!(find_divisors, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force_divisors, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_division, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_ss, m)?)?;
    m.add_function(wrap_pyfunction!(trace, m)?)?;
    m.add_function(wrap_pyfunction!(paper_bits, m)?)?;
    m.add_function(wrap_pyfunction!(paper_ops, m)?)?;
    m.add_function(wrap_pyfunction!(resource_report, m)?)?;
    Ok(())
}
