//! Gate-level divider circuits for finding exact divisors.
//!
//! The crate synthesizes restoring-division and successive-subtraction
//! dividers as explicit netlists over NOT / CNOT / TOFFOLI (plus the
//! irreversible RESET / CRESET), runs them over a bank of lockstep
//! registers holding one candidate divisor each, and checks the results
//! against plain integer arithmetic.
//!
//! Module map:
//!
//! * [`bitcore`]: fixed-width registers and bus access.
//! * [`netlist`]: gates, wiring diagrams, execution, inversion and the
//!   `QAPNET` text format.
//! * [`builders`]: adder, twos-complement generator, CSA stage, zero test,
//!   full dividers and the closed-form line/operation counts.
//! * [`processor`]: the register bank and divisor collection.
//! * [`oracle`]: independent arithmetic references and trace rendering.

pub mod bitcore;
pub mod builders;
mod error;
pub mod netlist;
pub mod oracle;
pub mod processor;

pub use bitcore::{LineRange, Register};
pub use builders::{ProblemSpec, Variant};
pub use error::{Error, Result};
pub use netlist::{Gate, GateKind, Layout, ResourceReport, Role, WiringDiagram};
pub use processor::{
    find_divisors, find_divisors_with, trace_division, BankMode, BankSpec, DivisorReport,
    FactorOptions, RegisterBank,
};
