//! Iterated uniform finite-state transducers: sweep-based execution,
//! conversions to classical automata, decision procedures, witness machine
//! families, constructible-function combinators, LBA compilation and a
//! brute-force oracle.

pub mod automata;
pub mod convert;
pub mod decide;
pub mod hierarchy;
pub mod lba;
pub mod machine;
pub mod oracle;
pub mod run;
pub mod textio;
pub mod witness;

pub use automata::{BoolOp, Dfa, Nfa};
pub use machine::{ModelError, StateId, SweepBound, SymbolId, Tape, Transducer, TransducerBuilder};
pub use run::{run, run_deterministic, sweep, RunError, RunReport, SweepOutcome};
