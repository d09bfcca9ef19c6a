//! Exact arithmetic, computable-real descriptions and effective moduli of
//! convergence for monotone and super/subadditive sequences, together with
//! counterexample generators and a zero-error capacity demo.

pub mod arith;
pub mod certificate;
pub mod dsl;
pub mod error;
pub mod fekete;
pub mod machines;
pub mod seq;
pub mod shannon;
pub mod transforms;

pub use arith::{Dyadic, Interval, Rational};
pub use certificate::{Certificate, Subject};
pub use error::{Error, Result};
pub use fekete::{
    fekete_modulus, fekete_modulus_rational, monotone_modulus, running_bound, sandwich_modulus,
    superadditive_hull, BoundReport, FeketeEngine, FeketeModulus, SuperadditiveHull,
};
pub use machines::{enumerate_re, EnumeratedSet, HaltRecord, Program, RunOutcome};
pub use seq::{
    approx_member, approx_real, eval_seq, real_field_op, AdditiveKind, AdditiveRepresentation,
    DoubleSeqDef, FieldOp, Modulus, Modulus2, MonotoneRepresentation, SeqDef,
    SeqStandardDescription, StandardDescription,
};
pub use shannon::{ChannelMatrix, Graph};
pub use transforms::{cantor_pair, cantor_unpair, ZwKind, ZwRepresentation};
