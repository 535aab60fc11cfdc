//! A brute-force reference model of the tutor domain and the randomized
//! suites that compare the reasoner against it.

mod gen;
mod model;
mod suites;

pub use gen::propose;
pub use model::{Model, OracleState};
pub use suites::{
    conformance, dismissal_monotonicity, equivalence, memo_timing, memo_transparency, MemoTiming, Report, Subject,
    QUERIES,
};
