//! Integer case analysis for filtrations of Lazarsfeld bundles, with
//! bounded exhaustive checks of the partition-certificate statement.

pub mod exhaustive;
pub mod filtration;
pub mod triples;

pub use exhaustive::{
    check_instance, check_instance_with, exhaustive_case_check, exhaustive_case_check_with, n2_chain_bound,
    n2_expansion_inequality, n3_exceptional_chain, BoxReport, CaseBox, CheckOptions, Counterexample, CrossCheck,
    InstanceOutcome, MAX_STORED_COUNTEREXAMPLES,
};
pub use filtration::{profile_feasible, FiltrationEntry, FiltrationProfile};
pub use triples::{
    am_gm, am_gm_nonnegative_sum, c1, c1_dominates_c2, c2_times_four, dynkin_label, enumerate_exceptional_triples,
    is_exceptional, AmGm, SignPattern,
};
