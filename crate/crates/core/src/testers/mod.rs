//! Search engines for the word-length properties, and the constructions
//! behind the Burnside-group argument.

mod gnp;
mod lemma4;
mod lemma5;
mod pipeline;
mod property;

pub use gnp::{gnp_certificate, gnp_counterexample, replay_rewriting, Factor, GnpCertificate, GnpSearch, RewriteStep};
pub use lemma4::{
    check_d_conditions, check_xi_conditions, construct_xi_lemma4, DConditions, Lemma4Params, Lemma4Report, Lemma4Xi,
    XiConditions,
};
pub use lemma5::{verify_lemma5, BlockSpan, Lemma5Params, Lemma5Report, Lemma5Violation, ViolationCase};
pub use pipeline::{
    burnside_nonamenability_pipeline, sample_sequence, ConstantChain, PipelineConfig, PipelineReport, SampleSummary,
    Stage,
};
pub use property::{replay_witness, test_property, Budget, Family, PropertySpec, PropertyWitness, Regime, Verdict};
