//! One-vs-all SVMs, score normalization and fusion, cross-validation and
//! the signed-rank test.

pub mod kernel;
pub mod protocol;
pub mod scores;
pub mod svm;
pub mod wilcoxon;

pub use kernel::{Kernel, Standardizer};
pub use protocol::{
    extract_members, run_protocol, EnsembleSpec, EvalReport, FoldScores, FusionMode, ImageSource, MemberColumn, MemorySource, ProtocolConfig,
    ProtocolOutput, ReadPurpose,
};
pub use scores::{accuracy, fsum, sum_matrices, sum_rule_fuse, ScoreMatrix};
pub use svm::{smo_solve, train_ova_svm, SmoOptions, SmoSolution, SvmModel, SvmParams};
pub use wilcoxon::{wilcoxon_signed_rank, PMethod, WilcoxonResult};
