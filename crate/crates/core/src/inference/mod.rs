//! Paired hypothesis tests and the distribution functions they rest on.

mod hypothesis;
pub mod special;

pub use hypothesis::{
    paired_t_test, pearson_test, wilcoxon_signed_rank, TestMethod, TestResult,
    WILCOXON_EXACT_MAX_M,
};
pub use special::{normal_cdf, normal_quantile, student_t_cdf, two_sided_z};
