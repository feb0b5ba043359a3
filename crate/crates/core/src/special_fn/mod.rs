//! Gamma function, Stieltjes moments and the kernel series.

mod contour;
mod gamma;
mod kernel;
mod moments;

pub use gamma::log_gamma;
pub(crate) use gamma::ln_gamma;
pub use kernel::{FockSpace, KernelValue, SeriesMethod, SeriesValue};
pub use moments::{log_stieltjes_moment, MomentTable, WeightParams, GUARANTEED_ALPHA, GUARANTEED_M};
