//! Spectral gaps of ideal representations, local dilations, the quantitative
//! dilation bound, determining-pair residuals and robustness sweeps.

mod dilation;
mod gap;
mod residuals;
mod sweep;

pub use dilation::{
    dilation_bound, verify_local_dilation, DifferenceCheck, DilationBound, DilationResiduals, LocalDilation,
};
pub use gap::{
    spectral_gap, spectral_gap_of, spectral_gap_of_matrix, top_eigenspace_check, GapReport, MULTIPLICITY_TOL,
};
pub use residuals::{pair_robustness_residuals, PairResiduals};
pub use sweep::{
    fit_power_law, linear_grid, robustness_sweep, Family, FamilyPoint, PowerFit, SweepReport, SweepRow, FIT_FLOOR,
};
