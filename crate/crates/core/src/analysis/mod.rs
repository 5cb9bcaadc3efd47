//! Fits and reference curves for entanglement data.

mod collapse;
mod fit;
mod theory;

pub use collapse::{data_collapse, CollapseCurve, CollapseResult, Scaling, COLLAPSE_GRID};
pub use fit::{
    fit_chord_log, fit_log_law, fit_mutual_information, fit_power_law, odd_sizes_only, series, window, FitModel,
    FitResult, SeriesPoint, MI_MAX_RATIO,
};
pub use theory::{theory_chord_entropy, theory_mutual_information};
