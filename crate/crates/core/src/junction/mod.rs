//! Junction DC transport: hysteretic current-biased IV sweeps, extraction of
//! junction figures of merit, and wafer-level scaling laws.

mod iv;
mod scaling;

pub use iv::{
    ambegaokar_baratoff_ic, analyze_iv, analyze_iv_with, synthesize_iv, AnalysisOptions,
    GapRiseShape, IVExtract, IVTrace, JunctionModel, SweepDirection, SweepGrid,
    DEFAULT_RSG_PROBE_V, DEFAULT_SWITCH_THRESHOLD_V, MIN_TRACE_POINTS,
};
pub use scaling::{
    cycle_difference, cycles_to_thickness, cycles_to_thickness_with_rate, jc_cycles_fit,
    ra_product_fit, resistance_for_ra, JcCyclesFit, JunctionGeometry, RaFit,
    DEFAULT_NM_PER_CYCLE,
};
