//! Theorem-by-theorem numerical checkers. Each inequality becomes a signed,
//! scale-invariant margin over sampled inputs; violations are margins below
//! `-tol` and replay from their recorded seed.

mod alternative;
mod ando_hiai;
mod identities;
mod limits;
mod logmaj;
mod report;
mod sample;

pub use alternative::AltDominanceCheck;
pub use ando_hiai::{
    alt_necessity_report, family_margin_matrix, fkt_necessity_report, grand_furuta_sides,
    two_variable_necessity_report, AhCheck, AhInputs, AhQuery, EqSeeCheck, GrandFurutaCheck, Normalization,
    PREMISE_DELTA,
};
pub use identities::{
    transposition_defect, DeterminantCheck, KtChoice, Prop22Check, RiccatiCheck, SimilarityCheck, SpectralCheck,
    UNITARITY_TOL,
};
pub use limits::{
    default_p_grid, lie_trotter_table, LieTrotterCheck, LieTrotterTable, NormSequenceCheck, UabCheck, UabVariant,
    COMMUTING_TOL, RATIO_BAND,
};
pub use logmaj::{
    default_points, fkt_power, link_measure, log_euclid, sandwich, Chain, LogMajCheck, LogMajTheorem, ROUTE_TOL,
};
pub use report::{
    replay, report_from_measurements, run_check, run_indexed, run_single, CheckReport, Measured, RunSettings,
    TrialCheck, TrialOutcome, ViolationRecord, DEFAULT_TOL,
};
pub use sample::{commuting_pair, pd_pair, psd_maybe_singular, CommutingPair};
