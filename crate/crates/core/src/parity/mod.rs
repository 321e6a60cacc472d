//! Parity-side analysis: sign and margin representation, sensitivity, exact
//! PTF-degree checks, the explicit parity construction and bound reports.

mod construction;
mod ptf;
mod simplex;
mod table;
mod theorem1;

pub use construction::{build_parity_layer, lagrange_interpolant, parity_interpolant};
pub use ptf::{ptf_parity_feasible, ptf_witness, symmetric_parity_feasible, PTF_MAX_N};
pub use simplex::{feasible_free, feasible_nonnegative, Feasibility};
pub use table::{
    average_sensitivity, best_margin, majority, margin_represents, parity, parity_correlation,
    sign_represents, BooleanTable, RealTable,
};
pub(crate) use theorem1::bound_report;
pub use theorem1::{
    admissible_shapes, falsification_campaign, quarter, signs_represent_parity, theorem1_report,
    BoundReport, CampaignConfig, CampaignReport, ShapeTally,
};
