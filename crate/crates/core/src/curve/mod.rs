//! Weighted curves in the complement, John curves in the domain.

pub mod cone_curve;
pub mod constant;
pub mod functional;
pub mod graph;
pub mod john;
pub mod koch_curves;
pub mod shortcut;

pub use cone_curve::cone_explicit_curve;
pub use constant::{curve_condition_constant, curve_constant_on_graph, CurveConstantEstimate, PairRatio};
pub use functional::{curve_functional, curve_functional_report, FunctionalReport};
pub use graph::{
    build_complement_graph, build_interior_graph, complement_bbox, geodesics_from, tally_cells, weighted_geodesic,
    GeodesicResult, GraphSide, WeightedGraph,
};
pub use john::{john_constant, JohnEstimate};
pub use koch_curves::{koch_case, koch_case_curve, koch_john_curve, lifted_apex, KochBoundaryPoint};
pub use shortcut::{exterior_whitney, shortcut_check, shortcut_survey, ShortcutSurvey, ShortcutViolation};
