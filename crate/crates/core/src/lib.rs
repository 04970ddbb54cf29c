//! Hard instances for the nearest neighbor rule on metric TSP.
//!
//! The crate builds the family G_k of 2 x (8·2^k − 3) grid instances, runs the
//! nearest neighbor rule with explicit tie-breaking, certifies the recursive
//! adversarial tour of length `(12 + 4k)·2^k − 3` as a legal NNR tour, and
//! tabulates its ratio to the optimum `n = 16·2^k − 6`.
//!
//! ```
//! use nn_adversary::{certify_lemma, MetricKind};
//!
//! let report = certify_lemma(2, MetricKind::L2).unwrap();
//! assert!(report.passed());
//! assert_eq!(report.measured_length.exact_true(), Some(77));
//! ```

pub mod checks;
pub mod construction;
pub mod error;
pub mod graph;
pub mod instance;
pub mod metric;
pub mod nnr;
pub mod optimum;
pub mod perturb;
pub mod report;
pub mod svg;
pub mod sweep;
pub mod tsplib;

pub use checks::{check_metric_conditions, check_triangle_inequality, ConditionReport, Violation};
pub use construction::{
    base_tour_g0, build_adversarial_tour, certify_lemma, certify_tour, predicted_length, CertificationReport,
    ConstructionRecord,
};
pub use error::{Error, Result};
pub use graph::{build_unit_graph, graphic_distance, GraphicMetric, UnitGraph};
pub use instance::{family_columns, family_size, generate_gk, generate_grid, grid_index, Instance};
pub use metric::{compare, lp_distance, DistanceValue, Length, MetricKind, MetricSpec, PNorm, ScaledPoint};
pub use nnr::{
    close_tour, format_tour, parse_tour, run_nnr, tour_length, validate_nnr, NnrStep, NnrTrace, TieBreakPolicy,
    TourPath, ValidationMode, Verdict,
};
pub use optimum::{bounds, exact_optimum, perimeter_tour, theorem_row, theorem_table, Bounds, RatioRow};
pub use perturb::{perturb, strictify, PerturbScheme};
pub use sweep::{start_sweep, SweepRow};
pub use tsplib::{export_instance, import_instance};
