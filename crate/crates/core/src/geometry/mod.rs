//! Warped-product metrics `dr^2 + b(r)^2 dtheta^2` rebuilt from profiles,
//! their curvature, and the global picture: completeness, curvature range
//! and the shape of each end.

pub mod metric;
pub mod report;

pub use metric::{
    build_warped_metric, build_with_spacing, curvature_from_a, curvature_from_b,
    geodesic_curvature, radial_distance, ArcLength, ClosedFormTag, MetricSource, WarpedMetric,
};
pub use report::{geometry_report, radial_extent, CurvatureSign, EndDescriptor, GeometryReport};
