//! Conformal path metrics on sampled singular spaces.

pub mod density;
pub mod geodesic;
pub mod hyperbolicity;
pub mod phi_chain;
pub mod rays;
pub mod smoothing;
pub mod space;
pub mod uniformity;

pub use density::{attach_density, hybrid_delta, DensityField, DensityMode, DensitySpec};
pub use geodesic::{conformal_distance, geodesic_between, GeodesicPath, PathMetric};
pub use hyperbolicity::{estimate_delta, gromov_product, HyperbolicityReport};
pub use phi_chain::{build_phi_chain, validate_phi_chain, ChainKind, PhiChain, PhiFunction};
pub use rays::{classify_boundary_rays, RayClassification, RayLabel, RayOptions};
pub use smoothing::{smooth_density, SmoothedDensity};
pub use space::{build_space, euclidean_grid, random_tree, DomainSpec, Edge, SampleRegion, SampledSpace, SigmaSet, VertexRole};
pub use uniformity::{
    check_uniform_curve, fit_skin_uniformity, metric_inequality_suite, skin_uniformity_from_geodesic,
    uniformity_bound, InequalityReport, UniformityReport,
};
