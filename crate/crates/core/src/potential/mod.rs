pub mod domain;
pub mod eigen;
pub mod harnack;
pub mod martin;
pub mod operator;
pub mod radial;

pub use domain::{annulus_polar, disk, half_disk, imported, radial_1d, GridDomain, NodeClass, Spacing};
pub use harnack::{bhp_ratio, minimal_growth_check, oscillation_decay, predicted_rate, GrowthReport, OscillationReport};
pub use martin::{
    combine_kernels, fatou_experiment, martin_integral, martin_kernel, martin_sequence, DiscreteMeasure, FatouReport,
    MartinSequence, RatioTrace,
};
pub use operator::{discretize, green_function, solve_dirichlet, BaseOperator, Coefficients, GridFunction, GridSystem, OperatorSpec};
pub use eigen::{criticality_classify, hardy_model, log_slope, weighted_principal_eigenvalue, Criticality, CriticalityReport, ExhaustionReport, HardyModel, CRITICAL_BAND};
