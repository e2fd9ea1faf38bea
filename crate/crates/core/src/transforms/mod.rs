//! Grid-based integral operators and the inequality checks built on them.

pub mod checks;
pub mod fields;
pub mod io;
pub mod oracle;
pub mod plane;
pub mod quadrature;
pub mod variation;

pub use checks::{
    f_quadrature, f_quadrature_field, identity_p1_p2_check, nmi_finite_check, nmi_infinitesimal_check,
    precomposed_energy_area, reich_strebel_delta, second_variation_fd, InequalityReport, InfinitesimalReport,
};
pub use fields::EquivalentFields;
pub use plane::{beurling_t, cauchy_p, normal_solution_neumann, NormalSolution, PlaneField, PlaneGrid};
pub use quadrature::{DiskGrid, Quadrature};
pub use variation::{destabilizing_check, CutoffOptions, CutoffReport, CutoffVariation};
