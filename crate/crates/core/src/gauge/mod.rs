//! Local SL(2,R) gauge sector: potentials, covariant objects, holonomy and winding.

pub mod covariant;
pub mod path;
pub mod topology;

pub use covariant::{
    charge_coupling, constant_gauge_closed_form, covariant_adjoint, covariant_deriv_f, covariant_identity_suite,
    expansion_terms, expansion_terms_of, form_factor, gauged_composite, gauged_composite_of, gauged_schwarzian,
    gauged_schwarzian_of, gauged_schwarzian_scaled, gauged_schwarzian_scaled_of, ScaledValue,
};
pub use path::{
    gauge_transform, ConstantGauge, ConstantPath, ExpPolyPath, FourierGauge, GaugePath, GroupPath, InversePath,
    ProductPath, PureGauge, RotationPath, ScaledGauge, TransformedField, TransformedGauge, CIRCLE, LOOP_TOL,
};
pub use topology::{
    angle_turns, holonomy, iwasawa_angle, path_winding, trivializing_gauge, winding, ExpFourierPath, HolonomyPath,
    WindingResult, DEFAULT_LOOP_STEPS, TRIVIAL_HOLONOMY_TOL,
};
