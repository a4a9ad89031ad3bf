//! Closed convex sets, their asymptotic cones, and polyhedral V/H conversion.

mod cone;
mod dd;
mod schema;
mod set;

pub use cone::{
    dd_convert, generators_from_facets, AnalyticCone, ConeRep, RayDirection, DD_MAX_AMBIENT_DIM,
    DD_MAX_GENERATORS,
};
pub use schema::{parse_set, set_to_json};
pub use set::{asymptotic_cone, ConvexSetDescription};
