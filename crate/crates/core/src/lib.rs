//! Whitney decompositions, weak mean porosity, box dimension, weighted
//! geodesics and John estimates on planar test domains.
//!
//! Everything geometric is generic over the scalar (`f32` or `f64`); the
//! aliases below fix it to one or the other.

pub mod domain;
pub mod error;
pub mod geom;
pub mod index;
pub mod real;
pub mod rng;
pub mod field;
pub mod dyadic;
pub mod dimension;
pub mod porosity;
pub mod curve;
pub mod report;
pub mod svg;

pub use error::{Error, Result};

pub type Point64 = geom::Point<f64>;
pub type Rect64 = geom::Rect<f64>;
pub type Domain64 = domain::Domain<f64>;
pub type DistanceField64 = field::DistanceField<f64>;
pub type Whitney64 = dyadic::WhitneyDecomposition<f64>;
pub type Geodesic64 = curve::GeodesicResult<f64>;

pub type Point32 = geom::Point<f32>;
pub type Rect32 = geom::Rect<f32>;
pub type Domain32 = domain::Domain<f32>;
pub type DistanceField32 = field::DistanceField<f32>;
pub type Whitney32 = dyadic::WhitneyDecomposition<f32>;
pub type Geodesic32 = curve::GeodesicResult<f32>;
