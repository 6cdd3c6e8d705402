//! Floor-plan generation, thermal screening and optimisation.
//!
//! Numeric kernels are generic over [`num::Scalar`]; the aliases below fix them to `f64`.

pub mod constructions;
pub mod epsap;
pub mod fpop;
pub mod geometry;
pub mod model;
pub mod num;
pub mod project;
pub mod reporting;
pub mod solution;
pub mod surrogate;
pub mod systems;

pub type Rect = geometry::Rect<f64>;
pub type WeatherSeries = surrogate::WeatherSeries<f64>;
pub type ZoneThermalParams = surrogate::ZoneThermalParams<f64>;
pub type ThermalModel = surrogate::ThermalModel<f64>;
pub type SetpointBand = surrogate::SetpointBand<f64>;
pub type DegreeHours = surrogate::DegreeHours<f64>;
