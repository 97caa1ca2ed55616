//! Barnes-type multiple Gamma functions, the rational R-matrix, free-field
//! vertex-operator traces and their contour-integral evaluation, with
//! independent numerical cross-checks for every closed form.

pub mod error;
pub mod special_core;
pub mod contour_quadrature;
pub mod barnes_functions;
pub mod rmatrix;
pub mod vertex_trace_engine;
pub mod trace_evaluators;
pub mod gauss_manin;
pub mod cli;

pub use error::{Error, Result};
pub use special_core::{ComplexValue, DeformParams, PrecisionConfig};
