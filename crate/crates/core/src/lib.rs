//! Doubly warped product Finsler manifolds: jets-based evaluation of the metric,
//! connections and curvature, the lifted geometry of the slit tangent bundle,
//! and a verification harness.

pub mod connection;
pub mod curvature;
pub mod error;
pub mod finsler;
pub mod frame;
pub mod geometry;
pub mod jets;
pub mod lab;
pub mod lifted;
pub mod metric;
pub mod sample;
pub mod tensor;

pub use error::{Error, Result};
pub use finsler::DwGeometry;
pub use frame::FrameVector;
pub use metric::{fixture, FactorMetricSpec, ProductConfig, WarpSpec};
pub use sample::TangentSample;
pub use tensor::BlockTensor;
