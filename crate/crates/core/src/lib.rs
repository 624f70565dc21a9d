pub mod dimension;
pub mod error;
pub mod interval;
pub mod jet;
pub mod config;
pub mod limit_geometry;
pub mod marstrand;
pub mod report;
pub mod runner;
pub mod scale_space;
pub mod subcantor;
pub mod sum_image;
pub mod symbolic;
pub mod system;

pub use error::{Error, Result};
