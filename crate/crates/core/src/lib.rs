//! Interface plasmons in layered dispersive media and their bifurcation
//! under a Kerr nonlinearity.

pub mod asymptotics;
pub mod cli;
pub mod config;
pub mod eigenfunctions;
pub mod error;
pub mod expfield;
pub mod fd;
pub mod materials;
pub mod roots;
pub mod spectrum2;
pub mod spectrum3;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
