pub mod bdl;
pub mod cli;
pub mod cutproject;
pub mod error;
pub mod quadfield;
pub mod spectra;
pub mod spectral;
pub mod morphisms;
pub mod words;

pub use error::{Error, Result};
