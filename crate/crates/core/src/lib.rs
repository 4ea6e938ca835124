pub mod error;
pub mod graph;
pub mod rng;
pub mod spectral;
pub mod paradox;
pub mod typicality;
pub mod delocalization;
