pub mod error;
pub mod special;
pub mod graph;
pub mod models;
pub mod rng;
pub mod io;
pub mod samplers;
pub mod fitting;
pub mod netinf;
pub mod oracle;
pub mod cli;
