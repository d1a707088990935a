//! Command-line front end for the `vlasov` solvers: run configurations,
//! artifact formats, run comparison and plotting.

pub mod compare;
pub mod config;
pub mod output;
pub mod plot;
pub mod run;
