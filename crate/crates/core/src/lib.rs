pub mod adversaries;
pub mod argument;
pub mod commitment;
pub mod constants;
pub mod dist;
pub mod harness;
pub mod histogram;
pub mod properties;
pub mod protocol;
pub mod rational;
pub mod representation;
pub mod rng;
pub mod testers;
pub mod verdict;
pub mod workload;
