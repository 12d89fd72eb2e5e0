pub mod debias;
pub mod error;
pub mod harness;
pub mod langevin;
pub mod measure_change;
pub mod mlmc;
pub mod potentials;
pub mod rng;
pub mod stats;
pub mod tail_transform;

pub use error::{Error, Result};
pub use potentials::{make_potential, BuiltinSpec, Observable, Potential, RegularityInfo};
pub use rng::RngStream;
