pub mod action_oracle;
pub mod airy;
pub mod alphastar;
pub mod cli;
pub mod error;
pub mod ode;
pub mod pde_sim;
pub mod qfunc;
pub mod quad;
pub mod roots;
pub mod selftest;
pub mod trajectories;

pub use error::{Error, Result};
