pub mod cli;
pub mod error;
pub mod exppoly;
pub mod flows;
pub mod jet;

pub use error::{Error, Result};
pub use exppoly::{solve_linear_ode, ExpJet, ExpPoly, Frequency};
pub use flows::{formal_flow, lie_derivative, numeric_flow, VectorField};
pub use jet::{Jet, JetMap, MultiIndex, C64};
pub mod holonomy;
pub mod orbit;
pub mod presets;
pub mod reproduce;
