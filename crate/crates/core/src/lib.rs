pub mod bounds;
pub mod cli;
pub mod error;
pub mod export;
mod fft;
pub mod grid;
pub mod multiindex;
pub mod seminorms;
pub mod states;
pub mod transforms;
pub mod verify;

pub use error::{Error, Result};
pub use grid::{Grid, Label, PhaseSpaceFn, Rep, SampledFn};
pub use multiindex::MultiIndex;
pub use states::{Atom, MixedState, PureState};
