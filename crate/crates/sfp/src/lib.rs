//! File formats, parallel evaluation drivers, and the `sfp` command-line
//! interface on top of [`sfp_core`].

pub mod cli;
pub mod csv_io;
pub mod error;
pub mod model_file;
pub mod parallel;
pub mod tune;

pub use error::{CliError, ExitCode};
pub use model_file::{load_model, save_model, SavedModel, MODEL_VERSION};
