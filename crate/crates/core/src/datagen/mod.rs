//! Synthetic chaotic generators and file loaders.

mod csv_io;
mod lorenz;
mod mackey_glass;

pub use csv_io::{load_csv, load_csv_with, write_column, LoadOptions};
pub use lorenz::{generate_lorenz, LorenzParams, LorenzSeries};
pub use mackey_glass::{generate_mackey_glass, MackeyGlassParams};
