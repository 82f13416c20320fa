use std::path::PathBuf;
use std::str::FromStr;

use hilbert_ar::datagen::{
    generate_lorenz, generate_mackey_glass, load_csv_with, LoadOptions, LorenzParams, MackeyGlassParams,
};
use hilbert_ar::TimeSeries;

use crate::CliError;

#[derive(Clone, Debug, PartialEq)]
pub enum Dataset {
    MackeyGlass { tau: f64 },
    Lorenz(Axis),
    Csv(PathBuf),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Generator parameters, defaulted and optionally overridden by a config file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Generators {
    pub mackey_glass: MackeyGlassParams,
    pub lorenz: LorenzParams,
}

impl Generators {
    pub fn mackey_glass_for(&self, dataset: &Dataset) -> MackeyGlassParams {
        match dataset {
            Dataset::MackeyGlass { tau } => MackeyGlassParams {
                tau: *tau,
                ..self.mackey_glass.clone()
            },
            _ => self.mackey_glass.clone(),
        }
    }
}

impl FromStr for Dataset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if let Some(path) = s.strip_prefix("csv:") {
            return Ok(Dataset::Csv(PathBuf::from(path)));
        }
        match s {
            "lorenz-x" => return Ok(Dataset::Lorenz(Axis::X)),
            "lorenz-y" => return Ok(Dataset::Lorenz(Axis::Y)),
            "lorenz-z" => return Ok(Dataset::Lorenz(Axis::Z)),
            _ => {}
        }
        if let Some(tau) = s.strip_prefix("mg") {
            let tau: f64 = tau.parse().map_err(|_| format!("bad Mackey-Glass delay in {s:?}"))?;
            if tau >= 0.0 {
                return Ok(Dataset::MackeyGlass { tau });
            }
        }
        Err(format!(
            "unknown dataset {s:?}; expected mg<tau>, lorenz-x|y|z or csv:<path>"
        ))
    }
}

impl Dataset {
    pub fn is_generated(&self) -> bool {
        !matches!(self, Dataset::Csv(_))
    }

    /// Generates `length` samples, or loads the file (`take` keeps the first
    /// values, `column` picks the field). The delay in an `mg<tau>` name
    /// overrides `gens.mackey_glass.tau`.
    pub fn load(
        &self,
        length: usize,
        column: usize,
        take: Option<usize>,
        gens: &Generators,
    ) -> Result<TimeSeries, CliError> {
        let series = match self {
            Dataset::MackeyGlass { .. } => generate_mackey_glass(&gens.mackey_glass_for(self), length)?,
            Dataset::Lorenz(axis) => {
                let s = generate_lorenz(&gens.lorenz, length)?;
                match axis {
                    Axis::X => s.x,
                    Axis::Y => s.y,
                    Axis::Z => s.z,
                }
            }
            Dataset::Csv(path) => load_csv_with(
                path,
                &LoadOptions {
                    column,
                    take_first: take,
                },
            )?,
        };
        Ok(series)
    }
}
