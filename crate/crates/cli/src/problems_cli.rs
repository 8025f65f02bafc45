//! Problem construction from CLI-style parameters.

use anyhow::{bail, Result};
use stabgrad_core::problems::{
    beck_quadratic, gravity, heat, matrix_a1, matrix_a2, reaction_diffusion_2d, shaw, Problem,
};

/// Parameters shared by every command that names a problem.
#[derive(Debug, Clone)]
pub struct ProblemParams {
    pub name: String,
    pub n: usize,
    pub kappa: f64,
    pub a_param: f64,
    pub level: u32,
}

impl Default for ProblemParams {
    fn default() -> Self {
        Self {
            name: String::new(),
            n: 1000,
            kappa: 1.0,
            a_param: 2.0,
            level: 6,
        }
    }
}

/// Builds the named dense problem.
///
/// Reaction-diffusion instances come out dense here (used for export and
/// for the gradient method); the stabilized solver and the experiment
/// tables use the banded grid path instead.
pub fn build_problem(p: &ProblemParams) -> Result<Problem<f64>> {
    Ok(match p.name.as_str() {
        "a1" => matrix_a1(),
        "a2" => matrix_a2(),
        "shaw" => shaw(p.n)?,
        "heat" => heat(p.n, p.kappa)?,
        "gravity" => gravity(p.n)?,
        "beck" => beck_quadratic(p.a_param)?,
        "rd" | "reaction-diffusion" => reaction_diffusion_2d(p.level, p.kappa)?,
        other => {
            bail!("unknown problem '{other}' (expected a1, a2, shaw, heat, gravity, beck, rd)")
        }
    })
}

pub fn is_grid_problem(name: &str) -> bool {
    matches!(name, "rd" | "reaction-diffusion")
}
