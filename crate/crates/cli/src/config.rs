//! Scenario files: TOML with one table per section and units in every key.
//!
//! ```toml
//! [atom]
//! mass_kg = 1.443e-25
//!
//! [laser]
//! k_per_m = 1.61e7
//! alpha_rad_per_s2 = 0.0            # or kg_minus_alpha_rad_per_s2
//! detuning0_rad_per_s = 0.0
//!
//! [geometry]
//! T_s = 0.5
//! tau_s = 5e-5
//! tau_select_s = 0.0                # 0 disables the velocity spread
//!
//! [initial]
//! z0_m = 0.0
//! v0_m_per_s = -5.8e-3
//!
//! [potential]
//! g_m_per_s2 = 9.81
//! gamma_per_s2 = 3e-6
//! perturbation_poly = [0.0, 0.0, 0.0, 1e-27]   # or perturbation_file = "v.dat"
//!
//! [pulses]
//! shape = "rect"                    # rect | gauss | file
//! ideal = true
//! ```

use std::path::{Path, PathBuf};

use aiphase::perturbation::PerturbingPotential;
use aiphase::pulse::{gaussian_with_area, PulseSequence, PulseShape};
use aiphase::report::Inputs;
use aiphase::{AtomSpecies, InitialKinematics, LaserDrive, QuadOptions, QuadraticPotential, Scenario};
use serde::Deserialize;

use crate::CliError;

/// Spline degree for tabulated perturbations unless overridden.
pub const DEFAULT_SPLINE_DEGREE: usize = 5;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub atom: AtomSection,
    pub laser: LaserSection,
    pub geometry: GeometrySection,
    pub initial: InitialSection,
    pub potential: PotentialSection,
    pub pulses: PulseSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSection {
    pub mass_kg: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaserSection {
    pub k_per_m: f64,
    pub alpha_rad_per_s2: Option<f64>,
    pub kg_minus_alpha_rad_per_s2: Option<f64>,
    pub detuning0_rad_per_s: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct GeometrySection {
    pub T_s: f64,
    pub tau_s: f64,
    pub tau_select_s: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    pub z0_m: f64,
    pub v0_m_per_s: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSection {
    pub g_m_per_s2: f64,
    pub gamma_per_s2: f64,
    pub perturbation_poly: Option<Vec<f64>>,
    pub perturbation_file: Option<PathBuf>,
    pub perturbation_spline_degree: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeKind {
    Rect,
    Gauss,
    File,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseSection {
    pub shape: ShapeKind,
    pub ideal: bool,
    /// Multiplies the nominal π/2, π, π/2 areas of rect and gauss pulses.
    pub area_scale: Option<f64>,
    /// Three `time_s omega_rad_per_s` tables, one per pulse, for `shape = "file"`.
    pub files: Option<Vec<PathBuf>>,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| config_err(e.to_string()))
    }

    /// Engine inputs; relative file names resolve against `base`.
    pub fn build(&self, base: &Path, opts: QuadOptions) -> Result<Inputs, CliError> {
        let atom = AtomSpecies::new(self.atom.mass_kg)?;
        let l = &self.laser;
        let laser = match (l.alpha_rad_per_s2, l.kg_minus_alpha_rad_per_s2) {
            (Some(a), None) => LaserDrive::new(l.k_per_m, a, l.detuning0_rad_per_s)?,
            (None, Some(r)) => LaserDrive::with_residual(l.k_per_m, r, l.detuning0_rad_per_s)?,
            (Some(_), Some(_)) => {
                return Err(config_err(
                    "[laser]: alpha_rad_per_s2 and kg_minus_alpha_rad_per_s2 are mutually exclusive",
                ))
            }
            (None, None) => {
                return Err(config_err("[laser]: one of alpha_rad_per_s2 or kg_minus_alpha_rad_per_s2 is required"))
            }
        };
        let mut kin = InitialKinematics::new(self.initial.z0_m, self.initial.v0_m_per_s)?;
        let ts = self.geometry.tau_select_s;
        if ts < 0.0 || !ts.is_finite() {
            return Err(config_err(format!("[geometry]: tau_select_s must be ≥ 0, got {ts}")));
        }
        if ts > 0.0 {
            kin = kin.with_selection(ts, &laser)?;
        }
        let pot = QuadraticPotential::new(self.potential.g_m_per_s2, self.potential.gamma_per_s2)?;
        let scenario = Scenario { atom, laser, kin, pot };

        let seq = self.pulse_sequence(base)?;
        let mut inp = Inputs::new(seq, scenario);
        inp.opts = opts;
        inp.perturbation = self.perturbation(base)?;
        Ok(inp)
    }

    fn pulse_sequence(&self, base: &Path) -> Result<PulseSequence, CliError> {
        let (t, tau) = (self.geometry.T_s, self.geometry.tau_s);
        let p = &self.pulses;
        let scale = p.area_scale.unwrap_or(1.0);
        if p.ideal && scale != 1.0 {
            return Err(config_err("[pulses]: area_scale must be 1 for ideal pulses"));
        }
        if p.shape != ShapeKind::File && p.files.is_some() {
            return Err(config_err("[pulses]: files is only read for shape = \"file\""));
        }
        let areas = [
            std::f64::consts::FRAC_PI_2 * scale,
            std::f64::consts::PI * scale,
            std::f64::consts::FRAC_PI_2 * scale,
        ];
        let windows = [tau, 2.0 * tau, tau];
        let shapes: [PulseShape; 3] = match p.shape {
            ShapeKind::Rect if p.ideal => return Ok(PulseSequence::ideal_rectangular(t, tau)?),
            ShapeKind::Gauss if p.ideal => return Ok(PulseSequence::ideal_gaussian(t, tau)?),
            ShapeKind::Rect => std::array::from_fn(|i| PulseShape::Rectangular {
                omega0: if tau > 0.0 { areas[i] / windows[i] } else { 0.0 },
            }),
            ShapeKind::Gauss => std::array::from_fn(|i| gaussian_with_area(areas[i], windows[i])),
            ShapeKind::File => {
                let files = p
                    .files
                    .as_ref()
                    .ok_or_else(|| config_err("[pulses]: shape = \"file\" needs files = [three paths]"))?;
                if files.len() != 3 {
                    return Err(config_err(format!("[pulses]: files needs 3 entries, got {}", files.len())));
                }
                let mut out = Vec::with_capacity(3);
                for f in files {
                    let path = resolve(base, f);
                    let shape = PulseShape::tabulated_from_text(&read(&path)?)
                        .map_err(|e| config_err(format!("{}: {e}", path.display())))?;
                    out.push(shape);
                }
                out.try_into().expect("three shapes")
            }
        };
        Ok(PulseSequence::new(t, tau, shapes, p.ideal)?)
    }

    fn perturbation(&self, base: &Path) -> Result<PerturbingPotential, CliError> {
        let p = &self.potential;
        match (&p.perturbation_poly, &p.perturbation_file) {
            (Some(_), Some(_)) => Err(config_err(
                "[potential]: perturbation_poly and perturbation_file are mutually exclusive",
            )),
            (Some(c), None) => {
                if p.perturbation_spline_degree.is_some() {
                    return Err(config_err("[potential]: perturbation_spline_degree applies to perturbation_file only"));
                }
                Ok(PerturbingPotential::polynomial(c.clone())?)
            }
            (None, Some(f)) => {
                let path = resolve(base, f);
                let degree = p.perturbation_spline_degree.unwrap_or(DEFAULT_SPLINE_DEGREE);
                PerturbingPotential::tabulated_from_text(&read(&path)?, degree)
                    .map_err(|e| config_err(format!("{}: {e}", path.display())))
            }
            (None, None) => Ok(PerturbingPotential::zero()),
        }
    }
}
