//! Physical parameters of an interferometer run.

use crate::error::{invalid, Result};
use crate::HBAR;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomSpecies {
    /// kg
    pub mass: f64,
}

impl AtomSpecies {
    pub const RB87_MASS: f64 = 1.443e-25;

    pub fn new(mass: f64) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(invalid(format!("atomic mass must be positive, got {mass}")));
        }
        Ok(Self { mass })
    }

    pub fn rubidium87() -> Self {
        Self { mass: Self::RB87_MASS }
    }

    /// v_r = ħk/m
    pub fn recoil_velocity(&self, laser: &LaserDrive) -> f64 {
        HBAR * laser.k / self.mass
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaserDrive {
    /// Effective two-photon wavenumber, 1/m.
    pub k: f64,
    /// Chirp rate, rad/s².
    pub alpha: f64,
    /// Initial detuning Δ(0), rad/s.
    pub detuning0: f64,
    /// kg − α supplied directly, rad/s²; overrides the subtraction when set.
    pub kg_minus_alpha: Option<f64>,
}

impl LaserDrive {
    pub fn new(k: f64, alpha: f64, detuning0: f64) -> Result<Self> {
        let l = Self {
            k,
            alpha,
            detuning0,
            kg_minus_alpha: None,
        };
        l.validate()?;
        Ok(l)
    }

    /// Drive specified by its residual kg − α instead of α.
    pub fn with_residual(k: f64, kg_minus_alpha: f64, detuning0: f64) -> Result<Self> {
        let l = Self {
            k,
            alpha: f64::NAN,
            detuning0,
            kg_minus_alpha: Some(kg_minus_alpha),
        };
        l.validate()?;
        Ok(l)
    }

    fn validate(&self) -> Result<()> {
        if !(self.k.is_finite() && self.k > 0.0) {
            return Err(invalid(format!("laser wavenumber must be positive, got {}", self.k)));
        }
        if !self.detuning0.is_finite() {
            return Err(invalid("initial detuning must be finite"));
        }
        match self.kg_minus_alpha {
            Some(r) if !r.is_finite() => Err(invalid("kg - alpha must be finite")),
            None if !self.alpha.is_finite() => Err(invalid("chirp rate must be finite")),
            _ => Ok(()),
        }
    }

    /// kg − α for gravity `g`.
    pub fn residual(&self, g: f64) -> f64 {
        self.kg_minus_alpha.unwrap_or(self.k * g - self.alpha)
    }

    /// The chirp rate, recovered from the residual when that is what was given.
    pub fn chirp(&self, g: f64) -> f64 {
        match self.kg_minus_alpha {
            Some(r) => self.k * g - r,
            None => self.alpha,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialKinematics {
    /// m
    pub z0: f64,
    /// m/s
    pub v0: f64,
    /// Velocity spread, m/s.
    pub sigma_v: f64,
    /// Velocity-selection pulse length, s.
    pub tau_select: f64,
}

impl InitialKinematics {
    pub fn new(z0: f64, v0: f64) -> Result<Self> {
        if !(z0.is_finite() && v0.is_finite()) {
            return Err(invalid("initial position and velocity must be finite"));
        }
        Ok(Self {
            z0,
            v0,
            sigma_v: 0.0,
            tau_select: 0.0,
        })
    }

    /// Kinematics whose mean-path velocity `v0 + v_r/2` equals `vm`.
    pub fn with_mean_velocity(z0: f64, vm: f64, atom: &AtomSpecies, laser: &LaserDrive) -> Result<Self> {
        Self::new(z0, vm - 0.5 * atom.recoil_velocity(laser))
    }

    /// Velocity spread of a Fourier-limited selection pulse, σ_v = 1/(k τ_s).
    pub fn with_selection(mut self, tau_select: f64, laser: &LaserDrive) -> Result<Self> {
        if !(tau_select.is_finite() && tau_select > 0.0) {
            return Err(invalid(format!("selection pulse length must be positive, got {tau_select}")));
        }
        self.tau_select = tau_select;
        self.sigma_v = 1.0 / (laser.k * tau_select);
        Ok(self)
    }

    /// v_m = v0 + v_r/2
    pub fn mean_velocity(&self, atom: &AtomSpecies, laser: &LaserDrive) -> f64 {
        self.v0 + 0.5 * atom.recoil_velocity(laser)
    }
}

/// V(z) = m g z − m γ z²/2
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticPotential {
    /// m/s²
    pub g: f64,
    /// 1/s²
    pub gamma: f64,
}

impl QuadraticPotential {
    pub fn new(g: f64, gamma: f64) -> Result<Self> {
        if !(g.is_finite() && gamma.is_finite()) {
            return Err(invalid("g and gamma must be finite"));
        }
        Ok(Self { g, gamma })
    }

    /// True when |γ|(2T)² exceeds 0.1, outside the regime of the expanded forms.
    pub fn expansion_warning(&self, t_half: f64) -> bool {
        self.gamma.abs() * (2.0 * t_half).powi(2) > 0.1
    }
}

/// Everything except the pulse sequence and any perturbing potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub atom: AtomSpecies,
    pub laser: LaserDrive,
    pub kin: InitialKinematics,
    pub pot: QuadraticPotential,
}

impl Scenario {
    /// Rb gravimeter with k = 1.61e7 m⁻¹, g = 9.81 m/s², α = 0, γ = 3e−6 s⁻²,
    /// z0 = 0 and v_m = 0.
    pub fn reference() -> Self {
        let atom = AtomSpecies::rubidium87();
        let laser = LaserDrive {
            k: 1.61e7,
            alpha: 0.0,
            detuning0: 0.0,
            kg_minus_alpha: None,
        };
        let kin = InitialKinematics {
            z0: 0.0,
            v0: -0.5 * atom.recoil_velocity(&laser),
            sigma_v: 0.0,
            tau_select: 0.0,
        };
        Self {
            atom,
            laser,
            kin,
            pot: QuadraticPotential { g: 9.81, gamma: 3e-6 },
        }
    }

    pub fn recoil_velocity(&self) -> f64 {
        self.atom.recoil_velocity(&self.laser)
    }

    pub fn mean_velocity(&self) -> f64 {
        self.kin.mean_velocity(&self.atom, &self.laser)
    }

    pub fn residual(&self) -> f64 {
        self.laser.residual(self.pot.g)
    }
}
