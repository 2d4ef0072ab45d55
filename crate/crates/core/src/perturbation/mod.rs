//! First-order treatment of a weak extra potential 𝒱(z) on the mean path of
//! the frame falling with g.

mod spline;

use std::fmt;
use std::sync::Arc;

pub use spline::BSpline;

use crate::dynamics::{detuning, free_fall_path, phi2_partial, pulse_correction_from_angles, DetuningMode, PulseCorrection};
use crate::error::{invalid, Error, Result};
use crate::pulse::PulseSequence;
use crate::quadrature::{integrate_piecewise, QuadOptions};
use crate::scenario::Scenario;
use crate::HBAR;

/// Highest derivative taken from a tabulated potential.
pub const TABULATED_DERIVATIVE_CAP: usize = 5;

type AnalyticFn = dyn Fn(f64, usize) -> f64 + Send + Sync;

#[derive(Clone)]
pub enum PerturbingPotential {
    /// Σ cₙ zⁿ, coefficients in J/mⁿ.
    Polynomial(Vec<f64>),
    Tabulated(BSpline),
    /// `f(z, n)` returns the n-th derivative at z.
    Analytic(Arc<AnalyticFn>),
}

impl fmt::Debug for PerturbingPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Polynomial(c) => f.debug_tuple("Polynomial").field(c).finish(),
            Self::Tabulated(s) => f.debug_tuple("Tabulated").field(&s.domain()).finish(),
            Self::Analytic(_) => f.write_str("Analytic(..)"),
        }
    }
}

impl PerturbingPotential {
    pub fn polynomial(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(invalid("polynomial coefficients must be finite"));
        }
        Ok(Self::Polynomial(coeffs))
    }

    pub fn zero() -> Self {
        Self::Polynomial(Vec::new())
    }

    pub fn analytic(f: impl Fn(f64, usize) -> f64 + Send + Sync + 'static) -> Self {
        Self::Analytic(Arc::new(f))
    }

    /// Two columns `z_m V_joule`, `#` comments allowed; interpolated by a
    /// spline of the given degree.
    pub fn tabulated_from_text(text: &str, degree: usize) -> Result<Self> {
        let mut z = Vec::new();
        let mut v = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split_whitespace().collect();
            if cols.len() != 2 {
                return Err(invalid(format!("potential table line {}: expected 2 columns, got {}", lineno + 1, cols.len())));
            }
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| invalid(format!("potential table line {}: {s:?} is not a number", lineno + 1)))
            };
            z.push(parse(cols[0])?);
            v.push(parse(cols[1])?);
        }
        Ok(Self::Tabulated(BSpline::interpolate(&z, &v, degree)?))
    }

    /// Highest derivative order available, `None` when unbounded.
    pub fn derivative_cap(&self) -> Option<usize> {
        match self {
            Self::Tabulated(s) => Some(s.degree().min(TABULATED_DERIVATIVE_CAP)),
            _ => None,
        }
    }

    pub fn value(&self, z: f64) -> Result<f64> {
        self.derivative(z, 0)
    }

    pub fn derivative(&self, z: f64, order: usize) -> Result<f64> {
        match self {
            Self::Polynomial(c) => Ok(horner_derivative(c, z, order)),
            Self::Tabulated(s) => {
                if order > TABULATED_DERIVATIVE_CAP {
                    return Err(Error::Unsupported(format!(
                        "derivative of order {order} of a tabulated potential (cap {TABULATED_DERIVATIVE_CAP})"
                    )));
                }
                s.eval(z, order)
            }
            Self::Analytic(f) => Ok(f(z, order)),
        }
    }

    /// Second derivative is constant in z.
    pub fn is_quadratic(&self) -> bool {
        matches!(self, Self::Polynomial(c) if c.len() <= 3)
    }
}

fn horner_derivative(c: &[f64], z: f64, order: usize) -> f64 {
    let mut acc = 0.0;
    for n in (order..c.len()).rev() {
        let falling = ((n - order + 1)..=n).fold(1.0, |f, k| f * k as f64);
        acc = acc * z + c[n] * falling;
    }
    acc
}

/// Pulse knots plus the times at which the γ = 0 mean path crosses a knot
/// of a tabulated potential.
fn path_knots(seq: &PulseSequence, s: &Scenario, v: &PerturbingPotential) -> Vec<f64> {
    let mut knots = seq.knots();
    if let PerturbingPotential::Tabulated(sp) = v {
        let end = seq.total_time();
        let (z0, vm, g) = (s.kin.z0, s.mean_velocity(), s.pot.g);
        for kz in sp.interior_knots() {
            // z0 + vm t − g t²/2 = kz
            let c = z0 - kz;
            let roots: Vec<f64> = if g == 0.0 {
                if vm != 0.0 { vec![-c / vm] } else { vec![] }
            } else {
                let a = -0.5 * g;
                let disc = vm * vm - 4.0 * a * c;
                if disc < 0.0 {
                    vec![]
                } else {
                    let q = -0.5 * (vm + vm.signum() * disc.sqrt());
                    let mut r = vec![];
                    if q != 0.0 {
                        r.push(c / q);
                    }
                    r.push(q / a);
                    r
                }
            };
            knots.extend(roots.into_iter().filter(|&t| t > 0.0 && t < end));
        }
        knots.sort_by(f64::total_cmp);
        knots.dedup();
    }
    knots
}

/// 𝒱±(z, Δz) = [𝒱(z + Δz) ± 𝒱(z − Δz)]/2
pub fn v_plus_minus(v: &PerturbingPotential, z: f64, dz: f64) -> Result<(f64, f64)> {
    let a = v.value(z + dz)?;
    let b = v.value(z - dz)?;
    Ok((0.5 * (a + b), 0.5 * (a - b)))
}

/// Runs `f` inside a quadrature, keeping the first error it raises.
fn guarded<const N: usize>(
    f: impl Fn(f64) -> Result<[f64; N]>,
    a: f64,
    b: f64,
    knots: &[f64],
    opts: &QuadOptions,
) -> Result<[f64; N]> {
    let failure = std::cell::RefCell::new(None);
    let v = integrate_piecewise(
        |t| match f(t) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                [0.0; N]
            }
        },
        a,
        b,
        knots,
        opts,
    );
    match failure.into_inner() {
        Some(e) => Err(e),
        None => v,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonPhases {
    /// Global phase, rad.
    pub eps0: f64,
    /// Half the observable shift, rad.
    pub eps2: f64,
}

impl EpsilonPhases {
    /// 2ε₂, the addition to φ₂.
    pub fn phase_shift(&self) -> f64 {
        2.0 * self.eps2
    }
}

/// ε± accumulated over [0, t].
pub fn epsilon_phases_partial(
    seq: &PulseSequence,
    s: &Scenario,
    v: &PerturbingPotential,
    t: f64,
    opts: &QuadOptions,
) -> Result<EpsilonPhases> {
    seq.phi1(t)?;
    let vr = s.recoil_velocity();
    let [p, m] = guarded(
        |u| {
            let z = free_fall_path(s, u).0;
            let (vp, vm) = v_plus_minus(v, z, 0.5 * vr * seq.sensitivity_primitive(u)?)?;
            Ok([vp, vm])
        },
        0.0,
        t,
        &path_knots(seq, s, v),
        opts,
    )?;
    Ok(EpsilonPhases {
        eps0: p / HBAR,
        eps2: m / HBAR,
    })
}

pub fn epsilon_phases(seq: &PulseSequence, s: &Scenario, v: &PerturbingPotential, opts: &QuadOptions) -> Result<EpsilonPhases> {
    epsilon_phases_partial(seq, s, v, seq.total_time(), opts)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesExpansion {
    /// Term n of 2ε₂.
    pub terms: Vec<f64>,
    pub partial_sums: Vec<f64>,
    /// Stopped early because the potential has no derivative of the next order.
    pub truncated: bool,
}

/// 2ε₂ = (2/ħ) Σₙ (v_r/2)^{2n+1}/(2n+1)! ∫ S^{2n+1} ∂^{2n+1}𝒱(z_m) dt, n ≤ `max_n`.
pub fn epsilon2_series(
    seq: &PulseSequence,
    s: &Scenario,
    v: &PerturbingPotential,
    max_n: usize,
    opts: &QuadOptions,
) -> Result<SeriesExpansion> {
    let half_vr = 0.5 * s.recoil_velocity();
    let knots = path_knots(seq, s, v);
    let mut terms = Vec::new();
    let mut partial_sums = Vec::new();
    let mut truncated = false;
    let mut factorial = 1.0;
    let mut sum = 0.0;
    for n in 0..=max_n {
        let order = 2 * n + 1;
        if v.derivative_cap().is_some_and(|cap| order > cap) {
            truncated = true;
            break;
        }
        if n > 0 {
            factorial *= (order - 1) as f64 * order as f64;
        }
        let [integral] = guarded(
            |u| {
                let sp = seq.sensitivity_primitive(u)?;
                let d = v.derivative(free_fall_path(s, u).0, order)?;
                Ok([if d == 0.0 { 0.0 } else { sp.powi(order as i32) * d }])
            },
            0.0,
            seq.total_time(),
            &knots,
            opts,
        )?;
        let term = 2.0 / HBAR * half_vr.powi(order as i32) / factorial * integral;
        sum += term;
        terms.push(term);
        partial_sums.push(sum);
    }
    Ok(SeriesExpansion {
        terms,
        partial_sums,
        truncated,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparationReport {
    /// m
    pub dz: f64,
    /// kg·m/s
    pub dp: f64,
    /// mΔz/Δp, `None` when Δp = 0.
    pub ratio_time: Option<f64>,
    /// Change of k at the π pulse, 1/m.
    pub kick_pi: f64,
    /// Change of k at the last pulse, 1/m.
    pub kick_final: f64,
    /// Δz with the kicks applied.
    pub residual_dz: f64,
    pub residual_dp: f64,
}

/// Δz = −(v_r/m)∫(2T − t) S ∂²𝒱 and Δp = −v_r ∫ S ∂²𝒱 on the mean path.
pub fn separation_perturbative(
    seq: &PulseSequence,
    s: &Scenario,
    v: &PerturbingPotential,
    opts: &QuadOptions,
) -> Result<SeparationReport> {
    let end = seq.total_time();
    let vr = s.recoil_velocity();
    let m = s.atom.mass;
    let [iz, ip] = guarded(
        |u| {
            let curv = v.derivative(free_fall_path(s, u).0, 2)?;
            let sp = seq.sensitivity_primitive(u)?;
            Ok([(end - u) * sp * curv, sp * curv])
        },
        0.0,
        end,
        &path_knots(seq, s, v),
        opts,
    )?;
    let dz = -vr / m * iz;
    let dp = -vr * ip;
    Ok(SeparationReport {
        dz,
        dp,
        ratio_time: (dp != 0.0).then(|| m * dz / dp),
        kick_pi: 0.0,
        kick_final: 0.0,
        residual_dz: dz,
        residual_dp: dp,
    })
}

/// Two wavenumber changes nulling Δz and Δp: δk₁ at the π pulse changes the
/// relative velocity for the remaining time T, δk₂ at the last pulse adds
/// the missing momentum.
pub fn compensation_plan(sep: &SeparationReport, seq: &PulseSequence, s: &Scenario) -> Result<SeparationReport> {
    let lever = seq.total_time() - seq.pulse_centers()[1];
    let m = s.atom.mass;
    if !(lever > 0.0 && m > 0.0) {
        return Err(Error::Singular(format!("kick lever arm {lever} s leaves no free evolution after the π pulse")));
    }
    // unknown relative-velocity changes κ₁ (π pulse) and κ₂ (last pulse):
    // [lever 0; m m]·[κ₁; κ₂] = −[Δz; Δp]
    let k1 = -sep.dz / lever;
    let k2 = -sep.dp / m - k1;
    Ok(SeparationReport {
        kick_pi: m * k1 / (2.0 * HBAR),
        kick_final: m * k2 / HBAR,
        residual_dz: sep.dz + k1 * lever,
        residual_dp: sep.dp + m * (k1 + k2),
        ..*sep
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeDiagnostics {
    /// √(ħT/m)
    pub coherence_length: f64,
    /// v_r τ_s, or v_r τ without a selection pulse.
    pub recoil_length: f64,
    pub coherence_ratio: f64,
    pub recoil_ratio: f64,
    pub threshold: f64,
    pub flagged: bool,
}

pub const REGIME_THRESHOLD: f64 = 0.1;
const REGIME_SAMPLES: usize = 257;

pub fn coherence_length(mass: f64, t_half: f64) -> f64 {
    (HBAR * t_half / mass).sqrt()
}

/// Variation of 𝒱 over the two quantum length scales along the mean path,
/// relative to the largest |𝒱| on the path.
pub fn regime_validator(seq: &PulseSequence, s: &Scenario, v: &PerturbingPotential) -> Result<RegimeDiagnostics> {
    let lc = coherence_length(s.atom.mass, seq.t_half());
    let scale_time = if s.kin.tau_select > 0.0 { s.kin.tau_select } else { seq.tau() };
    let lr = s.recoil_velocity() * scale_time;
    let end = seq.total_time();
    let mut vmax = 0.0_f64;
    let mut dc = 0.0_f64;
    let mut dr = 0.0_f64;
    for i in 0..REGIME_SAMPLES {
        let z = free_fall_path(s, end * i as f64 / (REGIME_SAMPLES - 1) as f64).0;
        let v0 = v.value(z)?;
        vmax = vmax.max(v0.abs());
        for (len, acc) in [(lc, &mut dc), (lr, &mut dr)] {
            let d = (v.value(z + len)? - v0).abs().max((v.value(z - len)? - v0).abs());
            *acc = acc.max(d);
        }
    }
    let ratio = |d: f64| if d == 0.0 { 0.0 } else if vmax == 0.0 { f64::INFINITY } else { d / vmax };
    let (rc, rr) = (ratio(dc), ratio(dr));
    Ok(RegimeDiagnostics {
        coherence_length: lc,
        recoil_length: lr,
        coherence_ratio: rc,
        recoil_ratio: rr,
        threshold: REGIME_THRESHOLD,
        flagged: rc > REGIME_THRESHOLD || rr > REGIME_THRESHOLD,
    })
}

/// Pulse correction with φ₂ replaced by φ₂ + 2ε₂ at 0, T and 2T.
pub fn full_hamiltonian_substitution(
    seq: &PulseSequence,
    s: &Scenario,
    v: &PerturbingPotential,
    opts: &QuadOptions,
) -> Result<PulseCorrection> {
    if !seq.is_ideal() {
        return Err(invalid("the pulse correction is defined for ideal pulses only"));
    }
    let tau = seq.tau();
    let theta = seq.pulse_centers().map(|t| 0.5 * tau * detuning(s, t, DetuningMode::Exact));
    let t = seq.t_half();
    let mut phi = [0.0; 3];
    for (slot, time) in phi.iter_mut().zip([0.0, t, 2.0 * t]) {
        *slot = phi2_partial(seq, s, time, opts)? + epsilon_phases_partial(seq, s, v, time, opts)?.phase_shift();
    }
    pulse_correction_from_angles(theta, phi)
}
