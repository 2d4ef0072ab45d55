//! Independent numerical oracles: a time-ordered propagator for the 2×2
//! problem, the dressed-state phase, and the classical-path decompositions.

use num_complex::Complex64;

use crate::dynamics::{classical_trajectory, detuning, hyper, DetuningMode};
use crate::error::{Error, Result};
use crate::magnus::{magnus_terms, MagnusOptions};
use crate::pauli::{exp_anti_hermitian, mat_identity, mat_max_diff, mat_mul, Mat2, PauliVector, Unitary2};
use crate::perturbation::PerturbingPotential;
use crate::pulse::PulseSequence;
use crate::quadrature::{integrate_piecewise, QuadOptions};
use crate::scenario::Scenario;
use crate::HBAR;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    /// Bound on the Richardson error estimate per segment.
    pub tol: f64,
    pub initial_steps: usize,
    pub max_steps: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            initial_steps: 8,
            max_steps: 1 << 22,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationResult {
    pub unitary: Unitary2,
    pub step_count: usize,
    pub error_estimate: f64,
}

fn apply(h: &PauliVector, u: &Mat2) -> Mat2 {
    let m = (*h * Complex64::new(0.0, -1.0)).to_matrix();
    mat_mul(&m, u)
}

fn axpy(u: &Mat2, k: &Mat2, a: f64) -> Mat2 {
    let mut o = *u;
    for i in 0..2 {
        for j in 0..2 {
            o[i][j] += k[i][j] * a;
        }
    }
    o
}

/// Classical RK4 for U′ = −i h U over `n` equal steps.
fn rk4(h: &impl Fn(f64) -> PauliVector, a: f64, b: f64, n: usize) -> Mat2 {
    let dt = (b - a) / n as f64;
    let mut u = mat_identity();
    for i in 0..n {
        let t = a + i as f64 * dt;
        let hm = h(t + 0.5 * dt);
        let k1 = apply(&h(t), &u);
        let k2 = apply(&hm, &axpy(&u, &k1, 0.5 * dt));
        let k3 = apply(&hm, &axpy(&u, &k2, 0.5 * dt));
        let k4 = apply(&h(if i + 1 == n { b } else { t + dt }), &axpy(&u, &k3, dt));
        for r in 0..2 {
            for c in 0..2 {
                u[r][c] += (k1[r][c] + 2.0 * k2[r][c] + 2.0 * k3[r][c] + k4[r][c]) * (dt / 6.0);
            }
        }
    }
    u
}

/// Propagator of `i ∂ₜU = h(t) U` (h in rad/s) on [t0, t1]. Each smooth
/// segment is integrated with doubling step counts until the step-halving
/// estimate drops below the tolerance; the result is re-projected onto the
/// unitaries at every segment end.
pub fn propagate_oracle(
    h: impl Fn(f64) -> PauliVector,
    t0: f64,
    t1: f64,
    breakpoints: &[f64],
    opts: &OracleOptions,
) -> Result<PropagationResult> {
    let mut edges = vec![t0];
    edges.extend(breakpoints.iter().copied().filter(|&b| b > t0 && b < t1));
    edges.push(t1);
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    let mut total = Unitary2::identity();
    let mut steps = 0;
    let mut error = 0.0;
    for w in edges.windows(2) {
        let mut n = opts.initial_steps.max(1);
        let mut coarse = rk4(&h, w[0], w[1], n);
        loop {
            let fine = rk4(&h, w[0], w[1], 2 * n);
            let est = mat_max_diff(&fine, &coarse) / 15.0;
            n *= 2;
            if est <= opts.tol {
                steps += n;
                error += est;
                total = Unitary2::polar_project(&fine)?.compose(&total);
                break;
            }
            if n >= opts.max_steps {
                return Err(Error::NoConvergence {
                    what: "oracle propagator",
                    achieved: est,
                    requested: opts.tol,
                });
            }
            coarse = fine;
        }
    }
    Ok(PropagationResult {
        unitary: total,
        step_count: steps,
        error_estimate: error,
    })
}

/// The rotating-frame Hamiltonian (δ/2)(sin φ1 σ2 − cos φ1 σ3) in rad/s, or
/// only its sin φ1 σ2 part.
pub fn frame_hamiltonian<'a>(
    seq: &'a PulseSequence,
    delta: impl Fn(f64) -> f64 + 'a,
    dominant_only: bool,
) -> impl Fn(f64) -> PauliVector + 'a {
    move |t| {
        let phi = seq.phi1(t.clamp(0.0, seq.total_time())).unwrap_or(0.0);
        let d = 0.5 * delta(t);
        let small = if dominant_only { 0.0 } else { -d * phi.cos() };
        PauliVector::real(0.0, 0.0, d * phi.sin(), small)
    }
}

/// max-entry distance between exp(M1 + M2) and the oracle for `h`.
pub fn magnus_vs_oracle(
    h: impl Fn(f64) -> PauliVector,
    t0: f64,
    t1: f64,
    breakpoints: &[f64],
    opts: &OracleOptions,
) -> Result<f64> {
    let m = magnus_terms(&h, t0, t1, breakpoints, 2, &MagnusOptions::default())?;
    let u = exp_anti_hermitian(&(m[0] + m[1]), 1e-9)?;
    let oracle = propagate_oracle(&h, t0, t1, breakpoints, opts)?;
    Ok(u.max_diff(&oracle.unitary))
}

/// ∫₀^{2T} (E⁺ − E⁻)/ħ = ∫ δ sin φ1, by quadrature on every piece.
pub fn dressed_state_phase(seq: &PulseSequence, delta: impl Fn(f64) -> f64, opts: &QuadOptions) -> Result<f64> {
    integrate_piecewise(
        |t| delta(t) * seq.sensitivity(t).unwrap_or(0.0),
        0.0,
        seq.total_time(),
        &seq.knots(),
        opts,
    )
}

/// ¼|1 − e^{iΦ}|² for the dressed-state phase Φ.
pub fn dressed_state_probability(phase: f64) -> f64 {
    0.25 * (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, phase)).norm_sqr()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathIntegralBreakdown {
    pub laser_term: f64,
    pub propagation_term: f64,
    pub separation_term: f64,
    pub total: f64,
    /// D₂[φ_L] = φ_L(2T) − 2φ_L(T) + φ_L(0)
    pub d2_laser: f64,
    /// αT²
    pub chirp_phase: f64,
    /// Propagation term in the laboratory frame, for reference.
    pub propagation_lab: f64,
}

/// D₂[f] = f(2T) − 2f(T) + f(0)
pub fn d2(f: impl Fn(f64) -> f64, t_half: f64) -> f64 {
    f(2.0 * t_half) - 2.0 * f(t_half) + f(0.0)
}

/// Arm separation z_u − z_l for kicks `v_r·aᵢ` at times `cᵢ`, with its rate
/// split as (Σ v_r aᵢ, remainder from the gradient), carried kick to kick.
fn kicked_arms(s: &Scenario, kicks: &[(f64, f64)], t: f64) -> (f64, f64, f64) {
    let (vr, gamma) = (s.recoil_velocity(), s.pot.gamma);
    let (mut d, mut step, mut curved, mut t0) = (0.0, 0.0, 0.0, 0.0);
    let advance = |d: &mut f64, step: f64, curved: &mut f64, dt: f64| {
        let h = hyper(gamma, dt);
        let r = step + *curved;
        let next = *d * h.c + r * h.s1;
        *curved += r * gamma * h.q + gamma * *d * h.s1;
        *d = next;
    };
    for &(c, a) in kicks.iter().filter(|k| t > k.0) {
        advance(&mut d, step, &mut curved, c - t0);
        step += a * vr;
        t0 = c;
    }
    advance(&mut d, step, &mut curved, t - t0);
    (d, step, curved)
}

fn kicked_separation(s: &Scenario, kicks: &[(f64, f64)], t: f64) -> (f64, f64) {
    let (d, step, curved) = kicked_arms(s, kicks, t);
    (d, step + curved)
}

fn require_quadratic(v: &PerturbingPotential) -> Result<()> {
    match v {
        PerturbingPotential::Polynomial(c) if c.iter().all(|&x| x == 0.0) => Ok(()),
        _ => Err(Error::Unsupported(
            "the classical-path comparators are defined for the quadratic potential only".into(),
        )),
    }
}

/// Laser, propagation and separation terms for instantaneous pulses at
/// 0, T and 2T. Signs are chosen so that the total is +φ₂; the propagation
/// term is evaluated relative to the mean path.
pub fn path_integral_decomposition(
    seq: &PulseSequence,
    s: &Scenario,
    v: &PerturbingPotential,
    opts: &QuadOptions,
) -> Result<PathIntegralBreakdown> {
    require_quadratic(v)?;
    let t = seq.t_half();
    let k = s.laser.k;
    let alpha = s.laser.chirp(s.pot.g);
    let phi_l = |u: f64| s.laser.detuning0 * u + 0.5 * alpha * u * u;
    let d2_laser = d2(phi_l, t);
    let kicks = [(0.0, 1.0), (t, -2.0), (2.0 * t, 1.0)];
    let zm = |u: f64| classical_trajectory(s, u).0;
    let arms = |u: f64| {
        let (d, _) = kicked_separation(s, &kicks[..2], u);
        (zm(u) + 0.5 * d, zm(u) - 0.5 * d)
    };
    let (zu_t, zl_t) = arms(t);
    let (zu_2t, zl_2t) = arms(2.0 * t);
    let laser_term = -(d2_laser + k * (zm(0.0) - zu_t - zl_t + zl_2t));
    let separation_term = -0.5 * k * (zu_2t - zl_2t);

    let m = s.atom.mass;
    let (g, gamma) = (s.pot.g, s.pot.gamma);
    // ξ = z − z_m obeys ξ̈ = γξ with Lagrangian m ξ̇²/2 + mγξ²/2
    let relative = |u: f64, sign: f64| {
        let (d, r) = kicked_separation(s, &kicks[..2], u);
        let (xi, xid) = (sign * 0.5 * d, sign * 0.5 * r);
        0.5 * m * xid * xid + 0.5 * m * gamma * xi * xi
    };
    let propagation_term =
        integrate_piecewise(|u| relative(u, 1.0) - relative(u, -1.0), 0.0, 2.0 * t, &[t], opts)? / HBAR;

    let lab = |u: f64, sign: f64| {
        let (d, r) = kicked_separation(s, &kicks[..2], u);
        let z = zm(u) + sign * 0.5 * d;
        let vdot = classical_trajectory(s, u).1 / m + sign * 0.5 * r;
        0.5 * m * vdot * vdot - (m * g * z - 0.5 * m * gamma * z * z)
    };
    let propagation_lab = integrate_piecewise(|u| lab(u, 1.0) - lab(u, -1.0), 0.0, 2.0 * t, &[t], opts)? / HBAR;

    Ok(PathIntegralBreakdown {
        laser_term,
        propagation_term,
        separation_term,
        total: laser_term + propagation_term + separation_term,
        d2_laser,
        chirp_phase: alpha * t * t,
        propagation_lab,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiniteDurationBreakdown {
    /// (v_r/ħ) ∫ S ∂_zV on the mean path.
    pub phi2_potential: f64,
    /// φ₂ minus φ₂ with g = γ = 0 at the same chirp.
    pub phi2_potential_direct: f64,
    /// (1/ħ) ∫ [V(z_u) − V(z_l)]
    pub circulation: f64,
    /// p(2T)[z_u(2T) − z_l(2T)]/ħ
    pub endpoint: f64,
    /// −(1/ħ) ∫ p δv
    pub correction: f64,
    pub split_total: f64,
}

/// Potential part of φ₂ through the gradient integral, and its split into
/// circulation, endpoint and finite-duration terms along arms kicked at the
/// pulse centres.
pub fn finite_duration_decomposition(
    seq: &PulseSequence,
    s: &Scenario,
    v: &PerturbingPotential,
    opts: &QuadOptions,
) -> Result<FiniteDurationBreakdown> {
    require_quadratic(v)?;
    if !seq.is_ideal() {
        return Err(crate::error::invalid("the finite-duration split needs ideal pulses"));
    }
    let m = s.atom.mass;
    let (g, gamma, k) = (s.pot.g, s.pot.gamma, s.laser.k);
    let vr = s.recoil_velocity();
    let end = seq.total_time();
    let c = seq.pulse_centers();
    let kicks = [(c[0], 1.0), (c[1], -2.0), (c[2], 1.0)];
    let mut knots = seq.knots();
    knots.extend_from_slice(&c);
    knots.sort_by(f64::total_cmp);
    knots.dedup();

    let failure = std::cell::RefCell::new(None);
    let primitive = |u: f64| match seq.sensitivity_primitive(u) {
        Ok(x) => x,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            0.0
        }
    };
    let grad = integrate_piecewise(
        |u| primitive(u) * (g - gamma * classical_trajectory(s, u).0),
        0.0,
        end,
        &knots,
        opts,
    )?;
    if let Some(e) = failure.borrow_mut().take() {
        return Err(e);
    }
    let phi2_potential = k * grad;

    let mut free = *s;
    free.laser.alpha = s.laser.chirp(g);
    free.laser.kg_minus_alpha = None;
    free.pot.g = 0.0;
    free.pot.gamma = 0.0;
    let with = crate::dynamics::phi2_partial(seq, s, end, opts)?;
    let without = crate::dynamics::phi2_partial(seq, &free, end, opts)?;

    // V(x + h) − V(x − h) = 2h(mg − mγx) for V = mgz − mγz²/2, free of cancellation
    let circulation = integrate_piecewise(
        |u| {
            let zm = classical_trajectory(s, u).0;
            let d = kicked_separation(s, &kicks, u).0;
            d * m * (g - gamma * zm)
        },
        0.0,
        end,
        &knots,
        opts,
    )? / HBAR;
    let endpoint = classical_trajectory(s, end).1 * kicked_separation(s, &kicks, end).0 / HBAR;
    let correction = -integrate_piecewise(
        |u| {
            let (_, step, curved) = kicked_arms(s, &kicks, u);
            let dv = (step - vr * seq.sensitivity(u).unwrap_or(0.0)) + curved;
            classical_trajectory(s, u).1 * dv
        },
        0.0,
        end,
        &knots,
        opts,
    )? / HBAR;
    Ok(FiniteDurationBreakdown {
        phi2_potential,
        phi2_potential_direct: with - without,
        circulation,
        endpoint,
        correction,
        split_total: circulation + endpoint + correction,
    })
}

/// δ(t) on the mean path as a closure, exact mode.
pub fn mean_path_detuning(s: &Scenario) -> impl Fn(f64) -> f64 + '_ {
    move |t| detuning(s, t, DetuningMode::Exact)
}
