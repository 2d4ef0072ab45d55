//! First three Magnus terms of the propagator of `i ∂ₜU = h(t) U`, with
//! `h = H/ħ` in rad/s.
//!
//! Every nested integral is carried on the same composite Gauss-Legendre grid:
//! within a panel, running integrals at the nodes come from the spectral
//! cumulative matrix, so each nesting level costs one pass over the nodes.

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::pauli::{cross, dot, PauliVector};
use crate::quadrature::{cumulative_matrix, gauss_legendre_rule, RULE_ORDER};

const I: Complex64 = Complex64::new(0.0, 1.0);
const Z: Complex64 = Complex64::new(0.0, 0.0);

type V3 = [Complex64; 3];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagnusOptions {
    /// Convergence threshold on the coefficient max-norm between panel doublings.
    pub tol: f64,
    pub max_panels: usize,
}

impl Default for MagnusOptions {
    fn default() -> Self {
        Self {
            tol: 1e-11,
            max_panels: 1 << 11,
        }
    }
}

/// Returns `[M1, …, M_order]` for the interval `[t0, t1]`, splitting at
/// `breakpoints` where `h` is not smooth.
pub fn magnus_terms(
    h: impl Fn(f64) -> PauliVector,
    t0: f64,
    t1: f64,
    breakpoints: &[f64],
    order: usize,
    opts: &MagnusOptions,
) -> Result<Vec<PauliVector>> {
    if order == 0 {
        return Err(invalid("Magnus order must be at least 1"));
    }
    if order > 3 {
        return Err(Error::Unsupported(format!("Magnus terms beyond M3 (requested order {order})")));
    }
    if !(t1 > t0) {
        return Err(invalid(format!("empty Magnus interval [{t0}, {t1}]")));
    }
    let mut edges = vec![t0];
    edges.extend(breakpoints.iter().copied().filter(|&b| b > t0 && b < t1));
    edges.push(t1);
    edges.sort_by(f64::total_cmp);
    edges.dedup();

    let mut panels = 1;
    let mut prev = fixed_grid(&h, &edges, panels);
    loop {
        panels *= 2;
        let next = fixed_grid(&h, &edges, panels);
        let scale = next[..order].iter().fold(1.0_f64, |m, p| m.max(p.max_abs()));
        let diff = (0..order).fold(0.0_f64, |m, n| m.max((next[n] - prev[n]).max_abs()));
        if diff <= opts.tol * scale {
            return Ok(next[..order].to_vec());
        }
        if panels >= opts.max_panels {
            return Err(Error::NoConvergence {
                what: "Magnus quadrature",
                achieved: diff / scale,
                requested: opts.tol,
            });
        }
        prev = next;
    }
}

fn add3(a: &V3, b: &V3) -> V3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn scale3(a: &V3, s: Complex64) -> V3 {
    a.map(|x| x * s)
}

fn comm(a: &V3, b: &V3) -> V3 {
    scale3(&cross(a, b), 2.0 * I)
}

/// Running state of the nested integrals at a time point.
#[derive(Clone, Copy)]
struct Accum {
    /// ∫h, identity part included.
    k0: Complex64,
    k: V3,
    /// ∫[h, K]
    l: V3,
    /// ∫ h Kᵀ
    g: [V3; 3],
    /// ∫ K·h
    gs: Complex64,
    /// ∫ m3 integrand
    m3: V3,
}

impl Accum {
    fn zero() -> Self {
        Self {
            k0: Z,
            k: [Z; 3],
            l: [Z; 3],
            g: [[Z; 3]; 3],
            gs: Z,
            m3: [Z; 3],
        }
    }
}

/// Cumulative sums `start + (len/2) Σ_j Q[i][j] f_j` at every node.
fn running<const N: usize>(start: [Complex64; N], f: &[[Complex64; N]], half: f64, q: &[[f64; RULE_ORDER]; RULE_ORDER]) -> Vec<[Complex64; N]> {
    q.iter()
        .map(|row| {
            let mut acc = start;
            for (qij, fj) in row.iter().zip(f) {
                for c in 0..N {
                    acc[c] += fj[c] * (qij * half);
                }
            }
            acc
        })
        .collect()
}

fn total<const N: usize>(start: [Complex64; N], f: &[[Complex64; N]], half: f64, rule: &[(f64, f64)]) -> [Complex64; N] {
    let mut acc = start;
    for (&(_, w), fj) in rule.iter().zip(f) {
        for c in 0..N {
            acc[c] += fj[c] * (w * half);
        }
    }
    acc
}

fn fixed_grid(h: &impl Fn(f64) -> PauliVector, edges: &[f64], panels: usize) -> [PauliVector; 3] {
    let rule = gauss_legendre_rule();
    let q = cumulative_matrix();
    let mut acc = Accum::zero();
    for seg in edges.windows(2) {
        let width = (seg[1] - seg[0]) / panels as f64;
        for p in 0..panels {
            let lo = seg[0] + width * p as f64;
            let half = 0.5 * width;
            let samples: Vec<PauliVector> = rule.iter().map(|&(x, _)| h(lo + half * (x + 1.0))).collect();
            let hv: Vec<[Complex64; 4]> = samples.iter().map(|s| [s.a0, s.ax, s.ay, s.az]).collect();
            let h3: Vec<V3> = samples.iter().map(|s| s.vector()).collect();

            let kk: Vec<V3> = running(acc.k, &h3, half, q);
            let f2: Vec<V3> = h3.iter().zip(&kk).map(|(hj, kj)| comm(hj, kj)).collect();
            let ll: Vec<V3> = running(acc.l, &f2, half, q);
            // h Kᵀ flattened row-major, and K·h
            let fg: Vec<[Complex64; 10]> = h3
                .iter()
                .zip(&kk)
                .map(|(hj, kj)| {
                    let mut o = [Z; 10];
                    for a in 0..3 {
                        for b in 0..3 {
                            o[3 * a + b] = hj[a] * kj[b];
                        }
                    }
                    o[9] = dot(kj, hj);
                    o
                })
                .collect();
            let mut g_start = [Z; 10];
            for a in 0..3 {
                for b in 0..3 {
                    g_start[3 * a + b] = acc.g[a][b];
                }
            }
            g_start[9] = acc.gs;
            let gg: Vec<[Complex64; 10]> = running(g_start, &fg, half, q);
            let f3: Vec<V3> = (0..RULE_ORDER)
                .map(|j| {
                    let hj = &h3[j];
                    let gj = &gg[j];
                    let gh = [0, 1, 2].map(|a| gj[3 * a] * hj[0] + gj[3 * a + 1] * hj[1] + gj[3 * a + 2] * hj[2]);
                    let second = add3(&gh, &scale3(hj, -gj[9]));
                    add3(&comm(hj, &ll[j]), &scale3(&second, Complex64::from(-4.0)))
                })
                .collect();

            let kt = total([acc.k0, acc.k[0], acc.k[1], acc.k[2]], &hv, half, rule);
            acc.k0 = kt[0];
            acc.k = [kt[1], kt[2], kt[3]];
            acc.l = total(acc.l, &f2, half, rule);
            let gt = total(g_start, &fg, half, rule);
            for a in 0..3 {
                for b in 0..3 {
                    acc.g[a][b] = gt[3 * a + b];
                }
            }
            acc.gs = gt[9];
            acc.m3 = total(acc.m3, &f3, half, rule);
        }
    }
    let m1 = PauliVector::from_vector(acc.k0, acc.k) * (-I);
    let m2 = PauliVector::from_vector(Z, acc.l) * -0.5;
    let m3 = PauliVector::from_vector(Z, acc.m3) * (I / 6.0);
    [m1, m2, m3]
}
