//! Composite Gauss-Legendre quadrature over piecewise-smooth integrands.
//!
//! Each smooth segment is covered by `panels` equal sub-intervals carrying a
//! fixed 16-point Gauss-Legendre rule. The panel count is doubled until two
//! successive estimates agree to `rel_tol` measured against the integral of
//! `|f|`, so integrals that cancel to zero still terminate.

use std::sync::OnceLock;

use crate::error::{Error, Result};

const ORDER: usize = 16;

/// Environment variable that overrides the default relative tolerance.
pub const TOLERANCE_ENV: &str = "AIPHASE_TOL";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub rel_tol: f64,
    /// Upper bound on panels per segment; reaching it is a convergence failure.
    pub max_panels: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            max_panels: 1 << 12,
        }
    }
}

impl QuadOptions {
    pub fn with_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }

    /// Defaults, with `AIPHASE_TOL` applied when it parses as a positive number.
    pub fn from_env() -> Result<Self> {
        match std::env::var(TOLERANCE_ENV) {
            Ok(raw) => {
                let tol: f64 = raw
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("{TOLERANCE_ENV}={raw:?} is not a number")))?;
                if !(tol.is_finite() && tol > 0.0) {
                    return Err(Error::InvalidInput(format!(
                        "{TOLERANCE_ENV} must be a positive finite number, got {raw:?}"
                    )));
                }
                Ok(Self::with_tol(tol))
            }
            Err(_) => Ok(Self::default()),
        }
    }
}

/// Nodes and weights of the Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre_rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| legendre_nodes(ORDER))
}

/// Newton iteration on P_n starting from the Chebyshev-like initial guess.
fn legendre_nodes(n: usize) -> Vec<(f64, f64)> {
    let mut rule = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.push((x, w));
    }
    rule.sort_by(|a, b| a.0.total_cmp(&b.0));
    rule
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Cumulative integration matrix on the rule's nodes: `Q[i][j] = ∫_{-1}^{x_i} ℓ_j`,
/// where `ℓ_j` is the Lagrange basis polynomial of node `j`. Applied to samples
/// of a smooth function it returns its running integral at every node.
pub fn cumulative_matrix() -> &'static [[f64; ORDER]; ORDER] {
    static MATRIX: OnceLock<[[f64; ORDER]; ORDER]> = OnceLock::new();
    MATRIX.get_or_init(|| {
        let rule = gauss_legendre_rule();
        let nodes: Vec<f64> = rule.iter().map(|r| r.0).collect();
        let lagrange = |j: usize, y: f64| {
            nodes
                .iter()
                .enumerate()
                .filter(|&(m, _)| m != j)
                .fold(1.0, |acc, (_, &xm)| acc * (y - xm) / (nodes[j] - xm))
        };
        let mut q = [[0.0; ORDER]; ORDER];
        for (i, row) in q.iter_mut().enumerate() {
            let half = 0.5 * (nodes[i] + 1.0);
            for (j, qij) in row.iter_mut().enumerate() {
                *qij = half * rule.iter().map(|&(x, w)| w * lagrange(j, -1.0 + half * (x + 1.0))).sum::<f64>();
            }
        }
        q
    })
}

pub const RULE_ORDER: usize = ORDER;

/// Trait for values that can be accumulated by the quadrature: plain
/// reals and small fixed-size vectors of reals or complex numbers.
pub trait Integrand: Copy {
    fn zero() -> Self;
    fn add(self, other: Self) -> Self;
    fn scale(self, s: f64) -> Self;
    /// Max-abs norm used for convergence tests.
    fn norm(self) -> f64;
}

impl Integrand for f64 {
    fn zero() -> Self {
        0.0
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn norm(self) -> f64 {
        self.abs()
    }
}

impl<const N: usize> Integrand for [f64; N] {
    fn zero() -> Self {
        [0.0; N]
    }
    fn add(mut self, other: Self) -> Self {
        for (a, b) in self.iter_mut().zip(other) {
            *a += b;
        }
        self
    }
    fn scale(mut self, s: f64) -> Self {
        for a in self.iter_mut() {
            *a *= s;
        }
        self
    }
    fn norm(self) -> f64 {
        self.iter().fold(0.0_f64, |m, a| m.max(a.abs()))
    }
}

/// Fixed composite rule: `panels` equal panels on [a, b]. Returns the
/// estimate and the matching estimate of the integral of |f|.
pub fn composite<T: Integrand>(f: &mut impl FnMut(f64) -> T, a: f64, b: f64, panels: usize) -> (T, f64) {
    let rule = gauss_legendre_rule();
    let h = (b - a) / panels as f64;
    let mut total = T::zero();
    let mut abs_total = 0.0;
    for p in 0..panels {
        let lo = a + h * p as f64;
        let mid = lo + 0.5 * h;
        let mut acc = T::zero();
        let mut acc_abs = 0.0;
        for &(x, w) in rule {
            let v = f(mid + 0.5 * h * x);
            acc = acc.add(v.scale(w));
            acc_abs += w * v.norm();
        }
        total = total.add(acc.scale(0.5 * h));
        abs_total += 0.5 * h.abs() * acc_abs;
    }
    (total, abs_total)
}

/// Adaptive integration of a smooth integrand over [a, b] by panel doubling.
pub fn integrate<T: Integrand>(mut f: impl FnMut(f64) -> T, a: f64, b: f64, opts: &QuadOptions) -> Result<T> {
    integrate_segment(&mut f, a, b, opts)
}

fn integrate_segment<T: Integrand>(f: &mut impl FnMut(f64) -> T, a: f64, b: f64, opts: &QuadOptions) -> Result<T> {
    if a == b {
        return Ok(T::zero());
    }
    let mut panels = 1;
    let (mut prev, _) = composite(f, a, b, panels);
    loop {
        panels *= 2;
        let (next, abs_est) = composite(f, a, b, panels);
        let diff = next.add(prev.scale(-1.0)).norm();
        let scale = abs_est.max(next.norm());
        if diff <= opts.rel_tol * scale || scale == 0.0 {
            return Ok(next);
        }
        if panels >= opts.max_panels {
            return Err(Error::NoConvergence {
                what: "quadrature",
                achieved: diff / scale,
                requested: opts.rel_tol,
            });
        }
        prev = next;
    }
}

/// Integrates over [a, b] split at every breakpoint that falls strictly inside.
pub fn integrate_piecewise<T: Integrand>(
    mut f: impl FnMut(f64) -> T,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    opts: &QuadOptions,
) -> Result<T> {
    let (lo, hi, sign) = if a <= b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut total = T::zero();
    let mut start = lo;
    for &x in breakpoints.iter().filter(|&&x| x > lo && x < hi) {
        if x > start {
            total = total.add(integrate_segment(&mut f, start, x, opts)?);
            start = x;
        }
    }
    total = total.add(integrate_segment(&mut f, start, hi, opts)?);
    Ok(total.scale(sign))
}
