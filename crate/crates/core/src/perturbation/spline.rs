//! Interpolating B-splines with exact derivatives.

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct BSpline {
    degree: usize,
    knots: Vec<f64>,
    /// Coefficients of the spline and of each of its derivatives; entry `d`
    /// belongs to degree `degree − d` on `knots[d..len − d]`.
    coeffs: Vec<Vec<f64>>,
}

impl BSpline {
    /// Spline of odd `degree` through `(x, y)`, with de Boor's knot averaging
    /// so that the collocation system is banded and totally positive.
    pub fn interpolate(x: &[f64], y: &[f64], degree: usize) -> Result<Self> {
        if x.len() != y.len() {
            return Err(invalid("abscissae and values differ in length"));
        }
        if degree == 0 {
            return Err(invalid("spline degree must be at least 1"));
        }
        let n = x.len();
        if n < degree + 1 {
            return Err(invalid(format!("degree-{degree} spline needs at least {} samples, got {n}", degree + 1)));
        }
        if x.iter().chain(y).any(|v| !v.is_finite()) {
            return Err(invalid("spline samples must be finite"));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("spline abscissae must increase strictly"));
        }
        let p = degree;
        let mut knots = vec![x[0]; p + 1];
        for j in 1..n - p {
            knots.push(x[j..j + p].iter().sum::<f64>() / p as f64);
        }
        knots.extend(std::iter::repeat_n(x[n - 1], p + 1));

        // band rows: entry (i, j) stored at band[i][j + p − i]
        let width = 2 * p + 1;
        let mut band = vec![vec![0.0; width]; n];
        for (i, &xi) in x.iter().enumerate() {
            let span = find_span(&knots, p, n, xi);
            let basis = basis_funs(&knots, p, span, xi);
            for (r, b) in basis.iter().enumerate() {
                let j = span - p + r;
                let off = j as isize + p as isize - i as isize;
                if (0..width as isize).contains(&off) {
                    band[i][off as usize] = *b;
                } else if *b != 0.0 {
                    return Err(Error::Singular("collocation matrix wider than its band".into()));
                }
            }
        }
        let c = solve_band(band, y.to_vec(), p)?;

        let mut coeffs = vec![c];
        for d in 1..=p {
            let prev = &coeffs[d - 1];
            let q = p - d + 1;
            let t = &knots[d - 1..knots.len() - (d - 1)];
            let next: Vec<f64> = (0..prev.len() - 1)
                .map(|j| {
                    let span = t[j + q + 1] - t[j + 1];
                    if span > 0.0 {
                        q as f64 * (prev[j + 1] - prev[j]) / span
                    } else {
                        0.0
                    }
                })
                .collect();
            coeffs.push(next);
        }
        Ok(Self { degree, knots, coeffs })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.knots[0], self.knots[self.knots.len() - 1])
    }

    /// Distinct knots strictly inside the domain, where high derivatives jump.
    pub fn interior_knots(&self) -> Vec<f64> {
        let (lo, hi) = self.domain();
        let mut k: Vec<f64> = self.knots.iter().copied().filter(|&x| x > lo && x < hi).collect();
        k.dedup();
        k
    }

    /// `order`-th derivative at `z`; zero above the degree.
    pub fn eval(&self, z: f64, order: usize) -> Result<f64> {
        let (lo, hi) = self.domain();
        if !(z >= lo && z <= hi) {
            return Err(Error::OutsideDomain { z, lo, hi });
        }
        if order > self.degree {
            return Ok(0.0);
        }
        let q = self.degree - order;
        let t = &self.knots[order..self.knots.len() - order];
        let c = &self.coeffs[order];
        let span = find_span(t, q, c.len(), z);
        if q == 0 {
            return Ok(c[span]);
        }
        let mut d: Vec<f64> = (0..=q).map(|i| c[span - q + i]).collect();
        for r in 1..=q {
            for j in (r..=q).rev() {
                let left = t[span - q + j];
                let right = t[span + 1 + j - r];
                let a = (z - left) / (right - left);
                d[j] = (1.0 - a) * d[j - 1] + a * d[j];
            }
        }
        Ok(d[q])
    }
}

/// Index `k` with `t[k] ≤ z < t[k+1]`, clamped to the last non-empty span.
fn find_span(t: &[f64], p: usize, n_coeffs: usize, z: f64) -> usize {
    if z >= t[n_coeffs] {
        return n_coeffs - 1;
    }
    let k = t.partition_point(|&v| v <= z) - 1;
    k.clamp(p, n_coeffs - 1)
}

/// The `p + 1` basis functions non-zero on span `k`, Cox-de Boor recursion.
fn basis_funs(t: &[f64], p: usize, k: usize, z: f64) -> Vec<f64> {
    let mut n = vec![0.0; p + 1];
    let mut left = vec![0.0; p + 1];
    let mut right = vec![0.0; p + 1];
    n[0] = 1.0;
    for j in 1..=p {
        left[j] = z - t[k + 1 - j];
        right[j] = t[k + j] - z;
        let mut saved = 0.0;
        for r in 0..j {
            let tmp = n[r] / (right[r + 1] + left[j - r]);
            n[r] = saved + right[r + 1] * tmp;
            saved = left[j - r] * tmp;
        }
        n[j] = saved;
    }
    n
}

/// Gaussian elimination without pivoting on a band matrix of half-width `p`.
fn solve_band(mut a: Vec<Vec<f64>>, mut b: Vec<f64>, p: usize) -> Result<Vec<f64>> {
    let n = b.len();
    let at = |i: usize, j: usize| j + p - i;
    for k in 0..n {
        let pivot = a[k][at(k, k)];
        if pivot.abs() < 1e-300 {
            return Err(Error::Singular(format!("zero pivot in spline collocation at row {k}")));
        }
        for i in k + 1..(k + p + 1).min(n) {
            let f = a[i][at(i, k)] / pivot;
            if f == 0.0 {
                continue;
            }
            for j in k..(k + p + 1).min(n) {
                let v = a[k][at(k, j)];
                a[i][at(i, j)] -= f * v;
            }
            b[i] -= f * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = b[i];
        for j in i + 1..(i + p + 1).min(n) {
            s -= a[i][at(i, j)] * x[j];
        }
        x[i] = s / a[i][at(i, i)];
    }
    Ok(x)
}
