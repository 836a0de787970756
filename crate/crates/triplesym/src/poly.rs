//! Dense univariate/bivariate polynomials and closed-form cubic root solvers.
//!
//! Polynomials are the exact `poly_t` backing of the built-in coefficient
//! families; the cubic solvers are the workhorse for eigenvalues of the
//! Bezout matrix (all-real branch) and for discriminant root profiles
//! (general branch with conjugate pairs).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Univariate polynomial `c[0] + c[1] t + … + c[n] tⁿ` with dense `f64` coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Poly {
    pub coeffs: Vec<f64>,
}

impl Poly {
    pub fn new(coeffs: Vec<f64>) -> Self {
        let mut p = Poly { coeffs };
        p.trim();
        p
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![0.0] }
    }

    pub fn constant(c: f64) -> Self {
        Poly { coeffs: vec![c] }
    }

    /// Monic polynomial with the given real roots.
    pub fn from_roots(roots: &[f64]) -> Self {
        let mut p = Poly::constant(1.0);
        for &r in roots {
            p = p.mul(&Poly::new(vec![-r, 1.0]));
        }
        p
    }

    fn trim(&mut self) {
        while self.coeffs.len() > 1 && *self.coeffs.last().unwrap() == 0.0 {
            self.coeffs.pop();
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for &c in self.coeffs.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    pub fn eval_complex(&self, t: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| k as f64 * c)
            .collect();
        Poly::new(coeffs)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = vec![0.0; n];
        for (k, c) in coeffs.iter_mut().enumerate() {
            *c = self.coeffs.get(k).copied().unwrap_or(0.0)
                + other.coeffs.get(k).copied().unwrap_or(0.0);
        }
        Poly::new(coeffs)
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut coeffs = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Poly::new(coeffs)
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut acc = Poly::constant(1.0);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Division with remainder by a monic divisor. Returns `(quotient, remainder)`.
    pub fn div_monic(&self, divisor: &Poly) -> (Poly, Poly) {
        assert!(
            (divisor.coeffs.last().unwrap() - 1.0).abs() < 1e-12,
            "divisor must be monic"
        );
        let d = divisor.degree();
        if self.degree() < d {
            return (Poly::zero(), self.clone());
        }
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0.0; self.degree() - d + 1];
        for k in (0..quot.len()).rev() {
            let c = rem[k + d];
            quot[k] = c;
            for j in 0..=d {
                rem[k + j] -= c * divisor.coeffs[j];
            }
        }
        rem.truncate(d.max(1));
        (Poly::new(quot), Poly::new(rem))
    }

    /// All complex roots, via cubic/quadratic closed forms for low degree and
    /// Aberth–Ehrlich iteration otherwise.
    pub fn roots(&self) -> Vec<Complex64> {
        let mut c = self.coeffs.clone();
        while c.len() > 1 && c.last().unwrap().abs() == 0.0 {
            c.pop();
        }
        match c.len() {
            0 | 1 => vec![],
            2 => vec![Complex64::new(-c[0] / c[1], 0.0)],
            3 => {
                let (r1, r2) = quadratic_roots(c[2], c[1], c[0]);
                vec![r1, r2]
            }
            4 => cubic_roots(c[2] / c[3], c[1] / c[3], c[0] / c[3]).to_vec(),
            _ => aberth_roots(&c),
        }
    }
}

/// Roots of `a t² + b t + c` (a ≠ 0), complex-capable, with the stable
/// sign-aware quadratic formula.
pub fn quadratic_roots(a: f64, b: f64, c: f64) -> (Complex64, Complex64) {
    let disc = b * b - 4.0 * a * c;
    if disc >= 0.0 {
        let sq = disc.sqrt();
        let q = -0.5 * (b + b.signum() * sq);
        let r1 = if a != 0.0 { q / a } else { 0.0 };
        let r2 = if q != 0.0 { c / q } else { -b / a - r1 };
        (Complex64::new(r1, 0.0), Complex64::new(r2, 0.0))
    } else {
        let re = -b / (2.0 * a);
        let im = (-disc).sqrt() / (2.0 * a);
        (Complex64::new(re, im), Complex64::new(re, -im))
    }
}

/// Roots of the monic cubic `t³ + p2 t² + p1 t + p0`.
///
/// Nonnegative cubic discriminant → three real roots by the trigonometric
/// method; negative → one real root and a conjugate pair by Cardano. A Newton
/// polish keeps the backward error near machine precision in both branches.
pub fn cubic_roots(p2: f64, p1: f64, p0: f64) -> [Complex64; 3] {
    // depressed form: t = s - p2/3, s³ + p s + q = 0
    let shift = p2 / 3.0;
    let p = p1 - p2 * p2 / 3.0;
    let q = 2.0 * p2 * p2 * p2 / 27.0 - p2 * p1 / 3.0 + p0;
    let disc = -4.0 * p * p * p - 27.0 * q * q;

    let eval = |t: Complex64| -> Complex64 {
        ((t + p2) * t + p1) * t + p0
    };
    let deriv = |t: Complex64| -> Complex64 {
        (3.0 * t + 2.0 * p2) * t + p1
    };
    let polish = |mut t: Complex64| -> Complex64 {
        for _ in 0..2 {
            let d = deriv(t);
            if d.norm() > 0.0 {
                t -= eval(t) / d;
            }
        }
        t
    };

    let scale = p.abs().sqrt().max(q.abs().cbrt());
    if scale == 0.0 {
        let r = Complex64::new(-shift, 0.0);
        return [r, r, r];
    }

    if disc >= -1e-13 * scale.powi(6) && p >= 0.0 {
        // p and q both vanish to rounding: (near-)triple root
        let s0 = cbrt(-q);
        let mut out = [Complex64::new(s0 - shift, 0.0); 3];
        for slot in out.iter_mut() {
            *slot = polish(*slot);
            slot.im = 0.0;
        }
        return out;
    }

    if disc >= -1e-13 * scale.powi(6) && p < 0.0 {
        // three real roots (Viete), acos argument clamped against rounding
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        let mut out = [Complex64::new(0.0, 0.0); 3];
        for (k, slot) in out.iter_mut().enumerate() {
            let s = m * (theta - 2.0 * PI * k as f64 / 3.0).cos();
            *slot = polish(Complex64::new(s - shift, 0.0));
            slot.im = 0.0;
        }
        out.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        out
    } else {
        // one real root + conjugate pair (Cardano)
        let half_q = q / 2.0;
        let rad = half_q * half_q + p * p * p / 27.0;
        let s_real = if rad >= 0.0 {
            let sq = rad.sqrt();
            let u = cbrt(-half_q + sq);
            let v = cbrt(-half_q - sq);
            u + v
        } else {
            // numerically disc>0 after all: fall back to trig for the real root
            let m = 2.0 * (-p / 3.0).sqrt();
            let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
            m * (arg.acos() / 3.0).cos()
        };
        let real_root = polish(Complex64::new(s_real - shift, 0.0));
        let real_root = Complex64::new(real_root.re, 0.0);
        // deflate: t³+p2t²+p1t+p0 = (t-r)(t² + (p2+r) t + (p1 + r(p2+r)))
        let b = p2 + real_root.re;
        let c = p1 + real_root.re * b;
        let (z1, z2) = quadratic_roots(1.0, b, c);
        let (z1, z2) = (polish(z1), polish(z2));
        // enforce exact conjugacy for the pair
        if z1.im != 0.0 || z2.im != 0.0 {
            let re = 0.5 * (z1.re + z2.re);
            let im = 0.5 * (z1.im.abs() + z2.im.abs());
            [real_root, Complex64::new(re, im), Complex64::new(re, -im)]
        } else {
            let mut out = [real_root, z1, z2];
            out.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
            out
        }
    }
}

fn cbrt(x: f64) -> f64 {
    x.signum() * x.abs().cbrt()
}

/// Aberth–Ehrlich simultaneous iteration for real polynomials of degree ≥ 4.
fn aberth_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let lead = coeffs[n];
    let monic: Vec<f64> = coeffs.iter().map(|&c| c / lead).collect();
    let eval = |z: Complex64| -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &c in monic.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    };
    // initial guesses on a circle of the root-magnitude bound
    let bound = 1.0
        + monic[..n]
            .iter()
            .fold(0.0f64, |m, &c| m.max(c.abs()));
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let ang = 2.0 * PI * k as f64 / n as f64 + 0.4;
            0.7 * bound * Complex64::new(ang.cos(), ang.sin())
        })
        .collect();
    for _ in 0..200 {
        let mut done = true;
        let snapshot = z.clone();
        for i in 0..n {
            let (p, dp) = eval(snapshot[i]);
            if p.norm() < 1e-14 * bound.powi(n as i32) {
                continue;
            }
            let newton = if dp.norm() > 0.0 { p / dp } else { p };
            let mut sum = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    let d = snapshot[i] - snapshot[j];
                    if d.norm() > 1e-300 {
                        sum += 1.0 / d;
                    }
                }
            }
            let denom = 1.0 - newton * sum;
            let step = if denom.norm() > 1e-300 {
                newton / denom
            } else {
                newton
            };
            z[i] -= step;
            if step.norm() > 1e-13 * (1.0 + z[i].norm()) {
                done = false;
            }
        }
        if done {
            break;
        }
    }
    // pair up conjugates to kill rounding asymmetry
    for zi in z.iter_mut() {
        if zi.im.abs() < 1e-10 * (1.0 + zi.re.abs()) {
            zi.im = 0.0;
        }
    }
    z.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    z
}

/// Bivariate polynomial `Σ c[i][j] tⁱ yʲ` (row index = power of `t`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Poly2 {
    /// `coeffs[i][j]` multiplies `tⁱ yʲ`.
    pub coeffs: Vec<Vec<f64>>,
}

impl Poly2 {
    pub fn new(coeffs: Vec<Vec<f64>>) -> Self {
        let width = coeffs.iter().map(|r| r.len()).max().unwrap_or(1).max(1);
        let mut rows: Vec<Vec<f64>> = coeffs
            .into_iter()
            .map(|mut r| {
                r.resize(width, 0.0);
                r
            })
            .collect();
        if rows.is_empty() {
            rows.push(vec![0.0; width]);
        }
        Poly2 { coeffs: rows }
    }

    pub fn zero() -> Self {
        Poly2 {
            coeffs: vec![vec![0.0]],
        }
    }

    pub fn constant(c: f64) -> Self {
        Poly2 {
            coeffs: vec![vec![c]],
        }
    }

    /// The monomial `t`.
    pub fn t() -> Self {
        Poly2 {
            coeffs: vec![vec![0.0], vec![1.0]],
        }
    }

    /// The monomial `y` (the spatial or frequency-direction parameter).
    pub fn y() -> Self {
        Poly2 {
            coeffs: vec![vec![0.0, 1.0]],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().flatten().all(|&c| c == 0.0)
    }

    pub fn eval(&self, t: f64, y: f64) -> f64 {
        let mut acc = 0.0;
        for row in self.coeffs.iter().rev() {
            let mut ry = 0.0;
            for &c in row.iter().rev() {
                ry = ry * y + c;
            }
            acc = acc * t + ry;
        }
        acc
    }

    pub fn dt(&self) -> Poly2 {
        if self.coeffs.len() <= 1 {
            return Poly2::zero();
        }
        let rows = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, row)| row.iter().map(|&c| c * i as f64).collect())
            .collect();
        Poly2::new(rows)
    }

    pub fn dy(&self) -> Poly2 {
        let width = self.coeffs[0].len();
        if width <= 1 {
            return Poly2::zero();
        }
        let rows = self
            .coeffs
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .skip(1)
                    .map(|(j, &c)| c * j as f64)
                    .collect()
            })
            .collect();
        Poly2::new(rows)
    }

    pub fn add(&self, other: &Poly2) -> Poly2 {
        let nr = self.coeffs.len().max(other.coeffs.len());
        let nc = self.coeffs[0].len().max(other.coeffs[0].len());
        let mut rows = vec![vec![0.0; nc]; nr];
        for (i, row) in rows.iter_mut().enumerate() {
            for (j, c) in row.iter_mut().enumerate() {
                *c = self
                    .coeffs
                    .get(i)
                    .and_then(|r| r.get(j))
                    .copied()
                    .unwrap_or(0.0)
                    + other
                        .coeffs
                        .get(i)
                        .and_then(|r| r.get(j))
                        .copied()
                        .unwrap_or(0.0);
            }
        }
        Poly2::new(rows)
    }

    pub fn sub(&self, other: &Poly2) -> Poly2 {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Poly2 {
        Poly2::new(
            self.coeffs
                .iter()
                .map(|r| r.iter().map(|&c| c * s).collect())
                .collect(),
        )
    }

    pub fn mul(&self, other: &Poly2) -> Poly2 {
        let nr = self.coeffs.len() + other.coeffs.len() - 1;
        let nc = self.coeffs[0].len() + other.coeffs[0].len() - 1;
        let mut rows = vec![vec![0.0; nc]; nr];
        for (i, r1) in self.coeffs.iter().enumerate() {
            for (j, &a) in r1.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (k, r2) in other.coeffs.iter().enumerate() {
                    for (l, &b) in r2.iter().enumerate() {
                        rows[i + k][j + l] += a * b;
                    }
                }
            }
        }
        Poly2::new(rows)
    }

    pub fn pow(&self, n: u32) -> Poly2 {
        let mut acc = Poly2::constant(1.0);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Freeze `y`, producing the univariate polynomial in `t`.
    pub fn slice_at_y(&self, y: f64) -> Poly {
        let coeffs = self
            .coeffs
            .iter()
            .map(|row| {
                let mut ry = 0.0;
                for &c in row.iter().rev() {
                    ry = ry * y + c;
                }
                ry
            })
            .collect();
        Poly::new(coeffs)
    }

    /// Multiplicity of `y = 0` as a factor (min power of `y` over nonzero terms).
    pub fn y_multiplicity(&self) -> usize {
        let mut m = usize::MAX;
        for row in &self.coeffs {
            for (j, &c) in row.iter().enumerate() {
                if c != 0.0 {
                    m = m.min(j);
                }
            }
        }
        if m == usize::MAX {
            0
        } else {
            m
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_and_derivative() {
        let p = Poly::new(vec![1.0, -2.0, 0.0, 4.0]); // 1 - 2t + 4t³
        assert_eq!(p.eval(2.0), 1.0 - 4.0 + 32.0);
        let dp = p.derivative();
        assert_eq!(dp.coeffs, vec![-2.0, 0.0, 12.0]);
    }

    #[test]
    fn monic_division_round_trip() {
        let d = Poly::from_roots(&[1.0, -2.0, 0.5]);
        let q = Poly::new(vec![3.0, 0.0, 1.0]);
        let p = d.mul(&q).add(&Poly::new(vec![0.25, -1.0]));
        let (qq, rr) = p.div_monic(&d);
        for (a, b) in qq.coeffs.iter().zip(q.coeffs.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((rr.eval(0.3) - (0.25 - 0.3)).abs() < 1e-12);
    }

    #[test]
    fn cubic_three_real() {
        // τ³ - 3τ - 2 = (τ+1)²(τ-2)
        let r = cubic_roots(0.0, -3.0, -2.0);
        assert!((r[0].re + 1.0).abs() < 1e-9 && r[0].im == 0.0);
        assert!((r[1].re + 1.0).abs() < 1e-9);
        assert!((r[2].re - 2.0).abs() < 1e-12);
    }

    #[test]
    fn cubic_conjugate_pair() {
        // (t + 0.05)((t-0.1)² + 0.0025)
        let m = Poly::from_roots(&[-0.05]).mul(&Poly::new(vec![0.1f64.powi(2) + 0.0025, -0.2, 1.0]));
        let r = cubic_roots(m.coeffs[2], m.coeffs[1], m.coeffs[0]);
        let real: Vec<_> = r.iter().filter(|z| z.im == 0.0).collect();
        assert_eq!(real.len(), 1);
        assert!((real[0].re + 0.05).abs() < 1e-10);
        let pair: Vec<_> = r.iter().filter(|z| z.im != 0.0).collect();
        assert!((pair[0].re - 0.1).abs() < 1e-10);
        assert!((pair[0].im.abs() - 0.05).abs() < 1e-10);
    }

    #[test]
    fn cubic_triple_root() {
        // (t - 0.1)³; triple roots are recoverable only to ~eps^{1/3}
        let r = cubic_roots(-0.3, 0.03, -0.001);
        for z in r {
            assert!((z.re - 0.1).abs() < 1e-3, "triple root recovered coarsely");
            assert!(z.im.abs() < 1e-4);
        }
    }

    #[test]
    fn high_degree_roots_backward_error() {
        let p = Poly::from_roots(&[0.0, 0.1, -0.2, 0.3, -0.4]);
        let roots = p.roots();
        assert_eq!(roots.len(), 5);
        for z in roots {
            assert!(p.eval_complex(z).norm() < 1e-9);
        }
    }

    #[test]
    fn poly2_eval_derivatives() {
        // a = t + y²
        let a = Poly2::t().add(&Poly2::y().pow(2));
        assert_eq!(a.eval(0.25, 0.5), 0.5);
        assert_eq!(a.dt().eval(0.3, -0.2), 1.0);
        assert!((a.dy().eval(0.3, -0.2) + 0.4).abs() < 1e-15);
        let s = a.slice_at_y(0.5);
        assert_eq!(s.eval(0.25), 0.5);
    }

    #[test]
    fn y_multiplicity_detects_factor() {
        // y²(t² + 1)
        let p = Poly2::y().pow(2).mul(&Poly2::t().pow(2).add(&Poly2::constant(1.0)));
        assert_eq!(p.y_multiplicity(), 2);
        assert_eq!(Poly2::t().y_multiplicity(), 0);
    }
}
