//! Discriminant root profiles and the scalar weight partitions they drive.
//!
//! Near an effectively hyperbolic triple characteristic the discriminant
//! normalizes to a monic cubic in `t` per slice, `Δ/e₂ = t³ + a₁t² + a₂t + a₃`.
//! Its roots ν split into "one real + conjugate pair" or "three real", the
//! pivot `ψ = max(0, Re ν₂)` cuts `[0, δ]` at `ψ/2` and `ψ`, and the weights
//! `φ₁ = t`, `φ₂ = ψ − t`, `φ₃ = t − ψ` carry the energies `g_j = φ_j^{2(−1)ʲN−1}`.
//! The general (no-preparation) variant partitions by the real parts of the
//! roots of `a(·,x)` itself.

use crate::calculus::{dlambda_dt, lambdas_at};
use crate::error::Error;
use crate::poly::{cubic_roots, Poly};
use crate::report::{CertReport, MeasuredConstant, Witness};
use crate::symbols::CoefficientField;
use crate::Result;
use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use serde::Serialize;

pub use crate::bezoutian::frame_at;

/// Root-classification tolerance (imaginary parts below `tol·scale` are real;
/// real roots must sit below `tol` for the hyperbolic case dichotomy).
pub const ROOT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RootCase {
    ConjugatePair,
    ThreeReal,
}

/// Normalized discriminant cubic of one slice and its roots.
#[derive(Debug, Clone)]
pub struct RootProfile {
    pub y: f64,
    /// leading factor of the normalization, at the reference point
    pub e2: f64,
    /// (a₁, a₂, a₃) of `t³ + a₁t² + a₂t + a₃`
    pub coeffs: (f64, f64, f64),
    /// ν₁ real (conjugate-pair case), ν₂ the `Im > 0` member of the pair
    pub nu: [Complex64; 3],
    pub case_tag: RootCase,
    /// `max(0, Re ν₂)`
    pub psi: f64,
    /// `a = e₁(t + α)` at the reference point
    pub alpha: f64,
    pub e1: f64,
    /// residual of the cubic-factor fit, relative to the slice scale
    pub fit_residual: f64,
}

fn conjugate_closed(sel: &[Complex64]) -> bool {
    sel.iter().all(|z| {
        z.im == 0.0
            || sel
                .iter()
                .any(|w| (w - z.conj()).norm() < 1e-9 * (1.0 + z.norm()))
    })
}

/// Pick the 3 roots of the slice polynomial nearest the reference point,
/// keeping conjugate pairs together.
fn select_cubic_factor(roots: &[Complex64], t_ref: f64) -> Result<[Complex64; 3]> {
    if roots.len() < 3 {
        return Err(Error::Analysis(format!(
            "discriminant slice has degree {} < 3: no triple-characteristic factor",
            roots.len()
        )));
    }
    let mut idx: Vec<usize> = (0..roots.len()).collect();
    idx.sort_by(|&i, &j| {
        (roots[i] - t_ref)
            .norm()
            .partial_cmp(&(roots[j] - t_ref).norm())
            .unwrap()
    });
    let sel: Vec<Complex64> = idx[..3].iter().map(|&i| roots[i]).collect();
    if !conjugate_closed(&sel) {
        // modulus ties split a pair: swap the offender for its conjugate
        for k in 3..roots.len() {
            let mut cand = sel.clone();
            cand[2] = roots[idx[k]];
            if conjugate_closed(&cand) {
                return Ok([cand[0], cand[1], cand[2]]);
            }
        }
        return Err(Error::Analysis(
            "cannot select a conjugate-closed cubic factor of Δ".into(),
        ));
    }
    Ok([sel[0], sel[1], sel[2]])
}

/// Monic cubic coefficients from three (conjugate-closed) roots.
fn monic_from_roots(nu: &[Complex64; 3]) -> (f64, f64, f64) {
    let s1 = nu[0] + nu[1] + nu[2];
    let s2 = nu[0] * nu[1] + nu[0] * nu[2] + nu[1] * nu[2];
    let s3 = nu[0] * nu[1] * nu[2];
    (-s1.re, s2.re, -s3.re)
}

/// Classify and label roots: conjugate-pair (ν₁ real, ν₂ the `Im > 0` member,
/// ties broken lexicographically on (Re, |Im|)) or three-real sorted ascending.
fn classify(mut nu: [Complex64; 3]) -> (RootCase, [Complex64; 3], f64) {
    let scale = 1.0 + nu.iter().map(|z| z.norm()).fold(0.0, f64::max);
    for z in nu.iter_mut() {
        if z.im.abs() <= ROOT_TOL * scale {
            z.im = 0.0;
        }
    }
    let n_complex = nu.iter().filter(|z| z.im != 0.0).count();
    if n_complex >= 2 {
        let mut complex: Vec<Complex64> = nu.iter().copied().filter(|z| z.im != 0.0).collect();
        complex.sort_by(|a, b| (b.re, b.im.abs()).partial_cmp(&(a.re, a.im.abs())).unwrap());
        let real = nu.iter().copied().find(|z| z.im == 0.0).unwrap_or_else(|| {
            // three nonreal cannot happen for a real cubic; take the
            // least-imaginary one as real
            let mut v = nu.to_vec();
            v.sort_by(|a, b| a.im.abs().partial_cmp(&b.im.abs()).unwrap());
            Complex64::new(v[0].re, 0.0)
        });
        let nu2 = Complex64::new(complex[0].re, complex[0].im.abs());
        let labeled = [real, nu2, nu2.conj()];
        (RootCase::ConjugatePair, labeled, nu2.re.max(0.0))
    } else {
        nu.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        for z in nu.iter_mut() {
            z.im = 0.0;
        }
        (RootCase::ThreeReal, nu, 0.0)
    }
}

fn fd_third_derivative(f: &dyn Fn(f64) -> f64, t: f64, h: f64) -> f64 {
    (-f(t - 2.0 * h) + 2.0 * f(t - h) - 2.0 * f(t + h) + f(t + 2.0 * h)) / (2.0 * h * h * h)
}

/// Extract the normalized discriminant cubic of the slice through `y`.
///
/// With an exact polynomial Δ: root extraction of the degree-3 factor nearest
/// the reference point, leading factor from polynomial division. Otherwise:
/// `e₂ = ∂ₜ³Δ/6` at the reference point and a least-squares cubic fit of
/// `Δ/e₂` along the slice.
pub fn extract_root_profile(field: &CoefficientField, y: f64) -> Result<RootProfile> {
    let t_ref = 0.0f64.clamp(field.domain.t_lo, field.domain.t_hi);
    let (coeffs, e2, residual) = match &field.poly.delta {
        Some(dp) => {
            let slice = dp.slice_at_y(y);
            if slice.degree() < 3 {
                return Err(Error::Analysis(format!(
                    "Δ(·, y={y}) has degree {} < 3: |dt³Δ| below tolerance",
                    slice.degree()
                )));
            }
            let roots = slice.roots();
            let sel = select_cubic_factor(&roots, t_ref)?;
            let (a1, a2, a3) = monic_from_roots(&sel);
            let monic = Poly::new(vec![a3, a2, a1, 1.0]);
            let (quot, rem) = slice.div_monic(&monic);
            let e2 = quot.eval(t_ref);
            let scale = slice
                .coeffs
                .iter()
                .fold(0.0f64, |m, c| m.max(c.abs()))
                .max(1e-300);
            let res = rem.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs())) / scale;
            if e2.abs() <= 1e-10 {
                return Err(Error::Analysis(format!(
                    "leading factor e₂ ≈ {e2:.3e} at y={y}: not an effectively hyperbolic triple"
                )));
            }
            ((a1, a2, a3), e2, res)
        }
        None => {
            let h = 5e-3 * (field.domain.t_hi - field.domain.t_lo).max(1e-3);
            let d3 = fd_third_derivative(&|t| field.delta(t, y), t_ref, h);
            let e2 = d3 / 6.0;
            if e2.abs() <= 1e-8 {
                return Err(Error::Analysis(format!(
                    "|dt³Δ| ≈ {:.3e} below tolerance at y={y}",
                    d3.abs()
                )));
            }
            // least-squares monic cubic fit of Δ/e₂ on the slice
            let m = 60;
            let (lo, hi) = (field.domain.t_lo, field.domain.t_hi);
            let mut ata = Matrix3::zeros();
            let mut atb = Vector3::zeros();
            let mut scale = 0.0f64;
            for k in 0..m {
                let t = lo + (hi - lo) * (k as f64 + 0.5) / m as f64;
                let rhs = field.delta(t, y) / e2 - t * t * t;
                let row = Vector3::new(t * t, t, 1.0);
                ata += row * row.transpose();
                atb += row * rhs;
                scale = scale.max((field.delta(t, y) / e2).abs());
            }
            let sol = ata
                .lu()
                .solve(&atb)
                .ok_or_else(|| Error::Analysis("singular cubic-fit system".into()))?;
            let (a1, a2, a3) = (sol[0], sol[1], sol[2]);
            let mut res = 0.0f64;
            for k in 0..m {
                let t = lo + (hi - lo) * (k as f64 + 0.5) / m as f64;
                let fit = ((t + a1) * t + a2) * t + a3;
                res = res.max((field.delta(t, y) / e2 - fit).abs());
            }
            ((a1, a2, a3), e2, res / scale.max(1e-300))
        }
    };
    if residual > 1e-6 {
        return Err(Error::Quality(format!(
            "cubic-factor residual {residual:.3e} exceeds 1e-6 at y={y}"
        )));
    }
    let nu_raw = cubic_roots(coeffs.0, coeffs.1, coeffs.2);
    // backward-error check on the normalized cubic
    let scale = 1.0 + nu_raw.iter().map(|z| z.norm()).fold(0.0, f64::max);
    for z in &nu_raw {
        let v = ((*z + coeffs.0) * *z + coeffs.1) * *z + coeffs.2;
        if v.norm() > 1e-8 * scale.powi(3) {
            return Err(Error::Numerical(format!(
                "root backward error {:.3e} at y={y}",
                v.norm()
            )));
        }
    }
    let (case_tag, nu, psi) = classify(nu_raw);
    let e1 = field.da_dt(t_ref, y);
    let alpha = if e1.abs() > 1e-12 {
        field.a(t_ref, y) / e1
    } else {
        f64::INFINITY
    };
    Ok(RootProfile {
        y,
        e2,
        coeffs,
        nu,
        case_tag,
        psi,
        alpha,
        e1,
        fit_residual: residual,
    })
}

/// Comparability of the normalized-cubic roots with α: true iff some root has
/// `|ν_j| ≥ ε·α`; returns the witness index.
pub fn certify_alpha_nu_comparison(profile: &RootProfile, eps: f64) -> (bool, usize) {
    let mut best = 0;
    for (j, z) in profile.nu.iter().enumerate() {
        if z.norm() > profile.nu[best].norm() {
            best = j;
        }
    }
    (profile.nu[best].norm() >= eps * profile.alpha, best)
}

// ---------------------------------------------------------------------------
// weight partitions
// ---------------------------------------------------------------------------

/// Scalar weight on one subinterval. Slice-local data (ψ, σ, their
/// x-derivatives) is embedded so evaluation needs no external lookup; the
/// `Alpha` weight reads `√a` off the field.
#[derive(Debug, Clone, Copy, Serialize)]
pub enum WeightKind {
    /// φ = t
    T,
    /// φ = ψ − t
    PsiMinusT { psi: f64, dpsi_dx: f64 },
    /// φ = t − ψ
    TMinusPsi { psi: f64, dpsi_dx: f64 },
    /// φ = t − σ_j(x)
    TMinusSigma { sigma: f64, dsigma_dx: f64 },
    /// φ = σ_j(x) − t
    SigmaMinusT { sigma: f64, dsigma_dx: f64 },
    /// φ = t − s_m(x)
    TMinusSm { sm: f64, dsm_dx: f64 },
    /// φ = α = √a (positive branch; only valid where a > 0, ∂ₜa > 0)
    Alpha,
}

/// One subinterval `[t_lo, t_hi]` with its weight and the sign of the energy
/// exponent: `g = φ^{2·exp_sign·N − 1}`. Weights vanishing at the left end
/// carry `exp_sign = −1` (vanishing data); weights vanishing at the right end
/// carry `+1` (boundary term at the left).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Piece {
    pub t_lo: f64,
    pub t_hi: f64,
    pub kind: WeightKind,
    pub exp_sign: i32,
}

impl Piece {
    pub fn phi(&self, field: &CoefficientField, t: f64, x: f64) -> f64 {
        match self.kind {
            WeightKind::T => t,
            WeightKind::PsiMinusT { psi, .. } => psi - t,
            WeightKind::TMinusPsi { psi, .. } => t - psi,
            WeightKind::TMinusSigma { sigma, .. } => t - sigma,
            WeightKind::SigmaMinusT { sigma, .. } => sigma - t,
            WeightKind::TMinusSm { sm, .. } => t - sm,
            WeightKind::Alpha => field.a(t, x).max(0.0).sqrt(),
        }
    }

    pub fn dphi_dt(&self, field: &CoefficientField, t: f64, x: f64) -> f64 {
        match self.kind {
            WeightKind::T
            | WeightKind::TMinusPsi { .. }
            | WeightKind::TMinusSigma { .. }
            | WeightKind::TMinusSm { .. } => 1.0,
            WeightKind::PsiMinusT { .. } | WeightKind::SigmaMinusT { .. } => -1.0,
            WeightKind::Alpha => {
                let a = field.a(t, x);
                if a <= 0.0 {
                    0.0
                } else {
                    field.da_dt(t, x) / (2.0 * a.sqrt())
                }
            }
        }
    }

    pub fn dphi_dx(&self, field: &CoefficientField, t: f64, x: f64) -> f64 {
        match self.kind {
            WeightKind::T => 0.0,
            WeightKind::PsiMinusT { dpsi_dx, .. } => dpsi_dx,
            WeightKind::TMinusPsi { dpsi_dx, .. } => -dpsi_dx,
            WeightKind::TMinusSigma { dsigma_dx, .. } => -dsigma_dx,
            WeightKind::SigmaMinusT { dsigma_dx, .. } => dsigma_dx,
            WeightKind::TMinusSm { dsm_dx, .. } => -dsm_dx,
            WeightKind::Alpha => {
                let a = field.a(t, x);
                if a <= 0.0 {
                    0.0
                } else {
                    field.da_dy(t, x) / (2.0 * a.sqrt())
                }
            }
        }
    }
}

/// Breakpoints and weights along one slice.
#[derive(Debug, Clone, Serialize)]
pub struct SlicePartition {
    pub y: f64,
    pub psi: f64,
    pub breakpoints: Vec<f64>,
    pub pieces: Vec<Piece>,
}

impl SlicePartition {
    /// The piece containing `t` (boundaries resolve to the later piece).
    pub fn piece_at(&self, t: f64) -> Option<&Piece> {
        self.pieces
            .iter()
            .rev()
            .find(|p| t >= p.t_lo - 1e-14 && t <= p.t_hi + 1e-14)
    }

    /// Union of pieces has no gaps.
    pub fn covers(&self) -> bool {
        if self.pieces.is_empty() {
            return false;
        }
        for w in self.pieces.windows(2) {
            if (w[0].t_hi - w[1].t_lo).abs() > 1e-12 {
                return false;
            }
        }
        true
    }
}

/// Default right endpoint: half way from ψ to the domain's t_hi, capped at 0.5.
pub fn default_delta(profile: &RootProfile, t_hi: f64) -> f64 {
    (profile.psi + 0.5 * (t_hi - profile.psi)).min(0.5)
}

/// Build the triple-case partition: breakpoints `(0, ψ/2, ψ, δ)` with weights
/// `t`, `ψ−t`, `t−ψ`; if `ψ ≤ 0` the partition collapses to one piece with
/// `φ = t`. `dpsi_dx` is zero for interval geometry and the tracked slope of
/// the ψ curve for cone slices.
pub fn build_partition(
    profile: &RootProfile,
    delta_end: f64,
    dpsi_dx: f64,
) -> Result<SlicePartition> {
    let psi = profile.psi;
    if psi <= 1e-14 {
        return Ok(SlicePartition {
            y: profile.y,
            psi: 0.0,
            breakpoints: vec![0.0, delta_end],
            pieces: vec![Piece {
                t_lo: 0.0,
                t_hi: delta_end,
                kind: WeightKind::T,
                exp_sign: -1,
            }],
        });
    }
    if delta_end <= psi {
        return Err(Error::Input(format!(
            "δ = {delta_end} must exceed ψ = {psi}"
        )));
    }
    Ok(SlicePartition {
        y: profile.y,
        psi,
        breakpoints: vec![0.0, psi / 2.0, psi, delta_end],
        pieces: vec![
            Piece {
                t_lo: 0.0,
                t_hi: psi / 2.0,
                kind: WeightKind::T,
                exp_sign: -1,
            },
            Piece {
                t_lo: psi / 2.0,
                t_hi: psi,
                kind: WeightKind::PsiMinusT { psi, dpsi_dx },
                exp_sign: 1,
            },
            Piece {
                t_lo: psi,
                t_hi: delta_end,
                kind: WeightKind::TMinusPsi { psi, dpsi_dx },
                exp_sign: -1,
            },
        ],
    })
}

/// Double-characteristic profile: the quadratic normalization of `a` itself.
#[derive(Debug, Clone)]
pub struct DoubleProfile {
    pub y: f64,
    pub nu: [Complex64; 2],
    pub psi: f64,
}

/// Extract the quadratic root profile of `a` for the double-root reduction
/// `τ² − a·ξ²`.
pub fn extract_double_profile(field: &CoefficientField, y: f64) -> Result<DoubleProfile> {
    let pa = field
        .poly
        .a
        .as_ref()
        .ok_or_else(|| Error::Analysis("double profile needs a polynomial `a`".into()))?;
    let slice = pa.slice_at_y(y);
    if slice.degree() == 1 {
        // ∂ₜa ≠ 0: non-critical double point, no preparation needed
        let z = Complex64::new(-slice.coeffs[0] / slice.coeffs[1], 0.0);
        return Ok(DoubleProfile {
            y,
            nu: [z, z],
            psi: 0.0,
        });
    }
    if slice.degree() < 2 {
        return Err(Error::Analysis(format!(
            "a(·, y={y}) has degree {} < 2: no double-characteristic factor",
            slice.degree()
        )));
    }
    let roots = slice.roots();
    let mut idx: Vec<usize> = (0..roots.len()).collect();
    idx.sort_by(|&i, &j| roots[i].norm().partial_cmp(&roots[j].norm()).unwrap());
    let mut nu = [roots[idx[0]], roots[idx[1]]];
    let scale = 1.0 + nu[0].norm().max(nu[1].norm());
    for z in nu.iter_mut() {
        if z.im.abs() <= ROOT_TOL * scale {
            z.im = 0.0;
        }
    }
    let psi = if nu[0].im != 0.0 && (nu[0].re - nu[1].re).abs() <= ROOT_TOL * scale {
        nu[0].re.max(0.0)
    } else {
        0.0
    };
    Ok(DoubleProfile { y, nu, psi })
}

/// Partition for the double case: `ψ > 0` (equal real parts of a conjugate
/// pair) gives `φ₁ = ψ − t` on `[0, ψ]` and `φ₂ = t − ψ` on `[ψ, δ]`;
/// otherwise a single piece with `φ = t`.
pub fn build_double_partition(profile: &DoubleProfile, delta_end: f64) -> Result<SlicePartition> {
    let psi = profile.psi;
    if psi <= 1e-14 {
        return Ok(SlicePartition {
            y: profile.y,
            psi: 0.0,
            breakpoints: vec![0.0, delta_end],
            pieces: vec![Piece {
                t_lo: 0.0,
                t_hi: delta_end,
                kind: WeightKind::T,
                exp_sign: -1,
            }],
        });
    }
    if delta_end <= psi {
        return Err(Error::Input(format!(
            "δ = {delta_end} must exceed ψ = {psi}"
        )));
    }
    Ok(SlicePartition {
        y: profile.y,
        psi,
        breakpoints: vec![0.0, psi, delta_end],
        pieces: vec![
            Piece {
                t_lo: 0.0,
                t_hi: psi,
                kind: WeightKind::PsiMinusT { psi, dpsi_dx: 0.0 },
                exp_sign: 1,
            },
            Piece {
                t_lo: psi,
                t_hi: delta_end,
                kind: WeightKind::TMinusPsi { psi, dpsi_dx: 0.0 },
                exp_sign: -1,
            },
        ],
    })
}

/// Per-column triple-case partitions across the cone footprint, with the ψ(x)
/// curve tracked and its slope estimated from neighboring columns.
pub fn cone_partitions(
    field: &CoefficientField,
    x_nodes: &[f64],
    height: f64,
) -> Result<Vec<SlicePartition>> {
    let profiles: Vec<RootProfile> = x_nodes
        .iter()
        .map(|&x| extract_root_profile(field, x))
        .collect::<Result<_>>()?;
    let n = profiles.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let dpsi = if n < 2 {
            0.0
        } else if i == 0 {
            (profiles[1].psi - profiles[0].psi) / (x_nodes[1] - x_nodes[0])
        } else if i == n - 1 {
            (profiles[n - 1].psi - profiles[n - 2].psi) / (x_nodes[n - 1] - x_nodes[n - 2])
        } else {
            (profiles[i + 1].psi - profiles[i - 1].psi) / (x_nodes[i + 1] - x_nodes[i - 1])
        };
        if profiles[i].psi >= height {
            return Err(Error::Input(format!(
                "cone height {height} does not clear ψ({}) = {}",
                x_nodes[i], profiles[i].psi
            )));
        }
        out.push(build_partition(&profiles[i], height, dpsi)?);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// key-proposition certification
// ---------------------------------------------------------------------------

/// Measure the minimal constants of the three weight inequalities
/// `φ_j²·a ≤ C₁Δ`, `|φ_j||∂ₜΔ| ≤ C₂Δ`, `|φ_j| ≤ C₃a` per subinterval, plus
/// the eigenvalue corollary `φ² ≤ C₄λ₁`, `φ|∂ₜλ₁| ≤ C₅λ₁`.
pub fn certify_key_proposition(
    field: &CoefficientField,
    slices: &[SlicePartition],
    nt: usize,
) -> Result<CertReport> {
    let names = [
        "C1: phi^2 a / Delta",
        "C2: |phi||dt Delta| / Delta",
        "C3: |phi| / a",
        "C4: phi^2 / l1",
        "C5: phi |dt l1| / l1",
    ];
    // relative floor against cancellation noise in expanded-polynomial Δ
    let delta_sup = slices
        .iter()
        .flat_map(|s| {
            s.pieces.iter().flat_map(move |p| {
                (0..nt).map(move |k| {
                    let t = p.t_lo + (p.t_hi - p.t_lo) * (k as f64 + 0.5) / nt as f64;
                    field.delta(t, s.y).abs()
                })
            })
        })
        .fold(0.0f64, f64::max);
    let floor = 1e-12 * delta_sup + 1e-300;
    let measure = |resolution: usize| -> ([f64; 5], Vec<Witness>) {
        let mut sup = [0.0f64; 5];
        let mut witnesses = Vec::new();
        for slice in slices {
            for piece in &slice.pieces {
                for k in 0..resolution {
                    let t = piece.t_lo
                        + (piece.t_hi - piece.t_lo) * (k as f64 + 0.5) / resolution as f64;
                    if t <= 0.0 {
                        continue;
                    }
                    let a = field.a(t, slice.y);
                    let delta = field.delta(t, slice.y);
                    let phi = piece.phi(field, t, slice.y);
                    if delta <= floor {
                        if phi.abs() > 1e-6 {
                            witnesses.push(Witness {
                                t,
                                y: slice.y,
                                what: format!("Δ = {delta:.3e} with φ = {phi:.3e}"),
                            });
                        }
                        continue;
                    }
                    sup[0] = sup[0].max(phi * phi * a / delta);
                    sup[1] = sup[1].max(phi.abs() * field.ddelta_dt(t, slice.y).abs() / delta);
                    if a > 0.0 {
                        sup[2] = sup[2].max(phi.abs() / a);
                    }
                    let l1 = lambdas_at(field, t, slice.y)[0];
                    if l1 > 1e-14 {
                        sup[3] = sup[3].max(phi * phi / l1);
                        sup[4] =
                            sup[4].max(phi.abs() * dlambda_dt(field, t, slice.y)[0].abs() / l1);
                    }
                }
            }
        }
        (sup, witnesses)
    };
    let (coarse, witnesses) = measure(nt);
    let (fine, _) = measure(2 * nt);
    let mut constants = Vec::new();
    for (i, name) in names.iter().enumerate() {
        constants.push(MeasuredConstant::from_sups(
            name,
            coarse[i],
            fine[i],
            format!("{} slices x {} pts/piece", slices.len(), nt),
        ));
    }
    let mut report = CertReport::passing("key_weight_proposition", constants);
    if !witnesses.is_empty() {
        report.pass = false;
        report.witnesses = witnesses;
        report.note = Some("Δ vanishes where φ does not".into());
    }
    Ok(report)
}

/// The general-triple admissibility conditions: minimal `C` with `a³ ≤ CΔ`
/// and `|∂ₜb| ≤ C√a|∂ₜa|` over the (two-sided) grid.
pub fn certify_general_triple_conditions(
    field: &CoefficientField,
    grid: &crate::grid::GridSpec,
) -> CertReport {
    // relative floor on Δ: expanded-polynomial evaluation loses all digits
    // near the zero set, and the ratio is continuous anyway
    let delta_sup = grid
        .points()
        .iter()
        .map(|&(t, y)| field.delta(t, y).abs())
        .fold(0.0f64, f64::max);
    let floor = 1e-8 * delta_sup + 1e-300;
    let measure = |g: &crate::grid::GridSpec| -> [f64; 2] {
        let mut sup = [0.0f64; 2];
        for (t, y) in g.points() {
            let a = field.a(t, y);
            let delta = field.delta(t, y);
            if delta > floor {
                sup[0] = sup[0].max(a * a * a / delta);
            }
            let den = a.max(0.0).sqrt() * field.da_dt(t, y).abs();
            if den > 1e-14 && !field.b_kink(t, y, 1e-6) {
                sup[1] = sup[1].max(field.db_dt(t, y).abs() / den);
            }
        }
        sup
    };
    let coarse = measure(grid);
    let fine = measure(&grid.refined());
    CertReport::passing(
        "general_triple_conditions",
        vec![
            MeasuredConstant::from_sups("C: a^3 / Delta", coarse[0], fine[0], grid.describe()),
            MeasuredConstant::from_sups(
                "C: |dt b| / (sqrt(a)|dt a|)",
                coarse[1],
                fine[1],
                grid.describe(),
            ),
        ],
    )
}

// ---------------------------------------------------------------------------
// general-triple (no-preparation) partition from the roots of a(·, x)
// ---------------------------------------------------------------------------

/// Partition data of one x-column for the general-triple weights.
#[derive(Debug, Clone, Serialize)]
pub struct AlphaColumn {
    pub x: f64,
    /// distinct roots of a(·, x) = 0 (complex pairs kept once with Im > 0)
    #[serde(skip)]
    pub roots: Vec<Complex64>,
    /// deduped sorted real parts σ₁ ≤ … ≤ σ_m
    pub sigma: Vec<f64>,
    /// `t* = sqrt(Σ |t_j|²)` over distinct roots
    pub t_star: f64,
    /// `s₀ = −3t*, s_j` midpoints, `s_m = 3t*`
    pub s: Vec<f64>,
    pub pieces: Vec<Piece>,
    /// α > 0 and ∂ₜα > 0 verified on the trailing region (n = 0 case)
    pub alpha_ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AlphaPartition {
    /// cone slope δ̄; the family of regions shrinks with it
    pub bar_delta: f64,
    /// cone height T
    pub height: f64,
    /// `n`: multiplicity of the x factor in α (a = α², so half the
    /// x-multiplicity of a)
    pub n_factor: usize,
    pub columns: Vec<AlphaColumn>,
}

fn distinct_roots(mut roots: Vec<Complex64>) -> Vec<Complex64> {
    let scale = 1.0 + roots.iter().map(|z| z.norm()).fold(0.0, f64::max);
    for z in roots.iter_mut() {
        if z.im.abs() <= 1e-7 * scale {
            z.im = 0.0;
        }
    }
    let mut out: Vec<Complex64> = Vec::new();
    for z in roots {
        if z.im < 0.0 {
            continue; // keep one member of each conjugate pair
        }
        if !out.iter().any(|w| (w - z).norm() <= 1e-6 * scale) {
            out.push(z);
        }
    }
    out.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    out
}

/// `t*` sums `|t_j|²` over all distinct roots, counting both members of a
/// conjugate pair.
fn t_star_of(roots: &[Complex64]) -> f64 {
    roots
        .iter()
        .map(|z| {
            if z.im > 0.0 {
                2.0 * z.norm_sqr()
            } else {
                z.norm_sqr()
            }
        })
        .sum::<f64>()
        .sqrt()
}

/// Build the general-triple partition: per x-column, the subregions
/// `s_{j-1} ≤ t ≤ s_j` split at `σ_j` with weights `±(t − σ_j)`, and the
/// trailing region `t ≥ s_m` with weight `t − s_m` (n ≥ 1) or `α` (n = 0).
pub fn build_alpha_partition(
    field: &CoefficientField,
    bar_delta: f64,
    height: f64,
    nx: usize,
) -> Result<AlphaPartition> {
    let pa = field
        .poly
        .a
        .as_ref()
        .ok_or_else(|| Error::Analysis("alpha partition needs a polynomial `a`".into()))?;
    let n_factor = pa.y_multiplicity() / 2;
    let x_max = bar_delta * height;
    let mut columns: Vec<AlphaColumn> = Vec::with_capacity(nx);
    let mut prev_sigma: Option<(f64, Vec<f64>)> = None;
    for i in 0..nx {
        let x = -x_max + 2.0 * x_max * i as f64 / (nx.max(2) - 1) as f64;
        let slice = pa.slice_at_y(x);
        let roots = if slice.degree() == 0 {
            vec![]
        } else {
            slice.roots()
        };
        let distinct = distinct_roots(roots);
        let mut sigma: Vec<f64> = Vec::new();
        for z in &distinct {
            if !sigma
                .iter()
                .any(|s| (s - z.re).abs() <= 1e-9 * (1.0 + z.re.abs()))
            {
                sigma.push(z.re);
            }
        }
        sigma.sort_by(|a, b| a.partial_cmp(b).unwrap());
        // ordering continuity across slices (root tracking)
        if let Some((px, ps)) = &prev_sigma {
            if ps.len() == sigma.len() {
                let dx = (x - px).abs().max(1e-12);
                for (s_new, s_old) in sigma.iter().zip(ps.iter()) {
                    if (s_new - s_old).abs() / dx > 1e3 {
                        return Err(Error::Analysis(format!(
                            "σ-curve jump {:.3e} between x = {px} and x = {x}",
                            (s_new - s_old).abs()
                        )));
                    }
                }
            }
        }
        prev_sigma = Some((x, sigma.clone()));
        let t_star = t_star_of(&distinct);
        let m = sigma.len();
        let mut s = Vec::with_capacity(m + 1);
        s.push(-3.0 * t_star);
        for j in 0..m.saturating_sub(1) {
            s.push(0.5 * (sigma[j] + sigma[j + 1]));
        }
        s.push(3.0 * t_star);
        columns.push(AlphaColumn {
            x,
            roots: distinct,
            sigma,
            t_star,
            s,
            pieces: Vec::new(),
            alpha_ok: true,
        });
    }
    // σ and s_m slopes from neighboring columns, one-sided across the x = 0 kink
    let n = columns.len();
    for i in 0..n {
        let slope_of = |get: &dyn Fn(&AlphaColumn) -> f64| -> f64 {
            let same_side = |j: usize| -> bool {
                columns[j].x == 0.0 || columns[j].x.signum() == columns[i].x.signum()
            };
            let mut lo = i;
            let mut hi = i;
            if i > 0 && same_side(i - 1) {
                lo = i - 1;
            }
            if i + 1 < n && same_side(i + 1) {
                hi = i + 1;
            }
            if lo == hi {
                return 0.0;
            }
            (get(&columns[hi]) - get(&columns[lo])) / (columns[hi].x - columns[lo].x)
        };
        let m = columns[i].sigma.len();
        let mut pieces = Vec::new();
        for j in 0..m {
            let sigma = columns[i].sigma[j];
            let dsig = slope_of(&|c: &AlphaColumn| c.sigma.get(j).copied().unwrap_or(sigma));
            let (lo, hi) = (columns[i].s[j], columns[i].s[j + 1]);
            if sigma - lo > 1e-14 {
                pieces.push(Piece {
                    t_lo: lo,
                    t_hi: sigma,
                    kind: WeightKind::SigmaMinusT {
                        sigma,
                        dsigma_dx: dsig,
                    },
                    exp_sign: 1,
                });
            }
            if hi - sigma > 1e-14 {
                pieces.push(Piece {
                    t_lo: sigma,
                    t_hi: hi,
                    kind: WeightKind::TMinusSigma {
                        sigma,
                        dsigma_dx: dsig,
                    },
                    exp_sign: -1,
                });
            }
        }
        let sm = *columns[i].s.last().unwrap();
        if height > sm {
            if n_factor >= 1 {
                let dsm = slope_of(&|c: &AlphaColumn| *c.s.last().unwrap());
                pieces.push(Piece {
                    t_lo: sm,
                    t_hi: height,
                    kind: WeightKind::TMinusSm { sm, dsm_dx: dsm },
                    exp_sign: -1,
                });
            } else {
                // α-branch: verify α > 0, ∂ₜα > 0 on the region
                let mut ok = true;
                for k in 0..16 {
                    let t = sm + (height - sm) * (k as f64 + 0.5) / 16.0;
                    let a = field.a(t, columns[i].x);
                    if a <= 0.0 || field.da_dt(t, columns[i].x) <= 0.0 {
                        ok = false;
                    }
                }
                columns[i].alpha_ok = ok;
                pieces.push(Piece {
                    t_lo: sm,
                    t_hi: height,
                    kind: WeightKind::Alpha,
                    exp_sign: -1,
                });
            }
        }
        columns[i].pieces = pieces;
    }
    Ok(AlphaPartition {
        bar_delta,
        height,
        n_factor,
        columns,
    })
}

/// Verdict data for the general weight conditions `φ|∂ₜa| ≤ C a|∂ₜφ|`,
/// `φ ≤ C|∂ₜφ|` plus the shrinking-region decay of `√a|∂ₓφ|/|∂ₜφ|`.
#[derive(Debug, Clone, Serialize)]
pub struct GeneralWeightReport {
    pub c_derivative: MeasuredConstant,
    pub c_size: MeasuredConstant,
    /// sup of `√a|∂ₓφ|/∂ₜφ` on regions shrunk by 1, 1/2, 1/4
    pub shrink_sups: [f64; 3],
    pub shrink_decreasing: bool,
    pub pass: bool,
}

/// Certify the general weight conditions over the cone-clipped subregions of
/// an alpha partition.
pub fn certify_general_weight_conditions(
    field: &CoefficientField,
    partition: &AlphaPartition,
    nt: usize,
) -> GeneralWeightReport {
    let sup_on = |shrink: f64, nt: usize| -> ([f64; 2], f64) {
        let mut sup = [0.0f64; 2];
        let mut sup_x = 0.0f64;
        let height = partition.height * shrink;
        for col in &partition.columns {
            if col.x.abs() > partition.bar_delta * shrink * height {
                continue;
            }
            for piece in &col.pieces {
                let lo = piece.t_lo.max(-height);
                let hi = piece.t_hi.min(height);
                if hi <= lo {
                    continue;
                }
                for k in 0..nt {
                    let t = lo + (hi - lo) * (k as f64 + 0.5) / nt as f64;
                    if col.x.abs() > partition.bar_delta * shrink * (height - t) {
                        continue;
                    }
                    let a = field.a(t, col.x);
                    let phi = piece.phi(field, t, col.x);
                    let dt = piece.dphi_dt(field, t, col.x).abs();
                    let dx = piece.dphi_dx(field, t, col.x).abs();
                    if dt < 1e-14 {
                        continue;
                    }
                    if a > 1e-12 {
                        sup[0] = sup[0].max(phi.abs() * field.da_dt(t, col.x).abs() / (a * dt));
                    }
                    sup[1] = sup[1].max(phi.abs() / dt);
                    sup_x = sup_x.max(a.max(0.0).sqrt() * dx / dt);
                }
            }
        }
        (sup, sup_x)
    };
    let (coarse, s1) = sup_on(1.0, nt);
    let (fine, _) = sup_on(1.0, 2 * nt);
    let (_, s2) = sup_on(0.5, nt);
    let (_, s3) = sup_on(0.25, nt);
    let shrink_decreasing = s2 <= 1.1 * s1 && s3 <= 1.1 * s2 && s3 <= 0.9 * s1.max(1e-300);
    let c_derivative = MeasuredConstant::from_sups(
        "C: phi|dt a| / (a dt phi)",
        coarse[0],
        fine[0],
        format!("{} columns", partition.columns.len()),
    );
    let c_size = MeasuredConstant::from_sups(
        "C: phi / dt phi",
        coarse[1],
        fine[1],
        format!("{} columns", partition.columns.len()),
    );
    let pass = c_derivative.stable()
        && c_size.stable()
        && shrink_decreasing
        && partition.columns.iter().all(|c| c.alpha_ok);
    GeneralWeightReport {
        c_derivative,
        c_size,
        shrink_sups: [s1, s2, s3],
        shrink_decreasing,
        pass,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Axis, GridSpec};
    use crate::poly::Poly2;
    use crate::symbols::{
        default_domain, field_from_fns, make_family, theta_family, FamilySpec, RootProfileSpec,
    };
    use std::sync::Arc;

    fn tricomi() -> CoefficientField {
        make_family(&FamilySpec::Tricomi { l: 1, c: 0.0 }).unwrap()
    }

    fn prescribed_complex() -> CoefficientField {
        make_family(&FamilySpec::PrescribedDelta {
            a: Poly2::t().add(&Poly2::constant(0.1)),
            profile: RootProfileSpec::ConjugatePair {
                nu1: Poly::constant(-0.05),
                re2: Poly::constant(0.1),
                im2: Poly::constant(0.05),
            },
            kappa: None,
        })
        .unwrap()
    }

    #[test]
    fn profile_tricomi() {
        let p = extract_root_profile(&tricomi(), 0.0).unwrap();
        assert!((p.e2 - 4.0).abs() < 1e-9);
        for z in &p.nu {
            assert!(z.norm() < 1e-4, "near-triple roots ~ 0, got {z}");
        }
        assert_eq!(p.psi, 0.0);
        assert!((p.alpha - 0.0).abs() < 1e-10);
        assert!((p.e1 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn profile_prescribed_round_trip() {
        let p = extract_root_profile(&prescribed_complex(), 0.0).unwrap();
        assert_eq!(p.case_tag, RootCase::ConjugatePair);
        assert!((p.nu[0].re + 0.05).abs() < 1e-6);
        assert!((p.nu[1].re - 0.1).abs() < 1e-6);
        assert!((p.nu[1].im - 0.05).abs() < 1e-6);
        assert!((p.psi - 0.1).abs() < 1e-6);
        assert!((p.alpha - 0.1).abs() < 1e-9);
    }

    #[test]
    fn profile_three_real() {
        let f = make_family(&FamilySpec::PrescribedDelta {
            a: Poly2::t().add(&Poly2::constant(0.4)),
            profile: RootProfileSpec::ThreeReal {
                nu: [
                    Poly::constant(-0.1),
                    Poly::constant(-0.2),
                    Poly::constant(-0.3),
                ],
            },
            kappa: None,
        })
        .unwrap();
        let p = extract_root_profile(&f, 0.0).unwrap();
        assert_eq!(p.case_tag, RootCase::ThreeReal);
        assert_eq!(p.psi, 0.0);
        let mut res: Vec<f64> = p.nu.iter().map(|z| z.re).collect();
        res.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (r, e) in res.iter().zip([-0.3, -0.2, -0.1]) {
            assert!((r - e).abs() < 1e-7, "{r} vs {e}");
        }
    }

    #[test]
    fn profile_fit_path_matches_poly_path() {
        // the same field through opaque closures: exercises e₂ = ∂ₜ³Δ/6 + LSQ fit
        let f = field_from_fns(
            "tricomi-fn",
            Arc::new(|t, _| t),
            Arc::new(|_, _| 0.0),
            default_domain(),
        );
        let p = extract_root_profile(&f, 0.0).unwrap();
        assert!((p.e2 - 4.0).abs() < 1e-3, "e2 = {}", p.e2);
        assert_eq!(p.psi, 0.0);
        for z in &p.nu {
            assert!(z.norm() < 1e-2);
        }
    }

    #[test]
    fn profile_errors_on_strictly_hyperbolic() {
        let f = make_family(&FamilySpec::Expr {
            a: Poly2::constant(1.0),
            b: Poly2::zero(),
        })
        .unwrap();
        assert!(extract_root_profile(&f, 0.0).is_err());
    }

    #[test]
    fn profile_errors_on_non_effective_triple() {
        let f = make_family(&FamilySpec::Tricomi { l: 2, c: 0.0 }).unwrap();
        assert!(matches!(
            extract_root_profile(&f, 0.0),
            Err(Error::Analysis(_))
        ));
    }

    #[test]
    fn alpha_nu_comparison_cases() {
        let mut p = extract_root_profile(&prescribed_complex(), 0.0).unwrap();
        // α = 0.1, |ν₂| ≈ 0.112: comparable at ε = 0.1
        let (ok, _) = certify_alpha_nu_comparison(&p, 0.1);
        assert!(ok);
        // α = 0: any ε works
        p.alpha = 0.0;
        assert!(certify_alpha_nu_comparison(&p, 10.0).0);
        // huge α with tiny roots: violated
        p.alpha = 1.0;
        p.nu = [Complex64::new(1e-6, 0.0); 3];
        assert!(!certify_alpha_nu_comparison(&p, 0.1).0);
    }

    #[test]
    fn partition_collapses_at_psi_zero() {
        let p = extract_root_profile(&tricomi(), 0.0).unwrap();
        let part = build_partition(&p, 0.25, 0.0).unwrap();
        assert_eq!(part.pieces.len(), 1);
        assert!(matches!(part.pieces[0].kind, WeightKind::T));
        assert!(part.covers());
    }

    #[test]
    fn partition_breakpoints() {
        let p = extract_root_profile(&prescribed_complex(), 0.0).unwrap();
        let part = build_partition(&p, 0.5, 0.0).unwrap();
        let expect = [0.0, 0.05, 0.1, 0.5];
        for (b, e) in part.breakpoints.iter().zip(expect.iter()) {
            assert!((b - e).abs() < 1e-6, "{b} vs {e}");
        }
        assert_eq!(part.pieces.len(), 3);
        assert_eq!(part.pieces[0].exp_sign, -1);
        assert_eq!(part.pieces[1].exp_sign, 1);
        assert_eq!(part.pieces[2].exp_sign, -1);
        assert!(part.covers());
        // δ ≤ ψ is rejected
        assert!(build_partition(&p, 0.05, 0.0).is_err());
    }

    #[test]
    fn double_partition_variants() {
        // a = t²: ν = (0, 0) → single piece φ = t
        let f2 = make_family(&FamilySpec::Expr {
            a: Poly2::t().pow(2),
            b: Poly2::zero(),
        })
        .unwrap();
        let p = extract_double_profile(&f2, 0.0).unwrap();
        assert_eq!(p.psi, 0.0);
        let part = build_double_partition(&p, 0.3).unwrap();
        assert_eq!(part.pieces.len(), 1);

        // a = (t−0.1)² + 0.0025: conjugate pair, ψ = 0.1 > 0 → two pieces
        let shifted = Poly2::t()
            .sub(&Poly2::constant(0.1))
            .pow(2)
            .add(&Poly2::constant(0.0025));
        let f = make_family(&FamilySpec::Expr {
            a: shifted,
            b: Poly2::zero(),
        })
        .unwrap();
        let p = extract_double_profile(&f, 0.0).unwrap();
        assert!((p.psi - 0.1).abs() < 1e-9);
        let part = build_double_partition(&p, 0.3).unwrap();
        assert_eq!(part.pieces.len(), 2);
        assert!(matches!(part.pieces[0].kind, WeightKind::PsiMinusT { .. }));
        assert!(matches!(part.pieces[1].kind, WeightKind::TMinusPsi { .. }));
        assert_eq!(part.pieces[0].exp_sign, 1);
    }

    #[test]
    fn key_proposition_tricomi_closed_form() {
        // φ = t on [0, δ]: φ²a/Δ = 1/4, |φ||∂ₜΔ|/Δ = 3, |φ|/a = 1
        let f = tricomi();
        let p = extract_root_profile(&f, 0.0).unwrap();
        let part = build_partition(&p, 0.25, 0.0).unwrap();
        let rep = certify_key_proposition(&f, &[part], 400).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!((rep.constants[0].value - 0.25).abs() < 0.25 * 0.05);
        assert!((rep.constants[1].value - 3.0).abs() < 3.0 * 0.05);
        assert!((rep.constants[2].value - 1.0).abs() < 1.0 * 0.05);
    }

    #[test]
    fn key_proposition_complex_family_stable() {
        let f = prescribed_complex();
        let p = extract_root_profile(&f, 0.0).unwrap();
        let part = build_partition(&p, default_delta(&p, f.domain.t_hi), 0.0).unwrap();
        let rep = certify_key_proposition(&f, &[part], 300).unwrap();
        assert!(rep.pass, "{rep:?}");
        for c in &rep.constants {
            assert!(c.value.is_finite() && c.stable(), "{c:?}");
        }
    }

    #[test]
    fn general_conditions_closed_forms() {
        // b = 0: a³/Δ = 1/4 exactly
        let f = make_family(&FamilySpec::GeneralTriple {
            alpha: Poly2::t().sub(&Poly2::y()),
        })
        .unwrap();
        let g = GridSpec {
            t: Axis::closed(-0.3, 0.3, 101),
            y: Axis::closed(-0.3, 0.3, 41),
        };
        let rep = certify_general_triple_conditions(&f, &g);
        assert!(rep.pass);
        assert!((rep.constants[0].value - 0.25).abs() < 1e-6);
        assert_eq!(rep.constants[1].value, 0.0);

        // θ = 0.5: Δ = 4a³(1 − θ²) ⇒ C = 1/(4·0.75) = 1/3
        let f = theta_family(0.5).unwrap();
        let g = GridSpec {
            t: Axis::half_open(0.0, 0.4, 301),
            y: Axis::closed(0.0, 0.0, 1),
        };
        let rep = certify_general_triple_conditions(&f, &g);
        assert!(rep.pass, "{rep:?}");
        assert!(
            (rep.constants[0].value - 1.0 / 3.0).abs() < 1e-6,
            "{}",
            rep.constants[0].value
        );
    }

    #[test]
    fn alpha_partition_shifted_square() {
        // a = (t − x)²: one distinct root t₁(x) = x
        let f = make_family(&FamilySpec::GeneralTriple {
            alpha: Poly2::t().sub(&Poly2::y()),
        })
        .unwrap();
        let part = build_alpha_partition(&f, 0.5, 0.4, 21).unwrap();
        assert_eq!(part.n_factor, 0);
        let col = part
            .columns
            .iter()
            .find(|c| (c.x - 0.1).abs() < 1e-9)
            .expect("x = 0.1 column");
        assert_eq!(col.sigma.len(), 1);
        assert!((col.sigma[0] - 0.1).abs() < 1e-9);
        assert!((col.t_star - 0.1).abs() < 1e-9);
        assert!((col.s[0] + 0.3).abs() < 1e-9);
        assert!((col.s[1] - 0.3).abs() < 1e-9);
        // weights ±(t − x) around σ, then the α branch above s₁
        assert!(matches!(col.pieces[0].kind, WeightKind::SigmaMinusT { .. }));
        assert!(matches!(col.pieces[1].kind, WeightKind::TMinusSigma { .. }));
        assert!(matches!(col.pieces[2].kind, WeightKind::Alpha));
        assert!(col.alpha_ok);
    }

    #[test]
    fn alpha_partition_complex_pair_and_pure_square() {
        // a = t² + x²: roots ±ix ⇒ σ = {0}, t* = √2|x|
        let a = Poly2::t().pow(2).add(&Poly2::y().pow(2));
        let f = make_family(&FamilySpec::Expr {
            a,
            b: Poly2::zero(),
        })
        .unwrap();
        let part = build_alpha_partition(&f, 0.5, 0.4, 21).unwrap();
        let col = part
            .columns
            .iter()
            .find(|c| (c.x - 0.2).abs() < 1e-9)
            .expect("x = 0.2 column");
        assert_eq!(col.sigma.len(), 1);
        assert!(col.sigma[0].abs() < 1e-9);
        assert!((col.t_star - 2.0f64.sqrt() * 0.2).abs() < 1e-9);

        // a = t²: t* = 0, trailing region is the whole cone with φ = α
        let f = make_family(&FamilySpec::Expr {
            a: Poly2::t().pow(2),
            b: Poly2::zero(),
        })
        .unwrap();
        let part = build_alpha_partition(&f, 0.5, 0.4, 5).unwrap();
        let col = &part.columns[2];
        assert_eq!(col.t_star, 0.0);
        assert_eq!(col.pieces.len(), 1);
        assert!(matches!(col.pieces[0].kind, WeightKind::Alpha));
    }

    #[test]
    fn general_weight_conditions_shifted_square() {
        // φ = t−x on ω⁺: φ|∂ₜa| = 2a∂ₜφ ⇒ C = 2; √a|∂ₓφ|/∂ₜφ = |t−x| → 0
        let f = make_family(&FamilySpec::GeneralTriple {
            alpha: Poly2::t().sub(&Poly2::y()),
        })
        .unwrap();
        let part = build_alpha_partition(&f, 0.5, 0.4, 41).unwrap();
        let rep = certify_general_weight_conditions(&f, &part, 60);
        assert!(rep.pass, "{rep:?}");
        assert!((rep.c_derivative.value - 2.0).abs() < 0.1, "{rep:?}");
        assert!(rep.shrink_decreasing, "{:?}", rep.shrink_sups);
    }

    #[test]
    fn weight_piece_evaluators() {
        let f = tricomi();
        let piece = Piece {
            t_lo: 0.0,
            t_hi: 0.2,
            kind: WeightKind::PsiMinusT {
                psi: 0.2,
                dpsi_dx: 0.3,
            },
            exp_sign: 1,
        };
        assert!((piece.phi(&f, 0.05, 0.0) - 0.15).abs() < 1e-15);
        assert_eq!(piece.dphi_dt(&f, 0.05, 0.0), -1.0);
        assert_eq!(piece.dphi_dx(&f, 0.05, 0.0), 0.3);
    }
}
