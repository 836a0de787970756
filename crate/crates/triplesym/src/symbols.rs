//! Coefficient fields for the symbol `p(τ) = τ³ − a(t,y)·τ − b(t,y)`, the
//! discriminant `Δ = 4a³ − 27b²`, hyperbolicity and effective-hyperbolicity
//! checks, and the built-in example families used across the crate.
//!
//! `y` is the second independent variable: a spatial coordinate `x` for the
//! cone solver, or a frequency-direction parameter for per-frequency runs.

use crate::error::Error;
use crate::grid::GridSpec;
use crate::poly::{cubic_roots, Poly, Poly2};
use crate::Result;
use num_complex::Complex64;
use std::sync::Arc;

/// Δ-nonnegativity tolerance at a point with coefficient `a`: double
/// precision with cubic amplification.
pub fn delta_tol(a: f64) -> f64 {
    1e-10 * (1.0 + a.abs().powi(3))
}

/// Triple-point detection tolerance on `|a|` (and `tol^{3/2}` on `|b|`).
pub const TRIPLE_TOL: f64 = 1e-8;

/// Effective-hyperbolicity derivative tolerance.
pub const EFFECTIVE_TOL: f64 = 1e-8;

/// Central-difference step for first derivatives: `eps^{1/3} · scale`.
pub fn fd_step(scale: f64) -> f64 {
    f64::EPSILON.cbrt() * scale.abs().max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Domain {
    pub t_lo: f64,
    pub t_hi: f64,
    pub y_lo: f64,
    pub y_hi: f64,
}

impl Domain {
    pub fn new(t_lo: f64, t_hi: f64, y_lo: f64, y_hi: f64) -> Self {
        Domain {
            t_lo,
            t_hi,
            y_lo,
            y_hi,
        }
    }

    pub fn contains(&self, t: f64, y: f64) -> bool {
        let tol_t = 1e-12 * (1.0 + self.t_hi.abs() + self.t_lo.abs());
        let tol_y = 1e-12 * (1.0 + self.y_hi.abs() + self.y_lo.abs());
        t >= self.t_lo - tol_t
            && t <= self.t_hi + tol_t
            && y >= self.y_lo - tol_y
            && y <= self.y_hi + tol_y
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum DerivativeMode {
    /// Exact derivatives from the polynomial (or sqrt-of-polynomial) forms.
    Analytic,
    /// Central differences with step `eps^{1/3} · h_scale`.
    FiniteDifference { h_scale: f64 },
}

type ScalarFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
type ComplexFn = Arc<dyn Fn(f64, f64) -> Complex64 + Send + Sync>;

/// One scalar coefficient: an exact polynomial, the nonnegative square root
/// of a polynomial (how `b` is realized for prescribed-discriminant
/// families), or an opaque evaluator.
#[derive(Clone)]
pub enum ScalarField2 {
    Poly(Poly2),
    /// `sqrt(max(radicand, 0))`
    SqrtPoly(Poly2),
    Func(ScalarFn),
}

impl std::fmt::Debug for ScalarField2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ScalarField2::Poly(p) => write!(f, "Poly({} x {})", p.coeffs.len(), p.coeffs[0].len()),
            ScalarField2::SqrtPoly(_) => write!(f, "SqrtPoly"),
            ScalarField2::Func(_) => write!(f, "Func"),
        }
    }
}

impl ScalarField2 {
    pub fn eval(&self, t: f64, y: f64) -> f64 {
        match self {
            ScalarField2::Poly(p) => p.eval(t, y),
            ScalarField2::SqrtPoly(p) => p.eval(t, y).max(0.0).sqrt(),
            ScalarField2::Func(f) => f(t, y),
        }
    }

    fn analytic_dt(&self, t: f64, y: f64) -> Option<f64> {
        match self {
            ScalarField2::Poly(p) => Some(p.dt().eval(t, y)),
            ScalarField2::SqrtPoly(p) => {
                let v = p.eval(t, y);
                if v <= 0.0 {
                    Some(0.0)
                } else {
                    Some(p.dt().eval(t, y) / (2.0 * v.sqrt()))
                }
            }
            ScalarField2::Func(_) => None,
        }
    }

    fn analytic_dy(&self, t: f64, y: f64) -> Option<f64> {
        match self {
            ScalarField2::Poly(p) => Some(p.dy().eval(t, y)),
            ScalarField2::SqrtPoly(p) => {
                let v = p.eval(t, y);
                if v <= 0.0 {
                    Some(0.0)
                } else {
                    Some(p.dy().eval(t, y) / (2.0 * v.sqrt()))
                }
            }
            ScalarField2::Func(_) => None,
        }
    }
}

/// Exact polynomial forms carried alongside the evaluators, when available.
#[derive(Debug, Clone, Default)]
pub struct PolyForms {
    pub a: Option<Poly2>,
    pub b: Option<Poly2>,
    pub delta: Option<Poly2>,
}

/// Coefficients of the reduced symbol on a rectangular `(t, y)` box.
#[derive(Clone)]
pub struct CoefficientField {
    pub name: String,
    pub a: ScalarField2,
    pub b: ScalarField2,
    /// Lower-order block entries `b₁, b₂, b₃` of the reduced system.
    pub lower: Option<[ComplexFn; 3]>,
    pub domain: Domain,
    pub derivative_mode: DerivativeMode,
    pub poly: PolyForms,
}

impl std::fmt::Debug for CoefficientField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CoefficientField")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .finish()
    }
}

impl CoefficientField {
    pub fn a(&self, t: f64, y: f64) -> f64 {
        self.a.eval(t, y)
    }

    pub fn b(&self, t: f64, y: f64) -> f64 {
        self.b.eval(t, y)
    }

    /// `Δ = 4a³ − 27b²`, from the exact polynomial when present.
    pub fn delta(&self, t: f64, y: f64) -> f64 {
        match &self.poly.delta {
            Some(p) => p.eval(t, y),
            None => {
                let a = self.a(t, y);
                let b = self.b(t, y);
                4.0 * a * a * a - 27.0 * b * b
            }
        }
    }

    fn fd_dt(&self, f: &dyn Fn(f64, f64) -> f64, t: f64, y: f64) -> f64 {
        let h_scale = match self.derivative_mode {
            DerivativeMode::FiniteDifference { h_scale } => h_scale,
            DerivativeMode::Analytic => 1.0,
        };
        let h = fd_step(h_scale);
        (f(t + h, y) - f(t - h, y)) / (2.0 * h)
    }

    fn fd_dy(&self, f: &dyn Fn(f64, f64) -> f64, t: f64, y: f64) -> f64 {
        let h_scale = match self.derivative_mode {
            DerivativeMode::FiniteDifference { h_scale } => h_scale,
            DerivativeMode::Analytic => 1.0,
        };
        let h = fd_step(h_scale);
        (f(t, y + h) - f(t, y - h)) / (2.0 * h)
    }

    pub fn da_dt(&self, t: f64, y: f64) -> f64 {
        match self.derivative_mode {
            DerivativeMode::Analytic => self
                .a
                .analytic_dt(t, y)
                .unwrap_or_else(|| self.fd_dt(&|t, y| self.a(t, y), t, y)),
            DerivativeMode::FiniteDifference { .. } => self.fd_dt(&|t, y| self.a(t, y), t, y),
        }
    }

    pub fn da_dy(&self, t: f64, y: f64) -> f64 {
        match self.derivative_mode {
            DerivativeMode::Analytic => self
                .a
                .analytic_dy(t, y)
                .unwrap_or_else(|| self.fd_dy(&|t, y| self.a(t, y), t, y)),
            DerivativeMode::FiniteDifference { .. } => self.fd_dy(&|t, y| self.a(t, y), t, y),
        }
    }

    pub fn db_dt(&self, t: f64, y: f64) -> f64 {
        match self.derivative_mode {
            DerivativeMode::Analytic => self
                .b
                .analytic_dt(t, y)
                .unwrap_or_else(|| self.fd_dt(&|t, y| self.b(t, y), t, y)),
            DerivativeMode::FiniteDifference { .. } => self.fd_dt(&|t, y| self.b(t, y), t, y),
        }
    }

    pub fn db_dy(&self, t: f64, y: f64) -> f64 {
        match self.derivative_mode {
            DerivativeMode::Analytic => self
                .b
                .analytic_dy(t, y)
                .unwrap_or_else(|| self.fd_dy(&|t, y| self.b(t, y), t, y)),
            DerivativeMode::FiniteDifference { .. } => self.fd_dy(&|t, y| self.b(t, y), t, y),
        }
    }

    /// Second t-derivative of `a` (used by the double-characteristic test).
    pub fn d2a_dt2(&self, t: f64, y: f64) -> f64 {
        if let ScalarField2::Poly(p) = &self.a {
            if matches!(self.derivative_mode, DerivativeMode::Analytic) {
                return p.dt().dt().eval(t, y);
            }
        }
        let h = f64::EPSILON.powf(0.25);
        (self.a(t + h, y) - 2.0 * self.a(t, y) + self.a(t - h, y)) / (h * h)
    }

    pub fn ddelta_dt(&self, t: f64, y: f64) -> f64 {
        match &self.poly.delta {
            Some(p) => p.dt().eval(t, y),
            None => {
                let a = self.a(t, y);
                let b = self.b(t, y);
                12.0 * a * a * self.da_dt(t, y) - 54.0 * b * self.db_dt(t, y)
            }
        }
    }

    pub fn ddelta_dy(&self, t: f64, y: f64) -> f64 {
        match &self.poly.delta {
            Some(p) => p.dy().eval(t, y),
            None => {
                let a = self.a(t, y);
                let b = self.b(t, y);
                12.0 * a * a * self.da_dy(t, y) - 54.0 * b * self.db_dy(t, y)
            }
        }
    }

    /// True near a point where `b = sqrt(radicand)` loses smoothness
    /// (transversal contact of Δ with 4a³). Points where the sqrt-branch
    /// derivative exceeds `1/margin` are excluded from derivative-based
    /// certifications.
    pub fn b_kink(&self, t: f64, y: f64, margin: f64) -> bool {
        if let ScalarField2::SqrtPoly(p) = &self.b {
            let v = p.eval(t, y);
            let slope = p.dt().eval(t, y).abs().max(p.dy().eval(t, y).abs());
            if v <= 0.0 {
                return slope > 0.0;
            }
            return slope / (2.0 * v.sqrt()) > 1.0 / margin.max(1e-12);
        }
        false
    }

    /// Characteristic roots of `τ³ − aτ − b` at a point.
    pub fn char_roots(&self, t: f64, y: f64) -> [Complex64; 3] {
        cubic_roots(0.0, -self.a(t, y), -self.b(t, y))
    }

    /// Max modulus of the characteristic roots over a probe grid.
    pub fn tau_max(&self, grid: &GridSpec) -> f64 {
        grid.points()
            .iter()
            .map(|&(t, y)| {
                self.char_roots(t, y)
                    .iter()
                    .map(|z| z.norm())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    pub fn with_constant_lower_terms(mut self, terms: [Complex64; 3]) -> Self {
        self.lower = Some([
            Arc::new(move |_, _| terms[0]),
            Arc::new(move |_, _| terms[1]),
            Arc::new(move |_, _| terms[2]),
        ]);
        self
    }

    /// Probe the optional polynomial forms against the evaluators.
    pub fn validate_poly_agreement(&self) -> Result<()> {
        let grid = GridSpec {
            t: crate::grid::Axis::closed(self.domain.t_lo, self.domain.t_hi, 17),
            y: crate::grid::Axis::closed(self.domain.y_lo, self.domain.y_hi, 9),
        };
        for (t, y) in grid.points() {
            if let Some(pa) = &self.poly.a {
                let (u, v) = (pa.eval(t, y), self.a(t, y));
                if (u - v).abs() > 1e-12 * (1.0 + v.abs()) {
                    return Err(Error::Quality(format!(
                        "poly_t(a) disagrees with evaluator at ({t},{y}): {u} vs {v}"
                    )));
                }
            }
            if let Some(pb) = &self.poly.b {
                let (u, v) = (pb.eval(t, y), self.b(t, y));
                if (u - v).abs() > 1e-12 * (1.0 + v.abs()) {
                    return Err(Error::Quality(format!(
                        "poly_t(b) disagrees with evaluator at ({t},{y}): {u} vs {v}"
                    )));
                }
            }
            if let Some(pd) = &self.poly.delta {
                let a = self.a(t, y);
                let b = self.b(t, y);
                let (u, v) = (pd.eval(t, y), 4.0 * a * a * a - 27.0 * b * b);
                if (u - v).abs() > 1e-10 * (1.0 + v.abs()) {
                    return Err(Error::Quality(format!(
                        "poly_t(Δ) disagrees with 4a³−27b² at ({t},{y}): {u} vs {v}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// `Δ(t, y) = 4a³ − 27b²` with a domain check.
pub fn discriminant(field: &CoefficientField, t: f64, y: f64) -> Result<f64> {
    if !field.domain.contains(t, y) {
        return Err(Error::Input(format!(
            "point ({t}, {y}) outside domain of `{}`",
            field.name
        )));
    }
    let a = field.a(t, y);
    let b = field.b(t, y);
    Ok(4.0 * a * a * a - 27.0 * b * b)
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct TriplePoint {
    pub t: f64,
    pub y: f64,
    pub effective: bool,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct HyperbolicityReport {
    pub delta_min: f64,
    pub violation_points: Vec<(f64, f64)>,
    pub triple_points: Vec<TriplePoint>,
}

impl HyperbolicityReport {
    pub fn hyperbolic(&self) -> bool {
        self.violation_points.is_empty()
    }
}

/// Scan a probe grid for discriminant sign violations and near-triple points.
pub fn check_hyperbolicity(field: &CoefficientField, grid: &GridSpec) -> HyperbolicityReport {
    let mut delta_min = f64::INFINITY;
    let mut violations = Vec::new();
    let mut triples = Vec::new();
    for (t, y) in grid.points() {
        let a = field.a(t, y);
        let b = field.b(t, y);
        let d = 4.0 * a * a * a - 27.0 * b * b;
        delta_min = delta_min.min(d);
        if d < -delta_tol(a) {
            violations.push((t, y));
        }
        if a.abs() <= TRIPLE_TOL && b.abs() <= TRIPLE_TOL.powf(1.5) {
            let effective = check_effective_hyperbolicity(field, (t, y)).unwrap_or(false);
            triples.push(TriplePoint { t, y, effective });
        }
    }
    HyperbolicityReport {
        delta_min,
        violation_points: violations,
        triple_points: triples,
    }
}

/// Effective hyperbolicity at a triple characteristic: `∂ₜa ≠ 0` there.
pub fn check_effective_hyperbolicity(
    field: &CoefficientField,
    point: (f64, f64),
) -> Result<bool> {
    let (t, y) = point;
    ensure_stencil(field, t)?;
    Ok(field.da_dt(t, y).abs() > EFFECTIVE_TOL)
}

/// Variant for double characteristics of `τ² − a·ξ²`: a double point with
/// `∂ₜa ≠ 0` is not a critical point (nothing to check); a critical double
/// point is effectively hyperbolic iff `∂ₜ²a ≠ 0`.
pub fn check_effective_hyperbolicity_double(
    field: &CoefficientField,
    point: (f64, f64),
) -> Result<bool> {
    let (t, y) = point;
    ensure_stencil(field, t)?;
    if field.da_dt(t, y).abs() > EFFECTIVE_TOL {
        return Ok(true);
    }
    Ok(field.d2a_dt2(t, y).abs() > EFFECTIVE_TOL)
}

fn ensure_stencil(field: &CoefficientField, t: f64) -> Result<()> {
    let h = fd_step(1.0);
    let needs_fd = matches!(
        field.derivative_mode,
        DerivativeMode::FiniteDifference { .. }
    ) || matches!(field.a, ScalarField2::Func(_));
    if needs_fd && (field.domain.t_hi - field.domain.t_lo) < 4.0 * h {
        return Err(Error::Config(format!(
            "domain too thin for finite-difference stencil around t = {t}"
        )));
    }
    Ok(())
}

/// Root-profile request for prescribed-discriminant families. Roots may vary
/// with the slice parameter `y` (polynomials in `y`).
#[derive(Debug, Clone)]
pub enum RootProfileSpec {
    /// `Δ̄ = (t − ν₁(y))·((t − re₂(y))² + im₂(y)²)`
    ConjugatePair { nu1: Poly, re2: Poly, im2: Poly },
    /// `Δ̄ = ∏ (t − νₖ(y))`, all real
    ThreeReal { nu: [Poly; 3] },
}

impl RootProfileSpec {
    fn delta_bar(&self) -> Poly2 {
        fn lift(p: &Poly) -> Poly2 {
            Poly2::new(vec![p.coeffs.clone()])
        }
        let t = Poly2::t();
        match self {
            RootProfileSpec::ConjugatePair { nu1, re2, im2 } => {
                let lin = t.sub(&lift(nu1));
                let quad = t
                    .sub(&lift(re2))
                    .pow(2)
                    .add(&lift(im2).pow(2));
                lin.mul(&quad)
            }
            RootProfileSpec::ThreeReal { nu } => {
                let mut acc = Poly2::constant(1.0);
                for p in nu {
                    acc = acc.mul(&t.sub(&lift(p)));
                }
                acc
            }
        }
    }
}

/// Family builders.
#[derive(Debug, Clone)]
pub enum FamilySpec {
    /// `(Dₜ² − t^ℓ Dₓ²)(Dₜ + c·Dₓ)`, reduced to `τ³ − aτ − b` by completing
    /// the cube when `c ≠ 0`.
    Tricomi { l: u32, c: f64 },
    /// Prescribed discriminant: `Δ = κ·Δ̄` with `Δ̄` from the root profile,
    /// `b = +sqrt((4a³ − κΔ̄)/27)`. `kappa = None` picks 0.9 of the largest
    /// feasible scaling.
    PrescribedDelta {
        a: Poly2,
        profile: RootProfileSpec,
        kappa: Option<f64>,
    },
    /// `a = α²`, `b = 0` on a full (two-sided in t) neighborhood.
    GeneralTriple { alpha: Poly2 },
    /// Raw polynomial coefficients.
    Expr { a: Poly2, b: Poly2 },
}

/// Default box for one-sided (t ≥ 0) families.
pub fn default_domain() -> Domain {
    Domain::new(0.0, 0.5, -0.5, 0.5)
}

/// Default box for the general-triple families (two-sided in t).
pub fn default_domain_two_sided() -> Domain {
    Domain::new(-0.5, 0.5, -0.5, 0.5)
}

pub fn make_family(spec: &FamilySpec) -> Result<CoefficientField> {
    make_family_on(spec, None)
}

/// Build a family, optionally overriding its default domain.
pub fn make_family_on(spec: &FamilySpec, domain: Option<Domain>) -> Result<CoefficientField> {
    match spec {
        FamilySpec::Tricomi { l, c } => {
            if *l == 0 {
                return Err(Error::Construction("tricomi exponent must be ≥ 1".into()));
            }
            let tl = Poly2::t().pow(*l);
            // complete the cube on τ³ + cξτ² − t^ℓ ξ²τ − c t^ℓ ξ³
            let a = tl.add(&Poly2::constant(c * c / 3.0));
            let b = tl
                .scale(2.0 * c / 3.0)
                .add(&Poly2::constant(-2.0 * c * c * c / 27.0));
            let delta = a.pow(3).scale(4.0).sub(&b.pow(2).scale(27.0));
            Ok(CoefficientField {
                name: format!("tricomi(l={l},c={c})"),
                a: ScalarField2::Poly(a.clone()),
                b: ScalarField2::Poly(b.clone()),
                lower: None,
                domain: domain.unwrap_or_else(default_domain),
                derivative_mode: DerivativeMode::Analytic,
                poly: PolyForms {
                    a: Some(a),
                    b: Some(b),
                    delta: Some(delta),
                },
            })
        }
        FamilySpec::PrescribedDelta { a, profile, kappa } => {
            let dom = domain.unwrap_or_else(default_domain);
            let delta_bar = profile.delta_bar();
            // feasibility: need Δ̄ ≥ 0 and κΔ̄ ≤ 4a³ on the box
            let probe = GridSpec {
                t: crate::grid::Axis::closed(dom.t_lo, dom.t_hi, 201),
                y: crate::grid::Axis::closed(dom.y_lo, dom.y_hi, 21),
            };
            let mut kappa_max = f64::INFINITY;
            for (t, y) in probe.points() {
                let db = delta_bar.eval(t, y);
                let av = a.eval(t, y);
                if db < -1e-12 {
                    return Err(Error::Construction(format!(
                        "prescribed Δ̄ negative at ({t},{y}): {db}"
                    )));
                }
                if db > 1e-14 {
                    kappa_max = kappa_max.min(4.0 * av * av * av / db);
                }
            }
            if kappa_max <= 0.0 {
                return Err(Error::Construction(
                    "infeasible profile: Δ̄ > 4a³ somewhere for every admissible κ".into(),
                ));
            }
            let kappa = match kappa {
                Some(k) => {
                    if *k <= 0.0 || *k > kappa_max {
                        return Err(Error::Construction(format!(
                            "κ = {k} outside feasible range (0, {kappa_max:.6e}]"
                        )));
                    }
                    *k
                }
                None => {
                    if kappa_max.is_finite() {
                        0.9 * kappa_max
                    } else {
                        1.0
                    }
                }
            };
            let delta = delta_bar.scale(kappa);
            let radicand = a.pow(3).scale(4.0).sub(&delta).scale(1.0 / 27.0);
            Ok(CoefficientField {
                name: format!("prescribed_delta(kappa={kappa:.6e})"),
                a: ScalarField2::Poly(a.clone()),
                b: ScalarField2::SqrtPoly(radicand),
                lower: None,
                domain: dom,
                derivative_mode: DerivativeMode::Analytic,
                poly: PolyForms {
                    a: Some(a.clone()),
                    b: None,
                    delta: Some(delta),
                },
            })
        }
        FamilySpec::GeneralTriple { alpha } => {
            let a = alpha.mul(alpha);
            let delta = a.pow(3).scale(4.0);
            Ok(CoefficientField {
                name: "general_triple".into(),
                a: ScalarField2::Poly(a.clone()),
                b: ScalarField2::Poly(Poly2::zero()),
                lower: None,
                domain: domain.unwrap_or_else(default_domain_two_sided),
                derivative_mode: DerivativeMode::Analytic,
                poly: PolyForms {
                    a: Some(a),
                    b: Some(Poly2::zero()),
                    delta: Some(delta),
                },
            })
        }
        FamilySpec::Expr { a, b } => {
            let delta = a.pow(3).scale(4.0).sub(&b.pow(2).scale(27.0));
            Ok(CoefficientField {
                name: "expr".into(),
                a: ScalarField2::Poly(a.clone()),
                b: ScalarField2::Poly(b.clone()),
                lower: None,
                domain: domain.unwrap_or_else(default_domain),
                derivative_mode: DerivativeMode::Analytic,
                poly: PolyForms {
                    a: Some(a.clone()),
                    b: Some(b.clone()),
                    delta: Some(delta),
                },
            })
        }
    }
}

/// `a = t`, `b = θ·(2/(3√3))·t^{3/2}`: the constant-saturation family with
/// `Δ = 4(1 − θ²)t³`. Realized as a prescribed-discriminant family with the
/// triple root profile at 0 and `κ = 4(1 − θ²)`.
pub fn theta_family(theta: f64) -> Result<CoefficientField> {
    if !(0.0..1.0).contains(&theta) {
        return Err(Error::Construction(format!(
            "θ = {theta} must lie in [0, 1)"
        )));
    }
    let spec = FamilySpec::PrescribedDelta {
        a: Poly2::t(),
        profile: RootProfileSpec::ThreeReal {
            nu: [Poly::zero(), Poly::zero(), Poly::zero()],
        },
        kappa: Some(4.0 * (1.0 - theta * theta)),
    };
    let mut f = make_family(&spec)?;
    f.name = format!("theta(theta={theta})");
    Ok(f)
}

/// Field from opaque evaluators (exercises the finite-difference and
/// least-squares fallback paths).
pub fn field_from_fns(
    name: &str,
    a: ScalarFn,
    b: ScalarFn,
    domain: Domain,
) -> CoefficientField {
    CoefficientField {
        name: name.into(),
        a: ScalarField2::Func(a),
        b: ScalarField2::Func(b),
        lower: None,
        domain,
        derivative_mode: DerivativeMode::FiniteDifference { h_scale: 1.0 },
        poly: PolyForms::default(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Axis;

    fn grid(dom: &Domain, nt: usize, ny: usize) -> GridSpec {
        GridSpec {
            t: Axis::closed(dom.t_lo, dom.t_hi, nt),
            y: Axis::closed(dom.y_lo, dom.y_hi, ny),
        }
    }

    #[test]
    fn discriminant_values() {
        let f = make_family(&FamilySpec::Expr {
            a: Poly2::constant(1.0),
            b: Poly2::zero(),
        })
        .unwrap();
        assert_eq!(discriminant(&f, 0.1, 0.0).unwrap(), 4.0);
        let z = make_family(&FamilySpec::Expr {
            a: Poly2::zero(),
            b: Poly2::zero(),
        })
        .unwrap();
        assert_eq!(discriminant(&z, 0.1, 0.0).unwrap(), 0.0);
        // τ³ − 3τ − 2 = (τ+1)²(τ−2) has a double root: Δ = 0
        let d = make_family(&FamilySpec::Expr {
            a: Poly2::constant(3.0),
            b: Poly2::constant(2.0),
        })
        .unwrap();
        assert_eq!(discriminant(&d, 0.0, 0.0).unwrap(), 0.0);
        assert!(discriminant(&d, 7.0, 0.0).is_err());
    }

    #[test]
    fn hyperbolicity_scan_tricomi() {
        let f = make_family(&FamilySpec::Tricomi { l: 1, c: 0.0 }).unwrap();
        assert_eq!(f.a(0.3, 0.1), 0.3);
        assert_eq!(f.b(0.3, 0.1), 0.0);
        let rep = check_hyperbolicity(&f, &grid(&f.domain, 101, 5));
        assert!(rep.hyperbolic());
        assert!(rep.delta_min.abs() < 1e-15);
        assert_eq!(rep.triple_points.len(), 5); // t = 0 at each y
        assert!(rep.triple_points.iter().all(|p| p.effective));
    }

    #[test]
    fn hyperbolicity_violations_negative_a() {
        let f = make_family(&FamilySpec::Expr {
            a: Poly2::t().scale(-1.0),
            b: Poly2::zero(),
        })
        .unwrap();
        let rep = check_hyperbolicity(&f, &grid(&f.domain, 51, 3));
        assert!(!rep.hyperbolic());
        assert!(rep.delta_min < 0.0);
        assert!(rep.violation_points.iter().all(|&(t, _)| t > 0.0));
    }

    #[test]
    fn triple_point_only_at_origin_for_paraboloid() {
        let a = Poly2::t().add(&Poly2::y().pow(2));
        let f = make_family(&FamilySpec::Expr {
            a,
            b: Poly2::zero(),
        })
        .unwrap();
        let g = GridSpec {
            t: Axis::closed(0.0, 0.5, 101),
            y: Axis::closed(-0.5, 0.5, 101),
        };
        let rep = check_hyperbolicity(&f, &g);
        assert!(rep.hyperbolic());
        assert_eq!(rep.triple_points.len(), 1);
        assert!(rep.triple_points[0].t.abs() < 1e-12 && rep.triple_points[0].y.abs() < 1e-12);
    }

    #[test]
    fn effective_hyperbolicity_tricomi_exponents() {
        let l1 = make_family(&FamilySpec::Tricomi { l: 1, c: 0.0 }).unwrap();
        assert!(check_effective_hyperbolicity(&l1, (0.0, 0.0)).unwrap());
        let l2 = make_family(&FamilySpec::Tricomi { l: 2, c: 0.0 }).unwrap();
        assert!(!check_effective_hyperbolicity(&l2, (0.0, 0.0)).unwrap());
        // double-root variant: a = t² has ∂ₜ²a = 2
        assert!(check_effective_hyperbolicity_double(&l2, (0.0, 0.0)).unwrap());
    }

    #[test]
    fn tricomi_with_drift_is_reduced() {
        let f = make_family(&FamilySpec::Tricomi { l: 1, c: 0.3 }).unwrap();
        // a = t + c²/3 and the roots of τ³ − aτ − b are the shifted
        // characteristic speeds {±√t, −c} + c/3
        let c: f64 = 0.3;
        let t0: f64 = 0.16;
        let expect = {
            let mut v = [t0.sqrt() + c / 3.0, -t0.sqrt() + c / 3.0, -2.0 * c / 3.0];
            v.sort_by(|a, b| a.partial_cmp(b).unwrap());
            v
        };
        let mut roots: Vec<f64> = f.char_roots(t0, 0.0).iter().map(|z| z.re).collect();
        roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (r, e) in roots.iter().zip(expect.iter()) {
            assert!((r - e).abs() < 1e-10, "{r} vs {e}");
        }
        assert!(f.validate_poly_agreement().is_ok());
    }

    #[test]
    fn prescribed_delta_roots_round_trip() {
        let spec = FamilySpec::PrescribedDelta {
            a: Poly2::t().add(&Poly2::constant(0.1)),
            profile: RootProfileSpec::ConjugatePair {
                nu1: Poly::constant(-0.05),
                re2: Poly::constant(0.1),
                im2: Poly::constant(0.05),
            },
            kappa: None,
        };
        let f = make_family(&spec).unwrap();
        assert!(f.validate_poly_agreement().is_ok());
        // Δ's cubic roots must reproduce the request (κ-scaling moves no roots)
        let slice = f.poly.delta.as_ref().unwrap().slice_at_y(0.0);
        let lead = *slice.coeffs.last().unwrap();
        let monic: Vec<f64> = slice.coeffs.iter().map(|c| c / lead).collect();
        let roots = crate::poly::cubic_roots(monic[2], monic[1], monic[0]);
        let real: Vec<_> = roots.iter().filter(|z| z.im == 0.0).collect();
        assert!((real[0].re + 0.05).abs() < 1e-8);
        let pair: Vec<_> = roots.iter().filter(|z| z.im > 0.0).collect();
        assert!((pair[0].re - 0.1).abs() < 1e-8);
        assert!((pair[0].im - 0.05).abs() < 1e-8);
        // hyperbolic by construction
        let rep = check_hyperbolicity(&f, &grid(&f.domain, 101, 7));
        assert!(rep.hyperbolic());
    }

    #[test]
    fn prescribed_delta_infeasible() {
        // a ≡ 0 but Δ̄ > 0 somewhere: no admissible κ
        let spec = FamilySpec::PrescribedDelta {
            a: Poly2::zero(),
            profile: RootProfileSpec::ConjugatePair {
                nu1: Poly::constant(-0.05),
                re2: Poly::constant(0.1),
                im2: Poly::constant(0.05),
            },
            kappa: None,
        };
        assert!(matches!(
            make_family(&spec),
            Err(Error::Construction(_))
        ));
    }

    #[test]
    fn theta_family_matches_closed_form() {
        let f = theta_family(0.9).unwrap();
        let t = 0.2f64;
        let expect = 0.9 * (2.0 / (3.0 * 3.0f64.sqrt())) * t.powf(1.5);
        assert!((f.b(t, 0.0) - expect).abs() < 1e-13);
        assert!((f.delta(t, 0.0) - 4.0 * (1.0 - 0.81) * t.powi(3)).abs() < 1e-13);
        // Δ stays nonnegative on the whole box
        let rep = check_hyperbolicity(&f, &grid(&f.domain, 101, 3));
        assert!(rep.hyperbolic());
    }

    #[test]
    fn general_triple_square() {
        let alpha = Poly2::t().sub(&Poly2::y());
        let f = make_family(&FamilySpec::GeneralTriple { alpha }).unwrap();
        assert!((f.a(0.3, 0.1) - 0.04).abs() < 1e-15);
        assert_eq!(f.b(0.3, 0.1), 0.0);
        let rep = check_hyperbolicity(&f, &grid(&f.domain, 41, 41));
        assert!(rep.hyperbolic());
    }

    #[test]
    fn fd_derivatives_match_analytic() {
        let poly_a = Poly2::t().add(&Poly2::y().pow(2));
        let f_an = make_family(&FamilySpec::Expr {
            a: poly_a.clone(),
            b: Poly2::zero(),
        })
        .unwrap();
        let f_fd = field_from_fns(
            "fd",
            Arc::new(move |t, y| poly_a.eval(t, y)),
            Arc::new(|_, _| 0.0),
            default_domain(),
        );
        for &(t, y) in &[(0.2, 0.1), (0.4, -0.3)] {
            assert!((f_an.da_dt(t, y) - f_fd.da_dt(t, y)).abs() < 1e-9);
            assert!((f_an.da_dy(t, y) - f_fd.da_dy(t, y)).abs() < 1e-9);
        }
    }
}
