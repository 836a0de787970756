//! Finite-difference certification of the first-derivative estimates:
//! `|∂_y a| ≲ √a`, `|∂_y b| ≲ a`, `|∂_t b| ≲ √a`, the eigenvalue versions
//! `|∂_y λ₁| ≲ a^{3/2}`, `|∂_t λ₁| ≲ a`, …, and the weighted logarithmic
//! bound `|∂_y λ₁|/λ₁ ≲ 1/(φ√a)`.
//!
//! Ratios are measured only where the denominator exceeds a floor; skipped
//! points are counted and must stay under 1% of the grid. The boundedness
//! oracle is two-resolution refinement: a sup that keeps growing when the
//! grid is refined towards the degeneracy flags an unbounded ratio.

use crate::bezoutian::{build_bezoutian, eigenvalues};
use crate::grid::GridSpec;
use crate::report::MeasuredConstant;
use crate::symbols::{fd_step, CoefficientField};

/// Denominator floor: ratios are only measured where `den > 1e-12 · scale`.
pub const DENOM_FLOOR: f64 = 1e-12;

/// Max fraction of grid points that may be skipped before the measurement is
/// flagged unusable.
pub const MAX_SKIP_FRACTION: f64 = 0.01;

/// Eigenvalues of `S(a(t,y), b(t,y))`, ascending.
pub fn lambdas_at(field: &CoefficientField, t: f64, y: f64) -> [f64; 3] {
    eigenvalues(&build_bezoutian(field.a(t, y), field.b(t, y)))
}

/// t-derivatives of the eigenvalues by central differences, with the step
/// shrunk near the left domain edge so the stencil stays inside.
pub fn dlambda_dt(field: &CoefficientField, t: f64, y: f64) -> [f64; 3] {
    let h = fd_step(1.0)
        .min(0.45 * (t - field.domain.t_lo).abs().max(1e-9))
        .max(1e-9);
    let lp = lambdas_at(field, t + h, y);
    let lm = lambdas_at(field, t - h, y);
    [
        (lp[0] - lm[0]) / (2.0 * h),
        (lp[1] - lm[1]) / (2.0 * h),
        (lp[2] - lm[2]) / (2.0 * h),
    ]
}

/// y-derivatives of the eigenvalues by central differences.
pub fn dlambda_dy(field: &CoefficientField, t: f64, y: f64) -> [f64; 3] {
    let h = fd_step(1.0);
    let lp = lambdas_at(field, t, y + h);
    let lm = lambdas_at(field, t, y - h);
    [
        (lp[0] - lm[0]) / (2.0 * h),
        (lp[1] - lm[1]) / (2.0 * h),
        (lp[2] - lm[2]) / (2.0 * h),
    ]
}

/// sup of `f` over the grid; `None` results count as skipped.
fn sup_over(grid: &GridSpec, f: &dyn Fn(f64, f64) -> Option<f64>) -> (f64, usize, usize) {
    let mut sup = 0.0f64;
    let mut skipped = 0;
    let pts = grid.points();
    for &(t, y) in &pts {
        match f(t, y) {
            Some(v) => sup = sup.max(v.abs()),
            None => skipped += 1,
        }
    }
    (sup, skipped, pts.len())
}

fn measured(name: &str, grid: &GridSpec, f: &dyn Fn(f64, f64) -> Option<f64>) -> MeasuredConstant {
    let (coarse, skipped, probed) = sup_over(grid, f);
    let (fine, _, _) = sup_over(&grid.refined(), f);
    let mut mc = MeasuredConstant::from_sups(name, coarse, fine, grid.describe());
    mc.skipped = skipped;
    mc.probed = probed;
    mc
}

/// Usable measurement: refinement-stable and not dominated by skips.
pub fn usable(mc: &MeasuredConstant) -> bool {
    mc.stable() && (mc.skipped as f64) < MAX_SKIP_FRACTION * (mc.probed.max(1) as f64)
}

/// Measured sups of `|∂_y a|/√a`, `|∂_y b|/a`, `|∂_t b|/√a` over `{a > 0}`
/// grid points.
pub fn certify_coefficient_derivatives(
    field: &CoefficientField,
    grid: &GridSpec,
) -> Vec<MeasuredConstant> {
    let guard = |t: f64, y: f64| -> Option<f64> {
        let a = field.a(t, y);
        if a <= DENOM_FLOOR || field.b_kink(t, y, 1e-6) {
            None
        } else {
            Some(a)
        }
    };
    vec![
        measured("|d_y a| / sqrt(a)", grid, &|t, y| {
            guard(t, y).map(|a| field.da_dy(t, y).abs() / a.sqrt())
        }),
        measured("|d_y b| / a", grid, &|t, y| {
            guard(t, y).map(|a| field.db_dy(t, y).abs() / a)
        }),
        measured("|d_t b| / sqrt(a)", grid, &|t, y| {
            guard(t, y).map(|a| field.db_dt(t, y).abs() / a.sqrt())
        }),
    ]
}

/// Measured sups of the eigenvalue-derivative ratios
/// `|∂_yλ₁|/a^{3/2}`, `|∂_yλ₂|/√a`, `|∂_yλ₃|/√a`, `|∂_tλ₁|/a`, `|∂_tλ₂|`, `|∂_tλ₃|`.
pub fn certify_eigenvalue_derivatives(
    field: &CoefficientField,
    grid: &GridSpec,
) -> Vec<MeasuredConstant> {
    let guard = |t: f64, y: f64| -> Option<f64> {
        let a = field.a(t, y);
        if a <= DENOM_FLOOR || field.b_kink(t, y, 1e-6) {
            None
        } else {
            Some(a)
        }
    };
    vec![
        measured("|d_y l1| / a^1.5", grid, &|t, y| {
            guard(t, y).map(|a| dlambda_dy(field, t, y)[0].abs() / a.powf(1.5))
        }),
        measured("|d_y l2| / sqrt(a)", grid, &|t, y| {
            guard(t, y).map(|a| dlambda_dy(field, t, y)[1].abs() / a.sqrt())
        }),
        measured("|d_y l3| / sqrt(a)", grid, &|t, y| {
            guard(t, y).map(|a| dlambda_dy(field, t, y)[2].abs() / a.sqrt())
        }),
        measured("|d_t l1| / a", grid, &|t, y| {
            guard(t, y).map(|a| dlambda_dt(field, t, y)[0].abs() / a)
        }),
        measured("|d_t l2|", grid, &|t, y| {
            guard(t, y).map(|_| dlambda_dt(field, t, y)[1].abs())
        }),
        measured("|d_t l3|", grid, &|t, y| {
            guard(t, y).map(|_| dlambda_dt(field, t, y)[2].abs())
        }),
    ]
}

/// Measured sup of `|∂_y λ₁| / λ₁ · (φ·√a)`: the weighted logarithmic bound
/// on the smallest eigenvalue. Points with `λ₁ ≤ 10⁻¹⁴` are skipped and
/// counted.
pub fn certify_lambda1_log_derivative(
    field: &CoefficientField,
    grid: &GridSpec,
    phi: &dyn Fn(f64, f64) -> f64,
) -> MeasuredConstant {
    measured("|d_y l1|/l1 * phi*sqrt(a)", grid, &|t, y| {
        let a = field.a(t, y);
        if a <= DENOM_FLOOR || field.b_kink(t, y, 1e-6) {
            return None;
        }
        let l1 = lambdas_at(field, t, y)[0];
        if l1 <= 1e-14 {
            return None;
        }
        let d = dlambda_dy(field, t, y)[0].abs();
        Some(d / l1 * phi(t, y) * a.sqrt())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Axis;
    use crate::poly::Poly2;
    use crate::symbols::{make_family, theta_family, FamilySpec};

    fn half_open_grid(t_hi: f64, nt: usize, y: (f64, f64, usize)) -> GridSpec {
        GridSpec {
            t: Axis::half_open(0.0, t_hi, nt),
            y: Axis::closed(y.0, y.1, y.2),
        }
    }

    #[test]
    fn coefficient_ratios_tricomi() {
        let f = make_family(&FamilySpec::Tricomi { l: 1, c: 0.0 }).unwrap();
        let g = half_open_grid(0.05, 200, (-0.2, 0.2, 5));
        let mcs = certify_coefficient_derivatives(&f, &g);
        // a = t, b = 0: y-derivatives vanish, |∂_t b|/√a = 0
        for mc in &mcs {
            assert!(usable(mc), "{mc:?}");
            assert!(mc.value < 1e-8, "{mc:?}");
        }
    }

    #[test]
    fn coefficient_ratio_paraboloid_closed_form() {
        // a = t + y²: |∂_y a|/√a = 2|y|/√(t+y²) ≤ 2
        let f = make_family(&FamilySpec::Expr {
            a: Poly2::t().add(&Poly2::y().pow(2)),
            b: Poly2::zero(),
        })
        .unwrap();
        let g = half_open_grid(0.05, 150, (-0.4, 0.4, 41));
        let mcs = certify_coefficient_derivatives(&f, &g);
        assert!(usable(&mcs[0]), "{:?}", mcs[0]);
        assert!(mcs[0].value <= 2.0 + 1e-6, "sup = {}", mcs[0].value);
        assert!(mcs[0].value > 1.5, "sup should approach 2, got {}", mcs[0].value);
    }

    #[test]
    fn theta_family_db_dt_ratio() {
        // b = θ(2/(3√3))t^{3/2}: |∂_t b|/√a = θ/√3
        let theta = 0.9;
        let f = theta_family(theta).unwrap();
        let g = half_open_grid(0.05, 300, (0.0, 0.0, 1));
        let mcs = certify_coefficient_derivatives(&f, &g);
        let expect = theta / 3.0f64.sqrt();
        assert!(usable(&mcs[2]), "{:?}", mcs[2]);
        assert!(
            (mcs[2].value - expect).abs() < 1e-6 * (1.0 + expect),
            "{} vs {}",
            mcs[2].value,
            expect
        );
    }

    #[test]
    fn eigenvalue_ratios_tricomi() {
        let f = make_family(&FamilySpec::Tricomi { l: 1, c: 0.0 }).unwrap();
        let g = half_open_grid(0.05, 200, (0.0, 0.0, 1));
        let mcs = certify_eigenvalue_derivatives(&f, &g);
        for mc in &mcs {
            assert!(usable(mc), "{mc:?}");
        }
        // λ's are y-independent: all ∂_y ratios vanish
        assert!(mcs[0].value < 1e-6);
        assert!(mcs[1].value < 1e-6);
        assert!(mcs[2].value < 1e-6);
        // λ₂ ≈ 2a ⇒ |∂_t λ₂| ≈ 2
        assert!((mcs[4].value - 2.0).abs() < 0.05, "{}", mcs[4].value);
    }

    #[test]
    fn eigenvalue_ratios_paraboloid_stable() {
        let f = make_family(&FamilySpec::Expr {
            a: Poly2::t().add(&Poly2::y().pow(2)),
            b: Poly2::zero(),
        })
        .unwrap();
        let g = half_open_grid(0.05, 100, (-0.3, 0.3, 21));
        let mcs = certify_eigenvalue_derivatives(&f, &g);
        for mc in &mcs {
            assert!(usable(mc), "{mc:?}");
        }
    }

    #[test]
    fn lambda1_log_derivative_vanishes_for_tricomi() {
        let f = make_family(&FamilySpec::Tricomi { l: 1, c: 0.0 }).unwrap();
        let g = half_open_grid(0.05, 120, (-0.2, 0.2, 5));
        let mc = certify_lambda1_log_derivative(&f, &g, &|t, _| t);
        assert!(usable(&mc));
        assert!(mc.value < 1e-6, "{}", mc.value);
    }

    #[test]
    fn lambda1_log_derivative_paraboloid_bounded() {
        let f = make_family(&FamilySpec::Expr {
            a: Poly2::t().add(&Poly2::y().pow(2)),
            b: Poly2::zero(),
        })
        .unwrap();
        let g = half_open_grid(0.05, 100, (-0.3, 0.3, 21));
        let mc = certify_lambda1_log_derivative(&f, &g, &|t, _| t);
        assert!(usable(&mc), "{mc:?}");
    }

    #[test]
    fn fd_matches_analytic_at_order_two() {
        // observed convergence order of the central difference vs the exact
        // derivative must be ≥ 1.8
        let a = Poly2::t().pow(3).add(&Poly2::t().mul(&Poly2::y()));
        let exact = a.dt();
        let err = |h: f64| -> f64 {
            let (t, y) = (0.3, 0.2);
            let fd = (a.eval(t + h, y) - a.eval(t - h, y)) / (2.0 * h);
            (fd - exact.eval(t, y)).abs()
        };
        let (e1, e2) = (err(1e-3), err(5e-4));
        let order = (e1 / e2).log2();
        assert!(order >= 1.8, "observed order {order}");
    }
}
