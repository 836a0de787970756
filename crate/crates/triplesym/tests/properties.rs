//! Property tests for the algebraic core: random hyperbolic coefficient
//! pairs, cubic root extraction, partitions, and family round trips.

use proptest::prelude::*;
use triplesym::bezoutian::{build_bezoutian, characteristic_cubic, eigen_decompose, eigenvalues};
use triplesym::poly::{cubic_roots, Poly, Poly2};
use triplesym::symbols::{check_hyperbolicity, make_family, FamilySpec, RootProfileSpec};
use triplesym::grid::{Axis, GridSpec};
use triplesym::weights::{build_partition, extract_root_profile};

/// (a, b) with Δ ≥ 0: `b = s·√(4a³/27)`, |s| ≤ 1.
fn hyperbolic_pair() -> impl Strategy<Value = (f64, f64)> {
    (0.0..2.0f64, -1.0..1.0f64).prop_map(|(a, s)| (a, s * (4.0 * a * a * a / 27.0).sqrt()))
}

proptest! {
    #[test]
    fn bezoutian_identities((a, b) in hyperbolic_pair()) {
        let bez = build_bezoutian(a, b);
        let delta = bez.discriminant();
        // SA symmetric
        let sa = bez.s * bez.companion;
        prop_assert!((sa - sa.transpose()).abs().max()
            <= 1e-13 * (bez.s.norm() * bez.companion.norm()).max(1.0));
        // det S = Δ and trace S = 3 + 2a + a² (the −c₂ of q)
        prop_assert!((bez.s.determinant() - delta).abs()
            <= 1e-10 * (1.0 + delta.abs() + bez.s.norm().powi(3)));
        let (c2, _, c0) = characteristic_cubic(&bez);
        prop_assert!((bez.s.trace() + c2).abs() <= 1e-12 * (1.0 + c2.abs()));
        prop_assert!((c0 + delta).abs() == 0.0);
        // S nonnegative definite on the hyperbolic cone
        let lam = eigenvalues(&bez);
        prop_assert!(lam[0] >= -1e-12);
    }

    #[test]
    fn companion_eigenvalues_are_symbol_roots((a, b) in hyperbolic_pair()) {
        // roots of τ³ − aτ − b have backward error ≲ 1e-9 and are the
        // eigenvalues of A by the companion property
        let roots = cubic_roots(0.0, -a, -b);
        for z in roots {
            let p = z * z * z - a * z - b;
            prop_assert!(p.norm() <= 1e-9 * (1.0 + a + b.abs()).powi(3), "residual {}", p.norm());
        }
    }

    #[test]
    fn frame_diagonalizes((a, b) in hyperbolic_pair()) {
        let bez = build_bezoutian(a, b);
        let frame = eigen_decompose(&bez);
        let tt = frame.t.transpose() * frame.t;
        prop_assert!((tt - nalgebra::Matrix3::identity()).abs().max() <= 1e-10);
        let lam = frame.t.transpose() * bez.s * frame.t;
        prop_assert!((lam - frame.lambda_mat()).abs().max() <= 1e-9 * (1.0 + bez.s.norm()));
        // Λ·Aᵀ symmetric (the symmetrizer property survives the rotation)
        let laa = frame.lambda_mat() * frame.a_t;
        prop_assert!((laa - laa.transpose()).abs().max()
            <= 1e-9 * (1.0 + bez.s.norm() * bez.companion.norm()));
    }

    #[test]
    fn cubic_roots_conjugate_closed(p2 in -2.0..2.0f64, p1 in -2.0..2.0f64, p0 in -2.0..2.0f64) {
        let roots = cubic_roots(p2, p1, p0);
        let scale = 1.0 + roots.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for z in &roots {
            let v = ((*z + p2) * *z + p1) * *z + p0;
            prop_assert!(v.norm() <= 1e-7 * scale.powi(3), "backward error {}", v.norm());
            if z.im != 0.0 {
                prop_assert!(roots.iter().any(|w| (w - z.conj()).norm() <= 1e-9 * scale));
            }
        }
    }

    #[test]
    fn partition_covers_and_is_positive(
        nu1 in -0.2..0.0f64,
        re2 in 0.02..0.15f64,
        im2 in 0.01..0.1f64,
    ) {
        let f = make_family(&FamilySpec::PrescribedDelta {
            a: Poly2::t().add(&Poly2::constant(0.2)),
            profile: RootProfileSpec::ConjugatePair {
                nu1: Poly::constant(nu1),
                re2: Poly::constant(re2),
                im2: Poly::constant(im2),
            },
            kappa: None,
        }).unwrap();
        let profile = extract_root_profile(&f, 0.0).unwrap();
        prop_assert!((profile.psi - re2).abs() <= 1e-6);
        let part = build_partition(&profile, 0.4, 0.0).unwrap();
        prop_assert!(part.covers());
        // breakpoints nondecreasing, weights positive in piece interiors
        for w in part.breakpoints.windows(2) {
            prop_assert!(w[1] >= w[0]);
        }
        for piece in &part.pieces {
            let mid = 0.5 * (piece.t_lo + piece.t_hi);
            prop_assert!(piece.phi(&f, mid, 0.0) > 0.0);
            prop_assert!(piece.dphi_dt(&f, mid, 0.0).abs() == 1.0);
        }
        // built families stay hyperbolic on their box
        let rep = check_hyperbolicity(&f, &GridSpec {
            t: Axis::closed(0.0, 0.5, 60),
            y: Axis::closed(-0.5, 0.5, 7),
        });
        prop_assert!(rep.hyperbolic());
    }

    #[test]
    fn prescribed_roots_recovered(
        nu1 in -0.2..-0.01f64,
        re2 in -0.1..0.15f64,
        im2 in 0.02..0.1f64,
    ) {
        let f = make_family(&FamilySpec::PrescribedDelta {
            a: Poly2::t().add(&Poly2::constant(0.25)),
            profile: RootProfileSpec::ConjugatePair {
                nu1: Poly::constant(nu1),
                re2: Poly::constant(re2),
                im2: Poly::constant(im2),
            },
            kappa: None,
        }).unwrap();
        let profile = extract_root_profile(&f, 0.0).unwrap();
        prop_assert!((profile.nu[0].re - nu1).abs() <= 1e-6, "ν₁ {} vs {nu1}", profile.nu[0].re);
        prop_assert!((profile.nu[1].re - re2).abs() <= 1e-6);
        prop_assert!((profile.nu[1].im - im2).abs() <= 1e-6);
    }
}
