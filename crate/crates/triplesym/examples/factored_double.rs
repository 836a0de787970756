//! Double-root regime `p = (τ − bξ)(τ² − aξ²)` with `b(0,0) ≠ 0`: quadratic
//! root profiles of `a`, the two-piece partition when the conjugate pair has
//! positive real part, and the factorized energy verdicts for the wave and
//! transport factors.
//!
//! Run with: `cargo run --example factored_double`

use nalgebra::Vector3;
use std::sync::Arc;
use triplesym::cone::{factored_double_energy, solve_cone, ConeSystem, SolveSpec, SpaceDomain, SystemKind};
use triplesym::frequency::smooth_switch;
use triplesym::poly::Poly2;
use triplesym::symbols::{make_family, FamilySpec};
use triplesym::weights::{build_double_partition, extract_double_profile};

fn main() {
    // quadratic profiles of a
    for (label, a_poly) in [
        ("a = t²  (critical, ∂ₜ²a = 2)", Poly2::t().pow(2)),
        ("a = t   (non-critical)", Poly2::t()),
        (
            "a = (t−0.1)² + 0.0025  (pair with ψ = 0.1)",
            Poly2::t()
                .sub(&Poly2::constant(0.1))
                .pow(2)
                .add(&Poly2::constant(0.0025)),
        ),
    ] {
        let f = make_family(&FamilySpec::Expr {
            a: a_poly,
            b: Poly2::constant(1.0),
        })
        .unwrap();
        let p = extract_double_profile(&f, 0.0).unwrap();
        let part = build_double_partition(&p, 0.3).unwrap();
        println!(
            "{label}: ν = {:?}, ψ = {:.3}, pieces = {}",
            p.nu.map(|z| (z.re, z.im)),
            p.psi,
            part.pieces.len()
        );
    }

    // factored solve and the three energy verdicts
    let f = make_family(&FamilySpec::Expr {
        a: Poly2::t().pow(2),
        b: Poly2::constant(1.0),
    })
    .unwrap();
    let profile = extract_double_profile(&f, 0.0).unwrap();
    let partition = build_double_partition(&profile, 0.3).unwrap();
    let forcing = |t: f64, x: f64| {
        let s: f64 = x / 0.5;
        let shape = if s.abs() >= 1.0 {
            0.0
        } else {
            (-1.0 / (1.0 - s * s)).exp()
        };
        smooth_switch(t / 0.05) * shape
    };
    let sys = ConeSystem::new(&f, SystemKind::FactoredDouble).with_forcing(Arc::new(forcing));
    let dom = SpaceDomain::PeriodicStrip {
        x_lo: -2.0,
        x_hi: 2.0,
        height: 0.3,
    };
    let res = solve_cone(
        &sys,
        &dom,
        &|_| Vector3::zeros(),
        Some(&|_| (0.0, 0.0, 0.0)),
        &SolveSpec {
            nx: 256,
            carry_scalar: true,
            ..Default::default()
        },
    )
    .unwrap();
    println!(
        "\nsolved factored system: speeds b, ±√a; {} levels × {} columns",
        res.times.len(),
        res.x_nodes.len()
    );
    let verdict = factored_double_energy(&res, &f, &partition, 4).unwrap();
    println!(
        "factored energies (N = 4): C_wave = {:.4e}, C_transport = {:.4e}, C_combined = {:.4e}, pass = {}",
        verdict.c_p2, verdict.c_p1, verdict.c_combined, verdict.pass
    );
}
