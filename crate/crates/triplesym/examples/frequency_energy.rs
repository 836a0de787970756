//! Per-frequency runs: gauge reduction, conservation of ⟨SU,U⟩ for frozen
//! coefficients, and the weighted-energy verdicts across the partition.
//!
//! Run with: `cargo run --example frequency_energy`

use nalgebra::Vector3;
use num_complex::Complex64;
use triplesym::bezoutian::build_bezoutian;
use triplesym::frequency::{
    gauge_reduce, monitor_weighted_energy, solve_frequency, Forcing, FrequencySystem,
    IntegratorSpec,
};
use triplesym::poly::Poly2;
use triplesym::symbols::{default_domain, make_family, FamilySpec};
use triplesym::weights::{build_partition, default_delta, extract_root_profile};

fn main() {
    // gauge reduction strips the τ² coefficient with a unimodular phase
    let g = gauge_reduce(
        &Poly2::constant(0.3),
        &Poly2::t(),
        &Poly2::zero(),
        default_domain(),
    );
    println!(
        "gauge reduction of c2 = 0.3: a(0.2) = {:.4}, |E(0.2, ξ=256)| = {}",
        g.field.a(0.2, 0.0),
        g.phase(0.2, 0.0, 256.0).norm()
    );

    // frozen coefficients conserve the Bezout energy exactly
    let frozen = make_family(&FamilySpec::Expr {
        a: Poly2::constant(1.0),
        b: Poly2::zero(),
    })
    .unwrap();
    let sys = FrequencySystem::new(&frozen, 0.0, 256.0, Forcing::None).unwrap();
    let u0 = Vector3::new(
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.7),
        Complex64::new(-0.4, 0.2),
    );
    let trace = solve_frequency(&sys, (0.0, 0.5), u0, &IntegratorSpec::default()).unwrap();
    let s = build_bezoutian(1.0, 0.0).s;
    let energy = |u: &Vector3<Complex64>| -> f64 {
        let mut e = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                e += s[(i, j)] * (u[i].conj() * u[j]).re;
            }
        }
        e
    };
    let e0 = energy(&trace.states[0]);
    let drift = trace
        .states
        .iter()
        .map(|u| (energy(u) - e0).abs())
        .fold(0.0, f64::max);
    println!("frozen a=1: ⟨SU,U⟩ relative drift over [0, 0.5] at ξ=256: {:.2e}", drift / e0);

    // weighted-energy monitoring across the partition of the degenerate family
    let f = make_family(&FamilySpec::Tricomi { l: 1, c: 0.0 }).unwrap();
    let profile = extract_root_profile(&f, 0.0).unwrap();
    let partition = build_partition(&profile, default_delta(&profile, f.domain.t_hi), 0.0).unwrap();
    let spec = IntegratorSpec {
        n_out: 300,
        ..Default::default()
    };
    println!("\ntricomi weighted-energy verdicts (N = 8):");
    for xi in [16.0, 64.0, 256.0] {
        let rep = monitor_weighted_energy(&f, &partition, xi, 8, 0.0, &spec).unwrap();
        for v in &rep.verdicts {
            println!(
                "  ξ = {xi:>5}: [{:.2}, {:.2}] sign {:+}  C_energy = {:.4e}  C_dtΛ = {:.3}  C_B = {:.3}",
                v.t_lo, v.t_hi, v.exp_sign, v.c_energy, v.c_dt_lambda, v.c_lower
            );
        }
        println!("           measured γ0 = {:.4}", rep.gamma0);
    }
}
