//! The general triple-characteristic regime: the admissibility conditions
//! `a³ ≤ CΔ`, `|∂ₜb| ≤ C√a|∂ₜa|`, the partition by the roots of `a(·,x)`
//! (σ curves, t*, the s-midpoints), the general weight conditions with the
//! shrinking-region decay, and the damped-energy threshold γ₀.
//!
//! Run with: `cargo run --example general_triple`

use triplesym::frequency::{monitor_weighted_energy, IntegratorSpec};
use triplesym::grid::{Axis, GridSpec};
use triplesym::poly::Poly2;
use triplesym::symbols::{make_family, theta_family, FamilySpec};
use triplesym::weights::{
    build_alpha_partition, build_partition, certify_general_triple_conditions,
    certify_general_weight_conditions, extract_root_profile,
};

fn main() {
    // a = (t − x)², b = 0
    let f = make_family(&FamilySpec::GeneralTriple {
        alpha: Poly2::t().sub(&Poly2::y()),
    })
    .unwrap();
    let grid = GridSpec {
        t: Axis::closed(-0.3, 0.3, 101),
        y: Axis::closed(-0.3, 0.3, 41),
    };
    let rep = certify_general_triple_conditions(&f, &grid);
    println!(
        "a = (t−x)²: a³/Δ = {:.6} (exact 1/4), |∂ₜb|/(√a|∂ₜa|) = {}",
        rep.constants[0].value, rep.constants[1].value
    );

    // saturation family: Δ = 4a³(1 − θ²) gives C = 1/(4(1−θ²))
    let th = theta_family(0.5).unwrap();
    let g1 = GridSpec {
        t: Axis::half_open(0.0, 0.4, 301),
        y: Axis::closed(0.0, 0.0, 1),
    };
    let rep = certify_general_triple_conditions(&th, &g1);
    println!(
        "theta = 0.5: a³/Δ = {:.6} (exact 1/3), |∂ₜb|/(√a|∂ₜa|) = {:.6} (exact θ·(3/2)/√3·(2/(3√3)) scaling)",
        rep.constants[0].value, rep.constants[1].value
    );

    // the partition of the cone by the root curves of a(·, x)
    let part = build_alpha_partition(&f, 0.5, 0.4, 21).unwrap();
    let col = part
        .columns
        .iter()
        .find(|c| (c.x - 0.1).abs() < 1e-9)
        .unwrap();
    println!(
        "\ncolumn x = 0.1: σ = {:?}, t* = {:.3}, s = {:?}",
        col.sigma, col.t_star, col.s
    );
    for piece in &col.pieces {
        println!("  [{:+.3}, {:+.3}]  {:?}", piece.t_lo, piece.t_hi, piece.kind);
    }

    let gw = certify_general_weight_conditions(&f, &part, 60);
    println!(
        "\nweight conditions: C_derivative = {:.4} (exact 2), C_size = {:.4}, pass = {}",
        gw.c_derivative.value, gw.c_size.value, gw.pass
    );
    println!(
        "shrinking-region sups of √a|∂ₓφ|/∂ₜφ at scale 1, 1/2, 1/4: {:?} (decreasing = {})",
        gw.shrink_sups, gw.shrink_decreasing
    );

    // γ-damped energy: measured threshold γ₀ making φ^{-N}e^{-γt}⟨ΛV,V⟩
    // non-increasing along per-frequency trajectories
    let tri = make_family(&FamilySpec::Tricomi { l: 1, c: 0.0 }).unwrap();
    let profile = extract_root_profile(&tri, 0.0).unwrap();
    let partition = build_partition(&profile, 0.25, 0.0).unwrap();
    let spec = IntegratorSpec {
        n_out: 300,
        ..Default::default()
    };
    println!("\ndamped-energy thresholds for tricomi:");
    for n in [8u32, 12, 16] {
        let rep = monitor_weighted_energy(&tri, &partition, 64.0, n, 0.0, &spec).unwrap();
        println!("  N = {n}: γ0 = {:.4}", rep.gamma0);
    }
}
