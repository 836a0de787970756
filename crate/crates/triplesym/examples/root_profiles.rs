//! Discriminant root profiles and the weight partitions they induce: the
//! normalized cubic, its root classification, ψ = max(0, Re ν₂), the
//! breakpoints (0, ψ/2, ψ, δ), and the key weight inequalities.
//!
//! Run with: `cargo run --example root_profiles`

use triplesym::poly::{Poly, Poly2};
use triplesym::symbols::{make_family, FamilySpec, RootProfileSpec};
use triplesym::weights::{
    build_partition, certify_alpha_nu_comparison, certify_key_proposition, default_delta,
    extract_root_profile,
};

fn main() {
    // collapsed partition: Δ = 4t³ has the triple root profile at 0
    let tri = make_family(&FamilySpec::Tricomi { l: 1, c: 0.0 }).unwrap();
    let p = extract_root_profile(&tri, 0.0).unwrap();
    println!(
        "tricomi: e2 = {:.3}, ν = {:?}, ψ = {}, α = {:.1e}",
        p.e2,
        p.nu.map(|z| (z.re, z.im)),
        p.psi,
        p.alpha
    );
    let part = build_partition(&p, 0.25, 0.0).unwrap();
    println!("  pieces: {} (single weight φ = t)", part.pieces.len());
    let rep = certify_key_proposition(&tri, &[part], 400).unwrap();
    println!(
        "  key inequalities: C1 = {:.4} (exact 1/4), C2 = {:.4} (exact 3), C3 = {:.4} (exact 1)",
        rep.constants[0].value, rep.constants[1].value, rep.constants[2].value
    );

    // conjugate-pair profile with ψ = 0.1 > 0: three subintervals
    let f = make_family(&FamilySpec::PrescribedDelta {
        a: Poly2::t().add(&Poly2::constant(0.1)),
        profile: RootProfileSpec::ConjugatePair {
            nu1: Poly::constant(-0.05),
            re2: Poly::constant(0.1),
            im2: Poly::constant(0.05),
        },
        kappa: None,
    })
    .unwrap();
    let p = extract_root_profile(&f, 0.0).unwrap();
    println!(
        "\nprescribed: case = {:?}, ν1 = {:.4}, ν2 = {:.4}±{:.4}i, ψ = {:.4}, α = {:.4}",
        p.case_tag, p.nu[0].re, p.nu[1].re, p.nu[1].im, p.psi, p.alpha
    );
    let (cmp, witness) = certify_alpha_nu_comparison(&p, 0.1);
    println!("  |ν_j| ≥ ε·α at ε = 0.1: {} (witness root {})", cmp, witness + 1);
    let delta_end = default_delta(&p, f.domain.t_hi);
    let part = build_partition(&p, delta_end, 0.0).unwrap();
    println!("  breakpoints: {:?}", part.breakpoints);
    for piece in &part.pieces {
        println!(
            "    [{:.3}, {:.3}]  {:?}  g = φ^(2·({})·N − 1)",
            piece.t_lo, piece.t_hi, piece.kind, piece.exp_sign
        );
    }
    let rep = certify_key_proposition(&f, &[part], 400).unwrap();
    println!("  key inequalities pass = {}:", rep.pass);
    for c in &rep.constants {
        println!("    {:<28} C = {:.4}  ratio(h/2) = {:.3}", c.name, c.value, c.refinement_ratio);
    }

    // three-real profile: ψ = 0 automatically
    let g = make_family(&FamilySpec::PrescribedDelta {
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
    let p = extract_root_profile(&g, 0.0).unwrap();
    println!(
        "\nthree-real: case = {:?}, ν = {:?}, ψ = {}",
        p.case_tag,
        p.nu.map(|z| z.re),
        p.psi
    );
}
