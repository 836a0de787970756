//! Build the example coefficient families, scan their discriminants, and
//! test effective hyperbolicity at the triple characteristics.
//!
//! Run with: `cargo run --example hyperbolicity`

use triplesym::grid::{Axis, GridSpec};
use triplesym::poly::Poly2;
use triplesym::symbols::{
    check_effective_hyperbolicity, check_effective_hyperbolicity_double, check_hyperbolicity,
    discriminant, make_family, theta_family, FamilySpec,
};

fn main() {
    // Δ = 4a³ − 27b² at a few reference points
    let frozen = make_family(&FamilySpec::Expr {
        a: Poly2::constant(1.0),
        b: Poly2::zero(),
    })
    .unwrap();
    println!(
        "Δ(a=1, b=0) = {}  (roots 0, ±1 of τ³ − τ)",
        discriminant(&frozen, 0.0, 0.0).unwrap()
    );
    let double = make_family(&FamilySpec::Expr {
        a: Poly2::constant(3.0),
        b: Poly2::constant(2.0),
    })
    .unwrap();
    println!(
        "Δ(a=3, b=2) = {}  (double root: τ³ − 3τ − 2 = (τ+1)²(τ−2))",
        discriminant(&double, 0.0, 0.0).unwrap()
    );

    // the degenerate example operator family at both exponents
    for l in [1u32, 2] {
        let f = make_family(&FamilySpec::Tricomi { l, c: 0.0 }).unwrap();
        let grid = GridSpec {
            t: Axis::closed(f.domain.t_lo, f.domain.t_hi, 201),
            y: Axis::closed(-0.2, 0.2, 5),
        };
        let rep = check_hyperbolicity(&f, &grid);
        let eff = check_effective_hyperbolicity(&f, (0.0, 0.0)).unwrap();
        println!(
            "tricomi(l={l}): Δ_min = {:.3e}, {} violations, {} triple points, effective = {eff}",
            rep.delta_min,
            rep.violation_points.len(),
            rep.triple_points.len()
        );
    }

    // a = −t loses hyperbolicity for t > 0
    let bad = make_family(&FamilySpec::Expr {
        a: Poly2::t().scale(-1.0),
        b: Poly2::zero(),
    })
    .unwrap();
    let grid = GridSpec {
        t: Axis::closed(0.0, 0.5, 101),
        y: Axis::closed(0.0, 0.0, 1),
    };
    let rep = check_hyperbolicity(&bad, &grid);
    println!(
        "a = −t: Δ_min = {:.3e}, hyperbolic = {}",
        rep.delta_min,
        rep.hyperbolic()
    );

    // double-characteristic variant: a = t² has ∂ₜa = 0 but ∂ₜ²a = 2
    let sq = make_family(&FamilySpec::Expr {
        a: Poly2::t().pow(2),
        b: Poly2::zero(),
    })
    .unwrap();
    println!(
        "a = t² (double-root reduction): effective via second derivative = {}",
        check_effective_hyperbolicity_double(&sq, (0.0, 0.0)).unwrap()
    );

    // saturation family b = θ·(2/(3√3))a^{3/2}
    let th = theta_family(0.9).unwrap();
    println!(
        "theta = 0.9: Δ(0.2) = {:.6e} (= 4(1−θ²)t³ = {:.6e})",
        th.delta(0.2, 0.0),
        4.0 * (1.0 - 0.81) * 0.2f64.powi(3)
    );
}
