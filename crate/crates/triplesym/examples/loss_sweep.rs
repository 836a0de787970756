//! Empirical loss of derivatives: sweep the forced per-frequency problem
//! over a geometric ξ-range and estimate the least Sobolev gap N₀ with a
//! ξ-uniform response bound.
//!
//! Run with: `cargo run --release --example loss_sweep`

use triplesym::frequency::{measure_derivative_loss, IntegratorSpec};
use triplesym::poly::Poly2;
use triplesym::symbols::{make_family, FamilySpec};

fn main() {
    let spec = IntegratorSpec {
        n_out: 200,
        ..Default::default()
    };
    let xi_list: Vec<f64> = (4..=12).map(|k| (1u64 << k) as f64).collect();

    for (name, f, resonant) in [
        (
            "strictly hyperbolic a=1",
            make_family(&FamilySpec::Expr {
                a: Poly2::constant(1.0),
                b: Poly2::zero(),
            })
            .unwrap(),
            true,
        ),
        (
            "tricomi(1,0)",
            make_family(&FamilySpec::Tricomi { l: 1, c: 0.0 }).unwrap(),
            true,
        ),
        (
            "non-hyperbolic a=-t",
            make_family(&FamilySpec::Expr {
                a: Poly2::t().scale(-1.0),
                b: Poly2::zero(),
            })
            .unwrap(),
            false,
        ),
    ] {
        let rep = measure_derivative_loss(&f, 0.0, &xi_list, 0.5, resonant, 40, &spec);
        println!("{name}: verdict = {:?}, N0 = {:?} (halves {:?})", rep.verdict, rep.n0, rep.n0_halves);
        for (xi, rho) in &rep.rho {
            println!("  ξ = {xi:>6}: sup‖U‖²/∫‖F‖² = {rho:.4e}");
        }
        println!();
    }
}
