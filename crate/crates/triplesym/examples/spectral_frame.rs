//! Diagonalize the Bezout matrix: eigenvalue grading λ₁ ≲ a², λ₂ ≍ a,
//! λ₃ ≍ 3, the cofactor eigenvector frame, and the Jacobi fallback at the
//! degeneracy.
//!
//! Run with: `cargo run --example spectral_frame`

use triplesym::bezoutian::{
    build_bezoutian, characteristic_cubic, eigen_decompose, DEFAULT_K,
};

fn main() {
    // exact frame at the triple point
    let frame = eigen_decompose(&build_bezoutian(0.0, 0.0));
    println!(
        "a = b = 0: λ = {:?}, degenerate = {}",
        frame.lambda, frame.degenerate
    );

    // characteristic cubic of S at a = 1, b = 0 and its root λ = 2
    let bez = build_bezoutian(1.0, 0.0);
    let (c2, c1, c0) = characteristic_cubic(&bez);
    println!("q(λ) = λ³ + ({c2})λ² + ({c1})λ + ({c0}); q(2) = {}", 8.0 + 4.0 * c2 + 2.0 * c1 + c0);
    let frame = eigen_decompose(&bez);
    println!("a = 1, b = 0: λ = ({:.6}, {:.6}, {:.6})  [exact: 2−√2, 2, 2+√2]",
        frame.lambda[0], frame.lambda[1], frame.lambda[2]);

    // eigenvalue grading along a → 0
    println!("\n  a        λ1           λ1/a²     λ2/a      λ3        d1/a");
    for k in 1..=6 {
        let a = 10f64.powi(-k);
        let bez = build_bezoutian(a, 0.5 * (4.0 * a * a * a / 27.0).sqrt());
        let f = eigen_decompose(&bez);
        println!(
            "  1e-{k}   {:.6e}  {:.5}   {:.5}   {:.5}  {:.4} {}",
            f.lambda[0],
            f.lambda[0] / (a * a),
            f.lambda[1] / a,
            f.lambda[2],
            f.d[0] / a,
            if f.used_fallback { "(Jacobi fallback)" } else { "" }
        );
    }

    // the two-sided pinch of each eigenvalue at small a
    let a = 1e-2;
    let bez = build_bezoutian(a, 0.0);
    let f = eigen_decompose(&bez);
    let delta = bez.discriminant();
    println!(
        "\nbounds at a = 1e-2 (K = {DEFAULT_K}):\n  {:.6e} ≤ λ1 = {:.6e} ≤ {:.6e}",
        delta / (6.0 * a + 2.0 * a * a + 2.0 * a * a * a),
        f.lambda[0],
        (2.0 / 3.0 + DEFAULT_K * a) * a * a
    );
    println!(
        "  {:.6e} ≤ λ2 = {:.6e} ≤ {:.6e}",
        (2.0 - DEFAULT_K * a) * a,
        f.lambda[1],
        (2.0 + DEFAULT_K * a) * a
    );
    println!(
        "  3 ≤ λ3 = {:.10} ≤ {:.6}",
        f.lambda[2],
        3.0 + DEFAULT_K * a * a
    );

    // frame quality: orthogonality and the symmetrized Λ·Aᵀ
    let tt = frame.t.transpose() * frame.t;
    let laa = frame.lambda_mat() * frame.a_t;
    println!(
        "\n‖TᵀT − I‖ = {:.2e}, ‖ΛAᵀ − (ΛAᵀ)ᵀ‖ = {:.2e}",
        (tt - nalgebra::Matrix3::identity()).norm(),
        (laa - laa.transpose()).norm()
    );
}
