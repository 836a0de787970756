//! Command-line front end: configuration, orchestration of the
//! certifications and solves, and report emission.
//!
//! Exit codes: 0 all passes, 1 certification failure, 2 configuration error,
//! 3 numerical failure. Identical config + seed produces byte-identical JSON
//! summaries; CSV floats are fixed to 17 significant digits.

use crate::cone::{
    cone_sides_spacelike, energy_inequality_x, solve_cone, stokes_identity_residual, ConeDomain,
    ConeSystem, Scheme, SolveSpec, SpaceDomain, SystemKind,
};
use crate::error::Error;
use crate::expr::parse_poly2;
use crate::frequency::{measure_derivative_loss, monitor_weighted_energy, IntegratorSpec};
use crate::grid::{Axis, GridSpec};
use crate::poly::Poly;
use crate::report::{fmt_f64, write_csv, write_json, CertReport};
use crate::symbols::{
    check_hyperbolicity, make_family_on, theta_family, CoefficientField, Domain, FamilySpec,
    RootProfileSpec,
};
use crate::weights::{
    build_alpha_partition, build_partition, certify_alpha_nu_comparison,
    certify_general_triple_conditions, certify_general_weight_conditions,
    certify_key_proposition, cone_partitions, default_delta, extract_root_profile,
};
use crate::Result;
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::sync::Arc;

// ---------------------------------------------------------------------------
// configuration
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(default)]
pub struct FamilyConfig {
    /// tricomi | theta | prescribed | general-triple | expr
    pub kind: String,
    pub l: u32,
    pub c: f64,
    pub theta: f64,
    /// expression for α (general-triple) in t, x
    pub alpha: String,
    /// expressions for a, b (expr kind / prescribed a)
    pub a: String,
    pub b: String,
    /// prescribed root profile: ν₁ real root, (re₂, im₂) the pair, each an
    /// expression in x (constants allowed)
    pub nu1: String,
    pub re2: String,
    pub im2: String,
    /// 0 → automatic feasibility scaling
    pub kappa: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct DomainConfig {
    pub t: [f64; 2],
    pub y: [f64; 2],
}

impl Default for DomainConfig {
    fn default() -> Self {
        DomainConfig {
            t: [f64::NAN, f64::NAN],
            y: [f64::NAN, f64::NAN],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct RunSection {
    pub seed: u64,
    pub out: PathBuf,
    /// 0 → leave the global thread pool alone
    pub threads: usize,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            seed: 42,
            out: PathBuf::from("out"),
            threads: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct CertifySection {
    /// near-degeneracy window (0, t_max] for the eigenvalue-bound grids
    pub t_max: f64,
    pub grid_points: usize,
    pub k: f64,
    /// which certifications to run (empty = all)
    pub modules: Vec<String>,
}

impl Default for CertifySection {
    fn default() -> Self {
        CertifySection {
            t_max: 0.05,
            grid_points: 10_000,
            k: crate::bezoutian::DEFAULT_K,
            modules: vec![],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SolveTSection {
    pub xi: f64,
    pub n: u32,
    pub gamma: f64,
}

impl Default for SolveTSection {
    fn default() -> Self {
        SolveTSection {
            xi: 64.0,
            n: 8,
            gamma: 0.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepSection {
    pub xi_min: f64,
    pub xi_max: f64,
    pub n_max: u32,
    pub resonant: bool,
    pub t_end: f64,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            xi_min: 16.0,
            xi_max: 16384.0,
            n_max: 40,
            resonant: true,
            t_end: 0.5,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SolveXSection {
    pub slope: f64,
    pub height: f64,
    pub nx: usize,
    pub cfl: f64,
    /// upwind | lax-friedrichs | centered-rk4
    pub scheme: String,
    pub n: u32,
}

impl Default for SolveXSection {
    fn default() -> Self {
        SolveXSection {
            slope: 1.0,
            height: 0.2,
            nx: 256,
            cfl: 0.45,
            scheme: "upwind".into(),
            n: 6,
        }
    }
}

/// Everything a run needs; serializable so a run is reproducible from its
/// config + seed.
#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(default)]
pub struct RunConfig {
    pub family: FamilyConfig,
    pub domain: DomainConfig,
    pub run: RunSection,
    pub certify: CertifySection,
    pub solve_t: SolveTSection,
    pub sweep: SweepSection,
    pub solve_x: SolveXSection,
}

impl RunConfig {
    pub fn from_toml(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("bad config: {e}")))
    }
}

fn parse_y_poly(src: &str, what: &str) -> Result<Poly> {
    let p2 = parse_poly2(src)?;
    if p2.coeffs.len() > 1 {
        return Err(Error::Config(format!("{what} must not depend on t: `{src}`")));
    }
    Ok(Poly::new(p2.coeffs[0].clone()))
}

/// Build the coefficient field a config describes.
pub fn build_field(cfg: &RunConfig) -> Result<CoefficientField> {
    let fam = &cfg.family;
    let domain = if cfg.domain.t[0].is_nan() {
        None
    } else {
        Some(Domain::new(
            cfg.domain.t[0],
            cfg.domain.t[1],
            cfg.domain.y[0],
            cfg.domain.y[1],
        ))
    };
    let kind = fam.kind.as_str();
    match kind {
        "tricomi" => make_family_on(&FamilySpec::Tricomi { l: fam.l, c: fam.c }, domain),
        "theta" => theta_family(fam.theta),
        "prescribed" => {
            let a = if fam.a.is_empty() {
                parse_poly2("t + 0.1")?
            } else {
                parse_poly2(&fam.a)?
            };
            make_family_on(
                &FamilySpec::PrescribedDelta {
                    a,
                    profile: RootProfileSpec::ConjugatePair {
                        nu1: parse_y_poly(&fam.nu1, "nu1")?,
                        re2: parse_y_poly(&fam.re2, "re2")?,
                        im2: parse_y_poly(&fam.im2, "im2")?,
                    },
                    kappa: if fam.kappa > 0.0 { Some(fam.kappa) } else { None },
                },
                domain,
            )
        }
        "general-triple" => make_family_on(
            &FamilySpec::GeneralTriple {
                alpha: parse_poly2(&fam.alpha)?,
            },
            domain,
        ),
        "expr" => make_family_on(
            &FamilySpec::Expr {
                a: parse_poly2(&fam.a)?,
                b: if fam.b.is_empty() {
                    crate::poly::Poly2::zero()
                } else {
                    parse_poly2(&fam.b)?
                },
            },
            domain,
        ),
        other => {
            // inline `a=<expr>` shorthand
            if let Some(expr) = other.strip_prefix("a=") {
                make_family_on(
                    &FamilySpec::Expr {
                        a: parse_poly2(expr)?,
                        b: if fam.b.is_empty() {
                            crate::poly::Poly2::zero()
                        } else {
                            parse_poly2(&fam.b)?
                        },
                    },
                    domain,
                )
            } else {
                Err(Error::Config(format!("unknown family kind `{other}`")))
            }
        }
    }
}

fn ensure_out(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    Ok(())
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    pass: bool,
    files: Vec<String>,
    config: &'a RunConfig,
}

fn write_manifest(cfg: &RunConfig, command: &str, pass: bool, files: &[String]) -> Result<()> {
    let manifest = Manifest {
        command,
        pass,
        files: files.to_vec(),
        config: cfg,
    };
    write_json(&cfg.run.out.join("manifest.json"), &manifest)?;
    Ok(())
}

fn init_threads(cfg: &RunConfig) {
    let n = std::env::var("TRIPLESYM_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .unwrap_or(cfg.run.threads);
    if n > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

// ---------------------------------------------------------------------------
// certify
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct CertifySummary {
    family: String,
    pass: bool,
    hyperbolic: bool,
    effective: bool,
    reports: Vec<CertReport>,
    notes: Vec<String>,
}

fn wants(cfg: &RunConfig, module: &str) -> bool {
    cfg.certify.modules.is_empty() || cfg.certify.modules.iter().any(|m| m == module)
}

/// Run the symbol checks plus the eigenvalue-bound, matrix-order,
/// derivative-estimate and weight certifications; write reports; return the
/// exit code (0 pass, 1 any failure).
pub fn cmd_certify(cfg: &RunConfig) -> Result<i32> {
    init_threads(cfg);
    let field = build_field(cfg)?;
    ensure_out(&cfg.run.out)?;
    let mut files = Vec::new();
    let mut reports: Vec<CertReport> = Vec::new();
    let mut notes = Vec::new();

    // hyperbolicity scan over the whole box
    let ny = if field.domain.y_lo == field.domain.y_hi {
        1
    } else {
        41
    };
    let scan = GridSpec {
        t: Axis::closed(field.domain.t_lo, field.domain.t_hi, 201),
        y: Axis::closed(field.domain.y_lo, field.domain.y_hi, ny),
    };
    let hyp = check_hyperbolicity(&field, &scan);
    let effective = hyp.triple_points.iter().all(|p| p.effective);
    if !hyp.hyperbolic() {
        notes.push(format!(
            "hyperbolicity violated at {} grid points (Δ_min = {:.3e})",
            hyp.violation_points.len(),
            hyp.delta_min
        ));
    }
    if !effective {
        let p = hyp.triple_points.iter().find(|p| !p.effective).unwrap();
        notes.push(format!(
            "not effectively hyperbolic at triple point ({}, {})",
            p.t, p.y
        ));
    }
    let hyp_path = cfg.run.out.join("hyperbolicity.json");
    write_json(&hyp_path, &hyp)?;
    files.push("hyperbolicity.json".into());

    let mut pass = hyp.hyperbolic() && effective;

    let is_general = cfg.family.kind == "general-triple";
    if pass && is_general {
        // admissibility conditions on the two-sided box
        let grid = GridSpec {
            t: Axis::closed(field.domain.t_lo, field.domain.t_hi, 101),
            y: Axis::closed(field.domain.y_lo, field.domain.y_hi, 41),
        };
        let rep = certify_general_triple_conditions(&field, &grid);
        pass &= rep.pass;
        reports.push(rep);
        let part = build_alpha_partition(&field, cfg.solve_x.slope, cfg.solve_x.height, 41)?;
        let gw = certify_general_weight_conditions(&field, &part, 60);
        pass &= gw.pass;
        let gw_path = cfg.run.out.join("general_weights.json");
        write_json(&gw_path, &gw)?;
        files.push("general_weights.json".into());
    } else if pass {
        let nyc = if ny == 1 { 1 } else { 25 };
        let nt = (cfg.certify.grid_points / nyc).max(16);
        let region = GridSpec {
            t: Axis::half_open(0.0, cfg.certify.t_max, nt),
            y: Axis::closed(field.domain.y_lo, field.domain.y_hi, nyc),
        };
        if wants(cfg, "bezoutian") {
            let skon = crate::bezoutian::certify_skon_bounds(&field, &region, cfg.certify.k)?;
            let fine =
                crate::bezoutian::certify_skon_bounds(&field, &region.refined(), cfg.certify.k)?;
            pass &= skon.pass && fine.pass;
            write_csv(
                &cfg.run.out.join("skon_bounds.csv"),
                &["t", "y", "a", "delta", "lambda1", "lambda2", "lambda3"],
                &skon.rows,
            )?;
            files.push("skon_bounds.csv".into());
            let skon_path = cfg.run.out.join("skon_bounds.json");
            write_json(&skon_path, &skon)?;
            files.push("skon_bounds.json".into());
            let orders_grid = GridSpec {
                t: Axis::half_open(0.0, cfg.certify.t_max, 60),
                y: Axis::closed(field.domain.y_lo, field.domain.y_hi, 3.min(nyc)),
            };
            let orders = crate::bezoutian::certify_matrix_orders(&field, &orders_grid)?;
            pass &= orders.pass;
            reports.push(orders);
        }
        if wants(cfg, "calculus") {
            let mut mcs = crate::calculus::certify_coefficient_derivatives(&field, &region);
            mcs.extend(crate::calculus::certify_eigenvalue_derivatives(
                &field, &region,
            ));
            mcs.push(crate::calculus::certify_lambda1_log_derivative(
                &field,
                &region,
                &|t, _| t,
            ));
            let ok = mcs.iter().all(crate::calculus::usable);
            pass &= ok;
            let mut rep = CertReport::passing("derivative_estimates", mcs);
            rep.pass = ok;
            reports.push(rep);
        }
        if wants(cfg, "weights") {
            let profile = extract_root_profile(&field, 0.0)?;
            let (cmp_ok, witness) = certify_alpha_nu_comparison(&profile, 0.1);
            notes.push(format!(
                "α/ν comparison at ε = 0.1: {} (witness root {})",
                if cmp_ok { "holds" } else { "violated" },
                witness + 1
            ));
            let delta_end = default_delta(&profile, field.domain.t_hi);
            let partition = build_partition(&profile, delta_end, 0.0)?;
            let rep = certify_key_proposition(&field, &[partition], 400)?;
            pass &= rep.pass;
            reports.push(rep);
        }
    }

    let summary = CertifySummary {
        family: field.name.clone(),
        pass,
        hyperbolic: hyp.hyperbolic(),
        effective,
        reports,
        notes,
    };
    write_json(&cfg.run.out.join("certify.json"), &summary)?;
    files.push("certify.json".into());
    write_manifest(cfg, "certify", pass, &files)?;
    for r in &summary.reports {
        println!(
            "{}: {}",
            r.name,
            if r.pass { "pass" } else { "FAIL" }
        );
    }
    println!("certify: {}", if pass { "pass" } else { "FAIL" });
    Ok(if pass { 0 } else { 1 })
}

// ---------------------------------------------------------------------------
// solve-t
// ---------------------------------------------------------------------------

/// Per-frequency weighted-energy run: trace CSV + verdict JSON.
pub fn cmd_solve_t(cfg: &RunConfig) -> Result<i32> {
    init_threads(cfg);
    let field = build_field(cfg)?;
    ensure_out(&cfg.run.out)?;
    let profile = extract_root_profile(&field, 0.0)?;
    let delta_end = default_delta(&profile, field.domain.t_hi);
    let partition = build_partition(&profile, delta_end, 0.0)?;
    let spec = IntegratorSpec::default();
    let report = monitor_weighted_energy(
        &field,
        &partition,
        cfg.solve_t.xi,
        cfg.solve_t.n,
        cfg.solve_t.gamma,
        &spec,
    )?;
    // trace CSV: t, piece, weighted energy, λ_k|V_k|² components
    let mut rows = Vec::new();
    for (j, tr) in report.traces.iter().enumerate() {
        for (k, &t) in tr.times.iter().enumerate() {
            rows.push(vec![
                t,
                j as f64,
                tr.energy[k],
                tr.components[k][0],
                tr.components[k][1],
                tr.components[k][2],
            ]);
        }
    }
    write_csv(
        &cfg.run.out.join("trace.csv"),
        &["t", "piece", "energy", "comp1", "comp2", "comp3"],
        &rows,
    )?;
    write_json(&cfg.run.out.join("energy.json"), &report)?;
    write_manifest(
        cfg,
        "solve-t",
        report.pass,
        &["trace.csv".into(), "energy.json".into()],
    )?;
    println!(
        "solve-t: xi = {}, N = {} (used {}), gamma0 = {}, {}",
        report.xi,
        report.n_exponent,
        report.n_used,
        fmt_f64(report.gamma0),
        if report.pass { "pass" } else { "FAIL" }
    );
    Ok(if report.pass { 0 } else { 1 })
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

/// Loss-of-derivatives sweep: N₀ summary JSON.
pub fn cmd_sweep(cfg: &RunConfig) -> Result<i32> {
    init_threads(cfg);
    let field = build_field(cfg)?;
    ensure_out(&cfg.run.out)?;
    let mut xi_list = Vec::new();
    let mut xi = cfg.sweep.xi_min.max(1.0);
    while xi <= cfg.sweep.xi_max * (1.0 + 1e-12) {
        xi_list.push(xi);
        xi *= 2.0;
    }
    let spec = IntegratorSpec {
        n_out: 200,
        ..Default::default()
    };
    let report = measure_derivative_loss(
        &field,
        0.0,
        &xi_list,
        cfg.sweep.t_end,
        cfg.sweep.resonant,
        cfg.sweep.n_max,
        &spec,
    );
    write_json(&cfg.run.out.join("sweep.json"), &report)?;
    write_manifest(
        cfg,
        "sweep",
        report.verdict == crate::frequency::LossVerdict::Bounded,
        &["sweep.json".into()],
    )?;
    match report.n0 {
        Some(n0) => {
            println!(
                "sweep: N0 = {n0} (halves {:?}), {} frequencies",
                report.n0_halves,
                report.rho.len()
            );
            Ok(0)
        }
        None => {
            println!("sweep: failure verdict (no bounded N0 ≤ {})", cfg.sweep.n_max);
            Ok(1)
        }
    }
}

// ---------------------------------------------------------------------------
// solve-x
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct SolveXSummary {
    family: String,
    spacelike_margin: f64,
    stokes_relative_residual: Option<f64>,
    region_verdicts: Vec<crate::cone::RegionVerdict>,
    general_weights: Option<crate::weights::GeneralWeightReport>,
    pass: bool,
}

/// Cone solve: binary snapshots + sidecar, energy verdicts per subregion (or
/// the general-triple weight verdicts).
pub fn cmd_solve_x(cfg: &RunConfig) -> Result<i32> {
    init_threads(cfg);
    let field = build_field(cfg)?;
    ensure_out(&cfg.run.out)?;
    let cone = ConeDomain {
        slope: cfg.solve_x.slope,
        height: cfg.solve_x.height,
    };
    let scheme = match cfg.solve_x.scheme.as_str() {
        "upwind" => Scheme::Upwind,
        "lax-friedrichs" => Scheme::LaxFriedrichs,
        "centered-rk4" => Scheme::CenteredRk4,
        other => return Err(Error::Config(format!("unknown scheme `{other}`"))),
    };
    let (slope, height) = (cone.slope, cone.height);
    let forcing = move |t: f64, x: f64| -> f64 {
        let s = x / (0.4 * slope * height);
        let shape = if s.abs() >= 1.0 {
            0.0
        } else {
            (1.0 - 1.0 / (1.0 - s * s)).exp()
        };
        crate::frequency::smooth_switch(t / (0.1 * height)) * shape
    };
    let sys =
        ConeSystem::new(&field, SystemKind::Reduced).with_forcing(Arc::new(forcing));
    let space = cone_sides_spacelike(&sys, &cone, 33);
    if !space.pass {
        return Err(Error::Input(format!(
            "cone sides are not space-like: margin = {:.3e} (τ_max = {:.3})",
            space.margin, space.tau_max
        )));
    }
    let result = solve_cone(
        &sys,
        &SpaceDomain::Cone(cone),
        &|_| nalgebra::Vector3::zeros(),
        None,
        &SolveSpec {
            scheme,
            nx: cfg.solve_x.nx,
            cfl: cfg.solve_x.cfl,
            ..Default::default()
        },
    )?;

    // flat binary snapshots + JSON sidecar
    let mut bytes = Vec::with_capacity(result.states.len() * result.x_nodes.len() * 24);
    for level in &result.states {
        for s in level {
            for v in &s[0..3] {
                bytes.extend_from_slice(&v.to_le_bytes());
            }
        }
    }
    std::fs::write(cfg.run.out.join("field.bin"), &bytes)?;
    #[derive(Serialize)]
    struct Sidecar {
        nt: usize,
        nx: usize,
        dt: f64,
        dx: f64,
        t0: f64,
        x0: f64,
        components: usize,
        layout: &'static str,
        dtype: &'static str,
        endianness: &'static str,
    }
    write_json(
        &cfg.run.out.join("field.json"),
        &Sidecar {
            nt: result.times.len(),
            nx: result.x_nodes.len(),
            dt: result.dt,
            dx: result.dx,
            t0: result.times[0],
            x0: result.x_nodes[0],
            components: 3,
            layout: "level-major, row-major in x, components fastest",
            dtype: "f64",
            endianness: "little",
        },
    )?;

    let mut pass = true;
    let mut verdicts = Vec::new();
    let mut general = None;
    let mut stokes_rel = None;
    if cfg.family.kind == "general-triple" {
        let part = build_alpha_partition(&field, cone.slope, cone.height, 41)?;
        let gw = certify_general_weight_conditions(&field, &part, 60);
        pass &= gw.pass;
        general = Some(gw);
    } else {
        let partitions = cone_partitions(&field, &result.x_nodes, cone.height)?;
        let n_pieces = partitions[0].pieces.len();
        for j in 0..n_pieces {
            let v = energy_inequality_x(&result, &field, &partitions, &forcing, j, cfg.solve_x.n)?;
            pass &= v.pass;
            verdicts.push(v);
        }
        // interior Stokes residual on a centered rectangle
        let t_mid = (0.3 * cone.height, 0.7 * cone.height);
        let x_half = 0.25 * cone.slope * cone.height;
        let sr = stokes_identity_residual(
            &result,
            &field,
            (t_mid.0, t_mid.1, -x_half, x_half),
            None,
            0,
            Some(&forcing),
        )?;
        stokes_rel = Some(sr.relative);
    }

    let summary = SolveXSummary {
        family: field.name.clone(),
        spacelike_margin: space.margin,
        stokes_relative_residual: stokes_rel,
        region_verdicts: verdicts,
        general_weights: general,
        pass,
    };
    write_json(&cfg.run.out.join("solve_x.json"), &summary)?;
    write_manifest(
        cfg,
        "solve-x",
        pass,
        &["field.bin".into(), "field.json".into(), "solve_x.json".into()],
    )?;
    println!("solve-x: {}", if pass { "pass" } else { "FAIL" });
    Ok(if pass { 0 } else { 1 })
}

// ---------------------------------------------------------------------------
// argument parsing
// ---------------------------------------------------------------------------

#[derive(Parser)]
#[command(
    name = "triplesym",
    about = "Bezoutian symmetrizers and weighted-energy machinery for triple-characteristic hyperbolic symbols"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct CommonArgs {
    /// TOML config; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// tricomi | theta | prescribed | general-triple | a=<expr>
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    l: Option<u32>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,
    /// α expression for general-triple, e.g. "t-x"
    #[arg(long)]
    alpha: Option<String>,
    /// b expression for inline families
    #[arg(long)]
    b: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the eigenvalue, derivative and weight certifications
    Certify {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        k: Option<f64>,
        #[arg(long)]
        modules: Option<String>,
    },
    /// Per-frequency weighted-energy run
    SolveT {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        xi: Option<f64>,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        gamma: Option<f64>,
    },
    /// Space-time cone solve with subregion energy verdicts
    SolveX {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        slope: Option<f64>,
        #[arg(long)]
        height: Option<f64>,
        #[arg(long)]
        nx: Option<usize>,
        #[arg(long)]
        scheme: Option<String>,
    },
    /// Loss-of-derivatives sweep over a frequency range `lo..hi`
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// e.g. 16..16384 (geometric, factor 2)
        #[arg(long)]
        xi: Option<String>,
    },
}

fn apply_common(cfg: &mut RunConfig, common: &CommonArgs) -> Result<()> {
    if let Some(f) = &common.family {
        cfg.family.kind = f.clone();
    }
    if let Some(l) = common.l {
        cfg.family.l = l;
    }
    if let Some(c) = common.c {
        cfg.family.c = c;
    }
    if let Some(th) = common.theta {
        cfg.family.theta = th;
    }
    if let Some(al) = &common.alpha {
        cfg.family.alpha = al.clone();
    }
    if let Some(b) = &common.b {
        cfg.family.b = b.clone();
    }
    if let Some(out) = &common.out {
        cfg.run.out = out.clone();
    }
    if let Some(seed) = common.seed {
        cfg.run.seed = seed;
    }
    if cfg.family.kind.is_empty() {
        return Err(Error::Config("no family selected (use --family)".into()));
    }
    Ok(())
}

fn load_config(common: &CommonArgs) -> Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::from_toml(path)?,
        None => RunConfig::default(),
    };
    apply_common(&mut cfg, common)?;
    Ok(cfg)
}

/// Binary entry point; returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Certify { common, k, modules } => load_config(common).and_then(|mut cfg| {
            if let Some(k) = k {
                cfg.certify.k = *k;
            }
            if let Some(m) = modules {
                cfg.certify.modules = m.split(',').map(|s| s.trim().to_string()).collect();
            }
            cmd_certify(&cfg)
        }),
        Command::SolveT { common, xi, n, gamma } => load_config(common).and_then(|mut cfg| {
            if let Some(xi) = xi {
                cfg.solve_t.xi = *xi;
            }
            if let Some(n) = n {
                cfg.solve_t.n = *n;
            }
            if let Some(g) = gamma {
                cfg.solve_t.gamma = *g;
            }
            cmd_solve_t(&cfg)
        }),
        Command::SolveX {
            common,
            slope,
            height,
            nx,
            scheme,
        } => load_config(common).and_then(|mut cfg| {
            if let Some(s) = slope {
                cfg.solve_x.slope = *s;
            }
            if let Some(h) = height {
                cfg.solve_x.height = *h;
            }
            if let Some(nx) = nx {
                cfg.solve_x.nx = *nx;
            }
            if let Some(sch) = scheme {
                cfg.solve_x.scheme = sch.clone();
            }
            cmd_solve_x(&cfg)
        }),
        Command::Sweep { common, xi } => load_config(common).and_then(|mut cfg| {
            if let Some(range) = xi {
                let parts: Vec<&str> = range.split("..").collect();
                if parts.len() != 2 {
                    return Err(Error::Config(format!("bad xi range `{range}`")));
                }
                cfg.sweep.xi_min = parts[0]
                    .parse()
                    .map_err(|_| Error::Config(format!("bad xi `{}`", parts[0])))?;
                cfg.sweep.xi_max = parts[1]
                    .parse()
                    .map_err(|_| Error::Config(format!("bad xi `{}`", parts[1])))?;
            }
            cmd_sweep(&cfg)
        }),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg_for(kind: &str, out: &Path) -> RunConfig {
        let mut cfg = RunConfig::default();
        cfg.family.kind = kind.into();
        cfg.family.l = 1;
        cfg.family.nu1 = "-0.05".into();
        cfg.family.re2 = "0.1".into();
        cfg.family.im2 = "0.05".into();
        cfg.family.alpha = "t - x".into();
        cfg.run.out = out.to_path_buf();
        cfg
    }

    #[test]
    fn certify_tricomi_passes_and_l2_fails() {
        let dir = std::env::temp_dir().join("triplesym-test-certify");
        let mut cfg = cfg_for("tricomi", &dir.join("ok"));
        cfg.certify.grid_points = 800;
        assert_eq!(cmd_certify(&cfg).unwrap(), 0);
        assert!(dir.join("ok/manifest.json").exists());
        assert!(dir.join("ok/skon_bounds.csv").exists());

        let mut cfg2 = cfg_for("tricomi", &dir.join("l2"));
        cfg2.family.l = 2;
        cfg2.certify.grid_points = 400;
        assert_eq!(cmd_certify(&cfg2).unwrap(), 1);
        let text = std::fs::read_to_string(dir.join("l2/certify.json")).unwrap();
        assert!(text.contains("not effectively hyperbolic"));
    }

    #[test]
    fn certify_negative_a_fails_hyperbolicity() {
        let dir = std::env::temp_dir().join("triplesym-test-nega");
        let mut cfg = cfg_for("a=-t", &dir);
        cfg.certify.grid_points = 400;
        assert_eq!(cmd_certify(&cfg).unwrap(), 1);
    }

    #[test]
    fn sweep_writes_summary() {
        let dir = std::env::temp_dir().join("triplesym-test-sweep");
        let mut cfg = cfg_for("tricomi", &dir);
        cfg.sweep.xi_min = 16.0;
        cfg.sweep.xi_max = 64.0;
        cfg.sweep.t_end = 0.3;
        assert_eq!(cmd_sweep(&cfg).unwrap(), 0);
        let text = std::fs::read_to_string(dir.join("sweep.json")).unwrap();
        assert!(text.contains("n0"));
    }

    #[test]
    fn reproducible_json_summaries() {
        let d1 = std::env::temp_dir().join("triplesym-test-repro1");
        let d2 = std::env::temp_dir().join("triplesym-test-repro2");
        let mut c1 = cfg_for("tricomi", &d1);
        c1.sweep.xi_min = 16.0;
        c1.sweep.xi_max = 32.0;
        c1.sweep.t_end = 0.25;
        let mut c2 = c1.clone();
        c2.run.out = d2.clone();
        cmd_sweep(&c1).unwrap();
        cmd_sweep(&c2).unwrap();
        let a = std::fs::read(d1.join("sweep.json")).unwrap();
        let b = std::fs::read(d2.join("sweep.json")).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn solve_t_emits_trace() {
        let dir = std::env::temp_dir().join("triplesym-test-solvet");
        let mut cfg = cfg_for("prescribed", &dir);
        cfg.solve_t.xi = 16.0;
        cfg.solve_t.n = 6;
        assert_eq!(cmd_solve_t(&cfg).unwrap(), 0);
        let text = std::fs::read_to_string(dir.join("trace.csv")).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("t,piece,energy"));
        assert!(lines.len() > 100);
    }

    #[test]
    fn solve_x_emits_snapshots() {
        let dir = std::env::temp_dir().join("triplesym-test-solvex");
        let mut cfg = cfg_for("tricomi", &dir);
        cfg.solve_x.nx = 96;
        cfg.solve_x.height = 0.2;
        assert_eq!(cmd_solve_x(&cfg).unwrap(), 0);
        let sidecar = std::fs::read_to_string(dir.join("field.json")).unwrap();
        assert!(sidecar.contains("little"));
        let bin = std::fs::read(dir.join("field.bin")).unwrap();
        assert!(bin.len() % 24 == 0); // 3 components × f64
    }

    #[test]
    fn config_round_trip() {
        let cfg = cfg_for("theta", Path::new("out"));
        let text = toml::to_string(&cfg).unwrap();
        let back: RunConfig = toml::from_str(&text).unwrap();
        assert_eq!(back.family.kind, "theta");
        assert_eq!(back.run.seed, cfg.run.seed);
    }
}
