use std::time::Instant;

use fracpade::fem::{assemble, build_rhs, RhsMethod};
use fracpade::mesh::{
    gen_graded_square, gen_sphere, gen_torus, read_gmsh, write_off, write_vertex_scalars, MAX_SPHERE_LEVEL,
};
use fracpade::oracle::{
    conv_rate, l2_error_on_mesh, legendre_sum, sphere_series_weights, torus_angles, torus_fields, DENSE_LIMIT,
};
use fracpade::pade::pade_error_bound;
use fracpade::scheme::{scalar_mu, scalar_mu_error, scheme_error_bound};
use fracpade::solver::{estimate_lambda_max, estimate_lambda_min, fractional_apply};
use fracpade::{CoefficientField, Config, Grid, LambdaMax, Mesh, Operator, Pade, ProblemMode, SpectralDecomposition};
use serde_json::{json, Map, Value};

use crate::args::*;
use crate::error::{CliError, Result};
use crate::output::{num, MeshStats, OutDir};

/// What a subcommand hands back for the manifest.
#[derive(Default)]
pub struct Report {
    pub meshes: Vec<MeshStats>,
    pub results: Value,
    pub timing: Map<String, Value>,
}

struct Clock(Instant);

impl Clock {
    fn start() -> Self {
        Clock(Instant::now())
    }

    fn lap(&mut self, timing: &mut Map<String, Value>, key: &str) {
        timing.insert(key.to_string(), json!(self.0.elapsed().as_secs_f64()));
        self.0 = Instant::now();
    }
}

pub fn run(cmd: &Command, out: &mut OutDir) -> Result<Report> {
    match cmd {
        Command::PadeTable(a) => pade_table(a, out),
        Command::ScalarError(a) => scalar_error(a, out),
        Command::SphereConvergence(a) => sphere_convergence(a, out),
        Command::Solve(a) => solve(a, out),
        Command::CompareOracle(a) => compare_oracle(a, out),
        Command::SphereSeries(a) => sphere_series(a, out),
    }
}

fn check_alphas(alphas: &[f64]) -> Result<()> {
    if alphas.is_empty() {
        return Err(CliError::validation("at least one alpha is required"));
    }
    match alphas.iter().find(|a| !(**a > 0.0 && **a < 1.0)) {
        Some(a) => Err(CliError::validation(format!("alpha must lie in (0, 1) (got {a})"))),
        None => Ok(()),
    }
}

fn lambda_max_config(cfg: Config, arg: LambdaMaxArg) -> Config {
    match arg {
        LambdaMaxArg::Auto => cfg,
        LambdaMaxArg::Value(v) => cfg.with_lambda_max(v),
    }
}

fn pade_table(a: &PadeTableArgs, out: &mut OutDir) -> Result<Report> {
    check_alphas(&a.alpha)?;
    if !(a.t_step > 0.0 && a.t_step <= 1.0) {
        return Err(CliError::validation(format!(
            "t-step must lie in (0, 1] (got {})",
            a.t_step
        )));
    }
    if a.m.is_empty() {
        return Err(CliError::validation("at least one order m is required"));
    }
    let steps = (1.0 / a.t_step).round() as usize;
    let ts: Vec<f64> = (0..=steps).map(|k| (k as f64 * a.t_step).min(1.0)).collect();

    let mut table = out.csv("pade_table.csv")?;
    let mut roots = out.csv("pade_roots.csv")?;
    table.row(["m", "alpha", "t", "actual_err", "bound"])?;
    roots.row(["m", "alpha", "index", "num_root", "den_root", "beta"])?;
    let mut worst = 0.0f64;
    for &m in &a.m {
        for &alpha in &a.alpha {
            let p = Pade::new(m, alpha)?;
            for &t in &ts {
                let err = p.remainder(t)?;
                let bound = pade_error_bound(m, alpha, t)?;
                if bound > 0.0 {
                    worst = worst.max(err / bound);
                }
                table.row([m.to_string(), num(alpha), num(t), num(err), num(bound)])?;
            }
            roots.row([
                m.to_string(),
                num(alpha),
                "0".into(),
                String::new(),
                String::new(),
                num(p.beta()[0]),
            ])?;
            for i in 0..m {
                roots.row([
                    m.to_string(),
                    num(alpha),
                    (i + 1).to_string(),
                    num(p.num_roots()[i]),
                    num(p.den_roots()[i]),
                    num(p.beta()[i + 1]),
                ])?;
            }
        }
    }
    table.finish()?;
    roots.finish()?;
    println!("largest actual/bound ratio: {worst:.4}");
    Ok(Report {
        results: json!({ "max_error_over_bound": worst }),
        ..Default::default()
    })
}

fn scalar_error(a: &ScalarErrorArgs, out: &mut OutDir) -> Result<Report> {
    check_alphas(&a.alpha)?;
    let grid = Grid::new(a.lambda_hat, a.lambda_max)?;
    let lo = a.lambda_hat.max(2.0);
    if lo >= a.lambda_max {
        return Err(CliError::validation(format!(
            "lambda-max {} must exceed max(2, lambda-hat) = {lo}",
            a.lambda_max
        )));
    }
    if a.points < 2 {
        return Err(CliError::validation("points must be at least 2"));
    }
    let mut lambdas = vec![a.lambda_hat];
    let (l0, l1) = (lo.ln(), a.lambda_max.ln());
    lambdas.extend((0..a.points).map(|k| {
        if k + 1 == a.points {
            a.lambda_max
        } else {
            (l0 + (l1 - l0) * k as f64 / (a.points - 1) as f64).exp()
        }
    }));

    let mut csv = out.csv("scalar_error.csv")?;
    csv.row(["alpha", "m", "lambda", "mu", "exact", "abs_err", "rel_err", "bound"])?;
    let mut summary = Vec::new();
    for &alpha in &a.alpha {
        let p = Pade::new(a.m, alpha)?;
        let bound = scheme_error_bound(a.m, alpha, a.lambda_hat, a.lambda_max)?;
        let (mut max_abs, mut max_rel) = (0.0f64, 0.0f64);
        for &l in &lambdas {
            let mu = scalar_mu(&p, &grid, l).value;
            let exact = l.powf(-alpha);
            let err = scalar_mu_error(&p, &grid, l)?.abs();
            let rel = l.powf(alpha) * err;
            max_abs = max_abs.max(err);
            max_rel = max_rel.max(rel);
            csv.row([
                num(alpha),
                a.m.to_string(),
                num(l),
                num(mu),
                num(exact),
                num(err),
                num(rel),
                num(bound),
            ])?;
        }
        println!("alpha = {alpha}: max error {max_abs:.3e} (bound {bound:.3e}), max relative error {max_rel:.3e}");
        summary.push(json!({ "alpha": alpha, "max_abs_err": max_abs, "max_rel_err": max_rel, "bound": bound }));
    }
    csv.finish()?;
    println!(
        "L+1 = {} steps, {} solves per operator application",
        grid.num_steps(),
        grid.num_steps() * a.m
    );
    Ok(Report {
        results: json!({ "num_steps": grid.num_steps(), "per_alpha": summary }),
        ..Default::default()
    })
}

fn sphere_convergence(a: &SphereConvergenceArgs, out: &mut OutDir) -> Result<Report> {
    check_alphas(&a.alpha)?;
    if a.levels.is_empty() {
        return Err(CliError::validation("at least one level is required"));
    }
    if let Some(l) = a.levels.iter().find(|&&l| l > MAX_SPHERE_LEVEL) {
        return Err(CliError::validation(format!(
            "sphere level {l} exceeds {MAX_SPHERE_LEVEL}"
        )));
    }
    if a.levels.iter().any(|&l| l > 5) {
        log::warn!("levels above 5 need minutes per alpha");
    }
    let weights: Vec<Vec<f64>> = a
        .alpha
        .iter()
        .map(|&al| sphere_series_weights(al, a.series_terms))
        .collect::<std::result::Result<_, _>>()?;
    let mut report = Report::default();
    let mut clock = Clock::start();
    // table[k] = [(level, dof, error)] for alpha k
    let mut table: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); a.alpha.len()];
    for &level in &a.levels {
        let mesh = gen_sphere::<f64>(level)?;
        let op = assemble_for(&mesh, ProblemMode::ZeroMean, 1.0, 0.0)?;
        report.meshes.push(mesh_stats(&format!("sphere:{level}"), &mesh, &op));
        let f = rhs_for(&mesh, &op, Source::SignZ, a.rhs.into(), a.cg_tol)?;
        for (k, &alpha) in a.alpha.iter().enumerate() {
            let cfg = lambda_max_config(Config::new(a.lambda_hat, a.m), a.lambda_max);
            let cfg = Config {
                cg_rel_tol: a.cg_tol,
                ..cfg
            };
            let res = fractional_apply(&op, &f, alpha, &cfg)
                .map_err(|e| CliError::from(e).context(&format!("level {level}, alpha {alpha}")))?;
            let err = l2_error_on_mesh(&mesh, &op, &res.solution, |x| {
                let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
                legendre_sum(&weights[k], x[2] / r)
            })?;
            table[k].push((level, op.n(), err));
        }
        clock.lap(&mut report.timing, &format!("level_{level}"));
    }

    let mut csv = out.csv("sphere_convergence.csv")?;
    csv.row(["level", "dof", "alpha", "theory_rate", "l2_error", "rate"])?;
    let mut summary = Vec::new();
    println!("{:>8} {:>8} {:>12}  rates", "alpha", "theory", "finest err");
    for (k, &alpha) in a.alpha.iter().enumerate() {
        let theory = (0.5 + 2.0 * alpha).min(2.0);
        let mut rates = Vec::new();
        for (j, &(level, dof, err)) in table[k].iter().enumerate() {
            let rate = (j > 0).then(|| {
                let (_, d0, e0) = table[k][j - 1];
                conv_rate(e0, d0, err, dof)
            });
            rates.extend(rate);
            csv.row([
                level.to_string(),
                dof.to_string(),
                num(alpha),
                num(theory),
                num(err),
                rate.map(num).unwrap_or_default(),
            ])?;
        }
        let shown: Vec<String> = rates.iter().map(|r| format!("{r:.2}")).collect();
        let finest = table[k].last().map_or(f64::NAN, |r| r.2);
        println!(
            "{alpha:>8} {:>8} {finest:>12.4e}  {}",
            format!("({theory:.1})"),
            shown.join(" ")
        );
        summary.push(json!({ "alpha": alpha, "theory_rate": theory, "rates": rates }));
    }
    csv.finish()?;
    report.results = json!({ "per_alpha": summary });
    Ok(report)
}

fn solve(a: &SolveArgs, out: &mut OutDir) -> Result<Report> {
    check_alphas(&a.alpha)?;
    let mut report = Report::default();
    let mut clock = Clock::start();
    let problem = Problem::load(&a.mesh, a.source, a.rhs, a.cg_tol)?;
    clock.lap(&mut report.timing, "setup");
    report.meshes.push(problem.stats.clone());
    let (mesh, op, f) = (&problem.mesh, &problem.op, &problem.f);

    let (lambda_hat, lambda_min_estimate) = match a.lambda_hat {
        Some(l) => (l, None),
        None => {
            let est = estimate_lambda_min(op, 10, 1e-8)?;
            (0.95 * est, Some(est))
        }
    };
    let mut cfg = Config {
        cg_rel_tol: a.cg_tol,
        ..Config::new(lambda_hat, a.m)
    };
    // The shift is derived from the estimate itself, so re-probing is moot.
    cfg.probe_lambda_min = a.lambda_hat.is_some();
    let lambda_max = match a.lambda_max {
        LambdaMaxArg::Value(v) => v,
        LambdaMaxArg::Auto => estimate_lambda_max(op, &cfg)?.value,
    };
    cfg.lambda_max = LambdaMax::Value(lambda_max);
    clock.lap(&mut report.timing, "spectral_estimates");

    let f_norm = op.m_norm(f);
    let mut names = vec!["x".to_string(), "y".to_string(), "z".to_string(), "f".to_string()];
    let mut columns: Vec<Vec<f64>> = (0..3).map(|d| mesh.vertices().iter().map(|v| v[d]).collect()).collect();
    columns.push(op.extend(f));
    let mut summary = out.csv("solve_summary.csv")?;
    summary.row([
        "alpha",
        "m",
        "lambda_hat",
        "lambda_max",
        "num_steps",
        "total_solves",
        "f_norm",
        "u_norm",
        "a_priori_bound",
        "max_cg_iterations",
        "max_cg_residual",
    ])?;
    let mut per_alpha = Vec::new();
    for &alpha in &a.alpha {
        let res =
            fractional_apply(op, f, alpha, &cfg).map_err(|e| CliError::from(e).context(&format!("alpha {alpha}")))?;
        clock.lap(&mut report.timing, &format!("solve_alpha_{alpha}"));
        let max_it = res.solves.iter().map(|s| s.iterations).max().unwrap_or(0);
        let max_res = res.solves.iter().map(|s| s.residual).fold(0.0, f64::max);
        let u_norm = op.m_norm(&res.solution);
        summary.row([
            num(alpha),
            a.m.to_string(),
            num(lambda_hat),
            num(lambda_max),
            res.time_grid.num_steps().to_string(),
            res.total_solves.to_string(),
            num(f_norm),
            num(u_norm),
            num(res.a_priori_bound),
            max_it.to_string(),
            num(max_res),
        ])?;
        println!(
            "alpha = {alpha}: L+1 = {}, N_s = {}, a-priori bound {:.3e} (relative {:.3e}), max CG iterations {max_it}",
            res.time_grid.num_steps(),
            res.total_solves,
            res.a_priori_bound,
            if f_norm > 0.0 { res.a_priori_bound / f_norm } else { 0.0 },
        );
        per_alpha.push(json!({
            "alpha": alpha,
            "num_steps": res.time_grid.num_steps(),
            "total_solves": res.total_solves,
            "a_priori_bound": res.a_priori_bound,
            "u_norm": u_norm,
            "max_cg_iterations": max_it,
        }));
        names.push(format!("u_{alpha}"));
        columns.push(op.extend(&res.solution));
    }
    summary.finish()?;
    let name_refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let col_refs: Vec<&[f64]> = columns.iter().map(Vec::as_slice).collect();
    let w = out.file("solution.csv")?;
    write_vertex_scalars(w, &name_refs, &col_refs).map_err(CliError::io(out.path().join("solution.csv")))?;
    if a.write_mesh {
        let w = out.file("mesh.off")?;
        write_off(mesh, w).map_err(CliError::io(out.path().join("mesh.off")))?;
    }
    clock.lap(&mut report.timing, "write");
    println!(
        "lambda_hat = {lambda_hat:.6e}, lambda_max = {lambda_max:.6e}, {} unknowns",
        op.n()
    );
    report.results = json!({
        "lambda_hat": lambda_hat,
        "lambda_min_estimate": lambda_min_estimate,
        "lambda_max": lambda_max,
        "source": problem.source.to_string(),
        "rhs": problem.rhs,
        "flagged_triangles": problem.flagged_triangles,
        "f_norm": f_norm,
        "per_alpha": per_alpha,
    });
    Ok(report)
}

fn compare_oracle(a: &CompareOracleArgs, out: &mut OutDir) -> Result<Report> {
    check_alphas(&a.alpha)?;
    if a.m.is_empty() {
        return Err(CliError::validation("at least one order m is required"));
    }
    let mut report = Report::default();
    let mut clock = Clock::start();
    let problem = Problem::load(&a.mesh, a.source, a.rhs, a.cg_tol)?;
    report.meshes.push(problem.stats.clone());
    let (op, f) = (&problem.op, &problem.f);
    if op.n() > DENSE_LIMIT {
        return Err(CliError::validation(format!(
            "compare-oracle needs a dense eigendecomposition; {} unknowns exceed the limit of {DENSE_LIMIT}",
            op.n()
        )));
    }
    let eig = SpectralDecomposition::new(op)?;
    clock.lap(&mut report.timing, "setup_and_eigendecomposition");
    let lambdas = eig.eigenvalues();
    let (lmin, lmax) = (lambdas[0], lambdas[lambdas.len() - 1]);
    let lambda_hat = a.lambda_hat.unwrap_or(lmin);
    let lambda_max = match a.lambda_max {
        LambdaMaxArg::Auto => lmax,
        LambdaMaxArg::Value(v) => v,
    };

    let mut csv = out.csv("compare_oracle.csv")?;
    csv.row([
        "alpha",
        "m",
        "num_steps",
        "total_solves",
        "abs_error",
        "rel_error",
        "abs_bound",
        "rel_bound",
    ])?;
    let mut per_alpha = Vec::new();
    for &alpha in &a.alpha {
        let exact = eig.fractional(alpha, f)?;
        let exact_norm = op.m_norm(&exact);
        let mut fit = Vec::new();
        for &m in &a.m {
            let cfg = Config {
                cg_rel_tol: a.cg_tol,
                ..Config::new(lambda_hat, m).with_lambda_max(lambda_max)
            };
            let res = fractional_apply(op, f, alpha, &cfg)
                .map_err(|e| CliError::from(e).context(&format!("alpha {alpha}, m {m}")))?;
            let diff: Vec<f64> = res.solution.iter().zip(&exact).map(|(u, v)| u - v).collect();
            let err = op.m_norm(&diff);
            let rel = if exact_norm > 0.0 { err / exact_norm } else { err };
            let rel_bound = if exact_norm > 0.0 {
                res.a_priori_bound / exact_norm
            } else {
                res.a_priori_bound
            };
            csv.row([
                num(alpha),
                m.to_string(),
                res.time_grid.num_steps().to_string(),
                res.total_solves.to_string(),
                num(err),
                num(rel),
                num(res.a_priori_bound),
                num(rel_bound),
            ])?;
            if rel > 1e-12 {
                fit.push((m as f64, rel.log2()));
            }
        }
        let slope = bits_per_order(&fit);
        match slope {
            Some(s) => println!("alpha = {alpha}: error falls by {s:.2} bits per order"),
            None => println!("alpha = {alpha}: error at rounding level for every m"),
        }
        per_alpha.push(json!({ "alpha": alpha, "bits_per_order": slope }));
        clock.lap(&mut report.timing, &format!("alpha_{alpha}"));
    }
    csv.finish()?;
    report.results = json!({
        "lambda_hat": lambda_hat,
        "lambda_min": lmin,
        "lambda_max": lambda_max,
        "source": problem.source.to_string(),
        "rhs": problem.rhs,
        "per_alpha": per_alpha,
    });
    Ok(report)
}

/// Least-squares decay rate of `log₂(error)` against `m`.
fn bits_per_order(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(-sxy / sxx)
}

fn sphere_series(a: &SphereSeriesArgs, out: &mut OutDir) -> Result<Report> {
    check_alphas(&a.alpha)?;
    if a.points < 2 {
        return Err(CliError::validation("points must be at least 2"));
    }
    let weights: Vec<Vec<f64>> = a
        .alpha
        .iter()
        .map(|&al| sphere_series_weights(al, a.terms))
        .collect::<std::result::Result<_, _>>()?;
    let mut csv = out.csv("sphere_series.csv")?;
    let mut header = vec!["x3".to_string()];
    header.extend(a.alpha.iter().map(|al| format!("u_{al}")));
    csv.row(&header)?;
    for k in 0..a.points {
        let x = -1.0 + 2.0 * k as f64 / (a.points - 1) as f64;
        let mut row = vec![num(x)];
        row.extend(weights.iter().map(|w| num(legendre_sum(w, x))));
        csv.row(&row)?;
    }
    csv.finish()?;
    Ok(Report {
        results: json!({ "terms": a.terms }),
        ..Default::default()
    })
}

/// Source implied by the mesh when none is given.
pub fn default_source(m: &MeshArgs) -> Source {
    match m.builtin {
        Some(Builtin::Torus { major, minor, .. }) => Source::Torus { major, minor },
        Some(Builtin::Square { .. }) => Source::Checkerboard,
        _ => Source::SignZ,
    }
}

/// Interpolation for the smooth torus source, L² projection otherwise.
pub fn default_rhs(source: Source) -> RhsArg {
    match source {
        Source::Torus { .. } => RhsArg::Interpolate,
        _ => RhsArg::Project,
    }
}

struct Problem {
    mesh: Mesh,
    op: Operator,
    f: Vec<f64>,
    source: Source,
    rhs: RhsArg,
    flagged_triangles: usize,
    stats: MeshStats,
}

impl Problem {
    fn load(m: &MeshArgs, source: Option<Source>, rhs: Option<RhsArg>, cg_tol: f64) -> Result<Self> {
        let (mesh, label) = match (&m.mesh, m.builtin) {
            (Some(path), None) => {
                let mesh =
                    read_gmsh::<f64>(path).map_err(|e| CliError::from(e).context(&path.display().to_string()))?;
                (mesh, path.display().to_string())
            }
            (None, Some(b)) => {
                let mesh = match b {
                    Builtin::Sphere { level } => gen_sphere(level)?,
                    Builtin::Torus { major, minor, n1, n2 } => gen_torus(major, minor, n1, n2)?,
                    Builtin::Square { n0, p } => gen_graded_square(n0, p)?,
                };
                (mesh, b.to_string())
            }
            (None, None) => return Err(CliError::validation("give either --mesh FILE or --builtin SPEC")),
            (Some(_), Some(_)) => return Err(CliError::validation("--mesh and --builtin are mutually exclusive")),
        };
        let mode = m.mode.map(ProblemMode::from).unwrap_or(mesh.mode_hint());
        let reaction = m.reaction.unwrap_or(if mode == ProblemMode::PositiveReaction {
            1.0
        } else {
            0.0
        });
        let op = assemble_for(&mesh, mode, m.diffusion, reaction)?;
        let source = source.unwrap_or_else(|| default_source(m));
        let rhs = rhs.unwrap_or(default_rhs(source));
        let built = build_rhs_counted(&mesh, &op, source, rhs.into(), cg_tol)?;
        let stats = mesh_stats(&label, &mesh, &op);
        Ok(Self {
            mesh,
            op,
            f: built.0,
            source,
            rhs,
            flagged_triangles: built.1,
            stats,
        })
    }
}

fn assemble_for(mesh: &Mesh, mode: ProblemMode, a: f64, b: f64) -> Result<Operator> {
    let coeffs = CoefficientField::constant(mesh.num_vertices(), a, b)?;
    Ok(assemble(mesh, &coeffs, mode)?)
}

fn source_fn(source: Source) -> Result<impl Fn(&[f64; 3]) -> f64> {
    if let Source::Torus { major, minor } = source {
        torus_fields(major, minor, 0.0, 0.0)?;
    }
    Ok(move |x: &[f64; 3]| match source {
        Source::SignZ => {
            if x[2] > 0.0 {
                1.0
            } else if x[2] < 0.0 {
                -1.0
            } else {
                0.0
            }
        }
        Source::Checkerboard => {
            if x[0] * x[1] >= 0.0 {
                1.0
            } else {
                -1.0
            }
        }
        Source::Torus { major, minor } => {
            let (p1, p2) = torus_angles(major, x);
            torus_fields(major, minor, p1, p2).map(|t| t.source).unwrap_or(f64::NAN)
        }
        Source::Constant(c) => c,
        Source::Zero => 0.0,
    })
}

fn build_rhs_counted(
    mesh: &Mesh,
    op: &Operator,
    source: Source,
    method: RhsMethod,
    cg_tol: f64,
) -> Result<(Vec<f64>, usize)> {
    let r = build_rhs(mesh, op, source_fn(source)?, method, cg_tol)?;
    Ok((r.values, r.flagged_triangles))
}

fn rhs_for(mesh: &Mesh, op: &Operator, source: Source, method: RhsMethod, cg_tol: f64) -> Result<Vec<f64>> {
    Ok(build_rhs_counted(mesh, op, source, method, cg_tol)?.0)
}

fn mesh_stats(label: &str, mesh: &Mesh, op: &Operator) -> MeshStats {
    MeshStats {
        source: label.to_string(),
        vertices: mesh.num_vertices(),
        triangles: mesh.num_triangles(),
        edges: mesh.num_edges(),
        boundary_vertices: mesh.boundary_vertices().len(),
        euler_characteristic: mesh.euler_characteristic(),
        dofs: op.n(),
        mode: op.mode().as_str().to_string(),
        total_area: mesh.total_area(),
        max_edge_length: mesh.max_edge_length(),
    }
}
