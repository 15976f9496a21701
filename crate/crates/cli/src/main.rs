use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use disk_uniform::complex::Complex;
use disk_uniform::conformal::curvature;
use disk_uniform::io::{preset, render_svg, serialize_problem, to_canonical_json, SvgOptions, APEX_KEY};
use disk_uniform::layout::{
    layout_augmented, layout_disk, normalize_to_unit_disk, realize_mpoints, verify_boundary_condition, BoundaryReport,
};
use disk_uniform::minkowski::{project, InfinitesimalMobius, MPoint};
use disk_uniform::rigidity::{constraint_matrix, mobius_orbit_check, numerical_rank};
use disk_uniform::solver::{boundary_gap, curvature_flow, newton_flat, FlowOptions, NewtonOptions};
use disk_uniform::{AugmentedDisk, BoundaryScenario, Label, PlaneLayout, Preset, Problem, Traversal};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

/// Discrete uniformization of triangulated disks.
#[derive(Parser)]
#[command(name = "disk-uniform", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a problem file describes a valid disk and structure.
    Validate { problem: PathBuf },
    /// Write a built-in problem (hex_tangent, hex_orthogonal, hex_inscribed,
    /// triangle, ring_lattice(N)).
    Preset {
        name: String,
        #[arg(long)]
        scenario: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Curvature of the problem's initial label.
    Curvature {
        problem: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for a flat label; `--out` receives the problem with `f_init`
    /// set to the solution, stdout the report.
    Solve {
        problem: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Newton)]
        method: Method,
        #[command(flatten)]
        numeric: Numeric,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Develop a flat label into the plane.
    Layout {
        problem: PathBuf,
        #[command(flatten)]
        target: Target,
        #[arg(long, value_enum, default_value_t = Order::Bfs)]
        traversal: Order,
        /// Check this boundary condition after normalization.
        #[arg(long)]
        scenario: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render the layout as SVG.
    Render {
        problem: PathBuf,
        #[command(flatten)]
        target: Target,
        #[arg(long, default_value_t = 512.0)]
        size: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rank and singular values of the product-constraint matrix.
    Rank {
        problem: PathBuf,
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Transport the flat label along each infinitesimal Möbius generator.
    MobiusCheck {
        problem: PathBuf,
        #[command(flatten)]
        target: Target,
        #[arg(long, default_value_t = 1e-4)]
        eps: f64,
        /// Also test a random generator drawn from this seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Newton,
    Flow,
}

#[derive(Clone, Copy, ValueEnum)]
enum Order {
    Bfs,
    Dfs,
}

#[derive(Args, Clone)]
struct Numeric {
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 100)]
    max_iter: usize,
    #[arg(long, default_value_t = 1e-10)]
    svd_cutoff: f64,
    #[arg(long, default_value_t = 0.01)]
    dt: f64,
    /// Flow end time.
    #[arg(long, default_value_t = 50.0)]
    time: f64,
}

#[derive(Args, Clone)]
struct Target {
    /// Run Newton first instead of requiring a flat `f_init`.
    #[arg(long)]
    solve: bool,
    /// Lay out the disk alone rather than the normalized augmented disk.
    #[arg(long)]
    disk_only: bool,
    #[command(flatten)]
    numeric: Numeric,
}

enum Failure {
    Input(String),
    Numerical(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Numerical(_) => 2,
        }
    }
}

type Outcome = Result<(), Failure>;

fn input<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Input(e.to_string())
}

fn numerical<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Numerical(e.to_string())
}

fn load(path: &Path) -> Result<Problem, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    disk_uniform::parse_problem(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn scenario(s: Option<&str>) -> Result<Option<BoundaryScenario>, Failure> {
    s.map(|s| s.parse::<BoundaryScenario>().map_err(input)).transpose()
}

fn key(aug: &AugmentedDisk, v: usize) -> String {
    if v == aug.apex() {
        APEX_KEY.to_string()
    } else {
        aug.id(v).to_string()
    }
}

fn per_vertex(aug: &AugmentedDisk, vals: impl IntoIterator<Item = Value>) -> Value {
    Value::Object(vals.into_iter().enumerate().map(|(v, x)| (key(aug, v), x)).collect::<Map<_, _>>())
}

fn newton_options(n: &Numeric) -> NewtonOptions {
    NewtonOptions { tol: n.tol, max_iter: n.max_iter, svd_cutoff: n.svd_cutoff, ..NewtonOptions::default() }
}

/// The problem's label, optionally driven to flatness first.
fn target_label(p: &Problem, t: &Target) -> Result<Label, Failure> {
    let f = p.initial_label();
    if !t.solve {
        return Ok(f);
    }
    newton_flat(&p.aug, &p.structure, &f, &newton_options(&t.numeric))
        .map(|r| r.label)
        .map_err(numerical)
}

struct Drawn {
    layout: PlaneLayout,
    label: Label,
    mpoints: Vec<MPoint>,
}

fn develop(p: &Problem, f: &Label, disk_only: bool, order: Traversal) -> Result<Drawn, Failure> {
    if disk_only {
        let layout = layout_disk(&p.aug, &p.structure, f, order).map_err(numerical)?;
        let mpoints = realize_mpoints(&layout, &p.structure, f);
        return Ok(Drawn { layout, label: f.clone(), mpoints });
    }
    let l = layout_augmented(&p.aug, &p.structure, f, order).map_err(numerical)?;
    let n = normalize_to_unit_disk(&p.aug, &l, &p.structure, f).map_err(numerical)?;
    Ok(Drawn { layout: n.layout, label: n.label, mpoints: n.mpoints })
}

fn boundary_json(r: &BoundaryReport) -> Value {
    json!({
        "scenario": r.scenario.to_string(),
        "max_residual": r.max_residual,
        "passed": r.passed,
        "residuals": Value::Object(r.residuals.iter().map(|(id, x)| (id.to_string(), Value::from(*x))).collect()),
    })
}

fn run(cmd: Command) -> Outcome {
    match cmd {
        Command::Validate { problem } => {
            let p = load(&problem)?;
            let base = p.aug.base();
            let report = json!({
                "valid": true,
                "vertices": base.vertex_count(),
                "interior_vertices": base.interior_vertex_count(),
                "boundary_vertices": base.boundary_cycle().len(),
                "edges": base.edges().len(),
                "faces": base.faces().len(),
                "euler_characteristic": base.euler_characteristic(),
                "apex_id": p.aug.apex_id(),
            });
            emit(None, &to_canonical_json(&report))
        }
        Command::Preset { name, scenario: s, out } => {
            let pr: Preset = name.parse().map_err(input)?;
            let p = preset(pr, scenario(s.as_deref())?).map_err(input)?;
            emit(out.as_deref(), &serialize_problem(&p))
        }
        Command::Curvature { problem, out } => {
            let p = load(&problem)?;
            let f = p.initial_label();
            let k = curvature(&p.aug, &p.structure, &f).map_err(numerical)?;
            let report = json!({
                "curvature": per_vertex(&p.aug, k.values().iter().map(|&x| Value::from(x))),
                "max_abs": k.max_abs(),
                "total": k.total(),
            });
            emit(out.as_deref(), &to_canonical_json(&report))
        }
        Command::Solve { problem, method, numeric, out } => {
            let mut p = load(&problem)?;
            let f0 = p.initial_label();
            let (label, report) = match method {
                Method::Newton => {
                    let r = newton_flat(&p.aug, &p.structure, &f0, &newton_options(&numeric)).map_err(numerical)?;
                    let rep = json!({
                        "method": "newton",
                        "converged": true,
                        "iterations": r.iterations,
                        "residuals": r.residuals,
                        "max_abs_curvature": r.curvature.max_abs(),
                        "elapsed_seconds": r.elapsed.as_secs_f64(),
                    });
                    (r.label, rep)
                }
                Method::Flow => {
                    let opts = FlowOptions { dt: numeric.dt, t_end: numeric.time, ..FlowOptions::default() };
                    let r = curvature_flow(&p.aug, &p.structure, &f0, &opts).map_err(numerical)?;
                    let last = r.last();
                    let rep = json!({
                        "method": "flow",
                        "converged": last.residual <= numeric.tol,
                        "steps": r.trajectory.len() - 1,
                        "time": last.time,
                        "initial_residual": r.trajectory[0].residual,
                        "max_abs_curvature": last.residual,
                        "elapsed_seconds": r.elapsed.as_secs_f64(),
                    });
                    (last.label.clone(), rep)
                }
            };
            let mut report = report;
            report["boundary_gap"] = Value::from(boundary_gap(&p.aug, &label));
            report["label"] = per_vertex(&p.aug, label.0.iter().map(|&x| Value::from(x)));
            p.f_init = Some(label);
            if let Some(path) = out.as_deref() {
                emit(Some(path), &serialize_problem(&p))?;
            }
            emit(None, &to_canonical_json(&report))
        }
        Command::Layout { problem, target, traversal, scenario: s, out } => {
            let p = load(&problem)?;
            let check = scenario(s.as_deref())?;
            let f = target_label(&p, &target)?;
            let order = match traversal {
                Order::Bfs => Traversal::BreadthFirst,
                Order::Dfs => Traversal::DepthFirst,
            };
            let d = develop(&p, &f, target.disk_only, order)?;
            let points = d
                .mpoints
                .iter()
                .map(|xi| {
                    let wp = project(xi).map_err(numerical)?;
                    Ok(json!({ "xi": xi.xi.to_vec(), "center": wp.p.to_vec(), "weight": wp.w }))
                })
                .collect::<Result<Vec<_>, Failure>>()?;
            let mut report = json!({
                "positions": per_vertex(&p.aug, d.layout.positions.iter().map(|q| Value::from(q.to_vec()))),
                "label": per_vertex(&p.aug, d.label.0.iter().map(|&x| Value::from(x))),
                "mpoints": per_vertex(&p.aug, points),
                "consistency_residual": d.layout.consistency_residual,
                "edge_error": d.layout.edge_error,
                "diameter": d.layout.diameter,
            });
            let mut failed = None;
            if let Some(sc) = check {
                if target.disk_only {
                    return Err(Failure::Input("--scenario needs the augmented layout".into()));
                }
                let r = verify_boundary_condition(&p.aug, &d.mpoints, sc).map_err(numerical)?;
                if !r.passed {
                    failed = Some(format!("{sc} check failed: max residual {:e}", r.max_residual));
                }
                report["boundary"] = boundary_json(&r);
            }
            emit(out.as_deref(), &to_canonical_json(&report))?;
            failed.map_or(Ok(()), |m| Err(Failure::Numerical(m)))
        }
        Command::Render { problem, target, size, out } => {
            let p = load(&problem)?;
            let f = target_label(&p, &target)?;
            let d = develop(&p, &f, target.disk_only, Traversal::BreadthFirst)?;
            let opts = SvgOptions { size, ..SvgOptions::default() };
            let svg = render_svg(&p.aug, &d.layout, &d.mpoints, &opts).map_err(numerical)?;
            emit(out.as_deref(), &svg)
        }
        Command::Rank { problem, target, out } => {
            let p = load(&problem)?;
            let f = target_label(&p, &target)?;
            let d = develop(&p, &f, target.disk_only, Traversal::BreadthFirst)?;
            let m = if target.disk_only {
                constraint_matrix(p.aug.base(), &d.mpoints)
            } else {
                constraint_matrix(&p.aug, &d.mpoints)
            };
            let r = numerical_rank(&m, target.numeric.svd_cutoff);
            let report = json!({
                "rows": r.rows,
                "cols": r.cols,
                "rank": r.rank,
                "expected_rank": r.cols.saturating_sub(6),
                "cutoff": target.numeric.svd_cutoff,
                "singular_values": r.singular_values,
            });
            emit(out.as_deref(), &to_canonical_json(&report))
        }
        Command::MobiusCheck { problem, target, eps, seed, out } => {
            let p = load(&problem)?;
            if target.disk_only {
                return Err(Failure::Input("mobius-check works on the augmented layout".into()));
            }
            let f = target_label(&p, &target)?;
            let names = ["a", "b", "c", "d", "t", "r"];
            let mut gens: Vec<(String, InfinitesimalMobius)> =
                InfinitesimalMobius::basis().into_iter().zip(names).map(|(g, n)| (n.to_string(), g)).collect();
            if let Some(s) = seed {
                let mut rng = ChaCha8Rng::seed_from_u64(s);
                let mut c = || rng.random_range(-1.0..1.0);
                gens.push((
                    format!("random({s})"),
                    InfinitesimalMobius { a: c(), b: c(), c: c(), d: c(), t: c(), r: c() },
                ));
            }
            let mut rows = Vec::new();
            for (name, g) in &gens {
                let r = mobius_orbit_check(&p.aug, &p.structure, &f, g, eps).map_err(numerical)?;
                rows.push(json!({
                    "generator": name,
                    "coefficients": [g.a, g.b, g.c, g.d, g.t, g.r],
                    "max_abs_curvature": r.max_curvature,
                    "max_variation_error": r.max_variation_error,
                }));
            }
            emit(out.as_deref(), &to_canonical_json(&json!({ "eps": eps, "generators": rows })))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let msg = match &f {
                Failure::Input(m) => format!("input error: {m}"),
                Failure::Numerical(m) => format!("numerical failure: {m}"),
            };
            eprintln!("disk-uniform: {msg}");
            ExitCode::from(f.code())
        }
    }
}
