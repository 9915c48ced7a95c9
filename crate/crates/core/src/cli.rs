//! The `sfst` command line: scene in, CSV/JSON out.
//!
//! Exit codes: 0 success, 1 validation or usage error, 2 numerical fault.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::base::{subquadratic_probe, FinslerField};
use crate::causality::{
    cauchy_graph_check, causal_simplicity_probe, chrono_related, completeness_probe, global_hyperbolicity_probe,
    Direction, Grid,
};
use crate::error::{Error, Result};
use crate::geodesics::{integrate_base_geodesic, integrate_spacetime_geodesic};
use crate::io::{csv_row, versioned_json};
use crate::sampling::unit_directions;
use crate::scene::Scene;
use crate::spacetime::{Event, StaticSpacetime, Tangent};
use crate::suite::run_suite;
use crate::Vector;

#[derive(Debug, Parser)]
#[command(name = "sfst", version, about = "Static Finsler spacetime toolkit")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Scene file (TOML).
    #[arg(long, global = true)]
    pub scene: Option<PathBuf>,
    /// Directory for CSV/JSON outputs (created if missing).
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,
    /// RK4 step, overriding `[tolerances] step`.
    #[arg(long, global = true)]
    pub step: Option<f64>,
    /// Grid cells per axis, overriding `[grid] resolution`.
    #[arg(long, global = true)]
    pub resolution: Option<usize>,
    /// Random seed, overriding the scene seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Shooting tolerance, overriding `[tolerances] shooting`.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Causal character of a tangent vector `τ,v₁,…,vₙ`.
    Classify {
        #[arg(long, allow_hyphen_values = true)]
        tangent: String,
        /// Base point (default: chart centre).
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
    },
    /// Integrates a geodesic and writes `trajectory.csv`.
    Geodesic {
        /// Initial tangent `τ,v₁,…,vₙ` (with `--base`: just `v₁,…,vₙ`).
        #[arg(long, allow_hyphen_values = true)]
        tangent: String,
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        t0: f64,
        #[arg(long, default_value_t = 1.0)]
        s_max: f64,
        /// Integrate the optical geodesic on the base instead.
        #[arg(long)]
        base: bool,
    },
    /// Samples the future cone boundary (`lightcone.csv`) and checks convexity (`convexity.json`).
    Lightcone {
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
        #[arg(long, default_value_t = 360)]
        directions: usize,
        #[arg(long, default_value_t = 10_000)]
        chords: usize,
    },
    /// Nodes of the optical ball around a source (`ball.csv`).
    Ball {
        #[arg(long, allow_hyphen_values = true)]
        source: String,
        #[arg(long)]
        radius: f64,
        #[arg(long, value_enum, default_value_t = DirectionArg::Forward)]
        direction: DirectionArg,
        /// Grid closure `d ≤ r + half cell` instead of the open ball.
        #[arg(long)]
        closed: bool,
    },
    /// Optical distance field from a source (`distance.csv`).
    Dist {
        #[arg(long, allow_hyphen_values = true)]
        source: String,
        #[arg(long, value_enum, default_value_t = DirectionArg::Forward)]
        direction: DirectionArg,
    },
    /// Chronological relation between events `t,x₁,…,xₙ`.
    Chrono {
        #[arg(long, allow_hyphen_values = true)]
        from: String,
        #[arg(long, allow_hyphen_values = true)]
        to: String,
    },
    /// Causal-ladder probes configured by the scene's `[ladder]` table.
    Ladder,
    /// Property suite over the scene (`invariants.json`).
    Invariants {
        #[arg(long, default_value_t = 5)]
        points_per_axis: usize,
        #[arg(long, default_value_t = 40)]
        samples: usize,
    },
    /// `F°`/`F°ₗ` sweep over directions (`conic.csv`).
    Conic {
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
        #[arg(long, default_value_t = 360)]
        directions: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum DirectionArg {
    Forward,
    Backward,
}

impl From<DirectionArg> for Direction {
    fn from(d: DirectionArg) -> Self {
        match d {
            DirectionArg::Forward => Direction::Forward,
            DirectionArg::Backward => Direction::Backward,
        }
    }
}

/// Failure of a CLI run.
#[derive(Debug)]
pub enum CliError {
    Model(Error),
    Io(std::io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Model(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Model(e) => write!(f, "{}: {e}", error_name(e)),
            CliError::Io(e) => write!(f, "io: {e}"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Model(e) if e.is_numerical_fault() => 2,
            _ => 1,
        }
    }
}

fn error_name(e: &Error) -> String {
    let dbg = format!("{e:?}");
    dbg.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Error").to_string()
}

fn parse_list(s: &str, what: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| Error::InvalidInput(format!("{what}: cannot parse {p:?}"))))
        .collect()
}

fn parse_vector(s: &str, n: usize, what: &str) -> Result<Vector> {
    let v = parse_list(s, what)?;
    if v.len() != n {
        return Err(Error::InvalidInput(format!("{what}: expected {n} components, got {}", v.len())));
    }
    Ok(Vector::from_vec(v))
}

fn parse_tangent(s: &str, n: usize) -> Result<Tangent> {
    let v = parse_list(s, "tangent")?;
    if v.len() != n + 1 {
        return Err(Error::InvalidInput(format!("tangent: expected τ and {n} components, got {} values", v.len())));
    }
    Ok(Tangent::new(v[0], v[1..].to_vec()))
}

fn parse_event(s: &str, n: usize, what: &str) -> Result<Event> {
    let v = parse_list(s, what)?;
    if v.len() != n + 1 {
        return Err(Error::InvalidInput(format!("{what}: expected t and {n} coordinates, got {} values", v.len())));
    }
    Ok(Event::new(v[0], v[1..].to_vec()))
}

fn centre(st: &StaticSpacetime) -> Vector {
    let c = st.chart();
    Vector::from_fn(c.dimension(), |i, _| 0.5 * (c.lo[i] + c.hi[i]))
}

fn point_or_centre(st: &StaticSpacetime, point: &Option<String>) -> Result<Vector> {
    match point {
        Some(p) => parse_vector(p, st.dimension(), "point"),
        None => Ok(centre(st)),
    }
}

struct Ctx {
    scene: Scene,
    st: StaticSpacetime,
    out_dir: PathBuf,
    step: f64,
    seed: u64,
    tolerance: f64,
}

impl Ctx {
    fn grid(&self) -> Result<Grid> {
        Grid::optical(&self.st, self.scene.grid_options())
    }

    fn create(&self, name: &str) -> std::io::Result<BufWriter<fs::File>> {
        Ok(BufWriter::new(fs::File::create(self.out_dir.join(name))?))
    }

    /// Writes `name` and returns the JSON text.
    fn emit<T: Serialize>(&self, name: &str, value: &T) -> std::io::Result<String> {
        let text = serde_json::to_string_pretty(&versioned_json(value)).expect("serializable report");
        fs::write(self.out_dir.join(name), format!("{text}\n"))?;
        Ok(text)
    }
}

/// Parses `args` and runs; returns the process exit code.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let sink: &mut dyn Write = if code == 0 { stdout } else { stderr };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match run(&cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: &Cli, stdout: &mut dyn Write) -> std::result::Result<(), CliError> {
    let g = &cli.global;
    let path = g
        .scene
        .as_deref()
        .ok_or_else(|| Error::InvalidInput("--scene is required".into()))?;
    let mut scene = Scene::load(path)?;
    if let Some(r) = g.resolution {
        scene.grid.resolution = r;
    }
    if let Some(s) = g.seed {
        scene.seed = s;
    }
    let step = g.step.unwrap_or(scene.tolerances.step);
    let tolerance = g.tolerance.unwrap_or(scene.tolerances.shooting);
    if !(step > 0.0) || !(tolerance > 0.0) {
        return Err(Error::InvalidInput("step and tolerance must be positive".into()).into());
    }
    let st = scene.spacetime()?;
    fs::create_dir_all(&g.out_dir)?;
    let ctx = Ctx { seed: scene.seed, scene, st, out_dir: g.out_dir.clone(), step, tolerance };
    let text = dispatch(&ctx, &cli.command)?;
    writeln!(stdout, "{text}")?;
    Ok(())
}

fn dispatch(ctx: &Ctx, command: &Command) -> std::result::Result<String, CliError> {
    let st = &ctx.st;
    let n = st.dimension();
    match command {
        Command::Classify { tangent, point } => {
            let x = point_or_centre(st, point)?;
            let w = parse_tangent(tangent, n)?;
            let class = st.classify(&x, &w)?;
            let l = st.eval_l(&x, &w)?;
            Ok(ctx.emit("classify.json", &json!({
                "kind": class.kind,
                "orientation": class.orientation,
                "l": l,
                "point": x.as_slice(),
                "tangent": { "tau": w.tau, "v": w.v.as_slice() },
            }))?)
        }
        Command::Geodesic { tangent, point, t0, s_max, base } => {
            let x = point_or_centre(st, point)?;
            let traj = if *base {
                let v = parse_vector(tangent, n, "tangent")?;
                integrate_base_geodesic(&st.base.optical(), &x, &v, *s_max, ctx.step)?
            } else {
                let w = parse_tangent(tangent, n)?;
                integrate_spacetime_geodesic(st, &Event { t: *t0, x: x.clone() }, &w, *s_max, ctx.step)?
            };
            let mut out = ctx.create("trajectory.csv")?;
            traj.write_csv(&mut out)?;
            out.flush()?;
            Ok(ctx.emit("geodesic.json", &json!({
                "samples": traj.len(),
                "span": traj.span(),
                "exited_chart": traj.exited_chart,
                "l_drift": traj.l_drift(),
                "k_drift": traj.k_drift(),
                "max_residual": traj.max_residual(),
                "end": traj.last().x.as_slice(),
                "file": "trajectory.csv",
            }))?)
        }
        Command::Lightcone { point, directions, chords } => {
            let x = point_or_centre(st, point)?;
            let dirs = unit_directions(n, (*directions).max(1));
            let mut out = ctx.create("lightcone.csv")?;
            let mut header: Vec<String> = (1..=n).map(|i| format!("v{i}")).collect();
            header.extend(["tau".into(), "tau_upper".into(), "critical".into()]);
            writeln!(out, "{}", header.join(","))?;
            for v in &dirs {
                let mut row: Vec<f64> = v.iter().copied().collect();
                match st.cone_point(&x, v) {
                    Ok(p) => row.extend([p.tau, p.tau_upper.unwrap_or(f64::NAN), if p.critical { 1.0 } else { 0.0 }]),
                    Err(Error::NoFutureRoot { .. }) => row.extend([f64::NAN, f64::NAN, 0.0]),
                    Err(e) => return Err(e.into()),
                }
                writeln!(out, "{}", csv_row(&row))?;
            }
            out.flush()?;
            let report = st.cone_convexity_check(&x, *chords, ctx.seed)?;
            Ok(ctx.emit("convexity.json", &report)?)
        }
        Command::Ball { source, radius, direction, closed } => {
            let x = parse_vector(source, n, "source")?;
            let grid = ctx.grid()?;
            let d = grid.distance_field(&x, (*direction).into())?;
            let nodes = if *closed {
                grid.closed_ball(&x, *radius, (*direction).into())?
            } else {
                grid.ball(&x, *radius, (*direction).into())?
            };
            let mut out = ctx.create("ball.csv")?;
            let mut header: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
            header.push("distance".into());
            writeln!(out, "{}", header.join(","))?;
            for &node in &nodes {
                let mut row: Vec<f64> = grid.node_position(node).iter().copied().collect();
                row.push(d.values[node]);
                writeln!(out, "{}", csv_row(&row))?;
            }
            out.flush()?;
            let touches = nodes.iter().any(|&i| grid.touches_boundary(i));
            Ok(ctx.emit("ball.json", &json!({
                "source": x.as_slice(),
                "radius": radius,
                "direction": Direction::from(*direction),
                "closed": closed,
                "nodes": nodes.len(),
                "touches_boundary": touches,
                "file": "ball.csv",
            }))?)
        }
        Command::Dist { source, direction } => {
            let x = parse_vector(source, n, "source")?;
            let grid = ctx.grid()?;
            let d = grid.distance_field(&x, (*direction).into())?;
            let mut out = ctx.create("distance.csv")?;
            d.write_csv(&mut out)?;
            out.flush()?;
            let finite: Vec<f64> = d.values.iter().copied().filter(|v| v.is_finite()).collect();
            Ok(ctx.emit("dist.json", &json!({
                "source": x.as_slice(),
                "direction": d.direction,
                "nodes": d.values.len(),
                "unreachable": d.values.len() - finite.len(),
                "max_distance": finite.iter().copied().fold(0.0, f64::max),
                "relative_tolerance": grid.relative_tolerance(),
                "file": "distance.csv",
            }))?)
        }
        Command::Chrono { from, to } => {
            let p = parse_event(from, n, "from")?;
            let q = parse_event(to, n, "to")?;
            let grid = ctx.grid()?;
            let r = chrono_related(&grid, &p, &q)?;
            Ok(ctx.emit("chrono.json", &json!({
                "from": { "t": p.t, "x": p.x.as_slice() },
                "to": { "t": q.t, "x": q.x.as_slice() },
                "result": r,
            }))?)
        }
        Command::Ladder => Ok(ctx.emit("ladder.json", &ladder(ctx)?)?),
        Command::Invariants { points_per_axis, samples } => {
            let report = run_suite(st, *points_per_axis, *samples, 20, ctx.seed)?;
            Ok(ctx.emit("invariants.json", &report)?)
        }
        Command::Conic { point, directions } => {
            let x = point_or_centre(st, point)?;
            let lam = st.lambda_at(&x);
            let omega = st.omega_at(&x);
            let spec = st.base.norm_at(&x);
            let mut out = ctx.create("conic.csv")?;
            let mut header: Vec<String> = (1..=n).map(|i| format!("v{i}")).collect();
            header.extend(["f_o".into(), "f_o_l".into(), "radicand".into()]);
            writeln!(out, "{}", header.join(","))?;
            let mut defined = 0;
            let mut bounded = 0;
            for v in unit_directions(n, (*directions).max(1)) {
                let m = st.conic_metrics(&x, &v)?;
                let w = omega.dot(&v);
                let mut row: Vec<f64> = v.iter().copied().collect();
                row.extend([m.f_o.unwrap_or(f64::NAN), m.f_o_l.unwrap_or(f64::NAN), lam * spec.f2(&v) + w * w]);
                writeln!(out, "{}", csv_row(&row))?;
                defined += m.f_o.is_some() as usize;
                bounded += m.f_o_l.is_some() as usize;
            }
            out.flush()?;
            Ok(ctx.emit("conic.json", &json!({
                "point": x.as_slice(),
                "lambda": lam,
                "critical": st.is_critical(&x),
                "directions": directions,
                "f_o_defined": defined,
                "f_o_l_defined": bounded,
                "file": "conic.csv",
            }))?)
        }
    }
}

fn ladder(ctx: &Ctx) -> Result<serde_json::Value> {
    let st = &ctx.st;
    if st.is_sstk() {
        return Err(Error::WrongMode { required: "static" });
    }
    let n = st.dimension();
    let cfg = ctx.scene.ladder();
    let basepoint = match &cfg.basepoint {
        Some(b) => Vector::from_vec(b.clone()),
        None => centre(st),
    };
    st.chart().require(&basepoint)?;
    let grid = ctx.grid()?;
    let optical: FinslerField = st.base.optical();

    let simplicity = causal_simplicity_probe(st, &grid, cfg.pairs, ctx.seed, ctx.tolerance)?;

    let hyperbolicity = match &cfg.hyperbolicity {
        Some(h) => Some(global_hyperbolicity_probe(
            &grid,
            &Vector::from_vec(h.x.clone()),
            &Vector::from_vec(h.y.clone()),
            h.r,
            h.s,
        )?),
        None => None,
    };

    let origins: Vec<Vector> = match &cfg.origins {
        Some(o) => o.iter().map(|p| Vector::from_vec(p.clone())).collect(),
        None => vec![basepoint.clone()],
    };
    let budget = cfg.length_budget.unwrap_or_else(|| st.chart().diameter());
    let completeness = completeness_probe(&optical, &origins, cfg.rays, budget, ctx.step.max(1e-3), cfg.model)?;

    let cauchy = match &cfg.time_function {
        Some(f) => {
            f.validate(n)?;
            let alpha = match cfg.alpha {
                Some(a) => a,
                None => optical.norm_at(&basepoint).reversibility_constant(720),
            };
            Some(cauchy_graph_check(st, f, &st.chart().lattice(9), alpha, 720)?)
        }
        None => None,
    };

    let subquadratic = subquadratic_probe(&st.base.lambda, &st.base, &basepoint, ctx.scene.grid.resolution.min(100), Direction::Forward)?;

    Ok(json!({
        "basepoint": basepoint.as_slice(),
        "model": cfg.model,
        "causal_simplicity": simplicity,
        "global_hyperbolicity": hyperbolicity,
        "completeness": completeness,
        "cauchy_graph": cauchy,
        "subquadratic": subquadratic,
        "shooting_tolerance": ctx.tolerance,
    }))
}

/// Convenience for tests and examples: run against a scene file into `out_dir`.
pub fn run_scene(scene: &Path, out_dir: &Path, extra: &[&str]) -> (i32, String, String) {
    let mut args: Vec<std::ffi::OsString> = vec!["sfst".into()];
    args.push("--scene".into());
    args.push(scene.into());
    args.push("--out-dir".into());
    args.push(out_dir.into());
    args.extend(extra.iter().map(|s| s.into()));
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = main_with_args(args, &mut out, &mut err);
    (code, String::from_utf8_lossy(&out).into_owned(), String::from_utf8_lossy(&err).into_owned())
}
