use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use eit_core::config::{self, CoupledFile, PairConfig, ScenarioConfig};
use eit_core::coupled::{check_coercivity, solve_coupled, stability_ratio_with, RandomData};
use eit_core::dtn::{BoundaryNorms, CauchyDataset, DtnMatrix, DtnOperator};
use eit_core::fem::{to_csv, to_vtk, Field, ForwardSolver};
use eit_core::geometry::{build_mesh, build_mesh_with, polar_angle, GammaArc, MeshExtras, Scenario};
use eit_core::io::{self, RunManifest};
use eit_core::oracle::{annulus_mode, disk_green, two_layer_mode, HoleBc};
use eit_core::probe::{recover_boundary_constant, run_singular_probe, Measured};
use eit_core::singular::singular_dirichlet_data;
use eit_core::{Complex64, Error, ErrorKind, Result};

#[derive(Parser)]
#[command(name = "eit", version, about = "Forward solves, local D-N maps and singular-source probing")]
struct Cli {
    /// Run manifest path (default: `<out>.manifest.json`, or `eit-<command>.manifest.json`).
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the interface-aligned mesh of a scenario (JSON, or legacy VTK for `.vtk`).
    Mesh(ConfigOut),
    /// Forward solve with Dirichlet data `cos(n theta)` on the outer boundary (VTK or CSV).
    Solve {
        #[command(flatten)]
        io: ConfigOut,
        #[arg(long, default_value_t = 1)]
        mode: u32,
    },
    /// Local Dirichlet-to-Neumann matrix on the measurement arc.
    Dtn {
        #[command(flatten)]
        io: ConfigOut,
        /// Override the measurement arc, `start,end` in radians.
        #[arg(long, value_parser = parse_arc, allow_hyphen_values = true)]
        gamma_arc: Option<GammaArc>,
    },
    /// Cauchy pairs for the traces of the singular family in the `[probe]` table.
    Cauchy(ConfigOut),
    /// Singular-source probe comparing two scenarios.
    Probe(ConfigOut),
    /// Grid search for the conductivity next to the probed boundary point.
    Recover {
        /// Measured D-N matrix or Cauchy dataset (JSON).
        #[arg(long)]
        measured: PathBuf,
        /// Template scenario with `[mesh]` and `[probe]` tables.
        #[arg(long)]
        template: PathBuf,
        /// `lo:hi:step`
        #[arg(long, value_parser = parse_grid)]
        grid: Grid,
        #[arg(long)]
        out: PathBuf,
    },
    /// Stability ratios of the coupled system over a random data ensemble.
    Coupled(ConfigOut),
    /// Coercivity constants of the coupled form.
    Coercivity {
        #[arg(long)]
        a_ratio: f64,
        #[arg(long)]
        b1: f64,
        #[arg(long)]
        b2: f64,
        #[arg(long, default_value_t = 1.0)]
        c0: f64,
    },
    /// Closed-form reference values.
    Oracle {
        #[arg(long, value_enum)]
        case: OracleCase,
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long, default_value_t = 0.5)]
        r0: f64,
        #[arg(long, value_enum, default_value_t = BcArg::SoundSoft)]
        bc: BcArg,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        #[arg(long, default_value_t = 2.0)]
        gamma_in: f64,
        /// Evaluation point `x,y` for the disk Green function.
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true, default_value = "0.5,0")]
        x: [f64; 2],
        /// Source point `x,y` for the disk Green function.
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true, default_value = "0,0")]
        y: [f64; 2],
    },
}

#[derive(Args)]
struct ConfigOut {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleCase {
    Annulus,
    TwoLayer,
    DiskGreen,
}

#[derive(Clone, Copy, ValueEnum)]
enum BcArg {
    SoundSoft,
    Neumann,
}

#[derive(Clone, Debug)]
struct Grid(Vec<f64>);

fn parse_pair(s: &str) -> std::result::Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected two comma-separated numbers, got `{s}`"));
    }
    let v = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}"));
    Ok([v(parts[0])?, v(parts[1])?])
}

fn parse_point(s: &str) -> std::result::Result<[f64; 2], String> {
    parse_pair(s)
}

fn parse_arc(s: &str) -> std::result::Result<GammaArc, String> {
    let [start, end] = parse_pair(s)?;
    Ok(GammaArc { start, end })
}

fn parse_grid(s: &str) -> std::result::Result<Grid, String> {
    let parts: Vec<f64> = s
        .split(':')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}")))
        .collect::<std::result::Result<_, _>>()?;
    let [lo, hi, step] = parts[..] else {
        return Err(format!("expected lo:hi:step, got `{s}`"));
    };
    if !(step > 0.0 && lo <= hi) {
        return Err("grid needs lo <= hi and a positive step".into());
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok(Grid((0..=n).map(|k| lo + step * k as f64).collect()))
}

fn exit_code(kind: ErrorKind) -> u8 {
    match kind {
        ErrorKind::Config => 3,
        ErrorKind::Geometry => 4,
        ErrorKind::Solver => 5,
        ErrorKind::Input => 6,
        ErrorKind::Io => 7,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let body = serde_json::json!({ "error": e.kind().as_str(), "message": e.to_string() });
            eprintln!("{body}");
            ExitCode::from(exit_code(e.kind()))
        }
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    print!("{}", io::to_json(value)?);
    Ok(())
}

fn cos_mode(scenario: &Scenario, mesh: &eit_core::geometry::Mesh, n: u32) -> Vec<Complex64> {
    let c = scenario.domain.center();
    let mut f = vec![Complex64::new(0.0, 0.0); mesh.n_vertices()];
    for v in mesh.outer_boundary_vertices() {
        let t = polar_angle(mesh.vertices[v], c);
        f[v] = Complex64::new((n as f64 * t).cos(), 0.0);
    }
    f
}

fn load_scenario(path: &Path, manifest: &mut RunManifest) -> Result<ScenarioConfig> {
    let cfg: ScenarioConfig = config::load(path)?;
    cfg.validate()?;
    manifest.add_input(path)?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let name = match &cli.command {
        Command::Mesh(_) => "mesh",
        Command::Solve { .. } => "solve",
        Command::Dtn { .. } => "dtn",
        Command::Cauchy(_) => "cauchy",
        Command::Probe(_) => "probe",
        Command::Recover { .. } => "recover",
        Command::Coupled(_) => "coupled",
        Command::Coercivity { .. } => "coercivity",
        Command::Oracle { .. } => "oracle",
    };
    let mut m = RunManifest::new(name, args);
    let start = Instant::now();
    let out = execute(cli.command, &mut m)?;
    m.time("total", start.elapsed());
    let path = match (cli.manifest, out) {
        (Some(p), _) => p,
        (None, Some(o)) => RunManifest::path_for(&o),
        (None, None) => PathBuf::from(format!("eit-{name}.manifest.json")),
    };
    io::write_json(&path, &m)
}

/// Runs one command and returns its primary output path, if it has one.
fn execute(command: Command, m: &mut RunManifest) -> Result<Option<PathBuf>> {
    match command {
        Command::Mesh(ConfigOut { config, out }) => {
            let cfg = load_scenario(&config, m)?;
            let t = Instant::now();
            let mesh = build_mesh(&cfg.scenario, cfg.mesh.h)?;
            m.time("mesh", t.elapsed());
            if out.extension().is_some_and(|e| e == "vtk") {
                let zero = Field::zeros(mesh.n_vertices());
                io::write_atomic(&out, to_vtk(&mesh, &zero, "zero")?.as_bytes())?;
            } else {
                io::write_json(&out, &mesh)?;
            }
            m.add_output(&out);
            Ok(Some(out))
        }
        Command::Solve { io: ConfigOut { config, out }, mode } => {
            let cfg = load_scenario(&config, m)?;
            let mesh = build_mesh(&cfg.scenario, cfg.mesh.h)?;
            let t = Instant::now();
            let solver = ForwardSolver::new(&cfg.scenario, &mesh)?;
            let u = solver.solve(&cos_mode(&cfg.scenario, &mesh, mode))?;
            m.time("solve", t.elapsed());
            let text = if out.extension().is_some_and(|e| e == "csv") { to_csv(&mesh, &u)? } else { to_vtk(&mesh, &u, "u")? };
            io::write_atomic(&out, text.as_bytes())?;
            m.add_output(&out);
            Ok(Some(out))
        }
        Command::Dtn { io: ConfigOut { config, out }, gamma_arc } => {
            let mut cfg = load_scenario(&config, m)?;
            if let Some(arc) = gamma_arc {
                cfg.scenario.gamma_arc = arc;
                cfg.scenario.validate()?;
            }
            let mesh = build_mesh(&cfg.scenario, cfg.mesh.h)?;
            let t = Instant::now();
            let dtn = DtnOperator::new(&cfg.scenario, &mesh)?.matrix(&cfg.scenario, &mesh)?;
            m.time("dtn", t.elapsed());
            io::write_json(&out, &dtn)?;
            m.add_output(&out);
            print_json(&serde_json::json!({ "dim": dtn.dim(), "symmetry_defect": dtn.symmetry_defect() }))?;
            Ok(Some(out))
        }
        Command::Cauchy(ConfigOut { config, out }) => {
            let cfg = load_scenario(&config, m)?;
            let probe = cfg.probe.as_ref().ok_or_else(|| Error::Config("cauchy needs a [probe] table".into()))?;
            let fam = probe.family(&cfg.scenario)?;
            let mesh = build_mesh(&cfg.scenario, cfg.mesh.h)?;
            let js = fam.require_resolvable(mesh.h)?;
            let gamma = mesh.gamma_interior_vertices();
            let traces = js
                .iter()
                .map(|&j| Ok(singular_dirichlet_data(&fam, j, &mesh)?.iter().enumerate().filter(|(v, _)| gamma.binary_search(v).is_ok()).map(|(_, c)| *c).collect()))
                .collect::<Result<Vec<Vec<Complex64>>>>()?;
            let t = Instant::now();
            let data = CauchyDataset::generate(&cfg.scenario, &mesh, &traces)?;
            m.time("cauchy", t.elapsed());
            io::write_json(&out, &data)?;
            m.add_output(&out);
            Ok(Some(out))
        }
        Command::Probe(ConfigOut { config, out }) => {
            let cfg: PairConfig = config::load(&config)?;
            cfg.validate()?;
            m.add_input(&config)?;
            let mesh = build_mesh_with(&cfg.scenario_a, cfg.mesh.h, &MeshExtras::from_scenario(&cfg.scenario_b))?;
            let fam = cfg.probe.family(&cfg.scenario_a)?;
            let t = Instant::now();
            let res = run_singular_probe(&cfg.scenario_a, &cfg.scenario_b, &mesh, &fam, cfg.probe.tau)?;
            m.time("probe", t.elapsed());
            io::write_atomic(&out, res.to_csv().as_bytes())?;
            m.add_output(&out);
            print_json(&serde_json::json!({ "slope": res.slope, "tau": res.tau, "classification": res.classification }))?;
            Ok(Some(out))
        }
        Command::Recover { measured, template, grid, out } => {
            let cfg = load_scenario(&template, m)?;
            let probe = cfg.probe.as_ref().ok_or_else(|| Error::Config("template needs a [probe] table".into()))?;
            let fam = probe.family(&cfg.scenario)?;
            let text = std::fs::read_to_string(&measured)?;
            m.add_input(&measured)?;
            let data = match io::from_json::<DtnMatrix>(&text) {
                Ok(d) => Measured::Dtn(d),
                Err(_) => Measured::Cauchy(io::from_json::<CauchyDataset>(&text).map_err(|e| {
                    Error::InvalidInput(format!("measured file is neither a D-N matrix nor a Cauchy dataset: {e}"))
                })?),
            };
            let t = Instant::now();
            let rec = recover_boundary_constant(&data, &cfg.scenario, &grid.0, &fam, cfg.mesh.h)?;
            m.time("recover", t.elapsed());
            io::write_atomic(&out, rec.to_csv().as_bytes())?;
            m.add_output(&out);
            print_json(&serde_json::json!({ "c_hat": rec.c_hat, "region": rec.region, "grid_too_coarse": rec.grid_too_coarse }))?;
            Ok(Some(out))
        }
        Command::Coupled(ConfigOut { config, out }) => {
            let file: CoupledFile = config::load(&config)?;
            let c = file.coupled;
            c.validate()?;
            m.add_input(&config)?;
            let disk = Scenario::homogeneous_disk(c.radius, 1.0, GammaArc::full());
            let mut mesh = build_mesh(&disk, c.h)?;
            let ensemble = RandomData::ensemble(c.seed, c.samples, [0.0, 0.0]);
            let mut csv = String::from("level,h,sample,ratio,condition\n");
            let mut summary = Vec::new();
            for level in 0..=c.refinements {
                if level > 0 {
                    mesh = mesh.refine();
                }
                let t = Instant::now();
                let norms = BoundaryNorms::new(&mesh)?;
                let mut ratios = Vec::with_capacity(ensemble.len());
                for (k, d) in ensemble.iter().enumerate() {
                    let p = d.problem(&mesh, c.a1, c.a2, c.b1, c.b2);
                    let sol = solve_coupled(&p)?;
                    let r = stability_ratio_with(&p, &sol, &norms)?;
                    csv.push_str(&format!("{level},{:.6e},{k},{r:.12e},{:.6e}\n", mesh.h, sol.condition));
                    ratios.push(r);
                }
                m.time(&format!("level {level}"), t.elapsed());
                let max = ratios.iter().copied().fold(0.0, f64::max);
                let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
                summary.push(serde_json::json!({ "level": level, "h": mesh.h, "min": min, "max": max, "spread": max / min }));
            }
            io::write_atomic(&out, csv.as_bytes())?;
            m.add_output(&out);
            print_json(&summary)?;
            Ok(Some(out))
        }
        Command::Coercivity { a_ratio, b1, b2, c0 } => {
            print_json(&check_coercivity(a_ratio, b1, b2, c0)?)?;
            Ok(None)
        }
        Command::Oracle { case, n, r0, bc, gamma, gamma_in, x, y } => {
            let value = match case {
                OracleCase::Annulus => {
                    let bc = match bc {
                        BcArg::SoundSoft => HoleBc::SoundSoft,
                        BcArg::Neumann => HoleBc::Neumann,
                    };
                    serde_json::to_value(annulus_mode(n, r0, bc, gamma)?)?
                }
                OracleCase::TwoLayer => serde_json::json!({ "kappa": two_layer_mode(n, r0, gamma_in, gamma)? }),
                OracleCase::DiskGreen => serde_json::json!({ "green": disk_green(x, y, gamma)? }),
            };
            print_json(&value)?;
            Ok(None)
        }
    }
}
