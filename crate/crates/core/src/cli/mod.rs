//! The `glide` command line.
//!
//! Exit codes: 0 when every check passes, 1 when a verification fails,
//! 2 for usage, config or parameter errors.

pub mod config;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::clifford::{build_gamma_set, verify_identities, AlgebraReport, Representation, DERIVED_TOL};
use crate::error::{require_positive, Error};
use crate::metric::{
    Boundary, EffectivePotential, GridDimension, GridSpec, MetricModel, Ordering, RadialProfile,
};
use crate::planewave::{
    dirac_residual, dispersion_residual, glide_sum_residual, plane_wave_spinor, translation_apply,
    FourMomentum, PlaneWaveField, ProbeSet, SpinBranch, DEFAULT_SEED,
};
use crate::solvers::{
    dirac::{principal_number, COULOMB_REL_TOL},
    nr_limit_check, radial_coulomb_dirac_spectrum, schrodinger_bound_states, sommerfeld_energy,
    CoulombProblem, EnergyReference, NrLimitReport, NrLimitSetup, SchrodingerOptions, SpectrumResult,
};
use config::{ConfigErrors, Fields};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "glide", version, about = "Glide-reflection Dirac operators and distorted-metric bound states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Seeds probe points and iterative eigensolver starts.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// TOML run config (bound-states, nr-limit, effective-potential).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the Clifford identities in one or all representations.
    VerifyAlgebra {
        /// standard, chiral or all.
        #[arg(default_value = "all")]
        representation: String,
    },
    /// Plane-wave spinor and translation/glide residuals for one momentum.
    PlaneWave {
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        k1: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        k2: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        k3: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        mass: f64,
        #[arg(long, default_value = "up")]
        branch: String,
        #[arg(long, default_value = "standard")]
        representation: String,
    },
    /// Radial Dirac–Coulomb levels against the closed form.
    Hydrogen {
        /// αZ.
        #[arg(long, allow_hyphen_values = true)]
        coupling: f64,
        /// Levels per κ channel.
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, value_delimiter = ',', default_value = "-1", allow_hyphen_values = true)]
        kappa: Vec<i32>,
        #[arg(long, default_value_t = 4000)]
        points: usize,
        /// Box radius; defaults to 30·n²/(αZ·m) for the highest level.
        #[arg(long)]
        r_max: Option<f64>,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        mass: f64,
    },
    /// Energy-dependent Schrödinger levels for a distorted metric (needs --config).
    BoundStates,
    /// Dirac vs Schrödinger shifts for a v1 family (needs --config).
    NrLimit,
    /// Profiles, metric components and V_eff on a probe state (needs --config).
    EffectivePotential,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Config(ConfigErrors),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<ConfigErrors> for Failure {
    fn from(e: ConfigErrors) -> Self {
        Failure::Config(e)
    }
}

struct Outcome {
    body: String,
    passed: bool,
}

fn render<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn csv(header: &str, rows: impl IntoIterator<Item = String>, seed: u64) -> String {
    let mut out = format!("# seed = {seed}\n{header}\n");
    for row in rows {
        out.push_str(&row);
        out.push('\n');
    }
    out
}

/// Shortest round-trip form, switching to exponent notation for very small
/// or very large magnitudes.
fn num(x: f64) -> String {
    if x == 0.0 || (1e-4..1e15).contains(&x.abs()) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

fn opt(x: Option<f64>) -> String {
    x.map_or(String::new(), num)
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match dispatch(&cli) {
        Ok(o) => o,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
        Err(Failure::Config(errors)) => {
            eprint!("{errors}");
            return EXIT_USAGE;
        }
    };
    let written = match &cli.output {
        Some(path) => std::fs::write(path, &outcome.body).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{}", outcome.body);
            Ok(())
        }
    };
    if let Err(msg) = written {
        eprintln!("error: {msg}");
        return EXIT_USAGE;
    }
    if outcome.passed {
        EXIT_OK
    } else {
        EXIT_FAILED
    }
}

fn dispatch(cli: &Cli) -> Result<Outcome, Failure> {
    match &cli.command {
        Command::VerifyAlgebra { representation } => verify_algebra(cli, representation),
        Command::PlaneWave {
            k1,
            k2,
            k3,
            mass,
            branch,
            representation,
        } => plane_wave(cli, [*k1, *k2, *k3], *mass, branch, representation),
        Command::Hydrogen {
            coupling,
            count,
            kappa,
            points,
            r_max,
            mass,
        } => hydrogen(cli, *coupling, *count, kappa, *points, *r_max, *mass),
        Command::BoundStates => bound_states(cli),
        Command::NrLimit => nr_limit(cli),
        Command::EffectivePotential => effective_potential(cli),
    }
}

fn read_config(cli: &Cli) -> Result<Fields, Failure> {
    let path: &Path = cli
        .config
        .as_deref()
        .ok_or_else(|| Failure::Usage("this subcommand needs --config <file>".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    Ok(Fields::parse(&text)?)
}

#[derive(Serialize)]
struct AlgebraOutput {
    seed: u64,
    reports: Vec<AlgebraReport>,
    all_passed: bool,
}

fn verify_algebra(cli: &Cli, representation: &str) -> Result<Outcome, Failure> {
    let sets = if representation == "all" {
        Representation::ALL.iter().map(|r| build_gamma_set(r.name())).collect::<Result<Vec<_>, _>>()?
    } else {
        vec![build_gamma_set(representation)?]
    };
    let reports: Vec<AlgebraReport> = sets.iter().map(verify_identities).collect();
    let all_passed = reports.iter().all(|r| r.all_passed);
    let body = match cli.format {
        Format::Json => render(&AlgebraOutput {
            seed: cli.seed,
            reports,
            all_passed,
        }),
        Format::Csv => csv(
            "representation,identity,max_deviation,tolerance,passed",
            reports.iter().flat_map(|r| {
                r.checks.iter().map(move |c| {
                    format!(
                        "{},{},{},{},{}",
                        r.representation.name(),
                        c.name,
                        num(c.max_deviation),
                        num(c.tolerance),
                        c.passed
                    )
                })
            }),
            cli.seed,
        ),
    };
    Ok(Outcome { body, passed: all_passed })
}

#[derive(Serialize)]
struct AxisCheck {
    axis: usize,
    residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    skipped: Option<String>,
}

#[derive(Serialize)]
struct PlaneWaveOutput {
    seed: u64,
    representation: &'static str,
    branch: SpinBranch,
    momentum: [f64; 4],
    mass: f64,
    /// (re, im) pairs.
    spinor: Vec<[f64; 2]>,
    dispersion_residual: f64,
    dirac_residual: f64,
    translation: Vec<AxisCheck>,
    glide_residual: f64,
    glide_minus_dirac: f64,
    tolerance: f64,
    passed: bool,
}

fn plane_wave(
    cli: &Cli,
    spatial: [f64; 3],
    mass: f64,
    branch: &str,
    representation: &str,
) -> Result<Outcome, Failure> {
    require_positive("mass", mass)?;
    let g = build_gamma_set(representation)?;
    let branch: SpinBranch = branch.parse()?;
    let k = FourMomentum::on_shell(spatial, mass)?;
    let probes = ProbeSet::new(cli.seed, mass);
    let u = plane_wave_spinor(&k, &g, branch)?;
    let field = PlaneWaveField::new(u, k);
    let scale = mass.max(k.energy());
    let tolerance = DERIVED_TOL;

    let mut translation = Vec::new();
    for axis in 0..4 {
        if k.component(axis) == 0.0 {
            translation.push(AxisCheck {
                axis,
                residual: None,
                skipped: Some(format!("K_{axis} = 0: translation undefined")),
            });
        } else {
            let (_, residual) = translation_apply(&field, axis, &probes)?;
            translation.push(AxisCheck {
                axis,
                residual: Some(residual),
                skipped: None,
            });
        }
    }
    let dirac = dirac_residual(&k, &g, u.as_vector());
    let glide = glide_sum_residual(&k, &g, branch, &probes)?;
    let dispersion = dispersion_residual(&k);
    let passed = dispersion.abs() <= tolerance * scale * scale
        && dirac <= tolerance * scale
        && glide <= tolerance * scale
        && (glide - dirac).abs() <= tolerance * scale
        && translation.iter().filter_map(|t| t.residual).all(|r| r <= tolerance);

    let out = PlaneWaveOutput {
        seed: cli.seed,
        representation: g.representation().name(),
        branch,
        momentum: k.components(),
        mass,
        spinor: u.as_vector().iter().map(|c| [c.re, c.im]).collect(),
        dispersion_residual: dispersion,
        dirac_residual: dirac,
        translation,
        glide_residual: glide,
        glide_minus_dirac: (glide - dirac).abs(),
        tolerance,
        passed,
    };
    let body = match cli.format {
        Format::Json => render(&out),
        Format::Csv => {
            let mut rows = vec![
                format!("K0,{}", num(out.momentum[0])),
                format!("K1,{}", num(out.momentum[1])),
                format!("K2,{}", num(out.momentum[2])),
                format!("K3,{}", num(out.momentum[3])),
                format!("mass,{}", num(out.mass)),
            ];
            for (i, [re, im]) in out.spinor.iter().enumerate() {
                rows.push(format!("u{i}_re,{}", num(*re)));
                rows.push(format!("u{i}_im,{}", num(*im)));
            }
            rows.push(format!("dispersion_residual,{}", num(out.dispersion_residual)));
            rows.push(format!("dirac_residual,{}", num(out.dirac_residual)));
            for t in &out.translation {
                rows.push(format!("translation_residual_{},{}", t.axis, opt(t.residual)));
            }
            rows.push(format!("glide_residual,{}", num(out.glide_residual)));
            rows.push(format!("glide_minus_dirac,{}", num(out.glide_minus_dirac)));
            rows.push(format!("passed,{}", out.passed));
            csv("quantity,value", rows, cli.seed)
        }
    };
    Ok(Outcome { body, passed })
}

#[derive(Serialize)]
struct HydrogenRow {
    n: u32,
    kappa: i32,
    #[serde(rename = "E_grid")]
    e_grid: f64,
    #[serde(rename = "E_sommerfeld")]
    e_sommerfeld: f64,
    rel_error: f64,
}

#[derive(Serialize)]
struct HydrogenOutput {
    seed: u64,
    coupling: f64,
    mass: f64,
    rows: Vec<HydrogenRow>,
    spectra: Vec<SpectrumResult>,
    tolerance: f64,
    passed: bool,
}

fn hydrogen(
    cli: &Cli,
    coupling: f64,
    count: usize,
    kappas: &[i32],
    points: usize,
    r_max: Option<f64>,
    mass: f64,
) -> Result<Outcome, Failure> {
    let mut rows = Vec::new();
    let mut spectra = Vec::new();
    for &kappa in kappas {
        let problem = CoulombProblem::new(coupling, mass, kappa)?;
        if count == 0 {
            return Err(Failure::Usage("count must be at least 1".into()));
        }
        let n_max = principal_number(kappa, count - 1) as f64;
        let extent = r_max.unwrap_or(30.0 * n_max * n_max / (coupling * mass));
        let grid = GridSpec::radial(extent, points)?;
        let spectrum = radial_coulomb_dirac_spectrum(&problem, &grid, count)?;
        for (index, &e) in spectrum.energies.iter().enumerate() {
            let n = principal_number(kappa, index);
            let exact = sommerfeld_energy(coupling, n, kappa, mass)?;
            rows.push(HydrogenRow {
                n,
                kappa,
                e_grid: e,
                e_sommerfeld: exact,
                rel_error: ((e - exact) / exact).abs(),
            });
        }
        spectra.push(spectrum);
    }
    let passed = rows.iter().all(|r| r.rel_error < COULOMB_REL_TOL);
    let body = match cli.format {
        Format::Json => render(&HydrogenOutput {
            seed: cli.seed,
            coupling,
            mass,
            rows,
            spectra,
            tolerance: COULOMB_REL_TOL,
            passed,
        }),
        Format::Csv => csv(
            "n,kappa,E_grid,E_sommerfeld,rel_error",
            rows.iter()
                .map(|r| format!("{},{},{},{},{}", r.n, r.kappa, num(r.e_grid), num(r.e_sommerfeld), num(r.rel_error))),
            cli.seed,
        ),
    };
    Ok(Outcome { body, passed })
}

fn check_model_grid(f: &mut Fields, model: &MetricModel, grid: &GridSpec) {
    f.check("grid", grid.validate());
    f.check("model", model.validate());
    if grid.dimension == GridDimension::Radial1d && !model.v3.is_zero() {
        f.check("model.v3", Err(Error::CrossTermNeedsCartesian));
    }
}

fn check_mass(f: &mut Fields, mass: Option<f64>) {
    if let Some(m) = mass {
        f.check("mass", require_positive("mass", m));
    }
}

#[derive(Serialize)]
struct BoundStatesOutput<'a> {
    seed: u64,
    mass: f64,
    #[serde(flatten)]
    spectrum: &'a SpectrumResult,
}

fn bound_states(cli: &Cli) -> Result<Outcome, Failure> {
    let mut f = read_config(cli)?;
    let mass: Option<f64> = f.required("mass");
    let count: Option<usize> = f.optional("count");
    let grid: Option<GridSpec> = f.required("grid");
    let model: Option<MetricModel> = f.optional("model");
    let base: Option<RadialProfile> = f.optional("base_potential");
    let ordering: Option<Ordering> = f.optional("ordering");
    let reference: Option<EnergyReference> = f.optional("energy_reference");
    let tolerance: Option<f64> = f.optional("tolerance");
    let max_iterations: Option<usize> = f.optional("max_iterations");
    check_mass(&mut f, mass);
    let model = model.unwrap_or_default();
    if let Some(grid) = &grid {
        check_model_grid(&mut f, &model, grid);
    }
    if let Some(base) = &base {
        f.check("base_potential", base.validate());
    }
    if count == Some(0) {
        f.reject("count", "must be at least 1");
    }
    if ordering == Some(Ordering::Literal) {
        f.check("ordering", Err(Error::NonHermitianOrdering));
    }
    if let Some(t) = tolerance {
        f.check("tolerance", require_positive("tolerance", t));
    }
    f.finish()?;
    let (mass, grid) = (mass.expect("checked"), grid.expect("checked"));

    let options = SchrodingerOptions {
        ordering: ordering.unwrap_or_default(),
        energy_reference: reference.unwrap_or_default(),
        tolerance: tolerance.unwrap_or(1e-10),
        max_iterations: max_iterations.unwrap_or(200),
        seed: cli.seed,
    };
    let count = count.unwrap_or(1);
    let spectrum = schrodinger_bound_states(&model, &grid, mass, count, base.as_ref(), &options)?;
    let passed = spectrum.diagnostics.converged;
    let body = match cli.format {
        Format::Json => render(&BoundStatesOutput {
            seed: cli.seed,
            mass,
            spectrum: &spectrum,
        }),
        Format::Csv => {
            let d = &spectrum.diagnostics;
            csv(
                "index,energy,iterations,residual",
                spectrum
                    .energies
                    .iter()
                    .enumerate()
                    .map(|(i, e)| format!("{i},{},{},{}", num(*e), d.iterations[i], num(d.residuals[i]))),
                cli.seed,
            )
        }
    };
    Ok(Outcome { body, passed })
}

#[derive(Serialize)]
struct NrLimitOutput<'a> {
    seed: u64,
    #[serde(flatten)]
    report: &'a NrLimitReport,
}

fn nr_limit(cli: &Cli) -> Result<Outcome, Failure> {
    let mut f = read_config(cli)?;
    let mass: Option<f64> = f.required("mass");
    let base: Option<RadialProfile> = f.required("base_potential");
    let model: Option<MetricModel> = f.required("model");
    let grid: Option<GridSpec> = f.required("grid");
    let epsilons: Option<Vec<f64>> = f.required("epsilons");
    let reference: Option<EnergyReference> = f.optional("energy_reference");
    check_mass(&mut f, mass);
    if let Some(base) = &base {
        f.check("base_potential", base.validate());
    }
    if let (Some(model), Some(grid)) = (&model, &grid) {
        check_model_grid(&mut f, model, grid);
        if !model.v2.is_zero() {
            f.reject("model.v2", "must be zero; only the v1 channel is compared");
        }
        if grid.dimension != GridDimension::Radial1d {
            f.reject("grid.dimension", "must be radial-1d");
        }
    }
    if let Some(eps) = &epsilons {
        if eps.is_empty() || eps.iter().any(|e| !e.is_finite() || *e < 0.0) {
            f.reject("epsilons", "need at least one finite, non-negative amplitude");
        }
    }
    f.finish()?;

    let setup = NrLimitSetup {
        mass: mass.expect("checked"),
        base_potential: base.expect("checked"),
        model: model.expect("checked"),
        grid: grid.expect("checked"),
        epsilons: epsilons.expect("checked"),
        energy_reference: reference.unwrap_or_default(),
    };
    let report = nr_limit_check(&setup)?;
    let body = match cli.format {
        Format::Json => render(&NrLimitOutput {
            seed: cli.seed,
            report: &report,
        }),
        Format::Csv => {
            let mut text = csv(
                "epsilon,dirac_shift,schrodinger_shift,discrepancy",
                (0..report.epsilons.len()).map(|i| {
                    format!(
                        "{},{},{},{}",
                        num(report.epsilons[i]),
                        num(report.dirac_shifts[i]),
                        num(report.schrodinger_shifts[i]),
                        num(report.discrepancies[i])
                    )
                }),
                cli.seed,
            );
            let _ = writeln!(
                text,
                "# exponent = {}, signs_agree = {}, passed = {}",
                opt(report.exponent),
                report.signs_agree,
                report.passed
            );
            text
        }
    };
    Ok(Outcome {
        body,
        passed: report.passed,
    })
}

#[derive(Serialize)]
struct PotentialRow {
    r: f64,
    v1: f64,
    v2: f64,
    v3: f64,
    g00: f64,
    g11: f64,
    g12: f64,
    /// E·v1.
    local_term: f64,
    /// (V_eff ψ_probe) at this node.
    veff_probe: f64,
}

#[derive(Serialize)]
struct PotentialOutput {
    seed: u64,
    energy: f64,
    mass: f64,
    ordering: Ordering,
    probe_width: f64,
    grid: GridSpec,
    rows: Vec<PotentialRow>,
}

fn effective_potential(cli: &Cli) -> Result<Outcome, Failure> {
    let mut f = read_config(cli)?;
    let model: Option<MetricModel> = f.required("model");
    let grid: Option<GridSpec> = f.required("grid");
    let energy: Option<f64> = f.required("energy");
    let mass: Option<f64> = f.required("mass");
    let ordering: Option<Ordering> = f.optional("ordering");
    let width: Option<f64> = f.optional("probe_width");
    check_mass(&mut f, mass);
    if let (Some(model), Some(grid)) = (&model, &grid) {
        check_model_grid(&mut f, model, grid);
    }
    if let Some(e) = energy {
        if !e.is_finite() {
            f.reject("energy", "must be finite");
        }
    }
    if let Some(w) = width {
        f.check("probe_width", require_positive("probe_width", w));
    }
    f.finish()?;
    let (model, grid, energy, mass) = (
        model.expect("checked"),
        grid.expect("checked"),
        energy.expect("checked"),
        mass.expect("checked"),
    );
    let ordering = ordering.unwrap_or_default();
    let width = width.unwrap_or(1.0);

    let op = EffectivePotential::new(&model, &grid, ordering)?;
    let probe: Vec<f64> = (0..grid.len())
        .map(|i| {
            let r = grid.radius(i);
            let gauss = (-(r * r) / (2.0 * width * width)).exp();
            match grid.dimension {
                GridDimension::Radial1d => r * gauss,
                GridDimension::Cartesian3d => gauss,
            }
        })
        .collect();
    let applied = op.apply(&probe, energy, mass)?;
    let line: Vec<usize> = match grid.dimension {
        GridDimension::Radial1d => (0..grid.len()).collect(),
        GridDimension::Cartesian3d => {
            let mid = grid.points / 2;
            (0..grid.points)
                .map(|i| grid.flatten([i, mid, mid]))
                .filter(|&idx| grid.position(idx)[0] >= 0.0 || grid.boundary == Boundary::Periodic)
                .collect()
        }
    };
    let core = grid.core_radius();
    let rows = line
        .into_iter()
        .map(|idx| {
            let r = grid.radius(idx);
            let g = model.metric_at_radius(r.max(core));
            let v1 = model.v1.value_capped(r, core);
            PotentialRow {
                r,
                v1,
                v2: model.v2.value_capped(r, core),
                v3: model.v3.value_capped(r, core),
                g00: g[(0, 0)],
                g11: g[(1, 1)],
                g12: g[(1, 2)],
                local_term: energy * v1,
                veff_probe: applied[idx],
            }
        })
        .collect::<Vec<_>>();
    let body = match cli.format {
        Format::Json => render(&PotentialOutput {
            seed: cli.seed,
            energy,
            mass,
            ordering,
            probe_width: width,
            grid,
            rows,
        }),
        Format::Csv => csv(
            "r,v1,v2,v3,g00,g11,g12,local_term,veff_probe",
            rows.iter().map(|p| {
                format!(
                    "{},{},{},{},{},{},{},{},{}",
                    num(p.r),
                    num(p.v1),
                    num(p.v2),
                    num(p.v3),
                    num(p.g00),
                    num(p.g11),
                    num(p.g12),
                    num(p.local_term),
                    num(p.veff_probe)
                )
            }),
            cli.seed,
        ),
    };
    Ok(Outcome { body, passed: true })
}
