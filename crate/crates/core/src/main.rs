use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use kerr_shadow::cli::{self, CliError};
use kerr_shadow::config::{RawConfig, RunConfig, OUT_DIR_ENV};
use kerr_shadow::KerrError;

/// Null geodesics, critical curves and shadows of Kerr black holes.
///
/// Every run is described by a config file of `key = value` lines grouped
/// under `[section]` headers; each flag below overrides the config key
/// named in its help text. Output paths are relative to `output.dir`,
/// which the KERR_SHADOW_OUT_DIR environment variable overrides and
/// `--out-dir` overrides in turn.
///
/// Exit codes: 0 success, 2 invalid configuration, 1 runtime failure.
#[derive(Parser, Debug)]
#[command(name = "kerr-shadow", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write the analytic shadow boundary as CSV.
    #[command(allow_negative_numbers = true)]
    Shadow {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        observer: ObserverArgs,
        /// Boundary samples per branch [shadow.samples].
        #[arg(long, value_name = "N")]
        samples: Option<String>,
        /// Output file name [output.shadow].
        #[arg(long, value_name = "FILE")]
        output: Option<String>,
    },
    /// Ray-trace the observer's view into a PPM image.
    #[command(allow_negative_numbers = true)]
    Render {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        observer: ObserverArgs,
        /// Image width in pixels [image.width].
        #[arg(long, value_name = "PX")]
        width: Option<String>,
        /// Image height in pixels [image.height].
        #[arg(long, value_name = "PX")]
        height: Option<String>,
        /// Half-width of the image-plane window, or `auto` [image.extent].
        #[arg(long, value_name = "X")]
        extent: Option<String>,
        /// Celestial-sphere radius [scene.r_celestial].
        #[arg(long, value_name = "R")]
        r_celestial: Option<String>,
        /// Integrator relative tolerance [integrator.rtol].
        #[arg(long, value_name = "TOL")]
        rtol: Option<String>,
        /// Integrator absolute tolerance [integrator.atol].
        #[arg(long, value_name = "TOL")]
        atol: Option<String>,
        /// Step budget per ray [integrator.max_steps].
        #[arg(long, value_name = "N")]
        max_steps: Option<String>,
        /// Worker threads, 0 for all cores [render.workers].
        #[arg(long, value_name = "N")]
        workers: Option<String>,
        /// Draw the analytic shadow boundary on top [render.overlay_boundary].
        #[arg(long)]
        overlay_boundary: bool,
        /// Straight rays in flat space, as a control image [render.flat].
        #[arg(long)]
        flat: bool,
        /// Write the key=value run manifest: true or false [render.manifest].
        #[arg(long, value_name = "BOOL")]
        manifest: Option<String>,
        /// Boundary samples per branch, for the overlay and `auto` extent [shadow.samples].
        #[arg(long, value_name = "N")]
        samples: Option<String>,
        /// Image file name [output.image].
        #[arg(long, value_name = "FILE")]
        output: Option<String>,
    },
    /// Export the critical curves and the feasibility raster of the (lambda, eta) plane.
    #[command(allow_negative_numbers = true)]
    Bifurcation {
        #[command(flatten)]
        common: Common,
        /// Samples per critical branch [bifurcation.samples].
        #[arg(long, value_name = "N")]
        samples: Option<String>,
        /// Raster lambda range start [bifurcation.lambda_min].
        #[arg(long, value_name = "L")]
        lambda_min: Option<String>,
        /// Raster lambda range end [bifurcation.lambda_max].
        #[arg(long, value_name = "L")]
        lambda_max: Option<String>,
        /// Raster columns [bifurcation.n_lambda].
        #[arg(long, value_name = "N")]
        n_lambda: Option<String>,
        /// Raster eta range start [bifurcation.eta_min].
        #[arg(long, value_name = "E")]
        eta_min: Option<String>,
        /// Raster eta range end [bifurcation.eta_max].
        #[arg(long, value_name = "E")]
        eta_max: Option<String>,
        /// Raster rows [bifurcation.n_eta].
        #[arg(long, value_name = "N")]
        n_eta: Option<String>,
        /// Critical-curve file name [output.curves].
        #[arg(long, value_name = "FILE")]
        curves: Option<String>,
        /// Raster file name [output.raster].
        #[arg(long, value_name = "FILE")]
        raster: Option<String>,
    },
    /// Classify a ray by its first integrals and print a report.
    #[command(allow_negative_numbers = true)]
    Classify {
        #[command(flatten)]
        common: Common,
        /// lambda = L/E [classify.lambda].
        #[arg(long, value_name = "L")]
        lambda: Option<String>,
        /// eta [classify.eta].
        #[arg(long, value_name = "E")]
        eta: Option<String>,
        /// Radius the ray starts from [classify.r_start].
        #[arg(long, value_name = "R")]
        r_start: Option<String>,
    },
    /// Tabulate the separatrix approaching a spherical photon orbit.
    #[command(allow_negative_numbers = true)]
    Separatrix {
        #[command(flatten)]
        common: Common,
        /// Spherical-orbit radius [separatrix.r_c].
        #[arg(long, value_name = "R")]
        r_c: Option<String>,
        /// Initial radius [separatrix.r0].
        #[arg(long, value_name = "R")]
        r0: Option<String>,
        /// Mino-time span [separatrix.sigma_max].
        #[arg(long, value_name = "S")]
        sigma_max: Option<String>,
        /// Table rows [separatrix.samples].
        #[arg(long, value_name = "N")]
        samples: Option<String>,
        /// Output file name [output.separatrix].
        #[arg(long, value_name = "FILE")]
        output: Option<String>,
    },
    /// Print the observer's admissible angular velocities, four-velocity and tetrad.
    #[command(allow_negative_numbers = true)]
    ObserverInfo {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        observer: ObserverArgs,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// Config file; keys not set there take their defaults.
    #[arg(short, long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Spin parameter in [0, 1] [a].
    #[arg(short = 'a', long = "spin", value_name = "A")]
    spin: Option<String>,
    /// Output directory [output.dir]; beats KERR_SHADOW_OUT_DIR.
    #[arg(short, long, value_name = "DIR")]
    out_dir: Option<PathBuf>,
    /// Override any config key, e.g. `--set scene.shadow=#202020`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Args, Debug)]
struct ObserverArgs {
    /// Observer radius [observer.r0].
    #[arg(long, value_name = "R")]
    r0: Option<String>,
    /// Observer polar angle; accepts forms like `pi/3` [observer.theta0].
    #[arg(long, value_name = "THETA")]
    theta0: Option<String>,
    /// Angular velocity, or zamo, static, carter [observer.omega].
    #[arg(long, value_name = "OMEGA")]
    omega: Option<String>,
    /// Observer azimuth [observer.phi0].
    #[arg(long, value_name = "PHI")]
    phi0: Option<String>,
}

impl ObserverArgs {
    fn overrides(self) -> Vec<(&'static str, Option<String>)> {
        vec![
            ("observer.r0", self.r0),
            ("observer.theta0", self.theta0),
            ("observer.omega", self.omega),
            ("observer.phi0", self.phi0),
        ]
    }
}

fn flag(on: bool) -> Option<String> {
    on.then(|| "true".to_string())
}

/// Config file, then flag overrides, then the output directory rule.
fn load(common: Common, overrides: Vec<(&'static str, Option<String>)>) -> Result<RunConfig, CliError> {
    let invalid = CliError::Validation;
    let mut raw = match &common.config {
        Some(path) => RawConfig::load(path).map_err(invalid)?,
        None => RawConfig::default(),
    };
    for pair in &common.set {
        raw.set_pair(pair).map_err(invalid)?;
    }
    let spin = [("a", common.spin)];
    for (key, value) in spin.into_iter().chain(overrides) {
        if let Some(v) = value {
            raw.set(key, v).map_err(invalid)?;
        }
    }
    let mut cfg = RunConfig::from_raw(&raw).map_err(invalid)?;
    if let Some(dir) = std::env::var_os(OUT_DIR_ENV).filter(|d| !d.is_empty()) {
        cfg.output.dir = PathBuf::from(dir);
    }
    if let Some(dir) = common.out_dir {
        cfg.output.dir = dir;
    }
    Ok(cfg)
}

fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Shadow { common, observer, samples, output } => {
            let mut o = observer.overrides();
            o.push(("shadow.samples", samples));
            o.push(("output.shadow", output));
            cli::cmd_shadow(&load(common, o)?, out).map(drop)
        }
        Command::Render {
            common,
            observer,
            width,
            height,
            extent,
            r_celestial,
            rtol,
            atol,
            max_steps,
            workers,
            overlay_boundary,
            flat,
            manifest,
            samples,
            output,
        } => {
            let mut o = observer.overrides();
            o.extend([
                ("image.width", width),
                ("image.height", height),
                ("image.extent", extent),
                ("scene.r_celestial", r_celestial),
                ("integrator.rtol", rtol),
                ("integrator.atol", atol),
                ("integrator.max_steps", max_steps),
                ("render.workers", workers),
                ("render.overlay_boundary", flag(overlay_boundary)),
                ("render.flat", flag(flat)),
                ("render.manifest", manifest),
                ("shadow.samples", samples),
                ("output.image", output),
            ]);
            cli::cmd_render(&load(common, o)?, out).map(drop)
        }
        Command::Bifurcation {
            common,
            samples,
            lambda_min,
            lambda_max,
            n_lambda,
            eta_min,
            eta_max,
            n_eta,
            curves,
            raster,
        } => {
            let o = vec![
                ("bifurcation.samples", samples),
                ("bifurcation.lambda_min", lambda_min),
                ("bifurcation.lambda_max", lambda_max),
                ("bifurcation.n_lambda", n_lambda),
                ("bifurcation.eta_min", eta_min),
                ("bifurcation.eta_max", eta_max),
                ("bifurcation.n_eta", n_eta),
                ("output.curves", curves),
                ("output.raster", raster),
            ];
            cli::cmd_bifurcation(&load(common, o)?, out).map(drop)
        }
        Command::Classify { common, lambda, eta, r_start } => {
            let o = vec![("classify.lambda", lambda), ("classify.eta", eta), ("classify.r_start", r_start)];
            cli::cmd_classify(&load(common, o)?, out)
        }
        Command::Separatrix { common, r_c, r0, sigma_max, samples, output } => {
            let o = vec![
                ("separatrix.r_c", r_c),
                ("separatrix.r0", r0),
                ("separatrix.sigma_max", sigma_max),
                ("separatrix.samples", samples),
                ("output.separatrix", output),
            ];
            cli::cmd_separatrix(&load(common, o)?, out).map(drop)
        }
        Command::ObserverInfo { common, observer } => {
            cli::cmd_observer_info(&load(common, observer.overrides())?, out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match run(cli, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = out.flush();
            eprintln!("kerr-shadow: {e}");
            if let CliError::Runtime(KerrError::RenderFailed { .. }) = e {
                eprintln!("kerr-shadow: too many pixels failed; try a looser tolerance or a larger step budget");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
