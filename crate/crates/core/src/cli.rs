//! Subcommand implementations behind the `kerr-shadow` binary.
//!
//! Each command first validates everything it needs, then computes. Errors
//! from the first phase are [`CliError::Validation`] (exit code 2), errors
//! from the second are [`CliError::Runtime`] (exit code 1).

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::bifurcation::{
    classify, diagram_scan, photon_ring_radii, sample_sigma_r, sample_sigma_theta, sample_sigma_theta0,
    separatrix_table, sigma_r, write_curve_csv, write_raster_csv, write_separatrix_csv, PolarSign, MIN_SPIN,
};
use crate::config::{Extent, RunConfig};
use crate::error::KerrError;
use crate::geodesic::turning_points;
use crate::kerr::KerrParams;
use crate::observer::{named_observer, omega_bounds, tetrad, u_time_component, ObserverKind, ObserverSpec};
use crate::raytracer::{overlay_boundary, render, write_manifest, write_ppm, ImagePlane, RenderOptions, Tracer};
use crate::shadow::{shadow_curve, write_shadow_csv, ShadowCurve, ShadowRegime};

#[derive(Debug)]
pub enum CliError {
    Validation(KerrError),
    Runtime(KerrError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(e) => write!(f, "invalid configuration: {e}"),
            CliError::Runtime(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

type CliResult<T> = std::result::Result<T, CliError>;

trait Phase<T> {
    fn invalid(self) -> CliResult<T>;
    fn failed(self) -> CliResult<T>;
}

impl<T, E: Into<KerrError>> Phase<T> for std::result::Result<T, E> {
    fn invalid(self) -> CliResult<T> {
        self.map_err(|e| CliError::Validation(e.into()))
    }
    fn failed(self) -> CliResult<T> {
        self.map_err(|e| CliError::Runtime(e.into()))
    }
}

fn require_spin(params: &KerrParams, what: &str) -> CliResult<()> {
    if params.a() < MIN_SPIN {
        return Err(CliError::Validation(KerrError::Config(format!(
            "{what} needs a >= {MIN_SPIN} (the critical-curve parametrization divides by a); got a = {}",
            params.a()
        ))));
    }
    Ok(())
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).failed()?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Runtime(KerrError::Io(format!("{}: {e}", path.display()))))
}

fn write_file(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> CliResult<()> {
    let mut w = create(path)?;
    body(&mut w).and_then(|_| w.flush()).failed()
}

fn regime_label(r: ShadowRegime) -> &'static str {
    match r {
        ShadowRegime::Outside => "outside",
        ShadowRegime::Inside => "inside",
        ShadowRegime::Between => "between",
    }
}

fn observer(cfg: &RunConfig) -> CliResult<(KerrParams, ObserverSpec)> {
    let params = cfg.params().invalid()?;
    let obs = cfg.observer.resolve(&params).invalid()?;
    Ok((params, obs))
}

pub fn cmd_shadow(cfg: &RunConfig, out: &mut dyn Write) -> CliResult<PathBuf> {
    let (params, obs) = observer(cfg)?;
    require_spin(&params, "the shadow boundary")?;
    let path = cfg.output.path(&cfg.output.shadow);

    let curve = shadow_curve(&obs, &params, cfg.shadow_samples).failed()?;
    write_file(&path, |w| write_shadow_csv(w, &curve, &obs, &params))?;
    writeln!(
        out,
        "shadow: {} samples, observer {} [r1*, r2*] = [{:.6}, {:.6}] -> {}",
        curve.samples.len(),
        regime_label(curve.regime),
        curve.r1_star,
        curve.r2_star,
        path.display()
    )
    .failed()?;
    Ok(path)
}

/// Half-width of the window that frames the shadow with a 25% margin.
pub fn auto_extent(curve: &ShadowCurve) -> f64 {
    1.25 * curve.samples.iter().fold(0.0f64, |m, s| m.max(s.x.abs()).max(s.y.abs()))
}

pub fn cmd_render(cfg: &RunConfig, out: &mut dyn Write) -> CliResult<PathBuf> {
    let (params, obs) = observer(cfg)?;
    let needs_curve = cfg.render.overlay_boundary || cfg.image.extent == Extent::Auto;
    if needs_curve {
        let what = if cfg.render.overlay_boundary { "--overlay-boundary" } else { "image.extent = auto" };
        require_spin(&params, what)?;
    }
    let curve = if needs_curve { Some(shadow_curve(&obs, &params, cfg.shadow_samples).invalid()?) } else { None };
    let extent = match (cfg.image.extent, &curve) {
        (Extent::Value(e), _) => e,
        (Extent::Auto, Some(c)) => auto_extent(c),
        (Extent::Auto, None) => unreachable!(),
    };
    if !(extent.is_finite() && extent > 0.0) {
        return Err(CliError::Validation(KerrError::Config(format!(
            "image extent {extent} is not usable; set image.extent"
        ))));
    }
    let plane = ImagePlane { width: cfg.image.width, height: cfg.image.height, extent };
    Tracer::new(&obs, &cfg.scene, &plane, &params, &cfg.integrator).invalid()?;
    let image_path = cfg.output.path(&cfg.output.image);
    let manifest_path = cfg.output.path(&cfg.output.manifest);

    let options = RenderOptions { workers: cfg.render.workers, flat: cfg.render.flat };
    let mut result = render(&obs, &cfg.scene, &plane, &params, &cfg.integrator, options).failed()?;
    if let (true, Some(c)) = (cfg.render.overlay_boundary, &curve) {
        overlay_boundary(&mut result.image, c, &plane, cfg.scene.overlay);
    }
    write_file(&image_path, |w| write_ppm(w, &result.image))?;
    if cfg.render.manifest {
        let mut entries = cfg.entries();
        entries.push(("resolved.omega".into(), format!("{:.16e}", obs.omega)));
        entries.push(("resolved.extent".into(), format!("{extent:.16e}")));
        entries.extend(result.stats.manifest_entries());
        write_file(&manifest_path, |w| write_manifest(w, &entries))?;
    }
    let s = result.stats;
    writeln!(
        out,
        "render: {}x{} pixels, extent {:.6}: {} horizon, {} escaped, {} trapped, {} degenerate, {} failed -> {}",
        plane.width,
        plane.height,
        extent,
        s.horizon,
        s.escaped,
        s.trapped,
        s.degenerate,
        s.failed,
        image_path.display()
    )
    .failed()?;
    Ok(image_path)
}

pub fn cmd_bifurcation(cfg: &RunConfig, out: &mut dyn Write) -> CliResult<(PathBuf, PathBuf)> {
    let params = cfg.params().invalid()?;
    let n = cfg.bifurcation.samples;
    // Σ⁽ʳ⁾ is parametrized with a division by a.
    let sigma_r_points = sample_sigma_r(&params, n).invalid()?;
    let grid = cfg.bifurcation.grid;
    let curves_path = cfg.output.path(&cfg.output.curves);
    let raster_path = cfg.output.path(&cfg.output.raster);

    let mut curves = sigma_r_points;
    curves.extend(sample_sigma_theta(&params, n, PolarSign::Plus));
    curves.extend(sample_sigma_theta(&params, n, PolarSign::Minus));
    curves.extend(sample_sigma_theta0(grid.lambda_min, grid.lambda_max, n));
    let cells = diagram_scan(&params, &grid);
    write_file(&curves_path, |w| write_curve_csv(w, &curves))?;
    write_file(&raster_path, |w| write_raster_csv(w, &cells))?;
    let (r1, r2) = photon_ring_radii(&params);
    writeln!(
        out,
        "bifurcation: a = {}, photon orbits r in [{r1:.10}, {r2:.10}], {} curve points -> {}, {} cells -> {}",
        params.a(),
        curves.len(),
        curves_path.display(),
        cells.len(),
        raster_path.display()
    )
    .failed()?;
    Ok((curves_path, raster_path))
}

pub fn cmd_classify(cfg: &RunConfig, out: &mut dyn Write) -> CliResult<()> {
    let params = cfg.params().invalid()?;
    let missing = |k: &str| CliError::Validation(KerrError::Config(format!("{k} is required")));
    let lambda = cfg.classify.lambda.ok_or_else(|| missing("classify.lambda"))?;
    let eta = cfg.classify.eta.ok_or_else(|| missing("classify.eta"))?;
    let r_start = cfg.classify.r_start;
    if !(r_start > params.horizon()) {
        return Err(CliError::Validation(KerrError::Domain(format!(
            "classify.r_start = {r_start} must exceed the horizon r+ = {}",
            params.horizon()
        ))));
    }

    let class = classify(lambda, eta, r_start, &params);
    let tp = turning_points(lambda, eta, &params);
    let list = |v: &[crate::geodesic::TurningPoint]| {
        if v.is_empty() {
            return "none".to_string();
        }
        v.iter()
            .map(|t| format!("{:.12}{}", t.value, if t.critical { "*" } else { "" }))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let report = format!(
        "a={}\nlambda={lambda}\neta={eta}\nr_start={r_start}\nclass={}\nvortical={}\nradial_turning_points={}\npolar_turning_points={}\n",
        params.a(),
        class.kind.label(),
        class.vortical,
        list(&tp.radial),
        list(&tp.polar),
    );
    out.write_all(report.as_bytes()).failed()
}

pub fn cmd_separatrix(cfg: &RunConfig, out: &mut dyn Write) -> CliResult<PathBuf> {
    let params = cfg.params().invalid()?;
    let s = cfg.separatrix;
    let r_c = s.r_c.ok_or_else(|| CliError::Validation(KerrError::Config("separatrix.r_c is required".into())))?;
    sigma_r(r_c, &params).invalid()?;
    if !(s.r0 > params.horizon()) {
        return Err(CliError::Validation(KerrError::Domain(format!(
            "separatrix.r0 = {} must exceed the horizon r+ = {}",
            s.r0,
            params.horizon()
        ))));
    }
    let path = cfg.output.path(&cfg.output.separatrix);

    let rows = separatrix_table(s.r0, r_c, s.sigma_max, s.samples, &params).failed()?;
    write_file(&path, |w| write_separatrix_csv(w, &rows))?;
    writeln!(out, "separatrix: r_c = {r_c}, r0 = {}, {} rows -> {}", s.r0, rows.len(), path.display()).failed()?;
    Ok(path)
}

pub fn cmd_observer_info(cfg: &RunConfig, out: &mut dyn Write) -> CliResult<()> {
    let (params, obs) = observer(cfg)?;
    let (lo, hi) = omega_bounds(obs.r0, obs.theta0, &params).failed()?;
    let u0 = u_time_component(&obs, &params).failed()?;
    let frame = tetrad(&obs, &params).failed()?;
    let sc = obs.scalars(&params);

    let mut s = String::new();
    let mut line = |k: &str, v: String| {
        s.push_str(k);
        s.push_str(" = ");
        s.push_str(&v);
        s.push('\n');
    };
    line("a", format!("{}", params.a()));
    line("r_plus", format!("{:.16e}", params.horizon()));
    line("r0", format!("{:.16e}", obs.r0));
    line("theta0", format!("{:.16e}", obs.theta0));
    line("phi0", format!("{:.16e}", obs.phi0));
    line("omega", format!("{:.16e}", obs.omega));
    line("omega_minus", format!("{lo:.16e}"));
    line("omega_plus", format!("{hi:.16e}"));
    line("omega_zamo", format!("{:.16e}", sc.omega0));
    line("rho0", format!("{:.16e}", sc.rho0));
    line("delta0", format!("{:.16e}", sc.delta0));
    line("u0", format!("{u0:.16e}"));
    let names = ["e_t", "e_r", "e_theta", "e_phi"];
    for (name, leg) in names.iter().zip(frame.legs()) {
        line(
            &format!("{name} (t,r,theta,phi)"),
            leg.iter().map(|x| format!("{x:.16e}")).collect::<Vec<_>>().join(" "),
        );
    }
    for kind in [ObserverKind::Zamo, ObserverKind::Static, ObserverKind::Carter] {
        let v = match named_observer(kind, obs.r0, obs.theta0, &params) {
            Ok(n) => {
                let u = u_time_component(&n, &params).failed()?;
                format!("omega {:.16e} u0 {u:.16e}", n.omega)
            }
            Err(e) => format!("unavailable ({e})"),
        };
        line(kind.label(), v);
    }
    if params.a() >= MIN_SPIN {
        if let Ok((r1s, r2s)) = crate::shadow::theta_star_roots(&obs, &params) {
            line("r1_star", format!("{r1s:.16e}"));
            line("r2_star", format!("{r2s:.16e}"));
        }
    }
    out.write_all(s.as_bytes()).failed()
}
