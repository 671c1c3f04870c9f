//! Run configuration.
//!
//! The file format is flat `key = value` text. `[section]` headers prefix
//! the keys that follow them, so `r0 = 5` under `[observer]` is the key
//! `observer.r0`. Keys before the first header (only `a`) have no prefix.
//! `#` and `;` start comments.
//!
//! ```text
//! a = 0.98
//!
//! [observer]
//! r0 = 5
//! theta0 = pi/2
//! omega = zamo
//! ```

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use crate::bifurcation::ScanGrid;
use crate::error::{KerrError, Result};
use crate::geodesic::IntegratorControls;
use crate::kerr::KerrParams;
use crate::observer::{named_observer, ObserverKind, ObserverSpec};
use crate::raytracer::{Rgb, SceneConfig};

/// Environment variable that overrides `output.dir`.
pub const OUT_DIR_ENV: &str = "KERR_SHADOW_OUT_DIR";

/// Every accepted key with its default (`None` for keys without one) and a
/// one-line description.
pub const KEYS: &[(&str, Option<&str>, &str)] = &[
    ("a", Some("0.98"), "spin parameter in [0, 1]"),
    ("observer.r0", Some("5"), "observer radius, outside the horizon"),
    ("observer.theta0", Some("pi/2"), "observer polar angle in (0, pi)"),
    ("observer.omega", Some("static"), "angular velocity, or one of zamo|static|carter"),
    ("observer.phi0", Some("0"), "observer azimuth"),
    ("scene.r_celestial", Some("1000"), "celestial-sphere radius"),
    ("scene.palette", Some("#e69f00 #56b4e9 #009e73 #f0e442"), "four sky colours: north-near north-far south-near south-far"),
    ("scene.shadow", Some("#000000"), "colour of rays that fall into the hole"),
    ("scene.overlay", Some("#ff0000"), "colour of the analytic boundary overlay"),
    ("scene.failure", Some("#ff00ff"), "colour of pixels whose integration failed"),
    ("image.width", Some("512"), "image width in pixels"),
    ("image.height", Some("512"), "image height in pixels"),
    ("image.extent", Some("auto"), "half-width of the plane window, or auto (1.25 x shadow size)"),
    ("integrator.rtol", Some("1e-10"), "relative tolerance"),
    ("integrator.atol", Some("1e-12"), "absolute tolerance"),
    ("integrator.max_steps", Some("1000000"), "step budget per ray"),
    ("integrator.sigma_budget", Some("1000"), "Mino-time budget per ray"),
    ("shadow.samples", Some("512"), "boundary samples per branch"),
    ("render.workers", Some("0"), "worker threads, 0 = all cores"),
    ("render.overlay_boundary", Some("false"), "draw the analytic shadow boundary"),
    ("render.flat", Some("false"), "straight rays in flat space (control image)"),
    ("render.manifest", Some("true"), "write a key=value run manifest next to the image"),
    ("bifurcation.samples", Some("512"), "samples per critical branch"),
    ("bifurcation.lambda_min", Some("-8"), "raster lambda range start"),
    ("bifurcation.lambda_max", Some("8"), "raster lambda range end"),
    ("bifurcation.n_lambda", Some("161"), "raster columns"),
    ("bifurcation.eta_min", Some("-2"), "raster eta range start"),
    ("bifurcation.eta_max", Some("30"), "raster eta range end"),
    ("bifurcation.n_eta", Some("161"), "raster rows"),
    ("classify.lambda", None, "lambda = L/E of the ray"),
    ("classify.eta", None, "eta of the ray"),
    ("classify.r_start", Some("1000"), "radius the ray starts from"),
    ("separatrix.r_c", None, "spherical-orbit radius in [r1, r2]"),
    ("separatrix.r0", Some("10"), "initial radius"),
    ("separatrix.sigma_max", Some("10"), "Mino-time span"),
    ("separatrix.samples", Some("1001"), "table rows"),
    ("output.dir", Some("."), "output directory (overridden by KERR_SHADOW_OUT_DIR)"),
    ("output.shadow", Some("shadow.csv"), "shadow boundary CSV"),
    ("output.image", Some("render.ppm"), "rendered image"),
    ("output.manifest", Some("render.manifest"), "render manifest"),
    ("output.curves", Some("curves.csv"), "critical curves CSV"),
    ("output.raster", Some("raster.csv"), "feasibility raster CSV"),
    ("output.separatrix", Some("separatrix.csv"), "separatrix table CSV"),
];

/// Untyped key/value pairs as read from a file plus overrides.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RawConfig {
    entries: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        let mut section = String::new();
        for (n, line) in text.lines().enumerate() {
            let n = n + 1;
            let line = strip_comment(line).trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| KerrError::Config(format!("line {n}: unterminated section header")))?
                    .trim();
                if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                    return Err(KerrError::Config(format!("line {n}: bad section name '{name}'")));
                }
                section = name.to_string();
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| KerrError::Config(format!("line {n}: expected 'key = value'")))?;
            let k = k.trim();
            if k.is_empty() {
                return Err(KerrError::Config(format!("line {n}: empty key")));
            }
            let key = if section.is_empty() { k.to_string() } else { format!("{section}.{k}") };
            check_known(&key)?;
            if entries.insert(key.clone(), v.trim().to_string()).is_some() {
                return Err(KerrError::Config(format!("line {n}: duplicate key '{key}'")));
            }
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| KerrError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Insert or replace a key; used for command-line overrides.
    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<()> {
        check_known(key)?;
        self.entries.insert(key.to_string(), value.into());
        Ok(())
    }

    /// Apply a `key=value` override.
    pub fn set_pair(&mut self, pair: &str) -> Result<()> {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| KerrError::Config(format!("override '{pair}' is not of the form key=value")))?;
        self.set(k.trim(), v.trim())
    }

    /// Explicit value, else the default.
    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str).or_else(|| default_of(key))
    }

    pub fn is_set(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    fn required(&self, key: &str) -> Result<&str> {
        self.get(key).ok_or_else(|| KerrError::Config(format!("{key} is required")))
    }

    fn float(&self, key: &str) -> Result<f64> {
        let v = self.required(key)?;
        v.parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| KerrError::Config(format!("{key}: '{v}' is not a finite number")))
    }

    fn angle(&self, key: &str) -> Result<f64> {
        let v = self.required(key)?;
        parse_angle(v).ok_or_else(|| KerrError::Config(format!("{key}: '{v}' is not an angle (number or k*pi/m)")))
    }

    fn count(&self, key: &str, min: usize) -> Result<usize> {
        let v = self.required(key)?;
        let n = v
            .parse::<usize>()
            .map_err(|_| KerrError::Config(format!("{key}: '{v}' is not a non-negative integer")))?;
        if n < min {
            return Err(KerrError::Config(format!("{key}: must be at least {min}, got {n}")));
        }
        Ok(n)
    }

    fn flag(&self, key: &str) -> Result<bool> {
        let v = self.required(key)?;
        match v.to_ascii_lowercase().as_str() {
            "true" | "yes" | "on" | "1" => Ok(true),
            "false" | "no" | "off" | "0" => Ok(false),
            _ => Err(KerrError::Config(format!("{key}: '{v}' is not a boolean"))),
        }
    }

    fn positive(&self, key: &str) -> Result<f64> {
        let x = self.float(key)?;
        if !(x > 0.0) {
            return Err(KerrError::Config(format!("{key}: must be positive, got {x}")));
        }
        Ok(x)
    }

    fn colour(&self, key: &str) -> Result<Rgb> {
        let v = self.required(key)?;
        parse_colour(v).ok_or_else(|| KerrError::Config(format!("{key}: '{v}' is not a #rrggbb colour")))
    }
}

fn strip_comment(line: &str) -> &str {
    // `#` inside a value is a colour, so only treat it as a comment at the
    // start of a line or after whitespace that isn't followed by a hex digit.
    let bytes = line.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        if b == b';' {
            return &line[..i];
        }
        if b == b'#' {
            let at_start = line[..i].trim().is_empty();
            let colour = bytes.get(i + 1).is_some_and(u8::is_ascii_hexdigit) && !at_start;
            if !colour {
                return &line[..i];
            }
        }
    }
    line
}

fn default_of(key: &str) -> Option<&'static str> {
    KEYS.iter().find(|(k, _, _)| *k == key).and_then(|(_, d, _)| *d)
}

fn check_known(key: &str) -> Result<()> {
    if KEYS.iter().any(|(k, _, _)| *k == key) {
        Ok(())
    } else {
        Err(KerrError::Config(format!("unknown key '{key}'")))
    }
}

/// A number, or a multiple of π written as `pi`, `pi/2`, `2pi/3`, `-pi/4`,
/// `3*pi/8`.
pub fn parse_angle(s: &str) -> Option<f64> {
    let s = s.trim().to_ascii_lowercase();
    if let Ok(x) = s.parse::<f64>() {
        return x.is_finite().then_some(x);
    }
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim().parse::<f64>().ok()?),
        None => (s.as_str(), 1.0),
    };
    let coef = num.strip_suffix("pi")?.trim().trim_end_matches('*').trim();
    let k = match coef {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().ok()?,
    };
    let x = k * PI / den;
    x.is_finite().then_some(x)
}

/// `#rrggbb`.
pub fn parse_colour(s: &str) -> Option<Rgb> {
    let hex = s.trim().strip_prefix('#')?;
    if hex.len() != 6 || !hex.is_ascii() {
        return None;
    }
    let byte = |i: usize| u8::from_str_radix(&hex[i..i + 2], 16).ok();
    Some([byte(0)?, byte(2)?, byte(4)?])
}

pub fn format_colour(c: Rgb) -> String {
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

/// Observer angular velocity: explicit or by named family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OmegaSetting {
    Value(f64),
    Named(ObserverKind),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObserverBlock {
    pub r0: f64,
    pub theta0: f64,
    pub omega: OmegaSetting,
    pub phi0: f64,
}

impl ObserverBlock {
    /// Validated observer; named families resolve their `Ω` here.
    pub fn resolve(&self, params: &KerrParams) -> Result<ObserverSpec> {
        let omega = match self.omega {
            OmegaSetting::Value(w) => w,
            OmegaSetting::Named(kind) => named_observer(kind, self.r0, self.theta0, params)?.omega,
        };
        ObserverSpec::new(self.r0, self.theta0, omega, self.phi0, params)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extent {
    Auto,
    Value(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImageBlock {
    pub width: usize,
    pub height: usize,
    pub extent: Extent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RenderBlock {
    pub workers: usize,
    pub overlay_boundary: bool,
    pub flat: bool,
    pub manifest: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BifurcationBlock {
    pub samples: usize,
    pub grid: ScanGrid,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyBlock {
    pub lambda: Option<f64>,
    pub eta: Option<f64>,
    pub r_start: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparatrixBlock {
    pub r_c: Option<f64>,
    pub r0: f64,
    pub sigma_max: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputBlock {
    pub dir: PathBuf,
    pub shadow: String,
    pub image: String,
    pub manifest: String,
    pub curves: String,
    pub raster: String,
    pub separatrix: String,
}

impl OutputBlock {
    pub fn path(&self, file: &str) -> PathBuf {
        self.dir.join(file)
    }
}

/// Fully typed configuration. Only syntax and ranges that need no physics
/// are checked here; spin and observer validity are checked by
/// [`RunConfig::params`] and [`ObserverBlock::resolve`].
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub a: f64,
    pub observer: ObserverBlock,
    pub scene: SceneConfig,
    pub image: ImageBlock,
    pub integrator: IntegratorControls,
    pub shadow_samples: usize,
    pub render: RenderBlock,
    pub bifurcation: BifurcationBlock,
    pub classify: ClassifyBlock,
    pub separatrix: SeparatrixBlock,
    pub output: OutputBlock,
}

impl RunConfig {
    pub fn from_raw(raw: &RawConfig) -> Result<Self> {
        let omega_text = raw.required("observer.omega")?;
        let omega = match ObserverKind::parse(omega_text) {
            Some(kind) => OmegaSetting::Named(kind),
            None => OmegaSetting::Value(raw.float("observer.omega").map_err(|_| {
                KerrError::Config(format!(
                    "observer.omega: '{omega_text}' is neither a number nor one of zamo, static, carter"
                ))
            })?),
        };
        let extent = match raw.required("image.extent")? {
            s if s.eq_ignore_ascii_case("auto") => Extent::Auto,
            _ => Extent::Value(raw.positive("image.extent")?),
        };

        let palette_text = raw.required("scene.palette")?;
        let colours: Vec<&str> = palette_text.split_whitespace().collect();
        if colours.len() != 4 {
            return Err(KerrError::Config(format!("scene.palette: expected 4 colours, got {}", colours.len())));
        }
        let mut palette = [[0u8; 3]; 4];
        for (slot, c) in palette.iter_mut().zip(&colours) {
            *slot = parse_colour(c)
                .ok_or_else(|| KerrError::Config(format!("scene.palette: '{c}' is not a #rrggbb colour")))?;
        }

        let grid = ScanGrid {
            lambda_min: raw.float("bifurcation.lambda_min")?,
            lambda_max: raw.float("bifurcation.lambda_max")?,
            n_lambda: raw.count("bifurcation.n_lambda", 2)?,
            eta_min: raw.float("bifurcation.eta_min")?,
            eta_max: raw.float("bifurcation.eta_max")?,
            n_eta: raw.count("bifurcation.n_eta", 2)?,
        };
        if !(grid.lambda_max > grid.lambda_min) || !(grid.eta_max > grid.eta_min) {
            return Err(KerrError::Config("bifurcation: raster ranges must satisfy min < max".into()));
        }

        let rtol = raw.positive("integrator.rtol")?;
        let atol = raw.positive("integrator.atol")?;
        let integrator = IntegratorControls {
            rtol,
            atol,
            max_steps: raw.count("integrator.max_steps", 1)?,
            sigma_budget: raw.positive("integrator.sigma_budget")?,
            ..IntegratorControls::default()
        };

        let optional = |key: &str| -> Result<Option<f64>> {
            if raw.get(key).is_some() {
                raw.float(key).map(Some)
            } else {
                Ok(None)
            }
        };

        Ok(Self {
            a: raw.float("a")?,
            observer: ObserverBlock {
                r0: raw.float("observer.r0")?,
                theta0: raw.angle("observer.theta0")?,
                omega,
                phi0: raw.angle("observer.phi0")?,
            },
            scene: SceneConfig {
                r_celestial: raw.positive("scene.r_celestial")?,
                palette,
                shadow: raw.colour("scene.shadow")?,
                overlay: raw.colour("scene.overlay")?,
                failure: raw.colour("scene.failure")?,
            },
            image: ImageBlock {
                width: raw.count("image.width", 1)?,
                height: raw.count("image.height", 1)?,
                extent,
            },
            integrator,
            shadow_samples: raw.count("shadow.samples", 2)?,
            render: RenderBlock {
                workers: raw.count("render.workers", 0)?,
                overlay_boundary: raw.flag("render.overlay_boundary")?,
                flat: raw.flag("render.flat")?,
                manifest: raw.flag("render.manifest")?,
            },
            bifurcation: BifurcationBlock { samples: raw.count("bifurcation.samples", 2)?, grid },
            classify: ClassifyBlock {
                lambda: optional("classify.lambda")?,
                eta: optional("classify.eta")?,
                r_start: raw.float("classify.r_start")?,
            },
            separatrix: SeparatrixBlock {
                r_c: optional("separatrix.r_c")?,
                r0: raw.float("separatrix.r0")?,
                sigma_max: raw.positive("separatrix.sigma_max")?,
                samples: raw.count("separatrix.samples", 2)?,
            },
            output: OutputBlock {
                dir: PathBuf::from(raw.required("output.dir")?),
                shadow: raw.required("output.shadow")?.to_string(),
                image: raw.required("output.image")?.to_string(),
                manifest: raw.required("output.manifest")?.to_string(),
                curves: raw.required("output.curves")?.to_string(),
                raster: raw.required("output.raster")?.to_string(),
                separatrix: raw.required("output.separatrix")?.to_string(),
            },
        })
    }

    pub fn params(&self) -> Result<KerrParams> {
        KerrParams::new(self.a)
    }

    /// Resolved configuration as `key=value` pairs, for run manifests.
    pub fn entries(&self) -> Vec<(String, String)> {
        let f = |x: f64| format!("{x:.16e}");
        let omega = match self.observer.omega {
            OmegaSetting::Value(w) => f(w),
            OmegaSetting::Named(k) => k.label().to_string(),
        };
        let extent = match self.image.extent {
            Extent::Auto => "auto".to_string(),
            Extent::Value(e) => f(e),
        };
        let palette: Vec<String> = self.scene.palette.iter().map(|&c| format_colour(c)).collect();
        [
            ("a", f(self.a)),
            ("observer.r0", f(self.observer.r0)),
            ("observer.theta0", f(self.observer.theta0)),
            ("observer.omega", omega),
            ("observer.phi0", f(self.observer.phi0)),
            ("scene.r_celestial", f(self.scene.r_celestial)),
            ("scene.palette", palette.join(" ")),
            ("scene.shadow", format_colour(self.scene.shadow)),
            ("scene.overlay", format_colour(self.scene.overlay)),
            ("scene.failure", format_colour(self.scene.failure)),
            ("image.width", self.image.width.to_string()),
            ("image.height", self.image.height.to_string()),
            ("image.extent", extent),
            ("integrator.rtol", f(self.integrator.rtol)),
            ("integrator.atol", f(self.integrator.atol)),
            ("integrator.max_steps", self.integrator.max_steps.to_string()),
            ("integrator.sigma_budget", f(self.integrator.sigma_budget)),
            ("shadow.samples", self.shadow_samples.to_string()),
            ("render.overlay_boundary", self.render.overlay_boundary.to_string()),
            ("render.flat", self.render.flat.to_string()),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
    }
}
