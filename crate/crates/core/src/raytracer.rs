//! Backward ray tracing from the observer's image plane onto a coloured
//! celestial sphere.

use std::io::Write;

use rayon::prelude::*;

use crate::error::{KerrError, Result};
use crate::geodesic::{integrate_endpoint, IntegratorControls, TerminationReason};
use crate::kerr::KerrParams;
use crate::observer::ObserverSpec;
use crate::shadow::{inverse_stereographic, DirectionAngles, ObserverFrame, ShadowCurve};

pub type Rgb = [u8; 3];

/// Largest tolerated fraction of failed pixels.
pub const MAX_FAILED_FRACTION: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SceneConfig {
    pub r_celestial: f64,
    /// Indexed by `2·south + far`, where `south` is `θ > π/2` and `far`
    /// is `φ − φ₀ ∈ [π, 2π)`.
    pub palette: [Rgb; 4],
    pub shadow: Rgb,
    pub overlay: Rgb,
    /// Written for pixels whose integration failed.
    pub failure: Rgb,
}

impl Default for SceneConfig {
    fn default() -> Self {
        Self {
            r_celestial: 1000.0,
            palette: [[230, 159, 0], [86, 180, 233], [0, 158, 115], [240, 228, 66]],
            shadow: [0, 0, 0],
            overlay: [255, 0, 0],
            failure: [255, 0, 255],
        }
    }
}

impl SceneConfig {
    /// Colour of the celestial-sphere patch containing `(θ, φ)`.
    pub fn sky_colour(&self, theta: f64, phi: f64, phi0: f64) -> Rgb {
        let south = theta > std::f64::consts::FRAC_PI_2;
        let far = (phi - phi0).rem_euclid(std::f64::consts::TAU) >= std::f64::consts::PI;
        self.palette[2 * usize::from(south) + usize::from(far)]
    }
}

/// Pixel grid laid over the square `[-extent, extent]²` of the `(X, Y)`
/// plane. Row 0 is the top (`Y = +extent`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImagePlane {
    pub width: usize,
    pub height: usize,
    pub extent: f64,
}

impl ImagePlane {
    /// Plane coordinates of the centre of pixel `(i, j)`; `i` is the column.
    pub fn to_plane(&self, i: usize, j: usize) -> (f64, f64) {
        let x = self.extent * (2.0 * (i as f64 + 0.5) / self.width as f64 - 1.0);
        let y = self.extent * (1.0 - 2.0 * (j as f64 + 0.5) / self.height as f64);
        (x, y)
    }

    /// Continuous pixel coordinates of a plane point (pixel centres at
    /// half-integers shifted to integers).
    pub fn to_pixel(&self, x: f64, y: f64) -> (f64, f64) {
        let fi = (x / self.extent + 1.0) * 0.5 * self.width as f64 - 0.5;
        let fj = (1.0 - y / self.extent) * 0.5 * self.height as f64 - 0.5;
        (fi, fj)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    /// RGB triples, row-major from the top-left corner.
    pub data: Vec<u8>,
}

impl Image {
    pub fn new(width: usize, height: usize, fill: Rgb) -> Self {
        let mut data = Vec::with_capacity(width * height * 3);
        for _ in 0..width * height {
            data.extend_from_slice(&fill);
        }
        Self { width, height, data }
    }

    pub fn get(&self, i: usize, j: usize) -> Rgb {
        let k = 3 * (j * self.width + i);
        [self.data[k], self.data[k + 1], self.data[k + 2]]
    }

    pub fn set(&mut self, i: usize, j: usize, c: Rgb) {
        let k = 3 * (j * self.width + i);
        self.data[k..k + 3].copy_from_slice(&c);
    }
}

/// What happened to the ray behind one pixel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PixelOutcome {
    Horizon,
    Escaped { patch: usize },
    /// Step budget or σ budget exhausted; shown as shadow.
    Trapped,
    /// Negative-energy ray at an observer inside the ergosphere.
    Degenerate,
    Failed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RenderStats {
    pub pixels: usize,
    pub horizon: usize,
    pub escaped: usize,
    pub trapped: usize,
    pub degenerate: usize,
    pub failed: usize,
}

impl RenderStats {
    fn add(&mut self, o: PixelOutcome) {
        self.pixels += 1;
        match o {
            PixelOutcome::Horizon => self.horizon += 1,
            PixelOutcome::Escaped { .. } => self.escaped += 1,
            PixelOutcome::Trapped => self.trapped += 1,
            PixelOutcome::Degenerate => self.degenerate += 1,
            PixelOutcome::Failed => self.failed += 1,
        }
    }
}

/// Immutable per-render state shared by all pixels.
#[derive(Debug, Clone, Copy)]
pub struct Tracer {
    frame: ObserverFrame,
    scene: SceneConfig,
    plane: ImagePlane,
    controls: IntegratorControls,
    flat: bool,
}

impl Tracer {
    pub fn new(
        obs: &ObserverSpec,
        scene: &SceneConfig,
        plane: &ImagePlane,
        params: &KerrParams,
        controls: &IntegratorControls,
    ) -> Result<Self> {
        if plane.width == 0 || plane.height == 0 || !(plane.extent > 0.0) {
            return Err(KerrError::Domain("image plane must have positive size and extent".into()));
        }
        if !(scene.r_celestial > obs.r0) {
            return Err(KerrError::Domain(format!(
                "celestial sphere radius {} must exceed the observer radius {}",
                scene.r_celestial, obs.r0
            )));
        }
        let mut controls = controls.backward();
        controls.r_max = scene.r_celestial;
        controls.early_capture = true;
        Ok(Self { frame: ObserverFrame::new(obs, params)?, scene: *scene, plane: *plane, controls, flat: false })
    }

    /// Replace geodesics by straight lines in flat space.
    pub fn flat(mut self, flat: bool) -> Self {
        self.flat = flat;
        self
    }

    pub fn outcome(&self, i: usize, j: usize) -> PixelOutcome {
        let (x, y) = self.plane.to_plane(i, j);
        let angles = inverse_stereographic(x, y);
        if self.flat {
            return self.flat_outcome(angles);
        }
        let (state, c) = match self.frame.ray(angles) {
            Ok(v) => v,
            Err(KerrError::DegenerateRay) => return PixelOutcome::Degenerate,
            Err(_) => return PixelOutcome::Failed,
        };
        match integrate_endpoint(&state, &c, &self.frame.params, &self.controls) {
            Ok(end) => match end.reason {
                TerminationReason::HorizonReached => PixelOutcome::Horizon,
                TerminationReason::Escaped => {
                    let p = end.last.state.point;
                    PixelOutcome::Escaped { patch: self.patch(p.theta, p.phi) }
                }
                TerminationReason::MaxSteps | TerminationReason::TurningBounded => PixelOutcome::Trapped,
            },
            Err(_) => PixelOutcome::Failed,
        }
    }

    fn patch(&self, theta: f64, phi: f64) -> usize {
        let south = theta > std::f64::consts::FRAC_PI_2;
        let far = (phi - self.frame.obs.phi0).rem_euclid(std::f64::consts::TAU) >= std::f64::consts::PI;
        2 * usize::from(south) + usize::from(far)
    }

    /// Straight ray from the observer toward the sky direction, hitting the
    /// sphere of radius `r_celestial` about the origin.
    fn flat_outcome(&self, angles: DirectionAngles) -> PixelOutcome {
        let obs = &self.frame.obs;
        let [n1, n2, n3] = angles.unit_vector();
        let (st, ct) = obs.theta0.sin_cos();
        let (sp, cp) = obs.phi0.sin_cos();
        let r_hat = [st * cp, st * sp, ct];
        let th_hat = [ct * cp, ct * sp, -st];
        let ph_hat = [-sp, cp, 0.0];
        // e_r and e_θ point toward decreasing r and θ.
        let d: [f64; 3] = std::array::from_fn(|k| -n1 * th_hat[k] + n2 * ph_hat[k] - n3 * r_hat[k]);
        let pos: [f64; 3] = std::array::from_fn(|k| obs.r0 * r_hat[k]);
        let pd: f64 = (0..3).map(|k| pos[k] * d[k]).sum();
        let big_r = self.scene.r_celestial;
        let t = -pd + (pd * pd - obs.r0 * obs.r0 + big_r * big_r).sqrt();
        let hit: [f64; 3] = std::array::from_fn(|k| pos[k] + t * d[k]);
        let theta = (hit[2] / big_r).clamp(-1.0, 1.0).acos();
        let phi = hit[1].atan2(hit[0]);
        PixelOutcome::Escaped { patch: self.patch(theta, phi) }
    }

    pub fn colour(&self, o: PixelOutcome) -> Rgb {
        match o {
            PixelOutcome::Escaped { patch } => self.scene.palette[patch],
            PixelOutcome::Failed => self.scene.failure,
            _ => self.scene.shadow,
        }
    }
}

/// Colour of a single pixel.
pub fn trace_pixel(
    i: usize,
    j: usize,
    obs: &ObserverSpec,
    scene: &SceneConfig,
    plane: &ImagePlane,
    params: &KerrParams,
    controls: &IntegratorControls,
) -> Result<Rgb> {
    let tracer = Tracer::new(obs, scene, plane, params, controls)?;
    Ok(tracer.colour(tracer.outcome(i, j)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderOutput {
    pub image: Image,
    pub stats: RenderStats,
}

/// Options that do not change the physics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RenderOptions {
    /// Worker threads; `0` uses all available cores.
    pub workers: usize,
    pub flat: bool,
}

/// Trace every pixel. The result does not depend on `workers`: each pixel
/// is computed independently and written to its own slot.
pub fn render(
    obs: &ObserverSpec,
    scene: &SceneConfig,
    plane: &ImagePlane,
    params: &KerrParams,
    controls: &IntegratorControls,
    options: RenderOptions,
) -> Result<RenderOutput> {
    let tracer = Tracer::new(obs, scene, plane, params, controls)?.flat(options.flat);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.workers)
        .build()
        .map_err(|e| KerrError::Io(format!("thread pool: {e}")))?;
    let width = plane.width;
    let outcomes: Vec<PixelOutcome> = pool.install(|| {
        (0..plane.height)
            .into_par_iter()
            .flat_map_iter(|j| (0..width).map(move |i| (i, j)))
            .map(|(i, j)| tracer.outcome(i, j))
            .collect()
    });

    let mut image = Image::new(plane.width, plane.height, scene.shadow);
    let mut stats = RenderStats::default();
    for (k, o) in outcomes.into_iter().enumerate() {
        stats.add(o);
        image.set(k % width, k / width, tracer.colour(o));
    }
    if stats.failed as f64 > MAX_FAILED_FRACTION * stats.pixels as f64 {
        return Err(KerrError::RenderFailed { failed: stats.failed, total: stats.pixels });
    }
    Ok(RenderOutput { image, stats })
}

/// Draw the boundary curve as a polyline in `colour`.
pub fn overlay_boundary(image: &mut Image, curve: &ShadowCurve, plane: &ImagePlane, colour: Rgb) {
    overlay_points(image, &curve.points(), plane, colour);
}

/// Draw a polyline given in plane coordinates.
pub fn overlay_points(image: &mut Image, points: &[(f64, f64)], plane: &ImagePlane, colour: Rgb) {
    let mut plot = |fi: f64, fj: f64| {
        let (i, j) = (fi.round(), fj.round());
        if i >= 0.0 && j >= 0.0 && (i as usize) < image.width && (j as usize) < image.height {
            image.set(i as usize, j as usize, colour);
        }
    };
    match points {
        [] => {}
        [(x, y)] => {
            let (fi, fj) = plane.to_pixel(*x, *y);
            plot(fi, fj);
        }
        _ => {
            for w in points.windows(2) {
                let (a, b) = (plane.to_pixel(w[0].0, w[0].1), plane.to_pixel(w[1].0, w[1].1));
                let n = ((b.0 - a.0).abs().max((b.1 - a.1).abs()).ceil() as usize).clamp(1, 1 << 16);
                for k in 0..=n {
                    let t = k as f64 / n as f64;
                    plot(a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1));
                }
            }
        }
    }
}

/// Binary PPM (P6).
pub fn write_ppm<W: Write>(out: &mut W, image: &Image) -> std::io::Result<()> {
    write!(out, "P6\n{} {}\n255\n", image.width, image.height)?;
    out.write_all(&image.data)
}

/// `key=value` lines, in the given order.
pub fn write_manifest<W: Write>(out: &mut W, entries: &[(String, String)]) -> std::io::Result<()> {
    for (k, v) in entries {
        writeln!(out, "{k}={v}")?;
    }
    Ok(())
}

impl RenderStats {
    pub fn manifest_entries(&self) -> Vec<(String, String)> {
        vec![
            ("pixels_traced".into(), self.pixels.to_string()),
            ("horizon_hits".into(), self.horizon.to_string()),
            ("escapes".into(), self.escaped.to_string()),
            ("trapped".into(), self.trapped.to_string()),
            ("degenerate".into(), self.degenerate.to_string()),
            ("failures".into(), self.failed.to_string()),
        ]
    }
}

/// Pixel centres of `colour`-region pixels that touch a pixel of another
/// colour through an edge.
pub fn region_edge(image: &Image, colour: Rgb) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for j in 0..image.height {
        for i in 0..image.width {
            if image.get(i, j) != colour {
                continue;
            }
            let nb = [(i.wrapping_sub(1), j), (i + 1, j), (i, j.wrapping_sub(1)), (i, j + 1)];
            if nb.iter().any(|&(x, y)| x < image.width && y < image.height && image.get(x, y) != colour) {
                out.push((i as f64, j as f64));
            }
        }
    }
    out
}

fn segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 { (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0) } else { 0.0 };
    (p.0 - a.0 - t * dx).hypot(p.1 - a.1 - t * dy)
}

/// Symmetric Hausdorff distance between a point set and a polyline (given
/// as its vertices), both in pixel units.
pub fn hausdorff_to_polyline(points: &[(f64, f64)], polyline: &[(f64, f64)]) -> f64 {
    if points.is_empty() || polyline.is_empty() {
        return f64::INFINITY;
    }
    let to_curve = |p: (f64, f64)| {
        if polyline.len() == 1 {
            return (p.0 - polyline[0].0).hypot(p.1 - polyline[0].1);
        }
        polyline.windows(2).map(|w| segment_distance(p, w[0], w[1])).fold(f64::INFINITY, f64::min)
    };
    let to_points = |q: (f64, f64)| points.iter().map(|p| (p.0 - q.0).hypot(p.1 - q.1)).fold(f64::INFINITY, f64::min);
    let d1 = points.iter().map(|&p| to_curve(p)).fold(0.0, f64::max);
    let d2 = polyline.iter().map(|&q| to_points(q)).fold(0.0, f64::max);
    d1.max(d2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shadow::{shadow_curve, stereographic};
    use std::f64::consts::{FRAC_PI_2, PI};

    fn setup(a: f64, r0: f64) -> (KerrParams, ObserverSpec) {
        let params = KerrParams::new(a).unwrap();
        let obs = ObserverSpec::new(r0, FRAC_PI_2, 0.0, 0.0, &params).unwrap();
        (params, obs)
    }

    #[test]
    fn plane_mapping_round_trips() {
        let plane = ImagePlane { width: 37, height: 21, extent: 1.7 };
        for (i, j) in [(0, 0), (36, 20), (10, 5)] {
            let (x, y) = plane.to_plane(i, j);
            let (fi, fj) = plane.to_pixel(x, y);
            assert!((fi - i as f64).abs() < 1e-12 && (fj - j as f64).abs() < 1e-12);
        }
        assert!(plane.to_plane(0, 0).1 > 0.0);
    }

    #[test]
    fn centre_pixel_is_dark_and_rim_is_sky() {
        let (params, obs) = setup(0.98, 5.0);
        let scene = SceneConfig::default();
        let plane = ImagePlane { width: 5, height: 5, extent: 40.0 };
        let controls = IntegratorControls::default();
        let centre = trace_pixel(2, 2, &obs, &scene, &plane, &params, &controls).unwrap();
        assert_eq!(centre, scene.shadow);
        // A corner pixel of a very wide window looks almost straight away from the hole.
        let corner = trace_pixel(0, 0, &obs, &scene, &plane, &params, &controls).unwrap();
        assert!(scene.palette.contains(&corner));
    }

    #[test]
    fn flat_image_is_four_patches() {
        let (params, obs) = setup(0.5, 5.0);
        let scene = SceneConfig::default();
        let plane = ImagePlane { width: 32, height: 32, extent: 3.0 };
        let out = render(&obs, &scene, &plane, &params, &IntegratorControls::default(), RenderOptions { workers: 1, flat: true })
            .unwrap();
        let mut seen: Vec<Rgb> = out.image.data.chunks(3).map(|c| [c[0], c[1], c[2]]).collect();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 4);
        // The upper half of the picture shows the northern sky.
        let top = out.image.get(16, 2);
        assert!(top == scene.palette[0] || top == scene.palette[1]);
    }

    #[test]
    fn overlay_trivia() {
        let plane = ImagePlane { width: 8, height: 8, extent: 1.0 };
        let mut img = Image::new(8, 8, [0, 0, 0]);
        let before = img.clone();
        overlay_points(&mut img, &[], &plane, [255, 0, 0]);
        assert_eq!(img, before);
        overlay_points(&mut img, &[(0.0, 0.0)], &plane, [255, 0, 0]);
        assert_eq!(img.data.chunks(3).filter(|c| c[0] == 255).count(), 1);
    }

    #[test]
    fn ppm_header() {
        let img = Image::new(1, 1, [1, 2, 3]);
        let mut buf = Vec::new();
        write_ppm(&mut buf, &img).unwrap();
        assert_eq!(buf, b"P6\n1 1\n255\n\x01\x02\x03");
    }

    #[test]
    fn hausdorff_basics() {
        let line = [(0.0, 0.0), (10.0, 0.0)];
        assert!((hausdorff_to_polyline(&[(5.0, 1.0), (0.0, 0.0), (10.0, 0.0)], &line) - 1.0).abs() < 1e-12);
        assert!(hausdorff_to_polyline(&[], &line).is_infinite());
    }

    #[test]
    fn small_render_matches_curve_and_workers() {
        let (params, obs) = setup(0.98, 5.0);
        let curve = shadow_curve(&obs, &params, 256).unwrap();
        let plane = ImagePlane { width: 48, height: 48, extent: 2.0 };
        let scene = SceneConfig::default();
        let controls = IntegratorControls::default();
        let one = render(&obs, &scene, &plane, &params, &controls, RenderOptions { workers: 1, flat: false }).unwrap();
        let two = render(&obs, &scene, &plane, &params, &controls, RenderOptions { workers: 2, flat: false }).unwrap();
        assert_eq!(one, two);
        let edge = region_edge(&one.image, scene.shadow);
        let poly: Vec<(f64, f64)> = curve.points().iter().map(|&(x, y)| plane.to_pixel(x, y)).collect();
        assert!(hausdorff_to_polyline(&edge, &poly) <= 2.0);
        let (x, y) = stereographic(DirectionAngles::new(PI / 2.0, 0.0)).unwrap();
        assert!(x.abs() < 1e-12 && y > 0.0);
    }
}
