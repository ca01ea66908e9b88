//! Synthetic darkroom.
//!
//! A Lambertian reflectance map is lit by a constant white ceiling lamp and
//! two color-variable LEDs on the left and right walls whose contribution
//! cross-fades linearly across the frame. Captures are simulated as three
//! 8-bit exposures and merged back into a radiance map by replacing
//! saturated pixels with rescaled shorter exposures.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::imagecore::{ImageView, LinearImage, Raster, Roi};

pub const SCENE_WIDTH: usize = 160;
pub const SCENE_HEIGHT: usize = 120;

/// Peak emission of a color LED at its own wall.
pub const LAMP_POWER: f64 = 2000.0;

/// Constant white emission of the ceiling lamp.
pub const CEILING_LEVEL: f64 = 250.0;

/// Residual emission of an LED in its off channels.
pub const LED_FLOOR: f64 = 0.05;

/// Capture value treated as saturated by default.
pub const SATURATION_LEVEL: u8 = 255;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SceneKind {
    Cartons,
    RedPatches,
    GreenPatches,
}

impl SceneKind {
    pub const ALL: [SceneKind; 3] = [
        SceneKind::Cartons,
        SceneKind::RedPatches,
        SceneKind::GreenPatches,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SceneKind::Cartons => "cartons",
            SceneKind::RedPatches => "red-patches",
            SceneKind::GreenPatches => "green-patches",
        }
    }
}

impl fmt::Display for SceneKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SceneKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SceneKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                Error::param(format!(
                    "unknown scene `{s}` (expected cartons, red-patches or green-patches)"
                ))
            })
    }
}

/// Intended color class of a target.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TargetClass {
    Red,
    Yellow,
    Green,
    Blue,
    Dull,
    Bright,
    Vivid,
}

impl TargetClass {
    pub const ALL: [TargetClass; 7] = [
        TargetClass::Red,
        TargetClass::Yellow,
        TargetClass::Green,
        TargetClass::Blue,
        TargetClass::Dull,
        TargetClass::Bright,
        TargetClass::Vivid,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TargetClass::Red => "red",
            TargetClass::Yellow => "yellow",
            TargetClass::Green => "green",
            TargetClass::Blue => "blue",
            TargetClass::Dull => "dull",
            TargetClass::Bright => "bright",
            TargetClass::Vivid => "vivid",
        }
    }
}

impl FromStr for TargetClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TargetClass::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::param(format!("unknown target class `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Target {
    pub class: TargetClass,
    pub roi: Roi,
}

impl Target {
    pub fn name(&self) -> &'static str {
        self.class.name()
    }
}

/// Per-pixel RGB reflectance in `[0, 1]` with the evaluation targets.
#[derive(Clone, Debug, PartialEq)]
pub struct ReflectanceScene {
    pub kind: SceneKind,
    rho: Raster,
    targets: Vec<Target>,
}

impl ReflectanceScene {
    pub fn new(kind: SceneKind, rho: Raster, targets: Vec<Target>) -> Result<Self> {
        if rho.data().iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidImage("reflectance outside [0, 1]".into()));
        }
        for (i, t) in targets.iter().enumerate() {
            t.roi.check(rho.width(), rho.height())?;
            if targets[..i].iter().any(|u| u.roi.overlaps(&t.roi)) {
                return Err(Error::param(format!(
                    "target `{}` overlaps another",
                    t.name()
                )));
            }
        }
        Ok(Self { kind, rho, targets })
    }

    pub fn reflectance(&self) -> &Raster {
        &self.rho
    }

    pub fn targets(&self) -> &[Target] {
        &self.targets
    }

    pub fn target(&self, class: TargetClass) -> Option<&Target> {
        self.targets.iter().find(|t| t.class == class)
    }

    /// Same targets, reflectance multiplied by `a` (clamped to 1).
    pub fn scaled(&self, a: f64) -> Result<Self> {
        Self::new(
            self.kind,
            self.rho.map(|v| (a * v).min(1.0))?,
            self.targets.clone(),
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LedColor {
    Red,
    Yellow,
    Green,
    Blue,
    White,
}

impl LedColor {
    pub const VARIABLE: [LedColor; 4] = [
        LedColor::Red,
        LedColor::Yellow,
        LedColor::Green,
        LedColor::Blue,
    ];

    /// Relative RGB emission.
    pub fn gains(self) -> [f64; 3] {
        let f = LED_FLOOR;
        match self {
            LedColor::Red => [1.0, f, f],
            LedColor::Yellow => [1.0, 1.0, f],
            LedColor::Green => [f, 1.0, f],
            LedColor::Blue => [f, f, 1.0],
            LedColor::White => [1.0, 1.0, 1.0],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LedColor::Red => "red",
            LedColor::Yellow => "yellow",
            LedColor::Green => "green",
            LedColor::Blue => "blue",
            LedColor::White => "white",
        }
    }
}

impl fmt::Display for LedColor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IlluminationCondition {
    pub index: usize,
    pub left: LedColor,
    pub right: LedColor,
    pub ceiling: f64,
    pub power: f64,
}

impl IlluminationCondition {
    pub fn new(index: usize, left: LedColor, right: LedColor) -> Self {
        Self {
            index,
            left,
            right,
            ceiling: CEILING_LEVEL,
            power: LAMP_POWER,
        }
    }

    /// Cross-fade weights `(w_left, w_right)` at column `x`.
    pub fn weights(x: usize, width: usize) -> (f64, f64) {
        let t = if width > 1 {
            x as f64 / (width - 1) as f64
        } else {
            0.5
        };
        (1.0 - t, t)
    }

    /// Irradiance per channel at column `x`.
    pub fn irradiance(&self, x: usize, width: usize) -> [f64; 3] {
        let (wl, wr) = Self::weights(x, width);
        let (gl, gr) = (self.left.gains(), self.right.gains());
        [0, 1, 2].map(|c| self.ceiling + self.power * (gl[c] * wl + gr[c] * wr))
    }

    /// `index,left,right`
    pub fn manifest_line(&self) -> String {
        format!("{},{},{}", self.index, self.left, self.right)
    }
}

/// The 16 left/right color combinations followed by the all-white condition.
pub fn enumerate_conditions() -> Vec<IlluminationCondition> {
    let mut out = Vec::with_capacity(17);
    for left in LedColor::VARIABLE {
        for right in LedColor::VARIABLE {
            out.push(IlluminationCondition::new(out.len(), left, right));
        }
    }
    out.push(IlluminationCondition::new(
        out.len(),
        LedColor::White,
        LedColor::White,
    ));
    out
}

/// `I_c(x) = rho_c(x) * E_c(x)`.
pub fn render(scene: &ReflectanceScene, condition: &IlluminationCondition) -> LinearImage {
    let rho = scene.reflectance();
    let w = rho.width();
    let irradiance: Vec<[f64; 3]> = (0..w).map(|x| condition.irradiance(x, w)).collect();
    let raster = Raster::from_fn(w, rho.height(), |x, y, c| {
        rho.get(x, y, c) * irradiance[x][c]
    })
    .expect("finite reflectance times finite irradiance");
    LinearImage::new(raster).expect("nonnegative radiance")
}

/// Exposure multipliers, longest first.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Exposures {
    pub long: f64,
    pub mid: f64,
    pub short: f64,
}

impl Exposures {
    pub fn new(long: f64, mid: f64, short: f64) -> Result<Self> {
        if !(long > mid && mid > short && short > 0.0 && long.is_finite()) {
            return Err(Error::param(format!(
                "exposures must satisfy long > mid > short > 0, got ({long}, {mid}, {short})"
            )));
        }
        Ok(Self { long, mid, short })
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.long, self.mid, self.short]
    }
}

impl Default for Exposures {
    fn default() -> Self {
        Self {
            long: 1.0,
            mid: 0.25,
            short: 0.0625,
        }
    }
}

/// One 8-bit capture, interleaved RGB.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Capture {
    pub width: usize,
    pub height: usize,
    pub data: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExposureStack {
    pub exposures: Exposures,
    /// Long, mid and short captures.
    pub captures: [Capture; 3],
}

/// Quantizes `clamp(round(t * I), 0, 255)` for each exposure time.
pub fn capture_stack(img: &LinearImage, exposures: Exposures) -> ExposureStack {
    let r = img.raster();
    let captures = exposures.as_array().map(|t| Capture {
        width: r.width(),
        height: r.height(),
        data: r
            .data()
            .iter()
            .map(|v| (t * v).round().clamp(0.0, 255.0) as u8)
            .collect(),
    });
    ExposureStack {
        exposures,
        captures,
    }
}

/// Per sample, the longest exposure below `saturation` rescaled by its
/// exposure time; samples saturated everywhere take the short capture.
pub fn merge_hdr(stack: &ExposureStack, saturation: u8) -> LinearImage {
    let times = stack.exposures.as_array();
    let [long, mid, short] = &stack.captures;
    let data = (0..long.data.len())
        .map(|i| {
            let values = [long.data[i], mid.data[i], short.data[i]];
            let k = values.iter().position(|&v| v < saturation).unwrap_or(2);
            values[k] as f64 / times[k]
        })
        .collect();
    let raster = Raster::new(long.width, long.height, data).expect("capture shape is valid");
    LinearImage::new(raster).expect("merged radiance is nonnegative")
}

/// Reflectances of the built-in targets.
pub mod palette {
    pub const CARTON_GREEN: [f64; 3] = [0.10, 0.55, 0.15];
    pub const CARTON_YELLOW: [f64; 3] = [0.75, 0.65, 0.08];
    pub const CARTON_BLUE: [f64; 3] = [0.08, 0.20, 0.60];
    pub const CARTON_RED: [f64; 3] = [0.70, 0.08, 0.10];

    // bright: same ratio as dull, larger sum; vivid: same sum, larger share
    pub const RED_DULL: [f64; 3] = [0.40, 0.20, 0.20];
    pub const RED_BRIGHT: [f64; 3] = [0.60, 0.30, 0.30];
    pub const RED_VIVID: [f64; 3] = [0.50, 0.15, 0.15];
    pub const GREEN_DULL: [f64; 3] = [0.20, 0.40, 0.20];
    pub const GREEN_BRIGHT: [f64; 3] = [0.30, 0.60, 0.30];
    pub const GREEN_VIVID: [f64; 3] = [0.15, 0.50, 0.15];

    pub const BACKGROUND_GREY: [f64; 3] = [0.45, 0.45, 0.45];
}

/// Axis-aligned rectangle painted onto the reflectance map.
struct Block {
    x0: usize,
    y0: usize,
    w: usize,
    h: usize,
    rho: [f64; 3],
}

fn paint(base: &mut [[f64; 3]], width: usize, b: &Block) {
    for y in b.y0..b.y0 + b.h {
        for x in b.x0..b.x0 + b.w {
            base[y * width + x] = b.rho;
        }
    }
}

fn finish(kind: SceneKind, pixels: Vec<[f64; 3]>, targets: Vec<Target>) -> ReflectanceScene {
    let data = pixels.into_iter().flatten().collect();
    let rho = Raster::new(SCENE_WIDTH, SCENE_HEIGHT, data).expect("scene raster");
    ReflectanceScene::new(kind, rho, targets).expect("built-in scene is valid")
}

/// Neutral wall with faint, low-chroma blotches.
fn grey_wall(rng: &mut ChaCha8Rng) -> Vec<[f64; 3]> {
    let mut px = vec![palette::BACKGROUND_GREY; SCENE_WIDTH * SCENE_HEIGHT];
    for _ in 0..24 {
        let w = rng.gen_range(6..24);
        let h = rng.gen_range(6..24);
        let level = rng.gen_range(0.35..0.55);
        let tint: [f64; 3] = [0; 3].map(|_| level + rng.gen_range(-0.04..0.04));
        let block = Block {
            x0: rng.gen_range(0..SCENE_WIDTH - w),
            y0: rng.gen_range(0..SCENE_HEIGHT - h),
            w,
            h,
            rho: tint,
        };
        paint(&mut px, SCENE_WIDTH, &block);
    }
    px
}

/// Sheet of randomly colored rectangles.
fn mosaic(rng: &mut ChaCha8Rng) -> Vec<[f64; 3]> {
    const CELL: usize = 16;
    let mut px = vec![[0.0; 3]; SCENE_WIDTH * SCENE_HEIGHT];
    for cy in 0..SCENE_HEIGHT.div_ceil(CELL) {
        for cx in 0..SCENE_WIDTH.div_ceil(CELL) {
            let rho: [f64; 3] = [0; 3].map(|_| rng.gen_range(0.15..0.75));
            let block = Block {
                x0: cx * CELL,
                y0: cy * CELL,
                w: CELL.min(SCENE_WIDTH - cx * CELL),
                h: CELL.min(SCENE_HEIGHT - cy * CELL),
                rho,
            };
            paint(&mut px, SCENE_WIDTH, &block);
        }
    }
    px
}

/// Four cartons, left to right green, yellow, blue and red, each evaluated
/// on a 3x3 window at its center.
fn cartons(rng: &mut ChaCha8Rng) -> ReflectanceScene {
    const CARTON_W: usize = 12;
    const CARTON_H: usize = 30;
    const TOP: usize = 45;
    let mut px = grey_wall(rng);
    let cartons = [
        (TargetClass::Green, palette::CARTON_GREEN, 22),
        (TargetClass::Yellow, palette::CARTON_YELLOW, 58),
        (TargetClass::Blue, palette::CARTON_BLUE, 94),
        (TargetClass::Red, palette::CARTON_RED, 130),
    ];
    let mut targets = Vec::new();
    for (class, rho, x0) in cartons {
        paint(
            &mut px,
            SCENE_WIDTH,
            &Block {
                x0,
                y0: TOP,
                w: CARTON_W,
                h: CARTON_H,
                rho,
            },
        );
        targets.push(Target {
            class,
            roi: Roi::centered(x0 + CARTON_W / 2, TOP + CARTON_H / 2, 3),
        });
    }
    finish(SceneKind::Cartons, px, targets)
}

/// Dull, bright and vivid patches on a random mosaic, each evaluated on a
/// 10x10 window.
fn patches(kind: SceneKind, rng: &mut ChaCha8Rng) -> ReflectanceScene {
    const PATCH: usize = 20;
    const TOP: usize = 50;
    let (dull, bright, vivid) = match kind {
        SceneKind::RedPatches => (palette::RED_DULL, palette::RED_BRIGHT, palette::RED_VIVID),
        _ => (
            palette::GREEN_DULL,
            palette::GREEN_BRIGHT,
            palette::GREEN_VIVID,
        ),
    };
    let mut px = mosaic(rng);
    let mut targets = Vec::new();
    for (class, rho, x0) in [
        (TargetClass::Dull, dull, 30),
        (TargetClass::Bright, bright, 70),
        (TargetClass::Vivid, vivid, 110),
    ] {
        paint(
            &mut px,
            SCENE_WIDTH,
            &Block {
                x0,
                y0: TOP,
                w: PATCH,
                h: PATCH,
                rho,
            },
        );
        targets.push(Target {
            class,
            roi: Roi::new(x0 + 5, TOP + 5, 10, 10),
        });
    }
    finish(kind, px, targets)
}

/// One built-in scene; the seed only drives background texture.
pub fn builtin_scene(kind: SceneKind, seed: u64) -> ReflectanceScene {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match kind {
        SceneKind::Cartons => cartons(&mut rng),
        SceneKind::RedPatches | SceneKind::GreenPatches => patches(kind, &mut rng),
    }
}

/// Carton, red-patch and green-patch scenes.
pub fn builtin_scenes(seed: u64) -> Vec<ReflectanceScene> {
    SceneKind::ALL
        .iter()
        .map(|&k| builtin_scene(k, seed))
        .collect()
}

/// Renders, captures and merges one condition.
pub fn simulate_capture(
    scene: &ReflectanceScene,
    condition: &IlluminationCondition,
    exposures: Exposures,
    saturation: u8,
) -> LinearImage {
    merge_hdr(
        &capture_stack(&render(scene, condition), exposures),
        saturation,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imagecore::roi_mean;

    fn white_scene() -> ReflectanceScene {
        ReflectanceScene::new(
            SceneKind::Cartons,
            Raster::filled(SCENE_WIDTH, SCENE_HEIGHT, [1.0; 3]).unwrap(),
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn seventeen_conditions() {
        let conds = enumerate_conditions();
        assert_eq!(conds.len(), 17);
        let has = |l, r| conds.iter().any(|c| c.left == l && c.right == r);
        assert!(has(LedColor::Red, LedColor::Red));
        assert!(has(LedColor::Blue, LedColor::Green));
        assert_eq!(
            (conds[16].left, conds[16].right),
            (LedColor::White, LedColor::White)
        );
        assert!(conds.iter().enumerate().all(|(i, c)| c.index == i));
        assert_eq!(conds[1].manifest_line(), "1,red,yellow");
    }

    #[test]
    fn ceiling_only_white_scene_is_constant() {
        let mut cond = IlluminationCondition::new(0, LedColor::White, LedColor::White);
        cond.power = 0.0;
        let img = render(&white_scene(), &cond);
        assert!(img.raster().data().iter().all(|&v| v == CEILING_LEVEL));
    }

    #[test]
    fn black_reflectance_stays_black() {
        let mut rho = vec![1.0; SCENE_WIDTH * SCENE_HEIGHT * 3];
        rho[..3].fill(0.0);
        let scene = ReflectanceScene::new(
            SceneKind::Cartons,
            Raster::new(SCENE_WIDTH, SCENE_HEIGHT, rho).unwrap(),
            vec![],
        )
        .unwrap();
        for cond in enumerate_conditions() {
            assert_eq!(render(&scene, &cond).raster().pixel(0, 0), [0.0; 3]);
        }
    }

    #[test]
    fn red_left_blue_right_tints() {
        let cond = IlluminationCondition::new(3, LedColor::Red, LedColor::Blue);
        let img = render(&white_scene(), &cond);
        let left = img.raster().pixel(0, 60);
        let right = img.raster().pixel(SCENE_WIDTH - 1, 60);
        // rendering equation evaluated at the two walls
        let f = LED_FLOOR * LAMP_POWER + CEILING_LEVEL;
        let full = LAMP_POWER + CEILING_LEVEL;
        assert_eq!(left, [full, f, f]);
        assert_eq!(right, [f, f, full]);
        assert!(left[0] / left[2] > 5.0 && right[2] / right[0] > 5.0);
    }

    #[test]
    fn rendering_is_multiplicative() {
        let scene = builtin_scene(SceneKind::RedPatches, 1);
        let half = scene.scaled(0.5).unwrap();
        let cond = enumerate_conditions()[6];
        let a = render(&scene, &cond);
        let b = render(&half, &cond);
        for (p, q) in a.raster().data().iter().zip(b.raster().data()) {
            assert!((0.5 * p - q).abs() < 1e-9);
        }
    }

    #[test]
    fn every_condition_lights_every_channel() {
        let img_min = |cond: &IlluminationCondition| {
            (0..SCENE_WIDTH)
                .flat_map(|x| cond.irradiance(x, SCENE_WIDTH))
                .fold(f64::INFINITY, f64::min)
        };
        for cond in enumerate_conditions() {
            assert!(img_min(&cond) > 0.0);
        }
    }

    #[test]
    fn capture_examples() {
        let img =
            LinearImage::new(Raster::new(2, 1, vec![1000.0, 0.0, 1000.0, 0.0, 0.0, 0.0]).unwrap())
                .unwrap();
        let stack = capture_stack(&img, Exposures::new(1.0, 0.1, 0.05).unwrap());
        assert_eq!(stack.captures[0].data[0], 255);
        assert_eq!(stack.captures[1].data[0], 100);
        assert!(stack.captures.iter().all(|c| c.data[1] == 0));
    }

    #[test]
    fn merge_replacement_rule() {
        let exposures = Exposures::default();
        let img = LinearImage::new(
            Raster::new(
                3,
                1,
                vec![100.0, 300.0, 5000.0, 7.0, 8.0, 9.0, 40.0, 41.0, 42.0],
            )
            .unwrap(),
        )
        .unwrap();
        let merged = merge_hdr(&capture_stack(&img, exposures), SATURATION_LEVEL);
        // 100 fits the long exposure, 300 needs the mid one, 5000 clips everywhere
        assert_eq!(merged.raster().pixel(0, 0), [100.0, 300.0, 255.0 / 0.0625]);
        assert_eq!(merged.raster().pixel(1, 0), [7.0, 8.0, 9.0]);
    }

    #[test]
    fn merge_threshold_option() {
        let img = LinearImage::new(Raster::new(1, 1, vec![252.0, 10.0, 10.0]).unwrap()).unwrap();
        let stack = capture_stack(&img, Exposures::default());
        assert_eq!(merge_hdr(&stack, 255).raster().get(0, 0, 0), 252.0);
        assert_eq!(merge_hdr(&stack, 250).raster().get(0, 0, 0), 252.0);
        let img = LinearImage::new(Raster::new(1, 1, vec![251.0, 10.0, 10.0]).unwrap()).unwrap();
        let stack = capture_stack(&img, Exposures::default());
        assert_eq!(merge_hdr(&stack, 250).raster().get(0, 0, 0), 63.0 / 0.25);
    }

    #[test]
    fn exposures_must_descend() {
        assert!(Exposures::new(1.0, 1.0, 0.5).is_err());
        assert!(Exposures::new(1.0, 0.5, 0.0).is_err());
    }

    #[test]
    fn carton_scene_layout() {
        let scene = builtin_scene(SceneKind::Cartons, 7);
        assert_eq!(scene.targets().len(), 4);
        let names: Vec<_> = scene.targets().iter().map(|t| t.name()).collect();
        assert_eq!(names, ["green", "yellow", "blue", "red"]);
        for t in scene.targets() {
            assert_eq!((t.roi.w, t.roi.h), (3, 3));
        }
        let red = scene.target(TargetClass::Red).unwrap();
        let mean = roi_mean(scene.reflectance(), &red.roi).unwrap();
        for (m, r) in mean.iter().zip(palette::CARTON_RED) {
            assert!((m - r).abs() < 1e-12);
        }
    }

    #[test]
    fn patch_classes_by_construction() {
        for kind in [SceneKind::RedPatches, SceneKind::GreenPatches] {
            let scene = builtin_scene(kind, 3);
            let mean = |c| roi_mean(scene.reflectance(), &scene.target(c).unwrap().roi).unwrap();
            let (dull, bright, vivid) = (
                mean(TargetClass::Dull),
                mean(TargetClass::Bright),
                mean(TargetClass::Vivid),
            );
            let sum = |p: [f64; 3]| p.iter().sum::<f64>();
            let main = if kind == SceneKind::RedPatches { 0 } else { 1 };
            assert!(vivid[main] / sum(vivid) > dull[main] / sum(dull));
            assert!((sum(vivid) - sum(dull)).abs() < 1e-12);
            assert!(sum(bright) > sum(dull));
            for c in 0..3 {
                assert!((bright[c] / sum(bright) - dull[c] / sum(dull)).abs() < 1e-12);
            }
            assert!(scene
                .targets()
                .iter()
                .all(|t| (t.roi.w, t.roi.h) == (10, 10)));
        }
    }

    #[test]
    fn scenes_are_seeded() {
        assert_eq!(
            builtin_scene(SceneKind::RedPatches, 5),
            builtin_scene(SceneKind::RedPatches, 5)
        );
        assert_ne!(
            builtin_scene(SceneKind::RedPatches, 5),
            builtin_scene(SceneKind::RedPatches, 6)
        );
        assert_eq!(builtin_scenes(1).len(), 3);
    }

    #[test]
    fn scene_rejects_overlapping_targets() {
        let rho = Raster::filled(10, 10, [0.5; 3]).unwrap();
        let t = |x0| Target {
            class: TargetClass::Dull,
            roi: Roi::new(x0, 0, 4, 4),
        };
        assert!(ReflectanceScene::new(SceneKind::Cartons, rho.clone(), vec![t(0), t(3)]).is_err());
        assert!(ReflectanceScene::new(SceneKind::Cartons, rho, vec![t(0), t(4)]).is_ok());
    }

    #[test]
    fn scene_radiance_fits_the_short_exposure() {
        let ceiling = 255.0 / Exposures::default().short;
        for scene in builtin_scenes(11) {
            for cond in enumerate_conditions() {
                let img = render(&scene, &cond);
                assert!(img.raster().data().iter().all(|&v| v < ceiling));
            }
        }
    }
}
