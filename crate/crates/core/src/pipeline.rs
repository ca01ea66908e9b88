//! Scene generation, model execution and Fisher reporting, in memory and as
//! on-disk stages.
//!
//! A dataset directory holds:
//!
//! | file | written by |
//! |------|------------|
//! | `scene.txt`, `reflectance.pfm`, `targets.csv` | `generate` |
//! | `cond_00.pfm` .. `cond_16.pfm`, `manifest.txt` | `generate` |
//! | `samples.csv`, `outputs/<model>/cond_XX.ppm` | `run` |
//! | `fisher.csv`, `fisher_extremes.csv`, `histogram.csv` | `evaluate` |
//! | `gamma_sweep.csv` | `sweep-gamma` |

use std::collections::HashMap;
use std::fs::{self, File};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use crate::ccmodels::{run_model, to_display, ModelKind, ModelSpec};
use crate::colorspace::{retinex_to_do, rgb_to_hsv, DoColor, HsvColor};
use crate::error::{Error, Result};
use crate::imagecore::{encode_pfm, encode_ppm, read_image, roi_mean, LinearImage, Roi};
use crate::metrics::{
    build_report, format_sig, histograms, histograms_csv, sample_sets, Attribute, ColorSample,
    FisherReport, ModelSamples, PairSpec,
};
use crate::scenesim::{
    builtin_scene, enumerate_conditions, simulate_capture, Exposures, IlluminationCondition,
    LedColor, ReflectanceScene, SceneKind, Target, TargetClass, SATURATION_LEVEL,
};
use crate::spatialfilter::{FilterPath, SIGMA_CENTER, SIGMA_SURROUND};

pub const DEFAULT_GAMMAS: [f64; 4] = [0.0, 3.0, 6.0, 9.0];

pub const SAMPLES_HEADER: &str = "model,condition,target,h,s,v,o_rg,o_yb,r,theta";

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub scene: SceneKind,
    pub models: Vec<ModelSpec>,
    pub seed: u64,
    pub out: PathBuf,
    pub exposures: Exposures,
    pub saturation: u8,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            scene: SceneKind::Cartons,
            models: default_models(
                &DEFAULT_GAMMAS,
                SIGMA_CENTER,
                SIGMA_SURROUND,
                FilterPath::Direct,
            )
            .expect("default sigmas are ordered"),
            seed: 0,
            out: PathBuf::from("out"),
            exposures: Exposures::default(),
            saturation: SATURATION_LEVEL,
        }
    }
}

/// Log retinex at each gamma, then linear, Naka-Rushton and gray-world.
pub fn default_models(
    gammas: &[f64],
    sigma1: f64,
    sigma2: f64,
    filter: FilterPath,
) -> Result<Vec<ModelSpec>> {
    let mut kinds: Vec<ModelKind> = gammas
        .iter()
        .map(|&gamma| ModelKind::LogRetinex { gamma })
        .collect();
    kinds.extend([
        ModelKind::LinearRetinex,
        ModelKind::NrRetinex,
        ModelKind::GrayWorld,
    ]);
    kinds
        .into_iter()
        .map(|k| ModelSpec::new(k, sigma1, sigma2, filter))
        .collect()
}

/// Resolves model names; a bare `log` expands to one model per gamma.
pub fn expand_models(
    names: &[String],
    gammas: &[f64],
    sigma1: f64,
    sigma2: f64,
    filter: FilterPath,
) -> Result<Vec<ModelSpec>> {
    let mut kinds = Vec::new();
    for name in names {
        if name.trim() == "log" {
            kinds.extend(gammas.iter().map(|&gamma| ModelKind::LogRetinex { gamma }));
        } else {
            kinds.push(name.parse()?);
        }
    }
    kinds
        .into_iter()
        .map(|k| ModelSpec::new(k, sigma1, sigma2, filter))
        .collect()
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn parse_key<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| config_err(format!("bad value `{value}` for `{key}`")))
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(|v| {
            let g: f64 = parse_key(key, v)?;
            if g.is_finite() {
                Ok(g)
            } else {
                Err(config_err(format!("`{key}` values must be finite")))
            }
        })
        .collect()
}

impl RunConfig {
    /// Parses a config file.
    ///
    /// Top-level keys: `scene`, `seed`, `out`, `gammas` (comma list), `sigma1`,
    /// `sigma2`, `filter`, `exposures` (long,mid,short), `saturation`.
    /// Each `[model.<name>]` section adds one model with keys `kind`
    /// (`log`, `nr`, `linear`, `gw`), `gamma`, `sigma1`, `sigma2`, `filter`;
    /// missing keys fall back to the top-level values. Without model sections
    /// the default model set is used.
    pub fn from_ini_str(text: &str) -> Result<Self> {
        let ini = ini::Ini::load_from_str(text).map_err(|e| config_err(e.to_string()))?;
        let mut cfg = RunConfig::default();
        let mut gammas = DEFAULT_GAMMAS.to_vec();
        let mut sigma1 = SIGMA_CENTER;
        let mut sigma2 = SIGMA_SURROUND;
        let mut filter = FilterPath::Direct;
        if let Some(general) = ini.section(None::<String>) {
            for (key, value) in general.iter() {
                match key {
                    "scene" => cfg.scene = value.trim().parse()?,
                    "seed" => cfg.seed = parse_key(key, value)?,
                    "out" => cfg.out = PathBuf::from(value.trim()),
                    "gammas" => gammas = parse_list(key, value)?,
                    "sigma1" => sigma1 = parse_key(key, value)?,
                    "sigma2" => sigma2 = parse_key(key, value)?,
                    "filter" => filter = value.trim().parse()?,
                    "exposures" => match parse_list(key, value)?.as_slice() {
                        &[l, m, s] => cfg.exposures = Exposures::new(l, m, s)?,
                        _ => return Err(config_err("`exposures` needs three values")),
                    },
                    "saturation" => cfg.saturation = parse_key(key, value)?,
                    _ => return Err(config_err(format!("unknown key `{key}`"))),
                }
            }
        }
        let mut models = Vec::new();
        for (name, props) in ini.iter() {
            let Some(name) = name else { continue };
            if name.strip_prefix("model.").is_none() {
                return Err(config_err(format!("unknown section `[{name}]`")));
            }
            let mut kind = None;
            let mut gamma = None;
            let (mut s1, mut s2, mut f) = (sigma1, sigma2, filter);
            for (key, value) in props.iter() {
                match key {
                    "kind" => kind = Some(value.trim().to_owned()),
                    "gamma" => gamma = Some(parse_key::<f64>(key, value)?),
                    "sigma1" => s1 = parse_key(key, value)?,
                    "sigma2" => s2 = parse_key(key, value)?,
                    "filter" => f = value.trim().parse()?,
                    _ => return Err(config_err(format!("unknown key `{key}` in [{name}]"))),
                }
            }
            let kind = match (kind.as_deref(), gamma) {
                (Some("log"), Some(gamma)) if gamma.is_finite() => ModelKind::LogRetinex { gamma },
                (Some("log"), _) => {
                    return Err(config_err(format!("[{name}] needs a finite gamma")))
                }
                (Some(k), None) => k.parse()?,
                (Some(k), Some(_)) => {
                    return Err(config_err(format!(
                        "[{name}]: `gamma` does not apply to `{k}`"
                    )))
                }
                (None, _) => return Err(config_err(format!("[{name}] is missing `kind`"))),
            };
            models.push(ModelSpec::new(kind, s1, s2, f)?);
        }
        cfg.models = if models.is_empty() {
            default_models(&gammas, sigma1, sigma2, filter)?
        } else {
            models
        };
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_ini_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.models.is_empty() {
            return Err(Error::param("no models selected"));
        }
        for m in &self.models {
            ModelSpec::new(m.kind, m.sigma1, m.sigma2, m.filter)?;
        }
        Ok(())
    }
}

/// Rendered and merged captures of one scene under every condition.
#[derive(Clone, Debug)]
pub struct Dataset {
    pub scene: ReflectanceScene,
    pub conditions: Vec<IlluminationCondition>,
    pub images: Vec<LinearImage>,
}

pub fn generate_dataset(config: &RunConfig) -> Dataset {
    let scene = builtin_scene(config.scene, config.seed);
    let conditions = enumerate_conditions();
    let images = conditions
        .par_iter()
        .map(|c| simulate_capture(&scene, c, config.exposures, config.saturation))
        .collect();
    Dataset {
        scene,
        conditions,
        images,
    }
}

/// Model outputs for one condition, with the ROI colors of each target.
pub struct ConditionResult {
    pub display: crate::imagecore::EncodedImage,
    pub samples: Vec<ColorSample>,
}

/// Labels made unique by suffixing repeats with `#2`, `#3`, ...
pub fn model_labels(models: &[ModelSpec]) -> Vec<String> {
    let mut seen: HashMap<String, usize> = HashMap::new();
    models
        .iter()
        .map(|m| {
            let label = m.label();
            let n = seen.entry(label.clone()).or_insert(0);
            *n += 1;
            if *n == 1 {
                label
            } else {
                format!("{label}#{n}")
            }
        })
        .collect()
}

fn evaluate_condition(
    img: &LinearImage,
    model: &ModelSpec,
    label: &str,
    condition: usize,
    targets: &[Target],
) -> Result<ConditionResult> {
    let x = run_model(img, model)?;
    let display = to_display(&x);
    let samples = targets
        .iter()
        .map(|t| {
            let [r, g, b] = roi_mean(&display, &t.roi)?;
            let [xr, xg, xb] = roi_mean(&x, &t.roi)?;
            Ok(ColorSample {
                model: label.to_owned(),
                condition,
                target: t.name().to_owned(),
                hsv: rgb_to_hsv(r, g, b),
                opponent: retinex_to_do(xr, xg, xb),
            })
        })
        .collect::<Result<_>>()?;
    Ok(ConditionResult { display, samples })
}

/// Runs every model on every image. Results are ordered model-major, then
/// by condition, regardless of scheduling.
pub fn run_models_full(
    dataset: &Dataset,
    models: &[ModelSpec],
) -> Result<Vec<Vec<ConditionResult>>> {
    let labels = model_labels(models);
    let jobs: Vec<(usize, usize)> = (0..models.len())
        .flat_map(|m| (0..dataset.images.len()).map(move |c| (m, c)))
        .collect();
    let mut results = jobs
        .par_iter()
        .map(|&(m, c)| {
            evaluate_condition(
                &dataset.images[c],
                &models[m],
                &labels[m],
                dataset.conditions[c].index,
                dataset.scene.targets(),
            )
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter();
    Ok((0..models.len())
        .map(|_| results.by_ref().take(dataset.images.len()).collect())
        .collect())
}

pub fn run_models(dataset: &Dataset, models: &[ModelSpec]) -> Result<Vec<ColorSample>> {
    Ok(run_models_full(dataset, models)?
        .into_iter()
        .flatten()
        .flat_map(|r| r.samples)
        .collect())
}

/// Pairs evaluated for a scene: hue and theta over adjacent carton colors,
/// or radius, saturation and brightness against the dull patch.
pub fn evaluation_pairs(kind: SceneKind) -> Vec<PairSpec> {
    match kind {
        SceneKind::Cartons => {
            let hues = [
                ("red", "yellow"),
                ("yellow", "green"),
                ("green", "blue"),
                ("blue", "red"),
            ];
            [Attribute::Hue, Attribute::Theta]
                .into_iter()
                .flat_map(|a| hues.map(|(x, y)| PairSpec::new(a, x, y)))
                .collect()
        }
        SceneKind::RedPatches | SceneKind::GreenPatches => vec![
            PairSpec::new(Attribute::R, "vivid", "dull"),
            PairSpec::new(Attribute::Saturation, "vivid", "dull"),
            PairSpec::new(Attribute::Brightness, "bright", "dull"),
        ],
    }
}

/// Groups samples per model label in first-seen order.
pub fn group_by_model(samples: &[ColorSample]) -> Vec<ModelSamples> {
    let mut order: Vec<&str> = Vec::new();
    let mut groups: HashMap<&str, Vec<ColorSample>> = HashMap::new();
    for s in samples {
        let g = groups.entry(s.model.as_str()).or_insert_with(|| {
            order.push(s.model.as_str());
            Vec::new()
        });
        g.push(s.clone());
    }
    order
        .into_iter()
        .map(|m| (m.to_owned(), sample_sets(&groups[m])))
        .collect()
}

#[derive(Clone, Debug)]
pub struct Evaluation {
    pub report: FisherReport,
    pub histogram_csv: String,
}

pub fn evaluate(kind: SceneKind, samples: &[ColorSample]) -> Result<Evaluation> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    let grouped = group_by_model(samples);
    let report = build_report(&grouped, &evaluation_pairs(kind))?;
    let histogram_csv = histograms_csv(&histograms(&grouped));
    Ok(Evaluation {
        report,
        histogram_csv,
    })
}

fn write_durable(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(bytes).map_err(|e| Error::io(path, e))?;
    f.sync_all().map_err(|e| Error::io(path, e))
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn csv_err(path: &Path, message: impl ToString) -> Error {
    Error::Csv {
        path: path.to_owned(),
        message: message.to_string(),
    }
}

pub fn condition_file(index: usize) -> String {
    format!("cond_{index:02}.pfm")
}

fn targets_csv(targets: &[Target]) -> String {
    let mut s = String::from("target,x0,y0,w,h\n");
    for t in targets {
        let r = t.roi;
        s.push_str(&format!("{},{},{},{},{}\n", t.name(), r.x0, r.y0, r.w, r.h));
    }
    s
}

fn parse_targets(path: &Path) -> Result<Vec<Target>> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let field = |i: usize| rec.get(i).ok_or_else(|| csv_err(path, "short record"));
        let num = |i: usize| -> Result<usize> {
            field(i)?
                .parse()
                .map_err(|_| csv_err(path, format!("bad number `{}`", &rec[i])))
        };
        out.push(Target {
            class: TargetClass::from_str(field(0)?)?,
            roi: Roi::new(num(1)?, num(2)?, num(3)?, num(4)?),
        });
    }
    Ok(out)
}

fn led(name: &str) -> Result<LedColor> {
    [
        LedColor::Red,
        LedColor::Yellow,
        LedColor::Green,
        LedColor::Blue,
        LedColor::White,
    ]
    .into_iter()
    .find(|c| c.name() == name)
    .ok_or_else(|| Error::param(format!("unknown LED color `{name}`")))
}

fn parse_manifest(path: &Path) -> Result<Vec<IlluminationCondition>> {
    read_text(path)?
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let parts: Vec<&str> = line.split(',').map(str::trim).collect();
            let [index, left, right] = parts.as_slice() else {
                return Err(csv_err(path, format!("bad manifest line `{line}`")));
            };
            let index = index
                .parse()
                .map_err(|_| csv_err(path, format!("bad index `{index}`")))?;
            Ok(IlluminationCondition::new(index, led(left)?, led(right)?))
        })
        .collect()
}

fn read_linear(path: &Path) -> Result<LinearImage> {
    read_image(path)?
        .into_linear()
        .ok_or_else(|| Error::InvalidImage(format!("{} is not a radiance map", path.display())))
}

/// Writes the scene and its 17 merged captures into `config.out`.
pub fn cmd_generate(config: &RunConfig) -> Result<Dataset> {
    let inner = || -> Result<Dataset> {
        let dir = &config.out;
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let dataset = generate_dataset(config);
        write_durable(
            &dir.join("scene.txt"),
            format!("{}\n", config.scene).as_bytes(),
        )?;
        let rho = LinearImage::new(dataset.scene.reflectance().clone())?;
        write_durable(&dir.join("reflectance.pfm"), &encode_pfm(&rho))?;
        write_durable(
            &dir.join("targets.csv"),
            targets_csv(dataset.scene.targets()).as_bytes(),
        )?;
        dataset
            .conditions
            .par_iter()
            .zip(&dataset.images)
            .try_for_each(|(c, img)| {
                write_durable(&dir.join(condition_file(c.index)), &encode_pfm(img))
            })?;
        let manifest: String = dataset
            .conditions
            .iter()
            .map(|c| c.manifest_line() + "\n")
            .collect();
        write_durable(&dir.join("manifest.txt"), manifest.as_bytes())?;
        Ok(dataset)
    };
    inner().map_err(|e| e.in_stage("generate"))
}

/// Reads back a dataset written by [`cmd_generate`].
pub fn load_dataset(dir: &Path) -> Result<Dataset> {
    let kind: SceneKind = read_text(&dir.join("scene.txt"))?.trim().parse()?;
    let rho = read_linear(&dir.join("reflectance.pfm"))?.into_raster();
    // PFM stores f32; snap back into [0, 1]
    let rho = rho.map(|v| v.clamp(0.0, 1.0))?;
    let targets = parse_targets(&dir.join("targets.csv"))?;
    let scene = ReflectanceScene::new(kind, rho, targets)?;
    let conditions = parse_manifest(&dir.join("manifest.txt"))?;
    let images = conditions
        .par_iter()
        .map(|c| read_linear(&dir.join(condition_file(c.index))))
        .collect::<Result<Vec<_>>>()?;
    Ok(Dataset {
        scene,
        conditions,
        images,
    })
}

fn num(v: f64) -> String {
    format!("{v:?}")
}

pub fn samples_csv(samples: &[ColorSample]) -> String {
    let mut s = String::from(SAMPLES_HEADER);
    s.push('\n');
    for x in samples {
        let HsvColor { h, s: sat, v } = x.hsv;
        let DoColor {
            o_rg,
            o_yb,
            r,
            theta,
        } = x.opponent;
        let cols = [h, sat, v, o_rg, o_yb, r, theta].map(num).join(",");
        s.push_str(&format!(
            "{},{},{},{cols}\n",
            x.model, x.condition, x.target
        ));
    }
    s
}

pub fn parse_samples(path: &Path) -> Result<Vec<ColorSample>> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    let header = rdr.headers().map_err(|e| csv_err(path, e))?;
    if header.iter().collect::<Vec<_>>().join(",") != SAMPLES_HEADER {
        return Err(csv_err(path, "unexpected header"));
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        if rec.len() != 10 {
            return Err(csv_err(
                path,
                format!("expected 10 fields, found {}", rec.len()),
            ));
        }
        let f = |i: usize| -> Result<f64> {
            rec[i]
                .parse()
                .map_err(|_| csv_err(path, format!("bad number `{}`", &rec[i])))
        };
        out.push(ColorSample {
            model: rec[0].to_owned(),
            condition: rec[1]
                .parse()
                .map_err(|_| csv_err(path, format!("bad condition `{}`", &rec[1])))?,
            target: rec[2].to_owned(),
            hsv: HsvColor {
                h: f(3)?,
                s: f(4)?,
                v: f(5)?,
            },
            opponent: DoColor {
                o_rg: f(6)?,
                o_yb: f(7)?,
                r: f(8)?,
                theta: f(9)?,
            },
        });
    }
    Ok(out)
}

fn output_dir_name(label: &str) -> String {
    label.replace([':', '#'], "_")
}

/// Runs the configured models over a generated dataset and writes
/// `samples.csv` plus display images of every output.
pub fn cmd_run(config: &RunConfig) -> Result<Vec<ColorSample>> {
    let inner = || -> Result<Vec<ColorSample>> {
        config.validate()?;
        let dir = &config.out;
        let dataset = load_dataset(dir)?;
        let results = run_models_full(&dataset, &config.models)?;
        let labels = model_labels(&config.models);
        for (label, per_model) in labels.iter().zip(&results) {
            let sub = dir.join("outputs").join(output_dir_name(label));
            fs::create_dir_all(&sub).map_err(|e| Error::io(&sub, e))?;
            per_model
                .par_iter()
                .zip(&dataset.conditions)
                .try_for_each(|(r, c)| {
                    let name = format!("cond_{:02}.ppm", c.index);
                    write_durable(&sub.join(name), &encode_ppm(&r.display))
                })?;
        }
        let samples: Vec<ColorSample> = results
            .into_iter()
            .flatten()
            .flat_map(|r| r.samples)
            .collect();
        write_durable(&dir.join("samples.csv"), samples_csv(&samples).as_bytes())?;
        Ok(samples)
    };
    inner().map_err(|e| e.in_stage("run"))
}

/// Writes `fisher.csv`, `fisher_extremes.csv` and `histogram.csv` from the
/// sample table.
pub fn cmd_evaluate(config: &RunConfig) -> Result<Evaluation> {
    let inner = || -> Result<Evaluation> {
        let dir = &config.out;
        let kind: SceneKind = read_text(&dir.join("scene.txt"))?.trim().parse()?;
        let samples = parse_samples(&dir.join("samples.csv"))?;
        let eval = evaluate(kind, &samples)?;
        write_durable(&dir.join("fisher.csv"), eval.report.to_csv().as_bytes())?;
        write_durable(
            &dir.join("fisher_extremes.csv"),
            eval.report.extremes_csv().as_bytes(),
        )?;
        write_durable(&dir.join("histogram.csv"), eval.histogram_csv.as_bytes())?;
        Ok(eval)
    };
    inner().map_err(|e| e.in_stage("evaluate"))
}

pub const SWEEP_HEADER: &str = "gamma,attribute,pair,D";

/// Log retinex over `gammas` on a generated dataset, one Fisher value per
/// gamma and pair, written to `gamma_sweep.csv`.
pub fn cmd_sweep_gamma(config: &RunConfig, gammas: &[f64]) -> Result<String> {
    let inner = || -> Result<String> {
        if gammas.iter().any(|g| !g.is_finite()) || gammas.is_empty() {
            return Err(Error::param("gamma sweep needs finite values"));
        }
        let dir = &config.out;
        let dataset = load_dataset(dir)?;
        let base = config
            .models
            .first()
            .copied()
            .unwrap_or_else(|| ModelSpec::with_defaults(ModelKind::LinearRetinex));
        let models = gammas
            .iter()
            .map(|&gamma| {
                ModelSpec::new(
                    ModelKind::LogRetinex { gamma },
                    base.sigma1,
                    base.sigma2,
                    base.filter,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        let samples = run_models(&dataset, &models)?;
        let eval = evaluate(dataset.scene.kind, &samples)?;
        let labels = model_labels(&models);
        let mut csv = String::from(SWEEP_HEADER);
        csv.push('\n');
        for (gamma, label) in gammas.iter().zip(&labels) {
            for row in eval.report.rows.iter().filter(|r| &r.model == label) {
                csv.push_str(&format!(
                    "{},{},{},{}\n",
                    format_sig(*gamma, 6),
                    row.attribute,
                    row.pair,
                    row.d
                ));
            }
        }
        write_durable(&dir.join("gamma_sweep.csv"), csv.as_bytes())?;
        Ok(csv)
    };
    inner().map_err(|e| e.in_stage("sweep-gamma"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imagecore::Raster;

    fn small_config(scene: SceneKind, out: &Path) -> RunConfig {
        RunConfig {
            scene,
            models: vec![
                ModelSpec::with_defaults(ModelKind::LogRetinex { gamma: 6.0 }),
                ModelSpec::with_defaults(ModelKind::GrayWorld),
            ],
            seed: 3,
            out: out.to_owned(),
            ..RunConfig::default()
        }
    }

    #[test]
    fn default_model_set() {
        let labels = model_labels(&RunConfig::default().models);
        assert_eq!(
            labels,
            ["log:0", "log:3", "log:6", "log:9", "linear", "nr", "gw"]
        );
    }

    #[test]
    fn repeated_models_get_distinct_labels() {
        let m = ModelSpec::with_defaults(ModelKind::NrRetinex);
        assert_eq!(model_labels(&[m, m, m]), ["nr", "nr#2", "nr#3"]);
    }

    #[test]
    fn expand_bare_log() {
        let names = ["log".to_owned(), "gw".to_owned()];
        let m = expand_models(&names, &[1.0, 2.0], 1.0, 2.0, FilterPath::Hdc).unwrap();
        assert_eq!(model_labels(&m), ["log:1", "log:2", "gw"]);
        assert!(m.iter().all(|s| s.filter == FilterPath::Hdc));
        assert!(expand_models(&names, &[1.0], 3.0, 2.0, FilterPath::Direct).is_err());
    }

    #[test]
    fn ini_config() {
        let text = "scene = red-patches\nseed = 9\nout = /tmp/x\nsigma2 = 20\n\n\
                    [model.a]\nkind = log\ngamma = 4.5\n\n[model.b]\nkind = gw\n\n\
                    [model.c]\nkind = nr\nfilter = hdc\n";
        let cfg = RunConfig::from_ini_str(text).unwrap();
        assert_eq!(cfg.scene, SceneKind::RedPatches);
        assert_eq!(cfg.seed, 9);
        assert_eq!(model_labels(&cfg.models), ["log:4.5", "gw", "nr"]);
        assert_eq!(cfg.models[0].sigma2, 20.0);
        assert_eq!(cfg.models[2].filter, FilterPath::Hdc);

        let cfg = RunConfig::from_ini_str("gammas = 1, 2\nexposures = 2, 1, 0.5\n").unwrap();
        assert_eq!(
            model_labels(&cfg.models),
            ["log:1", "log:2", "linear", "nr", "gw"]
        );
        assert_eq!(cfg.exposures.as_array(), [2.0, 1.0, 0.5]);
    }

    #[test]
    fn ini_rejects_bad_input() {
        for text in [
            "colour = red\n",
            "sigma1 = 30\n",
            "[model.a]\nkind = log\n",
            "[model.a]\nkind = gw\ngamma = 2\n",
            "[other]\nkind = gw\n",
            "seed = -1\n",
            "gammas = 1, inf\n",
        ] {
            assert!(RunConfig::from_ini_str(text).is_err(), "{text}");
        }
    }

    #[test]
    fn carton_pairs() {
        let pairs = evaluation_pairs(SceneKind::Cartons);
        assert_eq!(pairs.len(), 8);
        assert_eq!(pairs[0].label(), "red&yellow");
        assert_eq!(evaluation_pairs(SceneKind::GreenPatches).len(), 3);
    }

    #[test]
    fn sample_rows_per_model_condition_target() {
        let cfg = small_config(SceneKind::Cartons, Path::new("unused"));
        let data = generate_dataset(&cfg);
        assert_eq!(data.images.len(), 17);
        let samples = run_models(&data, &cfg.models).unwrap();
        assert_eq!(samples.len(), 2 * 17 * 4);
        assert_eq!(samples[0].model, "log:6");
        assert_eq!(samples[17 * 4].model, "gw");
    }

    #[test]
    fn samples_csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = small_config(SceneKind::GreenPatches, dir.path());
        let data = generate_dataset(&cfg);
        let samples = run_models(&data, &cfg.models).unwrap();
        let path = dir.path().join("s.csv");
        fs::write(&path, samples_csv(&samples)).unwrap();
        assert_eq!(parse_samples(&path).unwrap(), samples);
    }

    #[test]
    fn gray_world_on_grey_scene_is_achromatic() {
        let grey = Raster::filled(40, 30, [0.5; 3]).unwrap();
        let targets = vec![Target {
            class: TargetClass::Dull,
            roi: Roi::new(10, 10, 10, 10),
        }];
        let scene = ReflectanceScene::new(SceneKind::RedPatches, grey, targets).unwrap();
        let white = *enumerate_conditions().last().unwrap();
        let img = simulate_capture(&scene, &white, Exposures::default(), SATURATION_LEVEL);
        let data = Dataset {
            scene,
            conditions: vec![white],
            images: vec![img],
        };
        let gw = ModelSpec::with_defaults(ModelKind::GrayWorld);
        for s in run_models(&data, &[gw]).unwrap() {
            assert!(s.hsv.s < 1e-6, "{}", s.hsv.s);
        }
    }
}
