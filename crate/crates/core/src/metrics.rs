//! Fisher-criterion scoring of color samples.
//!
//! Each target contributes one sample per illumination condition. Two
//! targets are compared with `D = (mu_b - mu_a)^2 / (s_a^2 + s_b^2)` using
//! population variances. Circular attributes (hue, theta) are rotated jointly
//! so that the pair's circular mean sits at 180 degrees before the linear
//! statistics are taken.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::colorspace::{DoColor, HsvColor};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Attribute {
    Hue,
    Theta,
    Saturation,
    R,
    Brightness,
}

impl Attribute {
    pub const ALL: [Attribute; 5] = [
        Attribute::Hue,
        Attribute::Theta,
        Attribute::Saturation,
        Attribute::R,
        Attribute::Brightness,
    ];

    pub fn is_circular(self) -> bool {
        matches!(self, Attribute::Hue | Attribute::Theta)
    }

    pub fn name(self) -> &'static str {
        match self {
            Attribute::Hue => "hue",
            Attribute::Theta => "theta",
            Attribute::Saturation => "saturation",
            Attribute::R => "r",
            Attribute::Brightness => "brightness",
        }
    }

    fn of(self, s: &ColorSample) -> f64 {
        match self {
            Attribute::Hue => s.hsv.h,
            Attribute::Theta => s.opponent.theta,
            Attribute::Saturation => s.hsv.s,
            Attribute::R => s.opponent.r,
            Attribute::Brightness => s.hsv.v,
        }
    }
}

impl fmt::Display for Attribute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Attribute {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Attribute::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::param(format!("unknown attribute `{s}`")))
    }
}

/// Values of one attribute for one target, one per illumination condition.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet {
    pub label: String,
    pub attribute: Attribute,
    pub values: Vec<f64>,
}

impl SampleSet {
    pub fn new(label: impl Into<String>, attribute: Attribute, values: Vec<f64>) -> Result<Self> {
        let label = label.into();
        if values.len() < 2 {
            return Err(Error::InvalidSampleSet {
                label,
                reason: format!("needs at least 2 values, has {}", values.len()),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSampleSet {
                label,
                reason: "contains non-finite values".into(),
            });
        }
        Ok(Self {
            label,
            attribute,
            values,
        })
    }
}

/// A Fisher criterion value. Zero within-class variance with distinct means
/// separates perfectly and has no finite value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Separability {
    Finite(f64),
    Infinite,
}

impl Separability {
    /// Orders infinite above every finite value.
    pub fn sort_key(&self) -> f64 {
        match *self {
            Separability::Finite(d) => d,
            Separability::Infinite => f64::INFINITY,
        }
    }
}

impl fmt::Display for Separability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Separability::Finite(d) => f.write_str(&format_sig(d, 6)),
            Separability::Infinite => f.write_str("inf"),
        }
    }
}

fn mean_and_ss(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let ss = values.iter().map(|v| (v - mean).powi(2)).sum();
    (mean, ss)
}

/// Fisher criterion of two sample sets (population variances).
pub fn fisher_criterion(a: &SampleSet, b: &SampleSet) -> Result<Separability> {
    if a.attribute != b.attribute {
        return Err(Error::AttributeMismatch(
            a.attribute.to_string(),
            b.attribute.to_string(),
        ));
    }
    Ok(fisher_of_values(&a.values, &b.values))
}

fn fisher_of_values(a: &[f64], b: &[f64]) -> Separability {
    let (mu_a, ss_a) = mean_and_ss(a);
    let (mu_b, ss_b) = mean_and_ss(b);
    let (n_a, n_b) = (a.len() as f64, b.len() as f64);
    let between = (mu_b - mu_a).powi(2);
    // s_a^2 + s_b^2 = (n_b ss_a + n_a ss_b) / (n_a n_b); kept as one fraction
    let within = n_b * ss_a + n_a * ss_b;
    if within == 0.0 {
        if between == 0.0 {
            Separability::Finite(0.0)
        } else {
            Separability::Infinite
        }
    } else {
        Separability::Finite(between * n_a * n_b / within)
    }
}

/// Rotates angles (degrees) so their circular mean lands on 180, wrapping
/// into `[0, 360)`. When the mean direction is undefined (zero resultant)
/// the rotation assumes a mean of 0.
pub fn circular_align(values: &[f64]) -> Vec<f64> {
    let (s, c) = values.iter().fold((0.0, 0.0), |(s, c), v| {
        let t = v.to_radians();
        (s + t.sin(), c + t.cos())
    });
    let mean = if s.hypot(c) <= 1e-12 * values.len().max(1) as f64 {
        0.0
    } else {
        s.atan2(c).to_degrees()
    };
    values
        .iter()
        .map(|v| (v - mean + 180.0).rem_euclid(360.0))
        .collect()
}

/// Two targets compared on one attribute.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairSpec {
    pub attribute: Attribute,
    pub first: String,
    pub second: String,
}

impl PairSpec {
    pub fn new(attribute: Attribute, first: &str, second: &str) -> Self {
        Self {
            attribute,
            first: first.to_owned(),
            second: second.to_owned(),
        }
    }

    pub fn label(&self) -> String {
        format!("{}&{}", self.first, self.second)
    }
}

/// ROI color of one target under one condition, as seen by one model.
#[derive(Clone, Debug, PartialEq)]
pub struct ColorSample {
    pub model: String,
    pub condition: usize,
    pub target: String,
    pub hsv: HsvColor,
    pub opponent: DoColor,
}

/// Per-target sample sets for every attribute of one model's samples.
/// Samples with `r == 0` carry no hue on the opponent plane and are left
/// out of the theta sets.
pub fn sample_sets(samples: &[ColorSample]) -> Vec<(Attribute, String, Vec<f64>)> {
    let mut grouped: BTreeMap<(Attribute, &str), Vec<f64>> = BTreeMap::new();
    for s in samples {
        for attr in Attribute::ALL {
            if attr == Attribute::Theta && s.opponent.r == 0.0 {
                continue;
            }
            grouped
                .entry((attr, s.target.as_str()))
                .or_default()
                .push(attr.of(s));
        }
    }
    grouped
        .into_iter()
        .map(|((a, t), v)| (a, t.to_owned(), v))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct FisherRow {
    pub model: String,
    pub attribute: Attribute,
    pub pair: String,
    pub d: Separability,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct FisherReport {
    pub rows: Vec<FisherRow>,
}

/// Best and worst model of one report column.
#[derive(Clone, Debug, PartialEq)]
pub struct ColumnExtremes {
    pub attribute: Attribute,
    pub pair: String,
    pub max_model: String,
    pub min_model: String,
}

impl FisherReport {
    pub const CSV_HEADER: &'static str = "model,attribute,pair,D";

    pub fn get(&self, model: &str, attribute: Attribute, pair: &str) -> Option<Separability> {
        self.rows
            .iter()
            .find(|r| r.model == model && r.attribute == attribute && r.pair == pair)
            .map(|r| r.d)
    }

    /// `model,attribute,pair,D` with D at 6 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!("{},{},{},{}\n", r.model, r.attribute, r.pair, r.d));
        }
        out
    }

    /// Column-wise maximum and minimum, first model wins ties.
    pub fn extremes(&self) -> Vec<ColumnExtremes> {
        let mut columns: Vec<(Attribute, &str, Vec<&FisherRow>)> = Vec::new();
        for r in &self.rows {
            match columns
                .iter_mut()
                .find(|(a, p, _)| *a == r.attribute && *p == r.pair)
            {
                Some(col) => col.2.push(r),
                None => columns.push((r.attribute, &r.pair, vec![r])),
            }
        }
        columns
            .into_iter()
            .map(|(attribute, pair, rows)| {
                let pick = |better: fn(f64, f64) -> bool| {
                    rows.iter()
                        .fold(rows[0], |best, r| {
                            if better(r.d.sort_key(), best.d.sort_key()) {
                                r
                            } else {
                                best
                            }
                        })
                        .model
                        .clone()
                };
                ColumnExtremes {
                    attribute,
                    pair: pair.to_owned(),
                    max_model: pick(|a, b| a > b),
                    min_model: pick(|a, b| a < b),
                }
            })
            .collect()
    }

    pub fn extremes_csv(&self) -> String {
        let mut out = String::from("attribute,pair,max_model,min_model\n");
        for e in self.extremes() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                e.attribute, e.pair, e.max_model, e.min_model
            ));
        }
        out
    }
}

/// Samples of one model, grouped as produced by [`sample_sets`].
pub type ModelSamples = (String, Vec<(Attribute, String, Vec<f64>)>);

/// One Fisher value per (model, pair). Circular attributes of a pair are
/// aligned together so the two classes keep their relative position.
pub fn build_report(collection: &[ModelSamples], pairs: &[PairSpec]) -> Result<FisherReport> {
    if collection.is_empty() || collection.iter().all(|(_, sets)| sets.is_empty()) {
        return Err(Error::EmptySamples);
    }
    let mut rows = Vec::new();
    for (model, sets) in collection {
        for pair in pairs {
            let lookup = |target: &str| -> Result<SampleSet> {
                let values = sets
                    .iter()
                    .find(|(a, t, _)| *a == pair.attribute && t == target)
                    .map(|(_, _, v)| v.clone())
                    .ok_or_else(|| Error::MissingSampleSet {
                        model: model.clone(),
                        attribute: pair.attribute.to_string(),
                        pair: pair.label(),
                        target: target.to_owned(),
                    })?;
                SampleSet::new(target, pair.attribute, values)
            };
            let mut a = lookup(&pair.first)?;
            let mut b = lookup(&pair.second)?;
            if pair.attribute.is_circular() {
                let joined: Vec<f64> = a.values.iter().chain(&b.values).copied().collect();
                let aligned = circular_align(&joined);
                let (left, right) = aligned.split_at(a.values.len());
                a.values = left.to_vec();
                b.values = right.to_vec();
            }
            rows.push(FisherRow {
                model: model.clone(),
                attribute: pair.attribute,
                pair: pair.label(),
                d: fisher_criterion(&a, &b)?,
            });
        }
    }
    Ok(FisherReport { rows })
}

/// Histogram bin width per attribute (degrees for hue/theta, levels otherwise).
pub const HISTOGRAM_BIN: f64 = 10.0;

#[derive(Clone, Debug, PartialEq)]
pub struct HistogramRow {
    pub model: String,
    pub attribute: Attribute,
    pub target: String,
    pub bin_left: f64,
    pub count: usize,
}

/// Nonempty bins of every attribute, per model and target.
pub fn histograms(collection: &[ModelSamples]) -> Vec<HistogramRow> {
    let mut rows = Vec::new();
    for (model, sets) in collection {
        for (attribute, target, values) in sets {
            let mut bins: BTreeMap<i64, usize> = BTreeMap::new();
            for v in values {
                *bins.entry((v / HISTOGRAM_BIN).floor() as i64).or_default() += 1;
            }
            rows.extend(bins.into_iter().map(|(bin, count)| HistogramRow {
                model: model.clone(),
                attribute: *attribute,
                target: target.clone(),
                bin_left: bin as f64 * HISTOGRAM_BIN,
                count,
            }));
        }
    }
    rows
}

pub fn histograms_csv(rows: &[HistogramRow]) -> String {
    let mut out = String::from("model,attribute,target,bin_left,count\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.model,
            r.attribute,
            r.target,
            format_sig(r.bin_left, 6),
            r.count
        ));
    }
    out
}

/// `%g`-style formatting with `digits` significant digits.
pub fn format_sig(value: f64, digits: usize) -> String {
    if value == 0.0 {
        return "0".into();
    }
    if !value.is_finite() {
        return if value.is_nan() {
            "nan".into()
        } else if value > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let precision = digits.max(1) - 1;
    let sci = format!("{value:.precision$e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{value:.decimals$}")).to_owned()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colorspace::{retinex_to_do, rgb_to_hsv};
    use proptest::prelude::*;

    fn set(values: &[f64]) -> SampleSet {
        SampleSet::new("t", Attribute::Hue, values.to_vec()).unwrap()
    }

    fn d(a: &[f64], b: &[f64]) -> f64 {
        match fisher_criterion(&set(a), &set(b)).unwrap() {
            Separability::Finite(v) => v,
            Separability::Infinite => f64::INFINITY,
        }
    }

    #[test]
    fn fisher_reference_values() {
        assert_eq!(d(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]), 0.0);
        assert_eq!(d(&[1.0, 2.0, 3.0], &[5.0, 6.0, 7.0]), 12.0);
        // population variance: sample variance would give 4
        assert_eq!(d(&[0.0, 2.0], &[4.0, 6.0]), 8.0);
        assert_eq!(d(&[101.0, 102.0, 103.0], &[105.0, 106.0, 107.0]), 12.0);
    }

    #[test]
    fn zero_within_variance() {
        assert_eq!(
            fisher_criterion(&set(&[1.0, 1.0]), &set(&[2.0, 2.0])).unwrap(),
            Separability::Infinite
        );
        assert_eq!(
            fisher_criterion(&set(&[1.0, 1.0]), &set(&[1.0, 1.0])).unwrap(),
            Separability::Finite(0.0)
        );
    }

    #[test]
    fn fisher_rejects_mixed_attributes() {
        let a = SampleSet::new("a", Attribute::Hue, vec![1.0, 2.0]).unwrap();
        let b = SampleSet::new("b", Attribute::Theta, vec![1.0, 2.0]).unwrap();
        assert!(matches!(
            fisher_criterion(&a, &b),
            Err(Error::AttributeMismatch(..))
        ));
    }

    #[test]
    fn sample_set_validation() {
        assert!(SampleSet::new("x", Attribute::R, vec![1.0]).is_err());
        assert!(SampleSet::new("x", Attribute::R, vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn circular_examples() {
        let a = circular_align(&[10.0, 350.0]);
        assert!((a[0] - 190.0).abs() < 1e-9 && (a[1] - 170.0).abs() < 1e-9);
        let b = circular_align(&[90.0, 90.0, 90.0]);
        assert!(b.iter().all(|v| (v - 180.0).abs() < 1e-9));
        let c = circular_align(&[20.0, 60.0, 150.0]);
        assert!(((c[1] - c[0]) - 40.0).abs() < 1e-9);
        assert!(((c[2] - c[0]) - 130.0).abs() < 1e-9);
    }

    #[test]
    fn circular_mean_oracle() {
        // brute force: the mean direction minimizes sum(1 - cos(v - m))
        let values = [350.0, 5.0, 20.0, 340.0, 12.0];
        let cost = |m: f64| -> f64 {
            values
                .iter()
                .map(|v: &f64| 1.0 - (v - m).to_radians().cos())
                .sum()
        };
        let best = (0..36000)
            .map(|i| i as f64 / 100.0)
            .min_by(|a, b| cost(*a).total_cmp(&cost(*b)))
            .unwrap();
        let aligned = circular_align(&values);
        let rotated_mean = aligned.iter().sum::<f64>() / aligned.len() as f64;
        // after alignment the arithmetic mean of a tight cluster is ~180
        assert!((rotated_mean - 180.0).abs() < 0.5);
        let shift = (aligned[0] - values[0]).rem_euclid(360.0);
        assert!(((180.0 - shift).rem_euclid(360.0) - best).abs() < 0.02);
    }

    fn sample(
        model: &str,
        condition: usize,
        target: &str,
        rgb: [f64; 3],
        x: [f64; 3],
    ) -> ColorSample {
        ColorSample {
            model: model.into(),
            condition,
            target: target.into(),
            hsv: rgb_to_hsv(rgb[0], rgb[1], rgb[2]),
            opponent: retinex_to_do(x[0], x[1], x[2]),
        }
    }

    fn carton_collection() -> Vec<ModelSamples> {
        let mut samples = Vec::new();
        for k in 0..5 {
            let j = k as f64;
            samples.push(sample(
                "m",
                k,
                "red",
                [250.0, 10.0 + j, 5.0 + 2.0 * j],
                [40.0, -10.0, -5.0 + j],
            ));
            samples.push(sample(
                "m",
                k,
                "yellow",
                [240.0 - j, 230.0, 10.0],
                [30.0, 30.0 + j, -40.0],
            ));
            samples.push(sample(
                "m",
                k,
                "green",
                [10.0, 220.0, 20.0 + 3.0 * j],
                [-30.0, 40.0, -5.0 - j],
            ));
            samples.push(sample(
                "m",
                k,
                "blue",
                [20.0 + j, 30.0, 230.0],
                [-5.0, j, 50.0],
            ));
        }
        vec![("m".into(), sample_sets(&samples))]
    }

    fn hue_pairs(attribute: Attribute) -> Vec<PairSpec> {
        [
            ("red", "yellow"),
            ("yellow", "green"),
            ("green", "blue"),
            ("blue", "red"),
        ]
        .iter()
        .map(|(a, b)| PairSpec::new(attribute, a, b))
        .collect()
    }

    #[test]
    fn report_layout() {
        let coll = carton_collection();
        let report = build_report(&coll, &hue_pairs(Attribute::Hue)).unwrap();
        assert_eq!(report.rows.len(), 4);
        assert_eq!(report.rows[3].pair, "blue&red");
        let csv = report.to_csv();
        assert!(csv.starts_with("model,attribute,pair,D\nm,hue,red&yellow,"));
        // red straddles 0/360: without joint alignment blue&red would be tiny
        let br = report
            .get("m", Attribute::Hue, "blue&red")
            .unwrap()
            .sort_key();
        assert!(br > 100.0, "{br}");
    }

    #[test]
    fn report_errors() {
        assert!(matches!(
            build_report(&[], &hue_pairs(Attribute::Hue)),
            Err(Error::EmptySamples)
        ));
        let coll = carton_collection();
        let missing = [PairSpec::new(Attribute::Hue, "red", "purple")];
        match build_report(&coll, &missing) {
            Err(Error::MissingSampleSet { pair, .. }) => assert_eq!(pair, "red&purple"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn theta_excludes_achromatic_samples() {
        let samples = vec![
            sample("m", 0, "grey", [1.0, 1.0, 1.0], [5.0, 5.0, 5.0]),
            sample("m", 1, "grey", [1.0, 1.0, 1.0], [6.0, 5.0, 5.0]),
            sample("m", 2, "grey", [1.0, 1.0, 1.0], [7.0, 5.0, 5.0]),
        ];
        let sets = sample_sets(&samples);
        let theta = sets.iter().find(|s| s.0 == Attribute::Theta).unwrap();
        let hue = sets.iter().find(|s| s.0 == Attribute::Hue).unwrap();
        assert_eq!(theta.2.len(), 2);
        assert_eq!(hue.2.len(), 3);
    }

    #[test]
    fn duplicated_model_gives_identical_rows() {
        let mut coll = carton_collection();
        coll.push(("m2".into(), coll[0].1.clone()));
        let report = build_report(&coll, &hue_pairs(Attribute::Theta)).unwrap();
        for pair in ["red&yellow", "yellow&green", "green&blue", "blue&red"] {
            assert_eq!(
                report.get("m", Attribute::Theta, pair),
                report.get("m2", Attribute::Theta, pair)
            );
        }
        let ext = report.extremes();
        assert_eq!(ext.len(), 4);
        assert_eq!(ext[0].max_model, "m");
    }

    #[test]
    fn histogram_counts_sum_to_samples() {
        let coll = carton_collection();
        let rows = histograms(&coll);
        let red_hue: usize = rows
            .iter()
            .filter(|r| r.attribute == Attribute::Hue && r.target == "red")
            .map(|r| r.count)
            .sum();
        assert_eq!(red_hue, 5);
        assert!(histograms_csv(&rows).starts_with("model,attribute,target,bin_left,count\n"));
    }

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(format_sig(12.0, 6), "12");
        assert_eq!(format_sig(657.84123, 6), "657.841");
        assert_eq!(format_sig(0.000123456789, 6), "0.000123457");
        assert_eq!(format_sig(1234567.0, 6), "1.23457e+06");
        assert_eq!(format_sig(999999.7, 6), "1e+06");
        assert_eq!(format_sig(-3.5, 6), "-3.5");
        assert_eq!(format_sig(1.5e-7, 6), "1.5e-07");
        assert_eq!(format_sig(0.0, 6), "0");
    }

    proptest! {
        #[test]
        fn fisher_symmetric_and_affine_invariant(
            a in proptest::collection::vec(-100.0f64..100.0, 2..20),
            b in proptest::collection::vec(-100.0f64..100.0, 2..20),
            scale in prop_oneof![-5.0f64..-0.1, 0.1f64..5.0],
            shift in -1000.0f64..1000.0,
        ) {
            let ab = d(&a, &b);
            let ba = d(&b, &a);
            prop_assert!(ab == ba || (ab - ba).abs() <= 1e-12 * ab.abs());
            let ta: Vec<f64> = a.iter().map(|v| scale * v + shift).collect();
            let tb: Vec<f64> = b.iter().map(|v| scale * v + shift).collect();
            let t = d(&ta, &tb);
            if ab.is_finite() {
                prop_assert!((t - ab).abs() <= 1e-6 * (1.0 + ab), "{} vs {}", t, ab);
            }
        }

        #[test]
        fn alignment_preserves_spread_of_narrow_sets(
            base in 0.0f64..360.0,
            offsets in proptest::collection::vec(0.0f64..170.0, 2..10),
        ) {
            let values: Vec<f64> = offsets.iter().map(|o| (base + o).rem_euclid(360.0)).collect();
            let aligned = circular_align(&values);
            for i in 1..values.len() {
                prop_assert!(((aligned[i] - aligned[0]) - (offsets[i] - offsets[0])).abs() < 1e-9);
            }
        }
    }
}
