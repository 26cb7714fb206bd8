//! Run configuration: weight and measure specs, numerical resolution,
//! parameter sweeps and validation.

use std::fmt;
use std::path::{Path, PathBuf};

use bergman_core::criteria::QlpReference;
use bergman_core::toeplitz::{KernelProxy, SchattenFunction, MEMBERSHIP_DEGREES};
use bergman_core::{DiscMeasure, DiscPoint, Weight};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::io;

/// A configuration problem, reported with the offending field.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightSpec {
    Constant,
    Standard { alpha: f64 },
    PowerOneMinusZ { gamma: f64 },
    /// Samples from a CSV file of `re,im,value` rows on an `n × n` grid.
    Grid { file: PathBuf, n: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasureSpec {
    /// `[re, im, mass]` triples.
    Atomic { atoms: Vec<[f64; 3]> },
    /// `u dA` for the configured weight.
    WeightedArea,
    PowerDensity { t: f64 },
    DensityGrid { file: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LadderSpec {
    pub rings: usize,
    pub samples_per_ring: usize,
}

/// Values swept as a cross product; each combination is one cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub t: Vec<f64>,
    pub r: Vec<f64>,
    pub s: Vec<f64>,
}

/// Which index the `criteria` subcommand computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriterionChoice {
    Boundedness,
    Compactness,
    Qlp,
    Carleson,
    VanishingCarleson,
    EssentialNorm,
    Consistency,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchattenSpec {
    pub h: SchattenFunction,
    /// The constant `C` in `h(C μ̃)`.
    pub c: f64,
    pub proxy: KernelProxy,
    /// Model degrees of the membership trend.
    pub degrees: Vec<usize>,
    /// Increasing `R_max` values of the integral sweep.
    pub sweep: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub weight: WeightSpec,
    pub measure: MeasureSpec,
    /// Kernel model degree `N`.
    pub degree: usize,
    /// Gauss nodes per radial panel of the boundary integrals.
    pub resolution: usize,
    pub r_max: f64,
    pub lattice_r: f64,
    pub ladder: LadderSpec,
    pub sweep: Sweep,
    pub criterion: CriterionChoice,
    pub qlp_reference: QlpReference,
    /// `u ∈ B_{p0}` exponent of the test-function Carleson form.
    pub p0: f64,
    pub schatten: SchattenSpec,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            weight: WeightSpec::Constant,
            measure: MeasureSpec::WeightedArea,
            degree: 120,
            resolution: 32,
            r_max: 0.99,
            lattice_r: 0.5,
            ladder: LadderSpec {
                rings: 7,
                samples_per_ring: 8,
            },
            sweep: Sweep {
                p: vec![2.0],
                q: vec![2.0],
                t: vec![2.0],
                r: vec![0.3],
                s: vec![2.0],
            },
            criterion: CriterionChoice::Consistency,
            qlp_reference: QlpReference::WeightedArea,
            p0: 3.0,
            schatten: SchattenSpec {
                h: SchattenFunction::Power { p: 2.0 },
                c: 1.0,
                proxy: KernelProxy::KernelDiagonal,
                degrees: MEMBERSHIP_DEGREES.to_vec(),
                sweep: bergman_core::toeplitz::SCHATTEN_SWEEP.to_vec(),
            },
            out: PathBuf::from("out"),
        }
    }
}

/// One point of the sweep cross product.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cell {
    pub p: f64,
    pub q: f64,
    pub t: f64,
    pub r: f64,
    pub s: f64,
}

fn in_open_unit(field: &str, v: f64) -> Result<(), ConfigError> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(ConfigError::new(field, format!("must lie in (0, 1), got {v}")))
    }
}

fn positive(field: &str, v: f64) -> Result<(), ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::new(field, format!("must be positive and finite, got {v}")))
    }
}

fn in_range(field: &str, v: usize, lo: usize, hi: usize) -> Result<(), ConfigError> {
    if (lo..=hi).contains(&v) {
        Ok(())
    } else {
        Err(ConfigError::new(field, format!("must lie in {lo}..={hi}, got {v}")))
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::new("config", e.to_string()))
    }

    /// Reads a JSON config; relative grid files resolve against its directory.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("config", format!("cannot read {}: {e}", path.display())))?;
        let mut config = Self::from_json(&text)?;
        if let Some(dir) = path.parent() {
            config.resolve_files(dir);
        }
        Ok(config)
    }

    fn resolve_files(&mut self, dir: &Path) {
        let fix = |f: &mut PathBuf| {
            if f.is_relative() {
                *f = dir.join(&*f);
            }
        };
        if let WeightSpec::Grid { file, .. } = &mut self.weight {
            fix(file);
        }
        if let MeasureSpec::DensityGrid { file } = &mut self.measure {
            fix(file);
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Checks every numeric range; nothing is computed before this passes.
    pub fn validate(&self) -> Result<(), ConfigError> {
        match &self.weight {
            WeightSpec::Constant => {}
            WeightSpec::Standard { alpha } => {
                if !(*alpha > -1.0 && alpha.is_finite()) {
                    return Err(ConfigError::new("weight.alpha", format!("must exceed -1, got {alpha}")));
                }
            }
            WeightSpec::PowerOneMinusZ { gamma } => {
                if !(*gamma > -2.0 && gamma.is_finite()) {
                    return Err(ConfigError::new("weight.gamma", format!("must exceed -2, got {gamma}")));
                }
            }
            WeightSpec::Grid { n, .. } => in_range("weight.n", *n, 2, 4096)?,
        }
        match &self.measure {
            MeasureSpec::Atomic { atoms } => {
                if atoms.is_empty() {
                    return Err(ConfigError::new("measure.atoms", "at least one atom is required"));
                }
                for (k, [re, im, mass]) in atoms.iter().enumerate() {
                    if !(re * re + im * im < 1.0) {
                        return Err(ConfigError::new(format!("measure.atoms[{k}]"), "atom must lie in the open unit disc"));
                    }
                    positive(&format!("measure.atoms[{k}].mass"), *mass)?;
                }
            }
            MeasureSpec::PowerDensity { t } => positive("measure.t", *t)?,
            MeasureSpec::WeightedArea | MeasureSpec::DensityGrid { .. } => {}
        }
        in_range("degree", self.degree, 1, 4000)?;
        in_range("resolution", self.resolution, 4, 1024)?;
        in_open_unit("r_max", self.r_max)?;
        in_open_unit("lattice_r", self.lattice_r)?;
        in_range("ladder.rings", self.ladder.rings, 2, 40)?;
        in_range("ladder.samples_per_ring", self.ladder.samples_per_ring, 1, 4096)?;
        let sweeps: [(&str, &Vec<f64>); 5] = [
            ("sweep.p", &self.sweep.p),
            ("sweep.q", &self.sweep.q),
            ("sweep.t", &self.sweep.t),
            ("sweep.r", &self.sweep.r),
            ("sweep.s", &self.sweep.s),
        ];
        for (field, values) in sweeps {
            if values.is_empty() {
                return Err(ConfigError::new(field, "needs at least one value"));
            }
            for &v in values {
                if field == "sweep.r" {
                    in_open_unit(field, v)?;
                } else {
                    positive(field, v)?;
                }
            }
        }
        if !(self.p0 > 1.0 && self.p0.is_finite()) {
            return Err(ConfigError::new("p0", format!("must exceed 1, got {}", self.p0)));
        }
        self.schatten
            .h
            .validate()
            .map_err(|e| ConfigError::new("schatten.h", e.to_string()))?;
        positive("schatten.c", self.schatten.c)?;
        if self.schatten.degrees.is_empty() {
            return Err(ConfigError::new("schatten.degrees", "needs at least one degree"));
        }
        for &n in &self.schatten.degrees {
            in_range("schatten.degrees", n, 1, 4000)?;
        }
        if self.schatten.sweep.is_empty() || !self.schatten.sweep.windows(2).all(|w| w[0] < w[1]) {
            return Err(ConfigError::new("schatten.sweep", "must be a non-empty increasing list"));
        }
        for &v in &self.schatten.sweep {
            in_open_unit("schatten.sweep", v)?;
        }
        Ok(())
    }

    /// The sweep cross product, in `p, q, t, r, s` nesting order.
    pub fn cells(&self) -> Vec<Cell> {
        let s = &self.sweep;
        let mut out = Vec::new();
        for &p in &s.p {
            for &q in &s.q {
                for &t in &s.t {
                    for &r in &s.r {
                        for &sv in &s.s {
                            out.push(Cell { p, q, t, r, s: sv });
                        }
                    }
                }
            }
        }
        out
    }

    /// This config restricted to one cell.
    pub fn for_cell(&self, cell: Cell) -> RunConfig {
        let mut c = self.clone();
        c.sweep = Sweep {
            p: vec![cell.p],
            q: vec![cell.q],
            t: vec![cell.t],
            r: vec![cell.r],
            s: vec![cell.s],
        };
        c
    }

    /// SHA-256 of the serialized config without its output directory.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.out = PathBuf::new();
        let digest = Sha256::digest(serde_json::to_vec(&c).expect("config serializes"));
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn build_weight(&self) -> Result<Weight, ConfigError> {
        match &self.weight {
            WeightSpec::Constant => Ok(Weight::constant()),
            WeightSpec::Standard { alpha } => Weight::standard(*alpha).map_err(|e| ConfigError::new("weight.alpha", e.to_string())),
            WeightSpec::PowerOneMinusZ { gamma } => Weight::power_one_minus_z(*gamma).map_err(|e| ConfigError::new("weight.gamma", e.to_string())),
            WeightSpec::Grid { file, n } => Ok(Weight::grid(io::read_grid_csv(file, Some(*n), "weight.file")?)),
        }
    }

    pub fn build_measure(&self, u: &Weight) -> Result<DiscMeasure, ConfigError> {
        match &self.measure {
            MeasureSpec::Atomic { atoms } => {
                let mut pts = Vec::with_capacity(atoms.len());
                for (k, [re, im, mass]) in atoms.iter().enumerate() {
                    let z = DiscPoint::new(*re, *im).map_err(|e| ConfigError::new(format!("measure.atoms[{k}]"), e.to_string()))?;
                    pts.push((z, *mass));
                }
                DiscMeasure::atomic(pts).map_err(|e| ConfigError::new("measure.atoms", e.to_string()))
            }
            MeasureSpec::WeightedArea => Ok(DiscMeasure::weighted_area(u.clone())),
            MeasureSpec::PowerDensity { t } => {
                DiscMeasure::power_density(*t).map_err(|e| ConfigError::new("measure.t", e.to_string()))
            }
            MeasureSpec::DensityGrid { file } => Ok(DiscMeasure::density_grid(io::read_grid_csv(file, None, "measure.file")?)),
        }
    }
}

/// Parses `kind` or `kind:argument`, e.g. `power_density:0.4` or
/// `atomic:[[0,0,2]]`.
pub fn parse_measure(text: &str) -> Result<MeasureSpec, ConfigError> {
    let (kind, arg) = match text.split_once(':') {
        Some((k, a)) => (k.trim(), Some(a.trim())),
        None => (text.trim(), None),
    };
    let number = |a: Option<&str>| -> Result<f64, ConfigError> {
        a.ok_or_else(|| ConfigError::new("--measure", format!("{kind} needs an argument")))?
            .parse::<f64>()
            .map_err(|e| ConfigError::new("--measure", e.to_string()))
    };
    match kind {
        "weighted_area" => Ok(MeasureSpec::WeightedArea),
        "power_density" => Ok(MeasureSpec::PowerDensity { t: number(arg)? }),
        "atomic" => {
            let a = arg.ok_or_else(|| ConfigError::new("--measure", "atomic needs [[re,im,mass],...]"))?;
            let atoms: Vec<[f64; 3]> = serde_json::from_str(a).map_err(|e| ConfigError::new("--measure", e.to_string()))?;
            Ok(MeasureSpec::Atomic { atoms })
        }
        "density_grid" => Ok(MeasureSpec::DensityGrid {
            file: PathBuf::from(arg.ok_or_else(|| ConfigError::new("--measure", "density_grid needs a file"))?),
        }),
        other => Err(ConfigError::new("--measure", format!("unknown measure kind {other:?}"))),
    }
}

/// Parses `constant`, `standard:α`, `power_one_minus_z:γ` or `grid:file:n`.
pub fn parse_weight(text: &str) -> Result<WeightSpec, ConfigError> {
    let mut parts = text.split(':').map(str::trim);
    let kind = parts.next().unwrap_or_default();
    let mut number = |name: &str| -> Result<f64, ConfigError> {
        parts
            .next()
            .ok_or_else(|| ConfigError::new("--weight", format!("{kind} needs {name}")))?
            .parse::<f64>()
            .map_err(|e| ConfigError::new("--weight", e.to_string()))
    };
    match kind {
        "constant" => Ok(WeightSpec::Constant),
        "standard" => Ok(WeightSpec::Standard { alpha: number("alpha")? }),
        "power_one_minus_z" => Ok(WeightSpec::PowerOneMinusZ { gamma: number("gamma")? }),
        "grid" => {
            let file = PathBuf::from(parts.next().ok_or_else(|| ConfigError::new("--weight", "grid needs a file"))?);
            let n = parts
                .next()
                .ok_or_else(|| ConfigError::new("--weight", "grid needs n"))?
                .parse::<usize>()
                .map_err(|e| ConfigError::new("--weight", e.to_string()))?;
            Ok(WeightSpec::Grid { file, n })
        }
        other => Err(ConfigError::new("--weight", format!("unknown weight kind {other:?}"))),
    }
}

/// Parses a comma-separated list of reals.
pub fn parse_list(field: &str, text: &str) -> Result<Vec<f64>, ConfigError> {
    text.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|e| ConfigError::new(field, format!("{v:?}: {e}")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid_and_round_trips() {
        let c = RunConfig::default();
        c.validate().unwrap();
        assert_eq!(RunConfig::from_json(&c.to_json()).unwrap(), c);
    }

    #[test]
    fn partial_json_fills_defaults() {
        let c = RunConfig::from_json(r#"{"weight":{"kind":"standard","alpha":1.0},"degree":60}"#).unwrap();
        assert_eq!(c.weight, WeightSpec::Standard { alpha: 1.0 });
        assert_eq!(c.degree, 60);
        assert_eq!(c.ladder, RunConfig::default().ladder);
    }

    #[test]
    fn field_level_errors() {
        let mut c = RunConfig::default();
        c.r_max = 1.0;
        assert_eq!(c.validate().unwrap_err().field, "r_max");
        let mut c = RunConfig::default();
        c.sweep.r = vec![0.3, 1.5];
        assert_eq!(c.validate().unwrap_err().field, "sweep.r");
        let mut c = RunConfig::default();
        c.measure = MeasureSpec::Atomic { atoms: vec![[0.9, 0.9, 1.0]] };
        assert_eq!(c.validate().unwrap_err().field, "measure.atoms[0]");
        assert!(RunConfig::from_json(r#"{"degre":5}"#).is_err());
    }

    #[test]
    fn shorthand_specs() {
        assert_eq!(parse_measure("power_density:0.4").unwrap(), MeasureSpec::PowerDensity { t: 0.4 });
        assert_eq!(
            parse_measure("atomic:[[0,0,2]]").unwrap(),
            MeasureSpec::Atomic { atoms: vec![[0.0, 0.0, 2.0]] }
        );
        assert_eq!(parse_weight("standard:1").unwrap(), WeightSpec::Standard { alpha: 1.0 });
        assert!(parse_measure("lebesgue").is_err());
        assert_eq!(parse_list("p", "2, 4").unwrap(), vec![2.0, 4.0]);
    }

    #[test]
    fn cells_and_hashes() {
        let mut c = RunConfig::default();
        c.sweep.p = vec![2.0, 3.0];
        c.sweep.q = vec![2.0, 4.0];
        let cells = c.cells();
        assert_eq!(cells.len(), 4);
        assert_eq!((cells[1].p, cells[1].q), (2.0, 4.0));
        let h: Vec<String> = cells.iter().map(|&x| c.for_cell(x).hash()).collect();
        assert_eq!(h.len(), 4);
        assert!(h.windows(2).all(|w| w[0] != w[1]));
        let mut moved = c.clone();
        moved.out = PathBuf::from("elsewhere");
        assert_eq!(moved.hash(), c.hash());
    }

    proptest::proptest! {
        #[test]
        fn sweeps_round_trip_and_expand(
            p in proptest::collection::vec(1.0f64..8.0, 1..4),
            r in proptest::collection::vec(0.05f64..0.95, 1..3),
            degree in 8usize..400,
        ) {
            let mut c = RunConfig::default();
            c.sweep.p = p.clone();
            c.sweep.r = r.clone();
            c.degree = degree;
            let back = RunConfig::from_json(&c.to_json()).unwrap();
            proptest::prop_assert_eq!(&back, &c);
            proptest::prop_assert_eq!(back.hash(), c.hash());
            let cells = c.cells();
            proptest::prop_assert_eq!(cells.len(), p.len() * r.len());
            for cell in cells {
                let one = c.for_cell(cell);
                proptest::prop_assert_eq!(one.cells(), vec![cell]);
            }
        }
    }
}
