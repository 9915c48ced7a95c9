//! TOML scene files.
//!
//! ```toml
//! seed = 42                # optional, default 42
//! mode = "static"          # or "sstk"
//!
//! [chart]
//! lo = [-2.0, -2.0]
//! hi = [2.0, 2.0]
//! margin = 0.04            # optional, default 1% of the smallest extent
//! holes = [{ shape = "disk", center = [0.0, 0.0], radius = 0.1 }]
//!
//! [norm]
//! kind = "randers"         # quadratic | randers | figure-one | coefficients
//! a = [[1.0, 0.0], [0.0, 1.0]]
//! b = [0.5, 0.0]
//! # coefficients: a_fields = [[<field>, ...], ...], b_fields = [<field>, ...]
//!
//! [lambda]                 # any scalar field, see below
//! kind = "polynomial"
//! terms = [{ coef = 1.0, powers = [0, 0] }, { coef = 1.0, powers = [2, 0] }]
//!
//! [omega]                  # sstk only
//! components = [{ kind = "constant", value = -2.0 }, { kind = "constant", value = 0.0 }]
//!
//! [grid]
//! resolution = 100
//! stencil_radius = 2
//!
//! [tolerances]
//! step = 1e-3
//! shooting = 1e-6
//! ```
//!
//! Scalar fields are tables tagged by `kind`: `constant {value}`,
//! `polynomial {terms}`, `radial-exp {a, k}` (`a·exp(k|x|²)`) and
//! `grid-table {lo, hi, shape, values}` (axis 0 fastest).
//! An optional `[ladder]` table configures the `ladder` subcommand.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::base::{Chart, FinslerField, Hole, NormField, ScalarField};
use crate::causality::{CompletenessModel, GridOptions};
use crate::error::{Error, Result};
use crate::minkowski::NormSpec;
use crate::spacetime::StaticSpacetime;
use crate::{Matrix, Vector};

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SceneMode {
    #[default]
    Static,
    Sstk,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartSpec {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub margin: Option<f64>,
    #[serde(default)]
    pub holes: Vec<Hole>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum NormSection {
    Quadratic { a: Vec<Vec<f64>> },
    Randers { a: Vec<Vec<f64>>, b: Vec<f64> },
    FigureOne {},
    Coefficients { a_fields: Vec<Vec<ScalarField>>, b_fields: Option<Vec<ScalarField>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OmegaSection {
    pub components: Vec<ScalarField>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(default = "default_resolution")]
    pub resolution: usize,
    #[serde(default = "default_stencil")]
    pub stencil_radius: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection { resolution: default_resolution(), stencil_radius: default_stencil() }
    }
}

fn default_resolution() -> usize {
    100
}

fn default_stencil() -> usize {
    2
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_step")]
    pub step: f64,
    #[serde(default = "default_shooting")]
    pub shooting: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { step: default_step(), shooting: default_shooting() }
    }
}

fn default_step() -> f64 {
    crate::geodesics::DEFAULT_STEP
}

fn default_shooting() -> f64 {
    1e-6
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HyperbolicitySection {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub r: f64,
    pub s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LadderSection {
    pub basepoint: Option<Vec<f64>>,
    #[serde(default = "default_pairs")]
    pub pairs: usize,
    #[serde(default = "default_model")]
    pub model: CompletenessModel,
    #[serde(default = "default_rays")]
    pub rays: usize,
    pub length_budget: Option<f64>,
    pub origins: Option<Vec<Vec<f64>>>,
    pub time_function: Option<ScalarField>,
    pub alpha: Option<f64>,
    pub hyperbolicity: Option<HyperbolicitySection>,
}

impl Default for LadderSection {
    fn default() -> Self {
        LadderSection {
            basepoint: None,
            pairs: default_pairs(),
            model: default_model(),
            rays: default_rays(),
            length_budget: None,
            origins: None,
            time_function: None,
            alpha: None,
            hyperbolicity: None,
        }
    }
}

fn default_pairs() -> usize {
    10
}

fn default_model() -> CompletenessModel {
    CompletenessModel::WholePlane
}

fn default_rays() -> usize {
    16
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scene {
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub mode: SceneMode,
    pub chart: ChartSpec,
    pub norm: NormSection,
    pub lambda: ScalarField,
    pub omega: Option<OmegaSection>,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub tolerances: Tolerances,
    pub ladder: Option<LadderSection>,
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn matrix(rows: &[Vec<f64>], n: usize) -> Result<Matrix> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Scene(format!("[norm] matrix must be {n}×{n}")));
    }
    Ok(Matrix::from_fn(n, n, |i, j| rows[i][j]))
}

impl Scene {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Scene(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Scene(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn dimension(&self) -> usize {
        self.chart.lo.len()
    }

    pub fn chart(&self) -> Result<Chart> {
        let c = &self.chart;
        let min_extent = c.lo.iter().zip(&c.hi).map(|(l, h)| h - l).fold(f64::INFINITY, f64::min);
        let margin = c.margin.unwrap_or(0.01 * min_extent);
        let mut chart = Chart::new(c.lo.clone(), c.hi.clone(), margin)?;
        for h in &c.holes {
            let Hole::Disk { center, radius } = h;
            if center.len() != chart.dimension() || !(*radius > 0.0) {
                return Err(Error::Scene("holes need a centre of the chart's dimension and a positive radius".into()));
            }
            chart = chart.with_hole(h.clone());
        }
        Ok(chart)
    }

    pub fn norm_field(&self) -> Result<NormField> {
        let n = self.dimension();
        Ok(match &self.norm {
            NormSection::Quadratic { a } => NormField::Constant(NormSpec::quadratic(matrix(a, n)?)?),
            NormSection::Randers { a, b } => {
                if b.len() != n {
                    return Err(Error::DimensionMismatch { expected: n, got: b.len() });
                }
                NormField::Constant(NormSpec::randers(matrix(a, n)?, Vector::from_vec(b.clone()))?)
            }
            NormSection::FigureOne {} => {
                if n != 2 {
                    return Err(Error::Scene("the figure-one norm is planar".into()));
                }
                NormField::Constant(NormSpec::figure_one())
            }
            NormSection::Coefficients { a_fields, b_fields } => {
                NormField::Coefficients { a: a_fields.clone(), b: b_fields.clone() }
            }
        })
    }

    /// Builds and validates the spacetime described by the scene.
    pub fn spacetime(&self) -> Result<StaticSpacetime> {
        let chart = self.chart()?;
        let norm = self.norm_field()?;
        match self.mode {
            SceneMode::Static => {
                if self.omega.is_some() {
                    return Err(Error::Scene("[omega] is only allowed with mode = \"sstk\"".into()));
                }
                Ok(StaticSpacetime::new(FinslerField::new(chart, norm, self.lambda.clone())?))
            }
            SceneMode::Sstk => {
                let omega = self
                    .omega
                    .as_ref()
                    .ok_or_else(|| Error::Scene("mode = \"sstk\" requires an [omega] section".into()))?;
                StaticSpacetime::sstk(chart, norm, self.lambda.clone(), omega.components.clone())
            }
        }
    }

    pub fn grid_options(&self) -> GridOptions {
        GridOptions { resolution: self.grid.resolution, stencil_radius: self.grid.stencil_radius }
    }

    pub fn ladder(&self) -> LadderSection {
        self.ladder.clone().unwrap_or_default()
    }
}
