//! Run configuration: a TOML document merged over built-in defaults.
//!
//! Every section and key is optional; unknown keys are rejected so typos
//! surface as errors instead of silently falling back to a default.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use phibnorm::{CrispFunctional, FuzzySpace, Profile, TNorm};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::matrix;

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub alpha_grid: Vec<f64>,
    /// Default space for commands that need one.
    pub space: SpaceConfig,
    pub tnorm_check: TNormCheckConfig,
    pub phi_check: PhiCheckConfig,
    pub space_check: SpaceCheckConfig,
    pub d_alpha: DAlphaConfig,
    pub seq_converge: SeqConfig,
    pub op_bound: OpBoundConfig,
    pub op_continuity: OpContinuityConfig,
    pub counterexample: CounterexampleConfig,
    pub op_norm: OpNormConfig,
    pub op_complete: OpCompleteConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 7,
            alpha_grid: (1..10).map(|k| k as f64 / 10.0).collect(),
            space: SpaceConfig::default(),
            tnorm_check: Default::default(),
            phi_check: Default::default(),
            space_check: Default::default(),
            d_alpha: Default::default(),
            seq_converge: Default::default(),
            op_bound: Default::default(),
            op_continuity: Default::default(),
            counterexample: Default::default(),
            op_norm: Default::default(),
            op_complete: Default::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProfileConfig {
    Step { h: f64 },
    Reciprocal,
    PiecewiseLinear { knots: Vec<(f64, f64)> },
}

impl ProfileConfig {
    pub fn build(&self) -> phibnorm::Result<Profile> {
        match self {
            ProfileConfig::Step { h } => Profile::step(*h),
            ProfileConfig::Reciprocal => Ok(Profile::Reciprocal),
            ProfileConfig::PiecewiseLinear { knots } => Profile::piecewise_linear(knots.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpaceConfig {
    pub dim: usize,
    pub p: f64,
    pub profile: ProfileConfig,
    pub tnorm: String,
    /// Per-coordinate weights of the crisp norm; defaults to all ones.
    pub weights: Option<Vec<f64>>,
    /// b-constant; defaults to `2^(p-1)`.
    pub k: Option<f64>,
}

impl Default for SpaceConfig {
    fn default() -> Self {
        SpaceConfig {
            dim: 2,
            p: 1.0,
            profile: ProfileConfig::Reciprocal,
            tnorm: "min".into(),
            weights: None,
            k: None,
        }
    }
}

impl SpaceConfig {
    pub fn new(dim: usize, p: f64, profile: ProfileConfig, tnorm: &str) -> Self {
        SpaceConfig {
            dim,
            p,
            profile,
            tnorm: tnorm.into(),
            weights: None,
            k: None,
        }
    }

    pub fn build(&self) -> phibnorm::Result<FuzzySpace> {
        let rho = match &self.weights {
            Some(w) => {
                if w.len() != self.dim {
                    return Err(phibnorm::Error::DimensionMismatch {
                        expected: self.dim,
                        got: w.len(),
                    });
                }
                CrispFunctional::weighted(w.clone(), self.p)?
            }
            None => CrispFunctional::euclidean(self.dim, self.p)?,
        };
        let sp = FuzzySpace::new(rho, self.profile.build()?, self.tnorm.parse::<TNorm>()?);
        match self.k {
            Some(k) => sp.with_k(k),
            None => Ok(sp),
        }
    }
}

/// A matrix given inline or as a file, with optional spaces (the run's
/// default space otherwise).
#[derive(Debug, Clone, PartialEq, Default, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct OperatorConfig {
    pub matrix: Option<Vec<Vec<f64>>>,
    pub matrix_file: Option<PathBuf>,
    pub domain: Option<SpaceConfig>,
    pub codomain: Option<SpaceConfig>,
}

impl OperatorConfig {
    pub fn inline(rows: &[&[f64]]) -> Self {
        OperatorConfig {
            matrix: Some(rows.iter().map(|r| r.to_vec()).collect()),
            ..Default::default()
        }
    }

    pub fn spaces(&self, default: &SpaceConfig) -> phibnorm::Result<(Arc<FuzzySpace>, Arc<FuzzySpace>)> {
        let d = Arc::new(self.domain.as_ref().unwrap_or(default).build()?);
        let c = match &self.codomain {
            None if self.domain.is_none() => d.clone(),
            None => Arc::new(default.build()?),
            Some(c) => Arc::new(c.build()?),
        };
        Ok((d, c))
    }

    /// The matrix; the identity of the domain dimension when none is given.
    pub fn matrix(&self, rows: usize, cols: usize) -> Result<nalgebra::DMatrix<f64>, CliError> {
        match (&self.matrix, &self.matrix_file) {
            (Some(_), Some(_)) => Err(CliError::Config("operator: give either `matrix` or `matrix_file`, not both".into())),
            (Some(m), None) => matrix::from_rows(m).map_err(|e| CliError::Config(format!("operator.matrix: {e}"))),
            (None, Some(path)) => matrix::read_file(path),
            (None, None) => Ok(nalgebra::DMatrix::from_fn(rows, cols, |i, j| if i == j { 1.0 } else { 0.0 })),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct TNormCheckConfig {
    pub tnorms: Vec<String>,
    pub samples: usize,
    pub tol: f64,
    /// Also run the `(a + b) / 2` control, which must fail the identity axiom.
    pub control: bool,
}

impl Default for TNormCheckConfig {
    fn default() -> Self {
        TNormCheckConfig {
            tnorms: TNorm::builtins().iter().map(|t| t.name().to_string()).collect(),
            samples: 10_000,
            tol: 1e-12,
            control: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhiCheckConfig {
    /// `abs`, `power:<p>` or `rational:<n>`.
    pub phis: Vec<String>,
    pub grid: usize,
    pub tol: f64,
}

impl Default for PhiCheckConfig {
    fn default() -> Self {
        PhiCheckConfig {
            phis: vec!["abs".into(), "power:2".into(), "power:0.5".into(), "rational:1".into()],
            grid: 2_000,
            tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpaceCheckConfig {
    pub spaces: Vec<SpaceConfig>,
    pub samples: usize,
    pub tol: f64,
}

impl Default for SpaceCheckConfig {
    fn default() -> Self {
        SpaceCheckConfig {
            spaces: vec![
                SpaceConfig::new(3, 1.0, ProfileConfig::Reciprocal, "min"),
                SpaceConfig::new(3, 2.0, ProfileConfig::Reciprocal, "bounded-difference"),
                SpaceConfig::new(3, 1.0, ProfileConfig::Step { h: 0.5 }, "min"),
            ],
            samples: 10_000,
            tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct DAlphaConfig {
    /// Defaults to `(3, 4, 0, …)` in the space's dimension.
    pub x: Option<Vec<f64>>,
    pub strict: bool,
    pub tol: f64,
}

impl Default for DAlphaConfig {
    fn default() -> Self {
        DAlphaConfig {
            x: None,
            strict: false,
            tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeName {
    Classical,
    AlphaFuzzy,
    LFuzzy,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct SeqConfig {
    pub base: Option<Vec<f64>>,
    pub direction: Option<Vec<f64>>,
    /// `x_k = base + k^{-rate} direction`.
    pub rate: f64,
    pub modes: Vec<ModeName>,
    pub alpha: f64,
    pub t_grid: Vec<f64>,
    pub n_max: u64,
    pub tol: f64,
    /// `converges`, `diverges` or `inconclusive`.
    pub expect: String,
}

impl Default for SeqConfig {
    fn default() -> Self {
        SeqConfig {
            base: None,
            direction: None,
            rate: 1.0,
            modes: vec![ModeName::Classical, ModeName::AlphaFuzzy, ModeName::LFuzzy],
            alpha: 0.5,
            t_grid: vec![0.1, 1.0, 10.0],
            n_max: 1_000_000,
            tol: 1e-3,
            expect: "converges".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct OpBoundConfig {
    pub operator: OperatorConfig,
    /// Unit-ρ directions for sampled suprema; dimension-dependent by default.
    pub sphere_samples: Option<usize>,
    pub ceiling: f64,
    pub expect_bounded: bool,
    pub equivalence_samples: usize,
    pub tol: f64,
    pub independence: IndependenceConfig,
    pub subspace: SubspaceConfig,
    pub sweep: SweepConfig,
}

impl Default for OpBoundConfig {
    fn default() -> Self {
        OpBoundConfig {
            operator: OperatorConfig::inline(&[&[1.0, 0.5], &[-2.0, 3.0]]),
            sphere_samples: None,
            ceiling: phibnorm::operator::DEFAULT_CEILING,
            expect_bounded: true,
            equivalence_samples: 10_000,
            tol: 1e-9,
            independence: Default::default(),
            subspace: Default::default(),
            sweep: Default::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct IndependenceConfig {
    /// Basis vectors; the standard basis of the default space when empty.
    pub basis: Vec<Vec<f64>>,
    pub alpha: f64,
    pub resolution: usize,
    pub samples: usize,
    pub tol: f64,
}

impl Default for IndependenceConfig {
    fn default() -> Self {
        IndependenceConfig {
            basis: Vec::new(),
            alpha: 0.5,
            resolution: 64,
            samples: 1_000,
            tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct SubspaceConfig {
    pub second: OperatorConfig,
    pub k1: f64,
    pub k2: f64,
    pub pair_samples: usize,
}

impl Default for SubspaceConfig {
    fn default() -> Self {
        SubspaceConfig {
            second: OperatorConfig::inline(&[&[0.0, 1.0], &[1.0, 0.5]]),
            k1: 2.0,
            k2: -1.5,
            pair_samples: 1_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub operators: usize,
    pub domain: SpaceConfig,
    pub codomain: SpaceConfig,
    /// A domain without the positivity condition, which must be refused.
    pub refused_domain: Option<SpaceConfig>,
    pub sphere_samples: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            operators: 50,
            domain: SpaceConfig::new(3, 1.0, ProfileConfig::Reciprocal, "min"),
            codomain: SpaceConfig::new(2, 1.0, ProfileConfig::Reciprocal, "min"),
            refused_domain: Some(SpaceConfig::new(3, 1.0, ProfileConfig::Step { h: 0.5 }, "min")),
            sphere_samples: 512,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProbeConfig {
    pub rate: f64,
    pub n_max: u64,
    pub tol: f64,
    pub t_grid: Vec<f64>,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        let d = phibnorm::operator::ProbeSettings::default();
        ProbeConfig {
            rate: d.rate,
            n_max: d.n_max,
            tol: d.tol,
            t_grid: d.t_grid,
        }
    }
}

impl ProbeConfig {
    pub fn settings(&self) -> phibnorm::operator::ProbeSettings {
        phibnorm::operator::ProbeSettings {
            rate: self.rate,
            n_max: self.n_max,
            tol: self.tol,
            t_grid: self.t_grid.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct OpContinuityConfig {
    pub operator: OperatorConfig,
    pub sphere_samples: Option<usize>,
    pub probe: ProbeConfig,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct CounterexampleConfig {
    /// `step-domain`, `reciprocal-domain` or `zero-operator`.
    pub variants: Vec<String>,
    pub dim: usize,
    pub sphere_samples: usize,
    /// Tolerance on the closed-form `M_α` of the bounded levels.
    pub tol: f64,
    pub probe: ProbeConfig,
}

impl Default for CounterexampleConfig {
    fn default() -> Self {
        CounterexampleConfig {
            variants: vec!["step-domain".into(), "reciprocal-domain".into(), "zero-operator".into()],
            dim: 2,
            sphere_samples: 512,
            tol: 1e-6,
            probe: ProbeConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct OpNormConfig {
    pub operator: OperatorConfig,
    pub s_grid: Vec<f64>,
    pub alpha_tol: f64,
    pub sphere_samples: Option<usize>,
    /// Random operators (besides the configured one and zero) in the axiom check.
    pub fleet: usize,
    pub lambdas: Vec<f64>,
    pub tol: f64,
}

impl Default for OpNormConfig {
    fn default() -> Self {
        OpNormConfig {
            operator: OperatorConfig::default(),
            s_grid: vec![0.5, 1.0, 3.0],
            alpha_tol: phibnorm::opnorm::ALPHA_TOL,
            sphere_samples: None,
            fleet: 6,
            lambdas: vec![2.0, 3.0, 0.5],
            tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DecayConfig {
    Power { q: f64 },
    Geometric { r: f64 },
    Alternating,
    Constant,
}

impl From<DecayConfig> for phibnorm::Decay {
    fn from(d: DecayConfig) -> Self {
        match d {
            DecayConfig::Power { q } => phibnorm::Decay::Power { q },
            DecayConfig::Geometric { r } => phibnorm::Decay::Geometric { r },
            DecayConfig::Alternating => phibnorm::Decay::Alternating,
            DecayConfig::Constant => phibnorm::Decay::Constant,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct OpCompleteConfig {
    pub base: OperatorConfig,
    pub perturbation: Vec<Vec<f64>>,
    pub decay: DecayConfig,
    pub n_max: u64,
    /// Bound on the horizon residual `⋀{s : N(T_n - L, s) ≥ α}`.
    pub tol: f64,
    /// Entrywise tolerance between the recovered limit and the base operator.
    pub entry_tol: f64,
    pub sphere_samples: usize,
    pub uniqueness: UniquenessConfig,
}

impl Default for OpCompleteConfig {
    fn default() -> Self {
        OpCompleteConfig {
            base: OperatorConfig::inline(&[&[1.0, 0.5], &[-2.0, 3.0]]),
            perturbation: vec![vec![0.3, -0.2], vec![0.1, 0.4]],
            decay: DecayConfig::Power { q: 1.0 },
            n_max: 1_000,
            tol: 1e-2,
            entry_tol: 1e-9,
            sphere_samples: 256,
            uniqueness: Default::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct UniquenessConfig {
    pub limit: Vec<f64>,
    pub direction: Vec<f64>,
    pub decoys: Vec<Vec<f64>>,
    pub alpha: f64,
    pub n_max: u64,
    pub tol: f64,
}

impl Default for UniquenessConfig {
    fn default() -> Self {
        UniquenessConfig {
            limit: vec![1.0, -1.0],
            direction: vec![0.3, 0.4],
            decoys: vec![vec![1.6, -0.2], vec![1.0, -1.0], vec![-2.0, 3.0]],
            alpha: 0.5,
            n_max: 10_000_000,
            tol: 1e-6,
        }
    }
}

/// Command-line overrides applied on top of the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub alpha_grid: Option<Vec<f64>>,
    pub tol: Option<f64>,
    pub samples: Option<usize>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<(), CliError> {
        if let Some(seed) = o.seed {
            self.seed = seed;
        }
        if let Some(grid) = &o.alpha_grid {
            self.alpha_grid = grid.clone();
        }
        if let Some(tol) = o.tol {
            self.tnorm_check.tol = tol;
            self.phi_check.tol = tol;
            self.space_check.tol = tol;
            self.d_alpha.tol = tol;
            self.seq_converge.tol = tol;
            self.op_bound.tol = tol;
            self.op_bound.independence.tol = tol;
            self.counterexample.tol = tol;
            self.op_norm.tol = tol;
            self.op_complete.tol = tol;
            self.op_complete.uniqueness.tol = tol;
        }
        if let Some(n) = o.samples {
            self.tnorm_check.samples = n;
            self.space_check.samples = n;
            self.op_bound.equivalence_samples = n;
            self.op_bound.independence.samples = n;
            self.op_bound.subspace.pair_samples = n;
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.alpha_grid.is_empty() || self.alpha_grid.iter().any(|&a| !(a > 0.0 && a < 1.0)) {
            return Err(CliError::Config("alpha_grid: levels must be a nonempty list inside (0, 1)".into()));
        }
        if self.alpha_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CliError::Config("alpha_grid: levels must be strictly increasing".into()));
        }
        Ok(())
    }
}

/// Parse `0.1,0.2,0.5` (commas or whitespace).
pub fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|e| format!("`{t}`: {e}")))
        .collect()
}
