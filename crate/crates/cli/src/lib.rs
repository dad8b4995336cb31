//! Named verification scenarios, each reproducing one result as a
//! deterministic JSON report with declared expectations.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use renorm_core::l1space::L1Error;
use renorm_core::numerics::{fmt_rational, parse_rational, pow2, rational_str, NumericsError, Precision, Rational};
use renorm_core::renormkit::{RenormError, Report, Verdict};

mod scenarios;

#[derive(Error, Debug)]
pub enum ScenarioError {
    #[error("unknown scenario {0:?}; run `renormlab list` for the catalog")]
    UnknownScenario(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("precision cap exhausted: {0}")]
    PrecisionExhausted(String),
    #[error(transparent)]
    Renorm(RenormError),
    #[error("cannot write report: {0}")]
    Io(#[from] std::io::Error),
}

impl From<RenormError> for ScenarioError {
    fn from(e: RenormError) -> Self {
        match e {
            RenormError::Numerics(NumericsError::PrecisionExhausted { bits }) => {
                ScenarioError::PrecisionExhausted(format!("{bits} bits"))
            }
            other => ScenarioError::Renorm(other),
        }
    }
}

impl From<L1Error> for ScenarioError {
    fn from(e: L1Error) -> Self {
        RenormError::from(e).into()
    }
}

impl From<NumericsError> for ScenarioError {
    fn from(e: NumericsError) -> Self {
        RenormError::from(e).into()
    }
}

impl ScenarioError {
    /// Process exit status: 2 for usage errors, 3 for precision exhaustion.
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::UnknownScenario(_) | ScenarioError::Config(_) | ScenarioError::Io(_) => 2,
            ScenarioError::PrecisionExhausted(_) => 3,
            ScenarioError::Renorm(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, ScenarioError>;

pub const MAX_DIM: usize = 64;
pub const MAX_WINDOW: i64 = 128;
pub const MAX_DEPTH: u32 = 16;
pub const MAX_TRIALS: usize = 100_000;

/// Knobs shared by all scenarios; `None` selects the scenario's default.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub trials: Option<usize>,
    #[serde(with = "rational_str")]
    pub precision: Rational,
    pub dim: Option<usize>,
    pub window: Option<i64>,
    pub depth: Option<u32>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            seed: 42,
            trials: None,
            precision: pow2(-64),
            dim: None,
            window: None,
            depth: None,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(ScenarioError::Config(m));
        if let Some(t) = self.trials {
            if t == 0 || t > MAX_TRIALS {
                return bad(format!("trials must lie in 1..={MAX_TRIALS}, got {t}"));
            }
        }
        if let Some(d) = self.dim {
            if d == 0 || d > MAX_DIM {
                return bad(format!("dim must lie in 1..={MAX_DIM}, got {d}"));
            }
        }
        if let Some(w) = self.window {
            if !(2..=MAX_WINDOW).contains(&w) {
                return bad(format!("window must lie in 2..={MAX_WINDOW}, got {w}"));
            }
        }
        if let Some(d) = self.depth {
            if d == 0 || d > MAX_DEPTH {
                return bad(format!("depth must lie in 1..={MAX_DEPTH}, got {d}"));
            }
        }
        self.start_precision().map(|_| ())
    }

    pub fn parse_precision(s: &str) -> Result<Rational> {
        parse_rational(s).map_err(|e| ScenarioError::Config(e.to_string()))
    }

    pub fn start_precision(&self) -> Result<Precision> {
        Precision::from_radius(&self.precision).map_err(|e| ScenarioError::Config(e.to_string()))
    }

    pub fn trials_or(&self, default: usize) -> usize {
        self.trials.unwrap_or(default)
    }

    pub fn dim_or(&self, default: usize) -> usize {
        self.dim.unwrap_or(default)
    }

    pub fn window_or(&self, default: i64) -> i64 {
        self.window.unwrap_or(default)
    }

    pub fn depth_or(&self, default: u32) -> u32 {
        self.depth.unwrap_or(default)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Expectation {
    pub name: String,
    pub expected: String,
    pub observed: String,
    pub met: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScenarioReport {
    pub scenario: String,
    pub result: String,
    pub config: ScenarioConfig,
    pub expectations_met: bool,
    pub expectations: Vec<Expectation>,
    pub reports: Vec<Report>,
    pub details: serde_json::Map<String, serde_json::Value>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl ScenarioReport {
    /// 0 when every expectation holds; 3 when an unmet expectation is due to
    /// an inconclusive comparison at the precision cap; 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.expectations_met {
            0
        } else if self
            .expectations
            .iter()
            .any(|e| !e.met && e.observed == Verdict::Inconclusive.to_string())
        {
            3
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).unwrap_or_default()
    }
}

/// Accumulates reports and expectations for one scenario.
pub(crate) struct Run {
    seed: u64,
    reports: Vec<Report>,
    expectations: Vec<Expectation>,
    details: serde_json::Map<String, serde_json::Value>,
    notes: Vec<String>,
}

impl Run {
    pub(crate) fn new(cfg: &ScenarioConfig) -> Self {
        Run {
            seed: cfg.seed,
            reports: Vec::new(),
            expectations: Vec::new(),
            details: serde_json::Map::new(),
            notes: Vec::new(),
        }
    }

    pub(crate) fn expect(&mut self, name: &str, expected: impl ToString, observed: impl ToString) {
        let (expected, observed) = (expected.to_string(), observed.to_string());
        self.expectations.push(Expectation {
            name: name.to_string(),
            met: expected == observed,
            expected,
            observed,
        });
    }

    pub(crate) fn expect_true(&mut self, name: &str, holds: bool) {
        self.expect(name, true, holds);
    }

    /// Records `report` and expects the given verdict.
    pub(crate) fn report(&mut self, name: &str, report: Report, expected: Verdict) {
        self.expect(name, expected, report.verdict);
        self.reports.push(report.with_seed(self.seed));
    }

    /// Records `report`, expecting PASS with every enclosure exact.
    pub(crate) fn report_exact(&mut self, name: &str, report: Report) {
        self.expect(&format!("{name}: max radius"), "0", &report.max_radius);
        self.report(name, report, Verdict::Pass);
    }

    pub(crate) fn detail(&mut self, key: &str, value: serde_json::Value) {
        self.details.insert(key.to_string(), value);
    }

    pub(crate) fn note(&mut self, note: &str) {
        self.notes.push(note.to_string());
    }

    fn finish(self, info: &ScenarioInfo, cfg: &ScenarioConfig) -> ScenarioReport {
        ScenarioReport {
            scenario: info.name.to_string(),
            result: info.result.to_string(),
            config: cfg.clone(),
            expectations_met: self.expectations.iter().all(|e| e.met),
            expectations: self.expectations,
            reports: self.reports,
            details: self.details,
            notes: self.notes,
        }
    }
}

pub(crate) fn rational_json(q: &Rational) -> serde_json::Value {
    serde_json::Value::String(fmt_rational(q))
}

pub struct ScenarioInfo {
    pub name: &'static str,
    pub result: &'static str,
    run: fn(&ScenarioConfig, &mut Run) -> Result<()>,
}

pub static CATALOG: &[ScenarioInfo] = &[
    ScenarioInfo {
        name: "f2-l1-obstruction",
        result: "L₁[0,1] carries a lattice-isometric F₂ action admitting no invariant strictly convex renorming",
        run: scenarios::f2_l1_obstruction,
    },
    ScenarioInfo {
        name: "l1-word-isometry",
        result: "Banach–Lamperti isometries of L₁[0,1]: every word in the F₂ generators preserves the L₁ norm",
        run: scenarios::l1_word_isometry,
    },
    ScenarioInfo {
        name: "fd-action-build",
        result: "free actions with a measurable fundamental domain, built from dyadic translates",
        run: scenarios::fd_action_build,
    },
    ScenarioInfo {
        name: "pn-convergence",
        result: "actions with a measurable fundamental domain: the equivariant operators Pₙ into ℓ₁(G × n) and their convergence",
        run: scenarios::pn_convergence,
    },
    ScenarioInfo {
        name: "find-np",
        result: "actions with a measurable fundamental domain: for each f some ι_p∘Pₙ keeps half of ‖f‖₁",
        run: scenarios::find_np,
    },
    ScenarioInfo {
        name: "c0-sorted-invariance",
        result: "c₀ has an Iso(c₀)-invariant strictly convex renorming (sorted weighted norm)",
        run: scenarios::c0_sorted_invariance,
    },
    ScenarioInfo {
        name: "c0-strict-convexity",
        result: "strict convexity of the sequence-space renormings; ℓ₁ is not strictly convex",
        run: scenarios::c0_strict_convexity,
    },
    ScenarioInfo {
        name: "c0sum-norm",
        result: "c₀-sums of Euclidean spaces have invariant strictly convex renormings",
        run: scenarios::c0sum_norm,
    },
    ScenarioInfo {
        name: "l1sum-norm",
        result: "ℓ₁-sums of Euclidean spaces have invariant strictly convex renormings (pushforward into the ℓ₂-sum)",
        run: scenarios::l1sum_norm,
    },
    ScenarioInfo {
        name: "c-renorm-audit",
        result: "audit of the renorming of c through x ↦ (x − lim x) ⊕ lim x: equivariance fails for sign-changing isometries",
        run: scenarios::c_renorm_audit,
    },
    ScenarioInfo {
        name: "subshift-identities",
        result: "clopen partition of the countable subshift X and the image identities of the shift and the swap",
        run: scenarios::subshift_identities,
    },
    ScenarioInfo {
        name: "subshift-obstruction",
        result: "C(2^ℕ) carries positive isometric F₂ actions admitting no invariant strictly convex renorming",
        run: scenarios::subshift_obstruction,
    },
    ScenarioInfo {
        name: "odometer-invariance",
        result: "minimal actions with an invariant measure: ‖·‖_∞ + ‖·‖_{L₂(μ)} on C(2^ℕ) for the binary odometer",
        run: scenarios::odometer_invariance,
    },
    ScenarioInfo {
        name: "epsilon-close-bounds",
        result: "an injective bounded map into a strictly convex space gives renormings ε-close to the original norm",
        run: scenarios::epsilon_close_bounds,
    },
    ScenarioInfo {
        name: "assembly-injectivity",
        result: "ℓ₂-assembly x ↦ (Tₙ(x)/2ⁿ) of norm-one maps is bounded and injective on witness families",
        run: scenarios::assembly_injectivity,
    },
];

pub fn find_scenario(name: &str) -> Result<&'static ScenarioInfo> {
    CATALOG
        .iter()
        .find(|s| s.name == name)
        .ok_or_else(|| ScenarioError::UnknownScenario(name.to_string()))
}

pub fn run_scenario(name: &str, cfg: &ScenarioConfig) -> Result<ScenarioReport> {
    let info = find_scenario(name)?;
    cfg.validate()?;
    let mut run = Run::new(cfg);
    (info.run)(cfg, &mut run)?;
    Ok(run.finish(info, cfg))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub all_met: bool,
    pub scenarios: Vec<ScenarioReport>,
}

/// Runs every scenario; reports come back in catalog order whatever the scheduling.
pub fn verify_all(cfg: &ScenarioConfig) -> Result<SuiteReport> {
    let scenarios = CATALOG
        .par_iter()
        .map(|s| run_scenario(s.name, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(SuiteReport {
        seed: cfg.seed,
        all_met: scenarios.iter().all(|s| s.expectations_met),
        scenarios,
    })
}

impl SuiteReport {
    pub fn exit_code(&self) -> i32 {
        self.scenarios.iter().map(ScenarioReport::exit_code).max().unwrap_or(0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).unwrap_or_default()
    }
}
