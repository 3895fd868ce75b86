//! JSON run configuration, its validation, and resolution into solver inputs.

use std::fmt;
use std::path::PathBuf;

use dpl_core::verification::{AbcSettings, RefinementMode};
use dpl_core::{builtin_problem, default_z0, DplProblem, Grid, PadeAbc, ProblemParams, DEFAULT_ORDER};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, FieldError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryKind {
    Abc,
    Dirichlet,
}

impl std::str::FromStr for BoundaryKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "abc" => Ok(Self::Abc),
            "dirichlet" => Ok(Self::Dirichlet),
            _ => Err(format!("expected `abc` or `dirichlet`, got `{s}`")),
        }
    }
}

/// Ladder refinement: `ht` refines both steps together, `t` the time step,
/// `s` the space step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Refinement {
    Ht,
    T,
    S,
}

impl Refinement {
    pub fn mode(self) -> RefinementMode {
        match self {
            Refinement::Ht => RefinementMode::Coupled,
            Refinement::T => RefinementMode::Temporal,
            Refinement::S => RefinementMode::Spatial,
        }
    }
}

impl std::str::FromStr for Refinement {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "ht" => Ok(Self::Ht),
            "t" => Ok(Self::T),
            "s" => Ok(Self::S),
            _ => Err(format!("expected `ht`, `t` or `s`, got `{s}`")),
        }
    }
}

/// `z0` is either a number or the string `"auto"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Z0Spec {
    Value(f64),
    Name(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamSet {
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: Option<String>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    #[serde(rename = "K", alias = "k")]
    pub k: Option<f64>,
    pub x_r: Option<f64>,
    #[serde(rename = "D", alias = "d")]
    pub d: Option<f64>,
    #[serde(rename = "M_s", alias = "ms")]
    pub ms: Option<usize>,
    #[serde(rename = "M_t", alias = "mt")]
    pub mt: Option<usize>,
    pub h: Option<f64>,
    pub dt: Option<f64>,
    #[serde(rename = "N", alias = "n")]
    pub n: Option<usize>,
    pub z0: Option<Z0Spec>,
    pub mode: Option<BoundaryKind>,
    pub snapshot_times: Option<Vec<f64>>,
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub strict: bool,
    pub seed: Option<u64>,
    #[serde(default)]
    pub zero_source: bool,
    /// `(a, b)` pairs swept by `convergence`.
    pub parameter_sets: Option<Vec<ParamSet>>,
    pub refinement: Option<Refinement>,
    pub levels: Option<usize>,
    pub start_step: Option<f64>,
    /// Right end of the Dirichlet reference run in `compare`.
    pub reference_x_r: Option<f64>,
    pub tolerance: Option<f64>,
}

/// Flags given on the command line; they win over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub strict: bool,
    pub mode: Option<String>,
    pub levels: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Solve,
    Convergence,
    Compare,
    Audit,
}

impl Command {
    pub fn default_problem(self) -> &'static str {
        match self {
            Command::Compare => "example2",
            _ => "example1",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::Solve => "solve",
            Command::Convergence => "convergence",
            Command::Compare => "compare",
            Command::Audit => "audit",
        })
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::field("config", e.to_string()))
    }

    pub fn apply(&mut self, cmd: Command, o: &Overrides) -> Result<(), CliError> {
        if let Some(out) = &o.out {
            self.output = Some(out.clone());
        }
        self.strict |= o.strict;
        if o.seed.is_some() {
            self.seed = o.seed;
        }
        if let Some(levels) = o.levels {
            if cmd != Command::Convergence {
                return Err(CliError::field(
                    "--levels",
                    format!("only applies to `convergence`, not `{cmd}`"),
                ));
            }
            self.levels = Some(levels);
        }
        if let Some(mode) = &o.mode {
            match cmd {
                Command::Convergence => self.refinement = Some(mode.parse().map_err(|e| CliError::field("--mode", e))?),
                Command::Solve | Command::Audit => {
                    self.mode = Some(mode.parse().map_err(|e| CliError::field("--mode", e))?)
                }
                Command::Compare => {
                    return Err(CliError::field("--mode", "`compare` always runs both closures"));
                }
            }
        }
        Ok(())
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    pub fn boundary(&self) -> BoundaryKind {
        self.mode.unwrap_or(BoundaryKind::Abc)
    }

    /// Schema rules that do not depend on the chosen problem.
    pub fn check(&self, cmd: Command) -> Result<(), CliError> {
        let mut errs = Vec::new();
        let mut positive = |field: &str, v: Option<f64>| {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    errs.push(FieldError::new(field, format!("must be positive and finite, got {v}")));
                }
            }
        };
        positive("a", self.a);
        positive("b", self.b);
        positive("K", self.k);
        positive("x_r", self.x_r);
        positive("D", self.d);
        positive("h", self.h);
        positive("dt", self.dt);
        positive("start_step", self.start_step);
        positive("reference_x_r", self.reference_x_r);
        positive("tolerance", self.tolerance);
        if let Some(Z0Spec::Value(z)) = self.z0 {
            positive("z0", Some(z));
        }

        let by_count = self.ms.is_some() || self.mt.is_some();
        let by_step = self.h.is_some() || self.dt.is_some();
        if by_count && by_step {
            errs.push(FieldError::new("grid", "give either (M_s, M_t) or (h, dt), not both"));
        } else if by_count && (self.ms.is_none() || self.mt.is_none()) {
            errs.push(FieldError::new("grid", "M_s and M_t must be given together"));
        } else if by_step && (self.h.is_none() || self.dt.is_none()) {
            errs.push(FieldError::new("grid", "h and dt must be given together"));
        }
        if cmd == Command::Convergence && (by_count || by_step) {
            errs.push(FieldError::new(
                "grid",
                "`convergence` builds its own grids; use start_step and levels",
            ));
        }

        if self.boundary() == BoundaryKind::Dirichlet {
            if self.n.is_some() {
                errs.push(FieldError::new("N", "not allowed with mode = dirichlet"));
            }
            if self.z0.is_some() {
                errs.push(FieldError::new("z0", "not allowed with mode = dirichlet"));
            }
            if matches!(cmd, Command::Audit) {
                errs.push(FieldError::new(
                    "mode",
                    "`audit` checks the artificial boundary scheme; use mode = abc",
                ));
            }
        }
        if self.mode.is_some() && matches!(cmd, Command::Compare | Command::Convergence) {
            errs.push(FieldError::new(
                "mode",
                format!("`{cmd}` does not take a boundary mode"),
            ));
        }
        if self.n == Some(0) {
            errs.push(FieldError::new("N", "Padé order must be at least 1"));
        }
        if let Some(Z0Spec::Name(name)) = &self.z0 {
            if name != "auto" {
                errs.push(FieldError::new(
                    "z0",
                    format!("expected a number or \"auto\", got \"{name}\""),
                ));
            }
        }
        if self.levels == Some(0) {
            errs.push(FieldError::new("levels", "need at least one level"));
        }
        if let Some(times) = &self.snapshot_times {
            if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
                errs.push(FieldError::new(
                    "snapshot_times",
                    "times must be finite and non-negative",
                ));
            }
        }
        if let Some(sets) = &self.parameter_sets {
            if cmd != Command::Convergence {
                errs.push(FieldError::new("parameter_sets", "only used by `convergence`"));
            }
            if self.a.is_some() || self.b.is_some() {
                errs.push(FieldError::new("parameter_sets", "give either parameter_sets or a/b"));
            }
            if sets.is_empty() {
                errs.push(FieldError::new("parameter_sets", "must not be empty"));
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(CliError::Validation(errs))
        }
    }

    pub fn problem_name(&self, cmd: Command) -> String {
        self.problem
            .clone()
            .unwrap_or_else(|| cmd.default_problem().to_string())
    }

    pub fn build_problem(&self, cmd: Command) -> Result<DplProblem, CliError> {
        let params = ProblemParams {
            a: self.a,
            b: self.b,
            k: self.k,
            x_r: self.x_r,
            d: self.d,
            zero_source: self.zero_source,
            seed: self.seed.unwrap_or(0),
        };
        Ok(builtin_problem(&self.problem_name(cmd), &params)?)
    }

    /// Grid on the problem's domain, or the steps in `fallback` when none is
    /// configured.
    pub fn build_grid(&self, p: &DplProblem, fallback: Option<(f64, f64)>) -> Result<Grid, CliError> {
        let grid = match (self.ms, self.mt, self.h, self.dt, fallback) {
            (Some(ms), Some(mt), _, _, _) => Grid::new(p.x_r, p.d, ms, mt),
            (_, _, Some(h), Some(dt), _) | (_, _, _, _, Some((h, dt))) => Grid::from_steps(p.x_r, p.d, h, dt),
            _ => return Err(CliError::field("grid", "give either (M_s, M_t) or (h, dt)")),
        };
        Ok(grid?)
    }

    pub fn abc_settings(&self) -> AbcSettings {
        AbcSettings {
            order: self.n.unwrap_or(DEFAULT_ORDER),
            z0: match self.z0 {
                Some(Z0Spec::Value(z)) => Some(z),
                _ => None,
            },
        }
    }

    pub fn build_pade(&self, p: &DplProblem) -> Result<PadeAbc, CliError> {
        Ok(self.abc_settings().build(p.a, p.b)?)
    }

    /// Expansion point that `build_pade` would use.
    pub fn resolved_z0(&self, a: f64, b: f64) -> Result<f64, CliError> {
        Ok(match self.z0 {
            Some(Z0Spec::Value(z)) => z,
            _ => default_z0(a, b)?,
        })
    }
}
