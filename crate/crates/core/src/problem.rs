//! Problem data for the dual-phase-lag equation on the half-line
//!
//! ```text
//! T_t + a T_tt = K (T_xx + b T_txx) + f,   x > 0, 0 < t <= D
//! T(x, 0) = xi(x),  T_t(x, 0) = eta(x),  T(0, t) = phi(t),  T -> 0 as x -> inf
//! ```
//!
//! and its homogenized form on `[0, x_r]`, where the shift `T - phi(t)` moves the
//! left Dirichlet datum into the source and the boundary forcing terms `Q`, `R`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::pade::PadeAbc;

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type FieldFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Names accepted by [`builtin_problem`].
pub const BUILTIN_PROBLEMS: [&str; 4] = ["example1", "example2", "zero", "random"];

#[derive(Clone)]
pub struct DplProblem {
    pub name: String,
    pub a: f64,
    pub b: f64,
    pub k: f64,
    pub x_r: f64,
    pub d: f64,
    pub source: FieldFn,
    pub xi: ScalarFn,
    pub eta: ScalarFn,
    pub phi: ScalarFn,
    pub phi_t: ScalarFn,
    pub phi_tt: ScalarFn,
    pub exact: Option<FieldFn>,
    /// Points where the data is not smooth; a grid must place a node on each.
    pub kinks: Vec<f64>,
}

impl fmt::Debug for DplProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DplProblem")
            .field("name", &self.name)
            .field("a", &self.a)
            .field("b", &self.b)
            .field("k", &self.k)
            .field("x_r", &self.x_r)
            .field("d", &self.d)
            .field("has_exact", &self.exact.is_some())
            .field("kinks", &self.kinks)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ValidationIssue {
    NonPositive { field: &'static str, value: f64 },
    Compatibility { condition: &'static str, magnitude: f64 },
    Support { condition: String, magnitude: f64 },
}

impl ValidationIssue {
    /// Coefficient errors cannot be downgraded to warnings.
    pub fn is_fatal(&self) -> bool {
        matches!(self, ValidationIssue::NonPositive { .. })
    }
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationIssue::NonPositive { field, value } => {
                write!(f, "`{field}` must be positive, got {value}")
            }
            ValidationIssue::Compatibility { condition, magnitude } => {
                write!(f, "compatibility {condition} violated by {magnitude:e}")
            }
            ValidationIssue::Support { condition, magnitude } => {
                write!(f, "support condition {condition} violated: magnitude {magnitude:e}")
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CheckOptions {
    pub comp_tol: f64,
    pub supp_tol: f64,
    /// Turn compatibility and support violations into errors.
    pub strict: bool,
    /// Number of time samples used for the source support check.
    pub support_samples: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            comp_tol: 1e-10,
            supp_tol: 1e-12,
            strict: false,
            support_samples: 17,
        }
    }
}

impl DplProblem {
    pub fn with_x_r(mut self, x_r: f64) -> Self {
        self.x_r = x_r;
        self
    }

    pub fn with_final_time(mut self, d: f64) -> Self {
        self.d = d;
        self
    }

    pub fn with_zero_source(mut self) -> Self {
        self.source = Arc::new(|_, _| 0.0);
        self.exact = None;
        self
    }

    /// Every violated invariant, fatal or not.
    pub fn validate(&self, opts: &CheckOptions) -> Vec<ValidationIssue> {
        let mut issues = Vec::new();
        for (field, value) in [
            ("a", self.a),
            ("b", self.b),
            ("K", self.k),
            ("x_r", self.x_r),
            ("D", self.d),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                issues.push(ValidationIssue::NonPositive { field, value });
            }
        }
        if !issues.is_empty() {
            return issues;
        }

        let gap = ((self.xi)(0.0) - (self.phi)(0.0)).abs();
        if gap > opts.comp_tol {
            issues.push(ValidationIssue::Compatibility {
                condition: "xi(0) = phi(0)",
                magnitude: gap,
            });
        }
        let gap = ((self.eta)(0.0) - (self.phi_t)(0.0)).abs();
        if gap > opts.comp_tol {
            issues.push(ValidationIssue::Compatibility {
                condition: "eta(0) = phi_t(0)",
                magnitude: gap,
            });
        }

        let x_r = self.x_r;
        for (label, value) in [("xi(x_r)", (self.xi)(x_r)), ("eta(x_r)", (self.eta)(x_r))] {
            if value.abs() > opts.supp_tol {
                issues.push(ValidationIssue::Support {
                    condition: format!("{label} = 0"),
                    magnitude: value.abs(),
                });
            }
        }
        let samples = opts.support_samples.max(2);
        let worst = (0..samples)
            .map(|j| {
                let t = self.d * j as f64 / (samples - 1) as f64;
                ((self.source)(x_r, t).abs(), t)
            })
            .fold((0.0, 0.0), |acc, v| if v.0 > acc.0 { v } else { acc });
        if worst.0 > opts.supp_tol {
            issues.push(ValidationIssue::Support {
                condition: format!("f(x_r, t) = 0 (worst at t = {})", worst.1),
                magnitude: worst.0,
            });
        }
        issues
    }
}

/// The reduced problem on `[0, x_r]` with a homogeneous left boundary.
#[derive(Clone)]
pub struct HomogenizedProblem {
    pub a: f64,
    pub b: f64,
    pub k: f64,
    pub x_r: f64,
    pub d: f64,
    pub kinks: Vec<f64>,
    /// Compatibility/support violations tolerated in non-strict mode.
    pub warnings: Vec<ValidationIssue>,
    source: FieldFn,
    xi: ScalarFn,
    eta: ScalarFn,
    phi: ScalarFn,
    phi_t: ScalarFn,
    phi_tt: ScalarFn,
    phi0: f64,
    phi_t0: f64,
    q_gain: f64,
}

impl fmt::Debug for HomogenizedProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HomogenizedProblem")
            .field("a", &self.a)
            .field("b", &self.b)
            .field("k", &self.k)
            .field("x_r", &self.x_r)
            .field("d", &self.d)
            .field("q_gain", &self.q_gain)
            .field("warnings", &self.warnings)
            .finish_non_exhaustive()
    }
}

impl HomogenizedProblem {
    /// `F = f - phi_t - a phi_tt`.
    pub fn source(&self, x: f64, t: f64) -> f64 {
        (self.source)(x, t) - (self.phi_t)(t) - self.a * (self.phi_tt)(t)
    }

    pub fn xi1(&self, x: f64) -> f64 {
        (self.xi)(x) - self.phi0
    }

    pub fn eta1(&self, x: f64) -> f64 {
        (self.eta)(x) - self.phi_t0
    }

    /// Boundary forcing of the artificial boundary row, `-sqrt(z0/K) S1 phi_t`.
    /// Identically zero for a problem prepared for the truncated Dirichlet closure.
    pub fn q(&self, t: f64) -> f64 {
        self.q_gain * (self.phi_t)(t)
    }

    /// Forcing of the auxiliary boundary equations, `phi_t`.
    pub fn r(&self, t: f64) -> f64 {
        (self.phi_t)(t)
    }

    pub fn phi(&self, t: f64) -> f64 {
        (self.phi)(t)
    }
}

/// Shift the problem by `phi(t)` and attach the boundary forcing for `pade`.
pub fn homogenize(p: &DplProblem, pade: &PadeAbc, opts: &CheckOptions) -> Result<HomogenizedProblem> {
    let mut hp = homogenize_truncated(p, opts)?;
    hp.q_gain = -(pade.z0() / p.k).sqrt() * pade.sum_ab();
    Ok(hp)
}

/// Homogenization for runs closed by `T(x_r, t) = 0` instead of the
/// artificial boundary; `Q` vanishes.
pub fn homogenize_truncated(p: &DplProblem, opts: &CheckOptions) -> Result<HomogenizedProblem> {
    let issues = p.validate(opts);
    if issues.iter().any(ValidationIssue::is_fatal) || (opts.strict && !issues.is_empty()) {
        return Err(Error::Validation(issues));
    }
    Ok(HomogenizedProblem {
        a: p.a,
        b: p.b,
        k: p.k,
        x_r: p.x_r,
        d: p.d,
        kinks: p.kinks.clone(),
        warnings: issues,
        source: p.source.clone(),
        xi: p.xi.clone(),
        eta: p.eta.clone(),
        phi: p.phi.clone(),
        phi_t: p.phi_t.clone(),
        phi_tt: p.phi_tt.clone(),
        phi0: (p.phi)(0.0),
        phi_t0: (p.phi_t)(0.0),
        q_gain: 0.0,
    })
}

/// Undo the homogenization shift at time `t`.
pub fn recover(reduced: &[f64], phi: impl Fn(f64) -> f64, t: f64) -> Vec<f64> {
    let shift = phi(t);
    reduced.iter().map(|v| v + shift).collect()
}

/// Overrides applied on top of a builtin problem's defaults.
#[derive(Debug, Clone, Copy, Default)]
pub struct ProblemParams {
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub k: Option<f64>,
    pub x_r: Option<f64>,
    pub d: Option<f64>,
    pub zero_source: bool,
    /// Only used by `random`.
    pub seed: u64,
}

pub fn builtin_problem(name: &str, params: &ProblemParams) -> Result<DplProblem> {
    let mut p = match name {
        "example1" => example1(
            params.a.unwrap_or(1.0),
            params.b.unwrap_or(0.2),
            params.k.unwrap_or(1.0),
        ),
        "example2" => example2(),
        "zero" => zero_problem(),
        "random" => random_smooth_problem(params.seed),
        _ => {
            return Err(Error::UnknownProblem {
                name: name.to_string(),
                available: BUILTIN_PROBLEMS.to_vec(),
            })
        }
    };
    if name != "example1" {
        p.a = params.a.unwrap_or(p.a);
        p.b = params.b.unwrap_or(p.b);
        p.k = params.k.unwrap_or(p.k);
    }
    p.x_r = params.x_r.unwrap_or(p.x_r);
    p.d = params.d.unwrap_or(p.d);
    if params.zero_source {
        p = p.with_zero_source();
    }
    Ok(p)
}

/// Manufactured problem with exact solution `3 exp(-x^2 - 2t)` on `[0, 7]`.
pub fn example1(a: f64, b: f64, k: f64) -> DplProblem {
    DplProblem {
        name: "example1".into(),
        a,
        b,
        k,
        x_r: 7.0,
        d: 1.0,
        source: Arc::new(move |x, t| {
            6.0 * (-1.0 + 2.0 * a - k * (2.0 * x * x - 1.0) * (1.0 - 2.0 * b)) * (-x * x - 2.0 * t).exp()
        }),
        xi: Arc::new(|x| 3.0 * (-x * x).exp()),
        eta: Arc::new(|x| -6.0 * (-x * x).exp()),
        phi: Arc::new(|t| 3.0 * (-2.0 * t).exp()),
        phi_t: Arc::new(|t| -6.0 * (-2.0 * t).exp()),
        phi_tt: Arc::new(|t| 12.0 * (-2.0 * t).exp()),
        exact: Some(Arc::new(|x, t| 3.0 * (-x * x - 2.0 * t).exp())),
        kinks: Vec::new(),
    }
}

/// Localized, linearly growing heat source with zero initial and boundary data.
/// `x_r` defaults to 1, the artificial-boundary setting.
pub fn example2() -> DplProblem {
    DplProblem {
        name: "example2".into(),
        a: 0.01,
        b: 0.1,
        k: 1.0,
        x_r: 1.0,
        d: 20.0,
        source: Arc::new(|x, t| 100.0 * (1.0 + t) * (-60.0 * (x - 0.5).abs()).exp()),
        xi: zero_fn(),
        eta: zero_fn(),
        phi: zero_fn(),
        phi_t: zero_fn(),
        phi_tt: zero_fn(),
        exact: None,
        kinks: vec![0.5],
    }
}

pub fn zero_problem() -> DplProblem {
    DplProblem {
        name: "zero".into(),
        a: 1.0,
        b: 1.0,
        k: 1.0,
        x_r: 1.0,
        d: 1.0,
        source: Arc::new(|_, _| 0.0),
        xi: zero_fn(),
        eta: zero_fn(),
        phi: zero_fn(),
        phi_t: zero_fn(),
        phi_tt: zero_fn(),
        exact: Some(Arc::new(|_, _| 0.0)),
        kinks: Vec::new(),
    }
}

/// Smooth data drawn deterministically from `seed`: a few sine modes in space,
/// trigonometric time dependence, and a boundary datum compatible with the
/// initial data. The supports are not confined to `[0, x_r]`, so the support
/// checks report warnings for these problems.
pub fn random_smooth_problem(seed: u64) -> DplProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = rng.gen_range(0.05..3.0);
    let b = rng.gen_range(0.05..3.0);
    let k = rng.gen_range(0.5..2.0);
    let x_r = rng.gen_range(1.0..4.0);
    let d = rng.gen_range(0.5..2.0);

    let (p0, p1, p2): (f64, f64, f64) = (
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
    );
    let (w1, w2): (f64, f64) = (rng.gen_range(0.5..4.0), rng.gen_range(0.5..4.0));
    let phi: ScalarFn = Arc::new(move |t| p0 + p1 * (w1 * t).sin() + p2 * (w2 * t).cos());
    let phi_t: ScalarFn = Arc::new(move |t| p1 * w1 * (w1 * t).cos() - p2 * w2 * (w2 * t).sin());
    let phi_tt: ScalarFn = Arc::new(move |t| -p1 * w1 * w1 * (w1 * t).sin() - p2 * w2 * w2 * (w2 * t).cos());

    let modes = |rng: &mut ChaCha8Rng| -> [f64; 3] { [0; 3].map(|_| rng.gen_range(-1.0..1.0)) };
    let xi_c = modes(&mut rng);
    let eta_c = modes(&mut rng);
    let f_c = modes(&mut rng);
    let f_phase = modes(&mut rng);
    let f_freq = [0; 3].map(|_| rng.gen_range(0.0..3.0));

    let phi_0 = phi(0.0);
    let phi_t0 = phi_t(0.0);
    let sine_sum = move |c: [f64; 3], x: f64| -> f64 {
        c.iter()
            .enumerate()
            .map(|(j, cj)| cj * ((j + 1) as f64 * PI * x / (2.0 * x_r)).sin())
            .sum()
    };
    DplProblem {
        name: format!("random(seed={seed})"),
        a,
        b,
        k,
        x_r,
        d,
        source: Arc::new(move |x, t| {
            (0..3)
                .map(|j| f_c[j] * ((j + 1) as f64 * PI * x / x_r + f_phase[j]).sin() * (f_freq[j] * t).cos())
                .sum()
        }),
        xi: Arc::new(move |x| phi_0 + sine_sum(xi_c, x)),
        eta: Arc::new(move |x| phi_t0 + sine_sum(eta_c, x)),
        phi,
        phi_t,
        phi_tt,
        exact: None,
        kinks: Vec::new(),
    }
}

fn zero_fn() -> ScalarFn {
    Arc::new(|_| 0.0)
}
