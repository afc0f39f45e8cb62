use serde::{Deserialize, Serialize};

use crate::geometry::{IntervalSet, Rational};
use crate::limits::Limits;
use crate::maps::Word;
use crate::markov::McConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Subject {
    Map,
    Chain,
    Semigroup,
}

/// A finite-horizon finding. The absence of a witness is never read as a
/// proof of non-recurrence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Certificate {
    Certified {
        time: usize,
        #[serde(skip_serializing_if = "Option::is_none")]
        word: Option<Word>,
    },
    NoneWithinHorizon,
}

impl Certificate {
    pub fn at(time: usize) -> Self {
        Certificate::Certified { time, word: None }
    }

    pub fn is_certified(&self) -> bool {
        matches!(self, Certificate::Certified { .. })
    }

    pub fn time(&self) -> Option<usize> {
        match self {
            Certificate::Certified { time, .. } => Some(*time),
            Certificate::NoneWithinHorizon => None,
        }
    }

    pub fn word(&self) -> Option<&Word> {
        match self {
            Certificate::Certified { word, .. } => word.as_ref(),
            Certificate::NoneWithinHorizon => None,
        }
    }
}

/// Window proxy for a liminf: the value over `[window.0, window.1]` compared
/// against `threshold`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniformEstimate {
    pub window: (usize, usize),
    pub value: Rational,
    pub threshold: Rational,
    pub certified: bool,
}

impl UniformEstimate {
    pub(crate) fn new(window: (usize, usize), value: Rational, threshold: Rational) -> Self {
        let certified = value.is_positive() && value >= threshold;
        UniformEstimate { window, value, threshold, certified }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct McSummary {
    pub seed: u64,
    pub samples: usize,
    pub returned: usize,
    /// Trials stopped by the rational bit cap before returning.
    pub truncated: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecurrenceVerdict {
    pub subject: Subject,
    pub x: Rational,
    pub eps: Rational,
    pub horizon: usize,
    pub ball: IntervalSet,
    pub recurrent: Certificate,
    pub weak: Certificate,
    /// Return counts in the window for maps, the minimum of `Q^n(x, ball)`
    /// for chains and of `κ_n` for semigroups.
    pub uniform_estimate: Option<UniformEstimate>,
    pub weak_uniform_estimate: Option<UniformEstimate>,
    /// Times `n ≤ N` with a return (maps) or a positive return mass (chains).
    pub return_times: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc: Option<McSummary>,
}

impl RecurrenceVerdict {
    pub fn uniform_certified(&self) -> bool {
        self.uniform_estimate.as_ref().is_some_and(|u| u.certified)
    }

    /// The inclusion chain uniform ⇒ recurrent ⇒ weak, plus sign checks.
    pub fn check_invariants(&self) -> Result<(), String> {
        if self.uniform_certified() && !self.recurrent.is_certified() {
            return Err("uniform without recurrent".into());
        }
        if let Some(u) = &self.uniform_estimate {
            if u.value.is_positive() && !self.recurrent.is_certified() {
                return Err("positive uniform value without a return".into());
            }
        }
        if self.recurrent.is_certified() && !self.weak.is_certified() {
            return Err("recurrent without weak".into());
        }
        if let (Some(r), Some(w)) = (self.recurrent.time(), self.weak.time()) {
            if w > r {
                return Err(format!("weak time {w} after recurrent time {r}"));
            }
        }
        if let Some(w) = &self.weak_uniform_estimate {
            if w.value.is_negative() {
                return Err("negative weak-uniform value".into());
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Mc(McConfig),
}

/// Parameters shared by all classifiers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifyConfig {
    pub eps: Rational,
    pub horizon: usize,
    /// Map threshold: returns needed inside the window.
    pub r_min: usize,
    /// Sample points for the weak-uniform estimate; 0 skips it.
    pub grid_points: usize,
    /// Chain threshold on the window minimum.
    pub threshold: Rational,
    pub mode: Mode,
    pub limits: Limits,
}

pub const DEFAULT_R_MIN: usize = 2;
pub const DEFAULT_MAP_GRID: usize = 128;

impl ClassifyConfig {
    pub fn new(eps: Rational, horizon: usize) -> Self {
        ClassifyConfig {
            eps,
            horizon,
            r_min: DEFAULT_R_MIN,
            grid_points: DEFAULT_MAP_GRID,
            threshold: Rational::new(1, 1000),
            mode: Mode::Exact,
            limits: Limits::default(),
        }
    }

    pub fn with_grid(mut self, grid_points: usize) -> Self {
        self.grid_points = grid_points;
        self
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_threshold(mut self, threshold: Rational) -> Self {
        self.threshold = threshold;
        self
    }

    /// Threshold derived from the stationary mass of the ball.
    pub fn with_stationary_mass(self, mass: &Rational) -> Self {
        self.with_threshold(mass / &Rational::from_integer(4))
    }

    pub fn with_limits(mut self, limits: Limits) -> Self {
        self.limits = limits;
        self
    }

    /// `[⌊N/2⌋, N]`.
    pub fn window(&self) -> (usize, usize) {
        (self.horizon / 2, self.horizon)
    }
}
