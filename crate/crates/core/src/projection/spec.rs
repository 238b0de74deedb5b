//! Candidate model specifications.

use serde::{Deserialize, Serialize};

/// The six candidate forms. Baseline has no monetary interaction; A–E add
/// one or more interaction columns between the policy change and the
/// interest-rate environment:
///
/// - A: policy × 1{quarterly rate change < 0}
/// - B: policy × 1{annual rate change < 0}
/// - C: policy × quarterly rate change
/// - D: policy × annual rate change
/// - E: policy × 1{Δi<0}, policy × Δi, policy × Δi × 1{Δi<0}
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModelForm {
    Baseline,
    A,
    B,
    C,
    D,
    E,
}

impl ModelForm {
    pub const CANDIDATES: [ModelForm; 5] =
        [ModelForm::A, ModelForm::B, ModelForm::C, ModelForm::D, ModelForm::E];

    pub fn label(&self) -> &'static str {
        match self {
            ModelForm::Baseline => "baseline",
            ModelForm::A => "A",
            ModelForm::B => "B",
            ModelForm::C => "C",
            ModelForm::D => "D",
            ModelForm::E => "E",
        }
    }

    pub fn parse(s: &str) -> Option<ModelForm> {
        match s.trim() {
            "baseline" | "Baseline" => Some(ModelForm::Baseline),
            "A" | "a" => Some(ModelForm::A),
            "B" | "b" => Some(ModelForm::B),
            "C" | "c" => Some(ModelForm::C),
            "D" | "d" => Some(ModelForm::D),
            "E" | "e" => Some(ModelForm::E),
            _ => None,
        }
    }

    /// Number of interaction columns the form appends to the baseline block.
    pub fn interaction_count(&self) -> usize {
        match self {
            ModelForm::Baseline => 0,
            ModelForm::E => 3,
            _ => 1,
        }
    }
}

impl std::fmt::Display for ModelForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Everything needed to lay out one candidate's per-horizon design matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub form: ModelForm,
    /// Outcome column (a transformed change).
    pub outcome: String,
    /// Policy column (transformed log change).
    pub policy: String,
    /// Ordered control columns, each entering at dates t, t-1, ...
    pub controls: Vec<String>,
    /// Number of dated control copies (2 = dates t and t-1).
    pub control_lags: usize,
    /// Extra policy lags beyond the contemporaneous term (1 = add t-1).
    pub policy_lags: usize,
    /// Additional contemporaneous-only controls (anticipation variables).
    pub extra_controls: Vec<String>,
    /// Country dummies when true, a single intercept otherwise.
    pub include_fixed_effects: bool,
}

impl ModelSpec {
    pub fn new(form: ModelForm, outcome: impl Into<String>, policy: impl Into<String>, controls: Vec<String>) -> Self {
        ModelSpec {
            form,
            outcome: outcome.into(),
            policy: policy.into(),
            controls,
            control_lags: 2,
            policy_lags: 1,
            extra_controls: Vec::new(),
            include_fixed_effects: true,
        }
    }

    pub fn with_form(&self, form: ModelForm) -> Self {
        let mut out = self.clone();
        out.form = form;
        out
    }
}
