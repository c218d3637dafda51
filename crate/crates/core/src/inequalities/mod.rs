//! Bell-type expressions over correlator tables.
//!
//! Two inequalities are covered by one representation: an optional
//! absolute-value group of correlator terms, plus affine terms and a
//! constant, compared against a bound.
//!
//! ```text
//! value = |Σ c_k E(i_k, j_k)| + Σ d_k E(i_k, j_k) + offset      (violated ⇔ value − bound > 1e-9)
//! ```

mod optimize;

use std::collections::BTreeMap;

use crate::error::{Error, Result};

pub use optimize::{chsh_quantum_max, ChshOptimizerConfig, ChshOptimum, ChshSettings};

/// Margins above this are reported as violations.
pub const VIOLATION_TOLERANCE: f64 = 1e-9;

/// Slack allowed on stored correlator values.
pub const TABLE_TOLERANCE: f64 = 1e-12;

/// Correlators `E(i, j)` keyed by (Alice setting, Bob setting).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CorrelatorTable {
    values: BTreeMap<(usize, usize), f64>,
}

impl CorrelatorTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Fills every `(i, j)` with `i < settings_a`, `j < settings_b` from `f`.
    pub fn from_fn<F>(settings_a: usize, settings_b: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, usize) -> Result<f64>,
    {
        let mut table = Self::new();
        for i in 0..settings_a {
            for j in 0..settings_b {
                table.insert(i, j, f(i, j)?)?;
            }
        }
        Ok(table)
    }

    pub fn insert(&mut self, alice: usize, bob: usize, value: f64) -> Result<()> {
        check_correlator("correlator", value)?;
        self.values.insert((alice, bob), value);
        Ok(())
    }

    pub fn get(&self, alice: usize, bob: usize) -> Option<f64> {
        self.values.get(&(alice, bob)).copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.values.iter().map(|(k, v)| (*k, *v))
    }
}

/// One correlator term `coefficient · E(alice, bob)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub alice: usize,
    pub bob: usize,
    pub coefficient: f64,
}

impl Term {
    pub fn new(alice: usize, bob: usize, coefficient: f64) -> Self {
        Self {
            alice,
            bob,
            coefficient,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BellExpression {
    name: String,
    absolute: Vec<Term>,
    linear: Vec<Term>,
    offset: f64,
    bound: f64,
}

impl BellExpression {
    /// `absolute` terms are summed inside a single `|·|`.
    pub fn new(
        name: impl Into<String>,
        absolute: Vec<Term>,
        linear: Vec<Term>,
        offset: f64,
        bound: f64,
    ) -> Self {
        Self {
            name: name.into(),
            absolute,
            linear,
            offset,
            bound,
        }
    }

    /// `|E(0,0) + E(0,1) + E(1,0) − E(1,1)| ≤ 2`.
    pub fn chsh() -> Self {
        Self::new(
            "chsh",
            vec![
                Term::new(0, 0, 1.0),
                Term::new(0, 1, 1.0),
                Term::new(1, 0, 1.0),
                Term::new(1, 1, -1.0),
            ],
            Vec::new(),
            0.0,
            2.0,
        )
    }

    /// `|⟨AB⟩ − ⟨AC⟩| − 1 − ⟨BC⟩ ≤ 0` on the three-observable setup of
    /// [`Scenario::bell1964`](crate::lhv::Scenario::bell1964): Alice settings
    /// `(A, B)` are indices `(0, 1)`, Bob settings `(B, C)` are `(0, 1)`.
    pub fn bell1964() -> Self {
        Self::new(
            "bell1964",
            vec![Term::new(0, 0, 1.0), Term::new(0, 1, -1.0)],
            vec![Term::new(1, 1, -1.0)],
            -1.0,
            0.0,
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn terms(&self) -> impl Iterator<Item = &Term> {
        self.absolute.iter().chain(&self.linear)
    }

    /// Smallest `(settings_a, settings_b)` covering every index used.
    pub fn settings_needed(&self) -> (usize, usize) {
        self.terms().fold((0, 0), |(a, b), t| {
            (a.max(t.alice + 1), b.max(t.bob + 1))
        })
    }

    /// Evaluates with correlators supplied by `lookup`.
    pub fn value_with<F>(&self, mut lookup: F) -> Result<f64>
    where
        F: FnMut(usize, usize) -> Result<f64>,
    {
        let mut inside = 0.0;
        for t in &self.absolute {
            inside += t.coefficient * lookup(t.alice, t.bob)?;
        }
        let mut outside = 0.0;
        for t in &self.linear {
            outside += t.coefficient * lookup(t.alice, t.bob)?;
        }
        Ok(inside.abs() + outside + self.offset)
    }

    pub fn value(&self, table: &CorrelatorTable) -> Result<f64> {
        self.value_with(|i, j| table.get(i, j).ok_or(Error::MissingEntry(i, j)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ViolationReport {
    pub value: f64,
    pub bound: f64,
    /// `value − bound`; positive means the bound is exceeded.
    pub margin: f64,
    pub violated: bool,
}

impl ViolationReport {
    pub fn new(value: f64, bound: f64) -> Self {
        let margin = value - bound;
        Self {
            value,
            bound,
            margin,
            violated: margin > VIOLATION_TOLERANCE,
        }
    }
}

pub fn evaluate(expression: &BellExpression, table: &CorrelatorTable) -> Result<ViolationReport> {
    Ok(ViolationReport::new(
        expression.value(table)?,
        expression.bound(),
    ))
}

fn check_correlator(name: &'static str, value: f64) -> Result<()> {
    let limit = 1.0 + TABLE_TOLERANCE;
    if !value.is_finite() || value.abs() > limit {
        return Err(Error::OutOfRange {
            name,
            value,
            min: -1.0,
            max: 1.0,
        });
    }
    Ok(())
}

/// `(1 + ⟨BC⟩) − |⟨AB⟩ − ⟨AC⟩|`. Non-negative iff the three-observable
/// inequality holds.
pub fn bell1964_margin(e_ab: f64, e_ac: f64, e_bc: f64) -> Result<f64> {
    check_correlator("e_ab", e_ab)?;
    check_correlator("e_ac", e_ac)?;
    check_correlator("e_bc", e_bc)?;
    Ok((1.0 + e_bc) - (e_ab - e_ac).abs())
}

/// `|⟨AB⟩ + ⟨AB′⟩ + ⟨A′B⟩ − ⟨A′B′⟩|`.
pub fn chsh_value(e_ab: f64, e_ab2: f64, e_a2b: f64, e_a2b2: f64) -> Result<f64> {
    check_correlator("e_ab", e_ab)?;
    check_correlator("e_ab2", e_ab2)?;
    check_correlator("e_a2b", e_a2b)?;
    check_correlator("e_a2b2", e_a2b2)?;
    Ok((e_ab + e_ab2 + e_a2b - e_a2b2).abs())
}
