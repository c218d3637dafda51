//! Local hidden variable models.
//!
//! A hidden variable λ fixes every outcome of every local setting, so at
//! fixed λ a model is a [`DeterministicStrategy`]. The distribution ρ(λ) is
//! a finite [`LhvMixture`] of strategies. Every Bell expression handled here
//! is a convex function of the correlators, so its maximum over all
//! mixtures is reached at a single strategy and [`classical_bound`] only
//! needs to enumerate those.
//!
//! Canonical strategy order: read the settings as bits, Alice's setting 0
//! first and most significant, Bob's after Alice's. A bit is 0 for outcome
//! +1 and 1 for outcome −1. Strategies are listed by increasing binary
//! value, starting with all outcomes +1.

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;

use crate::error::{Error, Result};
use crate::inequalities::{BellExpression, CorrelatorTable};
use crate::quantum::UnitVector3;

/// Largest `settings_a + settings_b` accepted by [`enumerate_strategies`].
pub const MAX_ENUMERATED_SETTINGS: usize = 20;

pub const WEIGHT_TOLERANCE: f64 = 1e-12;

/// Who can measure what. `shared` lists `(alice, bob)` setting pairs that
/// are the same observable on both sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    settings_a: usize,
    settings_b: usize,
    shared: Vec<(usize, usize)>,
}

impl Scenario {
    pub fn new(settings_a: usize, settings_b: usize, shared: Vec<(usize, usize)>) -> Result<Self> {
        if settings_a == 0 || settings_b == 0 {
            return Err(Error::InvalidScenario(
                "each party needs at least one setting".into(),
            ));
        }
        for (k, &(i, j)) in shared.iter().enumerate() {
            if i >= settings_a || j >= settings_b {
                return Err(Error::InvalidScenario(format!(
                    "shared pair ({i}, {j}) out of range"
                )));
            }
            if shared[..k].contains(&(i, j)) {
                return Err(Error::InvalidScenario(format!(
                    "duplicate shared pair ({i}, {j})"
                )));
            }
        }
        Ok(Self {
            settings_a,
            settings_b,
            shared,
        })
    }

    /// Two settings per side, nothing shared.
    pub fn chsh() -> Self {
        Self {
            settings_a: 2,
            settings_b: 2,
            shared: Vec::new(),
        }
    }

    /// Alice measures A or B (indices 0, 1); Bob measures B or C (indices 0, 1).
    /// B is shared: Alice setting 1 and Bob setting 0.
    pub fn bell1964() -> Self {
        Self {
            settings_a: 2,
            settings_b: 2,
            shared: vec![(1, 0)],
        }
    }

    pub fn settings_a(&self) -> usize {
        self.settings_a
    }

    pub fn settings_b(&self) -> usize {
        self.settings_b
    }

    pub fn shared(&self) -> &[(usize, usize)] {
        &self.shared
    }

    pub fn total_settings(&self) -> usize {
        self.settings_a + self.settings_b
    }
}

/// One ±1 outcome per local setting for each party.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DeterministicStrategy {
    alice: Vec<i8>,
    bob: Vec<i8>,
}

impl DeterministicStrategy {
    pub fn new(alice: Vec<i8>, bob: Vec<i8>) -> Result<Self> {
        if alice.is_empty() || bob.is_empty() {
            return Err(Error::InvalidStrategy("empty outcome list".into()));
        }
        if let Some(bad) = alice.iter().chain(&bob).find(|&&o| o != 1 && o != -1) {
            return Err(Error::InvalidStrategy(format!(
                "outcome {bad} is not +1 or -1"
            )));
        }
        Ok(Self { alice, bob })
    }

    /// Strategy at position `index` of the canonical order for the given sizes.
    pub fn from_index(index: u64, settings_a: usize, settings_b: usize) -> Self {
        let total = settings_a + settings_b;
        let outcome = |pos: usize| -> i8 {
            if (index >> (total - 1 - pos)) & 1 == 1 {
                -1
            } else {
                1
            }
        };
        Self {
            alice: (0..settings_a).map(outcome).collect(),
            bob: (settings_a..total).map(outcome).collect(),
        }
    }

    /// Position in the canonical order.
    pub fn index(&self) -> u64 {
        self.alice
            .iter()
            .chain(&self.bob)
            .fold(0u64, |acc, &o| (acc << 1) | u64::from(o < 0))
    }

    pub fn alice(&self) -> &[i8] {
        &self.alice
    }

    pub fn bob(&self) -> &[i8] {
        &self.bob
    }

    /// `a_i(λ) · b_j(λ)`.
    pub fn correlator(&self, alice: usize, bob: usize) -> Result<f64> {
        let a = self.alice.get(alice).ok_or(Error::IndexOutOfRange {
            index: alice,
            count: self.alice.len(),
        })?;
        let b = self.bob.get(bob).ok_or(Error::IndexOutOfRange {
            index: bob,
            count: self.bob.len(),
        })?;
        Ok(f64::from(a * b))
    }

    pub fn correlator_table(&self) -> CorrelatorTable {
        CorrelatorTable::from_fn(self.alice.len(), self.bob.len(), |i, j| self.correlator(i, j))
            .expect("±1 products are valid correlators")
    }

    pub fn fits(&self, scenario: &Scenario) -> bool {
        self.alice.len() == scenario.settings_a && self.bob.len() == scenario.settings_b
    }
}

pub fn strategy_correlator(strategy: &DeterministicStrategy, alice: usize, bob: usize) -> Result<f64> {
    strategy.correlator(alice, bob)
}

/// All `2^(settings_a + settings_b)` strategies in canonical order.
pub fn enumerate_strategies(scenario: &Scenario) -> Result<Vec<DeterministicStrategy>> {
    let total = scenario.total_settings();
    if total > MAX_ENUMERATED_SETTINGS {
        return Err(Error::ScenarioTooLarge {
            total,
            limit: MAX_ENUMERATED_SETTINGS,
        });
    }
    Ok((0..1u64 << total)
        .map(|k| DeterministicStrategy::from_index(k, scenario.settings_a, scenario.settings_b))
        .collect())
}

/// Keeps the strategies giving opposite outcomes on every shared pair.
/// Order is preserved; with no shared pairs the input comes back unchanged.
pub fn filter_anticorrelated(
    strategies: Vec<DeterministicStrategy>,
    scenario: &Scenario,
) -> Vec<DeterministicStrategy> {
    strategies
        .into_iter()
        .filter(|st| is_anticorrelated(st, scenario))
        .collect()
}

fn is_anticorrelated(st: &DeterministicStrategy, scenario: &Scenario) -> bool {
    scenario
        .shared
        .iter()
        .all(|&(i, j)| match (st.alice.get(i), st.bob.get(j)) {
            (Some(a), Some(b)) => *b == -*a,
            _ => false,
        })
}

/// Which strategies [`classical_bound`] ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StrategyFilter {
    #[default]
    All,
    /// Only strategies obeying the scenario's anticorrelation constraints.
    Anticorrelated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalBound {
    pub value: f64,
    /// First maximizing strategy in canonical order.
    pub witness: DeterministicStrategy,
    /// Number of strategies the maximum was taken over.
    pub strategies: usize,
}

/// Exact maximum of `expression` over local hidden variable models.
pub fn classical_bound(
    expression: &BellExpression,
    scenario: &Scenario,
    filter: StrategyFilter,
) -> Result<ClassicalBound> {
    let (need_a, need_b) = expression.settings_needed();
    if need_a > scenario.settings_a || need_b > scenario.settings_b {
        return Err(Error::InvalidScenario(format!(
            "expression needs {need_a}x{need_b} settings, scenario has {}x{}",
            scenario.settings_a, scenario.settings_b
        )));
    }
    let mut strategies = enumerate_strategies(scenario)?;
    if filter == StrategyFilter::Anticorrelated {
        strategies = filter_anticorrelated(strategies, scenario);
    }
    let count = strategies.len();
    let mut best: Option<(f64, DeterministicStrategy)> = None;
    for st in strategies {
        let v = expression.value_with(|i, j| st.correlator(i, j))?;
        if best.as_ref().is_none_or(|(b, _)| v > *b) {
            best = Some((v, st));
        }
    }
    let (value, witness) = best.ok_or_else(|| {
        Error::InvalidScenario("no strategy satisfies the constraints".into())
    })?;
    Ok(ClassicalBound {
        value,
        witness,
        strategies: count,
    })
}

/// A finite probability distribution over strategies.
#[derive(Debug, Clone, PartialEq)]
pub struct LhvMixture {
    entries: Vec<(DeterministicStrategy, f64)>,
}

impl LhvMixture {
    /// Weights must be non-negative and sum to 1 within [`WEIGHT_TOLERANCE`];
    /// all strategies must have the same shape.
    pub fn new(entries: Vec<(DeterministicStrategy, f64)>) -> Result<Self> {
        let Some((first, _)) = entries.first() else {
            return Err(Error::InvalidMixture("no strategies".into()));
        };
        let shape = (first.alice.len(), first.bob.len());
        for (st, w) in &entries {
            if (st.alice.len(), st.bob.len()) != shape {
                return Err(Error::InvalidMixture("strategies differ in shape".into()));
            }
            if !w.is_finite() || *w < 0.0 {
                return Err(Error::InvalidMixture(format!("negative weight {w}")));
            }
        }
        let total: f64 = entries.iter().map(|(_, w)| w).sum();
        if (total - 1.0).abs() > WEIGHT_TOLERANCE {
            return Err(Error::InvalidMixture(format!("weights sum to {total}")));
        }
        Ok(Self { entries })
    }

    pub fn point(strategy: DeterministicStrategy) -> Self {
        Self {
            entries: vec![(strategy, 1.0)],
        }
    }

    pub fn uniform(strategies: Vec<DeterministicStrategy>) -> Result<Self> {
        let w = 1.0 / strategies.len() as f64;
        Self::new(strategies.into_iter().map(|s| (s, w)).collect())
    }

    pub fn entries(&self) -> &[(DeterministicStrategy, f64)] {
        &self.entries
    }

    pub fn settings_a(&self) -> usize {
        self.entries[0].0.alice.len()
    }

    pub fn settings_b(&self) -> usize {
        self.entries[0].0.bob.len()
    }

    /// `Σ_k w_k a_i(λ_k) b_j(λ_k)`.
    pub fn correlator(&self, alice: usize, bob: usize) -> Result<f64> {
        let mut acc = 0.0;
        for (st, w) in &self.entries {
            acc += w * st.correlator(alice, bob)?;
        }
        Ok(acc.clamp(-1.0, 1.0))
    }

    pub fn correlator_table(&self) -> Result<CorrelatorTable> {
        CorrelatorTable::from_fn(self.settings_a(), self.settings_b(), |i, j| {
            self.correlator(i, j)
        })
    }

    /// Draws one strategy according to the weights.
    pub fn sampler(&self) -> MixtureSampler<'_> {
        MixtureSampler {
            mixture: self,
            index: WeightedIndex::new(self.entries.iter().map(|(_, w)| *w))
                .expect("validated weights"),
        }
    }
}

pub fn mixture_correlator(mixture: &LhvMixture, alice: usize, bob: usize) -> Result<f64> {
    mixture.correlator(alice, bob)
}

pub struct MixtureSampler<'a> {
    mixture: &'a LhvMixture,
    index: WeightedIndex<f64>,
}

impl MixtureSampler<'_> {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> &DeterministicStrategy {
        &self.mixture.entries[self.index.sample(rng)].0
    }
}

/// Sample mean of ±1 outcome products.
///
/// `standard_error` uses the population standard deviation (divisor `n`),
/// which keeps it at most `1/√n` for ±1 data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatedCorrelator {
    pub mean: f64,
    pub standard_error: f64,
    pub sample_count: u64,
}

impl EstimatedCorrelator {
    /// Builds the estimate from the number of +1 products out of `n`.
    pub fn from_counts(positive: u64, n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::NoSamples);
        }
        let nf = n as f64;
        let mean = (2.0 * positive as f64 - nf) / nf;
        let variance = (1.0 - mean * mean).max(0.0);
        Ok(Self {
            mean,
            standard_error: (variance / nf).sqrt(),
            sample_count: n,
        })
    }

    pub fn from_products<I: IntoIterator<Item = i8>>(products: I) -> Result<Self> {
        let (mut positive, mut n) = (0u64, 0u64);
        for p in products {
            n += 1;
            if p > 0 {
                positive += 1;
            }
        }
        Self::from_counts(positive, n)
    }
}

/// Estimates `E(alice, bob)` by sampling `n` strategies from the mixture.
pub fn monte_carlo_correlator<R: Rng + ?Sized>(
    mixture: &LhvMixture,
    alice: usize,
    bob: usize,
    n: u64,
    rng: &mut R,
) -> Result<EstimatedCorrelator> {
    if n == 0 {
        return Err(Error::NoSamples);
    }
    // validates the indices up front
    mixture.entries[0].0.correlator(alice, bob)?;
    let sampler = mixture.sampler();
    let mut positive = 0u64;
    for _ in 0..n {
        let st = sampler.sample(rng);
        if st.alice[alice] == st.bob[bob] {
            positive += 1;
        }
    }
    EstimatedCorrelator::from_counts(positive, n)
}

/// Deterministic single-spin model: with λ uniform on [0, 1) the outcome
/// averages to `polarization · measurement`.
///
/// Outcome is +1 iff `λ < cos²(θ/2) = (1 + cos θ)/2`, θ the angle between the
/// two directions.
pub fn single_spin_lhv(
    polarization: &UnitVector3,
    measurement: &UnitVector3,
    lambda: f64,
) -> Result<i8> {
    if !(0.0..1.0).contains(&lambda) {
        return Err(Error::OutOfRange {
            name: "lambda",
            value: lambda,
            min: 0.0,
            max: 1.0,
        });
    }
    let cos_theta = polarization.dot(measurement).clamp(-1.0, 1.0);
    let threshold = 0.5 * (1.0 + cos_theta);
    Ok(if lambda < threshold { 1 } else { -1 })
}
