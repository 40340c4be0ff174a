use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::criteria::rules::{
    self, EQUAL_REAL, FIDELITY_SUM, IDENTITY_MIX, OVERLAP_FLOOR, OVERLAP_THRESHOLD, THREE_STATE,
};
use crate::criteria::{Decision, Verdict};
use crate::error::{Error, Result};
use crate::incoherence::{self, SolverOptions};
use crate::numerics::MAX_LP_SIZE;
use crate::states::{gram_of, hadamard_power, require_states, CopySpec, Gram, StateSet};

/// Input to [`classify`]: explicit vectors or only their Gram matrix.
#[derive(Debug, Clone, Copy)]
pub enum Subject<'a> {
    States(&'a StateSet),
    Gram(&'a Gram),
}

impl<'a> From<&'a StateSet> for Subject<'a> {
    fn from(s: &'a StateSet) -> Self {
        Subject::States(s)
    }
}

impl<'a> From<&'a Gram> for Subject<'a> {
    fn from(g: &'a Gram) -> Self {
        Subject::Gram(g)
    }
}

/// Everything a criterion may look at for one classification.
#[derive(Debug, Clone)]
pub struct Instance {
    /// Gram matrix of the N-copy states.
    pub gram: Gram,
    /// N-copy state vectors, when known and small enough to write out.
    pub states: Option<StateSet>,
    pub copies: CopySpec,
}

impl Instance {
    pub fn new(subject: Subject<'_>, copies: CopySpec) -> Result<Self> {
        let (base, states) = match subject {
            Subject::States(s) => (gram_of(s), tensor_power(s, copies)),
            Subject::Gram(g) => (g.clone(), None),
        };
        Ok(Self {
            gram: hadamard_power(&base, copies),
            states,
            copies,
        })
    }
}

/// |ψ⟩^{⊗N} for every state, or `None` if the result would exceed the LP size limit.
fn tensor_power(set: &StateSet, copies: CopySpec) -> Option<StateSet> {
    let n = copies.get();
    if n == 1 {
        return Some(set.clone());
    }
    let dim = (set.dim() as u64).checked_pow(n)?;
    if dim * dim > MAX_LP_SIZE as u64 {
        return None;
    }
    let states = set
        .states()
        .iter()
        .map(|v| {
            (1..n).fold(v.clone(), |acc, _| {
                acc.iter()
                    .flat_map(|a| v.iter().map(move |b| a * b))
                    .collect::<Vec<Complex64>>()
            })
        })
        .collect();
    StateSet::normalized(dim as usize, states).ok()
}

/// One antidistinguishability rule, selectable by name.
pub trait Criterion: Send + Sync {
    fn name(&self) -> &'static str;

    /// `Ok(None)` when the rule does not apply to this instance.
    fn evaluate(&self, instance: &Instance) -> Result<Option<Verdict>>;

    /// Rules that never invoke an iterative solver.
    fn closed_form(&self) -> bool {
        true
    }
}

struct ThreeState;
struct EqualReal;
struct OverlapFloor;
struct OverlapThreshold;
struct FidelitySum;
struct IdentityMix;

/// The cone-sum solver as a registry entry.
pub struct IncoherenceSdp {
    pub options: SolverOptions,
}

impl Criterion for ThreeState {
    fn name(&self) -> &'static str {
        THREE_STATE
    }

    fn evaluate(&self, instance: &Instance) -> Result<Option<Verdict>> {
        let g = &instance.gram;
        if g.size() != 3 {
            return Ok(None);
        }
        // Identical states are left to the solver.
        if g.overlaps().iter().all(|c| c * c >= 1.0 - 1e-10) {
            return Ok(None);
        }
        rules::three_state_iff(g).map(Some)
    }
}

impl Criterion for EqualReal {
    fn name(&self) -> &'static str {
        EQUAL_REAL
    }

    fn evaluate(&self, instance: &Instance) -> Result<Option<Verdict>> {
        rules::equal_real_iff(&instance.gram)
    }
}

impl Criterion for OverlapFloor {
    fn name(&self) -> &'static str {
        OVERLAP_FLOOR
    }

    fn evaluate(&self, instance: &Instance) -> Result<Option<Verdict>> {
        rules::necessary_overlap_floor(&instance.gram).map(Some)
    }
}

impl Criterion for OverlapThreshold {
    fn name(&self) -> &'static str {
        OVERLAP_THRESHOLD
    }

    fn evaluate(&self, instance: &Instance) -> Result<Option<Verdict>> {
        rules::sufficient_overlap_threshold(&instance.gram).map(Some)
    }
}

impl Criterion for FidelitySum {
    fn name(&self) -> &'static str {
        FIDELITY_SUM
    }

    fn evaluate(&self, instance: &Instance) -> Result<Option<Verdict>> {
        rules::necessary_fidelity_sum(&instance.gram).map(Some)
    }
}

impl Criterion for IdentityMix {
    fn name(&self) -> &'static str {
        IDENTITY_MIX
    }

    fn evaluate(&self, instance: &Instance) -> Result<Option<Verdict>> {
        match &instance.states {
            Some(set) if set.dim() * set.dim() <= MAX_LP_SIZE && set.len() <= MAX_LP_SIZE => {
                rules::sufficient_identity_mix(set).map(Some)
            }
            _ => Ok(None),
        }
    }
}

impl Criterion for IncoherenceSdp {
    fn name(&self) -> &'static str {
        incoherence::CRITERION_NAME
    }

    fn evaluate(&self, instance: &Instance) -> Result<Option<Verdict>> {
        incoherence::decide_incoherent_with(&instance.gram, &self.options).map(Some)
    }

    fn closed_form(&self) -> bool {
        false
    }
}

/// Which registered rules a classification may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    /// Closed-form rules first, then the solver.
    #[default]
    Auto,
    /// Closed-form rules only; may end inconclusive.
    Closed,
    /// The solver alone.
    Sdp,
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "auto" => Ok(Method::Auto),
            "closed" => Ok(Method::Closed),
            "sdp" => Ok(Method::Sdp),
            other => Err(format!(
                "unknown method '{other}' (expected auto, closed or sdp)"
            )),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Auto => "auto",
            Method::Closed => "closed",
            Method::Sdp => "sdp",
        })
    }
}

/// One step of a cascade; `outcome` is `None` when the rule did not apply.
#[derive(Debug, Clone, PartialEq)]
pub struct TrailEntry {
    pub criterion: String,
    pub outcome: Option<Verdict>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub verdict: Verdict,
    pub trail: Vec<TrailEntry>,
}

/// Ordered collection of criteria; evaluation order is registration order.
pub struct CriterionRegistry {
    entries: Vec<Box<dyn Criterion>>,
}

impl Default for CriterionRegistry {
    /// Cheap exact rules, then necessary/sufficient bounds, then the LP, then the solver.
    fn default() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(ThreeState));
        r.register(Box::new(EqualReal));
        r.register(Box::new(OverlapFloor));
        r.register(Box::new(OverlapThreshold));
        r.register(Box::new(FidelitySum));
        r.register(Box::new(IdentityMix));
        r.register(Box::new(IncoherenceSdp {
            options: SolverOptions::default(),
        }));
        r
    }
}

impl fmt::Debug for CriterionRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.names()).finish()
    }
}

impl CriterionRegistry {
    pub fn empty() -> Self {
        Self {
            entries: Vec::new(),
        }
    }

    /// Adds a rule at the end, or replaces the one with the same name in place.
    pub fn register(&mut self, criterion: Box<dyn Criterion>) {
        match self
            .entries
            .iter()
            .position(|c| c.name() == criterion.name())
        {
            Some(i) => self.entries[i] = criterion,
            None => self.entries.push(criterion),
        }
    }

    pub fn get(&self, name: &str) -> Option<&dyn Criterion> {
        self.entries
            .iter()
            .find(|c| c.name() == name)
            .map(|c| c.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|c| c.name()).collect()
    }

    fn select(&self, method: Method) -> Vec<&dyn Criterion> {
        self.entries
            .iter()
            .map(|c| c.as_ref())
            .filter(|c| match method {
                Method::Auto => true,
                Method::Closed => c.closed_form(),
                Method::Sdp => !c.closed_form(),
            })
            .collect()
    }

    /// Runs the rules allowed by `method` in registration order.
    pub fn classify(
        &self,
        subject: Subject<'_>,
        copies: CopySpec,
        method: Method,
    ) -> Result<Classification> {
        run(&self.select(method), subject, copies)
    }

    /// Runs exactly the named rules, in the given order.
    pub fn classify_named(
        &self,
        subject: Subject<'_>,
        copies: CopySpec,
        names: &[&str],
    ) -> Result<Classification> {
        let steps = names
            .iter()
            .map(|n| {
                self.get(n)
                    .ok_or_else(|| Error::UnknownCriterion(n.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        run(&steps, subject, copies)
    }
}

fn run(steps: &[&dyn Criterion], subject: Subject<'_>, copies: CopySpec) -> Result<Classification> {
    let instance = Instance::new(subject, copies)?;
    require_states(&instance.gram, 3)?;
    let mut trail = Vec::with_capacity(steps.len());
    for step in steps {
        let outcome = step.evaluate(&instance)?;
        let decisive = outcome
            .as_ref()
            .filter(|v| v.decision.is_decisive())
            .cloned();
        trail.push(TrailEntry {
            criterion: step.name().to_string(),
            outcome,
        });
        if let Some(verdict) = decisive {
            return Ok(Classification { verdict, trail });
        }
    }
    let verdict = trail
        .iter()
        .rev()
        .find_map(|e| e.outcome.clone())
        .unwrap_or_else(|| Verdict::inconclusive("none", 0.0));
    debug_assert_eq!(verdict.decision, Decision::Inconclusive);
    Ok(Classification { verdict, trail })
}

/// Full cascade with the default registry.
pub fn classify<'a>(subject: impl Into<Subject<'a>>, copies: CopySpec) -> Result<Classification> {
    classify_with(subject, copies, Method::Auto)
}

pub fn classify_with<'a>(
    subject: impl Into<Subject<'a>>,
    copies: CopySpec,
    method: Method,
) -> Result<Classification> {
    CriterionRegistry::default().classify(subject.into(), copies, method)
}
