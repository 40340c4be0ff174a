//! How many identical copies make a set excludable.
//!
//! Closed forms cover equal real overlaps and three states with equal
//! overlaps; everything else is searched N = 1, 2, … with the classifier on
//! the Hadamard-powered Gram matrix.

use std::fmt;
use std::fmt::Write as _;

use crate::criteria::{
    equal_real_iff, overlap_threshold, three_state_iff, Classification, CriterionRegistry,
    Decision, Method, Subject, Verdict,
};
use crate::error::{Error, Result};
use crate::states::{
    equal_real_threshold, gram_of, hadamard_power, max_overlap, require_states, CopySpec, Gram,
    StateSet, QUBIT_FAMILY_MAX_THETA,
};

/// Ratios this close to an integer are treated as that integer.
const CEIL_SNAP: f64 = 1e-12;
/// Search cap when no explicit maximum is given.
pub const DEFAULT_MAX_COPIES: u32 = 512;
/// Search cap for sets containing duplicate states.
pub const DUPLICATE_MAX_COPIES: u32 = 32;

const PATTERN_TOL: f64 = 1e-10;

fn ceil_snap(ratio: f64) -> u32 {
    let nearest = ratio.round();
    let n = if (ratio - nearest).abs() <= CEIL_SNAP {
        nearest
    } else {
        ratio.ceil()
    };
    n.max(1.0).min(u32::MAX as f64) as u32
}

fn check_k(k: usize) -> Result<()> {
    if k < 3 {
        return Err(Error::TooFewStates {
            required: 3,
            got: k,
        });
    }
    Ok(())
}

/// Copies after which the largest overlap c falls to t_k: max(1, ⌈ln t_k / ln c⌉).
pub fn copies_upper_bound(c: f64, k: usize) -> Result<u32> {
    check_k(k)?;
    if c.is_nan() || c < 0.0 {
        return Err(Error::OutOfRange {
            name: "c",
            value: c,
            range: "[0, 1)",
        });
    }
    if c >= 1.0 {
        return Err(Error::DegenerateOverlap(c));
    }
    let t = overlap_threshold(k);
    if c <= t {
        return Ok(1);
    }
    Ok(ceil_snap(t.ln() / c.ln()))
}

/// Minimal copies for k states with equal real overlap γ: ⌈ln s_k / ln γ⌉.
pub fn exact_copies_equal_real(gamma: f64, k: usize) -> Result<u32> {
    check_k(k)?;
    if gamma.is_nan() || gamma < 0.0 {
        return Err(Error::NegativeGamma(gamma));
    }
    if gamma >= 1.0 {
        return Err(Error::DegenerateOverlap(gamma));
    }
    let s = equal_real_threshold(k);
    if gamma <= s {
        return Ok(1);
    }
    Ok(ceil_snap(s.ln() / gamma.ln()))
}

/// Minimal copies for three states with equal squared overlap x: the N with
/// (1/4)^{1/(N−1)} < x ≤ (1/4)^{1/N}.
pub fn exact_copies_three_equal(x: f64) -> Result<u32> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::OutOfRange {
            name: "x",
            value: x,
            range: "[0, 1)",
        });
    }
    if x >= 1.0 {
        return Err(Error::DegenerateOverlap(x));
    }
    if x <= 0.25 {
        return Ok(1);
    }
    Ok(ceil_snap(0.25f64.ln() / x.ln()))
}

/// How the minimal copy count was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CopyMethod {
    /// Closed form for equal real overlaps.
    EqualReal,
    /// Closed form for three states with equal overlaps.
    ThreeEqual,
    /// Classifier run on successive copy counts.
    Search,
}

impl CopyMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            CopyMethod::EqualReal => "equal_real",
            CopyMethod::ThreeEqual => "three_equal",
            CopyMethod::Search => "search",
        }
    }
}

impl fmt::Display for CopyMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CopyReport {
    /// `None` when unresolved within the cap.
    pub minimal_n: Option<u32>,
    pub method: CopyMethod,
    /// Copies after which the overlap threshold certifies exclusion.
    pub upper_bound: Option<u32>,
    /// Verdict at every examined copy count, ascending.
    pub trail: Vec<(u32, Verdict)>,
}

#[derive(Debug, Clone, Copy)]
pub struct MinCopiesOptions {
    /// Largest copy count to examine; capped by the upper bound when one exists.
    pub max_n: Option<u32>,
    /// Rules the search may use.
    pub method: Method,
    /// Use closed forms when the overlap pattern allows.
    pub use_formulas: bool,
}

impl Default for MinCopiesOptions {
    fn default() -> Self {
        Self {
            max_n: None,
            method: Method::Auto,
            use_formulas: true,
        }
    }
}

/// Minimal copy count for explicit states.
pub fn min_copies(set: &StateSet, opts: &MinCopiesOptions) -> Result<CopyReport> {
    min_copies_of(Subject::States(set), &gram_of(set), opts)
}

/// Minimal copy count from the Gram matrix alone.
pub fn min_copies_gram(g: &Gram, opts: &MinCopiesOptions) -> Result<CopyReport> {
    min_copies_of(Subject::Gram(g), g, opts)
}

fn min_copies_of(subject: Subject<'_>, g: &Gram, opts: &MinCopiesOptions) -> Result<CopyReport> {
    require_states(g, 3)?;
    let k = g.size();
    let c = max_overlap(g)?;
    let upper_bound = if c < 1.0 {
        Some(copies_upper_bound(c, k)?)
    } else {
        None
    };
    let cap = match (opts.max_n, upper_bound) {
        (Some(m), Some(ub)) => m.min(ub),
        (None, Some(ub)) => ub.min(DEFAULT_MAX_COPIES),
        (Some(m), None) => m,
        (None, None) => DUPLICATE_MAX_COPIES,
    }
    .max(1);

    if opts.use_formulas {
        if let Some(report) = by_formula(g, cap, upper_bound)? {
            return Ok(report);
        }
    }

    let registry = CriterionRegistry::default();
    let mut trail = Vec::new();
    for n in 1..=cap {
        let copies = CopySpec::new(n)?;
        let Classification { verdict, .. } = registry.classify(subject, copies, opts.method)?;
        let decision = verdict.decision;
        trail.push((n, verdict));
        match decision {
            Decision::Antidistinguishable => {
                return Ok(CopyReport {
                    minimal_n: Some(n),
                    method: CopyMethod::Search,
                    upper_bound,
                    trail,
                })
            }
            Decision::NotAntidistinguishable => {}
            Decision::Inconclusive => break,
        }
    }
    Ok(CopyReport {
        minimal_n: None,
        method: CopyMethod::Search,
        upper_bound,
        trail,
    })
}

/// Closed-form answer with its trail, when the overlap pattern allows one.
fn by_formula(g: &Gram, cap: u32, upper_bound: Option<u32>) -> Result<Option<CopyReport>> {
    let k = g.size();
    let (n, method) = if equal_real_iff(g)?.is_some() {
        let gamma = g.entry(0, 1).re.max(0.0);
        (exact_copies_equal_real(gamma, k)?, CopyMethod::EqualReal)
    } else if let Some(x) = three_equal_overlap(g) {
        (exact_copies_three_equal(x)?, CopyMethod::ThreeEqual)
    } else {
        return Ok(None);
    };

    // The exact rule on each powered Gram reproduces the formula's staircase.
    let exact = |m: u32| -> Result<Verdict> {
        let powered = hadamard_power(g, CopySpec::new(m)?);
        match method {
            CopyMethod::EqualReal => {
                Ok(equal_real_iff(&powered)?.expect("pattern survives powers"))
            }
            _ => three_state_iff(&powered),
        }
    };
    let mut trail = Vec::new();
    for m in 1..n.min(cap.saturating_add(1)) {
        trail.push((m, exact(m)?));
    }
    trail.push((n, exact(n)?));
    Ok(Some(CopyReport {
        minimal_n: Some(n),
        method,
        upper_bound,
        trail,
    }))
}

/// Common squared overlap of three states, if all three agree.
fn three_equal_overlap(g: &Gram) -> Option<f64> {
    if g.size() != 3 {
        return None;
    }
    let x: Vec<f64> = g.overlaps().iter().map(|c| c * c).collect();
    let agree = x.iter().all(|v| (v - x[0]).abs() <= PATTERN_TOL);
    (agree && x[0] < 1.0).then(|| x.iter().sum::<f64>() / 3.0)
}

/// One point of the copy-count staircase of the equal-overlap qubit family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StaircasePoint {
    pub theta: f64,
    /// cos²(θ/2), the common squared overlap.
    pub x: f64,
    pub n: u32,
}

/// N(θ) for the qubit family over the given angles in (0, 2π/3].
pub fn staircase_sweep(thetas: &[f64]) -> Result<Vec<StaircasePoint>> {
    thetas
        .iter()
        .map(|&theta| {
            if !(theta > 0.0 && theta <= QUBIT_FAMILY_MAX_THETA + 1e-12) {
                return Err(Error::OutOfRange {
                    name: "theta",
                    value: theta,
                    range: "(0, 2π/3]",
                });
            }
            let x = (theta / 2.0).cos().powi(2);
            Ok(StaircasePoint {
                theta,
                x,
                n: exact_copies_three_equal(x)?,
            })
        })
        .collect()
}

/// `steps` evenly spaced angles in (theta_min, theta_max], ending at theta_max.
pub fn theta_grid(theta_min: f64, theta_max: f64, steps: usize) -> Vec<f64> {
    let h = (theta_max - theta_min) / steps as f64;
    (1..=steps)
        .map(|j| {
            if j == steps {
                theta_max
            } else {
                theta_min + j as f64 * h
            }
        })
        .collect()
}

/// `%g`-style rendering with the given number of significant digits.
pub fn format_significant(v: f64, digits: usize) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -5 || exp >= digits as i32 {
        format!("{}e{}", trim_zeros(mantissa), exp)
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// CSV with header `theta,x,N` and 10 significant digits.
pub fn staircase_csv(points: &[StaircasePoint]) -> String {
    let mut out = String::from("theta,x,N\n");
    for p in points {
        let _ = writeln!(
            out,
            "{},{},{}",
            format_significant(p.theta, 10),
            format_significant(p.x, 10),
            p.n
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{construct_equiangular_real, construct_step_family};
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    #[test]
    fn upper_bound_examples() {
        assert_eq!(copies_upper_bound(FRAC_1_SQRT_2, 3).unwrap(), 2);
        assert_eq!(copies_upper_bound(0.4, 3).unwrap(), 1);
        assert_eq!(copies_upper_bound(0.9, 3).unwrap(), 7);
        assert!(matches!(
            copies_upper_bound(1.0, 3),
            Err(Error::DegenerateOverlap(_))
        ));
        assert!(matches!(
            copies_upper_bound(0.5, 2),
            Err(Error::TooFewStates { .. })
        ));
    }

    #[test]
    fn equal_real_examples() {
        assert_eq!(exact_copies_equal_real(0.9, 3).unwrap(), 7);
        assert_eq!(exact_copies_equal_real(0.6, 3).unwrap(), 2);
        assert_eq!(exact_copies_equal_real(0.7, 4).unwrap(), 2);
        assert_eq!(exact_copies_equal_real(0.5, 3).unwrap(), 1);
        assert!(matches!(
            exact_copies_equal_real(-0.1, 3),
            Err(Error::NegativeGamma(_))
        ));
        assert!(matches!(
            exact_copies_equal_real(1.0, 3),
            Err(Error::DegenerateOverlap(_))
        ));
    }

    #[test]
    fn three_equal_examples() {
        assert_eq!(exact_copies_three_equal(0.25).unwrap(), 1);
        assert_eq!(exact_copies_three_equal(0.5).unwrap(), 2);
        assert_eq!(exact_copies_three_equal(0.9).unwrap(), 14);
        assert!(matches!(
            exact_copies_three_equal(1.0),
            Err(Error::DegenerateOverlap(_))
        ));
    }

    #[test]
    fn band_edges_are_inclusive() {
        for n in 1..=10u32 {
            let edge = 0.25f64.powf(1.0 / n as f64);
            assert_eq!(exact_copies_three_equal(edge).unwrap(), n);
        }
    }

    #[test]
    fn ceil_snap_behaviour() {
        assert_eq!(ceil_snap(2.0 + 1e-13), 2);
        assert_eq!(ceil_snap(2.0 + 1e-9), 3);
        assert_eq!(ceil_snap(0.3), 1);
    }

    #[test]
    fn zero_plus_one_needs_two_copies() {
        let set = StateSet::from_real(2, &[&[1.0, 0.0], &[1.0, 1.0], &[0.0, 1.0]]).unwrap();
        let r = min_copies(&set, &MinCopiesOptions::default()).unwrap();
        assert_eq!(r.minimal_n, Some(2));
        assert_eq!(r.method, CopyMethod::Search);
        assert_eq!(r.upper_bound, Some(2));
        assert_eq!(r.trail.len(), 2);
        assert_eq!(r.trail[0].1.decision, Decision::NotAntidistinguishable);
        assert_eq!(r.trail[1].1.decision, Decision::Antidistinguishable);
    }

    #[test]
    fn step_family_k3_n2() {
        let set = construct_step_family(3, 2).unwrap();
        let r = min_copies(&set, &MinCopiesOptions::default()).unwrap();
        assert_eq!(r.minimal_n, Some(3));
        assert_eq!(r.method, CopyMethod::EqualReal);
        let decisions: Vec<_> = r.trail.iter().map(|(n, v)| (*n, v.decision)).collect();
        assert_eq!(
            decisions,
            vec![
                (1, Decision::NotAntidistinguishable),
                (2, Decision::NotAntidistinguishable),
                (3, Decision::Antidistinguishable)
            ]
        );
    }

    #[test]
    fn already_excludable() {
        let set = construct_equiangular_real(3, 0.4).unwrap();
        let r = min_copies(&set, &MinCopiesOptions::default()).unwrap();
        assert_eq!(r.minimal_n, Some(1));
    }

    #[test]
    fn search_agrees_with_equal_real_formula() {
        let g = Gram::equiangular_real(3, 0.8).unwrap();
        let opts = MinCopiesOptions {
            use_formulas: false,
            method: Method::Sdp,
            ..Default::default()
        };
        let r = min_copies_gram(&g, &opts).unwrap();
        assert_eq!(r.minimal_n, Some(exact_copies_equal_real(0.8, 3).unwrap()));
        assert_eq!(r.method, CopyMethod::Search);
    }

    #[test]
    fn duplicate_states_are_unresolved() {
        let set = StateSet::from_real(2, &[&[1.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]).unwrap();
        let r = min_copies(
            &set,
            &MinCopiesOptions {
                max_n: Some(3),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(r.upper_bound, None);
        assert_eq!(r.minimal_n, None);
        assert!(r.trail.len() <= 3);
    }

    #[test]
    fn sweep_examples() {
        let pts = staircase_sweep(&[2.0 * PI / 3.0, PI / 2.0, 0.2]).unwrap();
        assert!((pts[0].x - 0.25).abs() < 1e-15);
        assert_eq!(pts[0].n, 1);
        assert!((pts[1].x - 0.5).abs() < 1e-15);
        assert_eq!(pts[1].n, 2);
        assert!((pts[2].x - 0.990_033_288_920_621_5).abs() < 1e-12);
        assert_eq!(pts[2].n, 139);
        assert!(staircase_sweep(&[0.0]).is_err());
        assert!(staircase_sweep(&[2.1]).is_err());
    }

    #[test]
    fn grid_ends_at_max() {
        let g = theta_grid(0.1, 2.0 * PI / 3.0, 200);
        assert_eq!(g.len(), 200);
        assert!(g[0] > 0.1);
        assert_eq!(*g.last().unwrap(), 2.0 * PI / 3.0);
    }

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(format_significant(0.25, 10), "0.25");
        assert_eq!(format_significant(2.0943951023931957, 10), "2.094395102");
        assert_eq!(format_significant(0.9900332889206215, 10), "0.9900332889");
        assert_eq!(format_significant(1.5e-7, 10), "1.5e-7");
        assert_eq!(format_significant(12345678901.0, 10), "1.23456789e10");
        assert_eq!(format_significant(0.0, 10), "0");
    }

    #[test]
    fn csv_layout() {
        let csv = staircase_csv(&staircase_sweep(&[PI / 2.0]).unwrap());
        assert_eq!(csv, "theta,x,N\n1.570796327,0.5,2\n");
    }
}
