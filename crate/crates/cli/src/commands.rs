use std::fmt::Write as _;
use std::path::Path;

use exclusion_lab::criteria::{classify_with, CriterionRegistry, Decision, Method, Subject};
use exclusion_lab::multicopy::{
    min_copies, staircase_csv, staircase_sweep, theta_grid, CopyReport, MinCopiesOptions,
};
use exclusion_lab::povm::{
    find_exclusion_assignment, verify_exclusion, ExclusionReport, DEFAULT_TOL,
};
use exclusion_lab::states::{
    construct_equiangular_real, construct_floor_family, construct_qubit_family,
    construct_step_family, floor_family_gamma, step_family_gamma, CopySpec, StateSet,
    QUBIT_FAMILY_MAX_THETA,
};

use crate::error::CliError;
use crate::formats::{
    read_json, to_json, CopyReportJson, ExclusionReportJson, PovmFile, StateSetFile, VerdictReport,
};
use crate::{
    CheckArgs, Cli, Command, ConstructArgs, Family, Figure1Args, MincopiesArgs, VerifyPovmArgs,
    TOL_ENV,
};

/// Text for stdout and stderr, plus the process exit code.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Output {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// Exit code of a classification.
pub fn decision_code(d: Decision) -> i32 {
    match d {
        Decision::Antidistinguishable => 0,
        Decision::NotAntidistinguishable => 1,
        Decision::Inconclusive => 2,
    }
}

/// `tol_flag`, else the environment override, else the library default.
pub fn resolve_tol(tol_flag: Option<f64>, env: Option<&str>) -> Result<f64, CliError> {
    let (tol, source) = match (tol_flag, env) {
        (Some(t), _) => (t, "--tol"),
        (None, Some(raw)) => (
            raw.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("{TOL_ENV}='{raw}' is not a number")))?,
            TOL_ENV,
        ),
        (None, None) => (DEFAULT_TOL, "default"),
    };
    if !(tol.is_finite() && tol > 0.0) {
        return Err(CliError::Usage(format!(
            "{source} must be a positive number, got {tol}"
        )));
    }
    Ok(tol)
}

pub fn run(cli: Cli) -> Result<Output, CliError> {
    match cli.command {
        Command::Check(a) => check(&a),
        Command::Mincopies(a) => mincopies(&a),
        Command::Construct(a) => construct(&a),
        Command::VerifyPovm(a) => {
            let env = std::env::var(TOL_ENV).ok();
            verify_povm(&a, env.as_deref())
        }
        Command::Figure1(a) => figure1(&a),
    }
}

pub fn load_states(path: &Path) -> Result<StateSet, CliError> {
    read_json::<StateSetFile>(path)?.to_set()
}

fn parse_method(raw: &str) -> Result<Method, CliError> {
    raw.parse().map_err(CliError::Usage)
}

fn check(a: &CheckArgs) -> Result<Output, CliError> {
    let method = parse_method(&a.method)?;
    let copies = CopySpec::new(a.copies).map_err(|e| CliError::Usage(e.to_string()))?;
    let set = load_states(&a.states)?;
    let c = if a.criteria.is_empty() {
        classify_with(&set, copies, method)?
    } else {
        if method != Method::Auto {
            return Err(CliError::Usage(
                "--criterion and --method are mutually exclusive".into(),
            ));
        }
        let names: Vec<&str> = a.criteria.iter().map(String::as_str).collect();
        CriterionRegistry::default().classify_named(Subject::States(&set), copies, &names)?
    };
    let report = VerdictReport::new(&c, a.copies);
    let stdout = if a.json {
        to_json(&report) + "\n"
    } else {
        render_verdict(&report)
    };
    Ok(Output {
        stdout,
        code: decision_code(c.verdict.decision),
        ..Output::default()
    })
}

fn render_verdict(r: &VerdictReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "decision:    {}", r.decision);
    let _ = writeln!(s, "criterion:   {}", r.criterion);
    let _ = writeln!(
        s,
        "margin:      {:.6e}{}",
        r.margin,
        if r.borderline { " (borderline)" } else { "" }
    );
    let _ = writeln!(s, "copies:      {}", r.copies);
    let cert = match &r.certificate {
        Some(c) => serde_json::to_value(c)
            .ok()
            .and_then(|v| v["kind"].as_str().map(str::to_string)),
        None => None,
    };
    let _ = writeln!(s, "certificate: {}", cert.as_deref().unwrap_or("none"));
    let _ = writeln!(s, "trail:");
    for t in &r.trail {
        match (&t.decision, t.margin) {
            (Some(d), Some(m)) => {
                let _ = writeln!(s, "  {:<30} {:<24} margin {m:.6e}", t.criterion, d);
            }
            _ => {
                let _ = writeln!(s, "  {:<30} not applicable", t.criterion);
            }
        }
    }
    s
}

fn mincopies(a: &MincopiesArgs) -> Result<Output, CliError> {
    let method = parse_method(&a.method)?;
    if a.max_n == Some(0) {
        return Err(CliError::Usage("--max must be at least 1".into()));
    }
    let set = load_states(&a.states)?;
    let opts = MinCopiesOptions {
        max_n: a.max_n,
        method,
        use_formulas: !a.no_formulas,
    };
    let report = min_copies(&set, &opts)?;
    let stdout = if a.json {
        to_json(&CopyReportJson::new(&report)) + "\n"
    } else {
        render_copies(&report)
    };
    Ok(Output {
        stdout,
        code: if report.minimal_n.is_some() { 0 } else { 2 },
        ..Output::default()
    })
}

fn render_copies(r: &CopyReport) -> String {
    let mut s = String::new();
    match r.minimal_n {
        Some(n) => {
            let _ = writeln!(s, "minimal_N:   {n}");
        }
        None => {
            let _ = writeln!(s, "minimal_N:   unresolved");
        }
    }
    let _ = writeln!(s, "method:      {}", r.method.as_str());
    match r.upper_bound {
        Some(b) => {
            let _ = writeln!(s, "upper_bound: {b}");
        }
        None => {
            let _ = writeln!(s, "upper_bound: none");
        }
    }
    let _ = writeln!(s, "trail:");
    for (n, v) in &r.trail {
        let _ = writeln!(
            s,
            "  N = {n:<4} {:<24} {:<30} margin {:.6e}",
            v.decision.as_str(),
            v.criterion,
            v.margin
        );
    }
    s
}

fn construct(a: &ConstructArgs) -> Result<Output, CliError> {
    let (set, summary) = match a.family {
        Family::Equiangular { k, gamma } => (
            construct_equiangular_real(k, gamma)?,
            format!("gamma = {gamma}"),
        ),
        Family::QubitFamily { theta } => {
            let x = (theta / 2.0).cos().powi(2);
            (construct_qubit_family(theta)?, format!("x = {x}"))
        }
        Family::FloorFamily { k, n } => (
            construct_floor_family(k, n)?,
            format!("gamma = {}", floor_family_gamma(k, n)?),
        ),
        Family::StepFamily { k, n } => (
            construct_step_family(k, n)?,
            format!("gamma = {}", step_family_gamma(k, n)?),
        ),
    };
    let json = to_json(&StateSetFile::from_set(&set)) + "\n";
    match &a.out {
        Some(path) => {
            write_file(path, &json)?;
            Ok(Output {
                stdout: format!("{summary}\n"),
                ..Output::default()
            })
        }
        None => Ok(Output {
            stdout: json,
            stderr: format!("{summary}\n"),
            code: 0,
        }),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Write(path.display().to_string(), e))
}

fn verify_povm(a: &VerifyPovmArgs, env_tol: Option<&str>) -> Result<Output, CliError> {
    let tol = resolve_tol(a.tol, env_tol)?;
    let set = load_states(&a.states)?;
    let mut povm = read_json::<PovmFile>(&a.povm)?.to_povm()?;
    let assignment = if a.search_assignment {
        let found = find_exclusion_assignment(&set, &povm, tol)?;
        if let Some(order) = &found {
            povm = povm.permuted(order);
        }
        Some(found)
    } else {
        None
    };
    let report = verify_exclusion(&set, &povm, tol)?;
    let code = if report.passed() { 0 } else { 1 };
    let stdout = if a.json {
        to_json(&ExclusionReportJson::new(
            &report,
            assignment.clone().flatten(),
        )) + "\n"
    } else {
        render_exclusion(&report, assignment.as_ref())
    };
    Ok(Output {
        stdout,
        code,
        ..Output::default()
    })
}

fn render_exclusion(r: &ExclusionReport, assignment: Option<&Option<Vec<usize>>>) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{} (tol {:e})",
        if r.passed() { "PASS" } else { "FAIL" },
        r.tol
    );
    match assignment {
        Some(Some(order)) => {
            let _ = writeln!(s, "assignment:   {order:?} (outcome excluding each state)");
        }
        Some(None) => {
            let _ = writeln!(s, "assignment:   none found");
        }
        None => {}
    }
    let _ = writeln!(s, "completeness: {:.6e}", r.completeness);
    let _ = writeln!(
        s,
        "{:<8} {:>14} {:>14} {:>14}",
        "outcome", "min eig", "exclusion", "relevance"
    );
    for j in 0..r.exclusion.len() {
        let _ = writeln!(
            s,
            "{j:<8} {:>14.6e} {:>14.6e} {:>14.6e}",
            r.min_eigenvalues[j], r.exclusion[j], r.relevance[j]
        );
    }
    if !r.violations.is_empty() {
        let _ = writeln!(s, "violations:");
        let _ = writeln!(
            s,
            "  {:<13} {:>7} {:>14} {:>14}",
            "condition", "outcome", "value", "slack"
        );
        for v in &r.violations {
            let outcome = v.outcome.map_or("-".to_string(), |j| j.to_string());
            let _ = writeln!(
                s,
                "  {:<13} {outcome:>7} {:>14.6e} {:>14.6e}",
                v.condition.as_str(),
                v.value,
                v.slack
            );
        }
    }
    s
}

/// Upper angles within this of 2π/3 are snapped to it.
const THETA_MAX_SNAP: f64 = 1e-9;

fn figure1(a: &Figure1Args) -> Result<Output, CliError> {
    let theta_max = if (a.theta_max - QUBIT_FAMILY_MAX_THETA).abs() <= THETA_MAX_SNAP {
        QUBIT_FAMILY_MAX_THETA
    } else {
        a.theta_max
    };
    if !(a.theta_min > 0.0 && a.theta_min <= theta_max && theta_max <= QUBIT_FAMILY_MAX_THETA) {
        return Err(CliError::Usage(format!(
            "need 0 < theta-min ≤ theta-max ≤ 2π/3, got {} and {}",
            a.theta_min, a.theta_max
        )));
    }
    if a.steps < 2 {
        return Err(CliError::Usage(format!(
            "--steps must be at least 2, got {}",
            a.steps
        )));
    }
    let csv = staircase_csv(&staircase_sweep(&theta_grid(
        a.theta_min,
        theta_max,
        a.steps,
    ))?);
    match &a.out {
        Some(path) => {
            write_file(path, &csv)?;
            Ok(Output {
                stdout: format!("wrote {} rows to {}\n", a.steps, path.display()),
                ..Output::default()
            })
        }
        None => Ok(Output {
            stdout: csv,
            ..Output::default()
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_precedence() {
        assert_eq!(resolve_tol(None, None).unwrap(), DEFAULT_TOL);
        assert_eq!(resolve_tol(None, Some("2e-3")).unwrap(), 2e-3);
        assert_eq!(resolve_tol(Some(1e-6), Some("2e-3")).unwrap(), 1e-6);
        assert_eq!(resolve_tol(None, Some("abc")).unwrap_err().exit_code(), 64);
        assert_eq!(resolve_tol(Some(-1.0), None).unwrap_err().exit_code(), 64);
    }

    #[test]
    fn exit_codes_follow_decision() {
        assert_eq!(decision_code(Decision::Antidistinguishable), 0);
        assert_eq!(decision_code(Decision::NotAntidistinguishable), 1);
        assert_eq!(decision_code(Decision::Inconclusive), 2);
    }
}
