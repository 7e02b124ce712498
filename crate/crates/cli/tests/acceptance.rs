//! Acceptance criteria AC1-AC7, one PASS/FAIL line each.
//!
//! Lines are written straight to stderr so they show up even when the harness captures output.

use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use unitary_periods::character::{
    character_table, conjugacy_classes, hom_dim, induce_values, restrict_values, ClassFunction,
};
use unitary_periods::field::{all_characters, CharDomain, ExtensionContext};
use unitary_periods::group::{
    enumerate_general_linear, unitary_by_closure, unitary_by_search, GroupOps, MatrixGroup, DEFAULT_ORDER_BOUND,
};
use unitary_periods::lparam::consistency_suite;
use unitary_periods::siegel::SiegelData;
use unitary_periods::spaces::{build_space, DiscChoice, Epsilon};
use unitary_periods::tolerance::ORTHOGONALITY_TOL;
use unitary_periods::verify::*;
use unitary_periods_cli::{render_json, render_text, run_scenario, ScenarioConfig, Selected};

fn ctx() -> Arc<ExtensionContext> {
    Arc::new(ExtensionContext::new(3, 1).unwrap())
}

fn siegel(n: usize) -> Arc<SiegelData> {
    Arc::new(SiegelData::split(&ctx(), Epsilon::Skew, n, DEFAULT_ORDER_BOUND).unwrap())
}

fn line(ac: &str, passed: bool, elapsed: Duration, budget: Duration, detail: &str) -> bool {
    let ok = passed && elapsed < budget;
    let _ = writeln!(
        std::io::stderr(),
        "{ac} {} ({:.2}s of {}s) {detail}",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        budget.as_secs()
    );
    ok
}

fn summarize(reports: &[VerificationReport]) -> (bool, String) {
    let failures: Vec<String> = reports
        .iter()
        .flat_map(|r| r.failures().map(move |c| format!("{}: {} ({})", r.kind, c.name, c.detail)))
        .collect();
    let checks: usize = reports.iter().map(|r| r.checks.len()).sum();
    let residual = reports
        .iter()
        .flat_map(|r| r.checks.iter())
        .filter(|c| !c.name.starts_with("character table"))
        .filter_map(|c| c.residual)
        .fold(0.0f64, f64::max);
    let detail = if failures.is_empty() {
        format!("{checks} checks, max residual {residual:.2e}")
    } else {
        format!("failures: {}", failures.join("; "))
    };
    (failures.is_empty(), detail)
}

fn opts() -> VerifyOptions {
    VerifyOptions::default()
}

fn ac1() -> (Vec<VerificationReport>, bool) {
    let t = Instant::now();
    let s = siegel(1);
    let reports: Vec<_> = (1..=2)
        .map(|dv| verify_weil_model(&build_model(&s, dv, SplittingChoice::default()).unwrap(), &opts()).unwrap())
        .collect();
    let (ok, detail) = summarize(&reports);
    let worst = reports.iter().flat_map(|r| &r.checks).filter_map(|c| c.residual).fold(0.0, f64::max);
    let ok = line("AC1 Weil-model well-formedness", ok && worst < 1e-9, t.elapsed(), Duration::from_secs(10), &detail);
    (reports, ok)
}

fn ac2() -> (Vec<VerificationReport>, bool) {
    let t = Instant::now();
    let s = siegel(1);
    let mut reports = Vec::new();
    for dv in 1..=2 {
        for chi_v in 0..4 {
            let m = build_model(&s, dv, SplittingChoice { chi_v, ..Default::default() }).unwrap();
            reports.push(verify_jacquet_isomorphism(&m, &standard_form(1), &opts()).unwrap());
        }
    }
    let m = build_model(&siegel(2), 1, SplittingChoice::default()).unwrap();
    let zero = verify_jacquet_isomorphism(&m, &standard_form(2), &opts()).unwrap();
    let zero_ok = zero.scenario["embedding"] == "none"
        && zero.checks.iter().any(|c| c.name == "classwise character equality" && c.lhs == Some(0));
    reports.push(zero);
    let (ok, detail) = summarize(&reports);
    let ok = line(
        "AC2 Jacquet module vs induced module",
        ok && zero_ok,
        t.elapsed(),
        Duration::from_secs(30),
        &format!("{detail}; zero-module case at dim X = 2, dim V = 1: {}", if zero_ok { "ok" } else { "bad" }),
    );
    (reports, ok)
}

fn ac3() -> (Vec<VerificationReport>, bool) {
    let t = Instant::now();
    let s = siegel(1);
    let mut reports = Vec::new();
    let mut cells = Vec::new();
    for dv in 1..=2 {
        let m = build_model(&s, dv, SplittingChoice::default()).unwrap();
        let (r, c) = verify_period_transfer(&m, &standard_form(1), &opts()).unwrap();
        reports.push(r);
        cells.push(c);
    }
    let grid_ok = cells[0].len() == 16 && cells.iter().flatten().all(|c| c.lhs == c.rhs);
    let (ok, detail) = summarize(&reports);
    let ok = line(
        "AC3 period transfer Hom dimensions",
        ok && grid_ok,
        t.elapsed(),
        Duration::from_secs(60),
        &format!("{detail}; cells: {} (dim V = 1), {} (dim V = 2)", cells[0].len(), cells[1].len()),
    );
    (reports, ok)
}

fn ac4() -> (Vec<VerificationReport>, bool) {
    let t = Instant::now();
    let s1 = siegel(1);
    let mut reports = Vec::new();
    for chi in all_characters(s1.ctx(), CharDomain::Units) {
        reports.push(verify_linear_filtration_full(&s1, &chi, &opts()).unwrap());
    }
    let bookkeeping = reports.iter().all(|r| {
        r.checks
            .iter()
            .any(|c| c.name == "classwise Mackey decomposition" && c.detail.contains("degree 12 = rank 1: 8 + rank 0: 4"))
    });
    let s2 = siegel(2);
    let strat = verify_rank_stratification(&s2, &opts()).unwrap();
    let census = strat.checks.iter().any(|c| c.name == "orbit census" && c.detail.ends_with("1 + 20 + 60") && c.passed);
    reports.push(strat);
    reports.push(verify_rank_stratification(&s1, &opts()).unwrap());
    reports.push(verify_parabolic_filtration(&s2, &opts()).unwrap());
    let (ok, detail) = summarize(&reports);
    let ok = line(
        "AC4 GL(X)-period filtration",
        ok && bookkeeping && census,
        t.elapsed(),
        Duration::from_secs(120),
        &format!("{detail}; 12 = 8 + 4 for all 8 characters: {bookkeeping}; census 1 + 20 + 60: {census}"),
    );
    (reports, ok)
}

fn ac5() -> bool {
    let t = Instant::now();
    let r = consistency_suite(1000, 2024).unwrap();
    let ok = r.passed()
        && r.linear_equals_shalika_sum == r.evaluations
        && r.fj_even_matches_theta == r.evaluations
        && r.support_constraint == r.evaluations
        && r.delta_trivial_count == 1000;
    line(
        "AC5 L-parameter consistency suite",
        ok,
        t.elapsed(),
        Duration::from_secs(5),
        &format!("{} shapes, {} evaluations, {} failures", r.shapes, r.evaluations, r.failures.len()),
    )
}

/// Table validation plus Frobenius reciprocity against a centralizer subgroup.
fn validate_group(name: &str, g: &MatrixGroup, seed: u64) -> Result<String, String> {
    let classes = conjugacy_classes(g).map_err(|e| e.to_string())?;
    let table = character_table(g, &classes, seed).map_err(|e| format!("{name}: {e}"))?;
    if table.orthogonality_residual >= ORTHOGONALITY_TOL {
        return Err(format!("{name}: residual {:.2e}", table.orthogonality_residual));
    }
    if table.sum_of_squares() != g.order() as u64 {
        return Err(format!("{name}: sum of squares {} != {}", table.sum_of_squares(), g.order()));
    }
    let x = g.element(*classes.reps().last().unwrap()).clone();
    let c = g.ctx();
    let h = g.subgroup(|m| m.mul(c, &x) == x.mul(c, m)).map_err(|e| e.to_string())?;
    let members = g.embed(&h).map_err(|e| e.to_string())?;
    let h_classes = conjugacy_classes(&h).map_err(|e| e.to_string())?;
    let h_table = character_table(&h, &h_classes, seed).map_err(|e| e.to_string())?;
    for psi in &h_table.characters {
        let per_element: Vec<Complex64> = (0..h.order()).map(|i| psi.values[h_classes.class_of(i)]).collect();
        let ind: ClassFunction = induce_values(&classes, &members, &per_element);
        for chi in &table.characters {
            let res = h_classes
                .class_function_from_elements(&restrict_values(&classes, chi, &members))
                .map_err(|e| e.to_string())?;
            let l = hom_dim(&classes, &ind, chi).map_err(|e| e.to_string())?;
            let r = hom_dim(&h_classes, psi, &res).map_err(|e| e.to_string())?;
            if l != r {
                return Err(format!("{name}: Frobenius reciprocity {l} != {r}"));
            }
        }
    }
    Ok(format!("{name}(|G|={}, {} classes)", g.order(), classes.count()))
}

fn ac6(reports: &[VerificationReport]) -> bool {
    let t = Instant::now();
    let ctx = ctx();
    let mut problems = Vec::new();
    let mut validated = Vec::new();

    // tables computed inside the verification runs
    for r in reports {
        for c in r.checks.iter().filter(|c| c.name.starts_with("character table") || c.name.starts_with("Frobenius")) {
            if !c.passed {
                problems.push(format!("{}: {}", c.name, c.detail));
            }
        }
    }

    // the groups enumerated by AC1-AC4
    let mut groups: Vec<(String, MatrixGroup)> = Vec::new();
    for d in 1..=2 {
        let v = build_space(&ctx, Epsilon::Hermitian, d, DiscChoice::Split);
        let by_search = unitary_by_search(&v).unwrap();
        let by_closure = unitary_by_closure(&v, DEFAULT_ORDER_BOUND).unwrap();
        let expected = if d == 1 { 4 } else { 96 };
        if by_search.order() != expected || by_search.elements() != by_closure.elements() {
            problems.push(format!("U({d},3): search {} vs closure {}", by_search.order(), by_closure.order()));
        }
        groups.push((format!("U({d},3)"), by_search));
    }
    let w = siegel(1).witt_space().unwrap();
    let uw_search = unitary_by_search(&w).unwrap();
    let uw_closure = unitary_by_closure(&w, DEFAULT_ORDER_BOUND).unwrap();
    if uw_search.elements() != uw_closure.elements() {
        problems.push("U(W) enumerations disagree".into());
    }
    groups.push(("U(W)".into(), uw_search));
    groups.push(("GL_1(F_9)".into(), enumerate_general_linear(&ctx, 1, DEFAULT_ORDER_BOUND).unwrap()));
    let u1 = groups[0].1.clone();
    let u2 = groups[1].1.clone();
    groups.push(("U(1) x U(1)".into(), MatrixGroup::direct_product(&u1, &u1).unwrap()));
    groups.push(("U(1) x U(2)".into(), MatrixGroup::direct_product(&u1, &u2).unwrap()));
    groups.push(("GL_2(F_9)".into(), siegel(2).gl().clone()));
    for (name, g) in &groups {
        match validate_group(name, g, 0) {
            Ok(s) => validated.push(s),
            Err(e) => problems.push(e),
        }
    }
    let detail = if problems.is_empty() {
        format!("validated {}; U(2,3) = 96 and U(1,3) = 4 by search and by closure", validated.join(", "))
    } else {
        format!("problems: {}", problems.join("; "))
    };
    line("AC6 character-engine validation", problems.is_empty(), t.elapsed(), Duration::from_secs(120), &detail)
}

fn ac7() -> bool {
    let t = Instant::now();
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs/acceptance.toml");
    let cfg = ScenarioConfig::load(&path).unwrap();
    let all = Selected { verify: true, mult: true };
    let a = run_scenario(&cfg, all).unwrap();
    let b = run_scenario(&cfg, all).unwrap();
    let (ja, jb) = (render_json(&a).unwrap(), render_json(&b).unwrap());
    let identical = ja == jb && render_text(&a) == render_text(&b);
    line(
        "AC7 deterministic reports",
        identical && a.passed,
        t.elapsed(),
        Duration::from_secs(120),
        &format!("{} jobs, {} bytes of JSON, identical: {identical}, suite passed: {}", a.jobs.len(), ja.len(), a.passed),
    )
}

#[test]
fn acceptance_criteria() {
    let (r1, ok1) = ac1();
    let (r2, ok2) = ac2();
    let (r3, ok3) = ac3();
    let (r4, ok4) = ac4();
    let ok5 = ac5();
    let all_reports: Vec<VerificationReport> = [r1, r2, r3, r4].concat();
    let ok6 = ac6(&all_reports);
    let ok7 = ac7();
    let results = [ok1, ok2, ok3, ok4, ok5, ok6, ok7];
    let failed: Vec<usize> = results.iter().enumerate().filter(|(_, ok)| !**ok).map(|(i, _)| i + 1).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
