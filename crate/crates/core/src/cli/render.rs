//! Plain-text rendering of reports.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::mc::ConservationReport;
use crate::resonance::{LatticeReport, ResonanceReport};
use crate::search::IntegralBasisSummary;
use crate::spectral::{H1Verdict, H1Witness, Root};

use super::{AnalyzeReport, CandidateCheck, CheckReport, PerturbReport, ResonanceOutput, SimulateReport, SystemSummary};

pub fn c64(z: Complex64) -> String {
    let g = |x: f64| format!("{:.10}", x).trim_end_matches('0').trim_end_matches('.').to_string();
    let re = if z.re == 0.0 { "0".to_string() } else { g(z.re) };
    match z.im {
        im if im == 0.0 || im.abs() < 1e-300 => re,
        im if im > 0.0 => format!("{re}+{}i", g(im)),
        im => format!("{re}-{}i", g(-im)),
    }
}

pub fn root(r: &Root) -> String {
    match &r.exact {
        Some(e) => e.to_string(),
        None => format!("~{}", c64(r.value)),
    }
}

fn roots(rs: &[Root]) -> String {
    format!("[{}]", rs.iter().map(root).collect::<Vec<_>>().join(", "))
}

fn vectors(vs: &[Vec<i64>]) -> String {
    const SHOWN: usize = 12;
    let mut parts: Vec<String> = vs.iter().take(SHOWN).map(|v| format!("{v:?}")).collect();
    if vs.len() > SHOWN {
        parts.push(format!("... ({} total)", vs.len()));
    }
    format!("{{{}}}", parts.join(", "))
}

pub fn system(s: &SystemSummary, out: &mut String) {
    let _ = writeln!(out, "system: dim {}, noise {}, variables {}", s.dim, s.noise_dim, s.var_names.join(", "));
    for (name, f) in s.var_names.iter().zip(&s.drift) {
        let _ = writeln!(out, "  d{name}: drift {f}");
    }
    for (i, g) in s.diffusion.iter().enumerate() {
        let _ = writeln!(out, "  g_{}: [{}]", i + 1, g.join(", "));
    }
}

pub fn candidate(c: &CandidateCheck, out: &mut String) {
    let verdict = if c.holds { "PASS" } else { "FAIL" };
    let _ = writeln!(out, "{} {} {}: {}", c.mode, verdict, c.name, c.phi);
    for r in &c.residuals {
        let _ = writeln!(out, "    residual {} = {}", r.name, r.poly);
    }
}

pub fn check(r: &CheckReport) -> String {
    let mut out = String::new();
    for c in &r.checks {
        candidate(c, &mut out);
    }
    out
}

pub fn search(s: &IntegralBasisSummary, out: &mut String) {
    let _ = writeln!(
        out,
        "{} first integrals on window [{}, {}]: {} monomials, operator rank {}",
        s.mode, s.window[0], s.window[1], s.monomials, s.operator_rank
    );
    if s.basis.is_empty() {
        let _ = writeln!(out, "  none");
    }
    for (i, b) in s.basis.iter().enumerate() {
        let _ = writeln!(out, "  [{}] {b}", i + 1);
    }
    if let Some(r) = s.independence_rank {
        let _ = writeln!(out, "  functional independence rank {r}");
    }
}

fn lattice(l: &LatticeReport, out: &mut String) {
    let body = if l.is_empty() { "empty".to_string() } else { format!("{} rank {}", vectors(&l.vectors), l.rank) };
    let _ = writeln!(out, "  S({}) over {}: {body} [{}]", l.label, l.lattice, l.completeness);
}

pub fn resonance(r: &ResonanceReport, out: &mut String) {
    let s = &r.spectral;
    let _ = writeln!(out, "linearization at the origin");
    let _ = writeln!(out, "  Df(0) = {}", s.a_f);
    let _ = writeln!(out, "    eigenvalues {}", roots(&s.mu0.values));
    for (i, (m, e)) in s.a_g.iter().zip(&s.mu).enumerate() {
        let _ = writeln!(out, "  Dg_{}(0) = {m}", i + 1);
        let _ = writeln!(out, "    eigenvalues {}", roots(&e.values));
    }
    let _ = writeln!(out, "  A0 = Df(0) - 1/2 sum Dg_i(0)^2 = {}", s.a0);
    let _ = writeln!(out, "    char poly det(A0 - x) = {}", s.lambda.det_a_minus_x());
    let _ = writeln!(out, "    eigenvalues {}", roots(&s.lambda.values));
    let h1 = match r.h1.verdict {
        H1Verdict::Holds => "holds".to_string(),
        H1Verdict::Fails => match &r.h1.witness {
            Some(H1Witness::Commutator { left, right, .. }) => format!("fails: [{left}, {right}] != 0"),
            Some(H1Witness::NotDiagonalizable { matrix }) => format!("fails: {matrix} is not diagonalizable"),
            None => "fails".to_string(),
        },
        H1Verdict::Unknown => "unknown".to_string(),
    };
    let _ = writeln!(out, "simultaneous diagonalizability (H1): {h1}");
    if let Some(p) = &r.paired {
        let _ = writeln!(out, "  paired spectrum: lambda {}", roots(&p.lambda));
        for (i, m) in p.mu.iter().enumerate() {
            let _ = writeln!(out, "                   mu^{} {}", i + 1, roots(m));
        }
    }
    let _ = writeln!(out, "resonances (K = {}, tol = {:e})", r.k_bound, r.tol);
    for l in r.lattices.iter().chain(&r.drift_lattices) {
        lattice(l, out);
    }
    let _ = writeln!(out, "  s_min = {}", r.s_min);
    if let Some(c) = r.weak_certificate {
        let _ = writeln!(out, "  weak resonances: {} ({c:?})", if r.weak_violations.is_empty() { "none".into() } else { vectors(&r.weak_violations) });
    }
    let _ = writeln!(out, "verdicts");
    for v in &r.verdicts {
        let _ = writeln!(out, "  {v}");
        let hyps: Vec<String> = v.hypotheses_checked.iter().map(|h| format!("{}: {}", h.name, if h.holds { "yes" } else { "no" })).collect();
        let _ = writeln!(out, "    hypotheses {}", hyps.join(", "));
    }
}

pub fn resonance_output(r: &ResonanceOutput) -> String {
    let mut out = String::new();
    resonance(&r.report, &mut out);
    if !r.integer_lattices.is_empty() {
        let _ = writeln!(out, "integer lattice");
        for l in &r.integer_lattices {
            lattice(l, &mut out);
        }
    }
    out
}

pub fn conservation(name: &str, r: &ConservationReport, out: &mut String) {
    let verdict = match r.pass {
        Some(true) => "PASS",
        Some(false) => "FAIL",
        None => "NO DATA",
    };
    let _ = writeln!(out, "{} {verdict} {name}: Phi(x0) = {}", r.mode, c64(Complex64::new(r.phi_x0[0], r.phi_x0[1])));
    let stat = match r.mode {
        crate::ito::Mode::Weak => format!("|mean - Phi(x0)| = {:.3e}, stderr {:.3e}", r.delta, r.stderr),
        crate::ito::Mode::Strong => format!("max |Phi(X) - Phi(x0)| = {:.3e}", r.max_dev),
    };
    let _ = writeln!(out, "    {stat}; threshold {} = {:.3e}", r.thresholds.rule, r.thresholds.value);
    let _ = writeln!(out, "    paths used {}, excluded {}, exited {}", r.n_used, r.n_excluded, r.n_exited);
}

pub fn simulate(r: &SimulateReport) -> String {
    let mut out = String::new();
    let c = &r.config;
    let _ = writeln!(out, "Euler-Maruyama: {} paths, h = {}, T = {}, seed {}", c.paths, c.step, c.horizon, c.seed);
    if let Some(first) = r.checks.first() {
        let _ = writeln!(out, "stopping times: {}", first.report.stopping_times);
    }
    for s in &r.checks {
        conservation(&s.name, &s.report, &mut out);
    }
    out
}

pub fn perturb(r: &PerturbReport) -> String {
    let mut out = String::new();
    let p = &r.plan;
    let _ = writeln!(out, "det Df(0) = {}", p.det_df0);
    let _ = writeln!(out, "eigenvalues {}", p.lambda.iter().map(|z| c64(*z)).collect::<Vec<_>>().join(", "));
    let _ = writeln!(out, "exponents a = {:?}, u = {}", p.exponents, p.u);
    let _ = writeln!(out, "mu = {:?}", p.mu);
    for rj in &p.rejected {
        let _ = writeln!(out, "  rejected u = {} (E vanishes at l = {:?})", rj.u, rj.offending);
    }
    let _ = writeln!(out, "min |E(l)| over |l| <= {} is {:.3e} at l = {:?}", p.verified_to, p.residual_min, p.residual_argmin);
    let _ = writeln!(out, "P = {}", p.p_exact);
    let _ = writeln!(out, "perturbed diffusion g(x) = P x:");
    let names = r.system.var_names.clone().unwrap_or_default();
    for (name, g) in names.iter().zip(&r.diffusion) {
        let _ = writeln!(out, "  d{name}: {g}");
    }
    match &r.verification {
        Some(v) => {
            let _ = writeln!(out, "weak integrals of degree 1..{}: {}", v.dmax, if v.pass { "none (PASS)" } else { "found (FAIL)" });
            for b in &v.counterexamples {
                let _ = writeln!(out, "  {b}");
            }
            let _ = writeln!(out, "scope: {}", v.scope_note);
        }
        None => {
            let _ = writeln!(out, "verification skipped (degree 0)");
        }
    }
    out
}

pub fn analyze(r: &AnalyzeReport) -> String {
    let mut out = String::new();
    system(&r.system, &mut out);
    out.push('\n');
    match (&r.resonance, &r.resonance_error) {
        (Some(rep), _) => resonance(rep, &mut out),
        (None, Some(e)) => {
            let _ = writeln!(out, "resonance analysis not applicable: {e}");
        }
        _ => {}
    }
    out.push('\n');
    for s in &r.searches {
        match (&s.result, &s.error) {
            (Some(b), _) => search(b, &mut out),
            (None, Some(e)) => {
                let _ = writeln!(out, "{} search failed: {e}", s.mode);
            }
            _ => {}
        }
    }
    if let Some(c) = &r.count_bound {
        let _ = writeln!(
            out,
            "strong integrals found: {} independent, bound {} ({}), {}",
            c.independence_rank,
            c.s_min,
            if c.bound_certified { "certified" } else { "bounded" },
            if c.consistent { "consistent" } else { "INCONSISTENT" }
        );
    }
    if !r.candidates.is_empty() {
        out.push('\n');
        let _ = writeln!(out, "candidates");
        for c in &r.candidates {
            candidate(c, &mut out);
        }
    }
    if let Some(sim) = &r.simulation {
        out.push('\n');
        out.push_str(&simulate(sim));
    }
    out
}
