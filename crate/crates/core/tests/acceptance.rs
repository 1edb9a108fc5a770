//! Acceptance criteria 1-10. Runs without the libtest harness so that the
//! PASS/FAIL table is always printed; exits non-zero if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sdefi::algebra::{parse_poly, CMatrix, CRational, LaurentPoly, UniPoly};
use sdefi::fixtures::{self, ZeroSumDrift};
use sdefi::ito::{check_strong, check_weak, lemma_identity_residual, Mode, SdeSystem};
use sdefi::mc::{conservation_test, simulate_paths, Allowances, SimConfig};
use sdefi::perturb::{build_perturbation, verify_perturbation};
use sdefi::resonance::{nonintegrability_report, weak_resonance_test, VerdictKind, CRIT_WEAK_HIGHER_ORDER, DEFAULT_K, DEFAULT_TOL};
use sdefi::search::{find_first_integrals, operator_matrix, MonomialBasis, OperatorKind};
use sdefi::spectral::{eigenvalues, linearization, Root};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn poly(sys: &SdeSystem, text: &str) -> LaurentPoly {
    parse_poly(text, &sys.var_names).expect("test polynomial")
}

fn criterion_1() -> Outcome {
    let dg = CMatrix::from_ints(&[&[1, -2, 0], &[0, 2, -1], &[-1, 0, 1]]);
    let eig = eigenvalues(&dg).map_err(err)?;
    let expected = UniPoly::from_ints(&[0, -5, 4, -1]);
    ensure(eig.det_a_minus_x() == expected, || format!("det(Dg - x) = {}", eig.det_a_minus_x()))?;
    let zero = eig.values.iter().filter(|r| r.is_exact_zero()).count();
    ensure(zero == 1, || "0 is not certified exactly once".into())?;
    for target in [Complex64::new(2.0, 1.0), Complex64::new(2.0, -1.0)] {
        let hit = eig.values.iter().any(|r| (r.value - target).norm() <= 1e-10);
        ensure(hit, || format!("{target} missing from {:?}", eig.values_c64()))?;
    }
    Ok(format!("det(Dg(0) - x) = {expected}; eigenvalues 0 (exact), 2+i, 2-i"))
}

fn criterion_2() -> Outcome {
    let (a, b) = (2, 3);
    let spec = linearization(&fixtures::zero_sum_system(a.into(), b.into(), ZeroSumDrift::Corrected)).map_err(err)?;
    let n = spec.a0.nrows();
    for j in 0..n {
        let s = (0..n).fold(CRational::zero(), |acc, i| &acc + spec.a0.get(i, j));
        ensure(s.is_zero(), || format!("column {j} of A0 sums to {s}"))?;
    }
    let vals = &spec.lambda.values;
    let zero = vals.iter().position(Root::is_exact_zero).ok_or("A0 has no exact zero eigenvalue")?;
    let rest: Complex64 = vals.iter().enumerate().filter(|&(i, _)| i != zero).map(|(_, r)| r.value).sum();
    let alpha = (a + b - 3) as f64;
    ensure((rest - alpha).norm() <= 1e-9, || format!("remaining pair sums to {rest}, expected {alpha}"))?;
    Ok(format!("A0 column sums vanish; exact 0; other pair sums to {rest:.3e}"))
}

fn criterion_3() -> Outcome {
    let sys = fixtures::two_body_int(1, 1, 1, 1);
    let m = poly(&sys, "r^2*w");
    let e = poly(&sys, "1/2*v^2 + 1/2*r^2*w^2 - r^-1");
    ensure(check_weak(&sys, &m).map_err(err)?.holds, || "weak check of r^2 w fails".into())?;
    let strong = check_strong(&sys, &m).map_err(err)?;
    let nonzero: Vec<_> = strong.nonvanishing().collect();
    ensure(
        !strong.holds && nonzero.len() == 1 && nonzero[0].poly == poly(&sys, "r"),
        || format!("strong residuals of r^2 w: {:?}", nonzero.iter().map(|r| (&r.name, sys.poly_text(&r.poly))).collect::<Vec<_>>()),
    )?;
    let weak_e = check_weak(&sys, &e).map_err(err)?;
    let res = weak_e.residual("generator").cloned().unwrap_or_else(|| LaurentPoly::zero(4));
    ensure(res == poly(&sys, "1/2*r^2 + 1/2"), || format!("weak residual of E = {}", sys.poly_text(&res)))?;
    Ok(format!("M weak holds; strong residual {}; E weak residual {}", sys.poly_text(&nonzero[0].poly), sys.poly_text(&res)))
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1e44a);
    let mut max_terms = 0;
    for case in 0..200 {
        let dim = 1 + case % 4;
        let phi = common::poly(&mut rng, dim, -2, 4, 8);
        let g = common::field(&mut rng, dim, -2, 4, 8);
        max_terms = max_terms.max(phi.len());
        let r = lemma_identity_residual(&phi, &g).map_err(err)?;
        ensure(r.is_zero(), || format!("case {case}: residual has {} terms", r.len()))?;
    }
    Ok(format!("200 random pairs, dims 1-4, exponents -2..4, up to {max_terms} terms: residual identically 0"))
}

fn criterion_5() -> Outcome {
    let sys = fixtures::linear_ode(&CMatrix::from_ints(&[&[1, 0], &[0, -2]]));
    let mut checked = 0;
    for r in 0..=5 {
        let basis = MonomialBasis::homogeneous(2, r).map_err(err)?;
        let op = operator_matrix(&sys, &basis, OperatorKind::Weak).map_err(err)?;
        for (j, e) in basis.monomials.iter().enumerate() {
            for i in 0..op.nrows() {
                let v = op.get(i, j);
                let want = if i == j { CRational::from_int(e.0[0] - 2 * e.0[1]) } else { CRational::zero() };
                ensure(v == want, || format!("degree {r}: entry ({i}, {j}) = {v}, expected {want}"))?;
                checked += 1;
            }
        }
    }
    Ok(format!("degrees 0..5 diagonal with l1 - 2 l2 on the diagonal ({checked} entries)"))
}

fn criterion_6() -> Outcome {
    let sys = fixtures::gbm(CRational::one(), CRational::one());
    let basis = find_first_integrals(&sys, Mode::Weak, -1, 1).map_err(err)?;
    let inv = poly(&sys, "x^-1");
    ensure(basis.basis == vec![inv.clone()], || format!("weak basis on [-1, 1]: {:?}", basis.basis))?;
    let ens = simulate_paths(&sys, &SimConfig::real(&[1.0], 1e-3, 1.0, 10_000, 20240601)).map_err(err)?;
    let r = conservation_test(&ens, &inv, Mode::Weak, Allowances::default()).map_err(err)?;
    let bound = 3.0 * r.stderr + 0.01;
    ensure(r.delta <= bound, || format!("|mean - 1| = {:.4e} > {bound:.4e}", r.delta))?;
    Ok(format!("basis {{x^-1}}; |mean X_T^-1 - 1| = {:.3e} <= 3*stderr + 0.01 = {bound:.3e} ({} exits)", r.delta, r.n_exited))
}

fn criterion_7() -> Outcome {
    let sys = fixtures::lotka_volterra_2();
    let rep = nonintegrability_report(&sys, DEFAULT_K, DEFAULT_TOL).map_err(err)?;
    let v = rep.verdict(VerdictKind::NoWeakAnalytic).ok_or("no NO_WEAK_ANALYTIC verdict")?;
    ensure(v.theorem == CRIT_WEAK_HIGHER_ORDER, || format!("verdict rests on {}", v.theorem))?;
    ensure(v.hypotheses_checked.iter().all(|h| h.holds), || "a hypothesis is not verified".into())?;
    ensure(v.hypotheses_checked.iter().any(|h| h.name.contains("O(|x|^2)")), || "noise order not checked".into())?;
    let reason = match &v.epistemic_status {
        sdefi::resonance::EpistemicStatus::Certified { reason } => reason.clone(),
        other => return Err(format!("verdict is {other}")),
    };
    ensure(reason.contains("half-plane"), || format!("certificate: {reason}"))?;
    let basis = find_first_integrals(&sys, Mode::Weak, 1, 4).map_err(err)?;
    ensure(basis.is_empty(), || format!("weak search on [1, 4] found {} integrals", basis.len()))?;
    Ok(format!("NO_WEAK_ANALYTIC certified ({reason}); weak search [1, 4] empty"))
}

fn criterion_8() -> Outcome {
    let exact = |x: i64| Root { value: Complex64::new(x as f64, 0.0), exact: Some(CRational::from_int(x)) };
    let w = weak_resonance_test(&[exact(-2)], &[vec![exact(2)]], DEFAULT_K, DEFAULT_TOL).map_err(err)?;
    ensure(w.violations.first() == Some(&vec![1]), || format!("violations {:?}", w.violations))?;
    let sys = fixtures::multiplicative_noise(2.into());
    let x = poly(&sys, "x");
    ensure(check_weak(&sys, &x).map_err(err)?.holds, || "check_weak(x) fails".into())?;
    let ens = simulate_paths(&sys, &SimConfig::real(&[1.0], 1e-3, 1.0, 10_000, 8)).map_err(err)?;
    let r = conservation_test(&ens, &x, Mode::Weak, Allowances::default()).map_err(err)?;
    ensure(r.delta <= 3.0 * r.stderr, || format!("|mean - x0| = {:.3e} > 3*stderr = {:.3e}", r.delta, 3.0 * r.stderr))?;
    Ok(format!("violation k = 1; check_weak(x) exact; |mean - x0| = {:.3e} <= {:.3e}", r.delta, 3.0 * r.stderr))
}

fn criterion_9() -> Outcome {
    let sys = fixtures::harmonic_oscillator();
    let before = find_first_integrals(&sys, Mode::Strong, 2, 2).map_err(err)?;
    let h = poly(&sys, "x1^2 + x2^2");
    ensure(before.basis == vec![h], || format!("strong basis at degree 2: {:?}", before.basis))?;
    let plan = build_perturbation(&sys, 0.37, 8).map_err(err)?;
    ensure(plan.exponents == vec![1, 2], || format!("exponents {:?}", plan.exponents))?;
    let v = verify_perturbation(&sys, &plan, 4).map_err(err)?;
    ensure(v.pass, || format!("{} weak integrals survive", v.counterexamples.len()))?;
    Ok(format!("x1^2 + x2^2 found; a = (1, 2); no weak integral of degree <= 4 after perturbation (min |E| = {:.3e})", plan.residual_min))
}

fn criterion_10() -> Outcome {
    let systems: Vec<(&str, SdeSystem)> = vec![
        ("gbm", fixtures::gbm(CRational::one(), CRational::one())),
        ("gbm(-1, 2)", fixtures::gbm((-1).into(), 2.into())),
        ("martingale", fixtures::multiplicative_noise(2.into())),
        ("oscillator", fixtures::harmonic_oscillator()),
        ("saddle", fixtures::linear_ode(&CMatrix::from_ints(&[&[1, 0], &[0, -1]]))),
        ("two-body", fixtures::two_body_int(1, 1, 1, 1)),
        ("zero_sum_system", fixtures::zero_sum_system(2.into(), 3.into(), ZeroSumDrift::Verbatim)),
        ("zero_sum_system corrected", fixtures::zero_sum_system(2.into(), 3.into(), ZeroSumDrift::Corrected)),
        ("lv2", fixtures::lotka_volterra_2()),
        ("lv3", fixtures::lotka_volterra_3()),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut certified, mut strong_pairs) = (0, 0);
    for (name, sys) in &systems {
        if let Ok(rep) = nonintegrability_report(sys, DEFAULT_K, DEFAULT_TOL) {
            if rep.has_certified(VerdictKind::NoWeakAnalytic) {
                let basis = find_first_integrals(sys, Mode::Weak, 1, 4).map_err(err)?;
                ensure(basis.is_empty(), || format!("{name}: certified NO_WEAK_ANALYTIC but {} weak integrals", basis.len()))?;
                certified += 1;
            }
        }
        let (lo, hi) = if sys.dim() <= 2 { (-2, 3) } else { (0, 2) };
        let mut candidates = find_first_integrals(sys, Mode::Strong, lo.max(1), hi).map_err(err)?.basis;
        candidates.extend((0..40).map(|_| common::poly(&mut rng, sys.dim(), lo, hi, 4)));
        for phi in candidates.iter().filter(|p| !p.is_constant()) {
            if check_strong(sys, phi).map_err(err)?.holds {
                strong_pairs += 1;
                ensure(check_weak(sys, phi).map_err(err)?.holds, || format!("{name}: {} strong but not weak", sys.poly_text(phi)))?;
            }
        }
    }
    ensure(certified > 0 && strong_pairs > 0, || format!("vacuous: {certified} certified fixtures, {strong_pairs} strong integrals"))?;
    Ok(format!("{} fixtures; {certified} certified NO_WEAK_ANALYTIC with empty weak search; {strong_pairs} strong integrals all weak", systems.len()))
}

type Criterion = (u32, &'static str, fn() -> Outcome, Option<Duration>);

fn main() {
    let criteria: [Criterion; 10] = [
        (1, "zero-sum noise spectrum", criterion_1, Some(Duration::from_secs(1))),
        (2, "corrected zero-sum A0 spectrum", criterion_2, None),
        (3, "two-body residuals", criterion_3, Some(Duration::from_secs(1))),
        (4, "Hessian identity on random pairs", criterion_4, None),
        (5, "diagonal operator spectrum", criterion_5, None),
        (6, "GBM search and Monte Carlo", criterion_6, Some(Duration::from_secs(60))),
        (7, "Lotka-Volterra certified verdict", criterion_7, None),
        (8, "weak-resonance counterexample", criterion_8, None),
        (9, "oscillator perturbation pipeline", criterion_9, Some(Duration::from_secs(30))),
        (10, "verdict/search and strong/weak consistency", criterion_10, None),
    ];
    let mut failed = 0;
    for (id, name, run, budget) in criteria {
        let start = Instant::now();
        let mut outcome = run();
        let took = start.elapsed();
        if let (Ok(_), Some(b)) = (&outcome, budget) {
            if took > b {
                outcome = Err(format!("took {took:.2?}, budget {b:?}"));
            }
        }
        match outcome {
            Ok(detail) => println!("PASS criterion {id:>2} ({name}) [{took:.2?}]: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {id:>2} ({name}) [{took:.2?}]: {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
