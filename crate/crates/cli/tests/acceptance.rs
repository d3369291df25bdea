//! Acceptance criteria, each against a closed form computed here rather than
//! by the library. Prints one PASS/FAIL line per criterion and exits nonzero
//! if any fails.

use std::panic::{self, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use phibnorm::completeness::{limit_uniqueness_probe, operator_seq_limit};
use phibnorm::operator::{
    bounded_certificate, counterexample_suite, defn_equivalence_check, equivalence_with_m, finite_dim_boundedness_sweep,
    independence_constant, independence_inequality_check, CounterexampleVariant, ProbeSettings, DEFAULT_CEILING,
};
use phibnorm::opnorm::ALPHA_TOL;
use phibnorm::sampling;
use phibnorm::space::sequence::SequenceSpec;
use phibnorm::space::LEVEL_TOL;
use phibnorm::{Continuity, Decay, FuzzySpace, LinearOperator, OperatorNorm, OperatorSequence, Profile, SphereSampling, TNorm};
use phibnorm_cli::report::to_jsonl;
use phibnorm_cli::{run_command, Command, RunConfig};
use rand_distr::{Distribution, StandardNormal};

type Outcome = Result<(), String>;

const SEED: u64 = 7;

fn grid() -> Vec<f64> {
    (1..10).map(|k| k as f64 / 10.0).collect()
}

fn space(n: usize, p: f64, profile: Profile, tn: TNorm) -> Arc<FuzzySpace> {
    Arc::new(FuzzySpace::euclidean(n, p, profile, tn).unwrap())
}

fn euclid(x: &DVector<f64>) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn random_matrix(rng: &mut sampling::SampleRng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(&mut *rng))
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, elapsed: Duration) -> Outcome {
    ensure(elapsed < limit, || format!("took {elapsed:?}, limit {limit:?}"))
}

fn tnorm_axioms() -> Outcome {
    let start = Instant::now();
    for tn in TNorm::builtins() {
        let r = tn.axiom_check(10_000, SEED, 1e-12);
        ensure(r.passed(), || format!("{}: {:?}", tn.name(), r.failures().collect::<Vec<_>>()))?;
    }
    let avg = TNorm::custom("average", Continuity::Continuous, |a, b| (a + b) / 2.0);
    let r = avg.axiom_check(10_000, SEED, 1e-12);
    let id = r.outcome("identity").ok_or("no identity outcome")?;
    let w = id.witness.as_ref().ok_or("averaging passed the identity axiom")?;
    // T(a, 1) = (a + 1)/2 differs from a unless a = 1
    let a = w.inputs[0];
    ensure(!id.passed && ((a + 1.0) / 2.0 - a).abs() > 1e-12, || format!("bad witness {w:?}"))?;
    within(Duration::from_secs(1), start.elapsed())
}

fn level_infimum_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = sampling::rng(SEED);
    let recip = space(3, 1.0, Profile::Reciprocal, TNorm::Minimum);
    let step = space(3, 1.0, Profile::step(0.5).unwrap(), TNorm::Minimum);
    for _ in 0..100 {
        let x = DVector::from_fn(3, |_, _| StandardNormal.sample(&mut rng));
        let norm = euclid(&x);
        for a in grid() {
            let r = recip.level_infimum(&x, a, false, LEVEL_TOL).unwrap().value;
            let expect = norm / (1.0 - a);
            ensure((r - expect).abs() <= 1e-9, || format!("reciprocal {x:?} alpha {a}: {r} vs {expect}"))?;
            let s = step.level_infimum(&x, a, false, LEVEL_TOL).unwrap().value;
            let expect = if a <= 0.5 { 0.0 } else { norm };
            ensure((s - expect).abs() <= 1e-9, || format!("step {x:?} alpha {a}: {s} vs {expect}"))?;
        }
    }
    within(Duration::from_secs(5), start.elapsed())
}

fn space_axioms() -> Outcome {
    let cases = [
        space(3, 1.0, Profile::Reciprocal, TNorm::Minimum),
        // min fails the p = 2 triangle for every K; bounded difference is the weakest built-in that holds
        space(3, 2.0, Profile::Reciprocal, TNorm::BoundedDifference),
        space(3, 1.0, Profile::step(0.5).unwrap(), TNorm::Minimum),
    ];
    for sp in &cases {
        let expect_k = 2f64.powf(sp.rho().p() - 1.0);
        ensure(sp.k() == expect_k, || format!("{}: K = {}", sp.describe(), sp.k()))?;
        let r = sp.axiom_check_bn(10_000, SEED, 1e-9);
        ensure(r.axioms.passed(), || format!("{}: {:?}", sp.describe(), r.axioms.failures().collect::<Vec<_>>()))?;
        let tri = r.axioms.outcome("b-triangle").ok_or("no triangle outcome")?;
        ensure(tri.checked >= 10_000, || format!("triangle checked only {}", tri.checked))?;
    }
    Ok(())
}

fn counterexample() -> Outcome {
    let start = Instant::now();
    let g = grid();
    let out = counterexample_suite(CounterexampleVariant::StepDomain, 2, &g, SphereSampling::new(512, SEED), &ProbeSettings::default())
        .map_err(|e| e.to_string())?;
    ensure(out.continuous && !out.bounded, || format!("continuous {} bounded {}", out.continuous, out.bounded))?;
    let expect: Vec<f64> = g.iter().copied().filter(|&a| a >= 0.5).collect();
    ensure(out.unbounded_alphas == expect, || format!("unbounded at {:?}", out.unbounded_alphas))?;
    for e in out.certificate.entries.iter().filter(|e| e.alpha < 0.5) {
        // d^Y_α(2x) = 2‖x‖/(1-α) over d^X_{1-α}(x) = ‖x‖
        let m = e.m().ok_or_else(|| format!("alpha {} unbounded", e.alpha))?;
        let expect = 2.0 / (1.0 - e.alpha);
        ensure((m - expect).abs() <= 1e-6, || format!("alpha {}: {m} vs {expect}", e.alpha))?;
    }
    within(Duration::from_secs(10), start.elapsed())
}

fn equivalence() -> Outcome {
    let sp = space(2, 1.0, Profile::Reciprocal, TNorm::Minimum);
    let other = space(3, 1.0, Profile::piecewise_linear(vec![(0.5, 0.0), (2.0, 0.7), (4.0, 1.0)]).unwrap(), TNorm::Minimum);
    let ops = [
        LinearOperator::new(DMatrix::from_row_slice(2, 2, &[1.0, 0.5, -2.0, 3.0]), sp.clone(), sp.clone()).unwrap(),
        LinearOperator::new(DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.5, -1.0, 2.0, 0.25]), sp.clone(), other).unwrap(),
    ];
    for t in &ops {
        let sph = SphereSampling::new(512, SEED);
        let cert = bounded_certificate(t, &grid(), sph, DEFAULT_CEILING).unwrap();
        ensure(cert.is_bounded(), || "operator not certified".into())?;
        for e in &cert.entries {
            let out = defn_equivalence_check(t, &cert, e.alpha, 10_000, SEED + 1, 1e-9).unwrap();
            ensure(out.passed() && out.checked >= 10_000, || format!("{out:?}"))?;
            let m = e.m().unwrap();
            let halved = equivalence_with_m(t, e.alpha, m / 2.0, sph, 10_000, SEED + 1, 1e-9).unwrap();
            ensure(halved.witness.is_some() && halved.implication_violations > 0, || format!("halved M not refuted: {halved:?}"))?;
        }
    }
    Ok(())
}

fn sweep() -> Outcome {
    let g = grid();
    let y = space(2, 1.0, Profile::Reciprocal, TNorm::Minimum);
    let out = finite_dim_boundedness_sweep(space(3, 1.0, Profile::Reciprocal, TNorm::Minimum), y.clone(), 50, &g, SphereSampling::new(512, SEED), SEED).unwrap();
    ensure(out.precondition_met && out.operators == 50, || "sweep did not run".into())?;
    ensure(out.all_bounded(), || format!("unbounded operators {:?}", out.unbounded))?;
    ensure(out.certificates.iter().all(|c| c.entries.len() == g.len() && c.is_bounded()), || "missing levels".into())?;
    let refused = finite_dim_boundedness_sweep(space(3, 1.0, Profile::step(0.5).unwrap(), TNorm::Minimum), y, 50, &g, SphereSampling::new(512, SEED), SEED).unwrap();
    ensure(!refused.precondition_met && !refused.all_bounded() && refused.certificates.is_empty(), || "step domain was certified".into())
}

fn independence() -> Outcome {
    let mut rng = sampling::rng(SEED);
    let e = |i: usize, n: usize| DVector::from_fn(n, |j, _| if i == j { 1.0 } else { 0.0 });
    let cases: Vec<(Arc<FuzzySpace>, Vec<DVector<f64>>)> = vec![
        (space(2, 1.0, Profile::Reciprocal, TNorm::Minimum), vec![e(0, 2), e(1, 2)]),
        (space(3, 1.0, Profile::Reciprocal, TNorm::Product), (0..3).map(|_| DVector::from_fn(3, |_, _| StandardNormal.sample(&mut rng))).collect()),
        (space(2, 2.0, Profile::Reciprocal, TNorm::BoundedDifference), vec![e(0, 2), DVector::from_vec(vec![1.0, 1.0])]),
    ];
    for (i, (sp, basis)) in cases.iter().enumerate() {
        let ic = independence_constant(sp, basis, 0.5, 64).unwrap();
        ensure(ic.c_alpha > 0.0, || format!("case {i}: c_alpha = {}", ic.c_alpha))?;
        if i == 0 {
            // q(1/2) · min over the ℓ¹ sphere of ‖β‖₂ = 2/√2
            ensure((ic.c_alpha - 2f64.sqrt()).abs() < 1e-6, || format!("c_alpha = {} vs sqrt 2", ic.c_alpha))?;
        }
        let out = independence_inequality_check(sp, &ic, 1_000, SEED, 1e-9).unwrap();
        ensure(out.passed() && out.checked >= 1_000, || format!("case {i}: {out:?}"))?;
    }
    Ok(())
}

fn operator_norm_closed_form() -> Outcome {
    let sp = space(2, 1.0, Profile::Reciprocal, TNorm::Minimum);
    let i = OperatorNorm::with_defaults(LinearOperator::identity(sp.clone()), SEED).unwrap();
    for s in [0.5, 1.0, 3.0] {
        let n = i.norm(s).unwrap();
        ensure((n - s / (1.0 + s)).abs() <= 1e-6, || format!("N(I, {s}) = {n}"))?;
    }
    let z = OperatorNorm::with_defaults(LinearOperator::zero(sp.clone(), sp).unwrap(), SEED).unwrap();
    for s in [1e-9, 0.5, 1.0, 3.0, 1e6] {
        ensure(z.norm(s).unwrap() == 1.0, || format!("N(0, {s}) != 1"))?;
    }
    for s in [0.0, -1e-12, -1.0, -1e6] {
        ensure(i.norm(s).unwrap() == 0.0 && z.norm(s).unwrap() == 0.0, || format!("N(T, {s}) != 0"))?;
    }
    Ok(())
}

fn operator_norm_axioms() -> Outcome {
    let mut rng = sampling::rng(SEED);
    let sph = SphereSampling::new(128, SEED);
    let s_grid = [0.25, 0.5, 1.0, 2.0, 5.0];
    for p in [1.0, 2.0] {
        let sp = space(2, p, Profile::Reciprocal, TNorm::Minimum);
        for _ in 0..3 {
            let t = LinearOperator::new(random_matrix(&mut rng, 2, 2), sp.clone(), sp.clone()).unwrap();
            let e = OperatorNorm::new(t.clone(), sph, ALPHA_TOL).unwrap();
            for lambda in [2.0f64, 3.0, 0.5] {
                let scaled = OperatorNorm::new(t.scaled(lambda), sph, ALPHA_TOL).unwrap();
                let phi = lambda.abs().powf(p);
                for s in s_grid {
                    let (lhs, rhs) = (scaled.norm(s).unwrap(), e.norm(s / phi).unwrap());
                    ensure((lhs - rhs).abs() <= 2e-6, || format!("p={p} lambda={lambda} s={s}: {lhs} vs {rhs}"))?;
                }
            }
        }
    }

    let sp = space(2, 1.0, Profile::Reciprocal, TNorm::Minimum);
    let k = sp.k();
    let fine: Vec<f64> = (1..100).map(|i| i as f64 / 100.0).collect();
    for pair in 0..100 {
        let t1 = LinearOperator::new(random_matrix(&mut rng, 2, 2), sp.clone(), sp.clone()).unwrap();
        let t2 = t1.with_matrix(random_matrix(&mut rng, 2, 2)).unwrap();
        let sum = OperatorNorm::new(t1.combine(1.0, &t2, 1.0).unwrap(), sph, ALPHA_TOL).unwrap();
        let e1 = OperatorNorm::new(t1, sph, ALPHA_TOL).unwrap();
        let e2 = OperatorNorm::new(t2, sph, ALPHA_TOL).unwrap();
        for s in s_grid {
            for t in s_grid {
                let lhs = sum.norm(s + k * t).unwrap();
                let rhs = e1.norm(s).unwrap().min(e2.norm(t).unwrap());
                ensure(lhs >= rhs - 1e-9, || format!("pair {pair}, s={s}, t={t}: {lhs} < {rhs}"))?;
            }
        }
        for e in [&e1, &e2, &sum] {
            for g in [grid(), fine.clone()] {
                let vals: Vec<f64> = g.iter().map(|&a| e.g(a).unwrap()).collect();
                ensure(vals.windows(2).all(|w| w[0] <= w[1]), || format!("pair {pair}: g not monotone {vals:?}"))?;
            }
        }
    }
    Ok(())
}

fn uniqueness() -> Outcome {
    let sp = FuzzySpace::euclidean(2, 1.0, Profile::Reciprocal, TNorm::Minimum).unwrap();
    let x = DVector::from_vec(vec![1.0, -1.0]);
    let seq = SequenceSpec::power(x.clone(), DVector::from_vec(vec![0.3, 0.4]), 1.0).with_limit(x.clone());
    let decoys = vec![
        DVector::from_vec(vec![1.6, -0.2]),
        DVector::from_vec(vec![-2.0, 3.0]),
        DVector::from_vec(vec![1.0, -0.99]),
    ];
    for alpha in [0.25, 0.5, 0.75] {
        let out = limit_uniqueness_probe(&sp, &seq, &decoys, alpha, 10_000_000, 1e-6).unwrap();
        ensure(out.unique, || format!("alpha {alpha}: {out:?}"))?;
        for (d, y) in out.decoys.iter().zip(&decoys) {
            // reciprocal: N(z, t) > 1-α iff t > ρ(z)/α, so q_strict(1-α) = 1/α
            let expect = euclid(&(y - &x)) / alpha;
            let floor = d.floor.ok_or("decoy rejected")?;
            ensure((floor - expect).abs() <= 1e-6, || format!("alpha {alpha}: floor {floor} vs {expect}"))?;
        }
        let same = limit_uniqueness_probe(&sp, &seq, &[x.clone()], alpha, 1_000, 1e-6).unwrap();
        ensure(same.decoys[0].floor.is_none(), || "the limit itself was accepted as a decoy".into())?;
    }
    Ok(())
}

fn completeness() -> Outcome {
    let sp = space(2, 1.0, Profile::Reciprocal, TNorm::Minimum);
    let t = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, -2.0, 3.0]);
    let s = DMatrix::from_row_slice(2, 2, &[0.3, -0.2, 0.1, 0.4]);
    let base = LinearOperator::new(t.clone(), sp.clone(), sp).unwrap();
    let seq = OperatorSequence::new(base.clone(), s.clone(), Decay::Power { q: 1.0 }, 1000).unwrap();
    let sph = SphereSampling::new(512, SEED);
    let (_, lim) = operator_seq_limit(&seq, &grid(), 1e-2, sph).map_err(|e| e.to_string())?;
    for (i, row) in lim.limit.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            ensure((v - t[(i, j)]).abs() <= 1e-9, || format!("entry ({i},{j}): {v} vs {}", t[(i, j)]))?;
        }
    }
    ensure(lim.certificate.is_bounded(), || "limit not certified bounded".into())?;
    // residual against the true T: N(cS, s) ≥ α iff s ≥ c σ_S α/(1-α)
    let sigma = s.singular_values().max();
    let diff = OperatorNorm::new(seq.term(1000).combine(1.0, &base, -1.0).unwrap(), sph, ALPHA_TOL).unwrap();
    for a in grid() {
        let r = diff.level(a, false).unwrap();
        let expect = sigma / 1000.0 * a / (1.0 - a);
        ensure(r < 1e-2, || format!("alpha {a}: residual {r}"))?;
        ensure((r - expect).abs() <= 1e-3 * expect, || format!("alpha {a}: residual {r} vs {expect}"))?;
    }
    Ok(())
}

fn determinism() -> Outcome {
    let cfg = RunConfig::default();
    let a = to_jsonl(&run_command(Command::VerifyAll, &cfg).map_err(|e| e.to_string())?);
    let b = to_jsonl(&run_command(Command::VerifyAll, &cfg).map_err(|e| e.to_string())?);
    ensure(a.lines().count() > 12, || format!("only {} lines", a.lines().count()))?;
    ensure(a == b, || "verify-all output differs between runs".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("t-norm axioms and averaging control", tnorm_axioms),
        ("level infimum matches rho(x) q(alpha)", level_infimum_oracle),
        ("space axioms incl. K = 2^(p-1) triangle", space_axioms),
        ("continuous but unbounded counterexample", counterexample),
        ("boundedness equivalence and halved-M witness", equivalence),
        ("finite-dimensional boundedness sweep", sweep),
        ("independence constant inequality", independence),
        ("operator norm closed form", operator_norm_closed_form),
        ("operator norm scaling, triangle, monotone g", operator_norm_axioms),
        ("uniqueness floor of l-fuzzy limits", uniqueness),
        ("completeness instance T + S/k", completeness),
        ("verify-all determinism", determinism),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(()) => println!("criterion {:>2}  PASS  {name} ({secs:.2} s)", i + 1),
            Err(e) => {
                failed += 1;
                println!("criterion {:>2}  FAIL  {name} ({secs:.2} s): {e}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
