//! Subcommands. Each appends records to a [`Run`]; seeds are derived from the
//! run seed with a fixed offset per check, so a check reports the same record
//! whether it runs alone or inside `verify-all`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use phibnorm::completeness::{limit_uniqueness_probe, operator_seq_cauchy, operator_seq_limit};
use phibnorm::operator::{
    bounded_certificate, continuity_probe, counterexample_suite, defn_equivalence_check, equivalence_with_m,
    finite_dim_boundedness_sweep, independence_constant, independence_inequality_check, probe_points, subspace_check,
    CounterexampleVariant,
};
use phibnorm::opnorm::{opnorm_axiom_check, NormCheckPlan};
use phibnorm::sampling;
use phibnorm::space::sequence::{self, Mode, SequenceOutcome, SequenceSpec};
use phibnorm::{
    AxiomReport, Continuity, Decay, Error, FuzzySpace, LinearOperator, OperatorNorm, OperatorSequence, Phi, PhiCheck,
    SphereSampling, TNorm,
};
use rand_distr::{Distribution, StandardNormal};
use serde_json::json;

use crate::config::{ModeName, OperatorConfig, RunConfig, SpaceConfig};
use crate::error::CliError;
use crate::report::{PlotSeries, ReportRecord, Run, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    TnormCheck,
    PhiCheck,
    SpaceCheck,
    DAlpha,
    SeqConverge,
    OpBound,
    OpContinuity,
    OpNorm,
    OpComplete,
    Counterexample,
    VerifyAll,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::TnormCheck => "tnorm-check",
            Command::PhiCheck => "phi-check",
            Command::SpaceCheck => "space-check",
            Command::DAlpha => "d-alpha",
            Command::SeqConverge => "seq-converge",
            Command::OpBound => "op-bound",
            Command::OpContinuity => "op-continuity",
            Command::OpNorm => "op-norm",
            Command::OpComplete => "op-complete",
            Command::Counterexample => "counterexample",
            Command::VerifyAll => "verify-all",
        }
    }
}

/// `verify-all` order: scalars, spaces and sequences, boundedness, the
/// operator norm, then limits and completeness.
const SUITE: [Command; 10] = [
    Command::TnormCheck,
    Command::PhiCheck,
    Command::SpaceCheck,
    Command::DAlpha,
    Command::SeqConverge,
    Command::OpBound,
    Command::OpContinuity,
    Command::Counterexample,
    Command::OpNorm,
    Command::OpComplete,
];

pub fn run_command(cmd: Command, cfg: &RunConfig) -> Result<Run, CliError> {
    cfg.validate()?;
    let mut run = Run::new(cmd.name(), cfg.seed);
    dispatch(cmd, cfg, &mut run)?;
    Ok(run)
}

fn dispatch(cmd: Command, cfg: &RunConfig, run: &mut Run) -> Result<(), CliError> {
    match cmd {
        Command::TnormCheck => tnorm_check(cfg, run),
        Command::PhiCheck => phi_check(cfg, run),
        Command::SpaceCheck => space_check(cfg, run),
        Command::DAlpha => d_alpha(cfg, run),
        Command::SeqConverge => seq_converge(cfg, run),
        Command::OpBound => op_bound(cfg, run),
        Command::OpContinuity => op_continuity(cfg, run),
        Command::OpNorm => op_norm(cfg, run),
        Command::OpComplete => op_complete(cfg, run),
        Command::Counterexample => counterexample(cfg, run),
        Command::VerifyAll => {
            for c in SUITE {
                dispatch(c, cfg, run)?;
            }
            Ok(())
        }
    }
}

fn precondition(check: &str, claim: &str, seed: u64, tol: f64, e: &Error) -> ReportRecord {
    ReportRecord::new(check, claim, seed, tol)
        .values(json!({ "reason": e.to_string() }))
        .verdict(Verdict::PreconditionUnmet)
}

fn axiom_values(r: &AxiomReport) -> serde_json::Value {
    json!(r
        .outcomes
        .iter()
        .map(|o| json!({
            "axiom": o.axiom,
            "passed": o.passed,
            "gating": o.gating,
            "checked": o.checked,
            "worst_violation": o.worst_violation,
        }))
        .collect::<Vec<_>>())
}

fn first_failure(r: &AxiomReport) -> Option<serde_json::Value> {
    r.outcomes
        .iter()
        .find(|o| o.gating && !o.passed)
        .map(|o| json!({ "axiom": o.axiom, "witness": o.witness }))
}

fn sphere(requested: Option<usize>, dim: usize, seed: u64) -> SphereSampling {
    match requested {
        Some(n) => SphereSampling::new(n, seed),
        None => SphereSampling::default_for(dim, seed),
    }
}

fn operator(op: &OperatorConfig, default: &SpaceConfig) -> Result<LinearOperator, CliError> {
    let (d, c) = op.spaces(default)?;
    let m = op.matrix(c.dim(), d.dim())?;
    Ok(LinearOperator::new(m, d, c)?)
}

fn vector(v: &[f64], dim: usize, what: &str) -> Result<DVector<f64>, CliError> {
    if v.len() != dim {
        return Err(CliError::Config(format!("{what}: expected {dim} entries, found {}", v.len())));
    }
    Ok(DVector::from_column_slice(v))
}

pub fn parse_phi(s: &str) -> Result<Phi, CliError> {
    let bad = || CliError::Config(format!("phi `{s}`: expected `abs`, `power:<p>` or `rational:<n>`"));
    match s.split_once(':') {
        None if s == "abs" => Ok(Phi::Abs),
        Some(("power", p)) => Ok(Phi::power(p.parse().map_err(|_| bad())?)?),
        Some(("rational", n)) => Ok(Phi::rational(n.parse().map_err(|_| bad())?)?),
        _ => Err(bad()),
    }
}

fn tnorm_check(cfg: &RunConfig, run: &mut Run) -> Result<(), CliError> {
    let c = &cfg.tnorm_check;
    let seed = cfg.seed.wrapping_add(1);
    for name in &c.tnorms {
        let tn: TNorm = name.parse()?;
        let report = tn.axiom_check(c.samples, seed, c.tol);
        run.push(
            ReportRecord::new(
                &format!("tnorm-axioms/{}", tn.name()),
                "t-norm axioms: boundary, commutativity, associativity, monotonicity",
                seed,
                c.tol,
            )
            .parameters(json!({ "tnorm": tn.name(), "samples": c.samples, "continuity": tn.continuity() }))
            .values(axiom_values(&report))
            .verdict(Verdict::from_pass(report.passed()))
            .witness(first_failure(&report)),
        );
    }
    if c.control {
        let avg = TNorm::custom("average", Continuity::Continuous, |a, b| (a + b) / 2.0);
        let report = avg.axiom_check(c.samples, seed, c.tol);
        let identity = report.outcome("identity");
        let caught = identity.is_some_and(|o| !o.passed && o.witness.is_some());
        run.push(
            ReportRecord::new("tnorm-control/average", "an operation violating T(a, 1) = a is rejected with a witness", seed, c.tol)
                .parameters(json!({ "operation": "(a + b) / 2", "samples": c.samples }))
                .values(axiom_values(&report))
                .verdict(Verdict::from_pass(caught))
                .witness(identity.and_then(|o| o.witness.clone())),
        );
    }
    Ok(())
}

fn phi_check(cfg: &RunConfig, run: &mut Run) -> Result<(), CliError> {
    let c = &cfg.phi_check;
    let opts = PhiCheck::with_grid(c.grid, c.tol);
    for name in &c.phis {
        let phi = parse_phi(name)?;
        let report = phi.axiom_check(&opts);
        run.push(
            ReportRecord::new(
                &format!("phi-axioms/{}", phi.name()),
                "phi is even, phi(1) = 1, strictly increasing and continuous with limits 0 and infinity",
                cfg.seed,
                c.tol,
            )
            .parameters(json!({ "phi": phi.name(), "grid": c.grid, "range": [opts.lo, opts.hi] }))
            .values(axiom_values(&report))
            .verdict(Verdict::from_pass(report.passed()))
            .witness(first_failure(&report)),
        );
    }
    Ok(())
}

fn space_check(cfg: &RunConfig, run: &mut Run) -> Result<(), CliError> {
    let c = &cfg.space_check;
    let seed = cfg.seed.wrapping_add(2);
    for s in &c.spaces {
        let sp = s.build()?;
        let check = sp.axiom_check_bn(c.samples, seed, c.tol);
        run.push(
            ReportRecord::new(
                &format!("space-axioms/{}", sp.describe()),
                "N(x, t) = s(t / rho(x)) is a fuzzy strong phi-b-norm",
                seed,
                c.tol,
            )
            .parameters(json!({ "space": sp.describe(), "samples": c.samples }))
            .values(json!({ "axioms": axiom_values(&check.axioms), "satisfies_nvi": check.satisfies_nvi }))
            .verdict(Verdict::from_pass(check.axioms.passed()))
            .witness(first_failure(&check.axioms)),
        );
    }
    Ok(())
}

fn d_alpha(cfg: &RunConfig, run: &mut Run) -> Result<(), CliError> {
    let c = &cfg.d_alpha;
    let sp = cfg.space.build()?;
    let x = match &c.x {
        Some(v) => vector(v, sp.dim(), "d_alpha.x")?,
        None => DVector::from_fn(sp.dim(), |i, _| [3.0, 4.0].get(i).copied().unwrap_or(0.0)),
    };
    let rho = sp.rho().eval(&x);
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    let mut witness = None;
    let mut points = Vec::new();
    for &a in &cfg.alpha_grid {
        let d = sp.level_infimum(&x, a, c.strict, phibnorm::space::LEVEL_TOL)?.value;
        let q = if c.strict { sp.profile().strict_quantile(a) } else { sp.profile().quantile(a) };
        let closed = if rho == 0.0 { 0.0 } else { rho * q };
        let gap = (d - closed).abs();
        if gap > c.tol && witness.is_none() {
            witness = Some(json!({ "alpha": a, "bisection": d, "closed_form": closed }));
        }
        worst = worst.max(gap);
        points.push((a, d));
        rows.push(json!({ "alpha": a, "d_alpha": d, "closed_form": closed }));
    }
    run.push(
        ReportRecord::new("d-alpha", "d_alpha(x) = rho(x) q(alpha) for a profile-induced norm", cfg.seed, c.tol)
            .parameters(json!({ "space": sp.describe(), "x": x.as_slice(), "strict": c.strict }))
            .values(json!({ "rho": rho, "levels": rows, "worst_gap": worst }))
            .verdict(Verdict::from_pass(worst <= c.tol))
            .witness(witness),
    );
    run.plots.push(PlotSeries {
        name: "d_alpha".into(),
        x_label: "alpha",
        y_label: "d_alpha",
        points,
    });
    Ok(())
}

fn seq_verdict(outcome: &SequenceOutcome, expect: &str) -> Verdict {
    let got = match outcome.verdict {
        sequence::Verdict::Converges => "converges",
        sequence::Verdict::Diverges => "diverges",
        sequence::Verdict::Inconclusive => "inconclusive",
    };
    if got == expect {
        Verdict::Pass
    } else if got == "inconclusive" {
        Verdict::Inconclusive
    } else {
        Verdict::Fail
    }
}

fn seq_converge(cfg: &RunConfig, run: &mut Run) -> Result<(), CliError> {
    let c = &cfg.seq_converge;
    if !["converges", "diverges", "inconclusive"].contains(&c.expect.as_str()) {
        return Err(CliError::Config(format!("seq_converge.expect: unknown verdict `{}`", c.expect)));
    }
    let sp = cfg.space.build()?;
    let n = sp.dim();
    let base = match &c.base {
        Some(b) => vector(b, n, "seq_converge.base")?,
        None => DVector::from_fn(n, |i, _| if i == 0 { 1.0 } else { -1.0 }),
    };
    let dir = match &c.direction {
        Some(d) => vector(d, n, "seq_converge.direction")?,
        None => DVector::from_element(n, 1.0),
    };
    let seq = SequenceSpec::power(base.clone(), dir.clone(), c.rate);
    for name in &c.modes {
        let (label, mode) = match name {
            ModeName::Classical => ("classical", Mode::Classical { t_grid: c.t_grid.clone() }),
            ModeName::AlphaFuzzy => ("alpha-fuzzy", Mode::AlphaFuzzy { alpha: c.alpha }),
            ModeName::LFuzzy => ("l-fuzzy", Mode::LFuzzy { alphas: cfg.alpha_grid.clone() }),
        };
        let params = json!({ "space": sp.describe(), "base": base.as_slice(), "direction": dir.as_slice(), "rate": c.rate, "mode": mode, "n_max": c.n_max });
        let conv = sequence::seq_convergence(&sp, &seq, &mode, c.n_max, c.tol)?;
        run.push(
            ReportRecord::new(&format!("seq-converge/{label}"), "x_k = x + k^-q v converges to x", cfg.seed, c.tol)
                .parameters(&params)
                .values(json!({ "verdict": conv.verdict, "trace": conv.trace }))
                .verdict(seq_verdict(&conv, &c.expect))
                .witness(conv.witness.as_ref()),
        );
        let cauchy = sequence::seq_cauchy(&sp, &seq, &mode, c.n_max, c.tol)?;
        run.push(
            ReportRecord::new(&format!("seq-cauchy/{label}"), "x_k = x + k^-q v is Cauchy", cfg.seed, c.tol)
                .parameters(&params)
                .values(json!({ "verdict": cauchy.verdict, "trace": cauchy.trace }))
                .verdict(seq_verdict(&cauchy, &c.expect))
                .witness(cauchy.witness.as_ref()),
        );
    }
    Ok(())
}

fn op_bound(cfg: &RunConfig, run: &mut Run) -> Result<(), CliError> {
    let c = &cfg.op_bound;
    let grid = &cfg.alpha_grid;
    let seed = cfg.seed.wrapping_add(3);
    let t = operator(&c.operator, &cfg.space)?;
    let sph = sphere(c.sphere_samples, t.domain().dim(), seed);
    let cert = bounded_certificate(&t, grid, sph, c.ceiling)?;
    let params = json!({
        "domain": t.domain().describe(),
        "codomain": t.codomain().describe(),
        "matrix": matrix_rows(t.matrix()),
        "sphere_samples": cert.sphere_samples,
    });
    run.push(
        ReportRecord::new(
            "op-bound/certificate",
            "M_alpha = sup d_alpha(Tx) / (K d_(1-alpha)(x)) is finite at every level",
            seed,
            c.ceiling,
        )
        .parameters(&params)
        .values(json!({ "bounded": cert.is_bounded(), "entries": cert.entries }))
        .verdict(Verdict::from_pass(cert.is_bounded() == c.expect_bounded))
        .witness((!cert.is_bounded()).then(|| cert.unbounded_alphas())),
    );
    run.plots.push(PlotSeries {
        name: "M_alpha".into(),
        x_label: "alpha",
        y_label: "M_alpha",
        points: cert.entries.iter().filter_map(|e| e.m().map(|m| (e.alpha, m))).collect(),
    });

    // implication form against the infimum form, then a halved constant that must be caught
    let eq_seed = seed.wrapping_add(1);
    let mut outcomes = Vec::new();
    let mut controls = Vec::new();
    for e in &cert.entries {
        let Some(m) = e.m() else { continue };
        outcomes.push(defn_equivalence_check(&t, &cert, e.alpha, c.equivalence_samples, eq_seed, c.tol)?);
        if m > 0.0 {
            let halved = equivalence_with_m(&t, e.alpha, m / 2.0, sph, c.equivalence_samples, eq_seed, c.tol)?;
            controls.push(halved);
        }
    }
    let eq_claim = "the implication form and the level-infimum form of boundedness agree";
    if outcomes.is_empty() {
        run.push(precondition("op-bound/equivalence", eq_claim, eq_seed, c.tol, &Error::PreconditionUnmet("no finite M_alpha".into())));
    } else {
        let ok = outcomes.iter().all(|o| o.passed());
        let witness = outcomes.iter().find_map(|o| o.witness.clone());
        run.push(
            ReportRecord::new("op-bound/equivalence", eq_claim, eq_seed, c.tol)
                .parameters(json!({ "samples": c.equivalence_samples }))
                .values(&outcomes)
                .verdict(Verdict::from_pass(ok))
                .witness(if ok { None } else { witness }),
        );
        if !controls.is_empty() {
            let caught = controls.iter().all(|o| !o.passed() && o.witness.is_some());
            run.push(
                ReportRecord::new("op-bound/equivalence-control", "a halved M_alpha is refuted with a witness", eq_seed, c.tol)
                    .parameters(json!({ "samples": c.equivalence_samples }))
                    .values(controls.iter().map(|o| json!({ "alpha": o.alpha, "m": o.m, "implication_violations": o.implication_violations })).collect::<Vec<_>>())
                    .verdict(Verdict::from_pass(caught))
                    .witness(controls[0].witness.as_ref()),
            );
        }
    }

    independence(cfg, run)?;
    subspace(cfg, &t, sph, run)?;
    sweep(cfg, run)
}

fn independence(cfg: &RunConfig, run: &mut Run) -> Result<(), CliError> {
    let c = &cfg.op_bound.independence;
    let seed = cfg.seed.wrapping_add(5);
    let sp = cfg.space.build()?;
    let n = sp.dim();
    let basis: Vec<DVector<f64>> = if c.basis.is_empty() {
        (0..n).map(|i| DVector::from_fn(n, |j, _| if i == j { 1.0 } else { 0.0 })).collect()
    } else {
        c.basis.iter().map(|b| vector(b, n, "independence.basis")).collect::<Result<_, _>>()?
    };
    let claim = "the (1-alpha)-level infimum of sum b_i x_i is at least c_alpha / phi(1 / sum |b_i|), with c_alpha > 0 for an independent family";
    let ic = match independence_constant(&sp, &basis, c.alpha, c.resolution) {
        Ok(ic) => ic,
        Err(e @ Error::RankDeficient { .. }) => return Err(CliError::Config(format!("independence.basis: {e}"))),
        Err(e) => return Err(e.into()),
    };
    if !ic.satisfies_nvi {
        run.push(precondition(
            "independence-constant",
            claim,
            seed,
            c.tol,
            &Error::PreconditionUnmet(format!("{} has vanishing level infima", sp.describe())),
        ));
        return Ok(());
    }
    let out = independence_inequality_check(&sp, &ic, c.samples, seed, c.tol)?;
    run.push(
        ReportRecord::new("independence-constant", claim, seed, c.tol)
            .parameters(json!({ "space": sp.describe(), "alpha": c.alpha, "resolution": c.resolution, "samples": c.samples }))
            .values(json!({
                "c_alpha": ic.c_alpha,
                "grid_value": ic.grid_value,
                "minimizer": ic.minimizer,
                "checked": out.checked,
                "violations": out.violations,
                "minimizer_gap": out.minimizer_gap,
            }))
            .verdict(Verdict::from_pass(ic.c_alpha > 0.0 && out.passed()))
            .witness(out.witness.as_ref()),
    );
    Ok(())
}

fn subspace(cfg: &RunConfig, t: &LinearOperator, sph: SphereSampling, run: &mut Run) -> Result<(), CliError> {
    let c = &cfg.op_bound.subspace;
    let tol = cfg.op_bound.tol;
    let claim = "k1 T1 + k2 T2 is bounded with M_alpha <= K (phi(k1) M1_beta + phi(k2) M2_beta), beta * beta >= alpha";
    let second = c.second.matrix(t.codomain().dim(), t.domain().dim())?;
    let t2 = t.with_matrix(second)?;
    match subspace_check(t, &t2, c.k1, c.k2, &cfg.alpha_grid, sph, c.pair_samples, tol) {
        Ok(out) => run.push(
            ReportRecord::new("subspace", claim, sph.seed, tol)
                .parameters(json!({ "k1": c.k1, "k2": c.k2, "second": matrix_rows(t2.matrix()), "pair_samples": c.pair_samples }))
                .values(json!({
                    "entries": out.entries,
                    "combined_bounded": out.combined_bounded,
                    "bound_violations": out.bound_violations,
                    "split_checked": out.split_checked,
                    "split_violations": out.split_violations,
                }))
                .verdict(Verdict::from_pass(out.passed()))
                .witness(out.split_witness.as_ref()),
        ),
        Err(e) if e.is_precondition() => run.push(precondition("subspace", claim, sph.seed, tol, &e)),
        Err(e) => return Err(e.into()),
    }
    Ok(())
}

fn sweep(cfg: &RunConfig, run: &mut Run) -> Result<(), CliError> {
    let c = &cfg.op_bound.sweep;
    let seed = cfg.seed.wrapping_add(6);
    let codomain = Arc::new(c.codomain.build()?);
    let mut domains = vec![("sweep", &c.domain)];
    if let Some(r) = &c.refused_domain {
        domains.push(("sweep/refused-domain", r));
    }
    for (name, d) in domains {
        let domain = Arc::new(d.build()?);
        let desc = domain.describe();
        let out = finite_dim_boundedness_sweep(domain, codomain.clone(), c.operators, &cfg.alpha_grid, SphereSampling::new(c.sphere_samples, seed), seed)?;
        let verdict = if out.precondition_met {
            Verdict::from_pass(out.all_bounded())
        } else {
            Verdict::PreconditionUnmet
        };
        run.push(
            ReportRecord::new(name, "every matrix between finite-dimensional spaces with positive level infima is fuzzy bounded", seed, 0.0)
                .parameters(json!({ "domain": desc, "codomain": codomain.describe(), "operators": c.operators, "sphere_samples": c.sphere_samples }))
                .values(json!({ "precondition_met": out.precondition_met, "operators": out.operators, "unbounded": out.unbounded, "max_m": out.max_m }))
                .verdict(verdict)
                .witness((!out.unbounded.is_empty()).then_some(&out.unbounded)),
        );
    }
    Ok(())
}

fn op_continuity(cfg: &RunConfig, run: &mut Run) -> Result<(), CliError> {
    let c = &cfg.op_continuity;
    let seed = cfg.seed.wrapping_add(7);
    let t = operator(&c.operator, &cfg.space)?;
    let dim = t.domain().dim();
    let cert = bounded_certificate(&t, &cfg.alpha_grid, sphere(c.sphere_samples, dim, seed), phibnorm::operator::DEFAULT_CEILING)?;
    let (bases, dirs) = probe_points(dim, seed);
    let settings = c.probe.settings();
    let out = continuity_probe(&t, &bases, &dirs, &settings)?;
    let verdict = if cert.is_bounded() {
        Verdict::from_pass(out.continuous)
    } else {
        Verdict::PreconditionUnmet
    };
    let broken = out.probes.iter().find(|p| p.continuous != Some(true));
    run.push(
        ReportRecord::new("op-continuity", "a fuzzy bounded operator is fuzzy continuous", seed, settings.tol)
            .parameters(json!({ "matrix": matrix_rows(t.matrix()), "probe": settings }))
            .values(json!({
                "bounded": cert.is_bounded(),
                "continuous": out.continuous,
                "consistent_across_points": out.consistent_across_points,
                "probes": out.probes.len(),
            }))
            .verdict(verdict)
            .witness(if out.continuous { None } else { broken }),
    );
    Ok(())
}

fn counterexample(cfg: &RunConfig, run: &mut Run) -> Result<(), CliError> {
    let c = &cfg.counterexample;
    let seed = cfg.seed.wrapping_add(8);
    for name in &c.variants {
        let variant = match name.as_str() {
            "step-domain" => CounterexampleVariant::StepDomain,
            "reciprocal-domain" => CounterexampleVariant::ReciprocalDomain,
            "zero-operator" => CounterexampleVariant::ZeroOperator,
            other => return Err(CliError::Config(format!("counterexample.variants: unknown variant `{other}`"))),
        };
        // T = 2I into the reciprocal space: M_α = 2 q_Y(α) / q_X(1-α)
        let expected = |a: f64| match variant {
            CounterexampleVariant::StepDomain => (a < 0.5).then(|| 2.0 / (1.0 - a)),
            CounterexampleVariant::ReciprocalDomain => Some(2.0 * a / (1.0 - a)),
            CounterexampleVariant::ZeroOperator => Some(0.0),
        };
        let claim = match variant {
            CounterexampleVariant::StepDomain => "a fuzzy continuous operator need not be fuzzy bounded when the domain has vanishing level infima",
            CounterexampleVariant::ReciprocalDomain => "control: the same operator on a domain with positive level infima is bounded and continuous",
            CounterexampleVariant::ZeroOperator => "control: the zero operator is bounded even when the domain has vanishing level infima",
        };
        let check = format!("counterexample/{}", variant.name());
        let sph = SphereSampling::new(c.sphere_samples, seed);
        match counterexample_suite(variant, c.dim, &cfg.alpha_grid, sph, &c.probe.settings()) {
            Ok(out) => {
                let mut worst = 0.0f64;
                let mut rows = Vec::new();
                for e in &out.certificate.entries {
                    let want = expected(e.alpha);
                    if let (Some(m), Some(w)) = (e.m(), want) {
                        worst = worst.max((m - w).abs());
                    }
                    rows.push(json!({ "alpha": e.alpha, "m": e.m(), "expected": want }));
                }
                run.plots.push(PlotSeries {
                    name: format!("M_alpha/{}", variant.name()),
                    x_label: "alpha",
                    y_label: "M_alpha",
                    points: out.certificate.entries.iter().filter_map(|e| e.m().map(|m| (e.alpha, m))).collect(),
                });
                run.push(
                    ReportRecord::new(&check, claim, seed, c.tol)
                        .parameters(json!({ "dim": c.dim, "sphere_samples": c.sphere_samples, "probe": c.probe }))
                        .values(json!({
                            "continuous": out.continuous,
                            "bounded": out.bounded,
                            "unbounded_alphas": out.unbounded_alphas,
                            "levels": rows,
                            "worst_gap": worst,
                        }))
                        .verdict(Verdict::from_pass(worst <= c.tol)),
                );
            }
            Err(e @ Error::VerdictMismatch(_)) => run.push(
                ReportRecord::new(&check, claim, seed, c.tol)
                    .values(json!({ "reason": e.to_string() }))
                    .verdict(Verdict::Fail),
            ),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(())
}

fn op_norm(cfg: &RunConfig, run: &mut Run) -> Result<(), CliError> {
    let c = &cfg.op_norm;
    let seed = cfg.seed.wrapping_add(9);
    let t = operator(&c.operator, &cfg.space)?;
    let sph = sphere(c.sphere_samples, t.domain().dim(), seed);
    let claim = "N(T, s) = sup{alpha : g(alpha) <= s} with g(alpha) = sup d_alpha(Tx) / d_(1-alpha)(x)";
    let engine = match OperatorNorm::new(t.clone(), sph, c.alpha_tol) {
        Ok(e) => e,
        Err(e) if e.is_precondition() => {
            run.push(precondition("op-norm", claim, seed, c.alpha_tol, &e));
            return Ok(());
        }
        Err(e) => return Err(e.into()),
    };
    let values = c.s_grid.iter().map(|&s| engine.value(s)).collect::<Result<Vec<_>, _>>()?;
    let profile = engine.profile(&cfg.alpha_grid)?;
    // a sampled supremum never exceeds the exact one
    let over = profile
        .g
        .iter()
        .zip(&profile.separable)
        .zip(&profile.alphas)
        .find(|((g, sep), _)| sep.is_some_and(|s| **g > s * (1.0 + 1e-9) + 1e-12));
    run.push(
        ReportRecord::new("op-norm", claim, seed, c.alpha_tol)
            .parameters(json!({
                "domain": t.domain().describe(),
                "codomain": t.codomain().describe(),
                "matrix": matrix_rows(t.matrix()),
                "sphere_samples": profile.sphere_samples,
                "alpha_tol": c.alpha_tol,
            }))
            .values(json!({ "norm": values, "g": profile }))
            .verdict(Verdict::from_pass(profile.monotone && over.is_none()))
            .witness(over.map(|((g, sep), a)| json!({ "alpha": a, "sampled": g, "closed_form": sep }))),
    );
    run.plots.push(PlotSeries {
        name: "N(T,s)".into(),
        x_label: "s",
        y_label: "N",
        points: values.iter().map(|v| (v.s, v.value)).collect(),
    });
    run.plots.push(PlotSeries {
        name: "g(alpha)".into(),
        x_label: "alpha",
        y_label: "g",
        points: profile.alphas.iter().copied().zip(profile.g.iter().copied()).collect(),
    });

    // the configured operator, zero and a seeded random fleet on the same spaces
    let mut rng = sampling::rng(seed);
    let (rows, cols) = (t.codomain().dim(), t.domain().dim());
    let mut fleet = vec![t.clone(), LinearOperator::zero(t.domain().clone(), t.codomain().clone())?];
    for _ in 0..c.fleet {
        fleet.push(t.with_matrix(DMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(&mut rng)))?);
    }
    let plan = NormCheckPlan {
        lambdas: c.lambdas.clone(),
        alphas: cfg.alpha_grid.clone(),
        sampling: SphereSampling::new(sph.count.min(256), seed),
        alpha_tol: c.alpha_tol,
        tol: c.tol,
        ..Default::default()
    };
    let report = opnorm_axiom_check(&fleet, &plan)?;
    run.push(
        ReportRecord::new(
            "op-norm/axioms",
            "N(T, s) vanishes for s <= 0, is 1 only for T = 0, scales by phi, satisfies the K-weighted triangle and increases to 1",
            seed,
            c.tol,
        )
        .parameters(json!({ "operators": fleet.len(), "lambdas": plan.lambdas, "s_grid": plan.s_grid, "sphere_samples": plan.sampling.count }))
        .values(axiom_values(&report))
        .verdict(Verdict::from_pass(report.passed()))
        .witness(first_failure(&report)),
    );
    Ok(())
}

fn op_complete(cfg: &RunConfig, run: &mut Run) -> Result<(), CliError> {
    let c = &cfg.op_complete;
    let seed = cfg.seed.wrapping_add(10);
    let base = operator(&c.base, &cfg.space)?;
    let s = crate::matrix::from_rows(&c.perturbation).map_err(|e| CliError::Config(format!("op_complete.perturbation: {e}")))?;
    let decay: Decay = c.decay.into();
    let seq = OperatorSequence::new(base, s, decay, c.n_max)?;
    let sph = SphereSampling::new(c.sphere_samples, seed);
    let params = json!({
        "base": matrix_rows(seq.base.matrix()),
        "perturbation": matrix_rows(seq.perturbation.matrix()),
        "decay": decay,
        "n_max": c.n_max,
        "sphere_samples": c.sphere_samples,
    });
    let cauchy_claim = "T_k = T + a_k S is l-fuzzy Cauchy in the operator fuzzy norm";
    let cauchy = match operator_seq_cauchy(&seq, &cfg.alpha_grid, c.tol, sph) {
        Ok(out) => out,
        Err(e) if e.is_precondition() => {
            run.push(precondition("op-complete/cauchy", cauchy_claim, seed, c.tol, &e));
            return uniqueness(cfg, run);
        }
        Err(e) => return Err(e.into()),
    };
    let direct_gap = cauchy.direct.iter().map(|d| d.relative_gap()).fold(0.0, f64::max);
    let verdict = match cauchy.verdict {
        sequence::Verdict::Converges if direct_gap < 1e-6 => Verdict::Pass,
        sequence::Verdict::Inconclusive => Verdict::Inconclusive,
        _ => Verdict::Fail,
    };
    run.push(
        ReportRecord::new("op-complete/cauchy", cauchy_claim, seed, c.tol)
            .parameters(&params)
            .values(json!({
                "verdict": cauchy.verdict,
                "trace": cauchy.trace,
                "perturbation_levels": cauchy.perturbation_levels,
                "direct_relative_gap": direct_gap,
            }))
            .verdict(verdict)
            .witness(cauchy.witness.as_ref()),
    );

    let limit_claim = "the limit of an l-fuzzy Cauchy sequence of bounded operators is bounded and approached in the operator fuzzy norm";
    match operator_seq_limit(&seq, &cfg.alpha_grid, c.tol, sph) {
        Ok((_, lim)) => {
            let ok = lim.passed() && lim.entry_error <= c.entry_tol;
            run.push(
                ReportRecord::new("op-complete/limit", limit_claim, seed, c.tol)
                    .parameters(json!({ "entry_tol": c.entry_tol, "n_max": c.n_max }))
                    .values(json!({
                        "limit": lim.limit,
                        "entry_error": lim.entry_error,
                        "bounded": lim.certificate.is_bounded(),
                        "residuals": lim.residuals,
                        "residual_trace": lim.residual_trace,
                    }))
                    .verdict(Verdict::from_pass(ok))
                    .witness((!ok).then(|| lim.residual_trace.last().cloned()).flatten()),
            );
        }
        Err(e) if e.is_precondition() => run.push(precondition("op-complete/limit", limit_claim, seed, c.tol, &e)),
        Err(e) => return Err(e.into()),
    }
    uniqueness(cfg, run)
}

fn uniqueness(cfg: &RunConfig, run: &mut Run) -> Result<(), CliError> {
    let c = &cfg.op_complete.uniqueness;
    let sp: FuzzySpace = cfg.space.build()?;
    let n = sp.dim();
    let x = vector(&c.limit, n, "uniqueness.limit")?;
    let v = vector(&c.direction, n, "uniqueness.direction")?;
    let decoys = c.decoys.iter().map(|d| vector(d, n, "uniqueness.decoys")).collect::<Result<Vec<_>, _>>()?;
    let seq = SequenceSpec::power(x.clone(), v, 1.0).with_limit(x.clone());
    let claim = "an l-fuzzy limit is unique: every other point keeps a positive distance floor";
    match limit_uniqueness_probe(&sp, &seq, &decoys, c.alpha, c.n_max, c.tol) {
        Ok(out) => run.push(
            ReportRecord::new("limit-uniqueness", claim, cfg.seed, c.tol)
                .parameters(json!({ "space": sp.describe(), "limit": c.limit, "direction": c.direction, "alpha": c.alpha, "n_max": c.n_max }))
                .values(json!({ "limit_verdict": out.limit_verdict, "decoys": out.decoys }))
                .verdict(Verdict::from_pass(out.unique))
                .witness(out.decoys.iter().find(|d| d.floor.is_some_and(|f| f <= c.tol))),
        ),
        Err(e) if e.is_precondition() => run.push(precondition("limit-uniqueness", claim, cfg.seed, c.tol, &e)),
        Err(e) => return Err(e.into()),
    }
    Ok(())
}

fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_names() {
        assert!(matches!(parse_phi("abs"), Ok(Phi::Abs)));
        assert_eq!(parse_phi("power:2").unwrap().exponent(), Some(2.0));
        assert!(parse_phi("rational:0").is_err());
        assert!(parse_phi("cube").is_err());
        assert!(parse_phi("power:x").is_err());
    }

    #[test]
    fn d_alpha_of_zero_vector() {
        let mut cfg = RunConfig::default();
        cfg.d_alpha.x = Some(vec![0.0, 0.0]);
        let run = run_command(Command::DAlpha, &cfg).unwrap();
        assert_eq!(run.records[0].verdict, Verdict::Pass);
        assert!(run.plots[0].points.iter().all(|p| p.1 == 0.0));
    }

    #[test]
    fn drastic_op_norm_is_flagged_not_failed() {
        let mut cfg = RunConfig::default();
        cfg.space.tnorm = "drastic".into();
        let run = run_command(Command::OpNorm, &cfg).unwrap();
        assert_eq!(run.records.len(), 1);
        assert_eq!(run.records[0].verdict, Verdict::PreconditionUnmet);
        assert_eq!(run.exit_code(), 0);
    }

    #[test]
    fn identity_norm_plot_rows() {
        let run = run_command(Command::OpNorm, &RunConfig::default()).unwrap();
        let pts = &run.plots.iter().find(|p| p.name == "N(T,s)").unwrap().points;
        for ((s, n), expect) in pts.iter().zip([1.0 / 3.0, 0.5, 0.75]) {
            assert!((n - expect).abs() < 1e-6, "{s}: {n}");
        }
        assert_eq!(run.exit_code(), 0, "{:?}", run.records.iter().map(|r| (&r.check_name, r.verdict)).collect::<Vec<_>>());
    }

    #[test]
    fn growing_family_is_not_cauchy() {
        let mut cfg = RunConfig::default();
        cfg.op_complete.decay = crate::config::DecayConfig::Power { q: -1.0 };
        let run = run_command(Command::OpComplete, &cfg).unwrap();
        let verdicts: Vec<_> = run.records.iter().map(|r| (r.check_name.as_str(), r.verdict)).collect();
        assert_eq!(
            verdicts,
            vec![
                ("op-complete/cauchy", Verdict::Fail),
                ("op-complete/limit", Verdict::PreconditionUnmet),
                ("limit-uniqueness", Verdict::Pass)
            ]
        );
    }
}
