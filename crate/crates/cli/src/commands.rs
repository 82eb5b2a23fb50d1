use dcrates::certificates::{numeric_check, verify_report, LemmaId};
use dcrates::engine::{best_gradient_mapping, gradient_residual, schedule_curvature_shift, Trajectory};
use dcrates::io::InstanceFile;
use dcrates::rates::{
    all_bounds, classify_regime, proven_bounds, sublinear_rate_bound, tight_rate_bound, RateValue, RegimeReport,
};
use dcrates::worstcase::{search_worst, sweep, SearchSpec};
use dcrates::Curvatures;
use nalgebra::DVector;
use serde_json::{json, Value};

use crate::args::{
    Cli, ProgressMetric, RateArgs, RunArgs, ScheduleArgs, SearchArgs, SweepArgs, VerifyArgs,
};
use crate::output::{num, opt, Failure, Report, Table};

type Outcome = Result<Report, Failure>;

fn join(v: &DVector<f64>) -> String {
    v.iter().map(|x| num(*x)).collect::<Vec<_>>().join(";")
}

fn tightest(bounds: &[RateValue]) -> Option<RateValue> {
    bounds.iter().min_by(|a, b| a.bound.total_cmp(&b.bound)).cloned()
}

/// The sharpest bound at `c`, falling back to the sublinear rate.
fn primary_bound(c: &Curvatures, n: usize, delta: f64) -> Result<RateValue, Failure> {
    match tight_rate_bound(c, n, delta) {
        Ok(b) => Ok(b),
        Err(_) => Ok(sublinear_rate_bound(c, n, delta)?),
    }
}

fn conjecture_banner(b: &RateValue, proven: Option<&RateValue>) -> String {
    let fallback = proven.map_or(String::new(), |p| format!("; proven bound {} ({:?})", p.bound, p.formula));
    format!("CONJECTURE: bound {} from {:?} is not proven{fallback}", b.bound, b.formula)
}

fn regime_fields(r: &mut Report, rep: &RegimeReport) {
    r.set("regime", rep.regime)
        .set("p", rep.p_value)
        .set("mu_sum", rep.mu_sum)
        .set("status", rep.status)
        .set("description", &rep.description);
}

pub fn classify(a: &RateArgs) -> Outcome {
    let c = a.curvatures.curvatures();
    let rep = classify_regime(&c)?;
    let b = sublinear_rate_bound(&c, a.n, a.delta)?;
    let mut r = Report::new("classify", Table::new(&["regime", "p", "denominator", "bound", "proven", "status"]));
    r.set("curvatures", c);
    regime_fields(&mut r, &rep);
    r.set("N", a.n).set("delta", a.delta).set("denominator", b.denominator).set("bound", b.bound).set("proven", true);
    r.table.push(vec![
        rep.regime.to_string(),
        num(rep.p_value),
        num(b.denominator),
        num(b.bound),
        "true".into(),
        value_str(&rep.status),
    ]);
    Ok(r)
}

fn value_str(v: &impl serde::Serialize) -> String {
    match serde_json::to_value(v).expect("serializable") {
        Value::String(s) => s,
        other => other.to_string(),
    }
}

pub fn rate(a: &RateArgs) -> Outcome {
    let c = a.curvatures.curvatures();
    let rep = classify_regime(&c)?;
    let b = primary_bound(&c, a.n, a.delta)?;
    let proven = tightest(&proven_bounds(&c, a.n, a.delta)?);
    let all = all_bounds(&c, a.n, a.delta)?;
    let mut r = Report::new("rate", Table::new(&["formula", "metric", "denominator", "bound", "proven"]));
    r.set("curvatures", c);
    regime_fields(&mut r, &rep);
    r.set("N", a.n).set("delta", a.delta).extend(&b).set("proven_bound", &proven).set("bounds", &all);
    for v in &all {
        r.table.push(vec![value_str(&v.formula), value_str(&v.metric), num(v.denominator), num(v.bound), v.proven.to_string()]);
    }
    if !b.proven {
        r.banner = Some(conjecture_banner(&b, proven.as_ref()));
    }
    Ok(r)
}

fn value_scale(t: &Trajectory) -> f64 {
    1.0 + t.f1vals.iter().chain(&t.f2vals).fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Lemma slacks along a run, when the run has a regime and no curvature shifts.
fn lemma_slacks(t: &Trajectory, lemma: LemmaId) -> Result<Vec<f64>, Failure> {
    let n = t.len().saturating_sub(2);
    Ok((0..n).map(|k| numeric_check(lemma, t, k)).collect::<dcrates::Result<_>>()?)
}

fn unshifted(t: &Trajectory) -> bool {
    t.meta.shifts.as_ref().is_none_or(|s| s.iter().all(|&l| l == 0.0))
}

pub fn run(cli: &Cli, a: &RunArgs) -> Outcome {
    let inst = InstanceFile::read(&a.instance)?;
    let dim = inst.dim()?;
    if a.x0.len() != dim {
        return Err(Failure::Usage(format!("--x0 has {} entries, instance dimension is {dim}", a.x0.len())));
    }
    let x0 = DVector::from_vec(a.x0.clone());
    let t = inst.run(&x0, a.iters, a.policy.into())?;
    let c = t.meta.curvatures;
    let n = a.iters;
    let (index, value) = match a.metric {
        ProgressMetric::Mapping => best_gradient_mapping(&t),
        ProgressMetric::Residual => gradient_residual(&t),
    };
    let delta = t.total_decrease().max(0.0);
    let regime = classify_regime(&c).ok();

    let mut r = Report::new("run", Table::new(&["k", "x", "F", "g1", "g2", "gap_to_bound"]));
    r.set("instance", a.instance.display().to_string())
        .set("trajectory", &t)
        .set("metric", json!({ "name": value_str(&a.metric.to_possible_value_name()), "index": index, "value": value }));
    if let Some(rep) = &regime {
        let b = primary_bound(&c, n, delta)?;
        let proven = tightest(&proven_bounds(&c, n, delta)?);
        r.set("regime", rep).set("bound", &b).set("proven_bound", &proven);
        if !b.proven {
            r.banner = Some(conjecture_banner(&b, proven.as_ref()));
        }
        if unshifted(&t) && t.len() >= 3 {
            let lemma = LemmaId::for_regime(rep.regime);
            r.set("slacks", json!({ "lemma": lemma, "values": lemma_slacks(&t, lemma)? }));
        }
    }
    let tol = cli.tol * value_scale(&t);
    let (v1, v2) = t.interpolation_violations(tol);
    r.set("interpolation", json!({ "tol": tol, "f1_violations": v1.len(), "f2_violations": v2.len() }));

    // sublinear bound of the first k + 1 steps minus the smallest half step so far
    let mut running = f64::INFINITY;
    for k in 0..t.len() {
        let gap = if k + 1 < t.len() {
            running = running.min(0.5 * t.dx(k).norm_squared());
            regime.as_ref().map(|rep| (t.fvals[0] - t.fvals[k + 1]) / rep.denominator(k) - running)
        } else {
            None
        };
        r.table.push(vec![k.to_string(), join(&t.points[k]), num(t.fvals[k]), join(&t.g1[k]), join(&t.g2[k]), opt(gap)]);
    }
    Ok(r)
}

trait PossibleName {
    fn to_possible_value_name(&self) -> String;
}

impl<T: clap::ValueEnum> PossibleName for T {
    fn to_possible_value_name(&self) -> String {
        self.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
    }
}

fn read_trajectory(path: &std::path::Path) -> Result<Trajectory, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let mut v: Value = serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    // accept the output of `run` as well as a bare trajectory
    if let Some(t) = v.get_mut("trajectory") {
        v = t.take();
    }
    serde_json::from_value(v).map_err(|e| Failure::Usage(format!("{}: not a trajectory: {e}", path.display())))
}

pub fn verify(cli: &Cli, a: &VerifyArgs) -> Outcome {
    match &a.from_trajectory {
        Some(path) => {
            if a.curvatures.any() {
                return Err(Failure::Usage("curvatures come from the trajectory; drop --mu1/--L1/--mu2/--L2".into()));
            }
            let t = read_trajectory(path)?;
            let c = t.meta.curvatures;
            let lemma = match &a.lemma {
                Some(name) => LemmaId::parse(name, a.k)?,
                None => LemmaId::for_regime(classify_regime(&c)?.regime),
            };
            let slacks = lemma_slacks(&t, lemma)?;
            let tol = cli.tol * value_scale(&t);
            let min = slacks.iter().copied().fold(f64::INFINITY, f64::min);
            let mut r = Report::new("verify-certificate", Table::new(&["k", "slack"]));
            r.set("lemma", lemma).set("source", path.display().to_string()).set("curvatures", c);
            r.set("slacks", &slacks).set("min_slack", if slacks.is_empty() { None } else { Some(min) }).set("tol", tol);
            let mut failure = None;
            match verify_report(lemma, &c, a.exact) {
                Ok(d) => {
                    r.set("decomposition", d);
                }
                Err(e) => {
                    let f = Failure::from(e);
                    match f {
                        Failure::Verification(msg) => {
                            r.set("decomposition_error", &msg);
                            failure = Some(msg);
                        }
                        usage => return Err(usage),
                    }
                }
            }
            if min < -tol {
                failure.get_or_insert(format!("slack {min} below -{tol}"));
            }
            r.set("valid", failure.is_none());
            r.failure = failure;
            for (k, s) in slacks.iter().enumerate() {
                r.table.push(vec![k.to_string(), num(*s)]);
            }
            Ok(r)
        }
        None => {
            let name = a.lemma.as_deref().ok_or_else(|| Failure::Usage("--lemma is required".into()))?;
            let c = a
                .curvatures
                .curvatures()
                .ok_or_else(|| Failure::Usage("need --mu1, --L1, --mu2, --L2 or --from-trajectory".into()))?;
            let lemma = LemmaId::parse(name, a.k)?;
            let mut r = Report::new("verify-certificate", Table::new(&["square", "coefficient"]));
            r.set("exact", a.exact);
            match verify_report(lemma, &c, a.exact) {
                Ok(d) => {
                    for t in &d.terms {
                        r.table.push(vec![t.square.clone(), num(t.coefficient)]);
                    }
                    r.set("valid", true).extend(&d);
                }
                Err(e) => match Failure::from(e) {
                    Failure::Verification(msg) => {
                        r.set("valid", false).set("lemma", lemma).set("curvatures", c).set("error", &msg);
                        r.failure = Some(msg);
                    }
                    usage => return Err(usage),
                },
            }
            Ok(r)
        }
    }
}

pub fn search(cli: &Cli, a: &SearchArgs) -> Outcome {
    let c = a.curvatures.curvatures();
    let mut spec = SearchSpec::new(c, a.n, a.family, a.budget, cli.seed);
    spec.stop_at = a.stop_at;
    spec.evals_per_trial = a.evals;
    let mut rep = search_worst(&spec)?;
    if a.no_witness {
        rep.witness = None;
    }
    let binding = rep.bounds.iter().find(|b| b.formula == rep.binding).cloned();
    let proven = binding.as_ref().is_some_and(|b| b.proven);
    let mut r = Report::new(
        "search-worstcase",
        Table::new(&["regime", "N", "family", "best_ratio", "binding", "proven", "trials_run", "best_trial"]),
    );
    r.set("curvatures", c).set("N", a.n).set("budget", a.budget).set("seed", cli.seed).extend(&rep);
    r.table.push(vec![
        rep.regime.regime.to_string(),
        a.n.to_string(),
        rep.family.to_string(),
        num(rep.best_ratio),
        value_str(&rep.binding),
        proven.to_string(),
        rep.trials_run.to_string(),
        rep.best_trial.to_string(),
    ]);
    if let Some(b) = binding.filter(|b| !b.proven) {
        let p = tightest(&rep.bounds.iter().filter(|b| b.proven).cloned().collect::<Vec<_>>());
        r.banner = Some(conjecture_banner(&b, p.as_ref()));
    }
    Ok(r)
}

pub fn sweep_cmd(cli: &Cli, a: &SweepArgs) -> Outcome {
    let rows = sweep(&a.mu2_ratios.0, &a.l2_ratios.0, a.l1_ratio, a.n, a.family, a.budget, cli.seed)?;
    let mut r = Report::new("sweep", Table::new(&["mu2_ratio", "L2_ratio", "regime", "bound", "best_ratio"]));
    r.set("L1_ratio", a.l1_ratio).set("N", a.n).set("family", a.family.to_string()).set("budget", a.budget);
    r.set("seed", cli.seed).set("rows", &rows);
    for row in &rows {
        r.table.push(vec![num(row.mu2_ratio), num(row.l2_ratio), row.regime.to_string(), num(row.bound), num(row.best_ratio)]);
    }
    Ok(r)
}

pub fn schedule(a: &ScheduleArgs) -> Outcome {
    let lambdas = schedule_curvature_shift(a.mu1, a.l2, a.mu2, &a.gammas)?;
    let mut r = Report::new("schedule", Table::new(&["k", "gamma", "lambda"]));
    r.set("mu1", a.mu1).set("L2", a.l2).set("mu2", a.mu2).set("gammas", &a.gammas).set("lambdas", &lambdas);
    for (k, (g, l)) in a.gammas.iter().zip(&lambdas).enumerate() {
        r.table.push(vec![k.to_string(), num(*g), num(*l)]);
    }
    Ok(r)
}
