//! Task execution.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use super::json as pj;
use super::{build_model, Entry, ErrorInfo, ErrorKind, Op, Property, Report, Scenario, Status, Task};
use crate::canonical::{check_type_conditions, tautological_eval, theta_coordinate_eval};
use crate::error::{argument, Result};
use crate::exterior::{flat_matrix, is_decomposable, is_j_nondegenerate};
use crate::hamiltonian::{certify, solve_hamiltonian_field, SolveOutcome};
use crate::homogeneity::{
    check_local_homogeneity, default_generators, hamiltonian_span_rank, invariance_probe, Generator, GeneratorFamily,
    ProbeVerdict,
};
use crate::orthogonality::{classify, is_maximal_isotropic, orth_complement};
use crate::poly::{
    homotopy_inverse_d, interior, lie_bracket, lie_derivative, pullback, DifferentialForm, MultiVectorField,
};
use crate::random;

/// Seed used when neither the command line nor the scenario provides one.
pub const DEFAULT_SEED: u64 = 0;

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    /// Run only the task with this id.
    pub task: Option<String>,
    /// Record per-task wall-clock time (makes reports non-reproducible).
    pub timing: bool,
}

struct Outcome {
    payload: Map<String, Value>,
    failures: Vec<String>,
    inconclusive: bool,
}

impl Outcome {
    fn new(payload: Value) -> Outcome {
        let payload = match payload {
            Value::Object(m) => m,
            other => Map::from_iter([("result".to_string(), other)]),
        };
        Outcome { payload, failures: Vec::new(), inconclusive: false }
    }
}

/// Runs the tasks (concurrently) and assembles the report in task order.
/// Each task draws from its own random stream, so results do not depend on
/// scheduling or on which tasks are selected.
pub fn run(scenario: &Scenario, options: &RunOptions) -> Result<Report> {
    let seed = options.seed.or(scenario.seed).unwrap_or(DEFAULT_SEED);
    let selected: Vec<(usize, &Task)> = match &options.task {
        None => scenario.tasks.iter().enumerate().collect(),
        Some(id) => {
            let found: Vec<_> = scenario.tasks.iter().enumerate().filter(|(_, t)| &t.id == id).collect();
            if found.is_empty() {
                return Err(argument(format!("no task with id {id:?}")));
            }
            found
        }
    };
    let entries = selected
        .par_iter()
        .map(|(i, t)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(*i as u64);
            let start = Instant::now();
            let mut entry = run_task(scenario, t, &mut rng);
            if options.timing {
                entry.elapsed_ms = Some(start.elapsed().as_millis() as u64);
            }
            entry
        })
        .collect();
    Ok(Report::new(scenario.name.clone(), seed, entries))
}

fn run_task(s: &Scenario, t: &Task, rng: &mut ChaCha8Rng) -> Entry {
    let op = t.op.name();
    let mut entry =
        Entry { id: t.id.clone(), op, status: Status::Pass, payload: json!({}), error: None, failures: vec![], elapsed_ms: None };
    match execute(s, &t.op, rng) {
        Err(e) => {
            let kind = ErrorKind::of(&e);
            entry.error = Some(ErrorInfo { kind: kind.as_str().into(), message: e.to_string() });
            entry.status = match t.expect_error {
                Some(ErrorKind::Any) => Status::Pass,
                Some(k) if k == kind => Status::Pass,
                Some(k) => {
                    entry.failures.push(format!("expected a {} error, got {}", k.as_str(), kind.as_str()));
                    Status::Fail
                }
                None => Status::Error,
            };
        }
        Ok(outcome) => {
            entry.payload = Value::Object(outcome.payload);
            entry.failures = outcome.failures;
            if let Some(k) = t.expect_error {
                entry.failures.push(format!("expected a {} error, but the task succeeded", k.as_str()));
            }
            if let Some(expect) = &t.expect {
                mismatches(expect, &entry.payload, "", &mut entry.failures);
            }
            entry.status = if !entry.failures.is_empty() {
                Status::Fail
            } else if outcome.inconclusive && t.expect.is_none() {
                Status::Inconclusive
            } else {
                Status::Pass
            };
        }
    }
    entry
}

/// Records where `actual` differs from `expected`; objects in `expected`
/// only constrain the keys they mention.
fn mismatches(expected: &Value, actual: &Value, path: &str, out: &mut Vec<String>) {
    let here = if path.is_empty() { "payload".to_string() } else { path.to_string() };
    match (expected, actual) {
        (Value::Object(e), Value::Object(a)) => {
            for (k, ev) in e {
                let sub = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                match a.get(k) {
                    Some(av) => mismatches(ev, av, &sub, out),
                    None => out.push(format!("{sub}: expected {ev}, missing from the result")),
                }
            }
        }
        (Value::Array(e), Value::Array(a)) if e.len() == a.len() => {
            for (i, (ev, av)) in e.iter().zip(a).enumerate() {
                mismatches(ev, av, &format!("{here}[{i}]"), out);
            }
        }
        (Value::Number(e), Value::String(a)) if e.to_string() == *a => {}
        (e, a) if e == a => {}
        (e, a) => out.push(format!("{here}: expected {e}, got {a}")),
    }
}

fn execute(s: &Scenario, op: &Op, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let out = match op {
        Op::Wedge { left, right } => {
            if let (Ok(a), Ok(b)) = (s.form(left), s.form(right)) {
                Outcome::new(json!({"result": pj::form(&a.wedge(b)?)}))
            } else {
                Outcome::new(json!({"result": pj::field(&s.field(left)?.wedge(s.field(right)?)?)}))
            }
        }
        Op::Interior { field, form } => Outcome::new(json!({"result": pj::form(&interior(s.field(field)?, s.form(form)?)?)})),
        Op::ExteriorDerivative { form } => Outcome::new(json!({"result": pj::form(&s.form(form)?.exterior_derivative())})),
        Op::IsClosed { form } => {
            let d = s.form(form)?.exterior_derivative();
            Outcome::new(json!({"closed": d.is_zero(), "derivative": pj::form(&d)}))
        }
        Op::LieDerivative { field, form } => {
            Outcome::new(json!({"result": pj::form(&lie_derivative(s.field(field)?, s.form(form)?)?)}))
        }
        Op::LieBracket { left, right } => {
            Outcome::new(json!({"result": pj::field(&lie_bracket(s.field(left)?, s.field(right)?)?)}))
        }
        Op::Pullback { map, form } => Outcome::new(json!({"result": pj::form(&pullback(s.map(map)?, s.form(form)?)?)})),
        Op::HomotopyInverseD { form } => {
            let omega = s.form(form)?;
            let eta = homotopy_inverse_d(omega)?;
            Outcome::new(json!({"primitive": pj::form(&eta), "verified": eta.exterior_derivative() == *omega}))
        }
        Op::FlatMatrix { form, m, point } => {
            let t = s.form(form)?.evaluate(&s.point(point.as_ref())?)?;
            Outcome::new(pj::flat(&flat_matrix(&t, *m)?))
        }
        Op::IsJNondegenerate { form, j, point } => {
            let t = s.form(form)?.evaluate(&s.point(point.as_ref())?)?;
            Outcome::new(json!({"nondegenerate": is_j_nondegenerate(&t, *j)?}))
        }
        Op::IsDecomposable { field, point } => {
            let t = s.field(field)?.evaluate(&s.point(point.as_ref())?)?;
            Outcome::new(json!({"decomposable": is_decomposable(&t)?}))
        }
        Op::OrthComplement { subspace, form, r, point } => {
            let t = s.form(form)?.evaluate(&s.point(point.as_ref())?)?;
            Outcome::new(json!({"complement": pj::subspace(&orth_complement(s.subspace(subspace)?, &t, *r)?)}))
        }
        Op::Classify { subspace, form, r, point } => {
            let t = s.form(form)?.evaluate(&s.point(point.as_ref())?)?;
            let rep = classify(s.subspace(subspace)?, &t, *r)?;
            Outcome::new(json!({
                "isotropic": rep.isotropic,
                "coisotropic": rep.coisotropic,
                "lagrangian": rep.lagrangian,
                "multisymplectic": rep.multisymplectic,
                "complement": pj::subspace(&rep.complement),
            }))
        }
        Op::IsMaximalIsotropic { subspace, form, r, point } => {
            let t = s.form(form)?.evaluate(&s.point(point.as_ref())?)?;
            Outcome::new(json!({"maximal": is_maximal_isotropic(s.subspace(subspace)?, &t, *r)?}))
        }
        Op::DarbouxModel { model } => {
            let m = build_model(model)?;
            Outcome::new(json!({
                "coordinates": m.chart().names(),
                "dim": m.dim(),
                "theta": pj::form(m.theta()),
                "omega": pj::form(m.omega()),
                "closed": m.omega().is_closed(),
                "nondegenerate": m.is_nondegenerate(),
            }))
        }
        Op::TautologicalEval { model, point, vectors } => {
            let m = build_model(model)?;
            let point: Vec<_> = point.iter().map(|x| x.0.clone()).collect();
            let vectors: Vec<Vec<_>> = vectors.iter().map(|v| v.iter().map(|x| x.0.clone()).collect()).collect();
            let intrinsic = tautological_eval(&m, &point, &vectors)?;
            let coordinate = theta_coordinate_eval(&m, &point, &vectors)?;
            let agree = intrinsic == coordinate;
            let mut out = Outcome::new(json!({
                "intrinsic": pj::rational(&intrinsic),
                "coordinate": pj::rational(&coordinate),
                "agree": agree,
            }));
            if !agree {
                out.failures.push("intrinsic and coordinate values differ".into());
            }
            out
        }
        Op::CheckTypeConditions { form, fields, epsilon, r, point, samples } => {
            let w: Vec<MultiVectorField> = fields.iter().map(|f| s.field(f).cloned()).collect::<Result<_>>()?;
            let eps = epsilon.as_ref().map(|e| s.subspace(e)).transpose()?;
            let samples = samples.iter().map(|p| s.point(Some(p))).collect::<Result<Vec<_>>>()?;
            let rep = check_type_conditions(s.form(form)?, &w, eps, *r, &s.point(point.as_ref())?, &samples)?;
            Outcome::new(json!({
                "r": rep.r,
                "w_dim": rep.w_dim,
                "quotient_dim": rep.quotient_dim,
                "epsilon_dim": rep.epsilon_dim,
                "one_isotropic": rep.one_isotropic,
                "involutive": rep.involutive,
                "epsilon_contraction_vanishes": rep.epsilon_contraction_vanishes,
                "epsilon_contraction_vanishes_unrestricted": rep.epsilon_contraction_vanishes_unrestricted,
                "expected_w_dim": rep.expected_w_dim,
                "dimension_equality": rep.dimension_equality,
                "quotient_exceeds_degree": rep.quotient_exceeds_degree,
                "verdict": rep.verdict,
            }))
        }
        Op::Certify { field, form } => {
            let c = certify(s.field(field)?, s.form(form)?)?;
            Outcome::new(json!({
                "verdict": c.verdict.as_str(),
                "contraction": pj::form(&c.contraction),
                "hamiltonian_form": c.hamiltonian_form.as_ref().map(pj::form),
            }))
        }
        Op::SolveHamiltonianField { zeta, form, m, degree_bound } => {
            let (z, omega) = (s.form(zeta)?, s.form(form)?);
            match solve_hamiltonian_field(z, omega, *m, *degree_bound)? {
                SolveOutcome::NoSolution { reason } => Outcome::new(json!({"solved": false, "reason": reason})),
                SolveOutcome::Solved(sol) => {
                    let cert = certify(&sol.particular, omega)?;
                    let round_trip = match &cert.hamiltonian_form {
                        Some(h) => h.sub(z)?.is_closed(),
                        None => false,
                    };
                    let mut out = Outcome::new(json!({
                        "solved": true,
                        "particular": pj::field(&sol.particular),
                        "homogeneous": sol.homogeneous.iter().map(pj::field).collect::<Vec<_>>(),
                        "round_trip": round_trip,
                    }));
                    if !round_trip {
                        out.failures.push("certify does not recover ζ up to a closed form".into());
                    }
                    out
                }
            }
        }
        Op::CheckLocalHomogeneity { form, field } => {
            let rep = check_local_homogeneity(s.form(form)?, s.field(field)?)?;
            Outcome::new(json!({
                "success": rep.success,
                "factor": rep.factor.as_ref().map(|f| pj::polynomial(f, &s.chart)),
                "lie_derivative": pj::form(&rep.lie_derivative),
            }))
        }
        Op::HamiltonianSpanRank { form, fields, coordinate_fields, point } => {
            let mut all: Vec<MultiVectorField> = fields.iter().map(|f| s.field(f).cloned()).collect::<Result<_>>()?;
            if *coordinate_fields {
                all.extend((0..s.chart.dim()).map(|i| MultiVectorField::coordinate_field(s.chart.clone(), i)));
            }
            let rep = hamiltonian_span_rank(s.form(form)?, &all, &s.point(point.as_ref())?)?;
            Outcome::new(json!({"rank": rep.rank, "full": rep.full, "locally_hamiltonian": rep.locally_hamiltonian}))
        }
        Op::InvarianceProbe { form, p, degree_bound, generators } => {
            let omega = s.form(form)?;
            let family = match generators {
                None => default_generators(omega)?,
                Some(g) => {
                    let pick = |names: &[String]| -> Result<Vec<Generator>> {
                        names.iter().map(|n| Ok(Generator { label: n.clone(), field: s.field(n)?.clone() })).collect()
                    };
                    GeneratorFamily {
                        vector_fields: pick(&g.vector_fields)?,
                        multivector_fields: pick(&g.multivector_fields)?,
                    }
                }
            };
            let res = invariance_probe(omega, *p, *degree_bound, &family)?;
            let mut out = Outcome::new(json!({
                "verdict": res.verdict.as_str(),
                "target_degree": res.target_degree,
                "degree_bound": res.degree_bound,
                "generators": res.generator_labels.len(),
                "generators_used": res.generators_used,
                "unknowns": res.unknowns,
                "solution_dim": res.solution_basis.len(),
                "solution_basis": res.solution_basis.iter().map(pj::form).collect::<Vec<_>>(),
                "contains_form": res.contains_form,
            }));
            out.inconclusive = res.verdict == ProbeVerdict::Inconclusive;
            out
        }
        Op::RandomIdentities { property, cases, dim, max_degree } => random_identities(*property, *cases, *dim, *max_degree, rng)?,
    };
    Ok(out)
}

fn random_identities(property: Property, cases: usize, dim: usize, max_degree: u32, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    if dim == 0 || dim > 6 {
        return Err(argument(format!("property dimension {dim} outside 1..=6")));
    }
    let chart = random::chart(dim);
    let mut failures = 0;
    let mut first: Option<String> = None;
    for _ in 0..cases {
        let counterexample = match property {
            Property::DSquaredZero => {
                let degree = rng.gen_range(0..=dim);
                let w = random::form(rng, &chart, degree, max_degree);
                (!w.exterior_derivative().exterior_derivative().is_zero()).then(|| w.display())
            }
            Property::PullbackCommutesWithD => {
                let degree = rng.gen_range(0..dim);
                let w = random::form(rng, &chart, degree, max_degree);
                let phi = random::self_map(rng, &chart, 2);
                let lhs = pullback(&phi, &w.exterior_derivative())?;
                let rhs = pullback(&phi, &w)?.exterior_derivative();
                (lhs != rhs).then(|| w.display())
            }
            Property::PoincareRoundTrip => {
                let degree = rng.gen_range(0..dim);
                let eta = random::form(rng, &chart, degree, max_degree);
                let w = eta.exterior_derivative();
                (homotopy_inverse_d(&w)?.exterior_derivative() != w).then(|| eta.display())
            }
            Property::ContractionLaw => {
                let k = rng.gen_range(1..=dim);
                let m = rng.gen_range(1..=k.min(3));
                let w = random::form(rng, &chart, k, max_degree);
                let xs: Vec<MultiVectorField> = (0..m).map(|_| random::multivector_field(rng, &chart, 1, 1)).collect();
                let wedge = xs[1..].iter().try_fold(xs[0].clone(), |acc, x| acc.wedge(x))?;
                let lhs = interior(&wedge, &w)?;
                let rhs = xs.iter().rev().try_fold(w.clone(), |acc: DifferentialForm, x| interior(x, &acc))?;
                (lhs != rhs).then(|| w.display())
            }
            Property::JacobiIdentity => {
                let xs: Vec<MultiVectorField> = (0..3).map(|_| random::multivector_field(rng, &chart, 1, max_degree)).collect();
                let term = |a: usize, b: usize, c: usize| lie_bracket(&lie_bracket(&xs[a], &xs[b])?, &xs[c]);
                let sum = term(0, 1, 2)?.add(&term(1, 2, 0)?)?.add(&term(2, 0, 1)?)?;
                (!sum.is_zero()).then(|| xs[0].display())
            }
        };
        if let Some(c) = counterexample {
            failures += 1;
            first.get_or_insert(c);
        }
    }
    let mut out = Outcome::new(json!({
        "cases": cases,
        "failures": failures,
        "counterexample": first,
    }));
    if failures > 0 {
        out.failures.push(format!("{failures} of {cases} cases violate the identity"));
    }
    Ok(out)
}
