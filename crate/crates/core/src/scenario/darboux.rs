//! Canonical-model scenarios.

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{json as pj, Number, Op, PointArg, Scenario, Task};
use crate::canonical::{build_darboux, build_darboux_horizontal, DarbouxModel};
use crate::error::{argument, Result};
use crate::poly::MultiVectorField;
use crate::scalar::{int, ratio};

/// A canonical model: `Λ^k T*Q` with `dim Q = base_dim`, or its subbundle
/// of `r`-horizontal forms when `fiber_coords` names some of `x1, …, xn`
/// as the vertical coordinates of `Q → E`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub base_dim: usize,
    pub degree: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fiber_coords: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizontal: Option<usize>,
}

impl ModelSpec {
    pub fn validate(&self) -> Result<()> {
        build_model(self).map(|_| ())
    }
}

pub fn build_model(spec: &ModelSpec) -> Result<DarbouxModel> {
    let n = spec.base_dim;
    match (spec.fiber_coords.is_empty(), spec.horizontal) {
        (true, None) => build_darboux(n, spec.degree),
        (false, None) => Err(argument("fiber coordinates need a horizontality level")),
        (_, Some(r)) => {
            let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
            for f in &spec.fiber_coords {
                if !names.contains(f) {
                    return Err(argument(format!("fiber coordinate {f:?} is not one of x1..x{n}")));
                }
            }
            let base: Vec<String> = names.iter().filter(|x| !spec.fiber_coords.contains(x)).cloned().collect();
            let fiber: Vec<String> = names.iter().filter(|x| spec.fiber_coords.contains(x)).cloned().collect();
            build_darboux_horizontal(&base, &fiber, spec.degree, r)
        }
    }
}

fn task(id: &str, op: Op, expect: serde_json::Value) -> Task {
    Task { id: id.into(), op, expect: Some(expect), expect_error: None }
}

/// A ready-to-run scenario for the canonical model: `Θ`, `Ω`, the Euler
/// field and the vertical fields, with tasks checking closedness,
/// nondegeneracy, the tautological identity, homogeneity, spanning, the type
/// conditions and (for charts of dimension at most 6) the invariance probe.
pub fn darboux_scenario(spec: &ModelSpec) -> Result<Scenario> {
    let model = build_model(spec)?;
    let chart = model.chart().clone();
    let dim = chart.dim();
    let k = model.form_degree();
    let mut s = Scenario::new(chart.clone());
    s.name = Some(match spec.horizontal {
        Some(r) if !spec.fiber_coords.is_empty() => {
            format!("darboux n={} k={k} fiber={} r={r}", spec.base_dim, spec.fiber_coords.join(","))
        }
        _ => format!("darboux n={} k={k}", spec.base_dim),
    });
    s.forms.insert("Theta".into(), model.theta().clone());
    s.forms.insert("Omega".into(), model.omega().clone());
    s.fields.insert("Delta".into(), model.euler_field());
    let mut vertical = Vec::new();
    for f in model.vertical_fields() {
        let (index, _) = f.components().iter().next().expect("coordinate field");
        let name = format!("D_{}", chart.name(index.iter().next().expect("degree 1")));
        s.fields.insert(name.clone(), f);
        vertical.push(name);
    }
    let epsilon = model.epsilon();
    let has_fiber = epsilon.dim() > 0;
    if has_fiber {
        s.subspaces.insert("epsilon".into(), epsilon);
    }
    let sample: Vec<_> = (0..dim).map(|i| ratio(i as i64 % 5 - 2, (i as i64 % 3) + 1)).collect();
    s.points.insert("sample".into(), sample.clone());

    let at = || Some(PointArg::Named("sample".into()));
    s.tasks.push(task("omega_closed", Op::IsClosed { form: "Omega".into() }, json!({"closed": true})));
    s.tasks.push(task(
        "theta_primitive",
        Op::ExteriorDerivative { form: "Theta".into() },
        json!({"result": pj::form(model.omega())}),
    ));
    s.tasks.push(task(
        "omega_nondegenerate",
        Op::IsJNondegenerate { form: "Omega".into(), j: 1, point: at() },
        json!({"nondegenerate": true}),
    ));
    let vectors: Vec<Vec<Number>> = (0..k)
        .map(|j| (0..dim).map(|t| Number(int(((j + 1) * (t + 2) % 5) as i64 - 2))).collect())
        .collect();
    s.tasks.push(task(
        "tautological",
        Op::TautologicalEval {
            model: spec.clone(),
            point: sample.iter().cloned().map(Number).collect(),
            vectors,
        },
        json!({"agree": true}),
    ));
    s.tasks.push(task(
        "homogeneity",
        Op::CheckLocalHomogeneity { form: "Omega".into(), field: "Delta".into() },
        json!({"success": true, "factor": (k + 1).to_string()}),
    ));
    s.tasks.push(task(
        "coordinate_span",
        Op::HamiltonianSpanRank { form: "Omega".into(), fields: vec![], coordinate_fields: true, point: at() },
        json!({"rank": dim, "full": true}),
    ));
    let r = model.type_level();
    let type_expect = if model.base_dim() > k {
        json!({"verdict": true})
    } else {
        // dim Q = k: the quotient is too small for the last condition
        json!({"one_isotropic": true, "involutive": true, "dimension_equality": true, "quotient_exceeds_degree": false})
    };
    s.tasks.push(task(
        "vertical_type",
        Op::CheckTypeConditions {
            form: "Omega".into(),
            fields: vertical.clone(),
            epsilon: has_fiber.then(|| "epsilon".into()),
            r,
            point: at(),
            samples: vec![],
        },
        type_expect,
    ));
    let coordinate = MultiVectorField::coordinate_field(chart.clone(), 0);
    s.fields.insert("D_x1".into(), coordinate);
    s.tasks.push(task(
        "coordinate_certificate",
        Op::Certify { field: "D_x1".into(), form: "Omega".into() },
        json!({"verdict": "hamiltonian"}),
    ));
    if dim <= 6 && !has_fiber {
        for p in [k + 1, k] {
            s.tasks.push(task(
                &format!("probe_p{p}"),
                Op::InvarianceProbe { form: "Omega".into(), p, degree_bound: 1, generators: None },
                json!({"verdict": "matches_theorem"}),
            ));
        }
    }
    Ok(s)
}
