//! Canonical payload serialization.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::exterior::FlatMatrix;
use crate::linalg::Matrix;
use crate::multi_index::MultiIndex;
use crate::orthogonality::Subspace;
use crate::poly::{Chart, DifferentialForm, MultiVectorField, Polynomial};
use crate::scalar::{self, Rational};

pub fn rational(q: &Rational) -> Value {
    Value::String(scalar::format(q))
}

pub fn vector(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(rational).collect())
}

pub fn index(i: MultiIndex) -> Value {
    Value::Array(i.iter().map(|k| json!(k + 1)).collect())
}

pub fn polynomial(p: &Polynomial, chart: &Chart) -> Value {
    Value::String(p.display(chart.names()))
}

fn components(chart: &Chart, degree: usize, comps: &BTreeMap<MultiIndex, Polynomial>) -> Value {
    json!({
        "degree": degree,
        "components": comps
            .iter()
            .map(|(i, p)| json!({"index": index(*i), "coeff": polynomial(p, chart)}))
            .collect::<Vec<_>>(),
    })
}

pub fn form(f: &DifferentialForm) -> Value {
    components(f.chart(), f.degree(), f.components())
}

pub fn field(f: &MultiVectorField) -> Value {
    components(f.chart(), f.degree(), f.components())
}

pub fn matrix(m: &Matrix) -> Value {
    Value::Array(m.rows().iter().map(|r| vector(r)).collect())
}

pub fn subspace(s: &Subspace) -> Value {
    json!({"dim": s.dim(), "basis": matrix(s.basis())})
}

pub fn flat(f: &FlatMatrix) -> Value {
    json!({
        "source_basis": f.source_basis().into_iter().map(index).collect::<Vec<_>>(),
        "target_basis": f.target_basis().into_iter().map(index).collect::<Vec<_>>(),
        "rows": matrix(&f.matrix),
    })
}
