//! Declarative scenario files and their execution.
//!
//! A scenario is a JSON document with a single chart, named objects (forms,
//! multivector fields, subspaces, points, self-maps of the chart) and an
//! ordered list of tasks. See the project README for the format.

mod darboux;
mod json;
mod report;
mod run;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::multi_index::MultiIndex;
use crate::orthogonality::Subspace;
use crate::poly::{Chart, DifferentialForm, MultiVectorField, PolyMap, Polynomial};
use crate::scalar::{self, Rational};

pub use darboux::{build_model, darboux_scenario, ModelSpec};
pub use report::{Entry, ErrorInfo, Report, Status};
pub use run::{run, RunOptions, DEFAULT_SEED};

pub const SCHEMA_VERSION: u32 = 1;

/// A rational written either as a JSON integer or as a string `a` / `a/b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Number(pub Rational);

impl Serialize for Number {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&scalar::format(&self.0))
    }
}

impl<'de> Deserialize<'de> for Number {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match Value::deserialize(d)? {
            Value::Number(n) => match n.as_i64() {
                Some(i) => Ok(Number(scalar::int(i))),
                None => Err(D::Error::custom(format!("{n} is not an integer; write fractions as \"a/b\""))),
            },
            Value::String(s) => scalar::parse(&s).map(Number).map_err(D::Error::custom),
            other => Err(D::Error::custom(format!("expected a rational number, got {other}"))),
        }
    }
}

/// A point given inline or by the name of an entry in `points`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointArg {
    Named(String),
    Inline(Vec<Number>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    DSquaredZero,
    PullbackCommutesWithD,
    PoincareRoundTrip,
    ContractionLaw,
    JacobiIdentity,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    #[serde(default)]
    pub vector_fields: Vec<String>,
    #[serde(default)]
    pub multivector_fields: Vec<String>,
}

fn is_false(b: &bool) -> bool {
    !b
}

fn default_cases() -> usize {
    50
}

fn default_max_degree() -> u32 {
    2
}

fn default_property_dim() -> usize {
    3
}

/// Operation and arguments of a task. Objects are referenced by name.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum Op {
    Wedge { left: String, right: String },
    Interior { field: String, form: String },
    ExteriorDerivative { form: String },
    IsClosed { form: String },
    LieDerivative { field: String, form: String },
    LieBracket { left: String, right: String },
    Pullback { map: String, form: String },
    HomotopyInverseD { form: String },
    FlatMatrix {
        form: String,
        m: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        point: Option<PointArg>,
    },
    IsJNondegenerate {
        form: String,
        j: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        point: Option<PointArg>,
    },
    IsDecomposable {
        field: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        point: Option<PointArg>,
    },
    OrthComplement {
        subspace: String,
        form: String,
        r: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        point: Option<PointArg>,
    },
    Classify {
        subspace: String,
        form: String,
        r: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        point: Option<PointArg>,
    },
    IsMaximalIsotropic {
        subspace: String,
        form: String,
        r: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        point: Option<PointArg>,
    },
    DarbouxModel { model: ModelSpec },
    TautologicalEval { model: ModelSpec, point: Vec<Number>, vectors: Vec<Vec<Number>> },
    CheckTypeConditions {
        form: String,
        fields: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        epsilon: Option<String>,
        r: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        point: Option<PointArg>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        samples: Vec<PointArg>,
    },
    Certify { field: String, form: String },
    SolveHamiltonianField { zeta: String, form: String, m: usize, degree_bound: u32 },
    CheckLocalHomogeneity { form: String, field: String },
    HamiltonianSpanRank {
        form: String,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        fields: Vec<String>,
        #[serde(default, skip_serializing_if = "is_false")]
        coordinate_fields: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        point: Option<PointArg>,
    },
    InvarianceProbe {
        form: String,
        p: usize,
        degree_bound: u32,
        /// Omitted: the default generator recipe.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        generators: Option<GeneratorSpec>,
    },
    RandomIdentities {
        property: Property,
        #[serde(default = "default_cases")]
        cases: usize,
        #[serde(default = "default_property_dim")]
        dim: usize,
        #[serde(default = "default_max_degree")]
        max_degree: u32,
    },
}

impl Op {
    pub fn name(&self) -> String {
        match serde_json::to_value(self) {
            Ok(Value::Object(m)) => m.get("op").and_then(Value::as_str).unwrap_or_default().to_string(),
            _ => String::new(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    Structural,
    Argument,
    Precondition,
    Syntax,
    Semantic,
    Any,
}

impl ErrorKind {
    pub fn of(e: &Error) -> ErrorKind {
        match e {
            Error::Structural(_) => ErrorKind::Structural,
            Error::Argument(_) => ErrorKind::Argument,
            Error::Precondition(_) => ErrorKind::Precondition,
            Error::Syntax { .. } => ErrorKind::Syntax,
            Error::Semantic(_) => ErrorKind::Semantic,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorKind::Structural => "structural",
            ErrorKind::Argument => "argument",
            ErrorKind::Precondition => "precondition",
            ErrorKind::Syntax => "syntax",
            ErrorKind::Semantic => "semantic",
            ErrorKind::Any => "any",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Task {
    pub id: String,
    pub op: Op,
    /// Subset of the payload the task must reproduce.
    pub expect: Option<Value>,
    /// The task must fail with this kind of error.
    pub expect_error: Option<ErrorKind>,
}

impl Serialize for Task {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = match serde_json::to_value(&self.op).map_err(serde::ser::Error::custom)? {
            Value::Object(m) => m,
            _ => Map::new(),
        };
        map.insert("id".into(), Value::String(self.id.clone()));
        if let Some(e) = &self.expect {
            map.insert("expect".into(), e.clone());
        }
        if let Some(k) = self.expect_error {
            map.insert("expect_error".into(), Value::String(k.as_str().into()));
        }
        map.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Task {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let mut map = Map::deserialize(d)?;
        let id = match map.remove("id") {
            Some(Value::String(s)) => s,
            Some(other) => return Err(D::Error::custom(format!("task id must be a string, got {other}"))),
            None => return Err(D::Error::custom("task without an \"id\"")),
        };
        let expect = map.remove("expect");
        let expect_error = map
            .remove("expect_error")
            .map(serde_json::from_value::<ErrorKind>)
            .transpose()
            .map_err(|e| D::Error::custom(format!("task {id:?}: {e}")))?;
        let op = Op::deserialize(Value::Object(map)).map_err(|e| D::Error::custom(format!("task {id:?}: {e}")))?;
        Ok(Task { id, op, expect, expect_error })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SplitSpec {
    base: Vec<String>,
    fiber: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChartSpec {
    coordinates: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    split: Option<SplitSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
enum IndexEntry {
    Position(usize),
    Name(String),
}

/// A coefficient: a polynomial in the grammar, or a bare integer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
enum CoeffText {
    Int(i64),
    Text(String),
}

impl CoeffText {
    fn text(&self) -> String {
        match self {
            CoeffText::Int(i) => i.to_string(),
            CoeffText::Text(s) => s.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComponentSpec {
    index: Vec<IndexEntry>,
    coeff: CoeffText,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TensorSpec {
    degree: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    components: Vec<ComponentSpec>,
    /// Shorthand for vector fields: one coefficient per coordinate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    vector: Option<Vec<CoeffText>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SubspaceSpec {
    vectors: Vec<Vec<Number>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MapSpec {
    components: Vec<CoeffText>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    chart: ChartSpec,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    forms: BTreeMap<String, TensorSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    fields: BTreeMap<String, TensorSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    subspaces: BTreeMap<String, SubspaceSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    points: BTreeMap<String, Vec<Number>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    maps: BTreeMap<String, MapSpec>,
    #[serde(default)]
    tasks: Vec<Task>,
}

/// A validated scenario.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scenario {
    pub name: Option<String>,
    pub seed: Option<u64>,
    pub chart: Arc<Chart>,
    pub forms: BTreeMap<String, DifferentialForm>,
    pub fields: BTreeMap<String, MultiVectorField>,
    pub subspaces: BTreeMap<String, Subspace>,
    pub points: BTreeMap<String, Vec<Rational>>,
    pub maps: BTreeMap<String, PolyMap>,
    pub tasks: Vec<Task>,
}

fn semantic(msg: impl Into<String>) -> Error {
    Error::Semantic(msg.into())
}

fn json_error(e: serde_json::Error) -> Error {
    Error::Syntax { line: e.line(), column: e.column(), message: strip_position(&e.to_string()) }
}

fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

/// Parses and validates scenario text.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let file: ScenarioFile = serde_json::from_str(text).map_err(json_error)?;
    if file.schema_version != SCHEMA_VERSION {
        return Err(semantic(format!(
            "unsupported schema_version {}; this build reads version {SCHEMA_VERSION}",
            file.schema_version
        )));
    }
    let chart = match &file.chart.split {
        None => Chart::new(file.chart.coordinates.clone()),
        Some(s) => Chart::with_split(file.chart.coordinates.clone(), &s.base, &s.fiber),
    }
    .map_err(|e| semantic(format!("chart: {e}")))?;
    let n = chart.dim();

    let mut forms = BTreeMap::new();
    for (name, spec) in &file.forms {
        let comps = tensor_components(&chart, spec, &format!("form {name:?}"))?;
        let f = DifferentialForm::from_components(chart.clone(), spec.degree, comps)
            .map_err(|e| semantic(format!("form {name:?}: {e}")))?;
        forms.insert(name.clone(), f);
    }
    let mut fields = BTreeMap::new();
    for (name, spec) in &file.fields {
        let comps = tensor_components(&chart, spec, &format!("field {name:?}"))?;
        let f = MultiVectorField::from_components(chart.clone(), spec.degree, comps)
            .map_err(|e| semantic(format!("field {name:?}: {e}")))?;
        fields.insert(name.clone(), f);
    }
    let mut subspaces = BTreeMap::new();
    for (name, spec) in &file.subspaces {
        let vectors: Vec<Vec<Rational>> =
            spec.vectors.iter().map(|v| v.iter().map(|x| x.0.clone()).collect()).collect();
        if let Some(v) = vectors.iter().find(|v| v.len() != n) {
            return Err(semantic(format!("subspace {name:?}: vector of length {} on a chart of dimension {n}", v.len())));
        }
        subspaces.insert(name.clone(), Subspace::span(n, &vectors)?);
    }
    let mut points = BTreeMap::new();
    for (name, p) in &file.points {
        if p.len() != n {
            return Err(semantic(format!("point {name:?} has length {} on a chart of dimension {n}", p.len())));
        }
        points.insert(name.clone(), p.iter().map(|x| x.0.clone()).collect());
    }
    let mut maps = BTreeMap::new();
    for (name, spec) in &file.maps {
        if spec.components.len() != n {
            return Err(semantic(format!(
                "map {name:?} needs {n} components (one per coordinate), got {}",
                spec.components.len()
            )));
        }
        let comps = spec
            .components
            .iter()
            .map(|c| parse_coeff(&chart, c, &format!("map {name:?}")))
            .collect::<Result<Vec<_>>>()?;
        maps.insert(name.clone(), PolyMap::new(chart.clone(), chart.clone(), comps)?);
    }

    let scenario = Scenario { name: file.name, seed: file.seed, chart, forms, fields, subspaces, points, maps, tasks: file.tasks };
    scenario.validate()?;
    Ok(scenario)
}

fn parse_coeff(chart: &Arc<Chart>, c: &CoeffText, context: &str) -> Result<Polynomial> {
    Polynomial::parse(&c.text(), chart.names()).map_err(|e| match e {
        Error::Syntax { line, column, message } => {
            Error::Syntax { line, column, message: format!("{context}: {message} in {:?}", c.text()) }
        }
        Error::Semantic(m) => semantic(format!("{context}: {m}")),
        other => other,
    })
}

fn tensor_components(chart: &Arc<Chart>, spec: &TensorSpec, context: &str) -> Result<Vec<(MultiIndex, Polynomial)>> {
    let n = chart.dim();
    let mut out = Vec::new();
    if let Some(v) = &spec.vector {
        if spec.degree != 1 || !spec.components.is_empty() {
            return Err(semantic(format!("{context}: \"vector\" needs degree 1 and no \"components\"")));
        }
        if v.len() != n {
            return Err(semantic(format!("{context}: vector of length {} on a chart of dimension {n}", v.len())));
        }
        for (i, c) in v.iter().enumerate() {
            out.push((MultiIndex::single(i), parse_coeff(chart, c, context)?));
        }
        return Ok(out);
    }
    if spec.degree > n {
        return Err(semantic(format!("{context}: degree {} exceeds the chart dimension {n}", spec.degree)));
    }
    let mut seen = BTreeSet::new();
    for (k, comp) in spec.components.iter().enumerate() {
        let positions = comp
            .index
            .iter()
            .map(|e| match e {
                IndexEntry::Position(p) if (1..=n).contains(p) => Ok(*p - 1),
                IndexEntry::Position(p) => Err(semantic(format!("{context}: index {p} outside 1..={n}"))),
                IndexEntry::Name(s) => chart
                    .index_of(s)
                    .ok_or_else(|| semantic(format!("{context}: unknown coordinate {s:?} in an index"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if positions.len() != spec.degree {
            return Err(semantic(format!(
                "{context}: component {} has {} indices but the degree is {}",
                k + 1,
                positions.len(),
                spec.degree
            )));
        }
        let index = MultiIndex::from_increasing(&positions).map_err(|e| semantic(format!("{context}: {e}")))?;
        if !seen.insert(index) {
            return Err(semantic(format!("{context}: index {index:?} appears twice")));
        }
        out.push((index, parse_coeff(chart, &comp.coeff, context)?));
    }
    Ok(out)
}

impl Scenario {
    /// Empty scenario on `chart`.
    pub fn new(chart: Arc<Chart>) -> Scenario {
        Scenario {
            name: None,
            seed: None,
            chart,
            forms: BTreeMap::new(),
            fields: BTreeMap::new(),
            subspaces: BTreeMap::new(),
            points: BTreeMap::new(),
            maps: BTreeMap::new(),
            tasks: Vec::new(),
        }
    }

    pub fn form(&self, name: &str) -> Result<&DifferentialForm> {
        self.forms.get(name).ok_or_else(|| semantic(format!("undefined form {name:?}")))
    }

    pub fn field(&self, name: &str) -> Result<&MultiVectorField> {
        self.fields.get(name).ok_or_else(|| semantic(format!("undefined field {name:?}")))
    }

    pub fn subspace(&self, name: &str) -> Result<&Subspace> {
        self.subspaces.get(name).ok_or_else(|| semantic(format!("undefined subspace {name:?}")))
    }

    pub fn map(&self, name: &str) -> Result<&PolyMap> {
        self.maps.get(name).ok_or_else(|| semantic(format!("undefined map {name:?}")))
    }

    /// The origin when `point` is omitted.
    pub fn point(&self, point: Option<&PointArg>) -> Result<Vec<Rational>> {
        let n = self.chart.dim();
        let p = match point {
            None => vec![scalar::zero(); n],
            Some(PointArg::Named(name)) => {
                self.points.get(name).cloned().ok_or_else(|| semantic(format!("undefined point {name:?}")))?
            }
            Some(PointArg::Inline(v)) => v.iter().map(|x| x.0.clone()).collect(),
        };
        if p.len() != n {
            return Err(semantic(format!("point of length {} on a chart of dimension {n}", p.len())));
        }
        Ok(p)
    }

    fn field_of_degree(&self, name: &str, degree: usize, context: &str) -> Result<()> {
        let f = self.field(name)?;
        if f.degree() != degree {
            return Err(semantic(format!("{context}: field {name:?} has degree {}, expected {degree}", f.degree())));
        }
        Ok(())
    }

    /// Checks every task's references and degrees.
    pub fn validate(&self) -> Result<()> {
        let mut ids = BTreeSet::new();
        for t in &self.tasks {
            if !ids.insert(t.id.as_str()) {
                return Err(semantic(format!("duplicate task id {:?}", t.id)));
            }
            self.validate_task(t).map_err(|e| match e {
                Error::Semantic(m) => semantic(format!("task {:?}: {m}", t.id)),
                other => other,
            })?;
        }
        Ok(())
    }

    fn validate_task(&self, t: &Task) -> Result<()> {
        match &t.op {
            Op::Wedge { left, right } => {
                let forms = (self.forms.contains_key(left), self.forms.contains_key(right));
                let fields = (self.fields.contains_key(left), self.fields.contains_key(right));
                if !(forms == (true, true) || fields == (true, true)) {
                    return Err(semantic(format!(
                        "wedge needs two forms or two fields; {left:?} and {right:?} are not both defined as either"
                    )));
                }
            }
            Op::Interior { field, form } | Op::LieDerivative { field, form } | Op::Certify { field, form } => {
                self.field(field)?;
                self.form(form)?;
            }
            Op::ExteriorDerivative { form } | Op::IsClosed { form } | Op::HomotopyInverseD { form } => {
                self.form(form)?;
            }
            Op::LieBracket { left, right } => {
                self.field_of_degree(left, 1, "lie_bracket")?;
                self.field_of_degree(right, 1, "lie_bracket")?;
            }
            Op::Pullback { map, form } => {
                self.map(map)?;
                self.form(form)?;
            }
            Op::FlatMatrix { form, point, .. } | Op::IsJNondegenerate { form, point, .. } => {
                self.form(form)?;
                self.point(point.as_ref())?;
            }
            Op::IsDecomposable { field, point } => {
                self.field(field)?;
                self.point(point.as_ref())?;
            }
            Op::OrthComplement { subspace, form, point, .. }
            | Op::Classify { subspace, form, point, .. }
            | Op::IsMaximalIsotropic { subspace, form, point, .. } => {
                self.subspace(subspace)?;
                self.form(form)?;
                self.point(point.as_ref())?;
            }
            Op::DarbouxModel { model } => model.validate()?,
            Op::TautologicalEval { model, point, vectors } => {
                model.validate()?;
                if vectors.len() != model.degree {
                    return Err(semantic(format!("expected {} vectors, got {}", model.degree, vectors.len())));
                }
                let dim = build_model(model)?.dim();
                if point.len() != dim || vectors.iter().any(|v| v.len() != dim) {
                    return Err(semantic(format!("point and vectors must have the model dimension {dim}")));
                }
            }
            Op::CheckTypeConditions { form, fields, epsilon, point, samples, .. } => {
                self.form(form)?;
                for f in fields {
                    self.field_of_degree(f, 1, "check_type_conditions")?;
                }
                if let Some(e) = epsilon {
                    self.subspace(e)?;
                }
                self.point(point.as_ref())?;
                for s in samples {
                    self.point(Some(s))?;
                }
            }
            Op::SolveHamiltonianField { zeta, form, m, .. } => {
                let (z, w) = (self.form(zeta)?, self.form(form)?);
                if z.degree() + m + 1 != w.degree() {
                    return Err(semantic(format!(
                        "ζ {zeta:?} has degree {} but must have degree k − m − 1 = {} − {m} − 1",
                        z.degree(),
                        w.degree()
                    )));
                }
            }
            Op::CheckLocalHomogeneity { form, field } => {
                self.form(form)?;
                self.field_of_degree(field, 1, "check_local_homogeneity")?;
            }
            Op::HamiltonianSpanRank { form, fields, point, .. } => {
                self.form(form)?;
                for f in fields {
                    self.field_of_degree(f, 1, "hamiltonian_span_rank")?;
                }
                self.point(point.as_ref())?;
            }
            Op::InvarianceProbe { form, generators, .. } => {
                let k = self.form(form)?.degree();
                if let Some(g) = generators {
                    for f in &g.vector_fields {
                        self.field_of_degree(f, 1, "invariance_probe")?;
                    }
                    for f in &g.multivector_fields {
                        self.field_of_degree(f, k.saturating_sub(1), "invariance_probe")?;
                    }
                }
            }
            Op::RandomIdentities { .. } => {}
        }
        Ok(())
    }

    /// Canonical JSON text of the scenario; parsing it yields an equal value.
    pub fn to_json(&self) -> String {
        let names = self.chart.names();
        let tensor = |degree: usize, comps: &BTreeMap<MultiIndex, Polynomial>| TensorSpec {
            degree,
            components: comps
                .iter()
                .map(|(i, p)| ComponentSpec {
                    index: i.iter().map(|k| IndexEntry::Position(k + 1)).collect(),
                    coeff: CoeffText::Text(p.display(names)),
                })
                .collect(),
            vector: None,
        };
        let split = self.chart.split().map(|s| SplitSpec {
            base: s.base.iter().map(|&i| names[i].clone()).collect(),
            fiber: s.fiber.iter().map(|&i| names[i].clone()).collect(),
        });
        let number_rows = |rows: Vec<Vec<Rational>>| rows.into_iter().map(|r| r.into_iter().map(Number).collect()).collect();
        let file = ScenarioFile {
            schema_version: SCHEMA_VERSION,
            name: self.name.clone(),
            seed: self.seed,
            chart: ChartSpec { coordinates: names.to_vec(), split },
            forms: self.forms.iter().map(|(k, f)| (k.clone(), tensor(f.degree(), f.components()))).collect(),
            fields: self.fields.iter().map(|(k, f)| (k.clone(), tensor(f.degree(), f.components()))).collect(),
            subspaces: self
                .subspaces
                .iter()
                .map(|(k, s)| (k.clone(), SubspaceSpec { vectors: number_rows(s.basis_vectors()) }))
                .collect(),
            points: self.points.iter().map(|(k, p)| (k.clone(), p.iter().cloned().map(Number).collect())).collect(),
            maps: self
                .maps
                .iter()
                .map(|(k, m)| {
                    (k.clone(), MapSpec { components: m.components().iter().map(|p| CoeffText::Text(p.display(names))).collect() })
                })
                .collect(),
            tasks: self.tasks.clone(),
        };
        let mut text = serde_json::to_string_pretty(&file).expect("scenario serializes");
        text.push('\n');
        text
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "schema_version": 1,
        "chart": {"coordinates": ["x", "p"]},
        "forms": {"Omega": {"degree": 2, "components": [{"index": [1, 2], "coeff": "1"}]}},
        "tasks": [{"id": "nd", "op": "is_j_nondegenerate", "form": "Omega", "j": 1}]
    }"#;

    #[test]
    fn minimal_scenario_parses() {
        let s = parse_scenario(MINIMAL).unwrap();
        assert_eq!(s.tasks.len(), 1);
        assert_eq!(s.tasks[0].op.name(), "is_j_nondegenerate");
        assert_eq!(parse_scenario(&s.to_json()).unwrap(), s);
    }

    #[test]
    fn undefined_reference_is_named() {
        let text = MINIMAL.replace("\"form\": \"Omega\"", "\"form\": \"Omega2\"");
        let err = parse_scenario(&text).unwrap_err();
        assert!(matches!(&err, Error::Semantic(m) if m.contains("Omega2")), "{err}");
    }

    #[test]
    fn unordered_index_gets_hint() {
        let text = MINIMAL.replace("[1, 2]", "[2, 1]");
        let err = parse_scenario(&text).unwrap_err();
        assert!(matches!(&err, Error::Semantic(m) if m.contains("reorder")), "{err}");
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = parse_scenario("{\n  \"schema_version\": 1,\n  \"chart\": {\"coordinates\": [\"x\",]}\n}").unwrap_err();
        match err {
            Error::Syntax { line, .. } => assert_eq!(line, 3),
            other => panic!("{other}"),
        }
        let err = parse_scenario(&MINIMAL.replace("is_j_nondegenerate", "no_such_op")).unwrap_err();
        assert!(matches!(&err, Error::Syntax { message, .. } if message.contains("no_such_op")), "{err}");
        let err = parse_scenario(&MINIMAL.replace("\"coeff\": \"1\"", "\"coeff\": \"1 +\"")).unwrap_err();
        assert!(matches!(err, Error::Syntax { .. }), "{err}");
    }

    #[test]
    fn names_in_indices_and_vector_shorthand() {
        let text = r#"{
            "schema_version": 1,
            "chart": {"coordinates": ["x", "p"]},
            "forms": {"Omega": {"degree": 2, "components": [{"index": ["x", "p"], "coeff": -1}]}},
            "fields": {"X": {"degree": 1, "vector": ["p", "-x"]}},
            "points": {"a": [1, "1/2"]}
        }"#;
        let s = parse_scenario(text).unwrap();
        assert_eq!(s.fields["X"].display(), "(p) Dx + (-x) Dp");
        assert_eq!(s.points["a"][1], scalar::ratio(1, 2));
        assert_eq!(parse_scenario(&s.to_json()).unwrap(), s);
    }
}
