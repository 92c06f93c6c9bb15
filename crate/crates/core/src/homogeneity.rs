//! Euler-field homogeneity, spanning by locally Hamiltonian fields, and the
//! finite invariance probe for forms preserved by locally Hamiltonian fields.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{argument, precondition, structural, Result};
use crate::exterior::is_j_nondegenerate;
use crate::hamiltonian::{certify, solve_hamiltonian_field, SolveOutcome};
use crate::linalg::RowReducer;
use crate::multi_index::{combinations, MultiIndex};
use crate::orthogonality::Subspace;
use crate::poly::{evaluate_vector, lie_derivative, monomials_up_to, DifferentialForm, Monomial, MultiVectorField, Polynomial};
use crate::scalar::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomogeneityReport {
    pub field: MultiVectorField,
    pub lie_derivative: DifferentialForm,
    pub success: bool,
    /// `f` with `L(Δ) Ω = f Ω`, when it exists.
    pub factor: Option<Polynomial>,
}

pub fn check_local_homogeneity(omega: &DifferentialForm, delta: &MultiVectorField) -> Result<HomogeneityReport> {
    if omega.chart() != delta.chart() {
        return Err(structural("form and field live on different charts"));
    }
    if delta.degree() != 1 {
        return Err(argument(format!("expected a vector field, got a {}-vector field", delta.degree())));
    }
    let lie = lie_derivative(delta, omega)?;
    let nvars = omega.chart().dim();
    let factor = match omega.components().iter().next() {
        None => Some(Polynomial::zero(nvars)),
        Some((index, c)) => lie.component(*index).div_exact(c),
    };
    let factor = factor.filter(|f| omega.mul_polynomial(f) == lie);
    Ok(HomogeneityReport { field: delta.clone(), lie_derivative: lie, success: factor.is_some(), factor })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanReport {
    /// Rank of the locally Hamiltonian fields among the input, evaluated at the point.
    pub rank: usize,
    pub full: bool,
    /// Per input field: whether its contraction with `Ω` is closed.
    pub locally_hamiltonian: Vec<bool>,
}

pub fn hamiltonian_span_rank(
    omega: &DifferentialForm,
    fields: &[MultiVectorField],
    point: &[Rational],
) -> Result<SpanReport> {
    let n = omega.chart().dim();
    if point.len() != n {
        return Err(argument(format!("point of length {} on a chart of dimension {n}", point.len())));
    }
    let mut flags = Vec::with_capacity(fields.len());
    let mut vectors = Vec::new();
    for f in fields {
        if f.degree() != 1 {
            return Err(argument(format!("expected vector fields, got a {}-vector field", f.degree())));
        }
        let lh = certify(f, omega)?.is_locally_hamiltonian();
        if lh {
            vectors.push(evaluate_vector(f, point)?);
        }
        flags.push(lh);
    }
    let rank = Subspace::span(n, &vectors)?.dim();
    Ok(SpanReport { rank, full: rank == n, locally_hamiltonian: flags })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub label: String,
    pub field: MultiVectorField,
}

/// Locally Hamiltonian vector fields and `(k−1)`-vector fields for a `k`-form.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GeneratorFamily {
    pub vector_fields: Vec<Generator>,
    pub multivector_fields: Vec<Generator>,
}

impl GeneratorFamily {
    pub fn len(&self) -> usize {
        self.vector_fields.len() + self.multivector_fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn iter(&self) -> impl Iterator<Item = &Generator> {
        self.vector_fields.iter().chain(&self.multivector_fields)
    }
}

/// The default family for a constant-coefficient `k`-form `Ω`:
///
/// * for `m = 1` and `m = k − 1`, the particular Hamiltonian `m`-fields of
///   `ζ = x^μ dx^J` for every coordinate monomial `x^μ` of degree at most 2
///   and every basis `(k−m−1)`-form `dx^J`, together with the solutions of
///   `i(X) Ω = 0` with coefficients of degree at most 1;
/// * the decomposable coordinate fields `∂_{i₁} ∧ … ∧ ∂_{i_{k−1}}`.
pub fn default_generators(omega: &DifferentialForm) -> Result<GeneratorFamily> {
    let k = omega.degree();
    if k < 2 {
        return Err(argument(format!("form degree {k} leaves no locally Hamiltonian fields to probe with")));
    }
    let chart = omega.chart();
    let n = chart.dim();
    let mut family = GeneratorFamily::default();
    for (m, out) in [(1, &mut family.vector_fields), (k - 1, &mut family.multivector_fields)] {
        let mut seen = Vec::new();
        let mut push = |label: String, field: MultiVectorField, out: &mut Vec<Generator>| {
            if !field.is_zero() && !seen.contains(&field) {
                seen.push(field.clone());
                out.push(Generator { label, field });
            }
        };
        for mono in monomials_up_to(n, 2) {
            let coeff = Polynomial::term(n, mono, Rational::from_integer(1.into()));
            for j in combinations(n, k - m - 1) {
                let zeta = DifferentialForm::monomial(chart.clone(), j, coeff.clone());
                if let SolveOutcome::Solved(sol) = solve_hamiltonian_field(&zeta, omega, m, 1)? {
                    push(format!("hamiltonian[{}]", zeta.display()), sol.particular, out);
                }
            }
        }
        let zero = DifferentialForm::zero(chart.clone(), k - m - 1);
        if let SolveOutcome::Solved(sol) = solve_hamiltonian_field(&zero, omega, m, 1)? {
            for h in sol.homogeneous {
                push(format!("kernel[{}]", h.display()), h, out);
            }
        }
        if m == k - 1 {
            for i in combinations(n, m) {
                let f = MultiVectorField::monomial(chart.clone(), i, Polynomial::one(n));
                push(format!("coordinate[{}]", f.display()), f, out);
            }
        }
    }
    Ok(family)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProbeVerdict {
    MatchesTheorem,
    Inconclusive,
}

impl ProbeVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            ProbeVerdict::MatchesTheorem => "matches_theorem",
            ProbeVerdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvarianceProbeResult {
    pub target_degree: usize,
    pub degree_bound: u32,
    pub generator_labels: Vec<String>,
    /// Number of generators whose constraints were assembled before the
    /// system reached its maximal possible rank.
    pub generators_used: usize,
    pub unknowns: usize,
    pub solution_basis: Vec<DifferentialForm>,
    /// For `p = k`: whether `Ω` lies in the solution space.
    pub contains_form: Option<bool>,
    pub verdict: ProbeVerdict,
}

/// Solves `L(X) α = 0` for every generator `X`, over `p`-forms `α` whose
/// coefficients are polynomials of degree at most `degree_bound`.
///
/// Constraints are assembled generator by generator (concurrently in small
/// batches, merged in generator order) and assembly stops once the rank
/// reaches its ceiling: all unknowns for `p = k − 1`, all but the direction
/// of `Ω` for `p = k`.
pub fn invariance_probe(
    omega: &DifferentialForm,
    p: usize,
    degree_bound: u32,
    generators: &GeneratorFamily,
) -> Result<InvarianceProbeResult> {
    let chart = omega.chart();
    let n = chart.dim();
    let k = omega.degree();
    if k < 1 || (p != k && p + 1 != k) {
        return Err(argument(format!("target degree p = {p} must be k − 1 or k with k = {k}")));
    }
    if !omega.is_closed() {
        return Err(precondition(format!("form is not closed; dΩ = {}", omega.exterior_derivative().display())));
    }
    let origin = vec![Rational::from_integer(0.into()); n];
    if !is_j_nondegenerate(&omega.evaluate(&origin)?, 1)? {
        return Err(precondition("form is degenerate at the origin"));
    }
    if omega.max_coefficient_degree().is_some_and(|d| d > degree_bound) {
        return Err(argument(format!("degree bound {degree_bound} is below the coefficient degree of the form")));
    }
    for g in &generators.vector_fields {
        check_generator(g, omega, 1)?;
    }
    for g in &generators.multivector_fields {
        check_generator(g, omega, k - 1)?;
    }

    let monomials = monomials_up_to(n, degree_bound);
    let unknowns: Vec<(MultiIndex, Monomial)> =
        combinations(n, p).into_iter().flat_map(|j| monomials.iter().map(move |mu| (j, mu.clone()))).collect();
    let ncols = unknowns.len();
    let ceiling = if p == k { ncols - 1 } else { ncols };

    let all: Vec<&Generator> = generators.iter().collect();
    let batch = rayon::current_num_threads().max(1) * 2;
    let mut reducer = RowReducer::new(ncols);
    let mut used = 0;
    'outer: for chunk in all.chunks(batch) {
        let rows: Vec<Vec<Vec<Rational>>> =
            chunk.par_iter().map(|g| constraint_rows(&g.field, chart, &unknowns)).collect::<Result<_>>()?;
        for g_rows in rows {
            used += 1;
            for row in g_rows {
                reducer.insert(row);
            }
            if reducer.rank() >= ceiling {
                break 'outer;
            }
        }
    }

    let kernel = reducer.kernel();
    let to_form = |v: &Vec<Rational>| -> Result<DifferentialForm> {
        let mut comps: BTreeMap<MultiIndex, Polynomial> = BTreeMap::new();
        for ((j, mu), c) in unknowns.iter().zip(v) {
            if !num::Zero::is_zero(c) {
                comps.entry(*j).or_insert_with(|| Polynomial::zero(n)).add_term(mu.clone(), c.clone());
            }
        }
        DifferentialForm::from_components(chart.clone(), p, comps)
    };
    let solution_basis = kernel.iter().map(to_form).collect::<Result<Vec<_>>>()?;

    let contains_form = (p == k).then(|| {
        let index: BTreeMap<(MultiIndex, Monomial), usize> =
            unknowns.iter().cloned().enumerate().map(|(i, u)| (u, i)).collect();
        let mut v = vec![Rational::from_integer(0.into()); ncols];
        for (j, c) in omega.components() {
            for (mu, a) in c.terms() {
                v[index[&(*j, mu.clone())]] = a.clone();
            }
        }
        let mut span = RowReducer::new(ncols);
        for b in &kernel {
            span.insert(b.clone());
        }
        span.contains(&v)
    });
    assert!(contains_form != Some(false), "a locally Hamiltonian generator moved Ω");

    let matches = if p == k { kernel.len() == 1 } else { kernel.is_empty() };
    Ok(InvarianceProbeResult {
        target_degree: p,
        degree_bound,
        generator_labels: all.iter().map(|g| g.label.clone()).collect(),
        generators_used: used,
        unknowns: ncols,
        solution_basis,
        contains_form,
        verdict: if matches { ProbeVerdict::MatchesTheorem } else { ProbeVerdict::Inconclusive },
    })
}

fn check_generator(g: &Generator, omega: &DifferentialForm, degree: usize) -> Result<()> {
    if g.field.degree() != degree {
        return Err(argument(format!("generator {} has degree {}, expected {degree}", g.label, g.field.degree())));
    }
    if !certify(&g.field, omega)?.is_locally_hamiltonian() {
        return Err(precondition(format!("generator {} is not locally Hamiltonian", g.label)));
    }
    Ok(())
}

/// One row per `(component, monomial)` of `L(X) α`, as a linear function of
/// the unknown coefficients of `α`.
fn constraint_rows(
    x: &MultiVectorField,
    chart: &std::sync::Arc<crate::poly::Chart>,
    unknowns: &[(MultiIndex, Monomial)],
) -> Result<Vec<Vec<Rational>>> {
    let n = chart.dim();
    let mut rows: BTreeMap<(MultiIndex, Monomial), Vec<Rational>> = BTreeMap::new();
    for (col, (j, mu)) in unknowns.iter().enumerate() {
        let basis = DifferentialForm::monomial(chart.clone(), *j, Polynomial::term(n, mu.clone(), Rational::from_integer(1.into())));
        let image = lie_derivative(x, &basis)?;
        for (i, c) in image.components() {
            for (nu, a) in c.terms() {
                rows.entry((*i, nu.clone())).or_insert_with(|| vec![Rational::from_integer(0.into()); unknowns.len()])[col] =
                    a.clone();
            }
        }
    }
    Ok(rows.into_values().collect())
}
