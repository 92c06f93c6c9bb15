//! Canonical multisymplectic models on bundles of forms.
//!
//! A model over a base chart `Q` with coordinates `x¹, …, xⁿ` carries one
//! momentum coordinate `p_I` per admissible increasing multi-index `I` of
//! degree `k`. Momenta are named `p_` followed by the concatenated 1-based
//! indices (`p_13` for `I = {1, 3}`); when `n ≥ 10` the indices are separated
//! by underscores (`p_1_10`). The tautological form is `Θ = Σ p_I dx^I` and
//! the multisymplectic form is `Ω = dΘ = Σ dp_I ∧ dx^I`.

use std::sync::Arc;

use crate::error::{argument, precondition, Result};
use crate::exterior::{interior, is_j_nondegenerate, wedge, AlternatingTensor, Variance};
use crate::multi_index::{combinations, MultiIndex};
use crate::orthogonality::{orth_complement, Subspace};
use crate::poly::{evaluate_vector, lie_bracket, Chart, DifferentialForm, MultiVectorField, Polynomial};
use crate::scalar::{binomial, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DarbouxModel {
    base_dim: usize,
    form_degree: usize,
    /// Positions (within the base coordinates) of the vertical directions of `Q → E`.
    base_fiber: Vec<usize>,
    horizontal_level: Option<usize>,
    momenta: Vec<MultiIndex>,
    chart: Arc<Chart>,
    theta: DifferentialForm,
    omega: DifferentialForm,
}

pub fn momentum_name(index: MultiIndex, base_dim: usize) -> String {
    let parts: Vec<String> = index.iter().map(|i| (i + 1).to_string()).collect();
    if base_dim >= 10 {
        format!("p_{}", parts.join("_"))
    } else {
        format!("p_{}", parts.concat())
    }
}

/// Model on `Λ^k T*Q` with `dim Q = n`; base coordinates are `x1, …, xn`.
pub fn build_darboux(n: usize, k: usize) -> Result<DarbouxModel> {
    if k < 1 || k > n {
        return Err(argument(format!("form degree k = {k} must satisfy 1 ≤ k ≤ n = {n}")));
    }
    let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    let model = assemble(names, Vec::new(), k, None, combinations(n, k))?;
    debug_assert!(model.is_nondegenerate());
    Ok(model)
}

/// Model on the subbundle `Λ^k_r T*Q` of `r`-horizontal `k`-forms for a
/// fibration `Q → E`: `Q` has coordinates `base ++ fiber`, and only momenta
/// `p_I` whose index set contains at most `r − 1` fiber coordinates are kept.
pub fn build_darboux_horizontal(base: &[String], fiber: &[String], k: usize, r: usize) -> Result<DarbouxModel> {
    let n = base.len() + fiber.len();
    if k < 1 || k > n {
        return Err(argument(format!("form degree k = {k} must satisfy 1 ≤ k ≤ dim Q = {n}")));
    }
    if r < 1 || r > k {
        return Err(argument(format!("horizontality level r = {r} must satisfy 1 ≤ r ≤ k = {k}")));
    }
    let fiber_positions: Vec<usize> = (base.len()..n).collect();
    let fiber_mask = fiber_positions.iter().fold(MultiIndex::EMPTY, |m, &i| m.with(i));
    let momenta: Vec<MultiIndex> = combinations(n, k)
        .into_iter()
        .filter(|i| MultiIndex::from_bits(i.bits() & fiber_mask.bits()).degree() < r)
        .collect();
    if momenta.is_empty() {
        return Err(argument(format!(
            "no admissible momenta for k = {k}, r = {r} with {} base and {} fiber coordinates",
            base.len(),
            fiber.len()
        )));
    }
    let names: Vec<String> = base.iter().chain(fiber).cloned().collect();
    let level = (!fiber.is_empty()).then_some(r);
    assemble(names, if fiber.is_empty() { Vec::new() } else { fiber_positions }, k, level, momenta)
}

fn assemble(
    base_names: Vec<String>,
    base_fiber: Vec<usize>,
    k: usize,
    horizontal_level: Option<usize>,
    momenta: Vec<MultiIndex>,
) -> Result<DarbouxModel> {
    let n = base_names.len();
    let momentum_names: Vec<String> = momenta.iter().map(|i| momentum_name(*i, n)).collect();
    let all: Vec<String> = base_names.iter().chain(&momentum_names).cloned().collect();
    let chart = Chart::with_split(all, &base_names, &momentum_names)?;
    let dim = chart.dim();
    let theta = DifferentialForm::from_components(
        chart.clone(),
        k,
        momenta.iter().enumerate().map(|(a, i)| (*i, Polynomial::var(dim, n + a))),
    )?;
    let omega = theta.exterior_derivative();
    Ok(DarbouxModel { base_dim: n, form_degree: k, base_fiber, horizontal_level, momenta, chart, theta, omega })
}

impl DarbouxModel {
    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    /// Degree `k` of the tautological form; `Ω` has degree `k + 1`.
    pub fn form_degree(&self) -> usize {
        self.form_degree
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn theta(&self) -> &DifferentialForm {
        &self.theta
    }

    pub fn omega(&self) -> &DifferentialForm {
        &self.omega
    }

    pub fn momenta(&self) -> &[MultiIndex] {
        &self.momenta
    }

    pub fn horizontal_level(&self) -> Option<usize> {
        self.horizontal_level
    }

    /// Level `r` for the type conditions: 0 for full bundles of forms.
    pub fn type_level(&self) -> usize {
        self.horizontal_level.unwrap_or(0)
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn momentum_coordinate(&self, index: MultiIndex) -> Option<usize> {
        self.momenta.iter().position(|m| *m == index).map(|a| self.base_dim + a)
    }

    /// 1-nondegeneracy of `Ω` (constant coefficients, so one point suffices).
    pub fn is_nondegenerate(&self) -> bool {
        let at_origin = self.omega.evaluate(&vec![Rational::from_integer(0.into()); self.dim()]).expect("dimension");
        is_j_nondegenerate(&at_origin, 1).unwrap_or(false)
    }

    /// `Σ xⁱ ∂_{xⁱ} + Σ p_I ∂_{p_I}`.
    pub fn euler_field(&self) -> MultiVectorField {
        MultiVectorField::euler(self.chart.clone())
    }

    /// `{∂_{p_I}}`, spanning the vertical distribution of the bundle projection.
    pub fn vertical_fields(&self) -> Vec<MultiVectorField> {
        (self.base_dim..self.dim()).map(|i| MultiVectorField::coordinate_field(self.chart.clone(), i)).collect()
    }

    pub fn coordinate_fields(&self) -> Vec<MultiVectorField> {
        (0..self.dim()).map(|i| MultiVectorField::coordinate_field(self.chart.clone(), i)).collect()
    }

    /// Representatives of `ε`: the vertical directions of `Q → E`.
    pub fn epsilon(&self) -> Subspace {
        let n = self.dim();
        let vectors: Vec<Vec<Rational>> = self
            .base_fiber
            .iter()
            .map(|&i| (0..n).map(|j| Rational::from_integer(((i == j) as i64).into())).collect())
            .collect();
        Subspace::span(n, &vectors).expect("dimension")
    }

    /// The form on `Q` encoded by the momentum coordinates of `point`.
    pub fn base_form_at(&self, point: &[Rational]) -> Result<AlternatingTensor> {
        check_point(self, point)?;
        let mut alpha = AlternatingTensor::form(self.base_dim, self.form_degree);
        for (a, i) in self.momenta.iter().enumerate() {
            alpha.add_component(*i, point[self.base_dim + a].clone());
        }
        Ok(alpha)
    }
}

fn check_point(model: &DarbouxModel, point: &[Rational]) -> Result<()> {
    if point.len() != model.dim() {
        return Err(argument(format!("point of length {} on a chart of dimension {}", point.len(), model.dim())));
    }
    Ok(())
}

/// `Θ_α(V₁, …, V_k) = i(ρ_*V_k ∧ … ∧ ρ_*V₁) α`, evaluated intrinsically: the
/// momentum part of `point` is read as a `k`-form `α` on `Q` and each `Vᵢ`
/// is projected to `Q` by dropping its momentum components.
pub fn tautological_eval(model: &DarbouxModel, point: &[Rational], vectors: &[Vec<Rational>]) -> Result<Rational> {
    let alpha = model.base_form_at(point)?;
    if vectors.len() != model.form_degree {
        return Err(argument(format!("expected {} vectors, got {}", model.form_degree, vectors.len())));
    }
    if let Some(v) = vectors.iter().find(|v| v.len() != model.dim()) {
        return Err(argument(format!("vector of length {} on a chart of dimension {}", v.len(), model.dim())));
    }
    let n = model.base_dim;
    let mut pushed = AlternatingTensor::scalar(n, Rational::from_integer(1.into()), Variance::Contravariant);
    for v in vectors.iter().rev() {
        let projected = AlternatingTensor::from_vector(&v[..n], Variance::Contravariant);
        pushed = wedge(&pushed, &projected)?;
    }
    let value = interior(&pushed, &alpha)?;
    Ok(value.component(MultiIndex::EMPTY))
}

/// The coordinate expression `Θ = Σ p_I dx^I` evaluated at `point` on the vectors.
pub fn theta_coordinate_eval(model: &DarbouxModel, point: &[Rational], vectors: &[Vec<Rational>]) -> Result<Rational> {
    check_point(model, point)?;
    model.theta.evaluate(point)?.evaluate(vectors)
}

/// Per-condition outcome of the type `(k,0)` / `(k,r)` conditions at a point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeConditionsReport {
    pub r: usize,
    /// Degree of `Ω`.
    pub form_degree: usize,
    pub w_dim: usize,
    pub quotient_dim: usize,
    pub epsilon_dim: usize,
    /// `W ⊆ W^{⊥,1}` at the point.
    pub one_isotropic: bool,
    /// Brackets of the spanning fields stay in `W` at every sample point.
    pub involutive: bool,
    /// For `r ≥ 1`: every `i(w)Ω`, `w ∈ W`, is `r`-horizontal with respect to
    /// `π⁻¹(ε)`, i.e. `i(v₁ ∧ … ∧ v_r) i(w) Ω = 0` whenever `π(vᵢ) ∈ ε`.
    pub epsilon_contraction_vanishes: Option<bool>,
    /// For `r ≥ 1`: `i(v₁ ∧ … ∧ v_r) Ω = 0` for all `vᵢ ∈ π⁻¹(ε)`, without
    /// the `W` slot. Reported only; not part of the verdict.
    pub epsilon_contraction_vanishes_unrestricted: Option<bool>,
    /// `dim Λ^{k−1}(T_pM/W)*`, counting only `r`-horizontal forms when `r ≥ 1`.
    pub expected_w_dim: usize,
    pub dimension_equality: bool,
    pub quotient_exceeds_degree: bool,
    pub verdict: bool,
}

/// Checks the structural conditions of a multisymplectic manifold of type
/// `(k, r)` at `point`, for the distribution spanned by `w_fields` and (for
/// `r ≥ 1`) the subspace `ε` of the quotient given by representative vectors.
/// Involutivity is sampled at `point`, the origin and `samples`.
pub fn check_type_conditions(
    omega: &DifferentialForm,
    w_fields: &[MultiVectorField],
    epsilon: Option<&Subspace>,
    r: usize,
    point: &[Rational],
    samples: &[Vec<Rational>],
) -> Result<TypeConditionsReport> {
    let n = omega.chart().dim();
    let k = omega.degree();
    if k < 2 {
        return Err(argument(format!("form degree {k} is too small for the type conditions")));
    }
    if r > k - 1 {
        return Err(argument(format!("level r = {r} outside 0..={}", k - 1)));
    }
    if point.len() != n {
        return Err(argument(format!("point of length {} on a chart of dimension {n}", point.len())));
    }
    if !omega.is_closed() {
        return Err(precondition(format!("form is not closed; dΩ = {}", omega.exterior_derivative().display())));
    }
    let w_vectors = w_fields.iter().map(|f| evaluate_vector(f, point)).collect::<Result<Vec<_>>>()?;
    let w = Subspace::span(n, &w_vectors)?;
    if w.dim() != w_fields.len() {
        return Err(precondition(format!(
            "the {} spanning fields are dependent at the point (rank {})",
            w_fields.len(),
            w.dim()
        )));
    }
    let omega_p = omega.evaluate(point)?;
    let one_isotropic = w.is_subspace_of(&orth_complement(&w, &omega_p, 1)?);

    let mut sample_points: Vec<Vec<Rational>> = vec![point.to_vec(), vec![Rational::from_integer(0.into()); n]];
    for s in samples {
        if s.len() != n {
            return Err(argument(format!("sample point of length {} on a chart of dimension {n}", s.len())));
        }
        if !sample_points.contains(s) {
            sample_points.push(s.clone());
        }
    }
    let mut involutive = true;
    'pairs: for a in 0..w_fields.len() {
        for b in a + 1..w_fields.len() {
            let bracket = lie_bracket(&w_fields[a], &w_fields[b])?;
            for q in &sample_points {
                let span = Subspace::from_fields_at(w_fields, q)?;
                if !span.contains(&evaluate_vector(&bracket, q)?) {
                    involutive = false;
                    break 'pairs;
                }
            }
        }
    }

    let quotient_dim = n - w.dim();
    let (epsilon_dim, expected_w_dim, contraction, unrestricted) = if r == 0 {
        (0, binomial(quotient_dim, k - 1), None, None)
    } else {
        let reps = epsilon.cloned().unwrap_or_else(|| Subspace::zero(n));
        if reps.ambient_dim() != n {
            return Err(argument("ε representatives live in the wrong dimension"));
        }
        let preimage = w.sum(&reps);
        let e = preimage.dim() - w.dim();
        let expected: usize = (0..r).map(|j| binomial(e, j) * binomial(quotient_dim - e, k - 1 - j)).sum();
        let pre_basis: Vec<AlternatingTensor> = preimage
            .basis_vectors()
            .iter()
            .map(|v| AlternatingTensor::from_vector(v, Variance::Contravariant))
            .collect();
        let wedges: Vec<AlternatingTensor> = combinations(pre_basis.len(), r)
            .into_iter()
            .map(|s| {
                s.iter().try_fold(
                    AlternatingTensor::scalar(n, Rational::from_integer(1.into()), Variance::Contravariant),
                    |acc, i| wedge(&acc, &pre_basis[i]),
                )
            })
            .collect::<Result<_>>()?;
        let mut restricted = true;
        for wv in w.basis_vectors() {
            let beta = interior(&AlternatingTensor::from_vector(&wv, Variance::Contravariant), &omega_p)?;
            for v in &wedges {
                if !interior(v, &beta)?.is_zero() {
                    restricted = false;
                }
            }
        }
        let mut plain = true;
        for v in &wedges {
            if !interior(v, &omega_p)?.is_zero() {
                plain = false;
            }
        }
        (e, expected, Some(restricted), Some(plain))
    };
    let dimension_equality = w.dim() == expected_w_dim;
    let quotient_exceeds_degree = quotient_dim > k - 1;
    let verdict = one_isotropic && involutive && contraction.unwrap_or(true) && dimension_equality && quotient_exceeds_degree;
    Ok(TypeConditionsReport {
        r,
        form_degree: k,
        w_dim: w.dim(),
        quotient_dim,
        epsilon_dim,
        one_isotropic,
        involutive,
        epsilon_contraction_vanishes: contraction,
        epsilon_contraction_vanishes_unrestricted: unrestricted,
        expected_w_dim,
        dimension_equality,
        quotient_exceeds_degree,
        verdict,
    })
}

/// Runs [`check_type_conditions`] on the vertical distribution of a model.
pub fn check_model_type_conditions(model: &DarbouxModel, point: &[Rational]) -> Result<TypeConditionsReport> {
    let eps = model.epsilon();
    check_type_conditions(model.omega(), &model.vertical_fields(), Some(&eps), model.type_level(), point, &[])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio};

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn symplectic_plane_model() {
        let m = build_darboux(1, 1).unwrap();
        assert_eq!(m.chart().names(), &names(&["x1", "p_1"]));
        assert_eq!(m.theta().display(), "(p_1) dx1");
        assert_eq!(m.omega().display(), "(-1) dx1^dp_1");
        assert!(m.is_nondegenerate());
        assert!(build_darboux(1, 2).is_err());
        assert!(build_darboux(2, 0).is_err());
    }

    #[test]
    fn degree_three_model() {
        let m = build_darboux(3, 2).unwrap();
        assert_eq!(m.dim(), 6);
        assert_eq!(m.omega().degree(), 3);
        assert!(m.is_nondegenerate());
        assert_eq!(m.theta().exterior_derivative(), *m.omega());
        assert!(m.omega().is_closed());
        assert_eq!(m.momentum_coordinate(MultiIndex::from_increasing(&[0, 2]).unwrap()), Some(4));
        assert_eq!(m.chart().name(4), "p_13");
    }

    #[test]
    fn horizontal_momentum_counts() {
        let base = names(&["x1", "x2"]);
        let fiber = names(&["y"]);
        let m1 = build_darboux_horizontal(&base, &fiber, 2, 1).unwrap();
        assert_eq!(m1.momenta().len(), 1);
        assert_eq!(m1.momenta()[0], MultiIndex::from_increasing(&[0, 1]).unwrap());
        let m2 = build_darboux_horizontal(&base, &fiber, 2, 2).unwrap();
        assert_eq!(m2.momenta().len(), 3);
        let plain = build_darboux_horizontal(&names(&["x1", "x2", "x3"]), &[], 2, 1).unwrap();
        assert_eq!(plain, build_darboux(3, 2).unwrap());
        let err = build_darboux_horizontal(&[], &names(&["y1", "y2"]), 2, 1).unwrap_err();
        assert!(err.to_string().contains("no admissible momenta"));
    }

    #[test]
    fn tautological_examples() {
        let m = build_darboux(1, 1).unwrap();
        let point = vec![int(0), int(2)];
        assert_eq!(tautological_eval(&m, &point, &[vec![int(1), int(0)]]).unwrap(), int(2));
        assert_eq!(tautological_eval(&m, &point, &[vec![int(0), int(5)]]).unwrap(), int(0));

        let m = build_darboux(3, 2).unwrap();
        let point: Vec<Rational> = (1..=6).map(|i| ratio(i, 7)).collect();
        let v1: Vec<Rational> = [1, 2, 0, 3, 1, 1].iter().map(|&x| int(x)).collect();
        let v2: Vec<Rational> = [0, 1, -1, 0, 2, 5].iter().map(|&x| int(x)).collect();
        let a = tautological_eval(&m, &point, &[v1.clone(), v2.clone()]).unwrap();
        let b = tautological_eval(&m, &point, &[v2.clone(), v1.clone()]).unwrap();
        assert_eq!(a, -b.clone());
        assert_eq!(a, theta_coordinate_eval(&m, &point, &[v1, v2]).unwrap());
        assert!(tautological_eval(&m, &point, &[]).is_err());
    }

    #[test]
    fn vertical_distribution_of_models() {
        let origin = |m: &DarbouxModel| vec![int(0); m.dim()];
        let m = build_darboux(3, 2).unwrap();
        let rep = check_model_type_conditions(&m, &origin(&m)).unwrap();
        assert!(rep.verdict, "{rep:?}");
        assert_eq!(rep.expected_w_dim, 3);

        // n = k: dim Q = 2 is not > 2
        let m = build_darboux(2, 2).unwrap();
        let rep = check_model_type_conditions(&m, &origin(&m)).unwrap();
        assert!(rep.one_isotropic && rep.involutive && rep.dimension_equality);
        assert!(!rep.quotient_exceeds_degree);
        assert!(!rep.verdict);

        let m = build_darboux_horizontal(&names(&["x1", "x2"]), &names(&["y1"]), 2, 2).unwrap();
        assert!(m.is_nondegenerate());
        let rep = check_model_type_conditions(&m, &origin(&m)).unwrap();
        assert_eq!(rep.r, 2);
        assert_eq!(rep.epsilon_contraction_vanishes, Some(true));
        assert_eq!(rep.epsilon_contraction_vanishes_unrestricted, Some(false));
        assert!(rep.verdict, "{rep:?}");
    }

    #[test]
    fn trivial_distribution_fails_dimension_count() {
        let chart = Chart::new(["x1", "x2", "p1", "p2"]).unwrap();
        let omega = DifferentialForm::from_components(
            chart.clone(),
            2,
            [
                (MultiIndex::from_increasing(&[0, 2]).unwrap(), Polynomial::constant(4, int(-1))),
                (MultiIndex::from_increasing(&[1, 3]).unwrap(), Polynomial::constant(4, int(-1))),
            ],
        )
        .unwrap();
        let rep = check_type_conditions(&omega, &[], None, 0, &vec![int(0); 4], &[]).unwrap();
        assert_eq!(rep.expected_w_dim, 4);
        assert!(!rep.dimension_equality);
        assert!(!rep.verdict);
    }

    #[test]
    fn dependent_fields_rejected() {
        let m = build_darboux(2, 1).unwrap();
        let f = MultiVectorField::coordinate_field(m.chart().clone(), 2);
        let err = check_type_conditions(m.omega(), &[f.clone(), f], None, 0, &vec![int(0); 4], &[]).unwrap_err();
        assert!(matches!(err, crate::Error::Precondition(_)));
    }
}
