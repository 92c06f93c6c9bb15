//! Certification and construction of (locally) Hamiltonian multivector fields.

use crate::error::{argument, precondition, structural, Result};
use crate::exterior::flat_matrix;
use crate::linalg::Matrix;
use crate::multi_index::MultiIndex;
use crate::poly::{
    homotopy_inverse_d, interior, monomials_up_to, DifferentialForm, Monomial, MultiVectorField, Polynomial,
};
use crate::scalar::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Verdict {
    /// `i(X) Ω` is not closed.
    NotClosed,
    /// `i(X) Ω` is closed. On a star-shaped polynomial chart every closed form
    /// is exact, so [`certify`] always upgrades this to `Hamiltonian`.
    LocallyHamiltonian,
    /// `i(X) Ω = dζ` with an explicit `ζ`.
    Hamiltonian,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::NotClosed => "not_closed",
            Verdict::LocallyHamiltonian => "locally_hamiltonian",
            Verdict::Hamiltonian => "hamiltonian",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HamiltonianCertificate {
    pub field: MultiVectorField,
    pub degree: usize,
    /// `β = i(X) Ω`.
    pub contraction: DifferentialForm,
    pub verdict: Verdict,
    /// `ζ` with `dζ = β`, present when the verdict is `Hamiltonian`.
    pub hamiltonian_form: Option<DifferentialForm>,
}

impl HamiltonianCertificate {
    pub fn is_locally_hamiltonian(&self) -> bool {
        self.verdict >= Verdict::LocallyHamiltonian
    }

    pub fn is_hamiltonian(&self) -> bool {
        self.verdict == Verdict::Hamiltonian
    }
}

pub fn certify(x: &MultiVectorField, omega: &DifferentialForm) -> Result<HamiltonianCertificate> {
    let (m, k) = (x.degree(), omega.degree());
    if m >= k {
        return Err(argument(format!("field degree m = {m} must be below the form degree k = {k}")));
    }
    if !omega.is_closed() {
        return Err(precondition(format!("form is not closed; dΩ = {}", omega.exterior_derivative().display())));
    }
    let beta = interior(x, omega)?;
    let (verdict, zeta) = if beta.is_closed() {
        (Verdict::Hamiltonian, Some(homotopy_inverse_d(&beta)?))
    } else {
        (Verdict::NotClosed, None)
    };
    Ok(HamiltonianCertificate { field: x.clone(), degree: m, contraction: beta, verdict, hamiltonian_form: zeta })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldSolution {
    /// `X` with `i(X) Ω = dζ`, free variables of each per-monomial solve set to zero.
    pub particular: MultiVectorField,
    /// Basis of `{X : i(X) Ω = 0}` within the coefficient degree bound.
    pub homogeneous: Vec<MultiVectorField>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveOutcome {
    Solved(FieldSolution),
    NoSolution { reason: String },
}

impl SolveOutcome {
    pub fn solution(&self) -> Option<&FieldSolution> {
        match self {
            SolveOutcome::Solved(s) => Some(s),
            SolveOutcome::NoSolution { .. } => None,
        }
    }
}

/// Solves `i(X) Ω = dζ` for an `m`-vector field `X` with polynomial
/// coefficients of degree at most `degree_bound`, for constant-coefficient `Ω`.
///
/// Since `Ω` is constant, the equation splits into one linear solve against
/// the flat matrix per monomial of `dζ`.
pub fn solve_hamiltonian_field(
    zeta: &DifferentialForm,
    omega: &DifferentialForm,
    m: usize,
    degree_bound: u32,
) -> Result<SolveOutcome> {
    let chart = omega.chart();
    if zeta.chart() != chart {
        return Err(structural("ζ and Ω live on different charts"));
    }
    let k = omega.degree();
    if m < 1 || m >= k {
        return Err(argument(format!("field degree m = {m} outside 1..{k}")));
    }
    if zeta.degree() + m + 1 != k {
        return Err(argument(format!("ζ must have degree k − m − 1 = {}, got {}", k - m - 1, zeta.degree())));
    }
    if !omega.is_constant() {
        return Err(argument("solving for Hamiltonian fields needs a constant-coefficient form"));
    }
    let n = chart.dim();
    let omega_const = omega.evaluate(&vec![Rational::from_integer(0.into()); n])?;
    let flat = flat_matrix(&omega_const, m)?;
    let sources = flat.source_basis();
    let targets = flat.target_basis();

    let rhs = zeta.exterior_derivative();
    if rhs.max_coefficient_degree().is_some_and(|d| d > degree_bound) {
        return Ok(SolveOutcome::NoSolution {
            reason: format!("dζ has coefficients of degree above the bound {degree_bound}"),
        });
    }
    let mut by_monomial: std::collections::BTreeMap<Monomial, Vec<Rational>> = Default::default();
    for (j, p) in rhs.components() {
        let row = targets.iter().position(|t| t == j).expect("target basis covers all indices");
        for (mono, c) in p.terms() {
            by_monomial.entry(mono.clone()).or_insert_with(|| vec![Rational::from_integer(0.into()); targets.len()])
                [row] = c.clone();
        }
    }
    let mut particular = MultiVectorField::zero(chart.clone(), m);
    for (mono, b) in &by_monomial {
        let Some(x) = flat.matrix.solve(b) else {
            return Ok(SolveOutcome::NoSolution {
                reason: format!(
                    "dζ has a component outside the image of the flat map at monomial {}",
                    Polynomial::term(n, mono.clone(), Rational::from_integer(1.into())).display(chart.names())
                ),
            });
        };
        let term = field_from_coords(chart, &sources, &x, &Polynomial::term(n, mono.clone(), Rational::from_integer(1.into())))?;
        particular = particular.add(&term)?;
    }
    let homogeneous = homogeneous_fields(&flat.matrix, chart, &sources, degree_bound)?;
    Ok(SolveOutcome::Solved(FieldSolution { particular, homogeneous }))
}

fn field_from_coords(
    chart: &std::sync::Arc<crate::poly::Chart>,
    sources: &[MultiIndex],
    coords: &[Rational],
    coefficient: &Polynomial,
) -> Result<MultiVectorField> {
    let degree = sources.first().map_or(0, |i| i.degree());
    MultiVectorField::from_components(
        chart.clone(),
        degree,
        sources.iter().zip(coords).map(|(i, c)| (*i, coefficient.scale(c))),
    )
}

fn homogeneous_fields(
    flat: &Matrix,
    chart: &std::sync::Arc<crate::poly::Chart>,
    sources: &[MultiIndex],
    degree_bound: u32,
) -> Result<Vec<MultiVectorField>> {
    let kernel = flat.kernel();
    let n = chart.dim();
    let mut out = Vec::new();
    for mono in monomials_up_to(n, degree_bound) {
        let coefficient = Polynomial::term(n, mono, Rational::from_integer(1.into()));
        for v in &kernel {
            out.push(field_from_coords(chart, sources, v, &coefficient)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Chart;
    use crate::scalar::int;
    use std::sync::Arc;

    fn poly(chart: &Arc<Chart>, s: &str) -> Polynomial {
        Polynomial::parse(s, chart.names()).unwrap()
    }

    fn form(chart: &Arc<Chart>, degree: usize, terms: &[(&[usize], &str)]) -> DifferentialForm {
        DifferentialForm::from_components(
            chart.clone(),
            degree,
            terms.iter().map(|(i, s)| (MultiIndex::from_increasing(i).unwrap(), poly(chart, s))),
        )
        .unwrap()
    }

    fn plane() -> (Arc<Chart>, DifferentialForm) {
        let c = Chart::new(["x", "p"]).unwrap();
        let omega = form(&c, 2, &[(&[0, 1], "-1")]);
        (c, omega)
    }

    #[test]
    fn coordinate_field_is_hamiltonian() {
        let (c, omega) = plane();
        let cert = certify(&MultiVectorField::coordinate_field(c.clone(), 0), &omega).unwrap();
        assert_eq!(cert.verdict, Verdict::Hamiltonian);
        assert_eq!(cert.contraction, form(&c, 1, &[(&[1], "-1")]));
        assert_eq!(cert.hamiltonian_form.unwrap(), form(&c, 0, &[(&[], "-p")]));
    }

    #[test]
    fn euler_field_is_not_closed() {
        let (c, omega) = plane();
        let cert = certify(&MultiVectorField::euler(c), &omega).unwrap();
        assert_eq!(cert.verdict, Verdict::NotClosed);
        assert!(!cert.is_locally_hamiltonian());
        assert!(cert.hamiltonian_form.is_none());
    }

    #[test]
    fn bivector_certificate() {
        let c = Chart::new(["x1", "x2", "p"]).unwrap();
        // dp ∧ dx1 ∧ dx2 = dx1 ∧ dx2 ∧ dp
        let omega = form(&c, 3, &[(&[0, 1, 2], "1")]);
        let x = MultiVectorField::monomial(c.clone(), MultiIndex::from_increasing(&[0, 1]).unwrap(), Polynomial::one(3));
        let cert = certify(&x, &omega).unwrap();
        assert_eq!(cert.contraction, form(&c, 1, &[(&[2], "-1")]));
        assert_eq!(cert.hamiltonian_form.unwrap(), form(&c, 0, &[(&[], "-p")]));

        let zeta = form(&c, 0, &[(&[], "-p")]);
        let sol = solve_hamiltonian_field(&zeta, &omega, 2, 1).unwrap();
        let sol = sol.solution().unwrap();
        assert_eq!(sol.particular, x);
        assert!(sol.homogeneous.is_empty());
    }

    #[test]
    fn certify_errors() {
        let (c, omega) = plane();
        let x2 = MultiVectorField::monomial(c.clone(), MultiIndex::from_increasing(&[0, 1]).unwrap(), Polynomial::one(2));
        assert!(matches!(certify(&x2, &omega), Err(crate::Error::Argument(_))));
        let open = form(&c, 2, &[(&[0, 1], "1")]).add(&form(&c, 2, &[])).unwrap();
        let c3 = Chart::new(["x", "y", "z"]).unwrap();
        let not_closed = form(&c3, 2, &[(&[0, 1], "z")]);
        assert!(matches!(
            certify(&MultiVectorField::coordinate_field(c3, 0), &not_closed),
            Err(crate::Error::Precondition(_))
        ));
        assert!(certify(&MultiVectorField::coordinate_field(c, 0), &open).is_ok());
    }

    #[test]
    fn solve_examples() {
        let (c, omega) = plane();
        let zeta = form(&c, 0, &[(&[], "p")]);
        let sol = solve_hamiltonian_field(&zeta, &omega, 1, 2).unwrap();
        let sol = sol.solution().unwrap();
        assert_eq!(sol.particular, MultiVectorField::coordinate_field(c.clone(), 0).scale(&int(-1)));
        assert!(sol.homogeneous.is_empty());

        let zero = DifferentialForm::zero(c.clone(), 0);
        let sol = solve_hamiltonian_field(&zero, &omega, 1, 1).unwrap();
        assert!(sol.solution().unwrap().particular.is_zero());

        let high = form(&c, 0, &[(&[], "x^3")]);
        assert!(matches!(solve_hamiltonian_field(&high, &omega, 1, 1).unwrap(), SolveOutcome::NoSolution { .. }));

        let curved = form(&c, 2, &[(&[0, 1], "1 + x")]);
        assert!(matches!(solve_hamiltonian_field(&zeta, &curved, 1, 1), Err(crate::Error::Argument(_))));
    }

    #[test]
    fn degenerate_flat_has_homogeneous_solutions() {
        let c = Chart::new(["x1", "x2", "p"]).unwrap();
        let omega = form(&c, 3, &[(&[0, 1, 2], "1")]);
        // ζ a 1-form; flat on vectors is injective, so dζ = dx1 ∧ dx2 gives X = ∂p up to sign
        let zeta = form(&c, 1, &[(&[1], "x1")]);
        let sol = solve_hamiltonian_field(&zeta, &omega, 1, 0).unwrap();
        let sol = sol.solution().unwrap();
        assert_eq!(interior(&sol.particular, &omega).unwrap(), zeta.exterior_derivative());
        assert!(sol.homogeneous.is_empty());

        // dζ = dx1 ∧ dx2 ∧ ... not reachable: a 2-form with no image
        let c4 = Chart::new(["x1", "x2", "x3", "x4"]).unwrap();
        let vol = form(&c4, 3, &[(&[0, 1, 2], "1")]);
        let zeta = form(&c4, 1, &[(&[3], "x1")]);
        assert!(matches!(solve_hamiltonian_field(&zeta, &vol, 1, 1).unwrap(), SolveOutcome::NoSolution { .. }));
        let sol = solve_hamiltonian_field(&DifferentialForm::zero(c4, 1), &vol, 1, 1).unwrap();
        // ker = span{∂x4}, times 5 monomials of degree ≤ 1
        assert_eq!(sol.solution().unwrap().homogeneous.len(), 5);
    }
}
