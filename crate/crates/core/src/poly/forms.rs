//! Differential forms and multivector fields with polynomial coefficients.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::chart::{same_chart, Chart};
use super::polynomial::Polynomial;
use crate::error::{argument, precondition, structural, Result};
use crate::exterior::{AlternatingTensor, Variance};
use crate::multi_index::{contraction_sign, MultiIndex};
use crate::scalar::Rational;

/// Sparse map from multi-indices to polynomial coefficients, shared by
/// forms and multivector fields.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Components {
    chart: Arc<Chart>,
    degree: usize,
    map: BTreeMap<MultiIndex, Polynomial>,
}

impl Components {
    fn new(chart: Arc<Chart>, degree: usize) -> Self {
        Components { chart, degree, map: BTreeMap::new() }
    }

    fn nvars(&self) -> usize {
        self.chart.dim()
    }

    fn add(&mut self, index: MultiIndex, p: Polynomial) {
        debug_assert_eq!(index.degree(), self.degree);
        if p.is_zero() {
            return;
        }
        match self.map.get_mut(&index) {
            Some(existing) => {
                let sum = &*existing + &p;
                if sum.is_zero() {
                    self.map.remove(&index);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.map.insert(index, p);
            }
        }
    }

    fn checked(chart: Arc<Chart>, degree: usize, comps: impl IntoIterator<Item = (MultiIndex, Polynomial)>) -> Result<Self> {
        let mut c = Components::new(chart, degree);
        for (idx, p) in comps {
            if idx.degree() != degree || idx.span() > c.nvars() {
                return Err(structural(format!(
                    "component {idx:?} does not fit degree {degree} on a chart of dimension {}",
                    c.nvars()
                )));
            }
            if p.nvars() != c.nvars() {
                return Err(structural("coefficient polynomial has the wrong number of variables"));
            }
            c.add(idx, p);
        }
        Ok(c)
    }

    fn combine(&self, other: &Components, sign: i32) -> Result<Components> {
        if !same_chart(&self.chart, &other.chart) {
            return Err(structural("operands live on different charts"));
        }
        if self.degree != other.degree {
            return Err(structural(format!("cannot add degrees {} and {}", self.degree, other.degree)));
        }
        let mut out = self.clone();
        for (i, p) in &other.map {
            out.add(*i, if sign < 0 { -p } else { p.clone() });
        }
        Ok(out)
    }

    fn map_coefficients(&self, f: impl Fn(&Polynomial) -> Polynomial) -> Components {
        let mut out = Components::new(self.chart.clone(), self.degree);
        for (i, p) in &self.map {
            out.add(*i, f(p));
        }
        out
    }

    fn evaluate(&self, point: &[Rational], variance: Variance) -> Result<AlternatingTensor> {
        if point.len() != self.nvars() {
            return Err(argument(format!("point of length {} on a chart of dimension {}", point.len(), self.nvars())));
        }
        let mut t = AlternatingTensor::zero(self.nvars(), self.degree, variance);
        for (i, p) in &self.map {
            t.add_component(*i, p.eval(point));
        }
        Ok(t)
    }

    fn max_coefficient_degree(&self) -> Option<u32> {
        self.map.values().filter_map(Polynomial::degree).max()
    }

    fn display(&self, basis: &str) -> String {
        if self.map.is_empty() {
            return "0".into();
        }
        let names = self.chart.names();
        self.map
            .iter()
            .map(|(i, p)| {
                let elems: Vec<String> = i.iter().map(|k| format!("{basis}{}", names[k])).collect();
                let coeff = p.display(names);
                if elems.is_empty() {
                    format!("({coeff})")
                } else {
                    format!("({coeff}) {}", elems.join("^"))
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

macro_rules! common_accessors {
    ($ty:ident, $variance:expr, $basis:expr) => {
        impl $ty {
            pub fn zero(chart: Arc<Chart>, degree: usize) -> Self {
                $ty(Components::new(chart, degree))
            }

            pub fn from_components(
                chart: Arc<Chart>,
                degree: usize,
                components: impl IntoIterator<Item = (MultiIndex, Polynomial)>,
            ) -> Result<Self> {
                Ok($ty(Components::checked(chart, degree, components)?))
            }

            /// The basis element with the given coefficient.
            pub fn monomial(chart: Arc<Chart>, index: MultiIndex, coefficient: Polynomial) -> Self {
                let mut c = Components::new(chart, index.degree());
                c.add(index, coefficient);
                $ty(c)
            }

            pub fn chart(&self) -> &Arc<Chart> {
                &self.0.chart
            }

            pub fn degree(&self) -> usize {
                self.0.degree
            }

            pub fn components(&self) -> &BTreeMap<MultiIndex, Polynomial> {
                &self.0.map
            }

            pub fn component(&self, index: MultiIndex) -> Polynomial {
                self.0.map.get(&index).cloned().unwrap_or_else(|| Polynomial::zero(self.0.nvars()))
            }

            pub fn is_zero(&self) -> bool {
                self.0.map.is_empty()
            }

            pub fn add(&self, other: &$ty) -> Result<$ty> {
                Ok($ty(self.0.combine(&other.0, 1)?))
            }

            pub fn sub(&self, other: &$ty) -> Result<$ty> {
                Ok($ty(self.0.combine(&other.0, -1)?))
            }

            pub fn scale(&self, c: &Rational) -> $ty {
                $ty(self.0.map_coefficients(|p| p.scale(c)))
            }

            /// Multiplies every coefficient by the polynomial `f`.
            pub fn mul_polynomial(&self, f: &Polynomial) -> $ty {
                $ty(self.0.map_coefficients(|p| p * f))
            }

            /// Pointwise value at a rational chart point.
            pub fn evaluate(&self, point: &[Rational]) -> Result<AlternatingTensor> {
                self.0.evaluate(point, $variance)
            }

            /// Largest total degree among the coefficients.
            pub fn max_coefficient_degree(&self) -> Option<u32> {
                self.0.max_coefficient_degree()
            }

            pub fn display(&self) -> String {
                self.0.display($basis)
            }
        }
    };
}

/// A differential `k`-form `Σ_J f_J dx^J` on a chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DifferentialForm(Components);

/// A multivector field `Σ_I X^I ∂_I` on a chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiVectorField(Components);

common_accessors!(DifferentialForm, Variance::Covariant, "d");
common_accessors!(MultiVectorField, Variance::Contravariant, "D");

impl DifferentialForm {
    /// A function viewed as a 0-form.
    pub fn function(chart: Arc<Chart>, f: Polynomial) -> Self {
        DifferentialForm::monomial(chart, MultiIndex::EMPTY, f)
    }

    /// The coordinate differential `dx^i`.
    pub fn differential(chart: Arc<Chart>, i: usize) -> Self {
        let n = chart.dim();
        DifferentialForm::monomial(chart, MultiIndex::single(i), Polynomial::one(n))
    }

    /// Constant-coefficient form from a pointwise tensor.
    pub fn from_constant(chart: Arc<Chart>, t: &AlternatingTensor) -> Result<Self> {
        if t.variance() != Variance::Covariant || t.ambient_dim() != chart.dim() {
            return Err(structural("constant form must be a covariant tensor of the chart dimension"));
        }
        let n = chart.dim();
        DifferentialForm::from_components(
            chart,
            t.degree(),
            t.components().iter().map(|(i, c)| (*i, Polynomial::constant(n, c.clone()))),
        )
    }

    pub fn wedge(&self, other: &DifferentialForm) -> Result<DifferentialForm> {
        Ok(DifferentialForm(wedge_components(&self.0, &other.0)?))
    }

    /// Coordinate exterior derivative. A top-degree form maps to the empty
    /// form of degree `n + 1`.
    pub fn exterior_derivative(&self) -> DifferentialForm {
        let n = self.0.nvars();
        let mut out = Components::new(self.0.chart.clone(), self.0.degree + 1);
        for (j, f) in &self.0.map {
            for i in 0..n {
                if j.contains(i) {
                    continue;
                }
                let df = f.derivative(i);
                if df.is_zero() {
                    continue;
                }
                let single = MultiIndex::single(i);
                let df = if single.shuffle_sign(*j) < 0 { -&df } else { df };
                out.add(j.with(i), df);
            }
        }
        DifferentialForm(out)
    }

    pub fn is_closed(&self) -> bool {
        self.exterior_derivative().is_zero()
    }

    /// Whether every coefficient is a constant.
    pub fn is_constant(&self) -> bool {
        self.0.map.values().all(Polynomial::is_constant)
    }
}

impl MultiVectorField {
    /// A vector field from one polynomial per coordinate.
    pub fn vector_field(chart: Arc<Chart>, components: Vec<Polynomial>) -> Result<Self> {
        if components.len() != chart.dim() {
            return Err(structural(format!(
                "vector field needs {} components, got {}",
                chart.dim(),
                components.len()
            )));
        }
        MultiVectorField::from_components(
            chart,
            1,
            components.into_iter().enumerate().map(|(i, p)| (MultiIndex::single(i), p)),
        )
    }

    /// The coordinate field `∂_i`.
    pub fn coordinate_field(chart: Arc<Chart>, i: usize) -> Self {
        let n = chart.dim();
        MultiVectorField::monomial(chart, MultiIndex::single(i), Polynomial::one(n))
    }

    /// The radial (Euler) field `Σ x^i ∂_i`.
    pub fn euler(chart: Arc<Chart>) -> Self {
        let n = chart.dim();
        MultiVectorField::vector_field(chart, (0..n).map(|i| Polynomial::var(n, i)).collect()).expect("n components")
    }

    pub fn wedge(&self, other: &MultiVectorField) -> Result<MultiVectorField> {
        Ok(MultiVectorField(wedge_components(&self.0, &other.0)?))
    }

    /// For a vector field, its coefficient polynomials in coordinate order.
    pub fn vector_components(&self) -> Result<Vec<Polynomial>> {
        if self.0.degree != 1 {
            return Err(argument(format!("expected a vector field, got degree {}", self.0.degree)));
        }
        Ok((0..self.0.nvars()).map(|i| self.component(MultiIndex::single(i))).collect())
    }
}

fn wedge_components(a: &Components, b: &Components) -> Result<Components> {
    if !same_chart(&a.chart, &b.chart) {
        return Err(structural("operands live on different charts"));
    }
    let mut out = Components::new(a.chart.clone(), a.degree + b.degree);
    for (i, p) in &a.map {
        for (j, q) in &b.map {
            if !i.is_disjoint(*j) {
                continue;
            }
            let v = p * q;
            out.add(i.union(*j), if i.shuffle_sign(*j) < 0 { -&v } else { v });
        }
    }
    Ok(out)
}

/// `i(X) ω`; zero 0-form when `deg X > deg ω`.
pub fn interior(x: &MultiVectorField, omega: &DifferentialForm) -> Result<DifferentialForm> {
    if !same_chart(x.chart(), omega.chart()) {
        return Err(structural("multivector field and form live on different charts"));
    }
    let (m, k) = (x.degree(), omega.degree());
    if m > k {
        return Ok(DifferentialForm::zero(omega.chart().clone(), 0));
    }
    let mut out = Components::new(omega.chart().clone(), k - m);
    for (i, xi) in x.components() {
        for (j, wj) in omega.components() {
            if !i.is_subset_of(*j) {
                continue;
            }
            let v = xi * wj;
            out.add(j.minus(*i), if contraction_sign(*i, *j) < 0 { -&v } else { v });
        }
    }
    Ok(DifferentialForm(out))
}

/// Coordinate Lie bracket of vector fields, `[X,Y]^i = X^j ∂_j Y^i − Y^j ∂_j X^i`.
pub fn lie_bracket(x: &MultiVectorField, y: &MultiVectorField) -> Result<MultiVectorField> {
    if !same_chart(x.chart(), y.chart()) {
        return Err(structural("vector fields live on different charts"));
    }
    let xs = x.vector_components()?;
    let ys = y.vector_components()?;
    let n = xs.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut acc = Polynomial::zero(n);
        for j in 0..n {
            if !xs[j].is_zero() {
                acc = &acc + &(&xs[j] * &ys[i].derivative(j));
            }
            if !ys[j].is_zero() {
                acc = &acc - &(&ys[j] * &xs[i].derivative(j));
            }
        }
        out.push(acc);
    }
    MultiVectorField::vector_field(x.chart().clone(), out)
}

/// `L(X) ω = d i(X) ω − (−1)^m i(X) dω` for an `m`-vector field `X`.
pub fn lie_derivative(x: &MultiVectorField, omega: &DifferentialForm) -> Result<DifferentialForm> {
    let (m, k) = (x.degree(), omega.degree());
    if m > k + 1 {
        return Err(argument(format!("Lie derivative needs m ≤ k + 1, got m = {m}, k = {k}")));
    }
    let first = if m <= k {
        interior(x, omega)?.exterior_derivative()
    } else {
        DifferentialForm::zero(omega.chart().clone(), k + 1 - m)
    };
    let second = interior(x, &omega.exterior_derivative())?;
    if m % 2 == 0 {
        first.sub(&second)
    } else {
        first.add(&second)
    }
}

/// A polynomial map between charts, one polynomial in the source coordinates
/// per target coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMap {
    source: Arc<Chart>,
    target: Arc<Chart>,
    components: Vec<Polynomial>,
}

impl PolyMap {
    pub fn new(source: Arc<Chart>, target: Arc<Chart>, components: Vec<Polynomial>) -> Result<Self> {
        if components.len() != target.dim() {
            return Err(structural(format!(
                "map needs {} components, got {}",
                target.dim(),
                components.len()
            )));
        }
        if components.iter().any(|p| p.nvars() != source.dim()) {
            return Err(structural("map components must be polynomials in the source coordinates"));
        }
        Ok(PolyMap { source, target, components })
    }

    pub fn identity(chart: Arc<Chart>) -> Self {
        let n = chart.dim();
        PolyMap { source: chart.clone(), target: chart, components: (0..n).map(|i| Polynomial::var(n, i)).collect() }
    }

    pub fn source(&self) -> &Arc<Chart> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Chart> {
        &self.target
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    /// `self ∘ inner`: first `inner`, then `self`.
    pub fn after(&self, inner: &PolyMap) -> Result<PolyMap> {
        if !same_chart(&inner.target, &self.source) {
            return Err(structural("maps are not composable"));
        }
        let components = self.components.iter().map(|p| p.compose(&inner.components)).collect();
        PolyMap::new(inner.source.clone(), self.target.clone(), components)
    }
}

/// Coordinate pullback `φ* ω`.
pub fn pullback(phi: &PolyMap, omega: &DifferentialForm) -> Result<DifferentialForm> {
    if !same_chart(&phi.target, omega.chart()) {
        return Err(structural("form does not live on the target chart of the map"));
    }
    let source = phi.source.clone();
    let n = source.dim();
    let differentials: Vec<DifferentialForm> = phi
        .components
        .iter()
        .map(|p| {
            let comps = (0..n).map(|i| (MultiIndex::single(i), p.derivative(i)));
            DifferentialForm::from_components(source.clone(), 1, comps).expect("valid differential")
        })
        .collect();
    let mut out = DifferentialForm::zero(source.clone(), omega.degree());
    for (j, f) in omega.components() {
        let mut term = DifferentialForm::function(source.clone(), f.compose(&phi.components));
        for t in j.iter() {
            term = term.wedge(&differentials[t])?;
        }
        out = out.add(&term)?;
    }
    Ok(out)
}

/// Radial homotopy operator: for a closed `k`-form `ω` (`k ≥ 1`) returns `η`
/// with `dη = ω`. Each homogeneous coefficient part of degree `s` contributes
/// `1/(k + s) · i(E) ω_s`, where `E = Σ x^i ∂_i`.
pub fn homotopy_inverse_d(omega: &DifferentialForm) -> Result<DifferentialForm> {
    let k = omega.degree();
    if k == 0 {
        return Err(argument("homotopy operator needs a form of degree ≥ 1"));
    }
    let d_omega = omega.exterior_derivative();
    if !d_omega.is_zero() {
        return Err(precondition(format!("form is not closed; dω = {}", d_omega.display())));
    }
    let chart = omega.chart().clone();
    let n = chart.dim();
    let mut out = Components::new(chart.clone(), k - 1);
    for (j, f) in omega.components() {
        for (m, c) in f.terms() {
            let weight = Rational::from_integer((k as u32 + m.degree()).into());
            let coeff = c / weight;
            for (pos, i) in j.iter().enumerate() {
                let mut term = Polynomial::term(n, m.clone(), coeff.clone());
                term = &term * &Polynomial::var(n, i);
                out.add(j.without(i), if pos % 2 == 1 { -&term } else { term });
            }
        }
    }
    let eta = DifferentialForm(out);
    assert!(
        eta.exterior_derivative() == *omega,
        "homotopy operator failed to invert d on a closed form"
    );
    Ok(eta)
}

/// Nonzero components of `dω`, useful for error reports.
pub fn closedness_defect(omega: &DifferentialForm) -> Vec<(MultiIndex, Polynomial)> {
    omega.exterior_derivative().components().iter().map(|(i, p)| (*i, p.clone())).collect()
}

/// Evaluates a vector field at a point as a dense coordinate vector.
pub fn evaluate_vector(x: &MultiVectorField, point: &[Rational]) -> Result<Vec<Rational>> {
    let t = x.evaluate(point)?;
    if t.degree() != 1 {
        return Err(argument("expected a vector field"));
    }
    Ok(t.to_dense())
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio};

    fn xp() -> Arc<Chart> {
        Chart::new(["x", "p"]).unwrap()
    }

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

    fn field(chart: &Arc<Chart>, comps: &[&str]) -> MultiVectorField {
        MultiVectorField::vector_field(chart.clone(), comps.iter().map(|s| poly(chart, s)).collect()).unwrap()
    }

    #[test]
    fn d_of_p_dx() {
        let c = xp();
        let theta = form(&c, 1, &[(&[0], "p")]);
        // dp ∧ dx = −dx ∧ dp
        assert_eq!(theta.exterior_derivative(), form(&c, 2, &[(&[0, 1], "-1")]));
    }

    #[test]
    fn d_of_xy_dx() {
        let c = Chart::new(["x", "y"]).unwrap();
        let w = form(&c, 1, &[(&[0], "x*y")]);
        assert_eq!(w.exterior_derivative(), form(&c, 2, &[(&[0, 1], "-x")]));
    }

    #[test]
    fn top_degree_derivative_is_empty() {
        let c = xp();
        let top = form(&c, 2, &[(&[0, 1], "x^2")]);
        let d = top.exterior_derivative();
        assert!(d.is_zero());
        assert_eq!(d.degree(), 3);
    }

    #[test]
    fn brackets() {
        let c = xp();
        let dx = field(&c, &["1", "0"]);
        let dp = field(&c, &["0", "1"]);
        assert!(lie_bracket(&dx, &dp).unwrap().is_zero());
        let xdx = field(&c, &["x", "0"]);
        assert_eq!(lie_bracket(&xdx, &dx).unwrap(), field(&c, &["-1", "0"]));
        let other = Chart::new(["a", "b"]).unwrap();
        let foreign = MultiVectorField::coordinate_field(other, 0);
        assert!(matches!(lie_bracket(&dx, &foreign), Err(crate::Error::Structural(_))));
    }

    #[test]
    fn lie_derivative_examples() {
        let c = Chart::new(["x", "y"]).unwrap();
        let w = form(&c, 2, &[(&[0, 1], "x")]);
        let dx = MultiVectorField::coordinate_field(c.clone(), 0);
        assert_eq!(lie_derivative(&dx, &w).unwrap(), form(&c, 2, &[(&[0, 1], "1")]));

        let c = xp();
        let omega = form(&c, 2, &[(&[0, 1], "-1")]);
        let euler = MultiVectorField::euler(c.clone());
        assert_eq!(lie_derivative(&euler, &omega).unwrap(), omega.scale(&int(2)));
    }

    #[test]
    fn lie_derivative_degree_range() {
        let c = Chart::new(["x", "y", "z"]).unwrap();
        let f = form(&c, 0, &[(&[], "x")]);
        let x2 = MultiVectorField::monomial(c.clone(), MultiIndex::from_increasing(&[0, 1]).unwrap(), Polynomial::one(3));
        assert!(lie_derivative(&x2, &f).is_err());
        let w = form(&c, 1, &[(&[2], "x*y")]);
        // m = k + 1: only −(−1)^m i(X) dω survives
        let l = lie_derivative(&x2, &w).unwrap();
        assert_eq!(l.degree(), 0);
        assert_eq!(l, interior(&x2, &w.exterior_derivative()).unwrap().scale(&int(-1)));
    }

    #[test]
    fn pullback_examples() {
        let c = xp();
        let omega = form(&c, 2, &[(&[0, 1], "-1")]);
        assert_eq!(pullback(&PolyMap::identity(c.clone()), &omega).unwrap(), omega);
        let rot = PolyMap::new(c.clone(), c.clone(), vec![poly(&c, "p"), poly(&c, "-x")]).unwrap();
        assert_eq!(pullback(&rot, &omega).unwrap(), omega);

        let line = Chart::new(["x"]).unwrap();
        let dx = form(&line, 1, &[(&[0], "1")]);
        let double = PolyMap::new(line.clone(), line.clone(), vec![poly(&line, "2*x")]).unwrap();
        assert_eq!(pullback(&double, &dx).unwrap(), dx.scale(&int(2)));
    }

    #[test]
    fn homotopy_examples() {
        let c = xp();
        let omega = form(&c, 2, &[(&[0, 1], "-1")]);
        let eta = homotopy_inverse_d(&omega).unwrap();
        // ½(p dx − x dp)
        assert_eq!(eta, form(&c, 1, &[(&[0], "1/2*p"), (&[1], "-1/2*x")]));

        let dx = form(&c, 1, &[(&[0], "1")]);
        assert_eq!(homotopy_inverse_d(&dx).unwrap(), form(&c, 0, &[(&[], "x")]));

        let zero = DifferentialForm::zero(c.clone(), 2);
        assert!(homotopy_inverse_d(&zero).unwrap().is_zero());

        let not_closed = form(&c, 1, &[(&[0], "p")]);
        let err = homotopy_inverse_d(&not_closed).unwrap_err();
        assert!(matches!(err, crate::Error::Precondition(ref m) if m.contains("dx^dp")));
    }

    #[test]
    fn evaluation_matches_pointwise_interior() {
        let c = Chart::new(["x", "y", "z"]).unwrap();
        let w = form(&c, 2, &[(&[0, 1], "x*z"), (&[1, 2], "y - 1")]);
        let v = field(&c, &["y", "1", "x^2"]);
        let point = vec![int(2), ratio(1, 3), int(-1)];
        let lhs = interior(&v, &w).unwrap().evaluate(&point).unwrap();
        let rhs = crate::exterior::interior(&v.evaluate(&point).unwrap(), &w.evaluate(&point).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }
}
