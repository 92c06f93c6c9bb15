//! Pointwise multilinear algebra: alternating forms and multivectors on a
//! finite-dimensional space, with wedge and interior products, flat maps and
//! the nondegeneracy and decomposability tests.
//!
//! Conventions:
//! * the wedge product uses the determinant convention, so
//!   `(dx¹ ∧ dx²)(e₁, e₂) = 1` with no factorial normalization;
//! * `i(X₁ ∧ … ∧ X_m) ω = i(X₁) i(X₂) ⋯ i(X_m) ω`, the rightmost factor is
//!   inserted first; a single vector is inserted into the leading slot.

use std::collections::BTreeMap;

use num::Zero;

use crate::error::{argument, structural, Result};
use crate::linalg::Matrix;
use crate::multi_index::{combinations, contraction_sign, MultiIndex, MAX_DIM};
use crate::scalar::{binomial, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variance {
    /// Forms, elements of `Λ^k V*`.
    Covariant,
    /// Multivectors, elements of `Λ^m V`.
    Contravariant,
}

/// A sparse alternating tensor. Zero components are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlternatingTensor {
    ambient_dim: usize,
    degree: usize,
    variance: Variance,
    components: BTreeMap<MultiIndex, Rational>,
}

impl AlternatingTensor {
    pub fn zero(ambient_dim: usize, degree: usize, variance: Variance) -> Self {
        assert!(ambient_dim <= MAX_DIM);
        AlternatingTensor { ambient_dim, degree, variance, components: BTreeMap::new() }
    }

    pub fn form(ambient_dim: usize, degree: usize) -> Self {
        Self::zero(ambient_dim, degree, Variance::Covariant)
    }

    pub fn multivector(ambient_dim: usize, degree: usize) -> Self {
        Self::zero(ambient_dim, degree, Variance::Contravariant)
    }

    /// The basis element `dx^I` (or `e_I`).
    pub fn basis(ambient_dim: usize, index: MultiIndex, variance: Variance) -> Self {
        let mut t = Self::zero(ambient_dim, index.degree(), variance);
        t.add_component(index, Rational::from_integer(1.into()));
        t
    }

    pub fn scalar(ambient_dim: usize, value: Rational, variance: Variance) -> Self {
        let mut t = Self::zero(ambient_dim, 0, variance);
        t.add_component(MultiIndex::EMPTY, value);
        t
    }

    /// A vector (or covector) from its dense coordinates.
    pub fn from_vector(coords: &[Rational], variance: Variance) -> Self {
        let mut t = Self::zero(coords.len(), 1, variance);
        for (i, c) in coords.iter().enumerate() {
            t.add_component(MultiIndex::single(i), c.clone());
        }
        t
    }

    pub fn from_components(
        ambient_dim: usize,
        degree: usize,
        variance: Variance,
        components: impl IntoIterator<Item = (MultiIndex, Rational)>,
    ) -> Result<Self> {
        let mut t = Self::zero(ambient_dim, degree, variance);
        for (idx, c) in components {
            if idx.degree() != degree || idx.span() > ambient_dim {
                return Err(structural(format!(
                    "component {idx:?} does not fit degree {degree} in dimension {ambient_dim}"
                )));
            }
            t.add_component(idx, c);
        }
        Ok(t)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn variance(&self) -> Variance {
        self.variance
    }

    pub fn components(&self) -> &BTreeMap<MultiIndex, Rational> {
        &self.components
    }

    pub fn component(&self, index: MultiIndex) -> Rational {
        self.components.get(&index).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    /// Adds `value` to the component at `index`, keeping the map sparse.
    pub fn add_component(&mut self, index: MultiIndex, value: Rational) {
        debug_assert_eq!(index.degree(), self.degree);
        if value.is_zero() {
            return;
        }
        let entry = self.components.entry(index).or_insert_with(Rational::zero);
        *entry += value;
        if entry.is_zero() {
            self.components.remove(&index);
        }
    }

    /// Component vector in the lexicographic basis of degree-`degree` multi-indices.
    pub fn to_dense(&self) -> Vec<Rational> {
        combinations(self.ambient_dim, self.degree).into_iter().map(|i| self.component(i)).collect()
    }

    pub fn from_dense(ambient_dim: usize, degree: usize, variance: Variance, coords: &[Rational]) -> Self {
        let basis = combinations(ambient_dim, degree);
        assert_eq!(basis.len(), coords.len());
        let mut t = Self::zero(ambient_dim, degree, variance);
        for (i, c) in basis.into_iter().zip(coords) {
            t.add_component(i, c.clone());
        }
        t
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        let mut out = Self::zero(self.ambient_dim, self.degree, self.variance);
        if factor.is_zero() {
            return out;
        }
        for (i, c) in &self.components {
            out.components.insert(*i, c * factor);
        }
        out
    }

    pub fn add(&self, other: &AlternatingTensor) -> Result<Self> {
        self.check_same_space(other)?;
        if self.degree != other.degree {
            return Err(structural(format!("cannot add degrees {} and {}", self.degree, other.degree)));
        }
        let mut out = self.clone();
        for (i, c) in &other.components {
            out.add_component(*i, c.clone());
        }
        Ok(out)
    }

    fn check_same_space(&self, other: &AlternatingTensor) -> Result<()> {
        if self.ambient_dim != other.ambient_dim {
            return Err(structural(format!(
                "ambient dimensions differ: {} vs {}",
                self.ambient_dim, other.ambient_dim
            )));
        }
        if self.variance != other.variance {
            return Err(structural("cannot combine a form with a multivector"));
        }
        Ok(())
    }

    /// Evaluates a covariant tensor on `degree` vectors (determinant convention).
    pub fn evaluate(&self, vectors: &[Vec<Rational>]) -> Result<Rational> {
        if self.variance != Variance::Covariant {
            return Err(structural("only forms can be evaluated on vectors"));
        }
        if vectors.len() != self.degree {
            return Err(argument(format!("expected {} vectors, got {}", self.degree, vectors.len())));
        }
        if let Some(v) = vectors.iter().find(|v| v.len() != self.ambient_dim) {
            return Err(argument(format!("vector of length {} in dimension {}", v.len(), self.ambient_dim)));
        }
        let mut total = Rational::zero();
        for (idx, c) in &self.components {
            let rows: Vec<usize> = idx.to_vec();
            let minor: Vec<Vec<Rational>> =
                rows.iter().map(|&i| vectors.iter().map(|v| v[i].clone()).collect()).collect();
            total += c * determinant(minor);
        }
        Ok(total)
    }
}

fn determinant(mut a: Vec<Vec<Rational>>) -> Rational {
    let n = a.len();
    let mut det = Rational::from_integer(1.into());
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Rational::zero();
        };
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        let pivot = a[col][col].clone();
        det *= &pivot;
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &pivot;
            for c in col..n {
                let sub = &factor * &a[col][c];
                a[r][c] -= sub;
            }
        }
    }
    det
}

/// Exterior product. Degrees adding past the ambient dimension give the zero tensor.
pub fn wedge(a: &AlternatingTensor, b: &AlternatingTensor) -> Result<AlternatingTensor> {
    a.check_same_space(b)?;
    let degree = a.degree + b.degree;
    let mut out = AlternatingTensor::zero(a.ambient_dim, degree, a.variance);
    if degree > a.ambient_dim {
        return Ok(out);
    }
    for (i, ca) in &a.components {
        for (j, cb) in &b.components {
            if !i.is_disjoint(*j) {
                continue;
            }
            let v = ca * cb;
            let v = if i.shuffle_sign(*j) < 0 { -v } else { v };
            out.add_component(i.union(*j), v);
        }
    }
    Ok(out)
}

/// Contraction of a tensor of one variance into one of the other variance.
/// Used both as `i(X) ω` and, with the roles swapped, as `i(φ) X`.
fn contract(inner: &AlternatingTensor, outer: &AlternatingTensor) -> Result<AlternatingTensor> {
    if inner.ambient_dim != outer.ambient_dim {
        return Err(structural(format!(
            "ambient dimensions differ: {} vs {}",
            inner.ambient_dim, outer.ambient_dim
        )));
    }
    if inner.variance == outer.variance {
        return Err(structural("contraction needs one form and one multivector"));
    }
    if inner.degree > outer.degree {
        return Ok(AlternatingTensor::zero(outer.ambient_dim, 0, outer.variance));
    }
    let mut out = AlternatingTensor::zero(outer.ambient_dim, outer.degree - inner.degree, outer.variance);
    for (i, ci) in &inner.components {
        for (j, cj) in &outer.components {
            if !i.is_subset_of(*j) {
                continue;
            }
            let v = ci * cj;
            let v = if contraction_sign(*i, *j) < 0 { -v } else { v };
            out.add_component(j.minus(*i), v);
        }
    }
    Ok(out)
}

/// Interior product `i(X) ω` of a multivector into a form. When the
/// multivector degree exceeds the form degree, the result is the zero scalar.
pub fn interior(x: &AlternatingTensor, omega: &AlternatingTensor) -> Result<AlternatingTensor> {
    if x.variance != Variance::Contravariant || omega.variance != Variance::Covariant {
        return Err(structural("interior product expects a multivector and a form"));
    }
    contract(x, omega)
}

/// The matrix of `Λ^m V → Λ^{k−m} V*, X ↦ i(X) Ω` in lexicographic bases.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatMatrix {
    pub source_degree: usize,
    pub target_degree: usize,
    pub ambient_dim: usize,
    /// `C(n, k−m) × C(n, m)`; column `c` holds the components of `i(e_I) Ω`
    /// for the `c`-th multi-index `I` of degree `m`.
    pub matrix: Matrix,
}

impl FlatMatrix {
    pub fn source_basis(&self) -> Vec<MultiIndex> {
        combinations(self.ambient_dim, self.source_degree)
    }

    pub fn target_basis(&self) -> Vec<MultiIndex> {
        combinations(self.ambient_dim, self.target_degree)
    }

    /// Applies the map to a multivector of the source degree.
    pub fn apply(&self, x: &AlternatingTensor) -> AlternatingTensor {
        let out = self.matrix.mul_vec(&x.to_dense());
        AlternatingTensor::from_dense(self.ambient_dim, self.target_degree, Variance::Covariant, &out)
    }
}

pub fn flat_matrix(omega: &AlternatingTensor, m: usize) -> Result<FlatMatrix> {
    if omega.variance != Variance::Covariant {
        return Err(structural("flat map needs a form"));
    }
    if m < 1 || m > omega.degree {
        return Err(argument(format!("flat degree {m} outside 1..={}", omega.degree)));
    }
    let n = omega.ambient_dim;
    let target_degree = omega.degree - m;
    let sources = combinations(n, m);
    let targets = combinations(n, target_degree);
    let position: BTreeMap<MultiIndex, usize> = targets.iter().enumerate().map(|(r, i)| (*i, r)).collect();
    let mut matrix = Matrix::zeros(binomial(n, target_degree), sources.len());
    for (col, src) in sources.iter().enumerate() {
        for (j, c) in &omega.components {
            if !src.is_subset_of(*j) {
                continue;
            }
            let v = if contraction_sign(*src, *j) < 0 { -c.clone() } else { c.clone() };
            matrix.set(position[&j.minus(*src)], col, v);
        }
    }
    Ok(FlatMatrix { source_degree: m, target_degree, ambient_dim: n, matrix })
}

/// Whether `i(Y) Ω = 0` forces `Y = 0` for every `j`-vector `Y`.
///
/// `j = k` is accepted as well: the flat map then lands in the scalars.
pub fn is_j_nondegenerate(omega: &AlternatingTensor, j: usize) -> Result<bool> {
    if j < 1 || j > omega.degree {
        return Err(argument(format!("nondegeneracy degree {j} outside 1..={}", omega.degree)));
    }
    let flat = flat_matrix(omega, j)?;
    Ok(flat.matrix.rank() == flat.matrix.ncols())
}

/// Plücker test: `X` is decomposable iff `(i(φ) X) ∧ X = 0` for every basis
/// covector `φ = dx^K` of degree `m − 1`.
pub fn is_decomposable(x: &AlternatingTensor) -> Result<bool> {
    if x.variance != Variance::Contravariant {
        return Err(structural("decomposability is defined for multivectors"));
    }
    let m = x.degree;
    if m < 1 || m > x.ambient_dim {
        return Err(argument(format!("multivector degree {m} outside 1..={}", x.ambient_dim)));
    }
    if m == 1 || m == x.ambient_dim || x.is_zero() {
        return Ok(true);
    }
    for k in combinations(x.ambient_dim, m - 1) {
        let phi = AlternatingTensor::basis(x.ambient_dim, k, Variance::Covariant);
        let v = contract(&phi, x)?;
        if v.is_zero() {
            continue;
        }
        if !wedge(&v, x)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, one};

    fn idx(v: &[usize]) -> MultiIndex {
        MultiIndex::from_increasing(v).unwrap()
    }

    fn form(n: usize, terms: &[(&[usize], i64)]) -> AlternatingTensor {
        let degree = terms.first().map_or(0, |t| t.0.len());
        AlternatingTensor::from_components(n, degree, Variance::Covariant, terms.iter().map(|(i, c)| (idx(i), int(*c))))
            .unwrap()
    }

    fn mv(n: usize, terms: &[(&[usize], i64)]) -> AlternatingTensor {
        let degree = terms.first().map_or(0, |t| t.0.len());
        AlternatingTensor::from_components(
            n,
            degree,
            Variance::Contravariant,
            terms.iter().map(|(i, c)| (idx(i), int(*c))),
        )
        .unwrap()
    }

    #[test]
    fn wedge_examples() {
        let dx1 = form(2, &[(&[0], 1)]);
        let dx2 = form(2, &[(&[1], 1)]);
        let w = wedge(&dx1, &dx2).unwrap();
        assert_eq!(w.evaluate(&[vec![one(), int(0)], vec![int(0), one()]]).unwrap(), one());
        assert!(wedge(&dx1, &dx1).unwrap().is_zero());

        let a = form(3, &[(&[0], 1), (&[1], 1)]);
        let dx3 = form(3, &[(&[2], 1)]);
        assert_eq!(wedge(&a, &dx3).unwrap(), form(3, &[(&[0, 2], 1), (&[1, 2], 1)]));
    }

    #[test]
    fn wedge_rejects_mismatch() {
        let a = form(2, &[(&[0], 1)]);
        let b = form(3, &[(&[0], 1)]);
        assert!(matches!(wedge(&a, &b), Err(crate::Error::Structural(_))));
        let v = mv(2, &[(&[0], 1)]);
        assert!(wedge(&a, &v).is_err());
    }

    #[test]
    fn wedge_past_dimension_is_zero() {
        let a = form(2, &[(&[0, 1], 1)]);
        let b = form(2, &[(&[0], 1)]);
        let w = wedge(&a, &b).unwrap();
        assert!(w.is_zero());
        assert_eq!(w.degree(), 3);
    }

    #[test]
    fn interior_examples() {
        let x = mv(2, &[(&[0], 1)]);
        let omega = form(2, &[(&[0, 1], 1)]);
        assert_eq!(interior(&x, &omega).unwrap(), form(2, &[(&[1], 1)]));

        let x = mv(3, &[(&[0, 1], 1)]);
        let vol = form(3, &[(&[0, 1, 2], 1)]);
        assert_eq!(interior(&x, &vol).unwrap(), form(3, &[(&[2], -1)]));

        let x = mv(3, &[(&[0, 1, 2], 1)]);
        let omega = form(3, &[(&[0, 1], 1)]);
        assert!(interior(&x, &omega).unwrap().is_zero());
    }

    #[test]
    fn flat_of_dp_dx() {
        // chart (x, p): dp ∧ dx = −dx ∧ dp
        let omega = form(2, &[(&[0, 1], -1)]);
        let flat = flat_matrix(&omega, 1).unwrap();
        // column ∂x → −dp, column ∂p → dx
        assert_eq!(flat.matrix.column(0), vec![int(0), int(-1)]);
        assert_eq!(flat.matrix.column(1), vec![int(1), int(0)]);
        assert!(flat_matrix(&omega, 0).is_err());
        assert!(flat_matrix(&omega, 3).is_err());
        assert!(flat_matrix(&AlternatingTensor::form(3, 2), 1).unwrap().matrix.is_zero());
    }

    #[test]
    fn nondegeneracy_examples() {
        let vol3 = form(3, &[(&[0, 1, 2], 1)]);
        assert_eq!(flat_matrix(&vol3, 1).unwrap().matrix.rank(), 3);
        assert!(is_j_nondegenerate(&vol3, 1).unwrap());
        let vol_in_4 = form(4, &[(&[0, 1, 2], 1)]);
        assert!(!is_j_nondegenerate(&vol_in_4, 1).unwrap());
        // dp1∧dx1 + dp2∧dx2 with coordinates (x1, x2, p1, p2)
        let sym = form(4, &[(&[0, 2], -1), (&[1, 3], -1)]);
        assert!(is_j_nondegenerate(&sym, 1).unwrap());
        assert!(!is_j_nondegenerate(&sym, 2).unwrap());
        assert!(is_j_nondegenerate(&sym, 3).is_err());
        assert!(is_j_nondegenerate(&sym, 0).is_err());
    }

    #[test]
    fn decomposability_examples() {
        assert!(is_decomposable(&mv(4, &[(&[0, 1], 1)])).unwrap());
        assert!(!is_decomposable(&mv(4, &[(&[0, 1], 1), (&[2, 3], 1)])).unwrap());
        assert!(is_decomposable(&mv(3, &[(&[0, 1, 2], 5)])).unwrap());
        // (e1 + e2) ∧ (e3 + e4)
        assert!(is_decomposable(&mv(4, &[(&[0, 2], 1), (&[0, 3], 1), (&[1, 2], 1), (&[1, 3], 1)])).unwrap());
        assert!(is_decomposable(&mv(4, &[(&[0, 1], 0)])).is_ok());
    }

    #[test]
    fn odd_dimension_two_forms_degenerate() {
        let omega = form(3, &[(&[0, 1], 1), (&[1, 2], 3), (&[0, 2], -2)]);
        assert!(!is_j_nondegenerate(&omega, 1).unwrap());
    }
}
