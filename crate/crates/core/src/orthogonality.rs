//! Pointwise `r`-orthogonal complements with respect to a form, and the
//! isotropic / coisotropic / Lagrangian / multisymplectic classification of
//! subspaces.

use num::Zero;

use crate::error::{argument, precondition, structural, Result};
use crate::exterior::{flat_matrix, interior, wedge, AlternatingTensor, Variance};
use crate::linalg::{Matrix, RowReducer};
use crate::multi_index::combinations;
use crate::poly::{evaluate_vector, MultiVectorField};
use crate::scalar::Rational;

/// A linear subspace of `Q^n`, stored as the reduced row echelon form of a
/// spanning set. Equal subspaces have identical representations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Matrix,
}

impl Subspace {
    pub fn span(ambient_dim: usize, vectors: &[Vec<Rational>]) -> Result<Self> {
        if let Some(v) = vectors.iter().find(|v| v.len() != ambient_dim) {
            return Err(structural(format!("vector of length {} in dimension {ambient_dim}", v.len())));
        }
        let mut reducer = RowReducer::new(ambient_dim);
        for v in vectors {
            reducer.insert(v.clone());
        }
        Ok(Subspace { ambient_dim, basis: reducer.into_rref().0 })
    }

    pub fn zero(ambient_dim: usize) -> Self {
        Subspace { ambient_dim, basis: Matrix::zeros(0, ambient_dim) }
    }

    pub fn whole(ambient_dim: usize) -> Self {
        let rows = (0..ambient_dim)
            .map(|i| (0..ambient_dim).map(|j| Rational::from_integer(((i == j) as i64).into())).collect())
            .collect();
        Subspace { ambient_dim, basis: Matrix::from_rows(ambient_dim, rows) }
    }

    /// Span of vector fields evaluated at a point.
    pub fn from_fields_at(fields: &[MultiVectorField], point: &[Rational]) -> Result<Self> {
        let vectors = fields.iter().map(|f| evaluate_vector(f, point)).collect::<Result<Vec<_>>>()?;
        Subspace::span(point.len(), &vectors)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    /// Canonical basis rows (reduced row echelon form).
    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<Vec<Rational>> {
        self.basis.rows().to_vec()
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        assert_eq!(v.len(), self.ambient_dim);
        let mut reducer = RowReducer::new(self.ambient_dim);
        for r in self.basis.rows() {
            reducer.insert(r.clone());
        }
        reducer.contains(v)
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.basis.rows().iter().all(|v| other.contains(v))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut all = self.basis_vectors();
        all.extend(other.basis_vectors());
        Subspace::span(self.ambient_dim, &all).expect("same ambient dimension")
    }

    pub fn intersection(&self, other: &Subspace) -> Subspace {
        // Σ a_i u_i − Σ b_j w_j = 0
        let (p, q) = (self.dim(), other.dim());
        let rows = (0..self.ambient_dim)
            .map(|c| {
                self.basis
                    .rows()
                    .iter()
                    .map(|u| u[c].clone())
                    .chain(other.basis.rows().iter().map(|w| -w[c].clone()))
                    .collect()
            })
            .collect();
        let system = Matrix::from_rows(p + q, rows);
        let vectors: Vec<Vec<Rational>> = system
            .kernel()
            .into_iter()
            .map(|coeffs| {
                let mut v = vec![Rational::zero(); self.ambient_dim];
                for (a, u) in coeffs[..p].iter().zip(self.basis.rows()) {
                    for (x, y) in v.iter_mut().zip(u) {
                        *x += a * y;
                    }
                }
                v
            })
            .collect();
        Subspace::span(self.ambient_dim, &vectors).expect("same ambient dimension")
    }
}

fn check_range(w: &Subspace, omega: &AlternatingTensor, r: usize) -> Result<()> {
    if omega.variance() != Variance::Covariant {
        return Err(structural("orthogonal complements are taken with respect to a form"));
    }
    if w.ambient_dim != omega.ambient_dim() {
        return Err(structural(format!(
            "subspace in dimension {} but form in dimension {}",
            w.ambient_dim,
            omega.ambient_dim()
        )));
    }
    let k = omega.degree();
    if r < 1 || r + 1 > k {
        return Err(argument(format!("orthogonality order r = {r} outside 1..={}", k.saturating_sub(1))));
    }
    Ok(())
}

/// `W^{⊥,r} = {v : i(v ∧ w₁ ∧ … ∧ w_r) Ω = 0 for all wᵢ ∈ W}`.
///
/// It suffices to impose the condition on wedges of `r`-subsets of a basis of
/// `W`. When `dim W < r` there is no constraint and the whole space is returned.
pub fn orth_complement(w: &Subspace, omega: &AlternatingTensor, r: usize) -> Result<Subspace> {
    check_range(w, omega, r)?;
    let n = w.ambient_dim;
    let basis: Vec<AlternatingTensor> =
        w.basis.rows().iter().map(|v| AlternatingTensor::from_vector(v, Variance::Contravariant)).collect();
    let mut constraints = RowReducer::new(n);
    for subset in combinations(basis.len(), r) {
        let mut ws = AlternatingTensor::scalar(n, Rational::from_integer(1.into()), Variance::Contravariant);
        for s in subset.iter() {
            ws = wedge(&ws, &basis[s])?;
        }
        // i(v ∧ w_S) Ω = i(v) i(w_S) Ω
        let reduced = interior(&ws, omega)?;
        let flat = flat_matrix(&reduced, 1)?;
        for row in flat.matrix.rows() {
            if constraints.rank() == n {
                break;
            }
            constraints.insert(row.clone());
        }
    }
    Subspace::span(n, &constraints.kernel())
}

/// Flags for the four cases of the classification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassificationReport {
    pub r: usize,
    pub isotropic: bool,
    pub coisotropic: bool,
    pub lagrangian: bool,
    /// `W ∩ W^{⊥,k−1} = {0}`; only computed when `r = k − 1`.
    pub multisymplectic: Option<bool>,
    pub complement: Subspace,
}

pub fn classify(w: &Subspace, omega: &AlternatingTensor, r: usize) -> Result<ClassificationReport> {
    let complement = orth_complement(w, omega, r)?;
    let isotropic = w.is_subspace_of(&complement);
    let coisotropic = complement.is_subspace_of(w);
    let multisymplectic = (r + 1 == omega.degree()).then(|| w.intersection(&complement).dim() == 0);
    Ok(ClassificationReport { r, isotropic, coisotropic, lagrangian: isotropic && coisotropic, multisymplectic, complement })
}

/// Whether an `r`-isotropic `W` admits no isotropic one-vector extension.
///
/// Candidates are the basis vectors of `W^{⊥,r}` outside `W`; each one is
/// tested by recomputing the isotropy of `W + span{v}` directly.
pub fn is_maximal_isotropic(w: &Subspace, omega: &AlternatingTensor, r: usize) -> Result<bool> {
    let report = classify(w, omega, r)?;
    if !report.isotropic {
        return Err(precondition(format!("subspace is not {r}-isotropic")));
    }
    for v in report.complement.basis.rows() {
        if w.contains(v) {
            continue;
        }
        let extended = w.sum(&Subspace::span(w.ambient_dim, std::slice::from_ref(v))?);
        if classify(&extended, omega, r)?.isotropic {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multi_index::MultiIndex;
    use crate::scalar::int;

    fn vecs(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()
    }

    fn sub(n: usize, rows: &[&[i64]]) -> Subspace {
        Subspace::span(n, &vecs(rows)).unwrap()
    }

    /// dp₁∧dx¹ + dp₂∧dx² on coordinates (x1, x2, p1, p2).
    fn symplectic4() -> AlternatingTensor {
        AlternatingTensor::from_components(
            4,
            2,
            Variance::Covariant,
            [
                (MultiIndex::from_increasing(&[0, 2]).unwrap(), int(-1)),
                (MultiIndex::from_increasing(&[1, 3]).unwrap(), int(-1)),
            ],
        )
        .unwrap()
    }

    fn volume3() -> AlternatingTensor {
        AlternatingTensor::basis(3, MultiIndex::from_increasing(&[0, 1, 2]).unwrap(), Variance::Covariant)
    }

    #[test]
    fn canonical_representation() {
        let a = sub(3, &[&[1, 1, 0], &[0, 1, 1]]);
        let b = sub(3, &[&[1, 2, 1], &[2, 1, -1], &[1, 0, -1]]);
        assert_eq!(a, b);
        assert_eq!(a.dim(), 2);
    }

    #[test]
    fn complement_examples() {
        let omega = symplectic4();
        let w = sub(4, &[&[1, 0, 0, 0]]);
        // span{∂x¹, ∂x², ∂p₂}
        assert_eq!(orth_complement(&w, &omega, 1).unwrap(), sub(4, &[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 0, 1]]));

        assert_eq!(orth_complement(&Subspace::whole(3), &volume3(), 2).unwrap(), Subspace::zero(3));
        assert_eq!(orth_complement(&Subspace::zero(3), &volume3(), 1).unwrap(), Subspace::whole(3));
        assert_eq!(orth_complement(&sub(3, &[&[1, 0, 0]]), &volume3(), 2).unwrap(), Subspace::whole(3));
        assert!(orth_complement(&w, &omega, 2).is_err());
        assert!(orth_complement(&w, &omega, 0).is_err());
    }

    #[test]
    fn classification_examples() {
        let omega = symplectic4();
        let w = sub(4, &[&[1, 0, 0, 0], &[0, 1, 0, 0]]);
        let rep = classify(&w, &omega, 1).unwrap();
        assert!(rep.lagrangian && rep.isotropic && rep.coisotropic);
        assert_eq!(rep.multisymplectic, Some(false));

        for r in 1..=2 {
            assert!(classify(&Subspace::whole(3), &volume3(), r).unwrap().coisotropic);
        }
        let line = sub(3, &[&[1, 0, 0]]);
        let rep = classify(&line, &volume3(), 1).unwrap();
        assert!(rep.lagrangian);
        assert_eq!(rep.complement, line);
        assert_eq!(rep.multisymplectic, None);
    }

    #[test]
    fn maximality_examples() {
        let omega = symplectic4();
        let lag = sub(4, &[&[1, 0, 0, 0], &[0, 1, 0, 0]]);
        assert!(is_maximal_isotropic(&lag, &omega, 1).unwrap());
        let line = sub(4, &[&[1, 0, 0, 0]]);
        assert!(!is_maximal_isotropic(&line, &omega, 1).unwrap());
        assert!(!is_maximal_isotropic(&Subspace::zero(4), &omega, 1).unwrap());
        let not_iso = sub(4, &[&[1, 0, 0, 0], &[0, 0, 1, 0]]);
        assert!(matches!(is_maximal_isotropic(&not_iso, &omega, 1), Err(crate::Error::Precondition(_))));
    }

    #[test]
    fn intersections() {
        let a = sub(3, &[&[1, 0, 0], &[0, 1, 0]]);
        let b = sub(3, &[&[0, 1, 0], &[0, 0, 1]]);
        assert_eq!(a.intersection(&b), sub(3, &[&[0, 1, 0]]));
        assert_eq!(a.sum(&b), Subspace::whole(3));
    }
}
