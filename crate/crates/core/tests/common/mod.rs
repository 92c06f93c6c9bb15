//! Shared test support: a dense fully antisymmetric tensor oracle, a
//! test-local rank routine and random instance builders.
#![allow(dead_code)]

use msk::exterior::{AlternatingTensor, Variance};
use msk::multi_index::combinations;
use msk::scalar::{int, ratio, Rational};
use num::Zero;
use proptest::prelude::*;
use rand::Rng;

/// All permutations of `0..k` with their signs.
pub fn permutations(k: usize) -> Vec<(Vec<usize>, i64)> {
    fn go(prefix: &mut Vec<usize>, rest: &mut Vec<usize>, sign: i64, out: &mut Vec<(Vec<usize>, i64)>) {
        if rest.is_empty() {
            out.push((prefix.clone(), sign));
            return;
        }
        for i in 0..rest.len() {
            let x = rest.remove(i);
            prefix.push(x);
            // moving element i of the remaining list to the front costs i transpositions
            go(prefix, rest, if i % 2 == 0 { sign } else { -sign }, out);
            prefix.pop();
            rest.insert(i, x);
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut (0..k).collect(), 1, &mut out);
    out
}

fn factorial(k: usize) -> i64 {
    (1..=k as i64).product()
}

/// A tensor stored on all `n^k` index tuples.
#[derive(Clone, Debug)]
pub struct Dense {
    pub n: usize,
    pub k: usize,
    pub data: Vec<Rational>,
}

impl Dense {
    fn offset(&self, tuple: &[usize]) -> usize {
        tuple.iter().fold(0, |acc, &i| acc * self.n + i)
    }

    pub fn get(&self, tuple: &[usize]) -> &Rational {
        &self.data[self.offset(tuple)]
    }

    /// Antisymmetric extension of the increasing-index components.
    pub fn from_sparse(t: &AlternatingTensor) -> Dense {
        let (n, k) = (t.ambient_dim(), t.degree());
        let mut d = Dense { n, k, data: vec![Rational::zero(); n.pow(k as u32)] };
        let perms = permutations(k);
        for (index, c) in t.components() {
            let idx = index.to_vec();
            for (p, s) in &perms {
                let tuple: Vec<usize> = p.iter().map(|&i| idx[i]).collect();
                let o = d.offset(&tuple);
                d.data[o] += c * int(*s);
            }
        }
        d
    }

    /// `Σ_a T[a] v₁^{a₁} … v_k^{a_k}`.
    pub fn evaluate(&self, vectors: &[Vec<Rational>]) -> Rational {
        let mut total = Rational::zero();
        for tuple in tuples(self.n, self.k) {
            let mut term = self.get(&tuple).clone();
            if term.is_zero() {
                continue;
            }
            for (v, &a) in vectors.iter().zip(&tuple) {
                term *= &v[a];
            }
            total += term;
        }
        total
    }
}

pub fn tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out.into_iter().flat_map(|t| (0..n).map(move |i| [t.clone(), vec![i]].concat())).collect();
    }
    out
}

/// `(i(X)ω)_B = (1/m!) Σ_a X^a ω_{a_m … a_1 B}`: the first `m` slots of `ω`
/// are filled by `X₁ ∧ … ∧ X_m` in reverse order.
pub fn interior_oracle(x: &AlternatingTensor, omega: &AlternatingTensor) -> AlternatingTensor {
    let (n, m, k) = (omega.ambient_dim(), x.degree(), omega.degree());
    if m > k {
        return AlternatingTensor::zero(n, 0, Variance::Covariant);
    }
    let (dx, dw) = (Dense::from_sparse(x), Dense::from_sparse(omega));
    let mut out = AlternatingTensor::zero(n, k - m, Variance::Covariant);
    let norm = ratio(1, factorial(m));
    for b in combinations(n, k - m) {
        let tail = b.to_vec();
        let mut total = Rational::zero();
        for a in tuples(n, m) {
            let xa = dx.get(&a);
            if xa.is_zero() {
                continue;
            }
            let slots: Vec<usize> = a.iter().rev().copied().chain(tail.iter().copied()).collect();
            total += xa * dw.get(&slots);
        }
        out.add_component(b, total * &norm);
    }
    out
}

/// `(α ∧ β)_C = (1/(p! q!)) Σ_σ sgn σ α_{C_σ(1..p)} β_{C_σ(p+1..)}`.
pub fn wedge_oracle(a: &AlternatingTensor, b: &AlternatingTensor) -> AlternatingTensor {
    let (n, p, q) = (a.ambient_dim(), a.degree(), b.degree());
    let mut out = AlternatingTensor::zero(n, p + q, a.variance());
    if p + q > n {
        return out;
    }
    let (da, db) = (Dense::from_sparse(a), Dense::from_sparse(b));
    let norm = ratio(1, factorial(p) * factorial(q));
    let perms = permutations(p + q);
    for c in combinations(n, p + q) {
        let idx = c.to_vec();
        let mut total = Rational::zero();
        for (perm, s) in &perms {
            let t: Vec<usize> = perm.iter().map(|&i| idx[i]).collect();
            total += da.get(&t[..p]) * db.get(&t[p..]) * int(*s);
        }
        out.add_component(c, total * &norm);
    }
    out
}

/// Rank by plain Gaussian elimination, kept separate from the library's reducer.
pub fn rank(rows: &[Vec<Rational>]) -> usize {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let ncols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = &m[i][c] / &m[r][c];
                let pivot = m[r].clone();
                for (x, y) in m[i].iter_mut().zip(&pivot) {
                    *x -= &f * y;
                }
            }
        }
        r += 1;
    }
    r
}

/// `det` of the minor of `vectors` (as rows) on the columns `cols`.
pub fn minor(vectors: &[Vec<Rational>], cols: &[usize]) -> Rational {
    let k = cols.len();
    permutations(k)
        .into_iter()
        .map(|(p, s)| (0..k).fold(int(s), |acc, j| acc * &vectors[j][cols[p[j]]]))
        .fold(Rational::zero(), |a, b| a + b)
}

// ---- random instances (seeded `rand` RNGs, used by the acceptance suite) ----

pub fn random_tensor<R: Rng>(rng: &mut R, n: usize, k: usize, variance: Variance, density: f64) -> AlternatingTensor {
    let mut t = AlternatingTensor::zero(n, k, variance);
    for i in combinations(n, k) {
        if rng.gen_bool(density) {
            t.add_component(i, msk::random::rational(rng));
        }
    }
    t
}

pub fn random_vectors<R: Rng>(rng: &mut R, n: usize, count: usize) -> Vec<Vec<Rational>> {
    (0..count).map(|_| msk::random::vector(rng, n)).collect()
}

pub fn decomposable(vectors: &[Vec<Rational>]) -> AlternatingTensor {
    let n = vectors.first().map_or(0, Vec::len);
    vectors.iter().fold(AlternatingTensor::scalar(n, int(1), Variance::Contravariant), |acc, v| {
        msk::exterior::wedge(&acc, &AlternatingTensor::from_vector(v, Variance::Contravariant)).unwrap()
    })
}

// ---- proptest strategies ----

pub fn rational() -> impl Strategy<Value = Rational> {
    (-4i64..=4, 1i64..=3).prop_map(|(a, b)| ratio(a, b))
}

/// A tensor on `n` coordinates of degree `k` with random (possibly zero) components.
pub fn tensor(n: usize, k: usize, variance: Variance) -> impl Strategy<Value = AlternatingTensor> {
    let count = combinations(n, k).len();
    prop::collection::vec(prop_oneof![2 => Just(Rational::zero()), 3 => rational()], count).prop_map(move |coeffs| {
        let mut t = AlternatingTensor::zero(n, k, variance);
        for (i, c) in combinations(n, k).into_iter().zip(coeffs) {
            t.add_component(i, c);
        }
        t
    })
}

pub fn vectors(n: usize, count: usize) -> impl Strategy<Value = Vec<Vec<Rational>>> {
    prop::collection::vec(prop::collection::vec(rational(), n), count)
}
