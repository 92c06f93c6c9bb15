//! Seeded random instances for property checks.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::multi_index::{combinations, MultiIndex};
use crate::poly::{monomials_up_to, Chart, DifferentialForm, MultiVectorField, PolyMap, Polynomial};
use crate::scalar::{ratio, Rational};

/// A small nonzero-biased rational `a/b` with `|a| ≤ 4`, `1 ≤ b ≤ 3`.
pub fn rational<R: Rng>(rng: &mut R) -> Rational {
    ratio(rng.gen_range(-4..=4), rng.gen_range(1..=3))
}

pub fn nonzero_rational<R: Rng>(rng: &mut R) -> Rational {
    loop {
        let r = rational(rng);
        if !num::Zero::is_zero(&r) {
            return r;
        }
    }
}

pub fn vector<R: Rng>(rng: &mut R, n: usize) -> Vec<Rational> {
    (0..n).map(|_| rational(rng)).collect()
}

/// At most `max_terms` terms of total degree at most `max_degree`.
pub fn polynomial<R: Rng>(rng: &mut R, nvars: usize, max_degree: u32, max_terms: usize) -> Polynomial {
    let monomials = monomials_up_to(nvars, max_degree);
    let mut p = Polynomial::zero(nvars);
    for _ in 0..rng.gen_range(0..=max_terms) {
        let m = monomials.choose(rng).expect("at least the constant monomial").clone();
        p.add_term(m, nonzero_rational(rng));
    }
    p
}

fn components<R: Rng>(rng: &mut R, n: usize, degree: usize, max_degree: u32) -> Vec<(MultiIndex, Polynomial)> {
    let indices = combinations(n, degree);
    let count = rng.gen_range(1..=indices.len().clamp(1, 4));
    indices.choose_multiple(rng, count).map(|i| (*i, polynomial(rng, n, max_degree, 3))).collect()
}

pub fn form<R: Rng>(rng: &mut R, chart: &Arc<Chart>, degree: usize, max_degree: u32) -> DifferentialForm {
    let comps = components(rng, chart.dim(), degree, max_degree);
    DifferentialForm::from_components(chart.clone(), degree, comps).expect("valid components")
}

pub fn multivector_field<R: Rng>(rng: &mut R, chart: &Arc<Chart>, degree: usize, max_degree: u32) -> MultiVectorField {
    let comps = components(rng, chart.dim(), degree, max_degree);
    MultiVectorField::from_components(chart.clone(), degree, comps).expect("valid components")
}

/// A polynomial self-map of `chart`.
pub fn self_map<R: Rng>(rng: &mut R, chart: &Arc<Chart>, max_degree: u32) -> PolyMap {
    let n = chart.dim();
    let comps = (0..n).map(|_| polynomial(rng, n, max_degree, 2)).collect();
    PolyMap::new(chart.clone(), chart.clone(), comps).expect("valid map")
}

/// Chart `x1, …, xn`.
pub fn chart(n: usize) -> Arc<Chart> {
    Chart::new((1..=n).map(|i| format!("x{i}"))).expect("valid names")
}
