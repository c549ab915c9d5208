use std::cmp::Ordering;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::base::{num_pairs, DistanceVector, RngSeed};
use crate::error::{dim, param, Result};
use crate::spaces::MetricMeasureSpace;

/// Largest number of ordered tuples `m^n` that exact enumeration will visit.
pub const ENUMERATION_BUDGET: u64 = 1_000_000;

/// Where a matrix law came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LawKind {
    /// `tuples` i.i.d. draws from the space's measure.
    Sampled { tuples: usize, seed: RngSeed },
    /// The exact law, by exhausting all ordered tuples.
    Enumerated,
    /// Built directly from atoms and weights.
    Explicit,
}

/// A finitely supported law on order-`n` distance vectors: `K` atoms stored
/// as a row-major `K × N_n` matrix, with a probability weight per atom.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixLaw {
    order: usize,
    atoms: Vec<f64>,
    weights: Vec<f64>,
    uniform: bool,
    kind: LawKind,
}

impl MatrixLaw {
    pub fn new(order: usize, atoms: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if order < 2 {
            return Err(param(format!("tuple order must be at least 2, got {order}")));
        }
        let width = num_pairs(order);
        if weights.is_empty() || atoms.len() != width * weights.len() {
            return Err(dim(format!(
                "{} weights need {} atom entries for order {order}, got {}",
                weights.len(),
                width * weights.len(),
                atoms.len()
            )));
        }
        if atoms.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(param("atom entries must be finite and nonnegative"));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(param("atom weights must be finite and nonnegative"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(param(format!("atom weights sum to {total}, not 1")));
        }
        Ok(Self { order, atoms, weights, uniform: false, kind: LawKind::Explicit })
    }

    /// Uniform weights `1/K` over the given distance vectors.
    pub fn from_vectors(vectors: &[DistanceVector]) -> Result<Self> {
        let first = vectors.first().ok_or_else(|| param("a matrix law needs at least one atom"))?;
        let order = first.order();
        if vectors.iter().any(|v| v.order() != order) {
            return Err(dim("all atoms of a matrix law must share one order"));
        }
        let k = vectors.len();
        let atoms = vectors.iter().flat_map(|v| v.entries().iter().copied()).collect();
        Ok(Self { order, atoms, weights: vec![1.0 / k as f64; k], uniform: true, kind: LawKind::Explicit })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn width(&self) -> usize {
        num_pairs(self.order)
    }

    pub fn atom(&self, k: usize) -> &[f64] {
        let w = self.width();
        &self.atoms[k * w..(k + 1) * w]
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// True when every atom carries weight exactly `1/K` by construction.
    pub fn is_uniform(&self) -> bool {
        self.uniform
    }

    pub fn kind(&self) -> LawKind {
        self.kind
    }

    /// The same law with duplicate atoms merged (weights summed) and atoms in
    /// lexicographic order. Zero-weight atoms are dropped.
    pub fn compressed(&self) -> Self {
        let w = self.width();
        let mut idx: Vec<usize> = (0..self.len()).filter(|&k| self.weights[k] > 0.0).collect();
        idx.sort_by(|&a, &b| lex_cmp(self.atom(a), self.atom(b)));
        let mut atoms: Vec<f64> = Vec::with_capacity(idx.len() * w);
        let mut weights: Vec<f64> = Vec::with_capacity(idx.len());
        for k in idx {
            let atom = self.atom(k);
            let last = weights.len();
            if last > 0 && lex_cmp(&atoms[(last - 1) * w..], atom) == Ordering::Equal {
                weights[last - 1] += self.weights[k];
            } else {
                atoms.extend_from_slice(atom);
                weights.push(self.weights[k]);
            }
        }
        let uniform = self.uniform && weights.len() == self.len();
        Self { order: self.order, atoms, weights, uniform, kind: self.kind }
    }

    /// Pushforward under the coordinate projection keeping the distances among
    /// the first `k` tuple positions, compressed.
    pub fn project_to(&self, k: usize) -> Result<Self> {
        if k < 2 || k > self.order {
            return Err(param(format!("cannot project order {} to order {k}", self.order)));
        }
        let n = self.order;
        let keep: Vec<usize> = (0..k).flat_map(|i| (i + 1..k).map(move |j| crate::base::offset_unchecked(i, j, n))).collect();
        let atoms = (0..self.len()).flat_map(|a| keep.iter().map(move |&c| self.atom(a)[c])).collect();
        let projected = Self { order: k, atoms, weights: self.weights.clone(), uniform: self.uniform, kind: self.kind };
        Ok(projected.compressed())
    }

    /// Compares two laws as weighted sets of atoms after compression.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        let (a, b) = (self.compressed(), other.compressed());
        a.order == b.order
            && a.len() == b.len()
            && a.atoms.iter().zip(&b.atoms).all(|(x, y)| (x - y).abs() <= tol)
            && a.weights.iter().zip(&b.weights).all(|(x, y)| (x - y).abs() <= tol)
    }
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(Ordering::Equal)
}

/// Draws points i.i.d. from a space's measure, one tuple at a time.
pub(crate) struct TupleSampler<'a> {
    space: &'a MetricMeasureSpace,
    rng: ChaCha8Rng,
    categorical: Option<WeightedIndex<f64>>,
    tuple: Vec<usize>,
}

impl<'a> TupleSampler<'a> {
    pub(crate) fn new(space: &'a MetricMeasureSpace, order: usize, seed: RngSeed) -> Self {
        let categorical = if space.is_uniform() {
            None
        } else {
            Some(WeightedIndex::new(space.weights()).expect("space weights form a probability vector"))
        };
        Self { space, rng: seed.rng(), categorical, tuple: vec![0; order] }
    }

    /// Writes the distance vector of the next sampled tuple into `out`.
    pub(crate) fn next_into(&mut self, out: &mut [f64]) {
        let m = self.space.size();
        for slot in self.tuple.iter_mut() {
            *slot = match &self.categorical {
                None => self.rng.random_range(0..m),
                Some(dist) => dist.sample(&mut self.rng),
            };
        }
        fill_entries(self.space, &self.tuple, out);
    }
}

#[inline]
fn fill_entries(space: &MetricMeasureSpace, tuple: &[usize], out: &mut [f64]) {
    let mut c = 0;
    for (a, &i) in tuple.iter().enumerate() {
        let row = space.row(i);
        for &j in &tuple[a + 1..] {
            out[c] = row[j];
            c += 1;
        }
    }
}

/// Empirical law of `tuples` i.i.d. ordered `order`-tuples drawn (with
/// replacement) from the space's measure.
pub fn sample_matrix_law(space: &MetricMeasureSpace, order: usize, tuples: usize, seed: RngSeed) -> Result<MatrixLaw> {
    if order < 2 {
        return Err(param(format!("tuple order must be at least 2, got {order}")));
    }
    if tuples == 0 {
        return Err(param("tuple count K must be at least 1"));
    }
    let w = num_pairs(order);
    let mut atoms = vec![0.0; tuples * w];
    let mut sampler = TupleSampler::new(space, order, seed);
    for chunk in atoms.chunks_exact_mut(w) {
        sampler.next_into(chunk);
    }
    Ok(MatrixLaw { order, atoms, weights: vec![1.0 / tuples as f64; tuples], uniform: true, kind: LawKind::Sampled { tuples, seed } })
}

/// The exact distance-matrix law, from all `m^n` ordered tuples weighted by
/// the product measure; duplicate vectors are merged.
pub fn enumerate_matrix_law(space: &MetricMeasureSpace, order: usize) -> Result<MatrixLaw> {
    if order < 2 {
        return Err(param(format!("tuple order must be at least 2, got {order}")));
    }
    let m = space.size();
    let count = (m as u64).checked_pow(order as u32).filter(|&c| c <= ENUMERATION_BUDGET);
    let Some(count) = count else {
        return Err(param(format!("enumerating {m}^{order} tuples exceeds the budget of {ENUMERATION_BUDGET}")));
    };
    let w = num_pairs(order);
    let mut atoms = Vec::with_capacity(count as usize * w);
    let mut weights = Vec::with_capacity(count as usize);
    let mut tuple = vec![0usize; order];
    let mut entries = vec![0.0; w];
    'odometer: loop {
        let weight: f64 = tuple.iter().map(|&i| space.weights()[i]).product();
        if weight > 0.0 {
            fill_entries(space, &tuple, &mut entries);
            atoms.extend_from_slice(&entries);
            weights.push(weight);
        }
        for slot in (0..order).rev() {
            tuple[slot] += 1;
            if tuple[slot] < m {
                continue 'odometer;
            }
            tuple[slot] = 0;
        }
        break;
    }
    let raw = MatrixLaw { order, atoms, weights, uniform: false, kind: LawKind::Enumerated };
    Ok(raw.compressed())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{counterexample_x, counterexample_y, random_euclidean_space};

    fn two_points() -> MetricMeasureSpace {
        MetricMeasureSpace::uniform(vec![0.0, 1.0, 1.0, 0.0], 2).unwrap()
    }

    #[test]
    fn one_point_space_gives_zero_atoms() {
        let s = MetricMeasureSpace::uniform(vec![0.0], 1).unwrap();
        let law = sample_matrix_law(&s, 4, 10, RngSeed(1)).unwrap();
        assert!(law.atoms().iter().all(|&x| x == 0.0));
        assert_eq!(law.len(), 10);
    }

    #[test]
    fn two_point_frequencies_within_binomial_band() {
        let k = 10_000;
        let law = sample_matrix_law(&two_points(), 2, k, RngSeed(2)).unwrap();
        let ones = law.atoms().iter().filter(|&&x| x == 1.0).count() as f64;
        let sigma = (k as f64 * 0.25).sqrt();
        assert!((ones - k as f64 / 2.0).abs() <= 3.0 * sigma, "{ones}");
    }

    #[test]
    fn sampling_is_deterministic() {
        let s = random_euclidean_space(7, 2, RngSeed(3)).unwrap();
        assert_eq!(sample_matrix_law(&s, 4, 50, RngSeed(4)).unwrap(), sample_matrix_law(&s, 4, 50, RngSeed(4)).unwrap());
    }

    #[test]
    fn weighted_sampling_respects_measure() {
        let s = MetricMeasureSpace::new(vec![0.0, 1.0, 1.0, 0.0], vec![0.9, 0.1]).unwrap();
        let k = 20_000;
        let law = sample_matrix_law(&s, 2, k, RngSeed(5)).unwrap();
        let ones = law.atoms().iter().filter(|&&x| x == 1.0).count() as f64;
        // P(d = 1) = 2 · 0.9 · 0.1
        let p = 0.18;
        let sigma = (k as f64 * p * (1.0 - p)).sqrt();
        assert!((ones - k as f64 * p).abs() <= 3.0 * sigma, "{ones}");
    }

    #[test]
    fn enumeration_of_two_points() {
        let law = enumerate_matrix_law(&two_points(), 2).unwrap();
        assert_eq!(law.atoms(), &[0.0, 1.0]);
        assert_eq!(law.weights(), &[0.5, 0.5]);
    }

    #[test]
    fn counterexample_laws_agree_at_order_two() {
        let lx = enumerate_matrix_law(&counterexample_x(), 2).unwrap();
        let ly = enumerate_matrix_law(&counterexample_y(), 2).unwrap();
        assert_eq!(lx.atoms(), &[0.0, 1.0, 2.0]);
        assert_eq!(lx.weights(), &[0.25, 0.5, 0.25]);
        assert!(lx.approx_eq(&ly, 0.0));
        let (x3, y3) = (enumerate_matrix_law(&counterexample_x(), 3).unwrap(), enumerate_matrix_law(&counterexample_y(), 3).unwrap());
        assert!(!x3.approx_eq(&y3, 1e-12));
    }

    #[test]
    fn projection_consistency() {
        for seed in 0..5 {
            let s = random_euclidean_space(4, 2, RngSeed(seed)).unwrap();
            let l2 = enumerate_matrix_law(&s, 2).unwrap();
            let l3 = enumerate_matrix_law(&s, 3).unwrap();
            let l4 = enumerate_matrix_law(&s, 4).unwrap();
            assert!(l3.project_to(2).unwrap().approx_eq(&l2, 1e-12));
            assert!(l4.project_to(3).unwrap().approx_eq(&l3, 1e-12));
            assert!(l4.project_to(2).unwrap().approx_eq(&l2, 1e-12));
        }
        let weighted = MetricMeasureSpace::new(vec![0.0, 1.0, 2.0, 1.0, 0.0, 1.5, 2.0, 1.5, 0.0], vec![0.5, 0.3, 0.2]).unwrap();
        let l2 = enumerate_matrix_law(&weighted, 2).unwrap();
        let l3 = enumerate_matrix_law(&weighted, 3).unwrap();
        assert!(l3.project_to(2).unwrap().approx_eq(&l2, 1e-12));
    }

    #[test]
    fn enumeration_budget() {
        let s = random_euclidean_space(40, 2, RngSeed(0)).unwrap();
        let err = enumerate_matrix_law(&s, 4).unwrap_err();
        assert!(err.to_string().contains("40^4"), "{err}");
    }
}
