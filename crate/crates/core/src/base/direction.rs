use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{dim, param, Result};

use super::norm::{check_exponent, holder_conjugate};
use super::pairs::num_pairs;
use super::seed::RngSeed;

/// How a Gaussian draw is scaled into a slicing direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DirectionMode {
    /// Scaled onto the boundary of the dual unit ball `N^{1/p} ‖θ‖_q = 1`, so
    /// that projection is 1-Lipschitz for the pair-averaged ℓp norm.
    Dual,
    /// Unit Euclidean norm.
    Euclidean,
}

impl DirectionMode {
    pub fn name(self) -> &'static str {
        match self {
            DirectionMode::Dual => "dual",
            DirectionMode::Euclidean => "euclidean",
        }
    }
}

impl std::str::FromStr for DirectionMode {
    type Err = crate::DmwError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dual" => Ok(DirectionMode::Dual),
            "euclidean" => Ok(DirectionMode::Euclidean),
            other => Err(param(format!("unknown direction mode {other:?}"))),
        }
    }
}

/// A linear functional on order-`n` distance vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct SlicingDirection {
    order: usize,
    p: f64,
    mode: DirectionMode,
    theta: Vec<f64>,
}

/// `N^{1/p} ‖θ‖_q`, the dual of the pair-averaged ℓp norm.
pub(crate) fn dual_norm(theta: &[f64], p: f64) -> f64 {
    let n = theta.len() as f64;
    let q = holder_conjugate(p);
    let lq = if q.is_infinite() {
        theta.iter().fold(0.0f64, |m, t| m.max(t.abs()))
    } else {
        theta.iter().map(|t| t.abs().powf(q)).sum::<f64>().powf(1.0 / q)
    };
    n.powf(1.0 / p) * lq
}

fn euclidean_norm(theta: &[f64]) -> f64 {
    theta.iter().map(|t| t * t).sum::<f64>().sqrt()
}

impl SlicingDirection {
    /// Draws a direction: a standard Gaussian vector scaled by the norm that
    /// `mode` selects.
    pub fn sample<R: Rng + ?Sized>(order: usize, p: f64, mode: DirectionMode, rng: &mut R) -> Result<Self> {
        check_exponent(p)?;
        if order < 2 {
            return Err(param(format!("tuple order must be at least 2, got {order}")));
        }
        let len = num_pairs(order);
        loop {
            let mut theta: Vec<f64> = (0..len).map(|_| rng.sample(StandardNormal)).collect();
            let scale = match mode {
                DirectionMode::Dual => dual_norm(&theta, p),
                DirectionMode::Euclidean => euclidean_norm(&theta),
            };
            if scale > 0.0 {
                theta.iter_mut().for_each(|t| *t /= scale);
                return Ok(Self { order, p, mode, theta });
            }
        }
    }

    /// Wraps an explicit vector, checking it lies in the admissible set for `mode`.
    pub fn from_vec(order: usize, p: f64, mode: DirectionMode, theta: Vec<f64>) -> Result<Self> {
        check_exponent(p)?;
        if theta.len() != num_pairs(order) {
            return Err(dim(format!("direction for order {order} needs {} entries, got {}", num_pairs(order), theta.len())));
        }
        let ok = match mode {
            DirectionMode::Dual => dual_norm(&theta, p) <= 1.0 + 1e-12,
            DirectionMode::Euclidean => (euclidean_norm(&theta) - 1.0).abs() <= 1e-12,
        };
        if !ok {
            return Err(param(format!("direction is not normalized for {} mode", mode.name())));
        }
        Ok(Self { order, p, mode, theta })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn mode(&self) -> DirectionMode {
        self.mode
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    /// `⟨θ, a⟩`, accumulated in pair order.
    #[inline]
    pub fn project(&self, entries: &[f64]) -> f64 {
        dot(&self.theta, entries)
    }
}

#[inline]
pub(crate) fn dot(theta: &[f64], entries: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (t, e) in theta.iter().zip(entries) {
        acc += t * e;
    }
    acc
}

/// `L` directions for one order, stored as an `L × N` row-major matrix.
///
/// Direction `ℓ` is drawn from `seed.child(ℓ)`, so the set does not depend on
/// how the draws are scheduled.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionSet {
    order: usize,
    p: f64,
    mode: DirectionMode,
    thetas: Vec<f64>,
}

impl DirectionSet {
    pub fn sample(order: usize, count: usize, p: f64, mode: DirectionMode, seed: RngSeed) -> Result<Self> {
        if count == 0 {
            return Err(param("direction count L must be at least 1"));
        }
        let mut thetas = Vec::with_capacity(count * num_pairs(order));
        for l in 0..count {
            let dir = SlicingDirection::sample(order, p, mode, &mut seed.child(l as u64).rng())?;
            thetas.extend_from_slice(dir.theta());
        }
        Ok(Self { order, p, mode, thetas })
    }

    pub fn from_directions(directions: &[SlicingDirection]) -> Result<Self> {
        let first = directions.first().ok_or_else(|| param("a direction set needs at least one direction"))?;
        let mut thetas = Vec::with_capacity(directions.len() * first.theta.len());
        for d in directions {
            if d.order != first.order || d.mode != first.mode || d.p != first.p {
                return Err(dim("directions in a set must share order, exponent and mode"));
            }
            thetas.extend_from_slice(&d.theta);
        }
        Ok(Self { order: first.order, p: first.p, mode: first.mode, thetas })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn mode(&self) -> DirectionMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.thetas.len() / num_pairs(self.order)
    }

    pub fn is_empty(&self) -> bool {
        self.thetas.is_empty()
    }

    pub fn theta(&self, l: usize) -> &[f64] {
        let w = num_pairs(self.order);
        &self.thetas[l * w..(l + 1) * w]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.thetas.chunks_exact(num_pairs(self.order))
    }

    pub fn direction(&self, l: usize) -> SlicingDirection {
        SlicingDirection { order: self.order, p: self.p, mode: self.mode, theta: self.theta(l).to_vec() }
    }
}
