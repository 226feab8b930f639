//! Central finite differences on real coordinates and their Wirtinger
//! combinations.
//!
//! A complex coordinate `ξ_i` occupies real slots `2i` (real part) and
//! `2i + 1` (imaginary part). Wirtinger derivatives are assembled from real
//! partials with `∂_i = (∂_x - i ∂_y) / 2` and `∂_ī = (∂_x + i ∂_y) / 2`.
//!
//! Higher mixed partials use tensor products of a central first-derivative
//! stencil. Real derivative tensors are computed once per sorted multi-index,
//! so e.g. the Hessian is exactly symmetric.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::par::Execution;

const STENCIL_2: [(i32, f64); 2] = [(-1, -0.5), (1, 0.5)];
const STENCIL_4: [(i32, f64); 4] = [
    (-2, 1.0 / 12.0),
    (-1, -8.0 / 12.0),
    (1, 8.0 / 12.0),
    (2, -1.0 / 12.0),
];
const STENCIL_6: [(i32, f64); 6] = [
    (-3, -1.0 / 60.0),
    (-2, 9.0 / 60.0),
    (-1, -45.0 / 60.0),
    (1, 45.0 / 60.0),
    (2, -9.0 / 60.0),
    (3, 1.0 / 60.0),
];

/// Step size and accuracy order of a central first-derivative stencil.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdScheme {
    pub step: f64,
    pub order: usize,
}

impl FdScheme {
    pub fn new(step: f64, order: usize) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::InvalidInput(format!("finite-difference step must be positive, got {step}")));
        }
        if !matches!(order, 2 | 4 | 6) {
            return Err(Error::InvalidInput(format!("stencil order must be 2, 4 or 6, got {order}")));
        }
        Ok(Self { step, order })
    }

    pub fn stencil(&self) -> &'static [(i32, f64)] {
        match self.order {
            2 => &STENCIL_2,
            4 => &STENCIL_4,
            _ => &STENCIL_6,
        }
    }

    /// Largest offset (in steps) of one first-derivative stencil.
    pub fn half_width(&self) -> usize {
        self.order / 2
    }

    /// Largest displacement of a complex coordinate when `rank` nested
    /// derivatives all act on it.
    pub fn reach(&self, rank: usize) -> f64 {
        (rank * self.half_width()) as f64 * self.step * std::f64::consts::SQRT_2
    }
}

/// Values that can be linearly combined by a stencil.
pub trait FdValue: Clone {
    fn zero_like(&self) -> Self;
    fn add_scaled(&mut self, weight: f64, other: &Self);
}

impl FdValue for f64 {
    fn zero_like(&self) -> Self {
        0.0
    }
    fn add_scaled(&mut self, weight: f64, other: &Self) {
        *self += weight * other;
    }
}

impl FdValue for Complex64 {
    fn zero_like(&self) -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn add_scaled(&mut self, weight: f64, other: &Self) {
        *self += other * weight;
    }
}

impl FdValue for Vec<Complex64> {
    fn zero_like(&self) -> Self {
        vec![Complex64::new(0.0, 0.0); self.len()]
    }
    fn add_scaled(&mut self, weight: f64, other: &Self) {
        for (a, b) in self.iter_mut().zip(other) {
            *a += b * weight;
        }
    }
}

/// Mixed real partial `∂_{dirs[0]} ⋯ ∂_{dirs[k-1]} f(x)`.
pub fn mixed_partial<T, F>(f: &F, x: &[f64], dirs: &[usize], scheme: &FdScheme) -> T
where
    T: FdValue,
    F: Fn(&[f64]) -> T,
{
    let stencil = scheme.stencil();
    let k = dirs.len();
    if k == 0 {
        return f(x);
    }
    let mut counters = vec![0usize; k];
    let mut point = x.to_vec();
    let mut acc: Option<T> = None;
    loop {
        point.copy_from_slice(x);
        let mut weight = 1.0;
        for (slot, &dir) in counters.iter().zip(dirs) {
            let (offset, w) = stencil[*slot];
            point[dir] += offset as f64 * scheme.step;
            weight *= w;
        }
        let value = f(&point);
        match acc.as_mut() {
            Some(a) => a.add_scaled(weight, &value),
            None => {
                let mut a = value.zero_like();
                a.add_scaled(weight, &value);
                acc = Some(a);
            }
        }
        // odometer
        let mut pos = 0;
        loop {
            counters[pos] += 1;
            if counters[pos] < stencil.len() {
                break;
            }
            counters[pos] = 0;
            pos += 1;
            if pos == k {
                let sum = acc.expect("stencil has at least one point");
                let mut out = sum.zero_like();
                out.add_scaled(scheme.step.powi(-(k as i32)), &sum);
                return out;
            }
        }
    }
}

/// Fully symmetric real derivative tensor of a scalar function.
#[derive(Debug, Clone)]
pub struct SymmetricTensor {
    pub dim: usize,
    pub rank: usize,
    values: HashMap<Vec<usize>, f64>,
}

impl SymmetricTensor {
    pub fn get(&self, dirs: &[usize]) -> f64 {
        let mut key = dirs.to_vec();
        key.sort_unstable();
        self.values[&key]
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.values().copied()
    }
}

fn sorted_multi_indices(dim: usize, rank: usize) -> Vec<Vec<usize>> {
    fn rec(dim: usize, rank: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == rank {
            out.push(cur.clone());
            return;
        }
        for i in start..dim {
            cur.push(i);
            rec(dim, rank, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(dim, rank, 0, &mut Vec::with_capacity(rank), &mut out);
    out
}

/// All real partial derivatives of order `rank` of `f` at `x`.
pub fn real_derivatives<F>(f: &F, x: &[f64], rank: usize, scheme: &FdScheme, exec: Execution) -> SymmetricTensor
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let keys = sorted_multi_indices(x.len(), rank);
    let vals = exec.map(&keys, |key| mixed_partial(f, x, key, scheme));
    SymmetricTensor {
        dim: x.len(),
        rank,
        values: keys.into_iter().zip(vals).collect(),
    }
}

/// Wirtinger derivative of a real function from its real derivative tensor.
///
/// `idx` lists `(complex coordinate, conjugated)` pairs; its length must
/// equal the tensor rank.
pub fn wirtinger(t: &SymmetricTensor, idx: &[(usize, bool)]) -> Complex64 {
    assert_eq!(idx.len(), t.rank, "Wirtinger order must match tensor rank");
    let k = idx.len();
    let mut total = Complex64::new(0.0, 0.0);
    let mut dirs = vec![0usize; k];
    for mask in 0..(1usize << k) {
        let mut coef = Complex64::new(0.5f64.powi(k as i32), 0.0);
        for (bit, &(coord, conj)) in idx.iter().enumerate() {
            if mask >> bit & 1 == 0 {
                dirs[bit] = 2 * coord;
            } else {
                dirs[bit] = 2 * coord + 1;
                coef *= if conj { Complex64::i() } else { -Complex64::i() };
            }
        }
        total += coef * t.get(&dirs);
    }
    total
}

/// First-order Wirtinger derivative `∂_i f` (or `∂_ī f`) of a vector-valued
/// function.
pub fn wirtinger_first<F>(f: &F, x: &[f64], coord: usize, conj: bool, scheme: &FdScheme) -> Vec<Complex64>
where
    F: Fn(&[f64]) -> Vec<Complex64>,
{
    let dx: Vec<Complex64> = mixed_partial(f, x, &[2 * coord], scheme);
    let dy: Vec<Complex64> = mixed_partial(f, x, &[2 * coord + 1], scheme);
    let s = if conj { Complex64::i() } else { -Complex64::i() };
    dx.iter().zip(&dy).map(|(a, b)| (a + s * b) * 0.5).collect()
}

/// Mixed second Wirtinger derivative of a complex-valued function.
pub fn wirtinger_second_complex<F>(f: &F, x: &[f64], a: (usize, bool), b: (usize, bool), scheme: &FdScheme) -> Complex64
where
    F: Fn(&[f64]) -> Complex64,
{
    let mut total = Complex64::new(0.0, 0.0);
    for ma in 0..2 {
        for mb in 0..2 {
            let mut coef = Complex64::new(0.25, 0.0);
            let da = 2 * a.0 + ma;
            let db = 2 * b.0 + mb;
            if ma == 1 {
                coef *= if a.1 { Complex64::i() } else { -Complex64::i() };
            }
            if mb == 1 {
                coef *= if b.1 { Complex64::i() } else { -Complex64::i() };
            }
            let mut dirs = [da, db];
            dirs.sort_unstable();
            let p: Complex64 = mixed_partial(f, x, &dirs, scheme);
            total += coef * p;
        }
    }
    total
}
