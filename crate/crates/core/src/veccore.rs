//! Dense real-vector primitives shared by every selection routine.
//!
//! Functions take plain `&[f64]` slices so they work on [`Vector`] through
//! deref as well as on scratch buffers in hot loops.

use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A non-empty vector of finite `f64` components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::EmptyInput);
        }
        if let Some(index) = components.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Vector(components))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Multiplies every component by `c`.
    pub fn scaled(&self, c: f64) -> Result<Vector> {
        Vector::new(self.0.iter().map(|x| x * c).collect())
    }
}

impl Deref for Vector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl AsRef<[f64]> for Vector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for Vector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Vector::new(v)
    }
}

impl From<Vector> for Vec<f64> {
    fn from(v: Vector) -> Self {
        v.0
    }
}

/// Exact two-dimensional integer vector, as produced by the subset-sum
/// reduction (`[t_i, 1]` candidates and the `[t, k]` query).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntVector(pub [i128; 2]);

impl IntVector {
    pub const ZERO: IntVector = IntVector([0, 0]);

    pub fn new(x: i128, y: i128) -> Self {
        IntVector([x, y])
    }

    pub fn x(&self) -> i128 {
        self.0[0]
    }

    pub fn y(&self) -> i128 {
        self.0[1]
    }

    pub fn is_zero(&self) -> bool {
        self.0 == [0, 0]
    }

    /// Componentwise sum; `None` on `i128` overflow.
    pub fn checked_add(&self, other: &IntVector) -> Option<IntVector> {
        Some(IntVector([
            self.0[0].checked_add(other.0[0])?,
            self.0[1].checked_add(other.0[1])?,
        ]))
    }

    pub fn to_vector(&self) -> Result<Vector> {
        Vector::new(vec![self.0[0] as f64, self.0[1] as f64])
    }
}

impl std::fmt::Display for IntVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {}]", self.0[0], self.0[1])
    }
}

fn check_dims(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(())
}

pub fn dot(a: &[f64], b: &[f64]) -> Result<f64> {
    check_dims(a, b)?;
    Ok(dot_unchecked(a, b))
}

pub fn norm(a: &[f64]) -> f64 {
    dot_unchecked(a, a).sqrt()
}

/// Cosine similarity clamped to `[-1, 1]`.
pub fn cosine(a: &[f64], b: &[f64]) -> Result<f64> {
    check_dims(a, b)?;
    let na = norm(a);
    let nb = norm(b);
    if na == 0.0 || nb == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok(clamp_unit(dot_unchecked(a, b) / (na * nb)))
}

/// Left-to-right componentwise sum.
pub fn sum_vectors<'a, I>(vs: I) -> Result<Vector>
where
    I: IntoIterator<Item = &'a [f64]>,
{
    let mut iter = vs.into_iter();
    let first = iter.next().ok_or(Error::EmptyInput)?;
    let mut acc = first.to_vec();
    for v in iter {
        check_dims(&acc, v)?;
        add_assign(&mut acc, v);
    }
    Vector::new(acc)
}

pub fn normalize(a: &[f64]) -> Result<Vector> {
    let n = norm(a);
    if n == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Vector::new(a.iter().map(|x| x / n).collect())
}

#[inline]
pub(crate) fn dot_unchecked(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn add_assign(acc: &mut [f64], v: &[f64]) {
    for (a, x) in acc.iter_mut().zip(v) {
        *a += x;
    }
}

#[inline]
pub(crate) fn clamp_unit(x: f64) -> f64 {
    x.clamp(-1.0, 1.0)
}

/// Cosine between `s + v` and a query whose norm is already known, without
/// materialising the sum. Performs the same floating-point operations in the
/// same order as `cosine(&(s + v), q)`; returns `None` when `s + v` is zero.
#[inline]
pub(crate) fn cosine_of_sum(s: &[f64], v: &[f64], q: &[f64], q_norm: f64) -> Option<f64> {
    let mut num = 0.0;
    let mut sq = 0.0;
    // Two separate reductions keep the accumulation order identical to
    // dot() followed by norm().
    for ((a, b), c) in s.iter().zip(v).zip(q) {
        num += (a + b) * c;
    }
    for (a, b) in s.iter().zip(v) {
        let t = a + b;
        sq += t * t;
    }
    let n = sq.sqrt();
    if n == 0.0 {
        None
    } else {
        Some(clamp_unit(num / (n * q_norm)))
    }
}
