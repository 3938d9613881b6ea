//! Hyperplane layout algebra.
//!
//! A k-dimensional array layout is described by an ordered set of k−1 hyperplane
//! vectors. Two elements sit on the same storage line iff every hyperplane vector
//! gives them the same dot product. [`complete_linearization`] turns such a
//! description into a concrete, injective address function by appending one more
//! row that makes the transform unimodular.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::intmat;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LayoutError {
    #[error("hyperplane vector must have at least one nonzero coefficient")]
    ZeroVector,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionError { expected: usize, found: usize },
    #[error("layout rows are linearly dependent")]
    DependentRows,
    #[error("a layout with {rows} rows needs rows of length {expected}, found {found}")]
    RowLength {
        rows: usize,
        expected: usize,
        found: usize,
    },
    #[error("layout rows do not span a primitive sublattice, so no unimodular completion exists")]
    NotCompletable,
    #[error("hyperplane vector {0:?} is not canonical")]
    NotCanonical(Vec<i64>),
    #[error("extent must be positive")]
    ZeroExtent,
    #[error("point {point:?} lies outside the index box {extents:?}")]
    OutOfBox { point: Vec<i64>, extents: Vec<u64> },
}

/// Primitive integer hyperplane coefficients with a positive leading entry.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct HyperplaneVector(Vec<i64>);

impl HyperplaneVector {
    /// Wraps an already-canonical vector, rejecting anything else.
    pub fn new(coefficients: Vec<i64>) -> Result<Self, LayoutError> {
        let canon = canonicalize(&coefficients)?;
        if canon.0 != coefficients {
            return Err(LayoutError::NotCanonical(coefficients));
        }
        Ok(canon)
    }

    pub fn coefficients(&self) -> &[i64] {
        &self.0
    }

    pub fn dims(&self) -> usize {
        self.0.len()
    }

    pub fn dot(&self, point: &[i64]) -> i64 {
        intmat::dot(&self.0, point)
    }
}

impl TryFrom<Vec<i64>> for HyperplaneVector {
    type Error = LayoutError;

    /// Deserialization canonicalizes, so `[-2, 2]` reads as `[1, -1]`.
    fn try_from(v: Vec<i64>) -> Result<Self, Self::Error> {
        canonicalize(&v)
    }
}

impl From<HyperplaneVector> for Vec<i64> {
    fn from(v: HyperplaneVector) -> Self {
        v.0
    }
}

impl fmt::Display for HyperplaneVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Reduces `v` to the primitive representative of its hyperplane family.
pub fn canonicalize(v: &[i64]) -> Result<HyperplaneVector, LayoutError> {
    let g = v.iter().fold(0, |g, &x| intmat::gcd(g, x));
    if g == 0 {
        return Err(LayoutError::ZeroVector);
    }
    let lead = v.iter().copied().find(|&x| x != 0).unwrap_or(1);
    let sign = lead.signum();
    Ok(HyperplaneVector(v.iter().map(|&x| sign * x / g).collect()))
}

/// Ordered hyperplane vectors for one array; the first row is the slowest-varying
/// storage direction. A k-D array has exactly k−1 rows, so the dimensionality is
/// implied by the row count (an empty matrix is the 1-D layout).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<HyperplaneVector>", into = "Vec<HyperplaneVector>")]
pub struct LayoutMatrix {
    rows: Vec<HyperplaneVector>,
}

impl LayoutMatrix {
    pub fn new(rows: Vec<HyperplaneVector>) -> Result<Self, LayoutError> {
        let dims = rows.len() + 1;
        for r in &rows {
            if r.dims() != dims {
                return Err(LayoutError::RowLength {
                    rows: rows.len(),
                    expected: dims,
                    found: r.dims(),
                });
            }
        }
        let raw: Vec<Vec<i64>> = rows.iter().map(|r| r.0.clone()).collect();
        if intmat::rank(&raw) != rows.len() {
            return Err(LayoutError::DependentRows);
        }
        let lm = LayoutMatrix { rows };
        if lm.completion_row().is_none() {
            return Err(LayoutError::NotCompletable);
        }
        Ok(lm)
    }

    /// Builds a layout from raw integer rows, canonicalizing each one.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self, LayoutError> {
        let rows = rows
            .iter()
            .map(|r| canonicalize(r.as_ref()))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(rows)
    }

    /// Conventional row-major layout: rows e_0, …, e_{k−2}.
    pub fn row_major(dims: usize) -> Self {
        assert!(dims >= 1);
        let rows = (0..dims - 1)
            .map(|i| HyperplaneVector((0..dims).map(|j| i64::from(i == j)).collect()))
            .collect();
        LayoutMatrix { rows }
    }

    /// Column-major layout: rows e_{k−1}, …, e_1.
    pub fn column_major(dims: usize) -> Self {
        assert!(dims >= 1);
        let rows = (1..dims)
            .rev()
            .map(|i| HyperplaneVector((0..dims).map(|j| i64::from(i == j)).collect()))
            .collect();
        LayoutMatrix { rows }
    }

    pub fn rows(&self) -> &[HyperplaneVector] {
        &self.rows
    }

    pub fn dims(&self) -> usize {
        self.rows.len() + 1
    }

    pub fn is_trivial(&self) -> bool {
        self.rows.is_empty()
    }

    /// True iff every row annihilates `delta`, i.e. stepping by `delta` stays on
    /// the same storage line.
    pub fn annihilates(&self, delta: &[i64]) -> bool {
        self.rows.iter().all(|r| r.dot(delta) == 0)
    }

    fn raw_rows(&self) -> Vec<Vec<i64>> {
        self.rows.iter().map(|r| r.0.clone()).collect()
    }

    /// Row that completes the layout to a unimodular k×k transform.
    ///
    /// Unit vectors are tried first, starting with the non-pivot column of the
    /// echelon form, then the remaining columns in ascending order. Otherwise an
    /// extended-gcd column reduction produces the row.
    fn completion_row(&self) -> Option<Vec<i64>> {
        let k = self.dims();
        let rows = self.raw_rows();
        let unit = |j: usize| -> Vec<i64> { (0..k).map(|c| i64::from(c == j)).collect() };
        let (_, pivots) = intmat::rank_and_pivots(&rows);
        let free = (0..k).filter(|c| !pivots.contains(c));
        let rest = (0..k).filter(|c| pivots.contains(c));
        for j in free.chain(rest) {
            let mut m = rows.clone();
            m.push(unit(j));
            if intmat::det(&m).abs() == 1 {
                return Some(unit(j));
            }
        }
        let (reduced, _, u_inv, r) = intmat::column_reduce(&rows, k);
        if r != k - 1 {
            return None;
        }
        let leading: Vec<Vec<i64>> = reduced.iter().map(|row| row[..k - 1].to_vec()).collect();
        if intmat::det(&leading).abs() != 1 {
            return None;
        }
        Some(u_inv[k - 1].clone())
    }
}

impl TryFrom<Vec<HyperplaneVector>> for LayoutMatrix {
    type Error = LayoutError;

    fn try_from(rows: Vec<HyperplaneVector>) -> Result<Self, Self::Error> {
        LayoutMatrix::new(rows)
    }
}

impl From<LayoutMatrix> for Vec<HyperplaneVector> {
    fn from(m: LayoutMatrix) -> Self {
        m.rows
    }
}

impl fmt::Display for LayoutMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rows.is_empty() {
            return write!(f, "trivial");
        }
        write!(f, "[")?;
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, "]")
    }
}

/// True iff `d1` and `d2` lie on the same storage line under `layout`.
pub fn same_hyperplane(layout: &LayoutMatrix, d1: &[i64], d2: &[i64]) -> Result<bool, LayoutError> {
    let k = layout.dims();
    for d in [d1, d2] {
        if d.len() != k {
            return Err(LayoutError::DimensionError {
                expected: k,
                found: d.len(),
            });
        }
    }
    Ok(layout.rows.iter().all(|r| r.dot(d1) == r.dot(d2)))
}

/// Concrete address function derived from a layout.
///
/// `address(d)` is the row-major position of `transform·d − origin_offset`
/// inside the transformed bounding box `extents`, scaled by `element_size`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearizationMap {
    transform: Vec<Vec<i64>>,
    origin_offset: Vec<i64>,
    extents: Vec<u64>,
    index_extents: Vec<u64>,
    strides: Vec<u64>,
    element_size: u64,
}

impl LinearizationMap {
    pub fn transform(&self) -> &[Vec<i64>] {
        &self.transform
    }

    pub fn origin_offset(&self) -> &[i64] {
        &self.origin_offset
    }

    /// Sizes of the transformed bounding box.
    pub fn extents(&self) -> &[u64] {
        &self.extents
    }

    pub fn element_size(&self) -> u64 {
        self.element_size
    }

    /// Bytes spanned by the transformed bounding box.
    pub fn footprint(&self) -> u64 {
        self.extents.iter().product::<u64>() * self.element_size
    }

    pub fn address(&self, point: &[i64]) -> Result<u64, LayoutError> {
        if point.len() != self.index_extents.len() {
            return Err(LayoutError::DimensionError {
                expected: self.index_extents.len(),
                found: point.len(),
            });
        }
        let inside = point
            .iter()
            .zip(&self.index_extents)
            .all(|(&p, &e)| p >= 0 && (p as u64) < e);
        if !inside {
            return Err(LayoutError::OutOfBox {
                point: point.to_vec(),
                extents: self.index_extents.clone(),
            });
        }
        Ok(self.address_unchecked(point))
    }

    /// Address of a point already known to lie inside the index box.
    pub fn address_unchecked(&self, point: &[i64]) -> u64 {
        let mut offset = 0u64;
        for ((row, &o), &s) in self.transform.iter().zip(&self.origin_offset).zip(&self.strides) {
            let t = intmat::dot(row, point) - o;
            debug_assert!(t >= 0);
            offset += t as u64 * s;
        }
        offset * self.element_size
    }
}

/// Extends `layout` to a unimodular transform and fixes the bounding-box
/// placement for an array with the given index extents.
pub fn complete_linearization(
    layout: &LayoutMatrix,
    extents: &[u64],
    element_size: u64,
) -> Result<LinearizationMap, LayoutError> {
    let k = layout.dims();
    if extents.len() != k {
        return Err(LayoutError::DimensionError {
            expected: k,
            found: extents.len(),
        });
    }
    if extents.contains(&0) {
        return Err(LayoutError::ZeroExtent);
    }
    let mut transform = layout.raw_rows();
    transform.push(layout.completion_row().ok_or(LayoutError::NotCompletable)?);

    let mut origin_offset = Vec::with_capacity(k);
    let mut box_extents = Vec::with_capacity(k);
    for row in &transform {
        let (mut lo, mut hi) = (0i64, 0i64);
        for (&c, &e) in row.iter().zip(extents) {
            let far = c * (e as i64 - 1);
            lo += far.min(0);
            hi += far.max(0);
        }
        origin_offset.push(lo);
        box_extents.push((hi - lo + 1) as u64);
    }
    let mut strides = vec![1u64; k];
    for i in (0..k.saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * box_extents[i + 1];
    }
    Ok(LinearizationMap {
        transform,
        origin_offset,
        extents: box_extents,
        index_extents: extents.to_vec(),
        strides,
        element_size,
    })
}
