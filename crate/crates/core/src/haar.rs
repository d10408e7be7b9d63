//! L²-normalised Haar system on `[0, 1)` and the d-step Haar system on `[0, 1)^d`.
//!
//! Sign convention used throughout the crate: for a dyadic interval `I` with
//! left half `I+` and right half `I-`,
//!
//! ```text
//! h_I = (χ_{I+} - χ_{I-}) / sqrt(|I|)
//! ```
//!
//! so a node with an even index is a "+" child and an odd index is a "-"
//! child. Functions are represented by their averages on the finest dyadic
//! grid, on which analysis and synthesis are exact.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::value::ValueVec;
use crate::Real;

/// Largest depth for which node indices fit comfortably.
pub const MAX_DEPTH: u32 = 62;

/// Dyadic interval `[index 2^-depth, (index+1) 2^-depth)`, or the cube node
/// reached by the same sequence of splits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DyadicNode {
    depth: u32,
    index: u64,
}

impl DyadicNode {
    pub const ROOT: DyadicNode = DyadicNode { depth: 0, index: 0 };

    pub fn new(depth: u32, index: u64) -> Result<Self> {
        if depth > MAX_DEPTH {
            return invalid(format!("depth {depth} exceeds {MAX_DEPTH}"));
        }
        if index >= 1u64 << depth {
            return invalid(format!("index {index} out of range at depth {depth}"));
        }
        Ok(Self { depth, index })
    }

    pub fn depth(self) -> u32 {
        self.depth
    }

    pub fn index(self) -> u64 {
        self.index
    }

    pub fn is_root(self) -> bool {
        self.depth == 0
    }

    /// Left children are "+" children. The root has no sign.
    pub fn is_plus(self) -> bool {
        self.index.is_multiple_of(2)
    }

    pub fn parent(self) -> Option<Self> {
        (self.depth > 0).then(|| Self {
            depth: self.depth - 1,
            index: self.index / 2,
        })
    }

    pub fn sibling(self) -> Option<Self> {
        (self.depth > 0).then_some(Self {
            depth: self.depth,
            index: self.index ^ 1,
        })
    }

    /// `(plus, minus)` = (left, right) children.
    pub fn children(self) -> (Self, Self) {
        let depth = self.depth + 1;
        (
            Self {
                depth,
                index: 2 * self.index,
            },
            Self {
                depth,
                index: 2 * self.index + 1,
            },
        )
    }

    pub fn child(self, plus: bool) -> Self {
        let (p, m) = self.children();
        if plus {
            p
        } else {
            m
        }
    }

    /// Sign toss `s` (0-based) on the path from the root, `true` for "+".
    pub fn toss(self, s: u32) -> bool {
        debug_assert!(s < self.depth);
        (self.index >> (self.depth - 1 - s)) & 1 == 0
    }

    /// Position of `h_node` in the truncated basis `(h¹, h_{I0}, depth 1, ...)`.
    pub fn basis_index(self) -> usize {
        (1usize << self.depth) + self.index as usize
    }

    pub fn from_basis_index(i: usize) -> Option<Self> {
        if i == 0 {
            return None;
        }
        let depth = usize::BITS - 1 - i.leading_zeros();
        Some(Self {
            depth,
            index: (i - (1usize << depth)) as u64,
        })
    }

    pub fn length<T: Real>(self) -> T {
        T::lit(2f64.powi(-(self.depth as i32)))
    }

    pub fn start<T: Real>(self) -> T {
        T::lit(self.index as f64 * 2f64.powi(-(self.depth as i32)))
    }

    pub fn contains<T: Real>(self, x: T) -> bool {
        let a = self.start::<T>();
        x >= a && x < a + self.length::<T>()
    }
}

/// Slice of a node in dimension `d`: the `m` with `|I| = 2^-(l d + m)`.
pub fn slice_of(node: DyadicNode, d: u32) -> u32 {
    assert!(d >= 1, "slicing dimension must be at least 1");
    node.depth % d
}

/// Finite Haar expansion `<f> h¹ + <f, h_{I0}> h_{I0} + Σ <f, h_I> h_I`.
///
/// The two root modes are kept apart from the node map; the node map only
/// stores nonzero entries at depth `1..=depth_limit`.
#[derive(Debug, Clone, PartialEq)]
pub struct HaarCoeffs<T> {
    depth_limit: u32,
    value_dim: usize,
    mean: ValueVec<T>,
    root: ValueVec<T>,
    entries: BTreeMap<DyadicNode, ValueVec<T>>,
}

impl<T: Clone + Zero> HaarCoeffs<T> {
    pub fn zero(depth_limit: u32, value_dim: usize) -> Self {
        Self {
            depth_limit,
            value_dim,
            mean: ValueVec::zeros(value_dim),
            root: ValueVec::zeros(value_dim),
            entries: BTreeMap::new(),
        }
    }

    pub fn from_parts(
        depth_limit: u32,
        mean: ValueVec<T>,
        root: ValueVec<T>,
        entries: impl IntoIterator<Item = (DyadicNode, ValueVec<T>)>,
    ) -> Result<Self> {
        let value_dim = mean.dim();
        if depth_limit > MAX_DEPTH {
            return invalid(format!("depth limit {depth_limit} exceeds {MAX_DEPTH}"));
        }
        if root.dim() != value_dim {
            return Err(Error::DimensionMismatch {
                expected: value_dim,
                got: root.dim(),
            });
        }
        let mut out = Self {
            depth_limit,
            value_dim,
            mean,
            root,
            entries: BTreeMap::new(),
        };
        for (node, v) in entries {
            out = out.with_entry(node, v)?;
        }
        Ok(out)
    }

    /// Returns a copy with the coefficient of `h_node` replaced. Depth 0
    /// addresses the root mode `h_{I0}`.
    pub fn with_entry(mut self, node: DyadicNode, value: ValueVec<T>) -> Result<Self> {
        if value.dim() != self.value_dim {
            return Err(Error::DimensionMismatch {
                expected: self.value_dim,
                got: value.dim(),
            });
        }
        if node.depth() > self.depth_limit {
            return invalid(format!(
                "node depth {} exceeds depth limit {}",
                node.depth(),
                self.depth_limit
            ));
        }
        if node.is_root() {
            self.root = value;
        } else if value.is_zero() {
            self.entries.remove(&node);
        } else {
            self.entries.insert(node, value);
        }
        Ok(self)
    }

    pub fn with_mean(mut self, mean: ValueVec<T>) -> Result<Self> {
        if mean.dim() != self.value_dim {
            return Err(Error::DimensionMismatch {
                expected: self.value_dim,
                got: mean.dim(),
            });
        }
        self.mean = mean;
        Ok(self)
    }

    /// Coefficient of `h_node` (zero if absent).
    pub fn coefficient(&self, node: DyadicNode) -> ValueVec<T> {
        if node.is_root() {
            return self.root.clone();
        }
        self.entries
            .get(&node)
            .cloned()
            .unwrap_or_else(|| ValueVec::zeros(self.value_dim))
    }

    /// All stored node coefficients including a nonzero root mode, in
    /// depth/index order.
    pub fn nodes(&self) -> impl Iterator<Item = (DyadicNode, &ValueVec<T>)> {
        let root = (!self.root.is_zero()).then_some((DyadicNode::ROOT, &self.root));
        root.into_iter()
            .chain(self.entries.iter().map(|(n, v)| (*n, v)))
    }

    /// Coefficient vector in basis order `(h¹, h_{I0}, depth 1, ...)`,
    /// component `c` of the value space.
    pub fn to_basis_vector(&self, component: usize) -> Vec<T> {
        let n = 1usize << (self.depth_limit + 1);
        let mut out = vec![T::zero(); n];
        out[0] = self.mean.components()[component].clone();
        out[1] = self.root.components()[component].clone();
        for (node, v) in &self.entries {
            out[node.basis_index()] = v.components()[component].clone();
        }
        out
    }

    /// Inverse of [`HaarCoeffs::to_basis_vector`] for scalar-valued coefficients.
    pub fn from_basis_vector(depth_limit: u32, v: &[T]) -> Result<Self> {
        let n = 1usize << (depth_limit + 1);
        if v.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: v.len(),
            });
        }
        let mut out = Self::zero(depth_limit, 1).with_mean(ValueVec::scalar(v[0].clone()))?;
        for (i, x) in v.iter().enumerate().skip(1) {
            let node = DyadicNode::from_basis_index(i).expect("i >= 1");
            out = out.with_entry(node, ValueVec::scalar(x.clone()))?;
        }
        Ok(out)
    }
}

impl<T> HaarCoeffs<T> {
    pub fn depth_limit(&self) -> u32 {
        self.depth_limit
    }

    pub fn value_dim(&self) -> usize {
        self.value_dim
    }

    pub fn mean(&self) -> &ValueVec<T> {
        &self.mean
    }

    pub fn root(&self) -> &ValueVec<T> {
        &self.root
    }

    /// Nonzero coefficients at depth >= 1.
    pub fn entries(&self) -> &BTreeMap<DyadicNode, ValueVec<T>> {
        &self.entries
    }

    pub fn grid_len(&self) -> usize {
        1usize << (self.depth_limit + 1)
    }
}

impl<T: Real> HaarCoeffs<T> {
    /// `|mean|² + |root|² + Σ |c_I|²` (Euclidean in the value space).
    pub fn squared_l2(&self) -> T {
        self.mean.squared_euclidean()
            + self.root.squared_euclidean()
            + self
                .entries
                .values()
                .map(ValueVec::squared_euclidean)
                .sum::<T>()
    }

    /// Sum of `<c_I, g_I>` over all modes (the `L²` pairing of two expansions).
    pub fn pairing(&self, other: &Self) -> T {
        let mut acc = self.mean.dot(&other.mean) + self.root.dot(&other.root);
        for (node, v) in &self.entries {
            if let Some(w) = other.entries.get(node) {
                acc = acc + v.dot(w);
            }
        }
        acc
    }
}

/// Haar analysis of finest-grid averages.
///
/// `samples.len()` must be `2^(depth_limit + 1)` with `depth_limit >= 0`.
pub fn haar_analyze<T: Real>(samples: &[ValueVec<T>]) -> Result<HaarCoeffs<T>> {
    let n = samples.len();
    if n < 2 || !n.is_power_of_two() {
        return invalid(format!(
            "sample count {n} is not a power of two >= 2"
        ));
    }
    let value_dim = samples[0].dim();
    if let Some(bad) = samples.iter().find(|s| s.dim() != value_dim) {
        return Err(Error::DimensionMismatch {
            expected: value_dim,
            got: bad.dim(),
        });
    }
    let depth_limit = n.trailing_zeros() - 1;
    let half = T::lit(0.5);

    let mut level: Vec<Vec<T>> = samples.iter().map(|s| s.components().to_vec()).collect();
    let mut entries = BTreeMap::new();
    let mut root = ValueVec::zeros(value_dim);
    for depth in (0..=depth_limit).rev() {
        let scale = half * T::lit(2f64.powf(-(depth as f64) / 2.0));
        let mut next = Vec::with_capacity(level.len() / 2);
        for (i, pair) in level.chunks_exact(2).enumerate() {
            let (l, r) = (&pair[0], &pair[1]);
            let coef: Vec<T> = l.iter().zip(r).map(|(&a, &b)| scale * (a - b)).collect();
            let avg: Vec<T> = l.iter().zip(r).map(|(&a, &b)| half * (a + b)).collect();
            let coef = ValueVec::new(coef);
            if depth == 0 {
                root = coef;
            } else if !coef.is_zero() {
                entries.insert(
                    DyadicNode {
                        depth,
                        index: i as u64,
                    },
                    coef,
                );
            }
            next.push(avg);
        }
        level = next;
    }
    Ok(HaarCoeffs {
        depth_limit,
        value_dim,
        mean: ValueVec::new(level.pop().expect("one cell left")),
        root,
        entries,
    })
}

/// Inverse of [`haar_analyze`]: finest-grid averages of the expansion.
pub fn haar_synthesize<T: Real>(coeffs: &HaarCoeffs<T>) -> Vec<ValueVec<T>> {
    let dim = coeffs.value_dim;
    let mut level: Vec<Vec<T>> = vec![coeffs.mean.components().to_vec()];
    for depth in 0..=coeffs.depth_limit {
        let amp = T::lit(2f64.powf(depth as f64 / 2.0));
        let mut next = Vec::with_capacity(level.len() * 2);
        for (i, avg) in level.iter().enumerate() {
            let node = DyadicNode {
                depth,
                index: i as u64,
            };
            let c = if depth == 0 {
                Some(&coeffs.root)
            } else {
                coeffs.entries.get(&node)
            };
            match c {
                Some(c) => {
                    let c = c.components();
                    next.push((0..dim).map(|k| avg[k] + amp * c[k]).collect());
                    next.push((0..dim).map(|k| avg[k] - amp * c[k]).collect());
                }
                None => {
                    next.push(avg.clone());
                    next.push(avg.clone());
                }
            }
        }
        level = next;
    }
    level.into_iter().map(ValueVec::new).collect()
}

/// A Haar basis function: the constant mode or `h_node`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HaarMode {
    Mean,
    Node(DyadicNode),
}

/// Pointwise value of an interval Haar function at `x ∈ [0, 1)`.
pub fn interval_haar_eval<T: Real>(mode: HaarMode, x: T) -> Result<T> {
    if !(x >= T::zero() && x < T::one()) {
        return invalid("point outside [0, 1)");
    }
    match mode {
        HaarMode::Mean => Ok(T::one()),
        HaarMode::Node(node) => {
            if !node.contains(x) {
                return Ok(T::zero());
            }
            let amp = node.length::<T>().sqrt().recip();
            let mid = node.start::<T>() + node.length::<T>() * T::lit(0.5);
            Ok(if x < mid { amp } else { -amp })
        }
    }
}

/// A node of the d-step splitting of the unit cube: the root cube is split
/// along dimension 0, its children along dimension 1, and so on cyclically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CubeNode {
    node: DyadicNode,
    d: u32,
}

impl CubeNode {
    pub fn new(node: DyadicNode, d: u32) -> Result<Self> {
        if d == 0 {
            return invalid("cube dimension must be at least 1");
        }
        Ok(Self { node, d })
    }

    pub fn node(self) -> DyadicNode {
        self.node
    }

    pub fn dim(self) -> u32 {
        self.d
    }

    /// Coordinate direction in which this node is split into its children.
    pub fn split_dimension(self) -> u32 {
        self.node.depth % self.d
    }

    /// Lower corner and side lengths of the box.
    pub fn bounds<T: Real>(self) -> (Vec<T>, Vec<T>) {
        let d = self.d as usize;
        let mut lo = vec![T::zero(); d];
        let mut len = vec![T::one(); d];
        let half = T::lit(0.5);
        for s in 0..self.node.depth {
            let r = (s % self.d) as usize;
            len[r] = len[r] * half;
            if !self.node.toss(s) {
                lo[r] = lo[r] + len[r];
            }
        }
        (lo, len)
    }

    pub fn volume<T: Real>(self) -> T {
        self.node.length()
    }
}

/// Bijection between interval nodes and cube nodes: the same split sequence,
/// with the split of a depth-`t` node performed in direction `t mod d`. The
/// slice of the interval node therefore equals the split direction.
pub fn interval_cube_bijection(node: DyadicNode, d: u32) -> Result<CubeNode> {
    CubeNode::new(node, d)
}

pub fn cube_interval_bijection(node: CubeNode) -> DyadicNode {
    node.node
}

/// Pointwise value of a cube Haar function at `point ∈ [0, 1)^d`.
pub fn cube_haar_eval<T: Real>(mode: HaarMode, d: u32, point: &[T]) -> Result<T> {
    if point.len() != d as usize {
        return Err(Error::DimensionMismatch {
            expected: d as usize,
            got: point.len(),
        });
    }
    if point.iter().any(|&x| !(x >= T::zero() && x < T::one())) {
        return invalid("point outside the unit cube");
    }
    let node = match mode {
        HaarMode::Mean => return Ok(T::one()),
        HaarMode::Node(node) => CubeNode::new(node, d)?,
    };
    let (lo, len) = node.bounds::<T>();
    let inside = point
        .iter()
        .zip(lo.iter().zip(&len))
        .all(|(&x, (&a, &l))| x >= a && x < a + l);
    if !inside {
        return Ok(T::zero());
    }
    let r = node.split_dimension() as usize;
    let amp = node.volume::<T>().sqrt().recip();
    let mid = lo[r] + len[r] * T::lit(0.5);
    Ok(if point[r] < mid { amp } else { -amp })
}

/// Number of cells along each axis of the finest tensor grid reached after
/// `depth_limit + 1` cyclic splits.
pub fn cube_grid_shape(d: u32, depth_limit: u32) -> Vec<usize> {
    let mut shape = vec![1usize; d as usize];
    for s in 0..=depth_limit {
        shape[(s % d) as usize] *= 2;
    }
    shape
}

/// Maps the multi-index of a finest cube cell (row-major, axis 0 slowest) to
/// the index of the corresponding finest interval cell.
pub fn cube_cell_to_interval_cell(cell: &[usize], d: u32, depth_limit: u32) -> usize {
    let shape = cube_grid_shape(d, depth_limit);
    let mut used = vec![0u32; d as usize];
    let bits_per_axis: Vec<u32> = shape.iter().map(|s| s.trailing_zeros()).collect();
    let mut out = 0usize;
    for s in 0..=depth_limit {
        let r = (s % d) as usize;
        let bit = (cell[r] >> (bits_per_axis[r] - 1 - used[r])) & 1;
        used[r] += 1;
        out = (out << 1) | bit;
    }
    out
}

/// Haar analysis of a function on the unit cube given by its averages on
/// the finest tensor grid (row-major, axis 0 slowest). The coefficients are
/// indexed by the interval nodes that biject onto the cube nodes.
pub fn cube_haar_analyze<T: Real>(
    grid: &[ValueVec<T>],
    d: u32,
    depth_limit: u32,
) -> Result<HaarCoeffs<T>> {
    let shape = cube_grid_shape(d, depth_limit);
    let total: usize = shape.iter().product();
    if grid.len() != total {
        return Err(Error::DimensionMismatch {
            expected: total,
            got: grid.len(),
        });
    }
    let mut interval = vec![None; total];
    let mut cell = vec![0usize; d as usize];
    for v in grid {
        interval[cube_cell_to_interval_cell(&cell, d, depth_limit)] = Some(v.clone());
        for r in (0..d as usize).rev() {
            cell[r] += 1;
            if cell[r] < shape[r] {
                break;
            }
            cell[r] = 0;
        }
    }
    let samples: Vec<ValueVec<T>> = interval
        .into_iter()
        .map(|v| v.expect("cell map is a bijection"))
        .collect();
    haar_analyze(&samples)
}
