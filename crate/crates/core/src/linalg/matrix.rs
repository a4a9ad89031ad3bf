use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::svd::Svd;
use super::vector::{dot, Vector};
use super::Subspace;
use crate::error::{check_dim, Error, Result};

/// A dense `rows x cols` real matrix acting as a linear map `R^cols -> R^rows`.
///
/// The operator norm (largest singular value) is computed lazily and cached.
#[derive(Clone, Serialize, Deserialize)]
#[serde(try_from = "MapJson", into = "MapJson")]
pub struct LinearMap {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    norm_cache: OnceLock<f64>,
}

/// Wire form: `{ "rows": m, "cols": n, "entries": [[...], ...] }`.
#[derive(Serialize, Deserialize)]
struct MapJson {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<f64>>,
}

impl TryFrom<MapJson> for LinearMap {
    type Error = Error;

    fn try_from(raw: MapJson) -> Result<Self> {
        check_dim(raw.rows, raw.entries.len())?;
        let map = LinearMap::from_rows(&raw.entries)?;
        check_dim(raw.cols, map.cols)?;
        Ok(map)
    }
}

impl From<LinearMap> for MapJson {
    fn from(map: LinearMap) -> Self {
        MapJson {
            rows: map.rows,
            cols: map.cols,
            entries: (0..map.rows).map(|i| map.row(i).to_vec()).collect(),
        }
    }
}

impl PartialEq for LinearMap {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.data == other.data
    }
}

impl fmt::Debug for LinearMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[f64]> = (0..self.rows).map(|i| self.row(i)).collect();
        f.debug_struct("LinearMap")
            .field("rows", &self.rows)
            .field("cols", &self.cols)
            .field("entries", &rows)
            .finish()
    }
}

impl LinearMap {
    /// Row-major constructor.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidInput("linear map needs rows, cols >= 1".into()));
        }
        check_dim(rows * cols, data.len())?;
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("matrix entries must be finite".into()));
        }
        Ok(Self::from_raw(rows, cols, data))
    }

    pub(crate) fn from_raw(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(rows * cols, data.len());
        Self {
            rows,
            cols,
            data,
            norm_cache: OnceLock::new(),
        }
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let m = rows.len();
        if m == 0 {
            return Err(Error::InvalidInput("linear map needs at least one row".into()));
        }
        let n = rows[0].as_ref().len();
        let mut data = Vec::with_capacity(m * n);
        for r in rows {
            check_dim(n, r.as_ref().len())?;
            data.extend_from_slice(r.as_ref());
        }
        Self::new(m, n, data)
    }

    /// Matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_columns(rows: usize, columns: &[Vector]) -> Result<Self> {
        let cols = columns.len();
        let mut data = vec![0.0; rows * cols];
        for (j, c) in columns.iter().enumerate() {
            check_dim(rows, c.dim())?;
            for i in 0..rows {
                data[i * cols + j] = c[i];
            }
        }
        Self::new(rows, cols, data)
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1.0; n])
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_raw(rows, cols, vec![0.0; rows * cols])
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut data = vec![0.0; n * n];
        for (i, d) in diag.iter().enumerate() {
            data[i * n + i] = *d;
        }
        Self::from_raw(n, n, data)
    }

    /// Orthogonal projection `R^n -> R^k` onto the listed coordinates.
    pub fn coordinate_projection(n: usize, coords: &[usize]) -> Self {
        let mut data = vec![0.0; coords.len() * n];
        for (i, &c) in coords.iter().enumerate() {
            data[i * n + c] = 1.0;
        }
        Self::from_raw(coords.len(), n, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vector {
        Vector::from_raw((0..self.rows).map(|i| self.get(i, j)).collect())
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn apply(&self, x: &[f64]) -> Vector {
        debug_assert_eq!(x.len(), self.cols);
        Vector::from_raw((0..self.rows).map(|i| dot(self.row(i), x)).collect())
    }

    pub fn apply_transpose(&self, y: &[f64]) -> Vector {
        debug_assert_eq!(y.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for (i, yi) in y.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += a * yi;
            }
        }
        Vector::from_raw(out)
    }

    pub fn transpose(&self) -> Self {
        let mut data = vec![0.0; self.rows * self.cols];
        for i in 0..self.rows {
            for j in 0..self.cols {
                data[j * self.rows + i] = self.get(i, j);
            }
        }
        Self::from_raw(self.cols, self.rows, data)
    }

    /// Composition `self ∘ other`.
    pub fn compose(&self, other: &LinearMap) -> Result<Self> {
        check_dim(self.cols, other.rows)?;
        let (m, k, n) = (self.rows, self.cols, other.cols);
        let mut data = vec![0.0; m * n];
        for i in 0..m {
            for l in 0..k {
                let a = self.get(i, l);
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    data[i * n + j] += a * other.get(l, j);
                }
            }
        }
        Ok(Self::from_raw(m, n, data))
    }

    pub fn add(&self, other: &LinearMap) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &LinearMap) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &LinearMap, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        check_dim(self.rows, other.rows)?;
        check_dim(self.cols, other.cols)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| f(*a, *b)).collect();
        Ok(Self::from_raw(self.rows, self.cols, data))
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        Self::from_raw(self.rows, self.cols, self.data.iter().map(|a| alpha * a).collect())
    }

    pub fn frobenius_norm(&self) -> f64 {
        super::vector::norm(&self.data)
    }

    /// `self` composed with the orthonormal basis of `space`: the `rows x dim(space)`
    /// matrix of the restriction `T|_space` in basis coordinates.
    /// Returns `None` for the zero subspace.
    pub fn restrict_to(&self, space: &Subspace) -> Result<Option<LinearMap>> {
        check_dim(self.cols, space.ambient_dim())?;
        let p = space.dim();
        if p == 0 {
            return Ok(None);
        }
        let mut data = vec![0.0; self.rows * p];
        for (j, b) in space.basis().iter().enumerate() {
            let col = self.apply(b);
            for i in 0..self.rows {
                data[i * p + j] = col[i];
            }
        }
        Ok(Some(Self::from_raw(self.rows, p, data)))
    }

    pub fn svd(&self) -> Svd {
        Svd::compute(self)
    }

    /// Largest singular value, cached after the first call.
    pub fn operator_norm(&self) -> f64 {
        *self.norm_cache.get_or_init(|| self.svd().largest())
    }

    pub fn smallest_singular_value(&self) -> f64 {
        self.svd().smallest()
    }

    pub fn rank_with_tol(&self, eps_rel: f64) -> usize {
        self.svd().rank(eps_rel)
    }

    /// Orthonormal basis of the numeric kernel.
    pub fn kernel(&self, eps_rel: f64) -> Subspace {
        self.svd().kernel(eps_rel)
    }

    /// Minimum-norm `x` with `A x = y`, or `Inconsistent` when `y` is not in the
    /// range within `residual_tol * max(1, |y|)`.
    pub fn least_norm_solution(&self, y: &[f64], rank_tol: f64, residual_tol: f64) -> Result<Vector> {
        check_dim(self.rows, y.len())?;
        let x = self.svd().pseudo_solve(y, rank_tol);
        let residual = self.apply(&x).sub(y).norm();
        let ynorm = super::vector::norm(y);
        if residual > residual_tol * ynorm.max(1.0) {
            return Err(Error::Inconsistent { residual });
        }
        Ok(x)
    }
}
