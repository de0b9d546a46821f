//! Axis-aligned boxes, IoU and maximum-weight bipartite assignment.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Axis-aligned pixel rectangle with a top-left origin; y grows downward.
///
/// Zero width or height is legal and yields a zero-area box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    left: f64,
    top: f64,
    width: f64,
    height: f64,
}

impl BoundingBox {
    pub fn new(left: f64, top: f64, width: f64, height: f64) -> Result<Self> {
        if !(left.is_finite() && top.is_finite() && width.is_finite() && height.is_finite()) {
            return Err(Error::InvalidBox("non-finite coordinate"));
        }
        if width < 0.0 || height < 0.0 {
            return Err(Error::InvalidBox("negative width or height"));
        }
        Ok(Self { left, top, width, height })
    }

    /// Builds a box from its center and size, clamping negative sizes to zero.
    pub fn from_center(cx: f64, cy: f64, width: f64, height: f64) -> Result<Self> {
        let width = width.max(0.0);
        let height = height.max(0.0);
        Self::new(cx - width / 2.0, cy - height / 2.0, width, height)
    }

    pub fn left(&self) -> f64 {
        self.left
    }

    pub fn top(&self) -> f64 {
        self.top
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn right(&self) -> f64 {
        self.left + self.width
    }

    pub fn bottom(&self) -> f64 {
        self.top + self.height
    }

    pub fn area(&self) -> f64 {
        self.width * self.height
    }

    pub fn center(&self) -> (f64, f64) {
        (self.left + self.width / 2.0, self.top + self.height / 2.0)
    }
}

/// Intersection over union. Returns 0 when the union has zero area.
pub fn iou(a: &BoundingBox, b: &BoundingBox) -> f64 {
    let iw = (a.right().min(b.right()) - a.left.max(b.left)).max(0.0);
    let ih = (a.bottom().min(b.bottom()) - a.top.max(b.top)).max(0.0);
    let inter = iw * ih;
    if inter <= 0.0 {
        return 0.0;
    }
    // Areas from the same rounded extents as the intersection, so that
    // iou(a, a) is exactly 1.
    let area = |r: &BoundingBox| (r.right() - r.left) * (r.bottom() - r.top);
    let union = area(a) + area(b) - inter;
    if union <= 0.0 {
        return 0.0;
    }
    (inter / union).clamp(0.0, 1.0)
}

/// Dense row-major matrix of finite weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl WeightMatrix {
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(Error::RaggedMatrix { row: i, len: row.len(), expected: cols });
            }
            data.extend_from_slice(row);
        }
        Self::from_vec(rows.len(), cols, data)
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        assert_eq!(data.len(), rows * cols, "data length must equal rows * cols");
        if let Some(k) = data.iter().position(|w| !w.is_finite()) {
            return Err(Error::NonFiniteWeight { row: k / cols.max(1), col: k % cols.max(1) });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::from_vec(rows, cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }
}

/// One-to-one assignment between the rows and columns of a weight matrix.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Assignment {
    /// `(row, col)` pairs in ascending row order.
    pub pairs: Vec<(usize, usize)>,
    pub unmatched_rows: Vec<usize>,
    pub unmatched_cols: Vec<usize>,
}

impl Assignment {
    pub fn total_weight(&self, weights: &WeightMatrix) -> f64 {
        self.pairs.iter().map(|&(r, c)| weights.get(r, c)).sum()
    }

    /// Column assigned to `row`, if any.
    pub fn col_of(&self, row: usize) -> Option<usize> {
        self.pairs.iter().find(|p| p.0 == row).map(|p| p.1)
    }
}

/// Maximum-total-weight one-to-one assignment.
///
/// The matrix is padded to square with zero weights and solved as a
/// minimum-cost problem on the negated weights. Among optimal assignments the
/// lexicographically smallest `(row, col)` list wins. Pairs whose weight is
/// `<= min_weight` are dropped after solving and reported unmatched.
pub fn assign_max_weight(weights: &WeightMatrix, min_weight: f64) -> Assignment {
    let (rows, cols) = (weights.rows, weights.cols);
    if rows == 0 || cols == 0 {
        return Assignment {
            pairs: Vec::new(),
            unmatched_rows: (0..rows).collect(),
            unmatched_cols: (0..cols).collect(),
        };
    }

    let n = rows.max(cols);
    let mut cost = vec![0.0; n * n];
    for i in 0..rows {
        for j in 0..cols {
            cost[i * n + j] = -weights.get(i, j);
        }
    }
    let (mut row_to_col, u, v) = hungarian_min(&cost, n);

    let scale = cost.iter().fold(1.0f64, |m, c| m.max(c.abs()));
    let eps = 1e-9 * scale;
    let tight = |i: usize, j: usize| cost[i * n + j] - u[i] - v[j] <= eps;
    lexicographic_refine(&mut row_to_col, rows, cols, n, &tight);

    let mut pairs = Vec::new();
    let mut row_used = vec![false; rows];
    let mut col_used = vec![false; cols];
    for (i, &j) in row_to_col.iter().enumerate().take(rows) {
        if j < cols && weights.get(i, j) > min_weight {
            pairs.push((i, j));
            row_used[i] = true;
            col_used[j] = true;
        }
    }
    Assignment {
        pairs,
        unmatched_rows: (0..rows).filter(|&i| !row_used[i]).collect(),
        unmatched_cols: (0..cols).filter(|&j| !col_used[j]).collect(),
    }
}

/// Shortest augmenting path Hungarian algorithm on a square cost matrix.
/// Returns the row-to-column matching and the dual potentials.
fn hungarian_min(cost: &[f64], n: usize) -> (Vec<usize>, Vec<f64>, Vec<f64>) {
    // 1-based internally, index 0 is the virtual source column.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        owner[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut row_to_col = vec![0; n];
    for j in 1..=n {
        row_to_col[owner[j] - 1] = j - 1;
    }
    (row_to_col, u[1..].to_vec(), v[1..].to_vec())
}

/// Walks real rows in order and moves each onto the smallest column it can
/// take while the matching stays perfect inside the tight (zero reduced cost)
/// subgraph, which keeps it optimal.
fn lexicographic_refine(
    row_to_col: &mut [usize],
    rows: usize,
    cols: usize,
    n: usize,
    tight: &dyn Fn(usize, usize) -> bool,
) {
    let mut col_owner = vec![0usize; n];
    for (i, &j) in row_to_col.iter().enumerate() {
        col_owner[j] = i;
    }
    let mut fixed = vec![false; n];
    for i in 0..rows {
        let freed = row_to_col[i];
        let limit = freed.min(cols);
        for j in 0..limit {
            if !tight(i, j) {
                continue;
            }
            let k = col_owner[j];
            if fixed[k] {
                continue;
            }
            let mut visited = vec![false; n];
            visited[i] = true;
            let mut path = Vec::new();
            if alternating_path(k, freed, j, row_to_col, &col_owner, &fixed, &mut visited, &mut path, tight) {
                for &(r, c) in &path {
                    row_to_col[r] = c;
                    col_owner[c] = r;
                }
                row_to_col[i] = j;
                col_owner[j] = i;
                break;
            }
        }
        fixed[i] = true;
    }
}

#[allow(clippy::too_many_arguments)]
fn alternating_path(
    row: usize,
    target: usize,
    banned: usize,
    row_to_col: &[usize],
    col_owner: &[usize],
    fixed: &[bool],
    visited: &mut [bool],
    path: &mut Vec<(usize, usize)>,
    tight: &dyn Fn(usize, usize) -> bool,
) -> bool {
    visited[row] = true;
    for c in 0..col_owner.len() {
        if c == banned || c == row_to_col[row] || !tight(row, c) {
            continue;
        }
        if c == target {
            path.push((row, c));
            return true;
        }
        let next = col_owner[c];
        if fixed[next] || visited[next] {
            continue;
        }
        if alternating_path(next, target, banned, row_to_col, col_owner, fixed, visited, path, tight) {
            path.push((row, c));
            return true;
        }
    }
    false
}
