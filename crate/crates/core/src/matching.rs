//! Exact maximum-weight bipartite assignment on a dense matrix.
//!
//! Shortest-augmenting-path method with dual potentials, O(n³). Weights
//! must be non-negative; pairings that contribute no weight are reported
//! unmatched, so the result is a maximum-weight matching rather than a
//! forced-perfect assignment.

use alloc::vec;
use alloc::vec::Vec;

/// Result of [`max_weight_assignment`].
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    /// For each row, the matched column (rows matched at zero weight are
    /// `None`).
    pub row_to_col: Vec<Option<usize>>,
    /// Sum of matched weights, accumulated in row order.
    pub total: f64,
}

/// Solves the assignment problem for `weights[row][col] >= 0`, maximizing
/// the total matched weight. Rectangular inputs are fine.
pub fn max_weight_assignment(weights: &[Vec<f64>]) -> Assignment {
    let rows = weights.len();
    let cols = weights.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        return Assignment {
            row_to_col: vec![None; rows],
            total: 0.0,
        };
    }
    let transposed = rows > cols;
    let (n, m) = if transposed {
        (cols, rows)
    } else {
        (rows, cols)
    };
    let at = |i: usize, j: usize| -> f64 {
        // Minimize the negated weight.
        if transposed {
            -weights[j][i]
        } else {
            -weights[i][j]
        }
    };

    // 1-indexed duals and column assignments; p[j] is the row matched to
    // column j, 0 meaning unmatched.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; m + 1];
    let mut p = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = at(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut row_to_col = vec![None; rows];
    for j in 1..=m {
        let i = p[j];
        if i == 0 {
            continue;
        }
        let (r, c) = if transposed {
            (j - 1, i - 1)
        } else {
            (i - 1, j - 1)
        };
        if weights[r][c] > 0.0 {
            row_to_col[r] = Some(c);
        }
    }
    let mut total = 0.0;
    for (r, c) in row_to_col.iter().enumerate() {
        if let Some(c) = c {
            total += weights[r][*c];
        }
    }
    Assignment { row_to_col, total }
}
