//! Dense linear assignment in maximization form.
//!
//! [`lap_maximize`] negates the profits and runs the shortest augmenting
//! path Hungarian method with row/column potentials, O(n³). Among optimal
//! assignments it returns the lexicographically smallest index map: after
//! the primal-dual solve, the optimal set is exactly the perfect matchings
//! of the tight subgraph (zero reduced cost), and a greedy pass with
//! alternating-cycle exchanges picks the smallest one row by row.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::instrument;
use crate::matrix::DenseMatrix;
use crate::permutation::Permutation;
use crate::scalar::Real;

/// Largest size accepted by [`lap_brute_force`].
pub const BRUTE_FORCE_LIMIT: usize = 10;

/// An optimal assignment and its objective `Σᵢ C[i, π(i)]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Assignment<T> {
    pub perm: Permutation,
    pub objective: T,
}

fn validate<T: Real>(cost: &DenseMatrix<T>) -> Result<()> {
    if !cost.is_square() {
        return Err(Error::invalid(format!("assignment cost must be square, got {}x{}", cost.rows(), cost.cols())));
    }
    for i in 0..cost.rows() {
        if let Some(j) = cost.row(i).iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite cost at ({i}, {j})")));
        }
    }
    Ok(())
}

/// Maximizes `Σᵢ C[i, π(i)]` over all permutations.
pub fn lap_maximize<T: Real>(cost: &DenseMatrix<T>) -> Result<Assignment<T>> {
    validate(cost)?;
    instrument::count_lap_solve();
    let n = cost.rows();
    if n == 0 {
        return Ok(Assignment { perm: Permutation::identity(0), objective: T::zero() });
    }

    let (row_to_col, u, v) = hungarian_min(cost);
    let primal = Permutation::from_map_unchecked(row_to_col);
    let primal_obj = primal.objective(cost);

    let scale = cost.max_abs().max(T::min_positive_value());
    let tol = T::epsilon() * T::lit(64.0 * n as f64) * scale;
    let tight = tight_edges(cost, &u, &v, &primal, tol);
    let lex = lexicographic_matching(&tight, primal.as_slice());
    let lex_obj = lex.objective(cost);

    // The tolerance may admit an edge that is tight only up to rounding; never
    // trade objective for ordering.
    if lex_obj >= primal_obj {
        Ok(Assignment { perm: lex, objective: lex_obj })
    } else {
        Ok(Assignment { perm: primal, objective: primal_obj })
    }
}

/// Maximizes `Σᵢ aᵢ b_π(i)`, the assignment problem for the outer-product
/// cost `C = a bᵀ`, in O(n log n).
///
/// By the rearrangement inequality, pairing `a` and `b` in the same sorted
/// order is optimal. When either vector has repeated values the optimum is
/// not unique, and the cost is materialized and handed to [`lap_maximize`]
/// so ties resolve exactly as they would there.
pub fn lap_maximize_outer<T: Real>(a: &[T], b: &[T]) -> Result<Assignment<T>> {
    if a.len() != b.len() {
        return Err(Error::dims(format!("outer cost factors of length {} and {}", a.len(), b.len())));
    }
    if let Some(i) = a.iter().chain(b).position(|v| !v.is_finite()) {
        return Err(Error::invalid(format!("non-finite outer cost factor at {i}")));
    }
    let n = a.len();
    let order = |v: &[T]| {
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&i, &j| v[j].partial_cmp(&v[i]).unwrap().then(i.cmp(&j)));
        idx
    };
    let ra = order(a);
    let rb = order(b);
    let tied = |v: &[T], idx: &[usize]| idx.windows(2).any(|w| v[w[0]] == v[w[1]]);
    if tied(a, &ra) || tied(b, &rb) {
        return lap_maximize(&DenseMatrix::from_fn(n, n, |i, j| a[i] * b[j])?);
    }

    instrument::count_lap_solve();
    let mut map = vec![0; n];
    for (&i, &j) in ra.iter().zip(&rb) {
        map[i] = j;
    }
    let objective = a.iter().zip(&map).map(|(&ai, &j)| ai * b[j]).sum();
    Ok(Assignment { perm: Permutation::from_map_unchecked(map), objective })
}

/// Shortest augmenting path on `a = -C`, one Dijkstra search per row over
/// the not-yet-scanned columns, with lazy dual updates. Returns the
/// row→column map and the potentials `u` (rows) and `v` (columns), with
/// `a[i][j] - u[i] - v[j] ≥ 0`.
fn hungarian_min<T: Real>(cost: &DenseMatrix<T>) -> (Vec<usize>, Vec<T>, Vec<T>) {
    const NONE: usize = usize::MAX;
    let n = cost.rows();
    let inf = T::infinity();
    let mut u = vec![T::zero(); n];
    let mut v = vec![T::zero(); n];
    let mut col_for_row = vec![NONE; n];
    let mut row_for_col = vec![NONE; n];
    let mut path = vec![NONE; n];
    let mut dist = vec![inf; n];
    let mut scanned_row = vec![false; n];
    let mut scanned_col = vec![false; n];
    let mut remaining: Vec<usize> = Vec::with_capacity(n);

    for start in 0..n {
        dist.iter_mut().for_each(|d| *d = inf);
        scanned_row.iter_mut().for_each(|f| *f = false);
        scanned_col.iter_mut().for_each(|f| *f = false);
        remaining.clear();
        remaining.extend((0..n).rev());

        let mut min_val = T::zero();
        let mut i = start;
        let sink = loop {
            scanned_row[i] = true;
            let row = cost.row(i);
            let base = min_val - u[i];
            let mut lowest = inf;
            let mut pick = 0usize;
            for (k, &j) in remaining.iter().enumerate() {
                let r = base - row[j] - v[j];
                if r < dist[j] {
                    path[j] = i;
                    dist[j] = r;
                }
                // Prefer unassigned columns among equals: ends the search sooner.
                if dist[j] < lowest || (dist[j] == lowest && row_for_col[j] == NONE) {
                    lowest = dist[j];
                    pick = k;
                }
            }
            min_val = lowest;
            let j = remaining.swap_remove(pick);
            scanned_col[j] = true;
            if row_for_col[j] == NONE {
                break j;
            }
            i = row_for_col[j];
        };

        u[start] += min_val;
        for r in 0..n {
            if scanned_row[r] && r != start {
                u[r] += min_val - dist[col_for_row[r]];
            }
        }
        for c in 0..n {
            if scanned_col[c] {
                v[c] -= min_val - dist[c];
            }
        }

        let mut j = sink;
        loop {
            let r = path[j];
            row_for_col[j] = r;
            let prev = std::mem::replace(&mut col_for_row[r], j);
            if r == start {
                break;
            }
            j = prev;
        }
    }
    (col_for_row, u, v)
}

/// Columns with (numerically) zero reduced cost, per row, ascending. The
/// primal assignment's own edges are always included.
fn tight_edges<T: Real>(cost: &DenseMatrix<T>, u: &[T], v: &[T], primal: &Permutation, tol: T) -> Vec<Vec<usize>> {
    (0..cost.rows())
        .map(|i| {
            let row = cost.row(i);
            (0..row.len()).filter(|&j| j == primal.get(i) || -row[j] - u[i] - v[j] <= tol).collect()
        })
        .collect()
}

/// Lexicographically smallest perfect matching of the tight graph, starting
/// from a known perfect matching.
fn lexicographic_matching(tight: &[Vec<usize>], start: &[usize]) -> Permutation {
    let n = start.len();
    let mut row_to_col = start.to_vec();
    let mut col_to_row = vec![0usize; n];
    for (i, &j) in row_to_col.iter().enumerate() {
        col_to_row[j] = i;
    }
    let mut fixed = vec![false; n];
    // parent[k] = the row that takes row k's current column on the path.
    let mut parent = vec![usize::MAX; n];
    let mut visited = vec![false; n];

    for i in 0..n {
        for &j in &tight[i] {
            let current = row_to_col[i];
            if j == current {
                break;
            }
            let r = col_to_row[j];
            if fixed[r] {
                continue;
            }
            // Free column `current` by moving r along an alternating path that
            // avoids fixed rows and row i itself.
            visited.iter_mut().for_each(|f| *f = false);
            visited[i] = true;
            visited[r] = true;
            parent[r] = usize::MAX;
            let mut queue = VecDeque::from([r]);
            let mut end: Option<usize> = None;
            'bfs: while let Some(row) = queue.pop_front() {
                for &c in &tight[row] {
                    if c == row_to_col[row] {
                        continue;
                    }
                    if c == current {
                        end = Some(row);
                        break 'bfs;
                    }
                    let next = col_to_row[c];
                    if fixed[next] || visited[next] {
                        continue;
                    }
                    visited[next] = true;
                    parent[next] = row;
                    queue.push_back(next);
                }
            }
            let Some(last) = end else { continue };
            // Walk back: `last` takes `current`, each predecessor takes the column
            // vacated by its successor.
            let mut row = last;
            let mut take = current;
            loop {
                let vacated = row_to_col[row];
                row_to_col[row] = take;
                col_to_row[take] = row;
                if row == r {
                    break;
                }
                take = vacated;
                row = parent[row];
            }
            row_to_col[i] = j;
            col_to_row[j] = i;
            break;
        }
        fixed[i] = true;
    }
    Permutation::from_map_unchecked(row_to_col)
}

/// Exhaustive maximum over all `n!` permutations, `n ≤ 10`. Permutations are
/// visited in lexicographic order and only a strictly larger sum replaces the
/// incumbent, so ties resolve to the lexicographically smallest map.
pub fn lap_brute_force<T: Real>(cost: &DenseMatrix<T>) -> Result<Assignment<T>> {
    validate(cost)?;
    let n = cost.rows();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge(n));
    }
    let mut best: Option<(T, Vec<usize>)> = None;
    let mut current = Vec::with_capacity(n);
    let mut used = vec![false; n];
    search(cost, &mut current, &mut used, T::zero(), &mut best);
    let (objective, map) = best.unwrap_or((T::zero(), Vec::new()));
    Ok(Assignment { perm: Permutation::from_map_unchecked(map), objective })
}

fn search<T: Real>(
    cost: &DenseMatrix<T>,
    current: &mut Vec<usize>,
    used: &mut [bool],
    partial: T,
    best: &mut Option<(T, Vec<usize>)>,
) {
    let n = cost.rows();
    let i = current.len();
    if i == n {
        if best.as_ref().is_none_or(|(b, _)| partial > *b) {
            *best = Some((partial, current.clone()));
        }
        return;
    }
    for j in 0..n {
        if used[j] {
            continue;
        }
        used[j] = true;
        current.push(j);
        search(cost, current, used, partial + cost[(i, j)], best);
        current.pop();
        used[j] = false;
    }
}
