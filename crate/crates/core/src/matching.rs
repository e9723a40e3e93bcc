//! Bipartite matching between sub-tasks (rows) and agents (columns).
//!
//! `cost[row][col]` is `Some(c)` when the column can serve the row.

/// Kuhn's augmenting-path maximum matching. Returns the matched column for
/// each row; rows left unmatched are `None`.
pub(crate) fn maximum_matching(cost: &[Vec<Option<f64>>], cols: usize) -> Vec<Option<usize>> {
    let rows = cost.len();
    let mut owner: Vec<Option<usize>> = vec![None; cols];
    for r in 0..rows {
        let mut seen = vec![false; cols];
        augment(cost, r, &mut seen, &mut owner);
    }
    let mut matched = vec![None; rows];
    for (c, o) in owner.iter().enumerate() {
        if let Some(r) = *o {
            matched[r] = Some(c);
        }
    }
    matched
}

fn augment(cost: &[Vec<Option<f64>>], r: usize, seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
    for c in 0..seen.len() {
        if cost[r][c].is_none() || seen[c] {
            continue;
        }
        seen[c] = true;
        if owner[c].is_none_or(|r2| augment(cost, r2, seen, owner)) {
            owner[c] = Some(r);
            return true;
        }
    }
    false
}

pub(crate) fn has_perfect_matching(cost: &[Vec<Option<f64>>], cols: usize) -> bool {
    maximum_matching(cost, cols).iter().all(Option::is_some)
}

/// Hungarian algorithm (rows <= cols) on a dense matrix. Returns the
/// column per row.
fn hungarian(a: &[Vec<f64>], cols: usize) -> Vec<usize> {
    let n = a.len();
    let m = cols;
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; m + 1];
    let mut p = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = a[i0 - 1][j - 1] - u[i0] - v[j];
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
    let mut ans = vec![0; n];
    for j in 1..=m {
        if p[j] != 0 {
            ans[p[j] - 1] = j - 1;
        }
    }
    ans
}

/// Minimum total cost of a perfect matching restricted to the given rows
/// and to columns not in `banned`, or `None` when no perfect matching exists.
fn optimum(cost: &[Vec<Option<f64>>], rows: &[usize], cols: usize, banned: &[bool]) -> Option<f64> {
    if rows.is_empty() {
        return Some(0.0);
    }
    let free: Vec<usize> = (0..cols).filter(|&c| !banned[c]).collect();
    if free.len() < rows.len() {
        return None;
    }
    let sub: Vec<Vec<Option<f64>>> = rows
        .iter()
        .map(|&r| free.iter().map(|&c| cost[r][c]).collect())
        .collect();
    if !has_perfect_matching(&sub, free.len()) {
        return None;
    }
    // Any matching that uses a forbidden pair costs more than every
    // admissible one.
    let big = 1.0
        + sub
            .iter()
            .map(|row| row.iter().flatten().fold(0.0_f64, |m, &x| m.max(x.abs())))
            .sum::<f64>();
    let dense: Vec<Vec<f64>> = sub
        .iter()
        .map(|row| row.iter().map(|x| x.unwrap_or(big)).collect())
        .collect();
    let cols_of = hungarian(&dense, free.len());
    Some(cols_of.iter().enumerate().map(|(i, &j)| dense[i][j]).sum())
}

/// Minimum-cost perfect matching, choosing the lexicographically smallest
/// column vector among all optimal matchings (within a 1e-9 relative
/// tolerance). `None` when some row cannot be matched.
pub(crate) fn lex_min_cost_matching(cost: &[Vec<Option<f64>>], cols: usize) -> Option<Vec<usize>> {
    let rows: Vec<usize> = (0..cost.len()).collect();
    let target = optimum(cost, &rows, cols, &vec![false; cols])?;
    let tol = 1e-9 * target.abs().max(1.0);
    let mut banned = vec![false; cols];
    let mut fixed_cost = 0.0;
    let mut out = Vec::with_capacity(rows.len());
    for r in 0..rows.len() {
        let rest = &rows[r + 1..];
        let mut chosen = None;
        for c in 0..cols {
            let Some(w) = cost[r][c] else { continue };
            if banned[c] {
                continue;
            }
            banned[c] = true;
            let tail = optimum(cost, rest, cols, &banned);
            banned[c] = false;
            if let Some(t) = tail {
                if fixed_cost + w + t <= target + tol {
                    chosen = Some((c, w));
                    break;
                }
            }
        }
        let (c, w) = chosen?;
        banned[c] = true;
        fixed_cost += w;
        out.push(c);
    }
    Some(out)
}
