//! Exact linear assignment.
//!
//! `solve` is a Jonker-Volgenant style shortest-augmenting-path solver for
//! dense finite cost matrices. `solve_gated` allows `f64::INFINITY` entries
//! (forbidden pairs) and returns the minimum-cost assignment among those of
//! maximum cardinality, via the classic dummy-padding construction.
//! `solve_gated_lex` additionally breaks cost ties toward the
//! lexicographically smallest (row, column) assignment without any epsilon
//! perturbation.

/// Solves the assignment problem on a finite cost matrix, matching all of
/// the smaller side. Returns (row → column, total cost).
pub fn solve(cost: &[Vec<f64>]) -> (Vec<Option<usize>>, f64) {
    let nr = cost.len();
    let nc = cost.first().map_or(0, |r| r.len());
    if nr == 0 || nc == 0 {
        return (vec![None; nr], 0.0);
    }
    if nr <= nc {
        let assign = lapjv_rows(cost, nr, nc);
        let total = assign
            .iter()
            .enumerate()
            .filter_map(|(r, c)| c.map(|c| cost[r][c]))
            .sum();
        (assign, total)
    } else {
        // Transpose so every column of the original gets a row.
        let t: Vec<Vec<f64>> = (0..nc).map(|j| (0..nr).map(|i| cost[i][j]).collect()).collect();
        let col_assign = lapjv_rows(&t, nc, nr);
        let mut assign = vec![None; nr];
        for (c, r) in col_assign.iter().enumerate() {
            if let Some(r) = r {
                assign[*r] = Some(c);
            }
        }
        let total = assign
            .iter()
            .enumerate()
            .filter_map(|(r, c)| c.map(|c| cost[r][c]))
            .sum();
        (assign, total)
    }
}

/// Row-by-row shortest augmenting path with dual potentials. Rows that have
/// no finite-cost augmenting path stay unmatched.
fn lapjv_rows(cost: &[Vec<f64>], nr: usize, nc: usize) -> Vec<Option<usize>> {
    const UNSET: usize = usize::MAX;
    let mut u = vec![0.0f64; nr];
    let mut v = vec![0.0f64; nc + 1]; // index nc is the virtual start column
    let mut owner = vec![UNSET; nc + 1];

    for row in 0..nr {
        owner[nc] = row;
        let mut j0 = nc;
        let mut min_to = vec![f64::INFINITY; nc];
        let mut prev = vec![UNSET; nc];
        let mut used = vec![false; nc + 1];
        let mut reached_free = None;

        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = UNSET;
            for j in 0..nc {
                if used[j] {
                    continue;
                }
                let cur = cost[i0][j] - u[i0] - v[j];
                if cur < min_to[j] {
                    min_to[j] = cur;
                    prev[j] = j0;
                }
                if min_to[j] < delta {
                    delta = min_to[j];
                    j1 = j;
                }
            }
            if !delta.is_finite() {
                break; // no finite augmenting path: leave `row` unmatched
            }
            for j in 0..=nc {
                if used[j] {
                    if owner[j] != UNSET {
                        u[owner[j]] += delta;
                    }
                    v[j] -= delta;
                } else {
                    min_to[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == UNSET {
                reached_free = Some(j0);
                break;
            }
        }

        if let Some(mut j) = reached_free {
            // Augment along the alternating path.
            loop {
                let pj = prev[j];
                owner[j] = if pj == nc { row } else { owner[pj] };
                if pj == nc {
                    break;
                }
                j = pj;
            }
        }
    }

    let mut assign = vec![None; nr];
    for j in 0..nc {
        if owner[j] != UNSET {
            assign[owner[j]] = Some(j);
        }
    }
    assign
}

/// Matching over a cost matrix with forbidden (`f64::INFINITY`) entries:
/// maximum cardinality first, minimum total cost second.
pub fn solve_gated(cost: &[Vec<f64>]) -> Vec<(usize, usize)> {
    let nr = cost.len();
    let nc = cost.first().map_or(0, |r| r.len());
    if nr == 0 || nc == 0 {
        return Vec::new();
    }
    // Dummy cost high enough that any finite match beats skipping.
    let finite_sum: f64 = cost
        .iter()
        .flat_map(|r| r.iter())
        .filter(|c| c.is_finite())
        .map(|c| c.abs())
        .sum();
    let skip = finite_sum + 1.0;

    let n = nr + nc;
    let mut padded = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in cost.iter().enumerate() {
        padded[i][..nc].copy_from_slice(row);
        padded[i][nc + i] = skip;
    }
    for j in 0..nc {
        padded[nr + j][j] = skip;
        for i in 0..nr {
            padded[nr + j][nc + i] = 0.0;
        }
    }
    let assign = lapjv_rows(&padded, n, n);
    assign
        .iter()
        .take(nr)
        .enumerate()
        .filter_map(|(r, c)| match c {
            Some(c) if *c < nc && cost[r][*c].is_finite() => Some((r, *c)),
            _ => None,
        })
        .collect()
}

fn evaluate(cost: &[Vec<f64>], pairs: &[(usize, usize)]) -> (usize, f64) {
    (pairs.len(), pairs.iter().map(|&(r, c)| cost[r][c]).sum())
}

/// Like [`solve_gated`] but, among all optimal assignments, returns the one
/// whose (row, column) pair sequence is lexicographically smallest. Row by
/// row, the smallest column that preserves global optimality is committed;
/// leaving a row unmatched is considered only when no column preserves it.
pub fn solve_gated_lex(cost: &[Vec<f64>]) -> Vec<(usize, usize)> {
    let nr = cost.len();
    let nc = cost.first().map_or(0, |r| r.len());
    if nr == 0 || nc == 0 {
        return Vec::new();
    }

    let mut fixed: Vec<(usize, usize)> = Vec::new();
    let mut used_cols = vec![false; nc];

    // Evaluates fixed pairs + (row, maybe col) + optimal tail over rows > row.
    let tail_value = |fixed: &[(usize, usize)],
                      used_cols: &[bool],
                      row: usize,
                      choice: Option<usize>|
     -> Option<(usize, f64)> {
        let mut used = used_cols.to_vec();
        let mut base_cost = 0.0;
        let mut base_card = fixed.len();
        if let Some(c) = choice {
            if !cost[row][c].is_finite() || used[c] {
                return None;
            }
            used[c] = true;
            base_cost += cost[row][c];
            base_card += 1;
        }
        let tail_rows: Vec<usize> = (row + 1..nr).collect();
        let free_cols: Vec<usize> = (0..nc).filter(|&j| !used[j]).collect();
        let sub: Vec<Vec<f64>> = tail_rows
            .iter()
            .map(|&r| free_cols.iter().map(|&j| cost[r][j]).collect())
            .collect();
        let sub_pairs = solve_gated(&sub);
        let (card, c) = evaluate(&sub, &sub_pairs);
        let fixed_cost: f64 = fixed.iter().map(|&(r, c)| cost[r][c]).sum();
        Some((base_card + card, fixed_cost + base_cost + c))
    };

    for row in 0..nr {
        let mut best: Option<(usize, f64)> = None;
        let mut best_choice: Option<usize> = None;
        let candidates = (0..nc)
            .filter(|&j| !used_cols[j] && cost[row][j].is_finite())
            .map(Some)
            .chain(std::iter::once(None));
        for choice in candidates {
            if let Some((card, total)) = tail_value(&fixed, &used_cols, row, choice) {
                let better = match best {
                    None => true,
                    Some((bc, bt)) => card > bc || (card == bc && total < bt),
                };
                if better {
                    best = Some((card, total));
                    best_choice = choice;
                }
            }
        }
        if let Some(c) = best_choice {
            used_cols[c] = true;
            fixed.push((row, c));
        }
    }
    fixed
}
