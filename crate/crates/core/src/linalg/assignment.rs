/// Maximum-weight one-to-one assignment on a rectangular weight matrix
/// (Hungarian algorithm with potentials on the padded square problem).
///
/// Returns, for every row, the assigned column or `None` when the row was
/// paired with padding. Weights are expected to be non-negative.
pub fn max_weight_assignment(weights: &[Vec<f64>], n_cols: usize) -> Vec<Option<usize>> {
    let n_rows = weights.len();
    let n = n_rows.max(n_cols);
    if n == 0 {
        return Vec::new();
    }
    let wmax = weights.iter().flatten().fold(0.0_f64, |a, &b| a.max(b));
    // cost[i][j] = wmax - w (minimization), padding has weight 0.
    let cost = |i: usize, j: usize| -> f64 {
        if i < n_rows && j < n_cols {
            wmax - weights[i][j]
        } else {
            wmax
        }
    };
    // 1-based e-maxx formulation.
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
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
    let mut out = vec![None; n_rows];
    for j in 1..=n {
        let i = p[j];
        if i >= 1 && i <= n_rows && j <= n_cols {
            out[i - 1] = Some(j - 1);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(weights: &[Vec<f64>], n_cols: usize) -> f64 {
        fn rec(w: &[Vec<f64>], row: usize, used: &mut Vec<bool>, acc: f64, best: &mut f64) {
            if row == w.len() {
                *best = best.max(acc);
                return;
            }
            rec(w, row + 1, used, acc, best);
            for j in 0..used.len() {
                if !used[j] {
                    used[j] = true;
                    rec(w, row + 1, used, acc + w[row][j], best);
                    used[j] = false;
                }
            }
        }
        let mut best = 0.0;
        rec(weights, 0, &mut vec![false; n_cols], 0.0, &mut best);
        best
    }

    #[test]
    fn matches_brute_force_on_rectangular_problems() {
        let mut seed = 7u64;
        let mut rnd = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (seed >> 33) as f64 / (1u64 << 31) as f64
        };
        for (r, c) in [(3, 3), (2, 4), (4, 2), (5, 5), (1, 3), (0, 2)] {
            let w: Vec<Vec<f64>> = (0..r).map(|_| (0..c).map(|_| rnd()).collect()).collect();
            let a = max_weight_assignment(&w, c);
            let total: f64 = a.iter().enumerate().filter_map(|(i, j)| j.map(|j| w[i][j])).sum();
            let mut cols: Vec<_> = a.iter().flatten().collect();
            cols.sort();
            cols.dedup();
            assert_eq!(cols.len(), a.iter().flatten().count());
            assert!((total - brute(&w, c)).abs() < 1e-12, "{r}x{c}");
        }
    }

    #[test]
    fn prefers_swapped_pairing_over_greedy() {
        // Greedy on row 0 would take column 0 (0.9), forcing 0.1 for row 1.
        let w = vec![vec![0.9, 0.8], vec![0.85, 0.1]];
        assert_eq!(max_weight_assignment(&w, 2), vec![Some(1), Some(0)]);
    }
}
