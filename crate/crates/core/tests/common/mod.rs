#![allow(dead_code)]

//! Test-side oracles: dense rank over F_p on explicit index windows, with the
//! shifts written out by hand. Nothing here calls the engine.

pub fn rank_mod_p(rows: &[Vec<u64>], p: u64) -> usize {
    let mut m: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|x| x % p).collect()).collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..m.len()).find(|&r| m[r][c] != 0) else { continue };
        m.swap(rank, piv);
        let inv = pow_mod(m[rank][c], p - 2, p);
        for x in m[rank].iter_mut() {
            *x = *x * inv % p;
        }
        for r in 0..m.len() {
            if r != rank && m[r][c] != 0 {
                let f = m[r][c];
                let pivot = m[rank].clone();
                for (x, y) in m[r].iter_mut().zip(&pivot) {
                    *x = (*x + p * p - f * y) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

pub fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

/// Shift by `delta` of a dense vector on the window `lo..lo+len`; entries
/// leaving `ℕ` (when `nat`) are dropped, leaving the window panics.
pub fn shift(v: &[u64], lo: i64, delta: i64, nat: bool) -> Vec<u64> {
    let mut out = vec![0; v.len()];
    for (k, &x) in v.iter().enumerate() {
        if x == 0 {
            continue;
        }
        let i = lo + k as i64 + delta;
        if nat && i < 0 {
            continue;
        }
        let j = i - lo;
        assert!((0..v.len() as i64).contains(&j), "window too small");
        out[j as usize] = x;
    }
    out
}

/// `log_p |C_n|` for a shift by `delta` (pullback on functionals) and the
/// kernel of `rows`, for `n = 1..=n_max`.
///
/// A right shift `e_i ↦ e_{i+1}` pulls `e_j*` back to `e_{j-1}*`, so its
/// functional action is a shift by `-1`; the left shift acts by `+1`.
pub fn shift_cotrajectory_logs(rows: &[Vec<u64>], lo: i64, delta: i64, nat: bool, p: u64, n_max: usize) -> Vec<usize> {
    let mut acc: Vec<Vec<u64>> = Vec::new();
    let mut frontier: Vec<Vec<u64>> = rows.to_vec();
    let mut out = Vec::new();
    for _ in 0..n_max {
        acc.extend(frontier.iter().cloned());
        out.push(rank_mod_p(&acc, p));
        frontier = frontier.iter().map(|v| shift(v, lo, delta, nat)).collect();
    }
    out
}

/// Dense vector of length `len` with the given `(index - lo, value)` entries.
pub fn dense(len: usize, lo: i64, entries: &[(i64, u64)]) -> Vec<u64> {
    let mut v = vec![0; len];
    for &(i, x) in entries {
        v[(i - lo) as usize] = x;
    }
    v
}
