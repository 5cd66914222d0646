//! Brute-force vertex enumeration for `{x : ⟨a_i, x⟩ ≤ b_i}`.
//!
//! Tries every `d`-subset of constraints. Adequate for the desk-scale
//! polytopes this crate targets (d ≤ 10, a few dozen facets).

use nalgebra::DMatrix;

use crate::oracle::Vector;

pub(crate) fn enumerate(rows: &[Vector], offsets: &[f64]) -> Vec<Vector> {
    let m = rows.len();
    let d = rows.first().map_or(0, |r| r.len());
    let mut out: Vec<Vector> = Vec::new();
    if d == 0 || m < d {
        return out;
    }
    let mut idx: Vec<usize> = (0..d).collect();
    loop {
        let a = DMatrix::from_fn(d, d, |i, j| rows[idx[i]][j]);
        let b = Vector::from_iterator(d, idx.iter().map(|&i| offsets[i]));
        if let Some(x) = a.lu().solve(&b) {
            let feasible = rows
                .iter()
                .zip(offsets)
                .all(|(r, &bi)| r.dot(&x) <= bi + 1e-9 * (1.0 + bi.abs()));
            let fresh = out.iter().all(|v| (v - &x).norm() > 1e-9 * (1.0 + x.norm()));
            if feasible && fresh && x.iter().all(|v| v.is_finite()) {
                out.push(x);
            }
        }
        // next combination in lexicographic order
        let mut k = d;
        while k > 0 && idx[k - 1] == m - d + k - 1 {
            k -= 1;
        }
        if k == 0 {
            break;
        }
        idx[k - 1] += 1;
        for j in k..d {
            idx[j] = idx[j - 1] + 1;
        }
    }
    out
}
