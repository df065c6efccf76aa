//! Mann-Whitney U rank-sum test for comparing solver cost samples.
//!
//! Small sample pairs (pooled size at most 20) get an exact two-sided p by
//! full enumeration of rank splits; larger pairs use the normal
//! approximation with tie correction and continuity correction. Both paths
//! are symmetric in their arguments.

use statrs::distribution::{ContinuousCDF, Normal};

/// Which computation produced the p-value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MwuMethod {
    Exact,
    NormalApprox,
}

/// Test result: `u` is the U statistic of the first sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MannWhitney {
    pub u: f64,
    pub p_value: f64,
    pub method: MwuMethod,
}

/// Pooled size up to which the exact enumeration runs.
pub const EXACT_LIMIT: usize = 20;

/// Two-sided Mann-Whitney U test of `a` against `b`. Ties receive average
/// ranks. Degenerate inputs (an empty sample) return `p = 1`.
pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> MannWhitney {
    let na = a.len();
    let nb = b.len();
    if na == 0 || nb == 0 {
        return MannWhitney {
            u: 0.0,
            p_value: 1.0,
            method: MwuMethod::Exact,
        };
    }

    let ranks = pooled_ranks(a, b);
    let r_a: f64 = ranks[..na].iter().sum();
    let u_a = r_a - (na * (na + 1)) as f64 / 2.0;

    if na + nb <= EXACT_LIMIT {
        MannWhitney {
            u: u_a,
            p_value: exact_p(&ranks, na, u_a),
            method: MwuMethod::Exact,
        }
    } else {
        MannWhitney {
            u: u_a,
            p_value: approx_p(&ranks, na, nb, u_a),
            method: MwuMethod::NormalApprox,
        }
    }
}

/// Average ranks of the pooled sample `a ++ b`, in input order.
fn pooled_ranks(a: &[f64], b: &[f64]) -> Vec<f64> {
    let pooled: Vec<f64> = a.iter().chain(b.iter()).copied().collect();
    let mut idx: Vec<usize> = (0..pooled.len()).collect();
    idx.sort_by(|&i, &j| pooled[i].total_cmp(&pooled[j]));
    let mut ranks = vec![0.0; pooled.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && pooled[idx[j + 1]] == pooled[idx[i]] {
            j += 1;
        }
        // Positions i..=j share the average of ranks i+1 ..= j+1.
        let avg = (i + j + 2) as f64 / 2.0;
        for &k in &idx[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Two-sided exact p: the share of all `C(n, na)` rank splits whose U is at
/// least as extreme (distance from the extremes, `min(U, na*nb - U)`) as
/// the observed one.
fn exact_p(ranks: &[f64], na: usize, u_obs: f64) -> f64 {
    let n = ranks.len();
    let nb = n - na;
    let nm = (na * nb) as f64;
    let offset = (na * (na + 1)) as f64 / 2.0;
    let extremity = |u: f64| u.min(nm - u);
    let threshold = extremity(u_obs) + 1e-9;

    let mut sorted = ranks.to_vec();
    sorted.sort_by(f64::total_cmp);

    // Lexicographic combinations of `na` pooled positions.
    let mut comb: Vec<usize> = (0..na).collect();
    let mut hits: u64 = 0;
    let mut total: u64 = 0;
    loop {
        let r: f64 = comb.iter().map(|&i| sorted[i]).sum();
        if extremity(r - offset) <= threshold {
            hits += 1;
        }
        total += 1;

        // Advance to the next combination.
        let mut i = na;
        loop {
            if i == 0 {
                return hits as f64 / total as f64;
            }
            i -= 1;
            if comb[i] != i + n - na {
                break;
            }
        }
        comb[i] += 1;
        for j in i + 1..na {
            comb[j] = comb[j - 1] + 1;
        }
    }
}

/// Normal approximation with tie correction and 0.5 continuity correction.
fn approx_p(ranks: &[f64], na: usize, nb: usize, u_a: f64) -> f64 {
    let n = (na + nb) as f64;
    let mean = (na * nb) as f64 / 2.0;

    // Tie correction needs the tie group sizes of the pooled sample.
    let mut sorted = ranks.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        i = j + 1;
    }

    let variance = (na * nb) as f64 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if variance <= 0.0 {
        return 1.0; // every pooled value identical
    }
    let z = ((u_a - mean).abs() - 0.5).max(0.0) / variance.sqrt();
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    (2.0 * (1.0 - normal.cdf(z))).clamp(0.0, 1.0)
}
