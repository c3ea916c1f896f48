//! Nelder-Mead downhill simplex minimizer.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    /// Converged when every vertex is within `xtol·max(1, |x_best|)` of the
    /// best vertex in every coordinate.
    pub xtol: f64,
    pub max_evals: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            xtol: 1e-5,
            max_evals: 2000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub n_evals: usize,
    pub converged: bool,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

/// Minimizes `f` starting from `x0` with initial edge lengths `step`.
///
/// `f` may return `+∞` (or NaN, treated as `+∞`) to reject infeasible points.
pub fn minimize<F>(mut f: F, x0: &[f64], step: &[f64], opts: SimplexOptions) -> SimplexResult
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = x0.len();
    assert_eq!(step.len(), dim, "one step per coordinate");
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    pts.push(x0.to_vec());
    for i in 0..dim {
        let mut p = x0.to_vec();
        p[i] += step[i];
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| eval(p, &mut evals)).collect();

    let mut converged = false;
    let mut centroid = vec![0.0; dim];
    let mut trial = vec![0.0; dim];
    let mut trial2 = vec![0.0; dim];

    while evals < opts.max_evals {
        order(&mut pts, &mut vals);

        let best = &pts[0];
        let spread = pts[1..].iter().all(|p| {
            p.iter()
                .zip(best)
                .all(|(a, b)| (a - b).abs() <= opts.xtol * b.abs().max(1.0))
        });
        if spread && vals[0].is_finite() {
            converged = true;
            break;
        }

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for p in &pts[..dim] {
            for (c, v) in centroid.iter_mut().zip(p) {
                *c += v / dim as f64;
            }
        }
        let worst = dim;

        along(&centroid, &pts[worst], -REFLECT, &mut trial);
        let f_r = eval(&trial, &mut evals);

        if f_r < vals[0] {
            along(&centroid, &pts[worst], -EXPAND, &mut trial2);
            let f_e = eval(&trial2, &mut evals);
            if f_e < f_r {
                pts[worst].copy_from_slice(&trial2);
                vals[worst] = f_e;
            } else {
                pts[worst].copy_from_slice(&trial);
                vals[worst] = f_r;
            }
            continue;
        }
        if f_r < vals[dim - 1] {
            pts[worst].copy_from_slice(&trial);
            vals[worst] = f_r;
            continue;
        }

        // Contraction: outside if the reflection improved on the worst point.
        let (f_c, accept) = if f_r < vals[worst] {
            along(&centroid, &pts[worst], -CONTRACT, &mut trial2);
            let f_c = eval(&trial2, &mut evals);
            (f_c, f_c <= f_r)
        } else {
            along(&centroid, &pts[worst], CONTRACT, &mut trial2);
            let f_c = eval(&trial2, &mut evals);
            (f_c, f_c < vals[worst])
        };
        if accept {
            pts[worst].copy_from_slice(&trial2);
            vals[worst] = f_c;
            continue;
        }

        let (head, tail) = pts.split_at_mut(1);
        let best = &head[0];
        for (p, v) in tail.iter_mut().zip(vals[1..].iter_mut()) {
            for (pi, bi) in p.iter_mut().zip(best) {
                *pi = bi + SHRINK * (*pi - bi);
            }
            *v = eval(p, &mut evals);
        }
    }
    order(&mut pts, &mut vals);
    SimplexResult {
        x: pts.swap_remove(0),
        f: vals[0],
        n_evals: evals,
        converged,
    }
}

/// `out = c + t·(p − c)`.
fn along(c: &[f64], p: &[f64], t: f64, out: &mut [f64]) {
    for ((o, ci), pi) in out.iter_mut().zip(c).zip(p) {
        *o = ci + t * (pi - ci);
    }
}

fn order(pts: &mut [Vec<f64>], vals: &mut [f64]) {
    // insertion sort keeps ties in their existing order
    for i in 1..vals.len() {
        let mut j = i;
        while j > 0 && vals[j] < vals[j - 1] {
            vals.swap(j, j - 1);
            pts.swap(j, j - 1);
            j -= 1;
        }
    }
}
