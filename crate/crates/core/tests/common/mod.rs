//! Reference computations shared by the integration tests. Nothing here
//! calls into the library's own solvers, so agreement is evidence rather
//! than a tautology.
#![allow(dead_code)]

use rand::Rng;
use rand_distr::StandardNormal;

pub fn gaussian<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Uniform on the unit sphere by normalizing a Gaussian.
pub fn sphere_point<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let g = gaussian(rng, n);
        let r = norm(&g);
        if r > 1e-12 {
            return g.into_iter().map(|x| x / r).collect();
        }
    }
}

/// Uniform in the unit ball: a sphere point at radius `U^{1/n}`.
pub fn ball_point<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let r = rng.gen::<f64>().powf(1.0 / n as f64);
    sphere_point(rng, n).into_iter().map(|x| x * r).collect()
}

/// Uniform on the probability simplex (normalized exponentials).
pub fn simplex_point<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}

pub fn project_ball(y: &[f64], r: f64) -> Vec<f64> {
    let ny = norm(y);
    if ny <= r {
        y.to_vec()
    } else {
        y.iter().map(|x| x * r / ny).collect()
    }
}

/// Every source-to-sink path of a DAG given as an edge list, each path
/// a list of edge indices.
pub fn dag_paths(edges: &[(usize, usize)], source: usize, sink: usize) -> Vec<Vec<usize>> {
    fn walk(edges: &[(usize, usize)], u: usize, sink: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if u == sink {
            out.push(path.clone());
            return;
        }
        for (e, &(a, b)) in edges.iter().enumerate() {
            if a == u {
                path.push(e);
                walk(edges, b, sink, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    walk(edges, source, sink, &mut Vec::new(), &mut out);
    out
}

/// Forward edges with probability `density` plus a random chain from the
/// first to the last node.
pub fn random_dag_edges<R: Rng>(rng: &mut R, nodes: usize, density: f64) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for u in 0..nodes {
        for v in u + 1..nodes {
            if rng.gen::<f64>() < density {
                edges.push((u, v));
            }
        }
    }
    let mut u = 0;
    while u + 1 < nodes {
        let v = rng.gen_range(u + 1..nodes);
        if !edges.contains(&(u, v)) {
            edges.push((u, v));
        }
        u = v;
    }
    edges
}

/// Minimum of `c` over all 0/1 vectors with at most `k` ones.
pub fn matroid_brute_force(c: &[f64], k: usize) -> f64 {
    let n = c.len();
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize <= k)
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).map(|i| c[i]).sum::<f64>())
        .fold(f64::INFINITY, f64::min)
}

/// Singular values of a row-major `m x n` matrix, largest first, by
/// one-sided Jacobi rotations on the shorter side.
pub fn jacobi_singular_values(a: &[f64], m: usize, n: usize) -> Vec<f64> {
    assert_eq!(a.len(), m * n);
    // rows of A if m <= n, else columns; their Gram matrix has the same
    // nonzero spectrum as AᵀA
    let mut vecs: Vec<Vec<f64>> = if m <= n {
        (0..m).map(|i| a[i * n..(i + 1) * n].to_vec()).collect()
    } else {
        (0..n).map(|j| (0..m).map(|i| a[i * n + j]).collect()).collect()
    };
    let k = vecs.len();
    for _sweep in 0..100 {
        let mut rotated = false;
        for p in 0..k {
            for q in p + 1..k {
                let alpha = dot(&vecs[p], &vecs[p]);
                let beta = dot(&vecs[q], &vecs[q]);
                let gamma = dot(&vecs[p], &vecs[q]);
                if gamma.abs() <= 1e-15 * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (lo, hi) = vecs.split_at_mut(q);
                for (x, y) in lo[p].iter_mut().zip(hi[0].iter_mut()) {
                    let (xp, yq) = (*x, *y);
                    *x = c * xp - s * yq;
                    *y = s * xp + c * yq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut s: Vec<f64> = vecs.iter().map(|v| norm(v)).collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Least-squares slope of `ln series[t-1]` on `ln t` over
/// `t ∈ [from_frac·T, T]`, skipping non-positive values.
pub fn loglog_slope(series: &[f64], from_frac: f64) -> Option<f64> {
    let horizon = series.len();
    let start = ((from_frac * horizon as f64).ceil() as usize).max(1);
    let pts: Vec<(f64, f64)> = (start..=horizon)
        .filter(|&t| series[t - 1] > 0.0)
        .map(|t| ((t as f64).ln(), series[t - 1].ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Some(sxy / sxx)
}

/// `E|z - w U|` for `U` uniform on `[-1, 1]`.
pub fn uniform_abs_mean(z: f64, w: f64) -> f64 {
    if w == 0.0 || z.abs() >= w {
        z.abs()
    } else {
        (z * z + w * w) / (2.0 * w)
    }
}

pub fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let k = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / k;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

/// Euclidean projection onto the probability simplex by checking the KKT
/// conditions of every support pattern.
pub fn simplex_projection_kkt(y: &[f64]) -> Vec<f64> {
    let n = y.len();
    for mask in 1u32..1 << n {
        let support: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let theta = (support.iter().map(|&i| y[i]).sum::<f64>() - 1.0) / support.len() as f64;
        let inside = support.iter().all(|&i| y[i] - theta >= 0.0);
        let outside = (0..n).filter(|i| mask >> i & 1 == 0).all(|i| y[i] - theta <= 0.0);
        if inside && outside {
            return (0..n).map(|i| if mask >> i & 1 == 1 { y[i] - theta } else { 0.0 }).collect();
        }
    }
    unreachable!("some support satisfies the KKT conditions")
}
