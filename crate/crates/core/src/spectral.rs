//! Spectral expansion and the Expander Mixing Lemma as a checkable predicate.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::GraphError;
use crate::graph::{BipartiteGraph, RegularGraph};

/// Largest vertex count handled by the dense eigensolver.
pub const DENSE_CAP: usize = 512;
pub const ITERATION_BUDGET: usize = 100_000;
pub const TOLERANCE: f64 = 1e-6;

/// `λ = max(λ2, |λn|)` of the adjacency spectrum.
pub fn expansion_lambda(g: &RegularGraph) -> Result<f64, GraphError> {
    if g.n() <= DENSE_CAP {
        let n = g.n();
        let mut a = DMatrix::<f64>::zeros(n, n);
        for v in 0..n {
            for &u in g.neighbors(v) {
                a[(v, u)] += 1.0;
            }
        }
        let mut eig: Vec<f64> = SymmetricEigen::new(a).eigenvalues.iter().copied().collect();
        eig.sort_by(|x, y| y.total_cmp(x));
        Ok(second_magnitude(&eig))
    } else {
        power_lambda(g.n(), |x, out| {
            for (v, o) in out.iter_mut().enumerate() {
                *o = g.neighbors(v).iter().map(|&u| x[u]).sum();
            }
        })
    }
}

fn second_magnitude(sorted_desc: &[f64]) -> f64 {
    match sorted_desc {
        [] | [_] => 0.0,
        [_, second, ..] => second.max(sorted_desc.last().unwrap().abs()),
    }
}

/// Second singular value of the biadjacency matrix.
pub fn bipartite_lambda(g: &BipartiteGraph) -> Result<f64, GraphError> {
    let n = g.n();
    if n <= DENSE_CAP {
        let mut b = DMatrix::<f64>::zeros(n, n);
        for v in 0..n {
            for i in 0..g.d() {
                b[(v, g.left_port(v, i).0)] += 1.0;
            }
        }
        let gram = &b * b.transpose();
        let mut eig: Vec<f64> = SymmetricEigen::new(gram)
            .eigenvalues
            .iter()
            .map(|x| x.max(0.0).sqrt())
            .collect();
        eig.sort_by(|x, y| y.total_cmp(x));
        Ok(eig.get(1).copied().unwrap_or(0.0))
    } else {
        // Apply B·Bᵀ; its top eigenvalue d² has the all-ones eigenvector.
        let d = g.d();
        let lam_sq = power_lambda(n, |x, out| {
            let mut y = vec![0.0; n];
            for v in 0..n {
                for i in 0..d {
                    y[g.left_port(v, i).0] += x[v];
                }
            }
            for v in 0..n {
                out[v] = (0..d).map(|i| y[g.left_port(v, i).0]).sum();
            }
        })?;
        Ok(lam_sq.sqrt())
    }
}

/// Power iteration on `A²` restricted to the complement of the all-ones
/// vector, which is the top eigenvector of every regular graph. Returns the
/// largest remaining eigenvalue magnitude of `A`.
fn power_lambda(n: usize, apply: impl Fn(&[f64], &mut [f64])) -> Result<f64, GraphError> {
    if n < 2 {
        return Ok(0.0);
    }
    let deflate = |x: &mut DVector<f64>| {
        let mean = x.mean();
        x.add_scalar_mut(-mean);
    };
    let mut x = DVector::from_fn(n, |i, _| ((i as f64 * 0.754_877_666).fract() - 0.5) + 1e-3 * i as f64);
    deflate(&mut x);
    x.normalize_mut();
    let mut tmp = DVector::zeros(n);
    let mut y = DVector::zeros(n);
    let mut estimate = 0.0;
    let mut residual = f64::INFINITY;
    for _ in 0..ITERATION_BUDGET {
        apply(x.as_slice(), tmp.as_mut_slice());
        apply(tmp.as_slice(), y.as_mut_slice());
        deflate(&mut y);
        let rayleigh = x.dot(&y);
        let norm = y.norm();
        if norm == 0.0 {
            return Ok(0.0);
        }
        let next = rayleigh.max(0.0).sqrt();
        residual = (&y - &x * rayleigh).norm();
        y /= norm;
        std::mem::swap(&mut x, &mut y);
        if (next - estimate).abs() < TOLERANCE * 1e-2 && residual < TOLERANCE * next.max(1.0) {
            return Ok(next);
        }
        estimate = next;
    }
    Err(GraphError::NoConvergence { residual })
}

/// Both sides of the mixing inequality `|E(S,T) − (d/n)|S||T|| ≤ λ√(|S||T|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixingCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Evaluates the mixing inequality with `E(S, T)` counted exactly.
/// `left` and `right` are membership masks over the `n` vertices of each side.
pub fn mixing_check(g: &BipartiteGraph, left: &[bool], right: &[bool], lambda: f64) -> MixingCheck {
    assert_eq!(left.len(), g.n());
    assert_eq!(right.len(), g.n());
    let mut edges = 0usize;
    for v in (0..g.n()).filter(|&v| left[v]) {
        edges += (0..g.d()).filter(|&i| right[g.left_port(v, i).0]).count();
    }
    let s = left.iter().filter(|&&b| b).count() as f64;
    let t = right.iter().filter(|&&b| b).count() as f64;
    let lhs = (edges as f64 - g.d() as f64 / g.n() as f64 * s * t).abs();
    let rhs = lambda * (s * t).sqrt();
    MixingCheck {
        lhs,
        rhs,
        holds: lhs <= rhs + 1e-9,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < TOLERANCE
    }

    #[test]
    fn complete_graph_lambda_is_one() {
        for n in 3..9 {
            assert!(close(
                expansion_lambda(&RegularGraph::complete(n).unwrap()).unwrap(),
                1.0
            ));
        }
    }

    #[test]
    fn disconnected_lambda_is_degree() {
        let k4 = RegularGraph::complete(4).unwrap();
        let two = k4.disjoint_union(&k4).unwrap();
        assert_eq!(two.components(), 2);
        assert!(close(expansion_lambda(&two).unwrap(), 3.0));
    }

    #[test]
    fn cycle_lambda() {
        // Spectrum 2cos(2πk/6): {2, 1, 1, -1, -1, -2}; the -2 makes λ = 2.
        let c6 = RegularGraph::cycle(6).unwrap();
        let lam = expansion_lambda(&c6).unwrap();
        assert!(close(lam, 2.0));
        let mut eig: Vec<f64> = (0..6)
            .map(|k| 2.0 * (2.0 * std::f64::consts::PI * k as f64 / 6.0).cos())
            .collect();
        eig.sort_by(|x, y| y.total_cmp(x));
        assert!(close(eig[1], 1.0));
        assert!(close(second_magnitude(&eig), lam));
        // Odd cycle: 2cos(2π·2/5) in magnitude is the largest non-trivial value.
        let c5 = expansion_lambda(&RegularGraph::cycle(5).unwrap()).unwrap();
        assert!(close(c5, (2.0 * (4.0 * std::f64::consts::PI / 5.0).cos()).abs()));
    }

    #[test]
    fn bipartite_lambdas() {
        assert!(close(
            bipartite_lambda(&BipartiteGraph::complete_bipartite(5)).unwrap(),
            0.0
        ));
        let k4 = RegularGraph::complete(4).unwrap();
        let cover = BipartiteGraph::double_cover(&k4);
        assert!(close(bipartite_lambda(&cover).unwrap(), expansion_lambda(&k4).unwrap()));
        let k22 = BipartiteGraph::complete_bipartite(2);
        let two = k22.disjoint_union(&k22).unwrap();
        assert!(close(bipartite_lambda(&two).unwrap(), 2.0));
    }

    #[test]
    fn iterative_path_matches_dense() {
        let g = RegularGraph::random_regular(60, 4, 11).unwrap();
        let dense = expansion_lambda(&g).unwrap();
        let iter = power_lambda(g.n(), |x, out| {
            for (v, o) in out.iter_mut().enumerate() {
                *o = g.neighbors(v).iter().map(|&u| x[u]).sum();
            }
        })
        .unwrap();
        assert!((dense - iter).abs() < 1e-4, "{dense} vs {iter}");
    }

    #[test]
    fn connected_non_bipartite_graphs_expand() {
        for seed in 0..5 {
            let g = RegularGraph::random_regular(30, 3, seed).unwrap();
            if g.components() == 1 {
                assert!(expansion_lambda(&g).unwrap() < 3.0 - 1e-6);
            }
        }
    }

    #[test]
    fn mixing_trivial_cases() {
        let g = BipartiteGraph::double_cover(&RegularGraph::complete(8).unwrap());
        let all = vec![true; 8];
        let none = vec![false; 8];
        let c = mixing_check(&g, &all, &all, 1.0);
        assert!(c.lhs.abs() < 1e-9 && c.holds);
        let c = mixing_check(&g, &none, &all, 1.0);
        assert_eq!((c.lhs, c.rhs), (0.0, 0.0));
        assert!(c.holds);
    }

    #[test]
    fn mixing_holds_on_random_subsets() {
        let base = RegularGraph::complete(8).unwrap();
        let g = BipartiteGraph::double_cover(&base);
        let lam = expansion_lambda(&base).unwrap() + 1e-6;
        let mut rng = SplitMix64::new(17);
        for _ in 0..10_000 {
            let s: Vec<bool> = (0..8).map(|_| rng.next_bool()).collect();
            let t: Vec<bool> = (0..8).map(|_| rng.next_bool()).collect();
            assert!(mixing_check(&g, &s, &t, lam).holds);
        }
    }
}
