//! Independent dense oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ultrametric::cauchy::{CauchyProblem, FreeParams, DEFAULT_EPSILON};
use ultrametric::distributions::{CoeffIndex, GeneralizedFunction, LizorkinSeries};
use ultrametric::pdo::{Symbol, Tail};
use ultrametric::product::{MultiOperator, ProductSpace, Term};
use ultrametric::tree::{BallId, BallTree};
use ultrametric::wavelets::{Wavelet, WaveletBasis};
use ultrametric::Complex64;

pub type CMatrix = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// Lowest common ancestor by walking parent links, without the tree's own `sup`.
pub fn brute_lca(tree: &BallTree, a: BallId, b: BallId) -> BallId {
    let mut ancestors = vec![a];
    let mut x = a;
    while let Some(p) = tree.parent(x) {
        ancestors.push(p);
        x = p;
    }
    let mut y = b;
    loop {
        if ancestors.contains(&y) {
            return y;
        }
        y = tree.parent(y).expect("balls share the root");
    }
}

pub fn leaf_measures(tree: &BallTree) -> Vec<f64> {
    tree.leaves().iter().map(|&l| tree.measure(l)).collect()
}

/// Leaf measures of a product grid, factor 0 varying slowest.
pub fn grid_measures(trees: &[BallTree]) -> Vec<f64> {
    let mut out = vec![1.0];
    for t in trees {
        let m = leaf_measures(t);
        out = out
            .iter()
            .flat_map(|a| m.iter().map(move |b| a * b))
            .collect();
    }
    out
}

/// Kernel matrix `K[x][y] = T(sup(x,y)) ν(y)` minus its row sums on the diagonal,
/// assembled from the symbol's ball values and brute-force ancestors.
pub fn dense_operator(tree: &BallTree, symbol: &Symbol) -> CMatrix {
    let leaves = tree.leaves();
    let n = leaves.len();
    let mut m = CMatrix::zeros(n, n);
    for x in 0..n {
        let mut diag = c(0.0, 0.0);
        for y in 0..n {
            if x == y {
                continue;
            }
            let s = brute_lca(tree, leaves[x], leaves[y]);
            let k = symbol.value(tree, s).unwrap() * tree.measure(leaves[y]);
            m[(x, y)] = -k;
            diag += k;
        }
        m[(x, x)] = diag;
    }
    m
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Dense matrix of a polynomial operator on a product grid.
pub fn dense_multi_operator(trees: &[BallTree], op: &MultiOperator) -> CMatrix {
    let sizes: Vec<usize> = trees.iter().map(|t| t.leaf_count()).collect();
    let total: usize = sizes.iter().product();
    let embedded: Vec<CMatrix> = (0..trees.len())
        .map(|i| {
            let mut acc = CMatrix::identity(1, 1);
            for (k, t) in trees.iter().enumerate() {
                let part = if k == i {
                    dense_operator(t, &op.symbols()[i])
                } else {
                    CMatrix::identity(t.leaf_count(), t.leaf_count())
                };
                acc = kron(&acc, &part);
            }
            acc
        })
        .collect();
    let mut out = CMatrix::zeros(total, total);
    for term in op.terms() {
        let mut m = CMatrix::identity(total, total);
        for &i in &term.factors {
            m = &embedded[i] * m;
        }
        out += m * term.coeff;
    }
    out
}

pub fn column(v: &[Complex64]) -> CMatrix {
    CMatrix::from_column_slice(v.len(), 1, v)
}

pub fn max_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn wavelet_at(tree: &BallTree, ball: BallId, j: usize) -> Wavelet {
    WaveletBasis::new(tree).get(ball, j).unwrap().clone()
}

/// Values on the leaves of one factor of a series term.
fn term_factor(tree: &BallTree, anchor: BallId, ball: BallId, j: usize) -> Vec<Complex64> {
    let n = tree.leaf_count();
    if j == 0 {
        return vec![c(1.0, 0.0); n];
    }
    let dense = wavelet_at(tree, ball, j).to_dense(tree);
    let m = leaf_measures(tree);
    let at_anchor: Complex64 = tree.leaf_span(anchor).map(|k| dense[k] * m[k]).sum();
    dense
        .iter()
        .map(|&v| v - at_anchor / tree.measure(anchor))
        .collect()
}

/// Grid values of the series, summed term by term over the whole product.
pub fn dense_series(trees: &[BallTree], u: &GeneralizedFunction) -> Vec<Complex64> {
    let len: usize = trees.iter().map(|t| t.leaf_count()).product();
    let mut out = vec![c(0.0, 0.0); len];
    for (idx, &v) in u.coeffs() {
        let mut vals = vec![v];
        for (i, t) in trees.iter().enumerate() {
            let f = term_factor(t, u.anchor()[i], idx.balls[i], idx.j[i]);
            vals = vals
                .iter()
                .flat_map(|a| f.iter().map(move |b| a * b))
                .collect();
        }
        for (o, x) in out.iter_mut().zip(vals) {
            *o += x;
        }
    }
    out
}

/// Grid indicator of a product of balls.
pub fn dense_char(trees: &[BallTree], balls: &[BallId]) -> Vec<Complex64> {
    let mut vals = vec![c(1.0, 0.0)];
    for (t, &b) in trees.iter().zip(balls) {
        let span = t.leaf_span(b);
        let f: Vec<Complex64> = (0..t.leaf_count())
            .map(|k| {
                if span.contains(&k) {
                    c(1.0, 0.0)
                } else {
                    c(0.0, 0.0)
                }
            })
            .collect();
        vals = vals
            .iter()
            .flat_map(|a| f.iter().map(move |b| a * b))
            .collect();
    }
    vals
}

/// The extended function of an index: `χ_{I_0^i}` where `j^i = 0`, wavelets elsewhere.
pub fn dense_extended(trees: &[BallTree], idx: &CoeffIndex) -> Vec<Complex64> {
    let mut vals = vec![c(1.0, 0.0)];
    for (i, t) in trees.iter().enumerate() {
        let f = if idx.j[i] == 0 {
            dense_char(std::slice::from_ref(t), &[idx.balls[i]])
        } else {
            wavelet_at(t, idx.balls[i], idx.j[i]).to_dense(t)
        };
        vals = vals
            .iter()
            .flat_map(|a| f.iter().map(move |b| a * b))
            .collect();
    }
    vals
}

/// `∫ u · g dν` over the grid.
pub fn integrate(u: &[Complex64], g: &[Complex64], measures: &[f64]) -> Complex64 {
    u.iter()
        .zip(g)
        .zip(measures)
        .map(|((a, b), m)| a * b * m)
        .sum()
}

/// Dense multiwavelet `⊗ ψ_{I^i j^i}`.
pub fn dense_multiwavelet(trees: &[BallTree], idx: &CoeffIndex) -> Vec<Complex64> {
    assert!(idx.is_wavelet());
    dense_extended(trees, idx)
}

/// Every genuine multiwavelet index of a product.
pub fn all_multiwavelet_indices(trees: &[BallTree]) -> Vec<CoeffIndex> {
    let mut out: Vec<CoeffIndex> = vec![CoeffIndex::new(vec![], vec![])];
    for t in trees {
        let basis = WaveletBasis::new(t);
        out = out
            .into_iter()
            .flat_map(|idx| {
                basis.iter().map(move |w| {
                    let mut k = idx.clone();
                    k.balls.push(w.ball());
                    k.j.push(w.j());
                    k
                })
            })
            .collect();
    }
    out
}

pub fn random_table_symbol(tree: &BallTree, rng: &mut ChaCha8Rng) -> Symbol {
    let entries: BTreeMap<BallId, Complex64> = tree
        .interior_balls()
        .into_iter()
        .map(|b| (b, random_complex(rng)))
        .collect();
    Symbol::table(tree, entries).unwrap()
}

/// A ball of positive measure chosen uniformly.
pub fn random_anchor(tree: &BallTree, rng: &mut ChaCha8Rng) -> BallId {
    let balls: Vec<BallId> = tree.balls().filter(|&b| tree.measure(b) > 0.0).collect();
    balls[rng.random_range(0..balls.len())]
}

/// A random Cauchy problem whose right-hand side avoids characteristic vertices.
/// Every boundary index (some `j^i = 0`) gets a random value.
pub fn random_problem(trees: Vec<BallTree>, rng: &mut ChaCha8Rng) -> CauchyProblem {
    let n = trees.len();
    let symbols: Vec<Symbol> = trees.iter().map(|t| random_table_symbol(t, rng)).collect();
    let terms = if n == 1 {
        vec![Term {
            factors: vec![0],
            coeff: random_complex(rng),
        }]
    } else {
        vec![
            Term {
                factors: vec![0],
                coeff: random_complex(rng),
            },
            Term {
                factors: vec![1],
                coeff: random_complex(rng),
            },
            Term {
                factors: vec![0, 1],
                coeff: random_complex(rng),
            },
        ]
    };
    let operator = MultiOperator::new(symbols, vec![Tail::None; n], terms).unwrap();
    let space = ProductSpace::plain(trees.clone()).unwrap();
    let spectrum = operator.spectrum(&space).unwrap();
    let mut rhs = BTreeMap::new();
    for idx in all_multiwavelet_indices(&trees) {
        let v = ultrametric::product::HyperVertex::from_balls(&idx.balls);
        let lambda = spectrum.eigenvalue(&v).unwrap();
        if lambda.norm() > DEFAULT_EPSILON * spectrum.scale(&v).unwrap() && rng.random_bool(0.7) {
            rhs.insert(idx, random_complex(rng));
        }
    }
    let anchor: Vec<BallId> = trees.iter().map(|t| random_anchor(t, rng)).collect();
    let boundary = ultrametric::distributions::extended_indices(&trees[..], &anchor)
        .into_iter()
        .filter(|k| !k.is_wavelet())
        .map(|k| (k, random_complex(rng)))
        .collect();
    CauchyProblem {
        space,
        operator,
        rhs: LizorkinSeries::new(rhs).unwrap(),
        anchor,
        boundary,
        epsilon: DEFAULT_EPSILON,
        free_params: FreeParams::Zero,
    }
}

/// Random sparse generalized function with about `density` of the extended indices set.
pub fn random_generalized(
    trees: &[BallTree],
    rng: &mut ChaCha8Rng,
    density: f64,
) -> GeneralizedFunction {
    let anchor: Vec<BallId> = trees.iter().map(|t| random_anchor(t, rng)).collect();
    let coeffs = ultrametric::distributions::extended_indices(trees, &anchor)
        .into_iter()
        .filter_map(|k| rng.random_bool(density).then(|| (k, random_complex(rng))))
        .collect();
    GeneralizedFunction::new(trees, anchor, coeffs).unwrap()
}

/// Relative max-norm distance.
pub fn rel_err(got: &[Complex64], want: &[Complex64]) -> f64 {
    let diff: Vec<Complex64> = got.iter().zip(want).map(|(a, b)| a - b).collect();
    max_norm(&diff) / max_norm(want).max(f64::MIN_POSITIVE)
}
