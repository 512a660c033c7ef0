//! Ultrametric pseudodifferential operators
//!
//! `Tf(x) = ∫ T(sup(x, y)) (f(x) - f(y)) dν(y)`
//!
//! with a complex symbol `T` on balls. Every wavelet at ball `I` is an
//! eigenfunction, with eigenvalue
//!
//! `λ_I = T(I) ν(I) + Σ_{J ⊋ I} T(J) (ν(J) - ν(J(I)))`
//!
//! where `J(I)` is the maximal subball of `J` containing `I`.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::par;
use crate::tree::{BallId, BallTree};
use crate::wavelets::TestFunction;

#[derive(Clone, Debug, PartialEq)]
pub enum Symbol {
    /// Explicit values on (at least) every non-leaf ball.
    Table(BTreeMap<BallId, Complex64>),
    /// `T(J) = c · diam(J)^(-beta)`.
    Homogeneous { c: Complex64, beta: f64 },
}

/// How the ancestor sum is continued above the root of a finite tree.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Tail {
    /// The tree is the whole space.
    #[default]
    None,
    /// The tree is the unit ball of `Q_p`; the homogeneous symbol continues on
    /// the balls `p^-k Z_p`, `k ≥ 1`.
    HomogeneousExtension,
}

impl Symbol {
    /// A table symbol, checked to cover every non-leaf ball of `tree`.
    pub fn table(tree: &BallTree, entries: BTreeMap<BallId, Complex64>) -> Result<Self> {
        for &b in entries.keys() {
            tree.check(b)?;
        }
        if let Some(b) = tree
            .interior_balls()
            .into_iter()
            .find(|b| !entries.contains_key(b))
        {
            return Err(Error::Domain(format!(
                "symbol table has no value for ball {b}"
            )));
        }
        Ok(Symbol::Table(entries))
    }

    pub fn homogeneous(c: Complex64, beta: f64) -> Self {
        Symbol::Homogeneous { c, beta }
    }

    pub fn value(&self, tree: &BallTree, b: BallId) -> Result<Complex64> {
        match self {
            Symbol::Table(m) => m
                .get(&b)
                .copied()
                .ok_or_else(|| Error::Domain(format!("symbol table has no value for ball {b}"))),
            Symbol::Homogeneous { c, beta } => Ok(c * tree.diameter(b).powf(-beta)),
        }
    }

    /// Symbol values indexed by ball id; `None` on leaves.
    fn values(&self, tree: &BallTree) -> Result<Vec<Option<Complex64>>> {
        tree.balls()
            .map(|b| {
                if tree.is_leaf(b) {
                    Ok(None)
                } else {
                    self.value(tree, b).map(Some)
                }
            })
            .collect()
    }

    /// `max |T(J)|` over non-leaf balls.
    pub fn max_abs(&self, tree: &BallTree) -> Result<f64> {
        Ok(self
            .values(tree)?
            .into_iter()
            .flatten()
            .map(|v| v.norm())
            .fold(0.0, f64::max))
    }

    /// The same symbol multiplied by `k`.
    pub fn scaled(&self, k: Complex64) -> Symbol {
        match self {
            Symbol::Table(m) => Symbol::Table(m.iter().map(|(b, v)| (*b, v * k)).collect()),
            Symbol::Homogeneous { c, beta } => Symbol::Homogeneous {
                c: c * k,
                beta: *beta,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Convergence {
    pub converges: bool,
    /// Ratio of consecutive tail terms, for geometric tails.
    pub ratio: Option<f64>,
    pub diagnostic: String,
}

/// Whether the ancestor series converges absolutely for every ball.
pub fn check_convergence(symbol: &Symbol, tree: &BallTree, tail: Tail) -> Convergence {
    match tail {
        Tail::None => Convergence {
            converges: true,
            ratio: None,
            diagnostic: "finite tree: the ancestor sum is finite".into(),
        },
        Tail::HomogeneousExtension => match (symbol, tree.padic_params()) {
            (Symbol::Homogeneous { c, beta }, Some((p, _))) => {
                let ratio = (p as f64).powf(1.0 - beta);
                let converges = c.norm() == 0.0 || ratio < 1.0;
                Convergence {
                    converges,
                    ratio: Some(ratio),
                    diagnostic: format!(
                        "tail terms grow by p^(1-beta) = {ratio} per level; {}",
                        if converges {
                            "converges"
                        } else {
                            "diverges (needs beta > 1)"
                        }
                    ),
                }
            }
            _ => Convergence {
                converges: false,
                ratio: None,
                diagnostic: "tail needs a homogeneous symbol on a p-adic tree".into(),
            },
        },
    }
}

/// `Σ_{J ⊋ root} T(J)(ν(J) - ν(J(root)))` over the balls above the truncation root.
/// The same constant is added to every eigenvalue.
pub fn tail_sum(tree: &BallTree, symbol: &Symbol) -> Result<Complex64> {
    let (Symbol::Homogeneous { c, beta }, Some((p, _))) = (symbol, tree.padic_params()) else {
        return Err(Error::UnsupportedTail);
    };
    let conv = check_convergence(symbol, tree, Tail::HomogeneousExtension);
    if !conv.converges {
        return Err(Error::Divergence(conv.diagnostic));
    }
    if c.norm() == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let p = p as f64;
    let r = p.powf(1.0 - beta);
    let root = tree.root();
    let lead = c * tree.diameter(root).powf(-beta) * tree.measure(root) * (1.0 - 1.0 / p);
    Ok(lead * (r / (1.0 - r)))
}

/// Eigenvalue of the wavelets at non-leaf ball `ball`.
pub fn eigenvalue(tree: &BallTree, symbol: &Symbol, ball: BallId, tail: Tail) -> Result<Complex64> {
    tree.check(ball)?;
    if tree.is_leaf(ball) {
        return Err(Error::Domain(format!(
            "ball {ball} is a leaf and carries no wavelets"
        )));
    }
    let tail_value = match tail {
        Tail::None => Complex64::new(0.0, 0.0),
        Tail::HomogeneousExtension => tail_sum(tree, symbol)?,
    };
    Ok(finite_eigenvalue(tree, symbol, ball)? + tail_value)
}

fn finite_eigenvalue(tree: &BallTree, symbol: &Symbol, ball: BallId) -> Result<Complex64> {
    let mut lambda = symbol.value(tree, ball)? * tree.measure(ball);
    let mut below = ball;
    while let Some(j) = tree.parent(below) {
        lambda += symbol.value(tree, j)? * (tree.measure(j) - tree.measure(below));
        below = j;
    }
    Ok(lambda)
}

/// Eigenvalues of all non-leaf balls.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Spectrum {
    values: BTreeMap<BallId, Complex64>,
}

impl Spectrum {
    pub fn from_values(values: BTreeMap<BallId, Complex64>) -> Self {
        Spectrum { values }
    }

    pub fn get(&self, b: BallId) -> Option<Complex64> {
        self.values.get(&b).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (BallId, Complex64)> + '_ {
        self.values.iter().map(|(b, v)| (*b, *v))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub fn spectrum(tree: &BallTree, symbol: &Symbol, tail: Tail) -> Result<Spectrum> {
    let tail_value = match tail {
        Tail::None => Complex64::new(0.0, 0.0),
        Tail::HomogeneousExtension => tail_sum(tree, symbol)?,
    };
    let balls = tree.interior_balls();
    let values = par::map(&balls, |&b| {
        finite_eigenvalue(tree, symbol, b).map(|l| (b, l + tail_value))
    });
    Ok(Spectrum {
        values: values.into_iter().collect::<Result<_>>()?,
    })
}

/// Applies the operator by direct summation over all pairs of points.
/// `values` is in leaf order. Cost is quadratic in the number of leaves.
pub fn apply_dense_values(
    tree: &BallTree,
    symbol: &Symbol,
    values: &[Complex64],
) -> Result<Vec<Complex64>> {
    if values.len() != tree.leaf_count() {
        return Err(Error::Parameter(format!(
            "{} values for {} leaves",
            values.len(),
            tree.leaf_count()
        )));
    }
    let t = symbol.values(tree)?;
    let leaves = tree.leaves();
    Ok(par::map_range(leaves.len(), |i| {
        let x = leaves[i];
        let fx = values[i];
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, &y) in leaves.iter().enumerate() {
            if k == i {
                continue;
            }
            let kernel = t[tree.sup_unchecked(x, y).0].expect("sup of distinct leaves is interior");
            acc += kernel * (fx - values[k]) * tree.measure(y);
        }
        acc
    }))
}

pub fn apply_dense(tree: &BallTree, symbol: &Symbol, f: &TestFunction) -> Result<TestFunction> {
    if f.subtree().minimal() != tree.leaves() {
        return Err(Error::Domain(
            "dense application needs a function on every leaf".into(),
        ));
    }
    let out = apply_dense_values(tree, symbol, f.values())?;
    TestFunction::new(f.subtree().clone(), out)
}

/// Row-major matrix of the operator on leaf values.
pub fn dense_matrix(tree: &BallTree, symbol: &Symbol) -> Result<Vec<Vec<Complex64>>> {
    let t = symbol.values(tree)?;
    let leaves = tree.leaves();
    Ok(par::map_range(leaves.len(), |i| {
        let x = leaves[i];
        let mut row = vec![Complex64::new(0.0, 0.0); leaves.len()];
        for (k, &y) in leaves.iter().enumerate() {
            if k == i {
                continue;
            }
            let w = t[tree.sup_unchecked(x, y).0].expect("sup of distinct leaves is interior")
                * tree.measure(y);
            row[i] += w;
            row[k] -= w;
        }
        row
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use crate::wavelets::WaveletBasis;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn level_symbol(tree: &BallTree, by_depth: &[f64]) -> Symbol {
        Symbol::table(
            tree,
            tree.interior_balls()
                .into_iter()
                .map(|b| (b, c(by_depth[tree.depth(b)], 0.0)))
                .collect(),
        )
        .unwrap()
    }

    fn random_table(rng: &mut ChaCha8Rng, tree: &BallTree) -> Symbol {
        Symbol::table(
            tree,
            tree.interior_balls()
                .into_iter()
                .map(|b| {
                    (
                        b,
                        c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)),
                    )
                })
                .collect(),
        )
        .unwrap()
    }

    fn max_abs(v: &[Complex64]) -> f64 {
        v.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn root_only_tree() {
        let t = BallTree::padic(2, 1).unwrap();
        let s = level_symbol(&t, &[3.5]);
        assert_eq!(
            eigenvalue(&t, &s, t.root(), Tail::None).unwrap(),
            c(3.5, 0.0)
        );

        // ψ = ±1 on two leaves of measure 1/2: Tψ(x1) = c (ψ(x1) - ψ(x2)) / 2 = c ψ(x1)
        let psi = vec![c(1.0, 0.0), c(-1.0, 0.0)];
        let out = apply_dense_values(&t, &s, &psi).unwrap();
        assert!((out[0] - c(3.5, 0.0)).norm() < 1e-15);
        assert!((out[1] + c(3.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn homogeneous_child_eigenvalue() {
        // λ = 2^β · 1/2 + 1 · (1 - 1/2)
        let t = BallTree::padic(2, 2).unwrap();
        for beta in [-1.0, 0.5, 2.0] {
            let s = Symbol::homogeneous(c(1.0, 0.0), beta);
            let child = t.maximal_subballs(t.root())[0];
            let want = 2f64.powf(beta - 1.0) + 0.5;
            let got = eigenvalue(&t, &s, child, Tail::None).unwrap();
            assert!((got - c(want, 0.0)).norm() < 1e-14);

            let basis = WaveletBasis::new(&t);
            let w = basis.get(child, 1).unwrap().to_dense(&t);
            let out = apply_dense_values(&t, &s, &w).unwrap();
            for (a, b) in out.iter().zip(&w) {
                assert!((a - b * want).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn level_table_spectrum() {
        let t = BallTree::padic(2, 2).unwrap();
        let s = level_symbol(&t, &[1.0, 0.0]);
        let sp = spectrum(&t, &s, Tail::None).unwrap();
        assert_eq!(sp.len(), 3);
        assert_eq!(sp.get(t.root()), Some(c(1.0, 0.0)));
        for &k in t.maximal_subballs(t.root()) {
            assert!((sp.get(k).unwrap() - c(0.5, 0.0)).norm() < 1e-15);
        }
        let zero = level_symbol(&t, &[0.0, 0.0]);
        assert!(spectrum(&t, &zero, Tail::None)
            .unwrap()
            .iter()
            .all(|(_, l)| l == c(0.0, 0.0)));
    }

    #[test]
    fn homogeneous_tree_siblings_share_eigenvalues() {
        let t = BallTree::padic(3, 3).unwrap();
        let sp = spectrum(&t, &Symbol::homogeneous(c(0.7, -0.2), 1.3), Tail::None).unwrap();
        let kids = t.maximal_subballs(t.root());
        assert_eq!(sp.get(kids[0]), sp.get(kids[2]));
    }

    #[test]
    fn leaf_eigenvalue_is_domain_error() {
        let t = BallTree::padic(2, 2).unwrap();
        let s = Symbol::homogeneous(c(1.0, 0.0), 1.0);
        assert!(matches!(
            eigenvalue(&t, &s, t.leaves()[0], Tail::None),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn tail_errors() {
        let t = BallTree::padic(2, 2).unwrap();
        let table = level_symbol(&t, &[1.0, 1.0]);
        assert!(matches!(
            eigenvalue(&t, &table, t.root(), Tail::HomogeneousExtension),
            Err(Error::UnsupportedTail)
        ));
        let explicit = BallTree::from_vertices(&t.vertex_specs()).unwrap();
        assert!(matches!(
            eigenvalue(
                &explicit,
                &Symbol::homogeneous(c(1.0, 0.0), 2.0),
                explicit.root(),
                Tail::HomogeneousExtension
            ),
            Err(Error::UnsupportedTail)
        ));
        let slow = Symbol::homogeneous(c(1.0, 0.0), 0.5);
        assert!(matches!(
            eigenvalue(&t, &slow, t.root(), Tail::HomogeneousExtension),
            Err(Error::Divergence(_))
        ));
    }

    /// Partial sums of the upward series, built level by level on explicit ancestor balls.
    fn tail_partial_sum(p: f64, c: f64, beta: f64, levels: usize) -> f64 {
        (1..=levels)
            .map(|k| {
                let diam = p.powi(k as i32);
                let meas = p.powi(k as i32);
                let below = p.powi(k as i32 - 1);
                c * diam.powf(-beta) * (meas - below)
            })
            .sum()
    }

    #[test]
    fn convergence_follows_partial_sums() {
        let t = BallTree::padic(2, 3).unwrap();
        let table = level_symbol(&t, &[1.0, 2.0, 3.0]);
        assert!(check_convergence(&table, &t, Tail::None).converges);

        // beta = 2: partial sums settle; beta = 0.5: they grow geometrically
        let s40 = tail_partial_sum(2.0, 1.0, 2.0, 40);
        let s80 = tail_partial_sum(2.0, 1.0, 2.0, 80);
        assert!((s80 - s40).abs() < 1e-10);
        let g40 = tail_partial_sum(2.0, 1.0, 0.5, 40);
        let g80 = tail_partial_sum(2.0, 1.0, 0.5, 80);
        assert!(g80 > 1e5 * g40);

        let fast = Symbol::homogeneous(c(1.0, 0.0), 2.0);
        let slow = Symbol::homogeneous(c(1.0, 0.0), 0.5);
        assert!(check_convergence(&fast, &t, Tail::HomogeneousExtension).converges);
        assert!(!check_convergence(&slow, &t, Tail::HomogeneousExtension).converges);
        assert!(!check_convergence(&table, &t, Tail::HomogeneousExtension).converges);

        let finite = eigenvalue(&t, &fast, t.root(), Tail::None).unwrap();
        let with_tail = eigenvalue(&t, &fast, t.root(), Tail::HomogeneousExtension).unwrap();
        assert!((with_tail - finite - c(s80, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn dense_matrix_matches_apply() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = BallTree::random(&mut rng, 3, 3);
        let s = random_table(&mut rng, &t);
        let m = dense_matrix(&t, &s).unwrap();
        let f: Vec<_> = (0..t.leaf_count())
            .map(|i| c(i as f64, 1.0 - i as f64))
            .collect();
        let direct = apply_dense_values(&t, &s, &f).unwrap();
        for (row, d) in m.iter().zip(&direct) {
            let v: Complex64 = row.iter().zip(&f).map(|(a, b)| a * b).sum();
            assert!((v - d).norm() < 1e-12);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn wavelets_are_eigenfunctions(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = BallTree::random(&mut rng, 4, 4);
            let s = random_table(&mut rng, &t);
            let basis = WaveletBasis::new(&t);
            let sp = spectrum(&t, &s, Tail::None).unwrap();
            for w in basis.iter() {
                let psi = w.to_dense(&t);
                let lambda = sp.get(w.ball()).unwrap();
                let out = apply_dense_values(&t, &s, &psi).unwrap();
                let err: Vec<_> = out.iter().zip(&psi).map(|(a, b)| a - b * lambda).collect();
                let scale = (lambda.norm() * max_abs(&psi)).max(s.max_abs(&t).unwrap() * 1e-3);
                prop_assert!(max_abs(&err) <= 1e-10 * scale);
            }
        }

        #[test]
        fn constants_and_linearity(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = BallTree::random(&mut rng, 4, 4);
            let s = random_table(&mut rng, &t);
            let n = t.leaf_count();
            let ones = vec![c(1.0, 0.0); n];
            let out = apply_dense_values(&t, &s, &ones).unwrap();
            prop_assert!(max_abs(&out) <= 1e-12 * s.max_abs(&t).unwrap());

            let f: Vec<_> = (0..n).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
            let g: Vec<_> = (0..n).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
            let (a, b) = (c(0.3, -1.2), c(-2.0, 0.4));
            let combo: Vec<_> = f.iter().zip(&g).map(|(x, y)| a * x + b * y).collect();
            let lhs = apply_dense_values(&t, &s, &combo).unwrap();
            let tf = apply_dense_values(&t, &s, &f).unwrap();
            let tg = apply_dense_values(&t, &s, &g).unwrap();
            for i in 0..n {
                prop_assert!((lhs[i] - (a * tf[i] + b * tg[i])).norm() <= 1e-12 * (1.0 + lhs[i].norm()) * s.max_abs(&t).unwrap().max(1.0));
            }
        }

        #[test]
        fn parent_recursion(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = BallTree::random(&mut rng, 4, 4);
            let s = random_table(&mut rng, &t);
            let sp = spectrum(&t, &s, Tail::None).unwrap();
            for (b, lambda) in sp.iter() {
                let Some(p) = t.parent(b) else { continue };
                let lp = sp.get(p).unwrap();
                let rec = lp + (s.value(&t, b).unwrap() - s.value(&t, p).unwrap()) * t.measure(b);
                prop_assert!((rec - lambda).norm() <= 1e-12 * (1.0 + lambda.norm()));
            }
        }
    }
}
