//! Orthonormal wavelet bases on ball trees.
//!
//! Every non-leaf ball `I` carries the space of functions that are constant
//! on the maximal subballs of `I`, vanish outside `I` and have zero mean.
//! The wavelets at `I` form an orthonormal basis of that space; together with
//! the normalized constant on the root they form an orthonormal basis of
//! all functions on the leaves.
//!
//! Inside one ball the basis is fixed as follows. When all subballs of
//! positive measure have equal measure `m`, the wavelets are characters
//! `(P m)^{-1/2} exp(2πi j k / P)`, which are the classical p-adic wavelets.
//! Otherwise a Helmert-type basis is used: wavelet `j` is positive on
//! subballs `0..j`, negative on subball `j` and zero after it. This is the
//! Gram-Schmidt orthonormalization of zero-mean indicator differences taken
//! in subball order.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::par;
use crate::tree::{BallId, BallTree, Point, RegularSubtree};

const EQUAL_MEASURE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct Wavelet {
    ball: BallId,
    j: usize,
    /// One value per maximal subball of `ball`, in subball order.
    values: Vec<(BallId, Complex64)>,
}

impl Wavelet {
    pub fn ball(&self) -> BallId {
        self.ball
    }

    /// 1-based index inside the ball.
    pub fn j(&self) -> usize {
        self.j
    }

    pub fn values(&self) -> &[(BallId, Complex64)] {
        &self.values
    }

    pub fn value_on_subball(&self, sub: BallId) -> Complex64 {
        self.values
            .iter()
            .find(|(b, _)| *b == sub)
            .map_or(Complex64::new(0.0, 0.0), |(_, v)| *v)
    }

    /// Value on any ball `b`: the wavelet is constant there when `b` lies
    /// strictly inside the wavelet's ball, and zero when `b` is disjoint from it.
    /// Balls containing the wavelet's ball have no single value; they get zero.
    pub fn value_on(&self, tree: &BallTree, b: BallId) -> Complex64 {
        match tree.child_toward(self.ball, b) {
            Some(c) => self.value_on_subball(c),
            None => Complex64::new(0.0, 0.0),
        }
    }

    pub fn evaluate(&self, tree: &BallTree, x: Point) -> Complex64 {
        self.value_on(tree, x.ball())
    }

    /// `∫_B ψ dν` for the characteristic function of ball `b`.
    pub fn integral_over(&self, tree: &BallTree, b: BallId) -> Complex64 {
        self.value_on(tree, b) * tree.measure(b)
    }

    /// Values on all leaves of `tree`, in leaf order.
    pub fn to_dense(&self, tree: &BallTree) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); tree.leaf_count()];
        for &(c, v) in &self.values {
            for pos in tree.leaf_span(c) {
                out[pos] = v;
            }
        }
        out
    }
}

/// The wavelets attached to ball `ball`.
pub fn wavelet_basis(tree: &BallTree, ball: BallId) -> Result<Vec<Wavelet>> {
    tree.check(ball)?;
    let subs = tree.maximal_subballs(ball);
    let positive: Vec<usize> = (0..subs.len())
        .filter(|&k| tree.measure(subs[k]) > 0.0)
        .collect();
    let count = positive.len();
    if count < 2 {
        return Err(Error::DegenerateBall(ball));
    }
    let m: Vec<f64> = positive.iter().map(|&k| tree.measure(subs[k])).collect();
    let total: f64 = m.iter().sum();
    let mean = total / count as f64;
    let equal = m
        .iter()
        .all(|&x| (x - mean).abs() <= EQUAL_MEASURE_TOL * mean);

    let zero = Complex64::new(0.0, 0.0);
    let mut out = Vec::with_capacity(count - 1);
    for j in 1..count {
        let mut values: Vec<(BallId, Complex64)> = subs.iter().map(|&c| (c, zero)).collect();
        if equal {
            let norm = (count as f64 * mean).sqrt().recip();
            for (k, &idx) in positive.iter().enumerate() {
                let phase = 2.0 * PI * ((j * k) % count) as f64 / count as f64;
                values[idx].1 = Complex64::from_polar(norm, phase);
            }
        } else {
            // Positive part on the first j subballs, negative on subball j.
            let head: f64 = m[..j].iter().sum();
            let last = m[j];
            let neg = (head / (last * (head + last))).sqrt();
            let pos = last * neg / head;
            for &idx in &positive[..j] {
                values[idx].1 = Complex64::new(pos, 0.0);
            }
            values[positive[j]].1 = Complex64::new(-neg, 0.0);
        }
        out.push(Wavelet { ball, j, values });
    }
    Ok(out)
}

/// All wavelets of a tree, ordered by `(ball, j)`.
#[derive(Clone, Debug)]
pub struct WaveletBasis {
    wavelets: Vec<Wavelet>,
    /// Range into `wavelets` per ball id.
    ranges: Vec<(usize, usize)>,
    total_measure: f64,
}

impl WaveletBasis {
    pub fn new(tree: &BallTree) -> Self {
        let per_ball = par::map_range(tree.len(), |b| {
            wavelet_basis(tree, BallId(b)).unwrap_or_default()
        });
        let mut wavelets = Vec::new();
        let mut ranges = Vec::with_capacity(tree.len());
        for ws in per_ball {
            let start = wavelets.len();
            wavelets.extend(ws);
            ranges.push((start, wavelets.len()));
        }
        WaveletBasis {
            wavelets,
            ranges,
            total_measure: tree.total_measure(),
        }
    }

    pub fn len(&self) -> usize {
        self.wavelets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.wavelets.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Wavelet> {
        self.wavelets.iter()
    }

    pub fn at(&self, ball: BallId) -> &[Wavelet] {
        match self.ranges.get(ball.0) {
            Some(&(s, e)) => &self.wavelets[s..e],
            None => &[],
        }
    }

    pub fn get(&self, ball: BallId, j: usize) -> Option<&Wavelet> {
        j.checked_sub(1).and_then(|k| self.at(ball).get(k))
    }

    /// Balls that carry at least one wavelet, in id order.
    pub fn balls(&self) -> impl Iterator<Item = BallId> + '_ {
        self.ranges
            .iter()
            .enumerate()
            .filter(|(_, (s, e))| e > s)
            .map(|(b, _)| BallId(b))
    }

    /// Value of the normalized constant `A^{-1/2}`, or zero for a null space.
    pub fn constant(&self) -> f64 {
        if self.total_measure > 0.0 {
            self.total_measure.sqrt().recip()
        } else {
            0.0
        }
    }
}

/// A test function: one value per minimal ball of a regular subtree.
#[derive(Clone, Debug)]
pub struct TestFunction {
    subtree: RegularSubtree,
    values: Vec<Complex64>,
}

impl TestFunction {
    /// `values` follows the order of [`RegularSubtree::minimal`].
    pub fn new(subtree: RegularSubtree, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != subtree.minimal().len() {
            return Err(Error::Parameter(format!(
                "{} values for {} minimal balls",
                values.len(),
                subtree.minimal().len()
            )));
        }
        Ok(TestFunction { subtree, values })
    }

    /// A function on all points of `tree`, in leaf order.
    pub fn on_leaves(tree: &BallTree, values: Vec<Complex64>) -> Result<Self> {
        Self::new(RegularSubtree::full(tree), values)
    }

    pub fn subtree(&self) -> &RegularSubtree {
        &self.subtree
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// `∫ |f|² dν`.
    pub fn norm_sqr(&self, tree: &BallTree) -> f64 {
        self.subtree
            .minimal()
            .iter()
            .zip(&self.values)
            .map(|(&b, v)| v.norm_sqr() * tree.measure(b))
            .sum()
    }

    /// `∫ f dν` over ball `b`.
    pub fn integral_over(&self, tree: &BallTree, b: BallId) -> Complex64 {
        self.subtree
            .minimal()
            .iter()
            .zip(&self.values)
            .filter(|(&x, _)| tree.contains(b, x))
            .map(|(&x, v)| v * tree.measure(x))
            .sum()
    }
}

/// Coefficients of a function in the wavelet basis.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct WaveletExpansion {
    /// Coefficient of the normalized constant `A^{-1/2}`.
    pub mean: Complex64,
    pub coeffs: BTreeMap<(BallId, usize), Complex64>,
}

impl WaveletExpansion {
    pub fn norm_sqr(&self) -> f64 {
        self.mean.norm_sqr() + self.coeffs.values().map(|c| c.norm_sqr()).sum::<f64>()
    }
}

fn subtree_wavelets(tree: &BallTree, subtree: &RegularSubtree) -> Vec<(BallId, Vec<Wavelet>)> {
    let balls = subtree.non_minimal(tree);
    par::map(&balls, |&b| (b, wavelet_basis(tree, b).unwrap_or_default()))
}

/// `f_{Ij} = <ψ_{Ij}, f>` for every wavelet of the subtree, plus the coefficient
/// of the normalized constant on the subtree's top ball.
pub fn analyze(tree: &BallTree, f: &TestFunction) -> WaveletExpansion {
    let subtree = f.subtree();
    // Integrals of f over every member ball, accumulated from the minimal balls upward.
    let mut integral: BTreeMap<BallId, Complex64> = BTreeMap::new();
    for (&x, v) in subtree.minimal().iter().zip(f.values()) {
        let w = v * tree.measure(x);
        for b in tree.path_to_root(x) {
            if !subtree.contains(b) {
                break;
            }
            *integral.entry(b).or_default() += w;
        }
    }

    let per_ball = subtree_wavelets(tree, subtree);
    let mut coeffs = BTreeMap::new();
    for (ball, ws) in &per_ball {
        for w in ws {
            let c: Complex64 = w
                .values()
                .iter()
                .map(|(sub, v)| v.conj() * integral.get(sub).copied().unwrap_or_default())
                .sum();
            coeffs.insert((*ball, w.j()), c);
        }
    }
    let a = tree.measure(subtree.top());
    let mean = if a > 0.0 {
        integral.get(&subtree.top()).copied().unwrap_or_default() / a.sqrt()
    } else {
        Complex64::new(0.0, 0.0)
    };
    WaveletExpansion { mean, coeffs }
}

/// Inverse of [`analyze`] on the given subtree.
pub fn synthesize(
    tree: &BallTree,
    e: &WaveletExpansion,
    subtree: &RegularSubtree,
) -> Result<TestFunction> {
    let per_ball: BTreeMap<BallId, Vec<Wavelet>> =
        subtree_wavelets(tree, subtree).into_iter().collect();
    for &(ball, j) in e.coeffs.keys() {
        let ok = per_ball
            .get(&ball)
            .is_some_and(|ws| j >= 1 && j <= ws.len());
        if !ok {
            return Err(Error::Domain(format!(
                "coefficient ({ball}, {j}) is not a wavelet of the subtree"
            )));
        }
    }
    let a = tree.measure(subtree.top());
    let base = if a > 0.0 {
        e.mean / a.sqrt()
    } else {
        Complex64::new(0.0, 0.0)
    };
    let values = par::map(subtree.minimal(), |&x| {
        let mut v = base;
        let mut below = x;
        for anc in tree.path_to_root(x).skip(1) {
            if !subtree.contains(anc) {
                break;
            }
            if let Some(ws) = per_ball.get(&anc) {
                for w in ws {
                    if let Some(c) = e.coeffs.get(&(anc, w.j())) {
                        v += c * w.value_on_subball(below);
                    }
                }
            }
            below = anc;
        }
        v
    });
    TestFunction::new(subtree.clone(), values)
}
