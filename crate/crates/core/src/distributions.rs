//! Generalized functions as wavelet series.
//!
//! A generalized function on a product of `n` ball trees (`n = 1` included)
//! is stored through an anchor vertex `I_0 = (I_0^1, …, I_0^n)` of positive
//! measure and a sparse map of extended coefficients `u_{Ij}`. On factor `i`
//! the index `j^i ≥ 1` names a wavelet at ball `I^i`; `j^i = 0` is only
//! allowed at `I^i = I_0^i` and names the characteristic function of the
//! anchor ball. The series is
//!
//! `u = Σ u_{Ij} ⊗_i φ_i`,  with `φ_i = 1` when `j^i = 0` and
//! `φ_i = ψ_{I^i j^i} - ν(I_0^i)^{-1} ψ_{I^i j^i}(χ_{I_0^i})` otherwise,
//!
//! so that `u(conj ψ_{Ij}) = u_{Ij} · Π_{i: j^i = 0} ν(I_0^i)`. In one
//! dimension the coefficient at `(I_0, 0)` is the anchor value `u_0` with
//! `u(χ_{I_0}) = u_0 ν(I_0)`.
//!
//! Evaluation on a test function reduces to per-factor pairings. Against a
//! characteristic function `χ_{J_0}` a wavelet term on factor `i` only
//! survives when `J_0 < I ≤ sup(J_0, I_0)` or `I_0 < I ≤ sup(J_0, I_0)`;
//! all larger balls cancel exactly and are never summed.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pdo::Spectrum;
use crate::product::{HyperVertex, MultiSpectrum, ProductSpace, TupleIter};
use crate::tree::{BallId, BallTree, RegularSubtree};
use crate::wavelets::{self, TestFunction, WaveletExpansion};

/// Read access to the factor trees of a (possibly one-factor) product.
pub trait Factors {
    fn arity(&self) -> usize;
    fn tree(&self, i: usize) -> &BallTree;
}

impl Factors for BallTree {
    fn arity(&self) -> usize {
        1
    }
    fn tree(&self, _i: usize) -> &BallTree {
        self
    }
}

impl Factors for ProductSpace {
    fn arity(&self) -> usize {
        ProductSpace::arity(self)
    }
    fn tree(&self, i: usize) -> &BallTree {
        ProductSpace::tree(self, i)
    }
}

impl Factors for [BallTree] {
    fn arity(&self) -> usize {
        self.len()
    }
    fn tree(&self, i: usize) -> &BallTree {
        &self[i]
    }
}

/// One ball and one wavelet number per factor; `j = 0` is the extended
/// (anchor characteristic) component.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CoeffIndex {
    pub balls: Vec<BallId>,
    pub j: Vec<usize>,
}

impl CoeffIndex {
    pub fn new(balls: Vec<BallId>, j: Vec<usize>) -> Self {
        CoeffIndex { balls, j }
    }

    pub fn one_dim(ball: BallId, j: usize) -> Self {
        CoeffIndex {
            balls: vec![ball],
            j: vec![j],
        }
    }

    pub fn arity(&self) -> usize {
        self.balls.len()
    }

    /// True for a genuine multiwavelet (every `j ≥ 1`).
    pub fn is_wavelet(&self) -> bool {
        self.j.iter().all(|&j| j >= 1)
    }

    pub fn vertex(&self) -> HyperVertex {
        HyperVertex::from_balls(&self.balls)
    }
}

impl fmt::Display for CoeffIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let balls: Vec<String> = self.balls.iter().map(|b| b.to_string()).collect();
        let js: Vec<String> = self.j.iter().map(|j| j.to_string()).collect();
        write!(f, "({}; {})", balls.join(","), js.join(","))
    }
}

fn wavelet_count(tree: &BallTree, b: BallId) -> usize {
    wavelets::wavelet_basis(tree, b).map_or(0, |ws| ws.len())
}

fn check_index<F: Factors + ?Sized>(factors: &F, idx: &CoeffIndex) -> Result<()> {
    if idx.balls.len() != factors.arity() || idx.j.len() != factors.arity() {
        return Err(Error::Parameter(format!(
            "index {idx} does not have {} components",
            factors.arity()
        )));
    }
    for (i, &b) in idx.balls.iter().enumerate() {
        factors.tree(i).check(b)?;
    }
    Ok(())
}

/// Finitely supported series over genuine wavelets: an element of the Lizorkin space.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LizorkinSeries {
    coeffs: BTreeMap<CoeffIndex, Complex64>,
}

impl LizorkinSeries {
    pub fn new(coeffs: BTreeMap<CoeffIndex, Complex64>) -> Result<Self> {
        if let Some(idx) = coeffs.keys().find(|k| !k.is_wavelet()) {
            return Err(Error::Domain(format!(
                "Lizorkin series index {idx} has a zero wavelet number"
            )));
        }
        Ok(LizorkinSeries { coeffs })
    }

    /// Checks every index against the factor trees.
    pub fn validate<F: Factors + ?Sized>(&self, factors: &F) -> Result<()> {
        for idx in self.coeffs.keys() {
            check_index(factors, idx)?;
            for (i, (&b, &j)) in idx.balls.iter().zip(&idx.j).enumerate() {
                if j > wavelet_count(factors.tree(i), b) {
                    return Err(Error::Domain(format!(
                        "index {idx}: ball {b} of factor {} has no wavelet {j}",
                        i + 1
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn one_dim(coeffs: BTreeMap<(BallId, usize), Complex64>) -> Result<Self> {
        Self::new(
            coeffs
                .into_iter()
                .map(|((b, j), v)| (CoeffIndex::one_dim(b, j), v))
                .collect(),
        )
    }

    pub fn get(&self, idx: &CoeffIndex) -> Complex64 {
        self.coeffs.get(idx).copied().unwrap_or_default()
    }

    pub fn coeffs(&self) -> &BTreeMap<CoeffIndex, Complex64> {
        &self.coeffs
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CoeffIndex, &Complex64)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.values().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Finite pairing `Σ φ_{Ij} f_{Ij}` with a mean-zero test function given by its coefficients.
    pub fn pair(&self, f: &LizorkinSeries) -> Complex64 {
        let (small, large) = if self.len() <= f.len() {
            (self, f)
        } else {
            (f, self)
        };
        small
            .coeffs
            .iter()
            .filter_map(|(k, a)| large.coeffs.get(k).map(|b| a * b))
            .sum()
    }
}

/// `φ(f) = Σ φ_{Ij} f_{Ij}` for a one-dimensional mean-zero expansion.
pub fn lizorkin_pair(phi: &LizorkinSeries, f: &WaveletExpansion) -> Result<Complex64> {
    let scale = f.coeffs.values().map(|v| v.norm()).fold(1.0, f64::max);
    if f.mean.norm() > 1e-12 * scale {
        return Err(Error::Domain(format!(
            "test function has mean coefficient {}; Lizorkin pairing needs mean zero",
            f.mean
        )));
    }
    Ok(f.coeffs
        .iter()
        .map(|(&(b, j), v)| phi.get(&CoeffIndex::one_dim(b, j)) * v)
        .sum())
}

/// Elementary test functions of one factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TestAtom {
    /// Characteristic function of a ball.
    Char(BallId),
    /// Complex conjugate of a wavelet.
    ConjWavelet(BallId, usize),
}

/// Pairing of one factor of a series term with one test atom.
fn pair_factor(
    tree: &BallTree,
    anchor: BallId,
    ball: BallId,
    j: usize,
    atom: TestAtom,
) -> Complex64 {
    let zero = Complex64::new(0.0, 0.0);
    match atom {
        TestAtom::ConjWavelet(b, k) => {
            // <ψ', φ> = δ; constants integrate wavelets to zero
            if j != 0 && b == ball && k == j {
                Complex64::new(1.0, 0.0)
            } else {
                zero
            }
        }
        TestAtom::Char(target) => {
            if j == 0 {
                return Complex64::new(tree.measure(target), 0.0);
            }
            let s = tree.sup_unchecked(target, anchor);
            let between =
                |low: BallId| low != ball && tree.contains(ball, low) && tree.contains(s, ball);
            if !between(target) && !between(anchor) {
                return zero;
            }
            let Some(w) = wavelets::wavelet_basis(tree, ball)
                .ok()
                .and_then(|ws| ws.into_iter().nth(j - 1))
            else {
                return zero;
            };
            w.integral_over(tree, target)
                - w.integral_over(tree, anchor) * (tree.measure(target) / tree.measure(anchor))
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneralizedFunction {
    anchor: Vec<BallId>,
    coeffs: BTreeMap<CoeffIndex, Complex64>,
}

impl GeneralizedFunction {
    /// Checks the anchor and every extended index; indices whose extended
    /// function vanishes identically must not carry a nonzero coefficient.
    pub fn new<F: Factors + ?Sized>(
        factors: &F,
        anchor: Vec<BallId>,
        coeffs: BTreeMap<CoeffIndex, Complex64>,
    ) -> Result<Self> {
        if anchor.len() != factors.arity() {
            return Err(Error::Parameter(format!(
                "anchor has {} components, expected {}",
                anchor.len(),
                factors.arity()
            )));
        }
        for (i, &b) in anchor.iter().enumerate() {
            factors.tree(i).check(b)?;
        }
        if anchor
            .iter()
            .enumerate()
            .any(|(i, &b)| factors.tree(i).measure(b) <= 0.0)
        {
            return Err(Error::Anchor(anchor));
        }
        let mut kept = BTreeMap::new();
        for (idx, v) in coeffs {
            check_index(factors, &idx)?;
            let vanishes = idx
                .balls
                .iter()
                .zip(&idx.j)
                .enumerate()
                .any(|(i, (&b, &j))| {
                    if j == 0 {
                        b != anchor[i]
                    } else {
                        j > wavelet_count(factors.tree(i), b)
                    }
                });
            if vanishes {
                if v != Complex64::new(0.0, 0.0) {
                    return Err(Error::Domain(format!(
                        "index {idx} names an identically zero function but has coefficient {v}"
                    )));
                }
                continue;
            }
            kept.insert(idx, v);
        }
        Ok(GeneralizedFunction {
            anchor,
            coeffs: kept,
        })
    }

    /// One-dimensional generalized function with `u(χ_{I_0}) = u_0 ν(I_0)`
    /// and `u(conj ψ_{Ij}) = u_{Ij}`.
    pub fn one_dim(
        tree: &BallTree,
        anchor: BallId,
        anchor_value: Complex64,
        coeffs: BTreeMap<(BallId, usize), Complex64>,
    ) -> Result<Self> {
        let mut all: BTreeMap<CoeffIndex, Complex64> = coeffs
            .into_iter()
            .map(|((b, j), v)| {
                if j == 0 {
                    Err(Error::Domain(format!("wavelet index 0 at ball {b}")))
                } else {
                    Ok((CoeffIndex::one_dim(b, j), v))
                }
            })
            .collect::<Result<_>>()?;
        all.insert(CoeffIndex::one_dim(anchor, 0), anchor_value);
        Self::new(tree, vec![anchor], all)
    }

    pub fn arity(&self) -> usize {
        self.anchor.len()
    }

    pub fn anchor(&self) -> &[BallId] {
        &self.anchor
    }

    /// The coefficient of the pure anchor term (all `j = 0`).
    pub fn anchor_value(&self) -> Complex64 {
        self.coeff(&self.anchor_index())
    }

    pub fn anchor_index(&self) -> CoeffIndex {
        CoeffIndex::new(self.anchor.clone(), vec![0; self.anchor.len()])
    }

    pub fn coeff(&self, idx: &CoeffIndex) -> Complex64 {
        self.coeffs.get(idx).copied().unwrap_or_default()
    }

    pub fn coeffs(&self) -> &BTreeMap<CoeffIndex, Complex64> {
        &self.coeffs
    }

    pub fn anchor_measure<F: Factors + ?Sized>(&self, factors: &F) -> f64 {
        self.anchor
            .iter()
            .enumerate()
            .map(|(i, &b)| factors.tree(i).measure(b))
            .product()
    }

    /// The same generalized function with `c` added to its anchor value.
    pub fn shifted(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        *out.coeffs.entry(self.anchor_index()).or_default() += c;
        out
    }

    /// `u(⊗_i atom_i)`.
    pub fn eval_on_atoms<F: Factors + ?Sized>(
        &self,
        factors: &F,
        atoms: &[TestAtom],
    ) -> Result<Complex64> {
        if atoms.len() != self.arity() || factors.arity() != self.arity() {
            return Err(Error::Parameter(
                "arity mismatch between function, factors and test".into(),
            ));
        }
        for (i, a) in atoms.iter().enumerate() {
            let b = match *a {
                TestAtom::Char(b) | TestAtom::ConjWavelet(b, _) => b,
            };
            factors.tree(i).check(b)?;
        }
        let mut acc = Complex64::new(0.0, 0.0);
        'terms: for (idx, &v) in &self.coeffs {
            let mut term = v;
            for (i, &atom) in atoms.iter().enumerate() {
                let p = pair_factor(
                    factors.tree(i),
                    self.anchor[i],
                    idx.balls[i],
                    idx.j[i],
                    atom,
                );
                if p == Complex64::new(0.0, 0.0) {
                    continue 'terms;
                }
                term *= p;
            }
            acc += term;
        }
        Ok(acc)
    }

    /// `u(conj ψ_{Ij})` for an extended index; `j^i = 0` tests against `χ_{I_0^i}`.
    pub fn eval_on_extended<F: Factors + ?Sized>(
        &self,
        factors: &F,
        idx: &CoeffIndex,
    ) -> Result<Complex64> {
        check_index(factors, idx)?;
        let atoms: Vec<TestAtom> = idx
            .balls
            .iter()
            .zip(&idx.j)
            .enumerate()
            .map(|(i, (&b, &j))| {
                if j == 0 {
                    if b != self.anchor[i] {
                        return Err(Error::Domain(format!(
                            "index {idx}: j = 0 is only defined at the anchor ball"
                        )));
                    }
                    Ok(TestAtom::Char(b))
                } else {
                    Ok(TestAtom::ConjWavelet(b, j))
                }
            })
            .collect::<Result<_>>()?;
        self.eval_on_atoms(factors, &atoms)
    }

    /// Evaluation on a product test function `⊗_i f_i`. Each factor is split
    /// into conjugate wavelets of its subtree plus a multiple of the
    /// characteristic function of the subtree's top ball.
    pub fn eval_on_tensor<F: Factors + ?Sized>(
        &self,
        factors: &F,
        fs: &[TestFunction],
    ) -> Result<Complex64> {
        if fs.len() != self.arity() {
            return Err(Error::Parameter(
                "one test function per factor is required".into(),
            ));
        }
        let mut parts: Vec<Vec<(TestAtom, Complex64)>> = Vec::with_capacity(fs.len());
        for (i, f) in fs.iter().enumerate() {
            parts.push(decompose(factors.tree(i), f)?);
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for combo in TupleIter::new(parts) {
            let weight: Complex64 = combo.iter().map(|(_, w)| *w).product();
            if weight == Complex64::new(0.0, 0.0) {
                continue;
            }
            let atoms: Vec<TestAtom> = combo.iter().map(|(a, _)| *a).collect();
            acc += weight * self.eval_on_atoms(factors, &atoms)?;
        }
        Ok(acc)
    }
}

/// `f = Σ (∫ψ f) conj ψ + (∫f / ν(top)) χ_top` over the wavelets of `f`'s subtree.
fn decompose(tree: &BallTree, f: &TestFunction) -> Result<Vec<(TestAtom, Complex64)>> {
    let subtree = f.subtree();
    for &b in subtree.minimal() {
        tree.check(b)?;
    }
    let mut out = Vec::new();
    for ball in subtree.non_minimal(tree) {
        let Ok(ws) = wavelets::wavelet_basis(tree, ball) else {
            continue;
        };
        for w in ws {
            let a: Complex64 = w
                .values()
                .iter()
                .map(|&(sub, v)| v * f.integral_over(tree, sub))
                .sum();
            out.push((TestAtom::ConjWavelet(ball, w.j()), a));
        }
    }
    let top = subtree.top();
    if tree.measure(top) > 0.0 {
        out.push((
            TestAtom::Char(top),
            f.integral_over(tree, top) / tree.measure(top),
        ));
    }
    Ok(out)
}

/// `u(χ_{J_0})` by the finite-sum formula.
pub fn eval_on_char(u: &GeneralizedFunction, tree: &BallTree, j0: BallId) -> Result<Complex64> {
    u.eval_on_atoms(tree, &[TestAtom::Char(j0)])
}

/// `u(χ_{J_0})` for a product of balls `J_0`.
pub fn eval_on_char_nd<F: Factors + ?Sized>(
    u: &GeneralizedFunction,
    factors: &F,
    j0: &[BallId],
) -> Result<Complex64> {
    let atoms: Vec<TestAtom> = j0.iter().map(|&b| TestAtom::Char(b)).collect();
    u.eval_on_atoms(factors, &atoms)
}

/// `u(f)` for a one-dimensional test function.
pub fn eval_on_test(
    u: &GeneralizedFunction,
    tree: &BallTree,
    f: &TestFunction,
) -> Result<Complex64> {
    u.eval_on_tensor(tree, std::slice::from_ref(f))
}

/// `u(f)` for a test function on the whole tree given by its wavelet expansion.
pub fn eval_on_expansion(
    u: &GeneralizedFunction,
    tree: &BallTree,
    e: &WaveletExpansion,
) -> Result<Complex64> {
    let f = wavelets::synthesize(tree, e, &RegularSubtree::full(tree))?;
    eval_on_test(u, tree, &f)
}

/// Eigenvalue lookup by the balls of a vertex.
pub trait Eigenvalues {
    fn eigenvalue_at(&self, balls: &[BallId]) -> Result<Complex64>;
}

impl Eigenvalues for Spectrum {
    fn eigenvalue_at(&self, balls: &[BallId]) -> Result<Complex64> {
        match balls {
            [b] => self
                .get(*b)
                .ok_or_else(|| Error::Domain(format!("no eigenvalue for ball {b}"))),
            _ => Err(Error::Parameter(format!(
                "one-dimensional spectrum queried with {} balls",
                balls.len()
            ))),
        }
    }
}

impl Eigenvalues for MultiSpectrum {
    fn eigenvalue_at(&self, balls: &[BallId]) -> Result<Complex64> {
        self.eigenvalue(&HyperVertex::from_balls(balls))
    }
}

/// `(Tu)(conj ψ_{Ij}) = λ_I u_{Ij}` on genuine wavelets; constants are annihilated.
pub fn apply_operator<E: Eigenvalues + ?Sized>(
    u: &GeneralizedFunction,
    spectrum: &E,
) -> Result<LizorkinSeries> {
    let mut out = BTreeMap::new();
    for (idx, &v) in u.coeffs() {
        if idx.is_wavelet() {
            out.insert(idx.clone(), spectrum.eigenvalue_at(&idx.balls)? * v);
        }
    }
    LizorkinSeries::new(out)
}

/// Every extended index of a finite product for the given anchor: per factor,
/// `(I_0^i, 0)` followed by all wavelets in `(ball, j)` order.
pub fn extended_indices<F: Factors + ?Sized>(factors: &F, anchor: &[BallId]) -> Vec<CoeffIndex> {
    let per_factor: Vec<Vec<(BallId, usize)>> = (0..factors.arity())
        .map(|i| {
            let tree = factors.tree(i);
            let mut list = vec![(anchor[i], 0)];
            for b in tree.interior_balls() {
                for j in 1..=wavelet_count(tree, b) {
                    list.push((b, j));
                }
            }
            list
        })
        .collect();
    TupleIter::new(per_factor)
        .map(|combo| {
            let (balls, j) = combo.into_iter().unzip();
            CoeffIndex { balls, j }
        })
        .collect()
}

/// Distinct vertices of a set of indices.
pub fn vertices_of<'a>(indices: impl IntoIterator<Item = &'a CoeffIndex>) -> BTreeSet<Vec<BallId>> {
    indices.into_iter().map(|k| k.balls.clone()).collect()
}
