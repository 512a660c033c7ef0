//! Products of ball trees.
//!
//! The vertices of the product hypergraph are tuples of balls, one per factor.
//! A factor of finite total measure may be augmented by a formal top vertex
//! `K`, larger than every ball, which carries the normalized constant
//! `A^{-1/2}`. The hypergraph is never materialized; vertices and edges are
//! produced by iterators.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pdo::{self, Spectrum, Symbol, Tail};
use crate::tree::{BallId, BallTree};
use crate::wavelets::WaveletBasis;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Component {
    Ball(BallId),
    /// The augmentation vertex `K` of a finite-measure factor.
    Top,
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Component::Ball(b) => write!(f, "{b}"),
            Component::Top => write!(f, "K"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HyperVertex(pub Vec<Component>);

impl HyperVertex {
    pub fn from_balls(balls: &[BallId]) -> Self {
        HyperVertex(balls.iter().map(|&b| Component::Ball(b)).collect())
    }

    pub fn components(&self) -> &[Component] {
        &self.0
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    /// The balls of the vertex, or `None` when some component is `K`.
    pub fn balls(&self) -> Option<Vec<BallId>> {
        self.0
            .iter()
            .map(|c| match c {
                Component::Ball(b) => Some(*b),
                Component::Top => None,
            })
            .collect()
    }
}

impl fmt::Display for HyperVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, Debug)]
pub struct AugmentedFactor {
    tree: BallTree,
    augmented: bool,
    basis: WaveletBasis,
}

impl AugmentedFactor {
    /// A factor without the `K` vertex.
    pub fn plain(tree: BallTree) -> Self {
        let basis = WaveletBasis::new(&tree);
        AugmentedFactor {
            tree,
            augmented: false,
            basis,
        }
    }

    /// A factor with the `K` vertex; needs positive total measure.
    pub fn augmented(tree: BallTree) -> Result<Self> {
        if tree.total_measure().is_nan() || tree.total_measure() <= 0.0 {
            return Err(Error::Parameter(
                "augmentation needs a factor of positive finite measure".into(),
            ));
        }
        let basis = WaveletBasis::new(&tree);
        Ok(AugmentedFactor {
            tree,
            augmented: true,
            basis,
        })
    }

    pub fn tree(&self) -> &BallTree {
        &self.tree
    }

    pub fn is_augmented(&self) -> bool {
        self.augmented
    }

    pub fn basis(&self) -> &WaveletBasis {
        &self.basis
    }

    /// Total measure `A`, when `K` is present.
    pub fn total_measure(&self) -> Option<f64> {
        self.augmented.then(|| self.tree.total_measure())
    }

    fn all_components(&self) -> Vec<Component> {
        let mut out: Vec<Component> = self.tree.balls().map(Component::Ball).collect();
        if self.augmented {
            out.push(Component::Top);
        }
        out
    }

    fn generic_components(&self) -> Vec<Component> {
        let mut out: Vec<Component> = self
            .tree
            .interior_balls()
            .into_iter()
            .map(Component::Ball)
            .collect();
        if self.augmented {
            out.push(Component::Top);
        }
        out
    }

    fn check(&self, c: Component) -> Result<()> {
        match c {
            Component::Ball(b) => self.tree.check(b).map(|_| ()),
            Component::Top if self.augmented => Ok(()),
            Component::Top => Err(Error::Domain("factor has no K vertex".into())),
        }
    }

    fn is_generic(&self, c: Component) -> bool {
        match c {
            Component::Ball(b) => !self.tree.is_leaf(b),
            Component::Top => true,
        }
    }
}

/// Lexicographic odometer over per-factor candidate lists; the last factor runs fastest.
/// Zero lists give the single empty tuple.
#[derive(Clone, Debug)]
pub struct TupleIter<T: Clone> {
    lists: Vec<Vec<T>>,
    pos: Vec<usize>,
    done: bool,
}

impl<T: Clone> TupleIter<T> {
    pub fn new(lists: Vec<Vec<T>>) -> Self {
        let done = lists.iter().any(|l| l.is_empty());
        let pos = vec![0; lists.len()];
        TupleIter { lists, pos, done }
    }
}

impl<T: Clone> Iterator for TupleIter<T> {
    type Item = Vec<T>;

    fn next(&mut self) -> Option<Vec<T>> {
        if self.done {
            return None;
        }
        let item = self
            .pos
            .iter()
            .zip(&self.lists)
            .map(|(&i, l)| l[i].clone())
            .collect();
        let mut k = self.lists.len();
        loop {
            if k == 0 {
                self.done = true;
                break;
            }
            k -= 1;
            self.pos[k] += 1;
            if self.pos[k] < self.lists[k].len() {
                break;
            }
            self.pos[k] = 0;
        }
        Some(item)
    }
}

#[derive(Clone, Debug)]
pub struct ProductSpace {
    factors: Vec<AugmentedFactor>,
}

impl ProductSpace {
    pub fn new(factors: Vec<AugmentedFactor>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Parameter(
                "a product needs at least one factor".into(),
            ));
        }
        Ok(ProductSpace { factors })
    }

    /// Product of plain (unaugmented) factors.
    pub fn plain(trees: Vec<BallTree>) -> Result<Self> {
        Self::new(trees.into_iter().map(AugmentedFactor::plain).collect())
    }

    /// Product with every factor augmented.
    pub fn augmented(trees: Vec<BallTree>) -> Result<Self> {
        Self::new(
            trees
                .into_iter()
                .map(AugmentedFactor::augmented)
                .collect::<Result<_>>()?,
        )
    }

    pub fn arity(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[AugmentedFactor] {
        &self.factors
    }

    pub fn factor(&self, i: usize) -> &AugmentedFactor {
        &self.factors[i]
    }

    pub fn tree(&self, i: usize) -> &BallTree {
        &self.factors[i].tree
    }

    pub fn vertices(&self) -> TupleIter<Component> {
        TupleIter::new(self.factors.iter().map(|f| f.all_components()).collect())
    }

    pub fn generic_vertices(&self) -> impl Iterator<Item = HyperVertex> {
        TupleIter::new(
            self.factors
                .iter()
                .map(|f| f.generic_components())
                .collect(),
        )
        .map(HyperVertex)
    }

    pub fn vertex_count(&self) -> usize {
        self.factors
            .iter()
            .map(|f| f.tree.len() + f.augmented as usize)
            .product()
    }

    pub fn generic_count(&self) -> usize {
        self.factors
            .iter()
            .map(|f| f.tree.interior_balls().len() + f.augmented as usize)
            .product()
    }

    fn check_arity(&self, v: &HyperVertex) -> Result<()> {
        if v.arity() != self.arity() {
            return Err(Error::Parameter(format!(
                "vertex {v} has {} components, the product has {} factors",
                v.arity(),
                self.arity()
            )));
        }
        Ok(())
    }

    pub fn check_vertex(&self, v: &HyperVertex) -> Result<()> {
        self.check_arity(v)?;
        for (f, &c) in self.factors.iter().zip(v.components()) {
            f.check(c)?;
        }
        Ok(())
    }

    pub fn contains(&self, v: &HyperVertex) -> bool {
        self.check_vertex(v).is_ok()
    }

    pub fn is_generic(&self, v: &HyperVertex) -> bool {
        self.contains(v)
            && self
                .factors
                .iter()
                .zip(v.components())
                .all(|(f, &c)| f.is_generic(c))
    }

    /// Componentwise supremum; `K` absorbs everything.
    pub fn sup_vertex(&self, a: &HyperVertex, b: &HyperVertex) -> Result<HyperVertex> {
        self.check_vertex(a)?;
        self.check_vertex(b)?;
        let comps = self
            .factors
            .iter()
            .zip(a.components().iter().zip(b.components()))
            .map(|(f, (&x, &y))| match (x, y) {
                (Component::Ball(p), Component::Ball(q)) => {
                    Component::Ball(f.tree.sup_unchecked(p, q))
                }
                _ => Component::Top,
            })
            .collect();
        Ok(HyperVertex(comps))
    }

    /// `a >> b`: strictly larger in every component.
    pub fn sufficiently_larger(&self, a: &HyperVertex, b: &HyperVertex) -> Result<bool> {
        self.check_vertex(a)?;
        self.check_vertex(b)?;
        Ok(self
            .factors
            .iter()
            .zip(a.components().iter().zip(b.components()))
            .all(|(f, (&x, &y))| match (x, y) {
                (Component::Top, Component::Ball(_)) => true,
                (Component::Ball(p), Component::Ball(q)) => p != q && f.tree.contains(p, q),
                _ => false,
            }))
    }

    /// Decreasing edges of maximal dimension starting at `v`.
    pub fn decreasing_edges(&self, v: &HyperVertex) -> Result<DecreasingEdges> {
        self.check_vertex(v)?;
        let mut axes = Vec::new();
        let mut choices = Vec::new();
        for (i, (f, &c)) in self.factors.iter().zip(v.components()).enumerate() {
            if let Component::Ball(b) = c {
                let kids = f.tree.maximal_subballs(b);
                if !kids.is_empty() {
                    axes.push(i);
                    choices.push(kids.to_vec());
                }
            }
        }
        Ok(DecreasingEdges {
            top: v.clone(),
            axes,
            choices,
        })
    }

    /// Number of points of the product (the dimension of the function space).
    pub fn grid_len(&self) -> usize {
        self.factors.iter().map(|f| f.tree.leaf_count()).product()
    }

    /// All multiwavelets: tensor products over generic vertices of the
    /// (augmented) hypergraph, with `A^{-1/2}` on `K` components.
    pub fn multiwavelets(&self) -> impl Iterator<Item = MultiWavelet> + '_ {
        self.generic_vertices().flat_map(move |v| {
            let js: Vec<Vec<Option<usize>>> = self
                .factors
                .iter()
                .zip(v.components())
                .map(|(f, &c)| match c {
                    Component::Ball(b) => f.basis.at(b).iter().map(|w| Some(w.j())).collect(),
                    Component::Top => vec![None],
                })
                .collect();
            TupleIter::new(js).map(move |j| MultiWavelet {
                vertex: v.clone(),
                j,
            })
        })
    }

    pub fn multiwavelet_count(&self) -> usize {
        self.factors
            .iter()
            .map(|f| f.basis.len() + f.augmented as usize)
            .product()
    }
}

/// Maximal-dimension decreasing edges below a vertex.
#[derive(Clone, Debug)]
pub struct DecreasingEdges {
    top: HyperVertex,
    /// Factors whose component is a non-leaf ball.
    axes: Vec<usize>,
    choices: Vec<Vec<BallId>>,
}

/// A `d`-dimensional cube of vertices. Corner `mask` replaces the component on
/// axis `k` by the chosen maximal subball when bit `k` of `mask` is set, so
/// corner 0 is the largest vertex and corner `2^d - 1` the smallest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub corners: Vec<HyperVertex>,
}

impl Edge {
    pub fn largest(&self) -> &HyperVertex {
        &self.corners[0]
    }

    pub fn smallest(&self) -> &HyperVertex {
        self.corners
            .last()
            .expect("an edge has at least one corner")
    }
}

impl DecreasingEdges {
    pub fn dimension(&self) -> usize {
        self.axes.len()
    }

    /// Product of the branching indices of the non-leaf components.
    pub fn count(&self) -> usize {
        self.choices.iter().map(Vec::len).product()
    }

    pub fn iter(&self) -> impl Iterator<Item = Edge> + '_ {
        let d = self.dimension();
        TupleIter::new(self.choices.clone()).map(move |pick| {
            let corners = (0..1usize << d)
                .map(|mask| {
                    let mut comps = self.top.0.clone();
                    for (k, &axis) in self.axes.iter().enumerate() {
                        if mask >> k & 1 == 1 {
                            comps[axis] = Component::Ball(pick[k]);
                        }
                    }
                    HyperVertex(comps)
                })
                .collect();
            Edge { corners }
        })
    }
}

/// A tensor product of factor wavelets; `None` in `j` marks a `K` component.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct MultiWavelet {
    pub vertex: HyperVertex,
    pub j: Vec<Option<usize>>,
}

impl MultiWavelet {
    fn factor_value(&self, space: &ProductSpace, i: usize, x: BallId) -> Complex64 {
        let f = space.factor(i);
        match (self.vertex.0[i], self.j[i]) {
            (Component::Ball(b), Some(j)) => f
                .basis
                .get(b, j)
                .map_or(Complex64::new(0.0, 0.0), |w| w.value_on(&f.tree, x)),
            _ => Complex64::new(f.basis.constant(), 0.0),
        }
    }

    /// Value at a point given as one leaf per factor.
    pub fn value_at(&self, space: &ProductSpace, point: &[BallId]) -> Complex64 {
        point
            .iter()
            .enumerate()
            .map(|(i, &x)| self.factor_value(space, i, x))
            .product()
    }

    /// Values on the whole grid in row-major order (factor 0 slowest), the
    /// same ordering as a Kronecker product of per-factor matrices.
    pub fn to_dense(&self, space: &ProductSpace) -> Vec<Complex64> {
        let per_factor: Vec<Vec<Complex64>> = (0..space.arity())
            .map(|i| {
                space
                    .tree(i)
                    .leaves()
                    .iter()
                    .map(|&x| self.factor_value(space, i, x))
                    .collect()
            })
            .collect();
        kron_vectors(&per_factor)
    }
}

/// Row-major tensor product of vectors.
pub fn kron_vectors(parts: &[Vec<Complex64>]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(1.0, 0.0)];
    for part in parts {
        out = out
            .iter()
            .flat_map(|a| part.iter().map(move |b| a * b))
            .collect();
    }
    out
}

/// One monomial `a · T_{i1} ⋯ T_{ik}`; an empty factor list is the constant term.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    /// 0-based factor indices.
    pub factors: Vec<usize>,
    pub coeff: Complex64,
}

/// A polynomial in the one-dimensional operators `T_1, …, T_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiOperator {
    symbols: Vec<Symbol>,
    tails: Vec<Tail>,
    terms: Vec<Term>,
}

impl MultiOperator {
    pub fn new(symbols: Vec<Symbol>, tails: Vec<Tail>, terms: Vec<Term>) -> Result<Self> {
        if symbols.is_empty() || symbols.len() != tails.len() {
            return Err(Error::Parameter(
                "one symbol and one tail mode per factor are required".into(),
            ));
        }
        for t in &terms {
            if let Some(&i) = t.factors.iter().find(|&&i| i >= symbols.len()) {
                return Err(Error::Parameter(format!(
                    "term refers to factor {} of {}",
                    i + 1,
                    symbols.len()
                )));
            }
        }
        Ok(MultiOperator {
            symbols,
            tails,
            terms,
        })
    }

    /// The single-factor operator `T_1` of a one-dimensional problem.
    pub fn one_dim(symbol: Symbol, tail: Tail) -> Self {
        MultiOperator {
            symbols: vec![symbol],
            tails: vec![tail],
            terms: vec![Term {
                factors: vec![0],
                coeff: Complex64::new(1.0, 0.0),
            }],
        }
    }

    pub fn arity(&self) -> usize {
        self.symbols.len()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn tails(&self) -> &[Tail] {
        &self.tails
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// The operator multiplied by `k`.
    pub fn scaled(&self, k: Complex64) -> Self {
        MultiOperator {
            symbols: self.symbols.clone(),
            tails: self.tails.clone(),
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    factors: t.factors.clone(),
                    coeff: t.coeff * k,
                })
                .collect(),
        }
    }

    pub fn spectrum(&self, space: &ProductSpace) -> Result<MultiSpectrum> {
        if space.arity() != self.arity() {
            return Err(Error::Parameter(format!(
                "operator has {} factors, space has {}",
                self.arity(),
                space.arity()
            )));
        }
        let factors = self
            .symbols
            .iter()
            .zip(&self.tails)
            .enumerate()
            .map(|(i, (s, &t))| pdo::spectrum(space.tree(i), s, t))
            .collect::<Result<_>>()?;
        Ok(MultiSpectrum {
            factors,
            terms: self.terms.clone(),
        })
    }
}

/// Per-factor spectra together with the polynomial that combines them.
#[derive(Clone, Debug)]
pub struct MultiSpectrum {
    factors: Vec<Spectrum>,
    terms: Vec<Term>,
}

impl MultiSpectrum {
    pub fn new(factors: Vec<Spectrum>, terms: Vec<Term>) -> Self {
        MultiSpectrum { factors, terms }
    }

    pub fn arity(&self) -> usize {
        self.factors.len()
    }

    pub fn factor(&self, i: usize) -> &Spectrum {
        &self.factors[i]
    }

    /// Eigenvalue of `T_i` on component `c`; zero on `K`, where the operator sees a constant.
    pub fn factor_eigenvalue(&self, i: usize, c: Component) -> Result<Complex64> {
        match c {
            Component::Top => Ok(Complex64::new(0.0, 0.0)),
            Component::Ball(b) => self.factors[i].get(b).ok_or_else(|| {
                Error::Domain(format!("ball {b} of factor {} carries no wavelets", i + 1))
            }),
        }
    }

    /// `Λ = (λ_{I^1}, …, λ_{I^n})`.
    pub fn lambda_vector(&self, v: &HyperVertex) -> Result<Vec<Complex64>> {
        if v.arity() != self.arity() {
            return Err(Error::Parameter(format!(
                "vertex {v} does not have {} components",
                self.arity()
            )));
        }
        v.components()
            .iter()
            .enumerate()
            .map(|(i, &c)| self.factor_eigenvalue(i, c))
            .collect()
    }

    /// The multilinear form `A(Λ) = Σ a_{i1…ik} λ_{i1} ⋯ λ_{ik}`.
    pub fn form(&self, lambdas: &[Complex64]) -> Complex64 {
        self.terms
            .iter()
            .map(|t| t.coeff * t.factors.iter().map(|&i| lambdas[i]).product::<Complex64>())
            .sum()
    }

    pub fn eigenvalue(&self, v: &HyperVertex) -> Result<Complex64> {
        Ok(self.form(&self.lambda_vector(v)?))
    }

    /// Largest term magnitude `|a| Π |λ|` at `v`, or 1 when every term vanishes.
    pub fn scale(&self, v: &HyperVertex) -> Result<f64> {
        let l = self.lambda_vector(v)?;
        let s = self
            .terms
            .iter()
            .map(|t| t.coeff.norm() * t.factors.iter().map(|&i| l[i].norm()).product::<f64>())
            .fold(0.0, f64::max);
        Ok(if s > 0.0 { s } else { 1.0 })
    }
}

/// `λ_I` of a polynomial operator at a generic vertex.
pub fn multi_eigenvalue(
    op: &MultiOperator,
    space: &ProductSpace,
    v: &HyperVertex,
) -> Result<Complex64> {
    if !space.is_generic(v) {
        return Err(Error::Domain(format!("vertex {v} is not generic")));
    }
    op.spectrum(space)?.eigenvalue(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn padic(p: u32, d: u32) -> BallTree {
        BallTree::padic(p, d).unwrap()
    }

    #[test]
    fn vertex_counts() {
        let s = ProductSpace::plain(vec![padic(2, 1), padic(2, 1)]).unwrap();
        assert_eq!(s.vertices().count(), 9);
        assert_eq!(s.vertex_count(), 9);
        assert_eq!(s.generic_vertices().count(), 1);

        let s = ProductSpace::plain(vec![padic(2, 2), padic(3, 1)]).unwrap();
        assert_eq!(s.generic_vertices().count(), 3);

        let s = ProductSpace::augmented(vec![padic(2, 2), padic(3, 1)]).unwrap();
        assert_eq!(s.vertices().count(), 8 * 5);
        assert_eq!(s.generic_count(), 4 * 2);
        assert!(ProductSpace::new(vec![]).is_err());
    }

    #[test]
    fn vertices_are_lexicographic() {
        let s = ProductSpace::augmented(vec![padic(2, 1), padic(3, 1)]).unwrap();
        let v: Vec<_> = s.vertices().collect();
        let mut sorted = v.clone();
        sorted.sort();
        assert_eq!(v, sorted);
    }

    #[test]
    fn sup_and_order() {
        let t = padic(2, 1);
        let s = ProductSpace::augmented(vec![t.clone(), t.clone()]).unwrap();
        let root = Component::Ball(t.root());
        let l0 = Component::Ball(t.leaves()[0]);
        let l1 = Component::Ball(t.leaves()[1]);
        let a = HyperVertex(vec![l0, l1]);
        assert_eq!(s.sup_vertex(&a, &a).unwrap(), a);
        let b = HyperVertex(vec![l1, l0]);
        assert_eq!(s.sup_vertex(&a, &b).unwrap(), HyperVertex(vec![root, root]));
        let k = HyperVertex(vec![Component::Top, l0]);
        assert_eq!(s.sup_vertex(&k, &a).unwrap().0[0], Component::Top);

        let top = HyperVertex(vec![root, root]);
        assert!(s.sufficiently_larger(&top, &a).unwrap());
        assert!(!s
            .sufficiently_larger(&top, &HyperVertex(vec![root, l0]))
            .unwrap());
        assert!(s
            .sufficiently_larger(&HyperVertex(vec![Component::Top, root]), &a)
            .unwrap());

        let short = HyperVertex(vec![root]);
        assert!(matches!(s.sup_vertex(&short, &a), Err(Error::Parameter(_))));
    }

    #[test]
    fn edge_counts() {
        let s = ProductSpace::plain(vec![padic(2, 1), padic(3, 1)]).unwrap();
        let top = HyperVertex::from_balls(&[BallId(0), BallId(0)]);
        let e = s.decreasing_edges(&top).unwrap();
        assert_eq!((e.dimension(), e.count()), (2, 6));
        let edges: Vec<_> = e.iter().collect();
        assert_eq!(edges.len(), 6);
        assert!(edges
            .iter()
            .all(|x| x.corners.len() == 4 && x.largest() == &top));

        let leafy = HyperVertex::from_balls(&[BallId(0), BallId(1)]);
        assert_eq!(s.decreasing_edges(&leafy).unwrap().dimension(), 1);

        let one = ProductSpace::plain(vec![padic(3, 2)]).unwrap();
        let e = one
            .decreasing_edges(&HyperVertex::from_balls(&[BallId(0)]))
            .unwrap();
        assert_eq!((e.dimension(), e.count()), (1, 3));
    }

    #[test]
    fn multiwavelet_count_matches_grid() {
        let s = ProductSpace::augmented(vec![padic(2, 2), padic(3, 2)]).unwrap();
        assert_eq!(s.multiwavelets().count(), s.grid_len());
        assert_eq!(s.multiwavelet_count(), 36);
    }

    fn op_on(n: usize, terms: Vec<Term>) -> MultiOperator {
        MultiOperator::new(
            vec![Symbol::homogeneous(c(1.0, 0.0), 1.5); n],
            vec![Tail::None; n],
            terms,
        )
        .unwrap()
    }

    #[test]
    fn eigenvalue_examples() {
        let t = padic(2, 2);
        let s = ProductSpace::plain(vec![t.clone(), t.clone()]).unwrap();
        let diff = op_on(
            2,
            vec![
                Term {
                    factors: vec![0],
                    coeff: c(1.0, 0.0),
                },
                Term {
                    factors: vec![1],
                    coeff: c(-1.0, 0.0),
                },
            ],
        );
        for v in s.generic_vertices() {
            if v.0[0] == v.0[1] {
                assert_eq!(multi_eigenvalue(&diff, &s, &v).unwrap(), c(0.0, 0.0));
            }
        }

        let prod = MultiSpectrum::new(
            vec![
                Spectrum::from_values([(BallId(0), c(2.0, 0.0))].into()),
                Spectrum::from_values([(BallId(0), c(3.0, 0.0))].into()),
            ],
            vec![Term {
                factors: vec![0, 1],
                coeff: c(1.0, 0.0),
            }],
        );
        assert_eq!(
            prod.eigenvalue(&HyperVertex::from_balls(&[BallId(0), BallId(0)]))
                .unwrap(),
            c(6.0, 0.0)
        );

        let leafy = HyperVertex::from_balls(&[BallId(0), t.leaves()[0]]);
        assert!(matches!(
            multi_eigenvalue(&diff, &s, &leafy),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn product_operator_factorizes() {
        let (a, b) = (padic(2, 2), padic(3, 2));
        let s = ProductSpace::augmented(vec![a.clone(), b.clone()]).unwrap();
        let op = MultiOperator::new(
            vec![
                Symbol::homogeneous(c(1.0, 0.5), 1.2),
                Symbol::homogeneous(c(-0.3, 1.0), 0.4),
            ],
            vec![Tail::None; 2],
            vec![Term {
                factors: vec![0, 1],
                coeff: c(1.0, 0.0),
            }],
        )
        .unwrap();
        let sp = op.spectrum(&s).unwrap();
        for v in s.generic_vertices() {
            let l = sp.lambda_vector(&v).unwrap();
            assert!(
                (sp.eigenvalue(&v).unwrap() - l[0] * l[1]).norm()
                    <= 1e-12 * (1.0 + (l[0] * l[1]).norm())
            );
        }
    }

    #[test]
    fn bad_term_index_rejected() {
        let r = MultiOperator::new(
            vec![Symbol::homogeneous(c(1.0, 0.0), 1.0)],
            vec![Tail::None],
            vec![Term {
                factors: vec![1],
                coeff: c(1.0, 0.0),
            }],
        );
        assert!(matches!(r, Err(Error::Parameter(_))));
    }
}
