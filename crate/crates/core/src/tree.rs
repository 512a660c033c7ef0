//! Finite measured ball trees.
//!
//! A finite regular ultrametric space is stored through its tree of balls:
//! vertices are balls ordered by inclusion, each ball knows its measure and
//! diameter, and points are the leaves. Every query on points (for example
//! the kernel of an ultrametric operator) only needs `sup`, the smallest ball
//! containing both arguments.

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for measure additivity.
pub const ADDITIVITY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BallId(pub usize);

impl BallId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for BallId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One vertex of an explicitly specified tree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexSpec {
    pub id: usize,
    pub parent: Option<usize>,
    pub measure: f64,
    pub diameter: f64,
}

#[derive(Clone, Debug)]
pub struct BallTree {
    root: BallId,
    parent: Vec<Option<BallId>>,
    children: Vec<Vec<BallId>>,
    measure: Vec<f64>,
    diameter: Vec<f64>,
    depth: Vec<usize>,
    /// Leaves in depth-first order; the leaves below any ball form a contiguous run.
    leaves: Vec<BallId>,
    leaf_span: Vec<(usize, usize)>,
    padic: Option<(u32, u32)>,
}

impl BallTree {
    /// Full p-ary tree of the given depth: the ball `Z_p` cut off at scale `p^-depth`.
    ///
    /// Vertices are numbered level by level, children ordered by digit `0..p`.
    /// A ball on level `k` has measure and diameter `p^-k`.
    pub fn padic(p: u32, depth: u32) -> Result<Self> {
        if p < 2 {
            return Err(Error::Parameter(format!("p must be at least 2, got {p}")));
        }
        if depth < 1 {
            return Err(Error::Parameter("depth must be at least 1".into()));
        }
        let total = (0..=depth)
            .try_fold(0usize, |acc, k| {
                (p as usize).checked_pow(k).and_then(|n| acc.checked_add(n))
            })
            .filter(|&n| n <= 1 << 26)
            .ok_or_else(|| Error::Parameter(format!("padic({p},{depth}) is too large")))?;

        let mut parent = Vec::with_capacity(total);
        let mut diameter = Vec::with_capacity(total);
        let mut measure = Vec::with_capacity(total);
        parent.push(None);
        diameter.push(1.0);
        measure.push(1.0);
        let mut level_start = 0;
        let mut level_len = 1;
        for k in 1..=depth {
            let scale = (p as f64).powi(-(k as i32));
            for v in level_start..level_start + level_len {
                for _ in 0..p {
                    parent.push(Some(v));
                    diameter.push(scale);
                    measure.push(scale);
                }
            }
            level_start += level_len;
            level_len *= p as usize;
        }
        let mut tree = Self::assemble(parent, measure, diameter)?;
        tree.padic = Some((p, depth));
        Ok(tree)
    }

    /// Builds a tree from explicit vertex records. Ids must be exactly `0..n`
    /// in any order, and the stored measures must already be additive.
    pub fn from_vertices(vertices: &[VertexSpec]) -> Result<Self> {
        let n = vertices.len();
        if n == 0 {
            return Err(Error::Structure("no vertices".into()));
        }
        let mut parent = vec![None; n];
        let mut measure = vec![f64::NAN; n];
        let mut diameter = vec![f64::NAN; n];
        let mut seen = vec![false; n];
        for v in vertices {
            if v.id >= n || seen[v.id] {
                return Err(Error::Structure(format!(
                    "vertex ids must be a permutation of 0..{n}; offending id {}",
                    v.id
                )));
            }
            seen[v.id] = true;
            parent[v.id] = v.parent;
            measure[v.id] = v.measure;
            diameter[v.id] = v.diameter;
        }
        let tree = Self::assemble(parent, measure, diameter)?;
        tree.check_additivity()?;
        Ok(tree)
    }

    /// Builds a tree from its shape and the measures of its leaves; interior
    /// measures are summed from the leaves. `leaf_measure` is indexed by vertex
    /// id and ignored on interior vertices.
    pub fn from_leaf_measures(
        parent: &[Option<usize>],
        diameter: &[f64],
        leaf_measure: &[f64],
    ) -> Result<Self> {
        if parent.len() != diameter.len() || parent.len() != leaf_measure.len() {
            return Err(Error::Parameter(
                "parent, diameter and measure arrays differ in length".into(),
            ));
        }
        let mut tree = Self::assemble(parent.to_vec(), leaf_measure.to_vec(), diameter.to_vec())?;
        for &leaf in &tree.leaves {
            if !(leaf_measure[leaf.0] >= 0.0 && leaf_measure[leaf.0].is_finite()) {
                return Err(Error::Structure(format!(
                    "leaf {leaf} has invalid measure {}",
                    leaf_measure[leaf.0]
                )));
            }
        }
        // Reverse BFS order visits children before parents.
        for b in tree.bfs_order().into_iter().rev() {
            if !tree.children[b.0].is_empty() {
                tree.measure[b.0] = tree.children[b.0].iter().map(|c| tree.measure[c.0]).sum();
            }
        }
        Ok(tree)
    }

    /// Random tree with `1..=max_depth` levels below the root, `2..=max_branching`
    /// children per interior ball and leaf measures drawn from `(0.05, 1]`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, max_depth: usize, max_branching: usize) -> Self {
        assert!(max_depth >= 1 && max_branching >= 2);
        let mut parent = vec![None];
        let mut diameter = vec![1.0];
        let mut level = vec![0usize];
        let target_depth = rng.random_range(1..=max_depth);
        let mut d = 0;
        while d < target_depth {
            let mut next = Vec::new();
            for &v in &level {
                // Keep at least one branch growing so the requested depth is reached.
                let split = d == 0 || next.is_empty() || rng.random_bool(0.7);
                if !split {
                    continue;
                }
                let k = rng.random_range(2..=max_branching);
                for _ in 0..k {
                    parent.push(Some(v));
                    diameter.push(diameter[v] * rng.random_range(0.2..0.8));
                    next.push(parent.len() - 1);
                }
            }
            level = next;
            d += 1;
        }
        let leaf_measure: Vec<f64> = (0..parent.len())
            .map(|_| rng.random_range(0.05..=1.0))
            .collect();
        Self::from_leaf_measures(&parent, &diameter, &leaf_measure)
            .expect("randomly generated tree is well formed")
    }

    fn assemble(parent: Vec<Option<usize>>, measure: Vec<f64>, diameter: Vec<f64>) -> Result<Self> {
        let n = parent.len();
        let mut children = vec![Vec::new(); n];
        let mut root = None;
        for (v, p) in parent.iter().enumerate() {
            match *p {
                None if root.is_some() => {
                    return Err(Error::Structure(format!(
                        "more than one root: {} and {v}",
                        root.unwrap()
                    )))
                }
                None => root = Some(v),
                Some(p) if p >= n => {
                    return Err(Error::Structure(format!(
                        "vertex {v} has unknown parent {p}"
                    )))
                }
                Some(p) if p == v => {
                    return Err(Error::Structure(format!("vertex {v} is its own parent")))
                }
                Some(p) => children[p].push(BallId(v)),
            }
        }
        let root = root.ok_or_else(|| Error::Structure("no root vertex".into()))?;

        for v in 0..n {
            if !measure[v].is_finite() || measure[v] < 0.0 {
                return Err(Error::Structure(format!(
                    "ball {v} has invalid measure {}",
                    measure[v]
                )));
            }
            if !diameter[v].is_finite() || diameter[v] < 0.0 {
                return Err(Error::Structure(format!(
                    "ball {v} has invalid diameter {}",
                    diameter[v]
                )));
            }
            if children[v].len() == 1 {
                return Err(Error::Structure(format!(
                    "ball {v} has a single maximal subball; non-leaf balls need at least two"
                )));
            }
            if let Some(p) = parent[v] {
                if diameter[v] >= diameter[p] {
                    return Err(Error::Structure(format!(
                        "diameter of ball {v} ({}) is not below that of its parent {p} ({})",
                        diameter[v], diameter[p]
                    )));
                }
            }
        }

        let mut tree = BallTree {
            root: BallId(root),
            parent: parent.into_iter().map(|p| p.map(BallId)).collect(),
            children,
            measure,
            diameter,
            depth: vec![usize::MAX; n],
            leaves: Vec::new(),
            leaf_span: vec![(0, 0); n],
            padic: None,
        };

        // Iterative DFS: depths, leaf order and leaf spans; also detects cycles.
        let mut visited = 0;
        let mut stack = vec![(tree.root, false)];
        tree.depth[root] = 0;
        while let Some((b, done)) = stack.pop() {
            if done {
                tree.leaf_span[b.0].1 = tree.leaves.len();
                continue;
            }
            visited += 1;
            tree.leaf_span[b.0].0 = tree.leaves.len();
            if tree.children[b.0].is_empty() {
                tree.leaves.push(b);
                tree.leaf_span[b.0].1 = tree.leaves.len();
                continue;
            }
            stack.push((b, true));
            for &c in tree.children[b.0].iter().rev() {
                tree.depth[c.0] = tree.depth[b.0] + 1;
                stack.push((c, false));
            }
        }
        if visited != n {
            return Err(Error::Structure(format!(
                "{} vertices are not reachable from the root",
                n - visited
            )));
        }
        Ok(tree)
    }

    fn check_additivity(&self) -> Result<()> {
        for b in self.balls() {
            let kids = &self.children[b.0];
            if kids.is_empty() {
                continue;
            }
            let sum: f64 = kids.iter().map(|c| self.measure[c.0]).sum();
            let found = self.measure[b.0];
            if (sum - found).abs() > ADDITIVITY_TOL * sum.abs().max(found.abs()) {
                return Err(Error::Additivity {
                    ball: b,
                    expected: sum,
                    found,
                });
            }
        }
        Ok(())
    }

    fn bfs_order(&self) -> Vec<BallId> {
        let mut order = vec![self.root];
        let mut i = 0;
        while i < order.len() {
            let b = order[i];
            order.extend_from_slice(&self.children[b.0]);
            i += 1;
        }
        order
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn root(&self) -> BallId {
        self.root
    }

    /// `(p, depth)` when the tree was built by [`BallTree::padic`].
    pub fn padic_params(&self) -> Option<(u32, u32)> {
        self.padic
    }

    pub fn check(&self, b: BallId) -> Result<BallId> {
        if b.0 < self.len() {
            Ok(b)
        } else {
            Err(Error::UnknownBall(b))
        }
    }

    pub fn balls(&self) -> impl ExactSizeIterator<Item = BallId> + '_ {
        (0..self.len()).map(BallId)
    }

    /// Balls with at least one maximal subball, in id order.
    pub fn interior_balls(&self) -> Vec<BallId> {
        self.balls().filter(|&b| !self.is_leaf(b)).collect()
    }

    pub fn parent(&self, b: BallId) -> Option<BallId> {
        self.parent[b.0]
    }

    pub fn maximal_subballs(&self, b: BallId) -> &[BallId] {
        &self.children[b.0]
    }

    pub fn branching_index(&self, b: BallId) -> usize {
        self.children[b.0].len()
    }

    pub fn is_leaf(&self, b: BallId) -> bool {
        self.children[b.0].is_empty()
    }

    pub fn measure(&self, b: BallId) -> f64 {
        self.measure[b.0]
    }

    pub fn diameter(&self, b: BallId) -> f64 {
        self.diameter[b.0]
    }

    pub fn depth(&self, b: BallId) -> usize {
        self.depth[b.0]
    }

    pub fn total_measure(&self) -> f64 {
        self.measure[self.root.0]
    }

    /// All leaves in depth-first order. Functions on points are stored in this order.
    pub fn leaves(&self) -> &[BallId] {
        &self.leaves
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }

    /// Leaves contained in `b`, as a contiguous slice of [`BallTree::leaves`].
    pub fn leaves_under(&self, b: BallId) -> &[BallId] {
        let (s, e) = self.leaf_span[b.0];
        &self.leaves[s..e]
    }

    /// Position range of `b`'s leaves inside [`BallTree::leaves`].
    pub fn leaf_span(&self, b: BallId) -> std::ops::Range<usize> {
        let (s, e) = self.leaf_span[b.0];
        s..e
    }

    /// Position of a leaf inside [`BallTree::leaves`].
    pub fn leaf_position(&self, leaf: BallId) -> Option<usize> {
        self.is_leaf(leaf).then(|| self.leaf_span[leaf.0].0)
    }

    /// Balls of zero measure. They are legal but carry no wavelets.
    pub fn zero_measure_balls(&self) -> Vec<BallId> {
        self.balls().filter(|&b| self.measure[b.0] == 0.0).collect()
    }

    /// `b` followed by its strict ancestors up to the root.
    pub fn path_to_root(&self, b: BallId) -> impl Iterator<Item = BallId> + '_ {
        std::iter::successors(Some(b), move |&x| self.parent[x.0])
    }

    /// True when `inner` is `outer` or lies inside it.
    pub fn contains(&self, outer: BallId, inner: BallId) -> bool {
        let (s, e) = self.leaf_span[outer.0];
        let (si, ei) = self.leaf_span[inner.0];
        s <= si && ei <= e && self.depth[outer.0] <= self.depth[inner.0]
    }

    /// The maximal subball of `outer` that contains `inner`, if `inner` lies strictly inside `outer`.
    pub fn child_toward(&self, outer: BallId, inner: BallId) -> Option<BallId> {
        if outer == inner || !self.contains(outer, inner) {
            return None;
        }
        let target = self.depth[outer.0] + 1;
        let mut b = inner;
        while self.depth[b.0] > target {
            b = self.parent[b.0]?;
        }
        Some(b)
    }

    /// The smallest ball containing both arguments (their lowest common ancestor).
    pub fn sup(&self, a: BallId, b: BallId) -> Result<BallId> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.sup_unchecked(a, b))
    }

    pub(crate) fn sup_unchecked(&self, mut a: BallId, mut b: BallId) -> BallId {
        while self.depth[a.0] > self.depth[b.0] {
            a = self.parent[a.0].expect("non-root has a parent");
        }
        while self.depth[b.0] > self.depth[a.0] {
            b = self.parent[b.0].expect("non-root has a parent");
        }
        while a != b {
            a = self.parent[a.0].expect("non-root has a parent");
            b = self.parent[b.0].expect("non-root has a parent");
        }
        a
    }

    pub fn vertex_specs(&self) -> Vec<VertexSpec> {
        self.balls()
            .map(|b| VertexSpec {
                id: b.0,
                parent: self.parent[b.0].map(|p| p.0),
                measure: self.measure[b.0],
                diameter: self.diameter[b.0],
            })
            .collect()
    }
}

/// A point of the space: a leaf of the tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point(BallId);

impl Point {
    pub fn new(tree: &BallTree, leaf: BallId) -> Result<Self> {
        tree.check(leaf)?;
        if !tree.is_leaf(leaf) {
            return Err(Error::Domain(format!("ball {leaf} is not a leaf")));
        }
        Ok(Point(leaf))
    }

    pub fn ball(self) -> BallId {
        self.0
    }
}

/// A violated closure condition of a regular subtree, with its witnesses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RegularityViolation {
    /// Condition 1: `sup(a, b)` is missing.
    MissingSup { a: BallId, b: BallId, sup: BallId },
    /// Condition 2: `missing` lies strictly between members `lower ⊂ upper`.
    MissingIntermediate {
        lower: BallId,
        upper: BallId,
        missing: BallId,
    },
    /// Condition 3: `present` is a member maximal subball of `parent`, `missing` is not.
    MissingSibling {
        parent: BallId,
        present: BallId,
        missing: BallId,
    },
}

impl RegularityViolation {
    pub fn condition(&self) -> u8 {
        match self {
            RegularityViolation::MissingSup { .. } => 1,
            RegularityViolation::MissingIntermediate { .. } => 2,
            RegularityViolation::MissingSibling { .. } => 3,
        }
    }
}

impl fmt::Display for RegularityViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegularityViolation::MissingSup { a, b, sup } => {
                write!(f, "condition 1: sup({a}, {b}) = {sup} is missing")
            }
            RegularityViolation::MissingIntermediate { lower, upper, missing } => write!(
                f,
                "condition 2: {missing} lies between members {lower} and {upper} but is missing"
            ),
            RegularityViolation::MissingSibling { parent, present, missing } => write!(
                f,
                "condition 3: {present} is a maximal subball of member {parent}, sibling {missing} is missing"
            ),
        }
    }
}

/// Checks the three closure conditions of a regular subtree. An empty result means regular.
pub fn validate_regular_subtree(
    tree: &BallTree,
    members: &BTreeSet<BallId>,
) -> Result<Vec<RegularityViolation>> {
    if members.is_empty() {
        return Err(Error::Parameter("empty member set".into()));
    }
    for &m in members {
        tree.check(m)?;
    }
    let list: Vec<BallId> = members.iter().copied().collect();
    let mut out = Vec::new();

    for (i, &a) in list.iter().enumerate() {
        for &b in &list[i + 1..] {
            let s = tree.sup_unchecked(a, b);
            if !members.contains(&s) {
                out.push(RegularityViolation::MissingSup { a, b, sup: s });
            }
        }
    }

    for &lower in &list {
        let mut mid = Vec::new();
        for anc in tree.path_to_root(lower).skip(1) {
            if members.contains(&anc) {
                for &m in &mid {
                    out.push(RegularityViolation::MissingIntermediate {
                        lower,
                        upper: anc,
                        missing: m,
                    });
                }
                mid.clear();
            } else {
                mid.push(anc);
            }
        }
    }

    for &present in &list {
        let Some(parent) = tree.parent(present) else {
            continue;
        };
        if !members.contains(&parent) {
            continue;
        }
        for &sib in tree.maximal_subballs(parent) {
            // Report each missing sibling once, against the first present child.
            let first_present = tree
                .maximal_subballs(parent)
                .iter()
                .find(|c| members.contains(c))
                .copied();
            if !members.contains(&sib) && first_present == Some(present) {
                out.push(RegularityViolation::MissingSibling {
                    parent,
                    present,
                    missing: sib,
                });
            }
        }
    }
    Ok(out)
}

/// A validated regular subtree. Its minimal members play the role of points.
#[derive(Clone, Debug)]
pub struct RegularSubtree {
    members: BTreeSet<BallId>,
    top: BallId,
    minimal: Vec<BallId>,
}

impl RegularSubtree {
    pub fn new(tree: &BallTree, members: BTreeSet<BallId>) -> Result<Self> {
        let violations = validate_regular_subtree(tree, &members)?;
        if let Some(v) = violations.first() {
            return Err(Error::Domain(format!(
                "not a regular subtree ({} violation(s)); first: {v}",
                violations.len()
            )));
        }
        let top = *members
            .iter()
            .min_by_key(|b| tree.depth(**b))
            .expect("non-empty");
        let mut minimal: Vec<BallId> = members
            .iter()
            .copied()
            .filter(|&b| !tree.maximal_subballs(b).iter().any(|c| members.contains(c)))
            .collect();
        minimal.sort_by_key(|&b| (tree.leaf_span(b).start, tree.depth(b)));
        Ok(RegularSubtree {
            members,
            top,
            minimal,
        })
    }

    /// The whole vertex set of `tree`.
    pub fn full(tree: &BallTree) -> Self {
        RegularSubtree {
            members: tree.balls().collect(),
            top: tree.root(),
            minimal: tree.leaves().to_vec(),
        }
    }

    pub fn members(&self) -> &BTreeSet<BallId> {
        &self.members
    }

    pub fn contains(&self, b: BallId) -> bool {
        self.members.contains(&b)
    }

    /// The largest member; every test function on the subtree is supported in it.
    pub fn top(&self) -> BallId {
        self.top
    }

    /// Minimal members in depth-first order.
    pub fn minimal(&self) -> &[BallId] {
        &self.minimal
    }

    /// Members that carry wavelets, in id order.
    pub fn non_minimal(&self, tree: &BallTree) -> Vec<BallId> {
        self.members
            .iter()
            .copied()
            .filter(|&b| {
                tree.maximal_subballs(b)
                    .iter()
                    .any(|c| self.members.contains(c))
            })
            .collect()
    }
}
