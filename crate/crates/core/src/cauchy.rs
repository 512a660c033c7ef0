//! Characteristics and Cauchy problems `Tu = f`.
//!
//! The operator is a polynomial in one-dimensional operators on a product of
//! ball trees (a single tree is the one-factor case). A vertex is
//! characteristic when its eigenvalue vanishes, up to a relative tolerance.
//! Off characteristics the solution coefficients are `f_{Ij} / λ_I`; the
//! coefficients with some `j^i = 0` come from the initial conditions, and
//! the coefficients at characteristic vertices are free.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::distributions::{apply_operator, CoeffIndex, GeneralizedFunction, LizorkinSeries};
use crate::error::{Error, Result};
use crate::par;
use crate::product::{HyperVertex, MultiOperator, MultiSpectrum, ProductSpace, TupleIter};
use crate::tree::{BallId, BallTree};

/// Default relative threshold separating zero eigenvalues from nonzero ones.
pub const DEFAULT_EPSILON: f64 = 1e-9;
/// Eigenvalues below this relative size (but above epsilon) are reported as near-kernel.
pub const NEAR_KERNEL: f64 = 1e-6;
/// Relative residual above which a computed solution is rejected.
pub const RESIDUAL_LIMIT: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct Characteristic {
    pub vertex: HyperVertex,
    pub lambda: Complex64,
    pub scale: f64,
}

/// Generic vertices `I` with `|λ_I| ≤ epsilon · scale(I)`.
pub fn characteristics(
    spectrum: &MultiSpectrum,
    space: &ProductSpace,
    epsilon: f64,
) -> Result<Vec<Characteristic>> {
    let vertices: Vec<HyperVertex> = space.generic_vertices().collect();
    let rows = par::map(&vertices, |v| -> Result<Option<Characteristic>> {
        let lambda = spectrum.eigenvalue(v)?;
        let scale = spectrum.scale(v)?;
        Ok((lambda.norm() <= epsilon * scale).then(|| Characteristic {
            vertex: v.clone(),
            lambda,
            scale,
        }))
    });
    rows.into_iter().filter_map(Result::transpose).collect()
}

/// How free coefficients at characteristic vertices are chosen.
#[derive(Clone, Debug, Default, PartialEq)]
pub enum FreeParams {
    #[default]
    Zero,
    /// Uniform random real and imaginary parts in `[-1, 1)`, drawn in index order.
    Seed(u64),
    /// Explicit values; unlisted indices are zero.
    Explicit(BTreeMap<CoeffIndex, Complex64>),
}

#[derive(Clone, Debug)]
pub struct CauchyProblem {
    pub space: ProductSpace,
    pub operator: MultiOperator,
    pub rhs: LizorkinSeries,
    pub anchor: Vec<BallId>,
    /// Initial conditions: coefficients at indices with some `j^i = 0`.
    pub boundary: BTreeMap<CoeffIndex, Complex64>,
    pub epsilon: f64,
    pub free_params: FreeParams,
}

impl CauchyProblem {
    /// `T u = f` on one tree with `u(χ_{I_0}) = u_0 ν(I_0)`.
    pub fn one_dim(
        tree: BallTree,
        operator: MultiOperator,
        rhs: BTreeMap<(BallId, usize), Complex64>,
        anchor: BallId,
        anchor_value: Complex64,
    ) -> Result<Self> {
        Ok(CauchyProblem {
            space: ProductSpace::plain(vec![tree])?,
            operator,
            rhs: LizorkinSeries::one_dim(rhs)?,
            anchor: vec![anchor],
            boundary: [(CoeffIndex::one_dim(anchor, 0), anchor_value)].into(),
            epsilon: DEFAULT_EPSILON,
            free_params: FreeParams::Zero,
        })
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_free_params(mut self, free: FreeParams) -> Self {
        self.free_params = free;
        self
    }

    fn check(&self) -> Result<MultiSpectrum> {
        if self.space.factors().iter().any(|f| f.is_augmented()) {
            return Err(Error::Parameter(
                "Cauchy problems live on the plain (unaugmented) product".into(),
            ));
        }
        if self.epsilon.is_nan() || self.epsilon < 0.0 {
            return Err(Error::Parameter(format!(
                "invalid epsilon {}",
                self.epsilon
            )));
        }
        self.rhs.validate(&self.space)?;
        if let Some(idx) = self.boundary.keys().find(|k| k.is_wavelet()) {
            return Err(Error::Domain(format!(
                "boundary index {idx} has no zero component; it is not an initial condition"
            )));
        }
        self.operator.spectrum(&self.space)
    }
}

/// A coefficient of the right-hand side at a characteristic vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub index: CoeffIndex,
    pub value: Complex64,
    pub lambda: Complex64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "f{} = {} at a characteristic vertex (lambda = {})",
            self.index, self.value, self.lambda
        )
    }
}

struct Classified {
    lambda: Complex64,
    scale: f64,
}

impl Classified {
    fn is_characteristic(&self, epsilon: f64) -> bool {
        self.lambda.norm() <= epsilon * self.scale
    }
}

fn classify(spectrum: &MultiSpectrum, balls: &[BallId]) -> Result<Classified> {
    let v = HyperVertex::from_balls(balls);
    Ok(Classified {
        lambda: spectrum.eigenvalue(&v)?,
        scale: spectrum.scale(&v)?,
    })
}

fn violations(problem: &CauchyProblem, spectrum: &MultiSpectrum) -> Result<Vec<Violation>> {
    let limit = problem.epsilon * problem.rhs.max_abs();
    let mut out = Vec::new();
    for (idx, &value) in problem.rhs.iter() {
        let c = classify(spectrum, &idx.balls)?;
        if c.is_characteristic(problem.epsilon) && value.norm() > limit {
            out.push(Violation {
                index: idx.clone(),
                value,
                lambda: c.lambda,
            });
        }
    }
    Ok(out)
}

/// Necessary conditions: the right-hand side vanishes at characteristic vertices.
pub fn check_solvability(problem: &CauchyProblem) -> Result<Vec<Violation>> {
    let spectrum = problem.check()?;
    violations(problem, &spectrum)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FreeParam {
    pub index: CoeffIndex,
    pub value: Complex64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ResidualReport {
    /// `max |(Tu)_{Ij} - f_{Ij}| / max |f|` over all wavelet indices touched.
    pub max_rel: f64,
    pub characteristic_vertices: usize,
    /// Indices whose eigenvalue is small but above the characteristic threshold.
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub u: GeneralizedFunction,
    pub free_params: Vec<FreeParam>,
    pub residual: ResidualReport,
}

/// Wavelet numbers available at each component of a vertex.
fn wavelet_tuples(space: &ProductSpace, balls: &[BallId]) -> Vec<Vec<usize>> {
    let lists = balls
        .iter()
        .enumerate()
        .map(|(i, &b)| (1..=space.factor(i).basis().at(b).len()).collect())
        .collect();
    TupleIter::new(lists).collect()
}

pub fn solve(problem: &CauchyProblem) -> Result<Solution> {
    let spectrum = problem.check()?;
    let bad = violations(problem, &spectrum)?;
    if !bad.is_empty() {
        return Err(Error::Unsolvable(bad));
    }
    let eps = problem.epsilon;
    let mut coeffs: BTreeMap<CoeffIndex, Complex64> = problem.boundary.clone();
    let mut warnings = Vec::new();

    for (idx, &f) in problem.rhs.iter() {
        let c = classify(&spectrum, &idx.balls)?;
        if c.is_characteristic(eps) {
            continue;
        }
        if c.lambda.norm() < NEAR_KERNEL * c.scale {
            warnings.push(format!(
                "index {idx}: |lambda| = {:e} is within {NEAR_KERNEL:e} of the kernel",
                c.lambda.norm()
            ));
        }
        let v = f / c.lambda;
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::IllConditioned(format!(
                "coefficient at {idx} overflows (f = {f}, lambda = {})",
                c.lambda
            )));
        }
        coeffs.insert(idx.clone(), v);
    }

    let chars = characteristics(&spectrum, &problem.space, eps)?;
    let mut rng = match problem.free_params {
        FreeParams::Seed(s) => Some(ChaCha8Rng::seed_from_u64(s)),
        _ => None,
    };
    let mut free_params = Vec::new();
    for ch in &chars {
        let balls = ch
            .vertex
            .balls()
            .expect("plain product has no K components");
        for j in wavelet_tuples(&problem.space, &balls) {
            let index = CoeffIndex::new(balls.clone(), j);
            let value = match (&problem.free_params, rng.as_mut()) {
                (FreeParams::Explicit(m), _) => m.get(&index).copied().unwrap_or_default(),
                (FreeParams::Seed(_), Some(r)) => {
                    Complex64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))
                }
                _ => Complex64::new(0.0, 0.0),
            };
            coeffs.insert(index.clone(), value);
            free_params.push(FreeParam { index, value });
        }
    }
    if let FreeParams::Explicit(m) = &problem.free_params {
        if let Some(k) = m
            .keys()
            .find(|k| !free_params.iter().any(|p| &p.index == *k))
        {
            return Err(Error::Domain(format!(
                "free parameter {k} is not at a characteristic vertex"
            )));
        }
    }

    let u = GeneralizedFunction::new(&problem.space, problem.anchor.clone(), coeffs)?;

    let tu = apply_operator(&u, &spectrum)?;
    let scale = problem.rhs.max_abs().max(f64::MIN_POSITIVE);
    let mut max_abs_err: f64 = 0.0;
    for (idx, &got) in tu.iter() {
        max_abs_err = max_abs_err.max((got - problem.rhs.get(idx)).norm());
    }
    for (idx, &want) in problem.rhs.iter() {
        max_abs_err = max_abs_err.max((tu.get(idx) - want).norm());
    }
    let max_rel = if problem.rhs.is_empty() {
        max_abs_err
    } else {
        max_abs_err / scale
    };
    if max_rel.is_nan() || max_rel > RESIDUAL_LIMIT {
        return Err(Error::IllConditioned(format!(
            "relative residual {max_rel:e} exceeds {RESIDUAL_LIMIT:e}"
        )));
    }

    Ok(Solution {
        u,
        free_params,
        residual: ResidualReport {
            max_rel,
            characteristic_vertices: chars.len(),
            warnings,
        },
    })
}
