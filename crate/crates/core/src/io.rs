//! JSON file formats.
//!
//! Any place that expects a space, symbol, operator or expansion accepts
//! either an inline JSON object or a string. A string is a path (relative to
//! the referring file) or one of the shorthands `padic(p,depth)` and
//! `homog(beta=…[,c=…][,tail])`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::cauchy::{CauchyProblem, FreeParams, Solution, DEFAULT_EPSILON};
use crate::distributions::{CoeffIndex, GeneralizedFunction, LizorkinSeries};
use crate::error::{Error, Result};
use crate::pdo::{Symbol, Tail};
use crate::product::{MultiOperator, ProductSpace, Term};
use crate::tree::{BallId, BallTree, VertexSpec};
use crate::wavelets::WaveletExpansion;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Ref<T> {
    Text(String),
    Inline(T),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SpaceFile {
    Padic {
        p: u32,
        depth: u32,
    },
    Explicit {
        vertices: Vec<VertexSpec>,
    },
    /// A product of trees, one per factor.
    Product {
        factors: Vec<Ref<SpaceFile>>,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BallValue {
    pub ball: BallId,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SymbolFile {
    Table {
        entries: Vec<BallValue>,
    },
    Homogeneous {
        c: [f64; 2],
        beta: f64,
        #[serde(default)]
        tail: bool,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermFile {
    /// 1-based factor indices; empty for the constant term.
    pub indices: Vec<usize>,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorFile {
    pub factors: Vec<Ref<SymbolFile>>,
    pub terms: Vec<TermFile>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(usize),
    Many(Vec<usize>),
}

/// One coefficient. One-dimensional entries may use `ball` and a scalar `j`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoeffEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ball: Option<BallId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertex: Option<Vec<BallId>>,
    pub j: OneOrMany,
    pub re: f64,
    pub im: f64,
}

impl CoeffEntry {
    pub fn new(idx: &CoeffIndex, v: Complex64) -> Self {
        CoeffEntry {
            ball: None,
            vertex: Some(idx.balls.clone()),
            j: OneOrMany::Many(idx.j.clone()),
            re: v.re,
            im: v.im,
        }
    }

    fn index(&self, location: &str) -> Result<CoeffIndex> {
        let balls = match (&self.ball, &self.vertex) {
            (Some(b), None) => vec![*b],
            (None, Some(v)) => v.clone(),
            _ => {
                return Err(parse_err(
                    location,
                    "a coefficient needs exactly one of `ball` or `vertex`",
                ))
            }
        };
        let j = match &self.j {
            OneOrMany::One(j) => vec![*j],
            OneOrMany::Many(js) => js.clone(),
        };
        if j.len() != balls.len() {
            return Err(parse_err(
                location,
                "`j` and the vertex have different lengths",
            ));
        }
        Ok(CoeffIndex::new(balls, j))
    }

    fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpansionFile {
    #[serde(default)]
    pub mean: [f64; 2],
    pub coeffs: Vec<CoeffEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnchorFile {
    pub vertex: Vec<BallId>,
    pub value: [f64; 2],
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneralizedFunctionFile {
    pub anchor: AnchorFile,
    pub coeffs: Vec<CoeffEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FreeParamsFile {
    Mode(String),
    Seed { seed: u64 },
    Explicit(Vec<CoeffEntry>),
}

impl Default for FreeParamsFile {
    fn default() -> Self {
        FreeParamsFile::Mode("zero".into())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(default)]
    pub space: Option<Ref<SpaceFile>>,
    pub operator: Ref<OperatorFile>,
    pub rhs: Ref<ExpansionFile>,
    pub anchor: AnchorFile,
    #[serde(default)]
    pub boundary: Vec<CoeffEntry>,
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub free_params: FreeParamsFile,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResidualFile {
    pub max_rel: f64,
    #[serde(default)]
    pub characteristic_vertices: usize,
    #[serde(default)]
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionFile {
    pub anchor: AnchorFile,
    pub coeffs: Vec<CoeffEntry>,
    pub free_params: Vec<CoeffEntry>,
    pub residual: ResidualFile,
}

fn parse_err(location: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse {
        location: location.into(),
        message: message.into(),
    }
}

/// Where a document came from; used for error locations and relative paths.
#[derive(Clone, Debug)]
pub struct Origin {
    pub name: String,
    pub dir: PathBuf,
}

impl Origin {
    pub fn file(path: &Path) -> Self {
        Origin {
            name: path.display().to_string(),
            dir: path.parent().map(Path::to_path_buf).unwrap_or_default(),
        }
    }

    pub fn inline(name: &str) -> Self {
        Origin {
            name: name.into(),
            dir: PathBuf::from("."),
        }
    }
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn parse_json<T: DeserializeOwned>(text: &str, origin: &Origin) -> Result<T> {
    serde_json::from_str(text).map_err(|e| {
        parse_err(
            format!("{}:{}:{}", origin.name, e.line(), e.column()),
            e.to_string(),
        )
    })
}

fn load_file<T: DeserializeOwned>(path: &Path) -> Result<(T, Origin)> {
    let text = read_text(path)?;
    let origin = Origin::file(path);
    Ok((parse_json(&text, &origin)?, origin))
}

/// Arguments of a shorthand like `name(a,b)`.
fn shorthand<'a>(text: &'a str, name: &str) -> Option<Vec<&'a str>> {
    let rest = text.trim().strip_prefix(name)?.trim_start();
    let inner = rest.strip_prefix('(')?.strip_suffix(')')?;
    Some(
        inner
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .collect(),
    )
}

fn resolve<T>(
    r: &Ref<T>,
    origin: &Origin,
    short: impl Fn(&str) -> Option<Result<T>>,
) -> Result<(T, Origin)>
where
    T: Clone + DeserializeOwned,
{
    match r {
        Ref::Inline(v) => Ok((v.clone(), origin.clone())),
        Ref::Text(s) => match short(s) {
            Some(v) => Ok((v?, origin.clone())),
            None => load_file(&origin.dir.join(s)),
        },
    }
}

fn padic_shorthand(s: &str) -> Option<Result<SpaceFile>> {
    let args = shorthand(s, "padic")?;
    let parsed = match args.as_slice() {
        [p, d] => match (p.parse(), d.parse()) {
            (Ok(p), Ok(depth)) => Ok(SpaceFile::Padic { p, depth }),
            _ => Err(parse_err(
                s,
                "padic(p,depth) needs two non-negative integers",
            )),
        },
        _ => Err(parse_err(s, "padic(p,depth) needs two arguments")),
    };
    Some(parsed)
}

fn homog_shorthand(s: &str) -> Option<Result<SymbolFile>> {
    let args = shorthand(s, "homog")?;
    let mut beta = None;
    let mut c = [1.0, 0.0];
    let mut tail = false;
    for a in args {
        let parsed = match a.split_once('=') {
            Some(("beta", v)) => v.trim().parse().map(|v| beta = Some(v)).is_ok(),
            Some(("c", v)) => v.trim().parse().map(|v| c = [v, 0.0]).is_ok(),
            None if a == "tail" => {
                tail = true;
                true
            }
            _ => false,
        };
        if !parsed {
            return Some(Err(parse_err(s, format!("unrecognized argument `{a}`"))));
        }
    }
    Some(match beta {
        Some(beta) => Ok(SymbolFile::Homogeneous { c, beta, tail }),
        None => Err(parse_err(s, "homog(...) needs beta=<number>")),
    })
}

/// A loaded space: one tree, or a product of trees.
#[derive(Clone, Debug)]
pub enum LoadedSpace {
    Tree(BallTree),
    Product(Vec<BallTree>),
}

impl LoadedSpace {
    pub fn trees(&self) -> Vec<BallTree> {
        match self {
            LoadedSpace::Tree(t) => vec![t.clone()],
            LoadedSpace::Product(ts) => ts.clone(),
        }
    }

    /// Trees for an `n`-factor object; a single tree is repeated.
    pub fn trees_for(&self, n: usize) -> Result<Vec<BallTree>> {
        match self {
            LoadedSpace::Tree(t) => Ok(vec![t.clone(); n]),
            LoadedSpace::Product(ts) if ts.len() == n => Ok(ts.clone()),
            LoadedSpace::Product(ts) => Err(Error::Parameter(format!(
                "space has {} factors but {n} are required",
                ts.len()
            ))),
        }
    }
}

fn build_space(file: SpaceFile, origin: &Origin) -> Result<LoadedSpace> {
    match file {
        SpaceFile::Padic { p, depth } => Ok(LoadedSpace::Tree(BallTree::padic(p, depth)?)),
        SpaceFile::Explicit { vertices } => {
            Ok(LoadedSpace::Tree(BallTree::from_vertices(&vertices)?))
        }
        SpaceFile::Product { factors } => {
            let mut trees = Vec::new();
            for f in &factors {
                let (file, o) = resolve(f, origin, padic_shorthand)?;
                match build_space(file, &o)? {
                    LoadedSpace::Tree(t) => trees.push(t),
                    LoadedSpace::Product(_) => {
                        return Err(parse_err(&o.name, "product factors must be single trees"))
                    }
                }
            }
            if trees.is_empty() {
                return Err(parse_err(
                    &origin.name,
                    "a product needs at least one factor",
                ));
            }
            Ok(LoadedSpace::Product(trees))
        }
    }
}

/// Loads a space from a path or a `padic(p,depth)` shorthand.
pub fn load_space(arg: &str) -> Result<LoadedSpace> {
    let origin = Origin::inline(".");
    let (file, o) = resolve(
        &Ref::<SpaceFile>::Text(arg.into()),
        &origin,
        padic_shorthand,
    )?;
    build_space(file, &o)
}

pub fn space_file(tree: &BallTree) -> SpaceFile {
    SpaceFile::Explicit {
        vertices: tree.vertex_specs(),
    }
}

fn build_symbol(file: SymbolFile, tree: &BallTree) -> Result<(Symbol, Tail)> {
    match file {
        SymbolFile::Table { entries } => {
            let mut map = BTreeMap::new();
            for e in entries {
                if map.insert(e.ball, Complex64::new(e.re, e.im)).is_some() {
                    return Err(Error::Domain(format!(
                        "symbol table lists ball {} twice",
                        e.ball
                    )));
                }
            }
            Ok((Symbol::table(tree, map)?, Tail::None))
        }
        SymbolFile::Homogeneous { c, beta, tail } => Ok((
            Symbol::homogeneous(Complex64::new(c[0], c[1]), beta),
            if tail {
                Tail::HomogeneousExtension
            } else {
                Tail::None
            },
        )),
    }
}

/// Loads a symbol from a path or a `homog(...)` shorthand.
pub fn load_symbol(arg: &str, tree: &BallTree) -> Result<(Symbol, Tail)> {
    let (file, _) = resolve(
        &Ref::<SymbolFile>::Text(arg.into()),
        &Origin::inline("."),
        homog_shorthand,
    )?;
    build_symbol(file, tree)
}

/// The unresolved operator: symbol files still need their factor trees.
#[derive(Clone, Debug)]
pub struct OperatorSpec {
    symbols: Vec<SymbolFile>,
    terms: Vec<Term>,
}

impl OperatorSpec {
    pub fn arity(&self) -> usize {
        self.symbols.len()
    }

    pub fn build(&self, trees: &[BallTree]) -> Result<MultiOperator> {
        if trees.len() != self.symbols.len() {
            return Err(Error::Parameter(format!(
                "operator has {} factors but the space has {}",
                self.symbols.len(),
                trees.len()
            )));
        }
        let (symbols, tails) = self
            .symbols
            .iter()
            .zip(trees)
            .map(|(s, t)| build_symbol(s.clone(), t))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .unzip();
        MultiOperator::new(symbols, tails, self.terms.clone())
    }
}

fn operator_spec(file: OperatorFile, origin: &Origin) -> Result<OperatorSpec> {
    let symbols = file
        .factors
        .iter()
        .map(|r| resolve(r, origin, homog_shorthand).map(|(s, _)| s))
        .collect::<Result<Vec<_>>>()?;
    if symbols.is_empty() {
        return Err(parse_err(
            &origin.name,
            "an operator needs at least one factor",
        ));
    }
    let mut terms = Vec::with_capacity(file.terms.len());
    for t in file.terms {
        if let Some(&bad) = t.indices.iter().find(|&&i| i == 0 || i > symbols.len()) {
            return Err(parse_err(
                &origin.name,
                format!("term index {bad} is outside 1..={}", symbols.len()),
            ));
        }
        terms.push(Term {
            factors: t.indices.iter().map(|i| i - 1).collect(),
            coeff: Complex64::new(t.re, t.im),
        });
    }
    Ok(OperatorSpec { symbols, terms })
}

pub fn load_operator(path: &Path) -> Result<OperatorSpec> {
    let (file, origin) = load_file::<OperatorFile>(path)?;
    operator_spec(file, &origin)
}

fn coeff_map(entries: &[CoeffEntry], location: &str) -> Result<BTreeMap<CoeffIndex, Complex64>> {
    let mut out = BTreeMap::new();
    for e in entries {
        let idx = e.index(location)?;
        if out.insert(idx.clone(), e.value()).is_some() {
            return Err(parse_err(
                location,
                format!("coefficient {idx} is listed twice"),
            ));
        }
    }
    Ok(out)
}

fn lizorkin(file: &ExpansionFile, location: &str) -> Result<LizorkinSeries> {
    if file.mean != [0.0, 0.0] {
        return Err(parse_err(location, "a right-hand side must have zero mean"));
    }
    LizorkinSeries::new(coeff_map(&file.coeffs, location)?)
}

pub fn expansion_file(e: &WaveletExpansion) -> ExpansionFile {
    ExpansionFile {
        mean: [e.mean.re, e.mean.im],
        coeffs: e
            .coeffs
            .iter()
            .map(|(&(b, j), v)| CoeffEntry {
                ball: Some(b),
                vertex: None,
                j: OneOrMany::One(j),
                re: v.re,
                im: v.im,
            })
            .collect(),
    }
}

/// A problem file resolved against its space.
#[derive(Clone, Debug)]
pub struct LoadedProblem {
    pub problem: CauchyProblem,
    pub trees: Vec<BallTree>,
}

/// Loads a problem; `space` overrides the problem's own space reference.
pub fn load_problem(path: &Path, space: Option<&LoadedSpace>) -> Result<LoadedProblem> {
    let (file, origin) = load_file::<ProblemFile>(path)?;
    let (op_file, op_origin) = resolve(&file.operator, &origin, |_| None)?;
    let spec = operator_spec(op_file, &op_origin)?;
    let loaded = match (space, &file.space) {
        (Some(s), _) => s.clone(),
        (None, Some(r)) => {
            let (sf, so) = resolve(r, &origin, padic_shorthand)?;
            build_space(sf, &so)?
        }
        (None, None) => {
            return Err(parse_err(
                &origin.name,
                "no space given in the problem or on the command line",
            ))
        }
    };
    let trees = loaded.trees_for(spec.arity())?;
    let operator = spec.build(&trees)?;
    let (rhs_file, rhs_origin) = resolve(&file.rhs, &origin, |_| None)?;
    let rhs = lizorkin(&rhs_file, &rhs_origin.name)?;

    let n = spec.arity();
    if file.anchor.vertex.len() != n {
        return Err(parse_err(
            &origin.name,
            format!("anchor vertex must have {n} components"),
        ));
    }
    let mut boundary = coeff_map(&file.boundary, &origin.name)?;
    let anchor_idx = CoeffIndex::new(file.anchor.vertex.clone(), vec![0; n]);
    let anchor_value = Complex64::new(file.anchor.value[0], file.anchor.value[1]);
    if boundary.insert(anchor_idx.clone(), anchor_value).is_some() {
        return Err(parse_err(
            &origin.name,
            format!("boundary repeats the anchor index {anchor_idx}"),
        ));
    }
    let free_params = match file.free_params {
        FreeParamsFile::Mode(m) if m == "zero" => FreeParams::Zero,
        FreeParamsFile::Mode(m) => {
            return Err(parse_err(
                &origin.name,
                format!("unknown free_params mode `{m}`"),
            ))
        }
        FreeParamsFile::Seed { seed } => FreeParams::Seed(seed),
        FreeParamsFile::Explicit(list) => FreeParams::Explicit(coeff_map(&list, &origin.name)?),
    };
    let problem = CauchyProblem {
        space: ProductSpace::plain(trees.clone())?,
        operator,
        rhs,
        anchor: file.anchor.vertex,
        boundary,
        epsilon: file.epsilon.unwrap_or(DEFAULT_EPSILON),
        free_params,
    };
    Ok(LoadedProblem { problem, trees })
}

fn anchor_file(u: &GeneralizedFunction) -> AnchorFile {
    let v = u.anchor_value();
    AnchorFile {
        vertex: u.anchor().to_vec(),
        value: [v.re, v.im],
    }
}

fn coeff_entries(u: &GeneralizedFunction) -> Vec<CoeffEntry> {
    let anchor = u.anchor_index();
    u.coeffs()
        .iter()
        .filter(|(k, _)| **k != anchor)
        .map(|(k, &v)| CoeffEntry::new(k, v))
        .collect()
}

pub fn generalized_function_file(u: &GeneralizedFunction) -> GeneralizedFunctionFile {
    GeneralizedFunctionFile {
        anchor: anchor_file(u),
        coeffs: coeff_entries(u),
    }
}

pub fn solution_file(s: &Solution) -> SolutionFile {
    SolutionFile {
        anchor: anchor_file(&s.u),
        coeffs: coeff_entries(&s.u),
        free_params: s
            .free_params
            .iter()
            .map(|p| CoeffEntry::new(&p.index, p.value))
            .collect(),
        residual: ResidualFile {
            max_rel: s.residual.max_rel,
            characteristic_vertices: s.residual.characteristic_vertices,
            warnings: s.residual.warnings.clone(),
        },
    }
}

fn function_from_parts(
    trees: &[BallTree],
    anchor: &AnchorFile,
    coeffs: &[CoeffEntry],
    location: &str,
) -> Result<GeneralizedFunction> {
    let n = anchor.vertex.len();
    if n != trees.len() {
        return Err(parse_err(
            location,
            format!(
                "anchor has {n} components but the space has {}",
                trees.len()
            ),
        ));
    }
    let mut map = coeff_map(coeffs, location)?;
    let idx = CoeffIndex::new(anchor.vertex.clone(), vec![0; n]);
    if map
        .insert(
            idx.clone(),
            Complex64::new(anchor.value[0], anchor.value[1]),
        )
        .is_some()
    {
        return Err(parse_err(
            location,
            format!("coefficients repeat the anchor index {idx}"),
        ));
    }
    GeneralizedFunction::new(trees, anchor.vertex.clone(), map)
}

/// Reads either a generalized-function file or a solution file.
pub fn load_generalized_function(path: &Path, trees: &[BallTree]) -> Result<GeneralizedFunction> {
    let text = read_text(path)?;
    let origin = Origin::file(path);
    let value: serde_json::Value = parse_json(&text, &origin)?;
    if value.get("residual").is_some() {
        let s: SolutionFile = parse_json(&text, &origin)?;
        function_from_parts(trees, &s.anchor, &s.coeffs, &origin.name)
    } else {
        let g: GeneralizedFunctionFile = parse_json(&text, &origin)?;
        function_from_parts(trees, &g.anchor, &g.coeffs, &origin.name)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("file types serialize to JSON")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shorthands() {
        assert!(matches!(
            padic_shorthand("padic(2, 3)"),
            Some(Ok(SpaceFile::Padic { p: 2, depth: 3 }))
        ));
        assert!(matches!(padic_shorthand("padic(2)"), Some(Err(_))));
        assert!(padic_shorthand("space.json").is_none());
        match homog_shorthand("homog(beta=0.5)") {
            Some(Ok(SymbolFile::Homogeneous { c, beta, tail })) => {
                assert_eq!(c, [1.0, 0.0]);
                assert_eq!(beta, 0.5);
                assert!(!tail);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            homog_shorthand("homog(beta=2,c=3,tail)"),
            Some(Ok(SymbolFile::Homogeneous { tail: true, .. }))
        ));
        assert!(matches!(homog_shorthand("homog(c=1)"), Some(Err(_))));
    }

    #[test]
    fn parse_error_has_location() {
        let err = parse_json::<SpaceFile>(
            "{\"kind\": \"padic\", \"p\": 2,\n \"depth\" 3}",
            &Origin::inline("x.json"),
        )
        .unwrap_err();
        match err {
            Error::Parse { location, .. } => assert!(location.starts_with("x.json:2:")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn explicit_space_round_trip() {
        let t = BallTree::padic(3, 2).unwrap();
        let text = to_json(&space_file(&t));
        let back: SpaceFile = parse_json(&text, &Origin::inline("t")).unwrap();
        match build_space(back, &Origin::inline("t")).unwrap() {
            LoadedSpace::Tree(u) => assert_eq!(u.vertex_specs(), t.vertex_specs()),
            LoadedSpace::Product(_) => panic!("expected a tree"),
        }
    }

    #[test]
    fn coefficient_entries() {
        let e: CoeffEntry =
            serde_json::from_str(r#"{"ball": 3, "j": 1, "re": 1.0, "im": 0.0}"#).unwrap();
        assert_eq!(e.index("x").unwrap(), CoeffIndex::one_dim(BallId(3), 1));
        let e: CoeffEntry =
            serde_json::from_str(r#"{"vertex": [1, 2], "j": [0, 1], "re": 1.0, "im": 0.0}"#)
                .unwrap();
        assert_eq!(
            e.index("x").unwrap(),
            CoeffIndex::new(vec![BallId(1), BallId(2)], vec![0, 1])
        );
        let e: CoeffEntry =
            serde_json::from_str(r#"{"vertex": [1, 2], "j": 1, "re": 1.0, "im": 0.0}"#).unwrap();
        assert!(e.index("x").is_err());
    }
}
