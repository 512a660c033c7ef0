use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{Map, Value};

use ultrametric::cauchy::{self, FreeParams};
use ultrametric::distributions::eval_on_char_nd;
use ultrametric::io::{self, LoadedSpace};
use ultrametric::pdo;
use ultrametric::product::{HyperVertex, ProductSpace, TupleIter};
use ultrametric::tree::{validate_regular_subtree, BallId};
use ultrametric::wavelets::WaveletBasis;
use ultrametric::{Error, Result};

#[derive(Parser)]
#[command(
    name = "ultrametric",
    version,
    about = "Wavelets, spectra and Cauchy problems on ultrametric ball trees"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Args)]
struct Common {
    /// Space file or `padic(p,depth)`.
    #[arg(long)]
    space: Option<String>,
    /// Output file (standard output when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Check a space for measure additivity and regularity.
    Validate {
        input: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// List the wavelet basis: values of each wavelet on its ball's maximal subballs.
    Wavelets {
        #[command(flatten)]
        common: Common,
    },
    /// Eigenvalues of a one-dimensional symbol or of a product operator.
    Spectrum {
        #[command(flatten)]
        common: Common,
        /// Symbol file or `homog(beta=…[,c=…][,tail])`.
        #[arg(long)]
        symbol: Option<String>,
        #[arg(long)]
        operator: Option<PathBuf>,
    },
    /// Generic vertices where the operator's eigenvalue vanishes.
    Characteristics {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        operator: PathBuf,
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Solve a Cauchy problem and write the solution file.
    Solve {
        input: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        problem: Option<PathBuf>,
        #[arg(long)]
        epsilon: Option<f64>,
        /// Draw free parameters from this seed instead of the problem's choice.
        #[arg(long)]
        seed: Option<u64>,
        /// Where to write the residual summary (standard error when absent).
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Evaluate a solution or generalized function on characteristic functions of balls.
    Eval {
        input: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        solution: Option<PathBuf>,
        /// A ball id, or comma-separated ids of a vertex; repeatable. Defaults to every vertex.
        #[arg(long)]
        at: Vec<String>,
    },
}

enum Cell {
    Int(usize),
    Num(f64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Num(x) => format!("{x:.16e}"),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(i) => Value::from(*i),
            Cell::Num(x) => Value::from(*x),
            Cell::Text(s) => Value::from(s.as_str()),
        }
    }
}

struct Table {
    headers: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(headers: Vec<&'static str>) -> Self {
        Table {
            headers,
            rows: Vec::new(),
        }
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.headers).expect("writing to memory");
                for row in &self.rows {
                    w.write_record(row.iter().map(Cell::csv))
                        .expect("writing to memory");
                }
                String::from_utf8(w.into_inner().expect("writing to memory"))
                    .expect("CSV output is UTF-8")
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let m: Map<String, Value> = self
                            .headers
                            .iter()
                            .zip(row)
                            .map(|(h, c)| (h.to_string(), c.json()))
                            .collect();
                        Value::Object(m)
                    })
                    .collect();
                let mut s = serde_json::to_string_pretty(&rows).expect("table serializes");
                s.push('\n');
                s
            }
        }
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|source| Error::Io {
            path: p.display().to_string(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn require_space(common: &Common) -> Result<LoadedSpace> {
    let arg = common
        .space
        .as_deref()
        .ok_or_else(|| Error::Parameter("--space is required".into()))?;
    io::load_space(arg)
}

fn vertex_text(balls: &[BallId]) -> String {
    HyperVertex::from_balls(balls).to_string()
}

fn parse_vertex(s: &str, n: usize) -> Result<Vec<BallId>> {
    let balls = s
        .trim_matches(|c| c == '(' || c == ')')
        .split(',')
        .map(|t| t.trim().parse::<usize>().map(BallId))
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| Error::Parse {
            location: format!("--at {s}"),
            message: e.to_string(),
        })?;
    if balls.len() != n {
        return Err(Error::Parse {
            location: format!("--at {s}"),
            message: format!("expected {n} ball ids"),
        });
    }
    Ok(balls)
}

fn validate(input: Option<String>, common: Common) -> Result<()> {
    let arg = input
        .or(common.space.clone())
        .ok_or_else(|| Error::Parameter("a space is required".into()))?;
    let space = io::load_space(&arg)?;
    let mut table = Table::new(vec![
        "factor",
        "balls",
        "leaves",
        "interior",
        "zero_measure",
        "violations",
    ]);
    for (i, t) in space.trees().iter().enumerate() {
        let violations = validate_regular_subtree(t, &t.balls().collect())?;
        table.rows.push(vec![
            Cell::Int(i + 1),
            Cell::Int(t.len()),
            Cell::Int(t.leaf_count()),
            Cell::Int(t.interior_balls().len()),
            Cell::Int(t.zero_measure_balls().len()),
            Cell::Int(violations.len()),
        ]);
        for z in t.zero_measure_balls() {
            eprintln!("warning: factor {}: ball {z} has zero measure", i + 1);
        }
    }
    emit(&table.render(common.format), common.out.as_ref())
}

fn wavelets(common: Common) -> Result<()> {
    let space = require_space(&common)?;
    let mut table = Table::new(vec!["factor", "ball", "j", "subball", "re", "im"]);
    for (i, t) in space.trees().iter().enumerate() {
        for w in WaveletBasis::new(t).iter() {
            for &(sub, v) in w.values() {
                table.rows.push(vec![
                    Cell::Int(i + 1),
                    Cell::Int(w.ball().index()),
                    Cell::Int(w.j()),
                    Cell::Int(sub.index()),
                    Cell::Num(v.re),
                    Cell::Num(v.im),
                ]);
            }
        }
    }
    emit(&table.render(common.format), common.out.as_ref())
}

fn spectrum(common: Common, symbol: Option<String>, operator: Option<PathBuf>) -> Result<()> {
    let space = require_space(&common)?;
    let table = match (symbol, operator) {
        (Some(s), None) => {
            let LoadedSpace::Tree(tree) = space else {
                return Err(Error::Parameter(
                    "--symbol needs a single-tree space; use --operator for products".into(),
                ));
            };
            let (sym, tail) = io::load_symbol(&s, &tree)?;
            let conv = pdo::check_convergence(&sym, &tree, tail);
            if !conv.converges {
                return Err(Error::Divergence(conv.diagnostic));
            }
            let sp = pdo::spectrum(&tree, &sym, tail)?;
            let mut table = Table::new(vec!["ball", "re", "im"]);
            for (b, l) in sp.iter() {
                table
                    .rows
                    .push(vec![Cell::Int(b.index()), Cell::Num(l.re), Cell::Num(l.im)]);
            }
            table
        }
        (None, Some(path)) => {
            let spec = io::load_operator(&path)?;
            let trees = space.trees_for(spec.arity())?;
            let op = spec.build(&trees)?;
            let prod = ProductSpace::plain(trees)?;
            let sp = op.spectrum(&prod)?;
            let mut table = Table::new(vec!["vertex", "re", "im"]);
            for v in prod.generic_vertices() {
                let l = sp.eigenvalue(&v)?;
                table.rows.push(vec![
                    Cell::Text(v.to_string()),
                    Cell::Num(l.re),
                    Cell::Num(l.im),
                ]);
            }
            table
        }
        _ => {
            return Err(Error::Parameter(
                "give exactly one of --symbol or --operator".into(),
            ))
        }
    };
    emit(&table.render(common.format), common.out.as_ref())
}

fn characteristics(common: Common, operator: PathBuf, epsilon: Option<f64>) -> Result<()> {
    let space = require_space(&common)?;
    let spec = io::load_operator(&operator)?;
    let trees = space.trees_for(spec.arity())?;
    let op = spec.build(&trees)?;
    let prod = ProductSpace::plain(trees)?;
    let sp = op.spectrum(&prod)?;
    let chars = cauchy::characteristics(&sp, &prod, epsilon.unwrap_or(cauchy::DEFAULT_EPSILON))?;
    let mut table = Table::new(vec!["vertex", "re", "im", "abs", "scale"]);
    for ch in chars {
        table.rows.push(vec![
            Cell::Text(ch.vertex.to_string()),
            Cell::Num(ch.lambda.re),
            Cell::Num(ch.lambda.im),
            Cell::Num(ch.lambda.norm()),
            Cell::Num(ch.scale),
        ]);
    }
    emit(&table.render(common.format), common.out.as_ref())
}

fn solve(
    input: Option<PathBuf>,
    common: Common,
    problem: Option<PathBuf>,
    epsilon: Option<f64>,
    seed: Option<u64>,
    summary: Option<PathBuf>,
) -> Result<()> {
    let path = input
        .or(problem)
        .ok_or_else(|| Error::Parameter("a problem file is required".into()))?;
    let space = common.space.as_deref().map(io::load_space).transpose()?;
    let mut loaded = io::load_problem(&path, space.as_ref())?;
    if let Some(e) = epsilon {
        loaded.problem.epsilon = e;
    }
    if let Some(s) = seed {
        loaded.problem.free_params = FreeParams::Seed(s);
    }
    let solution = cauchy::solve(&loaded.problem)?;
    emit(
        &io::to_json(&io::solution_file(&solution)),
        common.out.as_ref(),
    )?;

    let mut table = Table::new(vec!["vertex", "j", "re", "im"]);
    for p in &solution.free_params {
        let js: Vec<String> = p.index.j.iter().map(|j| j.to_string()).collect();
        table.rows.push(vec![
            Cell::Text(vertex_text(&p.index.balls)),
            Cell::Text(format!("({})", js.join(","))),
            Cell::Num(p.value.re),
            Cell::Num(p.value.im),
        ]);
    }
    let report = format!(
        "max_rel_residual {:.16e}\ncharacteristic_vertices {}\nfree_params {}\n{}",
        solution.residual.max_rel,
        solution.residual.characteristic_vertices,
        solution.free_params.len(),
        table.render(common.format)
    );
    for w in &solution.residual.warnings {
        eprintln!("warning: {w}");
    }
    match summary {
        Some(p) => emit(&report, Some(&p)),
        None => {
            eprint!("{report}");
            Ok(())
        }
    }
}

fn eval(
    input: Option<PathBuf>,
    common: Common,
    solution: Option<PathBuf>,
    at: Vec<String>,
) -> Result<()> {
    let path = input
        .or(solution)
        .ok_or_else(|| Error::Parameter("a solution file is required".into()))?;
    let space = require_space(&common)?;
    // the arity is only known from the file; try the space as given, then as repeated factors
    let trees = space.trees();
    let (u, trees) = match io::load_generalized_function(&path, &trees) {
        Ok(u) => (u, trees),
        Err(first) => match &space {
            LoadedSpace::Tree(_) => {
                let text = io::read_text(&path)?;
                let n = serde_json::from_str::<Value>(&text)
                    .ok()
                    .and_then(|v| v["anchor"]["vertex"].as_array().map(Vec::len))
                    .ok_or(first)?;
                let trees = space.trees_for(n)?;
                (io::load_generalized_function(&path, &trees)?, trees)
            }
            LoadedSpace::Product(_) => return Err(first),
        },
    };
    let n = trees.len();
    let targets: Vec<Vec<BallId>> = if at.is_empty() {
        TupleIter::new(trees.iter().map(|t| t.balls().collect()).collect()).collect()
    } else {
        at.iter()
            .map(|s| parse_vertex(s, n))
            .collect::<Result<_>>()?
    };
    let mut table = Table::new(vec!["vertex", "re", "im"]);
    for balls in targets {
        let v = eval_on_char_nd(&u, &trees[..], &balls)?;
        table.rows.push(vec![
            Cell::Text(vertex_text(&balls)),
            Cell::Num(v.re),
            Cell::Num(v.im),
        ]);
    }
    emit(&table.render(common.format), common.out.as_ref())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Validate { input, common } => validate(input, common),
        Command::Wavelets { common } => wavelets(common),
        Command::Spectrum {
            common,
            symbol,
            operator,
        } => spectrum(common, symbol, operator),
        Command::Characteristics {
            common,
            operator,
            epsilon,
        } => characteristics(common, operator, epsilon),
        Command::Solve {
            input,
            common,
            problem,
            epsilon,
            seed,
            summary,
        } => solve(input, common, problem, epsilon, seed, summary),
        Command::Eval {
            input,
            common,
            solution,
            at,
        } => eval(input, common, solution, at),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if let Error::Unsolvable(list) = &e {
                for v in list {
                    let js: Vec<String> = v.index.j.iter().map(|j| j.to_string()).collect();
                    eprintln!(
                        "violation vertex={} j=({}) re={:.16e} im={:.16e}",
                        vertex_text(&v.index.balls),
                        js.join(","),
                        v.value.re,
                        v.value.im
                    );
                }
            }
            ExitCode::from(e.exit_code())
        }
    }
}
