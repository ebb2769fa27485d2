//! Command-line front end.
//!
//! Every invocation prints one complete report to standard output (JSON by
//! default, CSV with `--format csv`) and exits with one of four codes:
//! 0 = predicate true / success, 1 = predicate false (not good, not a
//! boundary, not related, failing claims), 2 = input error, 3 = search
//! budget exceeded. Diagnostics go to standard error only, and output is
//! byte-identical across runs with the same inputs and flags.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use crate::analysis::{
    enumerate_boundaries, full_components, geodesic_by_index, is_boundary, related_components,
    BoundarySet, Budgets, Partition,
};
use crate::error::{Error, Result};
use crate::families;
use crate::points::{Point, PointSet, Symbol};
use crate::solver::{
    rational_from_json, solution_bound_report, solve_decomposition, verify_decomposition,
    BoundaryAssignment, FunctionTable,
};

pub const EXIT_TRUE: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_INPUT_ERROR: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "goodsets",
    version,
    about = "Exact analysis of additive decomposability of finite point sets"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Report format.
    #[arg(long, value_enum, global = true, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,

    /// Maximum candidate subsets a search may examine.
    #[arg(long, global = true)]
    pub budget_subsets: Option<u64>,

    /// Maximum ambient product tuples a search may visit.
    #[arg(long, global = true)]
    pub budget_product: Option<u64>,

    /// Keep non-separated inputs as-is instead of renaming symbols to
    /// `coordinate:symbol`. Boundary and fullness operations then reject
    /// such inputs.
    #[arg(long, global = true)]
    pub no_tag_coordinates: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ComponentKind {
    Full,
    Related,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyKind {
    /// Prefix of the base family: y1, y2, ...
    S,
    /// Prefix of length 4n plus the extra point z.
    S4nz,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide whether a point set is good.
    Check {
        /// Point set JSON file.
        #[arg(long)]
        input: PathBuf,
    },
    /// Test one boundary or enumerate all boundaries of a good set.
    Boundary {
        #[arg(long)]
        input: PathBuf,
        /// Comma-separated symbols to test as a boundary.
        #[arg(long, conflicts_with = "enumerate")]
        check: Option<String>,
        /// Enumerate all boundaries in lexicographic column order.
        #[arg(long)]
        enumerate: bool,
        /// Stop enumeration after this many boundaries.
        #[arg(long, default_value_t = 1000)]
        cap: usize,
        /// Report the solution bound of each enumerated boundary.
        #[arg(long)]
        with_bounds: bool,
    },
    /// Full and related components of a good set.
    Components {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = ComponentKind::Both)]
        kind: ComponentKind,
    },
    /// Smallest full subset containing two points.
    Geodesic {
        #[arg(long)]
        input: PathBuf,
        /// Point reference: yK or K (1-based index), z (last point), or a
        /// comma-separated coordinate tuple.
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
    /// Solve the additive decomposition with boundary values prescribed.
    Solve {
        #[arg(long)]
        input: PathBuf,
        /// Function table JSON file.
        #[arg(long)]
        function: PathBuf,
        /// Comma-separated boundary symbols.
        #[arg(long)]
        boundary: String,
        /// JSON object mapping boundary symbols to rationals; missing
        /// symbols default to 0.
        #[arg(long)]
        boundary_values: Option<PathBuf>,
    },
    /// Write a generated point-set fixture to a file.
    Family {
        #[arg(long, value_enum)]
        family: FamilyKind,
        /// Number of points (family "s").
        #[arg(long)]
        count: Option<usize>,
        /// Size parameter (family "s4nz").
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        output: PathBuf,
    },
    /// Re-check the structural claims of the bundled families.
    VerifyPaper {
        #[arg(long, default_value_t = 4)]
        n_max: usize,
    },
}

struct Outcome {
    code: i32,
    body: String,
}

pub fn run(cli: Cli) -> i32 {
    let budgets = Budgets {
        subset_candidates: cli
            .budget_subsets
            .unwrap_or(Budgets::default().subset_candidates),
        product_tuples: cli
            .budget_product
            .unwrap_or(Budgets::default().product_tuples),
    };
    match execute(&cli, &budgets) {
        Ok(outcome) => {
            print!("{}", outcome.body);
            outcome.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::NotGood | Error::NotABoundary | Error::NotRelated => EXIT_FALSE,
                Error::BudgetExceeded(_) => EXIT_BUDGET,
                _ => EXIT_INPUT_ERROR,
            }
        }
    }
}

fn execute(cli: &Cli, budgets: &Budgets) -> Result<Outcome> {
    match &cli.command {
        Command::Check { input } => {
            let (s, tagged) = load_point_set(input, !cli.no_tag_coordinates)?;
            run_check(&s, tagged, cli.format)
        }
        Command::Boundary {
            input,
            check,
            enumerate,
            cap,
            with_bounds,
        } => {
            let (s, _) = load_point_set(input, !cli.no_tag_coordinates)?;
            match (check, enumerate) {
                (Some(symbols), false) => run_boundary_check(&s, symbols, cli.format),
                (None, true) => run_boundary_enumerate(&s, *cap, *with_bounds, budgets, cli.format),
                _ => Err(Error::Parse(
                    "specify exactly one of --check <symbols> or --enumerate".into(),
                )),
            }
        }
        Command::Components { input, kind } => {
            let (s, _) = load_point_set(input, !cli.no_tag_coordinates)?;
            run_components(&s, *kind, budgets, cli.format)
        }
        Command::Geodesic { input, from, to } => {
            let (s, _) = load_point_set(input, !cli.no_tag_coordinates)?;
            run_geodesic(&s, from, to, budgets, cli.format)
        }
        Command::Solve {
            input,
            function,
            boundary,
            boundary_values,
        } => {
            let (s, _) = load_point_set(input, !cli.no_tag_coordinates)?;
            run_solve(
                &s,
                function,
                boundary,
                boundary_values.as_deref(),
                cli.format,
            )
        }
        Command::Family {
            family,
            count,
            n,
            output,
        } => run_family(*family, *count, *n, output, cli.format),
        Command::VerifyPaper { n_max } => {
            let report = families::verify_claims(*n_max, budgets)?;
            let code = if report.all_pass() {
                EXIT_TRUE
            } else {
                EXIT_FALSE
            };
            let body = match cli.format {
                OutputFormat::Json => report.to_json(),
                OutputFormat::Csv => {
                    let mut rows = vec![vec![
                        "id".to_owned(),
                        "pass".to_owned(),
                        "params".to_owned(),
                        "witness".to_owned(),
                    ]];
                    for c in &report.claims {
                        rows.push(vec![
                            c.id.clone(),
                            c.pass.to_string(),
                            c.params.to_string(),
                            c.witness.to_string(),
                        ]);
                    }
                    csv_body(rows)
                }
            };
            Ok(Outcome { code, body })
        }
    }
}

fn load_point_set(path: &Path, tag: bool) -> Result<(PointSet, bool)> {
    let text = fs::read_to_string(path)?;
    let s = PointSet::from_json(&text)?;
    if tag && !s.is_separated() {
        Ok((s.tag_coordinates(), true))
    } else {
        Ok((s, false))
    }
}

#[derive(Serialize)]
struct CheckReport {
    good: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    boundary_size: Option<usize>,
    rank: usize,
    points: usize,
    columns: usize,
    dimension: usize,
    separated: bool,
    tagged: bool,
}

fn run_check(s: &PointSet, tagged: bool, format: OutputFormat) -> Result<Outcome> {
    let m = s.incidence_matrix()?;
    let rank = m.to_matrix().rank();
    let good = rank == s.len();
    let report = CheckReport {
        good,
        boundary_size: good.then(|| m.n_cols() - s.len()),
        rank,
        points: s.len(),
        columns: m.n_cols(),
        dimension: s.dimension(),
        separated: s.is_separated(),
        tagged,
    };
    let body = match format {
        OutputFormat::Json => json_line(&report),
        OutputFormat::Csv => csv_body(vec![
            vec![
                "good".into(),
                "boundary_size".into(),
                "rank".into(),
                "points".into(),
                "columns".into(),
                "dimension".into(),
                "separated".into(),
                "tagged".into(),
            ],
            vec![
                report.good.to_string(),
                report
                    .boundary_size
                    .map_or(String::new(), |v| v.to_string()),
                report.rank.to_string(),
                report.points.to_string(),
                report.columns.to_string(),
                report.dimension.to_string(),
                report.separated.to_string(),
                report.tagged.to_string(),
            ],
        ]),
    };
    Ok(Outcome {
        code: if good { EXIT_TRUE } else { EXIT_FALSE },
        body,
    })
}

#[derive(Serialize)]
struct BoundaryCheckReport {
    is_boundary: bool,
    size: usize,
    required_size: usize,
    elements: Vec<String>,
}

fn split_symbols(list: &str) -> Vec<&str> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect()
}

fn run_boundary_check(s: &PointSet, symbols: &str, format: OutputFormat) -> Result<Outcome> {
    let b = BoundarySet::from_symbols(s, split_symbols(symbols))?;
    let m = s.incidence_matrix()?;
    match is_boundary(s, &b) {
        Ok(ok) => {
            let report = BoundaryCheckReport {
                is_boundary: ok,
                size: b.len(),
                required_size: m.n_cols() - s.len(),
                elements: b.labels(),
            };
            let body = match format {
                OutputFormat::Json => json_line(&report),
                OutputFormat::Csv => csv_body(vec![
                    vec![
                        "is_boundary".into(),
                        "size".into(),
                        "required_size".into(),
                        "elements".into(),
                    ],
                    vec![
                        report.is_boundary.to_string(),
                        report.size.to_string(),
                        report.required_size.to_string(),
                        report.elements.join("|"),
                    ],
                ]),
            };
            Ok(Outcome {
                code: if ok { EXIT_TRUE } else { EXIT_FALSE },
                body,
            })
        }
        Err(Error::NotGood) => predicate_false(format, "not-good"),
        Err(e) => Err(e),
    }
}

#[derive(Serialize)]
struct BoundaryEntry {
    elements: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bound: Option<String>,
}

#[derive(Serialize)]
struct BoundaryEnumReport {
    boundary_size: usize,
    count: usize,
    truncated: bool,
    boundaries: Vec<BoundaryEntry>,
}

fn run_boundary_enumerate(
    s: &PointSet,
    cap: usize,
    with_bounds: bool,
    budgets: &Budgets,
    format: OutputFormat,
) -> Result<Outcome> {
    let m = s.incidence_matrix()?;
    let out = match enumerate_boundaries(s, cap, budgets) {
        Ok(out) => out,
        Err(Error::NotGood) => return predicate_false(format, "not-good"),
        Err(e) => return Err(e),
    };
    let mut entries = Vec::with_capacity(out.boundaries.len());
    for b in &out.boundaries {
        let bound = if with_bounds {
            Some(solution_bound_report(s, b)?.to_string())
        } else {
            None
        };
        entries.push(BoundaryEntry {
            elements: b.labels(),
            bound,
        });
    }
    let report = BoundaryEnumReport {
        boundary_size: m.n_cols() - s.len(),
        count: entries.len(),
        truncated: out.truncated,
        boundaries: entries,
    };
    let body = match format {
        OutputFormat::Json => json_line(&report),
        OutputFormat::Csv => {
            let mut rows = vec![vec![
                "index".to_owned(),
                "elements".to_owned(),
                "bound".to_owned(),
            ]];
            for (i, e) in report.boundaries.iter().enumerate() {
                rows.push(vec![
                    (i + 1).to_string(),
                    e.elements.join("|"),
                    e.bound.clone().unwrap_or_default(),
                ]);
            }
            csv_body(rows)
        }
    };
    Ok(Outcome {
        code: EXIT_TRUE,
        body,
    })
}

#[derive(Serialize)]
struct ComponentsReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    full_components: Option<Vec<Vec<usize>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    related_components: Option<Vec<Vec<usize>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    equal: Option<bool>,
}

fn one_based(p: &Partition) -> Vec<Vec<usize>> {
    p.blocks()
        .iter()
        .map(|b| b.iter().map(|i| i + 1).collect())
        .collect()
}

fn run_components(
    s: &PointSet,
    kind: ComponentKind,
    budgets: &Budgets,
    format: OutputFormat,
) -> Result<Outcome> {
    let compute = || -> Result<ComponentsReport> {
        let (full, related) = match kind {
            ComponentKind::Full => (Some(full_components(s, budgets)?), None),
            ComponentKind::Related => (None, Some(related_components(s, budgets)?)),
            ComponentKind::Both => (
                Some(full_components(s, budgets)?),
                Some(related_components(s, budgets)?),
            ),
        };
        let equal = match (&full, &related) {
            (Some(f), Some(r)) => Some(f == r),
            _ => None,
        };
        Ok(ComponentsReport {
            full_components: full.as_ref().map(one_based),
            related_components: related.as_ref().map(one_based),
            equal,
        })
    };
    let report = match compute() {
        Ok(r) => r,
        Err(Error::NotGood) => return predicate_false(format, "not-good"),
        Err(e) => return Err(e),
    };
    let body = match format {
        OutputFormat::Json => json_line(&report),
        OutputFormat::Csv => {
            let mut rows = vec![vec![
                "kind".to_owned(),
                "block".to_owned(),
                "points".to_owned(),
            ]];
            if let Some(blocks) = &report.full_components {
                for (i, b) in blocks.iter().enumerate() {
                    rows.push(vec![
                        "full".into(),
                        (i + 1).to_string(),
                        b.iter().map(usize::to_string).collect::<Vec<_>>().join("|"),
                    ]);
                }
            }
            if let Some(blocks) = &report.related_components {
                for (i, b) in blocks.iter().enumerate() {
                    rows.push(vec![
                        "related".into(),
                        (i + 1).to_string(),
                        b.iter().map(usize::to_string).collect::<Vec<_>>().join("|"),
                    ]);
                }
            }
            csv_body(rows)
        }
    };
    Ok(Outcome {
        code: EXIT_TRUE,
        body,
    })
}

#[derive(Serialize)]
struct GeodesicReport {
    related: bool,
    length: usize,
    minima: u64,
    points: Vec<usize>,
    tuples: Vec<Vec<String>>,
}

fn resolve_point(s: &PointSet, reference: &str) -> Result<usize> {
    let by_index = |k: usize| -> Result<usize> {
        if k >= 1 && k <= s.len() {
            Ok(k - 1)
        } else {
            Err(Error::OutOfRange(format!(
                "point index {k} not in 1..={}",
                s.len()
            )))
        }
    };
    if reference == "z" {
        return if s.is_empty() {
            Err(Error::EmptyInput)
        } else {
            Ok(s.len() - 1)
        };
    }
    if let Some(k) = reference
        .strip_prefix('y')
        .and_then(|t| t.parse::<usize>().ok())
    {
        return by_index(k);
    }
    if let Ok(k) = reference.parse::<usize>() {
        return by_index(k);
    }
    if reference.contains(',') {
        let p = Point::from_names(&split_symbols(reference))?;
        return s
            .position(&p)
            .ok_or_else(|| Error::Shape(format!("point {p} is not in the set")));
    }
    Err(Error::Parse(format!(
        "cannot resolve point reference {reference:?}"
    )))
}

fn run_geodesic(
    s: &PointSet,
    from: &str,
    to: &str,
    budgets: &Budgets,
    format: OutputFormat,
) -> Result<Outcome> {
    let a = resolve_point(s, from)?;
    let b = resolve_point(s, to)?;
    let g = match geodesic_by_index(s, a, b, budgets) {
        Ok(g) => g,
        Err(Error::NotRelated) => return predicate_false(format, "not-related"),
        Err(Error::NotGood) => return predicate_false(format, "not-good"),
        Err(e) => return Err(e),
    };
    let report = GeodesicReport {
        related: true,
        length: g.indices.len(),
        minima: g.minima,
        points: g.indices.iter().map(|i| i + 1).collect(),
        tuples: g
            .indices
            .iter()
            .map(|&i| {
                s.point(i)
                    .coords()
                    .iter()
                    .map(|sym| sym.as_str().to_owned())
                    .collect()
            })
            .collect(),
    };
    let body = match format {
        OutputFormat::Json => json_line(&report),
        OutputFormat::Csv => csv_body(vec![
            vec![
                "related".into(),
                "length".into(),
                "minima".into(),
                "points".into(),
            ],
            vec![
                report.related.to_string(),
                report.length.to_string(),
                report.minima.to_string(),
                report
                    .points
                    .iter()
                    .map(usize::to_string)
                    .collect::<Vec<_>>()
                    .join("|"),
            ],
        ]),
    };
    Ok(Outcome {
        code: EXIT_TRUE,
        body,
    })
}

#[derive(Serialize)]
struct SolveReport {
    solved: bool,
    verified: bool,
    bound: String,
    solution: Value,
}

fn run_solve(
    s: &PointSet,
    function: &Path,
    boundary: &str,
    boundary_values: Option<&Path>,
    format: OutputFormat,
) -> Result<Outcome> {
    let f = FunctionTable::from_json(&fs::read_to_string(function)?)?;
    let b = BoundarySet::from_symbols(s, split_symbols(boundary))?;
    let assignment = match boundary_values {
        None => BoundaryAssignment::zeros(b.clone()),
        Some(path) => {
            let root: Value = serde_json::from_str(&fs::read_to_string(path)?)
                .map_err(|e| Error::Parse(format!("invalid boundary values JSON: {e}")))?;
            let obj = root
                .as_object()
                .ok_or_else(|| Error::Parse("boundary values must be a JSON object".into()))?;
            let mut values: BTreeMap<_, _> = b
                .elements()
                .iter()
                .map(|k| (k.clone(), crate::linalg::ratio(0, 1)))
                .collect();
            for (name, v) in obj {
                let symbol = Symbol::new(name.as_str())?;
                let key = b
                    .elements()
                    .iter()
                    .find(|k| k.symbol == symbol)
                    .ok_or_else(|| Error::UnknownBoundaryElement(name.clone()))?;
                values.insert(key.clone(), rational_from_json(v)?);
            }
            BoundaryAssignment::new(b.clone(), values)?
        }
    };
    let u = match solve_decomposition(s, &f, &assignment) {
        Ok(u) => u,
        Err(Error::NotABoundary) => return predicate_false(format, "not-a-boundary"),
        Err(Error::NotGood) => return predicate_false(format, "not-good"),
        Err(e) => return Err(e),
    };
    let verified = verify_decomposition(s, &f, &u)?;
    let bound = solution_bound_report(s, &b)?;
    let report = SolveReport {
        solved: true,
        verified,
        bound: bound.to_string(),
        solution: u.to_json_value(),
    };
    let body = match format {
        OutputFormat::Json => json_line(&report),
        OutputFormat::Csv => {
            let mut rows = vec![vec![
                "coordinate".to_owned(),
                "symbol".to_owned(),
                "value".to_owned(),
            ]];
            for (i, table) in u.tables().iter().enumerate() {
                for (sym, v) in table {
                    rows.push(vec![
                        (i + 1).to_string(),
                        sym.as_str().to_owned(),
                        v.to_string(),
                    ]);
                }
            }
            csv_body(rows)
        }
    };
    Ok(Outcome {
        code: EXIT_TRUE,
        body,
    })
}

#[derive(Serialize)]
struct FamilyReport {
    family: String,
    dimension: usize,
    points: usize,
    path: String,
}

fn run_family(
    family: FamilyKind,
    count: Option<usize>,
    n: Option<usize>,
    output: &Path,
    format: OutputFormat,
) -> Result<Outcome> {
    let (name, set) = match family {
        FamilyKind::S => {
            let count =
                count.ok_or_else(|| Error::Parse("family \"s\" requires --count".into()))?;
            ("s".to_owned(), families::family_s(count)?)
        }
        FamilyKind::S4nz => {
            let n = n.ok_or_else(|| Error::Parse("family \"s4nz\" requires --n".into()))?;
            ("s4nz".to_owned(), families::family_s4n_plus_z(n)?)
        }
    };
    fs::write(output, set.to_json())?;
    let report = FamilyReport {
        family: name,
        dimension: set.dimension(),
        points: set.len(),
        path: output.display().to_string(),
    };
    let body = match format {
        OutputFormat::Json => json_line(&report),
        OutputFormat::Csv => csv_body(vec![
            vec![
                "family".into(),
                "dimension".into(),
                "points".into(),
                "path".into(),
            ],
            vec![
                report.family.clone(),
                report.dimension.to_string(),
                report.points.to_string(),
                report.path.clone(),
            ],
        ]),
    };
    Ok(Outcome {
        code: EXIT_TRUE,
        body,
    })
}

#[derive(Serialize)]
struct PredicateFalse {
    ok: bool,
    reason: String,
}

fn predicate_false(format: OutputFormat, reason: &str) -> Result<Outcome> {
    let report = PredicateFalse {
        ok: false,
        reason: reason.to_owned(),
    };
    let body = match format {
        OutputFormat::Json => json_line(&report),
        OutputFormat::Csv => csv_body(vec![
            vec!["ok".into(), "reason".into()],
            vec!["false".into(), reason.to_owned()],
        ]),
    };
    Ok(Outcome {
        code: EXIT_FALSE,
        body,
    })
}

fn json_line<T: Serialize>(value: &T) -> String {
    let mut out = serde_json::to_string(value).expect("report serialization");
    out.push('\n');
    out
}

fn csv_body(rows: Vec<Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.write_record(&row).expect("csv row");
    }
    String::from_utf8(w.into_inner().expect("csv buffer")).expect("csv utf8")
}
