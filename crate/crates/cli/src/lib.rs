//! Command implementations behind the `cyarith` binary.
//!
//! Every command returns a JSON document `{schema, request, result}`;
//! coefficient tables can be rendered as CSV instead.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use cyarith::cm_curves::{self, CurveSpec, Family};
use cyarith::lseries::{self, cache, CoefficientTable};
use cyarith::num_complex::Complex64;
use cyarith::orbifold_hodge::{self, GroupAction};
use cyarith::{analytic, jacobian, quad_fields, Error};
use serde::Serialize;
use serde_json::{json, Value};

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Twist list `D^k,D^k,...` (sign optional, `^k` defaults to 1).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Twists(pub Vec<(i64, u32)>);

pub fn parse_twists(s: &str) -> Result<Twists, String> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim) {
        let (d, k) = match item.split_once('^') {
            Some((d, k)) => (d, k.parse::<u32>().map_err(|e| format!("bad exponent in {item:?}: {e}"))?),
            None => (item, 1),
        };
        let d = d.trim().parse::<i64>().map_err(|e| format!("bad twist {item:?}: {e}"))?;
        if d == 0 {
            return Err(format!("twist {item:?} is zero"));
        }
        if k == 0 {
            return Err(format!("exponent in {item:?} must be positive"));
        }
        out.push((d, k));
    }
    Ok(Twists(out))
}

/// Generators `a,b,c;d,e,f`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Generators(pub Vec<[u32; 3]>);

pub fn parse_generators(s: &str) -> Result<Generators, String> {
    let mut out = Vec::new();
    for g in s.split(';').map(str::trim).filter(|g| !g.is_empty()) {
        let parts: Vec<u32> = g
            .split(',')
            .map(|x| x.trim().parse::<u32>().map_err(|e| format!("bad generator entry in {g:?}: {e}")))
            .collect::<Result<_, _>>()?;
        let [a, b, c] = parts[..] else {
            return Err(format!("generator {g:?} needs exactly three entries"));
        };
        out.push([a, b, c]);
    }
    if out.is_empty() {
        return Err("no generators given".into());
    }
    Ok(Generators(out))
}

#[derive(Debug, Parser)]
#[command(name = "cyarith", version, about = "Arithmetic of rigid Calabi-Yau threefolds from CM elliptic curves")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output format; CSV is only available for coefficient tables.
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    /// Cache directory (default `$CYARITH_CACHE`, else `~/.cyarith`).
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    /// Neither read nor write the coefficient cache.
    #[arg(long, global = true)]
    pub no_cache: bool,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(tag = "subcommand", rename_all = "lowercase")]
pub enum Command {
    /// Chen-Ruan Hodge numbers of a diagonal group action.
    Hodge {
        #[arg(long)]
        family: u32,
        #[arg(long, value_parser = parse_generators)]
        gens: Generators,
    },
    /// Traces of Frobenius at good primes up to the bound.
    Ap {
        #[arg(long)]
        family: u32,
        #[arg(long, allow_hyphen_values = true)]
        twist: Option<i64>,
        #[arg(long)]
        bound: usize,
    },
    /// q-expansion of a power of the curve's Hecke character.
    Qexp {
        #[arg(long)]
        family: u32,
        #[arg(long, allow_hyphen_values = true)]
        twist: Option<i64>,
        #[arg(long, default_value_t = 1)]
        power: u32,
        #[arg(long)]
        bound: usize,
    },
    /// Coefficients of the L-series of a (twisted) n-fold.
    Threefold {
        #[arg(long)]
        family: u32,
        #[arg(long, value_parser = parse_twists, allow_hyphen_values = true)]
        twists: Option<Twists>,
        #[arg(long, default_value_t = 3)]
        power: u32,
        #[arg(long)]
        bound: usize,
    },
    /// Yui-conjecture verdict for the n-fold.
    Yui {
        #[arg(long)]
        family: u32,
        #[arg(long, value_parser = parse_twists, allow_hyphen_values = true)]
        twists: Option<Twists>,
        #[arg(long, default_value_t = 3)]
        n: u32,
    },
    /// L-values of the n-fold; the central value if no `--s` is given.
    Lvalue {
        #[arg(long)]
        family: u32,
        #[arg(long, value_parser = parse_twists, allow_hyphen_values = true)]
        twists: Option<Twists>,
        #[arg(long, default_value_t = 3)]
        power: u32,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        s: Vec<f64>,
    },
    /// Central values of the twisted family against half-integral weight coefficients.
    Waldspurger {
        #[arg(long, value_delimiter = ',')]
        dlist: Vec<u64>,
    },
    /// All admissible subgroup classes with their Hodge pairs.
    Classify {
        #[arg(long)]
        family: u32,
    },
}

/// A failed command with its exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError { code: 2, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NotPrime(_)
            | Error::BadReduction { .. }
            | Error::ZeroTwist
            | Error::InvalidArgument(_)
            | Error::Inadmissible(_)
            | Error::NotRigid(_)
            | Error::EvenDimension(_) => 3,
            Error::NonConvergence(_) | Error::InsufficientCoefficients { .. } => 4,
            Error::Consistency(_) | Error::Io { .. } | Error::Cache { .. } => 1,
        };
        CliError { code, message: e.to_string() }
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn family(j: u32) -> CliResult<Family> {
    Family::from_order(j).map_err(|_| CliError::usage(format!("family must be 3, 4, 6 or 7, got {j}")))
}

fn twist_list(twists: &Option<Twists>) -> Vec<(i64, u32)> {
    twists.as_ref().map(|t| t.0.clone()).unwrap_or_default()
}

fn check_twist_count(fam: Family, n: u32, twists: &[(i64, u32)]) -> CliResult<()> {
    if fam == Family::Seven {
        if !twists.is_empty() {
            return Err(CliError::usage("family 7 takes no twists"));
        }
        return Ok(());
    }
    if n == 3 && !twists.is_empty() && twists.len() != 3 {
        return Err(CliError::usage(format!("a threefold takes exactly three twists, got {}", twists.len())));
    }
    if twists.len() > n as usize {
        return Err(CliError::usage(format!("at most {n} twists for the {n}-fold")));
    }
    Ok(())
}

/// Where tables are cached, if at all.
pub struct Context {
    pub cache_dir: Option<PathBuf>,
}

impl Context {
    pub fn from_cli(cli: &Cli) -> Self {
        let cache_dir = if cli.no_cache { None } else { Some(cli.cache_dir.clone().unwrap_or_else(cache::default_dir)) };
        Context { cache_dir }
    }

    /// Point-count table of the `n`-fold, through the cache when enabled.
    pub fn nfold_table(&self, fam: Family, n: u32, twists: &[(i64, u32)], bound: usize) -> CliResult<CoefficientTable> {
        let compute = |b: usize| lseries::nfold_coefficients(fam, n, twists, b);
        let Some(dir) = &self.cache_dir else { return Ok(compute(bound)?) };
        let twist = CurveSpec::from_twists(fam, twists)?.normalized_t as i128;
        let key = cache::CacheKey { family: fam, twist, power: n };
        let mut table = cache::get_or_compute(dir, &key, bound, compute)?.truncated(bound);
        // cached tables were produced by the point-count path
        table.origin = lseries::Origin::PointCount;
        Ok(table)
    }
}

fn table_json(table: &CoefficientTable, indices: impl Iterator<Item = usize>) -> Value {
    let mut map = serde_json::Map::new();
    for n in indices {
        map.insert(n.to_string(), json!(table.get(n) as i64));
    }
    json!({
        "weight": table.weight,
        "level": table.level,
        "origin": table.origin,
        "coefficients": map,
    })
}

fn table_csv(table: &CoefficientTable, indices: impl Iterator<Item = usize>) -> String {
    let mut out = format!("# weight={} level={}\nn,a_n\n", table.weight, table.level);
    for n in indices {
        out.push_str(&format!("{n},{}\n", table.get(n)));
    }
    out
}

fn complex_json(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

/// Result of a command: JSON, or CSV text for tables.
#[derive(Debug, Clone, PartialEq)]
pub enum Output {
    Json(Value),
    Csv(String),
}

impl Output {
    pub fn render(&self) -> String {
        match self {
            Output::Json(v) => serde_json::to_string_pretty(v).expect("JSON values always serialize") + "\n",
            Output::Csv(s) => s.clone(),
        }
    }
}

fn envelope(command: &Command, result: Value) -> Output {
    Output::Json(json!({ "schema": SCHEMA, "request": command, "result": result }))
}

fn tabular(command: &Command, format: Format, table: &CoefficientTable, indices: Vec<usize>, extra: Value) -> Output {
    match format {
        Format::Csv => Output::Csv(table_csv(table, indices.into_iter())),
        Format::Json => {
            let mut v = table_json(table, indices.into_iter());
            if let (Value::Object(m), Value::Object(e)) = (&mut v, extra) {
                m.extend(e);
            }
            envelope(command, v)
        }
    }
}

pub fn cmd_hodge(j: u32, gens: &Generators) -> CliResult<Value> {
    let action = GroupAction::new(j, &gens.0)?;
    let hodge = orbifold_hodge::chen_ruan_hodge(&action)?;
    Ok(json!({
        "elements": action.elements.len(),
        "h11": hodge.h11,
        "h21": hodge.h21,
        "diamond": hodge.diamond,
        "sectors": hodge.sectors,
        "rigid": hodge.h21 == 0,
    }))
}

pub fn cmd_ap(ctx: &Context, j: u32, twist: Option<i64>, bound: usize) -> CliResult<(CoefficientTable, Vec<usize>, CurveSpec)> {
    let fam = family(j)?;
    let curve = match (fam, twist) {
        (Family::Seven, None) => CurveSpec::roan(),
        (Family::Seven, Some(_)) => return Err(CliError::usage("family 7 takes no twist")),
        (_, t) => CurveSpec::new(fam, t.unwrap_or(1))?,
    };
    let table = ctx.nfold_table(fam, 1, &[(curve.normalized_t, 1)], bound.max(1))?;
    let primes = cm_curves::good_primes(&curve, bound as u64).into_iter().map(|p| p as usize).collect();
    Ok((table, primes, curve))
}

pub fn cmd_qexp(j: u32, twist: Option<i64>, power: u32, bound: usize) -> CliResult<CoefficientTable> {
    let fam = family(j)?;
    let curve = match (fam, twist) {
        (Family::Seven, None) => CurveSpec::roan(),
        (Family::Seven, Some(_)) => return Err(CliError::usage("family 7 takes no twist")),
        (_, t) => CurveSpec::new(fam, t.unwrap_or(1))?,
    };
    if power == 0 {
        return Err(CliError::usage("power must be positive"));
    }
    let chi = quad_fields::hecke::hecke_character_of(&curve)?.power(power)?;
    Ok(lseries::hecke_qexpansion(&chi, bound)?)
}

pub fn cmd_threefold(ctx: &Context, j: u32, twists: &[(i64, u32)], power: u32, bound: usize) -> CliResult<CoefficientTable> {
    let fam = family(j)?;
    check_twist_count(fam, power, twists)?;
    ctx.nfold_table(fam, power, twists, bound)
}

pub fn cmd_yui(j: u32, twists: &[(i64, u32)], n: u32) -> CliResult<Value> {
    let fam = family(j)?;
    check_twist_count(fam, n, twists)?;
    let v = if n == 3 { jacobian::yui_verdict(fam, twists)? } else { jacobian::nfold_verdict(fam, n, twists)? };
    Ok(json!({
        "holds": v.holds,
        "order": v.character_order,
        "total_twist": v.total_twist,
        "n": v.dimension,
        "q_model": v.q_model.to_string(),
        "reason": v.reason,
    }))
}

pub fn cmd_lvalue(ctx: &Context, j: u32, twists: &[(i64, u32)], power: u32, s: &[f64]) -> CliResult<Value> {
    let fam = family(j)?;
    check_twist_count(fam, power, twists)?;
    let chi = lseries::nfold_character(fam, power, twists)?;
    let k = power + 1;
    let s_max = s.iter().fold(k as f64, |m, x| m.max(x.abs()));
    let terms = analytic::required_terms(chi.level(), k, Complex64::new(s_max, 0.0));
    let table = ctx.nfold_table(fam, power, twists, terms)?;
    let l = analytic::CompletedLFunction::new(&table)?;
    let mut values = Vec::new();
    for &x in s {
        let z = Complex64::new(x, 0.0);
        let e = l.l_value(z)?;
        values.push(json!({
            "s": x,
            "value": complex_json(e.value),
            "truncation_error": e.truncation_error,
            "fe_residual": l.fe_residual(z)?,
        }));
    }
    let central = l.central_value()?;
    Ok(json!({
        "weight": k,
        "level": l.level,
        "terms": table.len(),
        "root_number": l.root_number,
        "root_number_numeric": l.root_number_numeric,
        "values": values,
        "central": central,
    }))
}

pub fn cmd_waldspurger(dlist: &[u64]) -> CliResult<Value> {
    if dlist.is_empty() {
        return Err(CliError::usage("empty D list"));
    }
    let mut rows = Vec::new();
    let mut classes: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
    for &d in dlist {
        match analytic::waldspurger_ratio(d) {
            Ok(r) => {
                if r.central.root_number == 1 {
                    classes[usize::from(d % 8 == 3)].push(r.ratio);
                }
                rows.push(json!({
                    "d": d,
                    "coefficient": r.coefficient,
                    "central_value": r.central.value,
                    "truncation_error": r.central.truncation_error,
                    "root_number": r.central.root_number,
                    "ratio": r.ratio,
                }));
            }
            Err(Error::InvalidArgument(msg)) => rows.push(json!({ "d": d, "error": msg })),
            Err(e) => return Err(e.into()),
        }
    }
    let summary = |v: &[f64]| {
        if v.is_empty() {
            return Value::Null;
        }
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        let spread = v.iter().map(|x| ((x - mean) / mean).abs()).fold(0.0, f64::max);
        json!({ "count": v.len(), "mean": mean, "max_relative_deviation": spread })
    };
    Ok(json!({ "rows": rows, "f1": summary(&classes[0]), "f2": summary(&classes[1]) }))
}

pub fn cmd_classify(j: u32) -> CliResult<Value> {
    let classes = orbifold_hodge::classify_subgroups(j)?;
    let rows: Vec<Value> = classes
        .iter()
        .map(|c| {
            json!({
                "generators": c.action.generators,
                "elements": c.action.elements.len(),
                "h11": c.h11,
                "h21": c.h21,
                "members": c.members,
            })
        })
        .collect();
    Ok(json!({ "family": j, "classes": rows }))
}

fn json_only(format: Format) -> CliResult<()> {
    match format {
        Format::Json => Ok(()),
        Format::Csv => Err(CliError::usage("--format csv is only available for coefficient tables")),
    }
}

/// Runs a parsed command line.
pub fn run(cli: &Cli) -> CliResult<Output> {
    let ctx = Context::from_cli(cli);
    let cmd = &cli.command;
    match cmd {
        Command::Hodge { family, gens } => {
            json_only(cli.format)?;
            Ok(envelope(cmd, cmd_hodge(*family, gens)?))
        }
        Command::Ap { family, twist, bound } => {
            let (table, primes, curve) = cmd_ap(&ctx, *family, *twist, *bound)?;
            Ok(tabular(cmd, cli.format, &table, primes, json!({ "curve": curve.to_string() })))
        }
        Command::Qexp { family, twist, power, bound } => {
            let table = cmd_qexp(*family, *twist, *power, *bound)?;
            Ok(tabular(cmd, cli.format, &table, (1..=table.len()).collect(), json!({})))
        }
        Command::Threefold { family, twists, power, bound } => {
            let table = cmd_threefold(&ctx, *family, &twist_list(twists), *power, *bound)?;
            Ok(tabular(cmd, cli.format, &table, (1..=table.len()).collect(), json!({})))
        }
        Command::Yui { family, twists, n } => {
            json_only(cli.format)?;
            Ok(envelope(cmd, cmd_yui(*family, &twist_list(twists), *n)?))
        }
        Command::Lvalue { family, twists, power, s } => {
            json_only(cli.format)?;
            Ok(envelope(cmd, cmd_lvalue(&ctx, *family, &twist_list(twists), *power, s)?))
        }
        Command::Waldspurger { dlist } => {
            json_only(cli.format)?;
            Ok(envelope(cmd, cmd_waldspurger(dlist)?))
        }
        Command::Classify { family } => {
            json_only(cli.format)?;
            Ok(envelope(cmd, cmd_classify(*family)?))
        }
    }
}

/// Parses `args` (including the program name) and runs them, returning
/// the exit code with stdout and stderr text.
pub fn run_args<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 { (0, text, String::new()) } else { (2, String::new(), text) };
        }
    };
    match run(&cli) {
        Ok(out) => (0, out.render(), String::new()),
        Err(e) => (e.code, String::new(), format!("error: {e}\n")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twist_syntax() {
        assert_eq!(parse_twists("3^2,1,-5^3").unwrap().0, vec![(3, 2), (1, 1), (-5, 3)]);
        assert!(parse_twists("0^1").is_err());
        assert!(parse_twists("2^0").is_err());
        assert!(parse_twists("x").is_err());
    }

    #[test]
    fn generator_syntax() {
        assert_eq!(parse_generators("1,3,0;1,0,3").unwrap().0, vec![[1, 3, 0], [1, 0, 3]]);
        assert!(parse_generators("1,2").is_err());
        assert!(parse_generators("").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::from(Error::NotRigid(5)).code, 3);
        assert_eq!(CliError::from(Error::NonConvergence("x".into())).code, 4);
        assert_eq!(run_args(["cyarith", "hodge", "--family", "6"]).0, 2);
        assert_eq!(run_args(["cyarith", "hodge", "--family", "6", "--gens", "3,3,0"]).0, 3);
        assert_eq!(run_args(["cyarith", "yui", "--family", "6", "--twists", "4", "--n", "4"]).0, 3);
        assert_eq!(run_args(["cyarith", "classify", "--family", "4", "--format", "csv"]).0, 2);
    }
}
