//! Command-line interface: table subcommands, the order audit, and the
//! constants report.
//!
//! Exit codes: 0 success, 1 invalid arguments, 2 hypothesis violation under
//! `--strict-hypotheses`, 3 evaluation failure.

use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::bounds::bound_report;
use crate::error::{Error, Result};
use crate::harness::{
    convergence_table, exact_order_audit, iterate_table, lower_constant_estimate,
    simultaneous_table, voronovskaja_table, ExecMode, RateTable, TableKind,
};
use crate::pq::PqParams;
use crate::scalar::{parse_rational, Scalar};
use crate::series::{catalog, CatalogFn, PowerSeries};

#[derive(Parser)]
#[command(
    name = "pq-lorentz",
    version,
    about = "Polynomial operator experiments on compact disks: convergence tables, certified error constants, and order audits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convergence table: sup error of (operator - identity), per index n
    Converge(TableArgs),
    /// Correction-residual table measured against the second-order constant
    Voronovskaja(TableArgs),
    /// Derivative table: sup error of the m-th derivative of the residual
    Simultaneous(TableArgs),
    /// Iterated-operator table over an (n, m) schedule
    Iterate(TableArgs),
    /// Exact-order audit of a measured table
    Audit(AuditArgs),
    /// Certified constants, hypothesis flags, and the lower-constant estimate
    Constants(ConstantsArgs),
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// First parameter p, as a rational (11/10, 1.1, 2)
    #[arg(long, default_value = "11/10")]
    p: String,
    /// Second parameter q, as a rational; must exceed p
    #[arg(long, default_value = "6/5")]
    q: String,
    /// Catalog function: exp | sinlike | coslike | geometric:<a> |
    /// monomial:<j> | polynomial:<c0,c1,...>
    #[arg(long, default_value = "exp")]
    f: String,
    /// Evaluation radius r (rational)
    #[arg(long, default_value = "1")]
    r: String,
    /// Majorant radius r1 (rational)
    #[arg(long, default_value = "2")]
    r1: String,
    /// Transfer radius r* for derivative tables (rational)
    #[arg(long = "rstar", default_value = "3/2")]
    rstar: String,
    /// Run on the float fast path
    #[arg(long, conflicts_with = "exact")]
    float: bool,
    /// Run on the exact rational path (the default)
    #[arg(long)]
    exact: bool,
    /// Exit with code 2 when the hypothesis chain backing the requested
    /// statement does not hold at these parameters
    #[arg(long)]
    strict_hypotheses: bool,
}

#[derive(Args, Clone)]
struct RangeArgs {
    /// First operator index
    #[arg(long, default_value_t = 2)]
    n_start: u32,
    /// Last operator index (inclusive)
    #[arg(long, default_value_t = 12)]
    n_end: u32,
    /// Step between operator indices
    #[arg(long, default_value_t = 1)]
    n_step: u32,
    /// Grid sample count (never below 1024 or 16 x degree)
    #[arg(long)]
    grid: Option<usize>,
    /// Grid scan execution mode (defaults to the compiled-in mode)
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
}

#[derive(Args, Clone)]
struct OutputArgs {
    /// Output format
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TableArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    range: RangeArgs,
    #[command(flatten)]
    output: OutputArgs,
    /// Derivative order (simultaneous) or iteration count (iterate)
    #[arg(long, default_value_t = 1)]
    m: u32,
    /// Iterate tables only: use the schedule m = n instead of --m
    #[arg(long)]
    m_equals_n: bool,
}

#[derive(Args)]
struct AuditArgs {
    #[command(flatten)]
    table: TableArgs,
    /// Which table kind to audit
    #[arg(long, value_enum, default_value_t = KindArg::Converge)]
    kind: KindArg,
    /// Ignore rows with n below this when auditing
    #[arg(long, default_value_t = 3)]
    burn_in: u32,
    /// Largest allowed max/min spread of normalized errors
    #[arg(long, default_value_t = 100.0)]
    spread_cap: f64,
}

#[derive(Args)]
struct ConstantsArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Output file (stdout when omitted; always JSON)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Derivative order for the transfer factor
    #[arg(long)]
    m: Option<u32>,
    /// Depth of the empirical lower-constant scan
    #[arg(long, default_value_t = 8)]
    n_max: u32,
    /// Stored series truncation index
    #[arg(long, default_value_t = 96)]
    k_trunc: usize,
    /// Grid sample count for the lower-constant scan
    #[arg(long)]
    grid: Option<usize>,
    /// Grid scan execution mode
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Skip the lower-constant scan
    #[arg(long)]
    skip_lower: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Sequential,
    Parallel,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Converge,
    Voronovskaja,
    Simultaneous,
    Iterate,
}

fn resolve_mode(mode: Option<ModeArg>) -> ExecMode {
    match mode {
        None => ExecMode::default_mode(),
        Some(ModeArg::Sequential) => ExecMode::Sequential,
        Some(ModeArg::Parallel) => ExecMode::Parallel,
    }
}

struct Prepared {
    params: PqParams,
    f: PowerSeries,
    r: Scalar,
    rstar: Scalar,
    r1: Scalar,
}

fn prepare(common: &CommonArgs, k_trunc: usize) -> Result<Prepared> {
    let params = PqParams::from_rationals(&common.p, &common.q)?;
    let func = CatalogFn::parse(&common.f)?;
    let f = catalog(&func, k_trunc)?;
    let r = Scalar::from_rat(parse_rational(&common.r)?);
    let r1 = Scalar::from_rat(parse_rational(&common.r1)?);
    let rstar = Scalar::from_rat(parse_rational(&common.rstar)?);
    if common.float {
        Ok(Prepared {
            params: params.to_float_path(),
            f: f.to_float_path(),
            r: r.to_float_path(),
            rstar: rstar.to_float_path(),
            r1: r1.to_float_path(),
        })
    } else {
        Ok(Prepared {
            params,
            f,
            r,
            rstar,
            r1,
        })
    }
}

fn build_range(range: &RangeArgs) -> Result<Vec<u32>> {
    if range.n_start == 0 {
        return Err(Error::InvalidArgument("--n-start must be >= 1".into()));
    }
    if range.n_step == 0 {
        return Err(Error::InvalidArgument("--n-step must be >= 1".into()));
    }
    if range.n_end < range.n_start {
        return Err(Error::InvalidArgument(
            "--n-end must be >= --n-start".into(),
        ));
    }
    Ok((range.n_start..=range.n_end)
        .step_by(range.n_step as usize)
        .collect())
}

fn build_table(kind: TableKind, args: &TableArgs) -> Result<RateTable> {
    let k_trunc = args.range.n_end as usize + 64;
    let prep = prepare(&args.common, k_trunc)?;
    let ns = build_range(&args.range)?;
    let mode = resolve_mode(args.range.mode);
    match kind {
        TableKind::Convergence => convergence_table(
            &prep.f,
            &prep.params,
            &prep.r,
            &prep.r1,
            &ns,
            args.range.grid,
            mode,
        ),
        TableKind::Voronovskaja => voronovskaja_table(
            &prep.f,
            &prep.params,
            &prep.r,
            &prep.r1,
            &ns,
            args.range.grid,
            mode,
        ),
        TableKind::Simultaneous => simultaneous_table(
            &prep.f,
            &prep.params,
            &prep.r,
            &prep.rstar,
            &prep.r1,
            args.m,
            &ns,
            args.range.grid,
            mode,
        ),
        TableKind::Iterates => {
            let schedule: Vec<(u32, u32)> = if args.m_equals_n {
                ns.iter().map(|&n| (n, n)).collect()
            } else {
                ns.iter().map(|&n| (n, args.m)).collect()
            };
            iterate_table(
                &prep.f,
                &prep.params,
                &prep.r,
                &prep.r1,
                &schedule,
                args.range.grid,
                mode,
            )
        }
    }
}

fn write_output(text: &str, path: &Option<PathBuf>) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes())?;
            lock.flush()?;
        }
    }
    Ok(())
}

fn emit_table(table: &RateTable, output: &OutputArgs) -> Result<()> {
    let text = match output.format {
        FormatArg::Csv => table.csv_string()?,
        FormatArg::Json => {
            let mut s = serde_json::to_string_pretty(&table.to_json())?;
            s.push('\n');
            s
        }
    };
    write_output(&text, &output.out)
}

fn strict_violation(table: &RateTable) -> i32 {
    eprintln!(
        "hypothesis violation: the '{}' chain does not hold at p = {}, q = {}, r = {}, r1 = {} (function {})",
        table.relevant_flag, table.p, table.q, table.r, table.r1, table.function
    );
    2
}

fn table_command(kind: TableKind, args: &TableArgs) -> Result<i32> {
    let table = build_table(kind, args)?;
    if args.common.strict_hypotheses && !table.relevant_flag_holds {
        return Ok(strict_violation(&table));
    }
    emit_table(&table, &args.output)?;
    Ok(0)
}

fn audit_command(args: &AuditArgs) -> Result<i32> {
    let kind = match args.kind {
        KindArg::Converge => TableKind::Convergence,
        KindArg::Voronovskaja => TableKind::Voronovskaja,
        KindArg::Simultaneous => TableKind::Simultaneous,
        KindArg::Iterate => TableKind::Iterates,
    };
    let table = build_table(kind, &args.table)?;
    if args.table.common.strict_hypotheses && !table.relevant_flag_holds {
        return Ok(strict_violation(&table));
    }
    let audit = exact_order_audit(&table, args.burn_in, args.spread_cap)?;
    let mut text = serde_json::to_string_pretty(&audit.to_json())?;
    text.push('\n');
    write_output(&text, &args.table.output.out)?;
    Ok(0)
}

fn constants_command(args: &ConstantsArgs) -> Result<i32> {
    let prep = prepare(&args.common, args.k_trunc)?;
    let report = bound_report(
        &prep.params,
        &prep.f,
        &prep.r,
        Some(&prep.rstar),
        &prep.r1,
        args.m,
    )?;
    if args.common.strict_hypotheses && !report.flags.strict_regime {
        eprintln!(
            "hypothesis violation: the strict regime q > p > 1 does not hold at p = {}, q = {}",
            report.p, report.q
        );
        return Ok(2);
    }
    let lower = if args.skip_lower {
        Value::Null
    } else {
        match lower_constant_estimate(
            &prep.f,
            &prep.params,
            &prep.r,
            args.n_max,
            args.grid,
            resolve_mode(args.mode),
        ) {
            Ok(lc) => lc.to_json(),
            Err(Error::LinearExcluded) => Value::Null,
            Err(e) => return Err(e),
        }
    };
    let doc = json!({
        "report": serde_json::to_value(&report)?,
        "lower": lower,
    });
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    write_output(&text, &args.out)?;
    Ok(0)
}

fn run(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Converge(args) => table_command(TableKind::Convergence, args),
        Command::Voronovskaja(args) => table_command(TableKind::Voronovskaja, args),
        Command::Simultaneous(args) => table_command(TableKind::Simultaneous, args),
        Command::Iterate(args) => table_command(TableKind::Iterates, args),
        Command::Audit(args) => audit_command(args),
        Command::Constants(args) => constants_command(args),
    }
}

fn classify(e: &Error) -> i32 {
    match e {
        Error::InvalidArgument(_)
        | Error::InvalidParams(_)
        | Error::LinearExcluded
        | Error::TooFewRows { .. }
        | Error::AuditNotApplicable(_) => 1,
        _ => 3,
    }
}

/// Parse the process arguments, run, and return the exit code.
pub fn main_entry() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            classify(&e)
        }
    }
}
