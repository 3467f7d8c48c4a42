use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

use powerfrac::parse::{parse_function, parse_p, parse_weight, GridSpec};
use powerfrac::plot::{render_svg, PlotSpec, Series};
use powerfrac::table::{format_number, Table};
use powerfrac::verify::{run_sweep, Suite};
use powerfrac_core::closedforms::{example_approximant, lth_derivative_series};
use powerfrac_core::operators::{pfd_quadrature, pfd_series, pfi};
use powerfrac_core::specfun::{power_ml, DEFAULT_MAX_TERMS};
use powerfrac_core::{Error, FunctionKind, PowerParams, QuadratureConfig, RegisteredFunction};

const DEFAULT_TOL: f64 = 1e-15;
/// Series tail bound for `ml`; below one ulp of results of order 1 to 100.
const ML_DEFAULT_TOL: f64 = 1e-17;

#[derive(Parser)]
#[command(name = "powerfrac", version, about = "Power fractional calculus on the command line")]
struct Cli {
    /// Truncation tolerance (verify: pass threshold, default per suite)
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Quadrature panels per interval
    #[arg(long, global = true)]
    quad_panels: Option<usize>,
    /// Reserved; nothing here uses random numbers
    #[arg(long, global = true)]
    seedless: bool,
    /// Write the main output here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Power Mittag-Leffler function pE_{k,l}(tau)
    Ml(MlArgs),
    /// Power fractional derivative on a grid
    Deriv(DerivArgs),
    /// Power fractional integral on a grid
    Integ(OperatorArgs),
    /// Taylor approximants of exp, cos or sin about 0
    Taylor(TaylorArgs),
    /// Run a verification sweep
    Verify(VerifyArgs),
}

#[derive(Args)]
#[command(group(ArgGroup::new("at").required(true).args(["tau", "grid"])), allow_negative_numbers = true)]
struct MlArgs {
    #[arg(long)]
    k: f64,
    #[arg(long)]
    l: f64,
    /// Power parameter (`e` for Euler's number)
    #[arg(long, value_parser = parse_p)]
    p: f64,
    #[arg(long)]
    tau: Option<f64>,
    /// min:max:points
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<GridSpec>,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct OperatorArgs {
    /// t, t^2, sin, cos, exp, const:c or kind:delta
    #[arg(long = "f")]
    function: String,
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    beta: f64,
    #[arg(long, value_parser = parse_p)]
    p: f64,
    /// one, exp(-c*t) or 1+c*t^2
    #[arg(long, default_value = "one")]
    weight: String,
    /// Lower limit
    #[arg(long, default_value_t = 0.0)]
    a: f64,
    #[arg(long, allow_hyphen_values = true)]
    grid: GridSpec,
}

#[derive(Clone, Copy, ValueEnum)]
enum Form {
    Quadrature,
    Series,
}

#[derive(Args)]
struct DerivArgs {
    #[command(flatten)]
    op: OperatorArgs,
    #[arg(long, value_enum, default_value = "quadrature")]
    form: Form,
}

#[derive(Clone, Copy, ValueEnum)]
enum Example {
    Exp,
    Cos,
    Sin,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct TaylorArgs {
    #[arg(long, value_enum)]
    example: Example,
    #[arg(long, default_value_t = 1.0)]
    delta: f64,
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    beta: f64,
    #[arg(long, value_parser = parse_p)]
    p: f64,
    /// Comma-separated approximant orders
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    orders: Vec<usize>,
    #[arg(long, default_value = "0:1:201", allow_hyphen_values = true)]
    grid: GridSpec,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
    #[arg(long, default_value_t = 800)]
    width: u32,
    #[arg(long, default_value_t = 600)]
    height: u32,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    suite: SuiteArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Composition,
    Forms,
    Iteration,
    Reductions,
    Taylor,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Suite {
        match s {
            SuiteArg::Composition => Suite::Composition,
            SuiteArg::Forms => Suite::Forms,
            SuiteArg::Iteration => Suite::Iteration,
            SuiteArg::Reductions => Suite::Reductions,
            SuiteArg::Taylor => Suite::Taylor,
        }
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Domain(_) | Error::DerivativeUnavailable(_) => 2,
        Error::Overflow(_) | Error::Convergence { .. } | Error::Divergent { .. } => 3,
        Error::Resolution { .. } => 4,
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: exit_code(&e),
            message: e.to_string(),
        }
    }
}

impl From<powerfrac::parse::ParseError> for Failure {
    fn from(e: powerfrac::parse::ParseError) -> Self {
        Failure::usage(e.0)
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    let res = match path {
        Some(p) => fs::write(p, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    };
    res.map_err(|e| Failure::usage(format!("cannot write output: {e}")))
}

struct Globals {
    tol: Option<f64>,
    quad: QuadratureConfig,
    out: Option<PathBuf>,
}

impl Globals {
    fn tol(&self) -> Result<f64, Failure> {
        self.tol_or(DEFAULT_TOL)
    }

    fn tol_or(&self, default: f64) -> Result<f64, Failure> {
        let tol = self.tol.unwrap_or(default);
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Failure::usage("--tol must be a positive number"));
        }
        Ok(tol)
    }
}

fn cmd_ml(g: &Globals, args: &MlArgs) -> Result<u8, Failure> {
    let tol = g.tol_or(ML_DEFAULT_TOL)?;
    let taus: Vec<f64> = match (&args.tau, &args.grid) {
        (Some(t), _) => vec![*t],
        (None, Some(grid)) => grid.values().collect(),
        (None, None) => unreachable!("clap requires --tau or --grid"),
    };
    let mut table = Table::new(["tau", "value", "terms_used"]);
    for tau in taus {
        let r = power_ml(args.k, args.l, args.p, tau, tol)?;
        let rounding = r.rounding_estimate();
        if rounding > tol.max(1e-12 * r.value.abs()) {
            return Err(Failure {
                code: 3,
                message: format!(
                    "power Mittag-Leffler series at tau={tau:?}: terms cancel beyond working precision \
                     (rounding estimate {rounding:e} against value {:e})",
                    r.value
                ),
            });
        }
        table.push(vec![format_number(tau), format_number(r.value), r.terms_used.to_string()]);
    }
    write_output(g.out.as_deref(), &table.to_csv())?;
    Ok(0)
}

fn cmd_operator(g: &Globals, op: &OperatorArgs, form: Option<Form>) -> Result<u8, Failure> {
    let tol = g.tol()?;
    let f = parse_function(&op.function)?;
    let w = parse_weight(&op.weight)?;
    let pp = PowerParams::new(op.alpha, op.beta, op.p)?;
    if op.grid.t_min < op.a {
        return Err(Failure::usage("grid must start at or after the lower limit --a"));
    }
    let series = matches!(form, Some(Form::Series));
    let mut table = if series {
        Table::new(["t", "value", "terms_used"])
    } else {
        Table::new(["t", "value"])
    };
    for t in op.grid.values() {
        match form {
            None => {
                let v = pfi(&f, &pp, &w, op.a, t, &g.quad)?;
                table.push_numbers(&[t, v]);
            }
            Some(Form::Quadrature) => {
                let v = pfd_quadrature(&f, &pp, &w, op.a, t, &g.quad, tol)?;
                table.push_numbers(&[t, v]);
            }
            Some(Form::Series) => {
                let r = pfd_series(&f, &pp, &w, op.a, t, &g.quad, tol, DEFAULT_MAX_TERMS)?;
                table.push(vec![format_number(t), format_number(r.value), r.terms_used.to_string()]);
            }
        }
    }
    write_output(g.out.as_deref(), &table.to_csv())?;
    Ok(0)
}

fn cmd_taylor(g: &Globals, args: &TaylorArgs) -> Result<u8, Failure> {
    let tol = g.tol()?;
    let kind = match args.example {
        Example::Exp => FunctionKind::Exp,
        Example::Cos => FunctionKind::Cos,
        Example::Sin => FunctionKind::Sin,
    };
    let func = RegisteredFunction::new(kind, args.delta)?;
    let pp = PowerParams::new(args.alpha, args.beta, args.p)?;
    if args.grid.t_min < 0.0 {
        return Err(Failure::usage("taylor grid must lie in t >= 0"));
    }
    if args.width == 0 || args.height == 0 {
        return Err(Failure::usage("plot dimensions must be positive"));
    }
    let top = args.orders.iter().copied().max().unwrap_or(0);
    for l in 1..=top {
        lth_derivative_series(&func, l, &pp, 0.0, tol, DEFAULT_MAX_TERMS).map_err(|e| {
            let q = match &e {
                Error::Convergence { terms, .. } => format!(", q={terms}"),
                _ => String::new(),
            };
            Failure {
                code: exit_code(&e),
                message: format!("derivative series at (l={l}{q}): {e}"),
            }
        })?;
    }

    let labels: Vec<String> = std::iter::once("f".to_string())
        .chain(args.orders.iter().map(|n| format!("A_{n}")))
        .collect();
    let mut table = Table::new(std::iter::once("t".to_string()).chain(labels.iter().cloned()));
    let mut series: Vec<Series> = labels
        .iter()
        .map(|label| Series {
            label: label.clone(),
            points: Vec::with_capacity(args.grid.points),
        })
        .collect();
    for t in args.grid.values() {
        let mut row = vec![t, func.value(t)];
        for &n in &args.orders {
            row.push(example_approximant(&func, n, &pp, t, tol, DEFAULT_MAX_TERMS)?);
        }
        for (s, &v) in series.iter_mut().zip(&row[1..]) {
            s.points.push((t, v));
        }
        table.push_numbers(&row);
    }

    let csv_path = args.csv.as_deref().or(g.out.as_deref());
    if csv_path.is_some() || args.svg.is_none() {
        write_output(csv_path, &table.to_csv())?;
    }
    if let Some(path) = &args.svg {
        let spec = PlotSpec {
            width_px: args.width,
            height_px: args.height,
            ..PlotSpec::default()
        };
        write_output(Some(path), &render_svg(&spec, &series))?;
    }
    Ok(0)
}

fn cmd_verify(g: &Globals, args: &VerifyArgs) -> Result<u8, Failure> {
    let suite = Suite::from(args.suite);
    let tol = match g.tol {
        Some(t) if t > 0.0 && t.is_finite() => t,
        Some(_) => return Err(Failure::usage("--tol must be a positive number")),
        None => suite.default_tolerance(),
    };
    let report = run_sweep(suite, tol);
    write_output(g.out.as_deref(), &report.to_string())?;
    Ok(if report.pass { 0 } else { 1 })
}

fn run(cli: Cli) -> Result<u8, Failure> {
    if cli.seedless {
        return Err(Failure::usage("--seedless is reserved: no command uses random numbers"));
    }
    let quad = QuadratureConfig {
        panels: cli.quad_panels.unwrap_or(QuadratureConfig::default().panels),
        ..QuadratureConfig::default()
    };
    quad.validate()?;
    let g = Globals {
        tol: cli.tol,
        quad,
        out: cli.out,
    };
    match &cli.command {
        Command::Ml(a) => cmd_ml(&g, a),
        Command::Deriv(a) => cmd_operator(&g, &a.op, Some(a.form)),
        Command::Integ(a) => cmd_operator(&g, a, None),
        Command::Taylor(a) => cmd_taylor(&g, a),
        Command::Verify(a) => cmd_verify(&g, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("powerfrac: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
