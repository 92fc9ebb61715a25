//! The `gwmono` command line.
//!
//! Exit codes: 0 success (no violation), 1 violation found, 2 usage or input
//! error, 3 numeric failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::convexroof::{self, Direction, OptimizerBudget};
use crate::error::Error;
use crate::gwstates::{self, GWSpec};
use crate::inequalities::{self, format_float, AssistMethod, Checker, FuzzConfig, InequalityReport, CSV_HEADER};
use crate::linalg::C64;
use crate::measures::{self, f_q, PureMeasure, TsallisParams};
use crate::qstate::{CoarseGrain, PartyPartition};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

/// Tolerance of the `blue ≤ mid ≤ red` chain in the example table.
pub const CHAIN_TOL: f64 = 1e-12;
/// Agreement required between the closed-form and Wootters concurrences in the example.
pub const EXAMPLE_XCHECK_TOL: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(name = "gwmono", version, about = "Tsallis-q monogamy and polygamy checks for generalized W-class states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Curves for the four-qubit worked example under both argument conventions.
    Example(ExampleArgs),
    /// Seeded fuzz campaign for one checker.
    Fuzz(FuzzArgs),
    /// Convex-roof optimum of a (reduced) GW-class state across a cut.
    Oracle(OracleArgs),
    /// One checker on one spec and partition.
    Check(CheckArgs),
}

#[derive(Debug, Args)]
pub struct ExampleArgs {
    /// `LO:HI:STEPS`, within [3, 4].
    #[arg(long, default_value = "3:4:101")]
    pub q_range: QRange,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StateArgs {
    /// GW spec file.
    #[arg(long, conflicts_with = "symmetric_w")]
    pub spec: Option<PathBuf>,
    /// Uniform spec `a_ji = 1/√(nd)` with `n` parties and `d` excitation levels.
    #[arg(long, num_args = 2, value_names = ["N", "D"])]
    pub symmetric_w: Option<Vec<usize>>,
    /// Vacuum weight override (GWV superposition weight on the GW part).
    #[arg(long)]
    pub p: Option<f64>,
}

#[derive(Debug, Args)]
pub struct BudgetArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 200)]
    pub restarts: usize,
    #[arg(long, default_value_t = 2000)]
    pub iters: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

impl BudgetArgs {
    pub fn budget(&self) -> OptimizerBudget {
        OptimizerBudget {
            restarts: self.restarts,
            iters: self.iters,
            tol: self.tol,
            seed: self.seed,
            ..OptimizerBudget::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct FuzzArgs {
    #[arg(long)]
    pub checker: String,
    #[arg(long, default_value_t = 100)]
    pub cases: usize,
    #[arg(long, default_value_t = 2)]
    pub n_min: usize,
    #[arg(long, default_value_t = 6)]
    pub n_max: usize,
    #[arg(long, default_value_t = 1)]
    pub d_min: usize,
    #[arg(long, default_value_t = 2)]
    pub d_max: usize,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long, conflicts_with = "beta")]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Evaluate assistance terms with the roof oracle.
    #[arg(long)]
    pub oracle: bool,
    #[command(flatten)]
    pub budget: BudgetArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MeasureArg {
    Concurrence,
    Negativity,
    Tsallis,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DirectionArg {
    Min,
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StateKind {
    /// Pure `√p |W⟩ + √(1−p) |0…0⟩`.
    Gwv,
    /// Mixture `p |W⟩⟨W| + (1−p) |0…0⟩⟨0…0|`.
    Pcs,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[arg(long, value_enum, default_value_t = StateKind::Gwv)]
    pub kind: StateKind,
    /// Two-group cut; parties not listed are traced out.
    #[arg(long)]
    pub partition: String,
    #[arg(long, value_enum, default_value_t = MeasureArg::Concurrence)]
    pub measure: MeasureArg,
    /// Tsallis parameter, required for `--measure tsallis`.
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long, value_enum, default_value_t = DirectionArg::Min)]
    pub direction: DirectionArg,
    /// Compress each side onto its local support before optimizing.
    #[arg(long)]
    pub compress: bool,
    #[command(flatten)]
    pub budget: BudgetArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long)]
    pub checker: String,
    #[command(flatten)]
    pub state: StateArgs,
    #[arg(long)]
    pub partition: String,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long, conflicts_with = "beta")]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub oracle: bool,
    #[command(flatten)]
    pub budget: BudgetArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// `LO:HI:STEPS` sweep; `STEPS = 1` yields only `LO`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QRange {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl QRange {
    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.lo];
        }
        let span = self.hi - self.lo;
        (0..self.steps).map(|i| self.lo + span * i as f64 / (self.steps - 1) as f64).collect()
    }
}

impl FromStr for QRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, steps] = parts.as_slice() else {
            return Err(format!("expected LO:HI:STEPS, got {s:?}"));
        };
        let lo: f64 = lo.parse().map_err(|_| format!("bad LO in {s:?}"))?;
        let hi: f64 = hi.parse().map_err(|_| format!("bad HI in {s:?}"))?;
        let steps: usize = steps.parse().map_err(|_| format!("bad STEPS in {s:?}"))?;
        if steps == 0 || lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(format!("empty sweep {s:?}"));
        }
        Ok(QRange { lo, hi, steps })
    }
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Lib(Error),
    Io(std::io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `args` (including the program name), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Example(a) => cmd_example_main(&a),
        Command::Fuzz(a) => cmd_fuzz(&a),
        Command::Oracle(a) => cmd_oracle(&a),
        Command::Check(a) => cmd_check(&a),
    };
    match result {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(CliError::Io(e)) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
        Err(CliError::Lib(e)) => {
            eprintln!("error: {e}");
            if e.is_numeric_failure() {
                EXIT_NUMERIC
            } else {
                EXIT_USAGE
            }
        }
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn load_state(args: &StateArgs) -> CliResult<GWSpec> {
    let spec = match (&args.spec, &args.symmetric_w) {
        (Some(path), None) => gwstates::parse_spec(&std::fs::read_to_string(path)?)?,
        (None, Some(nd)) => GWSpec::symmetric_w(nd[0], nd[1])?,
        _ => return Err(CliError::Usage("give exactly one of --spec or --symmetric-w".into())),
    };
    Ok(match args.p {
        Some(p) => spec.with_p(p)?,
        None => spec,
    })
}

fn parse_partition(s: &str) -> CliResult<PartyPartition> {
    Ok(PartyPartition::parse(s)?)
}

/// The four-party worked example with coefficients `(√½, ½, 0.4, 0.3)`.
pub fn example_spec() -> GWSpec {
    let r = |x: f64| vec![C64::new(x, 0.0)];
    GWSpec::new(vec![r(0.5f64.sqrt()), r(0.5), r(0.4), r(0.3)], 1.0).expect("normalized example")
}

/// Which argument `f_q` receives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convention {
    /// `f_q(C)`
    Concurrence,
    /// `f_q(C²)`
    Squared,
}

impl Convention {
    pub const BOTH: [Convention; 2] = [Convention::Concurrence, Convention::Squared];

    pub fn label(self) -> &'static str {
        match self {
            Convention::Concurrence => "C",
            Convention::Squared => "C2",
        }
    }

    fn arg(self, c: f64) -> f64 {
        match self {
            Convention::Concurrence => c,
            Convention::Squared => c * c,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainValues {
    pub t12: f64,
    pub t13: f64,
    /// `√(T₁₂² + T₁₃²)`
    pub blue: f64,
    /// `T_q(ρ_{A1|A2A3})`
    pub mid: f64,
    /// `T₁₂ + T₁₃`
    pub red: f64,
}

impl ChainValues {
    pub fn chain_holds(&self) -> bool {
        self.blue <= self.mid + CHAIN_TOL && self.mid <= self.red + CHAIN_TOL
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExampleRow {
    pub q: f64,
    /// Indexed like [`Convention::BOTH`].
    pub values: [ChainValues; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExampleTable {
    pub rows: Vec<ExampleRow>,
}

impl ExampleTable {
    pub fn csv(&self) -> String {
        let mut out = String::from("q");
        for conv in Convention::BOTH {
            for col in ["t12", "t13", "blue", "mid", "red", "chain"] {
                let _ = write!(out, ",{}_{col}", conv.label());
            }
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(&format_float(row.q));
            for v in &row.values {
                for x in [v.t12, v.t13, v.blue, v.mid, v.red] {
                    let _ = write!(out, ",{}", format_float(x));
                }
                let _ = write!(out, ",{}", v.chain_holds());
            }
            out.push('\n');
        }
        out
    }

    /// Conventions whose chain holds on every row.
    pub fn satisfying(&self) -> Vec<Convention> {
        Convention::BOTH
            .into_iter()
            .enumerate()
            .filter(|(i, _)| self.rows.iter().all(|r| r.values[*i].chain_holds()))
            .map(|(_, c)| c)
            .collect()
    }

    pub fn summary(&self) -> String {
        let parts: Vec<String> = Convention::BOTH
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let ok = self.rows.iter().filter(|r| r.values[i].chain_holds()).count();
                format!("convention={} chain_rows={}/{}", c.label(), ok, self.rows.len())
            })
            .collect();
        parts.join(" ")
    }
}

fn cross_checked(closed: f64, numeric: f64, what: &str) -> crate::Result<f64> {
    if (closed - numeric).abs() > EXAMPLE_XCHECK_TOL {
        return Err(Error::NumericMismatch(format!("{what}: closed form {closed}, Wootters route {numeric}")));
    }
    Ok(numeric)
}

/// The worked example's `blue ≤ mid ≤ red` chain over a sweep of `q` within [3, 4].
pub fn cmd_example(range: &QRange) -> crate::Result<ExampleTable> {
    if range.lo < 3.0 || range.hi > 4.0 {
        return Err(Error::InvalidParameter(format!("q range [{}, {}] must lie within [3, 4]", range.lo, range.hi)));
    }
    let spec = example_spec();
    let pair = |g1: &[usize], g2: &[usize], what: &str| -> crate::Result<f64> {
        cross_checked(
            gwstates::group_pair_concurrence(&spec, g1, g2)?,
            gwstates::group_pair_concurrence_numeric(&spec, g1, g2)?,
            what,
        )
    };
    let c12 = pair(&[0], &[1], "C(A1A2)")?;
    let c13 = pair(&[0], &[2], "C(A1A3)")?;
    let c1_23 = pair(&[0], &[1, 2], "C(A1|A2A3)")?;
    let rows = range
        .values()
        .into_iter()
        .map(|q| {
            let params = TsallisParams::new(q)?;
            let mut values = [ChainValues { t12: 0.0, t13: 0.0, blue: 0.0, mid: 0.0, red: 0.0 }; 2];
            for (slot, conv) in values.iter_mut().zip(Convention::BOTH) {
                let f = |c: f64| f_q(conv.arg(c).min(1.0), params);
                let (t12, t13, mid) = (f(c12)?, f(c13)?, f(c1_23)?);
                *slot = ChainValues { t12, t13, blue: t12.hypot(t13), mid, red: t12 + t13 };
            }
            Ok(ExampleRow { q, values })
        })
        .collect::<crate::Result<Vec<_>>>()?;
    Ok(ExampleTable { rows })
}

fn cmd_example_main(args: &ExampleArgs) -> CliResult<i32> {
    let table = cmd_example(&args.q_range)?;
    emit(&args.out, &table.csv())?;
    let satisfying: Vec<&str> = table.satisfying().iter().map(|c| c.label()).collect();
    eprintln!("{} satisfying={}", table.summary(), satisfying.join("+"));
    Ok(if satisfying.is_empty() { EXIT_VIOLATION } else { EXIT_OK })
}

fn cmd_fuzz(args: &FuzzArgs) -> CliResult<i32> {
    let checker: Checker = args.checker.parse()?;
    let cfg = FuzzConfig {
        checker,
        cases: args.cases,
        seed: args.budget.seed,
        n_min: args.n_min,
        n_max: args.n_max,
        d_min: args.d_min,
        d_max: args.d_max,
        q: args.q,
        param: args.alpha.or(args.beta),
        oracle: args.oracle.then(|| args.budget.budget()),
    };
    let outcome = inequalities::run_fuzz(&cfg)?;
    emit(&args.out, &outcome.csv())?;
    eprintln!("{}", outcome.summary());
    Ok(if outcome.violations() == 0 { EXIT_OK } else { EXIT_VIOLATION })
}

fn cmd_oracle(args: &OracleArgs) -> CliResult<i32> {
    let spec = load_state(&args.state)?;
    let partition = parse_partition(&args.partition)?;
    if partition.len() != 2 {
        return Err(CliError::Usage(format!("--partition {partition} must have two groups")));
    }
    partition.check_range(spec.n())?;
    let measure = match (args.measure, args.q) {
        (MeasureArg::Concurrence, _) => PureMeasure::Concurrence,
        (MeasureArg::Negativity, _) => PureMeasure::Negativity,
        (MeasureArg::Tsallis, Some(q)) => PureMeasure::Tsallis(TsallisParams::new(q)?),
        (MeasureArg::Tsallis, None) => return Err(CliError::Usage("--measure tsallis needs --q".into())),
    };
    let kept = partition.parties();
    let reduced = match args.kind {
        StateKind::Gwv => gwstates::build_gwv(&spec).reduced(&kept)?,
        StateKind::Pcs => gwstates::build_pcs_mixture(&spec).partial_trace(&kept)?,
    };
    let position = |p: &usize| kept.iter().position(|k| k == p).expect("kept party");
    let local = PartyPartition::new(partition.groups().iter().map(|g| g.iter().map(position).collect()).collect())?;
    let mut rho = reduced.coarse_grain(&local)?;
    if args.compress {
        rho = measures::compress_local_supports(&rho)?;
    }
    let direction = match args.direction {
        DirectionArg::Min => Direction::Min,
        DirectionArg::Max => Direction::Max,
    };
    let res = convexroof::roof_optimize(&rho, &PartyPartition::singletons(2), measure, direction, &args.budget.budget())?;
    let line = format!(
        "measure={} direction={} value={} restarts={} converged={}\n",
        measure.label(),
        if direction == Direction::Min { "min" } else { "max" },
        format_float(res.value),
        res.restarts_used,
        res.converged
    );
    emit(&args.out, &line)?;
    Ok(EXIT_OK)
}

fn cmd_check(args: &CheckArgs) -> CliResult<i32> {
    let checker: Checker = args.checker.parse()?;
    let spec = load_state(&args.state)?;
    let part = parse_partition(&args.partition)?;
    let q = |default: Option<f64>| -> CliResult<TsallisParams> {
        let q = args.q.or(default).ok_or_else(|| CliError::Usage(format!("{} needs --q", checker.name())))?;
        Ok(TsallisParams::new(q)?)
    };
    let param = |name: &str| -> CliResult<f64> {
        args.alpha.or(args.beta).ok_or_else(|| CliError::Usage(format!("{} needs --{name}", checker.name())))
    };
    let method =
        if args.oracle { AssistMethod::Oracle(args.budget.budget()) } else { AssistMethod::Analytic };
    let reports: Vec<InequalityReport> = match checker {
        Checker::MonogamySquared => vec![inequalities::check_monogamy_squared(&spec, &part, q(None)?, param("alpha")?)?],
        Checker::PolygamyTq => vec![inequalities::check_polygamy_tq(&spec, &part, q(None)?, param("beta")?)?],
        Checker::Subadditivity => {
            let rho = gwstates::build_pcs_mixture(&spec);
            inequalities::check_subadditivity(&rho, &part, q(None)?)?.to_vec()
        }
        Checker::GeneralizedMonogamy => {
            let q = q(None)?.q();
            if q != 2.0 && q != 3.0 {
                return Err(CliError::Usage(format!("generalized-monogamy needs --q 2 or 3, got {q}")));
            }
            inequalities::check_generalized_monogamy(&spec, &part, q as u32)?.to_vec()
        }
        Checker::Tripartite => vec![inequalities::check_tripartite_corollary(&spec, &part, q(None)?)?],
        Checker::PairVsRest => vec![inequalities::check_pair_vs_rest_corollary(&spec, &part, q(None)?)?],
        Checker::PolygamyAssist => vec![inequalities::check_polygamy_assist(&spec, &part, q(Some(2.0))?, method)?],
        Checker::HammingPolygamy => vec![inequalities::check_hamming_polygamy(&spec, &part, param("beta")?, method)?.0],
        Checker::ConditionalPolygamy => {
            vec![inequalities::check_conditional_tighter_polygamy(&spec, &part, param("beta")?, method)?.0]
        }
        Checker::ScalarLower | Checker::ScalarUpper => {
            return Err(CliError::Usage(format!("{} takes no state; use `fuzz`", checker.name())))
        }
    };
    let mut out = format!("{CSV_HEADER}\n");
    for r in &reports {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    emit(&args.out, &out)?;
    Ok(if reports.iter().all(|r| r.holds()) { EXIT_OK } else { EXIT_VIOLATION })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_range_parsing() {
        let r: QRange = "3:4:101".parse().unwrap();
        let v = r.values();
        assert_eq!(v.len(), 101);
        assert_eq!(v[0], 3.0);
        assert_eq!(v[100], 4.0);
        assert_eq!("3:4:1".parse::<QRange>().unwrap().values(), vec![3.0]);
        assert!("3:4".parse::<QRange>().is_err());
        assert!("4:3:5".parse::<QRange>().is_err());
        assert!("3:4:0".parse::<QRange>().is_err());
    }

    #[test]
    fn example_q3_row() {
        let table = cmd_example(&"3:4:1".parse().unwrap()).unwrap();
        let sq = table.rows[0].values[1];
        assert!((sq.t12 - 0.1875).abs() < 1e-12);
        assert!((sq.t13 - 0.12).abs() < 1e-12);
        assert!((sq.mid - 0.3075).abs() < 1e-12);
        assert!((sq.red - 0.3075).abs() < 1e-12);
        assert!((sq.blue - 0.22262).abs() < 1e-5);
        let c = table.rows[0].values[0];
        // f_3 is linear, so the C convention gives 3C/8 for ρ_{A1A2}
        assert!((c.t12 - 3.0 * 0.5f64.sqrt() / 8.0).abs() < 1e-12);
    }

    #[test]
    fn example_range_is_validated() {
        assert!(cmd_example(&"2:4:3".parse().unwrap()).is_err());
        assert!(cmd_example(&"3:4.5:3".parse().unwrap()).is_err());
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run(["gwmono", "bogus"]), EXIT_USAGE);
        assert_eq!(run(["gwmono", "fuzz", "--checker", "nope", "--cases", "0"]), EXIT_USAGE);
        assert_eq!(run(["gwmono", "example", "--q-range", "1:2:3"]), EXIT_USAGE);
    }
}
