use clap::{Args, Parser, Subcommand, ValueEnum};
use fejer_core::apnum::{DEFAULT_PRECISION, MIN_PRECISION};
use fejer_core::knots::KnotFamily;
use fejer_core::ratpoly::{parse_rational, ExactRational};

/// Environment variable that overrides the default `--precision-bits`.
pub const PRECISION_ENV: &str = "FEJER_PRECISION_BITS";

#[derive(Debug, Parser)]
#[command(name = "fejer", version, about = "Hermite-Fejér derivative-sum and cosecant-sum verifier")]
pub struct Cli {
    /// Binary precision of every numeric computation.
    #[arg(long, global = true, env = PRECISION_ENV, default_value_t = DEFAULT_PRECISION, value_parser = parse_precision)]
    pub precision_bits: u32,

    #[arg(long, global = true, value_enum, default_value_t = OutputMode::Json)]
    pub output: OutputMode,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputMode {
    Json,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print a knot set.
    Knots(KnotsArgs),
    /// Check that the p-th derivatives of the fundamental polynomials sum to zero.
    VerifyEq1(VerifyEq1Args),
    /// Check 2 Σ 1/sin²(kπ/n) = (n²-1)/3 exactly for odd n.
    VerifyIdentity(VerifyIdentityArgs),
    /// Exact Σ 1/sin^{2m}(kπ/n) for odd n.
    PowerSum(PowerSumArgs),
    /// Fit power-sum formulas in n, or explore rational aggregates at other knots.
    Conjecture(ConjectureArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyName {
    Chebyshev1,
    Chebyshev2,
    Equispaced,
    #[value(name = "gauss_jacobi", alias = "gauss-jacobi")]
    GaussJacobi,
}

#[derive(Debug, Args)]
pub struct FamilyArgs {
    #[arg(long, value_enum)]
    pub family: FamilyName,
    /// Jacobi α.
    #[arg(long, default_value = "0", allow_hyphen_values = true, value_parser = parse_exact)]
    pub alpha: ExactRational,
    /// Jacobi β.
    #[arg(long, default_value = "0", allow_hyphen_values = true, value_parser = parse_exact)]
    pub beta: ExactRational,
    /// Interval `a,b` for equispaced knots.
    #[arg(long, default_value = "-1,1", allow_hyphen_values = true, value_parser = parse_interval)]
    pub interval: (ExactRational, ExactRational),
}

impl FamilyArgs {
    pub fn family(&self) -> KnotFamily {
        match self.family {
            FamilyName::Chebyshev1 => KnotFamily::Chebyshev1,
            FamilyName::Chebyshev2 => KnotFamily::Chebyshev2,
            FamilyName::Equispaced => {
                KnotFamily::Equispaced { a: self.interval.0.clone(), b: self.interval.1.clone() }
            }
            FamilyName::GaussJacobi => {
                KnotFamily::GaussJacobi { alpha: self.alpha.clone(), beta: self.beta.clone() }
            }
        }
    }
}

#[derive(Debug, Args)]
pub struct KnotsArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, value_parser = clap::value_parser!(usize))]
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConstructionName {
    General,
    ClosedForm,
}

#[derive(Debug, Args)]
pub struct VerifyEq1Args {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Single knot count.
    #[arg(long, conflicts_with_all = ["n_max", "n_min"], required_unless_present = "n_max")]
    pub n: Option<usize>,
    /// Sweep knot counts n_min..=n_max.
    #[arg(long)]
    pub n_max: Option<usize>,
    #[arg(long, requires = "n_max")]
    pub n_min: Option<usize>,
    /// Single derivative order.
    #[arg(long, conflicts_with = "p_max", required_unless_present = "p_max")]
    pub p: Option<usize>,
    /// All orders 1..=p_max.
    #[arg(long)]
    pub p_max: Option<usize>,
    /// Comma-separated evaluation points (rationals or decimals).
    #[arg(long, default_value = "0", allow_hyphen_values = true, value_delimiter = ',', value_parser = parse_exact)]
    pub y0: Vec<ExactRational>,
    #[arg(long, value_enum, default_value_t = ConstructionName::General)]
    pub construction: ConstructionName,
    /// Include the individual terms in each record.
    #[arg(long)]
    pub terms: bool,
}

#[derive(Debug, Args)]
pub struct VerifyIdentityArgs {
    #[arg(long, conflicts_with = "n_max", required_unless_present = "n_max")]
    pub n: Option<usize>,
    /// Every odd n from 3 to n_max.
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Include the characteristic polynomial of the squared sines.
    #[arg(long)]
    pub witness: bool,
}

#[derive(Debug, Args)]
pub struct PowerSumArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, conflicts_with = "m_max", required_unless_present = "m_max")]
    pub m: Option<usize>,
    /// All powers 1..=m_max.
    #[arg(long)]
    pub m_max: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ConjectureArgs {
    /// Power index for a formula fit.
    #[arg(long, requires_all = ["train", "holdout"], conflicts_with = "family")]
    pub m: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub train: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    pub holdout: Vec<usize>,

    /// Knot family for an exploration run.
    #[arg(long, value_enum, requires_all = ["p", "n"], required_unless_present = "m")]
    pub family: Option<FamilyName>,
    #[arg(long, default_value = "0", allow_hyphen_values = true, value_parser = parse_exact)]
    pub alpha: ExactRational,
    #[arg(long, default_value = "0", allow_hyphen_values = true, value_parser = parse_exact)]
    pub beta: ExactRational,
    #[arg(long, default_value = "-1,1", allow_hyphen_values = true, value_parser = parse_interval)]
    pub interval: (ExactRational, ExactRational),
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long, default_value = "0", allow_hyphen_values = true, value_parser = parse_exact)]
    pub y0: ExactRational,
    /// Knot counts to explore.
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = 1_000_000)]
    pub max_denominator: u64,
}

impl ConjectureArgs {
    pub fn family_args(&self) -> Option<FamilyArgs> {
        self.family.map(|family| FamilyArgs {
            family,
            alpha: self.alpha.clone(),
            beta: self.beta.clone(),
            interval: self.interval.clone(),
        })
    }
}

fn parse_precision(text: &str) -> Result<u32, String> {
    let bits: u32 = text.trim().parse().map_err(|e| format!("{e}"))?;
    if bits < MIN_PRECISION {
        return Err(format!("precision must be at least {MIN_PRECISION} bits"));
    }
    Ok(bits)
}

fn parse_exact(text: &str) -> Result<ExactRational, String> {
    parse_rational(text).ok_or_else(|| format!("not a rational number: {text:?}"))
}

fn parse_interval(text: &str) -> Result<(ExactRational, ExactRational), String> {
    let (a, b) = text.split_once(',').ok_or("expected a,b")?;
    Ok((parse_exact(a)?, parse_exact(b)?))
}
