use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pmprivacy::{Aggregation, BkType, Strategy, DEFAULT_CANDIDATE_CAP};

#[derive(Debug, Parser)]
#[command(name = "pmprivacy", version, about = "Disclosure risk and data utility of event logs")]
pub struct Cli {
    /// Output mode: JSON report (full precision) or a table (3 decimals).
    #[arg(long, value_enum, default_value_t = Output::Json, global = true)]
    pub output: Output,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Output {
    Json,
    Table,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// General statistics of a log.
    Stats {
        log: PathBuf,
        #[command(flatten)]
        input: InputArgs,
    },
    /// Case and trace disclosure over a grid of background-knowledge types and sizes.
    Risk {
        log: PathBuf,
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Data utility of an anonymized log with respect to its original.
    Utility {
        original: PathBuf,
        anonymized: PathBuf,
        #[command(flatten)]
        input: InputArgs,
        /// Write the optimal reallocation as CSV.
        #[arg(long)]
        plan_out: Option<PathBuf>,
        /// Perturb one source mass before solving (exercises the solver's input checks).
        #[arg(long, hide = true)]
        debug_unbalance: bool,
    },
    /// Anonymize at several k and report risk and utility for each.
    Sweep {
        log: PathBuf,
        #[command(flatten)]
        input: InputArgs,
        /// Comma-separated k values.
        #[arg(long, value_delimiter = ',', required = true)]
        k_values: Vec<u64>,
        #[arg(long, default_value = "suppress", value_parser = parse_strategy)]
        strategy: Strategy,
        #[command(flatten)]
        grid: GridArgs,
    },
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Input format; inferred from the file extension when omitted.
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    #[arg(long, default_value = "case:concept:name")]
    pub case_col: String,
    #[arg(long, default_value = "concept:name")]
    pub activity_col: String,
    #[arg(long, default_value = "time:timestamp")]
    pub time_col: String,
    /// strftime pattern for CSV timestamps; ISO-8601 when omitted.
    #[arg(long)]
    pub time_format: Option<String>,
    /// Fail on the first rejected record instead of skipping it.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Xes,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// Background-knowledge types: set, mult, seq or all.
    #[arg(long, default_value = "all", value_parser = parse_types)]
    pub types: TypeList,
    /// Sizes as `1-6`, `3` or `1,2,5`.
    #[arg(long, default_value = "1-6", value_parser = parse_sizes)]
    pub sizes: SizeList,
    #[arg(long, default_value = "average", value_parser = parse_aggregation)]
    pub aggregation: Aggregation,
    /// Candidate cap per (type, size) cell.
    #[arg(long, env = "PMPRIVACY_CAP", default_value_t = DEFAULT_CANDIDATE_CAP)]
    pub cap: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeList(pub Vec<BkType>);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeList(pub Vec<usize>);

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    s.parse().map_err(|e: pmprivacy::Error| e.to_string())
}

fn parse_aggregation(s: &str) -> Result<Aggregation, String> {
    s.parse().map_err(|e: pmprivacy::Error| e.to_string())
}

fn parse_types(s: &str) -> Result<TypeList, String> {
    if s.trim().eq_ignore_ascii_case("all") {
        return Ok(TypeList(BkType::ALL.to_vec()));
    }
    let mut types = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let t: BkType = part.parse().map_err(|e: pmprivacy::Error| e.to_string())?;
        if !types.contains(&t) {
            types.push(t);
        }
    }
    if types.is_empty() {
        return Err("no background-knowledge type given".into());
    }
    types.sort();
    Ok(TypeList(types))
}

fn parse_sizes(s: &str) -> Result<SizeList, String> {
    let number = |p: &str| {
        p.trim()
            .parse::<usize>()
            .map_err(|_| format!("invalid size '{}'", p.trim()))
    };
    let mut sizes = Vec::new();
    for part in s.split(',').filter(|p| !p.trim().is_empty()) {
        match part.split_once('-') {
            Some((lo, hi)) => {
                let (lo, hi) = (number(lo)?, number(hi)?);
                if lo > hi {
                    return Err(format!("empty size range {lo}-{hi}"));
                }
                sizes.extend(lo..=hi);
            }
            None => sizes.push(number(part)?),
        }
    }
    if sizes.is_empty() {
        return Err("empty size range".into());
    }
    if sizes.contains(&0) {
        return Err("sizes start at 1".into());
    }
    sizes.sort_unstable();
    sizes.dedup();
    Ok(SizeList(sizes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_ranges() {
        assert_eq!(parse_sizes("1-3").unwrap().0, vec![1, 2, 3]);
        assert_eq!(parse_sizes("5,2,2").unwrap().0, vec![2, 5]);
        assert_eq!(parse_sizes("1-2,6").unwrap().0, vec![1, 2, 6]);
        assert!(parse_sizes("3-1").is_err());
        assert!(parse_sizes("").is_err());
        assert!(parse_sizes("0-2").is_err());
        assert!(parse_sizes("x").is_err());
    }

    #[test]
    fn type_lists() {
        assert_eq!(parse_types("all").unwrap().0, BkType::ALL.to_vec());
        assert_eq!(parse_types("seq,set").unwrap().0, vec![BkType::Set, BkType::Sequence]);
        assert!(parse_types("bag").is_err());
    }

    #[test]
    fn parses_a_full_command_line() {
        let cli = Cli::try_parse_from([
            "pmprivacy", "risk", "log.csv", "--types", "set", "--sizes", "1", "--aggregation", "worst", "--output", "table",
        ])
        .unwrap();
        assert_eq!(cli.output, Output::Table);
        match cli.command {
            Command::Risk { grid, .. } => {
                assert_eq!(grid.types.0, vec![BkType::Set]);
                assert_eq!(grid.aggregation, Aggregation::Worst);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
