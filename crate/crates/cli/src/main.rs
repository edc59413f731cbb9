//! `trace-kit`: Hecke traces, class numbers and verification reports.
//!
//! Exit codes: 0 on success, 1 when a verification fails, 2 on a usage error.

mod commands;
mod output;

use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};
use trace_kit::TraceError;

use output::Format;

#[derive(Parser, Debug)]
#[command(
    name = "trace-kit",
    version,
    about = "Exact traces of Hecke operators on modular forms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Traces of T_n (optionally composed with an Atkin–Lehner involution).
    Trace(TraceArgs),
    /// Extended Hurwitz (H) or primitive (h0) class numbers.
    Classnum(ClassnumArgs),
    /// Verification reports.
    #[command(subcommand)]
    Verify(VerifyCommand),
}

/// An inclusive range `A` or `A:B`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Span {
    pub start: i64,
    pub end: i64,
}

impl Span {
    pub fn is_single(&self) -> bool {
        self.start == self.end
    }

    /// The values as positive integers.
    pub fn positive(&self, name: &str) -> Result<Vec<u64>> {
        if self.start < 1 {
            return Err(usage(format!("--{name} must be positive")));
        }
        Ok((self.start..=self.end).map(|x| x as u64).collect())
    }
}

fn parse_span(s: &str) -> std::result::Result<Span, String> {
    let parse = |t: &str| {
        t.trim()
            .parse::<i64>()
            .map_err(|_| format!("`{t}` is not an integer"))
    };
    // A leading minus sign belongs to the first bound, not the separator.
    let (start, end) = match s[1.min(s.len())..].find(':') {
        Some(i) => {
            let i = i + 1.min(s.len());
            (parse(&s[..i])?, parse(&s[i + 1..])?)
        }
        None => {
            let x = parse(s)?;
            (x, x)
        }
    };
    if start > end {
        return Err(format!("empty range {start}:{end}"));
    }
    Ok(Span { start, end })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Space {
    /// S_k(N, χ).
    Cusp,
    /// M_k(N, χ) + S_k(N, χ), the space seen by period polynomials.
    Full,
}

impl Space {
    pub fn name(self) -> &'static str {
        match self {
            Space::Cusp => "cusp",
            Space::Full => "full",
        }
    }
}

#[derive(Args, Debug)]
pub struct TraceArgs {
    /// Level N.
    #[arg(long)]
    pub level: u64,
    /// Weight k ≥ 2.
    #[arg(long)]
    pub weight: u32,
    /// Character label `N.i` (default: trivial).
    #[arg(long = "char")]
    pub character: Option<String>,
    /// Compose with the Atkin–Lehner involution W_ℓ, ℓ ∥ N.
    #[arg(long)]
    pub ell: Option<u64>,
    /// Index n or range A:B.
    #[arg(long, value_parser = parse_span)]
    pub n: Span,
    #[arg(long, value_enum, default_value = "cusp")]
    pub space: Space,
    #[arg(long, value_enum, default_value = "table")]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    #[value(name = "H")]
    H,
    #[value(name = "h0")]
    H0,
}

#[derive(Args, Debug)]
pub struct ClassnumArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    /// Discriminant D or range A:B.
    #[arg(long, value_parser = parse_span, allow_hyphen_values = true)]
    pub d: Span,
    #[arg(long, value_enum, default_value = "table")]
    pub format: Format,
    /// CSV cache `kind,D,num,den`, read if present and rewritten afterwards.
    #[arg(long)]
    pub cache_file: Option<std::path::PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum VerifyCommand {
    /// Properties A, B, C of the universal Hecke operator.
    Heckeop {
        #[arg(long, value_parser = parse_span)]
        n: Span,
        /// Write the operator's terms as JSON (single n only).
        #[arg(long)]
        dump_operator: Option<std::path::PathBuf>,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Closed-form traces against the period-polynomial oracle.
    Oracle {
        #[arg(long)]
        level: u64,
        #[arg(long)]
        weight: u32,
        #[arg(long = "char")]
        character: Option<String>,
        #[arg(long)]
        ell: Option<u64>,
        #[arg(long, value_parser = parse_span)]
        n: Span,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// The ten-part acceptance battery.
    Suite {
        /// Reduced ranges.
        #[arg(long)]
        quick: bool,
    },
}

/// A malformed request, reported with exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn is_usage(err: &anyhow::Error) -> bool {
    err.chain().any(|e| {
        e.downcast_ref::<UsageError>().is_some()
            || matches!(
                e.downcast_ref::<TraceError>(),
                Some(TraceError::InvalidInput(_))
            )
    })
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("TRACE_KIT_THREADS") else {
        return Ok(());
    };
    match raw.trim().parse::<usize>() {
        Ok(t) if t > 0 => {
            trace_kit::par::configure_threads(t);
            Ok(())
        }
        _ => Err(usage(format!(
            "TRACE_KIT_THREADS must be a positive integer, got `{raw}`"
        ))),
    }
}

fn run(cli: Cli) -> Result<bool> {
    configure_threads()?;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Trace(args) => commands::trace(&args, &mut out),
        Command::Classnum(args) => commands::classnum(&args, &mut out),
        Command::Verify(cmd) => commands::verify(&cmd, &mut out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(if is_usage(&err) { 2 } else { 1 })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spans() {
        assert_eq!(parse_span("5"), Ok(Span { start: 5, end: 5 }));
        assert_eq!(parse_span("1:20"), Ok(Span { start: 1, end: 20 }));
        assert_eq!(parse_span("-8:-3"), Ok(Span { start: -8, end: -3 }));
        assert_eq!(parse_span("-4"), Ok(Span { start: -4, end: -4 }));
        assert!(parse_span("5:1").is_err());
        assert!(parse_span("a:b").is_err());
        assert!(parse_span("").is_err());
    }

    #[test]
    fn cli_shape() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
