use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use nonminimal::{Backend, Sign};

#[derive(Debug, Parser)]
#[command(
    name = "nonminimal",
    version,
    about = "Formal series checks for nonminimal hypersurfaces and their ODEs"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Degree N of formal solutions and gauge maps.
    #[arg(long, global = true)]
    pub degree: Option<i64>,
    /// Rectangle Nx,Nη for Segre families and hypersurfaces.
    #[arg(long, global = true, value_parser = pair::<usize>)]
    pub rect: Option<(usize, usize)>,
    /// Coefficient backend.
    #[arg(long, global = true, value_parser = Backend::from_str)]
    pub backend: Option<Backend>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for family members.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

/// One ODE: a family member or explicit real data.
#[derive(Debug, Args, Clone)]
pub struct MemberArgs {
    /// Family member `m,beta`, e.g. `2,1` or `3,-1/2`.
    #[arg(long, conflicts_with_all = ["m", "a", "b"])]
    pub family: Option<String>,
    /// Nonminimality order for explicit data.
    #[arg(long, requires_all = ["a", "b"])]
    pub m: Option<i64>,
    /// Polynomial a(w) as a sum of `RAT*w^INT` terms.
    #[arg(long, requires = "m")]
    pub a: Option<String>,
    /// Polynomial b(w) as a sum of `RAT*w^INT` terms.
    #[arg(long, requires = "m")]
    pub b: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the admissible ODE of a family member or of explicit (a, b).
    BuildOde(MemberArgs),
    /// Solve for the Segre family and the hypersurface.
    Segre {
        #[command(flatten)]
        member: MemberArgs,
        #[arg(long, default_value = "+", value_parser = sign)]
        sign: Sign,
        /// Also print the dual family.
        #[arg(long)]
        dual: bool,
        /// Also print the real normal form.
        #[arg(long)]
        normal_form: bool,
    },
    /// Run the identity checks (roundtrip, reality, realty, selfmap).
    Check {
        #[command(flatten)]
        member: MemberArgs,
        #[arg(long, value_delimiter = ',', default_value = "roundtrip,reality,realty")]
        checks: Vec<String>,
        #[arg(long)]
        probe_degree: Option<i64>,
    },
    /// Formal solutions, the gauge map (χ, τ), the coupled map and the
    /// self-map probe for a family member.
    Equiv {
        #[arg(long)]
        family: String,
        #[arg(long)]
        probe_degree: Option<i64>,
    },
    /// Exact monodromy prediction, optionally checked by contour integration.
    Monodromy {
        #[arg(long)]
        family: String,
        #[arg(long)]
        numeric: bool,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// The transported field L = A z∂z + B ∂w and its checks.
    Autovec {
        #[arg(long)]
        family: String,
        #[arg(long, value_delimiter = ',', default_value = "tangency,lambda")]
        check: Vec<String>,
    },
    /// Gevrey fit and termination test of a series.
    Growth {
        /// A JSON series file, or `f:m,beta`, `u:m,beta`, `B:m,beta` for the
        /// formal solutions of `E^m_β` or the ∂w coefficient of L.
        #[arg(long)]
        series: String,
        #[arg(long, value_parser = pair::<i64>, default_value = "32,180")]
        window: (i64, i64),
    },
    /// Run the full pipeline on one or more members.
    Run {
        /// JSON or TOML config file; flags override its fields.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Family member `m,beta`; repeatable.
        #[arg(long)]
        family: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        checks: Option<Vec<String>>,
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, value_parser = pair::<i64>)]
        window: Option<(i64, i64)>,
        #[arg(long)]
        growth_degree: Option<i64>,
        #[arg(long)]
        probe_degree: Option<i64>,
    },
}

fn pair<T: FromStr>(s: &str) -> Result<(T, T), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected `a,b`, got `{s}`"))?;
    let parse = |t: &str| t.trim().parse::<T>().map_err(|_| format!("invalid number `{t}`"));
    Ok((parse(a)?, parse(b)?))
}

fn sign(s: &str) -> Result<Sign, String> {
    match s {
        "+" | "positive" => Ok(Sign::Positive),
        "-" | "negative" => Ok(Sign::Negative),
        _ => Err(format!("sign must be + or -, got `{s}`")),
    }
}
