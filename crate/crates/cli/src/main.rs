use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sphere_l4::beams::OrthoMethod;
use sphere_l4::experiments::ScalingFamily;
use sphere_l4::report::{OutputFormat, Report};
use sphere_l4::runner::{self, doubling_range};
use sphere_l4::Error;

/// Lᵖ norms of spherical harmonics: experiments and exact checks.
///
/// Exit status: 0 when every gate passes, 1 when a gate fails, 2 on a usage
/// error.
#[derive(Debug, Parser)]
#[command(name = "sphl4", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Output {
    /// Write the table here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json.
    #[arg(long, default_value = "csv", value_parser = parse_format)]
    format: OutputFormat,
}

/// Degrees given explicitly (`--k 8,16,32`) or as a range.
#[derive(Debug, Args)]
struct Degrees {
    /// Comma-separated degrees; overrides the range.
    #[arg(long = "k", value_delimiter = ',')]
    ks: Vec<usize>,
    #[arg(long)]
    k_min: Option<usize>,
    #[arg(long)]
    k_max: Option<usize>,
}

impl Degrees {
    /// Explicit list, else `k_min..=k_max` by doubling.
    fn doubling(&self, default: (usize, usize)) -> sphere_l4::Result<Vec<usize>> {
        if !self.ks.is_empty() {
            return Ok(self.ks.clone());
        }
        doubling_range(
            self.k_min.unwrap_or(default.0),
            self.k_max.unwrap_or(default.1),
        )
    }

    /// Explicit list, else every degree in `k_min..=k_max`.
    fn consecutive(&self, default: (usize, usize)) -> sphere_l4::Result<Vec<usize>> {
        if !self.ks.is_empty() {
            return Ok(self.ks.clone());
        }
        let (lo, hi) = (
            self.k_min.unwrap_or(default.0),
            self.k_max.unwrap_or(default.1),
        );
        if lo == 0 || hi < lo {
            return Err(Error::InvalidArgument {
                what: "k-range",
                detail: format!("need 1 <= k-min <= k-max, got {lo}..{hi}"),
            });
        }
        Ok((lo..=hi).collect())
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Lᵖ norms of one field, p ∈ {2, 4, q…, ∞}.
    Norms {
        /// standard, zonal, highest_weight or beam.
        #[arg(long, default_value = "highest_weight")]
        field: String,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        m: i64,
        /// Beam axis `x,y,z` (normalized).
        #[arg(
            long,
            value_delimiter = ',',
            num_args = 3,
            allow_negative_numbers = true
        )]
        axis: Option<Vec<f64>>,
        /// Extra exponents, comma separated; `inf` allowed.
        #[arg(long, value_delimiter = ',', value_parser = parse_q)]
        q: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        oversample: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Averaged L⁴ norms of the standard basis against log k.
    AvgL4 {
        #[command(flatten)]
        degrees: Degrees,
        #[arg(long, default_value_t = 1.0)]
        oversample: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Power-law fit of ‖Z_k‖_q or ‖Q_k‖_q in k.
    Scaling {
        /// zonal or highest_weight.
        #[arg(long, default_value = "highest_weight", value_parser = parse_family)]
        family: ScalingFamily,
        #[arg(long, default_value = "4", value_parser = parse_q)]
        q: f64,
        #[command(flatten)]
        degrees: Degrees,
        #[arg(long, default_value_t = 1.0)]
        oversample: f64,
        /// Accepted distance of the slope from the prediction.
        #[arg(long, default_value_t = 0.02)]
        tolerance: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Pointwise ℓ⁴ sums against the envelope in the polar distance.
    Pointwise {
        #[command(flatten)]
        degrees: Degrees,
        /// Minimum number of colatitudes per degree.
        #[arg(long, default_value_t = 2048)]
        n_colat: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Λ⁴_k over Haar-random orthonormal bases, plus entry moments.
    RandomOnb {
        #[arg(long, default_value_t = 32)]
        k: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        oversample: f64,
        /// Samples for the entry-moment check (0 to skip; needs k >= 8).
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Separated beam families, orthonormalized.
    Beams {
        #[arg(long, default_value_t = 64)]
        k: usize,
        /// Count exponents e, J = floor(k^(1-e)).
        #[arg(long, value_delimiter = ',', default_value = "0.25,0.5")]
        exponents: Vec<f64>,
        /// Minimum angles between circles, radians.
        #[arg(long, value_delimiter = ',', default_value = "0.2,0.4,0.8")]
        separations: Vec<f64>,
        /// symmetric or sequential.
        #[arg(long, default_value = "symmetric", value_parser = parse_method)]
        method: OrthoMethod,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        oversample: f64,
        #[command(flatten)]
        output: Output,
    },
    /// L⁴ norms against sampled arc-tube masses for every (k, m).
    TubeRatio {
        #[command(flatten)]
        degrees: Degrees,
        #[arg(long, default_value_t = 1.0)]
        oversample: f64,
        /// Degrees for the equatorial concentration check of Q_k and Z_k.
        #[arg(long, value_delimiter = ',')]
        concentration_k: Vec<usize>,
        #[arg(long, default_value_t = 4.0)]
        concentration_oversample: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Areas of ℓ⁴ superlevel sets at C·λ^(1/2).
    Superlevel {
        #[command(flatten)]
        degrees: Degrees,
        #[arg(long = "c", value_delimiter = ',', default_value = "0.2,0.3,0.5,1")]
        cs: Vec<f64>,
        #[arg(long, default_value_t = 4.0)]
        oversample: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Exact identities of the standard basis and degree-one closed forms.
    Verify {
        #[arg(long, default_value_t = 64)]
        k_max: usize,
        #[arg(long, default_value_t = 200)]
        points: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
}

fn parse_q(s: &str) -> Result<f64, String> {
    let v = match s.trim() {
        "inf" | "infinity" | "∞" => f64::INFINITY,
        t => t.parse::<f64>().map_err(|e| e.to_string())?,
    };
    if v.is_nan() || v < 1.0 {
        return Err(format!("exponent must be >= 1, got {s}"));
    }
    Ok(v)
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_family(s: &str) -> Result<ScalingFamily, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_method(s: &str) -> Result<OrthoMethod, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn run(command: Command) -> sphere_l4::Result<(Report, Output)> {
    Ok(match command {
        Command::Norms {
            field,
            k,
            m,
            axis,
            q,
            oversample,
            output,
        } => {
            let axis = axis.map(|a| [a[0], a[1], a[2]]);
            let p = runner::NormsParams {
                kind: field,
                k,
                m,
                axis,
                qs: q,
                oversample,
            };
            (runner::norms(&p)?, output)
        }
        Command::AvgL4 {
            degrees,
            oversample,
            output,
        } => {
            let p = runner::AvgL4Params {
                ks: degrees.doubling((8, 256))?,
                oversample,
            };
            (runner::avg_l4(&p)?, output)
        }
        Command::Scaling {
            family,
            q,
            degrees,
            oversample,
            tolerance,
            output,
        } => {
            let p = runner::ScalingParams {
                family,
                q,
                ks: degrees.doubling((16, 256))?,
                oversample,
                tolerance,
            };
            (runner::scaling(&p)?, output)
        }
        Command::Pointwise {
            degrees,
            n_colat,
            output,
        } => {
            let p = runner::PointwiseParams {
                ks: degrees.doubling((8, 256))?,
                n_colat,
            };
            (runner::pointwise(&p)?, output)
        }
        Command::RandomOnb {
            k,
            trials,
            seed,
            oversample,
            samples,
            output,
        } => {
            let p = runner::RandomOnbParams {
                k,
                trials,
                seed,
                oversample,
                samples,
            };
            (runner::random_onb(&p)?, output)
        }
        Command::Beams {
            k,
            exponents,
            separations,
            method,
            seed,
            oversample,
            output,
        } => {
            let p = runner::BeamsParams {
                k,
                count_exponents: exponents,
                separations,
                method,
                seed,
                oversample,
            };
            (runner::beams(&p)?, output)
        }
        Command::TubeRatio {
            degrees,
            oversample,
            concentration_k,
            concentration_oversample,
            output,
        } => {
            let p = runner::TubeRatioParams {
                ks: degrees.consecutive((1, 64))?,
                oversample,
                concentration_ks: concentration_k,
                concentration_oversample,
            };
            (runner::tube_ratio(&p)?, output)
        }
        Command::Superlevel {
            degrees,
            cs,
            oversample,
            output,
        } => {
            let p = runner::SuperlevelParams {
                ks: degrees.doubling((16, 256))?,
                cs,
                oversample,
            };
            (runner::superlevel(&p)?, output)
        }
        Command::Verify {
            k_max,
            points,
            seed,
            output,
        } => {
            let p = runner::VerifyParams {
                k_max,
                points,
                seed,
            };
            (runner::verify(&p)?, output)
        }
    })
}

fn emit(report: &Report, output: &Output) -> sphere_l4::Result<()> {
    match &output.out {
        Some(path) => report.write(path, output.format),
        None => {
            let bytes = report.render(output.format)?;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(&bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (report, output) = match run(cli.command) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = emit(&report, &output) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    for g in &report.record.gates {
        let status = if g.passed { "PASS" } else { "FAIL" };
        eprintln!("{status} {}: {} ({})", g.name, g.value, g.bound);
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
