//! The `sphdes` command-line tool.
//!
//! Exit codes: 0 success, 1 verification negative, 2 input or usage error,
//! 3 construction did not converge. `-` reads standard input wherever a file
//! is accepted and writes standard output wherever an output path is
//! accepted. `--json` switches every report to a single JSON object.

use std::fs;
use std::io::{Read, Write};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::catalog::{
    lower_bound, platonic, product_design, Platonic, ProductDesignSpec, ORDER_SETTINGS,
};
use crate::construct::{minimize, ConstructOptions};
use crate::cubature::{monomial_check_all, strength, DEFAULT_TOL};
use crate::designio::{self, FileFormat};
use crate::error::Error;
use crate::harmonics::HarmonicIndex;
use crate::optimality::{
    check_result, criteria, fit, information_matrix, random_coefficients, simulate, CoefficientVector,
};
use crate::sphere::Design;
use crate::stereogram::{render, StereogramStyle};

/// Threshold for the monomial oracle to count as agreeing with exactness.
pub const ORACLE_TOL: f64 = 1e-9;

/// Salt separating the coefficient stream from the noise stream in
/// `simulate`.
const COEFF_SEED_SALT: u64 = 0x5eed_c0ef;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandResult {
    Success = 0,
    VerificationNegative = 1,
    InputError = 2,
    NotConverged = 3,
}

impl CommandResult {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Parser)]
#[command(name = "sphdes", version, about = "Spherical t-designs for spherical harmonic regression")]
struct Cli {
    /// Emit reports as a single JSON object.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct InputFormat {
    /// Force the input layout instead of detecting it.
    #[arg(long = "input-format", value_parser = parse_format)]
    input_format: Option<FileFormat>,
}

#[derive(Debug, Args)]
struct OutputFile {
    /// Output path (`-` for standard output).
    #[arg(short, long, default_value = "-")]
    output: String,
    #[arg(long, value_parser = parse_format, default_value = "triples")]
    format: FileFormat,
    /// Significant digits, 6 to 17.
    #[arg(long, default_value_t = 17, value_parser = clap::value_parser!(u32).range(6..=17))]
    precision: u32,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Emit a built-in design: a Platonic solid or `product`.
    Catalog {
        name: String,
        /// Model order for `product`.
        #[arg(long)]
        d: Option<usize>,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long)]
        n_theta: Option<usize>,
        #[arg(long)]
        n_phi: Option<usize>,
        #[command(flatten)]
        out: OutputFile,
    },
    /// Report cubature residuals and strength; exit 1 below `--t`.
    Verify {
        file: String,
        #[arg(long)]
        t: usize,
        /// Highest degree to report (defaults to `--t`).
        #[arg(long)]
        t_max: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// Also run the independent monomial-integration check.
        #[arg(long)]
        oracle: bool,
        #[command(flatten)]
        input: InputFormat,
    },
    /// Information-matrix criteria for a model of order `--d`.
    Criteria {
        file: String,
        #[arg(long)]
        d: usize,
        /// Comma-separated Φ_p exponents (`0` is D, `inf` is E).
        #[arg(long, value_delimiter = ',', default_value = "1")]
        p: Vec<f64>,
        #[command(flatten)]
        input: InputFormat,
    },
    /// Search for a t-design with `--n` points.
    Construct {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        starts: usize,
        #[arg(long, env = "SPHDES_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 20_000)]
        max_iters: usize,
        #[command(flatten)]
        out: OutputFile,
    },
    /// Render a stereogram as SVG.
    Stereogram {
        file: String,
        #[arg(short, long, default_value = "-")]
        output: String,
        /// Draw meridians and parallels.
        #[arg(long)]
        grid: bool,
        #[arg(long, default_value_t = 512)]
        size: u32,
        #[arg(long, default_value_t = 6.0)]
        marker_radius: f64,
        #[command(flatten)]
        input: InputFormat,
    },
    /// Least-squares fit of the order-`d` model.
    Fit {
        design: String,
        observations: String,
        #[arg(long)]
        d: usize,
        #[command(flatten)]
        input: InputFormat,
    },
    /// Simulate observations from the order-`d` model.
    Simulate {
        design: String,
        #[arg(long)]
        d: usize,
        #[arg(long, env = "SPHDES_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        noise: f64,
        /// Coefficient file, one value per line in basis order; random
        /// standard normal coefficients when omitted.
        #[arg(long)]
        coeffs: Option<String>,
        #[command(flatten)]
        input: InputFormat,
    },
    /// Product designs against the smallest known t-designs, d = 1..7.
    Table,
    /// Rewrite a design file in another layout.
    Convert {
        file: String,
        #[command(flatten)]
        input: InputFormat,
        #[command(flatten)]
        out: OutputFile,
    },
}

fn parse_format(s: &str) -> Result<FileFormat, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Failure inside a subcommand, mapped onto an exit code.
enum Failure {
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

struct Io<'a> {
    stdin: &'a mut dyn Read,
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
}

impl Io<'_> {
    fn read(&mut self, path: &str) -> Result<String, Failure> {
        if path == "-" {
            let mut s = String::new();
            self.stdin.read_to_string(&mut s)?;
            Ok(s)
        } else {
            fs::read_to_string(path).map_err(|e| Failure::Input(format!("{path}: {e}")))
        }
    }

    fn write(&mut self, path: &str, text: &str) -> Result<(), Failure> {
        if path == "-" {
            self.stdout.write_all(text.as_bytes())?;
            Ok(())
        } else {
            fs::write(path, text).map_err(|e| Failure::Input(format!("{path}: {e}")))
        }
    }

    fn design(&mut self, path: &str, format: Option<FileFormat>) -> Result<Design, Failure> {
        let text = self.read(path)?;
        Ok(designio::parse_file(&text, format)?.design)
    }

    fn report<T: Serialize>(&mut self, json: bool, value: &T, text: &str) -> Result<(), Failure> {
        if json {
            let s = serde_json::to_string_pretty(value).expect("serializable report");
            writeln!(self.stdout, "{s}")?;
        } else {
            self.stdout.write_all(text.as_bytes())?;
        }
        Ok(())
    }
}

/// Parses `args` (including the program name) and runs one subcommand.
pub fn run<S: AsRef<str>>(
    args: &[S],
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> CommandResult {
    let cli = match Cli::try_parse_from(args.iter().map(|a| a.as_ref())) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(rendered.as_bytes());
                    CommandResult::Success
                }
                _ => {
                    let _ = stderr.write_all(rendered.as_bytes());
                    CommandResult::InputError
                }
            };
        }
    };
    let mut io = Io { stdin, stdout, stderr };
    match dispatch(cli, &mut io) {
        Ok(code) => code,
        Err(Failure::Input(msg)) => {
            let _ = writeln!(io.stderr, "error: {msg}");
            CommandResult::InputError
        }
    }
}

fn dispatch(cli: Cli, io: &mut Io<'_>) -> Result<CommandResult, Failure> {
    let json = cli.json;
    match cli.command {
        Command::Catalog { name, d, alpha, n_theta, n_phi, out } => {
            let design = if name.eq_ignore_ascii_case("product") {
                let d = d.ok_or_else(|| Failure::Input("catalog product needs --d".into()))?;
                let spec = match (n_theta, n_phi) {
                    (None, None) => ProductDesignSpec::minimal(d)?.with_alpha(alpha)?,
                    (nt, np) => {
                        let base = ProductDesignSpec::minimal(d).ok();
                        let nt = nt.or(base.map(|b| b.n_theta())).ok_or_else(|| {
                            Failure::Input(format!("no tabulated n_theta for d = {d}; pass --n-theta"))
                        })?;
                        ProductDesignSpec::new(d, nt, np.unwrap_or(2 * d + 1), alpha)?
                    }
                };
                product_design(&spec)?
            } else {
                platonic(name.parse::<Platonic>()?)
            };
            let text = designio::write(&design, out.precision as usize, out.format);
            io.write(&out.output, &text)?;
            Ok(CommandResult::Success)
        }
        Command::Verify { file, t, t_max, tol, oracle, input } => {
            if !(tol > 0.0) {
                return Err(Failure::Input("--tol must be positive".into()));
            }
            let design = io.design(&file, input.input_format)?;
            let t_max = t_max.unwrap_or(t).max(t).max(1);
            let rep = strength(&design, t_max, tol);
            let deviation = oracle.then(|| monomial_check_all(&design, t as u32));
            let oracle_ok = deviation.map_or(true, |d| d < ORACLE_TOL);
            let passes = rep.strength >= t && oracle_ok;
            let mut text = format!("points: {}\n", design.len());
            for (l, r) in rep.residuals.iter().enumerate() {
                text.push_str(&format!("r_{:<3} {r:.3e}\n", l + 1));
            }
            text.push_str(&format!("strength: {} (tol {tol:e}, t_max {t_max})\n", rep.strength));
            if let Some(d) = deviation {
                text.push_str(&format!("monomial oracle deviation (degree <= {t}): {d:.3e}\n"));
            }
            text.push_str(if passes { "result: spherical t-design\n" } else { "result: NOT a spherical t-design\n" });
            let value = json!({
                "n": design.len(),
                "t": t,
                "t_max": rep.t_max,
                "tol": rep.tol,
                "residuals": rep.residuals,
                "strength": rep.strength,
                "oracle_deviation": deviation,
                "passes": passes,
            });
            io.report(json, &value, &text)?;
            Ok(if passes { CommandResult::Success } else { CommandResult::VerificationNegative })
        }
        Command::Criteria { file, d, p, input } => {
            let design = io.design(&file, input.input_format)?;
            let m = information_matrix(&design, d);
            let rep = criteria(&m, &p)?;
            let check = check_result(&design, d, DEFAULT_TOL);
            let mut text = format!(
                "order d = {d}, parameters = {}, points = {}\n",
                rep.size,
                design.len()
            );
            text.push_str(&format!("D-criterion: {:.12}\n", rep.d_criterion));
            text.push_str(&format!("A-criterion: {:.12}\n", rep.a_criterion));
            text.push_str(&format!("E-criterion: {:.12}\n", rep.e_criterion));
            for v in &rep.phi {
                text.push_str(&format!("Phi_{}: {:.12}\n", v.p, v.value));
            }
            text.push_str(&format!("max |M - I|: {:.3e}\n", rep.identity_deviation));
            text.push_str(&format!("singular: {}\n", rep.singular));
            text.push_str(&format!("identity information matrix: {}\n", check.holds));
            let mut value = serde_json::to_value(&rep).expect("serializable");
            value["n"] = json!(design.len());
            value["identity"] = json!(check.holds);
            io.report(json, &value, &text)?;
            Ok(CommandResult::Success)
        }
        Command::Construct { t, n, starts, seed, tol, max_iters, out } => {
            let mut opts = ConstructOptions::new(t, n);
            opts.starts = starts;
            opts.seed = seed;
            opts.tol = tol;
            opts.max_iters = max_iters;
            let outcome = minimize(&opts)?;
            let rep = strength(&outcome.design, t, DEFAULT_TOL);
            let deviation = monomial_check_all(&outcome.design, t as u32);
            let text = designio::write(&outcome.design, out.precision as usize, out.format);
            io.write(&out.output, &text)?;
            let summary = format!(
                "t = {t}, n = {n}: residual {:.3e} after {} iterations (start {}), converged: {}, strength {}, oracle deviation {:.3e}\n",
                outcome.residual, outcome.iterations, outcome.start_index, outcome.converged, rep.strength, deviation
            );
            let value = json!({
                "t": t,
                "n": n,
                "seed": seed,
                "starts": starts,
                "residual": outcome.residual,
                "iterations": outcome.iterations,
                "start_index": outcome.start_index,
                "converged": outcome.converged,
                "strength": rep.strength,
                "oracle_deviation": deviation,
            });
            // keep standard output clean when the design itself goes there
            if out.output != "-" {
                io.report(json, &value, &summary)?;
            } else if json {
                writeln!(io.stderr, "{}", serde_json::to_string(&value).expect("serializable"))?;
            } else {
                io.stderr.write_all(summary.as_bytes())?;
            }
            Ok(if outcome.converged { CommandResult::Success } else { CommandResult::NotConverged })
        }
        Command::Stereogram { file, output, grid, size, marker_radius, input } => {
            if size == 0 || !(marker_radius > 0.0) {
                return Err(Failure::Input("size and marker radius must be positive".into()));
            }
            let design = io.design(&file, input.input_format)?;
            let style = StereogramStyle { size, marker_radius, grid, ..StereogramStyle::default() };
            io.write(&output, &render(&design, &style))?;
            Ok(CommandResult::Success)
        }
        Command::Fit { design, observations, d, input } => {
            let design = io.design(&design, input.input_format)?;
            let obs_text = io.read(&observations)?;
            let y = designio::parse_values(&obs_text)?;
            let c = fit(&design, &y, d)?;
            let rows: Vec<_> = c
                .values()
                .iter()
                .enumerate()
                .map(|(pos, v)| {
                    let idx = HarmonicIndex::from_position(pos);
                    json!({"l": idx.degree(), "m": idx.order(), "value": v})
                })
                .collect();
            let mut text = String::from("# l m coefficient\n");
            for (pos, v) in c.values().iter().enumerate() {
                let idx = HarmonicIndex::from_position(pos);
                text.push_str(&format!("{} {} {v:.16e}\n", idx.degree(), idx.order()));
            }
            let value = json!({"d": d, "n": design.len(), "coefficients": rows});
            io.report(json, &value, &text)?;
            Ok(CommandResult::Success)
        }
        Command::Simulate { design, d, seed, noise, coeffs, input } => {
            let design = io.design(&design, input.input_format)?;
            let c = match coeffs {
                Some(path) => {
                    let text = io.read(&path)?;
                    CoefficientVector::new(d, designio::parse_values(&text)?)?
                }
                None => random_coefficients(d, seed ^ COEFF_SEED_SALT),
            };
            let y = simulate(&design, &c, noise, seed)?;
            let value = json!({
                "d": d,
                "seed": seed,
                "noise": noise,
                "coefficients": c.values(),
                "observations": y,
            });
            io.report(json, &value, &designio::write_values(&y))?;
            Ok(CommandResult::Success)
        }
        Command::Table => {
            let mut rows = Vec::new();
            let mut text = String::from(
                "  d  (d+1)^2  t_min  bound  n_2d  n_2d+1  n_min | n_theta  n_phi  n_tot  strength  max|M-I|\n",
            );
            for s in ORDER_SETTINGS {
                let design = product_design(&ProductDesignSpec::minimal(s.d)?)?;
                let rep = strength(&design, 2 * s.d + 1, DEFAULT_TOL);
                let dev = information_matrix(&design, s.d).identity_deviation();
                text.push_str(&format!(
                    "{:>3}  {:>7}  {:>5}  {:>5}  {:>4}  {:>6}  {:>5} | {:>7}  {:>5}  {:>5}  {:>8}  {:>8.1e}\n",
                    s.d,
                    s.parameters(),
                    2 * s.d,
                    lower_bound(2 * s.d),
                    s.n_2d,
                    s.n_2d1,
                    s.n_min(),
                    s.n_theta,
                    s.n_phi(),
                    design.len(),
                    rep.strength,
                    dev
                ));
                rows.push(json!({
                    "d": s.d,
                    "parameters": s.parameters(),
                    "t_min": 2 * s.d,
                    "lower_bound": lower_bound(2 * s.d),
                    "n_2d": s.n_2d,
                    "n_2d1": s.n_2d1,
                    "n_min": s.n_min(),
                    "n_theta": s.n_theta,
                    "n_phi": s.n_phi(),
                    "n_tot": design.len(),
                    "strength": rep.strength,
                    "identity_deviation": dev,
                }));
            }
            io.report(json, &json!({ "rows": rows }), &text)?;
            Ok(CommandResult::Success)
        }
        Command::Convert { file, input, out } => {
            let design = io.design(&file, input.input_format)?;
            let text = designio::write(&design, out.precision as usize, out.format);
            io.write(&out.output, &text)?;
            Ok(CommandResult::Success)
        }
    }
}
