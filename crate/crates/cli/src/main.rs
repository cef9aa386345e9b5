// `!(a > b)` is used on purpose so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod config;
mod failure;
mod output;
mod verify;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use clap::error::ErrorKind;
use clap::Parser;
use serde::Serialize;
use smolbgk::jumps::{jump_coefficients, pole_condition_residuals, solve_jumps, Convention, ProblemInput};
use smolbgk::oracle::oracle_solve;
use smolbgk::profiles::{geometric_grid, profile, ProfilePoint};
use smolbgk::riemann::RiemannData;
use smolbgk::specfun::MU1;
use smolbgk::spectrum::{HalfSpaceSolution, SpectralBasis};

use args::{Cli, Command, Drivers, Format, GlobalOpts};
use config::FileConfig;
use failure::Failure;
use output::{cells, round12, write_csv, write_json};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(f) = init_threads().and_then(|_| run(cli)) {
        if !matches!(f, Failure::Verification) {
            eprintln!("error: {f}");
        }
        std::process::exit(f.exit_code());
    }
}

/// Size the rayon pool from SMOLBGK_THREADS (default 1).
fn init_threads() -> Result<(), Failure> {
    let threads = match std::env::var("SMOLBGK_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n >= 1)
            .ok_or_else(|| Failure::Usage(format!("SMOLBGK_THREADS must be a positive integer (got {v:?})")))?,
        Err(_) => 1,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Usage(e.to_string()))
}

struct Context {
    file: FileConfig,
    global: GlobalOpts,
}

impl Context {
    fn riemann(&self) -> Result<RiemannData, Failure> {
        let quad = self.file.quad(self.global.quad_tol)?;
        RiemannData::build(&quad).map_err(Failure::Numerics)
    }

    fn convention(&self) -> Convention {
        self.global.convention.into()
    }

    fn json_only(&self, command: &str) -> Result<(), Failure> {
        match self.global.format {
            Format::Json => Ok(()),
            Format::Csv => Err(Failure::Usage(format!("{command} only supports --format json"))),
        }
    }
}

fn input(d: &Drivers) -> Result<ProblemInput, Failure> {
    let input = ProblemInput::new(d.g_t, d.u);
    input.validate()?;
    Ok(input)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let ctx = Context {
        file: FileConfig::load(cli.global.config.as_deref())?,
        global: cli.global,
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Coeffs => coeffs(&ctx, &mut out),
        Command::Jumps(d) => jumps(&ctx, &input(&d)?, &mut out),
        Command::Profile {
            drivers,
            x_max,
            points,
            out: path,
        } => profile_cmd(&ctx, &input(&drivers)?, x_max, points, path.as_deref(), &mut out),
        Command::Distribution {
            drivers,
            x,
            mu_max,
            points,
        } => distribution(&ctx, &input(&drivers)?, x, mu_max, points, &mut out),
        Command::Verify { tol } => verify_cmd(&ctx, tol, &mut out),
        Command::Oracle {
            drivers,
            n_mu,
            n_x,
            x_max,
        } => oracle_cmd(&ctx, &input(&drivers)?, n_mu, n_x, x_max, &mut out),
    }
}

#[derive(Serialize)]
struct CoeffsOut {
    convention: Convention,
    #[serde(rename = "V1")]
    v1: f64,
    #[serde(rename = "V2")]
    v2: f64,
    #[serde(rename = "V3")]
    v3: f64,
    x_hat_mu1: f64,
    x_hat_minus_mu1: f64,
    product: f64,
    #[serde(rename = "K_TT")]
    k_tt: f64,
    #[serde(rename = "K_TU")]
    k_tu: f64,
    #[serde(rename = "K_nT")]
    k_nt: f64,
    #[serde(rename = "K_nU")]
    k_nu: f64,
}

fn coeffs(ctx: &Context, out: &mut dyn Write) -> Result<(), Failure> {
    let rd = ctx.riemann()?;
    let k = jump_coefficients(&rd, ctx.convention())?;
    let (xp, xm) = (rd.x_hat(MU1)?, rd.x_hat(-MU1)?);
    let c = CoeffsOut {
        convention: k.convention,
        v1: rd.v_moment(1)?,
        v2: rd.v_moment(2)?,
        v3: rd.v_moment(3)?,
        x_hat_mu1: xp,
        x_hat_minus_mu1: xm,
        product: xp * xm,
        k_tt: k.k_tt,
        k_tu: k.k_tu,
        k_nt: k.k_nt,
        k_nu: k.k_nu,
    };
    match ctx.global.format {
        Format::Json => write_json(out, &c),
        Format::Csv => {
            let header = [
                "convention", "V1", "V2", "V3", "x_hat_mu1", "x_hat_minus_mu1", "product", "K_TT", "K_TU",
                "K_nT", "K_nU",
            ];
            let mut row = vec![c.convention.name().to_string()];
            row.extend(cells(&[c.v1, c.v2, c.v3, xp, xm, c.product, c.k_tt, c.k_tu, c.k_nt, c.k_nu]));
            write_csv(out, &header, &[row])
        }
    }
}

#[derive(Serialize)]
struct JumpsOut {
    convention: Convention,
    g_t: f64,
    u: f64,
    #[serde(rename = "eps_T")]
    eps_t: f64,
    eps_n: f64,
    #[serde(rename = "C0")]
    c0: f64,
    #[serde(rename = "C1")]
    c1: f64,
    pole_residual_plus: f64,
    pole_residual_minus: f64,
}

fn jumps(ctx: &Context, input: &ProblemInput, out: &mut dyn Write) -> Result<(), Failure> {
    let rd = ctx.riemann()?;
    let k = jump_coefficients(&rd, ctx.convention())?;
    let r = solve_jumps(input, &k, &rd);
    let (rp, rm) = pole_condition_residuals(&r, input, &rd);
    let j = JumpsOut {
        convention: r.convention,
        g_t: input.g_t,
        u: input.u,
        eps_t: r.eps_t,
        eps_n: r.eps_n,
        c0: r.c0,
        c1: r.c1,
        pole_residual_plus: rp,
        pole_residual_minus: rm,
    };
    match ctx.global.format {
        Format::Json => write_json(out, &j),
        Format::Csv => {
            let header = [
                "convention", "g_t", "u", "eps_T", "eps_n", "C0", "C1", "pole_residual_plus", "pole_residual_minus",
            ];
            let mut row = vec![j.convention.name().to_string()];
            row.extend(cells(&[j.g_t, j.u, j.eps_t, j.eps_n, j.c0, j.c1, rp, rm]));
            write_csv(out, &header, &[row])
        }
    }
}

fn write_profile(rows: &[ProfilePoint], format: Format, out: &mut dyn Write) -> Result<(), Failure> {
    match format {
        Format::Json => {
            let rounded: Vec<ProfilePoint> = rows
                .iter()
                .map(|p| ProfilePoint {
                    x: round12(p.x),
                    delta_n: round12(p.delta_n),
                    u: round12(p.u),
                    delta_t: round12(p.delta_t),
                    m0: round12(p.m0),
                    m1: round12(p.m1),
                })
                .collect();
            write_json(out, &rounded)
        }
        Format::Csv => {
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|p| cells(&[p.x, p.delta_n, p.u, p.delta_t, p.m0, p.m1]))
                .collect();
            write_csv(out, &["x", "delta_n", "u", "delta_T", "m0", "m1"], &body)
        }
    }
}

fn profile_cmd(
    ctx: &Context,
    input: &ProblemInput,
    x_max: f64,
    points: usize,
    path: Option<&Path>,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    if !(x_max > 0.0) || points < 2 {
        return Err(Failure::Usage(format!(
            "profile needs --x-max > 0 and --points >= 2 (got {x_max}, {points})"
        )));
    }
    // Open the destination first so an unwritable path fails before the solve.
    let mut file = match path {
        Some(p) => Some(BufWriter::new(
            File::create(p).map_err(|e| Failure::Io(format!("cannot write {}: {e}", p.display())))?,
        )),
        None => None,
    };
    let x_min = 1e-2f64.min(x_max / 2.0);
    let xs = geometric_grid(x_min, x_max, points)?;
    let rd = ctx.riemann()?;
    let basis = SpectralBasis::new(&rd)?;
    let sol = HalfSpaceSolution::new(&rd, &basis, *input, ctx.convention())?;
    let rows = profile(&sol, &xs)?;
    match file.as_mut() {
        Some(f) => {
            write_profile(&rows, ctx.global.format, f)?;
            f.flush()?;
            Ok(())
        }
        None => write_profile(&rows, ctx.global.format, out),
    }
}

#[derive(Serialize)]
struct DistributionRow {
    x: f64,
    mu: f64,
    h: f64,
}

fn distribution(
    ctx: &Context,
    input: &ProblemInput,
    x: f64,
    mu_max: f64,
    points: usize,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    if !(x >= 0.0) || !(mu_max > 0.0) || points < 2 {
        return Err(Failure::Usage(format!(
            "distribution needs --x >= 0, --mu-max > 0 and --points >= 2 (got {x}, {mu_max}, {points})"
        )));
    }
    let rd = ctx.riemann()?;
    let basis = SpectralBasis::new(&rd)?;
    let sol = HalfSpaceSolution::new(&rd, &basis, *input, ctx.convention())?;
    let rows = (0..points)
        .map(|i| {
            let mu = -mu_max + 2.0 * mu_max * i as f64 / (points - 1) as f64;
            Ok(DistributionRow {
                x,
                mu,
                h: sol.h_distribution(x, mu)?,
            })
        })
        .collect::<smolbgk::Result<Vec<_>>>()?;
    match ctx.global.format {
        Format::Json => write_json(out, &rows),
        Format::Csv => {
            let body: Vec<Vec<String>> = rows.iter().map(|r| cells(&[r.x, r.mu, r.h])).collect();
            write_csv(out, &["x", "mu", "h"], &body)
        }
    }
}

fn verify_cmd(ctx: &Context, tol: Option<f64>, out: &mut dyn Write) -> Result<(), Failure> {
    ctx.json_only("verify")?;
    if let Some(t) = tol {
        if !(t > 0.0) {
            return Err(Failure::Usage(format!("--tol must be positive (got {t})")));
        }
    }
    let rd = ctx.riemann()?;
    let report = verify::run(&rd, tol)?;
    write_json(out, &report)?;
    if report.pass {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

#[derive(Serialize)]
struct AnalyticComparison {
    convention: Convention,
    #[serde(rename = "eps_T")]
    eps_t: f64,
    eps_n: f64,
    #[serde(rename = "deviation_T")]
    deviation_t: f64,
    deviation_n: f64,
}

#[derive(Serialize)]
struct OracleOut {
    g_t: f64,
    u: f64,
    #[serde(rename = "oracle_eps_T")]
    oracle_eps_t: f64,
    oracle_eps_n: f64,
    /// Comparison against the convention selected with --convention.
    selected: AnalyticComparison,
    all_conventions: Vec<AnalyticComparison>,
    iterations: usize,
    final_update_norm: f64,
    fit_residual: (f64, f64),
    fit_slope: (f64, f64),
    velocity_deviation: f64,
    config: smolbgk::oracle::OracleConfig,
}

/// |a − b|/|b|, or |a − b| when b vanishes.
fn relative(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        (a - b).abs()
    } else {
        (a - b).abs() / b.abs()
    }
}

fn oracle_cmd(
    ctx: &Context,
    input: &ProblemInput,
    n_mu: Option<usize>,
    n_x: Option<usize>,
    x_max: Option<f64>,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    ctx.json_only("oracle")?;
    let cfg = ctx.file.oracle(n_mu, n_x, x_max)?;
    let rd = ctx.riemann()?;
    let result = oracle_solve(&cfg, input).map_err(|e| match e {
        smolbgk::Error::InvalidConfig(m) => Failure::Usage(m),
        other => Failure::Oracle(other),
    })?;
    let compare = |c: Convention| -> Result<AnalyticComparison, Failure> {
        let k = jump_coefficients(&rd, c)?;
        let r = solve_jumps(input, &k, &rd);
        Ok(AnalyticComparison {
            convention: c,
            eps_t: r.eps_t,
            eps_n: r.eps_n,
            deviation_t: relative(result.eps_t_est, r.eps_t),
            deviation_n: relative(result.eps_n_est, r.eps_n),
        })
    };
    let o = OracleOut {
        g_t: input.g_t,
        u: input.u,
        oracle_eps_t: result.eps_t_est,
        oracle_eps_n: result.eps_n_est,
        selected: compare(ctx.convention())?,
        all_conventions: Convention::ALL.into_iter().map(compare).collect::<Result<_, _>>()?,
        iterations: result.iterations,
        final_update_norm: result.final_update_norm,
        fit_residual: result.fit_residual,
        fit_slope: result.fit_slope,
        velocity_deviation: result.velocity_deviation,
        config: cfg,
    };
    write_json(out, &o)
}
