use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use spl_core::dickman::{pomerance_density, solve_theta1, solve_theta2, RhoTable};
use spl_core::exact::floor_root;
use spl_core::experiments::{
    ap_recip_heuristic_table, density_table, rearrangement_report, theorem1_ratio_table, write_csv,
    write_json_lines, ExperimentRecord,
};
use spl_core::forms::{abel_identity_rhs, count_simultaneous, sieve_bound_value};
use spl_core::persist::{cache_dir_from_env, load_or_build};
use spl_core::shifted::{t_k_theta_fast, t_k_theta_oracle, t_prime_theta, t_smooth_theta, t_theta};
use spl_core::wsum::{holder_verify, mobius_expansion_check, w_sum};
use spl_core::{Error, PrimeTables, SieveCache, ShiftSystem};

use crate::args::{
    Command, CountCommand, DickmanCommand, ExperimentCommand, Format, MethodArg, RunConfig, SieveCommand,
    VerifyCommand,
};

/// Why a command did not succeed.
#[derive(Debug)]
pub enum Failure {
    Core(Error),
    /// The computation finished but an identity or inequality did not hold.
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Core(Error::Io(e))
    }
}

type Outcome = Result<(), Failure>;

pub struct Context {
    config: RunConfig,
    out: Box<dyn Write + Send>,
}

impl Context {
    pub fn new(config: RunConfig) -> io::Result<Self> {
        let out: Box<dyn Write + Send> = match &config.output {
            Some(path) => Box::new(BufWriter::new(File::create(path)?)),
            None => Box::new(BufWriter::new(io::stdout())),
        };
        Ok(Self { config, out })
    }

    fn cache_dir(&self) -> PathBuf {
        self.config.cache_dir.clone().unwrap_or_else(cache_dir_from_env)
    }

    fn sieve(&self, need: u64) -> Result<SieveCache, Error> {
        let limit = need.max(self.config.sieve_limit.unwrap_or(2)).max(2);
        let dir = self.cache_dir();
        std::fs::create_dir_all(&dir)?;
        load_or_build(&dir, limit)
    }

    fn tables(&self, need: u64) -> Result<PrimeTables, Error> {
        PrimeTables::with_sieve(self.sieve(need)?)
    }

    fn line(&mut self, text: &str) -> io::Result<()> {
        writeln!(self.out, "{text}")
    }

    fn records(&mut self, records: &[ExperimentRecord]) -> Result<(), Error> {
        match self.config.format {
            Format::Csv => write_csv(&mut self.out, records),
            Format::Json => write_json_lines(&mut self.out, records),
        }
    }

    pub fn finish(mut self) -> io::Result<()> {
        self.out.flush()
    }
}

pub fn dispatch(ctx: &mut Context, command: Command) -> Outcome {
    match command {
        Command::Sieve(SieveCommand::Build { limit }) => {
            let sieve = ctx.sieve(limit)?;
            let count = sieve.prime_count(limit)?;
            ctx.line(&format!("limit={} pi={count}", sieve.limit()))?;
        }
        Command::Count(c) => count(ctx, c)?,
        Command::Msim { t, shifts } => {
            let system = ShiftSystem::from_shifts(&shifts)?;
            let need = u64::try_from(system.max_value(t)).unwrap_or(u64::MAX).max(t);
            let sieve = ctx.sieve(need)?;
            let m = count_simultaneous(&sieve, t, &system)?;
            let mut text = format!("t={t} system={system} m={m}");
            if t >= 3 {
                text.push_str(&format!(" sieve_bound={}", sieve_bound_value(t, &system)?));
            }
            ctx.line(&text)?;
        }
        Command::Wsum { g, ell, z, holder } => {
            if holder {
                let d = holder_verify(g, ell, z)?;
                ctx.line(&format!(
                    "g={} ell={} G={} L={} z={} w={} holder_bound={} holds={}",
                    d.g, d.ell, d.big_g, d.big_l, d.z, d.w_value, d.holder_bound, d.inequality_holds()
                ))?;
                ctx.line(&format!("aj_moments={:?}", d.aj_moments))?;
                ctx.line(&format!("ars_moments={:?}", d.ars_moments))?;
                if !d.inequality_holds() {
                    return Err(Failure::Verification(format!(
                        "w = {} exceeds the Hölder bound {}",
                        d.w_value, d.holder_bound
                    )));
                }
            } else {
                ctx.line(&format!("w={}", w_sum(g, ell, z)?))?;
            }
        }
        Command::Dickman { command, step } => dickman(ctx, command, step)?,
        Command::Verify(v) => verify(ctx, v)?,
        Command::Experiment(e) => experiment(ctx, e)?,
    }
    Ok(())
}

fn count(ctx: &mut Context, command: CountCommand) -> Outcome {
    match command {
        CountCommand::T(a) => {
            let tables = ctx.tables(a.x)?;
            ctx.line(&format!("t_theta={}", t_theta(&tables, a.x, a.theta)?))?;
        }
        CountCommand::Tprime(a) => {
            let tables = ctx.tables(a.x)?;
            ctx.line(&format!("t_prime_theta={}", t_prime_theta(&tables, a.x, a.theta)?))?;
        }
        CountCommand::Tc(a) => {
            let tables = ctx.tables(a.x)?;
            ctx.line(&format!("t_smooth_theta={}", t_smooth_theta(&tables, a.x, a.theta)?))?;
        }
        CountCommand::Tk { x, k, theta, method, unordered } => {
            let tables = ctx.tables(x)?;
            let mut parts = Vec::new();
            let oracle = match method {
                MethodArg::Oracle | MethodArg::Both => Some(t_k_theta_oracle(&tables, x, k, theta)?),
                MethodArg::Fast => None,
            };
            let fast = match method {
                MethodArg::Fast | MethodArg::Both => Some(t_k_theta_fast(&tables, x, k, theta)?),
                MethodArg::Oracle => None,
            };
            if let Some(o) = &oracle {
                parts.push(format!("oracle={}", o.ordered_count));
            }
            if let Some(f) = &fast {
                parts.push(format!("fast={}", f.ordered_count));
                if unordered {
                    parts.push(format!("unordered={}", f.unordered_count.unwrap_or_default()));
                }
            }
            ctx.line(&parts.join(" "))?;
            if let (Some(o), Some(f)) = (oracle, fast) {
                if o.ordered_count != f.ordered_count {
                    return Err(Failure::Verification(format!(
                        "oracle {} and fast {} disagree at x = {x}, k = {k}, θ = {theta}",
                        o.ordered_count, f.ordered_count
                    )));
                }
            }
        }
    }
    Ok(())
}

fn rho_table(u_needed: f64, step: f64) -> Result<RhoTable, Error> {
    let u_max = u_needed.ceil().max(spl_core::dickman::DEFAULT_U_MAX);
    RhoTable::build(u_max, step)
}

fn dickman(ctx: &mut Context, command: DickmanCommand, step: f64) -> Outcome {
    match command {
        DickmanCommand::Rho { u } => {
            if !u.is_finite() || u < 0.0 {
                return Err(Error::Argument(format!("u = {u} must be finite and non-negative")).into());
            }
            let table = rho_table(u, step)?;
            ctx.line(&format!("rho={}", table.rho(u)?))?;
        }
        DickmanCommand::Theta1 => {
            let table = rho_table(0.0, step)?;
            ctx.line(&format!("theta1={}", solve_theta1(&table)?))?;
        }
        DickmanCommand::Theta2 => {
            let table = rho_table(0.0, step)?;
            ctx.line(&format!("theta2={}", solve_theta2(&table)?))?;
        }
        DickmanCommand::Density { theta } => {
            let table = rho_table(theta.reciprocal(), step)?;
            ctx.line(&format!("density={}", pomerance_density(&table, theta.as_real())?))?;
        }
    }
    Ok(())
}

/// Relative tolerance for the partial-summation check.
const ABEL_TOLERANCE: f64 = 1e-10;

fn verify(ctx: &mut Context, command: VerifyCommand) -> Outcome {
    match command {
        VerifyCommand::Abel { x, k, theta, shifts } => {
            let system = ShiftSystem::from_shifts(&shifts)?;
            if k == 0 {
                return Err(Error::Argument("k must be at least 1".into()).into());
            }
            let upper = floor_root(x.max(1), k);
            let need = u64::try_from(system.max_value(upper)).unwrap_or(u64::MAX).max(upper);
            let sieve = ctx.sieve(need)?;
            let eval = abel_identity_rhs(&sieve, x, k, theta, &system)?;
            ctx.line(&format!(
                "lhs={} rhs={} upper_term={} lower_term={} integral={} relative_gap={:e}",
                eval.lhs, eval.rhs, eval.upper_term, eval.lower_term, eval.integral, eval.relative_gap()
            ))?;
            if eval.relative_gap() > ABEL_TOLERANCE {
                return Err(Failure::Verification(format!(
                    "relative gap {:e} exceeds {ABEL_TOLERANCE:e}",
                    eval.relative_gap()
                )));
            }
        }
        VerifyCommand::Mobius { hmax, big_l } => {
            if hmax < 2 {
                return Err(Error::Argument(format!("hmax = {hmax} must be at least 2")).into());
            }
            let mut failures = Vec::new();
            for h in 2..=hmax {
                let (lhs, rhs) = mobius_expansion_check(h, big_l)?;
                if lhs != rhs {
                    failures.push(h);
                }
            }
            ctx.line(&format!("hmax={hmax} L={big_l} checked={} failures={}", hmax - 1, failures.len()))?;
            if let Some(h) = failures.first() {
                return Err(Failure::Verification(format!("identity fails first at h = {h}")));
            }
        }
    }
    Ok(())
}

fn experiment(ctx: &mut Context, command: ExperimentCommand) -> Outcome {
    let records = match command {
        ExperimentCommand::Ratio { k, theta, x_grid } => {
            let tables = ctx.tables(x_grid.iter().copied().max().unwrap_or(2))?;
            theorem1_ratio_table(&tables, k, theta, &x_grid)?
        }
        ExperimentCommand::Density { theta, x_grid } => {
            let tables = ctx.tables(x_grid.iter().copied().max().unwrap_or(2))?;
            let rho = rho_table(theta.reciprocal(), spl_core::dickman::DEFAULT_STEP)?;
            density_table(&tables, &rho, theta, &x_grid)?
        }
        ExperimentCommand::Rearrange { x, k, theta } => {
            if k == 0 {
                return Err(Error::Argument("k must be at least 1".into()).into());
            }
            // outer primes reach x^{1/k}, inner h the box edge 2^θ x^{1−θ}
            let edge = (2f64.powf(theta.as_real()) * (x as f64).powf(1.0 - theta.as_real())).ceil() as u64;
            let need = floor_root(x.max(1), k).saturating_mul(edge).saturating_add(1).max(x);
            let sieve = ctx.sieve(need)?;
            let record = rearrangement_report(&sieve, x, k, theta)?;
            let flags = [record.flag("s_le_majorant"), record.flag("majorant_le_box")];
            ctx.records(std::slice::from_ref(&record))?;
            if flags.iter().any(|f| *f != Some(true)) {
                return Err(Failure::Verification("rearrangement chain violated".into()));
            }
            return Ok(());
        }
        ExperimentCommand::Apsum { x, p_list } => {
            let sieve = ctx.sieve(x)?;
            ap_recip_heuristic_table(&sieve, x, &p_list)?
        }
    };
    ctx.records(&records)?;
    Ok(())
}
