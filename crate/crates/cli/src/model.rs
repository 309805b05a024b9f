use std::io::Write;
use std::path::PathBuf;

use blockkrylov::perfmodel::{divisors, sweep};
use blockkrylov::{Kernel, MachineProfile};

use crate::args::ModelArgs;
use crate::record::{writer, ModelRecord};
use crate::{exit, CmdResult, Failure};

/// Environment variable naming the default machine profile.
pub const MACHINE_ENV: &str = "BLOCKKRYLOV_MACHINE";

fn parse_p_list(text: &str) -> Result<Vec<u64>, Failure> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<u64>().map_err(|_| {
                Failure::usage(format!("--p-list: '{s}' is not a non-negative integer"))
            })
        })
        .collect()
}

/// `--machine`, else `$BLOCKKRYLOV_MACHINE`, else the built-in reference.
fn profile(args: &ModelArgs) -> Result<MachineProfile, Failure> {
    let path = args.machine.clone().or_else(|| {
        std::env::var_os(MACHINE_ENV)
            .filter(|v| !v.is_empty())
            .map(PathBuf::from)
    });
    match path {
        None => Ok(MachineProfile::skylake_reference()),
        Some(path) => MachineProfile::load(&path).map_err(|e| {
            Failure::with_code(
                exit::NO_INPUT,
                format!("machine profile {}: {e}", path.display()),
            )
        }),
    }
}

pub fn run(args: &ModelArgs, out: &mut dyn Write) -> CmdResult {
    if args.kernel == Kernel::Bop && args.z.is_none() {
        return Err(Failure::usage("--kernel bop needs --z (stored nonzeros)"));
    }
    if args.k == 0 {
        return Err(Failure::usage("--k must be positive"));
    }
    let p_list = match &args.p_list {
        Some(text) => parse_p_list(text)?,
        None => divisors(args.k),
    };
    if let Some(p) = p_list
        .iter()
        .find(|&&p| p == 0 || !args.k.is_multiple_of(p))
    {
        return Err(Failure::usage(format!(
            "p = {p} does not divide k = {}",
            args.k
        )));
    }
    let machine = profile(args)?;
    let rows = sweep(args.kernel, args.n, args.k, &p_list, args.z, &machine)?;

    let mut csv = writer(out, &ModelRecord::HEADER)?;
    for row in rows {
        let pr = row.prediction;
        csv.serialize(ModelRecord {
            p: row.p,
            t_comp: pr.t_comp,
            t_mem: pr.t_mem,
            t_reg: pr.t_reg,
            t: pr.time,
            bound: pr.bound.to_string(),
        })?;
    }
    csv.flush()?;
    Ok(exit::SUCCESS)
}
