//! Resolution of the `--code | --rm | --random | --repetition-pair | --full
//! | --zero` source group into a concrete code (or a closed-form handle for
//! first-order Reed-Muller sizes past the explicit-constructor cap).

use std::fs;

use bcnoise_core::gf2::{
    full_space, parse_code, reed_muller, repetition_pair, sample_random_code, zero_code,
    LinearCode,
};

use crate::{CliError, SourceArgs};

pub enum Kind {
    Explicit(LinearCode),
    /// RM(1, m) too long to build a generator matrix for; capacity and
    /// undetected-error sweeps use its closed forms instead.
    Rm1Closed { m: usize },
}

pub struct Resolved {
    pub id: String,
    pub kind: Kind,
    /// (n, lambda, seed) when the source is `--random`.
    pub random: Option<(usize, f64, u64)>,
}

impl Resolved {
    pub fn explicit(&self) -> Result<&LinearCode, CliError> {
        match &self.kind {
            Kind::Explicit(code) => Ok(code),
            Kind::Rm1Closed { m } => Err(CliError::Usage(format!(
                "{} only has closed-form support (capacity, pue); this command needs an \
                 explicit generator matrix (m ≤ 4)",
                rm_id(1, *m)
            ))),
        }
    }

    pub fn seed(&self) -> Option<u64> {
        self.random.map(|(_, _, s)| s)
    }
}

fn rm_id(r: usize, m: usize) -> String {
    format!("rm-{r}-{m}")
}

pub fn resolve(args: &SourceArgs) -> Result<Resolved, CliError> {
    if let Some(path) = &args.code {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        let code = parse_code(&text)?;
        return Ok(Resolved {
            id: format!("file:{}", path.display()),
            kind: Kind::Explicit(code),
            random: None,
        });
    }
    if let Some(rm) = &args.rm {
        let (r, m) = (rm[0], rm[1]);
        let kind = if r == 1 && m >= 5 {
            if m > 20 {
                return Err(CliError::Usage(format!(
                    "RM(1, {m}) is past the closed-form cap m ≤ 20"
                )));
            }
            Kind::Rm1Closed { m }
        } else {
            Kind::Explicit(reed_muller(r, m)?)
        };
        return Ok(Resolved { id: rm_id(r, m), kind, random: None });
    }
    if let Some(raw) = &args.random {
        let n: usize = parse_as(&raw[0], "N")?;
        let lam: f64 = parse_as(&raw[1], "LAMBDA")?;
        let seed: u64 = parse_as(&raw[2], "SEED")?;
        let code = sample_random_code(n, lam, seed)?;
        return Ok(Resolved {
            id: format!("random-n{n}-l{lam}-s{seed}"),
            kind: Kind::Explicit(code),
            random: Some((n, lam, seed)),
        });
    }
    if let Some(n) = args.repetition_pair {
        return Ok(Resolved {
            id: format!("reppair-n{n}"),
            kind: Kind::Explicit(repetition_pair(n)?),
            random: None,
        });
    }
    if let Some(n) = args.full {
        return Ok(Resolved {
            id: format!("full-n{n}"),
            kind: Kind::Explicit(full_space(n)?),
            random: None,
        });
    }
    if let Some(n) = args.zero {
        return Ok(Resolved {
            id: format!("zero-n{n}"),
            kind: Kind::Explicit(zero_code(n)?),
            random: None,
        });
    }
    Err(CliError::Usage("no code source given".into()))
}

fn parse_as<T: std::str::FromStr>(s: &str, what: &str) -> Result<T, CliError> {
    s.parse()
        .map_err(|_| CliError::Usage(format!("--random {what}: cannot parse {s:?}")))
}
