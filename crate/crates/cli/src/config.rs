use std::collections::hash_map::RandomState;
use std::fs;
use std::hash::{BuildHasher, Hasher};
use std::path::Path;

use serde::de::DeserializeOwned;

use reachbound::poly::{parse_poly_text, parse_poly_text_infer};
use reachbound::Poly;

use crate::report::CliError;

pub const WORKERS_ENV: &str = "REACHBOUND_WORKERS";

/// Reads a TOML or JSON config, chosen by extension (TOML otherwise).
pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let src = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    if is_json {
        serde_json::from_str(&src).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    } else {
        toml::from_str(&src).map_err(|e| CliError::Config(format!("{}: {}", path.display(), e.message())))
    }
}

/// `flag` if given, else the config value.
pub fn pick<T>(flag: Option<T>, cfg: Option<T>) -> Option<T> {
    flag.or(cfg)
}

/// `--workers`, else `REACHBOUND_WORKERS`, else available parallelism.
pub fn workers(flag: Option<usize>) -> Result<usize, CliError> {
    let w = match flag {
        Some(w) => w,
        None => match std::env::var(WORKERS_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| CliError::Config(format!("{WORKERS_ENV}: expected a positive integer, got {v:?}")))?,
            Err(_) => std::thread::available_parallelism().map_or(1, |n| n.get()),
        },
    };
    if w == 0 {
        return Err(CliError::Config("workers must be at least 1".into()));
    }
    Ok(w)
}

pub fn install_pool(workers: usize) -> Result<(), CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))
}

/// Explicit seed, or a fresh one when `--auto-seed` is set.
pub fn seed(explicit: Option<u64>, auto: bool) -> Result<u64, CliError> {
    match (explicit, auto) {
        (Some(s), _) => Ok(s),
        (None, true) => {
            let mut h = RandomState::new().build_hasher();
            h.write_u128(
                std::time::SystemTime::now()
                    .duration_since(std::time::UNIX_EPOCH)
                    .map_or(0, |d| d.as_nanos()),
            );
            Ok(h.finish())
        }
        (None, false) => Err(CliError::Config(
            "randomized command needs --seed <u64> or --auto-seed".into(),
        )),
    }
}

/// Loads the tuple from inline text or a file. Degrees and `n` are inferred
/// unless both are given.
pub fn load_poly(
    text: Option<&str>,
    file: Option<&Path>,
    n: Option<usize>,
    degrees: Option<&[u32]>,
) -> Result<Poly, CliError> {
    let (src, json) = match (text, file) {
        (Some(t), None) => (t.to_string(), false),
        (None, Some(p)) => {
            let s = fs::read_to_string(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
            let json = p.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
            (s, json)
        }
        (Some(_), Some(_)) => return Err(CliError::Config("give only one of --poly and --poly-file".into())),
        (None, None) => return Err(CliError::Config("missing polynomial: use --poly or --poly-file".into())),
    };
    if json {
        return Ok(Poly::from_json(&src)?);
    }
    let f = match (n, degrees) {
        (Some(n), Some(d)) => parse_poly_text(&src, n, d)?,
        (None, None) => parse_poly_text_infer(&src)?,
        _ => return Err(CliError::Config("--n and --degrees must be given together".into())),
    };
    Ok(f)
}
