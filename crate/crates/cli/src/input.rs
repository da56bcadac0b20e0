//! Argument parsing into exact values.

use annuli::numeric::parse_exact;
use annuli::{ExponentProfile, Q};

use crate::CliError;

pub const MAX_DEN: u64 = 1_000_000;

pub fn parse_q(s: &str) -> Result<Q, CliError> {
    parse_exact(s.trim(), MAX_DEN).map_err(|e| CliError::Usage(e.to_string()))
}

pub fn parse_list(s: &str) -> Result<Vec<Q>, CliError> {
    s.split(',').map(parse_q).collect()
}

pub fn parse_u64_list(s: &str) -> Result<Vec<u64>, CliError> {
    s.split(',')
        .map(|v| v.trim().parse().map_err(|_| CliError::Usage(format!("expected an integer, got {v:?}"))))
        .collect()
}

/// A single value is repeated across all `n` coordinates.
pub fn broadcast(v: Vec<Q>, n: usize, name: &str) -> Result<Vec<Q>, CliError> {
    match v.len() {
        1 => Ok(vec![v[0].clone(); n]),
        len if len == n => Ok(v),
        len => Err(CliError::Usage(format!("--{name} has {len} entries, expected 1 or {n}"))),
    }
}

pub fn profile(n: Option<usize>, tau_psi: &str, tau_phi: &str) -> Result<ExponentProfile, CliError> {
    let tp = parse_list(tau_psi)?;
    let tf = parse_list(tau_phi)?;
    let n = n.unwrap_or(tp.len().max(tf.len()));
    let tp = broadcast(tp, n, "tau-psi")?;
    let tf = broadcast(tf, n, "tau-phi")?;
    ExponentProfile::new(tp, tf).map_err(CliError::from)
}

/// 1-based index from the command line to 0-based.
pub fn index(j: usize, n: usize) -> Result<usize, CliError> {
    if j == 0 || j > n {
        return Err(CliError::Usage(format!("index {j} out of range 1..={n}")));
    }
    Ok(j - 1)
}
