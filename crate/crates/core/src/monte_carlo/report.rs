//! CSV and JSON emission for experiment results.

use std::io::Write;

use sha2::{Digest, Sha256};

use super::{ExperimentConfig, TrialRecord};
use crate::error::Result;

pub const CSV_HEADER: &str = "run_id,n,trial_index,seed,lambda1,maxA,wall_time_ms";

/// First 16 hex digits of the SHA-256 of the config's JSON encoding.
pub fn run_id(config: &ExperimentConfig) -> Result<String> {
    let json = serde_json::to_vec(config)?;
    let digest = Sha256::digest(&json);
    Ok(digest.iter().take(8).map(|b| format!("{b:02x}")).collect())
}

/// Writes one row per record. An `opnorm` column is appended only when some
/// record carries it; `wall_time_ms` is empty unless timing was requested.
pub fn write_csv<W: Write>(mut out: W, run_id: &str, records: &[TrialRecord]) -> Result<()> {
    let with_opnorm = records.iter().any(|r| r.opnorm.is_some());
    write!(out, "{CSV_HEADER}")?;
    if with_opnorm {
        write!(out, ",opnorm")?;
    }
    writeln!(out)?;
    for r in records {
        write!(out, "{run_id},{},{},{},{},{},", r.n, r.trial_index, r.seed, r.lambda1, r.max_a)?;
        if let Some(t) = r.wall_time_ms {
            write!(out, "{t}")?;
        }
        if with_opnorm {
            write!(out, ",")?;
            if let Some(o) = r.opnorm {
                write!(out, "{o}")?;
            }
        }
        writeln!(out)?;
    }
    Ok(())
}
