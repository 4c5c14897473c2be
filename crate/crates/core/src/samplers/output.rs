use std::io::Write;

use serde::Serialize;

use crate::algebra::Matrix;
use crate::error::{Error, Result};

/// Provenance line written ahead of the draws.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleHeader {
    pub spec_sha256: String,
    pub seed: u64,
    pub stream: u64,
}

fn io(e: std::io::Error) -> Error {
    Error::Parse(format!("write failed: {e}"))
}

/// One row per draw: real coordinates row-major, the `β` components of each
/// entry adjacent. The first line is a `#` comment with the header.
pub fn write_csv(mut w: impl Write, header: &SampleHeader, draws: &[Matrix]) -> Result<()> {
    writeln!(
        w,
        "# spec_sha256={} seed={} stream={}",
        header.spec_sha256, header.seed, header.stream
    )
    .map_err(io)?;
    for d in draws {
        let row: Vec<String> = d.coords().iter().map(|x| x.to_string()).collect();
        writeln!(w, "{}", row.join(",")).map_err(io)?;
    }
    Ok(())
}

/// A header object, then one matrix object per line.
pub fn write_jsonl(mut w: impl Write, header: &SampleHeader, draws: &[Matrix]) -> Result<()> {
    let line = serde_json::to_string(header).map_err(|e| Error::Parse(e.to_string()))?;
    writeln!(w, "{line}").map_err(io)?;
    for d in draws {
        let line = serde_json::to_string(d).map_err(|e| Error::Parse(e.to_string()))?;
        writeln!(w, "{line}").map_err(io)?;
    }
    Ok(())
}
