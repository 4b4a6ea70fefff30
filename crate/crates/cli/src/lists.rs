//! Comma-separated integer lists for `--sizes` and `--seeds`.
//!
//! Each item is an integer (`4096`), a power (`2^8`), an inclusive range of
//! integers (`1..10`) or an inclusive range of powers of one base
//! (`2^8..2^16`, every power in between).

use anyhow::{bail, Context, Result};

fn power(s: &str) -> Result<Option<(u64, u32)>> {
    let Some((b, e)) = s.split_once('^') else {
        return Ok(None);
    };
    let b: u64 = b.trim().parse().with_context(|| format!("bad base in `{s}`"))?;
    let e: u32 = e.trim().parse().with_context(|| format!("bad exponent in `{s}`"))?;
    Ok(Some((b, e)))
}

fn value(s: &str) -> Result<u64> {
    match power(s)? {
        Some((b, e)) => b
            .checked_pow(e)
            .with_context(|| format!("`{s}` overflows 64 bits")),
        None => s.trim().parse().with_context(|| format!("not an integer: `{s}`")),
    }
}

pub fn parse_list(s: &str) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let Some((lo, hi)) = item.split_once("..") else {
            out.push(value(item)?);
            continue;
        };
        match (power(lo)?, power(hi)?) {
            (Some((b, e0)), Some((b1, e1))) => {
                if b != b1 {
                    bail!("range `{item}` mixes bases {b} and {b1}");
                }
                for e in e0..=e1 {
                    out.push(value(&format!("{b}^{e}"))?);
                }
            }
            (None, None) => out.extend(value(lo)?..=value(hi)?),
            _ => bail!("range `{item}` mixes a power and an integer"),
        }
    }
    Ok(out)
}
