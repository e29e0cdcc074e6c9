//! JSON-lines helpers for transcript batches.

use std::io::{BufRead, Write};

use serde::{de::DeserializeOwned, Serialize};

use crate::error::Result;

pub fn write_json_lines<W: Write, T: Serialize>(mut out: W, items: &[T]) -> std::io::Result<()> {
    for item in items {
        serde_json::to_writer(&mut out, item)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_json_lines<R: BufRead, T: DeserializeOwned>(input: R) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for line in input.lines() {
        let line = line.map_err(serde_json::Error::io)?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line)?);
    }
    Ok(out)
}
