use anyhow::Result;
use polarblend::io::{render_records, Format};
use polarblend::QuadTensor;
use serde::Serialize;

use crate::OutputFormat;

pub fn json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

pub fn csv<T: Serialize>(rows: &[T]) -> Result<String> {
    Ok(render_records(rows, Format::Csv, &[])?)
}

/// Print whichever rendering the format asks for.
pub fn print(format: OutputFormat, text: impl FnOnce() -> String, json: impl FnOnce() -> Result<String>, csv: impl FnOnce() -> Result<String>) -> Result<()> {
    let out = match format {
        OutputFormat::Text => text(),
        OutputFormat::Json => json()?,
        OutputFormat::Csv => csv()?,
    };
    print!("{out}");
    if !out.ends_with('\n') {
        println!();
    }
    Ok(())
}

pub fn matrix(name: &str, t: &QuadTensor) -> String {
    let m = t.matrix();
    let mut s = format!("{name} (MPa)\n");
    for i in 0..3 {
        s.push_str(&format!("  {:>12.4} {:>12.4} {:>12.4}\n", m[(i, 0)], m[(i, 1)], m[(i, 2)]));
    }
    s
}
