use std::io::Write;

use super::{SolverTrace, Variant};
use crate::error::Result;

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| format!("{x:?}"))
}

/// Writes the trace as CSV: `#`-prefixed configuration lines, then one row
/// per iteration under `k,e_omega,L,d_k,ell_bar,cost,q_value,forced`.
/// `extra` adds caller-side `#` lines (problem description, seeds).
pub fn write_trace_csv<P, W: Write>(trace: &SolverTrace<P>, extra: &[(String, String)], mut out: W) -> Result<()> {
    for (k, v) in extra.iter().chain(trace.config.echo().iter()) {
        writeln!(out, "# {k}={v}")?;
    }
    let d_def = if trace.config.variant == Variant::Irapm {
        "sqrt(|dX|^2+|dY|^2-Q)"
    } else {
        "sqrt(|dX|^2+|dY|^2)"
    };
    writeln!(out, "# d_k={d_def}")?;
    writeln!(out, "k,e_omega,L,d_k,ell_bar,cost,q_value,forced")?;
    for r in &trace.records {
        writeln!(
            out,
            "{},{:?},{},{:?},{},{},{},{}",
            r.k,
            r.e_omega,
            opt(r.l_value),
            r.d_k,
            r.ell_bar,
            r.cost,
            opt(r.q_value),
            r.forced
        )?;
    }
    Ok(())
}
