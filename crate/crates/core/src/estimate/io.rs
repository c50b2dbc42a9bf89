//! CSV output for estimates, weights and per-iteration diagnostics.

use std::io::Write;

use crate::error::Result;

use super::ma::IterationDiagnostics;
use super::weights::WeightTable;

pub fn write_estimates_to<W: Write>(rows: &[(&str, f64)], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["estimator", "estimate"])?;
    for (name, value) in rows {
        w.write_record([name.to_string(), value.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_weights_to<W: Write>(weights: &WeightTable, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["degree", "infected", "pi"])?;
    for (k, p) in weights.iter() {
        w.write_record([k.degree.to_string(), u8::from(k.infected).to_string(), p.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_diagnostics_to<W: Write>(diags: &[IterationDiagnostics], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "iteration",
        "eta",
        "eta_capped",
        "g_tilde",
        "anneal_residual",
        "mcmc_acceptance",
        "short_rate",
    ])?;
    for d in diags {
        w.write_record([
            d.iteration.to_string(),
            d.eta.to_string(),
            u8::from(d.eta_capped).to_string(),
            d.g_tilde.to_string(),
            d.anneal_residual.to_string(),
            d.mcmc_acceptance.to_string(),
            d.short_rate.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
