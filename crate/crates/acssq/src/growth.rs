//! CSV export of qubit growth tables.

use std::io::Write;

use acssq_core::resources::GrowthRow;

pub fn write_csv<W: Write>(rows: &[GrowthRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["states", "tape_len", "steps", "base", "slope", "total"])?;
    for r in rows {
        w.write_record([
            r.states.to_string(),
            r.tape_len.to_string(),
            r.steps.to_string(),
            r.base.to_string(),
            r.slope.to_string(),
            r.total.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
