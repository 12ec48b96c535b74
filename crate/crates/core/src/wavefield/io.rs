//! Snapshot import and export.
//!
//! CSV files start with a `# {json}` metadata line holding the grid and time
//! tag, then a header row `x,re,im`. JSON snapshots are the serde form of
//! [`WaveFunction`], with each sample as a `[re, im]` pair.

use std::io::{BufRead, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{GridSpec, WaveError, WaveFunction};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    grid: GridSpec,
    time_tag: f64,
}

pub fn write_csv<W: Write>(psi: &WaveFunction, mut out: W) -> Result<(), WaveError> {
    let header = Header {
        grid: psi.grid,
        time_tag: psi.time_tag,
    };
    writeln!(out, "# {}", serde_json::to_string(&header)?)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "re", "im"])?;
    for (i, z) in psi.values.iter().enumerate() {
        w.write_record(&[psi.grid.x(i).to_string(), z.re.to_string(), z.im.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: BufRead>(mut input: R) -> Result<WaveFunction, WaveError> {
    let mut first = String::new();
    input.read_line(&mut first)?;
    let meta = first
        .trim_end()
        .strip_prefix("# ")
        .ok_or_else(|| WaveError::Format("missing '# {json}' metadata line".into()))?;
    let header: Header = serde_json::from_str(meta)?;
    let mut r = csv::Reader::from_reader(input);
    let cols = r.headers()?.clone();
    if cols.iter().collect::<Vec<_>>() != ["x", "re", "im"] {
        return Err(WaveError::Format(format!("expected columns x,re,im, got {cols:?}")));
    }
    let mut values = Vec::with_capacity(header.grid.n());
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let field = |k: usize| -> Result<f64, WaveError> {
            rec.get(k)
                .ok_or_else(|| WaveError::Format(format!("row {i}: missing column {k}")))?
                .parse::<f64>()
                .map_err(|e| WaveError::Format(format!("row {i}: {e}")))
        };
        let x = field(0)?;
        if (x - header.grid.x(i)).abs() > 1e-9 * header.grid.length() {
            return Err(WaveError::Format(format!(
                "row {i}: x = {x} does not match the grid point {}",
                header.grid.x(i)
            )));
        }
        values.push(Complex64::new(field(1)?, field(2)?));
    }
    WaveFunction::new(header.grid, values, header.time_tag)
}

pub fn write_json<W: Write>(psi: &WaveFunction, out: W) -> Result<(), WaveError> {
    serde_json::to_writer_pretty(out, psi)?;
    Ok(())
}

pub fn read_json<R: std::io::Read>(input: R) -> Result<WaveFunction, WaveError> {
    let psi: WaveFunction = serde_json::from_reader(input)?;
    WaveFunction::new(psi.grid, psi.values, psi.time_tag)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_is_exact() {
        let psi = WaveFunction::gaussian(GridSpec::new(32, 6.0).unwrap(), 0.3, 0.9, 1.1).with_time(0.25);
        let mut buf = Vec::new();
        write_csv(&psi, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# {\"grid\":{\"n\":32,\"length\":6.0},\"time_tag\":0.25}\nx,re,im\n"));
        let back = read_csv(buf.as_slice()).unwrap();
        assert_eq!(back, psi);
    }

    #[test]
    fn json_round_trip_is_exact() {
        let psi = WaveFunction::gaussian(GridSpec::new(16, 4.0).unwrap(), 0.0, 0.7, -0.4);
        let mut buf = Vec::new();
        write_json(&psi, &mut buf).unwrap();
        assert_eq!(read_json(buf.as_slice()).unwrap(), psi);
    }

    #[test]
    fn csv_errors() {
        assert!(read_csv("x,re,im\n".as_bytes()).is_err());
        let bad = "# {\"grid\":{\"n\":16,\"length\":4.0},\"time_tag\":0.0}\nx,re,im\n0.0,1,0\n";
        assert!(read_csv(bad.as_bytes()).is_err());
    }
}
