//! CSV coefficient tables and field samples.
//!
//! Floats are written with Rust's shortest round-trip `{:e}` formatting, so
//! reading a table back reproduces every coefficient bit for bit.

use std::io::{Read, Write};

use anyhow::{bail, Context};
use serde::Deserialize;
use wtc_nls::verify::FieldSample;
use wtc_nls::{Complex64, Jet64, Series64};

pub const COEFFICIENT_HEADER: [&str; 7] = ["j", "m", "re_u", "im_u", "re_v", "im_v", "valid_order"];
pub const SAMPLE_HEADER: [&str; 7] = ["x", "t", "re_u", "im_u", "abs_u", "abs_psi", "residual"];

fn float(x: f64) -> String {
    format!("{x:e}")
}

pub fn write_coefficients<W: Write>(series: &Series64, out: W) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COEFFICIENT_HEADER)?;
    for (j, (u, v)) in series.u.iter().zip(&series.v).enumerate() {
        let valid = series.valid_order[j].to_string();
        for m in 0..=u.order().min(v.order()) {
            let (a, b) = (u.coeff(m), v.coeff(m));
            w.write_record([
                j.to_string(),
                m.to_string(),
                float(a.re),
                float(a.im),
                float(b.re),
                float(b.im),
                valid.clone(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Deserialize)]
struct Row {
    j: usize,
    m: usize,
    re_u: f64,
    im_u: f64,
    re_v: f64,
    im_v: f64,
    valid_order: usize,
}

/// Rebuilds a series from a coefficient table. Jets are expanded about `t0`.
pub fn read_coefficients<R: Read>(input: R, t0: f64) -> anyhow::Result<Series64> {
    let mut reader = csv::Reader::from_reader(input);
    let header = reader.headers()?.clone();
    if header.iter().ne(COEFFICIENT_HEADER) {
        bail!("unexpected header {:?}", header.iter().collect::<Vec<_>>());
    }
    let mut u: Vec<Vec<Complex64>> = Vec::new();
    let mut v: Vec<Vec<Complex64>> = Vec::new();
    let mut valid = Vec::new();
    for (line, record) in reader.deserialize::<Row>().enumerate() {
        let row = record.with_context(|| format!("row {}", line + 2))?;
        if row.j == u.len() && row.m == 0 {
            u.push(Vec::new());
            v.push(Vec::new());
            valid.push(row.valid_order);
        }
        let expected = (u.len().saturating_sub(1), u.last().map_or(0, Vec::len));
        if (row.j, row.m) != expected {
            bail!(
                "row {}: expected j = {}, m = {}, found j = {}, m = {}",
                line + 2,
                expected.0,
                expected.1,
                row.j,
                row.m
            );
        }
        u[row.j].push(Complex64::new(row.re_u, row.im_u));
        v[row.j].push(Complex64::new(row.re_v, row.im_v));
    }
    let jets =
        |c: Vec<Vec<Complex64>>| c.into_iter().map(|c| Jet64::new(t0, c)).collect::<Vec<_>>();
    let mut series = Series64::from_coefficients(jets(u), jets(v))?;
    series.valid_order = valid;
    Ok(series)
}

pub fn write_samples<W: Write>(samples: &[FieldSample<f64>], out: W) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SAMPLE_HEADER)?;
    for s in samples {
        w.write_record([
            float(s.x),
            float(s.t),
            float(s.u.re),
            float(s.u.im),
            float(s.u.norm()),
            float(s.big_psi),
            float(s.residual),
        ])?;
    }
    w.flush()?;
    Ok(())
}
