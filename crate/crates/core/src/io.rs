//! Flat-file formats: coupling-table CSV, solution and spectrum JSON, and
//! the evolution time series.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chain::CouplingTable;
use crate::error::{Error, Result};
use crate::params::{format_rational, FrSolution};

/// 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_table_csv<W: Write>(table: &CouplingTable, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["n", "B_n", "J_n"])?;
    for n in 0..=table.n() {
        let j = if n == 0 { String::new() } else { fmt_f64(table.coupling(n)) };
        out.write_record([n.to_string(), fmt_f64(table.field(n)), j])?;
    }
    out.flush()?;
    Ok(())
}

pub fn table_to_csv_string(table: &CouplingTable) -> Result<String> {
    let mut buf = Vec::new();
    write_table_csv(table, &mut buf)?;
    String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))
}

#[derive(Debug, Deserialize)]
struct TableRow {
    n: usize,
    #[serde(rename = "B_n")]
    b: f64,
    #[serde(rename = "J_n")]
    j: Option<f64>,
}

pub fn read_table_csv<R: Read>(r: R) -> Result<CouplingTable> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    let mut fields = Vec::new();
    let mut couplings = Vec::new();
    for (expected, row) in rdr.deserialize::<TableRow>().enumerate() {
        let row = row.map_err(|e| Error::Parse(e.to_string()))?;
        if row.n != expected {
            return Err(Error::Table(format!("row {expected} is labelled n = {}", row.n)));
        }
        fields.push(row.b);
        match (row.n, row.j) {
            (0, None) => {}
            (0, Some(_)) => return Err(Error::Table("J_n must be empty for n = 0".into())),
            (n, None) => return Err(Error::Table(format!("missing J_n at n = {n}"))),
            (_, Some(j)) => couplings.push(j),
        }
    }
    CouplingTable::new(fields, couplings)
}

pub fn save_table(table: &CouplingTable, path: &Path) -> Result<()> {
    write_table_csv(table, File::create(path)?)
}

pub fn load_table(path: &Path) -> Result<CouplingTable> {
    read_table_csv(File::open(path)?)
}

/// Normalised profile `n, B_n / max|B|, J_n / max|J|` for plotting.
pub fn write_profile_csv<W: Write>(table: &CouplingTable, w: W) -> Result<()> {
    let b_max = table.fields().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let j_max = table.couplings().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let scale = |v: f64, m: f64| if m == 0.0 { 0.0 } else { v / m };
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["n", "B_norm", "J_norm"])?;
    for n in 0..=table.n() {
        let j = if n == 0 {
            String::new()
        } else {
            fmt_f64(scale(table.coupling(n), j_max))
        };
        out.write_record([n.to_string(), fmt_f64(scale(table.field(n), b_max)), j])?;
    }
    out.flush()?;
    Ok(())
}

/// JSON record of one solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub alpha1: i64,
    pub beta1: i64,
    pub beta2: i64,
    pub dgamma: i64,
    pub a: String,
    pub c: String,
    pub theta_p: i64,
    pub theta_q: i64,
    #[serde(rename = "T_over_pi")]
    pub t_over_pi: i64,
    pub phi: f64,
    pub pst_multiple: Option<u32>,
}

impl From<&FrSolution> for SolutionRecord {
    fn from(s: &FrSolution) -> Self {
        SolutionRecord {
            alpha1: s.alpha1,
            beta1: s.beta1,
            beta2: s.beta2,
            dgamma: s.dgamma(),
            a: format_rational(s.a),
            c: format_rational(s.c),
            theta_p: *s.theta.numer(),
            theta_q: *s.theta.denom(),
            t_over_pi: s.alpha1,
            phi: s.phi(),
            pst_multiple: s.pst_multiple,
        }
    }
}

impl SolutionRecord {
    /// Rebuilds the solution from its betas and checks the stored fields.
    pub fn to_solution(&self) -> Result<FrSolution> {
        let s = FrSolution::from_betas(self.alpha1, self.beta1, self.beta2)?;
        if SolutionRecord::from(&s).dgamma != self.dgamma {
            return Err(Error::Parse(format!(
                "record dgamma {} disagrees with betas (expected {})",
                self.dgamma,
                s.dgamma()
            )));
        }
        Ok(s)
    }
}

pub fn solutions_to_json(solutions: &[FrSolution]) -> Result<String> {
    let records: Vec<SolutionRecord> = solutions.iter().map(SolutionRecord::from).collect();
    serde_json::to_string_pretty(&records).map_err(|e| Error::Io(e.to_string()))
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))
}

pub fn from_json<T: for<'de> Deserialize<'de>>(s: &str) -> Result<T> {
    serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
}

/// Serialises flat records as CSV with a header row.
pub fn records_to_csv<T: Serialize>(records: &[T]) -> Result<String> {
    let mut out = csv::Writer::from_writer(Vec::new());
    for r in records {
        out.serialize(r)?;
    }
    let buf = out.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeRow {
    pub t: f64,
    pub site: usize,
    pub abs_amplitude: f64,
    pub re: f64,
    pub im: f64,
}

pub fn time_rows(series: &[(f64, DVector<Complex64>)]) -> Vec<TimeRow> {
    series
        .iter()
        .flat_map(|(t, state)| {
            state.iter().enumerate().map(move |(site, z)| TimeRow {
                t: *t,
                site,
                abs_amplitude: z.norm(),
                re: z.re,
                im: z.im,
            })
        })
        .collect()
}

/// Writes `t,site,abs_amplitude,re,im`, one row per time and site.
pub fn write_time_series_csv<W: Write>(series: &[(f64, DVector<Complex64>)], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["t", "site", "abs_amplitude", "re", "im"])?;
    for (t, state) in series {
        for (site, z) in state.iter().enumerate() {
            out.write_record([
                fmt_f64(*t),
                site.to_string(),
                fmt_f64(z.norm()),
                fmt_f64(z.re),
                fmt_f64(z.im),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{assemble_jacobi, couplings};
    use crate::dynamics::Evolution;
    use crate::params::{validate_params, Rational, Variant};
    use crate::spectral::{bilattice, Spectrum};

    fn table5() -> CouplingTable {
        let p = validate_params(Rational::new(7, 6), Rational::new(4, 3), 5, Variant::OddN).unwrap();
        couplings(&p).unwrap()
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let t = table5();
        let text = table_to_csv_string(&t).unwrap();
        assert!(text.starts_with("n,B_n,J_n\n0,4.0694444444444"));
        assert_eq!(text.lines().count(), 7);
        let back = read_table_csv(text.as_bytes()).unwrap();
        assert_eq!(back.fields(), t.fields());
        assert_eq!(back.couplings(), t.couplings());
    }

    #[test]
    fn csv_rejects_bad_rows() {
        assert!(read_table_csv("n,B_n,J_n\n0,1.0,2.0\n".as_bytes()).is_err());
        assert!(read_table_csv("n,B_n,J_n\n0,1.0,\n1,1.0,\n".as_bytes()).is_err());
        assert!(read_table_csv("n,B_n,J_n\n0,1.0,\n2,1.0,1.0\n".as_bytes()).is_err());
        assert!(read_table_csv("n,B_n,J_n\n0,x,\n".as_bytes()).is_err());
    }

    #[test]
    fn solution_record_fields() {
        let s = FrSolution::from_betas(6, 14, 16).unwrap();
        let rec = SolutionRecord::from(&s);
        assert_eq!((rec.a.as_str(), rec.c.as_str()), ("7/6", "4/3"));
        assert_eq!((rec.theta_p, rec.theta_q, rec.t_over_pi), (3, 2, 6));
        let json = serde_json::to_value(&rec).unwrap();
        for key in ["alpha1", "beta1", "beta2", "dgamma", "a", "c", "theta_p", "theta_q", "T_over_pi", "phi", "pst_multiple"] {
            assert!(json.get(key).is_some(), "{key}");
        }
        assert_eq!(rec.to_solution().unwrap(), s);
    }

    #[test]
    fn spectrum_json_shape() {
        let p = validate_params(Rational::new(7, 6), Rational::new(4, 3), 5, Variant::OddN).unwrap();
        let json = to_json(&bilattice(&p)).unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["sublattice"][0], "a");
        assert_eq!(v["sublattice"][1], "c");
        let back: Spectrum = from_json(&json).unwrap();
        assert_eq!(back, bilattice(&p));
    }

    #[test]
    fn time_series_rows() {
        let ev = Evolution::new(&assemble_jacobi(&table5())).unwrap();
        let mut buf = Vec::new();
        write_time_series_csv(&ev.sample(1.0, 4), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + 4 * 6);
        assert!(text.starts_with("t,site,abs_amplitude,re,im\n"));
        let mut buf = Vec::new();
        write_time_series_csv(&ev.sample(0.0, 601), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().nth(1).unwrap().split(',').nth(2).unwrap(), fmt_f64(1.0));
    }
}
