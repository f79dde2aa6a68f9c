//! Flag value parsers.

use std::f64::consts::PI;

use fracrev::params::parse_rational;
use fracrev::{CouplingTable, Rational};

pub fn rational(s: &str) -> Result<Rational, String> {
    parse_rational(s.trim()).map_err(|e| e.to_string())
}

pub fn positive_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` must be positive"))
    }
}

/// A number, a fraction, or a rational multiple of pi: `0.3`, `1/2`,
/// `pi/6`, `-2pi/3`, `12pi`, `3*pi/4`.
pub fn angle(s: &str) -> Result<f64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let t = t.to_ascii_lowercase();
    let Some(at) = t.find("pi") else {
        return plain(&t).ok_or_else(|| format!("cannot read `{s}` as an angle"));
    };
    let head = t[..at].trim_end_matches('*');
    let tail = &t[at + 2..];
    let coef = match head {
        "" | "+" => 1.0,
        "-" => -1.0,
        h => plain(h).ok_or_else(|| format!("bad coefficient in `{s}`"))?,
    };
    let denom = match tail {
        "" => 1.0,
        d => d
            .strip_prefix('/')
            .and_then(plain)
            .filter(|v| *v != 0.0)
            .ok_or_else(|| format!("bad denominator in `{s}`"))?,
    };
    Ok(coef * PI / denom)
}

fn plain(s: &str) -> Option<f64> {
    if let Ok(r) = parse_rational(s) {
        return Some(*r.numer() as f64 / *r.denom() as f64);
    }
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// A number or fraction in `[0, 1]` given as text.
pub fn unit_interval(s: &str) -> Result<f64, String> {
    let v = plain(s.trim()).ok_or_else(|| format!("`{s}` is not a number"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("`{s}` must lie in [0, 1]"))
    }
}

/// Table edit: `J3*1.01`, `B2=4.5` or `J1+0.1` (1-based `J`, 0-based `B`).
#[derive(Debug, Clone, PartialEq)]
pub struct Override {
    pub coupling: bool,
    pub index: usize,
    pub op: char,
    pub value: f64,
}

pub fn override_spec(s: &str) -> Result<Override, String> {
    let s = s.trim();
    let mut chars = s.chars();
    let coupling = match chars.next() {
        Some('J') | Some('j') => true,
        Some('B') | Some('b') => false,
        _ => return Err(format!("`{s}`: expected J<n> or B<n>")),
    };
    let rest = chars.as_str();
    let pos = rest
        .find(['*', '=', '+'])
        .ok_or_else(|| format!("`{s}`: expected one of * = +"))?;
    let index: usize = rest[..pos].parse().map_err(|_| format!("`{s}`: bad index"))?;
    let op = rest[pos..].chars().next().unwrap_or('=');
    let value = plain(&rest[pos + 1..]).ok_or_else(|| format!("`{s}`: bad value"))?;
    Ok(Override {
        coupling,
        index,
        op,
        value,
    })
}

impl Override {
    pub fn apply(&self, table: &CouplingTable) -> Result<CouplingTable, String> {
        let (mut fields, mut couplings) = table.clone().into_parts();
        let slot = if self.coupling {
            if self.index == 0 || self.index > couplings.len() {
                return Err(format!("J{} does not exist (J_1..J_{})", self.index, couplings.len()));
            }
            &mut couplings[self.index - 1]
        } else {
            if self.index >= fields.len() {
                return Err(format!("B{} does not exist (B_0..B_{})", self.index, fields.len() - 1));
            }
            &mut fields[self.index]
        };
        match self.op {
            '*' => *slot *= self.value,
            '+' => *slot += self.value,
            _ => *slot = self.value,
        }
        CouplingTable::new(fields, couplings).map_err(|e| e.to_string())
    }
}
