//! JSON report envelope and exact-rational serialization.

use serde::ser::{SerializeSeq, Serializer};
use serde::Serialize;

use crate::Rational;

pub const TOOL_NAME: &str = "ttpack";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const REPORT_FORMAT_VERSION: u32 = 1;

/// Wraps every emitted report with provenance fields.
#[derive(Serialize)]
pub struct Envelope<'a, T: Serialize> {
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub format_version: u32,
    pub seed: u64,
    pub config: serde_json::Value,
    #[serde(flatten)]
    pub report: &'a T,
}

impl<'a, T: Serialize> Envelope<'a, T> {
    pub fn new(seed: u64, config: serde_json::Value, report: &'a T) -> Self {
        Envelope {
            tool: TOOL_NAME,
            tool_version: TOOL_VERSION,
            format_version: REPORT_FORMAT_VERSION,
            seed,
            config,
            report,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

/// `p/q` text form, also for integers (`7/1`).
pub fn ratio_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn ratio<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&ratio_string(r))
}

pub fn ratios<S: Serializer>(rs: &[Rational], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(rs.len()))?;
    for r in rs {
        seq.serialize_element(&ratio_string(r))?;
    }
    seq.end()
}

/// Parses `p/q` or an integer.
pub fn parse_ratio(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.trim().parse().ok()?;
            let q: i64 = q.trim().parse().ok()?;
            (q != 0).then(|| Rational::new(p, q))
        }
        None => s.parse().ok().map(Rational::from_integer),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_text() {
        assert_eq!(ratio_string(&Rational::new(306, 56)), "153/28");
        assert_eq!(ratio_string(&Rational::from_integer(7)), "7/1");
        assert_eq!(parse_ratio("35/4"), Some(Rational::new(35, 4)));
        assert_eq!(parse_ratio("12"), Some(Rational::from_integer(12)));
        assert_eq!(parse_ratio("1/0"), None);
        assert_eq!(parse_ratio("x"), None);
    }
}
