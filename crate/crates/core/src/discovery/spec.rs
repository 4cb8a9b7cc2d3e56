use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;

use super::{cosiatec, siarct, sia, siar, siatec, siatec_compress, Mtp, SiarctParams, SortKey, Tec};
use crate::error::{invalid, Error, Result};
use crate::model::{PatternOccurrence, PatternRecord, Point, PointSet};
use crate::time::{parse_rational, Time};

/// An algorithm id as written in the interchange files and on the command line:
/// `sia`, `siatec`, `cosiatec`, `siatec-compress:<cr|comp|cov>`, `siar:<r>`,
/// `siarct:<a>,<b>` (optionally `siarct:<a>,<b>,<r>`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlgorithmSpec {
    Sia,
    Siatec,
    Cosiatec,
    SiatecCompress(SortKey),
    Siar(usize),
    Siarct(SiarctParams),
}

impl FromStr for AlgorithmSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        match (name, arg) {
            ("sia", None) => Ok(AlgorithmSpec::Sia),
            ("siatec", None) => Ok(AlgorithmSpec::Siatec),
            ("cosiatec", None) => Ok(AlgorithmSpec::Cosiatec),
            ("siatec-compress", Some(k)) => Ok(AlgorithmSpec::SiatecCompress(k.parse()?)),
            ("siar", Some(r)) => match r.parse::<usize>() {
                Ok(r) if r >= 1 => Ok(AlgorithmSpec::Siar(r)),
                _ => Err(invalid(format!("siar memory size must be a positive integer, got '{r}'"))),
            },
            ("siarct", Some(args)) => {
                let parts: Vec<&str> = args.split(',').map(str::trim).collect();
                if !(2..=3).contains(&parts.len()) {
                    return Err(invalid(format!("siarct expects <a>,<b>[,<r>], got '{args}'")));
                }
                let a = parse_rational(parts[0]).map_err(invalid)?;
                if a <= Ratio::from_integer(0) || a > Ratio::from_integer(1) {
                    return Err(invalid(format!("siarct compactness threshold must be in (0,1], got {a}")));
                }
                let b: usize = parts[1]
                    .parse()
                    .ok()
                    .filter(|&b| b >= 1)
                    .ok_or_else(|| invalid(format!("siarct minimum size must be >= 1, got '{}'", parts[1])))?;
                let r = match parts.get(2) {
                    Some(r) => r
                        .parse()
                        .ok()
                        .filter(|&r| r >= 1)
                        .ok_or_else(|| invalid(format!("siarct memory size must be >= 1, got '{r}'")))?,
                    None => SiarctParams::default().r,
                };
                Ok(AlgorithmSpec::Siarct(SiarctParams { r, a, b }))
            }
            _ => Err(invalid(format!("unknown algorithm '{s}'"))),
        }
    }
}

impl fmt::Display for AlgorithmSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgorithmSpec::Sia => f.write_str("sia"),
            AlgorithmSpec::Siatec => f.write_str("siatec"),
            AlgorithmSpec::Cosiatec => f.write_str("cosiatec"),
            AlgorithmSpec::SiatecCompress(k) => write!(f, "siatec-compress:{k}"),
            AlgorithmSpec::Siar(r) => write!(f, "siar:{r}"),
            AlgorithmSpec::Siarct(p) => {
                let a = Time::from_ratio(p.a);
                if p.r == SiarctParams::default().r {
                    write!(f, "siarct:{a},{}", p.b)
                } else {
                    write!(f, "siarct:{a},{},{}", p.b, p.r)
                }
            }
        }
    }
}

impl AlgorithmSpec {
    /// Runs the algorithm and converts its output to pattern records tagged with this id.
    pub fn run(&self, d: &PointSet) -> Vec<PatternRecord> {
        let id = self.to_string();
        match self {
            AlgorithmSpec::Sia => mtp_records(&id, &sia(d)),
            AlgorithmSpec::Siar(r) => mtp_records(&id, &siar(d, *r)),
            AlgorithmSpec::Siatec => tec_records(&id, &siatec(d)),
            AlgorithmSpec::Cosiatec => tec_records(&id, &cosiatec(d)),
            AlgorithmSpec::SiatecCompress(k) => tec_records(&id, &siatec_compress(d, *k)),
            AlgorithmSpec::Siarct(p) => tec_records(&id, &siarct(d, *p)),
        }
    }
}

/// Each MTP becomes a two-occurrence pattern: itself and its translate.
pub fn mtp_records(algorithm: &str, mtps: &[Mtp]) -> Vec<PatternRecord> {
    mtps.iter()
        .enumerate()
        .filter_map(|(i, m)| {
            let moved: Vec<Point> = m
                .points
                .iter()
                .map(|p| {
                    let (onset, pitch) = m.vector.apply(p);
                    Point { onset, pitch: pitch as u8, duration: p.duration }
                })
                .collect();
            let occs = vec![PatternOccurrence::new(m.points.clone()).ok()?, PatternOccurrence::new(moved).ok()?];
            PatternRecord::new(algorithm, format!("p{i}"), occs).ok()
        })
        .collect()
}

pub fn tec_records(algorithm: &str, tecs: &[Tec]) -> Vec<PatternRecord> {
    tecs.iter()
        .enumerate()
        .filter_map(|(i, t)| {
            let occs: Vec<PatternOccurrence> =
                t.occurrences().into_iter().filter_map(|o| PatternOccurrence::new(o).ok()).collect();
            PatternRecord::new(algorithm, format!("p{i}"), occs).ok()
        })
        .collect()
}
