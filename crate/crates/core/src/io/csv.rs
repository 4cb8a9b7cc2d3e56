//! `onset,pitch,duration` point lists.

use crate::error::{Error, Result};
use crate::model::{Point, PointSet};
use crate::time::{parse_rational, Time};

/// Parses one note per line. A pitch of `R` marks a rest, which is validated and then dropped.
/// Blank lines, `#` comments and an `onset,pitch,duration` header are skipped.
pub fn parse_points_csv(text: &str) -> Result<PointSet> {
    let mut points = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim_end_matches('\r').trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if line_no == 1 && fields.first().is_some_and(|f| f.eq_ignore_ascii_case("onset")) {
            continue;
        }
        let err = |message: String| Error::Csv { line: line_no, message };
        if fields.len() != 3 {
            return Err(err(format!("expected 3 fields, found {}", fields.len())));
        }
        let onset = Time::from_ratio(parse_rational(fields[0]).map_err(err)?);
        let duration = Time::from_ratio(parse_rational(fields[2]).map_err(err)?);
        if !duration.is_positive() {
            return Err(err(format!("duration must be > 0, got {duration}")));
        }
        if fields[1].eq_ignore_ascii_case("r") {
            continue;
        }
        let pitch: i64 = fields[1]
            .parse()
            .map_err(|_| err(format!("pitch '{}' is not an integer", fields[1])))?;
        if !(0..=127).contains(&pitch) {
            return Err(err(format!("pitch {pitch} outside 0..=127")));
        }
        points.push(Point { onset, pitch: pitch as u8, duration });
    }
    Ok(PointSet::new(points))
}

pub fn emit_points_csv(ps: &PointSet) -> String {
    let mut out = String::from("onset,pitch,duration\n");
    for p in ps.points() {
        out.push_str(&format!("{},{},{}\n", p.onset, p.pitch, p.duration));
    }
    out
}
