//! Ingestion and emission of pieces and pattern files.

pub mod csv;
pub mod interchange;
pub mod midi;

pub use self::csv::{emit_points_csv, parse_points_csv};
pub use self::interchange::{emit_pattern_json, load_pattern_json, load_pattern_file, PatternFile};
pub use self::midi::{parse_midi, write_smf, MidiOptions, TrackSelect};

use std::path::Path;

use crate::error::Result;
use crate::model::PointSet;

/// Loads a piece from `.mid` / `.midi` (densest track) or from points CSV.
pub fn load_piece(path: &Path) -> Result<PointSet> {
    load_piece_with(path, &MidiOptions::default())
}

pub fn load_piece_with(path: &Path, midi: &MidiOptions) -> Result<PointSet> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
        .unwrap_or_default();
    let mut ps = match ext.as_str() {
        "mid" | "midi" => parse_midi(&std::fs::read(path)?, midi)?,
        _ => parse_points_csv(&std::fs::read_to_string(path)?)?,
    };
    ps.source = Some(path.display().to_string());
    if ps.title.is_none() {
        ps.title = path.file_stem().map(|s| s.to_string_lossy().into_owned());
    }
    Ok(ps)
}
