//! Reads a piece from MIDI (or synthesizes one), writes it back as a standard MIDI file and as
//! points CSV, and checks that both read back to the same notes.

use std::path::Path;

use pattern_poll::io::{emit_points_csv, load_piece, parse_midi, parse_points_csv, write_smf, MidiOptions, TrackSelect};
use pattern_poll::synthesis::{synthesize, SynthConfig};

fn main() -> pattern_poll::Result<()> {
    let piece = match std::env::args().nth(1) {
        Some(path) => load_piece(Path::new(&path))?,
        None => synthesize(&SynthConfig::default())?.piece,
    };

    let smf = write_smf(&piece, 480)?;
    let back = parse_midi(&smf, &MidiOptions { track: TrackSelect::All, monophonic: false })?;
    println!("{} notes -> {} bytes of MIDI -> {} notes", piece.len(), smf.len(), back.len());
    assert_eq!(back.points(), piece.points());

    let csv = emit_points_csv(&piece);
    assert_eq!(parse_points_csv(&csv)?.points(), piece.points());
    println!("first lines of the CSV form:");
    for line in csv.lines().take(5) {
        println!("  {line}");
    }
    match piece.check_monophonic() {
        Ok(()) => println!("monophonic"),
        Err(e) => println!("not monophonic: {e}"),
    }
    Ok(())
}
