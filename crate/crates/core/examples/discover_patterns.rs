//! Runs every discovery algorithm on a piece and prints the best TECs by compression ratio.
//!
//! ```text
//! cargo run --example discover_patterns [piece.csv|piece.mid]
//! ```

use std::path::Path;

use pattern_poll::discovery::{siatec, tec_quality, AlgorithmSpec};
use pattern_poll::io::load_piece;
use pattern_poll::{Point, PointSet, Time};

fn demo_piece() -> PointSet {
    // a four-note motif, stated three times with a transposition and some filler
    let motif = [(0, 60), (1, 62), (2, 64), (3, 60)];
    let mut notes = Vec::new();
    for (offset, shift) in [(0, 0), (5, 7), (11, 0)] {
        notes.extend(motif.iter().map(|&(t, p)| Point::crotchet(t + offset, (p + shift) as u8)));
    }
    notes.push(Point::crotchet(4, 55));
    notes.push(Point::crotchet(9, 72));
    notes.push(Point::crotchet(10, 48));
    PointSet::new(notes).with_title("demo")
}

fn main() -> pattern_poll::Result<()> {
    let piece = match std::env::args().nth(1) {
        Some(path) => load_piece(Path::new(&path))?,
        None => demo_piece(),
    };
    println!("{} notes", piece.len());

    for alg in ["sia", "siatec", "cosiatec", "siatec-compress:cr", "siar:3", "siarct:1/2,3"] {
        let spec: AlgorithmSpec = alg.parse()?;
        let records = spec.run(&piece);
        let occ: usize = records.iter().map(|r| r.occurrences().len()).sum();
        println!("{alg:>20}: {:>5} patterns, {occ:>6} occurrences", records.len());
    }

    let mut tecs: Vec<_> = siatec(&piece).into_iter().map(|t| (tec_quality(&t, &piece), t)).collect();
    tecs.sort_by_key(|t| std::cmp::Reverse(t.0.compression_ratio));
    println!("\nbest TECs by compression ratio:");
    for (q, t) in tecs.iter().take(3) {
        let notes: Vec<String> = t.pattern.iter().map(|p| format!("({},{})", p.onset, p.pitch)).collect();
        let shifts: Vec<String> = t.translators.iter().map(|v| format!("{:+}/{:+}", v.dt.to_f64(), v.dp)).collect();
        println!(
            "  CR {} ({:.2}) pattern {} translators {}",
            Time::from_ratio(q.compression_ratio),
            Time::from_ratio(q.compression_ratio).to_f64(),
            notes.join(" "),
            shifts.join(" ")
        );
    }
    Ok(())
}
