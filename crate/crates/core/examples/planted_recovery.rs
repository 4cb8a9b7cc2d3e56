//! Plants two patterns in random material and asks how well SIA and COSIATEC recover them.

use num_rational::Ratio;
use pattern_poll::discovery::AlgorithmSpec;
use pattern_poll::evaluation::occurrence_recovery;
use pattern_poll::synthesis::{synthesize, Segment, SynthConfig};
use pattern_poll::Time;

fn main() -> pattern_poll::Result<()> {
    let synth = synthesize(&SynthConfig::default().with_seed(3))?;
    println!(
        "{} notes over {} crotchets, {:.0}% random material",
        synth.piece.len(),
        synth.duration,
        100.0 * synth.random_fraction()
    );
    for seg in &synth.layout {
        match seg {
            Segment::Random { start, slots } => println!("  {:>4}  random x{slots}", start.to_string()),
            Segment::Planted { start, template } => println!("  {:>4}  {template}", start.to_string()),
        }
    }

    let planted = synth.planted();
    for alg in ["sia", "cosiatec"] {
        let found = alg.parse::<AlgorithmSpec>()?.run(&synth.piece);
        let report = occurrence_recovery(&found, &planted, Ratio::new(4, 5));
        println!("\n{alg}: {} patterns, {} spurious", found.len(), report.spurious);
        for (occ, p) in planted.iter().zip(&report.planted) {
            let (s, e) = occ.span();
            println!(
                "  planted [{s}, {e}) best jaccard {:.2} recovered {}",
                Time::from_ratio(p.best_jaccard).to_f64(),
                p.recovered
            );
        }
    }
    Ok(())
}
