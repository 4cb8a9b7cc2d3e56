//! Fuses two analyzers' output on a synthetic piece with pattern polling and scores the
//! resulting boundaries against the planted ground truth.

use num_rational::Ratio;
use pattern_poll::discovery::AlgorithmSpec;
use pattern_poll::evaluation::{boundary_prf, truth_boundaries};
use pattern_poll::polling::{extract_boundaries, polling_curve, AlgorithmWeights, PpParams};
use pattern_poll::synthesis::{synthesize, SynthConfig};
use pattern_poll::Time;

fn main() -> pattern_poll::Result<()> {
    let synth = synthesize(&SynthConfig::default().with_seed(7))?;
    let span = synth.span();

    let mut records = Vec::new();
    for alg in ["cosiatec", "siar:2"] {
        records.extend(alg.parse::<AlgorithmSpec>()?.run(&synth.piece));
    }
    let mut weights = AlgorithmWeights::new();
    weights.set("cosiatec", Ratio::from_integer(2));

    let curve = polling_curve(&records, &weights, Time::ONE, span)?;
    let params = PpParams { window: 5, order: 2, lambda: 0.5, use_first: false, use_second: true };
    let found = extract_boundaries(&curve, &params)?;
    let truth = truth_boundaries(&synth.ground_truth, curve.origin, curve.resolution);

    let peak = curve.to_f64().into_iter().fold(0.0, f64::max);
    println!("curve over {} grid points, peak {peak}", curve.len());
    println!("boundaries found: {:?}", found.indices());
    println!("boundaries true:  {:?}", truth.indices());
    let (p, r, f) = boundary_prf(&found, &truth, Time::ONE).as_f64();
    println!("precision {p:.3} recall {r:.3} f1 {f:.3}");
    Ok(())
}
