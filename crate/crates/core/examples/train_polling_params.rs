//! Grid-searches the polling parameters by cross-validation over a small synthetic corpus.

use pattern_poll::discovery::AlgorithmSpec;
use pattern_poll::evaluation::truth_boundaries;
use pattern_poll::polling::{train_pp, AlgorithmWeights, Objective, ParamGrid, TrainConfig, TrainingPiece};
use pattern_poll::synthesis::{synthesize, SynthConfig};
use pattern_poll::Time;

fn main() -> pattern_poll::Result<()> {
    let specs: Vec<AlgorithmSpec> = ["cosiatec", "siar:2"].iter().map(|s| s.parse()).collect::<Result<_, _>>()?;
    let mut pieces = Vec::new();
    for seed in 0..6 {
        let synth = synthesize(&SynthConfig::default().with_seed(seed))?;
        let records: Vec<_> = specs.iter().flat_map(|s| s.run(&synth.piece)).collect();
        let span = synth.span();
        let truth = truth_boundaries(&synth.ground_truth, span.0, Time::ONE);
        pieces.push(TrainingPiece::from_records(
            format!("synth{seed}"),
            &records,
            &AlgorithmWeights::new(),
            Time::ONE,
            span,
            truth,
        )?);
    }

    let config = TrainConfig { folds: 3, objective: Objective::F1, seed: 1, ..TrainConfig::default() };
    let outcome = train_pp(&pieces, &ParamGrid::default(), &config)?;
    let p = outcome.params;
    println!("{} candidates", outcome.candidates);
    println!(
        "best: window {} order {} lambda {} first {} second {} -> mean f1 {:.3}",
        p.window, p.order, p.lambda, p.use_first, p.use_second, outcome.score
    );
    for fold in &outcome.folds {
        println!("  held out {:?}: window {} lambda {} f1 {:.3}", fold.pieces, fold.params.window, fold.params.lambda, fold.score);
    }
    Ok(())
}
