//! Can a classifier tell planted pattern occurrences from random excerpts of the same length?
//! Builds the feature table and runs repeated stratified cross-validation for every classifier.

use pattern_poll::analysis::{cross_validate, sample_random_excerpts, Annotation, CvConfig, LabeledDataset};
use pattern_poll::synthesis::{synthesize, SynthConfig};

fn main() -> pattern_poll::Result<()> {
    let mut corpus = Vec::new();
    let mut annotations = Vec::new();
    for seed in 0..30 {
        let synth = synthesize(&SynthConfig::default().with_seed(seed))?;
        for occurrence in synth.planted() {
            annotations.push(Annotation { piece: corpus.len(), occurrence });
        }
        corpus.push(synth.piece);
    }
    let patterns: Vec<_> = annotations.iter().map(|a| a.occurrence.clone()).collect();
    let random = sample_random_excerpts(&corpus, &annotations, 1, 5)?;
    let data = LabeledDataset::from_occurrences([("pattern", patterns.as_slice()), ("random", random.as_slice())]);
    println!("{} rows x {} features", data.len(), data.dim());

    let config = CvConfig { seed: 5, params: pattern_poll::analysis::ClassifierParams { trees: 100, ..Default::default() }, ..CvConfig::default() };
    let report = cross_validate(&data, &config)?;
    println!("{}-fold cv, {} repeats, balanced {}", report.folds, report.repeats, report.balance);
    for r in &report.results {
        println!("  {:>3}: accuracy {:.3} (variance {:.5})", r.classifier, r.accuracy_mean, r.accuracy_variance);
        println!("       confusion (rows predicted, columns true): {:?}", r.confusion_mean);
    }
    Ok(())
}
