//! Which features separate planted patterns from random excerpts? Shadow-feature importance.

use pattern_poll::analysis::{feature_importance, sample_random_excerpts, Annotation, FeatureStatus, ImportanceConfig, LabeledDataset};
use pattern_poll::synthesis::{synthesize, SynthConfig};

fn main() -> pattern_poll::Result<()> {
    let mut corpus = Vec::new();
    let mut annotations = Vec::new();
    for seed in 0..20 {
        let synth = synthesize(&SynthConfig::default().with_seed(seed))?;
        for occurrence in synth.planted() {
            annotations.push(Annotation { piece: corpus.len(), occurrence });
        }
        corpus.push(synth.piece);
    }
    let patterns: Vec<_> = annotations.iter().map(|a| a.occurrence.clone()).collect();
    let random = sample_random_excerpts(&corpus, &annotations, 1, 11)?;
    let data = LabeledDataset::from_occurrences([("pattern", patterns.as_slice()), ("random", random.as_slice())]);

    let config = ImportanceConfig { runs: 10, trees: 100, seed: 11, ..ImportanceConfig::default() };
    let report = feature_importance(&data, &config)?;
    let mut features = report.features.clone();
    features.sort_by(|a, b| b.mean.total_cmp(&a.mean));
    for f in &features {
        let mark = match f.status {
            FeatureStatus::Confirmed => "+",
            FeatureStatus::Tentative => "?",
            FeatureStatus::Rejected => " ",
        };
        println!("{mark} {:<26} {:.4}  hits {:>2}/{}", f.name, f.mean, f.hits, report.runs);
    }
    Ok(())
}
