//! Synthetic pieces: planted templates interleaved with random excerpts, with the planted
//! placements recorded as ground truth.

use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::model::{PatternOccurrence, PatternRecord, Point, PointSet};
use crate::time::Time;

/// Algorithm name carried by ground-truth records.
pub const TRUTH_ALGORITHM: &str = "truth";

/// One slot of a template or random segment: a pitch, or a rest when `pitch` is `None`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Slot {
    pub pitch: Option<u8>,
    pub duration: Time,
}

impl Slot {
    pub fn note(pitch: u8) -> Self {
        Slot { pitch: Some(pitch), duration: Time::ONE }
    }

    pub fn rest() -> Self {
        Slot { pitch: None, duration: Time::ONE }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternTemplate {
    pub name: String,
    pub notes: Vec<Slot>,
}

impl PatternTemplate {
    pub fn duration(&self) -> Time {
        self.notes.iter().map(|s| s.duration).sum()
    }

    pub fn pitches(&self) -> impl Iterator<Item = u8> + '_ {
        self.notes.iter().filter_map(|s| s.pitch)
    }

    /// The template's notes with the first slot at `offset`.
    pub fn realize(&self, offset: Time) -> Vec<Point> {
        let mut t = offset;
        let mut out = Vec::new();
        for s in &self.notes {
            if let Some(p) = s.pitch {
                out.push(Point { onset: t, pitch: p, duration: s.duration });
            }
            t += s.duration;
        }
        out
    }
}

/// Twenty crotchets alternating C4 and G#4.
pub fn template_p1() -> PatternTemplate {
    let notes = (0..20).map(|i| Slot::note(if i % 2 == 0 { 60 } else { 68 })).collect();
    PatternTemplate { name: "P1".into(), notes }
}

/// Twenty crotchets ascending the C major scale from C4 (ends on A6).
pub fn template_p2() -> PatternTemplate {
    const STEPS: [u8; 7] = [0, 2, 4, 5, 7, 9, 11];
    let notes = (0..20).map(|i| Slot::note(60 + 12 * (i / 7) as u8 + STEPS[i % 7])).collect();
    PatternTemplate { name: "P2".into(), notes }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthConfig {
    pub templates: Vec<PatternTemplate>,
    /// Placements per template.
    pub occurrences: usize,
    pub rest_probability: f64,
    /// Random material must stay strictly below this fraction of the piece's duration.
    pub random_cap: f64,
    pub seed: u64,
    /// Inclusive pitch range for random notes; defaults to the templates' range.
    #[serde(default)]
    pub pitch_range: Option<(u8, u8)>,
    /// Random segment lengths are drawn uniformly from this inclusive slot-count range.
    #[serde(default = "default_segment_len")]
    pub segment_len: (usize, usize),
}

fn default_segment_len() -> (usize, usize) {
    (1, 8)
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            templates: vec![template_p1(), template_p2()],
            occurrences: 2,
            rest_probability: 0.1,
            random_cap: 0.5,
            seed: 42,
            pitch_range: None,
            segment_len: default_segment_len(),
        }
    }
}

impl SynthConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.templates.is_empty() {
            return Err(invalid("at least one template is required"));
        }
        if let Some(t) = self.templates.iter().find(|t| t.pitches().next().is_none()) {
            return Err(invalid(format!("template '{}' has no notes", t.name)));
        }
        if self.templates.iter().flat_map(|t| &t.notes).any(|s| !s.duration.is_positive()) {
            return Err(invalid("template slot durations must be > 0"));
        }
        if self.occurrences < 2 {
            return Err(invalid(format!("occurrences must be >= 2, got {}", self.occurrences)));
        }
        if !(0.0..1.0).contains(&self.rest_probability) {
            return Err(invalid(format!("rest probability must be in [0, 1), got {}", self.rest_probability)));
        }
        if !(self.random_cap > 0.0 && self.random_cap < 1.0) {
            return Err(invalid(format!("random cap must be in (0, 1), got {}", self.random_cap)));
        }
        let (lo, hi) = self.pitch_bounds();
        if lo > hi || hi > 127 {
            return Err(invalid(format!("invalid pitch range [{lo}, {hi}]")));
        }
        let (a, b) = self.segment_len;
        if a > b {
            return Err(invalid(format!("invalid segment length range [{a}, {b}]")));
        }
        Ok(())
    }

    pub fn pitch_bounds(&self) -> (u8, u8) {
        self.pitch_range.unwrap_or_else(|| {
            let ps = self.templates.iter().flat_map(|t| t.pitches());
            ps.fold((u8::MAX, 0), |(lo, hi), p| (lo.min(p), hi.max(p)))
        })
    }
}

/// `length` crotchet slots, each a rest with the configured probability and otherwise a
/// chromatic pitch drawn uniformly from the configured range.
pub fn sample_random_segment<R: Rng>(length: usize, config: &SynthConfig, rng: &mut R) -> Vec<Slot> {
    let (lo, hi) = config.pitch_bounds();
    (0..length)
        .map(|_| {
            if rng.random::<f64>() < config.rest_probability {
                Slot::rest()
            } else {
                Slot::note(rng.random_range(lo..=hi))
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Segment {
    Random { start: Time, slots: usize },
    Planted { start: Time, template: String },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticPiece {
    pub piece: PointSet,
    /// One record per template, one occurrence per placement.
    pub ground_truth: Vec<PatternRecord>,
    pub layout: Vec<Segment>,
    /// Total length including rests.
    pub duration: Time,
    pub random_duration: Time,
    pub seed: u64,
}

impl SyntheticPiece {
    pub fn random_fraction(&self) -> f64 {
        (self.random_duration / self.duration).to_f64().unwrap_or(f64::NAN)
    }

    pub fn span(&self) -> (Time, Time) {
        (Time::ZERO, self.duration)
    }

    pub fn planted(&self) -> Vec<PatternOccurrence> {
        self.ground_truth.iter().flat_map(|r| r.occurrences().iter().cloned()).collect()
    }
}

/// Largest random slot count `r` with `r < cap * (planted + r)`.
fn max_random_slots(planted: usize, cap: f64) -> usize {
    let mut r = (cap * planted as f64 / (1.0 - cap)).ceil() as usize;
    while r > 0 && r as f64 >= cap * (planted + r) as f64 {
        r -= 1;
    }
    r
}

/// Shuffles the placements, puts a random segment before, between and after them, and
/// trims the longest segments until random material is under the cap.
pub fn synthesize(config: &SynthConfig) -> Result<SyntheticPiece> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut order: Vec<usize> = (0..config.templates.len())
        .flat_map(|t| std::iter::repeat_n(t, config.occurrences))
        .collect();
    order.shuffle(&mut rng);

    let (a, b) = config.segment_len;
    let mut lens: Vec<usize> = (0..=order.len()).map(|_| rng.random_range(a..=b)).collect();
    // the cap is stated in duration; random slots are crotchets
    let planted: Time = order.iter().map(|&t| config.templates[t].duration()).sum();
    let planted_slots = planted.ratio().ceil().to_integer() as usize;
    let budget = max_random_slots(planted_slots, config.random_cap);
    while lens.iter().sum::<usize>() > budget {
        let i = (0..lens.len()).rev().max_by_key(|&i| lens[i]).expect("nonempty");
        lens[i] -= 1;
    }

    let mut points = Vec::new();
    let mut layout = Vec::new();
    let mut occs: Vec<Vec<PatternOccurrence>> = vec![Vec::new(); config.templates.len()];
    let mut t = Time::ZERO;
    let mut random_duration = Time::ZERO;
    for (i, &len) in lens.iter().enumerate() {
        if len > 0 {
            layout.push(Segment::Random { start: t, slots: len });
            for s in sample_random_segment(len, config, &mut rng) {
                if let Some(p) = s.pitch {
                    points.push(Point { onset: t, pitch: p, duration: s.duration });
                }
                t += s.duration;
                random_duration += s.duration;
            }
        }
        if let Some(&k) = order.get(i) {
            let tpl = &config.templates[k];
            layout.push(Segment::Planted { start: t, template: tpl.name.clone() });
            let realized = tpl.realize(t);
            points.extend_from_slice(&realized);
            occs[k].push(PatternOccurrence::new(realized)?);
            t += tpl.duration();
        }
    }

    let ground_truth = config
        .templates
        .iter()
        .zip(occs)
        .map(|(tpl, o)| PatternRecord::new(TRUTH_ALGORITHM, tpl.name.clone(), o))
        .collect::<Result<Vec<_>>>()?;
    Ok(SyntheticPiece {
        piece: PointSet::new(points),
        ground_truth,
        layout,
        duration: t,
        random_duration,
        seed: config.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn built_in_templates() {
        let p1: Vec<u8> = template_p1().pitches().collect();
        assert_eq!(p1.len(), 20);
        assert_eq!(&p1[..4], &[60, 68, 60, 68]);
        let p2: Vec<u8> = template_p2().pitches().collect();
        assert_eq!(p2.len(), 20);
        assert_eq!(&p2[..8], &[60, 62, 64, 65, 67, 69, 71, 72]);
        assert_eq!(p2[19], 93);
        for t in [template_p1(), template_p2()] {
            assert!(t.notes.iter().all(|s| s.duration == Time::ONE));
        }
    }

    #[test]
    fn random_segments() {
        let cfg = SynthConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(sample_random_segment(0, &cfg, &mut rng).is_empty());
        assert_eq!(cfg.pitch_bounds(), (60, 93));
        let no_rests = SynthConfig { rest_probability: 0.0, ..cfg.clone() };
        let seg = sample_random_segment(10_000, &no_rests, &mut rng);
        assert!(seg.iter().all(|s| matches!(s.pitch, Some(60..=93))));
        let seg = sample_random_segment(10_000, &cfg, &mut rng);
        let rests = seg.iter().filter(|s| s.pitch.is_none()).count();
        assert!((800..1200).contains(&rests));
    }

    #[test]
    fn default_piece_respects_cap() {
        let s = synthesize(&SynthConfig::default()).unwrap();
        assert!(s.duration >= Time::from_int(80));
        assert!(s.random_fraction() < 0.5);
        assert_eq!(s.ground_truth.len(), 2);
        assert!(s.ground_truth.iter().all(|r| r.occurrences().len() == 2));
    }

    #[test]
    fn planted_note_count_without_rests() {
        let cfg = SynthConfig { rest_probability: 0.0, ..SynthConfig::default() };
        let s = synthesize(&cfg).unwrap();
        let planted: usize = s.ground_truth.iter().flat_map(|r| r.occurrences()).map(|o| o.len()).sum();
        assert_eq!(planted, 80);
        assert_eq!(Time::from_int(s.piece.len() as i64), s.duration);
    }

    #[test]
    fn same_seed_same_piece() {
        let a = synthesize(&SynthConfig::default().with_seed(9)).unwrap();
        let b = synthesize(&SynthConfig::default().with_seed(9)).unwrap();
        assert_eq!(a, b);
        let c = synthesize(&SynthConfig::default().with_seed(10)).unwrap();
        assert_ne!(a.piece, c.piece);
    }

    #[test]
    fn tiny_cap_gives_no_random_material() {
        let cfg = SynthConfig { random_cap: 0.001, ..SynthConfig::default() };
        let s = synthesize(&cfg).unwrap();
        assert_eq!(s.random_duration, Time::ZERO);
        assert!(s.layout.iter().all(|seg| matches!(seg, Segment::Planted { .. })));
    }

    #[test]
    fn invalid_configs() {
        let bad = [
            SynthConfig { random_cap: 1.0, ..SynthConfig::default() },
            SynthConfig { occurrences: 1, ..SynthConfig::default() },
            SynthConfig { rest_probability: 1.0, ..SynthConfig::default() },
            SynthConfig { templates: vec![], ..SynthConfig::default() },
        ];
        for cfg in bad {
            assert!(synthesize(&cfg).is_err());
        }
    }

    #[test]
    fn cap_budget() {
        assert_eq!(max_random_slots(80, 0.5), 79);
        assert_eq!(max_random_slots(10, 0.25), 3);
        assert_eq!(max_random_slots(80, 0.001), 0);
    }
}
