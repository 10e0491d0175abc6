mod support;

use std::sync::OnceLock;

use proptest::prelude::*;
use rand::seq::SliceRandom;

use crawlsieve::langid::{passes_gate, train, LangModel, TrainConfig};

fn model() -> &'static LangModel {
    static M: OnceLock<LangModel> = OnceLock::new();
    M.get_or_init(|| support::train_toy_lid(5).0)
}

fn model_bytes(m: &LangModel) -> Vec<u8> {
    let mut out = Vec::new();
    m.write_to(&mut out).unwrap();
    out
}

proptest! {
    #[test]
    fn scores_form_a_distribution(text in "\\PC{1,80}") {
        if let Ok(c) = model().classify(&text) {
            let sum: f64 = c.scores.iter().map(|(_, p)| p).sum();
            prop_assert!((sum - 1.0).abs() <= 1e-6, "sum {}", sum);
            prop_assert!(c.scores.iter().all(|(_, p)| (0.0..=1.0).contains(p)));
            prop_assert_eq!(c.score, c.score_of(&c.label));
        }
    }

    #[test]
    fn gate_is_monotone(s in 0.0f64..=1.0, bump in 0.0f64..=1.0, t in 0.0f64..=1.0) {
        let higher = (s + bump).min(1.0);
        if passes_gate(s, t) {
            prop_assert!(passes_gate(higher, t));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn training_ignores_sample_order(shuffle_seed in any::<u64>()) {
        let samples = support::bilingual_samples(3, 40);
        let mut shuffled = samples.clone();
        shuffled.shuffle(&mut support::rng(shuffle_seed));
        let cfg = TrainConfig { seed: 9, hash_dim: 1 << 12, epochs: 3, ..Default::default() };
        let (a, ra) = train(&samples, &cfg).unwrap();
        let (b, rb) = train(&shuffled, &cfg).unwrap();
        prop_assert_eq!(model_bytes(&a), model_bytes(&b));
        prop_assert_eq!(ra, rb);
    }
}
