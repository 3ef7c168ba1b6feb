//! Seeded synthetic fixtures for tests and reproducible benchmarks.
//!
//! The generated corpus plants one genre affinity per user: the affinity is
//! stated in early review texts (picked up as an explicit profile facet) and
//! encoded in the knowledge graph through `has_genre` triples, while train
//! interactions are uniform random. The held-out last interactions are
//! genre-matched, so the affinity is recoverable through the KG-grounded
//! path and invisible to the purely collaborative/content paths.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::corpus::{parse_interactions, IngestOptions, InteractionStore};
use crate::error::Result;
use crate::kg::{parse_triples, KnowledgeGraph};
use crate::text::stable_hash;

/// Genre labels; all appear in the mock backend's facet lexicon.
pub const GENRES: [&str; 10] = [
    "comedy",
    "drama",
    "horror",
    "action",
    "romance",
    "thriller",
    "documentary",
    "fantasy",
    "animation",
    "sci-fi",
];

/// Theme labels; attribute entities that carry no planted signal.
pub const THEMES: [&str; 10] = [
    "space", "magic", "sports", "crime", "travel", "cooking", "music", "nature", "history",
    "robots",
];

#[derive(Debug, Clone, Copy)]
pub struct SyntheticSpec {
    pub users: usize,
    pub items: usize,
    /// Interactions per user; at least 5 so every user is split-eligible.
    pub interactions_per_user: usize,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            users: 500,
            items: 300,
            interactions_per_user: 10,
            seed: 42,
        }
    }
}

/// Generated fixture files in their on-disk line formats.
#[derive(Debug, Clone)]
pub struct SyntheticData {
    pub interactions: String,
    pub triples: String,
}

pub fn item_id(index: usize) -> String {
    format!("i{index:04}")
}

pub fn user_id(index: usize) -> String {
    format!("u{index:04}")
}

pub fn item_genre(index: usize) -> &'static str {
    GENRES[index % GENRES.len()]
}

pub fn user_genre(index: usize) -> &'static str {
    GENRES[index % GENRES.len()]
}

/// Generate the planted-affinity corpus and knowledge graph.
pub fn generate(spec: &SyntheticSpec) -> SyntheticData {
    assert!(
        spec.interactions_per_user >= 5,
        "users must be split-eligible"
    );
    assert!(
        spec.items >= 2 * GENRES.len(),
        "need several items per genre"
    );

    let mut triples = String::new();
    for i in 0..spec.items {
        let item = item_id(i);
        triples.push_str(&format!("{item}\thas_genre\t{}\n", item_genre(i)));
        triples.push_str(&format!(
            "{item}\thas_theme\t{}\n",
            THEMES[(i / GENRES.len()) % THEMES.len()]
        ));
    }

    let mut interactions = String::new();
    let n = spec.interactions_per_user;
    for u in 0..spec.users {
        let genre_index = u % GENRES.len();
        let genre = user_genre(u);
        let mut rng = ChaCha20Rng::seed_from_u64(stable_hash(spec.seed, &["user", &u.to_string()]));

        // the held-out pair first: two genre-matched items
        let mut genre_pool: Vec<usize> = (0..spec.items)
            .filter(|i| i % GENRES.len() == genre_index)
            .collect();
        for i in 0..2 {
            let j = rng.gen_range(i..genre_pool.len());
            genre_pool.swap(i, j);
        }
        let held_out = [genre_pool[0], genre_pool[1]];

        // then n-2 uniform random distinct items from the rest
        let mut pool: Vec<usize> = (0..spec.items).filter(|i| !held_out.contains(i)).collect();
        for i in 0..(n - 2) {
            let j = rng.gen_range(i..pool.len());
            pool.swap(i, j);
        }
        let mut picked: Vec<usize> = pool[..(n - 2)].to_vec();
        picked.extend(held_out);

        let user = user_id(u);
        for (j, &item_index) in picked.iter().enumerate() {
            let rating = rng.gen_range(3..=5);
            let timestamp = 1_000_000 + j as i64 * 86_400;
            let text = if j < 2 {
                format!("\tabsolutely loved the {genre} in this one")
            } else {
                String::new()
            };
            interactions.push_str(&format!(
                "{user}\t{}\t{rating}\t{timestamp}{text}\n",
                item_id(item_index)
            ));
        }
    }

    SyntheticData {
        interactions,
        triples,
    }
}

impl SyntheticData {
    pub fn store(&self) -> Result<InteractionStore> {
        parse_interactions(&self.interactions, "synthetic", IngestOptions::default())
    }

    pub fn graph(&self) -> Result<KnowledgeGraph> {
        parse_triples(&self.triples, "synthetic")
    }

    /// Write the fixture files into `dir`, returning their paths.
    pub fn write_to(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        let interactions = dir.join("interactions.tsv");
        let triples = dir.join("triples.tsv");
        std::fs::write(&interactions, &self.interactions)
            .map_err(|e| crate::error::Error::io(&interactions, e))?;
        std::fs::write(&triples, &self.triples)
            .map_err(|e| crate::error::Error::io(&triples, e))?;
        Ok((interactions, triples))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{temporal_split, SplitPart};

    #[test]
    fn generation_is_deterministic() {
        let spec = SyntheticSpec {
            users: 20,
            items: 60,
            ..Default::default()
        };
        let a = generate(&spec);
        let b = generate(&spec);
        assert_eq!(a.interactions, b.interactions);
        assert_eq!(a.triples, b.triples);
        let different = generate(&SyntheticSpec { seed: 43, ..spec });
        assert_ne!(a.interactions, different.interactions);
    }

    #[test]
    fn fixture_shape_matches_spec() {
        let spec = SyntheticSpec {
            users: 30,
            items: 200,
            ..Default::default()
        };
        let data = generate(&spec);
        let store = data.store().unwrap();
        assert_eq!(store.user_count(), 30);
        assert_eq!(store.len(), 300);
        let kg = data.graph().unwrap();
        // items + 10 genre entities + 10 theme entities
        assert_eq!(kg.entity_count(), 200 + 20);
        assert_eq!(kg.triple_count(), 400);
    }

    #[test]
    fn held_out_interactions_are_genre_matched() {
        let spec = SyntheticSpec {
            users: 10,
            items: 40,
            ..Default::default()
        };
        let data = generate(&spec);
        let store = data.store().unwrap();
        let split = temporal_split(&store, (0.8, 0.1, 0.1)).unwrap();
        for u in 0..spec.users {
            let user = user_id(u);
            let genre = user_genre(u);
            for part in [SplitPart::Valid, SplitPart::Test] {
                let held = store.user_history(&user, Some((&split, part)));
                assert_eq!(held.len(), 1);
                let idx: usize = held[0].item_id[1..].parse().unwrap();
                assert_eq!(item_genre(idx), genre, "user {user} part {part}");
            }
        }
    }

    #[test]
    fn early_interactions_carry_the_affinity_review() {
        let data = generate(&SyntheticSpec {
            users: 3,
            items: 40,
            ..Default::default()
        });
        let store = data.store().unwrap();
        for u in 0..3 {
            let user = user_id(u);
            let history = store.user_history(&user, None);
            let with_text = history.iter().filter(|it| it.text.is_some()).count();
            assert_eq!(with_text, 2);
            assert!(history[0].text.as_deref().unwrap().contains(user_genre(u)));
        }
    }
}
