//! Interaction corpus: ingestion, per-user histories, and temporally ordered
//! train/validation/test splits.
//!
//! File format: one interaction per line,
//! `<user>\t<item>\t<rating>\t<timestamp>[\t<text>]`, UTF-8, tabs disallowed
//! inside the optional free-text field. The split manifest is emitted as
//! `<position>\t<train|valid|test>` lines.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// A single rated interaction with optional review text.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Interaction {
    pub user_id: String,
    pub item_id: String,
    /// Rating in [1, 5].
    pub rating: f64,
    /// Seconds since epoch.
    pub timestamp: i64,
    pub text: Option<String>,
}

/// Split membership of one interaction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitPart {
    Train,
    Valid,
    Test,
}

impl fmt::Display for SplitPart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SplitPart::Train => write!(f, "train"),
            SplitPart::Valid => write!(f, "valid"),
            SplitPart::Test => write!(f, "test"),
        }
    }
}

/// Immutable store of interactions with user and item indices.
///
/// Per-user position lists are sorted ascending by `(timestamp, item_id)`;
/// item position lists are sorted by position. The store is safe for
/// unlimited concurrent readers once built.
#[derive(Debug, Clone, Default)]
pub struct InteractionStore {
    interactions: Vec<Interaction>,
    user_index: BTreeMap<String, Vec<usize>>,
    item_index: BTreeMap<String, Vec<usize>>,
}

/// Ingestion options.
#[derive(Debug, Clone, Copy, Default)]
pub struct IngestOptions {
    /// Treat an empty rating field as presence with rating 1.0.
    pub implicit_presence: bool,
}

impl InteractionStore {
    /// Build a store from already-parsed interactions.
    pub fn from_interactions(interactions: Vec<Interaction>) -> Result<Self> {
        for (i, it) in interactions.iter().enumerate() {
            if it.user_id.is_empty() || it.item_id.is_empty() {
                return Err(Error::Validation(format!(
                    "interaction {i}: empty user or item id"
                )));
            }
            if !(1.0..=5.0).contains(&it.rating) {
                return Err(Error::Validation(format!(
                    "interaction {i}: rating {} outside [1,5]",
                    it.rating
                )));
            }
            if it.timestamp < 0 {
                return Err(Error::Validation(format!(
                    "interaction {i}: negative timestamp"
                )));
            }
        }
        let mut user_index: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        let mut item_index: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (pos, it) in interactions.iter().enumerate() {
            user_index.entry(it.user_id.clone()).or_default().push(pos);
            item_index.entry(it.item_id.clone()).or_default().push(pos);
        }
        for positions in user_index.values_mut() {
            positions.sort_by(|&a, &b| {
                let ia = &interactions[a];
                let ib = &interactions[b];
                (ia.timestamp, ia.item_id.as_str(), a).cmp(&(ib.timestamp, ib.item_id.as_str(), b))
            });
        }
        Ok(Self {
            interactions,
            user_index,
            item_index,
        })
    }

    pub fn len(&self) -> usize {
        self.interactions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.interactions.is_empty()
    }

    pub fn user_count(&self) -> usize {
        self.user_index.len()
    }

    pub fn item_count(&self) -> usize {
        self.item_index.len()
    }

    pub fn get(&self, position: usize) -> Option<&Interaction> {
        self.interactions.get(position)
    }

    /// All user ids in ascending order.
    pub fn user_ids(&self) -> impl Iterator<Item = &str> {
        self.user_index.keys().map(String::as_str)
    }

    /// All item ids in ascending order.
    pub fn item_ids(&self) -> impl Iterator<Item = &str> {
        self.item_index.keys().map(String::as_str)
    }

    /// Positions of a user's interactions sorted by `(timestamp, item_id)`,
    /// optionally restricted to one split part. Unknown users yield an empty
    /// list.
    pub fn user_positions(
        &self,
        user_id: &str,
        restrict: Option<(&SplitAssignment, SplitPart)>,
    ) -> Vec<usize> {
        let Some(positions) = self.user_index.get(user_id) else {
            return Vec::new();
        };
        match restrict {
            None => positions.clone(),
            Some((split, part)) => positions
                .iter()
                .copied()
                .filter(|&p| split.part_of(p) == Some(part))
                .collect(),
        }
    }

    /// A user's interactions sorted by `(timestamp, item_id)`, optionally
    /// restricted to one split part.
    pub fn user_history(
        &self,
        user_id: &str,
        restrict: Option<(&SplitAssignment, SplitPart)>,
    ) -> Vec<&Interaction> {
        self.user_positions(user_id, restrict)
            .into_iter()
            .map(|p| &self.interactions[p])
            .collect()
    }

    /// Positions of interactions with `item_id`, ascending.
    pub fn item_positions(&self, item_id: &str) -> &[usize] {
        self.item_index
            .get(item_id)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn max_timestamp(&self) -> i64 {
        self.interactions
            .iter()
            .map(|it| it.timestamp)
            .max()
            .unwrap_or(0)
    }

    /// Render the store back to the tab-separated line format.
    pub fn to_lines(&self) -> String {
        let mut out = String::new();
        for it in &self.interactions {
            out.push_str(&it.user_id);
            out.push('\t');
            out.push_str(&it.item_id);
            out.push('\t');
            out.push_str(&format!("{}", it.rating));
            out.push('\t');
            out.push_str(&format!("{}", it.timestamp));
            if let Some(text) = &it.text {
                out.push('\t');
                out.push_str(text);
            }
            out.push('\n');
        }
        out
    }
}

/// Parse interactions from the line format. `source_name` labels parse errors.
pub fn parse_interactions(
    content: &str,
    source_name: &str,
    opts: IngestOptions,
) -> Result<InteractionStore> {
    let mut interactions = Vec::new();
    for (lineno, line) in content.lines().enumerate() {
        let lineno = lineno + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() < 4 {
            return Err(Error::parse(
                source_name,
                lineno,
                format!("expected >=4 tab-separated fields, found {}", fields.len()),
            ));
        }
        if fields.len() > 5 {
            return Err(Error::parse(
                source_name,
                lineno,
                "field `text` must not contain tabs",
            ));
        }
        let user_id = fields[0].trim();
        let item_id = fields[1].trim();
        if user_id.is_empty() {
            return Err(Error::parse(source_name, lineno, "field `user` is empty"));
        }
        if item_id.is_empty() {
            return Err(Error::parse(source_name, lineno, "field `item` is empty"));
        }
        let rating_field = fields[2].trim();
        let rating = if rating_field.is_empty() && opts.implicit_presence {
            1.0
        } else {
            rating_field.parse::<f64>().map_err(|_| {
                Error::parse(
                    source_name,
                    lineno,
                    format!("field `rating` not a number: {rating_field:?}"),
                )
            })?
        };
        if !(1.0..=5.0).contains(&rating) {
            return Err(Error::Validation(format!(
                "{source_name}:{lineno}: rating {rating} outside [1,5]"
            )));
        }
        let timestamp = fields[3].trim().parse::<i64>().map_err(|_| {
            Error::parse(
                source_name,
                lineno,
                format!("field `timestamp` not an integer: {:?}", fields[3]),
            )
        })?;
        if timestamp < 0 {
            return Err(Error::parse(
                source_name,
                lineno,
                "field `timestamp` is negative",
            ));
        }
        let text = fields.get(4).map(|t| t.to_string());
        interactions.push(Interaction {
            user_id: user_id.to_string(),
            item_id: item_id.to_string(),
            rating,
            timestamp,
            text,
        });
    }
    InteractionStore::from_interactions(interactions)
}

/// Ingest an interactions file.
pub fn ingest_interactions(path: &Path, opts: IngestOptions) -> Result<InteractionStore> {
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_interactions(&content, &path.display().to_string(), opts)
}

/// Assignment of interaction positions to train/valid/test.
#[derive(Debug, Clone)]
pub struct SplitAssignment {
    parts: Vec<SplitPart>,
    pub ratios: (f64, f64, f64),
}

impl SplitAssignment {
    pub fn part_of(&self, position: usize) -> Option<SplitPart> {
        self.parts.get(position).copied()
    }

    pub fn positions(&self, part: SplitPart) -> Vec<usize> {
        self.parts
            .iter()
            .enumerate()
            .filter(|(_, &p)| p == part)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn counts(&self) -> (usize, usize, usize) {
        let mut c = (0, 0, 0);
        for p in &self.parts {
            match p {
                SplitPart::Train => c.0 += 1,
                SplitPart::Valid => c.1 += 1,
                SplitPart::Test => c.2 += 1,
            }
        }
        c
    }

    /// Split manifest: `<position>\t<train|valid|test>` per interaction.
    pub fn manifest(&self) -> String {
        let mut out = String::new();
        for (pos, part) in self.parts.iter().enumerate() {
            out.push_str(&format!("{pos}\t{part}\n"));
        }
        out
    }
}

/// Users with fewer interactions than this are assigned wholly to train: a
/// per-user 80/10/10 cut is not meaningful below it.
pub const COLD_USER_THRESHOLD: usize = 5;

/// Per-user temporal split. For each user with at least
/// [`COLD_USER_THRESHOLD`] interactions, the earliest `ceil(n * r_train)` go
/// to train, the next `ceil(n * r_valid)` (capped by what remains) to valid,
/// and the remainder to test. Ordering key is `(timestamp, item_id)`.
pub fn temporal_split(
    store: &InteractionStore,
    ratios: (f64, f64, f64),
) -> Result<SplitAssignment> {
    let (r_train, r_valid, r_test) = ratios;
    if r_train < 0.0 || r_valid < 0.0 || r_test < 0.0 {
        return Err(Error::Validation(
            "split ratios must be non-negative".into(),
        ));
    }
    if (r_train + r_valid + r_test - 1.0).abs() > 1e-9 {
        return Err(Error::Validation(format!(
            "split ratios must sum to 1, got {}",
            r_train + r_valid + r_test
        )));
    }
    let mut parts = vec![SplitPart::Train; store.len()];
    for user in store.user_ids().map(str::to_string).collect::<Vec<_>>() {
        let positions = store.user_positions(&user, None);
        let n = positions.len();
        if n < COLD_USER_THRESHOLD {
            continue; // wholly train
        }
        let n_train = ((n as f64 * r_train).ceil() as usize).min(n);
        let n_valid = ((n as f64 * r_valid).ceil() as usize).min(n - n_train);
        for (i, &pos) in positions.iter().enumerate() {
            parts[pos] = if i < n_train {
                SplitPart::Train
            } else if i < n_train + n_valid {
                SplitPart::Valid
            } else {
                SplitPart::Test
            };
        }
    }
    Ok(SplitAssignment { parts, ratios })
}
