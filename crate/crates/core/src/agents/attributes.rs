//! Item attribute store.
//!
//! File format: `<item>\t<key>=<value>\t<key>=<value>...`, one item per line.

use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Item -> attribute list, preserving file order per item.
#[derive(Debug, Clone, Default)]
pub struct ItemAttributes {
    by_item: HashMap<String, Vec<(String, String)>>,
}

impl ItemAttributes {
    pub fn parse(content: &str, source_name: &str) -> Result<Self> {
        let mut by_item: HashMap<String, Vec<(String, String)>> = HashMap::new();
        for (lineno, line) in content.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split('\t');
            let item = fields.next().unwrap_or("").trim();
            if item.is_empty() {
                return Err(Error::parse(
                    source_name,
                    lineno + 1,
                    "field `item` is empty",
                ));
            }
            let entry = by_item.entry(item.to_string()).or_default();
            for field in fields {
                let (key, value) = field.split_once('=').ok_or_else(|| {
                    Error::parse(
                        source_name,
                        lineno + 1,
                        format!("attribute {field:?} is not `key=value`"),
                    )
                })?;
                let pair = (key.trim().to_string(), value.trim().to_string());
                if !entry.contains(&pair) {
                    entry.push(pair);
                }
            }
        }
        Ok(ItemAttributes { by_item })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&content, &path.display().to_string())
    }

    pub fn get(&self, item_id: &str) -> &[(String, String)] {
        self.by_item.get(item_id).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn attr_set(&self, item_id: &str) -> BTreeSet<(&str, &str)> {
        self.get(item_id)
            .iter()
            .map(|(k, v)| (k.as_str(), v.as_str()))
            .collect()
    }

    pub fn item_count(&self) -> usize {
        self.by_item.len()
    }
}
