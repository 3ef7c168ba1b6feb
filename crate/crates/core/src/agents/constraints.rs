//! Hard candidate constraints: `key=value` equality or `key<=n` / `key>=n`
//! numeric bounds, comma-separated on the request.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Constraint {
    Equals { key: String, value: String },
    AtMost { key: String, bound: f64 },
    AtLeast { key: String, bound: f64 },
}

impl Constraint {
    /// Parse a comma-separated constraint list.
    pub fn parse_list(spec: &str) -> Result<Vec<Constraint>> {
        spec.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(Constraint::parse)
            .collect()
    }

    pub fn parse(spec: &str) -> Result<Constraint> {
        let numeric = |key: &str, raw: &str| -> Result<f64> {
            raw.trim().parse::<f64>().map_err(|_| {
                Error::Validation(format!(
                    "constraint bound {raw:?} for {key:?} is not numeric"
                ))
            })
        };
        if let Some((key, raw)) = spec.split_once("<=") {
            let key = key.trim();
            return Ok(Constraint::AtMost {
                key: key.to_string(),
                bound: numeric(key, raw)?,
            });
        }
        if let Some((key, raw)) = spec.split_once(">=") {
            let key = key.trim();
            return Ok(Constraint::AtLeast {
                key: key.to_string(),
                bound: numeric(key, raw)?,
            });
        }
        if let Some((key, value)) = spec.split_once('=') {
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() || value.is_empty() {
                return Err(Error::Validation(format!("malformed constraint {spec:?}")));
            }
            return Ok(Constraint::Equals {
                key: key.to_string(),
                value: value.to_string(),
            });
        }
        Err(Error::Validation(format!("malformed constraint {spec:?}")))
    }

    /// Whether an item with these attributes satisfies the constraint.
    pub fn matches(&self, attrs: &[(String, String)]) -> bool {
        match self {
            Constraint::Equals { key, value } => attrs.iter().any(|(k, v)| k == key && v == value),
            Constraint::AtMost { key, bound } => attrs
                .iter()
                .any(|(k, v)| k == key && v.parse::<f64>().is_ok_and(|n| n <= *bound)),
            Constraint::AtLeast { key, bound } => attrs
                .iter()
                .any(|(k, v)| k == key && v.parse::<f64>().is_ok_and(|n| n >= *bound)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn attrs(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect()
    }

    #[test]
    fn parses_equality_and_bounds() {
        let list = Constraint::parse_list("genre=comedy, price<=30,year>=2000").unwrap();
        assert_eq!(list.len(), 3);
        assert_eq!(
            list[0],
            Constraint::Equals {
                key: "genre".into(),
                value: "comedy".into()
            }
        );
        assert!(matches!(list[1], Constraint::AtMost { .. }));
        assert!(matches!(list[2], Constraint::AtLeast { .. }));
    }

    #[test]
    fn rejects_malformed_specs() {
        assert!(Constraint::parse("no-op").is_err());
        assert!(Constraint::parse("price<=cheap").is_err());
        assert!(Constraint::parse("=value").is_err());
    }

    #[test]
    fn matching_honors_bounds_and_equality() {
        let item = attrs(&[("genre", "comedy"), ("price", "25")]);
        assert!(Constraint::parse("genre=comedy").unwrap().matches(&item));
        assert!(!Constraint::parse("genre=drama").unwrap().matches(&item));
        assert!(Constraint::parse("price<=30").unwrap().matches(&item));
        assert!(!Constraint::parse("price>=30").unwrap().matches(&item));
        // non-numeric attribute value never satisfies a numeric bound
        let odd = attrs(&[("price", "cheap")]);
        assert!(!Constraint::parse("price<=30").unwrap().matches(&odd));
    }
}
