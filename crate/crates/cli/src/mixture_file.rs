//! Hand-written LHV mixtures.
//!
//! One strategy per line: whitespace-separated ±1 outcomes, Alice's settings
//! first, then Bob's, then the weight. `#` starts a comment. Weights summing
//! to within 1e-6 of 1 are renormalized; anything further off is rejected.

use bellkit::lhv::{DeterministicStrategy, LhvMixture};

pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("{0}")]
    File(String),
}

fn line_err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Line {
        line,
        message: message.into(),
    }
}

fn parse_outcome(token: &str) -> Option<i8> {
    match token {
        "+1" | "1" => Some(1),
        "-1" => Some(-1),
        _ => None,
    }
}

/// Parses `text`. `alice_settings` defaults to half the outcome columns.
pub fn parse_mixture(text: &str, alice_settings: Option<usize>) -> Result<LhvMixture, ParseError> {
    let mut rows: Vec<(usize, Vec<i8>, f64)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens.len() < 3 {
            return Err(line_err(
                line,
                "expected at least two outcomes followed by a weight",
            ));
        }
        let (outcome_tokens, weight_token) = tokens.split_at(tokens.len() - 1);
        let outcomes = outcome_tokens
            .iter()
            .map(|t| parse_outcome(t).ok_or_else(|| line_err(line, format!("outcome `{t}` is not +1 or -1"))))
            .collect::<Result<Vec<_>, _>>()?;
        let weight: f64 = weight_token[0]
            .parse()
            .map_err(|_| line_err(line, format!("weight `{}` is not a number", weight_token[0])))?;
        if !weight.is_finite() || weight < 0.0 {
            return Err(line_err(line, format!("weight {weight} must be non-negative")));
        }
        if let Some((_, first, _)) = rows.first() {
            if first.len() != outcomes.len() {
                return Err(line_err(
                    line,
                    format!("expected {} outcomes, found {}", first.len(), outcomes.len()),
                ));
            }
        }
        rows.push((line, outcomes, weight));
    }

    let Some((_, first, _)) = rows.first() else {
        return Err(ParseError::File("mixture file contains no strategies".into()));
    };
    let columns = first.len();
    let split = match alice_settings {
        Some(a) if a >= 1 && a < columns => a,
        Some(a) => {
            return Err(ParseError::File(format!(
                "cannot give Alice {a} of {columns} outcome columns"
            )))
        }
        None if columns % 2 == 0 => columns / 2,
        None => {
            return Err(ParseError::File(format!(
                "{columns} outcome columns cannot be split evenly; pass --alice-settings"
            )))
        }
    };

    let total: f64 = rows.iter().map(|(_, _, w)| w).sum();
    if (total - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
        return Err(ParseError::File(format!("weights sum to {total}, expected 1")));
    }
    let mut entries = Vec::with_capacity(rows.len());
    for (line, outcomes, w) in rows {
        let (a, b) = outcomes.split_at(split);
        let st = DeterministicStrategy::new(a.to_vec(), b.to_vec())
            .map_err(|e| line_err(line, e.to_string()))?;
        entries.push((st, w / total));
    }
    LhvMixture::new(entries).map_err(|e| ParseError::File(e.to_string()))
}
