//! Task prefix codec for the text-to-text generator: `<source> to <target>: <text>`.

use std::fmt;

use thiserror::Error;

use crate::taxonomy::EmotionId;

const TO: &str = " to ";
const COLON: &str = ": ";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PrefixError {
    #[error("input text is empty")]
    EmptyText,
    #[error("prefix parse error: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum PrefixMode {
    #[default]
    ById,
    ByName,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TransitionPrefix {
    pub source: EmotionId,
    pub target: EmotionId,
    pub mode: PrefixMode,
}

impl TransitionPrefix {
    pub fn by_id(source: EmotionId, target: EmotionId) -> Self {
        TransitionPrefix {
            source,
            target,
            mode: PrefixMode::ById,
        }
    }

    pub fn by_name(source: EmotionId, target: EmotionId) -> Self {
        TransitionPrefix {
            source,
            target,
            mode: PrefixMode::ByName,
        }
    }
}

impl fmt::Display for TransitionPrefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.mode {
            PrefixMode::ById => write!(f, "{} to {}", self.source.value(), self.target.value()),
            PrefixMode::ByName => write!(f, "{} to {}", self.source.name(), self.target.name()),
        }
    }
}

/// Builds the model input line. The body is kept verbatim.
pub fn encode(prefix: TransitionPrefix, text: &str) -> Result<String, PrefixError> {
    if text.trim().is_empty() {
        return Err(PrefixError::EmptyText);
    }
    Ok(format!("{prefix}{COLON}{text}"))
}

/// Splits a model input line back into its prefix and body.
///
/// The source token ends at the first `" to "` and the target token at the
/// first `": "` after it, so the body may itself contain either separator.
pub fn decode(line: &str) -> Result<(TransitionPrefix, &str), PrefixError> {
    let (source, rest) = line
        .split_once(TO)
        .ok_or_else(|| PrefixError::Parse(format!("missing \" to \" in {line:?}")))?;
    let (target, body) = rest
        .split_once(COLON)
        .ok_or_else(|| PrefixError::Parse(format!("missing \": \" in {line:?}")))?;
    let (source, source_numeric) = parse_token(source)?;
    let (target, target_numeric) = parse_token(target)?;
    let mode = match (source_numeric, target_numeric) {
        (true, true) => PrefixMode::ById,
        (false, false) => PrefixMode::ByName,
        _ => {
            return Err(PrefixError::Parse(
                "prefix mixes emotion ids and names".to_string(),
            ))
        }
    };
    if body.trim().is_empty() {
        return Err(PrefixError::EmptyText);
    }
    Ok((TransitionPrefix { source, target, mode }, body))
}

fn parse_token(tok: &str) -> Result<(EmotionId, bool), PrefixError> {
    let bad = || PrefixError::Parse(format!("unknown emotion token {tok:?}"));
    if tok.is_empty() || tok.contains(char::is_whitespace) {
        return Err(bad());
    }
    if tok.bytes().all(|b| b.is_ascii_digit()) {
        let v: i64 = tok.parse().map_err(|_| bad())?;
        return EmotionId::new(v).map(|id| (id, true)).map_err(|_| bad());
    }
    // Encoded names are lowercase; anything else did not come from `encode`.
    if tok != tok.to_lowercase() {
        return Err(bad());
    }
    EmotionId::from_name(tok).map(|id| (id, false)).map_err(|_| bad())
}
