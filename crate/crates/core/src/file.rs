//! The automaton file format: a single JSON document with integer tables,
//! an optional semidirect hint, and an optional initial state. Complex
//! values never appear in files.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::algebra::Semiautomaton;
use crate::compiler::SemidirectHint;
use crate::error::{Error, Result};
use crate::semidirect::{sd_from_tables, SdElement};

/// Raw hint tables as they appear on disk.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemidirectHintFile {
    pub n_table: Vec<Vec<usize>>,
    pub h_table: Vec<Vec<usize>>,
    pub action: Vec<Vec<usize>>,
    /// One `[n, h]` pair per automaton state.
    pub state_encoding: Vec<[usize; 2]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutomatonFile {
    pub states: usize,
    pub alphabet: Vec<String>,
    /// Transition column per symbol, keyed by symbol name.
    pub transitions: BTreeMap<String, Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hint: Option<SemidirectHintFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q0: Option<usize>,
}

impl AutomatonFile {
    pub fn to_semiautomaton(&self) -> Result<Semiautomaton> {
        let mut columns = Vec::with_capacity(self.alphabet.len());
        for symbol in &self.alphabet {
            let col = self.transitions.get(symbol).ok_or(Error::FileField {
                field: "transitions",
                reason: format!("missing column for symbol {symbol:?}"),
            })?;
            columns.push(col.clone());
        }
        for key in self.transitions.keys() {
            if !self.alphabet.iter().any(|s| s == key) {
                return Err(Error::FileField {
                    field: "transitions",
                    reason: format!("column for {key:?} has no alphabet entry"),
                });
            }
        }
        Semiautomaton::new(self.states, self.alphabet.clone(), columns)
    }

    /// Builds and fully validates the semidirect hint, including the match
    /// between its induced transitions and the automaton's table.
    pub fn validated_hint(&self, a: &Semiautomaton) -> Result<Option<SemidirectHint>> {
        let Some(raw) = &self.hint else {
            return Ok(None);
        };
        let structure = sd_from_tables(
            raw.n_table.clone(),
            raw.h_table.clone(),
            raw.action.clone(),
        )?;
        let state_encoding: Vec<SdElement> = raw
            .state_encoding
            .iter()
            .map(|&[n, h]| SdElement::new(n, h))
            .collect();
        let hint = SemidirectHint {
            structure,
            state_encoding,
        };
        hint.verify(a)?;
        Ok(Some(hint))
    }

    pub fn initial_state(&self) -> Result<usize> {
        let q0 = self.q0.unwrap_or(0);
        if q0 >= self.states {
            return Err(Error::StateOutOfRange {
                state: q0,
                num_states: self.states,
            });
        }
        Ok(q0)
    }

    /// Canonical serialized form; parse ∘ serialize is the identity on it.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("automaton files are plain data")
    }
}

/// Parses and validates an automaton file from disk: the table itself, plus
/// the hint (when present) against both the structure laws and `δ`.
pub fn parse_automaton(path: &str) -> Result<AutomatonFile> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_string(),
        source,
    })?;
    parse_automaton_str(&text)
}

pub fn parse_automaton_str(text: &str) -> Result<AutomatonFile> {
    let file: AutomatonFile = serde_json::from_str(text)?;
    let a = file.to_semiautomaton()?;
    file.validated_hint(&a)?;
    file.initial_state()?;
    Ok(file)
}

/// Turns a raw `--input` argument into symbol indices: whitespace-separated
/// tokens when whitespace is present, otherwise one symbol per character.
pub fn parse_input_tokens(a: &Semiautomaton, raw: &str) -> Result<Vec<usize>> {
    let trimmed = raw.trim();
    if trimmed.is_empty() {
        return Ok(Vec::new());
    }
    if trimmed.split_whitespace().nth(1).is_some() {
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        return a.tokenize(&tokens);
    }
    let chars: Vec<String> = trimmed.chars().map(|c| c.to_string()).collect();
    if chars.iter().all(|c| a.symbol_index(c).is_some()) {
        return a.tokenize(&chars);
    }
    a.tokenize(&[trimmed])
}
