use serde::{Deserialize, Serialize};

use super::QuantizeError;

/// Unit ids over a vocabulary of `vocab_size` symbols.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitSequence {
    vocab_size: u32,
    units: Vec<u32>,
}

impl UnitSequence {
    pub fn new(vocab_size: u32, units: Vec<u32>) -> Result<Self, QuantizeError> {
        if vocab_size == 0 {
            return Err(QuantizeError::InvalidParam("vocab_size must be positive".into()));
        }
        if let Some((pos, &unit)) = units.iter().enumerate().find(|(_, &u)| u >= vocab_size) {
            return Err(QuantizeError::OutOfVocab { unit, pos, vocab_size });
        }
        Ok(Self { vocab_size, units })
    }

    pub fn vocab_size(&self) -> u32 {
        self.vocab_size
    }

    pub fn units(&self) -> &[u32] {
        &self.units
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    pub fn into_units(self) -> Vec<u32> {
        self.units
    }
}

/// Keeps the first unit of every maximal run of equal units.
pub fn dedup_units(s: &UnitSequence) -> UnitSequence {
    let mut units = s.units.clone();
    units.dedup();
    UnitSequence {
        vocab_size: s.vocab_size,
        units,
    }
}

pub fn remove_blanks(s: &UnitSequence, blank: u32) -> UnitSequence {
    UnitSequence {
        vocab_size: s.vocab_size,
        units: s.units.iter().copied().filter(|&u| u != blank).collect(),
    }
}

/// Greedy CTC path collapse: merge repeated labels, then drop blanks.
pub fn ctc_collapse(frame_labels: &UnitSequence, blank: u32) -> Result<UnitSequence, QuantizeError> {
    if blank >= frame_labels.vocab_size {
        return Err(QuantizeError::InvalidParam(format!(
            "blank {blank} outside vocabulary of size {}",
            frame_labels.vocab_size
        )));
    }
    let mut units = Vec::new();
    let mut prev = None;
    for &label in &frame_labels.units {
        if prev != Some(label) && label != blank {
            units.push(label);
        }
        prev = Some(label);
    }
    Ok(UnitSequence {
        vocab_size: frame_labels.vocab_size,
        units,
    })
}
