use super::{corpus_bleu, BleuError, BleuOptions, BleuReport, TokenizedCorpus, TokenizerTag};
use crate::cascade::{Adapter, AdapterKind};
use crate::corpus::Manifest;

/// Transcribes generated audio with an ASR adapter and scores it against reference texts.
///
/// Both manifests must hold exactly the same ids. Each record's `audio` reference (or its id
/// when absent) is sent to the adapter; references come from the `text` field of `refs`.
/// Segments are scored in id order, so the result is independent of manifest order. Any
/// transcription failure aborts the evaluation with every failing id listed.
pub fn asr_bleu(
    generated: &Manifest,
    refs: &Manifest,
    asr: &dyn Adapter,
    scheme: TokenizerTag,
    opts: &BleuOptions,
) -> Result<BleuReport, BleuError> {
    if asr.kind() != AdapterKind::Asr {
        return Err(BleuError::WrongAdapterKind {
            adapter: asr.name().to_string(),
            kind: asr.kind().to_string(),
        });
    }
    let mut ids: Vec<&str> = generated.records().iter().map(|r| r.id.as_str()).collect();
    ids.sort_unstable();
    if let Some(id) = ids.iter().find(|id| refs.get(id).is_none()) {
        return Err(BleuError::Misaligned(format!("{id:?} has no reference")));
    }
    if let Some(r) = refs.records().iter().find(|r| generated.get(&r.id).is_none()) {
        return Err(BleuError::Misaligned(format!("reference {:?} has no generated audio", r.id)));
    }

    let mut ref_texts = Vec::with_capacity(ids.len());
    let mut audio = Vec::with_capacity(ids.len());
    for id in &ids {
        let text = refs
            .get(id)
            .and_then(|r| r.text.clone())
            .ok_or_else(|| BleuError::MissingReference(id.to_string()))?;
        ref_texts.push(text);
        let g = generated.get(id).expect("id taken from generated");
        audio.push(g.audio_ref.clone().unwrap_or_else(|| g.id.clone()));
    }

    let results = asr.invoke_batch(&audio);
    if results.len() != ids.len() {
        return Err(BleuError::Misaligned(format!(
            "adapter returned {} transcripts for {} inputs",
            results.len(),
            ids.len()
        )));
    }
    let mut hyps = Vec::with_capacity(ids.len());
    let mut failures = Vec::new();
    for (id, r) in ids.iter().zip(results) {
        match r {
            Ok(t) => hyps.push(t),
            Err(e) => failures.push((id.to_string(), e)),
        }
    }
    if !failures.is_empty() {
        return Err(BleuError::AdapterFailures(failures));
    }

    let hyps = TokenizedCorpus::from_texts(&hyps, scheme);
    let refs = TokenizedCorpus::from_texts(&ref_texts, scheme);
    corpus_bleu(&hyps, &refs, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cascade::{MockAdapter, MockBehavior};
    use crate::corpus::Utterance;

    fn manifests(texts: &[&str]) -> (Manifest, Manifest) {
        let mut g = Manifest::new();
        let mut r = Manifest::new();
        for (i, t) in texts.iter().enumerate() {
            let mut gu = Utterance::new(format!("s{i:02}"), "en");
            gu.audio_ref = Some(t.to_string());
            g.push(gu).unwrap();
            let mut ru = Utterance::new(format!("s{i:02}"), "en");
            ru.text = Some(t.to_string());
            r.push(ru).unwrap();
        }
        (g, r)
    }

    #[test]
    fn identity_is_perfect() {
        let (g, r) = manifests(&["the cat sat on the mat", "a dog ran in the park today"]);
        let asr = MockAdapter::new(AdapterKind::Asr, "id", MockBehavior::Identity);
        let rep = asr_bleu(&g, &r, &asr, TokenizerTag::Word13a, &BleuOptions::default()).unwrap();
        assert_eq!(rep.bleu, 100.0);
    }

    #[test]
    fn failures_are_collected() {
        let (g, r) = manifests(&["one two three four", "five six seven eight", "x y z w"]);
        let asr = MockAdapter::new(AdapterKind::Asr, "f", MockBehavior::FailOn("x y z w".into()));
        match asr_bleu(&g, &r, &asr, TokenizerTag::Word13a, &BleuOptions::default()) {
            Err(BleuError::AdapterFailures(f)) => assert_eq!(f[0].0, "s02"),
            other => panic!("{other:?}"),
        }
        let mt = MockAdapter::new(AdapterKind::Mt, "mt", MockBehavior::Identity);
        assert!(matches!(
            asr_bleu(&g, &r, &mt, TokenizerTag::Word13a, &BleuOptions::default()),
            Err(BleuError::WrongAdapterKind { .. })
        ));
    }

    #[test]
    fn misalignment() {
        let (g, _) = manifests(&["a b c d", "e f g h"]);
        let (_, r) = manifests(&["a b c d"]);
        let asr = MockAdapter::new(AdapterKind::Asr, "id", MockBehavior::Identity);
        assert!(matches!(
            asr_bleu(&g, &r, &asr, TokenizerTag::Word13a, &BleuOptions::default()),
            Err(BleuError::Misaligned(_))
        ));
        assert!(matches!(
            asr_bleu(&r, &g, &asr, TokenizerTag::Word13a, &BleuOptions::default()),
            Err(BleuError::Misaligned(_))
        ));
    }
}
