//! Tâi-lô romanization helpers.
//!
//! Text is brought to digit-tone form: tone diacritics map to digits through a fixed table,
//! and syllables carrying neither a diacritic nor a digit get the implicit tone of their
//! shape (4 for checked syllables ending in p/t/k/h, 1 otherwise). Syllables are the
//! maximal runs of letters and digits, so hyphens, whitespace and punctuation separate them.

use unicode_normalization::UnicodeNormalization;

/// Tâi-lô initial consonants.
pub const TAILO_INITIALS: [&str; 17] = [
    "p", "ph", "m", "b", "t", "th", "n", "l", "k", "kh", "ng", "g", "h", "ts", "tsh", "s", "j",
];

fn tone_of_mark(c: char) -> Option<char> {
    match c {
        '\u{0301}' => Some('2'), // acute
        '\u{0300}' => Some('3'), // grave
        '\u{0302}' => Some('5'), // circumflex
        '\u{030C}' => Some('6'), // caron
        '\u{0304}' => Some('7'), // macron
        '\u{030D}' => Some('8'), // vertical line above
        '\u{030B}' | '\u{0306}' => Some('9'), // double acute, breve
        _ => None,
    }
}

fn is_combining(c: char) -> bool {
    ('\u{0300}'..='\u{036F}').contains(&c)
}

fn to_digit_form(raw: &str) -> String {
    if raw.chars().all(|c| c.is_ascii_digit()) {
        return raw.to_string();
    }
    let mut tone = None;
    let mut base = String::with_capacity(raw.len() + 1);
    for c in raw.chars() {
        match tone_of_mark(c) {
            Some(t) => tone = tone.or(Some(t)),
            None => base.push(c),
        }
    }
    let mut out: String = base.nfc().collect();
    if !out.ends_with(|c: char| c.is_ascii_digit()) {
        let implicit = if out.ends_with(['p', 't', 'k', 'h']) { '4' } else { '1' };
        out.push(tone.unwrap_or(implicit));
    }
    out
}

/// Lowercased digit-tone syllables of `text`.
pub fn tailo_syllables(text: &str) -> Vec<String> {
    let decomposed: String = text.to_lowercase().nfd().collect();
    decomposed
        .split(|c: char| !(c.is_alphanumeric() || is_combining(c)))
        .filter(|s| !s.is_empty() && !s.chars().all(is_combining))
        .map(to_digit_form)
        .collect()
}

fn is_final(rest: &str) -> bool {
    let core = rest.trim_end_matches(|c: char| c.is_ascii_digit());
    !core.is_empty() && (core.contains(['a', 'e', 'i', 'o', 'u']) || matches!(core, "m" | "ng" | "mh" | "ngh"))
}

/// Splits a syllable into `(initial, final_with_tone)`.
///
/// The initial is the longest inventory prefix that leaves a well-formed final (one with a
/// vowel, or a syllabic nasal `m`/`ng`, optionally with `h`). Otherwise the initial is empty,
/// so `ang5 -> ("", "ang5")` and `ng5 -> ("", "ng5")`. Input is lowercased first; for
/// lowercase input `initial + final == syllable`.
pub fn tailo_split_syllable(syllable: &str) -> (String, String) {
    let s = syllable.to_lowercase();
    let mut initials = TAILO_INITIALS;
    initials.sort_by_key(|i| std::cmp::Reverse(i.len()));
    for initial in initials {
        if let Some(rest) = s.strip_prefix(initial) {
            if is_final(rest) {
                return (initial.to_string(), rest.to_string());
            }
        }
    }
    (String::new(), s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn split(s: &str) -> (String, String) {
        tailo_split_syllable(s)
    }

    #[test]
    fn longest_match() {
        assert_eq!(split("tsa1"), ("ts".into(), "a1".into()));
        assert_eq!(split("tshai3"), ("tsh".into(), "ai3".into()));
        assert_eq!(split("khoo2"), ("kh".into(), "oo2".into()));
        assert_eq!(split("nga5"), ("ng".into(), "a5".into()));
    }

    #[test]
    fn null_initial_and_nasals() {
        assert_eq!(split("ang5"), ("".into(), "ang5".into()));
        assert_eq!(split("ng5"), ("".into(), "ng5".into()));
        assert_eq!(split("m7"), ("".into(), "m7".into()));
        assert_eq!(split("mh4"), ("".into(), "mh4".into()));
        assert_eq!(split("hm7"), ("h".into(), "m7".into()));
        assert_eq!(split("sng1"), ("s".into(), "ng1".into()));
        assert_eq!(split("nng7"), ("n".into(), "ng7".into()));
    }

    #[test]
    fn diacritics_to_digits() {
        assert_eq!(tailo_syllables("Tâi-lô"), ["tai5", "lo5"]);
        assert_eq!(tailo_syllables("Lí hó"), ["li2", "ho2"]);
        assert_eq!(tailo_syllables("tsia̍h-pá"), ["tsiah8", "pa2"]);
        assert_eq!(tailo_syllables("sann1 tsit8"), ["sann1", "tsit8"]);
        // Bare syllables take the implicit tone of their shape.
        assert_eq!(tailo_syllables("su tsit"), ["su1", "tsit4"]);
        assert_eq!(tailo_syllables("guā-tsē, 2024"), ["gua7", "tse7", "2024"]);
    }
}
