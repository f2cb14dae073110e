use std::fmt;
use std::str::FromStr;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::tailo::{tailo_split_syllable, tailo_syllables};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenizerTag {
    /// SacreBLEU `13a`.
    #[default]
    Word13a,
    /// One token per non-whitespace character.
    Char,
    /// Whole Tâi-lô syllables with digit tones.
    TailoSyllable,
    /// Each Tâi-lô syllable as its initial (when present) and its final with tone.
    TailoInitialFinal,
}

impl TokenizerTag {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Word13a => "word13a",
            Self::Char => "char",
            Self::TailoSyllable => "tailo_syllable",
            Self::TailoInitialFinal => "tailo_initial_final",
        }
    }
}

impl fmt::Display for TokenizerTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TokenizerTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "word13a" | "13a" => Ok(Self::Word13a),
            "char" => Ok(Self::Char),
            "tailo_syllable" => Ok(Self::TailoSyllable),
            "tailo_initial_final" => Ok(Self::TailoInitialFinal),
            other => Err(format!(
                "unknown tokenizer {other:?} (expected word13a, char, tailo_syllable or tailo_initial_final)"
            )),
        }
    }
}

/// Python's `str.isspace`, which is what SacreBLEU splits on. Differs from
/// `char::is_whitespace` only in U+001C..U+001F.
pub fn is_py_whitespace(c: char) -> bool {
    c.is_whitespace() || ('\u{1c}'..='\u{1f}').contains(&c)
}

fn py_split(s: &str) -> impl Iterator<Item = &str> {
    s.split(is_py_whitespace).filter(|t| !t.is_empty())
}

static RE_13A: LazyLock<[(Regex, &'static str); 4]> = LazyLock::new(|| {
    [
        (Regex::new(r"([\{-\~\[-\` -\&\(-\+\:-\@\/])").unwrap(), " ${1} "),
        (Regex::new(r"([^0-9])([\.,])").unwrap(), "${1} ${2} "),
        (Regex::new(r"([\.,])([^0-9])").unwrap(), " ${1} ${2}"),
        (Regex::new(r"([0-9])(-)").unwrap(), "${1} ${2} "),
    ]
});

/// SacreBLEU's `13a` tokenization of one segment, including its trailing-whitespace strip.
pub fn tokenize_13a(text: &str) -> Vec<String> {
    let mut line = text.trim_end_matches(is_py_whitespace).replace("<skipped>", "");
    line = line.replace("-\n", "").replace('\n', " ");
    if line.contains('&') {
        line = line
            .replace("&quot;", "\"")
            .replace("&amp;", "&")
            .replace("&lt;", "<")
            .replace("&gt;", ">");
    }
    let mut line = format!(" {line} ");
    for (re, rep) in RE_13A.iter() {
        line = re.replace_all(&line, *rep).into_owned();
    }
    py_split(&line).map(str::to_string).collect()
}

pub fn tokenize(text: &str, scheme: TokenizerTag) -> Vec<String> {
    match scheme {
        TokenizerTag::Word13a => tokenize_13a(text),
        TokenizerTag::Char => text
            .chars()
            .filter(|&c| !is_py_whitespace(c))
            .map(String::from)
            .collect(),
        TokenizerTag::TailoSyllable => tailo_syllables(text),
        TokenizerTag::TailoInitialFinal => tailo_syllables(text)
            .into_iter()
            .flat_map(|syl| {
                let (initial, final_) = tailo_split_syllable(&syl);
                (!initial.is_empty()).then_some(initial).into_iter().chain([final_])
            })
            .collect(),
    }
}

/// Segments tokenized under one scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct TokenizedCorpus {
    pub segments: Vec<Vec<String>>,
    pub tokenizer_tag: TokenizerTag,
}

impl TokenizedCorpus {
    pub fn from_texts<I, T>(texts: I, tag: TokenizerTag) -> Self
    where
        I: IntoIterator<Item = T>,
        T: AsRef<str>,
    {
        Self {
            segments: texts.into_iter().map(|t| tokenize(t.as_ref(), tag)).collect(),
            tokenizer_tag: tag,
        }
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str, t: TokenizerTag) -> Vec<String> {
        tokenize(s, t)
    }

    #[test]
    fn word13a_basic() {
        assert_eq!(toks("Hello, world!", TokenizerTag::Word13a), ["Hello", ",", "world", "!"]);
        // Digits keep their separators; a dash after a digit splits.
        assert_eq!(toks("It costs 1,000.50 - 3-4", TokenizerTag::Word13a), ["It", "costs", "1,000.50", "-", "3", "-", "4"]);
        assert_eq!(toks("a &amp; b&quot;", TokenizerTag::Word13a), ["a", "&", "b", "\""]);
        assert_eq!(toks("x <skipped> y", TokenizerTag::Word13a), ["x", "y"]);
        assert_eq!(toks("line-\nbreak\nhere", TokenizerTag::Word13a), ["linebreak", "here"]);
        assert!(toks("   ", TokenizerTag::Word13a).is_empty());
    }

    #[test]
    fn char_scheme() {
        assert_eq!(toks("你好", TokenizerTag::Char), ["你", "好"]);
        assert_eq!(toks(" 你 好\u{3000}!", TokenizerTag::Char), ["你", "好", "!"]);
    }

    #[test]
    fn tailo_schemes() {
        assert_eq!(toks("tai5-lo5 su1", TokenizerTag::TailoSyllable), ["tai5", "lo5", "su1"]);
        assert_eq!(
            toks("Tsa1 khoo2 ang5", TokenizerTag::TailoInitialFinal),
            ["ts", "a1", "kh", "oo2", "ang5"]
        );
    }

    #[test]
    fn tag_parsing() {
        for tag in [TokenizerTag::Word13a, TokenizerTag::Char, TokenizerTag::TailoSyllable, TokenizerTag::TailoInitialFinal] {
            assert_eq!(tag.as_str().parse::<TokenizerTag>().unwrap(), tag);
            assert_eq!(serde_json::to_string(&tag).unwrap(), format!("\"{}\"", tag.as_str()));
        }
        assert!("zh".parse::<TokenizerTag>().is_err());
    }
}
