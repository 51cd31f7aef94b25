//! Letter-level rewrites: voicing swaps, the Caesar shift, Pig Latin.

use super::InterventionResult;
use crate::casing::CasePattern;

fn voicing_pair(c: char) -> char {
    match c {
        'p' => 'b',
        'b' => 'p',
        't' => 'd',
        'd' => 't',
        'k' => 'g',
        'g' => 'k',
        'f' => 'v',
        'v' => 'f',
        's' => 'z',
        'z' => 's',
        'P' => 'B',
        'B' => 'P',
        'T' => 'D',
        'D' => 'T',
        'K' => 'G',
        'G' => 'K',
        'F' => 'V',
        'V' => 'F',
        'S' => 'Z',
        'Z' => 'S',
        other => other,
    }
}

/// Swap the consonants of each voiced/voiceless pair p/b, t/d, k/g, f/v,
/// s/z, preserving case. Applying it twice restores the word.
pub fn ipa(word: &str) -> InterventionResult {
    InterventionResult::spelling(word, word.chars().map(voicing_pair).collect())
}

fn shift_char(c: char) -> char {
    match c {
        'a'..='z' => (b'a' + (c as u8 - b'a' + 1) % 26) as char,
        'A'..='Z' => (b'A' + (c as u8 - b'A' + 1) % 26) as char,
        other => other,
    }
}

/// Caesar shift by one: a->b, ..., z->a, preserving case. Letters outside
/// the basic Latin alphabet are left alone.
pub fn shift(word: &str) -> InterventionResult {
    InterventionResult::spelling(word, word.chars().map(shift_char).collect())
}

fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u')
}

/// Pig Latin. A vowel-initial word gains "yay"; otherwise the initial
/// consonant cluster moves to the end followed by "ay". "y" is a consonant
/// at the start of a word and a vowel elsewhere; a word with no vowel moves
/// whole ("hmm" -> "hmmay"). "qu" is not treated as a unit. The result is
/// built in lowercase and then given the input's case pattern.
pub fn pig(word: &str) -> InterventionResult {
    let lower: Vec<char> = word.to_lowercase().chars().collect();
    let out = match lower.first() {
        None => String::new(),
        Some(&c) if is_vowel(c) => format!("{}yay", lower.iter().collect::<String>()),
        Some(_) => {
            let cluster = 1 + lower[1..]
                .iter()
                .take_while(|&&c| !is_vowel(c) && c != 'y')
                .count();
            let (head, tail) = lower.split_at(cluster);
            format!(
                "{}{}ay",
                tail.iter().collect::<String>(),
                head.iter().collect::<String>()
            )
        }
    };
    InterventionResult::spelling(word, CasePattern::of(word).apply(&out))
}
