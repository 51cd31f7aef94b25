//! Case patterns for word replacements.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CasePattern {
    Lower,
    /// First letter uppercase, e.g. "Boots".
    Title,
    /// Two or more letters, all uppercase, e.g. "NASA".
    Upper,
}

impl CasePattern {
    pub fn of(word: &str) -> Self {
        let mut chars = word.chars();
        let Some(first) = chars.next() else {
            return CasePattern::Lower;
        };
        let letters = word.chars().filter(|c| c.is_alphabetic()).count();
        if letters > 1
            && word
                .chars()
                .filter(|c| c.is_alphabetic())
                .all(|c| c.is_uppercase())
        {
            CasePattern::Upper
        } else if first.is_uppercase() {
            CasePattern::Title
        } else {
            CasePattern::Lower
        }
    }

    /// Mirror this pattern onto `replacement`. `Lower` leaves the
    /// replacement as given.
    pub fn apply(self, replacement: &str) -> String {
        match self {
            CasePattern::Lower => replacement.to_string(),
            CasePattern::Upper => replacement.to_uppercase(),
            CasePattern::Title => {
                let mut chars = replacement.chars();
                match chars.next() {
                    Some(first) => first.to_uppercase().chain(chars).collect(),
                    None => String::new(),
                }
            }
        }
    }
}

/// Give `replacement` the case pattern of `original`.
pub fn restore_case(original: &str, replacement: &str) -> String {
    CasePattern::of(original).apply(replacement)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn patterns() {
        assert_eq!(CasePattern::of("boots"), CasePattern::Lower);
        assert_eq!(CasePattern::of("Boots"), CasePattern::Title);
        assert_eq!(CasePattern::of("BOOTS"), CasePattern::Upper);
        assert_eq!(CasePattern::of("I"), CasePattern::Title);
        assert_eq!(CasePattern::of("McDonald"), CasePattern::Title);
    }

    #[test]
    fn restore() {
        assert_eq!(restore_case("Illustrated", "illustrate"), "Illustrate");
        assert_eq!(restore_case("NICE", "nasty"), "NASTY");
        assert_eq!(restore_case("boot", "Hessian"), "Hessian");
    }
}
