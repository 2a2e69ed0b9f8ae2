/// Canonical forms of trailing street-type tokens.
const SUFFIXES: &[(&str, &str)] = &[
    ("ST", "ST"),
    ("STR", "ST"),
    ("STREET", "ST"),
    ("AVE", "AVE"),
    ("AV", "AVE"),
    ("AVENUE", "AVE"),
    ("RD", "RD"),
    ("ROAD", "RD"),
    ("DR", "DR"),
    ("DRIVE", "DR"),
    ("LN", "LN"),
    ("LANE", "LN"),
    ("CT", "CT"),
    ("COURT", "CT"),
    ("BLVD", "BLVD"),
    ("BOULEVARD", "BLVD"),
    ("PL", "PL"),
    ("PLACE", "PL"),
    ("TER", "TER"),
    ("TERRACE", "TER"),
    ("CIR", "CIR"),
    ("CIRCLE", "CIR"),
    ("HWY", "HWY"),
    ("HIGHWAY", "HWY"),
    ("PKWY", "PKWY"),
    ("PARKWAY", "PKWY"),
];

const DIRECTIONALS: &[(&str, &str)] = &[
    ("NORTH", "N"),
    ("SOUTH", "S"),
    ("EAST", "E"),
    ("WEST", "W"),
    ("NORTHEAST", "NE"),
    ("NORTHWEST", "NW"),
    ("SOUTHEAST", "SE"),
    ("SOUTHWEST", "SW"),
];

fn lookup(table: &[(&str, &'static str)], token: &str) -> Option<&'static str> {
    table.iter().find(|(k, _)| *k == token).map(|(_, v)| *v)
}

/// Uppercases, strips punctuation, collapses whitespace, canonicalizes the
/// trailing street type and abbreviates directionals.
///
/// ```
/// use zigcast_core::linkage::normalize_street;
/// assert_eq!(normalize_street("North Elm Avenue"), "N ELM AVE");
/// assert_eq!(normalize_street("main st."), "MAIN ST");
/// ```
pub fn normalize_street(name: &str) -> String {
    let cleaned: String = name
        .to_uppercase()
        .chars()
        .filter(|c| c.is_alphanumeric() || c.is_whitespace())
        .collect();
    let mut tokens: Vec<&str> = cleaned.split_whitespace().collect();
    let n = tokens.len();
    for (i, t) in tokens.iter_mut().enumerate() {
        let mapped = if i + 1 == n && n > 1 { lookup(SUFFIXES, t) } else { None };
        if let Some(m) = mapped.or_else(|| lookup(DIRECTIONALS, t)) {
            *t = m;
        }
    }
    tokens.join(" ")
}

/// Digits of a house number without leading zeros or unit suffix:
/// `"0012A"` becomes `"12"`. Numbers without a leading digit are only
/// uppercased and trimmed.
pub fn normalize_house_number(number: &str) -> String {
    let t = number.trim();
    let digits: String = t.chars().take_while(|c| c.is_ascii_digit()).collect();
    if digits.is_empty() {
        return t.to_uppercase();
    }
    let stripped = digits.trim_start_matches('0');
    if stripped.is_empty() { "0".to_string() } else { stripped.to_string() }
}

/// `round(100 · (1 − d / max(|a|, |b|)))` with `d` the Levenshtein distance
/// over characters. Two empty strings score 100.
pub fn normalized_similarity(a: &str, b: &str) -> u8 {
    let longest = a.chars().count().max(b.chars().count());
    if longest == 0 {
        return 100;
    }
    let d = strsim::levenshtein(a, b);
    (100.0 * (1.0 - d as f64 / longest as f64)).round() as u8
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn street_examples() {
        assert_eq!(normalize_street("Main Street"), "MAIN ST");
        assert_eq!(normalize_street("main st."), "MAIN ST");
        assert_eq!(normalize_street("North Elm Avenue"), "N ELM AVE");
        assert_eq!(normalize_street("  oak   ridge  rd "), "OAK RIDGE RD");
        assert_eq!(normalize_street("Sunset Boulevard"), "SUNSET BLVD");
        assert_eq!(normalize_street("Street"), "STREET");
        assert_eq!(normalize_street(""), "");
    }

    #[test]
    fn house_numbers() {
        assert_eq!(normalize_house_number("0012"), "12");
        assert_eq!(normalize_house_number("12A"), "12");
        assert_eq!(normalize_house_number(" 12 "), "12");
        assert_eq!(normalize_house_number("000"), "0");
        assert_eq!(normalize_house_number("rear"), "REAR");
    }

    #[test]
    fn similarity_examples() {
        assert_eq!(normalized_similarity("MAIN ST", "MAIN ST"), 100);
        assert_eq!(normalized_similarity("ELM ST", "ELMS ST"), 86);
        assert_eq!(normalized_similarity("OAK RIDGE RD", "OAKRIDGE RD"), 92);
        assert_eq!(normalized_similarity("", "MAIN"), 0);
        assert_eq!(normalized_similarity("", ""), 100);
    }

    proptest! {
        #[test]
        fn similarity_symmetric_and_bounded(a in "[A-Z ]{0,20}", b in "[A-Z ]{0,20}") {
            let s = normalized_similarity(&a, &b);
            prop_assert_eq!(s, normalized_similarity(&b, &a));
            prop_assert!(s <= 100);
            prop_assert_eq!(normalized_similarity(&a, &a), 100);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn normalization_idempotent(name in "[A-Za-z0-9 .,'#-]{0,30}( (north|South|EAST|st|Street|ave|Avenue|road|Rd\\.|pkwy|Parkway|circle))?") {
            let once = normalize_street(&name);
            prop_assert_eq!(normalize_street(&once), once);
        }
    }
}
