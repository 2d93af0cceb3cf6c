//! Spoken-number parsing: digits, cardinal words up to 9999, and ordinals.

const UNITS: [&str; 20] = [
    "zero",
    "one",
    "two",
    "three",
    "four",
    "five",
    "six",
    "seven",
    "eight",
    "nine",
    "ten",
    "eleven",
    "twelve",
    "thirteen",
    "fourteen",
    "fifteen",
    "sixteen",
    "seventeen",
    "eighteen",
    "nineteen",
];
const TENS: [&str; 10] = ["", "", "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety"];
const UNIT_ORDINALS: [&str; 20] = [
    "zeroth",
    "first",
    "second",
    "third",
    "fourth",
    "fifth",
    "sixth",
    "seventh",
    "eighth",
    "ninth",
    "tenth",
    "eleventh",
    "twelfth",
    "thirteenth",
    "fourteenth",
    "fifteenth",
    "sixteenth",
    "seventeenth",
    "eighteenth",
    "nineteenth",
];
const TEN_ORDINALS: [&str; 10] =
    ["", "", "twentieth", "thirtieth", "fortieth", "fiftieth", "sixtieth", "seventieth", "eightieth", "ninetieth"];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("not a number: {0:?}")]
pub struct NotANumber(pub String);

#[derive(Clone, Copy, PartialEq, Eq)]
enum Word {
    Unit(u32),
    Tens(u32),
    Hundred,
    Thousand,
}

fn classify_word(w: &str) -> Option<(Word, bool)> {
    if let Some(i) = UNITS.iter().position(|u| *u == w) {
        return Some((Word::Unit(i as u32), false));
    }
    if let Some(i) = UNIT_ORDINALS.iter().position(|u| *u == w) {
        return Some((Word::Unit(i as u32), true));
    }
    if let Some(i) = TENS.iter().position(|u| !u.is_empty() && *u == w) {
        return Some((Word::Tens(i as u32 * 10), false));
    }
    if let Some(i) = TEN_ORDINALS.iter().position(|u| !u.is_empty() && *u == w) {
        return Some((Word::Tens(i as u32 * 10), true));
    }
    match w {
        "hundred" => Some((Word::Hundred, false)),
        "hundredth" => Some((Word::Hundred, true)),
        "thousand" => Some((Word::Thousand, false)),
        "thousandth" => Some((Word::Thousand, true)),
        _ => None,
    }
}

fn parse_digits(s: &str) -> Option<f64> {
    let body = ["st", "nd", "rd", "th"].iter().find_map(|suf| s.strip_suffix(suf)).unwrap_or(s);
    let mut parts = body.splitn(2, '.');
    let int = parts.next()?;
    let frac = parts.next();
    let digits_ok = |p: &str| !p.is_empty() && p.bytes().all(|b| b.is_ascii_digit());
    if !digits_ok(int) || frac.is_some_and(|f| !digits_ok(f)) || (frac.is_some() && body.len() != s.len()) {
        return None;
    }
    body.parse().ok()
}

/// Parses `"74"`, `"88.5"`, `"one hundred"`, `"twenty-five"`, `"fourth"`, `"4th"`.
pub fn clear_number(raw: &str) -> Result<f64, NotANumber> {
    let fail = || NotANumber(raw.to_string());
    let text = raw.trim().to_lowercase();
    if let Some(v) = parse_digits(&text) {
        return Ok(v);
    }
    let words: Vec<&str> =
        text.split(|c: char| c.is_whitespace() || c == '-').filter(|w| !w.is_empty() && *w != "and").collect();
    if words.is_empty() {
        return Err(fail());
    }
    let mut parsed = Vec::with_capacity(words.len());
    for (i, w) in words.iter().enumerate() {
        let (word, ordinal) = match *w {
            "a" if i + 1 < words.len() => (Word::Unit(1), false),
            _ => classify_word(w).ok_or_else(fail)?,
        };
        if ordinal && i + 1 != words.len() {
            return Err(fail());
        }
        parsed.push(word);
    }
    if parsed == [Word::Unit(0)] {
        return Ok(0.0);
    }

    // thousands? hundreds? (tens unit? | unit)?
    let mut total = 0u32;
    let mut rest = parsed.as_slice();
    let small = |s: &[Word]| -> Option<(u32, usize)> {
        match s {
            [Word::Tens(t), Word::Unit(u), ..] if (1..=9).contains(u) => Some((t + u, 2)),
            [Word::Tens(t), ..] => Some((*t, 1)),
            [Word::Unit(u), ..] if *u >= 1 => Some((*u, 1)),
            _ => None,
        }
    };
    if let Some(pos) = rest.iter().position(|w| *w == Word::Thousand) {
        let (n, used) = match small(&rest[..pos]) {
            Some((n, used)) if used == pos && n <= 9 => (n, used),
            None if pos == 0 => (1, 0),
            _ => return Err(fail()),
        };
        debug_assert_eq!(used, pos);
        total += n * 1000;
        rest = &rest[pos + 1..];
    }
    if let Some(pos) = rest.iter().position(|w| *w == Word::Hundred) {
        let n = match &rest[..pos] {
            [] => 1,
            [Word::Unit(u)] if (1..=9).contains(u) => *u,
            _ => return Err(fail()),
        };
        total += n * 100;
        rest = &rest[pos + 1..];
    }
    if !rest.is_empty() {
        match small(rest) {
            Some((n, used)) if used == rest.len() => total += n,
            _ => return Err(fail()),
        }
    }
    Ok(total as f64)
}

/// Cardinal words for `0..=9999`, e.g. `"one thousand two hundred thirty-four"`.
pub fn number_to_words(n: u32) -> String {
    assert!(n <= 9999, "out of range");
    if n == 0 {
        return "zero".into();
    }
    let mut parts: Vec<String> = Vec::new();
    if n >= 1000 {
        parts.push(format!("{} thousand", UNITS[(n / 1000) as usize]));
    }
    if n % 1000 >= 100 {
        parts.push(format!("{} hundred", UNITS[((n % 1000) / 100) as usize]));
    }
    let low = n % 100;
    if low > 0 {
        parts.push(tens_units(low, UNITS, TENS));
    }
    parts.join(" ")
}

/// Ordinal words for `0..=9999`, e.g. `"fourth"`, `"twenty-first"`, `"one hundredth"`.
pub fn ordinal_words(n: u32) -> String {
    assert!(n <= 9999, "out of range");
    if n == 0 {
        return "zeroth".into();
    }
    let low = n % 100;
    if low == 0 {
        let cardinal = number_to_words(n);
        return format!("{cardinal}th");
    }
    let head = n - low;
    let tail = if low < 20 {
        UNIT_ORDINALS[low as usize].to_string()
    } else if low.is_multiple_of(10) {
        TEN_ORDINALS[(low / 10) as usize].to_string()
    } else {
        format!("{}-{}", TENS[(low / 10) as usize], UNIT_ORDINALS[(low % 10) as usize])
    };
    if head == 0 {
        tail
    } else {
        format!("{} {tail}", number_to_words(head))
    }
}

fn tens_units(low: u32, units: [&str; 20], tens: [&str; 10]) -> String {
    if low < 20 {
        units[low as usize].to_string()
    } else if low.is_multiple_of(10) {
        tens[(low / 10) as usize].to_string()
    } else {
        format!("{}-{}", tens[(low / 10) as usize], units[(low % 10) as usize])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(clear_number("one hundred"), Ok(100.0));
        assert_eq!(clear_number("fourth"), Ok(4.0));
        assert_eq!(clear_number("fifth"), Ok(5.0));
        assert_eq!(clear_number("0"), Ok(0.0));
        assert_eq!(clear_number("74"), Ok(74.0));
        assert_eq!(clear_number("88.5"), Ok(88.5));
        assert_eq!(clear_number("4th"), Ok(4.0));
        assert_eq!(clear_number("one hundred five"), Ok(105.0));
        assert_eq!(clear_number("a hundred and five"), Ok(105.0));
        assert_eq!(clear_number("twenty five"), Ok(25.0));
        assert_eq!(clear_number("nine thousand nine hundred ninety-nine"), Ok(9999.0));
        assert_eq!(clear_number("one hundredth"), Ok(100.0));
    }

    #[test]
    fn rejects_non_numbers() {
        for bad in
            ["", "engine", "five five", "fourth engine", "hundred thousand", "4.", ".5", "twenty thirty", "first two"]
        {
            assert!(clear_number(bad).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn renderers_round_trip_through_parser() {
        for n in 0..=9999 {
            assert_eq!(clear_number(&number_to_words(n)), Ok(n as f64), "{}", number_to_words(n));
            assert_eq!(clear_number(&ordinal_words(n)), Ok(n as f64), "{}", ordinal_words(n));
        }
    }
}
