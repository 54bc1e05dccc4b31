//! English words for numerals.

const ONES: [&str; 20] = [
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
    "eleven", "twelve", "thirteen", "fourteen", "fifteen", "sixteen", "seventeen", "eighteen",
    "nineteen",
];
const TENS: [&str; 10] = [
    "", "", "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety",
];

/// Largest integer spelled as a cardinal; longer digit runs are read digit by digit.
pub const MAX_CARDINAL: u64 = 999_999;

fn below_thousand(n: u64, out: &mut Vec<&'static str>) {
    debug_assert!(n < 1000);
    let hundreds = n / 100;
    let rest = n % 100;
    if hundreds > 0 {
        out.push(ONES[hundreds as usize]);
        out.push("hundred");
    }
    if rest >= 20 {
        out.push(TENS[(rest / 10) as usize]);
        if !rest.is_multiple_of(10) {
            out.push(ONES[(rest % 10) as usize]);
        }
    } else if rest > 0 || hundreds == 0 {
        out.push(ONES[rest as usize]);
    }
}

/// Cardinal words for `n <= 999_999`, e.g. `1205` → "one thousand two hundred five".
pub fn integer_to_words(n: u64) -> Option<String> {
    if n > MAX_CARDINAL {
        return None;
    }
    let mut words = Vec::new();
    let thousands = n / 1000;
    let rest = n % 1000;
    if thousands > 0 {
        below_thousand(thousands, &mut words);
        words.push("thousand");
        if rest > 0 {
            below_thousand(rest, &mut words);
        }
    } else {
        below_thousand(rest, &mut words);
    }
    Some(words.join(" "))
}

fn digits_to_words(digits: &str) -> String {
    digits
        .chars()
        .filter_map(|c| c.to_digit(10))
        .map(|d| ONES[d as usize])
        .collect::<Vec<_>>()
        .join(" ")
}

/// Words for a numeral given its integer digits and optional fractional digits.
/// Fractional digits are read one by one after "point".
pub fn number_to_words(int_digits: &str, frac_digits: Option<&str>) -> String {
    let int_words = int_digits
        .parse::<u64>()
        .ok()
        .and_then(integer_to_words)
        .unwrap_or_else(|| digits_to_words(int_digits));
    match frac_digits {
        Some(f) if !f.is_empty() => format!("{int_words} point {}", digits_to_words(f)),
        _ => int_words,
    }
}
