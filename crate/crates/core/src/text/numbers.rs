//! English cardinal expansion for integers below one million.

const ONES: [&str; 20] = [
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

pub const MAX_CARDINAL: u32 = 999_999;

/// Spells out `n` as separate words, e.g. `42` → `["forty", "two"]`.
///
/// Returns `None` for values above [`MAX_CARDINAL`].
pub fn cardinal_words(n: u32) -> Option<Vec<&'static str>> {
    if n > MAX_CARDINAL {
        return None;
    }
    if n == 0 {
        return Some(vec![ONES[0]]);
    }
    let mut out = Vec::new();
    let thousands = n / 1000;
    let rest = n % 1000;
    if thousands > 0 {
        below_thousand(thousands, &mut out);
        out.push("thousand");
    }
    if rest > 0 {
        below_thousand(rest, &mut out);
    }
    Some(out)
}

fn below_thousand(n: u32, out: &mut Vec<&'static str>) {
    debug_assert!(n > 0 && n < 1000);
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
    } else if rest > 0 {
        out.push(ONES[rest as usize]);
    }
}
