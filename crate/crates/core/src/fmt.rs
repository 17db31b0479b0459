//! Float formatting for emitted reports: 12 significant digits, positional
//! notation where it stays readable, trailing zeros trimmed.

/// Format with up to 12 significant digits, like `printf("%.12g")`.
pub fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }

    // Round first in scientific form, then choose the presentation from the
    // rounded exponent so values like 0.99999999999951e3 land in the right
    // branch.
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("{:e} always contains an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");

    if (-4..12).contains(&exp) {
        let negative = mantissa.starts_with('-');
        let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
        let point = exp + 1;
        let mut out = String::new();
        if negative {
            out.push('-');
        }
        if point <= 0 {
            out.push_str("0.");
            for _ in 0..-point {
                out.push('0');
            }
            out.push_str(&digits);
        } else if (point as usize) >= digits.len() {
            out.push_str(&digits);
            for _ in 0..(point as usize - digits.len()) {
                out.push('0');
            }
        } else {
            out.push_str(&digits[..point as usize]);
            out.push('.');
            out.push_str(&digits[point as usize..]);
        }
        if out.contains('.') {
            let trimmed = out.trim_end_matches('0').trim_end_matches('.');
            trimmed.to_string()
        } else {
            out
        }
    } else {
        let mantissa = if mantissa.contains('.') {
            mantissa.trim_end_matches('0').trim_end_matches('.')
        } else {
            mantissa
        };
        format!("{mantissa}e{exp}")
    }
}
