//! Angles in radians, with `pi` literals.

use std::f64::consts::PI;

/// Accepts plain numbers and `pi` forms such as `pi`, `-pi`, `pi/2`, `2pi`,
/// `2*pi`, `3pi/4`.
pub fn parse_angle(text: &str) -> Result<f64, String> {
    let s: String = text.trim().to_ascii_lowercase().chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("invalid angle {text:?} (radians; `pi` forms like pi/2 or 2*pi allowed)");
    let value = match s.find("pi") {
        None => s.parse::<f64>().map_err(|_| bad())?,
        Some(at) => {
            let coeff = s[..at].trim_end_matches('*');
            let coeff = match coeff {
                "" | "+" => 1.0,
                "-" => -1.0,
                c => c.parse::<f64>().map_err(|_| bad())?,
            };
            let rest = &s[at + 2..];
            let divisor = match rest {
                "" => 1.0,
                r => r.strip_prefix('/').ok_or_else(bad)?.parse::<f64>().map_err(|_| bad())?,
            };
            coeff * PI / divisor
        }
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_forms() {
        assert_eq!(parse_angle("pi").unwrap(), PI);
        assert_eq!(parse_angle("-pi").unwrap(), -PI);
        assert_eq!(parse_angle("pi/2").unwrap(), PI / 2.0);
        assert_eq!(parse_angle("2pi").unwrap(), 2.0 * PI);
        assert_eq!(parse_angle("2*pi").unwrap(), 2.0 * PI);
        assert_eq!(parse_angle("3pi/4").unwrap(), 3.0 * PI / 4.0);
        assert_eq!(parse_angle("3.141592653589793").unwrap(), PI);
        assert_eq!(parse_angle("0.5").unwrap(), 0.5);
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", "tau", "pi/", "pi/0", "2pix", "nan", "inf", "deg"] {
            assert!(parse_angle(s).is_err(), "{s}");
        }
    }
}
