//! Binary byte units and the three-significant-figure cell format.

const UNITS: [&str; 7] = ["B", "KB", "MB", "GB", "TB", "PB", "EB"];

/// `⌈log₂ x⌉`, with `⌈log₂ 0⌉ = ⌈log₂ 1⌉ = 0`.
pub fn ceil_log2(x: u128) -> u32 {
    if x <= 1 {
        0
    } else {
        128 - (x - 1).leading_zeros()
    }
}

pub fn bits_to_bytes(bits: u128) -> f64 {
    bits as f64 / 8.0
}

/// Rounds to three significant figures; values of 100 or more print as
/// integers without rounding away digits (`1156`, not `1160`).
pub fn format_sig3(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (2 - magnitude).max(0) as usize;
    let text = format!("{x:.decimals$}");
    // 9.996 at two decimals prints as "10.00": one digit too many.
    let reparsed: f64 = text.parse().unwrap_or(x);
    let new_magnitude = reparsed.abs().log10().floor() as i32;
    if new_magnitude != magnitude && decimals > 0 {
        let decimals = decimals - 1;
        return format!("{reparsed:.decimals$}");
    }
    text
}

/// Picks the largest binary unit that keeps the value at or above one and
/// prints three significant figures, e.g. `526KB`, `2.78MB`.
pub fn format_bytes(bytes: f64) -> String {
    let mut value = bytes;
    let mut unit = 0;
    while value >= 1024.0 && unit + 1 < UNITS.len() {
        value /= 1024.0;
        unit += 1;
    }
    format!("{}{}", format_sig3(value), UNITS[unit])
}

pub fn format_bits_as_bytes(bits: u128) -> String {
    format_bytes(bits_to_bytes(bits))
}

/// Bytes in one unit named as in [`format_bytes`].
pub fn unit_bytes(unit: &str) -> Option<f64> {
    UNITS
        .iter()
        .position(|u| *u == unit)
        .map(|i| 1024f64.powi(i as i32))
}

/// Inverse of [`format_bytes`] up to its rounding.
pub fn parse_bytes(text: &str) -> Option<f64> {
    let split = text.find(|c: char| c.is_ascii_alphabetic())?;
    let (num, unit) = text.split_at(split);
    Some(num.parse::<f64>().ok()? * unit_bytes(unit)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ceil_log2_values() {
        assert_eq!(ceil_log2(0), 0);
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(3), 2);
        assert_eq!(ceil_log2(4), 2);
        assert_eq!(ceil_log2(5242), 13);
        assert_eq!(ceil_log2(1 << 36), 36);
        assert_eq!(ceil_log2((1 << 36) + 1), 37);
    }

    #[test]
    fn sig3() {
        assert_eq!(format_sig3(4.3147), "4.31");
        assert_eq!(format_sig3(56.04), "56.0");
        assert_eq!(format_sig3(526.2), "526");
        assert_eq!(format_sig3(1156.4), "1156");
        assert_eq!(format_sig3(9.996), "10.0");
        assert_eq!(format_sig3(99.96), "100");
        assert_eq!(format_sig3(0.5224), "0.522");
        assert_eq!(format_sig3(0.0), "0");
    }

    #[test]
    fn byte_cells() {
        // 165798 wedges at 2 * 13 bits each.
        assert_eq!(format_bits_as_bytes(165_798 * 26), "526KB");
        assert_eq!(format_bytes(2.78 * 1024.0 * 1024.0), "2.78MB");
        assert_eq!(format_bytes(12.0), "12.0B");
        assert_eq!(format_bytes(1023.0 * 1024.0), "1023KB");
        assert_eq!(format_bytes(1024.0 * 1024.0), "1.00MB");
        assert_eq!(parse_bytes("526KB"), Some(526.0 * 1024.0));
        assert_eq!(parse_bytes("22.8PB"), Some(22.8 * 2f64.powi(50)));
        assert_eq!(parse_bytes("x"), None);
    }
}
