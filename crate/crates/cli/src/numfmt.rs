//! Number presentation shared by every report format.

/// Rounds to 12 significant digits; the result prints identically in JSON
/// and CSV.
pub fn sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Small-denominator fraction equal to `x` within 1e-12, e.g. `"1/4"`.
pub fn rational(x: f64) -> Option<String> {
    if !(-1e-12..=1.0 + 1e-12).contains(&x) {
        return None;
    }
    for den in 1u64..=16 {
        let num = (x * den as f64).round();
        if (x - num / den as f64).abs() <= 1e-12 {
            let num = num as u64;
            if num == 0 {
                return Some("0".into());
            }
            let g = gcd(num, den);
            return Some(if den / g == 1 {
                format!("{}", num / g)
            } else {
                format!("{}/{}", num / g, den / g)
            });
        }
    }
    None
}
