//! Exact rational thresholds.

use num_rational::Ratio;
use num_traits::ToPrimitive;

pub type Rational = Ratio<i128>;

pub fn ratio(num: i128, den: i128) -> Rational {
    Rational::new(num, den)
}

pub fn from_int(n: usize) -> Rational {
    Rational::from_integer(n as i128)
}

pub fn pow2(e: u32) -> Rational {
    Rational::from_integer(1i128 << e)
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// `num/den` text form used in reports.
pub fn format(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Parses `NUM/DEN` or an integer.
pub fn parse(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: i128 = n.trim().parse().ok()?;
            let d: i128 = d.trim().parse().ok()?;
            (d != 0).then(|| Rational::new(n, d))
        }
        None => s.parse::<i128>().ok().map(Rational::from_integer),
    }
}

/// Closest rational to `x` with denominator at most `max_den`.
pub fn approximate(x: f64, max_den: i128) -> Rational {
    Ratio::<i128>::approximate_float(x)
        .filter(|q| *q.denom() <= max_den)
        .unwrap_or_else(|| Rational::new((x * max_den as f64).round() as i128, max_den))
}
