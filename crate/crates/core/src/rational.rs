//! Exact rationals and their `"p/q"` string form.

use num_rational::Ratio;
use serde::Serializer;

pub type Rational = Ratio<i64>;

/// Serializes as `"p/q"` (or `"p"` when the denominator is one).
pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

pub fn serialize_opt<S: Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_str(&r.to_string()),
        None => s.serialize_none(),
    }
}

/// Parses `p/q` or a bare integer.
pub fn parse(text: &str) -> Option<Rational> {
    let text = text.trim();
    match text.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.trim().parse().ok()?;
            let q: i64 = q.trim().parse().ok()?;
            (q != 0).then(|| Rational::new(p, q))
        }
        None => Some(Rational::from_integer(text.parse().ok()?)),
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Smallest integer not below `r`.
pub fn ceil(r: &Rational) -> i64 {
    r.ceil().to_integer()
}
