//! Angles given as plain radians or as multiples of π: `pi`, `0.5pi`,
//! `pi/4`, `-3pi/4`, `2*pi`, `1.5707963267948966`.

use std::f64::consts::PI;

use serde::{Deserialize, Deserializer};

pub fn parse(text: &str) -> Result<f64, String> {
    let s = text.trim().to_ascii_lowercase().replace('π', "pi");
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, s.strip_prefix('+').unwrap_or(&s)),
    };
    let (num, den) = match body.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (body, None),
    };
    let mut value = match num.strip_suffix("pi") {
        Some(coef) => {
            let coef = coef.trim().trim_end_matches('*').trim();
            let c = if coef.is_empty() { 1.0 } else { number(coef, text)? };
            c * PI
        }
        None => number(num, text)?,
    };
    if let Some(d) = den {
        let d = number(d, text)?;
        if d == 0.0 {
            return Err(format!("angle '{text}' divides by zero"));
        }
        value /= d;
    }
    if !value.is_finite() {
        return Err(format!("angle '{text}' is not finite"));
    }
    Ok(sign * value)
}

fn number(s: &str, text: &str) -> Result<f64, String> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| format!("cannot read '{text}' as an angle (use radians or forms like 0.5pi, pi/4)"))
}

/// Accepts a number of radians or an angle string.
pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Number(f64),
        Text(String),
    }
    match Raw::deserialize(d)? {
        Raw::Number(x) => Ok(x),
        Raw::Text(t) => parse(&t).map_err(serde::de::Error::custom),
    }
}

pub fn deserialize_opt<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
    #[derive(Deserialize)]
    struct Wrap(#[serde(deserialize_with = "deserialize")] f64);
    Ok(Option::<Wrap>::deserialize(d)?.map(|w| w.0))
}
