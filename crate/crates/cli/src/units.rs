//! Quantities with units: `"1 cm"`, `"30 GHz"`, `"lambda/4"`, `"0.8 dr"`,
//! `"-115 dBm"`. Bare numbers are in SI base units (m, Hz, W, dB).

use serde::Deserialize;

/// A config value given either as a bare number or as text with a unit.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Quantity {
    Number(f64),
    Text(String),
}

/// Symbols a length may be expressed in.
#[derive(Debug, Clone, Copy, Default)]
pub struct LengthContext {
    pub lambda: Option<f64>,
    pub dr: Option<f64>,
}

/// Splits `"<number> <unit>"`; `"a/b"` divides by the plain number `b`, and
/// a unit with no number in front counts once.
fn number_and_unit(text: &str) -> Result<(f64, String), String> {
    let t = text.replace(['*', '·'], " ");
    let t = t.trim();
    if let Some((num, den)) = t.split_once('/') {
        let d: f64 = den
            .trim()
            .parse()
            .map_err(|_| format!("`{den}` in `{text}` is not a number"))?;
        if d == 0.0 {
            return Err(format!("division by zero in `{text}`"));
        }
        let (n, u) = number_and_unit(num)?;
        return Ok((n / d, u));
    }
    let split = t
        .char_indices()
        .map(|(i, _)| i)
        .chain(std::iter::once(t.len()))
        .filter(|&i| i > 0)
        .rev()
        .find(|&i| t[..i].parse::<f64>().is_ok());
    match split {
        Some(i) => Ok((t[..i].parse().expect("checked"), t[i..].trim().to_string())),
        None if !t.is_empty() => Ok((1.0, t.to_string())),
        None => Err("empty quantity".into()),
    }
}

fn resolve(q: &Quantity, unit: impl Fn(f64, &str) -> Option<Result<f64, String>>, what: &str) -> Result<f64, String> {
    let (n, u) = match q {
        Quantity::Number(n) => (*n, String::new()),
        Quantity::Text(s) => number_and_unit(s)?,
    };
    match unit(n, &u) {
        Some(Ok(v)) if v.is_finite() => Ok(v),
        Some(Ok(v)) => Err(format!("{what} `{v}` is not finite")),
        Some(Err(e)) => Err(e),
        None => Err(format!("unknown {what} unit `{u}`")),
    }
}

/// Length in metres.
pub fn length(q: &Quantity, ctx: LengthContext) -> Result<f64, String> {
    resolve(
        q,
        |n, u| {
            let scale = match u {
                "" | "m" => 1.0,
                "cm" => 1e-2,
                "mm" => 1e-3,
                "um" | "µm" => 1e-6,
                "km" => 1e3,
                "lambda" | "λ" => match ctx.lambda {
                    Some(l) => l,
                    None => return Some(Err("`lambda` used before the wavelength is known".into())),
                },
                "dr" => match ctx.dr {
                    Some(d) => d,
                    None => return Some(Err("`dr` used before the element spacing is known".into())),
                },
                _ => return None,
            };
            Some(Ok(n * scale))
        },
        "length",
    )
}

/// Frequency in hertz.
pub fn frequency(q: &Quantity) -> Result<f64, String> {
    resolve(
        q,
        |n, u| {
            let scale = match u {
                "" | "Hz" => 1.0,
                "kHz" => 1e3,
                "MHz" => 1e6,
                "GHz" => 1e9,
                "THz" => 1e12,
                _ => return None,
            };
            Some(Ok(n * scale))
        },
        "frequency",
    )
}

/// Power in watts.
pub fn power(q: &Quantity) -> Result<f64, String> {
    resolve(
        q,
        |n, u| {
            Some(Ok(match u {
                "" | "W" => n,
                "mW" => n * 1e-3,
                "dBm" => lisbt::dbm_to_watts(n),
                "dBW" => lisbt::db_to_linear(n),
                _ => return None,
            }))
        },
        "power",
    )
}

/// Power ratio in dB.
pub fn decibels(q: &Quantity) -> Result<f64, String> {
    resolve(
        q,
        |n, u| match u {
            "" | "dB" => Some(Ok(n)),
            _ => None,
        },
        "ratio",
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Quantity {
        Quantity::Text(s.into())
    }

    #[test]
    fn lengths() {
        let none = LengthContext::default();
        assert_eq!(length(&t("1 cm"), none).unwrap(), 0.01);
        assert_eq!(length(&t("2.5mm"), none).unwrap(), 0.0025);
        assert_eq!(length(&Quantity::Number(200.0), none).unwrap(), 200.0);
        assert_eq!(length(&t("1e-2 m"), none).unwrap(), 0.01);
        let ctx = LengthContext {
            lambda: Some(0.01),
            dr: Some(0.0025),
        };
        assert_eq!(length(&t("lambda/4"), ctx).unwrap(), 0.0025);
        assert_eq!(length(&t("λ/4"), ctx).unwrap(), 0.0025);
        assert!((length(&t("0.8 dr"), ctx).unwrap() - 0.002).abs() < 1e-18);
        assert!((length(&t("0.8*dr"), ctx).unwrap() - 0.002).abs() < 1e-18);
        assert!(length(&t("dr"), none).is_err());
        assert!(length(&t("3 parsecs"), none).is_err());
        assert!(length(&t("lambda/0"), ctx).is_err());
    }

    #[test]
    fn powers_and_frequencies() {
        assert_eq!(frequency(&t("30 GHz")).unwrap(), 30e9);
        assert!((power(&t("30 dBm")).unwrap() - 1.0).abs() < 1e-15);
        let n0 = power(&t("-115 dBm")).unwrap();
        assert!((n0 - 3.1623e-15).abs() < 1e-19);
        assert_eq!(power(&t("5 mW")).unwrap(), 0.005);
        assert_eq!(decibels(&t("20 dB")).unwrap(), 20.0);
        assert!(power(&t("20 dB")).is_err());
        assert!(frequency(&t("")).is_err());
    }
}
