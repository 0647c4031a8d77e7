//! Parsing of the `estimate` command's domain, point and poles file.

use std::path::Path;

use lempert_core::records::ComplexRecord;
use lempert_core::{Complex64, Domain, Pole, PoleSpec};
use serde::Deserialize;

use crate::error::{LabError, Result};

/// `disc`, `punctured`, `bidisc`, `polydisc:N` or `ball:N`.
pub fn parse_domain(desc: &str) -> Result<Domain> {
    let bad = || LabError::Usage(format!("unknown domain `{desc}`"));
    let dim = |n: &str| -> Result<usize> {
        match n.parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(bad()),
        }
    };
    let domain = match desc.split_once(':') {
        None => match desc {
            "disc" | "unit-disc" => Domain::UnitDisc,
            "punctured" | "punctured-disc" => Domain::PuncturedDisc,
            "bidisc" => Domain::bidisc(),
            _ => return Err(bad()),
        },
        Some(("polydisc", n)) => Domain::Polydisc { n: dim(n)? },
        Some(("ball", n)) => Domain::EuclideanBall { n: dim(n)? },
        Some(_) => return Err(bad()),
    };
    domain.validate()?;
    Ok(domain)
}

/// Comma-separated coordinates, each a complex number such as `0.5`,
/// `-0.2i` or `0.1+0.3i`.
pub fn parse_point(text: &str) -> Result<Vec<Complex64>> {
    text.split(',')
        .map(|s| {
            let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
            s.parse::<Complex64>()
                .map_err(|_| LabError::Usage(format!("cannot parse `{s}` as a complex number")))
        })
        .collect()
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PoleRecord {
    point: Vec<ComplexRecord>,
    weight: f64,
}

/// A JSON list of `{"point": [{"re": …, "im": …}, …], "weight": …}`.
pub fn parse_poles(text: &str, origin: &str) -> Result<PoleSpec> {
    if text.trim().is_empty() {
        return Err(LabError::Usage(format!(
            "{origin}: poles file is empty; a non-empty pole set is required"
        )));
    }
    let records: Vec<PoleRecord> = serde_json::from_str(text).map_err(|e| LabError::Parse {
        path: origin.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let poles = records
        .into_iter()
        .map(|r| Pole::new(r.point.into_iter().map(Complex64::from).collect(), r.weight))
        .collect();
    Ok(PoleSpec::finite(poles)?)
}

pub fn read_poles(path: &Path) -> Result<PoleSpec> {
    let text = std::fs::read_to_string(path)?;
    parse_poles(&text, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domains() {
        assert_eq!(parse_domain("disc").unwrap(), Domain::UnitDisc);
        assert_eq!(parse_domain("polydisc:3").unwrap(), Domain::Polydisc { n: 3 });
        assert_eq!(parse_domain("ball:2").unwrap(), Domain::EuclideanBall { n: 2 });
        assert!(parse_domain("ball:0").is_err());
        assert!(parse_domain("annulus").is_err());
    }

    #[test]
    fn points() {
        let z = parse_point("0.5, -0.25+0.5i,-0.1i").unwrap();
        assert_eq!(
            z,
            vec![
                Complex64::new(0.5, 0.0),
                Complex64::new(-0.25, 0.5),
                Complex64::new(0.0, -0.1)
            ]
        );
        assert!(parse_point("half").is_err());
    }

    #[test]
    fn poles_parse() {
        let spec = parse_poles(r#"[{"point": [{"re": 0.5, "im": 0.0}], "weight": 2}]"#, "p").unwrap();
        assert_eq!(spec.poles(), &[Pole::scalar(Complex64::new(0.5, 0.0), 2.0)]);
    }

    #[test]
    fn parse_errors_carry_line_and_column() {
        let err = parse_poles("[\n  {\"point\": [], \"weight\": }\n]", "poles.json").unwrap_err();
        let LabError::Parse { line, column, .. } = &err else {
            panic!("{err}")
        };
        assert_eq!((*line, *column), (2, 27));
        assert!(err.to_string().starts_with("poles.json:2:27:"));
    }

    #[test]
    fn empty_inputs_are_rejected() {
        assert!(parse_poles("  \n", "p")
            .unwrap_err()
            .to_string()
            .contains("non-empty"));
        assert!(parse_poles("[]", "p")
            .unwrap_err()
            .to_string()
            .contains("non-empty"));
    }
}
