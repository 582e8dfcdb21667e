//! Job documents: JSON with rationals written as "n" or "n/d".

use heightbound::arith::{parse_rational, Q};
use heightbound::bounds::{C0Choice, CurveDescriptor, PolyInput};
use heightbound::cm::{CMOrder, EndElement};
use heightbound::elliptic::{EPoint, EllipticCurveQ};
use heightbound::klattice::EndVector;
use heightbound::{Error, Result};
use num_traits::ToPrimitive;
use serde_json::Value;

pub const SCHEMA: u64 = 1;

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

pub fn check_schema(doc: &Value) -> Result<()> {
    match doc.get("schema").and_then(Value::as_u64) {
        Some(SCHEMA) => Ok(()),
        Some(v) => Err(invalid(format!("unsupported schema {v}, expected {SCHEMA}"))),
        None => Err(invalid("missing \"schema\": 1")),
    }
}

fn field<'a>(doc: &'a Value, key: &str) -> Result<&'a Value> {
    doc.get(key).ok_or_else(|| invalid(format!("missing field {key:?}")))
}

pub fn rational(v: &Value) -> Result<Q> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => match n.as_i64() {
            Some(i) => Ok(Q::from_integer(i.into())),
            None => Err(invalid(format!("{n} is not an integer; write rationals as \"n/d\""))),
        },
        _ => Err(invalid(format!("expected a rational, got {v}"))),
    }
}

/// A nonnegative real given as a number or a rational string.
pub fn real(v: &Value) -> Result<f64> {
    let x = match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| invalid(format!("bad number {n}")))?,
        _ => rational(v)?
            .to_f64()
            .ok_or_else(|| invalid(format!("{v} does not fit a float")))?,
    };
    if !x.is_finite() {
        return Err(invalid(format!("{v} is not finite")));
    }
    Ok(x)
}

fn uint(doc: &Value, key: &str) -> Result<u64> {
    field(doc, key)?
        .as_u64()
        .ok_or_else(|| invalid(format!("{key:?} must be a nonnegative integer")))
}

pub fn curve(doc: &Value) -> Result<EllipticCurveQ> {
    let c = field(doc, "curve")?;
    let a = rational(field(c, "A")?)?;
    let b = rational(field(c, "B")?)?;
    EllipticCurveQ::from_rationals(&a, &b)
}

/// The CM order: {"D": d, "f": f}, null for no CM, or inferred from j when absent.
pub fn order(doc: &Value, e: Option<&EllipticCurveQ>) -> Result<CMOrder> {
    match doc.get("cm") {
        Some(Value::Null) => Ok(CMOrder::non_cm()),
        Some(c) => {
            let d = field(c, "D")?
                .as_i64()
                .ok_or_else(|| invalid("\"D\" must be an integer"))?;
            let f = c
                .get("f")
                .map_or(Some(1), Value::as_i64)
                .ok_or_else(|| invalid("\"f\" must be an integer"))?;
            CMOrder::new(d, f)
        }
        None => match e {
            Some(e) => Ok(CMOrder::from_j_invariant(e.j_invariant()).unwrap_or_else(CMOrder::non_cm)),
            None => Err(invalid("missing field \"cm\"")),
        },
    }
}

pub fn c0_choice(doc: &Value) -> Result<C0Choice> {
    match doc.get("c0").and_then(Value::as_str) {
        None | Some("rigorous") => Ok(C0Choice::Rigorous),
        Some("packaged") => Ok(C0Choice::Packaged),
        Some(s) => Err(invalid(format!(
            "\"c0\" must be \"rigorous\" or \"packaged\", got {s:?}"
        ))),
    }
}

pub fn descriptor(doc: &Value) -> Result<CurveDescriptor> {
    let e = curve(doc)?;
    let ord = order(doc, Some(&e))?;
    let n = uint(doc, "N")? as u32;
    let t_c = doc.get("tC").map_or(Ok(n as u64), |v| {
        v.as_u64().ok_or_else(|| invalid("\"tC\" must be an integer"))
    })?;
    let r_c = doc.get("rC").map_or(Ok(n as u64), |v| {
        v.as_u64().ok_or_else(|| invalid("\"rC\" must be an integer"))
    })?;
    Ok(CurveDescriptor {
        n,
        deg_c: uint(doc, "degC")?,
        h2_c: real(field(doc, "h2C")?)?,
        h_c: doc.get("hC").map_or(Ok(0.0), real)?,
        t_c: t_c as u32,
        r_c: r_c as u32,
        r: uint(doc, "r")? as u32,
        ord,
        curve: e,
    })
}

/// Coefficients p_0, …, p_n as a list, or a polynomial in x such as "x^2 - 3x + 1/2".
pub fn polynomial(doc: &Value) -> Result<PolyInput> {
    match field(doc, "p")? {
        Value::Array(cs) => PolyInput::new(cs.iter().map(rational).collect::<Result<_>>()?),
        Value::String(s) => PolyInput::new(parse_poly(s)?),
        v => Err(invalid(format!(
            "\"p\" must be a coefficient list or a polynomial string, got {v}"
        ))),
    }
}

pub fn parse_poly(s: &str) -> Result<Vec<Q>> {
    let bad = || invalid(format!("cannot parse polynomial {s:?}"));
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(bad());
    }
    let mut terms = Vec::new();
    let mut start = 0;
    for (i, ch) in compact.char_indices() {
        if (ch == '+' || ch == '-') && i > 0 && !compact[..i].ends_with('^') {
            terms.push(&compact[start..i]);
            start = i;
        }
    }
    terms.push(&compact[start..]);
    let mut coeffs: Vec<Q> = Vec::new();
    for t in terms {
        let (sign, body) = match t.strip_prefix('-') {
            Some(b) => (-1, b),
            None => (1, t.strip_prefix('+').unwrap_or(t)),
        };
        let (coef, deg) = match body.split_once('x') {
            None => (parse_rational(body).map_err(|_| bad())?, 0usize),
            Some((c, rest)) => {
                let c = c.strip_suffix('*').unwrap_or(c);
                let coef = if c.is_empty() {
                    Q::from_integer(1.into())
                } else {
                    parse_rational(c).map_err(|_| bad())?
                };
                let deg = match rest.strip_prefix('^') {
                    None if rest.is_empty() => 1,
                    Some(d) => d.parse::<usize>().map_err(|_| bad())?,
                    None => return Err(bad()),
                };
                (coef, deg)
            }
        };
        if deg > 64 {
            return Err(invalid(format!("degree {deg} is too large")));
        }
        if coeffs.len() <= deg {
            coeffs.resize(deg + 1, Q::from_integer(0.into()));
        }
        coeffs[deg] += coef * Q::from_integer(sign.into());
    }
    Ok(coeffs)
}

pub fn point(v: &Value) -> Result<EPoint> {
    match v {
        Value::Null => Ok(EPoint::Infinity),
        Value::Array(xy) if xy.len() == 2 => Ok(EPoint::affine(rational(&xy[0])?, rational(&xy[1])?)),
        _ => Err(invalid(format!("a point is [x, y] or null, got {v}"))),
    }
}

/// Rows of End(E)-vectors; each entry is an integer or a pair [a, b] for a + bτ.
pub fn rows(doc: &Value) -> Result<Vec<EndVector>> {
    let rows = field(doc, "rows")?
        .as_array()
        .ok_or_else(|| invalid("\"rows\" must be a list"))?;
    rows.iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| invalid("each row must be a list"))?
                .iter()
                .map(|e| match e {
                    Value::Number(n) => n
                        .as_i64()
                        .map(EndElement::int)
                        .ok_or_else(|| invalid(format!("bad entry {n}"))),
                    Value::Array(ab) if ab.len() == 2 => match (ab[0].as_i64(), ab[1].as_i64()) {
                        (Some(a), Some(b)) => Ok(EndElement::new(a, b)),
                        _ => Err(invalid(format!("bad entry {e}"))),
                    },
                    _ => Err(invalid(format!("bad entry {e}"))),
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use heightbound::arith::{q, qr};

    #[test]
    fn polynomial_strings() {
        assert_eq!(parse_poly("x").unwrap(), vec![q(0), q(1)]);
        assert_eq!(parse_poly("x - 1").unwrap(), vec![q(-1), q(1)]);
        assert_eq!(
            parse_poly("-2x^3 + 1/2*x + 3").unwrap(),
            vec![q(3), qr(1, 2), q(0), q(-2)]
        );
        assert!(parse_poly("x^").is_err());
        assert!(parse_poly("").is_err());
    }
}
