//! TSPLIB-style instance files.
//!
//! L¹, L² and L∞ instances are written as `MAN_2D`, `EUC_2D` and `MAX_2D`
//! with a `NODE_COORD_SECTION`. Graphic instances are written as an
//! `EXPLICIT` full matrix with the coordinates in a `DISPLAY_DATA_SECTION`.
//! Distances are never rounded to integers on import: the coordinates are
//! exact rationals `x / S`, and `S` travels in the `COMMENT` line together
//! with the family parameter and landmarks (`k=<k> l=<idx> m=<idx> scale=<S>`).

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::{GraphicMetric, UnitGraph};
use crate::instance::Instance;
use crate::metric::{MetricKind, MetricSpec, PNorm, ScaledPoint};

pub fn export_instance(instance: &Instance) -> Result<String> {
    let weight_type = match instance.metric_kind() {
        MetricKind::Lp(p) if p.is_l1() => "MAN_2D",
        MetricKind::Lp(p) if p.is_l2() => "EUC_2D",
        MetricKind::Lp(p) if p.is_inf() => "MAX_2D",
        MetricKind::Graphic => "EXPLICIT",
        other => return Err(Error::UnsupportedExport(other)),
    };
    let n = instance.len();
    let s = instance.scale();
    let mut out = String::new();
    let _ = writeln!(out, "NAME: {}", instance.name());
    let mut comment = String::new();
    if let Some(k) = instance.family_k() {
        let _ = write!(comment, "k={k} ");
    }
    let _ = writeln!(
        out,
        "COMMENT: {comment}l={} m={} scale={s}",
        instance.landmark_l(),
        instance.landmark_m()
    );
    out.push_str("TYPE: TSP\n");
    let _ = writeln!(out, "DIMENSION: {n}");
    let _ = writeln!(out, "EDGE_WEIGHT_TYPE: {weight_type}");

    let coords = |out: &mut String| {
        for (i, p) in instance.cities().iter().enumerate() {
            let _ = writeln!(out, "{} {} {}", i + 1, format_scaled(p.x, s), format_scaled(p.y, s));
        }
    };
    if weight_type == "EXPLICIT" {
        out.push_str("EDGE_WEIGHT_FORMAT: FULL_MATRIX\nDISPLAY_DATA_TYPE: TWOD_DISPLAY\nEDGE_WEIGHT_SECTION\n");
        for i in 0..n {
            let row: Vec<String> = (0..n)
                .map(|j| instance.distance(i, j).exact.unwrap_or_default().to_string())
                .collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out.push_str("DISPLAY_DATA_SECTION\n");
    } else {
        out.push_str("NODE_COORD_SECTION\n");
    }
    coords(&mut out);
    out.push_str("EOF\n");
    Ok(out)
}

/// Writes `v / s` as a decimal that reads back to exactly `v` at scale `s`.
fn format_scaled(v: i64, s: i64) -> String {
    let (mut rest, mut twos, mut fives) = (s, 0u32, 0u32);
    while rest % 2 == 0 {
        rest /= 2;
        twos += 1;
    }
    while rest % 5 == 0 {
        rest /= 5;
        fives += 1;
    }
    let (digits, mantissa) = if rest == 1 {
        let d = twos.max(fives);
        let factor = 10i128.pow(d) / i128::from(s);
        (d, i128::from(v) * factor)
    } else {
        // round-half-away to enough digits that rounding `x·S` recovers `v`
        let d = (2 * s as u128).ilog10() + 2;
        let num = i128::from(v) * 10i128.pow(d);
        let den = i128::from(s);
        let q = (2 * num + num.signum() * den) / (2 * den);
        (d, q)
    };
    if digits == 0 {
        return mantissa.to_string();
    }
    let sign = if mantissa < 0 { "-" } else { "" };
    let abs = mantissa.unsigned_abs();
    let p = 10u128.pow(digits);
    format!("{sign}{}.{:0width$}", abs / p, abs % p, width = digits as usize)
}

/// A decimal as `(mantissa, fractional digits)`.
type Decimal = (i128, u32);

fn parse_decimal(text: &str) -> Option<Decimal> {
    let (neg, body) = match text.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, text.strip_prefix('+').unwrap_or(text)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int}{frac}");
    let m: i128 = if digits.is_empty() { 0 } else { digits.parse().ok()? };
    Some((if neg { -m } else { m }, frac.len() as u32))
}

fn to_scaled((mantissa, digits): Decimal, scale: i64) -> i64 {
    let den = 10i128.pow(digits);
    let num = mantissa * i128::from(scale);
    ((2 * num + num.signum() * den) / (2 * den)) as i64
}

pub fn import_instance(text: &str) -> Result<Instance> {
    let mut header: HashMap<String, (usize, String)> = HashMap::new();
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let mut matrix: Vec<i64> = Vec::new();
    let mut coords: Vec<(usize, Decimal, Decimal)> = Vec::new();

    let mut section: Option<&str> = None;
    for (no, line) in lines.by_ref() {
        if line.is_empty() {
            continue;
        }
        if line == "EOF" {
            break;
        }
        match line {
            "NODE_COORD_SECTION" | "DISPLAY_DATA_SECTION" | "EDGE_WEIGHT_SECTION" => {
                section = Some(match line {
                    "EDGE_WEIGHT_SECTION" => "weights",
                    _ => "coords",
                });
                continue;
            }
            _ => {}
        }
        if let Some((key, value)) = line.split_once(':') {
            if section.is_none() || key.trim().chars().all(|c| c.is_ascii_uppercase() || c == '_') {
                header.insert(key.trim().to_string(), (no, value.trim().to_string()));
                section = None;
                continue;
            }
        }
        match section {
            Some("coords") => {
                let fields: Vec<&str> = line.split_whitespace().collect();
                let [id, x, y] = fields[..] else {
                    return Err(Error::parse(no, "expected `<id> <x> <y>`"));
                };
                let id: usize = id.parse().map_err(|_| Error::parse(no, format!("bad node id `{id}`")))?;
                let x = parse_decimal(x).ok_or_else(|| Error::parse(no, format!("bad coordinate `{x}`")))?;
                let y = parse_decimal(y).ok_or_else(|| Error::parse(no, format!("bad coordinate `{y}`")))?;
                coords.push((id, x, y));
            }
            Some(_) => {
                for tok in line.split_whitespace() {
                    matrix.push(tok.parse().map_err(|_| Error::parse(no, format!("bad weight `{tok}`")))?);
                }
            }
            None => return Err(Error::parse(no, format!("unexpected line `{line}`"))),
        }
    }

    let get = |key: &str| header.get(key).map(|(no, v)| (*no, v.as_str()));
    let (dim_line, dim) = get("DIMENSION").ok_or_else(|| Error::parse(0, "missing DIMENSION"))?;
    let n: usize = dim
        .parse()
        .map_err(|_| Error::parse(dim_line, format!("bad DIMENSION `{dim}`")))?;
    let (wt_line, weight_type) = get("EDGE_WEIGHT_TYPE").ok_or_else(|| Error::parse(0, "missing EDGE_WEIGHT_TYPE"))?;
    let kind = match weight_type {
        "EUC_2D" => MetricKind::Lp(PNorm::L2),
        "MAN_2D" => MetricKind::Lp(PNorm::L1),
        "MAX_2D" => MetricKind::Lp(PNorm::LINF),
        "EXPLICIT" => MetricKind::Graphic,
        other => return Err(Error::parse(wt_line, format!("unsupported EDGE_WEIGHT_TYPE `{other}`"))),
    };

    let mut fields: HashMap<&str, &str> = HashMap::new();
    if let Some((_, comment)) = get("COMMENT") {
        for tok in comment.split_whitespace() {
            if let Some((k, v)) = tok.split_once('=') {
                fields.insert(k, v);
            }
        }
    }
    let comment_int = |key: &str| -> Result<Option<i64>> {
        fields
            .get(key)
            .map(|v| v.parse::<i64>().map_err(|_| Error::parse(0, format!("bad `{key}={v}` in COMMENT"))))
            .transpose()
    };
    let family_k = comment_int("k")?
        .map(|k| u32::try_from(k).map_err(|_| Error::InvalidK(k)))
        .transpose()?;
    let l = comment_int("l")?.unwrap_or(0) as usize;
    let m = comment_int("m")?.unwrap_or(0) as usize;
    let scale = match comment_int("scale")? {
        Some(s) => s,
        None => 10i64.pow(coords.iter().map(|c| c.1 .1.max(c.2 .1)).max().unwrap_or(0)),
    };
    if scale < 1 {
        return Err(Error::InvalidScale(scale));
    }

    if coords.len() != n {
        return Err(Error::parse(0, format!("DIMENSION is {n} but {} coordinates were given", coords.len())));
    }
    let mut cities = vec![None; n];
    for (id, x, y) in coords {
        let slot = id
            .checked_sub(1)
            .and_then(|i| cities.get_mut(i))
            .ok_or_else(|| Error::parse(0, format!("node id {id} out of range")))?;
        *slot = Some(ScaledPoint::new(to_scaled(x, scale), to_scaled(y, scale)));
    }
    let cities: Vec<ScaledPoint> = cities
        .into_iter()
        .enumerate()
        .map(|(i, c)| c.ok_or_else(|| Error::parse(0, format!("node {} has no coordinates", i + 1))))
        .collect::<Result<_>>()?;

    let metric = match kind {
        MetricKind::Lp(p) => MetricSpec::Lp(p),
        MetricKind::Graphic => graphic_from_matrix(n, &matrix, &header)?,
    };
    let name = get("NAME").map_or("unnamed", |(_, v)| v).to_string();
    Instance::new(name, cities, scale, metric, l, m, family_k)
}

fn graphic_from_matrix(n: usize, matrix: &[i64], header: &HashMap<String, (usize, String)>) -> Result<MetricSpec> {
    if let Some((no, fmt)) = header.get("EDGE_WEIGHT_FORMAT") {
        if fmt != "FULL_MATRIX" {
            return Err(Error::parse(*no, format!("unsupported EDGE_WEIGHT_FORMAT `{fmt}`")));
        }
    }
    if matrix.len() != n * n {
        return Err(Error::parse(0, format!("expected {} matrix entries, found {}", n * n, matrix.len())));
    }
    for i in 0..n {
        for j in 0..n {
            if matrix[i * n + j] != matrix[j * n + i] {
                return Err(Error::parse(0, format!("weight matrix is not symmetric at ({}, {})", i + 1, j + 1)));
            }
        }
        if matrix[i * n + i] != 0 {
            return Err(Error::parse(0, format!("nonzero diagonal entry for node {}", i + 1)));
        }
    }
    let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| matrix[i * n + j] == 1);
    let metric = GraphicMetric::new(UnitGraph::from_edges(n, edges)?)?;
    for i in 0..n {
        let row = metric.row(i);
        if let Some(j) = (0..n).find(|&j| i64::from(row[j]) != matrix[i * n + j]) {
            return Err(Error::parse(
                0,
                format!("weight ({}, {}) is not a shortest-path distance of the unit graph", i + 1, j + 1),
            ));
        }
    }
    Ok(MetricSpec::Graphic(Arc::new(metric)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::generate_gk;
    use crate::perturb::{perturb, PerturbScheme};

    fn same(a: &Instance, b: &Instance) {
        assert_eq!(a.cities(), b.cities());
        assert_eq!(a.scale(), b.scale());
        assert_eq!(a.metric_kind(), b.metric_kind());
        assert_eq!(a.landmark_l(), b.landmark_l());
        assert_eq!(a.landmark_m(), b.landmark_m());
        assert_eq!(a.family_k(), b.family_k());
        assert_eq!(a.name(), b.name());
    }

    #[test]
    fn g0_euclidean_header() {
        let text = export_instance(&generate_gk(0, MetricKind::L2).unwrap()).unwrap();
        assert!(text.contains("DIMENSION: 10\n"));
        assert!(text.contains("EDGE_WEIGHT_TYPE: EUC_2D\n"));
        assert!(text.contains("COMMENT: k=0 l=0 m=7 scale=1\n"));
        assert!(text.ends_with("EOF\n"));
    }

    #[test]
    fn round_trips() {
        for kind in [MetricKind::L1, MetricKind::L2, MetricKind::LINF, MetricKind::Graphic] {
            let g1 = generate_gk(1, kind).unwrap();
            same(&g1, &import_instance(&export_instance(&g1).unwrap()).unwrap());
        }
    }

    #[test]
    fn perturbed_coordinates_survive() {
        let g0 = generate_gk(0, MetricKind::L1).unwrap();
        for scale in [1024, 3000, 777] {
            let p = perturb(&g0, PerturbScheme::Strictify, scale.max(160), 1);
            let p = match p {
                Ok(p) => p,
                Err(_) => perturb(&g0, PerturbScheme::None, scale, 0).unwrap(),
            };
            same(&p, &import_instance(&export_instance(&p).unwrap()).unwrap());
        }
    }

    #[test]
    fn decimal_formatting() {
        assert_eq!(format_scaled(3, 1), "3");
        assert_eq!(format_scaled(3, 4), "0.75");
        assert_eq!(format_scaled(-3, 4), "-0.75");
        assert_eq!(format_scaled(1023, 1024), "0.9990234375");
        assert_eq!(to_scaled(parse_decimal("0.9990234375").unwrap(), 1024), 1023);
        let third = format_scaled(1, 3);
        assert_eq!(to_scaled(parse_decimal(&third).unwrap(), 3), 1);
        assert_eq!(to_scaled(parse_decimal(&format_scaled(-2, 3)).unwrap(), 3), -2);
    }

    #[test]
    fn rejects_unsupported_input() {
        let l3 = generate_gk(0, MetricKind::lp(3.0).unwrap()).unwrap();
        assert!(matches!(export_instance(&l3), Err(Error::UnsupportedExport(_))));

        let geo = export_instance(&generate_gk(0, MetricKind::L2).unwrap())
            .unwrap()
            .replace("EUC_2D", "GEO");
        assert!(import_instance(&geo).is_err());
    }

    #[test]
    fn asymmetric_matrix_is_rejected() {
        let text = "NAME: tiny\nTYPE: TSP\nDIMENSION: 2\nEDGE_WEIGHT_TYPE: EXPLICIT\n\
                    EDGE_WEIGHT_FORMAT: FULL_MATRIX\nEDGE_WEIGHT_SECTION\n0 1\n2 0\n\
                    DISPLAY_DATA_SECTION\n1 0 0\n2 1 0\nEOF\n";
        let err = import_instance(text).unwrap_err();
        assert!(err.to_string().contains("not symmetric"), "{err}");
    }

    #[test]
    fn plain_tsplib_without_comment() {
        let text = "NAME: tri\nTYPE: TSP\nDIMENSION: 3\nEDGE_WEIGHT_TYPE: EUC_2D\n\
                    NODE_COORD_SECTION\n1 0 0\n2 3.5 0\n3 0 4\nEOF\n";
        let inst = import_instance(text).unwrap();
        assert_eq!(inst.scale(), 10);
        assert_eq!(inst.city(1), ScaledPoint::new(35, 0));
        assert_eq!(inst.distance(1, 0).approx, 3.5);
    }
}
