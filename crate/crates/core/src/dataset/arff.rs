//! ARFF reader (dense and sparse instances) and canonical writer.
//!
//! Numeric attributes become real features; nominal feature values are
//! encoded by their position in the declaration (Weka's internal value).
//! Label attributes must be binary. In sparse rows omitted attributes take
//! internal value 0.

use std::fmt::Write as _;

use super::labels::LabelSpec;
use super::{DatasetError, LabelMatrix, MultiLabelDataset};
use crate::numerics::DenseMatrix;

#[derive(Debug, Clone, PartialEq)]
enum AttrType {
    Numeric,
    Nominal(Vec<String>),
}

#[derive(Debug, Clone)]
struct Attribute {
    name: String,
    ty: AttrType,
}

fn perr(line: usize, message: impl Into<String>) -> DatasetError {
    DatasetError::Parse { line, message: message.into() }
}

/// Reads a possibly quoted token from the start of `s`, returning it and
/// the unconsumed remainder.
fn take_token(s: &str, line: usize) -> Result<(String, &str), DatasetError> {
    let s = s.trim_start();
    let mut chars = s.char_indices();
    match chars.next() {
        None => Err(perr(line, "expected a name")),
        Some((_, q @ ('\'' | '"'))) => {
            let mut out = String::new();
            let mut escaped = false;
            for (i, c) in chars {
                if escaped {
                    out.push(c);
                    escaped = false;
                } else if c == '\\' {
                    escaped = true;
                } else if c == q {
                    return Ok((out, &s[i + c.len_utf8()..]));
                } else {
                    out.push(c);
                }
            }
            Err(perr(line, "unterminated quoted name"))
        }
        Some(_) => {
            let end = s.find(|c: char| c.is_whitespace() || c == '{').unwrap_or(s.len());
            Ok((s[..end].to_string(), &s[end..]))
        }
    }
}

/// Splits a comma-separated value list, honoring quotes and backslash
/// escapes inside them.
fn split_values(s: &str, line: usize) -> Result<Vec<String>, DatasetError> {
    let mut out = Vec::new();
    let mut rest = s.trim();
    if rest.is_empty() {
        return Ok(out);
    }
    loop {
        rest = rest.trim_start();
        let value;
        if rest.starts_with('\'') || rest.starts_with('"') {
            let (tok, r) = take_token(rest, line)?;
            value = tok;
            rest = r.trim_start();
        } else {
            let end = rest.find(',').unwrap_or(rest.len());
            value = rest[..end].trim().to_string();
            if value.is_empty() {
                return Err(perr(line, "empty value"));
            }
            rest = &rest[end..];
        }
        out.push(value);
        if rest.is_empty() {
            return Ok(out);
        }
        match rest.strip_prefix(',') {
            Some(r) => rest = r,
            None => return Err(perr(line, format!("unexpected text '{rest}' after value"))),
        }
    }
}

fn parse_attribute(rest: &str, line: usize) -> Result<Attribute, DatasetError> {
    let (name, ty) = take_token(rest, line)?;
    let ty = ty.trim();
    if let Some(inner) = ty.strip_prefix('{') {
        let inner = inner
            .strip_suffix('}')
            .ok_or_else(|| perr(line, format!("unterminated nominal declaration for '{name}'")))?;
        let values = split_values(inner, line)?;
        if values.is_empty() {
            return Err(perr(line, format!("nominal attribute '{name}' declares no values")));
        }
        return Ok(Attribute { name, ty: AttrType::Nominal(values) });
    }
    let kind = ty.split_whitespace().next().unwrap_or("").to_ascii_lowercase();
    match kind.as_str() {
        "numeric" | "real" | "integer" => Ok(Attribute { name, ty: AttrType::Numeric }),
        "" => Err(perr(line, format!("attribute '{name}' has no type"))),
        other => Err(perr(line, format!("unsupported attribute type '{other}' for '{name}'"))),
    }
}

/// Splits a MEKA-style relation name `name: ... -C n ...` into the dataset
/// name and the `-C` value.
fn split_meka_relation(rel: &str) -> (String, Option<i64>) {
    if let Some(pos) = rel.rfind(':') {
        let mut toks = rel[pos + 1..].split_whitespace();
        while let Some(t) = toks.next() {
            if t == "-C" {
                if let Some(n) = toks.next().and_then(|v| v.parse::<i64>().ok()) {
                    return (rel[..pos].trim().to_string(), Some(n));
                }
            }
        }
    }
    (rel.to_string(), None)
}

fn feature_value(attr: &Attribute, tok: &str, line: usize) -> Result<f64, DatasetError> {
    if tok == "?" {
        return Ok(f64::NAN);
    }
    match &attr.ty {
        AttrType::Numeric => {
            let v: f64 =
                tok.parse().map_err(|_| perr(line, format!("'{tok}' is not a number (attribute '{}')", attr.name)))?;
            if !v.is_finite() {
                return Err(perr(line, format!("non-finite value '{tok}' for '{}'", attr.name)));
            }
            Ok(v)
        }
        AttrType::Nominal(values) => values
            .iter()
            .position(|v| v == tok)
            .map(|i| i as f64)
            .ok_or_else(|| perr(line, format!("'{tok}' is not a declared value of '{}'", attr.name))),
    }
}

fn label_value(attr: &Attribute, tok: &str, line: usize) -> Result<u8, DatasetError> {
    let bad = || perr(line, format!("non-binary value '{tok}' for label '{}'", attr.name));
    if let Ok(v) = tok.parse::<f64>() {
        return match v {
            0.0 => Ok(0),
            1.0 => Ok(1),
            _ => Err(bad()),
        };
    }
    match tok.to_ascii_lowercase().as_str() {
        "true" | "yes" | "t" | "y" => return Ok(1),
        "false" | "no" | "f" | "n" => return Ok(0),
        _ => {}
    }
    match &attr.ty {
        AttrType::Nominal(values) if values.len() == 2 => {
            values.iter().position(|v| v == tok).map(|i| i as u8).ok_or_else(bad)
        }
        _ => Err(bad()),
    }
}

/// Parses ARFF text, partitioning attributes into features and labels
/// according to `spec`.
pub fn parse_arff(text: &str, spec: &LabelSpec) -> Result<MultiLabelDataset, DatasetError> {
    let mut relation: Option<String> = None;
    let mut attrs: Vec<Attribute> = Vec::new();
    let mut data_line = None;
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));

    for (no, raw) in lines.by_ref() {
        let l = raw.trim();
        if l.is_empty() || l.starts_with('%') {
            continue;
        }
        let lower = l.to_ascii_lowercase();
        if lower.starts_with("@relation") {
            let (name, _) = take_token(&l["@relation".len()..], no)?;
            relation = Some(name);
        } else if lower.starts_with("@attribute") {
            if relation.is_none() {
                return Err(perr(no, "@attribute before @relation"));
            }
            attrs.push(parse_attribute(&l["@attribute".len()..], no)?);
        } else if lower.starts_with("@data") {
            data_line = Some(no);
            break;
        } else {
            return Err(perr(no, format!("unexpected header line '{l}'")));
        }
    }
    let data_line = data_line.ok_or_else(|| perr(text.lines().count(), "missing @data section"))?;
    let relation = relation.ok_or_else(|| perr(data_line, "missing @relation"))?;
    if attrs.is_empty() {
        return Err(perr(data_line, "no attributes declared"));
    }
    let (name, meka_c) = split_meka_relation(&relation);

    let n_attr = attrs.len();
    let label_idx: Vec<usize> = match spec {
        LabelSpec::Names(names) => names
            .iter()
            .map(|n| {
                attrs
                    .iter()
                    .position(|a| &a.name == n)
                    .ok_or_else(|| perr(data_line, format!("label '{n}' from the label list is not an attribute")))
            })
            .collect::<Result<_, _>>()?,
        LabelSpec::First(n) | LabelSpec::Last(n) if *n > n_attr => {
            return Err(perr(data_line, format!("{n} labels requested but only {n_attr} attributes")));
        }
        LabelSpec::First(n) => (0..*n).collect(),
        LabelSpec::Last(n) => (n_attr - n..n_attr).collect(),
        LabelSpec::Header => match meka_c {
            Some(c) if c.unsigned_abs() as usize <= n_attr && c != 0 => {
                let c_abs = c.unsigned_abs() as usize;
                if c > 0 {
                    (0..c_abs).collect()
                } else {
                    (n_attr - c_abs..n_attr).collect()
                }
            }
            Some(c) => return Err(perr(data_line, format!("invalid -C {c} for {n_attr} attributes"))),
            None => return Err(perr(data_line, "relation name carries no MEKA -C option")),
        },
    };
    let mut is_label = vec![false; n_attr];
    for &j in &label_idx {
        is_label[j] = true;
    }
    let feat_idx: Vec<usize> = (0..n_attr).filter(|&j| !is_label[j]).collect();
    // Position of each attribute within its block.
    let mut slot = vec![0usize; n_attr];
    for (k, &j) in feat_idx.iter().enumerate() {
        slot[j] = k;
    }
    for (k, &j) in label_idx.iter().enumerate() {
        slot[j] = k;
    }

    let (nf, nl) = (feat_idx.len(), label_idx.len());
    let mut xs: Vec<f64> = Vec::new();
    let mut ys: Vec<u8> = Vec::new();
    let mut p = 0usize;
    for (no, raw) in lines {
        let l = raw.trim();
        if l.is_empty() || l.starts_with('%') {
            continue;
        }
        let mut xrow = vec![0.0; nf];
        let mut yrow = vec![0u8; nl];
        let mut put = |j: usize, tok: &str| -> Result<(), DatasetError> {
            if is_label[j] {
                yrow[slot[j]] = label_value(&attrs[j], tok, no)?;
            } else {
                xrow[slot[j]] = feature_value(&attrs[j], tok, no)?;
            }
            Ok(())
        };
        if let Some(body) = l.strip_prefix('{') {
            let end = body.find('}').ok_or_else(|| perr(no, "unterminated sparse instance"))?;
            let trailing = body[end + 1..].trim();
            if !trailing.is_empty() && !trailing.starts_with(',') {
                return Err(perr(no, format!("unexpected text '{trailing}' after sparse instance")));
            }
            for item in split_values(&body[..end], no)? {
                let item = item.trim();
                let (idx, val) = item
                    .split_once(char::is_whitespace)
                    .ok_or_else(|| perr(no, format!("sparse entry '{item}' needs 'index value'")))?;
                let j: usize = idx.parse().map_err(|_| perr(no, format!("bad sparse index '{idx}'")))?;
                if j >= n_attr {
                    return Err(perr(no, format!("sparse index {j} out of range for {n_attr} attributes")));
                }
                let val = val.trim();
                let val = if val.starts_with('\'') || val.starts_with('"') {
                    take_token(val, no)?.0
                } else {
                    val.to_string()
                };
                put(j, &val)?;
            }
        } else {
            let vals = split_values(l, no)?;
            if vals.len() != n_attr {
                return Err(perr(
                    no,
                    format!("instance has {} values, header declares {n_attr} attributes", vals.len()),
                ));
            }
            for (j, v) in vals.iter().enumerate() {
                put(j, v)?;
            }
        }
        xs.extend(xrow);
        ys.extend(yrow);
        p += 1;
    }

    let x = DenseMatrix::new(p, nf, xs).map_err(|e| DatasetError::Invalid(e.to_string()))?;
    let y = LabelMatrix::new(p, nl, ys)?;
    MultiLabelDataset::new(
        name,
        x,
        y,
        feat_idx.iter().map(|&j| attrs[j].name.clone()).collect(),
        label_idx.iter().map(|&j| attrs[j].name.clone()).collect(),
    )
}

fn quote(name: &str) -> String {
    let mut s = String::with_capacity(name.len() + 2);
    s.push('\'');
    for c in name.chars() {
        if c == '\'' || c == '\\' {
            s.push('\\');
        }
        s.push(c);
    }
    s.push('\'');
    s
}

/// Canonical dense ARFF: features (numeric, 17 significant digits, `?` for
/// missing) followed by `{0,1}` labels. The relation carries `-C -q`, so the
/// text re-parses with either [`LabelSpec::Last`] or [`LabelSpec::Header`].
pub fn to_arff(d: &MultiLabelDataset) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "@relation {}", quote(&format!("{}: -C -{}", d.name, d.n_labels())));
    s.push('\n');
    for f in &d.feature_names {
        let _ = writeln!(s, "@attribute {} numeric", quote(f));
    }
    for l in &d.label_names {
        let _ = writeln!(s, "@attribute {} {{0,1}}", quote(l));
    }
    s.push_str("\n@data\n");
    for i in 0..d.n_instances() {
        let mut first = true;
        for &v in d.x.row(i) {
            if !first {
                s.push(',');
            }
            first = false;
            if v.is_nan() {
                s.push('?');
            } else {
                let _ = write!(s, "{v:.16e}");
            }
        }
        for &v in d.y.row(i) {
            s.push(',');
            s.push(if v == 1 { '1' } else { '0' });
        }
        s.push('\n');
    }
    s
}
