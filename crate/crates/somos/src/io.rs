//! Sequence and relation file formats.
//!
//! TSV: one term per line as `h<TAB>value` with the value in exact text
//! encoding (`p/q`, `a+b*sqrt(d)`, or `inf`); lines beginning `#` are
//! comments. JSON mirrors the same data as
//! `{"terms": [{"h": .., "v": ".."}], "relation": {..} | null}`.
//! Relations in text form read `k:lambda,mu`.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::seq::{SomosRelation, TwoSidedSequence, Value};

pub fn sequence_to_tsv(seq: &TwoSidedSequence) -> String {
    let mut out = String::new();
    for (h, v) in seq.iter() {
        writeln!(out, "{h}\t{v}").expect("string write");
    }
    out
}

pub fn sequence_from_tsv(text: &str) -> Result<TwoSidedSequence> {
    let mut seq = TwoSidedSequence::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |what: &str| Error::Parse(format!("line {}: {what}", lineno + 1));
        let (h, v) = line
            .split_once('\t')
            .or_else(|| line.split_once(' '))
            .ok_or_else(|| bad("expected `h<TAB>value`"))?;
        let h: i64 = h.trim().parse().map_err(|_| bad("invalid index"))?;
        let v = parse_value(v)?;
        seq.insert(h, v)?;
    }
    Ok(seq)
}

pub fn parse_value(text: &str) -> Result<Value> {
    let text = text.trim();
    if text == "inf" {
        Ok(Value::Infinite)
    } else {
        Ok(Value::Finite(text.parse()?))
    }
}

#[derive(Serialize, Deserialize)]
struct TermDto {
    h: i64,
    v: String,
}

#[derive(Serialize, Deserialize)]
struct RelationDto {
    gap: i64,
    lambda: String,
    mu: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    v_exp: Option<i64>,
}

#[derive(Serialize, Deserialize)]
struct SequenceDto {
    terms: Vec<TermDto>,
    relation: Option<RelationDto>,
}

fn relation_dto(rel: &SomosRelation, v_exp: Option<i64>) -> RelationDto {
    RelationDto {
        gap: rel.gap(),
        lambda: rel.lambda().to_string(),
        mu: rel.mu().to_string(),
        v_exp,
    }
}

pub fn sequence_to_json(seq: &TwoSidedSequence, relation: Option<&SomosRelation>) -> String {
    let dto = SequenceDto {
        terms: seq
            .iter()
            .map(|(h, v)| TermDto {
                h,
                v: v.to_string(),
            })
            .collect(),
        relation: relation.map(|r| relation_dto(r, None)),
    };
    serde_json::to_string(&dto).expect("serializable")
}

pub fn sequence_from_json(text: &str) -> Result<(TwoSidedSequence, Option<SomosRelation>)> {
    let dto: SequenceDto =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("invalid JSON: {e}")))?;
    let mut seq = TwoSidedSequence::new();
    for term in dto.terms {
        seq.insert(term.h, parse_value(&term.v)?)?;
    }
    let relation = match dto.relation {
        Some(r) => Some(SomosRelation::new(r.gap, r.lambda.parse()?, r.mu.parse()?)?),
        None => None,
    };
    Ok((seq, relation))
}

/// `k:lambda,mu`, the shape `SomosRelation`'s `Display` emits.
pub fn relation_from_text(text: &str) -> Result<SomosRelation> {
    let bad = || Error::Parse(format!("invalid relation `{text}`"));
    let (gap, coeffs) = text.trim().split_once(':').ok_or_else(bad)?;
    let gap: i64 = gap.trim().parse().map_err(|_| bad())?;
    let (lambda, mu) = coeffs.split_once(',').ok_or_else(bad)?;
    SomosRelation::new(gap, lambda.parse()?, mu.parse()?)
}

pub fn relation_to_json(rel: &SomosRelation, v_exp: Option<i64>) -> String {
    serde_json::to_string(&relation_dto(rel, v_exp)).expect("serializable")
}

/// Parses `a..b` (inclusive on both ends, either end may be negative).
pub fn parse_range(text: &str) -> Result<std::ops::RangeInclusive<i64>> {
    let bad = || Error::Parse(format!("invalid range `{text}`"));
    let (lo, hi) = text.trim().split_once("..").ok_or_else(bad)?;
    let lo: i64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: i64 = hi.trim().parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok(lo..=hi)
}
