//! Stable JSON shape for derivations:
//! `{rule, conclusion: {env, term, type, multitype?, index?}, premises: [...]}`
//! with terms and types embedded as strings in the CLI syntax.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax;
use crate::types;

use super::{Decl, Derivation, Judgment, Rule};

#[derive(Debug, Serialize, Deserialize)]
struct DerivationDto {
    rule: String,
    conclusion: JudgmentDto,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    premises: Vec<DerivationDto>,
}

#[derive(Debug, Serialize, Deserialize)]
struct JudgmentDto {
    env: Vec<DeclDto>,
    term: String,
    #[serde(rename = "type")]
    ty: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    multitype: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    index: Option<u64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct DeclDto {
    var: String,
    types: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    multi: Option<String>,
}

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("invalid JSON: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("unknown rule name {0:?}")]
    UnknownRule(String),
    #[error("bad term: {0}")]
    Term(#[from] syntax::ParseError),
    #[error("bad type: {0}")]
    Type(#[from] types::TypeParseError),
}

fn dto_of(d: &Derivation) -> DerivationDto {
    DerivationDto {
        rule: d.rule.name().to_string(),
        conclusion: JudgmentDto {
            env: d
                .conclusion
                .env
                .iter()
                .map(|decl| DeclDto {
                    var: decl.var.clone(),
                    types: decl.types.to_string(),
                    multi: decl.multi.as_ref().map(|m| m.to_string()),
                })
                .collect(),
            term: d.conclusion.term.to_string(),
            ty: d.conclusion.ty.to_string(),
            multitype: d.conclusion.multi.as_ref().map(|m| m.to_string()),
            index: d.conclusion.index,
        },
        premises: d.premises.iter().map(dto_of).collect(),
    }
}

fn dto_into(dto: &DerivationDto) -> Result<Derivation, JsonError> {
    let rule = Rule::from_name(&dto.rule).ok_or_else(|| JsonError::UnknownRule(dto.rule.clone()))?;
    let env = dto
        .conclusion
        .env
        .iter()
        .map(|d| {
            Ok(Decl {
                var: d.var.clone(),
                types: types::parse_seq(&d.types)?,
                multi: d.multi.as_deref().map(types::parse_mseq).transpose()?,
            })
        })
        .collect::<Result<Vec<_>, JsonError>>()?;
    let conclusion = Judgment {
        env,
        term: syntax::parse(&dto.conclusion.term)?,
        ty: types::parse_rank2(&dto.conclusion.ty)?,
        multi: dto
            .conclusion
            .multitype
            .as_deref()
            .map(types::parse_mrank2)
            .transpose()?,
        index: dto.conclusion.index,
    };
    let premises = dto
        .premises
        .iter()
        .map(dto_into)
        .collect::<Result<Vec<_>, JsonError>>()?;
    Ok(Derivation {
        rule,
        premises,
        conclusion,
    })
}

pub fn to_json(d: &Derivation) -> String {
    serde_json::to_string_pretty(&dto_of(d)).expect("derivation serialization cannot fail")
}

pub fn to_json_value(d: &Derivation) -> serde_json::Value {
    serde_json::to_value(dto_of(d)).expect("derivation serialization cannot fail")
}

pub fn from_json(text: &str) -> Result<Derivation, JsonError> {
    let dto: DerivationDto = serde_json::from_str(text)?;
    dto_into(&dto)
}
