//! JSON input files. Parse errors carry the line and column reported by serde;
//! semantic errors name the offending entry.

use std::path::Path;

use parahoric::affine::{AffineRootSystem, Facet, FrobeniusForm};
use parahoric::centralizer::KacPoint;
use parahoric::{CartanType, Family, RootDatum};
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::config::CliError;

/// `{"order": m, "coords": [...]}`: the torsion point `exp(2 pi i lambda / m)`
/// with `lambda` in fundamental-coweight coordinates.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KacInput {
    pub order: i64,
    pub coords: Vec<i64>,
    #[serde(default)]
    pub label: Option<String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormInput {
    pub family: Family,
    pub rank: usize,
    #[serde(default = "one")]
    pub twist: u8,
    #[serde(default)]
    pub inner: usize,
    /// Removed nodes of a facet; absent means every maximal facet.
    #[serde(default)]
    pub removed: Option<Vec<usize>>,
}

fn one() -> u8 {
    1
}

fn input_error(path: &Path, message: impl Into<String>) -> CliError {
    CliError::Input { path: path.to_path_buf(), location: None, message: message.into() }
}

fn parse_one_or_many<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| input_error(path, e.to_string()))?;
    let located = |e: serde_json::Error| CliError::Input {
        path: path.to_path_buf(),
        location: Some((e.line(), e.column())),
        message: e.to_string().split(" at line ").next().unwrap_or_default().to_string(),
    };
    let items = if text.trim_start().starts_with('[') {
        serde_json::from_str::<Vec<T>>(&text).map_err(located)?
    } else {
        vec![serde_json::from_str::<T>(&text).map_err(located)?]
    };
    if items.is_empty() {
        return Err(input_error(path, "no entries"));
    }
    Ok(items)
}

/// Kac points of a file, validated against a datum.
pub fn read_kac(path: &Path, d: &RootDatum) -> Result<Vec<(Option<String>, KacPoint)>, CliError> {
    let raw: Vec<KacInput> = parse_one_or_many(path)?;
    raw.into_iter()
        .enumerate()
        .map(|(i, k)| {
            let p = KacPoint::new(d, k.coords, k.order).map_err(|e| input_error(path, format!("entry {i}: {e}")))?;
            Ok((k.label, p))
        })
        .collect()
}

pub struct ResolvedForm {
    pub cartan_type: CartanType,
    pub affine: AffineRootSystem,
    pub form: FrobeniusForm,
    pub facet: Option<Facet>,
}

pub fn read_forms(path: &Path, max_rank: usize) -> Result<Vec<ResolvedForm>, CliError> {
    let raw: Vec<FormInput> = parse_one_or_many(path)?;
    raw.into_iter()
        .enumerate()
        .map(|(i, f)| {
            let err = |e: parahoric::Error| input_error(path, format!("entry {i}: {e}"));
            if f.rank > max_rank {
                return Err(input_error(path, format!("entry {i}: rank {} exceeds --max-rank {max_rank}", f.rank)));
            }
            let t = CartanType::twisted(f.family, f.rank, f.twist).map_err(err)?;
            let affine = AffineRootSystem::new(t.split());
            let form = FrobeniusForm::new(&affine, t, f.inner).map_err(err)?;
            let facet = match &f.removed {
                Some(rem) => {
                    let facet = Facet::from_removed(&affine, rem).map_err(err)?;
                    if !facet.is_frob_stable(&form) {
                        return Err(input_error(path, format!("entry {i}: facet is not Frobenius-stable")));
                    }
                    Some(facet)
                }
                None => None,
            };
            Ok(ResolvedForm { cartan_type: t, affine, form, facet })
        })
        .collect()
}
