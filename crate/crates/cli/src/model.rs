//! Model files: named objects on `BaseE(n)` or `PhaseJ(n)` given as
//! expression strings.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use jetlift_core::geometry::{FibredTransform, OneForm, Tensor11, TwoForm, VectorField};
use jetlift_core::identities::Corpus;
use jetlift_core::{parse_expr, Coord, Error, ScalarField, Space};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
pub enum Kind {
    #[serde(rename = "scalar_E")]
    ScalarE,
    #[serde(rename = "scalar_J")]
    ScalarJ,
    #[serde(rename = "vector_E")]
    VectorE,
    #[serde(rename = "oneform_E")]
    OneformE,
    #[serde(rename = "tensor11_E")]
    Tensor11E,
    #[serde(rename = "twoform_E")]
    TwoformE,
    #[serde(rename = "transform")]
    Transform,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::ScalarE => "scalar_E",
            Kind::ScalarJ => "scalar_J",
            Kind::VectorE => "vector_E",
            Kind::OneformE => "oneform_E",
            Kind::Tensor11E => "tensor11_E",
            Kind::TwoformE => "twoform_E",
            Kind::Transform => "transform",
        })
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawObject {
    kind: Kind,
    components: BTreeMap<String, String>,
    #[serde(default)]
    inverse: Option<BTreeMap<String, String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    n: usize,
    objects: BTreeMap<String, RawObject>,
}

#[derive(Clone, Debug)]
pub enum Object {
    Scalar(ScalarField),
    Vector(VectorField),
    OneForm(OneForm),
    Tensor11(Tensor11),
    TwoForm(TwoForm),
    Transform(FibredTransform),
}

impl Object {
    pub fn kind(&self) -> Kind {
        match self {
            Object::Scalar(f) if f.space().kind == jetlift_core::SpaceKind::PhaseJ => Kind::ScalarJ,
            Object::Scalar(_) => Kind::ScalarE,
            Object::Vector(_) => Kind::VectorE,
            Object::OneForm(_) => Kind::OneformE,
            Object::Tensor11(_) => Kind::Tensor11E,
            Object::TwoForm(_) => Kind::TwoformE,
            Object::Transform(_) => Kind::Transform,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Model {
    pub n: usize,
    pub objects: BTreeMap<String, Object>,
}

fn model_err(name: &str, msg: impl fmt::Display) -> CliError {
    CliError::Model(format!("object `{name}`: {msg}"))
}

fn coord(name: &str, key: &str, space: Space) -> Result<Coord, CliError> {
    Coord::parse(key.trim())
        .filter(|c| space.contains(*c))
        .ok_or_else(|| model_err(name, format!("`{key}` is not a coordinate of {space}")))
}

fn pair(name: &str, key: &str, space: Space) -> Result<(Coord, Coord), CliError> {
    let (a, b) = key.split_once(',').ok_or_else(|| model_err(name, format!("expected a key `a,b`, got `{key}`")))?;
    Ok((coord(name, a, space)?, coord(name, b, space)?))
}

fn parse_in(name: &str, src: &str, space: Space) -> Result<jetlift_core::Expr, CliError> {
    parse_expr(src, &space).map_err(|e| model_err(name, e))
}

fn build(name: &str, raw: &RawObject, n: usize) -> Result<Object, CliError> {
    let base = Space::base(n);
    let comps = &raw.components;
    if raw.inverse.is_some() && raw.kind != Kind::Transform {
        return Err(model_err(name, "only transforms take an `inverse`"));
    }
    let wrap = |e: Error| model_err(name, e);
    Ok(match raw.kind {
        Kind::ScalarE | Kind::ScalarJ => {
            let space = if raw.kind == Kind::ScalarE { base } else { Space::phase(n) };
            if comps.len() != 1 || !comps.contains_key("value") {
                return Err(model_err(name, "scalars take exactly one component, `value`"));
            }
            Object::Scalar(ScalarField::new(space, parse_in(name, &comps["value"], space)?).map_err(wrap)?)
        }
        Kind::VectorE | Kind::OneformE => {
            let pairs = comps
                .iter()
                .map(|(k, v)| Ok((coord(name, k, base)?, parse_in(name, v, base)?)))
                .collect::<Result<Vec<_>, CliError>>()?;
            if raw.kind == Kind::VectorE {
                Object::Vector(VectorField::from_pairs(base, &pairs).map_err(wrap)?)
            } else {
                Object::OneForm(OneForm::from_pairs(base, &pairs).map_err(wrap)?)
            }
        }
        Kind::Tensor11E | Kind::TwoformE => {
            let pairs = comps
                .iter()
                .map(|(k, v)| Ok((pair(name, k, base)?, parse_in(name, v, base)?)))
                .collect::<Result<Vec<_>, CliError>>()?;
            if raw.kind == Kind::Tensor11E {
                Object::Tensor11(Tensor11::from_pairs(base, &pairs).map_err(wrap)?)
            } else {
                Object::TwoForm(TwoForm::from_pairs(base, &pairs).map_err(wrap)?)
            }
        }
        Kind::Transform => {
            let ordered = |m: &BTreeMap<String, String>, what: &str| -> Result<Vec<String>, CliError> {
                let want: Vec<String> = (1..=n).map(|i| format!("q{i}")).collect();
                if m.len() != n || want.iter().any(|k| !m.contains_key(k)) {
                    return Err(model_err(name, format!("{what} needs exactly the keys {}", want.join(", "))));
                }
                Ok(want.iter().map(|k| m[k].clone()).collect())
            };
            let fwd = ordered(comps, "a transform")?;
            let inv = raw.inverse.as_ref().map(|m| ordered(m, "an inverse")).transpose()?;
            let fwd_ref: Vec<&str> = fwd.iter().map(String::as_str).collect();
            let inv_ref: Option<Vec<&str>> = inv.as_ref().map(|v| v.iter().map(String::as_str).collect());
            Object::Transform(FibredTransform::parse(n, &fwd_ref, inv_ref.as_deref()).map_err(wrap)?)
        }
    })
}

impl Model {
    pub fn from_json(src: &str) -> Result<Model, CliError> {
        let raw: RawModel = serde_json::from_str(src).map_err(|e| CliError::Model(format!("invalid model: {e}")))?;
        if raw.n == 0 {
            return Err(CliError::Model("`n` must be positive".into()));
        }
        let objects = raw
            .objects
            .iter()
            .map(|(name, obj)| Ok((name.clone(), build(name, obj, raw.n)?)))
            .collect::<Result<_, CliError>>()?;
        Ok(Model { n: raw.n, objects })
    }

    pub fn load(path: &Path) -> Result<Model, CliError> {
        let src = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
        Model::from_json(&src)
    }

    pub fn get(&self, name: &str) -> Result<&Object, CliError> {
        self.objects
            .get(name)
            .ok_or_else(|| CliError::Core(Error::MissingObject(format!("no object `{name}` in the model"))))
    }

    pub fn tensor(&self, name: &str) -> Result<&Tensor11, CliError> {
        match self.get(name)? {
            Object::Tensor11(r) => Ok(r),
            other => Err(CliError::Usage(format!("`{name}` is a {}, expected tensor11_E", other.kind()))),
        }
    }

    /// Sorts the objects into the categories the identity suites use.
    /// Vector fields must be vertical or have `dt`-component 1.
    pub fn corpus(&self) -> Result<Corpus, CliError> {
        let mut c = Corpus::new(self.n);
        for (name, obj) in &self.objects {
            let name = name.clone();
            match obj {
                Object::Scalar(f) if f.space().kind == jetlift_core::SpaceKind::BaseE => c.functions.push((name, f.clone())),
                Object::Scalar(_) => {}
                Object::Vector(x) if x.is_vertical() => c.verticals.push((name, x.clone())),
                Object::Vector(x) if x.is_time_normalized() => c.timelike.push((name, x.clone())),
                Object::Vector(_) => return Err(model_err(&name, Error::NotVerticalOrTimeNormalized)),
                Object::OneForm(a) => c.forms.push((name, a.clone())),
                Object::Tensor11(r) if r.annihilates_dt() => c.tensors.push((name, r.clone())),
                Object::Tensor11(_) => return Err(model_err(&name, Error::DtNotAnnihilated)),
                Object::TwoForm(w) => c.two_forms.push((name, w.clone())),
                Object::Transform(t) => c.transforms.push((name, t.clone())),
            }
        }
        Ok(c)
    }
}
