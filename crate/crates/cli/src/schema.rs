//! Instance and verdict file schemas.
//!
//! Instances are JSON documents with a top-level `kind` and a kind-specific
//! payload; every rational is written as a `"p/q"` string or a plain JSON
//! integer, and verdicts always render rationals as `"p/q"`. One instance
//! per file; an optional `note` field is carried for annotation and ignored.

use std::collections::BTreeMap;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use charges::conglomerate::{ConglomerabilityInstance, DisintegrationInstance, IdealOfSets};
use charges::convex::{PiecewiseLinearConvex, SampledConvex};
use charges::rational::{format_rational, parse_rational, Rational};
use charges::{
    AdditiveSetFunction, GroundSet, MeasureStructure, PointMap, RandomQuantity, SetRing, Subset,
};

/// A rational in transit: `"p/q"`, `"p"`, or a JSON integer.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Rat {
    Int(i64),
    Text(String),
}

impl Rat {
    pub fn to_rational(&self) -> Result<Rational> {
        match self {
            Rat::Int(n) => Ok(Rational::from_integer((*n).into())),
            Rat::Text(s) => {
                parse_rational(s).ok_or_else(|| anyhow!("`{s}` is not a rational (want p/q)"))
            }
        }
    }

    pub fn from_rational(r: &Rational) -> Self {
        Rat::Text(format_rational(r))
    }
}

fn rats(values: &[Rat], what: &str) -> Result<Vec<Rational>> {
    values
        .iter()
        .enumerate()
        .map(|(i, r)| r.to_rational().with_context(|| format!("{what}[{i}]")))
        .collect()
}

fn rat_map(values: &BTreeMap<String, Rat>, what: &str) -> Result<BTreeMap<String, Rational>> {
    values
        .iter()
        .map(|(k, v)| {
            Ok((
                k.clone(),
                v.to_rational().with_context(|| format!("{what}[{k}]"))?,
            ))
        })
        .collect()
}

/// A measure structure in transit: an enumerated ring over a ground set and
/// one value per ring member.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasureDto {
    pub ring: Vec<Vec<String>>,
    pub lambda: Vec<Rat>,
}

impl MeasureDto {
    pub fn to_structure(&self, ground: &GroundSet) -> Result<MeasureStructure> {
        let sets = self
            .ring
            .iter()
            .enumerate()
            .map(|(i, labels)| {
                ground
                    .subset(labels.iter())
                    .with_context(|| format!("ring[{i}]"))
            })
            .collect::<Result<Vec<Subset>>>()?;
        let ring = SetRing::new(ground.clone(), sets).context("ring")?;
        if self.lambda.len() != self.ring.len() {
            bail!("lambda needs one value per ring member as listed");
        }
        // values arrive aligned with the listed ring order; realign them
        // with the canonical order before validation
        let mut pairs: Vec<(Subset, Rational)> = Vec::with_capacity(self.ring.len());
        for (labels, v) in self.ring.iter().zip(&self.lambda) {
            pairs.push((ground.subset(labels.iter())?, v.to_rational()?));
        }
        let values = ring
            .sets()
            .iter()
            .map(|s| {
                pairs
                    .iter()
                    .find(|(t, _)| t == s)
                    .map(|(_, v)| v.clone())
                    .ok_or_else(|| anyhow!("no value listed for ring member {s}"))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(MeasureStructure::new(
            AdditiveSetFunction::new(ring, values).context("lambda")?,
        ))
    }

    pub fn from_structure(ms: &MeasureStructure) -> Self {
        MeasureDto {
            ring: ms
                .ring()
                .sets()
                .iter()
                .map(|s| s.labels().iter().map(|l| l.to_string()).collect())
                .collect(),
            lambda: ms
                .lambda()
                .values()
                .map(|(_, v)| Rat::from_rational(v))
                .collect(),
        }
    }
}

/// The convex payload: a piecewise linear function or a sampled grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ConvexDto {
    PiecewiseLinear {
        breakpoints: Vec<Rat>,
        slopes: Vec<Rat>,
        anchor: (Rat, Rat),
    },
    Sampled {
        start: Rat,
        step: Rat,
        values: Vec<Rat>,
    },
}

pub enum ConvexInput {
    PiecewiseLinear(PiecewiseLinearConvex),
    Sampled(SampledConvex),
}

impl ConvexDto {
    pub fn to_input(&self) -> Result<ConvexInput> {
        match self {
            ConvexDto::PiecewiseLinear {
                breakpoints,
                slopes,
                anchor,
            } => Ok(ConvexInput::PiecewiseLinear(
                PiecewiseLinearConvex::new(
                    rats(breakpoints, "breakpoints")?,
                    rats(slopes, "slopes")?,
                    (anchor.0.to_rational()?, anchor.1.to_rational()?),
                )
                .context("function")?,
            )),
            ConvexDto::Sampled {
                start,
                step,
                values,
            } => Ok(ConvexInput::Sampled(
                SampledConvex::new(
                    start.to_rational()?,
                    step.to_rational()?,
                    rats(values, "values")?,
                )
                .context("function")?,
            )),
        }
    }
}

/// The instance file: a `kind` plus its payload.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    #[serde(default)]
    pub id: Option<String>,
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,

    // measure / integral
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ring: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<Rat>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub queries: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub emit_carrier: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantity: Option<BTreeMap<String, Rat>>,

    // conglomerability
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<Vec<Vec<Rat>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<Vec<Rat>>,

    // companion
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<MeasureDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<Vec<BTreeMap<String, Rat>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_prime: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_prime: Option<BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub neg: Option<Vec<Vec<String>>>,

    // disintegration
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebra: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub marginal: Option<Vec<Rat>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thetas: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Vec<Vec<Rat>>>,

    // convex
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<ConvexDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evaluate: Option<Vec<Rat>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<Vec<Rat>>,

    // skorohod
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub law: Option<BTreeMap<String, Rat>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub enumeration: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tests: Option<Vec<BTreeMap<String, Rat>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval_measure: Option<BTreeMap<String, Rat>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Measure,
    Integral,
    Conglomerability,
    Companion,
    CompanionNulls,
    Disintegration,
    Convex,
    Skorohod,
}

impl std::fmt::Display for Kind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Kind::Measure => "measure",
            Kind::Integral => "integral",
            Kind::Conglomerability => "conglomerability",
            Kind::Companion => "companion",
            Kind::CompanionNulls => "companion_nulls",
            Kind::Disintegration => "disintegration",
            Kind::Convex => "convex",
            Kind::Skorohod => "skorohod",
        };
        write!(f, "{s}")
    }
}

/// The decoded pieces of a companion instance: the marginal structure on Ω,
/// the map X, the basis family on S, the map X', and the optional ideal.
pub type CompanionParts = (
    MeasureStructure,
    PointMap,
    Vec<RandomQuantity>,
    PointMap,
    Option<IdealOfSets>,
);

fn need<T>(field: Option<T>, name: &str, kind: Kind) -> Result<T> {
    field.ok_or_else(|| anyhow!("kind `{kind}` requires the `{name}` field"))
}

impl InstanceFile {
    pub fn ground_set(&self) -> Result<GroundSet> {
        let atoms = need(self.ground.clone(), "ground", self.kind)?;
        Ok(GroundSet::new(atoms)?)
    }

    pub fn measure_structure(&self) -> Result<MeasureStructure> {
        let ground = self.ground_set()?;
        let dto = MeasureDto {
            ring: need(self.ring.clone(), "ring", self.kind)?,
            lambda: need(self.lambda.clone(), "lambda", self.kind)?,
        };
        dto.to_structure(&ground)
    }

    pub fn quantity_on(&self, ground: &GroundSet) -> Result<RandomQuantity> {
        let map = need(self.quantity.as_ref(), "quantity", self.kind)?;
        let values = rat_map(map, "quantity")?;
        let mut vec = Vec::with_capacity(ground.len());
        for atom in ground.atoms() {
            let v = values
                .get(atom)
                .ok_or_else(|| anyhow!("quantity misses atom `{atom}`"))?;
            vec.push(v.clone());
        }
        Ok(RandomQuantity::new(ground.clone(), vec)?)
    }

    pub fn conglomerability(&self) -> Result<ConglomerabilityInstance> {
        let basis = need(self.basis.clone(), "basis", self.kind)?;
        let omega = GroundSet::new(need(self.omega.clone(), "omega", self.kind)?)?;
        let t = need(self.t.as_ref(), "t", self.kind)?
            .iter()
            .enumerate()
            .map(|(i, row)| rats(row, &format!("t[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        let phi = rats(need(self.phi.as_ref(), "phi", self.kind)?, "phi")?;
        Ok(ConglomerabilityInstance::new(basis, omega, t, phi)?)
    }

    fn point_map(
        &self,
        field: &BTreeMap<String, String>,
        name: &str,
        domain: &GroundSet,
        codomain: &GroundSet,
    ) -> Result<PointMap> {
        let assignment: Vec<(&str, &str)> = field
            .iter()
            .map(|(k, v)| (k.as_str(), v.as_str()))
            .collect();
        PointMap::from_labels(domain.clone(), codomain.clone(), &assignment)
            .with_context(|| name.to_string())
    }

    pub fn companion_parts(&self) -> Result<CompanionParts> {
        let s = GroundSet::new(need(self.s.clone(), "s", self.kind)?)?;
        let omega = self.ground_set_named(&self.omega, "omega")?;
        let m_dto = need(self.m.as_ref(), "m", self.kind)?;
        let m = m_dto.to_structure(&omega).context("m")?;
        let x = self.point_map(need(self.x.as_ref(), "x", self.kind)?, "x", &omega, &s)?;
        let family_maps = need(self.family.as_ref(), "family", self.kind)?;
        let mut family = Vec::with_capacity(family_maps.len());
        for (i, map) in family_maps.iter().enumerate() {
            let values = rat_map(map, &format!("family[{i}]"))?;
            let mut vec = Vec::with_capacity(s.len());
            for atom in s.atoms() {
                vec.push(
                    values
                        .get(atom)
                        .ok_or_else(|| anyhow!("family[{i}] misses point `{atom}`"))?
                        .clone(),
                );
            }
            family.push(RandomQuantity::new(s.clone(), vec)?);
        }
        let omega_prime = self.ground_set_named(&self.omega_prime, "omega_prime")?;
        let x_prime = self.point_map(
            need(self.x_prime.as_ref(), "x_prime", self.kind)?,
            "x_prime",
            &omega_prime,
            &s,
        )?;
        let neg = match &self.neg {
            None => None,
            Some(gens) => {
                let subsets = gens
                    .iter()
                    .enumerate()
                    .map(|(i, labels)| {
                        omega_prime
                            .subset(labels.iter())
                            .with_context(|| format!("neg[{i}]"))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Some(IdealOfSets::new(omega_prime.clone(), subsets)?)
            }
        };
        Ok((m, x, family, x_prime, neg))
    }

    fn ground_set_named(&self, field: &Option<Vec<String>>, name: &str) -> Result<GroundSet> {
        let atoms = need(field.clone(), name, self.kind)?;
        Ok(GroundSet::new(atoms)?)
    }

    pub fn disintegration(&self) -> Result<DisintegrationInstance> {
        let ground = self.ground_set()?;
        let algebra_dto = MeasureDto {
            ring: need(self.algebra.clone(), "algebra", self.kind)?,
            lambda: need(self.marginal.clone(), "marginal", self.kind)?,
        };
        let m = algebra_dto.to_structure(&ground).context("marginal")?;
        let thetas = need(self.thetas.clone(), "thetas", self.kind)?;
        let q_rows = need(self.q.as_ref(), "q", self.kind)?;
        let mut kernels = Vec::with_capacity(q_rows.len());
        for (i, row) in q_rows.iter().enumerate() {
            let dto = MeasureDto {
                ring: self.algebra.clone().unwrap(),
                lambda: row.clone(),
            };
            kernels.push(
                dto.to_structure(&ground)
                    .with_context(|| format!("q[{i}]"))?
                    .lambda()
                    .clone(),
            );
        }
        Ok(DisintegrationInstance::new(
            m.lambda().clone(),
            thetas,
            kernels,
        )?)
    }
}

/// The verdict file: echo of the instance id, the outcome, the witness in
/// exact `p/q` form, and solver metadata.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerdictFile {
    pub id: String,
    pub outcome: Outcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub meta: Meta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Feasible,
    Infeasible,
    Value,
    Error,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Meta {
    pub command: String,
    pub pivots: u64,
}

pub fn rational_json(r: &Rational) -> serde_json::Value {
    serde_json::Value::String(format_rational(r))
}

