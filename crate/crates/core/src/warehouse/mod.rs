//! Reference star-schema warehouse: metadata, facts and dimension documents.
//!
//! A warehouse on disk is a directory holding `dw-model.xml`, one facts
//! document and one document per dimension. [`Warehouse`] is the immutable
//! in-memory form; it is only constructed through [`Warehouse::new`], which
//! checks referential integrity and builds the lookup indices used by the
//! fragmenter and the evaluator.

mod generate;
mod io;

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use generate::{generate_warehouse, DIMENSION_CARDINALITIES};
pub(crate) use io::write as write_file;
pub use io::{load_warehouse, save_warehouse, MODEL_FILE};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValueType {
    Numeric,
    Text,
}

impl ValueType {
    pub fn as_str(self) -> &'static str {
        match self {
            ValueType::Numeric => "numeric",
            ValueType::Text => "text",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "numeric" => Some(ValueType::Numeric),
            "text" => Some(ValueType::Text),
            _ => None,
        }
    }
}

impl fmt::Display for ValueType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A typed attribute value or predicate literal.
///
/// Numeric literals compare as numbers, so `15` and `15.0` are equal; text
/// literals compare lexicographically. Values of different types are never
/// equal and order numerics first.
#[derive(Clone, Debug)]
pub enum Literal {
    Numeric(f64),
    Text(String),
}

impl Literal {
    /// Parses `raw` according to `ty`. Numeric values must be finite.
    pub fn parse(raw: &str, ty: ValueType) -> Option<Literal> {
        match ty {
            ValueType::Numeric => raw
                .trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .map(Literal::numeric),
            ValueType::Text => Some(Literal::Text(raw.to_string())),
        }
    }

    pub fn numeric(v: f64) -> Literal {
        // -0.0 and 0.0 must hash identically
        Literal::Numeric(if v == 0.0 { 0.0 } else { v })
    }

    pub fn text(s: impl Into<String>) -> Literal {
        Literal::Text(s.into())
    }

    pub fn value_type(&self) -> ValueType {
        match self {
            Literal::Numeric(_) => ValueType::Numeric,
            Literal::Text(_) => ValueType::Text,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Literal::Numeric(v) => Some(*v),
            Literal::Text(_) => None,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Numeric(v) => write!(f, "{v}"),
            Literal::Text(s) => f.write_str(s),
        }
    }
}

impl PartialEq for Literal {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Literal {}

impl PartialOrd for Literal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Literal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Literal::Numeric(a), Literal::Numeric(b)) => a.total_cmp(b),
            (Literal::Text(a), Literal::Text(b)) => a.cmp(b),
            (Literal::Numeric(_), Literal::Text(_)) => Ordering::Less,
            (Literal::Text(_), Literal::Numeric(_)) => Ordering::Greater,
        }
    }
}

impl Hash for Literal {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Literal::Numeric(v) => {
                0u8.hash(state);
                v.to_bits().hash(state);
            }
            Literal::Text(s) => {
                1u8.hash(state);
                s.hash(state);
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttributeMeta {
    /// Attribute identifier; instances refer to it through `attribute/@id`.
    pub name: String,
    pub value_type: ValueType,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelMeta {
    pub id: String,
    pub attributes: Vec<AttributeMeta>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimensionMeta {
    pub id: String,
    /// Dimension document path, relative to the warehouse directory.
    pub path: String,
    pub levels: Vec<LevelMeta>,
}

impl DimensionMeta {
    pub fn level(&self, id: &str) -> Option<&LevelMeta> {
        self.levels.iter().find(|l| l.id == id)
    }

    /// Looks an attribute up across all levels of the dimension.
    pub fn attribute(&self, name: &str) -> Option<&AttributeMeta> {
        self.levels
            .iter()
            .flat_map(|l| l.attributes.iter())
            .find(|a| a.name == name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasureMeta {
    pub id: String,
    pub value_type: ValueType,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WarehouseMeta {
    pub fact_id: String,
    /// Facts document path, relative to the warehouse directory.
    pub fact_path: String,
    pub measures: Vec<MeasureMeta>,
    pub dimensions: Vec<DimensionMeta>,
}

impl WarehouseMeta {
    pub fn dimension(&self, id: &str) -> Option<&DimensionMeta> {
        self.dimensions.iter().find(|d| d.id == id)
    }

    pub fn dimension_index(&self, id: &str) -> Option<usize> {
        self.dimensions.iter().position(|d| d.id == id)
    }

    pub fn attribute(&self, dimension: &str, attribute: &str) -> Option<&AttributeMeta> {
        self.dimension(dimension)?.attribute(attribute)
    }

    fn validate(&self) -> Result<()> {
        let mut dims = HashSet::new();
        for d in &self.dimensions {
            if !dims.insert(d.id.as_str()) {
                return Err(Error::Metadata(format!("duplicate dimension `{}`", d.id)));
            }
            let mut levels = HashSet::new();
            for l in &d.levels {
                if !levels.insert(l.id.as_str()) {
                    return Err(Error::Metadata(format!(
                        "duplicate level `{}` in dimension `{}`",
                        l.id, d.id
                    )));
                }
                if l.attributes.is_empty() {
                    return Err(Error::Metadata(format!(
                        "level `{}` of dimension `{}` has no attributes",
                        l.id, d.id
                    )));
                }
                let mut attrs = HashSet::new();
                for a in &l.attributes {
                    if !attrs.insert(a.name.as_str()) {
                        return Err(Error::Metadata(format!(
                            "duplicate attribute `{}` in level `{}`",
                            a.name, l.id
                        )));
                    }
                }
            }
        }
        let mut measures = HashSet::new();
        for m in &self.measures {
            if !measures.insert(m.id.as_str()) {
                return Err(Error::Metadata(format!("duplicate measure `{}`", m.id)));
            }
            if m.value_type != ValueType::Numeric {
                return Err(Error::Metadata(format!(
                    "measure `{}` must be numeric",
                    m.id
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimensionInstance {
    pub id: String,
    pub level_id: String,
    pub attribute_values: BTreeMap<String, Literal>,
    pub roll_up: Option<String>,
    pub drill_down: Option<String>,
}

impl DimensionInstance {
    pub fn value(&self, attribute: &str) -> Option<&Literal> {
        self.attribute_values.get(attribute)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Fact {
    pub id: String,
    pub measures: BTreeMap<String, f64>,
    /// Dimension id to referenced instance id.
    pub dim_refs: BTreeMap<String, String>,
}

/// Immutable, integrity-checked warehouse.
///
/// Dimension instance lists are aligned with `meta.dimensions`. Within a
/// dimension, instances are kept grouped by level in metadata order, which is
/// the order the dimension document stores them in.
#[derive(Clone, Debug)]
pub struct Warehouse {
    meta: WarehouseMeta,
    facts: Vec<Fact>,
    dimensions: Vec<Vec<DimensionInstance>>,
    instance_index: Vec<HashMap<String, usize>>,
    // fact_refs[f][d] = index of the instance fact f references in dimension d
    fact_refs: Vec<Vec<usize>>,
}

impl PartialEq for Warehouse {
    fn eq(&self, other: &Self) -> bool {
        self.meta == other.meta && self.facts == other.facts && self.dimensions == other.dimensions
    }
}

impl Warehouse {
    /// Builds a warehouse, validating metadata, instance typing and
    /// referential integrity. `dimensions` must be aligned with
    /// `meta.dimensions`.
    pub fn new(
        meta: WarehouseMeta,
        facts: Vec<Fact>,
        mut dimensions: Vec<Vec<DimensionInstance>>,
    ) -> Result<Warehouse> {
        meta.validate()?;
        if dimensions.len() != meta.dimensions.len() {
            return Err(Error::Metadata(format!(
                "{} dimension documents for {} declared dimensions",
                dimensions.len(),
                meta.dimensions.len()
            )));
        }

        let mut instance_index = Vec::with_capacity(dimensions.len());
        for (dm, instances) in meta.dimensions.iter().zip(dimensions.iter_mut()) {
            for inst in instances.iter() {
                let level = dm.level(&inst.level_id).ok_or_else(|| {
                    Error::Metadata(format!(
                        "instance `{}` of `{}` names unknown level `{}`",
                        inst.id, dm.id, inst.level_id
                    ))
                })?;
                for (name, value) in &inst.attribute_values {
                    let attr = level
                        .attributes
                        .iter()
                        .find(|a| &a.name == name)
                        .ok_or_else(|| {
                            Error::Metadata(format!(
                                "instance `{}` of `{}` sets unknown attribute `{name}`",
                                inst.id, dm.id
                            ))
                        })?;
                    if attr.value_type != value.value_type() {
                        return Err(Error::Metadata(format!(
                            "instance `{}` of `{}`: attribute `{name}` expects {} value",
                            inst.id, dm.id, attr.value_type
                        )));
                    }
                }
            }
            instances.sort_by_key(|inst| dm.levels.iter().position(|l| l.id == inst.level_id));

            let mut index = HashMap::with_capacity(instances.len());
            for (i, inst) in instances.iter().enumerate() {
                if index.insert(inst.id.clone(), i).is_some() {
                    return Err(Error::Metadata(format!(
                        "duplicate instance `{}` in dimension `{}`",
                        inst.id, dm.id
                    )));
                }
            }
            instance_index.push(index);
        }

        let mut seen = HashSet::with_capacity(facts.len());
        let mut dangling = Vec::new();
        let mut fact_refs = Vec::with_capacity(facts.len());
        for fact in &facts {
            if !seen.insert(fact.id.as_str()) {
                return Err(Error::Integrity {
                    message: "duplicate fact id".into(),
                    fact_ids: vec![fact.id.clone()],
                });
            }
            for m in fact.measures.keys() {
                if !meta.measures.iter().any(|mm| &mm.id == m) {
                    return Err(Error::Integrity {
                        message: format!("unknown measure `{m}`"),
                        fact_ids: vec![fact.id.clone()],
                    });
                }
            }
            let mut refs = Vec::with_capacity(meta.dimensions.len());
            let mut ok = fact.dim_refs.len() == meta.dimensions.len();
            for (d, dm) in meta.dimensions.iter().enumerate() {
                match fact
                    .dim_refs
                    .get(&dm.id)
                    .and_then(|id| instance_index[d].get(id))
                {
                    Some(&i) => refs.push(i),
                    None => ok = false,
                }
            }
            if ok {
                fact_refs.push(refs);
            } else {
                dangling.push(fact.id.clone());
            }
        }
        if !dangling.is_empty() {
            return Err(Error::Integrity {
                message:
                    "dimension references that do not resolve to exactly one instance per dimension"
                        .into(),
                fact_ids: dangling,
            });
        }

        Ok(Warehouse {
            meta,
            facts,
            dimensions,
            instance_index,
            fact_refs,
        })
    }

    pub fn meta(&self) -> &WarehouseMeta {
        &self.meta
    }

    pub fn facts(&self) -> &[Fact] {
        &self.facts
    }

    pub fn fact_count(&self) -> usize {
        self.facts.len()
    }

    /// Instances of the `d`-th dimension (metadata order).
    pub fn dimension_instances(&self, d: usize) -> &[DimensionInstance] {
        &self.dimensions[d]
    }

    pub fn instances(&self, dimension: &str) -> Option<&[DimensionInstance]> {
        self.meta
            .dimension_index(dimension)
            .map(|d| self.dimensions[d].as_slice())
    }

    pub fn instance_position(&self, d: usize, id: &str) -> Option<usize> {
        self.instance_index[d].get(id).copied()
    }

    /// Index of the instance that fact `fact` references in dimension `d`.
    pub fn fact_ref(&self, fact: usize, d: usize) -> usize {
        self.fact_refs[fact][d]
    }

    /// Copies the given facts and per-dimension instances into a new
    /// warehouse with the same metadata. `None` keeps a dimension whole.
    pub fn subset(&self, facts: &[usize], dimensions: &[Option<&[usize]>]) -> Warehouse {
        let facts = facts.iter().map(|&f| self.facts[f].clone()).collect();
        let dims = self
            .dimensions
            .iter()
            .zip(dimensions)
            .map(|(all, keep)| match keep {
                Some(idx) => idx.iter().map(|&i| all[i].clone()).collect(),
                None => all.clone(),
            })
            .collect();
        // a subset of a valid warehouse whose fact references stay inside the
        // kept instances is valid by construction
        Warehouse::new(self.meta.clone(), facts, dims)
            .expect("subset of a valid warehouse must be valid")
    }
}
