//! Fragmentation schemas, their materialization over a warehouse, and query
//! routing.
//!
//! A schema lists fragment specifications; each names, per dimension, the
//! predicates that select that dimension's instances. Facts follow their
//! dimension instances. Cluster-derived schemas (KM, AB) add an ELSE
//! fragment holding every fact no other fragment covers.

mod materialize;
mod route;
mod schema_xml;
mod script;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::baselines::{ab_fragments, pc_fragments, Polarity, DEFAULT_PC_CAP};
use crate::clustering::{kmeans, ClusterSet, KMeansOptions};
use crate::error::{Error, Result};
use crate::warehouse::WarehouseMeta;
use crate::workload::{PredicateId, PredicateTable, Workload};

pub use materialize::{materialize, write_fragments, FragmentSet, FRAG_SCHEMA_FILE, SCRIPT_FILE};
pub use route::{route_predicates, route_query};
pub use schema_xml::{emit_frag_schema_xml, frag_schema_xml, load_frag_schema, parse_frag_schema};
pub use script::fragments_xq;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "NF")]
    Nf,
    #[serde(rename = "PC")]
    Pc,
    #[serde(rename = "AB")]
    Ab,
    #[serde(rename = "KM")]
    Km,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Nf, Method::Pc, Method::Ab, Method::Km];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Nf => "NF",
            Method::Pc => "PC",
            Method::Ab => "AB",
            Method::Km => "KM",
        }
    }

    /// Whether fragments of this method are completed by an ELSE fragment.
    /// PC minterms are exhaustive on their own.
    pub fn has_else(self) -> bool {
        self != Method::Pc
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown method `{s}` (expected nf, pc, ab or km)"))
    }
}

/// Predicates selecting one dimension's instances within a fragment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimensionPredicates {
    pub dimension: String,
    pub predicates: Vec<(PredicateId, Polarity)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FragmentSpec {
    pub id: String,
    /// Dimensions in order of first appearance in the defining group.
    pub per_dimension: Vec<DimensionPredicates>,
}

impl FragmentSpec {
    pub fn dimension(&self, id: &str) -> Option<&DimensionPredicates> {
        self.per_dimension.iter().find(|d| d.dimension == id)
    }

    pub fn predicates(&self) -> impl Iterator<Item = (PredicateId, Polarity)> + '_ {
        self.per_dimension
            .iter()
            .flat_map(|d| d.predicates.iter().copied())
    }
}

/// A fragment of a schema: one of its specs, or the ELSE fragment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FragmentRef {
    Spec(usize),
    Else,
}

pub const ELSE_ID: &str = "ELSE";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FragmentationSchema {
    pub method: Method,
    pub specs: Vec<FragmentSpec>,
    pub has_else: bool,
    pub predicate_table: PredicateTable,
}

impl FragmentationSchema {
    /// Total number of fragments, ELSE included.
    pub fn fragment_count(&self) -> usize {
        self.specs.len() + usize::from(self.has_else)
    }

    pub fn fragments(&self) -> Vec<FragmentRef> {
        let mut out: Vec<FragmentRef> = (0..self.specs.len()).map(FragmentRef::Spec).collect();
        if self.has_else {
            out.push(FragmentRef::Else);
        }
        out
    }

    pub fn fragment_id(&self, f: FragmentRef) -> &str {
        match f {
            FragmentRef::Spec(i) => &self.specs[i].id,
            FragmentRef::Else => ELSE_ID,
        }
    }

    /// Whether same-dimension predicates of a fragment combine by
    /// conjunction (minterms) rather than disjunction (predicate groups).
    pub fn conjunctive(&self) -> bool {
        self.method == Method::Pc
    }

    /// Checks the structural invariants: unique ids, known dimensions and
    /// predicates, and nonempty specs outside PC.
    pub fn validate(&self, meta: &WarehouseMeta) -> Result<()> {
        let mut ids = std::collections::BTreeSet::new();
        for spec in &self.specs {
            if spec.id == ELSE_ID || !ids.insert(spec.id.as_str()) {
                return Err(Error::Schema(format!(
                    "duplicate fragment id `{}`",
                    spec.id
                )));
            }
            if spec.per_dimension.is_empty() && self.method != Method::Pc {
                return Err(Error::Schema(format!(
                    "fragment `{}` has no predicates",
                    spec.id
                )));
            }
            for dp in &spec.per_dimension {
                if meta.dimension(&dp.dimension).is_none() {
                    return Err(Error::Schema(format!(
                        "fragment `{}` names unknown dimension `{}`",
                        spec.id, dp.dimension
                    )));
                }
                for &(p, polarity) in &dp.predicates {
                    let pred = self
                        .predicate_table
                        .get(&p)
                        .ok_or(Error::UnknownPredicate(p))?;
                    if pred.dimension != dp.dimension || !pred.resolves(meta) {
                        return Err(Error::Schema(format!(
                            "predicate {p} does not resolve in dimension `{}`",
                            dp.dimension
                        )));
                    }
                    if polarity == Polarity::Negated && !self.conjunctive() {
                        return Err(Error::Schema(format!(
                            "negated predicate {p} outside a minterm schema"
                        )));
                    }
                }
            }
        }
        if self.has_else != self.method.has_else() {
            return Err(Error::Schema(format!(
                "{} schema must {}have an ELSE fragment",
                self.method,
                if self.method.has_else() { "" } else { "not " }
            )));
        }
        Ok(())
    }
}

/// Builds a schema with one fragment per group, ids `f1`, `f2`, ... in group
/// order. `table` supplies predicate bodies and is stored in the schema.
pub fn build_schema(
    groups: &[Vec<(PredicateId, Polarity)>],
    method: Method,
    table: &PredicateTable,
    meta: &WarehouseMeta,
) -> Result<FragmentationSchema> {
    let mut specs = Vec::with_capacity(groups.len());
    for (i, group) in groups.iter().enumerate() {
        let mut per_dimension: Vec<DimensionPredicates> = Vec::new();
        for &(p, polarity) in group {
            let pred = table.get(&p).ok_or(Error::UnknownPredicate(p))?;
            match per_dimension
                .iter_mut()
                .find(|d| d.dimension == pred.dimension)
            {
                Some(d) => d.predicates.push((p, polarity)),
                None => per_dimension.push(DimensionPredicates {
                    dimension: pred.dimension.clone(),
                    predicates: vec![(p, polarity)],
                }),
            }
        }
        specs.push(FragmentSpec {
            id: format!("f{}", i + 1),
            per_dimension,
        });
    }
    let schema = FragmentationSchema {
        method,
        specs,
        has_else: method.has_else(),
        predicate_table: table.clone(),
    };
    schema.validate(meta)?;
    Ok(schema)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FragmentOptions {
    pub k: usize,
    pub max_iters: usize,
    pub seed: u64,
    pub ab_threshold: u64,
    pub pc_cap: usize,
}

impl Default for FragmentOptions {
    fn default() -> Self {
        let km = KMeansOptions::default();
        FragmentOptions {
            k: km.k,
            max_iters: km.max_iters,
            seed: km.seed,
            ab_threshold: 1,
            pc_cap: DEFAULT_PC_CAP,
        }
    }
}

/// Derives the fragmentation schema of `method` for a workload.
///
/// NF yields a schema with no specs, whose ELSE fragment is the whole
/// warehouse; so does KM on a workload without selections.
pub fn plan_schema(
    workload: &Workload,
    meta: &WarehouseMeta,
    method: Method,
    opts: &FragmentOptions,
) -> Result<FragmentationSchema> {
    let positive = |g: Vec<PredicateId>| g.into_iter().map(|p| (p, Polarity::Positive)).collect();
    let groups: Vec<Vec<(PredicateId, Polarity)>> = match method {
        Method::Nf => Vec::new(),
        Method::Km if workload.predicates.is_empty() => Vec::new(),
        Method::Km => {
            let km = KMeansOptions {
                k: opts.k,
                max_iters: opts.max_iters,
                seed: opts.seed,
                ..Default::default()
            };
            let clusters: ClusterSet<f64> = kmeans(&workload.qp_matrix(), &km)?;
            clusters.groups().into_iter().map(positive).collect()
        }
        Method::Ab => ab_fragments(
            &workload.qp_matrix(),
            &workload.frequencies(),
            opts.ab_threshold,
        )
        .into_iter()
        .map(positive)
        .collect(),
        Method::Pc => {
            let preds: Vec<_> = workload.predicates.values().cloned().collect();
            pc_fragments(&preds, meta, opts.pc_cap)?
                .into_iter()
                .map(|m| m.terms.into_iter().collect())
                .collect()
        }
    };
    build_schema(&groups, method, &workload.predicates, meta)
}
