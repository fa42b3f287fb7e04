//! Workload queries, selection predicates and the query-predicate matrix.

mod matrix;
mod parse;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::warehouse::{DimensionInstance, Literal, WarehouseMeta};

pub use matrix::{build_qp_matrix, QueryPredicateMatrix};
pub use parse::parse_workload;

/// Predicate identifier, displayed as `p1`, `p2`, ... in first-occurrence
/// order across the workload.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PredicateId(pub u32);

impl fmt::Display for PredicateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p{}", self.0)
    }
}

impl FromStr for PredicateId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.strip_prefix('p')
            .and_then(|n| n.parse().ok())
            .map(PredicateId)
            .ok_or_else(|| format!("invalid predicate id `{s}`"))
    }
}

/// Query identifier, displayed as `q1`, `q2`, ...
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QueryId(pub u32);

impl fmt::Display for QueryId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Comparator {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl Comparator {
    pub const ALL: [Comparator; 6] = [
        Comparator::Eq,
        Comparator::Ne,
        Comparator::Lt,
        Comparator::Le,
        Comparator::Gt,
        Comparator::Ge,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            Comparator::Eq => "=",
            Comparator::Ne => "!=",
            Comparator::Lt => "<",
            Comparator::Le => "<=",
            Comparator::Gt => ">",
            Comparator::Ge => ">=",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Comparator> {
        Comparator::ALL.into_iter().find(|c| c.symbol() == s)
    }

    /// The comparator of the negated predicate.
    pub fn negate(self) -> Comparator {
        match self {
            Comparator::Eq => Comparator::Ne,
            Comparator::Ne => Comparator::Eq,
            Comparator::Lt => Comparator::Ge,
            Comparator::Le => Comparator::Gt,
            Comparator::Gt => Comparator::Le,
            Comparator::Ge => Comparator::Lt,
        }
    }

    /// Whether `value cmp literal` holds given `value.cmp(literal)`.
    pub fn holds(self, ord: Ordering) -> bool {
        match self {
            Comparator::Eq => ord == Ordering::Equal,
            Comparator::Ne => ord != Ordering::Equal,
            Comparator::Lt => ord == Ordering::Less,
            Comparator::Le => ord != Ordering::Greater,
            Comparator::Gt => ord == Ordering::Greater,
            Comparator::Ge => ord != Ordering::Less,
        }
    }
}

impl fmt::Display for Comparator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Atomic comparison between a dimension attribute and a typed literal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SelectionPredicate {
    pub id: PredicateId,
    pub dimension: String,
    pub attribute: String,
    pub comparator: Comparator,
    pub literal: Literal,
}

impl SelectionPredicate {
    /// Canonical identity: two occurrences with the same key are one predicate.
    pub fn key(&self) -> (&str, &str, Comparator, &Literal) {
        (
            &self.dimension,
            &self.attribute,
            self.comparator,
            &self.literal,
        )
    }

    pub fn matches_value(&self, value: &Literal) -> bool {
        value.value_type() == self.literal.value_type()
            && self.comparator.holds(value.cmp(&self.literal))
    }

    /// Evaluates the predicate on an instance of its dimension. A missing
    /// attribute never satisfies a predicate.
    pub fn matches(&self, instance: &DimensionInstance) -> bool {
        instance
            .value(&self.attribute)
            .is_some_and(|v| self.matches_value(v))
    }

    /// Whether the predicate resolves against the warehouse metadata with a
    /// literal of the attribute's type.
    pub fn resolves(&self, meta: &WarehouseMeta) -> bool {
        meta.attribute(&self.dimension, &self.attribute)
            .is_some_and(|a| a.value_type == self.literal.value_type())
    }
}

impl fmt::Display for SelectionPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {}.{} {} \"{}\"",
            self.id, self.dimension, self.attribute, self.comparator, self.literal
        )
    }
}

pub type PredicateTable = BTreeMap<PredicateId, SelectionPredicate>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WorkloadQuery {
    pub id: QueryId,
    pub selections: BTreeSet<PredicateId>,
    pub joined_dimensions: BTreeSet<String>,
    /// Relative frequency, used by affinity-based fragmentation. Defaults to 1.
    pub frequency: u32,
    pub source_text: String,
}

/// A parsed workload: queries in document order plus the global,
/// deduplicated predicate table.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Workload {
    pub queries: Vec<WorkloadQuery>,
    pub predicates: PredicateTable,
}

impl Workload {
    pub fn qp_matrix(&self) -> QueryPredicateMatrix {
        build_qp_matrix(&self.queries)
    }

    pub fn frequencies(&self) -> BTreeMap<QueryId, u32> {
        self.queries.iter().map(|q| (q.id, q.frequency)).collect()
    }

    pub fn selection_free_count(&self) -> usize {
        self.queries
            .iter()
            .filter(|q| q.selections.is_empty())
            .count()
    }

    /// Predicates of `q`, resolved through the table.
    pub fn selections_of<'a>(
        &'a self,
        q: &'a WorkloadQuery,
    ) -> impl Iterator<Item = &'a SelectionPredicate> + 'a {
        q.selections.iter().filter_map(|id| self.predicates.get(id))
    }

    /// Renders the workload back into the workload text format, one block
    /// per query. Parsing the output yields the same predicates and matrix.
    pub fn to_text(&self) -> String {
        let mut blocks = Vec::with_capacity(self.queries.len());
        for q in &self.queries {
            let preds: Vec<&SelectionPredicate> = self.selections_of(q).collect();
            let mut dims: Vec<&str> = q.joined_dimensions.iter().map(String::as_str).collect();
            for p in &preds {
                if !dims.contains(&p.dimension.as_str()) {
                    dims.push(&p.dimension);
                }
            }
            dims.sort_unstable();
            let var = |d: &str| format!("$d{}", dims.iter().position(|x| *x == d).unwrap() + 1);

            let mut s = String::from("for $x in //FactDoc/Fact");
            for d in &dims {
                s.push_str(&format!(
                    ",\n    {} in //dimension[@dim-id=\"{d}\"]/Level/instance",
                    var(d)
                ));
            }
            let mut clauses = Vec::new();
            for p in &preds {
                clauses.push(format!(
                    "{}/attribute[@id=\"{}\"]/@value{}\"{}\"",
                    var(&p.dimension),
                    p.attribute,
                    p.comparator,
                    p.literal
                ));
            }
            for d in &dims {
                clauses.push(format!(
                    "$x/dimension[@dim-id=\"{d}\"]/@value-id={}/@id",
                    var(d)
                ));
            }
            if !clauses.is_empty() {
                s.push_str("\nwhere ");
                s.push_str(&clauses.join("\n  and "));
            }
            s.push_str("\nreturn $x");
            if q.frequency != 1 {
                s.push_str(&format!(" @freq={}", q.frequency));
            }
            blocks.push(s);
        }
        let mut out = blocks.join("\n\n");
        out.push('\n');
        out
    }
}
