use std::collections::HashSet;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::fragmenter::{FragmentRef, FragmentSet};
use crate::warehouse::Warehouse;
use crate::workload::{PredicateTable, SelectionPredicate, WorkloadQuery};

/// The part of a warehouse a query runs against: the whole of it, or one
/// materialized fragment.
#[derive(Clone, Debug)]
pub struct SourceView<'w> {
    warehouse: &'w Warehouse,
    facts: Option<&'w [usize]>,
    dimensions: Vec<Option<&'w [usize]>>,
}

impl<'w> SourceView<'w> {
    pub fn whole(warehouse: &'w Warehouse) -> Self {
        SourceView {
            warehouse,
            facts: None,
            dimensions: vec![None; warehouse.meta().dimensions.len()],
        }
    }

    pub fn fragment(warehouse: &'w Warehouse, set: &'w FragmentSet, f: FragmentRef) -> Self {
        SourceView {
            warehouse,
            facts: Some(set.facts(f)),
            dimensions: (0..warehouse.meta().dimensions.len())
                .map(|d| set.dimension(f, d))
                .collect(),
        }
    }

    pub fn warehouse(&self) -> &'w Warehouse {
        self.warehouse
    }

    pub fn fact_count(&self) -> usize {
        self.facts
            .map_or(self.warehouse.fact_count(), <[usize]>::len)
    }

    fn fact_positions(&self) -> Box<dyn Iterator<Item = usize> + '_> {
        match self.facts {
            Some(f) => Box::new(f.iter().copied()),
            None => Box::new(0..self.warehouse.fact_count()),
        }
    }

    fn instance_positions(&self, d: usize) -> Box<dyn Iterator<Item = usize> + '_> {
        match self.dimensions[d] {
            Some(i) => Box::new(i.iter().copied()),
            None => Box::new(0..self.warehouse.dimension_instances(d).len()),
        }
    }
}

/// Answer of one query on one source plus the work counters behind it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryResult {
    /// Matching fact positions in the source warehouse, ascending.
    pub facts: Vec<usize>,
    pub scanned_instances: u64,
    pub scanned_facts: u64,
    pub join_probes: u64,
    pub wall_clock: Duration,
}

impl QueryResult {
    pub fn cost(&self) -> u64 {
        self.scanned_instances + self.scanned_facts + self.join_probes
    }

    pub fn fact_ids<'w>(&self, w: &'w Warehouse) -> Vec<&'w str> {
        self.facts
            .iter()
            .map(|&f| w.facts()[f].id.as_str())
            .collect()
    }
}

pub fn evaluate_query(
    q: &WorkloadQuery,
    predicates: &PredicateTable,
    view: &SourceView<'_>,
) -> Result<QueryResult> {
    let preds = q
        .selections
        .iter()
        .map(|id| predicates.get(id).ok_or(Error::UnknownPredicate(*id)))
        .collect::<Result<Vec<_>>>()?;
    evaluate_selections(&preds, view)
}

/// Evaluates a conjunction of selections by hash join.
///
/// Every instance of each filtered dimension is scanned once to build the
/// set of qualifying instances. Every fact is then scanned and probed
/// against those sets in dimension order, stopping at the first miss.
pub fn evaluate_selections(
    preds: &[&SelectionPredicate],
    view: &SourceView<'_>,
) -> Result<QueryResult> {
    let start = Instant::now();
    let w = view.warehouse;
    let meta = w.meta();
    let mut by_dim: Vec<Vec<&SelectionPredicate>> = vec![Vec::new(); meta.dimensions.len()];
    for p in preds {
        if !p.resolves(meta) {
            return Err(Error::UnknownPredicate(p.id));
        }
        let d = meta
            .dimension_index(&p.dimension)
            .expect("resolved predicate");
        by_dim[d].push(p);
    }

    let mut scanned_instances = 0u64;
    let mut filters: Vec<(usize, HashSet<usize>)> = Vec::new();
    for (d, ps) in by_dim.iter().enumerate().filter(|(_, ps)| !ps.is_empty()) {
        let instances = w.dimension_instances(d);
        let mut keep = HashSet::new();
        for i in view.instance_positions(d) {
            scanned_instances += 1;
            if ps.iter().all(|p| p.matches(&instances[i])) {
                keep.insert(i);
            }
        }
        filters.push((d, keep));
    }

    let mut scanned_facts = 0u64;
    let mut join_probes = 0u64;
    let mut facts = Vec::new();
    for f in view.fact_positions() {
        scanned_facts += 1;
        let mut hit = true;
        for (d, keep) in &filters {
            join_probes += 1;
            if !keep.contains(&w.fact_ref(f, *d)) {
                hit = false;
                break;
            }
        }
        if hit {
            facts.push(f);
        }
    }
    Ok(QueryResult {
        facts,
        scanned_instances,
        scanned_facts,
        join_probes,
        wall_clock: start.elapsed(),
    })
}
