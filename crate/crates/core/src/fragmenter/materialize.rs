use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;

use super::schema_xml::emit_frag_schema_xml;
use super::script::fragments_xq;
use super::{FragmentRef, FragmentSpec, FragmentationSchema};
use crate::baselines::Polarity;
use crate::error::Result;
use crate::warehouse::{save_warehouse, write_file, Warehouse};
use crate::workload::PredicateId;

pub const FRAG_SCHEMA_FILE: &str = "frag-schema.xml";
pub const SCRIPT_FILE: &str = "fragments.xq";

/// Per warehouse dimension: selected instance positions, `None` for all.
type DimensionSelection = Vec<Option<Vec<usize>>>;

/// Materialized fragments as index sets into the source warehouse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FragmentSet {
    pub schema: FragmentationSchema,
    /// Per spec, per warehouse dimension: selected instance positions, or
    /// `None` where the spec does not filter that dimension.
    pub dim_fragments: Vec<DimensionSelection>,
    /// Per spec: fact positions, ascending.
    pub fact_fragments: Vec<Vec<usize>>,
    /// Facts outside every spec fragment; empty without ELSE.
    pub else_facts: Vec<usize>,
}

impl FragmentSet {
    pub fn facts(&self, f: FragmentRef) -> &[usize] {
        match f {
            FragmentRef::Spec(i) => &self.fact_fragments[i],
            FragmentRef::Else => &self.else_facts,
        }
    }

    /// Instance positions of dimension `d` stored with fragment `f`;
    /// `None` is the whole dimension.
    pub fn dimension(&self, f: FragmentRef, d: usize) -> Option<&[usize]> {
        match f {
            FragmentRef::Spec(i) => self.dim_fragments[i][d].as_deref(),
            FragmentRef::Else => None,
        }
    }

    pub fn fact_ids<'w>(&self, w: &'w Warehouse, f: FragmentRef) -> Vec<&'w str> {
        self.facts(f)
            .iter()
            .map(|&i| w.facts()[i].id.as_str())
            .collect()
    }

    /// Facts stored more than once across fragments.
    pub fn overlap(&self) -> usize {
        let stored: usize =
            self.fact_fragments.iter().map(Vec::len).sum::<usize>() + self.else_facts.len();
        let mut seen: Vec<usize> = self
            .fact_fragments
            .iter()
            .flatten()
            .chain(&self.else_facts)
            .copied()
            .collect();
        seen.sort_unstable();
        seen.dedup();
        stored - seen.len()
    }

    /// Fragment `f` as a standalone warehouse.
    pub fn extract(&self, w: &Warehouse, f: FragmentRef) -> Warehouse {
        let dims: Vec<Option<&[usize]>> = (0..w.meta().dimensions.len())
            .map(|d| self.dimension(f, d))
            .collect();
        w.subset(self.facts(f), &dims)
    }
}

/// Computes dimension and fact fragments of `schema` over `w`.
///
/// Each predicate is evaluated once per instance of its dimension; fragments
/// are then combined in parallel. A fact belongs to a fragment when each
/// filtered dimension's referenced instance is selected.
pub fn materialize(schema: &FragmentationSchema, w: &Warehouse) -> FragmentSet {
    let meta = w.meta();
    let truth: BTreeMap<PredicateId, Vec<bool>> = schema
        .predicate_table
        .par_iter()
        .filter_map(|(&id, p)| {
            let d = meta.dimension_index(&p.dimension)?;
            Some((
                id,
                w.dimension_instances(d)
                    .iter()
                    .map(|i| p.matches(i))
                    .collect(),
            ))
        })
        .collect();

    let per_spec: Vec<(DimensionSelection, Vec<usize>)> = schema
        .specs
        .par_iter()
        .map(|spec| fragment(spec, schema.conjunctive(), &truth, w))
        .collect();
    let (dim_fragments, fact_fragments): (Vec<_>, Vec<_>) = per_spec.into_iter().unzip();

    let else_facts = if schema.has_else {
        let mut covered = vec![false; w.fact_count()];
        for &f in fact_fragments.iter().flatten() {
            covered[f] = true;
        }
        (0..w.fact_count()).filter(|&f| !covered[f]).collect()
    } else {
        Vec::new()
    };

    FragmentSet {
        schema: schema.clone(),
        dim_fragments,
        fact_fragments,
        else_facts,
    }
}

fn fragment(
    spec: &FragmentSpec,
    conjunctive: bool,
    truth: &BTreeMap<PredicateId, Vec<bool>>,
    w: &Warehouse,
) -> (DimensionSelection, Vec<usize>) {
    let meta = w.meta();
    let mut masks: Vec<Option<Vec<bool>>> = vec![None; meta.dimensions.len()];
    for dp in &spec.per_dimension {
        let Some(d) = meta.dimension_index(&dp.dimension) else {
            continue;
        };
        let n = w.dimension_instances(d).len();
        let holds = |p: &PredicateId, polarity: Polarity, i: usize| {
            truth.get(p).is_some_and(|t| t[i]) == (polarity == Polarity::Positive)
        };
        let mask = (0..n)
            .map(|i| {
                if conjunctive {
                    dp.predicates.iter().all(|(p, pol)| holds(p, *pol, i))
                } else {
                    dp.predicates.iter().any(|(p, pol)| holds(p, *pol, i))
                }
            })
            .collect();
        masks[d] = Some(mask);
    }
    let facts = (0..w.fact_count())
        .filter(|&f| {
            masks
                .iter()
                .enumerate()
                .all(|(d, m)| m.as_ref().is_none_or(|m| m[w.fact_ref(f, d)]))
        })
        .collect();
    let dims = masks
        .into_iter()
        .map(|m| {
            m.map(|m| {
                m.iter()
                    .enumerate()
                    .filter(|(_, &b)| b)
                    .map(|(i, _)| i)
                    .collect()
            })
        })
        .collect();
    (dims, facts)
}

/// Writes `frag-schema.xml`, `fragments.xq` and one warehouse directory per
/// fragment (`f1/`, ..., `ELSE/`) under `out`.
pub fn write_fragments(set: &FragmentSet, w: &Warehouse, out: &Path) -> Result<()> {
    emit_frag_schema_xml(&set.schema, &out.join(FRAG_SCHEMA_FILE))?;
    write_file(&out.join(SCRIPT_FILE), &fragments_xq(&set.schema, w.meta()))?;
    set.schema.fragments().into_par_iter().try_for_each(|f| {
        let dir = out.join(set.schema.fragment_id(f));
        save_warehouse(&set.extract(w, f), &dir)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fragmenter::{build_schema, plan_schema, FragmentOptions, Method};
    use crate::testutil::{nation_eq, running_schema, toy_warehouse};
    use crate::warehouse::{generate_warehouse, load_warehouse, Literal};
    use crate::workload::{parse_workload, PredicateTable};

    #[test]
    fn toy_fragment_and_else() {
        let w = toy_warehouse();
        let table: PredicateTable = [(PredicateId(1), nation_eq(1, 13.0))].into();
        let schema = build_schema(
            &[vec![(PredicateId(1), Polarity::Positive)]],
            Method::Km,
            &table,
            w.meta(),
        )
        .unwrap();
        let set = materialize(&schema, &w);
        assert_eq!(set.fact_ids(&w, FragmentRef::Spec(0)), ["t1", "t2"]);
        assert_eq!(set.fact_ids(&w, FragmentRef::Else), ["t3", "t4"]);
        assert_eq!(set.dimension(FragmentRef::Spec(0), 0), Some(&[0][..]));
        assert_eq!(set.overlap(), 0);
    }

    #[test]
    fn else_only_schema_keeps_everything() {
        let w = toy_warehouse();
        let schema = build_schema(&[], Method::Km, &PredicateTable::new(), w.meta()).unwrap();
        let set = materialize(&schema, &w);
        assert_eq!(set.else_facts, vec![0, 1, 2, 3]);
    }

    #[test]
    fn running_example_customer_fragment() {
        let w = generate_warehouse(500, 3);
        let set = materialize(&running_schema(), &w);
        let d = w.meta().dimension_index("Customer").unwrap();
        let selected = set.dimension(FragmentRef::Spec(1), d).unwrap();
        let expected: Vec<usize> = w
            .dimension_instances(d)
            .iter()
            .enumerate()
            .filter(|(_, i)| i.value("c_nation_key") == Some(&Literal::numeric(13.0)))
            .map(|(k, _)| k)
            .collect();
        assert_eq!(selected, expected.as_slice());
    }

    #[test]
    fn same_dimension_predicates_are_alternatives() {
        let w = toy_warehouse();
        let table: PredicateTable = [
            (PredicateId(1), nation_eq(1, 13.0)),
            (PredicateId(2), nation_eq(2, 20.0)),
        ]
        .into();
        let group = vec![
            (PredicateId(1), Polarity::Positive),
            (PredicateId(2), Polarity::Positive),
        ];
        let schema = build_schema(&[group], Method::Ab, &table, w.meta()).unwrap();
        let set = materialize(&schema, &w);
        assert_eq!(set.fact_fragments[0], vec![0, 1, 2, 3]);
        assert!(set.else_facts.is_empty());
    }

    #[test]
    fn written_fragments_reload() {
        let w = generate_warehouse(200, 5);
        let wl = parse_workload(crate::testutil::XWEB_WORKLOAD, w.meta()).unwrap();
        let schema = plan_schema(&wl, w.meta(), Method::Km, &FragmentOptions::default()).unwrap();
        let set = materialize(&schema, &w);
        let dir = tempfile::tempdir().unwrap();
        write_fragments(&set, &w, dir.path()).unwrap();
        let mut total = 0;
        for f in schema.fragments() {
            let loaded = load_warehouse(&dir.path().join(schema.fragment_id(f))).unwrap();
            assert_eq!(loaded, set.extract(&w, f));
            total += loaded.fact_count();
        }
        assert_eq!(total, w.fact_count() + set.overlap());
        assert!(dir.path().join(FRAG_SCHEMA_FILE).exists());
        assert!(dir.path().join(SCRIPT_FILE).exists());
    }
}
