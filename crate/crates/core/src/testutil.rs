//! Fixtures shared by unit tests.

use std::collections::BTreeMap;

use crate::baselines::Polarity;
use crate::fragmenter::{build_schema, FragmentationSchema, Method};
use crate::warehouse::{
    generate_warehouse, AttributeMeta, DimensionInstance, DimensionMeta, Fact, LevelMeta, Literal,
    ValueType, Warehouse, WarehouseMeta,
};
use crate::workload::{parse_workload, Comparator, PredicateId, SelectionPredicate, Workload};

pub(crate) const RUNNING_EXAMPLE: &str = include_str!("../data/running_example.txt");
pub(crate) const XWEB_WORKLOAD: &str = include_str!("../data/xweb_workload.txt");

pub(crate) fn running_example() -> (WarehouseMeta, Workload) {
    let meta = generate_warehouse(0, 1).meta().clone();
    let wl = parse_workload(RUNNING_EXAMPLE, &meta).unwrap();
    (meta, wl)
}

pub(crate) fn running_schema() -> FragmentationSchema {
    let (meta, wl) = running_example();
    let groups = vec![
        vec![(PredicateId(1), Polarity::Positive)],
        vec![
            (PredicateId(2), Polarity::Positive),
            (PredicateId(3), Polarity::Positive),
            (PredicateId(4), Polarity::Positive),
        ],
    ];
    build_schema(&groups, Method::Km, &wl.predicates, &meta).unwrap()
}

/// Two customers (nation 13 and 20), facts t1, t2 on c1 and t3, t4 on c2.
pub(crate) fn toy_warehouse() -> Warehouse {
    let meta = WarehouseMeta {
        fact_id: "Sales".into(),
        fact_path: "facts_Sales.xml".into(),
        measures: vec![],
        dimensions: vec![DimensionMeta {
            id: "Customer".into(),
            path: "dimension_Customer.xml".into(),
            levels: vec![LevelMeta {
                id: "Customer".into(),
                attributes: vec![AttributeMeta {
                    name: "c_nation_key".into(),
                    value_type: ValueType::Numeric,
                }],
            }],
        }],
    };
    let inst = |id: &str, nation: f64| DimensionInstance {
        id: id.into(),
        level_id: "Customer".into(),
        attribute_values: [("c_nation_key".to_string(), Literal::numeric(nation))].into(),
        roll_up: None,
        drill_down: None,
    };
    let fact = |id: &str, c: &str| Fact {
        id: id.into(),
        measures: BTreeMap::new(),
        dim_refs: [("Customer".to_string(), c.to_string())].into(),
    };
    Warehouse::new(
        meta,
        vec![
            fact("t1", "c1"),
            fact("t2", "c1"),
            fact("t3", "c2"),
            fact("t4", "c2"),
        ],
        vec![vec![inst("c1", 13.0), inst("c2", 20.0)]],
    )
    .unwrap()
}

pub(crate) fn nation_eq(id: u32, v: f64) -> SelectionPredicate {
    SelectionPredicate {
        id: PredicateId(id),
        dimension: "Customer".into(),
        attribute: "c_nation_key".into(),
        comparator: Comparator::Eq,
        literal: Literal::numeric(v),
    }
}
