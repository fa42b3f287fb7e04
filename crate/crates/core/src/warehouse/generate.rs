//! Deterministic synthetic Sales warehouse at benchmark scale.
//!
//! Only `c_nation_key`, `p_type` and `d_date_name` are exercised by the
//! reference workload; the remaining attributes are invented so that each
//! dimension looks like a plausible retail dimension. All values are drawn
//! uniformly.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    AttributeMeta, DimensionInstance, DimensionMeta, Fact, LevelMeta, Literal, MeasureMeta,
    ValueType, Warehouse, WarehouseMeta,
};

/// Instance counts of the generated dimensions.
pub const DIMENSION_CARDINALITIES: [(&str, usize); 4] = [
    ("Customer", 1000),
    ("Supplier", 1000),
    ("Part", 1000),
    ("Date", 500),
];

const MKT_SEGMENTS: [&str; 5] = [
    "AUTOMOBILE",
    "BUILDING",
    "FURNITURE",
    "HOUSEHOLD",
    "MACHINERY",
];
const PART_TYPES: [&str; 6] = ["PBC", "ECO", "STD", "LRG", "MED", "PRO"];
const WEEKDAYS: [&str; 7] = ["Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun"];

fn numeric(name: &str) -> AttributeMeta {
    AttributeMeta {
        name: name.into(),
        value_type: ValueType::Numeric,
    }
}

fn text(name: &str) -> AttributeMeta {
    AttributeMeta {
        name: name.into(),
        value_type: ValueType::Text,
    }
}

fn sales_meta() -> WarehouseMeta {
    let dim = |id: &str, attributes: Vec<AttributeMeta>| DimensionMeta {
        id: id.into(),
        path: format!("dimension_{id}.xml"),
        levels: vec![LevelMeta {
            id: id.into(),
            attributes,
        }],
    };
    WarehouseMeta {
        fact_id: "Sales".into(),
        fact_path: "facts_Sales.xml".into(),
        measures: vec![
            MeasureMeta {
                id: "Quantity".into(),
                value_type: ValueType::Numeric,
            },
            MeasureMeta {
                id: "Amount".into(),
                value_type: ValueType::Numeric,
            },
        ],
        dimensions: vec![
            dim(
                "Customer",
                vec![
                    text("c_name"),
                    numeric("c_nation_key"),
                    text("c_mktsegment"),
                    numeric("c_acctbal"),
                ],
            ),
            dim(
                "Supplier",
                vec![
                    text("s_name"),
                    numeric("s_nation_key"),
                    numeric("s_acctbal"),
                ],
            ),
            dim(
                "Part",
                vec![
                    text("p_name"),
                    text("p_type"),
                    numeric("p_size"),
                    text("p_brand"),
                ],
            ),
            dim(
                "Date",
                vec![text("d_date_name"), numeric("d_month"), numeric("d_year")],
            ),
        ],
    }
}

fn money(rng: &mut ChaCha8Rng, max_cents: i64) -> Literal {
    Literal::numeric(rng.gen_range(0..=max_cents) as f64 / 100.0)
}

fn pick(rng: &mut ChaCha8Rng, values: &[&str]) -> Literal {
    Literal::text(*values.choose(rng).expect("nonempty domain"))
}

/// Generates a Sales warehouse with `n_facts` facts. Output is a pure
/// function of `(n_facts, seed)`.
pub fn generate_warehouse(n_facts: usize, seed: u64) -> Warehouse {
    let meta = sales_meta();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut dimensions = Vec::with_capacity(4);
    for (dm, &(_, count)) in meta.dimensions.iter().zip(DIMENSION_CARDINALITIES.iter()) {
        let prefix = dm.id[..1].to_lowercase();
        let mut instances = Vec::with_capacity(count);
        for i in 1..=count {
            let mut values = BTreeMap::new();
            let mut set = |k: &str, v: Literal| {
                values.insert(k.to_string(), v);
            };
            match dm.id.as_str() {
                "Customer" => {
                    set("c_name", Literal::text(format!("Customer#{i:06}")));
                    set(
                        "c_nation_key",
                        Literal::numeric(rng.gen_range(0..=24) as f64),
                    );
                    set("c_mktsegment", pick(&mut rng, &MKT_SEGMENTS));
                    set("c_acctbal", money(&mut rng, 999_999));
                }
                "Supplier" => {
                    set("s_name", Literal::text(format!("Supplier#{i:06}")));
                    set(
                        "s_nation_key",
                        Literal::numeric(rng.gen_range(0..=24) as f64),
                    );
                    set("s_acctbal", money(&mut rng, 999_999));
                }
                "Part" => {
                    set("p_name", Literal::text(format!("Part#{i:06}")));
                    set("p_type", pick(&mut rng, &PART_TYPES));
                    set("p_size", Literal::numeric(rng.gen_range(1..=50) as f64));
                    let brand = format!("Brand#{}{}", rng.gen_range(1..=5), rng.gen_range(1..=5));
                    set("p_brand", Literal::text(brand));
                }
                _ => {
                    set("d_date_name", pick(&mut rng, &WEEKDAYS));
                    set("d_month", Literal::numeric(rng.gen_range(1..=12) as f64));
                    set(
                        "d_year",
                        Literal::numeric(rng.gen_range(1992..=1998) as f64),
                    );
                }
            }
            instances.push(DimensionInstance {
                id: format!("{prefix}{i}"),
                level_id: dm.levels[0].id.clone(),
                attribute_values: values,
                roll_up: None,
                drill_down: None,
            });
        }
        dimensions.push(instances);
    }

    let mut facts = Vec::with_capacity(n_facts);
    for i in 1..=n_facts {
        let mut dim_refs = BTreeMap::new();
        for (dm, instances) in meta.dimensions.iter().zip(&dimensions) {
            let target = &instances[rng.gen_range(0..instances.len())];
            dim_refs.insert(dm.id.clone(), target.id.clone());
        }
        let quantity = rng.gen_range(1..=50);
        let unit_cents: i64 = rng.gen_range(100..=10_000);
        let mut measures = BTreeMap::new();
        measures.insert("Quantity".to_string(), quantity as f64);
        measures.insert("Amount".to_string(), (quantity * unit_cents) as f64 / 100.0);
        facts.push(Fact {
            id: format!("t{i}"),
            measures,
            dim_refs,
        });
    }

    Warehouse::new(meta, facts, dimensions).expect("generated warehouse is valid")
}
