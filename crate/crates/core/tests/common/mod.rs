//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xfrag::bench::{evaluate_query, SourceView};
use xfrag::fragmenter::FragmentSet;
use xfrag::warehouse::Warehouse;
use xfrag::workload::{parse_workload, Workload};

pub const RUNNING_EXAMPLE: &str = include_str!("../../data/running_example.txt");
pub const XWEB_WORKLOAD: &str = include_str!("../../data/xweb_workload.txt");

const COMPARATORS: [&str; 6] = ["=", "!=", "<", "<=", ">", ">="];
const PART_TYPES: [&str; 6] = ["PBC", "ECO", "STD", "LRG", "MED", "PRO"];
const DAYS: [&str; 7] = ["Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun"];

fn clause(rng: &mut ChaCha8Rng) -> (&'static str, &'static str, String, String) {
    let cmp = |rng: &mut ChaCha8Rng| COMPARATORS.choose(rng).unwrap().to_string();
    match rng.gen_range(0..6) {
        0 => (
            "Customer",
            "c_nation_key",
            cmp(rng),
            rng.gen_range(0..25).to_string(),
        ),
        1 => (
            "Supplier",
            "s_nation_key",
            cmp(rng),
            rng.gen_range(0..25).to_string(),
        ),
        2 => (
            "Part",
            "p_size",
            cmp(rng),
            rng.gen_range(1..=50).to_string(),
        ),
        3 => (
            "Part",
            "p_type",
            ["=", "!="].choose(rng).unwrap().to_string(),
            PART_TYPES.choose(rng).unwrap().to_string(),
        ),
        4 => (
            "Date",
            "d_year",
            cmp(rng),
            rng.gen_range(1992..=1998).to_string(),
        ),
        _ => (
            "Date",
            "d_date_name",
            "=".into(),
            DAYS.choose(rng).unwrap().to_string(),
        ),
    }
}

/// A seeded workload in the text format: up to `max_queries` queries of up
/// to three selections each, with at most `max_predicates` distinct
/// predicates overall.
pub fn random_workload_text(seed: u64, max_queries: usize, max_predicates: usize) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_queries);
    let mut distinct = BTreeSet::new();
    let mut blocks = Vec::new();
    for _ in 0..n {
        let mut clauses = Vec::new();
        for _ in 0..rng.gen_range(0..=3) {
            let c = clause(&mut rng);
            if distinct.contains(&c) || distinct.len() < max_predicates {
                distinct.insert(c.clone());
                clauses.push(c);
            }
        }
        let dims: BTreeSet<&str> = clauses.iter().map(|c| c.0).collect();
        let var = |d: &str| format!("$v{}", dims.iter().position(|x| *x == d).unwrap());
        let mut s = String::from("for $x in //FactDoc/Fact");
        for d in &dims {
            s.push_str(&format!(
                ",\n    {} in //dimension[@dim-id=\"{d}\"]/Level/instance",
                var(d)
            ));
        }
        let mut conds: Vec<String> = clauses
            .iter()
            .map(|(d, a, c, v)| format!("{}/attribute[@id=\"{a}\"]/@value{c}\"{v}\"", var(d)))
            .collect();
        conds.extend(
            dims.iter()
                .map(|d| format!("$x/dimension[@dim-id=\"{d}\"]/@value-id={}/@id", var(d))),
        );
        if !conds.is_empty() {
            s.push_str("\nwhere ");
            s.push_str(&conds.join("\n  and "));
        }
        if rng.gen_bool(0.3) {
            s.push_str(&format!("\nreturn $x @freq={}", rng.gen_range(2..5)));
        } else {
            s.push_str("\nreturn $x");
        }
        blocks.push(s);
    }
    blocks.join("\n\n") + "\n"
}

pub fn random_workload(
    seed: u64,
    w: &Warehouse,
    max_queries: usize,
    max_predicates: usize,
) -> Workload {
    parse_workload(
        &random_workload_text(seed, max_queries, max_predicates),
        w.meta(),
    )
    .expect("generated workload parses")
}

/// Checks that fragments plus ELSE cover exactly the original facts.
pub fn reconstruction_error(set: &FragmentSet, w: &Warehouse) -> Option<String> {
    let mut seen = vec![false; w.fact_count()];
    for f in set.schema.fragments() {
        for &i in set.facts(f) {
            if i >= w.fact_count() {
                return Some(format!(
                    "fragment {} holds unknown fact {i}",
                    set.schema.fragment_id(f)
                ));
            }
            seen[i] = true;
        }
    }
    let missing: Vec<&str> = (0..w.fact_count())
        .filter(|&i| !seen[i])
        .map(|i| w.facts()[i].id.as_str())
        .collect();
    (!missing.is_empty()).then(|| format!("{} facts lost, first {}", missing.len(), missing[0]))
}

/// Checks every query's routed answer against the whole warehouse.
pub fn routing_error(set: &FragmentSet, w: &Warehouse, wl: &Workload) -> Option<String> {
    let whole = SourceView::whole(w);
    for q in &wl.queries {
        let expected = evaluate_query(q, &wl.predicates, &whole).unwrap().facts;
        let routed = xfrag::fragmenter::route_query(q, &set.schema).unwrap();
        let mut got: Vec<usize> = routed
            .iter()
            .flat_map(|&f| {
                evaluate_query(q, &wl.predicates, &SourceView::fragment(w, set, f))
                    .unwrap()
                    .facts
            })
            .collect();
        got.sort_unstable();
        got.dedup();
        if got != expected {
            return Some(format!(
                "{}: {} facts via {} fragments, {} expected",
                q.id,
                got.len(),
                routed.len(),
                expected.len()
            ));
        }
    }
    None
}

/// Checks that PC fragments are pairwise disjoint and cover every fact.
pub fn minterm_error(set: &FragmentSet, w: &Warehouse) -> Option<String> {
    let mut owner: Vec<Option<usize>> = vec![None; w.fact_count()];
    for (i, facts) in set.fact_fragments.iter().enumerate() {
        for &f in facts {
            if let Some(prev) = owner[f] {
                return Some(format!(
                    "fact {} in fragments {} and {}",
                    w.facts()[f].id,
                    prev + 1,
                    i + 1
                ));
            }
            owner[f] = Some(i);
        }
    }
    owner
        .iter()
        .position(Option::is_none)
        .map(|f| format!("fact {} in no minterm fragment", w.facts()[f].id))
}
