mod common;

use proptest::prelude::*;
use xfrag::bench::{run_benchmark, BenchmarkReport};
use xfrag::fragmenter::{
    materialize, plan_schema, route_query, write_fragments, FragmentOptions, Method,
};
use xfrag::warehouse::{generate_warehouse, load_warehouse, save_warehouse};
use xfrag::workload::parse_workload;

use common::{
    minterm_error, random_workload, random_workload_text, reconstruction_error, routing_error,
    XWEB_WORKLOAD,
};

#[test]
fn warehouse_round_trips_through_disk() {
    let w = generate_warehouse(250, 17);
    let dir = tempfile::tempdir().unwrap();
    save_warehouse(&w, dir.path()).unwrap();
    assert_eq!(load_warehouse(dir.path()).unwrap(), w);
}

#[test]
fn random_workloads_reparse_from_canonical_text() {
    let meta = generate_warehouse(0, 1).meta().clone();
    for seed in 0..30 {
        let wl = parse_workload(&random_workload_text(seed, 8, 12), &meta).unwrap();
        let again = parse_workload(&wl.to_text(), &meta).unwrap();
        assert_eq!(again.predicates, wl.predicates);
        assert_eq!(again.qp_matrix(), wl.qp_matrix());
    }
}

#[test]
fn shipped_benchmark_orders_methods() {
    let w = generate_warehouse(1000, 42);
    let wl = parse_workload(XWEB_WORKLOAD, w.meta()).unwrap();
    let reports = run_benchmark(&w, &wl, &Method::ALL, &FragmentOptions::default(), None).unwrap();
    let count = |m: Method| {
        reports
            .iter()
            .find(|r| r.method == m)
            .unwrap()
            .fragment_count
    };
    assert!(count(Method::Pc) >= count(Method::Ab));
    assert!(count(Method::Ab) >= count(Method::Km));
    assert_eq!(count(Method::Km), 9);
    assert!(reports.iter().all(|r| r.results_match_nf));
    let again = run_benchmark(&w, &wl, &Method::ALL, &FragmentOptions::default(), None).unwrap();
    let strip = |rs: &[BenchmarkReport]| {
        rs.iter()
            .map(BenchmarkReport::without_timings)
            .collect::<Vec<_>>()
    };
    assert_eq!(strip(&reports), strip(&again));
}

#[test]
fn fragment_directories_reassemble_the_warehouse() {
    let w = generate_warehouse(400, 3);
    let wl = parse_workload(XWEB_WORKLOAD, w.meta()).unwrap();
    for method in [Method::Km, Method::Ab, Method::Pc] {
        let schema = plan_schema(&wl, w.meta(), method, &FragmentOptions::default()).unwrap();
        let set = materialize(&schema, &w);
        let dir = tempfile::tempdir().unwrap();
        write_fragments(&set, &w, dir.path()).unwrap();
        let mut ids: Vec<String> = Vec::new();
        for f in schema.fragments() {
            let part = load_warehouse(&dir.path().join(schema.fragment_id(f))).unwrap();
            ids.extend(part.facts().iter().map(|f| f.id.clone()));
        }
        ids.sort();
        ids.dedup();
        let mut all: Vec<String> = w.facts().iter().map(|f| f.id.clone()).collect();
        all.sort();
        assert_eq!(ids, all, "{method}");
    }
}

#[test]
fn selection_free_queries_read_everything() {
    let w = generate_warehouse(50, 2);
    let text = "for $x in //FactDoc/Fact\nreturn $x\n\n".to_string() + XWEB_WORKLOAD;
    let wl = parse_workload(&text, w.meta()).unwrap();
    let schema = plan_schema(&wl, w.meta(), Method::Km, &FragmentOptions::default()).unwrap();
    assert_eq!(
        route_query(&wl.queries[0], &schema).unwrap(),
        schema.fragments()
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fragmentation_invariants(
        facts in 0usize..600,
        seed in any::<u64>(),
        wl_seed in any::<u64>(),
        k in 1usize..10,
        method in prop::sample::select(vec![Method::Nf, Method::Km, Method::Ab, Method::Pc]),
    ) {
        let w = generate_warehouse(facts, seed);
        let wl = random_workload(wl_seed, &w, 8, 10);
        let opts = FragmentOptions { k, seed, ..Default::default() };
        let schema = plan_schema(&wl, w.meta(), method, &opts).unwrap();
        if method == Method::Km && !wl.predicates.is_empty() {
            let distinct = {
                let m = wl.qp_matrix();
                let mut cols: Vec<Vec<bool>> = (0..m.predicates().len()).map(|j| m.column::<f64>(j).iter().map(|&x| x > 0.0).collect()).collect();
                cols.sort();
                cols.dedup();
                cols.len()
            };
            prop_assert_eq!(schema.fragment_count(), k.min(distinct) + 1);
        }
        let set = materialize(&schema, &w);
        prop_assert_eq!(reconstruction_error(&set, &w), None);
        prop_assert_eq!(routing_error(&set, &w, &wl), None);
        if method == Method::Pc {
            prop_assert_eq!(minterm_error(&set, &w), None);
        }
    }
}
