//! Query evaluation, the deterministic cost model and the comparative
//! benchmark over fragmentation methods.
//!
//! The cost of a query on a source is `scanned_instances + scanned_facts +
//! join_probes`. Fragments are assumed to be evaluated in parallel, so a
//! query's parallel cost is the largest cost among the fragments it is
//! routed to; its sequential cost is their sum.

mod eval;

use std::fmt::Write as _;
use std::path::Path;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fragmenter::{materialize, plan_schema, route_query, FragmentOptions, Method};
use crate::warehouse::{write_file, Warehouse};
use crate::workload::{QueryId, Workload};

pub use eval::{evaluate_query, evaluate_selections, QueryResult, SourceView};

pub const CSV_HEADER: &str =
    "method,k,n_facts,fragment_count,parallel_cost,sequential_cost,frag_time_ms";
pub const REPORTS_CSV: &str = "reports.csv";
pub const SWEEP_CSV: &str = "sweep.csv";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QueryCost {
    pub query: QueryId,
    pub fragments: Vec<String>,
    pub max_fragment_cost: u64,
    pub union_cost: u64,
    pub result_size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchmarkReport {
    pub method: Method,
    pub k: Option<usize>,
    pub n_facts: usize,
    pub fragment_count: usize,
    pub per_query: Vec<QueryCost>,
    pub workload_parallel_cost: u64,
    pub workload_sequential_cost: u64,
    /// Facts stored in more than one fragment.
    pub overlap: usize,
    pub qp_density: f64,
    pub selection_free_queries: usize,
    /// Whether every query's answer over its fragments equals the answer
    /// over the whole warehouse.
    pub results_match_nf: bool,
    /// Set when the method could not run, e.g. too many predicates for PC.
    pub skipped: Option<String>,
    pub workload_wall_clock_ms: f64,
    pub fragmentation_time_ms: f64,
}

impl BenchmarkReport {
    pub fn file_name(&self) -> String {
        match self.k {
            Some(k) => format!("report_{}_k{k}_{}.json", self.method, self.n_facts),
            None => format!("report_{}_{}.json", self.method, self.n_facts),
        }
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{:.3}",
            self.method,
            self.k.map(|k| k.to_string()).unwrap_or_default(),
            self.n_facts,
            self.fragment_count,
            self.workload_parallel_cost,
            self.workload_sequential_cost,
            self.fragmentation_time_ms
        )
    }

    /// The report with wall-clock fields zeroed, for comparing runs.
    pub fn without_timings(&self) -> BenchmarkReport {
        BenchmarkReport {
            workload_wall_clock_ms: 0.0,
            fragmentation_time_ms: 0.0,
            ..self.clone()
        }
    }
}

fn millis(d: Duration) -> f64 {
    d.as_secs_f64() * 1000.0
}

/// Fragments `w` with `method`, routes and evaluates every workload query,
/// and checks each answer against the unfragmented warehouse.
pub fn benchmark_method(
    w: &Warehouse,
    workload: &Workload,
    method: Method,
    opts: &FragmentOptions,
) -> Result<BenchmarkReport> {
    let whole = SourceView::whole(w);
    let reference: Vec<QueryResult> = workload
        .queries
        .par_iter()
        .map(|q| evaluate_query(q, &workload.predicates, &whole))
        .collect::<Result<_>>()?;

    let mut report = BenchmarkReport {
        method,
        k: (method == Method::Km).then_some(opts.k),
        n_facts: w.fact_count(),
        fragment_count: 0,
        per_query: Vec::new(),
        workload_parallel_cost: 0,
        workload_sequential_cost: 0,
        overlap: 0,
        qp_density: workload.qp_matrix().density(),
        selection_free_queries: workload.selection_free_count(),
        results_match_nf: true,
        skipped: None,
        workload_wall_clock_ms: 0.0,
        fragmentation_time_ms: 0.0,
    };

    let start = Instant::now();
    let schema = match plan_schema(workload, w.meta(), method, opts) {
        Ok(s) => s,
        Err(e @ Error::PcCapExceeded { .. }) => {
            report.skipped = Some(e.to_string());
            report.results_match_nf = false;
            return Ok(report);
        }
        Err(e) => return Err(e),
    };
    let set = materialize(&schema, w);
    report.fragmentation_time_ms = millis(start.elapsed());
    report.fragment_count = schema.fragment_count();
    report.overlap = set.overlap();

    let start = Instant::now();
    for (q, expected) in workload.queries.iter().zip(&reference) {
        let routed = route_query(q, &schema)?;
        let results: Vec<QueryResult> = routed
            .par_iter()
            .map(|&f| evaluate_query(q, &workload.predicates, &SourceView::fragment(w, &set, f)))
            .collect::<Result<_>>()?;
        let mut union: Vec<usize> = results
            .iter()
            .flat_map(|r| r.facts.iter().copied())
            .collect();
        union.sort_unstable();
        union.dedup();
        report.results_match_nf &= union == expected.facts;

        let cost = QueryCost {
            query: q.id,
            fragments: routed
                .iter()
                .map(|&f| schema.fragment_id(f).to_string())
                .collect(),
            max_fragment_cost: results.iter().map(QueryResult::cost).max().unwrap_or(0),
            union_cost: results.iter().map(QueryResult::cost).sum(),
            result_size: union.len(),
        };
        report.workload_parallel_cost += cost.max_fragment_cost;
        report.workload_sequential_cost += cost.union_cost;
        report.per_query.push(cost);
    }
    report.workload_wall_clock_ms = millis(start.elapsed());
    Ok(report)
}

/// Benchmarks each method in turn. With `out`, writes one JSON report per
/// method and a `reports.csv` table there.
pub fn run_benchmark(
    w: &Warehouse,
    workload: &Workload,
    methods: &[Method],
    opts: &FragmentOptions,
    out: Option<&Path>,
) -> Result<Vec<BenchmarkReport>> {
    let reports = methods
        .iter()
        .map(|&m| benchmark_method(w, workload, m, opts))
        .collect::<Result<Vec<_>>>()?;
    if let Some(out) = out {
        write_reports(&reports, out, REPORTS_CSV)?;
    }
    Ok(reports)
}

/// One KM report per entry of `k_values`; `k = 1` is reported as NF (a
/// single fragment and no ELSE). With `out`, writes the JSON reports and a
/// `sweep.csv` table.
pub fn sweep_k(
    w: &Warehouse,
    workload: &Workload,
    k_values: &[usize],
    opts: &FragmentOptions,
    out: Option<&Path>,
) -> Result<Vec<BenchmarkReport>> {
    if k_values.is_empty() {
        return Err(Error::Clustering("no cluster counts to sweep".into()));
    }
    let mut reports = Vec::with_capacity(k_values.len());
    for &k in k_values {
        if k == 0 {
            return Err(Error::Clustering("k must be at least 1".into()));
        }
        let km = FragmentOptions { k, ..*opts };
        let mut r = if k == 1 {
            benchmark_method(w, workload, Method::Nf, &km)?
        } else {
            benchmark_method(w, workload, Method::Km, &km)?
        };
        r.k = Some(k);
        reports.push(r);
    }
    if let Some(out) = out {
        write_reports(&reports, out, SWEEP_CSV)?;
    }
    Ok(reports)
}

pub fn csv_table(reports: &[BenchmarkReport]) -> String {
    let mut s = format!("{CSV_HEADER}\n");
    for r in reports {
        let _ = writeln!(s, "{}", r.csv_row());
    }
    s
}

fn write_reports(reports: &[BenchmarkReport], out: &Path, table: &str) -> Result<()> {
    for r in reports {
        let json = serde_json::to_string_pretty(r)?;
        write_file(&out.join(r.file_name()), &(json + "\n"))?;
    }
    write_file(&out.join(table), &csv_table(reports))
}
