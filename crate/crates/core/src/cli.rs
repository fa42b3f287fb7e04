//! Command-line front end.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::bench::{csv_table, run_benchmark, sweep_k, BenchmarkReport};
use crate::error::{Error, Result};
use crate::fragmenter::{
    load_frag_schema, materialize, plan_schema, route_query, write_fragments, FragmentOptions,
    FragmentationSchema, Method,
};
use crate::warehouse::{generate_warehouse, load_warehouse, save_warehouse, write_file, Warehouse};
use crate::workload::{parse_workload, Workload};

/// The shipped 10-query benchmark workload, used when `--workload` is absent.
pub const DEFAULT_WORKLOAD: &str = include_str!("../data/xweb_workload.txt");

#[derive(Debug, Parser)]
#[command(
    name = "xfrag",
    version,
    about = "Workload-driven fragmentation of XML data warehouses"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a benchmark warehouse directory.
    Generate {
        #[arg(long, default_value_t = 3000)]
        facts: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fragment a warehouse and write frag-schema.xml, fragments.xq and one
    /// directory per fragment.
    Fragment {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value = "km", value_parser = parse_method)]
        method: Method,
        #[command(flatten)]
        tuning: Tuning,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the fragments each workload query is routed to.
    Route {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value = "km", value_parser = parse_method)]
        method: Method,
        /// Route against an existing frag-schema.xml instead of planning one.
        #[arg(long)]
        schema: Option<PathBuf>,
        #[command(flatten)]
        tuning: Tuning,
        /// Also write the routing table to DIR/routes.csv.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare fragmentation methods on the workload.
    Bench {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value = "nf,pc,ab,km", value_delimiter = ',', value_parser = parse_method)]
        methods: Vec<Method>,
        #[command(flatten)]
        tuning: Tuning,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run K-means fragmentation over a range of cluster counts.
    Sweep {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value = "1,2,4,6,8,12,16", value_delimiter = ',', value_parser = clap::value_parser!(u64).range(1..))]
        k_values: Vec<u64>,
        #[command(flatten)]
        tuning: Tuning,
        #[arg(long)]
        out: PathBuf,
    },
    /// Summarize a warehouse, a workload and optionally a fragmentation.
    Inspect {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        schema: Option<PathBuf>,
    },
}

/// Where the warehouse and workload come from.
#[derive(Debug, Args)]
pub struct Source {
    /// Warehouse directory to read.
    #[arg(long, conflicts_with = "facts")]
    pub warehouse: Option<PathBuf>,
    /// Generate an in-memory warehouse with this many facts instead.
    #[arg(long)]
    pub facts: Option<usize>,
    /// Workload file; defaults to the shipped benchmark workload.
    #[arg(long)]
    pub workload: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Tuning {
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..))]
    pub k: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_iters: u64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub ab_threshold: u64,
    #[arg(long, default_value_t = 20)]
    pub pc_cap: usize,
}

impl Tuning {
    fn options(&self) -> FragmentOptions {
        FragmentOptions {
            k: self.k as usize,
            max_iters: self.max_iters as usize,
            seed: self.seed,
            ab_threshold: self.ab_threshold,
            pc_cap: self.pc_cap,
        }
    }
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.trim().parse()
}

impl Source {
    fn load(&self, seed: u64) -> Result<(Warehouse, Workload)> {
        let w = match (&self.warehouse, self.facts) {
            (Some(dir), _) => load_warehouse(dir)?,
            (None, Some(n)) => generate_warehouse(n, seed),
            (None, None) => {
                return Err(Error::Metadata(
                    "either --warehouse or --facts is required".into(),
                ))
            }
        };
        let text = match &self.workload {
            Some(path) => std::fs::read_to_string(path).map_err(|source| Error::Read {
                path: path.clone(),
                source,
            })?,
            None => DEFAULT_WORKLOAD.to_string(),
        };
        let wl = parse_workload(&text, w.meta())?;
        Ok((w, wl))
    }
}

/// Runs one command, writing human-readable output to `stdout`.
pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<()> {
    let mut text = String::new();
    match cli.command {
        Command::Generate { facts, seed, out } => {
            let w = generate_warehouse(facts, seed);
            save_warehouse(&w, &out)?;
            let _ = writeln!(text, "wrote {} facts to {}", w.fact_count(), out.display());
        }
        Command::Fragment {
            source,
            method,
            tuning,
            out,
        } => {
            let (w, wl) = source.load(tuning.seed)?;
            let schema = plan_schema(&wl, w.meta(), method, &tuning.options())?;
            let set = materialize(&schema, &w);
            write_fragments(&set, &w, &out)?;
            let _ = writeln!(
                text,
                "{method}: {} fragments written to {}",
                schema.fragment_count(),
                out.display()
            );
            for f in schema.fragments() {
                let _ = writeln!(
                    text,
                    "  {:<5} {} facts",
                    schema.fragment_id(f),
                    set.facts(f).len()
                );
            }
        }
        Command::Route {
            source,
            method,
            schema,
            tuning,
            out,
        } => {
            let (w, wl) = source.load(tuning.seed)?;
            let schema = match schema {
                Some(path) => {
                    let s = load_frag_schema(&path)?;
                    s.validate(w.meta())?;
                    s
                }
                None => plan_schema(&wl, w.meta(), method, &tuning.options())?,
            };
            let table = routing_table(&wl, &schema)?;
            text.push_str(&table);
            if let Some(out) = out {
                write_file(&out.join("routes.csv"), &table)?;
            }
        }
        Command::Bench {
            source,
            methods,
            tuning,
            out,
        } => {
            let (w, wl) = source.load(tuning.seed)?;
            let reports = run_benchmark(&w, &wl, &methods, &tuning.options(), Some(&out))?;
            text.push_str(&summary(&reports));
        }
        Command::Sweep {
            source,
            k_values,
            tuning,
            out,
        } => {
            let (w, wl) = source.load(tuning.seed)?;
            let ks: Vec<usize> = k_values.iter().map(|&k| k as usize).collect();
            let reports = sweep_k(&w, &wl, &ks, &tuning.options(), Some(&out))?;
            text.push_str(&summary(&reports));
            if let Some(best) = reports
                .iter()
                .filter(|r| r.skipped.is_none())
                .min_by_key(|r| r.workload_parallel_cost)
            {
                let _ = writeln!(
                    text,
                    "lowest parallel cost {} at k={}",
                    best.workload_parallel_cost,
                    best.k.unwrap_or(1)
                );
            }
        }
        Command::Inspect { source, schema } => {
            let (w, wl) = source.load(42)?;
            text.push_str(&inspect(&w, &wl, schema.as_deref())?);
        }
    }
    stdout
        .write_all(text.as_bytes())
        .map_err(|source| Error::Write {
            path: PathBuf::from("<stdout>"),
            source,
        })
}

fn routing_table(wl: &Workload, schema: &FragmentationSchema) -> Result<String> {
    let mut s = String::from("query,fragments\n");
    for q in &wl.queries {
        let routed = route_query(q, schema)?;
        let ids: Vec<&str> = routed.iter().map(|&f| schema.fragment_id(f)).collect();
        let _ = writeln!(s, "{},{}", q.id, ids.join(" "));
    }
    Ok(s)
}

fn summary(reports: &[BenchmarkReport]) -> String {
    let mut s = csv_table(reports);
    for r in reports {
        if let Some(reason) = &r.skipped {
            let _ = writeln!(s, "# {} skipped: {reason}", r.method);
        } else if !r.results_match_nf {
            let _ = writeln!(s, "# {}: fragment answers differ from NF", r.method);
        }
    }
    s
}

fn inspect(w: &Warehouse, wl: &Workload, schema: Option<&Path>) -> Result<String> {
    let mut s = String::new();
    let meta = w.meta();
    let _ = writeln!(
        s,
        "fact document {}: {} facts",
        meta.fact_id,
        w.fact_count()
    );
    for (d, dm) in meta.dimensions.iter().enumerate() {
        let _ = writeln!(
            s,
            "dimension {}: {} instances",
            dm.id,
            w.dimension_instances(d).len()
        );
    }
    let _ = writeln!(
        s,
        "workload: {} queries, {} predicates, {} without selections",
        wl.queries.len(),
        wl.predicates.len(),
        wl.selection_free_count()
    );
    for p in wl.predicates.values() {
        let _ = writeln!(s, "  {p}");
    }
    if let Some(path) = schema {
        let schema = load_frag_schema(path)?;
        schema.validate(meta)?;
        let set = materialize(&schema, w);
        let _ = writeln!(
            s,
            "{} schema: {} fragments",
            schema.method,
            schema.fragment_count()
        );
        for f in schema.fragments() {
            let _ = writeln!(
                s,
                "  {:<5} {} facts",
                schema.fragment_id(f),
                set.facts(f).len()
            );
        }
    }
    Ok(s)
}
