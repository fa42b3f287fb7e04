use std::fmt::Write as _;

use super::{FragmentSpec, FragmentationSchema, ELSE_ID};
use crate::baselines::Polarity;
use crate::warehouse::WarehouseMeta;

/// Renders the fragmentation as an XQuery script of element constructors:
/// per fragment, each filtered dimension is selected first, then facts are
/// derived by joining to the new dimension documents.
pub fn fragments_xq(schema: &FragmentationSchema, meta: &WarehouseMeta) -> String {
    let mut s = format!(
        "(: {} fragmentation, {} fragments :)\n",
        schema.method,
        schema.fragment_count()
    );
    for spec in &schema.specs {
        let _ = writeln!(s, "\n(: fragment {} :)", spec.id);
        fragment(&mut s, spec, schema, meta);
    }
    if schema.has_else {
        let _ = writeln!(
            s,
            "\n(: fragment {ELSE_ID}: facts outside every other fragment :)"
        );
        s.push_str("element FactDoc {\n");
        let _ = writeln!(
            s,
            "for $x in document(\"{}\")//FactDoc/fact",
            meta.fact_path
        );
        if !schema.specs.is_empty() {
            let others: Vec<String> = schema
                .specs
                .iter()
                .map(|f| {
                    format!(
                        "document(\"{}\")//fact/@id",
                        fragment_path(&meta.fact_path, &f.id)
                    )
                })
                .collect();
            let _ = writeln!(s, "where not($x/@id = ({}))", others.join(", "));
        }
        s.push_str("return $x\n}\n");
    }
    s
}

fn fragment_path(path: &str, fragment: &str) -> String {
    format!("{fragment}/{path}")
}

fn fragment(
    s: &mut String,
    spec: &FragmentSpec,
    schema: &FragmentationSchema,
    meta: &WarehouseMeta,
) {
    let joiner = if schema.conjunctive() {
        " and "
    } else {
        " or "
    };
    for dp in &spec.per_dimension {
        let Some(dm) = meta.dimension(&dp.dimension) else {
            continue;
        };
        let conditions: Vec<String> = dp
            .predicates
            .iter()
            .filter_map(|&(id, polarity)| {
                let p = schema.predicate_table.get(&id)?;
                let c = format!(
                    "$x/attribute[@id=\"{}\"]/@value{}\"{}\"",
                    p.attribute, p.comparator, p.literal
                );
                Some(match polarity {
                    Polarity::Positive => c,
                    Polarity::Negated => format!("not({c})"),
                })
            })
            .collect();
        let _ = writeln!(s, "element dimension {{ attribute dim-id {{{}}},", dm.id);
        for level in &dm.levels {
            let _ = writeln!(s, "element Level {{ attribute id {{{}}},", level.id);
            let _ = writeln!(
                s,
                "for $x in document(\"{}\")//Level[@id=\"{}\"]/instance",
                dm.path, level.id
            );
            let _ = writeln!(s, "where {}", conditions.join(joiner));
            s.push_str("return $x }\n");
        }
        s.push_str("}\n");
    }

    s.push_str("element FactDoc {\n");
    let _ = write!(
        s,
        "for $x in document(\"{}\")//FactDoc/fact",
        meta.fact_path
    );
    let vars: Vec<(String, &str)> = spec
        .per_dimension
        .iter()
        .enumerate()
        .filter_map(|(i, dp)| {
            let dm = meta.dimension(&dp.dimension)?;
            let _ = write!(
                s,
                ",\n    $d{} in document(\"{}\")//instance",
                i + 1,
                fragment_path(&dm.path, &spec.id)
            );
            Some((format!("$d{}", i + 1), dm.id.as_str()))
        })
        .collect();
    s.push('\n');
    for (i, (var, dim)) in vars.iter().enumerate() {
        let _ = writeln!(
            s,
            "{} $x/dimension[@dim-id=\"{dim}\"]/@value-id={var}/@id",
            if i == 0 { "where" } else { "and" }
        );
    }
    s.push_str("return $x\n}\n");
}
