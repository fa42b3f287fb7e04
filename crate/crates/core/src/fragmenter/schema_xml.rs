//! `frag-schema.xml`: `Schema > fragment(@id) > dimension(@name) >
//! predicate(@name)`, followed by a `predicate-table` element carrying the
//! predicate bodies so the document stands on its own.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use roxmltree::Node;

use super::{DimensionPredicates, FragmentSpec, FragmentationSchema, Method};
use crate::baselines::Polarity;
use crate::error::{Error, Result};
use crate::warehouse::{Literal, ValueType};
use crate::workload::{Comparator, PredicateId, PredicateTable, SelectionPredicate};
use crate::xml::{attr, elements, error_at, escape, expect_name, parse, DECLARATION};

pub fn frag_schema_xml(schema: &FragmentationSchema) -> String {
    let mut s = String::from(DECLARATION);
    let _ = writeln!(
        s,
        "<Schema method=\"{}\" has-else=\"{}\">",
        schema.method, schema.has_else
    );
    for spec in &schema.specs {
        if spec.per_dimension.is_empty() {
            let _ = writeln!(s, "  <fragment id=\"{}\"/>", escape(&spec.id));
            continue;
        }
        let _ = writeln!(s, "  <fragment id=\"{}\">", escape(&spec.id));
        for dp in &spec.per_dimension {
            let _ = writeln!(s, "    <dimension name=\"{}\">", escape(&dp.dimension));
            for (p, polarity) in &dp.predicates {
                match polarity {
                    Polarity::Positive => {
                        let _ = writeln!(s, "      <predicate name=\"{p}\"/>");
                    }
                    Polarity::Negated => {
                        let _ = writeln!(s, "      <predicate name=\"{p}\" polarity=\"negated\"/>");
                    }
                }
            }
            s.push_str("    </dimension>\n");
        }
        s.push_str("  </fragment>\n");
    }
    s.push_str("  <predicate-table>\n");
    for p in schema.predicate_table.values() {
        let _ = writeln!(
            s,
            "    <predicate name=\"{}\" dimension=\"{}\" attribute=\"{}\" comparator=\"{}\" value=\"{}\" type=\"{}\"/>",
            p.id,
            escape(&p.dimension),
            escape(&p.attribute),
            escape(p.comparator.symbol()),
            escape(&p.literal.to_string()),
            p.literal.value_type()
        );
    }
    s.push_str("  </predicate-table>\n</Schema>\n");
    s
}

pub fn emit_frag_schema_xml(schema: &FragmentationSchema, out: &Path) -> Result<()> {
    crate::warehouse::write_file(out, &frag_schema_xml(schema))
}

pub fn load_frag_schema(path: &Path) -> Result<FragmentationSchema> {
    let text = fs::read_to_string(path).map_err(|source| Error::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_frag_schema(path, &text)
}

/// Parses a `frag-schema.xml` document; `file` only labels errors.
pub fn parse_frag_schema(file: &Path, text: &str) -> Result<FragmentationSchema> {
    let doc = parse(file, text)?;
    let root = doc.root_element();
    expect_name(file, root, "Schema")?;
    let method: Method = attr(file, root, "method")?
        .parse()
        .map_err(|e: String| error_at(file, root, e))?;
    let has_else = match attr(file, root, "has-else")? {
        "true" => true,
        "false" => false,
        other => return Err(error_at(file, root, format!("invalid has-else `{other}`"))),
    };

    let mut specs = Vec::new();
    let mut predicate_table = PredicateTable::new();
    for child in elements(root) {
        match child.tag_name().name() {
            "fragment" => specs.push(parse_fragment(file, child)?),
            "predicate-table" => {
                for p in elements(child) {
                    expect_name(file, p, "predicate")?;
                    let pred = parse_predicate_body(file, p)?;
                    if predicate_table.insert(pred.id, pred).is_some() {
                        return Err(error_at(file, p, "duplicate predicate"));
                    }
                }
            }
            other => {
                return Err(error_at(
                    file,
                    child,
                    format!("unexpected element `{other}`"),
                ))
            }
        }
    }
    Ok(FragmentationSchema {
        method,
        specs,
        has_else,
        predicate_table,
    })
}

fn predicate_id(file: &Path, node: Node<'_, '_>) -> Result<PredicateId> {
    attr(file, node, "name")?
        .parse()
        .map_err(|e: String| error_at(file, node, e))
}

fn parse_fragment(file: &Path, node: Node<'_, '_>) -> Result<FragmentSpec> {
    let id = attr(file, node, "id")?.to_string();
    let mut per_dimension = Vec::new();
    for d in elements(node) {
        expect_name(file, d, "dimension")?;
        let mut predicates = Vec::new();
        for p in elements(d) {
            expect_name(file, p, "predicate")?;
            let polarity = match p.attribute("polarity") {
                None => Polarity::Positive,
                Some(raw) => raw.parse().map_err(|e: String| error_at(file, p, e))?,
            };
            predicates.push((predicate_id(file, p)?, polarity));
        }
        per_dimension.push(DimensionPredicates {
            dimension: attr(file, d, "name")?.to_string(),
            predicates,
        });
    }
    Ok(FragmentSpec { id, per_dimension })
}

fn parse_predicate_body(file: &Path, node: Node<'_, '_>) -> Result<SelectionPredicate> {
    let raw_cmp = attr(file, node, "comparator")?;
    let comparator = Comparator::from_symbol(raw_cmp)
        .ok_or_else(|| error_at(file, node, format!("unknown comparator `{raw_cmp}`")))?;
    let raw_ty = attr(file, node, "type")?;
    let ty = ValueType::parse(raw_ty)
        .ok_or_else(|| error_at(file, node, format!("unknown type `{raw_ty}`")))?;
    let raw = attr(file, node, "value")?;
    let literal = Literal::parse(raw, ty)
        .ok_or_else(|| error_at(file, node, format!("`{raw}` is not a valid {ty} value")))?;
    Ok(SelectionPredicate {
        id: predicate_id(file, node)?,
        dimension: attr(file, node, "dimension")?.to_string(),
        attribute: attr(file, node, "attribute")?.to_string(),
        comparator,
        literal,
    })
}
