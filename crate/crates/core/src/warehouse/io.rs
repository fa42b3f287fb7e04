//! On-disk XML formats: `dw-model.xml`, the facts document and the
//! dimension documents.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use roxmltree::Node;

use super::{
    AttributeMeta, DimensionInstance, DimensionMeta, Fact, LevelMeta, Literal, MeasureMeta,
    ValueType, Warehouse, WarehouseMeta,
};
use crate::error::{Error, Result};
use crate::xml::{attr, elements, error_at, escape, expect_name, parse, DECLARATION};

pub const MODEL_FILE: &str = "dw-model.xml";

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Read {
        path: path.to_path_buf(),
        source,
    })
}

pub(crate) fn write(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|source| Error::Write {
            path: parent.to_path_buf(),
            source,
        })?;
    }
    fs::write(path, contents).map_err(|source| Error::Write {
        path: path.to_path_buf(),
        source,
    })
}

/// Loads and validates the warehouse rooted at `root`.
pub fn load_warehouse(root: &Path) -> Result<Warehouse> {
    let model_path = root.join(MODEL_FILE);
    let text = read(&model_path)?;
    let (meta, fact_dims) = parse_model(&model_path, &text)?;

    let facts_path = root.join(&meta.fact_path);
    let facts = parse_facts(&facts_path, &read(&facts_path)?, &meta)?;

    let mut dimensions = Vec::with_capacity(meta.dimensions.len());
    for dm in &meta.dimensions {
        let path = root.join(&dm.path);
        dimensions.push(parse_dimension(&path, &read(&path)?, dm)?);
    }

    let declared: HashSet<&str> = meta.dimensions.iter().map(|d| d.id.as_str()).collect();
    let referenced: HashSet<&str> = fact_dims.iter().map(String::as_str).collect();
    if declared != referenced {
        return Err(Error::Metadata(format!(
            "{}: FactDoc must reference every dimension exactly once",
            model_path.display()
        )));
    }
    Warehouse::new(meta, facts, dimensions)
}

fn parse_model(file: &Path, text: &str) -> Result<(WarehouseMeta, Vec<String>)> {
    let doc = parse(file, text)?;
    let root = doc.root_element();
    expect_name(file, root, "DW-model")?;

    let mut dimensions = Vec::new();
    let mut fact: Option<(String, String, Vec<MeasureMeta>, Vec<String>)> = None;
    for node in elements(root) {
        match node.tag_name().name() {
            "dimension" => dimensions.push(parse_dimension_meta(file, node)?),
            "FactDoc" => {
                if fact.is_some() {
                    return Err(error_at(file, node, "only one FactDoc is supported"));
                }
                let mut measures = Vec::new();
                let mut refs = Vec::new();
                for child in elements(node) {
                    match child.tag_name().name() {
                        "measure" => {
                            let ty = attr(file, child, "type")?;
                            let value_type = ValueType::parse(ty).ok_or_else(|| {
                                error_at(file, child, format!("unknown type `{ty}`"))
                            })?;
                            measures.push(MeasureMeta {
                                id: attr(file, child, "id")?.to_string(),
                                value_type,
                            });
                        }
                        "dimension" => refs.push(attr(file, child, "idref")?.to_string()),
                        other => {
                            return Err(error_at(
                                file,
                                child,
                                format!("unexpected element `{other}`"),
                            ))
                        }
                    }
                }
                fact = Some((
                    attr(file, node, "id")?.to_string(),
                    attr(file, node, "path")?.to_string(),
                    measures,
                    refs,
                ));
            }
            other => {
                return Err(error_at(
                    file,
                    node,
                    format!("unexpected element `{other}`"),
                ))
            }
        }
    }
    let (fact_id, fact_path, measures, refs) =
        fact.ok_or_else(|| error_at(file, root, "missing FactDoc element"))?;
    Ok((
        WarehouseMeta {
            fact_id,
            fact_path,
            measures,
            dimensions,
        },
        refs,
    ))
}

fn parse_dimension_meta(file: &Path, node: Node<'_, '_>) -> Result<DimensionMeta> {
    let mut levels = Vec::new();
    for level in elements(node) {
        expect_name(file, level, "Level")?;
        let mut attributes = Vec::new();
        for a in elements(level) {
            expect_name(file, a, "attribute")?;
            let ty = attr(file, a, "type")?;
            let value_type = ValueType::parse(ty)
                .ok_or_else(|| error_at(file, a, format!("unknown type `{ty}`")))?;
            attributes.push(AttributeMeta {
                name: attr(file, a, "name")?.to_string(),
                value_type,
            });
        }
        levels.push(LevelMeta {
            id: attr(file, level, "id")?.to_string(),
            attributes,
        });
    }
    Ok(DimensionMeta {
        id: attr(file, node, "id")?.to_string(),
        path: attr(file, node, "path")?.to_string(),
        levels,
    })
}

fn parse_facts(file: &Path, text: &str, meta: &WarehouseMeta) -> Result<Vec<Fact>> {
    let doc = parse(file, text)?;
    let root = doc.root_element();
    expect_name(file, root, "FactDoc")?;
    let id = attr(file, root, "id")?;
    if id != meta.fact_id {
        return Err(error_at(
            file,
            root,
            format!(
                "facts document `{id}` does not match FactDoc `{}`",
                meta.fact_id
            ),
        ));
    }
    let mut facts = Vec::new();
    for node in elements(root) {
        expect_name(file, node, "fact")?;
        let mut measures = BTreeMap::new();
        let mut dim_refs = BTreeMap::new();
        for child in elements(node) {
            match child.tag_name().name() {
                "measure" => {
                    let raw = attr(file, child, "value")?;
                    let value = Literal::parse(raw, ValueType::Numeric)
                        .and_then(|l| l.as_f64())
                        .ok_or_else(|| {
                            error_at(file, child, format!("measure value `{raw}` is not numeric"))
                        })?;
                    measures.insert(attr(file, child, "id")?.to_string(), value);
                }
                "dimension" => {
                    let dim = attr(file, child, "dim-id")?.to_string();
                    let value = attr(file, child, "value-id")?.to_string();
                    if dim_refs.insert(dim, value).is_some() {
                        return Err(error_at(file, child, "dimension referenced twice"));
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
        facts.push(Fact {
            id: attr(file, node, "id")?.to_string(),
            measures,
            dim_refs,
        });
    }
    Ok(facts)
}

fn parse_dimension(file: &Path, text: &str, dm: &DimensionMeta) -> Result<Vec<DimensionInstance>> {
    let doc = parse(file, text)?;
    let root = doc.root_element();
    expect_name(file, root, "dimension")?;
    let id = attr(file, root, "dim-id")?;
    if id != dm.id {
        return Err(error_at(
            file,
            root,
            format!("dimension document `{id}` does not match `{}`", dm.id),
        ));
    }
    let mut instances = Vec::new();
    for level in elements(root) {
        expect_name(file, level, "Level")?;
        let level_id = attr(file, level, "id")?;
        let lm = dm
            .level(level_id)
            .ok_or_else(|| error_at(file, level, format!("unknown level `{level_id}`")))?;
        for node in elements(level) {
            expect_name(file, node, "instance")?;
            let mut values = BTreeMap::new();
            for a in elements(node) {
                expect_name(file, a, "attribute")?;
                let name = attr(file, a, "id")?;
                let raw = attr(file, a, "value")?;
                let am = lm
                    .attributes
                    .iter()
                    .find(|x| x.name == name)
                    .ok_or_else(|| error_at(file, a, format!("unknown attribute `{name}`")))?;
                let value = Literal::parse(raw, am.value_type).ok_or_else(|| {
                    error_at(
                        file,
                        a,
                        format!("`{raw}` is not a valid {} value", am.value_type),
                    )
                })?;
                values.insert(name.to_string(), value);
            }
            instances.push(DimensionInstance {
                id: attr(file, node, "id")?.to_string(),
                level_id: level_id.to_string(),
                attribute_values: values,
                roll_up: node.attribute("Roll-Up").map(str::to_string),
                drill_down: node.attribute("Drill-Down").map(str::to_string),
            });
        }
    }
    Ok(instances)
}

/// Writes `dw-model.xml`, the facts document and every dimension document
/// under `root`.
pub fn save_warehouse(w: &Warehouse, root: &Path) -> Result<()> {
    let meta = w.meta();
    write(&root.join(MODEL_FILE), &model_xml(meta))?;
    write(&root.join(&meta.fact_path), &facts_xml(w))?;
    for (d, dm) in meta.dimensions.iter().enumerate() {
        write(
            &root.join(&dm.path),
            &dimension_xml(dm, w.dimension_instances(d)),
        )?;
    }
    Ok(())
}

pub(crate) fn model_xml(meta: &WarehouseMeta) -> String {
    let mut s = String::from(DECLARATION);
    s.push_str("<DW-model>\n");
    for dm in &meta.dimensions {
        let _ = writeln!(
            s,
            "  <dimension id=\"{}\" path=\"{}\">",
            escape(&dm.id),
            escape(&dm.path)
        );
        for l in &dm.levels {
            let _ = writeln!(s, "    <Level id=\"{}\">", escape(&l.id));
            for a in &l.attributes {
                let _ = writeln!(
                    s,
                    "      <attribute name=\"{}\" type=\"{}\"/>",
                    escape(&a.name),
                    a.value_type
                );
            }
            s.push_str("    </Level>\n");
        }
        s.push_str("  </dimension>\n");
    }
    let _ = writeln!(
        s,
        "  <FactDoc id=\"{}\" path=\"{}\">",
        escape(&meta.fact_id),
        escape(&meta.fact_path)
    );
    for m in &meta.measures {
        let _ = writeln!(
            s,
            "    <measure id=\"{}\" type=\"{}\"/>",
            escape(&m.id),
            m.value_type
        );
    }
    for dm in &meta.dimensions {
        let _ = writeln!(s, "    <dimension idref=\"{}\"/>", escape(&dm.id));
    }
    s.push_str("  </FactDoc>\n</DW-model>\n");
    s
}

fn facts_xml(w: &Warehouse) -> String {
    let meta = w.meta();
    let mut s = String::with_capacity(64 + w.fact_count() * 300);
    s.push_str(DECLARATION);
    let _ = writeln!(s, "<FactDoc id=\"{}\">", escape(&meta.fact_id));
    for fact in w.facts() {
        let _ = writeln!(s, "  <fact id=\"{}\">", escape(&fact.id));
        for m in &meta.measures {
            if let Some(v) = fact.measures.get(&m.id) {
                let _ = writeln!(s, "    <measure id=\"{}\" value=\"{v}\"/>", escape(&m.id));
            }
        }
        for dm in &meta.dimensions {
            let _ = writeln!(
                s,
                "    <dimension dim-id=\"{}\" value-id=\"{}\"/>",
                escape(&dm.id),
                escape(&fact.dim_refs[&dm.id])
            );
        }
        s.push_str("  </fact>\n");
    }
    s.push_str("</FactDoc>\n");
    s
}

fn dimension_xml(dm: &DimensionMeta, instances: &[DimensionInstance]) -> String {
    let mut s = String::with_capacity(64 + instances.len() * 250);
    s.push_str(DECLARATION);
    let _ = writeln!(s, "<dimension dim-id=\"{}\">", escape(&dm.id));
    for level in &dm.levels {
        let _ = writeln!(s, "  <Level id=\"{}\">", escape(&level.id));
        for inst in instances.iter().filter(|i| i.level_id == level.id) {
            let _ = write!(s, "    <instance id=\"{}\"", escape(&inst.id));
            if let Some(r) = &inst.roll_up {
                let _ = write!(s, " Roll-Up=\"{}\"", escape(r));
            }
            if let Some(r) = &inst.drill_down {
                let _ = write!(s, " Drill-Down=\"{}\"", escape(r));
            }
            s.push_str(">\n");
            for a in &level.attributes {
                if let Some(v) = inst.attribute_values.get(&a.name) {
                    let _ = writeln!(
                        s,
                        "      <attribute id=\"{}\" value=\"{}\"/>",
                        escape(&a.name),
                        escape(&v.to_string())
                    );
                }
            }
            s.push_str("    </instance>\n");
        }
        s.push_str("  </Level>\n");
    }
    s.push_str("</dimension>\n");
    s
}
