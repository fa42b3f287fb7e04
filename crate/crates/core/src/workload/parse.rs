//! Parser for the restricted XQuery workload format.
//!
//! ```text
//! query     := "for" binding ("," binding)* ["where" clause ("and" clause)*]
//!              "return" VAR ["@freq=" INT]
//! binding   := VAR "in" path
//! path      := "//FactDoc/Fact" | "//dimension[@dim-id=" QSTR "]/Level/instance"
//! clause    := selection | join
//! selection := VAR "/attribute[@id=" QSTR "]/@value" CMP QSTR
//! join      := VAR "/dimension[@dim-id=" QSTR "]/@value-id" "=" VAR "/@id"
//! CMP       := "=" | "!=" | "<" | "<=" | ">" | ">="
//! ```
//!
//! Queries are separated by blank lines; lines starting with `#` are
//! comments. A selection's dimension is the one its variable is bound to. If
//! that dimension does not define the attribute, the attribute is looked up
//! in the other dimensions bound by the same query, and must be found in
//! exactly one of them. Join clauses are checked for a known dimension and a
//! bound variable only.

use std::collections::{BTreeSet, HashMap};

use super::{Comparator, PredicateId, QueryId, SelectionPredicate, Workload, WorkloadQuery};
use crate::error::{Error, Result};
use crate::warehouse::{Literal, WarehouseMeta};

const FACT_PATH: &str = "//FactDoc/Fact";

/// Parses a workload, assigning query ids `q1..` in document order and
/// predicate ids `p1..` in first-occurrence order.
pub fn parse_workload(text: &str, meta: &WarehouseMeta) -> Result<Workload> {
    let mut workload = Workload::default();
    let mut canonical: HashMap<(String, String, Comparator, Literal), PredicateId> = HashMap::new();

    for (i, block) in blocks(text).into_iter().enumerate() {
        let index = i + 1;
        let parsed = QueryParser {
            src: &block,
            pos: 0,
            query: index,
        }
        .parse()?;
        let resolved = resolve(&parsed, index, meta)?;

        let mut selections = BTreeSet::new();
        for (dimension, attribute, comparator, literal) in resolved.selections {
            let key = (dimension, attribute, comparator, literal);
            let next = PredicateId(canonical.len() as u32 + 1);
            let id = *canonical.entry(key.clone()).or_insert_with(|| {
                workload.predicates.insert(
                    next,
                    SelectionPredicate {
                        id: next,
                        dimension: key.0.clone(),
                        attribute: key.1.clone(),
                        comparator: key.2,
                        literal: key.3.clone(),
                    },
                );
                next
            });
            selections.insert(id);
        }
        workload.queries.push(WorkloadQuery {
            id: QueryId(index as u32),
            selections,
            joined_dimensions: resolved.joined,
            frequency: parsed.frequency,
            source_text: block,
        });
    }
    Ok(workload)
}

fn blocks(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut current: Vec<&str> = Vec::new();
    for line in text.lines() {
        let trimmed = line.trim();
        if trimmed.starts_with('#') {
            continue;
        }
        if trimmed.is_empty() {
            if !current.is_empty() {
                out.push(current.join("\n"));
                current.clear();
            }
        } else {
            current.push(line);
        }
    }
    if !current.is_empty() {
        out.push(current.join("\n"));
    }
    out
}

enum Path {
    Facts,
    Dimension(String),
}

enum Clause {
    Selection {
        var: String,
        attribute: String,
        comparator: Comparator,
        literal: String,
    },
    Join {
        fact_var: String,
        dimension: String,
        var: String,
    },
}

struct ParsedQuery {
    bindings: Vec<(String, Path)>,
    clauses: Vec<Clause>,
    return_var: String,
    frequency: u32,
}

struct QueryParser<'a> {
    src: &'a str,
    pos: usize,
    query: usize,
}

impl<'a> QueryParser<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn error(&self, message: impl Into<String>) -> Error {
        let rest = self.rest().trim_start();
        let clause: String = rest.lines().next().unwrap_or("").chars().take(60).collect();
        Error::WorkloadSyntax {
            query: self.query,
            clause: if clause.is_empty() {
                "<end of query>".into()
            } else {
                clause
            },
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        let rest = self.rest();
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn eat(&mut self, lit: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(lit) {
            self.pos += lit.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, lit: &str) -> Result<()> {
        if self.eat(lit) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{lit}`")))
        }
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        self.skip_ws();
        let rest = self.rest();
        let boundary = rest[kw.len().min(rest.len())..]
            .chars()
            .next()
            .is_none_or(|c| !is_ident(c));
        if rest.starts_with(kw) && boundary {
            self.pos += kw.len();
            true
        } else {
            false
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<()> {
        if self.eat_keyword(kw) {
            Ok(())
        } else {
            Err(self.error(format!("expected keyword `{kw}`")))
        }
    }

    fn var(&mut self) -> Result<String> {
        self.skip_ws();
        let rest = self.rest();
        let Some(body) = rest.strip_prefix('$') else {
            return Err(self.error("expected a variable"));
        };
        let len = body
            .chars()
            .take_while(|&c| is_ident(c))
            .map(char::len_utf8)
            .sum::<usize>();
        if len == 0 {
            return Err(self.error("empty variable name"));
        }
        self.pos += 1 + len;
        Ok(rest[..1 + len].to_string())
    }

    fn qstr(&mut self) -> Result<String> {
        self.skip_ws();
        let rest = self.rest();
        let Some(body) = rest.strip_prefix('"') else {
            return Err(self.error("expected a quoted string"));
        };
        let Some(end) = body.find('"') else {
            return Err(self.error("unterminated string"));
        };
        self.pos += end + 2;
        Ok(body[..end].to_string())
    }

    fn comparator(&mut self) -> Result<Comparator> {
        for sym in [">=", "<=", "!=", "=", "<", ">"] {
            if self.eat(sym) {
                return Ok(Comparator::from_symbol(sym).expect("known symbol"));
            }
        }
        Err(self.error("expected a comparator"))
    }

    fn path(&mut self) -> Result<Path> {
        self.skip_ws();
        if self.rest().starts_with(FACT_PATH) {
            self.pos += FACT_PATH.len();
            if self.rest().chars().next().is_some_and(is_ident) {
                return Err(self.error("unknown path"));
            }
            return Ok(Path::Facts);
        }
        if self.eat("//dimension[@dim-id=") {
            let dim = self.qstr()?;
            self.expect("]/Level/instance")?;
            return Ok(Path::Dimension(dim));
        }
        Err(self.error("expected `//FactDoc/Fact` or `//dimension[@dim-id=...]/Level/instance`"))
    }

    fn clause(&mut self) -> Result<Clause> {
        let var = self.var()?;
        if self.eat("/attribute[@id=") {
            let attribute = self.qstr()?;
            self.expect("]/@value")?;
            let comparator = self.comparator()?;
            let literal = self.qstr()?;
            Ok(Clause::Selection {
                var,
                attribute,
                comparator,
                literal,
            })
        } else if self.eat("/dimension[@dim-id=") {
            let dimension = self.qstr()?;
            self.expect("]/@value-id")?;
            self.expect("=")?;
            let target = self.var()?;
            self.expect("/@id")?;
            Ok(Clause::Join {
                fact_var: var,
                dimension,
                var: target,
            })
        } else {
            Err(self.error("expected a selection or join clause"))
        }
    }

    fn parse(mut self) -> Result<ParsedQuery> {
        self.expect_keyword("for")?;
        let mut bindings = Vec::new();
        loop {
            let var = self.var()?;
            self.expect_keyword("in")?;
            let path = self.path()?;
            bindings.push((var, path));
            if !self.eat(",") {
                break;
            }
        }
        let mut clauses = Vec::new();
        if self.eat_keyword("where") {
            clauses.push(self.clause()?);
            while self.eat_keyword("and") {
                clauses.push(self.clause()?);
            }
        }
        self.expect_keyword("return")?;
        let return_var = self.var()?;
        let mut frequency = 1;
        if self.eat("@freq=") {
            let rest = self.rest();
            let len = rest.chars().take_while(char::is_ascii_digit).count();
            frequency = rest[..len]
                .parse()
                .map_err(|_| self.error("expected an integer frequency"))?;
            self.pos += len;
        }
        self.skip_ws();
        if !self.rest().is_empty() {
            return Err(self.error("unexpected trailing input"));
        }
        Ok(ParsedQuery {
            bindings,
            clauses,
            return_var,
            frequency,
        })
    }
}

fn is_ident(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-'
}

struct Resolved {
    selections: Vec<(String, String, Comparator, Literal)>,
    joined: BTreeSet<String>,
}

fn resolve(q: &ParsedQuery, index: usize, meta: &WarehouseMeta) -> Result<Resolved> {
    let semantic = |message: String| Error::WorkloadSemantic {
        query: index,
        message,
    };

    let mut fact_var = None;
    let mut bound: HashMap<&str, &str> = HashMap::new();
    let mut joined = BTreeSet::new();
    for (var, path) in &q.bindings {
        match path {
            Path::Facts => {
                if fact_var.replace(var.as_str()).is_some() {
                    return Err(semantic("more than one `//FactDoc/Fact` binding".into()));
                }
            }
            Path::Dimension(d) => {
                if meta.dimension(d).is_none() {
                    return Err(semantic(format!("unknown dimension `{d}`")));
                }
                joined.insert(d.clone());
                if bound.insert(var, d).is_some() {
                    return Err(semantic(format!("variable `{var}` bound twice")));
                }
            }
        }
    }
    let fact_var = fact_var.ok_or_else(|| semantic("missing `//FactDoc/Fact` binding".into()))?;
    if q.return_var != fact_var {
        return Err(semantic(format!(
            "query must return the fact variable `{fact_var}`"
        )));
    }

    let mut selections = Vec::new();
    for clause in &q.clauses {
        match clause {
            Clause::Selection {
                var,
                attribute,
                comparator,
                literal,
            } => {
                let Some(&dim) = bound.get(var.as_str()) else {
                    return Err(semantic(format!(
                        "variable `{var}` is not bound to a dimension"
                    )));
                };
                let dimension = if meta.attribute(dim, attribute).is_some() {
                    dim.to_string()
                } else {
                    let mut candidates: Vec<&str> = bound
                        .values()
                        .copied()
                        .filter(|d| meta.attribute(d, attribute).is_some())
                        .collect();
                    candidates.sort_unstable();
                    candidates.dedup();
                    match candidates.as_slice() {
                        [only] => only.to_string(),
                        [] => {
                            return Err(semantic(format!(
                                "attribute `{attribute}` is not defined on dimension `{dim}`"
                            )))
                        }
                        _ => {
                            return Err(semantic(format!(
                                "attribute `{attribute}` is ambiguous among {}",
                                candidates.join(", ")
                            )))
                        }
                    }
                };
                let am = meta
                    .attribute(&dimension, attribute)
                    .expect("resolved above");
                let value = Literal::parse(literal, am.value_type).ok_or_else(|| {
                    semantic(format!(
                        "literal \"{literal}\" is not a valid {} value for `{attribute}`",
                        am.value_type
                    ))
                })?;
                joined.insert(dimension.clone());
                selections.push((dimension, attribute.clone(), *comparator, value));
            }
            Clause::Join {
                fact_var: fv,
                dimension,
                var,
            } => {
                if fv != fact_var {
                    return Err(semantic(format!("join must start from `{fact_var}`")));
                }
                if meta.dimension(dimension).is_none() {
                    return Err(semantic(format!("unknown dimension `{dimension}`")));
                }
                if !bound.contains_key(var.as_str()) {
                    return Err(semantic(format!("join variable `{var}` is not bound")));
                }
                joined.insert(dimension.clone());
            }
        }
    }
    Ok(Resolved { selections, joined })
}
