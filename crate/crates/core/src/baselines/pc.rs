use std::collections::BTreeMap;

use super::implication::{satisfiable, Polarity, SignedPredicate};
use crate::error::{Error, Result};
use crate::warehouse::WarehouseMeta;
use crate::workload::{PredicateId, PredicateTable, SelectionPredicate};

pub const DEFAULT_PC_CAP: usize = 20;

/// A conjunction giving every predicate of the set one polarity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Minterm {
    pub terms: BTreeMap<PredicateId, Polarity>,
}

impl Minterm {
    /// Terms resolved through `table`; ids missing from it are skipped.
    pub fn signed<'a>(&self, table: &'a PredicateTable) -> Vec<SignedPredicate<'a>> {
        self.terms
            .iter()
            .filter_map(|(id, &polarity)| {
                table.get(id).map(|predicate| SignedPredicate {
                    predicate,
                    polarity,
                })
            })
            .collect()
    }
}

/// All satisfiable minterms over `predicates`, in depth-first order with the
/// positive branch first and predicates taken by id.
///
/// Every value assignment satisfies exactly one returned minterm. An empty
/// predicate set yields the single empty minterm.
pub fn pc_fragments(
    predicates: &[SelectionPredicate],
    meta: &WarehouseMeta,
    cap: usize,
) -> Result<Vec<Minterm>> {
    if predicates.len() > cap {
        return Err(Error::PcCapExceeded {
            count: predicates.len(),
            cap,
        });
    }
    if let Some(p) = predicates.iter().find(|p| !p.resolves(meta)) {
        return Err(Error::UnknownPredicate(p.id));
    }
    let mut sorted: Vec<&SelectionPredicate> = predicates.iter().collect();
    sorted.sort_by_key(|p| p.id);
    sorted.dedup_by_key(|p| p.id);

    let mut out = Vec::new();
    let mut stack = Vec::with_capacity(sorted.len());
    extend(&sorted, &mut stack, &mut out);
    Ok(out)
}

fn extend<'a>(
    predicates: &[&'a SelectionPredicate],
    chosen: &mut Vec<SignedPredicate<'a>>,
    out: &mut Vec<Minterm>,
) {
    let Some((&next, rest)) = predicates.split_first() else {
        out.push(Minterm {
            terms: chosen
                .iter()
                .map(|t| (t.predicate.id, t.polarity))
                .collect(),
        });
        return;
    };
    for polarity in [Polarity::Positive, Polarity::Negated] {
        let term = SignedPredicate {
            predicate: next,
            polarity,
        };
        // only the new term's attribute can have become unsatisfiable
        let same_attribute: Vec<SignedPredicate<'a>> = chosen
            .iter()
            .copied()
            .filter(|t| {
                t.predicate.dimension == next.dimension && t.predicate.attribute == next.attribute
            })
            .chain([term])
            .collect();
        if satisfiable(&same_attribute) {
            chosen.push(term);
            extend(rest, chosen, out);
            chosen.pop();
        }
    }
}
