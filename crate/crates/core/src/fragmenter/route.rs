use super::{FragmentRef, FragmentSpec, FragmentationSchema};
use crate::baselines::{satisfiable, SignedPredicate};
use crate::error::{Error, Result};
use crate::workload::{SelectionPredicate, WorkloadQuery};

/// Fragments that must be read to answer `q`; its selections are looked up
/// in the schema's predicate table.
pub fn route_query(q: &WorkloadQuery, schema: &FragmentationSchema) -> Result<Vec<FragmentRef>> {
    let preds = q
        .selections
        .iter()
        .map(|id| {
            schema
                .predicate_table
                .get(id)
                .ok_or(Error::UnknownPredicate(*id))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(route_predicates(&preds, schema))
}

/// Routes a conjunction of selections.
///
/// If the selections imply some fragment's definition, every matching fact
/// lies in that fragment and it is returned alone (the first such one).
/// Otherwise all fragments not provably disjoint from the selections are
/// returned, together with ELSE when the schema has one.
pub fn route_predicates(
    preds: &[&SelectionPredicate],
    schema: &FragmentationSchema,
) -> Vec<FragmentRef> {
    let query: Vec<SignedPredicate<'_>> =
        preds.iter().map(|p| SignedPredicate::positive(p)).collect();
    let implies = |t: SignedPredicate<'_>| {
        let mut terms = query.clone();
        terms.push(t.negate());
        !satisfiable(&terms)
    };
    let compatible = |ts: &[SignedPredicate<'_>]| {
        let mut terms = query.clone();
        terms.extend_from_slice(ts);
        satisfiable(&terms)
    };

    let signed = |spec: &FragmentSpec| -> Vec<Vec<SignedPredicate<'_>>> {
        spec.per_dimension
            .iter()
            .map(|dp| {
                dp.predicates
                    .iter()
                    .filter_map(|&(id, polarity)| {
                        schema
                            .predicate_table
                            .get(&id)
                            .map(|predicate| SignedPredicate {
                                predicate,
                                polarity,
                            })
                    })
                    .collect()
            })
            .collect()
    };

    for (i, spec) in schema.specs.iter().enumerate() {
        let dims = signed(spec);
        let covered = if schema.conjunctive() {
            dims.iter().flatten().all(|&t| implies(t))
        } else {
            dims.iter().all(|alts| alts.iter().any(|&t| implies(t)))
        };
        if covered {
            return vec![FragmentRef::Spec(i)];
        }
    }

    let mut out = Vec::new();
    for (i, spec) in schema.specs.iter().enumerate() {
        let dims = signed(spec);
        let possible = if schema.conjunctive() {
            compatible(&dims.concat())
        } else {
            dims.iter()
                .all(|alts| alts.iter().any(|&t| compatible(&[t])))
        };
        if possible {
            out.push(FragmentRef::Spec(i));
        }
    }
    if schema.has_else {
        out.push(FragmentRef::Else);
    }
    out
}
