use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::warehouse::{DimensionInstance, Literal};
use crate::workload::{Comparator, SelectionPredicate};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarity {
    Positive,
    Negated,
}

impl Polarity {
    pub fn as_str(self) -> &'static str {
        match self {
            Polarity::Positive => "positive",
            Polarity::Negated => "negated",
        }
    }

    pub fn flip(self) -> Polarity {
        match self {
            Polarity::Positive => Polarity::Negated,
            Polarity::Negated => Polarity::Positive,
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Polarity {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "positive" => Ok(Polarity::Positive),
            "negated" => Ok(Polarity::Negated),
            _ => Err(format!("invalid polarity `{s}`")),
        }
    }
}

/// A predicate or its negation.
///
/// A negated predicate holds exactly where the predicate does not, which
/// includes instances lacking the attribute altogether. Where the attribute
/// is present this coincides with the predicate under the negated
/// comparator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SignedPredicate<'a> {
    pub predicate: &'a SelectionPredicate,
    pub polarity: Polarity,
}

impl<'a> SignedPredicate<'a> {
    pub fn positive(predicate: &'a SelectionPredicate) -> Self {
        SignedPredicate {
            predicate,
            polarity: Polarity::Positive,
        }
    }

    pub fn negated(predicate: &'a SelectionPredicate) -> Self {
        SignedPredicate {
            predicate,
            polarity: Polarity::Negated,
        }
    }

    pub fn negate(self) -> Self {
        SignedPredicate {
            predicate: self.predicate,
            polarity: self.polarity.flip(),
        }
    }

    /// Comparator to apply to a present value.
    pub fn comparator(self) -> Comparator {
        match self.polarity {
            Polarity::Positive => self.predicate.comparator,
            Polarity::Negated => self.predicate.comparator.negate(),
        }
    }

    pub fn matches(self, instance: &DimensionInstance) -> bool {
        self.predicate.matches(instance) == (self.polarity == Polarity::Positive)
    }

    /// Evaluation on an attribute value, `None` standing for an absent one.
    pub fn matches_value(self, value: Option<&Literal>) -> bool {
        value.is_some_and(|v| self.predicate.matches_value(v))
            == (self.polarity == Polarity::Positive)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Implication {
    /// Every value satisfying the first also satisfies the second.
    Implies,
    /// No value satisfies both.
    Contradicts,
    Independent,
}

/// Relationship between two signed predicates. Predicates on different
/// (dimension, attribute) pairs are always independent.
pub fn predicate_implication(a: SignedPredicate<'_>, b: SignedPredicate<'_>) -> Implication {
    if !satisfiable(&[a, b.negate()]) {
        Implication::Implies
    } else if !satisfiable(&[a, b]) {
        Implication::Contradicts
    } else {
        Implication::Independent
    }
}

/// Whether some assignment of attribute values satisfies every term.
///
/// Attributes are independent of each other. Per attribute, the values are
/// treated as a dense total order (reals for numeric attributes), so an
/// open interval is never empty; for text this may report satisfiable for a
/// conjunction no string meets, which only errs towards keeping fragments.
/// An attribute constrained by negated terms only is satisfiable by an
/// instance that lacks it.
pub fn satisfiable(terms: &[SignedPredicate<'_>]) -> bool {
    let mut groups: BTreeMap<(&str, &str), Vec<SignedPredicate<'_>>> = BTreeMap::new();
    for t in terms {
        groups
            .entry((&t.predicate.dimension, &t.predicate.attribute))
            .or_default()
            .push(*t);
    }
    groups.values().all(|g| attribute_satisfiable(g))
}

struct Bound<'a> {
    value: &'a Literal,
    inclusive: bool,
}

fn attribute_satisfiable(terms: &[SignedPredicate<'_>]) -> bool {
    if terms.iter().all(|t| t.polarity == Polarity::Negated) {
        return true;
    }
    let mut lo: Option<Bound<'_>> = None;
    let mut hi: Option<Bound<'_>> = None;
    let mut eq: Option<&Literal> = None;
    let mut ne: Vec<&Literal> = Vec::new();
    for t in terms {
        let v = &t.predicate.literal;
        match t.comparator() {
            Comparator::Eq => match eq {
                Some(e) if e != v => return false,
                _ => eq = Some(v),
            },
            Comparator::Ne => ne.push(v),
            Comparator::Gt | Comparator::Ge => {
                let inclusive = t.comparator() == Comparator::Ge;
                let tighter = lo
                    .as_ref()
                    .is_none_or(|b| v > b.value || (v == b.value && !inclusive));
                if tighter {
                    lo = Some(Bound {
                        value: v,
                        inclusive,
                    });
                }
            }
            Comparator::Lt | Comparator::Le => {
                let inclusive = t.comparator() == Comparator::Le;
                let tighter = hi
                    .as_ref()
                    .is_none_or(|b| v < b.value || (v == b.value && !inclusive));
                if tighter {
                    hi = Some(Bound {
                        value: v,
                        inclusive,
                    });
                }
            }
        }
    }

    let above = |x: &Literal| {
        lo.as_ref()
            .is_none_or(|b| x > b.value || (b.inclusive && x == b.value))
    };
    let below = |x: &Literal| {
        hi.as_ref()
            .is_none_or(|b| x < b.value || (b.inclusive && x == b.value))
    };
    if let Some(x) = eq {
        return above(x) && below(x) && !ne.contains(&x);
    }
    match (&lo, &hi) {
        (Some(l), Some(h)) if l.value == h.value => {
            l.inclusive && h.inclusive && !ne.contains(&l.value)
        }
        (Some(l), Some(h)) => l.value < h.value,
        _ => true,
    }
}
