//! Group catalog: JSONL files with one group per line, given either as
//! explicit permutation generators or as a finite presentation (realized via
//! coset enumeration at load). A header line declares for which orders the
//! catalog is complete; completeness is metadata, never assumed.

use std::collections::BTreeSet;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::coset::{self, CosetError, GroupPresentation, DEFAULT_COSET_BOUND};
use crate::group::{FiniteGroup, GroupError, DEFAULT_ORDER_BOUND};
use crate::perm::Permutation;

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("cannot read catalog: {0}")]
    Io(#[from] std::io::Error),
    #[error("catalog line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("group {id} (order {order}) exceeds the order bound {bound}; rejected at load")]
    OrderBound { id: String, order: usize, bound: usize },
    #[error("group {id}: declared order {declared} but generators produce order {actual}")]
    OrderMismatch { id: String, declared: usize, actual: usize },
    #[error("group {id}: {source}")]
    BadGenerators { id: String, source: crate::perm::PermError },
    #[error("group {id}: {source}")]
    Group { id: String, source: GroupError },
    #[error("group {id}: {source}")]
    Coset { id: String, source: CosetError },
}

/// A loaded catalog group. `group` acts on `degree` points when the record
/// supplied explicit generators, or on |G| points (regular action from the
/// presentation) otherwise.
#[derive(Debug)]
pub struct CatalogGroup {
    pub id: String,
    pub name: String,
    pub order: usize,
    pub group: FiniteGroup,
    pub presentation: Option<GroupPresentation>,
}

#[derive(Debug)]
pub struct Catalog {
    /// Orders for which the catalog declares itself complete.
    pub complete_orders: BTreeSet<usize>,
    /// Groups sorted by (order, id).
    pub groups: Vec<CatalogGroup>,
}

impl Catalog {
    pub fn groups_of_order(&self, order: usize) -> impl Iterator<Item = &CatalogGroup> {
        self.groups.iter().filter(move |g| g.order == order)
    }

    /// Orders in 1..=max_order with no completeness declaration.
    pub fn incomplete_orders_up_to(&self, max_order: usize) -> Vec<usize> {
        (1..=max_order)
            .filter(|o| !self.complete_orders.contains(o))
            .collect()
    }
}

#[derive(Deserialize)]
struct RawRecord {
    // header fields
    complete_orders: Option<Vec<usize>>,
    #[allow(dead_code)]
    note: Option<String>,
    // group fields
    id: Option<String>,
    name: Option<String>,
    order: Option<usize>,
    degree: Option<usize>,
    gens: Option<Vec<Vec<u32>>>,
    presentation: Option<GroupPresentation>,
}

/// Load a catalog, rejecting any group whose order exceeds `order_bound`.
pub fn load_catalog(path: &Path, order_bound: usize) -> Result<Catalog, CatalogError> {
    let text = std::fs::read_to_string(path)?;
    let mut complete_orders = BTreeSet::new();
    let mut groups: Vec<CatalogGroup> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawRecord = serde_json::from_str(line).map_err(|e| CatalogError::Parse {
            line: line_no,
            msg: e.to_string(),
        })?;
        if let Some(orders) = raw.complete_orders {
            complete_orders.extend(orders);
            continue;
        }
        let missing = |field: &str| CatalogError::Parse {
            line: line_no,
            msg: format!("group record missing `{field}`"),
        };
        let id = raw.id.ok_or_else(|| missing("id"))?;
        let name = raw.name.ok_or_else(|| missing("name"))?;
        let declared = raw.order.ok_or_else(|| missing("order"))?;
        if declared > order_bound {
            return Err(CatalogError::OrderBound {
                id,
                order: declared,
                bound: order_bound,
            });
        }
        let (group, presentation) = match (raw.gens, raw.presentation) {
            (Some(gens), _) => {
                let degree = raw.degree.ok_or_else(|| missing("degree"))?;
                let perms = gens
                    .into_iter()
                    .map(|image| {
                        if image.len() != degree {
                            return Err(CatalogError::Parse {
                                line: line_no,
                                msg: format!("generator length != degree {degree}"),
                            });
                        }
                        Permutation::new(image).map_err(|source| CatalogError::BadGenerators {
                            id: id.clone(),
                            source,
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let g = FiniteGroup::from_generators(degree, perms, order_bound)
                    .map_err(|source| CatalogError::Group {
                        id: id.clone(),
                        source,
                    })?;
                (g, None)
            }
            (None, Some(p)) => {
                let g = coset::group_from_presentation(&p, DEFAULT_COSET_BOUND, order_bound)
                    .map_err(|source| CatalogError::Coset {
                        id: id.clone(),
                        source,
                    })?;
                (g, Some(p))
            }
            (None, None) => {
                return Err(CatalogError::Parse {
                    line: line_no,
                    msg: "group record needs `gens` or `presentation`".into(),
                })
            }
        };
        if group.order() != declared {
            return Err(CatalogError::OrderMismatch {
                id,
                declared,
                actual: group.order(),
            });
        }
        groups.push(CatalogGroup {
            id,
            name,
            order: declared,
            group,
            presentation,
        });
    }
    groups.sort_by(|a, b| (a.order, &a.id).cmp(&(b.order, &b.id)));
    Ok(Catalog {
        complete_orders,
        groups,
    })
}

/// Load with the default group-order bound.
pub fn load_default(path: &Path) -> Result<Catalog, CatalogError> {
    load_catalog(path, DEFAULT_ORDER_BOUND)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::PathBuf;

    pub fn bundled_path() -> PathBuf {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/groups.jsonl")
    }

    #[test]
    fn bundled_catalog_loads() {
        let cat = load_default(&bundled_path()).unwrap();
        assert_eq!(cat.groups.len(), 99);
        // 59 groups of order < 24, 15 of order 24
        assert_eq!(cat.groups.iter().filter(|g| g.order < 24).count(), 59);
        assert_eq!(cat.groups_of_order(24).count(), 15);
        // complete through order 30; larger orders are selected groups only
        assert_eq!(
            cat.complete_orders,
            (1..=30).collect::<BTreeSet<usize>>()
        );
        assert_eq!(cat.incomplete_orders_up_to(32), vec![31, 32]);
        assert!(cat.incomplete_orders_up_to(30).is_empty());
    }

    #[test]
    fn presentation_record_built_by_coset_enumeration() {
        let cat = load_default(&bundled_path()).unwrap();
        let g96 = cat.groups.iter().find(|g| g.id == "o96_1").unwrap();
        assert_eq!(g96.order, 96);
        assert!(g96.presentation.is_some());
        assert_eq!(g96.group.order(), 96);
    }

    #[test]
    fn element_lists_are_closed() {
        // composition of random element pairs stays in the element list
        // (mul uses index_of internally and would panic otherwise)
        let cat = load_default(&bundled_path()).unwrap();
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for g in &cat.groups {
            let n = g.group.order();
            for _ in 0..8 {
                let a = (next() % n as u64) as usize;
                let b = (next() % n as u64) as usize;
                assert!(g.group.mul(a, b) < n);
            }
        }
    }

    #[test]
    fn over_bound_rejected_with_diagnostic() {
        let dir = std::env::temp_dir().join("tav-catalog-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("toolarge.jsonl");
        std::fs::write(
            &path,
            r#"{"id": "big", "name": "Zbig", "order": 50000, "degree": 1, "gens": []}"#,
        )
        .unwrap();
        let err = load_default(&path).unwrap_err();
        assert!(matches!(err, CatalogError::OrderBound { order: 50000, .. }));
    }

    #[test]
    fn order_mismatch_rejected() {
        let dir = std::env::temp_dir().join("tav-catalog-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("mismatch.jsonl");
        std::fs::write(
            &path,
            r#"{"id": "bad", "name": "Z2", "order": 3, "degree": 2, "gens": [[1, 0]]}"#,
        )
        .unwrap();
        let err = load_default(&path).unwrap_err();
        assert!(matches!(
            err,
            CatalogError::OrderMismatch {
                declared: 3,
                actual: 2,
                ..
            }
        ));
    }
}
