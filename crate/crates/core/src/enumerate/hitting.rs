use crate::error::{Error, Result};
use crate::features::{canonical_cmp, FeatureSet};

/// All subset-minimal hitting sets of `sets` within `universe`, as a
/// duplicate-free antichain in canonical order (size, then ids).
///
/// Branch and bound: pick the first set not yet hit, branch on each of its
/// elements, and prune any partial set that already contains a known
/// solution. An empty collection has the single hitting set ∅.
pub fn minimal_hitting_sets(sets: &[FeatureSet], universe: FeatureSet) -> Result<Vec<FeatureSet>> {
    if sets.iter().any(|s| s.is_empty()) {
        return Err(Error::EmptySet);
    }
    if let Some(s) = sets.iter().find(|s| !s.is_subset(universe)) {
        return Err(Error::Config(format!("set {s} is not contained in the universe {universe}")));
    }
    // Sets that are supersets of another set are implied.
    let mut reduced: Vec<FeatureSet> = Vec::new();
    for &s in sets {
        if !sets.iter().any(|&t| t != s && t.is_subset(s)) && !reduced.contains(&s) {
            reduced.push(s);
        }
    }
    reduced.sort_by(canonical_cmp);

    let mut found = Vec::new();
    search(&reduced, FeatureSet::EMPTY, &mut found);
    found.sort_by(canonical_cmp);
    Ok(found)
}

fn search(sets: &[FeatureSet], partial: FeatureSet, found: &mut Vec<FeatureSet>) {
    if found.iter().any(|h| h.is_subset(partial)) {
        return;
    }
    match sets.iter().find(|s| !s.intersects(partial)) {
        None => {
            if is_minimal(sets, partial) {
                found.retain(|h| !partial.is_subset(*h));
                found.push(partial);
            }
        }
        Some(&unhit) => {
            for e in unhit.iter() {
                search(sets, partial.with(e), found);
            }
        }
    }
}

/// Every element must be the only witness for some set.
fn is_minimal(sets: &[FeatureSet], hitting: FeatureSet) -> bool {
    hitting.iter().all(|e| sets.iter().any(|s| s.intersection(hitting) == FeatureSet::singleton(e)))
}
