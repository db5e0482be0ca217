//! Stratified fold assignment.

use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// Partitions `0..labels.len()` into `folds` disjoint test sets, stratified
/// so each fold receives either `⌊n_c/folds⌋` or `⌈n_c/folds⌉` members of
/// every class `c`. Every class must have at least `folds` members.
pub fn stratified_folds(labels: &[String], folds: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if folds < 2 {
        return Err(Error::domain("need at least 2 folds"));
    }
    if labels.len() < folds {
        return Err(Error::domain("fewer rows than folds"));
    }
    // Group indices by label, groups ordered by label for determinism.
    let mut groups: Vec<(&String, Vec<usize>)> = Vec::new();
    for (i, label) in labels.iter().enumerate() {
        match groups.iter_mut().find(|(l, _)| *l == label) {
            Some((_, idxs)) => idxs.push(i),
            None => groups.push((label, alloc::vec![i])),
        }
    }
    groups.sort_by(|a, b| a.0.cmp(b.0));
    for (label, idxs) in &groups {
        if idxs.len() < folds {
            return Err(Error::domain(alloc::format!(
                "class '{label}' has {} members, fewer than {folds} folds",
                idxs.len()
            )));
        }
    }
    let mut rng = rng_from_seed(seed);
    let mut out = alloc::vec![Vec::new(); folds];
    for (c, (_, mut idxs)) in groups.into_iter().enumerate() {
        idxs.shuffle(&mut rng);
        // The starting fold rotates per class so remainders spread evenly.
        for (offset, idx) in idxs.into_iter().enumerate() {
            out[(offset + c) % folds].push(idx);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use proptest::prelude::*;

    fn label_vec(spec: &[(usize, &str)]) -> Vec<String> {
        let mut out = Vec::new();
        for &(count, name) in spec {
            out.extend(core::iter::repeat_n(name.to_string(), count));
        }
        out
    }

    #[test]
    fn folds_partition_all_rows() {
        let labels = label_vec(&[(17, "a"), (23, "b"), (9, "c")]);
        let folds = stratified_folds(&labels, 5, 3).unwrap();
        let mut seen = alloc::vec![false; labels.len()];
        for fold in &folds {
            for &i in fold {
                assert!(!seen[i], "row {i} in two folds");
                seen[i] = true;
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn per_fold_class_counts_stay_within_one() {
        let labels = label_vec(&[(17, "a"), (23, "b"), (9, "c")]);
        let folds = stratified_folds(&labels, 5, 3).unwrap();
        for (count, name) in [(17usize, "a"), (23, "b"), (9, "c")] {
            for fold in &folds {
                let in_fold = fold.iter().filter(|&&i| labels[i] == name).count();
                let floor = count / 5;
                assert!(in_fold == floor || in_fold == floor + 1);
            }
        }
    }

    #[test]
    fn small_class_is_named_in_the_error() {
        let labels = label_vec(&[(12, "big"), (3, "tiny")]);
        let err = stratified_folds(&labels, 5, 0).unwrap_err();
        assert!(err.to_string().contains("tiny"));
    }

    #[test]
    fn same_seed_reproduces_folds() {
        let labels = label_vec(&[(20, "a"), (20, "b")]);
        assert_eq!(
            stratified_folds(&labels, 4, 9).unwrap(),
            stratified_folds(&labels, 4, 9).unwrap()
        );
        assert_ne!(
            stratified_folds(&labels, 4, 9).unwrap(),
            stratified_folds(&labels, 4, 10).unwrap()
        );
    }

    proptest! {
        #[test]
        fn partition_and_balance_hold_for_random_shapes(
            counts in proptest::collection::vec(5usize..40, 1..5),
            seed in 0u64..1000,
        ) {
            let spec: Vec<(usize, String)> = counts
                .iter()
                .enumerate()
                .map(|(i, &c)| (c, alloc::format!("c{i}")))
                .collect();
            let labels: Vec<String> = spec
                .iter()
                .flat_map(|(c, n)| core::iter::repeat_n(n.clone(), *c))
                .collect();
            let folds = stratified_folds(&labels, 5, seed).unwrap();
            let total: usize = folds.iter().map(Vec::len).sum();
            prop_assert_eq!(total, labels.len());
            for (count, name) in &spec {
                for fold in &folds {
                    let in_fold = fold.iter().filter(|&&i| &labels[i] == name).count();
                    let floor = count / 5;
                    prop_assert!(in_fold == floor || in_fold == floor + 1);
                }
            }
        }
    }
}
