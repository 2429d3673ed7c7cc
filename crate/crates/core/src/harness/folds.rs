use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{HarnessError, NoteRecord};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    pub seed: u64,
    /// Record id → fold index in `0..k`.
    pub assignment: BTreeMap<String, usize>,
}

impl FoldPlan {
    pub fn fold_of(&self, id: &str) -> Option<usize> {
        self.assignment.get(id).copied()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in self.assignment.values() {
            sizes[f] += 1;
        }
        sizes
    }

    /// `(train, test)` for fold `f`, each in the original record order.
    pub fn split<'a>(&self, records: &'a [NoteRecord], f: usize) -> (Vec<&'a NoteRecord>, Vec<&'a NoteRecord>) {
        records
            .iter()
            .partition(|r| self.fold_of(&r.id) != Some(f))
    }
}

/// Seeded shuffle, then round-robin: position `i` of the shuffled order goes
/// to fold `i mod k`.
pub fn kfold_split(records: &[NoteRecord], k: usize, seed: u64) -> Result<FoldPlan, HarnessError> {
    let n = records.len();
    if k < 2 || k > n {
        return Err(HarnessError::InvalidK { k, n });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let assignment = order
        .iter()
        .enumerate()
        .map(|(pos, &i)| (records[i].id.clone(), pos % k))
        .collect();
    Ok(FoldPlan { k, seed, assignment })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn records(n: usize) -> Vec<NoteRecord> {
        (0..n)
            .map(|i| NoteRecord {
                id: format!("n{i}"),
                assessment: String::new(),
                subjective: String::new(),
                objective: String::new(),
                summary: None,
            })
            .collect()
    }

    #[test]
    fn sizes() {
        assert_eq!(kfold_split(&records(10), 5, 3).unwrap().fold_sizes(), vec![2; 5]);
        assert_eq!(kfold_split(&records(765), 5, 3).unwrap().fold_sizes(), vec![153; 5]);
        assert!(kfold_split(&records(4), 5, 0).is_err());
        assert!(kfold_split(&records(4), 1, 0).is_err());
    }

    #[test]
    fn deterministic_and_seed_sensitive() {
        let r = records(40);
        assert_eq!(kfold_split(&r, 5, 9).unwrap(), kfold_split(&r, 5, 9).unwrap());
        assert_ne!(kfold_split(&r, 5, 9).unwrap(), kfold_split(&r, 5, 10).unwrap());
    }

    proptest! {
        #[test]
        fn partition(n in 2usize..60, k in 2usize..8, seed in any::<u64>()) {
            prop_assume!(k <= n);
            let r = records(n);
            let plan = kfold_split(&r, k, seed).unwrap();
            prop_assert_eq!(plan.assignment.len(), n);
            let sizes = plan.fold_sizes();
            prop_assert_eq!(sizes.iter().sum::<usize>(), n);
            prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
            for f in 0..k {
                let (train, test) = plan.split(&r, f);
                prop_assert_eq!(train.len() + test.len(), n);
                prop_assert!(test.iter().all(|t| plan.fold_of(&t.id) == Some(f)));
            }
        }
    }
}
