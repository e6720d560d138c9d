use dtree::{IndexedHashSet, SetConfig};
use proptest::prelude::*;
use std::collections::HashMap;

proptest! {
    #[test]
    fn indices_are_stable_and_readable(entries in prop::collection::vec((any::<u64>(), 0u32..4), 1..300)) {
        let set = IndexedHashSet::new(SetConfig::new(10)).unwrap();
        let mut seen: HashMap<(u64, u32), u64> = HashMap::new();
        for (value, tag) in entries {
            let (index, is_new) = set.insert_if_absent(value, tag).unwrap();
            match seen.get(&(value, tag)) {
                Some(&prev) => {
                    prop_assert!(!is_new);
                    prop_assert_eq!(prev, index);
                }
                None => {
                    prop_assert!(is_new);
                    seen.insert((value, tag), index);
                }
            }
            prop_assert_eq!(set.read(index).unwrap(), (value, tag));
        }
        prop_assert_eq!(set.occupancy(), seen.len() as u64);
    }
}
