//! Sorted adjacency intersection kernels.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::Error;
use crate::graph::VertexId;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kernel {
    /// Two-pointer merge, linear in both lengths.
    #[default]
    Merge,
    /// Binary search of the shorter list's elements in the longer one.
    BinarySearch,
    /// Hash set over the shorter list, probed with the longer one.
    Hash,
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kernel::Merge => "merge",
            Kernel::BinarySearch => "bsearch",
            Kernel::Hash => "hash",
        })
    }
}

impl FromStr for Kernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "merge" => Ok(Kernel::Merge),
            "bsearch" | "binary-search" => Ok(Kernel::BinarySearch),
            "hash" => Ok(Kernel::Hash),
            other => Err(Error::domain(format!(
                "unknown kernel {other:?} (expected merge, bsearch or hash)"
            ))),
        }
    }
}

fn is_sorted(a: &[VertexId]) -> bool {
    a.windows(2).all(|w| w[0] < w[1])
}

/// Calls `f` on every common element of two strictly increasing lists, in
/// ascending order, and returns how many there were.
pub fn for_each_common<F>(a: &[VertexId], b: &[VertexId], kernel: Kernel, mut f: F) -> usize
where
    F: FnMut(VertexId),
{
    debug_assert!(is_sorted(a) && is_sorted(b), "intersect inputs must be sorted");
    let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    if short.is_empty() {
        return 0;
    }
    let mut hits = 0;
    match kernel {
        Kernel::Merge => {
            let (mut i, mut j) = (0, 0);
            while i < a.len() && j < b.len() {
                match a[i].cmp(&b[j]) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => {
                        f(a[i]);
                        hits += 1;
                        i += 1;
                        j += 1;
                    }
                }
            }
        }
        Kernel::BinarySearch => {
            let mut rest = long;
            for &x in short {
                let pos = rest.partition_point(|&y| y < x);
                rest = &rest[pos..];
                match rest.first() {
                    None => break,
                    Some(&y) if y == x => {
                        f(x);
                        hits += 1;
                        rest = &rest[1..];
                    }
                    Some(_) => {}
                }
            }
        }
        Kernel::Hash => {
            let table: HashSet<VertexId> = short.iter().copied().collect();
            for &x in long {
                if table.contains(&x) {
                    f(x);
                    hits += 1;
                }
            }
        }
    }
    hits
}

/// Sorted intersection of two strictly increasing id lists.
pub fn intersect(a: &[VertexId], b: &[VertexId], kernel: Kernel) -> Vec<VertexId> {
    let mut out = Vec::new();
    for_each_common(a, b, kernel, |x| out.push(x));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    const KERNELS: [Kernel; 3] = [Kernel::Merge, Kernel::BinarySearch, Kernel::Hash];

    #[test]
    fn small_cases() {
        for k in KERNELS {
            assert_eq!(intersect(&[1, 3, 5], &[3, 4, 5], k), vec![3, 5]);
            assert_eq!(intersect(&[], &[1, 2], k), Vec::<u32>::new());
            assert_eq!(intersect(&[1, 2], &[], k), Vec::<u32>::new());
            assert_eq!(intersect(&[7], &[1, 2, 3, 7, 9], k), vec![7]);
        }
    }

    #[test]
    fn kernel_names_parse() {
        for k in KERNELS {
            assert_eq!(k.to_string().parse::<Kernel>().unwrap(), k);
        }
        assert!("simd".parse::<Kernel>().is_err());
    }

    proptest! {
        #[test]
        fn kernels_agree_with_set_intersection(
            a in prop::collection::btree_set(0u32..200, 0..60),
            b in prop::collection::btree_set(0u32..200, 0..60),
        ) {
            let av: Vec<u32> = a.iter().copied().collect();
            let bv: Vec<u32> = b.iter().copied().collect();
            let expected: Vec<u32> = a.intersection(&b).copied().collect::<BTreeSet<_>>().into_iter().collect();
            for k in KERNELS {
                prop_assert_eq!(&intersect(&av, &bv, k), &expected);
            }
        }
    }
}
