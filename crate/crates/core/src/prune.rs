//! Greedy removal of the estimate with the weakest neighbour contrast.
//!
//! Shared by the solution path (remove everything, record the order) and by
//! the windowed scan (remove while the weakest contrast is at most a
//! threshold). Each removal only changes the contrasts of the two
//! neighbours, so the whole run is `O(J log J)`.

use std::cmp::Ordering;
use std::collections::BTreeSet;

#[derive(Debug, Clone, Copy)]
struct Key {
    value: f64,
    location: usize,
}

impl PartialEq for Key {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.value
            .total_cmp(&other.value)
            .then(self.location.cmp(&other.location))
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub(crate) struct PruneOutcome {
    /// Locations in the order they were removed.
    pub removed: Vec<usize>,
    /// Survivors, sorted.
    pub kept: Vec<usize>,
}

/// Repeatedly removes the point whose `contrast(prev, point, next)` is
/// smallest (ties: smallest location). `left_bound` and `right_bound` stand
/// in for the missing neighbours at the ends.
///
/// With `floor = Some(z)` the run stops as soon as the smallest contrast
/// exceeds `z`; with `None` every point is removed.
pub(crate) fn neighbor_prune<F>(
    points: &[usize],
    left_bound: usize,
    right_bound: usize,
    contrast: F,
    floor: Option<f64>,
) -> PruneOutcome
where
    F: Fn(usize, usize, usize) -> f64,
{
    let n = points.len();
    if n == 0 {
        return PruneOutcome::default();
    }
    debug_assert!(points.windows(2).all(|w| w[0] < w[1]));

    // Node i <-> points[i]; indices n and n+1 are the left/right sentinels.
    let (left, right) = (n, n + 1);
    let loc = |i: usize| -> usize {
        if i == left {
            left_bound
        } else if i == right {
            right_bound
        } else {
            points[i]
        }
    };
    let mut prev: Vec<usize> = (0..n).map(|i| if i == 0 { left } else { i - 1 }).collect();
    let mut next: Vec<usize> = (0..n)
        .map(|i| if i + 1 == n { right } else { i + 1 })
        .collect();
    let mut value: Vec<f64> = (0..n)
        .map(|i| contrast(loc(prev[i]), points[i], loc(next[i])))
        .collect();
    let mut alive = vec![true; n];
    let mut queue: BTreeSet<(Key, usize)> = (0..n)
        .map(|i| {
            (
                Key {
                    value: value[i],
                    location: points[i],
                },
                i,
            )
        })
        .collect();

    let mut removed = Vec::with_capacity(n);
    while let Some(&(key, m)) = queue.first() {
        if let Some(z) = floor {
            if key.value > z {
                break;
            }
        }
        queue.pop_first();
        alive[m] = false;
        removed.push(points[m]);
        let (p, q) = (prev[m], next[m]);
        if p != left {
            next[p] = q;
        }
        if q != right {
            prev[q] = p;
        }
        for i in [p, q] {
            if i == left || i == right {
                continue;
            }
            queue.remove(&(
                Key {
                    value: value[i],
                    location: points[i],
                },
                i,
            ));
            value[i] = contrast(loc(prev[i]), points[i], loc(next[i]));
            queue.insert((
                Key {
                    value: value[i],
                    location: points[i],
                },
                i,
            ));
        }
    }
    let kept = (0..n).filter(|&i| alive[i]).map(|i| points[i]).collect();
    PruneOutcome { removed, kept }
}
