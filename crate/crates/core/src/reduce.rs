//! Deterministic parallel reduction.
//!
//! The combine tree is a function of the index range alone: leaves are
//! contiguous blocks folded left-to-right, internal nodes always split at the
//! midpoint. Whether a node is evaluated by one thread or two never changes
//! the tree, so floating-point results are bit-identical for any worker count.

/// Default leaf size; large enough to amortize task overhead.
pub const DEFAULT_LEAF: u64 = 1 << 10;

/// Work-splitting threshold: nodes above this length may run their two
/// children on different threads.
const PARALLEL_CUTOFF: u64 = 1 << 13;

/// Map-reduce over the index range [start, end) with a fixed tree shape.
/// `empty` is returned for an empty range only and never otherwise combined.
pub fn tree_reduce<T, M, C>(start: u64, end: u64, leaf: u64, map: &M, combine: &C, empty: T) -> T
where
    T: Send,
    M: Fn(u64) -> T + Sync,
    C: Fn(T, T) -> T + Sync,
{
    assert!(leaf >= 1);
    if start >= end {
        return empty;
    }
    node(start, end, leaf, map, combine)
}

fn node<T, M, C>(start: u64, end: u64, leaf: u64, map: &M, combine: &C) -> T
where
    T: Send,
    M: Fn(u64) -> T + Sync,
    C: Fn(T, T) -> T + Sync,
{
    let len = end - start;
    if len <= leaf {
        let mut acc = map(start);
        for i in start + 1..end {
            acc = combine(acc, map(i));
        }
        return acc;
    }
    let mid = start + len / 2;
    let (a, b) = if len > PARALLEL_CUTOFF {
        rayon::join(|| node(start, mid, leaf, map, combine), || node(mid, end, leaf, map, combine))
    } else {
        (node(start, mid, leaf, map, combine), node(mid, end, leaf, map, combine))
    };
    combine(a, b)
}

/// Fixed-shape sum of f(i) over [start, end).
pub fn tree_sum<F: Fn(u64) -> f64 + Sync>(start: u64, end: u64, f: &F) -> f64 {
    tree_reduce(start, end, DEFAULT_LEAF, f, &|a, b| a + b, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sums_match_closed_form() {
        let n = 100_000u64;
        let s = tree_reduce(0, n, 64, &|i| i as u128, &|a, b| a + b, 0);
        assert_eq!(s, (n as u128 * (n as u128 - 1)) / 2);
        assert_eq!(tree_sum(5, 5, &|_| 1.0), 0.0);
    }

    #[test]
    fn bitwise_identical_across_thread_counts() {
        // A sum whose result depends on association order in floating point.
        let f = |i: u64| ((i as f64) * 0.7).sin() / ((i + 1) as f64);
        let run = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| tree_sum(0, 300_000, &f))
        };
        let one = run(1);
        let four = run(4);
        let seven = run(7);
        assert_eq!(one.to_bits(), four.to_bits());
        assert_eq!(one.to_bits(), seven.to_bits());
    }

    #[test]
    fn leaf_boundaries_do_not_depend_on_parallelism() {
        // Same leaf size, different pool: identical even for non-commutative
        // float combining (subtraction amplifies order changes).
        let f = |i: u64| 1.0 / ((i + 1) as f64);
        let c = |a: f64, b: f64| a - b / 2.0;
        let run = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| tree_reduce(0, 50_000, 128, &f, &c, 0.0))
        };
        assert_eq!(run(1).to_bits(), run(8).to_bits());
    }
}
