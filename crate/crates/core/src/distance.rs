//! Distances between rule sets: edit distance over canonical text, and
//! oracle-driven relative ranking embedded in a merge sort.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};
use std::sync::Mutex;

use serde::Serialize;

use crate::proposer::OracleError;

/// Unit-cost edit distance (insert, delete, substitute) over characters.
pub fn levenshtein(a: &str, b: &str) -> usize {
    if a.is_ascii() && b.is_ascii() {
        edit_distance(a.as_bytes(), b.as_bytes())
    } else {
        let a: Vec<char> = a.chars().collect();
        let b: Vec<char> = b.chars().collect();
        edit_distance(&a, &b)
    }
}

fn edit_distance<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let prefix = a.iter().zip(b).take_while(|(x, y)| x == y).count();
    let (a, b) = (&a[prefix..], &b[prefix..]);
    let suffix = a.iter().rev().zip(b.iter().rev()).take_while(|(x, y)| x == y).count();
    let (a, b) = (&a[..a.len() - suffix], &b[..b.len() - suffix]);
    let (a, b) = if a.len() < b.len() { (b, a) } else { (a, b) };
    if b.is_empty() {
        return a.len();
    }

    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, x) in a.iter().enumerate() {
        let mut diagonal = row[0];
        row[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let substitute = diagonal + usize::from(x != y);
            diagonal = row[j + 1];
            row[j + 1] = substitute.min(row[j] + 1).min(diagonal + 1);
        }
    }
    row[b.len()]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Choice {
    A,
    B,
}

impl Choice {
    pub fn flip(self) -> Self {
        match self {
            Choice::A => Choice::B,
            Choice::B => Choice::A,
        }
    }
}

/// Answers "which of `a` and `b` is semantically closer to `reference`".
pub trait Comparator: Send + Sync {
    /// One vote per sample.
    fn votes(&self, reference: &str, a: &str, b: &str, samples: usize) -> Result<Vec<Choice>, OracleError>;

    /// Number of backend requests issued so far.
    fn calls(&self) -> u64;
}

/// Mock comparator: closer means smaller edit distance, ties broken by
/// lexicographic order of the candidate text.
#[derive(Default)]
pub struct LevenshteinComparator {
    calls: AtomicU64,
    memo: Mutex<HashMap<(String, String), usize>>,
}

impl LevenshteinComparator {
    pub fn new() -> Self {
        Self::default()
    }

    fn distance(&self, reference: &str, text: &str) -> usize {
        let key = (reference.to_string(), text.to_string());
        if let Some(&d) = self.memo.lock().unwrap().get(&key) {
            return d;
        }
        let d = levenshtein(reference, text);
        self.memo.lock().unwrap().insert(key, d);
        d
    }
}

impl Comparator for LevenshteinComparator {
    fn votes(&self, reference: &str, a: &str, b: &str, samples: usize) -> Result<Vec<Choice>, OracleError> {
        self.calls.fetch_add(1, AtomicOrdering::Relaxed);
        let choice = match (self.distance(reference, a), a).cmp(&(self.distance(reference, b), b)) {
            Ordering::Greater => Choice::B,
            _ => Choice::A,
        };
        Ok(vec![choice; samples])
    }

    fn calls(&self) -> u64 {
        self.calls.load(AtomicOrdering::Relaxed)
    }
}

/// Wraps a closure as a comparator; every sample gets the closure's answer.
pub struct FnComparator<F> {
    f: F,
    calls: AtomicU64,
}

impl<F> FnComparator<F>
where
    F: Fn(&str, &str, &str) -> Choice + Send + Sync,
{
    pub fn new(f: F) -> Self {
        Self {
            f,
            calls: AtomicU64::new(0),
        }
    }
}

impl<F> Comparator for FnComparator<F>
where
    F: Fn(&str, &str, &str) -> Choice + Send + Sync,
{
    fn votes(&self, reference: &str, a: &str, b: &str, samples: usize) -> Result<Vec<Choice>, OracleError> {
        self.calls.fetch_add(1, AtomicOrdering::Relaxed);
        Ok(vec![(self.f)(reference, a, b); samples])
    }

    fn calls(&self) -> u64 {
        self.calls.load(AtomicOrdering::Relaxed)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Tally {
    first: usize,
    second: usize,
}

/// Majority-voting, caching front end over a [`Comparator`].
pub struct DistanceOracle {
    backend: Box<dyn Comparator>,
    samples: usize,
    cache: Mutex<HashMap<(String, String, String), Tally>>,
}

pub const DEFAULT_SAMPLES: usize = 16;

impl DistanceOracle {
    pub fn new(backend: impl Comparator + 'static) -> Self {
        Self {
            backend: Box::new(backend),
            samples: DEFAULT_SAMPLES,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn levenshtein_mock() -> Self {
        Self::new(LevenshteinComparator::new())
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples.max(1);
        self
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    /// Backend requests issued so far; cache hits do not count.
    pub fn backend_calls(&self) -> u64 {
        self.backend.calls()
    }

    pub fn cached_queries(&self) -> usize {
        self.cache.lock().unwrap().len()
    }

    /// Which of `a` and `b` is closer to `reference`. The cache key is
    /// order-normalized, so `(a, b)` and `(b, a)` share one entry.
    pub fn query(&self, reference: &str, a: &str, b: &str) -> Result<Choice, OracleError> {
        if a == b {
            return Ok(Choice::A);
        }
        let swapped = a > b;
        let (lo, hi) = if swapped { (b, a) } else { (a, b) };
        let key = (reference.to_string(), lo.to_string(), hi.to_string());

        let cached = self.cache.lock().unwrap().get(&key).copied();
        let tally = match cached {
            Some(t) => t,
            None => {
                let mut t = Tally::default();
                for vote in self.backend.votes(reference, lo, hi, self.samples)? {
                    match vote {
                        Choice::A => t.first += 1,
                        Choice::B => t.second += 1,
                    }
                }
                self.cache.lock().unwrap().insert(key, t);
                t
            }
        };

        let winner = match tally.first.cmp(&tally.second) {
            Ordering::Greater => Choice::A,
            Ordering::Less => Choice::B,
            Ordering::Equal => {
                if levenshtein(reference, hi) < levenshtein(reference, lo) {
                    Choice::B
                } else {
                    Choice::A
                }
            }
        };
        Ok(if swapped { winner.flip() } else { winner })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankedList {
    /// Indices into the input candidates, nearest first.
    pub order: Vec<usize>,
    pub queries_used: usize,
}

impl RankedList {
    pub fn items<'a, T>(&self, candidates: &'a [T]) -> Vec<&'a T> {
        self.order.iter().map(|&i| &candidates[i]).collect()
    }
}

/// `n * ceil(log2 n)`, the comparison budget of the merge sort.
pub fn query_bound(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        n * (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

/// Pure edit-distance ranking; ties broken lexicographically.
pub fn lev_rank<S: AsRef<str>>(reference: &str, candidates: &[S]) -> RankedList {
    let distances: Vec<usize> = candidates.iter().map(|c| levenshtein(reference, c.as_ref())).collect();
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by(|&i, &j| (distances[i], candidates[i].as_ref()).cmp(&(distances[j], candidates[j].as_ref())));
    RankedList { order, queries_used: 0 }
}

/// Merge sort whose comparator is the oracle.
pub fn semantic_rank<S: AsRef<str>>(
    reference: &str,
    candidates: &[S],
    oracle: &DistanceOracle,
) -> Result<RankedList, OracleError> {
    let mut queries = 0;
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    merge_sort(&mut order, &mut |i, j| {
        queries += 1;
        oracle.query(reference, candidates[i].as_ref(), candidates[j].as_ref())
    })?;
    Ok(RankedList {
        order,
        queries_used: queries,
    })
}

fn merge_sort<F>(items: &mut [usize], closer: &mut F) -> Result<(), OracleError>
where
    F: FnMut(usize, usize) -> Result<Choice, OracleError>,
{
    if items.len() <= 1 {
        return Ok(());
    }
    let mid = items.len() / 2;
    merge_sort(&mut items[..mid], closer)?;
    merge_sort(&mut items[mid..], closer)?;

    let (left, right) = items.split_at(mid);
    let mut merged = Vec::with_capacity(items.len());
    let (mut i, mut j) = (0, 0);
    while i < left.len() && j < right.len() {
        if closer(left[i], right[j])? == Choice::A {
            merged.push(left[i]);
            i += 1;
        } else {
            merged.push(right[j]);
            j += 1;
        }
    }
    merged.extend_from_slice(&left[i..]);
    merged.extend_from_slice(&right[j..]);
    items.copy_from_slice(&merged);
    Ok(())
}

/// Keeps the `keep` nearest candidates by edit distance, ranks them with the
/// oracle, then appends the rest in edit-distance order. `keep` is clamped
/// to `1..=candidates.len()`.
pub fn hybrid_rank<S: AsRef<str>>(
    reference: &str,
    candidates: &[S],
    keep: usize,
    oracle: &DistanceOracle,
) -> Result<RankedList, OracleError> {
    let by_distance = lev_rank(reference, candidates).order;
    let keep = keep.clamp(1, candidates.len().max(1)).min(candidates.len());
    let survivors: Vec<&str> = by_distance[..keep].iter().map(|&i| candidates[i].as_ref()).collect();
    let ranked = semantic_rank(reference, &survivors, oracle)?;

    let mut order: Vec<usize> = ranked.order.iter().map(|&i| by_distance[i]).collect();
    order.extend_from_slice(&by_distance[keep..]);
    Ok(RankedList {
        order,
        queries_used: ranked.queries_used,
    })
}
