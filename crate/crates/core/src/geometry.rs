//! Cyclic polytopes over integer intervals.
//!
//! The polytope `P^d_[t1,t2]` is the convex hull of the moment-curve points
//! `(i, i^2, ..., i^d)` for the integers `i` in `[t1, t2]`. Its facets are the
//! `d`-subsets satisfying Gale's evenness condition, and its slack matrix has
//! the closed form `M(i, S) = prod_{j in S} |j - i|`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// An integer interval `[t1, t2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Interval {
    pub t1: i64,
    pub t2: i64,
}

impl Interval {
    pub fn new(t1: i64, t2: i64) -> Result<Self> {
        if t1 > t2 {
            return Err(Error::domain(format!("empty interval [{t1}, {t2}]")));
        }
        Ok(Interval { t1, t2 })
    }

    /// The interval `[1, n]`.
    pub fn first(n: usize) -> Self {
        Interval {
            t1: 1,
            t2: n as i64,
        }
    }

    /// Number of integer points.
    pub fn len(&self) -> usize {
        (self.t2 - self.t1 + 1) as usize
    }

    /// Always false: an interval holds at least one point.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, i: i64) -> bool {
        self.t1 <= i && i <= self.t2
    }

    pub fn shifted(&self, by: i64) -> Self {
        Interval {
            t1: self.t1 + by,
            t2: self.t2 + by,
        }
    }

    pub fn points(&self) -> std::ops::RangeInclusive<i64> {
        self.t1..=self.t2
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.t1, self.t2)
    }
}

/// The cyclic polytope of dimension `d` on the points of an interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CyclicPolytope {
    pub d: usize,
    pub interval: Interval,
}

impl CyclicPolytope {
    /// Requires `d >= 2` and more points than the dimension.
    pub fn new(d: usize, interval: Interval) -> Result<Self> {
        if d < 2 {
            return Err(Error::domain(format!(
                "dimension must be at least 2, got {d}"
            )));
        }
        if interval.len() <= d {
            return Err(Error::domain(format!(
                "need n > d, got n = {} and d = {d}",
                interval.len()
            )));
        }
        Ok(CyclicPolytope { d, interval })
    }

    /// `P^d_n`, the polytope on `[1, n]`.
    pub fn standard(n: usize, d: usize) -> Result<Self> {
        Self::new(d, Interval::first(n))
    }

    pub fn n(&self) -> usize {
        self.interval.len()
    }

    /// Row position of vertex index `i` (0 for `t1`).
    pub fn position(&self, i: i64) -> Result<usize> {
        if !self.interval.contains(i) {
            return Err(Error::domain(format!(
                "vertex index {i} outside {}",
                self.interval
            )));
        }
        Ok((i - self.interval.t1) as usize)
    }

    /// The moment vector `(i, i^2, ..., i^d)`.
    pub fn vertex(&self, i: i64) -> Result<Vec<BigInt>> {
        self.position(i)?;
        Ok(moment_vector(i, self.d))
    }

    pub(crate) fn vertex_rational(&self, i: i64) -> Vec<Rational> {
        moment_vector(i, self.d)
            .iter()
            .map(rational::from_big)
            .collect()
    }

    /// The same polytope translated by `by` along the index line.
    pub fn shifted(&self, by: i64) -> Self {
        CyclicPolytope {
            d: self.d,
            interval: self.interval.shifted(by),
        }
    }
}

impl fmt::Display for CyclicPolytope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P^{}_{}", self.d, self.interval)
    }
}

pub(crate) fn moment_vector(i: i64, d: usize) -> Vec<BigInt> {
    let base = BigInt::from(i);
    let mut out = Vec::with_capacity(d);
    let mut acc = BigInt::one();
    for _ in 0..d {
        acc *= &base;
        out.push(acc.clone());
    }
    out
}

/// A facet of a cyclic polytope, given by its sorted vertex indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GaleSet(Vec<i64>);

impl GaleSet {
    /// Checks Gale's evenness condition against `polytope`.
    pub fn new(members: Vec<i64>, polytope: &CyclicPolytope) -> Result<Self> {
        if !is_gale(&members, polytope)? {
            return Err(Error::domain(format!(
                "{members:?} is not a facet of {polytope}"
            )));
        }
        let mut members = members;
        members.sort_unstable();
        Ok(GaleSet(members))
    }

    #[cfg(test)]
    pub(crate) fn from_sorted_unchecked(members: Vec<i64>) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        GaleSet(members)
    }

    pub fn members(&self) -> &[i64] {
        &self.0
    }

    pub fn contains(&self, i: i64) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn shifted(&self, by: i64) -> Self {
        GaleSet(self.0.iter().map(|m| m + by).collect())
    }
}

impl fmt::Display for GaleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, m) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{m}")?;
        }
        write!(f, "}}")
    }
}

fn sorted_candidate(members: &[i64], polytope: &CyclicPolytope) -> Result<Vec<i64>> {
    if members.len() != polytope.d {
        return Err(Error::domain(format!(
            "candidate set has {} members, dimension is {}",
            members.len(),
            polytope.d
        )));
    }
    let mut sorted = members.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::domain(format!("repeated member in {members:?}")));
    }
    if let Some(&m) = sorted.iter().find(|&&m| !polytope.interval.contains(m)) {
        return Err(Error::domain(format!(
            "member {m} outside {}",
            polytope.interval
        )));
    }
    Ok(sorted)
}

/// Maximal runs of consecutive integers in a sorted list.
fn runs(sorted: &[i64]) -> Vec<&[i64]> {
    let mut out = Vec::new();
    let mut start = 0;
    for k in 1..=sorted.len() {
        if k == sorted.len() || sorted[k] != sorted[k - 1] + 1 {
            out.push(&sorted[start..k]);
            start = k;
        }
    }
    out
}

/// Gale's evenness condition: every maximal run of members that touches
/// neither endpoint of the interval has even length.
pub fn is_gale(members: &[i64], polytope: &CyclicPolytope) -> Result<bool> {
    let sorted = sorted_candidate(members, polytope)?;
    let Interval { t1, t2 } = polytope.interval;
    Ok(runs(&sorted).into_iter().all(|run| {
        let interior = run[0] > t1 && run[run.len() - 1] < t2;
        !interior || run.len() % 2 == 0
    }))
}

/// All facets in lexicographic order of their sorted member lists.
///
/// Walks the interval once per branch, deciding membership point by point
/// and closing a run only when its parity allows.
pub fn enumerate_facets(polytope: &CyclicPolytope) -> Vec<GaleSet> {
    struct Walk {
        t1: i64,
        t2: i64,
        current: Vec<i64>,
        out: Vec<GaleSet>,
    }

    impl Walk {
        fn step(&mut self, p: i64, remaining: usize, run_len: usize, run_at_start: bool) {
            let odd_interior = run_len % 2 == 1 && !run_at_start;
            if remaining == 0 {
                // Every point from p onward is excluded, so the open run ends
                // before t2 unless p is already past the interval.
                if odd_interior && p <= self.t2 {
                    return;
                }
                self.out.push(GaleSet(self.current.clone()));
                return;
            }
            if p > self.t2 || ((self.t2 - p + 1) as usize) < remaining {
                return;
            }
            self.current.push(p);
            let at_start = if run_len == 0 {
                p == self.t1
            } else {
                run_at_start
            };
            self.step(p + 1, remaining - 1, run_len + 1, at_start);
            self.current.pop();
            if !odd_interior {
                self.step(p + 1, remaining, 0, false);
            }
        }
    }

    let mut walk = Walk {
        t1: polytope.interval.t1,
        t2: polytope.interval.t2,
        current: Vec::with_capacity(polytope.d),
        out: Vec::new(),
    };
    walk.step(polytope.interval.t1, polytope.d, 0, false);
    walk.out
}

/// Number of facets of `P^d_n`, from the closed form for cyclic polytopes.
/// Saturates at `u128::MAX`.
pub fn facet_count(d: usize, n: usize) -> u128 {
    let q = d / 2;
    if n <= d {
        return 0;
    }
    if d.is_multiple_of(2) {
        binomial_u128(n - q, q).saturating_add(binomial_u128(n - q - 1, q - 1))
    } else {
        binomial_u128(n - q - 1, q).saturating_mul(2)
    }
}

pub(crate) fn binomial_u128(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for j in 0..k {
        // acc * (n - j) / (j + 1) stays integral at every step
        acc = match acc.checked_mul((n - j) as u128) {
            Some(v) => v / (j as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// `prod_{j in S} |j - i|`.
pub fn slack_entry(polytope: &CyclicPolytope, i: i64, facet: &GaleSet) -> Result<BigInt> {
    polytope.position(i)?;
    if let Some(&m) = facet
        .members()
        .iter()
        .find(|&&m| !polytope.interval.contains(m))
    {
        return Err(Error::domain(format!(
            "facet member {m} outside {}",
            polytope.interval
        )));
    }
    Ok(slack_product(i, facet.members()))
}

pub(crate) fn slack_product(i: i64, members: &[i64]) -> BigInt {
    // |j - i| <= 2^63 fits i128, and products of up to two fit too
    let mut acc = BigInt::one();
    let mut small: i128 = 1;
    for &j in members {
        let f = (j as i128 - i as i128).abs();
        if f == 0 {
            return BigInt::zero();
        }
        match small.checked_mul(f) {
            Some(v) => small = v,
            None => {
                acc *= BigInt::from(small);
                small = f;
            }
        }
    }
    acc * BigInt::from(small)
}

/// The slack matrix of a cyclic polytope: rows are vertex indices in
/// interval order, columns are facets in canonical order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlackMatrix {
    pub polytope: CyclicPolytope,
    pub columns: Vec<GaleSet>,
    pub entries: Vec<Vec<BigInt>>,
}

impl SlackMatrix {
    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn get(&self, row: usize, col: usize) -> &BigInt {
        &self.entries[row][col]
    }
}

pub fn slack_matrix(polytope: &CyclicPolytope) -> SlackMatrix {
    let columns = enumerate_facets(polytope);
    let entries = polytope
        .interval
        .points()
        .map(|i| {
            columns
                .iter()
                .map(|s| slack_product(i, s.members()))
                .collect()
        })
        .collect();
    SlackMatrix {
        polytope: *polytope,
        columns,
        entries,
    }
}

/// A valid inequality `<a, x> <= b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FacetInequality {
    #[serde(with = "rational::serde_rational::vec")]
    pub a: Vec<Rational>,
    #[serde(with = "rational::serde_rational")]
    pub b: Rational,
}

impl FacetInequality {
    /// `b - <a, x>`.
    pub fn slack(&self, x: &[Rational]) -> Rational {
        &self.b - rational::dot(&self.a, x)
    }
}

/// Coefficients `c_0..c_d` of `prod_{j in S} (t - j)`.
pub(crate) fn facet_polynomial(members: &[i64]) -> Vec<BigInt> {
    let mut coeffs = vec![BigInt::one()];
    for &j in members {
        let j = BigInt::from(j);
        let mut next = vec![BigInt::zero(); coeffs.len() + 1];
        for (k, c) in coeffs.iter().enumerate() {
            next[k + 1] += c;
            next[k] -= c * &j;
        }
        coeffs = next;
    }
    coeffs
}

/// The facet-defining inequality whose slack at every vertex equals the
/// slack-matrix entry.
pub fn facet_inequality(polytope: &CyclicPolytope, facet: &GaleSet) -> Result<FacetInequality> {
    let members = facet.members();
    if members.len() != polytope.d {
        return Err(Error::domain(format!(
            "facet {facet} has {} members, dimension is {}",
            members.len(),
            polytope.d
        )));
    }
    if let Some(&m) = members.iter().find(|&&m| !polytope.interval.contains(m)) {
        return Err(Error::domain(format!(
            "facet member {m} outside {}",
            polytope.interval
        )));
    }
    // sign of prod (i - j) is (-1)^{#j > i}
    let sign_at = |i: i64| -> i32 {
        if facet.contains(i) {
            0
        } else if members.iter().filter(|&&j| j > i).count() % 2 == 0 {
            1
        } else {
            -1
        }
    };
    let outside = polytope
        .interval
        .points()
        .find(|&i| !facet.contains(i))
        .ok_or_else(|| Error::domain("facet covers the whole interval"))?;
    let sign = sign_at(outside);
    if let Some(bad) = polytope.interval.points().find(|&i| sign_at(i) == -sign) {
        return Err(Error::internal(format!(
            "{facet} is not a facet of {polytope}: vertex {bad} lies on the wrong side"
        )));
    }
    let coeffs = facet_polynomial(members);
    let s = BigInt::from(sign);
    let b = Rational::from_integer(&coeffs[0] * &s);
    let a = coeffs[1..]
        .iter()
        .map(|c| Rational::from_integer(-(c * &s)))
        .collect();
    Ok(FacetInequality { a, b })
}

/// An affine map `x -> linear * x + offset`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineMap {
    #[serde(with = "rational::serde_rational::matrix")]
    pub linear: Vec<Vec<Rational>>,
    #[serde(with = "rational::serde_rational::vec")]
    pub offset: Vec<Rational>,
}

impl AffineMap {
    pub fn identity(dim: usize) -> Self {
        let linear = (0..dim)
            .map(|r| {
                (0..dim)
                    .map(|c| {
                        if r == c {
                            rational::one()
                        } else {
                            rational::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        AffineMap {
            linear,
            offset: vec![rational::zero(); dim],
        }
    }

    /// Keeps the first `out` of `inp` coordinates.
    pub fn coordinate_projection(out: usize, inp: usize) -> Self {
        let linear = (0..out)
            .map(|r| {
                (0..inp)
                    .map(|c| {
                        if r == c {
                            rational::one()
                        } else {
                            rational::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        AffineMap {
            linear,
            offset: vec![rational::zero(); out],
        }
    }

    pub fn output_dim(&self) -> usize {
        self.offset.len()
    }

    pub fn input_dim(&self) -> usize {
        self.linear.first().map_or(0, Vec::len)
    }

    pub fn apply(&self, x: &[Rational]) -> Vec<Rational> {
        self.linear
            .iter()
            .zip(&self.offset)
            .map(|(row, off)| rational::dot(row, x) + off)
            .collect()
    }

    /// `self` after `inner`.
    pub fn compose(&self, inner: &AffineMap) -> AffineMap {
        let linear = self
            .linear
            .iter()
            .map(|row| {
                (0..inner.input_dim())
                    .map(|c| {
                        row.iter()
                            .zip(&inner.linear)
                            .fold(rational::zero(), |acc, (a, irow)| acc + a * &irow[c])
                    })
                    .collect()
            })
            .collect();
        let offset = self.apply(&inner.offset);
        AffineMap { linear, offset }
    }
}

fn binomial_big(n: usize, k: usize) -> BigInt {
    let mut acc = BigInt::one();
    for j in 0..k {
        acc = acc * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    acc
}

/// The affine isomorphism `P^d_src -> P^d_dst` for intervals of equal
/// length. With `c = dst.t1 - src.t1` it sends
/// `x_i -> c^i + sum_{j<=i} C(i,j) c^(i-j) x_j`, which maps the vertex at
/// index `t` to the vertex at index `t + c`.
pub fn interval_shift_map(d: usize, src: Interval, dst: Interval) -> Result<AffineMap> {
    if src.len() != dst.len() {
        return Err(Error::domain(format!(
            "intervals {src} and {dst} have different lengths"
        )));
    }
    Ok(shift_map(d, dst.t1 - src.t1))
}

pub(crate) fn shift_map(d: usize, c: i64) -> AffineMap {
    let c = BigInt::from(c);
    let pow = |e: usize| -> BigInt { num_traits::pow(c.clone(), e) };
    let mut linear = vec![vec![rational::zero(); d]; d];
    let mut offset = Vec::with_capacity(d);
    for i in 1..=d {
        offset.push(Rational::from_integer(pow(i)));
        for j in 1..=i {
            linear[i - 1][j - 1] = Rational::from_integer(binomial_big(i, j) * pow(i - j));
        }
    }
    AffineMap { linear, offset }
}

/// Splits a facet of an even-dimensional cyclic polytope into `d/2` pairs,
/// each either the endpoint pair `{t1, t2}` or two consecutive integers.
///
/// When the runs at both endpoints have odd length the endpoint pair comes
/// first; the remaining run elements are then paired left to right.
pub fn gale_pair_partition(facet: &GaleSet, polytope: &CyclicPolytope) -> Result<Vec<(i64, i64)>> {
    if !polytope.d.is_multiple_of(2) {
        return Err(Error::domain(format!(
            "pair partition needs even dimension, got {}",
            polytope.d
        )));
    }
    let sorted = sorted_candidate(facet.members(), polytope)?;
    let Interval { t1, t2 } = polytope.interval;
    let mut blocks: Vec<Vec<i64>> = runs(&sorted).into_iter().map(<[i64]>::to_vec).collect();
    let mut pairs = Vec::with_capacity(polytope.d / 2);

    let first_odd = blocks
        .first()
        .is_some_and(|b| b[0] == t1 && b.len() % 2 == 1);
    if first_odd {
        let last = blocks.len() - 1;
        let last_odd =
            last > 0 && blocks[last][blocks[last].len() - 1] == t2 && blocks[last].len() % 2 == 1;
        if !last_odd {
            return Err(Error::internal(format!(
                "{facet} violates the evenness condition on {}",
                polytope.interval
            )));
        }
        pairs.push((t1, t2));
        blocks[0].remove(0);
        blocks[last].pop();
    }
    for block in blocks.iter().filter(|b| !b.is_empty()) {
        if block.len() % 2 != 0 {
            return Err(Error::internal(format!(
                "{facet} has an odd run {block:?} on {}",
                polytope.interval
            )));
        }
        pairs.extend(block.chunks(2).map(|p| (p[0], p[1])));
    }
    Ok(pairs)
}

/// Positions of each facet in a canonical column list.
pub(crate) fn column_lookup(columns: &[GaleSet]) -> std::collections::HashMap<&[i64], usize> {
    columns
        .iter()
        .enumerate()
        .map(|(k, s)| (s.members(), k))
        .collect()
}
