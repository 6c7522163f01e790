//! Nonnegative factorizations of cyclic-polytope slack matrices.
//!
//! A rank-`r` factorization assigns nonnegative vectors `alpha_i` to rows
//! and `beta_j` to columns with `M(i, j) = <alpha_i, beta_j>`. The planar
//! factorization comes from the reflection formulation through LP duality.
//! Even dimensions multiply `q` column-rearranged copies of it entrywise,
//! and odd dimensions stack two scaled copies of the even case one dimension
//! down.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::geometry::{self, CyclicPolytope, GaleSet, SlackMatrix};
use crate::lifting;
use crate::rational::{self, Rational};

/// Row and column vectors of a rank-`rank` factorization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factors {
    pub rank: usize,
    pub alpha: Vec<Vec<Rational>>,
    pub beta: Vec<Vec<Rational>>,
}

impl Factors {
    pub fn new(rank: usize, alpha: Vec<Vec<Rational>>, beta: Vec<Vec<Rational>>) -> Result<Self> {
        if let Some(v) = alpha.iter().chain(&beta).find(|v| v.len() != rank) {
            return Err(Error::domain(format!(
                "factor vector of length {} in a rank-{rank} factorization",
                v.len()
            )));
        }
        Ok(Factors { rank, alpha, beta })
    }

    pub fn rows(&self) -> usize {
        self.alpha.len()
    }

    pub fn cols(&self) -> usize {
        self.beta.len()
    }

    pub fn entry(&self, row: usize, col: usize) -> Rational {
        rational::dot(&self.alpha[row], &self.beta[col])
    }

    pub fn is_nonnegative(&self) -> bool {
        self.alpha
            .iter()
            .chain(&self.beta)
            .all(|v| rational::is_nonnegative(v))
    }
}

/// A factorization of the slack matrix of `target`, with columns labelled
/// by facets in canonical order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonnegFactorization {
    pub target: CyclicPolytope,
    pub columns: Vec<GaleSet>,
    pub factors: Factors,
}

impl NonnegFactorization {
    pub fn rank(&self) -> usize {
        self.factors.rank
    }

    pub fn alpha(&self) -> &[Vec<Rational>] {
        &self.factors.alpha
    }

    pub fn beta(&self) -> &[Vec<Rational>] {
        &self.factors.beta
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub row: usize,
    pub col: usize,
    pub expected: BigInt,
    pub got: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub ok: bool,
    pub rank: usize,
    /// Size bound for the target polytope, when there is one.
    pub bound: Option<u128>,
    pub first_mismatch: Option<Mismatch>,
    /// First negative factor entry, as (is_beta, vector index, coordinate).
    pub first_negative: Option<(bool, usize, usize)>,
}

/// `2 floor(log2(n - 1)) + 2`.
pub fn planar_bound(n: usize) -> u128 {
    if n < 2 {
        return 2;
    }
    2 * u128::from((n - 1).ilog2()) + 2
}

/// `2 (2 floor(log2(n - 1)) + 2)^floor(d/2)`.
pub fn rank_bound(n: usize, d: usize) -> u128 {
    planar_bound(n)
        .saturating_pow((d / 2) as u32)
        .saturating_mul(2)
}

/// `(2 floor(log2(n - 1)) + 2)^(d/2)` for even `d`.
pub fn even_bound(n: usize, d: usize) -> Option<u128> {
    d.is_multiple_of(2)
        .then(|| planar_bound(n).saturating_pow((d / 2) as u32))
}

/// A vector scaled to integers: `v = nums / den`, with the nonzero entries
/// kept sparse. `small` holds the same data when everything fits in `i64`.
struct Scaled {
    nums: Vec<(usize, BigInt)>,
    den: BigInt,
    small: Option<(Vec<(usize, i64)>, i64)>,
}

impl Scaled {
    fn new(v: &[Rational]) -> Self {
        let den = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let nums: Vec<(usize, BigInt)> = v
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(k, x)| (k, x.numer() * (&den / x.denom())))
            .collect();
        let small = den.to_i64().and_then(|d| {
            let s: Option<Vec<(usize, i64)>> = nums
                .iter()
                .map(|(k, x)| x.to_i64().map(|x| (*k, x)))
                .collect();
            s.map(|s| (s, d))
        });
        Scaled { nums, den, small }
    }
}

fn dense_small(v: &Scaled, rank: usize) -> Option<(Vec<i64>, i64)> {
    let (sparse, den) = v.small.as_ref()?;
    let mut dense = vec![0i64; rank];
    for &(k, x) in sparse {
        dense[k] = x;
    }
    Some((dense, *den))
}

fn entry_matches(
    a: &Scaled,
    a_dense: &Option<(Vec<i64>, i64)>,
    b: &Scaled,
    expected: &BigInt,
) -> bool {
    if let (Some((ad, aden)), Some((bs, bden))) = (a_dense, &b.small) {
        let fast = (|| {
            let mut acc: i128 = 0;
            for &(k, x) in bs {
                acc = acc.checked_add((ad[k] as i128).checked_mul(x as i128)?)?;
            }
            let rhs = expected
                .to_i128()?
                .checked_mul(*aden as i128)?
                .checked_mul(*bden as i128)?;
            Some(acc == rhs)
        })();
        if let Some(ok) = fast {
            return ok;
        }
    }
    let mut acc = BigInt::zero();
    let mut ai = a.nums.iter().peekable();
    for (k, x) in &b.nums {
        while ai.peek().is_some_and(|(j, _)| j < k) {
            ai.next();
        }
        if let Some((j, y)) = ai.peek() {
            if j == k {
                acc += x * y;
            }
        }
    }
    acc == expected * &a.den * &b.den
}

/// Checks `M(i, j) = <alpha_i, beta_j>` for every entry and nonnegativity
/// of every factor vector.
pub fn verify_entries(entries: &[Vec<BigInt>], f: &Factors) -> Result<VerificationReport> {
    let cols = entries.first().map_or(0, Vec::len);
    if entries.len() != f.rows() || cols != f.cols() || entries.iter().any(|r| r.len() != cols) {
        return Err(Error::domain(format!(
            "{}x{} matrix against a {}x{} factorization",
            entries.len(),
            cols,
            f.rows(),
            f.cols()
        )));
    }
    if let Some(v) = f.alpha.iter().chain(&f.beta).find(|v| v.len() != f.rank) {
        return Err(Error::domain(format!(
            "factor vector of length {} in a rank-{} factorization",
            v.len(),
            f.rank
        )));
    }
    let first_negative = f
        .alpha
        .iter()
        .enumerate()
        .map(|(k, v)| (false, k, v))
        .chain(f.beta.iter().enumerate().map(|(k, v)| (true, k, v)))
        .find_map(|(is_beta, k, v)| {
            v.iter()
                .position(Signed::is_negative)
                .map(|c| (is_beta, k, c))
        });

    let betas: Vec<Scaled> = f.beta.iter().map(|b| Scaled::new(b)).collect();
    let mut first_mismatch = None;
    'rows: for (i, row) in entries.iter().enumerate() {
        let a = Scaled::new(&f.alpha[i]);
        let a_dense = dense_small(&a, f.rank);
        for (j, expected) in row.iter().enumerate() {
            if !entry_matches(&a, &a_dense, &betas[j], expected) {
                first_mismatch = Some(Mismatch {
                    row: i,
                    col: j,
                    expected: expected.clone(),
                    got: f.entry(i, j),
                });
                break 'rows;
            }
        }
    }
    Ok(VerificationReport {
        ok: first_mismatch.is_none() && first_negative.is_none(),
        rank: f.rank,
        bound: None,
        first_mismatch,
        first_negative,
    })
}

/// Verifies a factorization against a slack matrix. Column labels must
/// match the matrix's canonical order.
pub fn verify(m: &SlackMatrix, f: &NonnegFactorization) -> Result<VerificationReport> {
    if f.target.d != m.polytope.d || f.target.n() != m.polytope.n() {
        return Err(Error::domain(format!(
            "factorization targets {} but the matrix belongs to {}",
            f.target, m.polytope
        )));
    }
    let shift = m.polytope.interval.t1 - f.target.interval.t1;
    if f.columns.len() != m.columns.len()
        || f.columns
            .iter()
            .zip(&m.columns)
            .any(|(a, b)| a.shifted(shift) != *b)
    {
        return Err(Error::domain(
            "factorization columns do not match the slack matrix facets",
        ));
    }
    let mut report = verify_entries(&m.entries, &f.factors)?;
    report.bound = Some(rank_bound(m.polytope.n(), m.polytope.d));
    Ok(report)
}

/// Factors of the entrywise product: `alpha_i (x) gamma_i` and
/// `beta_j (x) zeta_j`, indexed `a * s + b`.
pub fn hadamard_factors(a: &Factors, b: &Factors) -> Result<Factors> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::domain(format!(
            "hadamard of {}x{} and {}x{} factorizations",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let tensor = |u: &[Rational], v: &[Rational]| -> Vec<Rational> {
        let mut out = Vec::with_capacity(u.len() * v.len());
        for x in u {
            if x.is_zero() {
                out.extend(std::iter::repeat_with(Rational::zero).take(v.len()));
            } else {
                out.extend(
                    v.iter()
                        .map(|y| if y.is_zero() { Rational::zero() } else { x * y }),
                );
            }
        }
        out
    };
    let alpha = a
        .alpha
        .iter()
        .zip(&b.alpha)
        .map(|(u, v)| tensor(u, v))
        .collect();
    let beta = a
        .beta
        .iter()
        .zip(&b.beta)
        .map(|(u, v)| tensor(u, v))
        .collect();
    Ok(Factors {
        rank: a.rank * b.rank,
        alpha,
        beta,
    })
}

/// Factorization of the entrywise product of the two target matrices.
pub fn hadamard_combine(
    a: &NonnegFactorization,
    b: &NonnegFactorization,
) -> Result<NonnegFactorization> {
    if a.target != b.target || a.columns != b.columns {
        return Err(Error::domain(
            "hadamard factors index different rows or columns",
        ));
    }
    Ok(NonnegFactorization {
        target: a.target,
        columns: a.columns.clone(),
        factors: hadamard_factors(&a.factors, &b.factors)?,
    })
}

/// Rebuilds the column vectors so that column `k` of the result is column
/// `mapping[k]` of the source. Rows are untouched.
pub fn column_select(f: &Factors, mapping: &[usize]) -> Result<Factors> {
    if let Some(&bad) = mapping.iter().find(|&&c| c >= f.cols()) {
        return Err(Error::domain(format!(
            "column {bad} out of range for {} columns",
            f.cols()
        )));
    }
    Ok(Factors {
        rank: f.rank,
        alpha: f.alpha.clone(),
        beta: mapping.iter().map(|&c| f.beta[c].clone()).collect(),
    })
}

/// The smaller of `alpha_i = e_i, beta_j = M(., j)` and
/// `alpha_i = M(i, .), beta_j = e_j`; ties go to the former.
pub fn trivial_factorization(m: &SlackMatrix) -> NonnegFactorization {
    let unit = |len: usize, k: usize| -> Vec<Rational> {
        (0..len)
            .map(|c| {
                if c == k {
                    rational::one()
                } else {
                    Rational::zero()
                }
            })
            .collect()
    };
    let (rows, cols) = (m.rows(), m.cols());
    let factors = if rows <= cols {
        Factors {
            rank: rows,
            alpha: (0..rows).map(|i| unit(rows, i)).collect(),
            beta: (0..cols)
                .map(|j| {
                    m.entries
                        .iter()
                        .map(|row| rational::from_big(&row[j]))
                        .collect()
                })
                .collect(),
        }
    } else {
        Factors {
            rank: cols,
            alpha: m
                .entries
                .iter()
                .map(|row| row.iter().map(rational::from_big).collect())
                .collect(),
            beta: (0..cols).map(|j| unit(cols, j)).collect(),
        }
    };
    NonnegFactorization {
        target: m.polytope,
        columns: m.columns.clone(),
        factors,
    }
}

/// Rank of [`factorize_2d`]`(n)`.
pub fn planar_rank(n: usize) -> usize {
    lifting::ef_2d_size(n).min(n)
}

/// Rank that [`factorize_constructed`] produces, without building it.
pub fn planned_rank(n: usize, d: usize) -> u128 {
    let q = (d / 2) as u32;
    if d.is_multiple_of(2) {
        (planar_rank(n) as u128).saturating_pow(q)
    } else {
        (planar_rank(n - 1) as u128)
            .saturating_pow(q)
            .saturating_mul(2)
    }
}

/// Factorization of the slack matrix of `P^2_n`, read off the reflection
/// formulation. Falls back to the trivial rank-`n` factorization when the
/// formulation is not smaller.
pub fn factorize_2d(n: usize) -> Result<NonnegFactorization> {
    if n < 3 {
        return Err(Error::domain(format!(
            "planar factorization needs n >= 3, got {n}"
        )));
    }
    let polytope = CyclicPolytope::standard(n, 2)?;
    if lifting::ef_2d_size(n) >= n {
        return Ok(trivial_factorization(&geometry::slack_matrix(&polytope)));
    }
    let ef = lifting::build_ef_2d(n)?;
    lifting::factorization_from_ef(&polytope, &ef)
}

/// Factorization of the slack matrix of `P^2q_n` as the entrywise product
/// of `q` column rearrangements of the planar one. Column `S` of the `r`-th
/// factor is the planar column of the `r`-th pair of `S`.
pub fn factorize_even(n: usize, q: usize) -> Result<NonnegFactorization> {
    if q == 0 || n <= 2 * q {
        return Err(Error::domain(format!(
            "even construction needs n > 2q >= 2, got n={n}, q={q}"
        )));
    }
    let planar = factorize_2d(n)?;
    let polytope = CyclicPolytope::standard(n, 2 * q)?;
    let columns = geometry::enumerate_facets(&polytope);
    let lookup = geometry::column_lookup(&planar.columns);
    let mut mappings = vec![Vec::with_capacity(columns.len()); q];
    for s in &columns {
        let pairs = geometry::gale_pair_partition(s, &polytope)?;
        for (r, (a, b)) in pairs.into_iter().enumerate() {
            let col = lookup.get([a, b].as_slice()).ok_or_else(|| {
                Error::internal(format!("pair {{{a},{b}}} of {s} is not a planar facet"))
            })?;
            mappings[r].push(*col);
        }
    }
    let mut acc = column_select(&planar.factors, &mappings[0])?;
    for mapping in &mappings[1..] {
        acc = hadamard_factors(&acc, &column_select(&planar.factors, mapping)?)?;
    }
    Ok(NonnegFactorization {
        target: polytope,
        columns,
        factors: acc,
    })
}

/// Which half of the odd construction a facet belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OddBlock {
    /// `1 in S` and `S \ {1}` is a facet on `[2, n]`.
    First,
    /// `n in S` and `S \ {n}` is a facet on `[1, n - 1]`.
    Last,
}

/// Assigns each facet of `P^(2q+1)_n` to a block, preferring the first
/// when both apply; also returns the column of the reduced facet among the
/// facets of `P^2q_(n-1)`.
pub fn odd_blocks(n: usize, q: usize) -> Result<Vec<(GaleSet, OddBlock, usize)>> {
    if q == 0 || n <= 2 * q + 1 {
        return Err(Error::domain(format!(
            "odd construction needs n > 2q + 1, q >= 1; got n={n}, q={q}"
        )));
    }
    let polytope = CyclicPolytope::standard(n, 2 * q + 1)?;
    let reduced = geometry::enumerate_facets(&CyclicPolytope::standard(n - 1, 2 * q)?);
    let lookup: HashMap<&[i64], usize> = geometry::column_lookup(&reduced);
    let last = n as i64;
    geometry::enumerate_facets(&polytope)
        .into_iter()
        .map(|s| {
            let m = s.members();
            if m[0] == 1 {
                let rest: Vec<i64> = m[1..].iter().map(|x| x - 1).collect();
                if let Some(&c) = lookup.get(rest.as_slice()) {
                    return Ok((s, OddBlock::First, c));
                }
            }
            if m[m.len() - 1] == last {
                if let Some(&c) = lookup.get(&m[..m.len() - 1]) {
                    return Ok((s, OddBlock::Last, c));
                }
            }
            Err(Error::internal(format!("facet {s} fits neither block")))
        })
        .collect()
}

/// Factorization of the slack matrix of `P^(2q+1)_n` on two disjoint
/// coordinate blocks. Block one reuses the even factorization on `[2, n]`
/// with row `i` scaled by `i - 1` (zero at `i = 1`); block two uses it on
/// `[1, n - 1]` with row `i` scaled by `n - i` (zero at `i = n`).
pub fn factorize_odd(n: usize, q: usize) -> Result<NonnegFactorization> {
    let blocks = odd_blocks(n, q)?;
    let even = factorize_even(n - 1, q)?;
    let r = even.rank();
    let polytope = CyclicPolytope::standard(n, 2 * q + 1)?;

    let zeros = || std::iter::repeat_with(Rational::zero).take(r);
    let scaled = |row: &[Rational], s: i64| -> Vec<Rational> {
        let s = rational::int(s);
        row.iter()
            .map(|x| {
                if x.is_zero() {
                    Rational::zero()
                } else {
                    x * &s
                }
            })
            .collect()
    };
    let alpha: Vec<Vec<Rational>> = (1..=n as i64)
        .map(|i| {
            let mut v: Vec<Rational> = Vec::with_capacity(2 * r);
            if i == 1 {
                v.extend(zeros());
            } else {
                v.extend(scaled(&even.factors.alpha[(i - 2) as usize], i - 1));
            }
            if i == n as i64 {
                v.extend(zeros());
            } else {
                v.extend(scaled(&even.factors.alpha[(i - 1) as usize], n as i64 - i));
            }
            v
        })
        .collect();
    let mut columns = Vec::with_capacity(blocks.len());
    let beta = blocks
        .into_iter()
        .map(|(s, block, c)| {
            columns.push(s);
            let b = &even.factors.beta[c];
            let mut v = Vec::with_capacity(2 * r);
            match block {
                OddBlock::First => {
                    v.extend(b.iter().cloned());
                    v.extend(zeros());
                }
                OddBlock::Last => {
                    v.extend(zeros());
                    v.extend(b.iter().cloned());
                }
            }
            v
        })
        .collect();
    Ok(NonnegFactorization {
        target: polytope,
        columns,
        factors: Factors {
            rank: 2 * r,
            alpha,
            beta,
        },
    })
}

/// The product construction without the trivial fallback.
pub fn factorize_constructed(n: usize, d: usize) -> Result<NonnegFactorization> {
    if d < 2 || n <= d {
        return Err(Error::domain(format!("need n > d >= 2, got n={n}, d={d}")));
    }
    match d {
        2 => factorize_2d(n),
        _ if d.is_multiple_of(2) => factorize_even(n, d / 2),
        _ => factorize_odd(n, d / 2),
    }
}

/// Outcome of [`factorize`]: the returned factorization and both candidate
/// ranks.
#[derive(Debug, Clone)]
pub struct Factorized {
    pub factorization: NonnegFactorization,
    pub constructed_rank: u128,
    pub trivial_rank: u128,
    pub used_trivial: bool,
    pub bound: u128,
    pub even_bound: Option<u128>,
}

/// Factorization of the slack matrix of `P^d_n` with rank at most
/// `2 (2 floor(log2(n-1)) + 2)^floor(d/2)`; the trivial factorization is
/// returned instead whenever it is strictly smaller.
pub fn factorize(n: usize, d: usize) -> Result<Factorized> {
    if d < 2 || n <= d {
        return Err(Error::domain(format!("need n > d >= 2, got n={n}, d={d}")));
    }
    let constructed_rank = planned_rank(n, d);
    let trivial_rank = (n as u128).min(geometry::facet_count(d, n));
    let used_trivial = trivial_rank < constructed_rank;
    let factorization = if used_trivial {
        trivial_factorization(&geometry::slack_matrix(&CyclicPolytope::standard(n, d)?))
    } else {
        factorize_constructed(n, d)?
    };
    Ok(Factorized {
        factorization,
        constructed_rank,
        trivial_rank,
        used_trivial,
        bound: rank_bound(n, d),
        even_bound: even_bound(n, d),
    })
}

/// Moves a factorization of `P^d_[t1,t2]` to `P^d_[t1+by,t2+by]`; the slack
/// matrix is unchanged, only the labels move.
pub fn translate(f: &NonnegFactorization, by: i64) -> NonnegFactorization {
    NonnegFactorization {
        target: f.target.shifted(by),
        columns: f.columns.iter().map(|s| s.shifted(by)).collect(),
        factors: f.factors.clone(),
    }
}
