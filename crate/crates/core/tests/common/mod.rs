//! Brute-force oracles shared by the integration tests. Nothing here calls
//! into the library's own geometry.

#![allow(dead_code)]

use cyclic_ef::factorization::Factors;
use cyclic_ef::rational::{BigInt, Rational};

/// `prod_{j in s} |j - i|`.
pub fn slack_oracle(i: i64, s: &[i64]) -> BigInt {
    s.iter()
        .fold(BigInt::from(1), |acc, &j| acc * BigInt::from((j - i).abs()))
}

pub fn moment(i: i64, d: usize) -> Vec<Rational> {
    let mut out = Vec::with_capacity(d);
    let mut acc = BigInt::from(1);
    for _ in 0..d {
        acc *= i;
        out.push(Rational::from_integer(acc.clone()));
    }
    out
}

/// All `k`-subsets of `lo..=hi` in lexicographic order.
pub fn subsets(lo: i64, hi: i64, k: usize) -> Vec<Vec<i64>> {
    fn go(next: i64, hi: i64, k: usize, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in next..=hi {
            cur.push(v);
            go(v + 1, hi, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(lo, hi, k, &mut Vec::new(), &mut out);
    out
}

/// Gale's condition from its definition: between two non-members the
/// number of members is even. Checking consecutive non-members suffices,
/// since longer gaps are sums of those.
pub fn gale_oracle(s: &[i64], t1: i64, t2: i64) -> bool {
    let outside: Vec<i64> = (t1..=t2).filter(|i| !s.contains(i)).collect();
    outside
        .windows(2)
        .all(|w| s.iter().filter(|&&m| w[0] < m && m < w[1]).count() % 2 == 0)
}

/// Edges of the polygon on `1..=n`: consecutive pairs and `{1, n}`.
pub fn polygon_edges(n: i64) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = (1..n).map(|i| vec![i, i + 1]).collect();
    if n > 2 {
        out.push(vec![1, n]);
    }
    out.sort();
    out
}

pub fn facets_oracle(d: usize, t1: i64, t2: i64) -> Vec<Vec<i64>> {
    subsets(t1, t2, d)
        .into_iter()
        .filter(|s| gale_oracle(s, t1, t2))
        .collect()
}

/// `v` as integers over a common denominator.
fn scaled(v: &[Rational]) -> (Vec<BigInt>, BigInt) {
    let den = v.iter().fold(BigInt::from(1), |acc, x| {
        num_integer::Integer::lcm(&acc, x.denom())
    });
    let nums = v.iter().map(|x| x.numer() * (&den / x.denom())).collect();
    (nums, den)
}

/// Checks every product `<alpha_i, beta_j>` against `expected(i, j)` and
/// every factor entry for nonnegativity.
pub fn reconstructs(f: &Factors, expected: impl Fn(usize, usize) -> BigInt) -> Result<(), String> {
    let zero = BigInt::from(0);
    for (k, v) in f.alpha.iter().chain(&f.beta).enumerate() {
        if v.len() != f.rank {
            return Err(format!("factor vector {k} has length {}", v.len()));
        }
        if v.iter().any(|x| x.numer() < &zero) {
            return Err(format!("factor vector {k} has a negative entry"));
        }
    }
    let betas: Vec<_> = f.beta.iter().map(|b| scaled(b)).collect();
    for (i, a) in f.alpha.iter().enumerate() {
        let (a, da) = scaled(a);
        for (j, (b, db)) in betas.iter().enumerate() {
            let got = a
                .iter()
                .zip(b)
                .fold(zero.clone(), |acc, (x, y)| acc + x * y);
            let want = expected(i, j);
            if got != &want * &da * db {
                return Err(format!(
                    "entry ({i}, {j}): expected {want}, got {}/{}",
                    got,
                    &da * db
                ));
            }
        }
    }
    Ok(())
}

/// `2 floor(log2(n - 1)) + 2`.
pub fn planar_bound(n: usize) -> u128 {
    let mut lg = 0;
    while (1usize << (lg + 1)) < n {
        lg += 1;
    }
    2 * lg as u128 + 2
}
