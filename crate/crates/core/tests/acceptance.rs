//! End-to-end acceptance checks. Each criterion prints one PASS or FAIL
//! line; the process fails if any criterion does.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cyclic_ef::cli;
use cyclic_ef::exact_lp::Sense;
use cyclic_ef::factorization::{self, Factors};
use cyclic_ef::geometry::{self, CyclicPolytope, Interval};
use cyclic_ef::lifting;
use cyclic_ef::rational::{BigInt, Rational};

use common::*;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

fn bound_sweep() -> Check {
    let start = Instant::now();
    let mut cases = 0;
    for d in 2..=7usize {
        for n in (d + 1)..=18usize {
            let out = factorization::factorize(n, d).map_err(|e| format!("d={d} n={n}: {e}"))?;
            let f = &out.factorization;
            let expected_cols = facets_oracle(d, 1, n as i64);
            let cols: Vec<Vec<i64>> = f.columns.iter().map(|s| s.members().to_vec()).collect();
            ensure(cols == expected_cols, || {
                format!("d={d} n={n}: column labels differ from the facet oracle")
            })?;
            reconstructs(&f.factors, |i, j| {
                slack_oracle(i as i64 + 1, &expected_cols[j])
            })
            .map_err(|e| format!("d={d} n={n}: {e}"))?;
            let rank = f.rank() as u128;
            let bound = 2 * planar_bound(n).pow((d / 2) as u32);
            ensure(rank <= bound, || {
                format!("d={d} n={n}: rank {rank} > {bound}")
            })?;
            if d % 2 == 0 {
                let even = planar_bound(n).pow((d / 2) as u32);
                ensure(rank <= even, || {
                    format!("d={d} n={n}: rank {rank} > even bound {even}")
                })?;
            }
            cases += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || {
        format!("sweep took {elapsed:?}")
    })?;
    Ok(format!(
        "{cases} (d, n) pairs reconstructed exactly in {:.2}s",
        elapsed.as_secs_f64()
    ))
}

fn planar_scaling() -> Check {
    let mut notes = Vec::new();
    for k in 3..=10u32 {
        let n = (1usize << k) + 1;
        let start = Instant::now();
        let f = factorization::factorize_2d(n).map_err(|e| format!("n={n}: {e}"))?;
        let elapsed = start.elapsed();
        ensure(elapsed < Duration::from_secs(60), || {
            format!("n={n} took {elapsed:?}")
        })?;
        let cols = polygon_edges(n as i64);
        let labels: Vec<Vec<i64>> = f.columns.iter().map(|s| s.members().to_vec()).collect();
        ensure(labels == cols, || format!("n={n}: column labels differ"))?;
        ensure(f.rank() as u32 <= 2 * k + 2, || {
            format!("n={n}: rank {} > {}", f.rank(), 2 * k + 2)
        })?;
        reconstructs(&f.factors, |i, j| slack_oracle(i as i64 + 1, &cols[j]))
            .map_err(|e| format!("n={n}: {e}"))?;
        notes.push(format!("{n}:{} in {:.2}s", f.rank(), elapsed.as_secs_f64()));
    }
    Ok(format!("n:rank {}", notes.join(", ")))
}

fn projection_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut solved = 0;
    for n in [5usize, 9, 17, 33, 64] {
        let ef = lifting::build_ef_2d(n).map_err(|e| e.to_string())?;
        for _ in 0..25 {
            let c = [rng.gen_range(-50i64..=50), rng.gen_range(-50i64..=50)];
            let obj = [int(c[0]), int(c[1])];
            let (lp, _) = lifting::optimize_over(&ef, &obj, Sense::Maximize)
                .map_err(|e| format!("n={n} c={c:?}: {e}"))?;
            let brute = (1..=n as i64)
                .map(|i| c[0] * i + c[1] * i * i)
                .max()
                .unwrap();
            ensure(lp == int(brute), || {
                format!("n={n} c={c:?}: LP {lp} vs brute force {brute}")
            })?;
            solved += 1;
        }
        ensure(ef.levels.first().map(|l| l.size) == Some(ef.size()), || {
            format!("n={n}: top level size is not the system size")
        })?;
        for pair in ef.levels.windows(2) {
            let (upper, lower) = (&pair[0], &pair[1]);
            let m = upper.interval.len();
            ensure(lower.interval.len() == m.div_ceil(2), || {
                format!(
                    "n={n}: level of {m} points recurses on {}",
                    lower.interval.len()
                )
            })?;
            ensure(upper.size <= lower.size + 2, || {
                format!("n={n}: size({m}) = {} > {} + 2", upper.size, lower.size)
            })?;
        }
        let base = ef.levels.last().expect("at least one level");
        ensure(base.size == base.interval.len(), || {
            format!("n={n}: base level is not the facet description")
        })?;
    }
    Ok(format!("{solved} objectives matched exactly"))
}

fn yannakakis_round_trip() -> Check {
    let mut solves = 0;
    for n in [5usize, 9, 17, 33] {
        let p = CyclicPolytope::standard(n, 2).map_err(|e| e.to_string())?;
        let ef = lifting::build_ef_2d(n).map_err(|e| e.to_string())?;
        let ex = lifting::extract_factorization(&p, &ef).map_err(|e| format!("n={n}: {e}"))?;
        ensure(ex.certified, || {
            format!("n={n}: an LP failed its certificate")
        })?;
        let cols = polygon_edges(n as i64);
        for (j, s) in cols.iter().enumerate() {
            // b_j = max over vertices of <a_j, v>, attained on the facet
            let ineq = geometry::facet_inequality(&p, &ex.factorization.columns[j])
                .map_err(|e| e.to_string())?;
            let top = (1..=n as i64)
                .map(|i| ineq.a[0].clone() * int(i) + ineq.a[1].clone() * int(i * i))
                .max()
                .unwrap();
            ensure(top == ineq.b && ex.optima[j] == ineq.b, || {
                format!("n={n} S={s:?}: optimum {} vs b {}", ex.optima[j], ineq.b)
            })?;
            solves += 1;
        }
        let f = &ex.factorization;
        ensure(f.rank() <= ef.size(), || {
            format!("n={n}: rank {} > {}", f.rank(), ef.size())
        })?;
        reconstructs(&f.factors, |i, j| slack_oracle(i as i64 + 1, &cols[j]))
            .map_err(|e| format!("n={n}: {e}"))?;
    }
    Ok(format!("{solves} facet LPs tight"))
}

fn random_factors(rng: &mut ChaCha8Rng, rows: usize, cols: usize, rank: usize) -> Factors {
    let mut vec = |len| {
        (0..len)
            .map(|_| int(rng.gen_range(0..=6)))
            .collect::<Vec<_>>()
    };
    let alpha = (0..rows).map(|_| vec(rank)).collect();
    let beta = (0..cols).map(|_| vec(rank)).collect();
    Factors::new(rank, alpha, beta).expect("consistent shapes")
}

fn dense(f: &Factors) -> Vec<Vec<BigInt>> {
    (0..f.rows())
        .map(|i| (0..f.cols()).map(|j| f.entry(i, j).to_integer()).collect())
        .collect()
}

fn hadamard_suite() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for case in 0..100 {
        let (ra, rb) = if rng.gen_bool(0.5) { (2, 3) } else { (3, 2) };
        let a = random_factors(&mut rng, 6, 7, ra);
        let b = random_factors(&mut rng, 6, 7, rb);
        let (ma, mb) = (dense(&a), dense(&b));
        let h = factorization::hadamard_factors(&a, &b).map_err(|e| e.to_string())?;
        ensure(h.rank == 6, || format!("case {case}: rank {}", h.rank))?;
        reconstructs(&h, |i, j| &ma[i][j] * &mb[i][j]).map_err(|e| format!("case {case}: {e}"))?;
    }
    Ok("100 random pairs, rank 6 each".into())
}

fn facet_oracle() -> Check {
    let mut total = 0;
    for (d, n) in [(2usize, 7usize), (3, 8), (4, 8), (5, 9)] {
        let p = CyclicPolytope::standard(n, d).map_err(|e| e.to_string())?;
        let got: Vec<Vec<i64>> = geometry::enumerate_facets(&p)
            .iter()
            .map(|s| s.members().to_vec())
            .collect();
        let want = facets_oracle(d, 1, n as i64);
        ensure(got == want, || {
            format!(
                "d={d} n={n}: {} facets vs {} from the oracle",
                got.len(),
                want.len()
            )
        })?;
        for s in geometry::enumerate_facets(&p) {
            let ineq = geometry::facet_inequality(&p, &s).map_err(|e| e.to_string())?;
            for i in 1..=n as i64 {
                let v = moment(i, d);
                let slack = ineq.b.clone()
                    - ineq
                        .a
                        .iter()
                        .zip(&v)
                        .fold(int(0), |acc, (x, y)| acc + x * y);
                ensure(slack >= int(0), || {
                    format!("d={d} n={n} S={s}: vertex {i} violates")
                })?;
                ensure((slack == int(0)) == s.contains(i), || {
                    format!("d={d} n={n} S={s}: vertex {i} tight mismatch")
                })?;
            }
        }
        total += got.len();
    }
    Ok(format!(
        "{total} facets matched and passed the hyperplane test"
    ))
}

fn polynomial_minimization() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut kinds = [0usize; 3];
    for case in 0..100 {
        let d = rng.gen_range(2..=6usize);
        let n = rng.gen_range(d + 1..=200usize);
        let coeffs = cli::random_polynomial(&mut rng, d);
        let report = cli::minimize_poly(&coeffs, Interval::first(n))
            .map_err(|e| format!("case {case}: {e}"))?;
        let brute = (1..=n as i64)
            .map(|t| coeffs.iter().rev().fold(int(0), |acc, c| acc * int(t) + c))
            .min()
            .unwrap();
        ensure(report.lp_value == brute, || {
            format!(
                "case {case} (d={d}, n={n}): LP {} vs brute force {brute}",
                report.lp_value
            )
        })?;
        kinds[report.ef as usize] += 1;
    }
    Ok(format!(
        "100 polynomials agree (reflection {}, factorization {}, vertices {})",
        kinds[0], kinds[1], kinds[2]
    ))
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("1 bound sweep 2<=d<=7, d<n<=18", bound_sweep),
        ("2 planar scaling n=2^k+1", planar_scaling),
        ("3 projection oracle", projection_oracle),
        ("4 factorization round trip", yannakakis_round_trip),
        ("5 hadamard suite", hadamard_suite),
        ("6 facet enumeration oracle", facet_oracle),
        ("7 polynomial minimization", polynomial_minimization),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|p| Err(format!("panicked: {}", panic_message(&p))));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(note) => println!("PASS criterion {name} ({secs:.2}s): {note}"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name} ({secs:.2}s): {why}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}

fn panic_message(p: &Box<dyn std::any::Any + Send>) -> String {
    p.downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| p.downcast_ref::<String>().cloned())
        .unwrap_or_default()
}
