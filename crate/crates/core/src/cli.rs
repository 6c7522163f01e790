//! Command-line front end. Every command renders into an [`Outcome`] so the
//! binary and the tests share one code path.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact_lp::Sense;
use crate::factorization::{self, NonnegFactorization};
use crate::geometry::{self, CyclicPolytope, Interval};
use crate::io;
use crate::lifting::{self, ExtendedFormulation};
use crate::rational::{self, Rational};

/// Largest `facets * rank` for which minimize-poly builds the formulation
/// from a factorization instead of from the vertex list.
pub const FACTORIZATION_EF_BUDGET: u128 = 200_000;

#[derive(Debug, Parser)]
#[command(
    name = "cyclic-ef",
    version,
    about = "Extended formulations and slack-matrix factorizations of cyclic polytopes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the facets (Gale sets) of a cyclic polytope.
    Facets {
        #[command(flatten)]
        polytope: PolytopeArgs,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Print the slack matrix.
    Slack {
        #[command(flatten)]
        polytope: PolytopeArgs,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Build, verify and optionally save a nonnegative factorization.
    Factorize {
        #[command(flatten)]
        polytope: PolytopeArgs,
        /// Write the factorization as JSON to this file.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the report as JSON instead of text.
        #[arg(long, value_enum)]
        format: Option<Format>,
        /// Append a table comparing the constructed rank with the trivial
        /// one for every dimension.
        #[arg(long)]
        report: bool,
    },
    /// Check a factorization file against the slack matrix.
    Verify {
        path: PathBuf,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        d: Option<usize>,
    },
    /// Print an extended formulation.
    Ef {
        #[command(flatten)]
        polytope: PolytopeArgs,
        /// `json` for the JSON mirror; the default is the LP-style listing.
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Minimize a polynomial over the integers of an interval by one LP.
    MinimizePoly {
        /// Coefficients `c0,c1,...,cd` of `c0 + c1 t + ... + cd t^d`.
        #[arg(long, allow_hyphen_values = true)]
        coeffs: Option<String>,
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        t1: Option<i64>,
        /// Degree of a random polynomial when `--coeffs` is absent.
        #[arg(long)]
        d: Option<usize>,
        /// Seed for the random polynomial.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct PolytopeArgs {
    /// Number of points.
    #[arg(long)]
    pub n: Option<usize>,
    /// Dimension.
    #[arg(long)]
    pub d: usize,
    /// First point of the interval (default 1).
    #[arg(long, allow_hyphen_values = true)]
    pub t1: Option<i64>,
    /// Last point of the interval.
    #[arg(long, allow_hyphen_values = true)]
    pub t2: Option<i64>,
}

impl PolytopeArgs {
    pub fn polytope(&self) -> Result<CyclicPolytope> {
        let t1 = self.t1.unwrap_or(1);
        let t2 = match (self.n, self.t2) {
            (Some(n), Some(t2)) if t2 - t1 + 1 != n as i64 => {
                return Err(Error::domain(format!(
                    "--n {n} disagrees with [{t1}, {t2}]"
                )))
            }
            (_, Some(t2)) => t2,
            (Some(0), None) => return Err(Error::domain("--n must be positive")),
            (Some(n), None) => t1 + n as i64 - 1,
            (None, None) => return Err(Error::domain("give --n or --t2")),
        };
        CyclicPolytope::new(self.d, Interval::new(t1, t2)?)
    }
}

/// Exit code plus everything a command printed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            code: 0,
            stdout,
            stderr: String::new(),
        }
    }

    fn timed(mut self, timings: &[(&str, Duration)]) -> Self {
        for (label, t) in timings {
            let _ = writeln!(self.stderr, "time {label}: {:.3}s", t.as_secs_f64());
        }
        self
    }
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Domain(_) | Error::Parse(_) | Error::Io(_) | Error::Json(_) => EXIT_USAGE,
        Error::Internal(_) | Error::Projection(_) | Error::Malformed(_) => EXIT_VERIFY,
    }
}

/// Parses arguments and runs the command.
pub fn run_from<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli.command),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                Outcome::ok(text)
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            }
        }
    }
}

pub fn run(command: Command) -> Outcome {
    let result = match command {
        Command::Facets { polytope, format } => {
            polytope.polytope().and_then(|p| cmd_facets(&p, format))
        }
        Command::Slack { polytope, format } => {
            polytope.polytope().and_then(|p| cmd_slack(&p, format))
        }
        Command::Factorize {
            polytope,
            out,
            format,
            report,
        } => polytope
            .polytope()
            .and_then(|p| cmd_factorize(&p, out.as_deref(), format == Some(Format::Json), report)),
        Command::Verify { path, n, d } => cmd_verify(&path, n, d),
        Command::Ef { polytope, format } => polytope.polytope().and_then(|p| cmd_ef(&p, format)),
        Command::MinimizePoly {
            coeffs,
            n,
            t1,
            d,
            seed,
            format,
        } => poly_coeffs(coeffs.as_deref(), d, seed).and_then(|c| {
            let t1 = t1.unwrap_or(1);
            cmd_minimize_poly(
                &c,
                Interval::new(t1, t1 + n as i64 - 1)?,
                format == Some(Format::Json),
            )
        }),
    };
    result.unwrap_or_else(|e| Outcome {
        code: exit_code(&e),
        stdout: String::new(),
        stderr: format!("error: {e}\n"),
    })
}

pub fn cmd_facets(p: &CyclicPolytope, format: Format) -> Result<Outcome> {
    let facets = geometry::enumerate_facets(p);
    let text = match format {
        Format::Csv => io::facets_to_csv(&facets),
        Format::Json => io::facets_to_json(p, &facets)? + "\n",
    };
    Ok(Outcome::ok(text))
}

pub fn cmd_slack(p: &CyclicPolytope, format: Format) -> Result<Outcome> {
    let m = geometry::slack_matrix(p);
    let text = match format {
        Format::Csv => io::slack_to_csv(&m),
        Format::Json => io::slack_to_json(&m)? + "\n",
    };
    Ok(Outcome::ok(text))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunReport {
    pub d: usize,
    pub n: usize,
    pub t1: i64,
    pub t2: i64,
    pub rank: usize,
    /// Rank of the recursive construction, built or not.
    pub constructed_rank: u128,
    /// `min(n, facet count)`.
    pub trivial_rank: u128,
    pub facets: u128,
    pub method: &'static str,
    pub bound: u128,
    pub even_bound: Option<u128>,
    pub within_bound: bool,
    pub verified: bool,
    pub first_mismatch: Option<MismatchReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MismatchReport {
    pub i: i64,
    pub facet: Vec<i64>,
    pub expected: String,
    pub got: String,
}

fn opt(v: Option<u128>) -> String {
    v.map_or_else(|| "-".to_string(), |b| b.to_string())
}

impl RunReport {
    fn text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "polytope        P^{}_[{}, {}]",
            self.d, self.t1, self.t2
        );
        let _ = writeln!(out, "rank            {}", self.rank);
        let _ = writeln!(out, "method          {}", self.method);
        let _ = writeln!(out, "constructed     {}", self.constructed_rank);
        let _ = writeln!(out, "trivial         {}", self.trivial_rank);
        let _ = writeln!(out, "facets          {}", self.facets);
        let _ = writeln!(out, "bound           {}", self.bound);
        let _ = writeln!(out, "even bound      {}", opt(self.even_bound));
        let _ = writeln!(out, "within bound    {}", self.within_bound);
        let _ = writeln!(out, "verified        {}", self.verified);
        if let Some(m) = &self.first_mismatch {
            let _ = writeln!(
                out,
                "mismatch        i={} S={:?} expected={} got={}",
                m.i, m.facet, m.expected, m.got
            );
        }
        if let Some(path) = &self.output {
            let _ = writeln!(out, "output          {path}");
        }
        out
    }
}

fn check(p: &CyclicPolytope, f: &NonnegFactorization) -> Result<(bool, Option<MismatchReport>)> {
    let m = geometry::slack_matrix(p);
    let report = factorization::verify(&m, f)?;
    let mismatch = report.first_mismatch.map(|mm| MismatchReport {
        i: p.interval.t1 + mm.row as i64,
        facet: m.columns[mm.col].members().to_vec(),
        expected: mm.expected.to_string(),
        got: rational::format(&mm.got),
    });
    Ok((report.ok, mismatch))
}

pub fn cmd_factorize(
    p: &CyclicPolytope,
    out: Option<&std::path::Path>,
    json: bool,
    table: bool,
) -> Result<Outcome> {
    let (n, d) = (p.n(), p.d);
    let start = Instant::now();
    let built = factorization::factorize(n, d)?;
    let f = factorization::translate(&built.factorization, p.interval.t1 - 1);
    let t_build = start.elapsed();
    let start = Instant::now();
    let (verified, first_mismatch) = check(p, &f)?;
    let t_verify = start.elapsed();
    if let Some(path) = out {
        io::save_factorization(&f, path)?;
    }
    let report = RunReport {
        d,
        n,
        t1: p.interval.t1,
        t2: p.interval.t2,
        rank: f.rank(),
        constructed_rank: built.constructed_rank,
        trivial_rank: built.trivial_rank,
        facets: geometry::facet_count(d, n),
        method: if built.used_trivial {
            "trivial"
        } else {
            "constructed"
        },
        bound: built.bound,
        even_bound: built.even_bound,
        within_bound: f.rank() as u128 <= built.bound,
        verified,
        first_mismatch,
        output: out.map(|p| p.display().to_string()),
    };
    let mut text = if json {
        serde_json::to_string_pretty(&report)? + "\n"
    } else {
        report.text()
    };
    if table {
        text.push_str(&comparison_table(n));
    }
    let code = if verified { EXIT_OK } else { EXIT_VERIFY };
    Ok(Outcome {
        code,
        stdout: text,
        stderr: String::new(),
    }
    .timed(&[("factorize", t_build), ("verify", t_verify)]))
}

/// Constructed rank, bound and trivial rank for every dimension `2..n`,
/// stopping once the trivial size has won for good.
pub fn comparison_table(n: usize) -> String {
    let mut out = String::from("d\tconstructed\tbound\tfacets\ttrivial\twinner\n");
    for d in 2..n.min(41) {
        let constructed = factorization::planned_rank(n, d);
        let facets = geometry::facet_count(d, n);
        let trivial = (n as u128).min(facets);
        let winner = if constructed <= trivial {
            "constructed"
        } else {
            "trivial"
        };
        let _ = writeln!(
            out,
            "{d}\t{constructed}\t{}\t{facets}\t{trivial}\t{winner}",
            factorization::rank_bound(n, d)
        );
    }
    out
}

pub fn cmd_verify(path: &std::path::Path, n: Option<usize>, d: Option<usize>) -> Result<Outcome> {
    let f = io::load_factorization(path)?;
    if n.is_some_and(|n| n != f.target.n()) || d.is_some_and(|d| d != f.target.d) {
        return Err(Error::domain(format!(
            "dimension mismatch: file holds a factorization of {}, expected n={} d={}",
            f.target,
            opt(n.map(|v| v as u128)),
            opt(d.map(|v| v as u128)),
        )));
    }
    let (ok, mismatch) = check(&f.target, &f)?;
    let mut text = String::new();
    let _ = writeln!(text, "polytope  {}", f.target);
    let _ = writeln!(text, "rank      {}", f.rank());
    let _ = writeln!(text, "verified  {ok}");
    if let Some(m) = mismatch {
        let _ = writeln!(
            text,
            "mismatch  i={} S={:?} expected={} got={}",
            m.i, m.facet, m.expected, m.got
        );
    }
    Ok(Outcome {
        code: if ok { EXIT_OK } else { EXIT_VERIFY },
        stdout: text,
        stderr: String::new(),
    })
}

/// `build_ef_2d` in the plane, the factorization formulation otherwise.
pub fn build_ef(p: &CyclicPolytope) -> Result<ExtendedFormulation> {
    if p.d == 2 {
        let ef = lifting::build_ef_2d(p.n())?;
        return Ok(shift_ef(ef, p));
    }
    let built = factorization::factorize(p.n(), p.d)?;
    let f = factorization::translate(&built.factorization, p.interval.t1 - 1);
    lifting::ef_from_factorization(p, &f)
}

/// Moves a planar formulation of `P^2_[1,n]` onto the interval of `p`.
fn shift_ef(ef: ExtendedFormulation, p: &CyclicPolytope) -> ExtendedFormulation {
    if p.interval.t1 == 1 {
        return ef;
    }
    let shift = geometry::interval_shift_map(2, ef.polytope.interval, p.interval)
        .expect("intervals have equal length");
    let witnesses = ef.witnesses;
    ExtendedFormulation {
        polytope: *p,
        projection: shift.compose(&ef.projection),
        lifted: ef.lifted,
        witnesses,
        levels: ef.levels,
    }
}

pub fn cmd_ef(p: &CyclicPolytope, format: Option<Format>) -> Result<Outcome> {
    let start = Instant::now();
    let ef = build_ef(p)?;
    let elapsed = start.elapsed();
    let text = match format {
        None => io::ef_to_text(&ef),
        Some(Format::Json) => io::ef_to_json(&ef)? + "\n",
        Some(Format::Csv) => {
            return Err(Error::domain("extended formulations print as text or json"))
        }
    };
    Ok(Outcome::ok(text).timed(&[("ef", elapsed)]))
}

fn poly_coeffs(coeffs: Option<&str>, d: Option<usize>, seed: u64) -> Result<Vec<Rational>> {
    match (coeffs, d) {
        (Some(text), _) => text
            .split(',')
            .map(|c| {
                rational::parse(c).map_err(|_| Error::domain(format!("bad coefficient {c:?}")))
            })
            .collect(),
        (None, Some(d)) => Ok(random_polynomial(&mut ChaCha8Rng::seed_from_u64(seed), d)),
        (None, None) => Err(Error::domain("give --coeffs or --d")),
    }
}

/// Integer coefficients in `[-9, 9]` with a nonzero leading one.
pub fn random_polynomial<R: Rng>(rng: &mut R, d: usize) -> Vec<Rational> {
    let mut c: Vec<Rational> = (0..=d)
        .map(|_| rational::int(rng.gen_range(-9..=9)))
        .collect();
    if d > 0 && c[d] == rational::zero() {
        c[d] = rational::int(if rng.gen_bool(0.5) { 1 } else { -1 });
    }
    c
}

pub fn eval_poly(coeffs: &[Rational], t: i64) -> Rational {
    let t = Rational::from_integer(BigInt::from(t));
    coeffs
        .iter()
        .rev()
        .fold(rational::zero(), |acc, c| acc * &t + c)
}

/// Which formulation the LP ran over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EfKind {
    Reflection,
    Factorization,
    Vertices,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MinimizeReport {
    pub d: usize,
    pub t1: i64,
    pub t2: i64,
    #[serde(with = "rational::serde_rational::vec")]
    pub coeffs: Vec<Rational>,
    pub ef: EfKind,
    pub ef_size: usize,
    #[serde(with = "rational::serde_rational")]
    pub lp_value: Rational,
    #[serde(with = "rational::serde_rational")]
    pub brute_value: Rational,
    /// Smallest minimizer found by brute force.
    pub t_star: i64,
    /// Vertex the LP optimum landed on, when it is one.
    pub lp_vertex: Option<i64>,
    pub agree: bool,
}

impl MinimizeReport {
    fn text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "polytope     P^{}_[{}, {}]", self.d, self.t1, self.t2);
        let _ = writeln!(
            out,
            "formulation  {} ({} inequalities)",
            self.ef.name(),
            self.ef_size
        );
        let _ = writeln!(out, "lp value     {}", rational::format(&self.lp_value));
        let _ = writeln!(out, "brute value  {}", rational::format(&self.brute_value));
        let _ = writeln!(out, "t*           {}", self.t_star);
        let _ = writeln!(
            out,
            "lp vertex    {}",
            self.lp_vertex.map_or("-".to_string(), |t| t.to_string())
        );
        let _ = writeln!(out, "agree        {}", self.agree);
        out
    }
}

impl EfKind {
    fn name(self) -> &'static str {
        match self {
            EfKind::Reflection => "reflection",
            EfKind::Factorization => "factorization",
            EfKind::Vertices => "vertices",
        }
    }
}

/// Formulation used for an LP over `p`: the planar reflection system; the
/// factorization system when the constructed rank beats `n` and the system
/// fits the budget; else the vertex system, which is what the trivial
/// factorization would give anyway.
pub fn minimization_ef(p: &CyclicPolytope) -> Result<(EfKind, ExtendedFormulation)> {
    if p.d == 2 {
        return Ok((EfKind::Reflection, build_ef(p)?));
    }
    let (n, d) = (p.n(), p.d);
    let rank = factorization::planned_rank(n, d);
    let facets = geometry::facet_count(d, n);
    if rank < (n as u128).min(facets) && facets.saturating_mul(rank) <= FACTORIZATION_EF_BUDGET {
        let mut ef = build_ef(p)?;
        ef.lifted = ef.lifted.with_independent_equations()?;
        return Ok((EfKind::Factorization, ef));
    }
    Ok((EfKind::Vertices, lifting::vertex_ef(p)))
}

pub fn minimize_poly(coeffs: &[Rational], interval: Interval) -> Result<MinimizeReport> {
    if coeffs.len() < 3 {
        return Err(Error::domain(format!(
            "need degree at least 2, got {} coefficients",
            coeffs.len()
        )));
    }
    let d = coeffs.len() - 1;
    let p = CyclicPolytope::new(d, interval)?;
    let (kind, ef) = minimization_ef(&p)?;
    let (value, x) = lifting::optimize_over(&ef, &coeffs[1..], Sense::Minimize)?;
    let lp_value = value + &coeffs[0];
    let (t_star, brute_value) = interval
        .points()
        .map(|t| (t, eval_poly(coeffs, t)))
        .reduce(|best, cur| if cur.1 < best.1 { cur } else { best })
        .expect("interval is nonempty");
    let lp_vertex = (x.len() == d && x[0].is_integer())
        .then(|| x[0].to_integer())
        .and_then(|t| i64::try_from(t).ok())
        .filter(|&t| interval.contains(t) && x == p.vertex_rational(t));
    Ok(MinimizeReport {
        d,
        t1: interval.t1,
        t2: interval.t2,
        coeffs: coeffs.to_vec(),
        ef: kind,
        ef_size: ef.size(),
        agree: lp_value == brute_value,
        lp_value,
        brute_value,
        t_star,
        lp_vertex,
    })
}

pub fn cmd_minimize_poly(coeffs: &[Rational], interval: Interval, json: bool) -> Result<Outcome> {
    let start = Instant::now();
    let report = minimize_poly(coeffs, interval)?;
    let elapsed = start.elapsed();
    let text = if json {
        serde_json::to_string_pretty(&report)? + "\n"
    } else {
        report.text()
    };
    let code = if report.agree { EXIT_OK } else { EXIT_VERIFY };
    Ok(Outcome {
        code,
        stdout: text,
        stderr: String::new(),
    }
    .timed(&[("minimize", elapsed)]))
}
