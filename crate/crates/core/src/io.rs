//! JSON and CSV formats for slack matrices, facet lists, factorizations and
//! extended formulations.

use std::fmt::Write as _;
use std::path::Path;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_lp::LinearConstraint;
use crate::factorization::{Factors, NonnegFactorization};
use crate::geometry::{AffineMap, CyclicPolytope, GaleSet, Interval, SlackMatrix};
use crate::lifting::{ExtendedFormulation, Level};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Target {
    pub d: usize,
    pub t1: i64,
    pub t2: i64,
}

impl Target {
    pub fn of(p: &CyclicPolytope) -> Self {
        Target {
            d: p.d,
            t1: p.interval.t1,
            t2: p.interval.t2,
        }
    }

    pub fn polytope(&self) -> Result<CyclicPolytope> {
        CyclicPolytope::new(self.d, Interval::new(self.t1, self.t2)?)
    }
}

fn members(columns: &[GaleSet]) -> Vec<Vec<i64>> {
    columns.iter().map(|s| s.members().to_vec()).collect()
}

fn label(s: &GaleSet) -> String {
    s.members()
        .iter()
        .map(i64::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Serialize, Deserialize)]
struct SlackJson {
    d: usize,
    t1: i64,
    t2: i64,
    columns: Vec<Vec<i64>>,
    #[serde(with = "rational::serde_bigint_matrix")]
    rows: Vec<Vec<BigInt>>,
}

pub fn slack_to_json(m: &SlackMatrix) -> Result<String> {
    let doc = SlackJson {
        d: m.polytope.d,
        t1: m.polytope.interval.t1,
        t2: m.polytope.interval.t2,
        columns: members(&m.columns),
        rows: m.entries.clone(),
    };
    Ok(serde_json::to_string_pretty(&doc)?)
}

/// Parses a slack matrix and checks every entry against the closed form.
pub fn slack_from_json(text: &str) -> Result<SlackMatrix> {
    let doc: SlackJson = serde_json::from_str(text)?;
    let polytope = Target {
        d: doc.d,
        t1: doc.t1,
        t2: doc.t2,
    }
    .polytope()?;
    let expected = crate::geometry::slack_matrix(&polytope);
    if members(&expected.columns) != doc.columns || expected.entries != doc.rows {
        return Err(Error::Parse(format!(
            "slack matrix does not match {polytope}"
        )));
    }
    Ok(expected)
}

/// Header `i,<facet>,...` with facet members separated by spaces, then one
/// row per vertex index.
pub fn slack_to_csv(m: &SlackMatrix) -> String {
    let mut out = String::from("i");
    for s in &m.columns {
        out.push(',');
        out.push_str(&label(s));
    }
    out.push('\n');
    for (i, row) in m.polytope.interval.points().zip(&m.entries) {
        out.push_str(&i.to_string());
        for v in row {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct FacetsJson<'a> {
    d: usize,
    t1: i64,
    t2: i64,
    count: usize,
    facets: &'a [GaleSet],
}

pub fn facets_to_json(p: &CyclicPolytope, facets: &[GaleSet]) -> Result<String> {
    let doc = FacetsJson {
        d: p.d,
        t1: p.interval.t1,
        t2: p.interval.t2,
        count: facets.len(),
        facets,
    };
    Ok(serde_json::to_string_pretty(&doc)?)
}

/// One facet per line, members separated by commas.
pub fn facets_to_csv(facets: &[GaleSet]) -> String {
    let mut out = String::new();
    for s in facets {
        let line: Vec<String> = s.members().iter().map(i64::to_string).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

#[derive(Serialize, Deserialize)]
struct FactorizationJson {
    target: Target,
    rank: usize,
    #[serde(with = "rational::serde_rational::matrix")]
    alpha: Vec<Vec<Rational>>,
    #[serde(with = "rational::serde_rational::matrix")]
    beta: Vec<Vec<Rational>>,
    columns: Vec<Vec<i64>>,
}

pub fn factorization_to_json(f: &NonnegFactorization) -> Result<String> {
    let doc = FactorizationJson {
        target: Target::of(&f.target),
        rank: f.rank(),
        alpha: f.factors.alpha.clone(),
        beta: f.factors.beta.clone(),
        columns: members(&f.columns),
    };
    Ok(serde_json::to_string_pretty(&doc)?)
}

/// Parses a factorization. Shapes and column labels are validated; the
/// entries themselves are left to [`crate::factorization::verify`].
pub fn factorization_from_json(text: &str) -> Result<NonnegFactorization> {
    let doc: FactorizationJson = serde_json::from_str(text)?;
    let target = doc.target.polytope()?;
    if doc.alpha.len() != target.n() {
        return Err(Error::Parse(format!(
            "{} alpha vectors for {} vertices",
            doc.alpha.len(),
            target.n()
        )));
    }
    if doc.beta.len() != doc.columns.len() {
        return Err(Error::Parse(format!(
            "{} beta vectors for {} columns",
            doc.beta.len(),
            doc.columns.len()
        )));
    }
    let columns = doc
        .columns
        .into_iter()
        .map(|m| GaleSet::new(m, &target))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| Error::Parse(e.to_string()))?;
    let factors =
        Factors::new(doc.rank, doc.alpha, doc.beta).map_err(|e| Error::Parse(e.to_string()))?;
    Ok(NonnegFactorization {
        target,
        columns,
        factors,
    })
}

pub fn save_factorization(f: &NonnegFactorization, path: &Path) -> Result<()> {
    std::fs::write(path, factorization_to_json(f)? + "\n")?;
    Ok(())
}

pub fn load_factorization(path: &Path) -> Result<NonnegFactorization> {
    factorization_from_json(&std::fs::read_to_string(path)?)
}

fn linear_form(coeffs: &[Rational], names: &[String]) -> String {
    let mut out = String::new();
    for (c, name) in coeffs.iter().zip(names) {
        if c.is_zero() {
            continue;
        }
        let (sign, mag) = if c < &rational::zero() {
            ("-", -c)
        } else {
            ("+", c.clone())
        };
        if out.is_empty() {
            if sign == "-" {
                out.push('-');
            }
        } else {
            let _ = write!(out, " {sign} ");
        }
        if mag != rational::one() {
            let _ = write!(out, "{} ", rational::format(&mag));
        }
        out.push_str(name);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// LP-style listing of an extended formulation: variables, equations,
/// inequalities and the projection rows.
pub fn ef_to_text(ef: &ExtendedFormulation) -> String {
    let names = &ef.lifted.variables;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "\\ extension of {} with {} inequalities",
        ef.polytope,
        ef.size()
    );
    out.push_str("variables\n");
    let _ = writeln!(out, "  {}", names.join(" "));
    out.push_str("equations\n");
    for (k, c) in ef.lifted.equations.iter().enumerate() {
        let _ = writeln!(
            out,
            "  e{}: {} = {}",
            k + 1,
            linear_form(&c.coeffs, names),
            rational::format(&c.rhs)
        );
    }
    out.push_str("inequalities\n");
    for (k, c) in ef.lifted.inequalities.iter().enumerate() {
        let _ = writeln!(
            out,
            "  c{}: {} <= {}",
            k + 1,
            linear_form(&c.coeffs, names),
            rational::format(&c.rhs)
        );
    }
    out.push_str("projection\n");
    for (k, (row, off)) in ef
        .projection
        .linear
        .iter()
        .zip(&ef.projection.offset)
        .enumerate()
    {
        let mut rhs = linear_form(row, names);
        if off.is_positive() {
            let _ = write!(rhs, " + {}", rational::format(off));
        } else if off.is_negative() {
            let _ = write!(rhs, " - {}", rational::format(&-off));
        }
        let _ = writeln!(out, "  p{} = {rhs}", k + 1);
    }
    out.push_str("end\n");
    out
}

#[derive(Serialize)]
struct EfJson<'a> {
    target: Target,
    size: usize,
    variables: &'a [String],
    equations: &'a [LinearConstraint],
    inequalities: &'a [LinearConstraint],
    projection: &'a AffineMap,
    #[serde(with = "rational::serde_rational::matrix")]
    witnesses: Vec<Vec<Rational>>,
    levels: &'a [Level],
}

pub fn ef_to_json(ef: &ExtendedFormulation) -> Result<String> {
    let doc = EfJson {
        target: Target::of(&ef.polytope),
        size: ef.size(),
        variables: &ef.lifted.variables,
        equations: &ef.lifted.equations,
        inequalities: &ef.lifted.inequalities,
        projection: &ef.projection,
        witnesses: ef.witnesses.clone(),
        levels: &ef.levels,
    };
    Ok(serde_json::to_string_pretty(&doc)?)
}
