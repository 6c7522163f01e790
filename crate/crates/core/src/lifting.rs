//! Extended formulations of cyclic polytopes.
//!
//! Three constructions live here: the recursive reflection formulation of
//! `P^2_n` with logarithmically many inequalities, the formulation induced
//! by a nonnegative factorization of the slack matrix, and the plain vertex
//! formulation. [`factorization_from_ef`] goes the other way and reads a
//! nonnegative factorization off any formulation through LP duality.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_lp::{certify, LinearConstraint, LinearProgram, Sense, Simplex, VarKind};
use crate::factorization::{self, Factors, NonnegFactorization};
use crate::geometry::{self, AffineMap, CyclicPolytope, Interval};
use crate::rational::{self, int, Rational};

/// `{x : E x = e, C x <= h}` over named variables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Polyhedron {
    pub variables: Vec<String>,
    pub equations: Vec<LinearConstraint>,
    pub inequalities: Vec<LinearConstraint>,
}

impl Polyhedron {
    /// Number of inequalities; equations do not count.
    pub fn size(&self) -> usize {
        self.inequalities.len()
    }

    pub fn dim(&self) -> usize {
        self.variables.len()
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        x.len() == self.dim()
            && self.equations.iter().all(|c| c.lhs(x) == c.rhs)
            && self.inequalities.iter().all(|c| !c.slack(x).is_negative())
    }

    /// `h - C x`, one entry per inequality.
    pub fn inequality_slacks(&self, x: &[Rational]) -> Vec<Rational> {
        self.inequalities.iter().map(|c| c.slack(x)).collect()
    }

    /// The same polyhedron with linearly dependent equations dropped.
    /// Fails if the equations are inconsistent.
    pub fn with_independent_equations(&self) -> Result<Polyhedron> {
        let n = self.dim();
        // reduced rows kept in echelon form: (pivot column, row, rhs)
        let mut basis: Vec<(usize, Vec<Rational>, Rational)> = Vec::new();
        let mut kept = Vec::new();
        for eq in &self.equations {
            let mut row = eq.coeffs.clone();
            let mut rhs = eq.rhs.clone();
            for (col, b, brhs) in &basis {
                if row[*col].is_zero() {
                    continue;
                }
                let f = row[*col].clone();
                for k in 0..n {
                    if !b[k].is_zero() {
                        let delta = &f * &b[k];
                        row[k] -= delta;
                    }
                }
                rhs -= &f * brhs;
            }
            match row.iter().position(|v| !v.is_zero()) {
                Some(col) => {
                    let p = row[col].clone();
                    for v in row.iter_mut() {
                        *v /= &p;
                    }
                    rhs /= &p;
                    basis.push((col, row, rhs));
                    kept.push(eq.clone());
                }
                None if rhs.is_zero() => {}
                None => return Err(Error::Malformed("inconsistent equations".into())),
            }
        }
        Ok(Polyhedron {
            variables: self.variables.clone(),
            equations: kept,
            inequalities: self.inequalities.clone(),
        })
    }

    /// An LP over this polyhedron. Inequalities of the form `-a x_k <= 0`
    /// with `a > 0` become sign constraints; the returned map says where
    /// each inequality went.
    pub fn to_lp(
        &self,
        objective: Vec<Rational>,
        sense: Sense,
    ) -> (LinearProgram, Vec<InequalitySlot>) {
        let n = self.dim();
        let mut lp = LinearProgram::new(sense, objective);
        lp.variables = self.variables.clone();
        lp.equations = self.equations.clone();
        let mut slots = Vec::with_capacity(self.size());
        for c in &self.inequalities {
            let mut nonzero = c.coeffs.iter().enumerate().filter(|(_, v)| !v.is_zero());
            let single = match (nonzero.next(), nonzero.next()) {
                (Some((k, a)), None) if a.is_negative() && c.rhs.is_zero() => Some((k, -a)),
                _ => None,
            };
            match single {
                Some((k, scale)) if lp.kinds[k] == VarKind::Free => {
                    lp.kinds[k] = VarKind::NonNegative;
                    slots.push(InequalitySlot::Bound { var: k, scale });
                }
                _ => {
                    slots.push(InequalitySlot::Row(lp.inequalities.len()));
                    lp.inequalities.push(c.clone());
                }
            }
        }
        debug_assert_eq!(lp.num_vars(), n);
        (lp, slots)
    }
}

/// Where an inequality of a [`Polyhedron`] ended up in its LP.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InequalitySlot {
    Row(usize),
    /// `-scale * x_var <= 0`, carried as the sign constraint `x_var >= 0`.
    Bound {
        var: usize,
        scale: Rational,
    },
}

/// One step of the recursive planar construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Step {
    /// Facet description of a polygon with at most four vertices.
    Base,
    /// Odd point count: centered on `[-k+1, k-1]` and folded onto
    /// `[0, k-1]` by `x1 -> -x1`.
    Reflection,
    /// Even point count: centered on `[-k+1, k]` and folded onto `[1, k]`
    /// by the shear `(x1, x2) -> (1 - x1, x2 - 2 x1 + 1)`.
    Shear,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Level {
    /// Interval whose polygon this level's variables range over.
    pub interval: Interval,
    pub step: Step,
    /// Index shift that centers `interval`.
    pub shift: i64,
    /// Inequalities contributed by this level and all levels below it.
    pub size: usize,
}

/// A lifted polyhedron with an affine projection onto a cyclic polytope and
/// a lifted preimage for every vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendedFormulation {
    pub polytope: CyclicPolytope,
    pub lifted: Polyhedron,
    pub projection: AffineMap,
    /// Lifted point above each vertex, in interval order.
    pub witnesses: Vec<Vec<Rational>>,
    /// Recursion levels, top first; empty unless built by [`build_ef_2d`].
    pub levels: Vec<Level>,
}

impl ExtendedFormulation {
    pub fn size(&self) -> usize {
        self.lifted.size()
    }

    pub fn witness(&self, i: i64) -> Result<&[Rational]> {
        let pos = self.polytope.position(i)?;
        Ok(&self.witnesses[pos])
    }

    /// Checks that every witness lies in the lifted polyhedron and projects
    /// to its vertex.
    pub fn check_witnesses(&self) -> Result<()> {
        if self.witnesses.len() != self.polytope.n() {
            return Err(Error::Projection(format!(
                "{} witnesses for {} vertices",
                self.witnesses.len(),
                self.polytope.n()
            )));
        }
        for (w, i) in self.witnesses.iter().zip(self.polytope.interval.points()) {
            if !self.lifted.contains(w) {
                return Err(Error::Projection(format!(
                    "witness of vertex {i} is infeasible"
                )));
            }
            if self.projection.apply(w) != self.polytope.vertex_rational(i) {
                return Err(Error::Projection(format!(
                    "witness of vertex {i} does not project onto it"
                )));
            }
        }
        Ok(())
    }
}

fn level_vars(level: usize) -> (String, String) {
    if level == 0 {
        ("x1".into(), "x2".into())
    } else {
        (format!("z{level}_1"), format!("z{level}_2"))
    }
}

/// Sparse row used while the variable count is still growing.
struct SparseRow {
    terms: Vec<(usize, Rational)>,
    rhs: Rational,
}

impl SparseRow {
    fn new(terms: &[(usize, i64)], rhs: i64) -> Self {
        SparseRow {
            terms: terms
                .iter()
                .filter(|(_, c)| *c != 0)
                .map(|&(v, c)| (v, int(c)))
                .collect(),
            rhs: int(rhs),
        }
    }

    fn dense(&self, n: usize) -> LinearConstraint {
        let mut coeffs = vec![Rational::zero(); n];
        for (v, c) in &self.terms {
            coeffs[*v] += c;
        }
        LinearConstraint::new(coeffs, self.rhs.clone())
    }
}

/// Number of points below which the planar recursion stops.
const BASE_POINTS: usize = 4;

/// Inequality count of [`build_ef_2d`] on `n` points.
pub fn ef_2d_size(n: usize) -> usize {
    if n <= BASE_POINTS {
        n
    } else {
        ef_2d_size(n.div_ceil(2)) + 2
    }
}

/// The reflection formulation of `P^2_n`.
///
/// Each level with `m >= 5` points centers its interval, introduces the
/// variables of the next level as a point of the half-size polygon, and
/// adds one equation and two inequalities tying the two together. The
/// recursion stops at polygons with at most four vertices, which get their
/// facet description.
pub fn build_ef_2d(n: usize) -> Result<ExtendedFormulation> {
    if n < 3 {
        return Err(Error::domain(format!(
            "planar formulation needs n >= 3, got {n}"
        )));
    }
    let polytope = CyclicPolytope::standard(n, 2)?;
    let mut variables = Vec::new();
    let mut equations = Vec::new();
    let mut inequalities = Vec::new();
    let mut levels = Vec::new();

    let mut interval = polytope.interval;
    let mut level = 0;
    loop {
        let (a, b) = level_vars(level);
        variables.push(a);
        variables.push(b);
        let (p1, p2) = (2 * level, 2 * level + 1);
        let m = interval.len();
        if m <= BASE_POINTS {
            let base = CyclicPolytope::new(2, interval)?;
            for s in geometry::enumerate_facets(&base) {
                let f = geometry::facet_inequality(&base, &s)?;
                inequalities.push(SparseRow {
                    terms: vec![(p1, f.a[0].clone()), (p2, f.a[1].clone())],
                    rhs: f.b,
                });
            }
            levels.push(Level {
                interval,
                step: Step::Base,
                shift: 0,
                size: 0,
            });
            break;
        }
        let k = m.div_ceil(2) as i64;
        let c = (1 - k) - interval.t1;
        let (q1, q2) = (p1 + 2, p2 + 2);
        // centered coordinates: u1 = p1 + c, u2 = p2 + 2c p1 + c^2
        let (step, next) = if m % 2 == 1 {
            // z2 = u2;  -z1 <= u1 <= z1
            equations.push(SparseRow::new(&[(q2, 1), (p2, -1), (p1, -2 * c)], c * c));
            inequalities.push(SparseRow::new(&[(q1, -1), (p1, -1)], c));
            inequalities.push(SparseRow::new(&[(p1, 1), (q1, -1)], -c));
            (Step::Reflection, Interval { t1: 0, t2: k - 1 })
        } else {
            // z2 - z1 = u2 - u1;  2 - 3 z1 + z2 <= u1 + u2 <= z1 + z2
            equations.push(SparseRow::new(
                &[(q2, 1), (q1, -1), (p2, -1), (p1, 1 - 2 * c)],
                c * c - c,
            ));
            inequalities.push(SparseRow::new(
                &[(q1, -3), (q2, 1), (p1, -(1 + 2 * c)), (p2, -1)],
                c + c * c - 2,
            ));
            inequalities.push(SparseRow::new(
                &[(p1, 1 + 2 * c), (p2, 1), (q1, -1), (q2, -1)],
                -c - c * c,
            ));
            (Step::Shear, Interval { t1: 1, t2: k })
        };
        levels.push(Level {
            interval,
            step,
            shift: c,
            size: 0,
        });
        interval = next;
        level += 1;
    }
    let mut below = 0;
    for lv in levels.iter_mut().rev() {
        below += if lv.step == Step::Base {
            lv.interval.len()
        } else {
            2
        };
        lv.size = below;
    }

    let dim = variables.len();
    let lifted = Polyhedron {
        variables,
        equations: equations.iter().map(|r| r.dense(dim)).collect(),
        inequalities: inequalities.iter().map(|r| r.dense(dim)).collect(),
    };
    let mut ef = ExtendedFormulation {
        polytope,
        lifted,
        projection: AffineMap::coordinate_projection(2, dim),
        witnesses: Vec::new(),
        levels,
    };
    ef.witnesses = polytope
        .interval
        .points()
        .map(|i| lift_vertex_2d(&ef, i))
        .collect::<Result<_>>()?;
    Ok(ef)
}

/// Lifted point above vertex `i` of a formulation built by [`build_ef_2d`].
///
/// On a reflection level the centered index `t` continues as `|t|`; on a
/// shear level it continues as `t` when `t >= 1` and as `1 - t` otherwise.
pub fn lift_vertex_2d(ef: &ExtendedFormulation, i: i64) -> Result<Vec<Rational>> {
    ef.polytope.position(i)?;
    if ef.levels.is_empty() {
        return Err(Error::domain(
            "formulation was not built by the planar recursion",
        ));
    }
    let mut point = Vec::with_capacity(2 * ef.levels.len());
    let mut t = i;
    for lv in &ef.levels {
        point.push(int(t));
        point.push(int(t * t));
        let u = t + lv.shift;
        t = match lv.step {
            Step::Base => break,
            Step::Reflection => u.abs(),
            Step::Shear if u >= 1 => u,
            Step::Shear => 1 - u,
        };
    }
    Ok(point)
}

/// The formulation `{(x, y) : b_j - <a_j, x> = <beta_j, y>, y >= 0}` of a
/// verified factorization, with witnesses `(v_i, alpha_i)`.
pub fn ef_from_factorization(
    polytope: &CyclicPolytope,
    f: &NonnegFactorization,
) -> Result<ExtendedFormulation> {
    if f.target != *polytope {
        return Err(Error::domain(format!(
            "factorization targets {} but polytope is {polytope}",
            f.target
        )));
    }
    let report = factorization::verify(&geometry::slack_matrix(polytope), f)?;
    if !report.ok {
        return Err(Error::domain(
            "factorization does not verify against the slack matrix",
        ));
    }
    let d = polytope.d;
    let r = f.rank();
    let dim = d + r;
    let mut variables: Vec<String> = (1..=d).map(|k| format!("x{k}")).collect();
    variables.extend((1..=r).map(|k| format!("y{k}")));

    let inequalities = (0..r)
        .map(|k| {
            let mut coeffs = vec![Rational::zero(); dim];
            coeffs[d + k] = int(-1);
            LinearConstraint::new(coeffs, Rational::zero())
        })
        .collect();
    let equations = f
        .columns
        .iter()
        .zip(&f.factors.beta)
        .map(|(s, beta)| {
            let ineq = geometry::facet_inequality(polytope, s)?;
            let mut coeffs = ineq.a;
            coeffs.extend(beta.iter().cloned());
            Ok(LinearConstraint::new(coeffs, ineq.b))
        })
        .collect::<Result<_>>()?;
    let witnesses = polytope
        .interval
        .points()
        .zip(&f.factors.alpha)
        .map(|(i, alpha)| {
            let mut w = polytope.vertex_rational(i);
            w.extend(alpha.iter().cloned());
            w
        })
        .collect();
    Ok(ExtendedFormulation {
        polytope: *polytope,
        lifted: Polyhedron {
            variables,
            equations,
            inequalities,
        },
        projection: AffineMap::coordinate_projection(d, dim),
        witnesses,
        levels: Vec::new(),
    })
}

/// `{(x, l) : x = sum_i l_i v_i, sum_i l_i = 1, l >= 0}`, of size `n`.
pub fn vertex_ef(polytope: &CyclicPolytope) -> ExtendedFormulation {
    let d = polytope.d;
    let n = polytope.n();
    let dim = d + n;
    let mut variables: Vec<String> = (1..=d).map(|k| format!("x{k}")).collect();
    variables.extend((1..=n).map(|k| format!("l{k}")));
    let vertices: Vec<Vec<Rational>> = polytope
        .interval
        .points()
        .map(|i| polytope.vertex_rational(i))
        .collect();

    let mut equations = Vec::with_capacity(d + 1);
    for coord in 0..d {
        let mut coeffs = vec![Rational::zero(); dim];
        coeffs[coord] = rational::one();
        for (p, v) in vertices.iter().enumerate() {
            coeffs[d + p] = -&v[coord];
        }
        equations.push(LinearConstraint::new(coeffs, Rational::zero()));
    }
    let mut convex = vec![Rational::zero(); dim];
    for c in convex.iter_mut().skip(d) {
        *c = rational::one();
    }
    equations.push(LinearConstraint::new(convex, rational::one()));
    let inequalities = (0..n)
        .map(|p| {
            let mut coeffs = vec![Rational::zero(); dim];
            coeffs[d + p] = int(-1);
            LinearConstraint::new(coeffs, Rational::zero())
        })
        .collect();
    let witnesses = vertices
        .iter()
        .enumerate()
        .map(|(p, v)| {
            let mut w = v.clone();
            w.extend((0..n).map(|q| {
                if q == p {
                    rational::one()
                } else {
                    Rational::zero()
                }
            }));
            w
        })
        .collect();
    ExtendedFormulation {
        polytope: *polytope,
        lifted: Polyhedron {
            variables,
            equations,
            inequalities,
        },
        projection: AffineMap::coordinate_projection(d, dim),
        witnesses,
        levels: Vec::new(),
    }
}

/// Result of reading a factorization off an extended formulation.
#[derive(Debug, Clone)]
pub struct Extraction {
    pub factorization: NonnegFactorization,
    /// Per facet, the LP maximum of `<a_j, x>` over the formulation.
    pub optima: Vec<Rational>,
    /// Every per-facet LP result passed [`certify`].
    pub certified: bool,
    pub pivots: usize,
}

/// Reads a factorization off a formulation through LP duality.
///
/// `alpha_i` is the inequality slack of the witness above vertex `i`. For
/// each facet `<a_j, x> <= b_j` the LP `max <a_j, pi(w)>` over the lifted
/// polyhedron must reach exactly `b_j`; its inequality multipliers are
/// `beta_j`. The LPs share one tableau and run in canonical facet order,
/// each starting from the previous optimal basis.
pub fn extract_factorization(
    polytope: &CyclicPolytope,
    ef: &ExtendedFormulation,
) -> Result<Extraction> {
    if ef.polytope != *polytope {
        return Err(Error::domain(format!(
            "formulation is for {} but polytope is {polytope}",
            ef.polytope
        )));
    }
    if ef.projection.output_dim() != polytope.d || ef.projection.input_dim() != ef.lifted.dim() {
        return Err(Error::Malformed("projection has the wrong shape".into()));
    }
    ef.check_witnesses()?;

    let alpha: Vec<Vec<Rational>> = ef
        .witnesses
        .iter()
        .map(|w| ef.lifted.inequality_slacks(w))
        .collect();
    let (mut lp, slots) = ef
        .lifted
        .to_lp(vec![Rational::zero(); ef.lifted.dim()], Sense::Maximize);
    let mut simplex = Simplex::new(&lp)?;
    if !simplex.is_feasible() {
        return Err(Error::Malformed("lifted polyhedron is empty".into()));
    }

    let columns = geometry::enumerate_facets(polytope);
    let mut beta = Vec::with_capacity(columns.len());
    let mut optima = Vec::with_capacity(columns.len());
    let mut certified = true;
    for s in &columns {
        let ineq = geometry::facet_inequality(polytope, s)?;
        // <a, L w + o> = <L^T a, w> + <a, o>
        let objective: Vec<Rational> = (0..ef.lifted.dim())
            .map(|v| {
                ef.projection
                    .linear
                    .iter()
                    .zip(&ineq.a)
                    .fold(Rational::zero(), |acc, (row, a)| acc + a * &row[v])
            })
            .collect();
        let constant = rational::dot(&ineq.a, &ef.projection.offset);
        let res = simplex.optimize(&objective, Sense::Maximize);
        if !res.is_optimal() {
            return Err(Error::Malformed(format!(
                "LP for facet {s} is {:?}",
                res.status
            )));
        }
        let value = &res.value + &constant;
        if value != ineq.b {
            return Err(Error::Projection(format!(
                "max over the formulation for facet {s} is {value}, expected {}",
                ineq.b
            )));
        }
        lp.objective = objective;
        certified &= certify(&lp, &res);
        let b: Vec<Rational> = slots
            .iter()
            .map(|slot| match slot {
                InequalitySlot::Row(k) => res.dual_ineq[*k].clone(),
                InequalitySlot::Bound { var, scale } => &res.dual_bounds[*var] / scale,
            })
            .collect();
        beta.push(b);
        optima.push(value);
    }
    let factors = Factors::new(ef.size(), alpha, beta)?;
    Ok(Extraction {
        factorization: NonnegFactorization {
            target: *polytope,
            columns,
            factors,
        },
        optima,
        certified,
        pivots: simplex.pivots(),
    })
}

pub fn factorization_from_ef(
    polytope: &CyclicPolytope,
    ef: &ExtendedFormulation,
) -> Result<NonnegFactorization> {
    let ex = extract_factorization(polytope, ef)?;
    if !ex.certified {
        return Err(Error::internal(
            "an LP optimum failed its duality certificate",
        ));
    }
    Ok(ex.factorization)
}

/// Exact LP optimum of a linear objective over the projection of `ef`.
pub fn optimize_over(
    ef: &ExtendedFormulation,
    objective: &[Rational],
    sense: Sense,
) -> Result<(Rational, Vec<Rational>)> {
    if objective.len() != ef.polytope.d {
        return Err(Error::domain(format!(
            "objective has {} entries, dimension is {}",
            objective.len(),
            ef.polytope.d
        )));
    }
    let lifted_obj: Vec<Rational> = (0..ef.lifted.dim())
        .map(|v| {
            ef.projection
                .linear
                .iter()
                .zip(objective)
                .fold(Rational::zero(), |acc, (row, a)| acc + a * &row[v])
        })
        .collect();
    let constant = rational::dot(objective, &ef.projection.offset);
    let (lp, _) = ef.lifted.to_lp(lifted_obj, sense);
    let res = crate::exact_lp::solve(&lp)?;
    if !res.is_optimal() {
        return Err(Error::Malformed(format!(
            "LP over the formulation is {:?}",
            res.status
        )));
    }
    if !certify(&lp, &res) {
        return Err(Error::internal("LP optimum failed its duality certificate"));
    }
    let x = ef.projection.apply(&res.primal);
    Ok((res.value + constant, x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factorization::{trivial_factorization, verify};
    use crate::geometry::slack_matrix;

    #[test]
    fn sizes_follow_the_recurrence() {
        assert_eq!(build_ef_2d(3).unwrap().size(), 3);
        assert_eq!(build_ef_2d(4).unwrap().size(), 4);
        let ef5 = build_ef_2d(5).unwrap();
        assert_eq!(ef5.size(), 5);
        assert_eq!(ef5.levels.len(), 2);
        assert_eq!(ef5.levels[1].interval, Interval { t1: 0, t2: 2 });
        for n in 3..=4096usize {
            let size = ef_2d_size(n);
            let bound = 2 * (usize::BITS - 1 - (n - 1).leading_zeros()) as usize + 2;
            assert!(size <= bound, "n={n}: {size} > {bound}");
        }
        assert_eq!(ef_2d_size(1025), 21);
    }

    #[test]
    fn levels_record_sizes() {
        let ef = build_ef_2d(64).unwrap();
        assert_eq!(ef.levels[0].size, ef.size());
        for w in ef.levels.windows(2) {
            assert_eq!(w[0].size, w[1].size + 2);
            assert_eq!(w[1].interval.len(), w[0].interval.len().div_ceil(2));
        }
        assert_eq!(ef.levels.last().unwrap().step, Step::Base);
    }

    #[test]
    fn witnesses_follow_the_folds() {
        // n = 5: centered on [-2, 2], vertex 1 sits at t = -2 and folds to z1 = 2
        let ef = build_ef_2d(5).unwrap();
        let w = lift_vertex_2d(&ef, 1).unwrap();
        assert_eq!(w[2], int(2));
        assert_eq!(w[3], int(4));
        // n = 4 is a base case; n = 8 centers on [-3, 4] and the shear sends t = 0 to 1
        let ef8 = build_ef_2d(8).unwrap();
        assert_eq!(ef8.levels[0].step, Step::Shear);
        let w = lift_vertex_2d(&ef8, 4).unwrap();
        assert_eq!((w[2].clone(), w[3].clone()), (int(1), int(1)));
        assert!(lift_vertex_2d(&ef8, 9).is_err());
        ef8.check_witnesses().unwrap();
    }

    #[test]
    fn every_witness_is_feasible() {
        for n in 3..=70 {
            build_ef_2d(n).unwrap().check_witnesses().unwrap();
        }
    }

    #[test]
    fn extraction_reconstructs_planar_slack_matrix() {
        for n in [5usize, 6, 9, 12] {
            let p = CyclicPolytope::standard(n, 2).unwrap();
            let ef = build_ef_2d(n).unwrap();
            let ex = extract_factorization(&p, &ef).unwrap();
            assert!(ex.certified);
            let m = slack_matrix(&p);
            let report = verify(&m, &ex.factorization).unwrap();
            assert!(report.ok, "n={n}: {report:?}");
            assert_eq!(ex.factorization.rank(), ef.size());
            for (j, s) in m.columns.iter().enumerate() {
                let f = geometry::facet_inequality(&p, s).unwrap();
                assert_eq!(ex.optima[j], f.b);
            }
        }
    }

    #[test]
    fn factorization_round_trip() {
        let p = CyclicPolytope::standard(7, 3).unwrap();
        let m = slack_matrix(&p);
        let f = trivial_factorization(&m);
        let ef = ef_from_factorization(&p, &f).unwrap();
        assert_eq!(ef.size(), f.rank());
        ef.check_witnesses().unwrap();
        let back = factorization_from_ef(&p, &ef).unwrap();
        assert!(back.rank() <= f.rank());
        assert!(verify(&m, &back).unwrap().ok);
    }

    #[test]
    fn unverified_factorization_is_rejected() {
        let p = CyclicPolytope::standard(5, 2).unwrap();
        let mut f = trivial_factorization(&slack_matrix(&p));
        f.factors.beta[0][0] += int(1);
        assert!(matches!(
            ef_from_factorization(&p, &f),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn wrong_formulation_is_a_projection_failure() {
        // the vertex formulation of [1, 6] is not one of [1, 5]
        let p5 = CyclicPolytope::standard(5, 2).unwrap();
        let mut ef = vertex_ef(&CyclicPolytope::standard(6, 2).unwrap());
        ef.polytope = p5;
        ef.witnesses.pop();
        // witnesses still project fine; the LP for facet {1,5} overshoots
        assert!(matches!(
            extract_factorization(&p5, &ef),
            Err(Error::Projection(_))
        ));
    }

    #[test]
    fn objective_over_factorization_ef() {
        let p = CyclicPolytope::standard(9, 2).unwrap();
        let f = crate::factorization::factorize_2d(9).unwrap();
        let ef = ef_from_factorization(&p, &f).unwrap();
        let (value, x) = optimize_over(&ef, &[int(1), int(1)], Sense::Maximize).unwrap();
        assert_eq!(value, int(90));
        assert_eq!(x, vec![int(9), int(81)]);
    }

    #[test]
    fn independent_equations() {
        let p = CyclicPolytope::standard(8, 4).unwrap();
        let f = trivial_factorization(&slack_matrix(&p));
        let ef = ef_from_factorization(&p, &f).unwrap();
        let reduced = ef.lifted.with_independent_equations().unwrap();
        assert!(reduced.equations.len() <= 4 + f.rank());
        for w in &ef.witnesses {
            assert!(reduced.contains(w));
        }
    }
}
