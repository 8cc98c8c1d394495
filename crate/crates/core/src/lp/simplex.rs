//! Dense primal simplex for bounded variables, generic over the scalar.
//!
//! Maximizes c'x subject to Ax = b and l <= x <= u, where every upper
//! bound may be finite or absent and l_j = u_j pins a variable (the
//! artificial columns both LPs in this crate use for their start basis).
//! Pivoting follows Bland's rule, smallest eligible index in and smallest
//! basic index out, which rules out cycling under exact arithmetic; a
//! generous iteration cap backstops the floating route.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{FromPrimitive, One, Signed, Zero};

use crate::error::Error;
use crate::Rational;

/// Scalar a tableau can pivot over. The tolerance separates "treat as
/// zero" from "act on the sign": exact types use literal zero.
pub(crate) trait LpScalar:
    Clone + PartialOrd + Debug + Zero + One + Signed + FromPrimitive
{
    fn tolerance() -> Self;
}

impl LpScalar for f64 {
    fn tolerance() -> Self {
        1e-9
    }
}

impl LpScalar for Rational {
    fn tolerance() -> Self {
        Rational::zero()
    }
}

/// Where a variable currently sits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum VarStatus {
    Basic,
    AtLower,
    AtUpper,
}

/// maximize c'x with Ax = b, lower <= x <= upper (None = unbounded above).
#[derive(Debug, Clone)]
pub(crate) struct Problem<T> {
    pub a: Vec<Vec<T>>,
    pub b: Vec<T>,
    pub c: Vec<T>,
    pub lower: Vec<T>,
    pub upper: Vec<Option<T>>,
}

#[derive(Debug, Clone)]
pub(crate) struct Solution<T> {
    pub optimum: T,
    pub values: Vec<T>,
    pub basis: Vec<usize>,
    pub status: Vec<VarStatus>,
}

/// Runs the simplex from a given start basis.
///
/// `initial_basis[i]` must be a column equal to the i-th unit vector, and
/// the point with every nonbasic variable at its lower bound must be
/// feasible. Both LPs in this crate construct such a basis directly, so
/// no phase-one machinery lives here.
pub(crate) fn solve<T: LpScalar>(
    problem: &Problem<T>,
    initial_basis: &[usize],
) -> Result<Solution<T>, Error> {
    let m = problem.b.len();
    let n = problem.c.len();
    debug_assert!(initial_basis.len() == m);
    debug_assert!(initial_basis.iter().enumerate().all(|(i, &col)| {
        problem.a.iter().enumerate().all(|(r, row)| {
            if r == i {
                row[col] == T::one()
            } else {
                row[col].is_zero()
            }
        })
    }));
    let tol = T::tolerance();

    let mut tab: Vec<Vec<T>> = problem.a.clone();
    let mut basis: Vec<usize> = initial_basis.to_vec();
    let mut status: Vec<VarStatus> = vec![VarStatus::AtLower; n];
    for &col in &basis {
        status[col] = VarStatus::Basic;
    }
    // Basic values for the start point: b minus the nonbasic columns
    // weighted by their bound values (B is the identity here).
    let mut xb: Vec<T> = (0..m)
        .map(|i| {
            let mut v = problem.b[i].clone();
            for j in 0..n {
                if status[j] != VarStatus::Basic && !problem.lower[j].is_zero() {
                    v = v - tab[i][j].clone() * problem.lower[j].clone();
                }
            }
            v
        })
        .collect();
    // Reduced costs relative to the start basis.
    let mut red: Vec<T> = (0..n)
        .map(|j| {
            let mut r = problem.c[j].clone();
            for i in 0..m {
                let cb = &problem.c[basis[i]];
                if !cb.is_zero() {
                    r = r - cb.clone() * tab[i][j].clone();
                }
            }
            r
        })
        .collect();

    let cap = 20_000 + 200 * (m + n);
    for _ in 0..cap {
        // Entering column: Bland's smallest improving index. Pinned
        // variables (l = u) cannot move and never enter.
        let mut entering = None;
        for j in 0..n {
            if status[j] == VarStatus::Basic {
                continue;
            }
            if let Some(u) = &problem.upper[j] {
                if *u == problem.lower[j] {
                    continue;
                }
            }
            let improving = match status[j] {
                VarStatus::AtLower => red[j] > tol,
                VarStatus::AtUpper => red[j] < -tol.clone(),
                VarStatus::Basic => unreachable!(),
            };
            if improving {
                entering = Some(j);
                break;
            }
        }
        let q = match entering {
            Some(q) => q,
            None => return Ok(extract(problem, tab, xb, basis, status)),
        };
        let increasing = status[q] == VarStatus::AtLower;

        // Ratio test: the entering variable moves t >= 0 from its bound,
        // each basic value i changes at rate -rate_i. Candidate limits
        // are the entering variable's own span and every basic bound.
        let mut best_t: Option<T> = problem.upper[q]
            .as_ref()
            .map(|u| u.clone() - problem.lower[q].clone());
        // (row, basic variable leaves toward its upper bound)
        let mut leave: Option<(usize, bool)> = None;
        for (i, row) in tab.iter().enumerate() {
            let rate = if increasing {
                row[q].clone()
            } else {
                -row[q].clone()
            };
            let (limit, to_upper) = if rate > tol {
                let slack = xb[i].clone() - problem.lower[basis[i]].clone();
                (slack / rate, false)
            } else if rate < -tol.clone() {
                match &problem.upper[basis[i]] {
                    Some(u) => (-((u.clone() - xb[i].clone()) / rate), true),
                    None => continue,
                }
            } else {
                continue;
            };
            // Clamp float drift just below a bound to a degenerate step.
            let limit = if limit < T::zero() { T::zero() } else { limit };
            let replace = match &best_t {
                None => true,
                Some(t) => {
                    limit < *t
                        || (limit == *t
                            && match leave {
                                // Equal to the bound-flip limit: keep the
                                // flip, it changes no basis.
                                None => false,
                                Some((r, _)) => basis[i] < basis[r],
                            })
                }
            };
            if replace {
                best_t = Some(limit);
                leave = Some((i, to_upper));
            }
        }
        let t = match best_t {
            Some(t) => t,
            None => {
                return Err(Error::SolverVerification(
                    "objective unbounded over the feasible box".into(),
                ))
            }
        };

        match leave {
            None => {
                // Bound flip: no basis change, t is the full span.
                for (i, row) in tab.iter().enumerate() {
                    let rate = if increasing {
                        row[q].clone()
                    } else {
                        -row[q].clone()
                    };
                    xb[i] = xb[i].clone() - t.clone() * rate;
                }
                status[q] = if increasing {
                    VarStatus::AtUpper
                } else {
                    VarStatus::AtLower
                };
            }
            Some((r, to_upper)) => {
                let start = match status[q] {
                    VarStatus::AtLower => problem.lower[q].clone(),
                    VarStatus::AtUpper => problem.upper[q].clone().expect("status was at upper"),
                    VarStatus::Basic => unreachable!(),
                };
                let entering_value = if increasing {
                    start + t.clone()
                } else {
                    start - t.clone()
                };
                for i in 0..m {
                    if i == r {
                        continue;
                    }
                    let rate = if increasing {
                        tab[i][q].clone()
                    } else {
                        -tab[i][q].clone()
                    };
                    xb[i] = xb[i].clone() - t.clone() * rate;
                }
                status[basis[r]] = if to_upper {
                    VarStatus::AtUpper
                } else {
                    VarStatus::AtLower
                };
                status[q] = VarStatus::Basic;
                basis[r] = q;
                xb[r] = entering_value;

                // Gaussian step: normalize the pivot row, clear column q
                // everywhere else, including the reduced-cost row.
                let pivot = tab[r][q].clone();
                for v in tab[r].iter_mut() {
                    *v = v.clone() / pivot.clone();
                }
                tab[r][q] = T::one();
                let pivot_row = tab[r].clone();
                for (i, row) in tab.iter_mut().enumerate() {
                    if i == r || row[q].is_zero() {
                        continue;
                    }
                    let factor = row[q].clone();
                    for (v, pv) in row.iter_mut().zip(pivot_row.iter()) {
                        *v = v.clone() - factor.clone() * pv.clone();
                    }
                    row[q] = T::zero();
                }
                if !red[q].is_zero() {
                    let factor = red[q].clone();
                    for (v, pv) in red.iter_mut().zip(pivot_row.iter()) {
                        *v = v.clone() - factor.clone() * pv.clone();
                    }
                    red[q] = T::zero();
                }
            }
        }
    }
    Err(Error::SolverVerification(
        "simplex iteration cap reached".into(),
    ))
}

fn extract<T: LpScalar>(
    problem: &Problem<T>,
    _tab: Vec<Vec<T>>,
    xb: Vec<T>,
    basis: Vec<usize>,
    status: Vec<VarStatus>,
) -> Solution<T> {
    let n = problem.c.len();
    let mut values = vec![T::zero(); n];
    for j in 0..n {
        values[j] = match status[j] {
            VarStatus::AtLower => problem.lower[j].clone(),
            VarStatus::AtUpper => problem.upper[j].clone().expect("status at upper"),
            VarStatus::Basic => T::zero(),
        };
    }
    for (i, &col) in basis.iter().enumerate() {
        values[col] = xb[i].clone();
    }
    let mut optimum = T::zero();
    for j in 0..n {
        if !problem.c[j].is_zero() && !values[j].is_zero() {
            optimum = optimum + problem.c[j].clone() * values[j].clone();
        }
    }
    Solution {
        optimum,
        values,
        basis,
        status,
    }
}

/// Recomputes the basic solution of a finished float run in exact
/// arithmetic and checks it is optimal: primal feasibility of the basic
/// values and sign-correct reduced costs for every movable nonbasic
/// column. Any failure is an error, never a silent acceptance.
pub(crate) fn resolve_exact(
    problem: &Problem<Rational>,
    basis: &[usize],
    status: &[VarStatus],
) -> Result<Solution<Rational>, Error> {
    let m = problem.b.len();
    let n = problem.c.len();
    let mut values = vec![Rational::zero(); n];
    for j in 0..n {
        match status[j] {
            VarStatus::Basic => {}
            VarStatus::AtLower => values[j] = problem.lower[j].clone(),
            VarStatus::AtUpper => {
                values[j] = problem.upper[j]
                    .clone()
                    .ok_or_else(|| err("nonbasic at an absent upper bound"))?
            }
        }
    }
    // rhs' = b - (nonbasic columns at their bounds)
    let mut rhs: Vec<Rational> = problem.b.clone();
    for j in 0..n {
        if status[j] != VarStatus::Basic && !values[j].is_zero() {
            for i in 0..m {
                rhs[i] = rhs[i].clone() - problem.a[i][j].clone() * values[j].clone();
            }
        }
    }
    let bmat: Vec<Vec<Rational>> = (0..m)
        .map(|i| basis.iter().map(|&col| problem.a[i][col].clone()).collect())
        .collect();
    let xb = gauss_solve(bmat.clone(), rhs).ok_or_else(|| err("singular basis matrix"))?;
    for (i, &col) in basis.iter().enumerate() {
        if xb[i] < problem.lower[col] {
            return Err(err("basic value below its lower bound"));
        }
        if let Some(u) = &problem.upper[col] {
            if xb[i] > *u {
                return Err(err("basic value above its upper bound"));
            }
        }
        values[col] = xb[i].clone();
    }
    // Duals from B' y = c_B, then sign conditions on reduced costs.
    let bt: Vec<Vec<Rational>> = (0..m)
        .map(|i| (0..m).map(|k| bmat[k][i].clone()).collect())
        .collect();
    let cb: Vec<Rational> = basis.iter().map(|&col| problem.c[col].clone()).collect();
    let y = gauss_solve(bt, cb).ok_or_else(|| err("singular basis matrix"))?;
    for j in 0..n {
        if status[j] == VarStatus::Basic {
            continue;
        }
        if let Some(u) = &problem.upper[j] {
            if *u == problem.lower[j] {
                continue;
            }
        }
        let mut r = problem.c[j].clone();
        for i in 0..m {
            if !problem.a[i][j].is_zero() && !y[i].is_zero() {
                r = r - y[i].clone() * problem.a[i][j].clone();
            }
        }
        let bad = match status[j] {
            VarStatus::AtLower => r > Rational::zero(),
            VarStatus::AtUpper => r < Rational::zero(),
            VarStatus::Basic => unreachable!(),
        };
        if bad {
            return Err(err("reduced cost with the wrong sign"));
        }
    }
    let mut optimum = Rational::zero();
    for j in 0..n {
        if !problem.c[j].is_zero() && !values[j].is_zero() {
            optimum = optimum + problem.c[j].clone() * values[j].clone();
        }
    }
    Ok(Solution {
        optimum,
        values,
        basis: basis.to_vec(),
        status: status.to_vec(),
    })
}

fn err(msg: &str) -> Error {
    Error::SolverVerification(msg.to_string())
}

/// Solves the square rational system exactly; None when singular.
///
/// Rows are cleared of denominators, eliminated fraction-free in BigInt
/// (each 2x2 determinant step divides exactly by the previous pivot), and
/// back-substituted in rationals.
fn gauss_solve(a: Vec<Vec<Rational>>, b: Vec<Rational>) -> Option<Vec<Rational>> {
    let m = b.len();
    let mut ai: Vec<Vec<BigInt>> = Vec::with_capacity(m);
    let mut bi: Vec<BigInt> = Vec::with_capacity(m);
    for (row, rhs) in a.into_iter().zip(b.into_iter()) {
        let mut scale = BigInt::one();
        for v in row.iter().chain(std::iter::once(&rhs)) {
            scale = scale.lcm(v.denom());
        }
        ai.push(
            row.iter()
                .map(|v| v.numer() * (&scale / v.denom()))
                .collect(),
        );
        bi.push(rhs.numer() * (&scale / rhs.denom()));
    }
    let mut prev = BigInt::one();
    for k in 0..m {
        let pivot_row = (k..m).find(|&r| !ai[r][k].is_zero())?;
        if pivot_row != k {
            ai.swap(k, pivot_row);
            bi.swap(k, pivot_row);
        }
        for i in k + 1..m {
            for j in k + 1..m {
                ai[i][j] = (&ai[k][k] * &ai[i][j] - &ai[i][k] * &ai[k][j]) / &prev;
            }
            bi[i] = (&ai[k][k] * &bi[i] - &ai[i][k] * &bi[k]) / &prev;
            ai[i][k] = BigInt::zero();
        }
        prev = ai[k][k].clone();
    }
    let mut x = vec![Rational::zero(); m];
    for i in (0..m).rev() {
        let mut acc = Rational::from(bi[i].clone());
        for j in i + 1..m {
            if !ai[i][j].is_zero() {
                acc -= Rational::from(ai[i][j].clone()) * x[j].clone();
            }
        }
        x[i] = acc / Rational::from(ai[i][i].clone());
    }
    Some(x)
}
