//! Bounded competitors and sign certificates by linear programming.
//!
//! A bounded competitor for f at degree d is a perturbation h with
//! f + h still in [-1,1] on every point and h orthogonal to every
//! character of degree <= d. The largest total movement
//! sum_x (-f(x)) h(x) is an LP optimum: zero exactly when f is the only
//! bounded function with its low-degree data. The dual-side object is a
//! sign certificate, a low-degree q with f(x) q(x) >= 1 everywhere,
//! which rules every competitor out.
//!
//! Dimensions up to 7 solve in exact rational arithmetic end to end. At
//! dimension 8 the pivoting runs in f64 and the finished basis is
//! re-solved and re-checked exactly; a failed check is an error, so no
//! floating answer is ever reported as exact.

mod simplex;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::Error;
use crate::function::BooleanFunction;
use crate::transform::{character, low_degree_masks, spectrum};
use crate::Rational;

use simplex::LpScalar;

/// Hard cap for both operations; the tableau has 2^p-scale columns.
pub const LP_MAX_DIMENSION: u32 = 8;
/// Largest dimension solved purely in rational arithmetic.
const EXACT_ROUTE_MAX: u32 = 7;

/// A maximal bounded perturbation orthogonal to the low-degree layer.
#[derive(Debug, Clone, PartialEq)]
pub struct CompetitorWitness {
    pub p: u32,
    pub d: u32,
    h: Vec<Rational>,
    objective: Rational,
}

impl CompetitorWitness {
    /// Perturbation values indexed by point mask.
    pub fn h(&self) -> &[Rational] {
        &self.h
    }

    /// sum_x (-f(x)) h(x); equals the LP optimum.
    pub fn objective(&self) -> &Rational {
        &self.objective
    }

    /// One `num/den` line per point mask, in mask order.
    pub fn lines(&self) -> String {
        let mut out = String::new();
        for v in &self.h {
            out.push_str(&format!("{}/{}\n", v.numer(), v.denom()));
        }
        out
    }
}

/// Exact LP optimum plus the witness when it is nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct CompetitorOutcome {
    pub optimum: Rational,
    pub witness: Option<CompetitorWitness>,
}

/// A low-degree q = sum c_J w_J with f(x) q(x) >= 1 at every point.
///
/// Existence pins f as the only bounded function with its low-degree
/// data: for any competitor h, 0 = sum_x h q = sum_x (f+h)q - sum_x f q
/// forces the nonnegative movement sum to vanish.
#[derive(Debug, Clone, PartialEq)]
pub struct SignCertificate {
    pub p: u32,
    pub d: u32,
    coefficients: Vec<(u32, Rational)>,
    /// min_x f(x) q(x), always >= 1.
    pub margin: Rational,
}

impl SignCertificate {
    /// (mask, c_J) pairs in ascending mask order.
    pub fn coefficients(&self) -> &[(u32, Rational)] {
        &self.coefficients
    }

    /// One `mask num/den` line per coefficient, in mask order.
    pub fn lines(&self) -> String {
        let mut out = String::new();
        for (j, v) in &self.coefficients {
            out.push_str(&format!("{} {}/{}\n", j, v.numer(), v.denom()));
        }
        out
    }
}

/// Integer LP description lifted into whichever scalar a route needs.
struct IntProblem {
    a: Vec<Vec<i64>>,
    b: Vec<i64>,
    c: Vec<i64>,
    lower: Vec<i64>,
    upper: Vec<Option<i64>>,
    basis: Vec<usize>,
}

impl IntProblem {
    fn lift<T: LpScalar>(&self) -> simplex::Problem<T> {
        let conv = |v: i64| T::from_i64(v).expect("problem data is small integers");
        simplex::Problem {
            a: self
                .a
                .iter()
                .map(|row| row.iter().map(|&v| conv(v)).collect())
                .collect(),
            b: self.b.iter().map(|&v| conv(v)).collect(),
            c: self.c.iter().map(|&v| conv(v)).collect(),
            lower: self.lower.iter().map(|&v| conv(v)).collect(),
            upper: self.upper.iter().map(|o| o.map(conv)).collect(),
        }
    }
}

fn route_solve(ip: &IntProblem, p: u32) -> Result<simplex::Solution<Rational>, Error> {
    if p <= EXACT_ROUTE_MAX {
        simplex::solve(&ip.lift::<Rational>(), &ip.basis)
    } else {
        let float = simplex::solve(&ip.lift::<f64>(), &ip.basis)?;
        simplex::resolve_exact(&ip.lift::<Rational>(), &float.basis, &float.status)
    }
}

fn rat_int(v: i64) -> Rational {
    Rational::from(BigInt::from(v))
}

/// Maximizes sum_x (-f(x)) h(x) over perturbations h with f+h in [-1,1]
/// and h orthogonal to all characters of degree <= d.
///
/// The optimum is exact in every route and is zero precisely when no
/// bounded competitor exists. A nonzero optimum comes with a witness
/// that has passed exact re-verification of the box, the orthogonality
/// rows, and the objective value.
pub fn max_competitor(f: &BooleanFunction, d: u32) -> Result<CompetitorOutcome, Error> {
    let p = f.dimension();
    if p > LP_MAX_DIMENSION {
        return Err(Error::SizeCap {
            operation: "max_competitor",
            dimension: p,
            max: LP_MAX_DIMENSION,
        });
    }
    if d > p {
        return Err(Error::DegreeOutOfRange {
            degree: d,
            dimension: p,
        });
    }
    if d == p {
        // Full spectral data inverts back to f; only h = 0 satisfies it.
        return Ok(CompetitorOutcome {
            optimum: Rational::zero(),
            witness: None,
        });
    }
    let n = f.point_count();
    let masks = low_degree_masks(p, d);
    let k = masks.len();
    // Substituted variable y_x = -f(x) h(x) in [0, 2]: the objective is
    // sum y and each orthogonality row becomes sum_x f(x) w_J(x) y_x = 0.
    // Artificial columns pinned at [0, 0] provide the start basis; y = 0
    // (that is, h = 0) is feasible from the outset.
    let mut a = vec![vec![0i64; n + k]; k];
    for (r, &j) in masks.iter().enumerate() {
        for m in 0..n as u32 {
            a[r][m as usize] = f.sign(m) * character(m, j);
        }
        a[r][n + r] = 1;
    }
    let ip = IntProblem {
        a,
        b: vec![0; k],
        c: [vec![1; n], vec![0; k]].concat(),
        lower: vec![0; n + k],
        upper: [vec![Some(2); n], vec![Some(0); k]].concat(),
        basis: (n..n + k).collect(),
    };
    let sol = route_solve(&ip, p)?;
    let h: Vec<Rational> = (0..n)
        .map(|m| -rat_int(f.sign(m as u32)) * sol.values[m].clone())
        .collect();
    let optimum = sol.optimum;
    verify_competitor(f, d, &h, &optimum)?;
    let witness = if optimum > Rational::zero() {
        Some(CompetitorWitness {
            p,
            d,
            h,
            objective: optimum.clone(),
        })
    } else {
        None
    };
    Ok(CompetitorOutcome { optimum, witness })
}

fn verify_competitor(
    f: &BooleanFunction,
    d: u32,
    h: &[Rational],
    claimed: &Rational,
) -> Result<(), Error> {
    let one = Rational::one();
    let mut objective = Rational::zero();
    for (m, hv) in h.iter().enumerate() {
        let fm = rat_int(f.sign(m as u32));
        let shifted = fm.clone() + hv.clone();
        if shifted > one || shifted < -one.clone() {
            return Err(Error::SolverVerification(
                "competitor leaves the [-1,1] box".into(),
            ));
        }
        objective -= fm * hv.clone();
    }
    if objective != *claimed {
        return Err(Error::SolverVerification(
            "competitor objective does not match the reported optimum".into(),
        ));
    }
    for &j in &low_degree_masks(f.dimension(), d) {
        let mut s = Rational::zero();
        for (m, hv) in h.iter().enumerate() {
            if character(m as u32, j) == 1 {
                s += hv.clone();
            } else {
                s -= hv.clone();
            }
        }
        if !s.is_zero() {
            return Err(Error::SolverVerification(
                "competitor violates an orthogonality row".into(),
            ));
        }
    }
    Ok(())
}

/// Searches for a low-degree q with f(x) q(x) >= 1 at every point.
///
/// Feasibility is decided by a phase-one LP over the coefficient split
/// c_J = c+ - c-, a surplus per point, and an artificial per point; the
/// certificate exists exactly when every artificial can be driven to
/// zero. The returned margin is recomputed exactly from the
/// coefficients, never read off the tableau.
pub fn sign_certificate(f: &BooleanFunction, d: u32) -> Result<Option<SignCertificate>, Error> {
    let p = f.dimension();
    if p > LP_MAX_DIMENSION {
        return Err(Error::SizeCap {
            operation: "sign_certificate",
            dimension: p,
            max: LP_MAX_DIMENSION,
        });
    }
    if d > p {
        return Err(Error::DegreeOutOfRange {
            degree: d,
            dimension: p,
        });
    }
    let n = f.point_count();
    if d == p {
        // c_J = S_J / N rebuilds f itself, so f q = 1 on every point.
        let s = spectrum(f);
        let denom = BigInt::from(n);
        let coefficients: Vec<(u32, Rational)> = (0..n as u32)
            .map(|j| (j, Rational::new(BigInt::from(s.coeff(j)), denom.clone())))
            .collect();
        let margin = exact_margin(f, &coefficients);
        debug_assert!(margin == Rational::one());
        return Ok(Some(SignCertificate {
            p,
            d,
            coefficients,
            margin,
        }));
    }
    let masks = low_degree_masks(p, d);
    let k = masks.len();
    // Columns: c+ | c- | surplus | artificial. Row per point x:
    // f(x) q(x) - s_x + a_x = 1, all columns nonnegative.
    let cols = 2 * k + 2 * n;
    let mut a = vec![vec![0i64; cols]; n];
    for (m, row) in a.iter_mut().enumerate() {
        for (idx, &j) in masks.iter().enumerate() {
            let coeff = f.sign(m as u32) * character(m as u32, j);
            row[idx] = coeff;
            row[k + idx] = -coeff;
        }
        row[2 * k + m] = -1;
        row[2 * k + n + m] = 1;
    }
    let mut c = vec![0i64; cols];
    for m in 0..n {
        c[2 * k + n + m] = -1;
    }
    let ip = IntProblem {
        a,
        b: vec![1; n],
        c,
        lower: vec![0; cols],
        upper: vec![None; cols],
        basis: (2 * k + n..cols).collect(),
    };
    let sol = route_solve(&ip, p)?;
    if sol.optimum < Rational::zero() {
        // Some artificial is stuck positive: no feasible q exists.
        return Ok(None);
    }
    let coefficients: Vec<(u32, Rational)> = masks
        .iter()
        .enumerate()
        .map(|(idx, &j)| (j, sol.values[idx].clone() - sol.values[k + idx].clone()))
        .collect();
    let margin = exact_margin(f, &coefficients);
    if margin < Rational::one() {
        return Err(Error::SolverVerification(
            "certificate margin fell below one".into(),
        ));
    }
    Ok(Some(SignCertificate {
        p,
        d,
        coefficients,
        margin,
    }))
}

/// min_x f(x) q(x), evaluated exactly from the coefficients.
fn exact_margin(f: &BooleanFunction, coefficients: &[(u32, Rational)]) -> Rational {
    let n = f.point_count();
    let mut margin: Option<Rational> = None;
    for m in 0..n as u32 {
        let mut q = Rational::zero();
        for (j, cj) in coefficients {
            if cj.is_zero() {
                continue;
            }
            if character(m, *j) == 1 {
                q += cj.clone();
            } else {
                q -= cj.clone();
            }
        }
        let v = if f.sign(m) == 1 { q } else { -q };
        margin = Some(match margin {
            None => v,
            Some(old) => {
                if v < old {
                    v
                } else {
                    old
                }
            }
        });
    }
    margin.expect("functions have at least two points")
}
