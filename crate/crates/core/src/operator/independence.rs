use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::check::Witness;
use crate::error::{Error, Result};
use crate::sampling;
use crate::space::FuzzySpace;

/// Cap on lattice points scanned on the ℓ¹ sphere; the resolution is lowered to fit.
const MAX_GRID_POINTS: usize = 200_000;
const MAX_POLISH_ITERS: usize = 100_000;

/// The constant `c_α` with `⋀{t : N(Σβᵢxᵢ, Kt) ≥ 1-α} ≥ c_α / φ(1/Σ|βᵢ|)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndependenceConstant {
    pub basis: Vec<Vec<f64>>,
    pub alpha: f64,
    pub c_alpha: f64,
    /// Unit-ℓ¹ coefficients attaining `c_alpha`.
    pub minimizer: Vec<f64>,
    /// Lattice resolution actually used (`β = k / R`, `Σ|k| = R`).
    pub resolution: usize,
    pub grid_points: usize,
    /// Minimum over the lattice alone, before facet polishing.
    pub grid_value: f64,
    pub satisfies_nvi: bool,
}

/// Lattice-points count on the ℓ¹ sphere of radius `r` in `m` dimensions.
fn l1_sphere_count(m: usize, r: usize) -> f64 {
    // Σ_j 2^j C(m, j) C(r-1, j-1): j nonzero coordinates
    let binom = |n: usize, k: usize| -> f64 {
        if k > n {
            return 0.0;
        }
        (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    };
    (1..=m.min(r))
        .map(|j| 2f64.powi(j as i32) * binom(m, j) * binom(r - 1, j - 1))
        .sum()
}

fn for_each_l1_point(m: usize, r: usize, f: &mut impl FnMut(&[i64])) {
    fn rec(k: &mut Vec<i64>, i: usize, left: i64, f: &mut impl FnMut(&[i64])) {
        if i + 1 == k.len() {
            for s in if left == 0 { vec![0] } else { vec![left, -left] } {
                k[i] = s;
                f(k);
            }
            return;
        }
        for a in 0..=left {
            for s in if a == 0 { vec![0] } else { vec![a, -a] } {
                k[i] = s;
                rec(k, i + 1, left - a, f);
            }
        }
    }
    let mut k = vec![0i64; m];
    rec(&mut k, 0, r as i64, f);
}

/// Euclidean projection onto the probability simplex (sort-based).
fn project_simplex(v: &DVector<f64>) -> DVector<f64> {
    let mut u: Vec<f64> = v.iter().copied().collect();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut tau = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cum += uj;
        let t = (cum - 1.0) / (j + 1) as f64;
        if uj - t > 0.0 {
            tau = t;
        }
    }
    v.map(|x| (x - tau).max(0.0))
}

/// Minimise `γᵀGγ` over the simplex by projected gradient from `start`.
fn polish(g: &DMatrix<f64>, start: DVector<f64>) -> DVector<f64> {
    let lmax = g.symmetric_eigenvalues().max();
    if !(lmax > 0.0) {
        return start;
    }
    let step = 0.5 / lmax;
    let mut x = start;
    let mut fx = x.dot(&(g * &x));
    for _ in 0..MAX_POLISH_ITERS {
        let grad = (g * &x) * 2.0;
        let next = project_simplex(&(&x - grad * step));
        let fn_ = next.dot(&(g * &next));
        let moved = (&next - &x).amax();
        x = next;
        if moved < 1e-15 || (fx - fn_).abs() <= 1e-17 * fx.abs() {
            break;
        }
        fx = fn_;
    }
    x
}

/// Estimate `c_α` for a basis of a subspace of `sp`.
///
/// Scans the lattice `β = k/R` with `Σ|kᵢ| = R`, then polishes the minimum on
/// every facet of the ℓ¹ sphere (fixed sign pattern) with projected gradient on
/// the simplex. Since the level infimum is increasing in `‖Σβᵢxᵢ‖`, both steps
/// work with that norm and the winner is evaluated through the level infimum.
pub fn independence_constant(sp: &FuzzySpace, basis: &[DVector<f64>], alpha: f64, resolution: usize) -> Result<IndependenceConstant> {
    let m = basis.len();
    if m == 0 {
        return Err(Error::invalid("basis", "must contain at least one vector"));
    }
    if let Some(b) = basis.iter().find(|b| b.len() != sp.dim()) {
        return Err(Error::DimensionMismatch {
            expected: sp.dim(),
            got: b.len(),
        });
    }
    let cols = DMatrix::from_columns(basis);
    let svals = cols.singular_values();
    let smax = svals.max();
    let rank = svals.iter().filter(|s| **s > 1e-10 * smax.max(f64::MIN_POSITIVE)).count();
    if rank < m {
        return Err(Error::RankDeficient { rank, len: m });
    }

    let mut r = resolution.max(1);
    while r > 1 && l1_sphere_count(m, r) > MAX_GRID_POINTS as f64 {
        r /= 2;
    }
    let w = DVector::from_column_slice(sp.rho().weights());
    let wnorm2 = |z: &DVector<f64>| z.iter().zip(w.iter()).map(|(a, b)| b * a * a).sum::<f64>();
    let combo = |beta: &[f64]| -> DVector<f64> {
        let mut z = DVector::zeros(sp.dim());
        for (b, x) in beta.iter().zip(basis) {
            z.axpy(*b, x, 1.0);
        }
        z
    };

    let mut best = (f64::INFINITY, vec![0.0; m]);
    let mut points = 0usize;
    for_each_l1_point(m, r, &mut |k| {
        points += 1;
        let beta: Vec<f64> = k.iter().map(|&ki| ki as f64 / r as f64).collect();
        let v = wnorm2(&combo(&beta));
        if v < best.0 {
            best = (v, beta);
        }
    });
    let level = |beta: &[f64]| -> Result<f64> {
        Ok(sp.level_fine(sp.rho().eval(&combo(beta)), 1.0 - alpha, false)? / sp.k())
    };
    let grid_value = level(&best.1)?;

    // gram[i][j] = <x_i, x_j>_w
    let gram = DMatrix::from_fn(m, m, |i, j| basis[i].iter().zip(basis[j].iter()).zip(w.iter()).map(|((a, b), c)| a * b * c).sum::<f64>());
    let facets = if m <= 12 { 1usize << (m - 1) } else { 0 };
    for mask in 0..facets {
        let sign: Vec<f64> = (0..m).map(|i| if i > 0 && mask >> (i - 1) & 1 == 1 { -1.0 } else { 1.0 }).collect();
        let g = DMatrix::from_fn(m, m, |i, j| sign[i] * sign[j] * gram[(i, j)]);
        let gamma = polish(&g, DVector::from_element(m, 1.0 / m as f64));
        let beta: Vec<f64> = gamma.iter().zip(&sign).map(|(a, s)| a * s).collect();
        let v = wnorm2(&combo(&beta));
        if v < best.0 {
            best = (v, beta);
        }
    }
    let c_alpha = level(&best.1)?.min(grid_value);

    let nvi = sp.satisfies_nvi();
    if nvi && !(c_alpha > 0.0) {
        return Err(Error::VerdictMismatch(format!(
            "c_alpha = {c_alpha} on a space satisfying the positivity condition"
        )));
    }
    Ok(IndependenceConstant {
        basis: basis.iter().map(|b| b.iter().copied().collect()).collect(),
        alpha,
        c_alpha,
        minimizer: best.1,
        resolution: r,
        grid_points: points,
        grid_value,
        satisfies_nvi: nvi,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityOutcome {
    pub checked: usize,
    pub violations: usize,
    /// Largest relative shortfall `(rhs - lhs) / max(1, rhs)`.
    pub worst: f64,
    /// `|lhs(minimizer) - c_α|`.
    pub minimizer_gap: f64,
    pub witness: Option<Witness>,
}

impl InequalityOutcome {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Check `⋀{t : N(Σβᵢxᵢ, Kt) ≥ 1-α} ≥ c_α / φ(1/Σ|βᵢ|)` on random coefficients.
///
/// The stored minimiser is checked first (where equality is expected), then
/// `sample_count` Gaussian coefficient vectors with log-uniform ℓ¹ mass.
pub fn independence_inequality_check(
    sp: &FuzzySpace,
    ic: &IndependenceConstant,
    sample_count: usize,
    seed: u64,
    tol: f64,
) -> Result<InequalityOutcome> {
    let basis: Vec<DVector<f64>> = ic.basis.iter().map(|b| DVector::from_vec(b.clone())).collect();
    let m = basis.len();
    let mut rng = sampling::rng(seed);
    let mut out = InequalityOutcome {
        checked: 0,
        violations: 0,
        worst: 0.0,
        minimizer_gap: 0.0,
        witness: None,
    };
    let check = |beta: &[f64], out: &mut InequalityOutcome| -> Result<f64> {
        let mass: f64 = beta.iter().map(|b| b.abs()).sum();
        let mut z = DVector::zeros(sp.dim());
        for (b, x) in beta.iter().zip(&basis) {
            z.axpy(*b, x, 1.0);
        }
        let lhs = sp.level_fine(sp.rho().eval(&z), 1.0 - ic.alpha, false)? / sp.k();
        let rhs = ic.c_alpha / sp.phi().eval(1.0 / mass);
        let short = (rhs - lhs) / rhs.max(1.0);
        out.checked += 1;
        if short > tol {
            out.violations += 1;
            out.worst = out.worst.max(short);
            out.witness.get_or_insert_with(|| Witness::new(beta.to_vec(), lhs, rhs));
        }
        Ok(lhs)
    };
    let at_min = check(&ic.minimizer, &mut out)?;
    out.minimizer_gap = (at_min - ic.c_alpha).abs();
    for _ in 0..sample_count {
        let g = sampling::gaussian_vector(&mut rng, m);
        let l1: f64 = g.iter().map(|v| v.abs()).sum();
        if l1 == 0.0 {
            continue;
        }
        let mass = sampling::log_uniform(&mut rng, 1e-2, 1e2);
        let beta: Vec<f64> = g.iter().map(|v| v / l1 * mass).collect();
        check(&beta, &mut out)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::TNorm;
    use crate::space::{CrispFunctional, Profile};

    fn e(n: usize, i: usize) -> DVector<f64> {
        let mut v = DVector::zeros(n);
        v[i] = 1.0;
        v
    }

    fn recip(n: usize) -> FuzzySpace {
        FuzzySpace::euclidean(n, 1.0, Profile::Reciprocal, TNorm::Minimum).unwrap()
    }

    #[test]
    fn lattice_counts() {
        for (m, r) in [(1, 5), (2, 4), (3, 6), (4, 3)] {
            let mut n = 0;
            for_each_l1_point(m, r, &mut |k| {
                assert_eq!(k.iter().map(|v| v.abs()).sum::<i64>(), r as i64);
                n += 1;
            });
            assert_eq!(n as f64, l1_sphere_count(m, r), "m={m} r={r}");
        }
        assert_eq!(l1_sphere_count(2, 4), 16.0);
    }

    #[test]
    fn simplex_projection() {
        let p = project_simplex(&DVector::from_vec(vec![0.5, 0.5, 2.0]));
        assert!((p.sum() - 1.0).abs() < 1e-15);
        assert_eq!(p, DVector::from_vec(vec![0.0, 0.0, 1.0]));
        let q = project_simplex(&DVector::from_vec(vec![0.2, 0.3]));
        assert!((q[0] - 0.45).abs() < 1e-15 && (q[1] - 0.55).abs() < 1e-15);
    }

    #[test]
    fn standard_basis_examples() {
        let sp = recip(2);
        let ic = independence_constant(&sp, &[e(2, 0), e(2, 1)], 0.5, 16).unwrap();
        assert!((ic.c_alpha - 2f64.sqrt()).abs() < 1e-9);
        let one = independence_constant(&sp, &[e(2, 0)], 0.5, 16).unwrap();
        assert!((one.c_alpha - 2.0).abs() < 1e-9);
    }

    #[test]
    fn polishing_beats_a_coarse_lattice() {
        let sp = recip(3);
        let basis = [
            DVector::from_vec(vec![1.0, 0.2, 0.0]),
            DVector::from_vec(vec![0.3, 1.0, 0.1]),
            DVector::from_vec(vec![0.0, 0.7, 1.3]),
        ];
        let ic = independence_constant(&sp, &basis, 0.3, 4).unwrap();
        assert!(ic.c_alpha < ic.grid_value);
        let out = independence_inequality_check(&sp, &ic, 1000, 9, 1e-9).unwrap();
        assert!(out.passed(), "{out:?}");
        assert!(out.minimizer_gap < 1e-9);
    }

    #[test]
    fn inflated_constant_is_caught_at_the_minimizer() {
        let sp = recip(2);
        let mut ic = independence_constant(&sp, &[e(2, 0), e(2, 1)], 0.5, 16).unwrap();
        ic.c_alpha *= 2.0;
        let out = independence_inequality_check(&sp, &ic, 100, 9, 1e-9).unwrap();
        assert!(!out.passed());
        assert_eq!(out.witness.unwrap().inputs, ic.minimizer);
    }

    #[test]
    fn powered_functional_uses_phi() {
        let sp = FuzzySpace::new(CrispFunctional::weighted(vec![1.0, 3.0], 2.0).unwrap(), Profile::Reciprocal, TNorm::Product);
        let basis = [DVector::from_vec(vec![1.0, 1.0]), DVector::from_vec(vec![2.0, -0.5])];
        let ic = independence_constant(&sp, &basis, 0.6, 32).unwrap();
        assert!(ic.c_alpha > 0.0);
        assert!(independence_inequality_check(&sp, &ic, 1000, 4, 1e-9).unwrap().passed());
    }

    #[test]
    fn step_space_can_have_zero_constant() {
        let sp = FuzzySpace::euclidean(2, 1.0, Profile::step(0.5).unwrap(), TNorm::Minimum).unwrap();
        let ic = independence_constant(&sp, &[e(2, 0), e(2, 1)], 0.6, 8).unwrap();
        assert_eq!(ic.c_alpha, 0.0);
        assert!(!ic.satisfies_nvi);
    }

    #[test]
    fn rank_deficient_basis_rejected() {
        let sp = recip(3);
        let b = [e(3, 0), DVector::from_vec(vec![2.0, 0.0, 0.0])];
        assert!(matches!(
            independence_constant(&sp, &b, 0.5, 8),
            Err(Error::RankDeficient { rank: 1, len: 2 })
        ));
    }
}
