//! Brute-force checks for the closed forms.
//!
//! Nothing here calls into [`crate::cubic`]'s formulas: the auxiliary cubic
//! is bracketed and bisected, the diagonal system is attacked by multi-start
//! damped Newton, and the full pipeline is certified by solving currents
//! manufactured from random potentials.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::cubic::{diag_map_n3, solve_diag_n3, SolutionKind};
use crate::error::{Error, Result};
use crate::linalg::{orthonormalize_columns, svd_n_by_3, MatR};
use crate::solver::{field_equation_lhs, residual, solve, Current, Potential};
use crate::Tolerances;

/// Multi-start Newton settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchConfig {
    pub starts: usize,
    /// Seeds are drawn from `[−box_bound, box_bound]³`.
    pub box_bound: f64,
    /// Roots are accepted when the max-norm residual is at most
    /// `tol · (1 + ‖j‖)`.
    pub tol: f64,
    pub max_iter: usize,
    /// Roots closer than `dedup_tol · (1 + ‖root‖)` are merged.
    pub dedup_tol: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            starts: 2000,
            box_bound: 10.0,
            tol: 1e-10,
            max_iter: 100,
            dedup_tol: 1e-6,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = self.starts > 0
            && self.max_iter > 0
            && self.box_bound > 0.0
            && self.tol > 0.0
            && self.dedup_tol > 0.0;
        if !positive {
            return Err(Error::InvalidConfig(format!(
                "all search parameters must be positive: {self:?}"
            )));
        }
        if self.dedup_tol <= self.tol {
            return Err(Error::InvalidConfig(format!(
                "dedup_tol {} must exceed tol {}",
                self.dedup_tol, self.tol
            )));
        }
        Ok(())
    }
}

fn radical_inverse(mut i: usize, base: usize) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// Point `i` of the 3-D Halton sequence in `[0, 1)³`.
pub fn halton3(i: usize) -> [f64; 3] {
    [
        radical_inverse(i, 2),
        radical_inverse(i, 3),
        radical_inverse(i, 5),
    ]
}

fn monic_aux(j: [f64; 3], t: f64) -> f64 {
    let a = j[1] / j[0];
    let b = j[2] / j[0];
    let beta = b * b / a;
    t * t * (t - (a + 1.0 / a) - beta) + 4.0 * beta
}

/// Root above 2 of the auxiliary cubic for `j` in the order given, by
/// bisection. `f(2) = −4(A − 1)²/A < 0` and `f → +∞` bracket it.
pub fn bisect_t0(j: [f64; 3]) -> Result<f64> {
    if j.iter().any(|&x| !(x.is_finite() && x > 0.0)) {
        return Err(Error::DegenerateCase(format!(
            "bisection needs positive finite entries, got {j:?}"
        )));
    }
    if j[0] == j[1] || j[0] == j[2] || j[1] == j[2] {
        return Err(Error::DegenerateCase(format!(
            "entries of {j:?} are not pairwise distinct"
        )));
    }
    let f = |t: f64| monic_aux(j, t);
    let mut lo = 2.0;
    if f(lo).is_nan() || f(lo) >= 0.0 {
        return Err(Error::DegenerateCase(format!(
            "f(2) is not negative for {j:?}"
        )));
    }
    let mut hi = 4.0;
    while f(hi) <= 0.0 {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::DegenerateCase(format!("no upper bracket for {j:?}")));
        }
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn sup(v: [f64; 3]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn diag_res(b: [f64; 3], j: [f64; 3]) -> f64 {
    let l = diag_map_n3(b);
    sup([l[0] - j[0], l[1] - j[1], l[2] - j[2]])
}

/// Gaussian elimination with partial pivoting.
fn gauss3(mut m: [[f64; 3]; 3], mut r: [f64; 3]) -> Option<[f64; 3]> {
    for c in 0..3 {
        let p = (c..3).max_by(|&x, &y| m[x][c].abs().total_cmp(&m[y][c].abs()))?;
        if m[p][c].abs() < 1e-300 {
            return None;
        }
        m.swap(c, p);
        r.swap(c, p);
        for row in c + 1..3 {
            let f = m[row][c] / m[c][c];
            for k in c..3 {
                m[row][k] -= f * m[c][k];
            }
            r[row] -= f * r[c];
        }
    }
    let mut x = [0.0; 3];
    for c in (0..3).rev() {
        let s: f64 = (c + 1..3).map(|k| m[c][k] * x[k]).sum();
        x[c] = (r[c] - s) / m[c][c];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

fn newton_from(mut b: [f64; 3], j: [f64; 3], cfg: &SearchConfig, accept: f64) -> Option<[f64; 3]> {
    let mut res = diag_res(b, j);
    for _ in 0..cfg.max_iter {
        if res <= 1e-3 * accept {
            break;
        }
        let [x, y, z] = b;
        let jac = [
            [y * y + z * z, 2.0 * x * y, 2.0 * x * z],
            [2.0 * x * y, x * x + z * z, 2.0 * y * z],
            [2.0 * x * z, 2.0 * y * z, x * x + y * y],
        ];
        let l = diag_map_n3(b);
        let Some(step) = gauss3(jac, [l[0] - j[0], l[1] - j[1], l[2] - j[2]]) else {
            break;
        };
        let mut t = 1.0;
        let mut moved = false;
        for _ in 0..=30 {
            let cand = [b[0] - t * step[0], b[1] - t * step[1], b[2] - t * step[2]];
            let r = diag_res(cand, j);
            if r < res {
                b = cand;
                res = r;
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if !moved {
            break;
        }
    }
    (res <= accept).then_some(b)
}

/// Roots of `b ↦ (b₁(b₂²+b₃²), b₂(b₁²+b₃²), b₃(b₁²+b₂²)) − j` reachable by
/// damped Newton from Halton seeds, deduplicated and sorted.
pub fn newton_sweep(j: [f64; 3], cfg: &SearchConfig) -> Result<Vec<[f64; 3]>> {
    cfg.validate()?;
    let accept = cfg.tol * (1.0 + (j[0] * j[0] + j[1] * j[1] + j[2] * j[2]).sqrt());
    let mut roots: Vec<[f64; 3]> = Vec::new();
    for i in 1..=cfg.starts {
        let h = halton3(i);
        let seed = h.map(|u| cfg.box_bound * (2.0 * u - 1.0));
        let Some(r) = newton_from(seed, j, cfg, accept) else {
            continue;
        };
        let dup = roots.iter().any(|c| {
            sup([r[0] - c[0], r[1] - c[1], r[2] - c[2]]) <= cfg.dedup_tol * (1.0 + sup(*c))
        });
        if !dup {
            roots.push(r);
        }
    }
    roots.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(roots)
}

/// Whether two root sets coincide, matching points within
/// `eps · (1 + ‖q‖)` in the max norm.
pub fn root_sets_match(a: &[[f64; 3]], b: &[[f64; 3]], eps: f64) -> bool {
    let covered = |x: &[[f64; 3]], y: &[[f64; 3]]| {
        x.iter().all(|p| {
            y.iter()
                .any(|q| sup([p[0] - q[0], p[1] - q[1], p[2] - q[2]]) <= eps * (1.0 + sup(*q)))
        })
    };
    a.len() == b.len() && covered(a, b) && covered(b, a)
}

/// Outcome of [`closed_form_sweep`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SweepReport {
    pub trials: usize,
    pub matches: usize,
    pub max_root_count: usize,
    pub discrepancies: Vec<String>,
}

impl SweepReport {
    pub fn all_match(&self) -> bool {
        self.matches == self.trials
    }
}

/// Compares [`newton_sweep`] with the closed-form solver on random positive
/// triples drawn from `[lo, hi]³`.
pub fn closed_form_sweep(
    trials: usize,
    range: (f64, f64),
    seed: u64,
    cfg: &SearchConfig,
) -> Result<SweepReport> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tol = Tolerances::default();
    let mut rep = SweepReport {
        trials,
        ..SweepReport::default()
    };
    for _ in 0..trials {
        let j: [f64; 3] = std::array::from_fn(|_| rng.random_range(range.0..range.1));
        let found = newton_sweep(j, cfg)?;
        let closed = solve_diag_n3(j, &tol);
        rep.max_root_count = rep.max_root_count.max(found.len());
        if root_sets_match(&found, &closed.solutions, 1e-6) {
            rep.matches += 1;
        } else {
            rep.discrepancies.push(format!(
                "j = {j:?}: newton {found:?}, closed form {:?}",
                closed.solutions
            ));
        }
    }
    Ok(rep)
}

/// Haar-distributed element of O(n).
pub fn random_orthogonal<R: Rng>(n: usize, rng: &mut R) -> MatR {
    let g = MatR::new(
        n,
        n,
        (0..n * n).map(|_| rng.sample(StandardNormal)).collect(),
    )
    .expect("finite gaussian entries");
    let q = orthonormalize_columns(&g);
    // sign fix against R's diagonal keeps the distribution uniform
    let r = q.transpose().matmul(&g);
    let mut out = q;
    for c in 0..n {
        if r[(c, c)] < 0.0 {
            for row in 0..n {
                out[(row, c)] = -out[(row, c)];
            }
        }
    }
    out
}

/// Haar-distributed element of SO(n).
pub fn random_rotation<R: Rng>(n: usize, rng: &mut R) -> MatR {
    let mut q = random_orthogonal(n, rng);
    if q.det() < 0.0 {
        for row in 0..n {
            q[(row, 0)] = -q[(row, 0)];
        }
    }
    q
}

/// `n × 3` matrix of standard normal entries.
pub fn random_gaussian<R: Rng>(n: usize, cols: usize, rng: &mut R) -> MatR {
    MatR::new(
        n,
        cols,
        (0..n * cols).map(|_| rng.sample(StandardNormal)).collect(),
    )
    .expect("finite gaussian entries")
}

/// Whether `a` appears among `candidates`, directly or after frame
/// alignment by singular values, given that `a` solves `j`.
pub fn recovered(a: &MatR, candidates: &[MatR], j: &Current, eps: f64) -> Result<bool> {
    let scale = a.max_abs().max(1.0);
    if candidates.iter().any(|c| c.sub(a).max_abs() <= eps * scale) {
        return Ok(true);
    }
    let res = residual(&Potential::new(a.clone())?, j)?.max_abs();
    if res > 1e-9 * (1.0 + j.coeffs().frobenius_norm()) {
        return Ok(false);
    }
    let sa = svd_n_by_3(a)?.d;
    for c in candidates {
        let sc = svd_n_by_3(c)?.d;
        if sup([sa[0] - sc[0], sa[1] - sc[1], sa[2] - sc[2]]) <= eps * scale {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Outcome of [`roundtrip_certify`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CertifyReport {
    pub trials: usize,
    pub passes: usize,
    pub worst_residual: f64,
    pub failures: Vec<String>,
}

impl CertifyReport {
    pub fn all_pass(&self) -> bool {
        self.passes == self.trials
    }
}

/// Draws random potentials, sets `J := L(A)`, solves and checks that `A` is
/// among the returned solutions. Every eighth trial uses a rank-one
/// potential and every eighth (offset by four) a rank-two one.
pub fn roundtrip_certify(trials: usize, n_max: usize, seed: u64) -> Result<CertifyReport> {
    if trials == 0 || n_max < 2 {
        return Err(Error::InvalidConfig(format!(
            "need trials >= 1 and n_max >= 2, got {trials} and {n_max}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tol = Tolerances::default();
    let mut rep = CertifyReport {
        trials,
        ..CertifyReport::default()
    };
    for t in 0..trials {
        let n = rng.random_range(2..=n_max);
        let a = match t % 8 {
            0 => {
                let u = random_gaussian(n, 1, &mut rng);
                let v = random_gaussian(1, 3, &mut rng);
                u.matmul(&v)
            }
            4 if n >= 3 => {
                let u = random_gaussian(n, 2, &mut rng);
                let v = random_gaussian(2, 3, &mut rng);
                u.matmul(&v)
            }
            _ => random_gaussian(n, 3, &mut rng),
        };
        let j = Current::new(field_equation_lhs(&a))?;
        let report = solve(&j, &tol)?;
        rep.worst_residual = rep.worst_residual.max(report.max_residual());
        let gate = 1e-9 * (1.0 + j.coeffs().frobenius_norm());
        let ok = if report.max_residual() > gate {
            false
        } else if report.kind == SolutionKind::OneParameterFamily {
            let d = svd_n_by_3(&a)?.d;
            d[1] <= 1e-8 * d[0].max(1.0)
        } else {
            let cands: Vec<MatR> = report
                .solutions
                .iter()
                .map(|s| s.potential.coeffs().clone())
                .collect();
            recovered(&a, &cands, &j, 1e-8)?
        };
        if ok {
            rep.passes += 1;
        } else {
            rep.failures.push(format!(
                "trial {t}: n = {n}, case {}, singular values {:?}, max residual {:e}",
                report.case,
                report.singular_values,
                report.max_residual()
            ));
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cubic::solve_t0;
    use approx::assert_relative_eq;

    #[test]
    fn halton_first_points() {
        assert_eq!(halton3(1), [0.5, 1.0 / 3.0, 0.2]);
        assert_eq!(halton3(2), [0.25, 2.0 / 3.0, 0.4]);
    }

    #[test]
    fn config_validation() {
        assert!(SearchConfig::default().validate().is_ok());
        let bad = SearchConfig {
            dedup_tol: 1e-12,
            ..SearchConfig::default()
        };
        assert!(matches!(bad.validate(), Err(Error::InvalidConfig(_))));
        let bad = SearchConfig {
            starts: 0,
            ..SearchConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn bisect_worked_example() {
        let t = bisect_t0([13.0, 20.0, 15.0]).unwrap();
        assert_relative_eq!(t, 2.5, epsilon = 1e-13);
        let s = solve_t0([13.0, 20.0, 15.0], &Tolerances::default()).unwrap();
        assert!((t - s).abs() <= 1e-11);
    }

    #[test]
    fn bisect_sorted_matches_solve_t0() {
        let j = [20.0, 13.0, 15.0];
        let t = bisect_t0(j).unwrap();
        let s = solve_t0(j, &Tolerances::default()).unwrap();
        assert!((t - s).abs() <= 1e-11);
        assert!(t > 13.0 / 20.0 + 20.0 / 13.0);
    }

    #[test]
    fn bisect_near_tie() {
        let j = [1.0, 1.0 + 1e-6, 2.0];
        let t = bisect_t0(j).unwrap();
        let s = solve_t0(j, &Tolerances::default()).unwrap();
        assert!((t - s).abs() <= 1e-8);
    }

    #[test]
    fn bisect_rejects_ties() {
        assert!(matches!(
            bisect_t0([1.0, 1.0, 2.0]),
            Err(Error::DegenerateCase(_))
        ));
        assert!(bisect_t0([1.0, -2.0, 3.0]).is_err());
    }

    #[test]
    fn newton_worked_example() {
        let roots = newton_sweep([13.0, 20.0, 15.0], &SearchConfig::default()).unwrap();
        let c = 6f64.powf(2.0 / 3.0);
        let expected = [[1.0, 2.0, 3.0], [c, c / 2.0, c / 3.0]];
        assert!(root_sets_match(&roots, &expected, 1e-9), "{roots:?}");
    }

    #[test]
    fn newton_all_equal() {
        let roots = newton_sweep([2.0; 3], &SearchConfig::default()).unwrap();
        assert_eq!(roots.len(), 1);
        // the Jacobian has rank one at (1, 1, 1): position error ~ √residual
        assert!(sup([roots[0][0] - 1.0, roots[0][1] - 1.0, roots[0][2] - 1.0]) < 1e-5);
    }

    #[test]
    fn newton_rank_one_has_no_roots() {
        let roots = newton_sweep([7.0, 0.0, 0.0], &SearchConfig::default()).unwrap();
        assert!(roots.is_empty(), "{roots:?}");
    }

    #[test]
    fn sweep_small() {
        let cfg = SearchConfig {
            starts: 300,
            ..SearchConfig::default()
        };
        let rep = closed_form_sweep(10, (0.5, 10.0), 3, &cfg).unwrap();
        assert!(rep.all_match(), "{:?}", rep.discrepancies);
        assert!(rep.max_root_count <= 2);
    }

    #[test]
    fn random_orthogonal_is_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..7 {
            let q = random_orthogonal(n, &mut rng);
            let e = q.transpose().matmul(&q).sub(&MatR::identity(n)).max_abs();
            assert!(e < 1e-13);
            let r = random_rotation(n, &mut rng);
            assert_relative_eq!(r.det(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn certify_small() {
        let rep = roundtrip_certify(40, 5, 11).unwrap();
        assert!(rep.all_pass(), "{:?}", rep.failures);
        assert!(roundtrip_certify(0, 3, 0).is_err());
        assert!(roundtrip_certify(3, 1, 0).is_err());
    }

    #[test]
    fn certify_is_deterministic() {
        assert_eq!(
            roundtrip_certify(16, 4, 99).unwrap(),
            roundtrip_certify(16, 4, 99).unwrap()
        );
    }
}
