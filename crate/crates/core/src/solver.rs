//! End-to-end pipeline: classify a current, diagonalize it, solve the
//! diagonal system and map every solution back to the caller's frame.

use crate::cubic::{
    case_label_n2, case_label_n3, solve_diag_n2, solve_diag_n3, BranchParams, CaseLabel,
    DiagSolutionSet, SolutionKind,
};
use crate::error::{Error, Result};
use crate::linalg::{svd_n_by_3, MatR, SvdFrame};
use crate::su2::levi_civita;
use crate::Tolerances;

fn require_three_columns(m: &MatR, what: &str) -> Result<()> {
    if m.cols() != 3 {
        return Err(Error::Dimension(format!(
            "{what} must be n x 3, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

/// Constant current `J^ν_a`, an `n × 3` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Current(MatR);

impl Current {
    pub fn new(coeffs: MatR) -> Result<Self> {
        require_three_columns(&coeffs, "current")?;
        Ok(Self(coeffs))
    }

    pub fn zeros(n: usize) -> Self {
        Self(MatR::zeros(n, 3))
    }

    pub fn n(&self) -> usize {
        self.0.rows()
    }

    pub fn coeffs(&self) -> &MatR {
        &self.0
    }
}

/// Constant potential `A^ν_a`, an `n × 3` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Potential(MatR);

impl Potential {
    pub fn new(coeffs: MatR) -> Result<Self> {
        require_three_columns(&coeffs, "potential")?;
        Ok(Self(coeffs))
    }

    pub fn zeros(n: usize) -> Self {
        Self(MatR::zeros(n, 3))
    }

    pub fn n(&self) -> usize {
        self.0.rows()
    }

    pub fn coeffs(&self) -> &MatR {
        &self.0
    }

    pub fn into_coeffs(self) -> MatR {
        self.0
    }
}

/// Left side of the field equations, `A·(AᵀA) − tr(AᵀA)·A`.
///
/// Row ν is `Σ_μ a^μ × (a^μ × a^ν)` with `a^μ` the rows of `A`.
pub fn field_equation_lhs(a: &MatR) -> MatR {
    let gram = a.transpose().matmul(a);
    a.matmul(&gram).sub(&a.scale(gram.trace()))
}

/// Left side of the field equations by the explicit double Levi-Civita
/// contraction `A_{μc} A^μ_a A^ν_b ε^{ab}_d ε^{cd}_k`.
pub fn field_equation_lhs_contraction(a: &MatR) -> MatR {
    let n = a.rows();
    let mut eps_pairs: Vec<(usize, usize, usize, usize, usize, f64)> = Vec::new();
    for ia in 0..3 {
        for ib in 0..3 {
            for id in 0..3 {
                let e1 = levi_civita(ia, ib, id);
                if e1 == 0.0 {
                    continue;
                }
                for ic in 0..3 {
                    for k in 0..3 {
                        let e2 = levi_civita(ic, id, k);
                        if e2 != 0.0 {
                            eps_pairs.push((ia, ib, ic, id, k, e1 * e2));
                        }
                    }
                }
            }
        }
    }
    let mut out = MatR::zeros(n, 3);
    for nu in 0..n {
        for mu in 0..n {
            for &(ia, ib, ic, _, k, e) in &eps_pairs {
                out[(nu, k)] += a[(mu, ic)] * a[(mu, ia)] * a[(nu, ib)] * e;
            }
        }
    }
    out
}

/// `L(A) − J`, zero exactly for solutions.
pub fn residual(a: &Potential, j: &Current) -> Result<MatR> {
    if a.n() != j.n() {
        return Err(Error::DimensionMismatch {
            left: format!("potential {}x3", a.n()),
            right: format!("current {}x3", j.n()),
        });
    }
    let lhs = field_equation_lhs(a.coeffs());
    debug_assert!({
        let other = field_equation_lhs_contraction(a.coeffs());
        let scale = 1.0 + a.coeffs().max_abs().powi(3);
        lhs.sub(&other).max_abs() <= 1e-12 * scale * a.n() as f64
    });
    Ok(lhs.sub(j.coeffs()))
}

/// Field strength of a constant potential, `F^{μν} = −[A^μ, A^ν]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Strength {
    n: usize,
    comps: Vec<[f64; 3]>,
    /// `λ` with `F_{μν}F^{μν} = λ·𝟙`.
    pub f2coeff: f64,
}

impl Strength {
    pub fn n(&self) -> usize {
        self.n
    }

    /// `F^{μν}_c` for `c = 1, 2, 3`.
    pub fn component(&self, mu: usize, nu: usize) -> [f64; 3] {
        self.comps[mu * self.n + nu]
    }

    /// Largest absolute component.
    pub fn max_abs(&self) -> f64 {
        self.comps.iter().flatten().fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// `F^{μν}_c = −(a^μ × a^ν)_c` and `λ = −¼ Σ (F^{μν}_c)²`.
///
/// The factor comes from `τᶜτᵈ + τᵈτᶜ = −½δ^{cd}𝟙`.
pub fn strength(a: &Potential) -> Strength {
    let n = a.n();
    let m = a.coeffs();
    let mut comps = vec![[0.0; 3]; n * n];
    let mut sum = 0.0;
    for mu in 0..n {
        let u = m.row3(mu);
        for nu in 0..n {
            let v = m.row3(nu);
            let f = [
                -(u[1] * v[2] - u[2] * v[1]),
                -(u[2] * v[0] - u[0] * v[2]),
                -(u[0] * v[1] - u[1] * v[0]),
            ];
            sum += f.iter().map(|x| x * x).sum::<f64>();
            comps[mu * n + nu] = f;
        }
    }
    Strength {
        n,
        comps,
        f2coeff: -0.25 * sum,
    }
}

/// Output of [`classify`].
#[derive(Clone, Debug, PartialEq)]
pub struct Classification {
    pub n: usize,
    /// Non-increasing; zero-padded for `n < 3`.
    pub singular_values: [f64; 3],
    pub rank: usize,
    pub case: CaseLabel,
    /// `None` for `n = 1`.
    pub frame: Option<SvdFrame>,
}

/// Singular values, rank and case of a current.
pub fn classify(j: &Current, tol: &Tolerances) -> Result<Classification> {
    let n = j.n();
    let norm = j.coeffs().frobenius_norm();
    let thresh = tol.zero * norm.max(1.0);
    if n == 1 {
        let rank = usize::from(norm > thresh);
        return Ok(Classification {
            n,
            singular_values: [norm, 0.0, 0.0],
            rank,
            case: CaseLabel::OneDimensional,
            frame: None,
        });
    }
    let frame = svd_n_by_3(j.coeffs())?;
    let d = frame.d;
    let rank = d.iter().filter(|&&x| x > thresh).count();
    let case = if n == 2 {
        case_label_n2([d[0], d[1]], tol)
    } else {
        case_label_n3(d, tol)
    };
    Ok(Classification {
        n,
        singular_values: d,
        rank,
        case,
        frame: Some(frame),
    })
}

/// A solution in the caller's frame together with its diagonal-frame form.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub potential: Potential,
    /// `Q·A·P`, rectangular diagonal with non-positive entries.
    pub diagonal: MatR,
    pub strength: Strength,
    /// Max-norm of `residual(potential, J)`.
    pub residual: f64,
}

/// Continuous freedom in the solution set.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilyDescriptor {
    /// Diagonal-frame representative the freedom acts on.
    pub canonical: MatR,
    pub freedom: String,
    /// Whether the freedom produces potentials other than the listed ones.
    pub yields_new_potentials: bool,
}

/// Every constant solution for a given current.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionReport {
    pub n: usize,
    pub case: CaseLabel,
    pub kind: SolutionKind,
    pub singular_values: [f64; 3],
    pub rank: usize,
    pub solutions: Vec<Solution>,
    pub family: Option<FamilyDescriptor>,
    pub k: Option<f64>,
    pub frame: Option<SvdFrame>,
    /// Diagonal solution set the listed solutions were built from.
    pub diagonal_set: Option<DiagSolutionSet>,
    pub tolerances: Tolerances,
}

impl SolutionReport {
    pub fn max_residual(&self) -> f64 {
        self.solutions
            .iter()
            .map(|s| s.residual)
            .fold(0.0, f64::max)
    }

    /// Family member `Qᵀ Q₁ᵀ A_D P₁ᵀ Pᵀ` for a stabilizer pair
    /// `Q₁ J_D P₁ = J_D`, applied to the diagonal form `a_d`.
    pub fn stabilizer_image(&self, a_d: &MatR, q1: &MatR, p1: &MatR) -> Result<Potential> {
        let frame = self
            .frame
            .as_ref()
            .ok_or_else(|| Error::WrongCase("no diagonal frame for n = 1".to_string()))?;
        let j_d = frame.diagonal();
        let moved = q1.try_matmul(&j_d)?.try_matmul(p1)?;
        let defect = moved.sub(&j_d).max_abs();
        if defect > 1e-9 * (1.0 + j_d.max_abs()) {
            return Err(Error::WrongCase(format!(
                "(Q1, P1) does not stabilize the diagonal current (defect {defect:e})"
            )));
        }
        let inner = q1.transpose().matmul(a_d).matmul(&p1.transpose());
        Potential::new(frame.to_original(&inner))
    }
}

fn make_solution(a: MatR, diagonal: MatR, j: &Current) -> Result<Solution> {
    let potential = Potential::new(a)?;
    let residual = residual(&potential, j)?.max_abs();
    let strength = strength(&potential);
    Ok(Solution {
        potential,
        diagonal,
        strength,
        residual,
    })
}

fn zero_family(n: usize) -> FamilyDescriptor {
    FamilyDescriptor {
        canonical: MatR::rect_diag(n, 3, &[1.0]),
        freedom: "A = Q^T Q1 (a E11) P1 P^T for every a in R, Q1 in O(n), P1 in SO(3); \
                  equivalently every A of rank <= 1; F = 0"
            .to_string(),
        yields_new_potentials: true,
    }
}

/// Every constant solution `A` of the field equations with current `J`.
pub fn solve(j: &Current, tol: &Tolerances) -> Result<SolutionReport> {
    let class = classify(j, tol)?;
    let n = class.n;
    let mut report = SolutionReport {
        n,
        case: class.case,
        kind: SolutionKind::Empty,
        singular_values: class.singular_values,
        rank: class.rank,
        solutions: Vec::new(),
        family: None,
        k: None,
        frame: class.frame.clone(),
        diagonal_set: None,
        tolerances: *tol,
    };

    if n == 1 {
        if class.rank == 0 {
            report.kind = SolutionKind::OneParameterFamily;
            report
                .solutions
                .push(make_solution(MatR::zeros(1, 3), MatR::zeros(1, 3), j)?);
            report.family = Some(FamilyDescriptor {
                canonical: MatR::rect_diag(1, 3, &[1.0]),
                freedom: "A^1 arbitrary in su(2); F = 0".to_string(),
                yields_new_potentials: true,
            });
        }
        return Ok(report);
    }

    let frame = class.frame.expect("frame present for n >= 2");
    let d = frame.d;
    let set = if n == 2 {
        solve_diag_n2([d[0], d[1]], tol)
    } else {
        solve_diag_n3(d, tol)
    };
    debug_assert_eq!(set.case, class.case);

    report.kind = set.kind;
    report.k = set.k;
    match set.kind {
        SolutionKind::OneParameterFamily => {
            report
                .solutions
                .push(make_solution(MatR::zeros(n, 3), MatR::zeros(n, 3), j)?);
            report.family = Some(zero_family(n));
        }
        SolutionKind::Finite => {
            for b in &set.solutions {
                let neg: Vec<f64> = b[..set.dim].iter().map(|x| -x).collect();
                let a_d = MatR::rect_diag(n, 3, &neg);
                let a = frame.to_original(&a_d);
                report.solutions.push(make_solution(a, a_d, j)?);
            }
            report.family = stabilizer_family(&set, &report.solutions);
        }
        SolutionKind::Empty => {}
    }
    report.diagonal_set = Some(set);
    report.frame = Some(frame);
    Ok(report)
}

/// Stabilizer freedom of a repeated nonzero singular value. Only the
/// two-small-equal case moves the listed potentials.
fn stabilizer_family(set: &DiagSolutionSet, sols: &[Solution]) -> Option<FamilyDescriptor> {
    let first = sols.first()?;
    match set.case {
        CaseLabel::TwoSmallEqual => Some(FamilyDescriptor {
            canonical: first.diagonal.clone(),
            freedom: "rotations R in SO(2) of the plane of the two equal singular values, \
                      Q1 = diag(1, R, I), P1 = diag(1, R^T), map each listed solution onto a \
                      circle of further solutions with the same F^2"
                .to_string(),
            yields_new_potentials: true,
        }),
        CaseLabel::AllEqual | CaseLabel::TwoLargeEqual => Some(FamilyDescriptor {
            canonical: first.diagonal.clone(),
            freedom: "stabilizer rotations of the equal singular values fix every listed \
                      solution"
                .to_string(),
            yields_new_potentials: false,
        }),
        _ => None,
    }
}

/// `λ₊, λ₋` from the closed forms of the three two-solution cases, in the
/// order [`solve_diag_n3`] lists the solutions.
pub fn f2_closed_form(case: CaseLabel, j: [f64; 3], tol: &Tolerances) -> Result<(f64, f64)> {
    if !case.is_two_solution() {
        return Err(Error::WrongCase(format!(
            "{case} has no closed form for a solution pair"
        )));
    }
    let set = solve_diag_n3(j, tol);
    if set.case != case {
        return Err(Error::WrongCase(format!(
            "current {j:?} is {}, not {case}",
            set.case
        )));
    }
    let k = set.k.expect("two-solution case carries K");
    let k2 = k * k;
    match set.params {
        Some(BranchParams::TwoLargeEqual { z }) => {
            let f = |z: f64| -k2 * (1.0 + 2.0 * z * z) / (2.0 * z.powf(4.0 / 3.0));
            Ok((f(z[0]), f(z[1])))
        }
        Some(BranchParams::TwoSmallEqual { s, .. }) => {
            let l = -k2 * (s * s - 1.0) / 2.0;
            Ok((l, l))
        }
        Some(BranchParams::AllDistinct { y, z, .. }) => {
            let f = |y: f64, z: f64| {
                -k2 * (y * y + z * z + y * y * z * z) / (2.0 * (y * z).powf(4.0 / 3.0))
            };
            Ok((f(y[0], z[0]), f(y[1], z[1])))
        }
        None => Err(Error::WrongCase("missing branch parameters".to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cur(rows: &[[f64; 3]]) -> Current {
        Current::new(MatR::from_rows(rows).unwrap()).unwrap()
    }

    fn pot(rows: &[[f64; 3]]) -> Potential {
        Potential::new(MatR::from_rows(rows).unwrap()).unwrap()
    }

    #[test]
    fn residual_zero_potential() {
        let r = residual(&Potential::zeros(3), &Current::zeros(3)).unwrap();
        assert_eq!(r, MatR::zeros(3, 3));
    }

    #[test]
    fn residual_worked_example() {
        let a = pot(&[[-1.0, 0.0, 0.0], [0.0, -2.0, 0.0], [0.0, 0.0, -3.0]]);
        let j = cur(&[[13.0, 0.0, 0.0], [0.0, 20.0, 0.0], [0.0, 0.0, 15.0]]);
        assert_eq!(residual(&a, &j).unwrap().max_abs(), 0.0);
        assert_eq!(
            field_equation_lhs_contraction(a.coeffs()),
            field_equation_lhs(a.coeffs())
        );
    }

    #[test]
    fn residual_wrong_sign_is_minus_two_j() {
        let a = pot(&[[1.0, 0.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, 3.0]]);
        let j = cur(&[[13.0, 0.0, 0.0], [0.0, 20.0, 0.0], [0.0, 0.0, 15.0]]);
        let r = residual(&a, &j).unwrap();
        assert_eq!(r, j.coeffs().scale(-2.0));
    }

    #[test]
    fn residual_dimension_mismatch() {
        assert!(matches!(
            residual(&Potential::zeros(2), &Current::zeros(3)),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(Current::new(MatR::zeros(3, 2)).is_err());
    }

    #[test]
    fn strength_zero() {
        let s = strength(&Potential::zeros(4));
        assert_eq!(s.max_abs(), 0.0);
        assert_eq!(s.f2coeff, 0.0);
    }

    #[test]
    fn strength_rank_two_closed_form() {
        let (j1, j2) = (3.0f64, 5.0f64);
        let a = pot(&[
            [-(j2 * j2 / j1).cbrt(), 0.0, 0.0],
            [0.0, -(j1 * j1 / j2).cbrt(), 0.0],
            [0.0, 0.0, 0.0],
        ]);
        let s = strength(&a);
        assert_relative_eq!(s.component(0, 1)[2], -(j1 * j2).cbrt(), epsilon = 1e-14);
        assert_relative_eq!(s.component(1, 0)[2], (j1 * j2).cbrt(), epsilon = 1e-14);
        assert_eq!(s.component(0, 1)[0], 0.0);
        assert_eq!(s.component(0, 2), [0.0; 3]);
        assert_relative_eq!(s.f2coeff, -0.5 * (j1 * j2).powf(2.0 / 3.0), epsilon = 1e-14);
    }

    #[test]
    fn strength_all_equal_closed_form() {
        let j = 7.0f64;
        let a0 = -(j / 2.0).cbrt();
        let a = pot(&[[a0, 0.0, 0.0], [0.0, a0, 0.0], [0.0, 0.0, a0]]);
        let s = strength(&a);
        let v = -(j * j / 4.0).cbrt();
        assert_relative_eq!(s.component(0, 1)[2], v, epsilon = 1e-14);
        assert_relative_eq!(s.component(1, 2)[0], v, epsilon = 1e-14);
        assert_relative_eq!(s.component(2, 0)[1], v, epsilon = 1e-14);
        assert_relative_eq!(s.f2coeff, -1.5 * (j.powi(4) / 16.0).cbrt(), epsilon = 1e-13);
    }

    #[test]
    fn classify_examples() {
        let t = Tolerances::default();
        let c = classify(&Current::zeros(5), &t).unwrap();
        assert_eq!((c.rank, c.case), (0, CaseLabel::ZeroCurrent));

        let c = classify(
            &cur(&[[13.0, 0.0, 0.0], [0.0, 20.0, 0.0], [0.0, 0.0, 15.0]]),
            &t,
        )
        .unwrap();
        assert_eq!(c.rank, 3);
        assert_eq!(c.case, CaseLabel::AllDistinct);
        for (x, y) in c.singular_values.iter().zip([20.0, 15.0, 13.0]) {
            assert_relative_eq!(*x, y, epsilon = 1e-13);
        }

        // 5 u vᵀ with unit u, v
        let u = [0.6, 0.0, 0.8];
        let v = [2.0 / 3.0, -1.0 / 3.0, 2.0 / 3.0];
        let rows: Vec<[f64; 3]> = u.iter().map(|a| v.map(|b| 5.0 * a * b)).collect();
        let c = classify(&cur(&rows), &t).unwrap();
        assert_eq!((c.rank, c.case), (1, CaseLabel::Rank1NoSolution));
        assert_relative_eq!(c.singular_values[0], 5.0, epsilon = 1e-13);
    }

    #[test]
    fn one_dimensional() {
        let t = Tolerances::default();
        let r = solve(&Current::zeros(1), &t).unwrap();
        assert_eq!(r.kind, SolutionKind::OneParameterFamily);
        assert_eq!(r.case, CaseLabel::OneDimensional);
        let r = solve(&cur(&[[0.0, 1.0, 0.0]]), &t).unwrap();
        assert_eq!(r.kind, SolutionKind::Empty);
        assert!(r.solutions.is_empty());
        // any single row is a solution of the zero current
        let a = pot(&[[0.3, -2.0, 1.0]]);
        assert_eq!(residual(&a, &Current::zeros(1)).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn f2_wrong_case() {
        let t = Tolerances::default();
        assert!(matches!(
            f2_closed_form(CaseLabel::AllEqual, [1.0, 1.0, 1.0], &t),
            Err(Error::WrongCase(_))
        ));
        assert!(matches!(
            f2_closed_form(CaseLabel::TwoLargeEqual, [3.0, 2.0, 1.0], &t),
            Err(Error::WrongCase(_))
        ));
    }

    #[test]
    fn f2_two_small_equal_are_equal() {
        let t = Tolerances::default();
        let (p, m) = f2_closed_form(CaseLabel::TwoSmallEqual, [3.0, 1.0, 1.0], &t).unwrap();
        assert_eq!(p, m);
        assert!(p < 0.0);
    }

    #[test]
    fn f2_worked_example_branch() {
        let t = Tolerances::default();
        let (p, m) = f2_closed_form(CaseLabel::AllDistinct, [20.0, 15.0, 13.0], &t).unwrap();
        // b = (1, 2, 3) up to order gives -½(4 + 36 + 9)
        assert!((p + 24.5).abs() < 1e-10 || (m + 24.5).abs() < 1e-10);
        assert!((p - m).abs() > 1e-3);
    }
}
