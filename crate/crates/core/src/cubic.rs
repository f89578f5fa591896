//! Closed-form solutions of the diagonal cubic systems.
//!
//! In the diagonal frame, with `b = −a`, the field equations become
//!
//! ```text
//! n ≥ 3:  b₁(b₂² + b₃²) = j₁,  b₂(b₁² + b₃²) = j₂,  b₃(b₁² + b₂²) = j₃
//! n = 2:  b₁ b₂² = j₁,         b₂ b₁² = j₂
//! ```
//!
//! Flipping the sign of `j_k` flips the sign of `b_k`, so every input is
//! first reduced to the non-negative quadrant ([`sign_reduce`]) and permuted
//! into the pattern the formulas are written for. Results are mapped back
//! before returning.
//!
//! When all three `j_k` are nonzero and not all equal there are exactly two
//! solutions `b₊, b₋`, paired by `b₊ ⊙ b₋ = (K, K, K)` with
//! `K = (b₁b₂b₃)^{2/3}`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::Tolerances;

/// Shape of a solution set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SolutionKind {
    Empty,
    Finite,
    /// `{(b,0,0), (0,b,0), (0,0,b) : b ∈ ℝ}` (or `{(b,0), (0,b)}` for
    /// `n = 2`); only for a zero current.
    OneParameterFamily,
}

/// Row of the classification table of constant solutions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CaseLabel {
    ZeroCurrent,
    Rank1NoSolution,
    Rank2Unique,
    AllEqual,
    /// `j₁ = j₂ > j₃ > 0`
    TwoLargeEqual,
    /// `j₁ > j₂ = j₃ > 0`
    TwoSmallEqual,
    AllDistinct,
    /// `n = 1`: the equation reads `0 = J¹`.
    OneDimensional,
}

impl CaseLabel {
    /// Number of solutions the classification predicts; `None` for a family.
    pub fn expected_count(self) -> Option<usize> {
        match self {
            CaseLabel::ZeroCurrent => None,
            CaseLabel::Rank1NoSolution => Some(0),
            CaseLabel::Rank2Unique | CaseLabel::AllEqual => Some(1),
            CaseLabel::TwoLargeEqual | CaseLabel::TwoSmallEqual | CaseLabel::AllDistinct => Some(2),
            CaseLabel::OneDimensional => None,
        }
    }

    pub fn is_two_solution(self) -> bool {
        self.expected_count() == Some(2)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CaseLabel::ZeroCurrent => "zero-current",
            CaseLabel::Rank1NoSolution => "rank-1",
            CaseLabel::Rank2Unique => "rank-2",
            CaseLabel::AllEqual => "all-equal",
            CaseLabel::TwoLargeEqual => "two-large-equal",
            CaseLabel::TwoSmallEqual => "two-small-equal",
            CaseLabel::AllDistinct => "all-distinct",
            CaseLabel::OneDimensional => "one-dimensional",
        }
    }
}

impl std::fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Intermediate quantities of the two-solution branches, in the frame the
/// formulas are written for (see [`FormulaFrame`]). Index 0 is the `+`
/// branch, index 1 the `−` branch.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BranchParams {
    /// Frame `(j₁, j₂, j₃)` with `j₁ = j₂ > j₃`.
    TwoLargeEqual { z: [f64; 2] },
    /// Frame `(j₁, j₂, j₃)` with `j₃ > j₁ = j₂`.
    TwoSmallEqual { s: f64, w: [f64; 2] },
    /// Frame `(j₁, j₂, j₃) = (max, min, middle)`.
    AllDistinct { t0: f64, y: [f64; 2], z: [f64; 2] },
}

/// How the caller's `j` maps into the frame of the formulas:
/// `frame_j[i] = |j[perm[i]]|`, and a frame solution `c` maps back as
/// `b[perm[i]] = signs[perm[i]] · c[i]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FormulaFrame {
    pub perm: [usize; 3],
    pub signs: [f64; 3],
}

impl FormulaFrame {
    fn identity(signs: [f64; 3]) -> Self {
        Self {
            perm: [0, 1, 2],
            signs,
        }
    }

    fn unpermute(&self, c: [f64; 3]) -> [f64; 3] {
        let mut b = [0.0; 3];
        for i in 0..3 {
            let k = self.perm[i];
            b[k] = self.signs[k] * c[i];
        }
        b
    }
}

/// Solution set of a diagonal system.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagSolutionSet {
    /// 2 or 3; for `dim = 2` the third entry of every solution is zero.
    pub dim: usize,
    pub kind: SolutionKind,
    pub case: CaseLabel,
    /// For two-solution cases: `[b₊, b₋]`.
    pub solutions: Vec<[f64; 3]>,
    pub k: Option<f64>,
    pub params: Option<BranchParams>,
    pub frame: FormulaFrame,
}

impl DiagSolutionSet {
    fn empty(dim: usize, case: CaseLabel, signs: [f64; 3]) -> Self {
        Self {
            dim,
            kind: SolutionKind::Empty,
            case,
            solutions: Vec::new(),
            k: None,
            params: None,
            frame: FormulaFrame::identity(signs),
        }
    }

    fn family(dim: usize, signs: [f64; 3]) -> Self {
        Self {
            kind: SolutionKind::OneParameterFamily,
            ..Self::empty(dim, CaseLabel::ZeroCurrent, signs)
        }
    }

    /// Solution `i` truncated to `dim` entries.
    pub fn solution(&self, i: usize) -> &[f64] {
        &self.solutions[i][..self.dim]
    }

    /// Largest residual over all listed solutions.
    pub fn max_residual(&self, j: &[f64]) -> f64 {
        self.solutions
            .iter()
            .map(|b| match self.dim {
                2 => diag_residual_n2([b[0], b[1]], [j[0], j[1]]),
                _ => diag_residual_n3(*b, [j[0], j[1], j[2]]),
            })
            .fold(0.0, f64::max)
    }
}

/// Left-hand side of the `n ≥ 3` diagonal system.
#[inline]
pub fn diag_map_n3(b: [f64; 3]) -> [f64; 3] {
    let [x, y, z] = b;
    [
        x * (y * y + z * z),
        y * (x * x + z * z),
        z * (x * x + y * y),
    ]
}

/// Left-hand side of the `n = 2` diagonal system.
#[inline]
pub fn diag_map_n2(b: [f64; 2]) -> [f64; 2] {
    [b[0] * b[1] * b[1], b[1] * b[0] * b[0]]
}

/// Max-norm of `diag_map_n3(b) − j`.
pub fn diag_residual_n3(b: [f64; 3], j: [f64; 3]) -> f64 {
    let l = diag_map_n3(b);
    (0..3).map(|k| (l[k] - j[k]).abs()).fold(0.0, f64::max)
}

/// Max-norm of `diag_map_n2(b) − j`.
pub fn diag_residual_n2(b: [f64; 2], j: [f64; 2]) -> f64 {
    let l = diag_map_n2(b);
    (l[0] - j[0]).abs().max((l[1] - j[1]).abs())
}

fn sign_of(x: f64) -> f64 {
    if x < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Componentwise absolute values and signs (the sign of zero is `+1`).
pub fn sign_reduce(j: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    (j.map(f64::abs), j.map(sign_of))
}

fn norm3(j: [f64; 3]) -> f64 {
    (j[0] * j[0] + j[1] * j[1] + j[2] * j[2]).sqrt()
}

fn zero_mask(jabs: [f64; 3], tol: &Tolerances) -> [bool; 3] {
    let thresh = tol.zero * norm3(jabs).max(1.0);
    jabs.map(|x| x <= thresh)
}

/// Indices sorting `v` in non-increasing order (stable).
fn argsort_desc(v: [f64; 3]) -> [usize; 3] {
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&a, &b| v[b].total_cmp(&v[a]));
    idx
}

/// Routes a triple of positive values, sorted non-increasing, to its
/// rank-3 case using the tie tolerance.
fn rank3_case(c: [f64; 3], tol: &Tolerances) -> CaseLabel {
    let tie = tol.tie * c[0];
    let g12 = c[0] - c[1];
    let g23 = c[1] - c[2];
    if c[0] - c[2] <= tie {
        CaseLabel::AllEqual
    } else if g12 <= tie && g12 <= g23 {
        CaseLabel::TwoLargeEqual
    } else if g23 <= tie {
        CaseLabel::TwoSmallEqual
    } else if g12 <= tie {
        CaseLabel::TwoLargeEqual
    } else {
        CaseLabel::AllDistinct
    }
}

/// Classification of an `n ≥ 3` diagonal current.
pub fn case_label_n3(j: [f64; 3], tol: &Tolerances) -> CaseLabel {
    let (jabs, _) = sign_reduce(j);
    let zero = zero_mask(jabs, tol);
    match zero.iter().filter(|z| !**z).count() {
        0 => CaseLabel::ZeroCurrent,
        1 => CaseLabel::Rank1NoSolution,
        2 => CaseLabel::Rank2Unique,
        _ => {
            let order = argsort_desc(jabs);
            rank3_case(order.map(|i| jabs[i]), tol)
        }
    }
}

/// Classification of an `n = 2` diagonal current.
pub fn case_label_n2(j: [f64; 2], tol: &Tolerances) -> CaseLabel {
    let (jabs, _) = sign_reduce([j[0], j[1], 0.0]);
    let zero = zero_mask(jabs, tol);
    match (zero[0], zero[1]) {
        (true, true) => CaseLabel::ZeroCurrent,
        (false, false) => CaseLabel::Rank2Unique,
        _ => CaseLabel::Rank1NoSolution,
    }
}

/// General solution of `b₁b₂² = j₁, b₂b₁² = j₂`.
pub fn solve_diag_n2(j: [f64; 2], tol: &Tolerances) -> DiagSolutionSet {
    let (jabs, signs) = sign_reduce([j[0], j[1], 0.0]);
    match case_label_n2(j, tol) {
        CaseLabel::ZeroCurrent => DiagSolutionSet::family(2, signs),
        CaseLabel::Rank2Unique => {
            let (j1, j2) = (jabs[0], jabs[1]);
            let c = [(j2 * j2 / j1).cbrt(), (j1 * j1 / j2).cbrt(), 0.0];
            let frame = FormulaFrame::identity(signs);
            DiagSolutionSet {
                dim: 2,
                kind: SolutionKind::Finite,
                case: CaseLabel::Rank2Unique,
                solutions: vec![frame.unpermute(c)],
                k: None,
                params: None,
                frame,
            }
        }
        case => DiagSolutionSet::empty(2, case, signs),
    }
}

/// General solution of the `n ≥ 3` diagonal system.
pub fn solve_diag_n3(j: [f64; 3], tol: &Tolerances) -> DiagSolutionSet {
    let (jabs, signs) = sign_reduce(j);
    let zero = zero_mask(jabs, tol);
    let case = case_label_n3(j, tol);

    let (frame_sols, perm, k, params): (Vec<[f64; 3]>, [usize; 3], _, _) = match case {
        CaseLabel::ZeroCurrent => return DiagSolutionSet::family(3, signs),
        CaseLabel::Rank1NoSolution => return DiagSolutionSet::empty(3, case, signs),
        CaseLabel::Rank2Unique => {
            let z = zero.iter().position(|&x| x).unwrap();
            let (p, q) = match z {
                0 => (1, 2),
                1 => (0, 2),
                _ => (0, 1),
            };
            let (j1, j2) = (jabs[p], jabs[q]);
            let c = [(j2 * j2 / j1).cbrt(), (j1 * j1 / j2).cbrt(), 0.0];
            (vec![c], [p, q, z], None, None)
        }
        CaseLabel::AllEqual => {
            let jm = (jabs[0] + jabs[1] + jabs[2]) / 3.0;
            let c = (jm / 2.0).cbrt();
            (vec![[c, c, c]], [0, 1, 2], None, None)
        }
        CaseLabel::TwoLargeEqual => {
            let o = argsort_desc(jabs);
            let j1 = 0.5 * (jabs[o[0]] + jabs[o[1]]);
            let j3 = jabs[o[2]];
            let (sols, z) = two_large_equal(j1, j3);
            let k = (j3 / 2.0).powf(2.0 / 3.0);
            (
                sols.to_vec(),
                o,
                Some(k),
                Some(BranchParams::TwoLargeEqual { z }),
            )
        }
        CaseLabel::TwoSmallEqual => {
            // formulas are written for j₃ > j₁ = j₂: move the largest last
            let o = argsort_desc(jabs);
            let perm = [o[1], o[2], o[0]];
            let j1 = 0.5 * (jabs[o[1]] + jabs[o[2]]);
            let j3 = jabs[o[0]];
            let (sols, s, w) = two_small_equal(j1, j3);
            let k = (j1 / s).powf(2.0 / 3.0);
            (
                sols.to_vec(),
                perm,
                Some(k),
                Some(BranchParams::TwoSmallEqual { s, w }),
            )
        }
        CaseLabel::AllDistinct => {
            let o = argsort_desc(jabs);
            // (max, min, middle): keeps A = j₂/j₁ as far from 1 as possible
            let perm = [o[0], o[2], o[1]];
            let fj = perm.map(|i| jabs[i]);
            let (sols, t0, y, z) = all_distinct(fj, tol);
            let k = (fj[2] / t0).powf(2.0 / 3.0);
            (
                sols.to_vec(),
                perm,
                Some(k),
                Some(BranchParams::AllDistinct { t0, y, z }),
            )
        }
        CaseLabel::OneDimensional => unreachable!("not produced by case_label_n3"),
    };

    let frame = FormulaFrame { perm, signs };
    let solutions = frame_sols
        .into_iter()
        .map(|c| polish_n3(frame.unpermute(c), j))
        .collect();
    DiagSolutionSet {
        dim: 3,
        kind: SolutionKind::Finite,
        case,
        solutions,
        k,
        params,
        frame,
    }
}

/// `j₁ = j₂ > j₃ > 0`.
fn two_large_equal(j1: f64, j3: f64) -> ([[f64; 3]; 2], [f64; 2]) {
    let zp = (j1 + ((j1 - j3) * (j1 + j3)).sqrt()) / j3;
    let z = [zp, 1.0 / zp];
    let sols = z.map(|z| {
        let b1 = (j3 / (2.0 * z)).cbrt();
        [b1, b1, z * b1]
    });
    (sols, z)
}

/// `j₃ > j₁ = j₂ > 0`.
fn two_small_equal(j1: f64, j3: f64) -> ([[f64; 3]; 2], f64, [f64; 2]) {
    let s = (j3 + (j3 * j3 + 8.0 * j1 * j1).sqrt()) / (2.0 * j1);
    let wp = (s + ((s - 2.0) * (s + 2.0)).sqrt()) / 2.0;
    let w = [wp, 1.0 / wp];
    let b3 = (j1 / s).cbrt();
    let sols = w.map(|w| [b3 / w, w * b3, b3]);
    (sols, s, w)
}

/// All distinct, frame `(max, min, middle)`.
fn all_distinct(j: [f64; 3], tol: &Tolerances) -> ([[f64; 3]; 2], f64, [f64; 2], [f64; 2]) {
    let cubic = AuxiliaryCubic::from_current(j);
    let t0 = solve_t0(j, tol).unwrap_or_else(|_| cubic.root());
    let a = cubic.a;
    debug_assert!(a < 1.0);

    let yp = (t0 + ((t0 - 2.0) * (t0 + 2.0)).sqrt()) / 2.0;
    let y = [yp, 1.0 / yp];

    // z₊² = y₊(1 − A y₊)/(A − y₊). Both factors vanish with y₊ − 1/A, which
    // is evaluated without cancellation from t₀ − α = β(t₀² − 4)/t₀².
    let alpha = cubic.alpha();
    let beta = cubic.beta();
    let delta = beta * (t0 - 2.0) * (t0 + 2.0) / (t0 * t0);
    let root_t = ((t0 - 2.0) * (t0 + 2.0)).sqrt();
    let root_alpha = 1.0 / a - a;
    let e = 0.5 * delta * (1.0 + (t0 + alpha) / (root_t + root_alpha));
    let zp = (yp * a * e / (root_alpha + e)).sqrt();
    let z = [zp, 1.0 / zp];

    let j3 = j[2];
    let sols = [0, 1].map(|i| {
        let b1 = (j3 / (t0 * y[i] * z[i])).cbrt();
        [b1, y[i] * b1, z[i] * b1]
    });
    (sols, t0, y, z)
}

/// Solves a symmetric 3×3 system by Cramer's rule; `None` if singular.
fn solve3(m: [[f64; 3]; 3], r: [f64; 3]) -> Option<[f64; 3]> {
    let det = |m: &[[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(&m);
    let scale = m.iter().flatten().fold(0.0f64, |a, x| a.max(x.abs()));
    if d == 0.0 || d.abs() <= 1e-12 * scale * scale * scale {
        return None;
    }
    let mut out = [0.0; 3];
    for (c, x) in out.iter_mut().enumerate() {
        let mut mc = m;
        for row in 0..3 {
            mc[row][c] = r[row];
        }
        *x = det(&mc) / d;
    }
    Some(out)
}

/// A few Newton steps against the caller's `j`, kept only while they reduce
/// the residual. Removes the rounding left by the closed forms and the
/// averaging of tied entries.
fn polish_n3(mut b: [f64; 3], j: [f64; 3]) -> [f64; 3] {
    let floor = 4.0 * f64::EPSILON * (1.0 + norm3(j));
    let mut res = diag_residual_n3(b, j);
    for _ in 0..4 {
        if res <= floor {
            break;
        }
        let [x, y, z] = b;
        let jac = [
            [y * y + z * z, 2.0 * x * y, 2.0 * x * z],
            [2.0 * x * y, x * x + z * z, 2.0 * y * z],
            [2.0 * x * z, 2.0 * y * z, x * x + y * y],
        ];
        let l = diag_map_n3(b);
        let r = [l[0] - j[0], l[1] - j[1], l[2] - j[2]];
        let Some(step) = solve3(jac, r) else { break };
        let cand = [b[0] - step[0], b[1] - step[1], b[2] - step[2]];
        let cres = diag_residual_n3(cand, j);
        if cres.is_nan() || cres >= res {
            break;
        }
        b = cand;
        res = cres;
    }
    b
}

/// The auxiliary cubic `f(t) = t³ − (α + β)t² + 4β` with `A = j₂/j₁`,
/// `B = j₃/j₁`, `α = A + 1/A`, `β = B²/A`. Its root `t₀ > 2` gives
/// `y₊ + y₋` in the all-distinct case.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AuxiliaryCubic {
    pub a: f64,
    pub b: f64,
}

impl AuxiliaryCubic {
    pub fn from_current(j: [f64; 3]) -> Self {
        Self {
            a: j[1] / j[0],
            b: j[2] / j[0],
        }
    }

    pub fn alpha(&self) -> f64 {
        self.a + 1.0 / self.a
    }

    pub fn beta(&self) -> f64 {
        self.b * self.b / self.a
    }

    pub fn omega(&self) -> f64 {
        (self.alpha() + self.beta()) / 3.0
    }

    /// Monic form, i.e. the original cubic divided by `j₁j₂`.
    pub fn eval(&self, t: f64) -> f64 {
        let (alpha, beta) = (self.alpha(), self.beta());
        t * t * (t - alpha - beta) + 4.0 * beta
    }

    /// Argument of the arccos in the trigonometric form, unclamped.
    pub fn vieta_argument(&self) -> f64 {
        1.0 - 2.0 * self.beta() / self.omega().powi(3)
    }

    /// `Ω + 2Ω cos(⅓ arccos(1 − 2β/Ω³))`, argument clamped to `[−1, 1]`.
    pub fn vieta(&self) -> f64 {
        let omega = self.omega();
        let x = self.vieta_argument().clamp(-1.0, 1.0);
        omega + 2.0 * omega * (x.acos() / 3.0).cos()
    }

    /// `Ω + L + Ω²/L` with `L = ∛(Ω³ − 2β + 2√(β(β − Ω³)))`, evaluated in
    /// complex arithmetic on the principal branch.
    pub fn cardano(&self) -> f64 {
        let omega = self.omega();
        let beta = self.beta();
        let o3 = omega.powi(3);
        let disc = Complex64::new(beta * (beta - o3), 0.0).sqrt();
        let l = (Complex64::new(o3 - 2.0 * beta, 0.0) + disc * 2.0).cbrt();
        (Complex64::new(omega, 0.0) + l + omega * omega / l).re
    }

    /// `t₀` from the trigonometric form, cross-checked against Cardano near
    /// the arccos clamp.
    pub fn root(&self) -> f64 {
        let v = self.vieta();
        if self.vieta_argument().abs() > 1.0 - 1e-6 {
            let c = self.cardano();
            if c.is_finite() {
                return 0.5 * (v + c);
            }
        }
        v
    }
}

/// Root `t₀ > 2` of `j₁j₂t³ − (j₁² + j₂² + j₃²)t² + 4j₃² = 0` for a triple of
/// pairwise distinct positive values, taken in the order given.
pub fn solve_t0(j: [f64; 3], tol: &Tolerances) -> Result<f64> {
    if j.iter().any(|&x| !(x.is_finite() && x > 0.0)) {
        return Err(Error::DegenerateCase(format!(
            "auxiliary cubic needs positive entries, got {j:?}"
        )));
    }
    let tie = tol.tie * j.iter().fold(0.0f64, |m, &x| m.max(x));
    for (p, q) in [(0, 1), (0, 2), (1, 2)] {
        if (j[p] - j[q]).abs() <= tie {
            return Err(Error::DegenerateCase(format!(
                "entries {p} and {q} of {j:?} are tied"
            )));
        }
    }
    Ok(AuxiliaryCubic::from_current(j).root())
}
