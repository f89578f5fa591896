//! C ABI over `ymconst`.
//!
//! Matrices cross the boundary as row-major `double` arrays of `n * 3`
//! entries. Every function returns a [`YmStatus`]; outputs are written
//! through pointer arguments only on success. Reports are opaque and owned
//! by the caller until passed to [`ym_report_free`].

use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ymconst::cubic::{CaseLabel, SolutionKind};
use ymconst::{Current, Error, MatR, Potential, SolutionReport, Tolerances};

/// Result code of every call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum YmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidDimension = 2,
    NonFinite = 3,
    IndexOutOfRange = 4,
    NotAvailable = 5,
    InvalidTolerance = 6,
    Internal = 7,
}

/// Classification of a current by its singular values.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum YmCase {
    ZeroCurrent = 0,
    Rank1NoSolution = 1,
    Rank2Unique = 2,
    AllEqual = 3,
    TwoLargeEqual = 4,
    TwoSmallEqual = 5,
    AllDistinct = 6,
    OneDimensional = 7,
}

impl From<CaseLabel> for YmCase {
    fn from(c: CaseLabel) -> Self {
        match c {
            CaseLabel::ZeroCurrent => YmCase::ZeroCurrent,
            CaseLabel::Rank1NoSolution => YmCase::Rank1NoSolution,
            CaseLabel::Rank2Unique => YmCase::Rank2Unique,
            CaseLabel::AllEqual => YmCase::AllEqual,
            CaseLabel::TwoLargeEqual => YmCase::TwoLargeEqual,
            CaseLabel::TwoSmallEqual => YmCase::TwoSmallEqual,
            CaseLabel::AllDistinct => YmCase::AllDistinct,
            CaseLabel::OneDimensional => YmCase::OneDimensional,
        }
    }
}

/// Shape of the solution set.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum YmKind {
    Empty = 0,
    Finite = 1,
    Family = 2,
}

impl From<SolutionKind> for YmKind {
    fn from(k: SolutionKind) -> Self {
        match k {
            SolutionKind::Empty => YmKind::Empty,
            SolutionKind::Finite => YmKind::Finite,
            SolutionKind::OneParameterFamily => YmKind::Family,
        }
    }
}

/// Opaque solution report.
pub struct YmReport {
    inner: SolutionReport,
}

fn status_of(e: &Error) -> YmStatus {
    match e {
        Error::Dimension(_) | Error::DimensionMismatch { .. } => YmStatus::InvalidDimension,
        Error::NonFinite { .. } => YmStatus::NonFinite,
        Error::InvalidConfig(_) => YmStatus::InvalidTolerance,
        _ => YmStatus::Internal,
    }
}

fn guard(f: impl FnOnce() -> Result<(), YmStatus>) -> YmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => YmStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => YmStatus::Internal,
    }
}

/// Copies an `n × 3` row-major matrix from C memory.
unsafe fn read_matrix(n: usize, data: *const f64) -> Result<MatR, YmStatus> {
    if data.is_null() {
        return Err(YmStatus::NullPointer);
    }
    if n == 0 || n > usize::MAX / 3 {
        return Err(YmStatus::InvalidDimension);
    }
    let slice = std::slice::from_raw_parts(data, n * 3);
    MatR::new(n, 3, slice.to_vec()).map_err(|e| status_of(&e))
}

unsafe fn write_out<T>(p: *mut T, v: T) -> Result<(), YmStatus> {
    if p.is_null() {
        return Err(YmStatus::NullPointer);
    }
    p.write(v);
    Ok(())
}

unsafe fn report_ref<'a>(r: *const YmReport) -> Result<&'a SolutionReport, YmStatus> {
    r.as_ref().map(|r| &r.inner).ok_or(YmStatus::NullPointer)
}

fn tolerances(zero: f64, tie: f64) -> Result<Tolerances, YmStatus> {
    if !(zero.is_finite() && zero > 0.0 && tie.is_finite() && tie > 0.0) {
        return Err(YmStatus::InvalidTolerance);
    }
    Ok(Tolerances {
        zero,
        tie,
        ..Tolerances::default()
    })
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn ym_status_message(status: YmStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        YmStatus::Ok => b"ok\0",
        YmStatus::NullPointer => b"null pointer argument\0",
        YmStatus::InvalidDimension => b"invalid dimension\0",
        YmStatus::NonFinite => b"non-finite input entry\0",
        YmStatus::IndexOutOfRange => b"solution index out of range\0",
        YmStatus::NotAvailable => b"value not available for this case\0",
        YmStatus::InvalidTolerance => b"tolerances must be positive and finite\0",
        YmStatus::Internal => b"internal error\0",
    };
    s.as_ptr().cast()
}

/// Solves for the `n × 3` current `j` with the default tolerances.
///
/// # Safety
/// `j` must point to `n * 3` readable doubles and `out` to writable storage
/// for one pointer.
#[no_mangle]
pub unsafe extern "C" fn ym_solve(n: usize, j: *const f64, out: *mut *mut YmReport) -> YmStatus {
    ym_solve_with_tolerances(n, j, Tolerances::DEFAULT_ZERO, Tolerances::DEFAULT_TIE, out)
}

/// As [`ym_solve`] with explicit zero and tie thresholds.
///
/// # Safety
/// Same as [`ym_solve`].
#[no_mangle]
pub unsafe extern "C" fn ym_solve_with_tolerances(
    n: usize,
    j: *const f64,
    zero_tol: f64,
    tie_tol: f64,
    out: *mut *mut YmReport,
) -> YmStatus {
    guard(|| {
        if out.is_null() {
            return Err(YmStatus::NullPointer);
        }
        let tol = tolerances(zero_tol, tie_tol)?;
        let j = Current::new(read_matrix(n, j)?).map_err(|e| status_of(&e))?;
        let inner = ymconst::solve(&j, &tol).map_err(|e| status_of(&e))?;
        out.write(Box::into_raw(Box::new(YmReport { inner })));
        Ok(())
    })
}

/// Releases a report. Null is ignored.
///
/// # Safety
/// `report` must come from [`ym_solve`] and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn ym_report_free(report: *mut YmReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// # Safety
/// `report` must be a live report, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ym_report_dimension(report: *const YmReport, out: *mut usize) -> YmStatus {
    guard(|| write_out(out, report_ref(report)?.n))
}

/// # Safety
/// `report` must be a live report, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ym_report_case(report: *const YmReport, out: *mut YmCase) -> YmStatus {
    guard(|| write_out(out, report_ref(report)?.case.into()))
}

/// # Safety
/// `report` must be a live report, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ym_report_kind(report: *const YmReport, out: *mut YmKind) -> YmStatus {
    guard(|| write_out(out, report_ref(report)?.kind.into()))
}

/// # Safety
/// `report` must be a live report, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ym_report_rank(report: *const YmReport, out: *mut usize) -> YmStatus {
    guard(|| write_out(out, report_ref(report)?.rank))
}

/// Writes the three singular values, non-increasing.
///
/// # Safety
/// `report` must be a live report, `out` must hold 3 doubles.
#[no_mangle]
pub unsafe extern "C" fn ym_report_singular_values(
    report: *const YmReport,
    out: *mut f64,
) -> YmStatus {
    guard(|| {
        let r = report_ref(report)?;
        if out.is_null() {
            return Err(YmStatus::NullPointer);
        }
        ptr::copy_nonoverlapping(r.singular_values.as_ptr(), out, 3);
        Ok(())
    })
}

/// The pairing invariant `K`; `NotAvailable` outside the two-solution
/// cases.
///
/// # Safety
/// `report` must be a live report, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ym_report_k(report: *const YmReport, out: *mut f64) -> YmStatus {
    guard(|| {
        let k = report_ref(report)?.k.ok_or(YmStatus::NotAvailable)?;
        write_out(out, k)
    })
}

/// Number of listed solutions. A family lists its zero representative.
///
/// # Safety
/// `report` must be a live report, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ym_report_solution_count(
    report: *const YmReport,
    out: *mut usize,
) -> YmStatus {
    guard(|| write_out(out, report_ref(report)?.solutions.len()))
}

/// Copies solution `index` as an `n × 3` row-major matrix.
///
/// # Safety
/// `report` must be a live report, `out` must hold `n * 3` doubles.
#[no_mangle]
pub unsafe extern "C" fn ym_report_potential(
    report: *const YmReport,
    index: usize,
    out: *mut f64,
) -> YmStatus {
    guard(|| {
        let r = report_ref(report)?;
        let s = r.solutions.get(index).ok_or(YmStatus::IndexOutOfRange)?;
        if out.is_null() {
            return Err(YmStatus::NullPointer);
        }
        let data = s.potential.coeffs().data();
        ptr::copy_nonoverlapping(data.as_ptr(), out, data.len());
        Ok(())
    })
}

/// `λ` with `F_{μν}F^{μν} = λ·1` for solution `index`.
///
/// # Safety
/// `report` must be a live report, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ym_report_f2coeff(
    report: *const YmReport,
    index: usize,
    out: *mut f64,
) -> YmStatus {
    guard(|| {
        let r = report_ref(report)?;
        let s = r.solutions.get(index).ok_or(YmStatus::IndexOutOfRange)?;
        write_out(out, s.strength.f2coeff)
    })
}

/// Max-norm residual of solution `index`.
///
/// # Safety
/// `report` must be a live report, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ym_report_residual(
    report: *const YmReport,
    index: usize,
    out: *mut f64,
) -> YmStatus {
    guard(|| {
        let r = report_ref(report)?;
        let s = r.solutions.get(index).ok_or(YmStatus::IndexOutOfRange)?;
        write_out(out, s.residual)
    })
}

/// Writes `L(A) − J` as an `n × 3` row-major matrix.
///
/// # Safety
/// `a` and `j` must hold `n * 3` doubles, `out` must hold `n * 3` doubles.
#[no_mangle]
pub unsafe extern "C" fn ym_residual(
    n: usize,
    a: *const f64,
    j: *const f64,
    out: *mut f64,
) -> YmStatus {
    guard(|| {
        let a = Potential::new(read_matrix(n, a)?).map_err(|e| status_of(&e))?;
        let j = Current::new(read_matrix(n, j)?).map_err(|e| status_of(&e))?;
        let r = ymconst::residual(&a, &j).map_err(|e| status_of(&e))?;
        if out.is_null() {
            return Err(YmStatus::NullPointer);
        }
        ptr::copy_nonoverlapping(r.data().as_ptr(), out, r.data().len());
        Ok(())
    })
}

/// Field strength of `a`: `comps` receives `F^{μν}_c` at index
/// `(μ n + ν) 3 + c` and may be null; `f2coeff` receives `λ`.
///
/// # Safety
/// `a` must hold `n * 3` doubles, `comps` (if non-null) `n * n * 3`.
#[no_mangle]
pub unsafe extern "C" fn ym_strength(
    n: usize,
    a: *const f64,
    comps: *mut f64,
    f2coeff: *mut f64,
) -> YmStatus {
    guard(|| {
        let a = Potential::new(read_matrix(n, a)?).map_err(|e| status_of(&e))?;
        let s = ymconst::strength(&a);
        if !comps.is_null() {
            for mu in 0..n {
                for nu in 0..n {
                    let f = s.component(mu, nu);
                    ptr::copy_nonoverlapping(f.as_ptr(), comps.add((mu * n + nu) * 3), 3);
                }
            }
        }
        write_out(f2coeff, s.f2coeff)
    })
}

/// Singular values, rank and case of the current `j`.
///
/// # Safety
/// `j` must hold `n * 3` doubles, `singular_values` 3 doubles.
#[no_mangle]
pub unsafe extern "C" fn ym_classify(
    n: usize,
    j: *const f64,
    singular_values: *mut f64,
    rank: *mut usize,
    case_label: *mut YmCase,
) -> YmStatus {
    guard(|| {
        let j = Current::new(read_matrix(n, j)?).map_err(|e| status_of(&e))?;
        let c = ymconst::classify(&j, &Tolerances::default()).map_err(|e| status_of(&e))?;
        if singular_values.is_null() || rank.is_null() || case_label.is_null() {
            return Err(YmStatus::NullPointer);
        }
        ptr::copy_nonoverlapping(c.singular_values.as_ptr(), singular_values, 3);
        rank.write(c.rank);
        case_label.write(c.case.into());
        Ok(())
    })
}
