//! Truncated Poincaré/Morse series with nonnegative integer coefficients.
//!
//! A [`MorseSeries`] stores the coefficients of a formal power series in t up
//! to a degree cap; all arithmetic truncates at the cap. The assembly
//! Σ_C t^{λ_C}·P_t(C) over classified critical components and the
//! coefficient-wise comparison against a target series live here.

use crate::error::{Error, Result};

/// A power series in t truncated at a degree cap, with coefficients ≥ 0.
///
/// `coefficients[d]` is the coefficient of t^d; the length is `degree_cap + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorseSeries {
    coefficients: Vec<i64>,
}

impl MorseSeries {
    /// The zero series truncated at `cap`.
    pub fn zero(cap: usize) -> MorseSeries {
        MorseSeries { coefficients: vec![0; cap + 1] }
    }

    /// The constant series 1.
    pub fn one(cap: usize) -> MorseSeries {
        let mut s = MorseSeries::zero(cap);
        s.coefficients[0] = 1;
        s
    }

    /// Series from explicit coefficients (degree = position). Rejects
    /// negative entries and an empty list.
    pub fn from_coefficients(coefficients: Vec<i64>) -> Result<MorseSeries> {
        if coefficients.is_empty() {
            return Err(Error::Precondition("series needs at least the degree-0 coefficient".into()));
        }
        if let Some(&c) = coefficients.iter().find(|&&c| c < 0) {
            return Err(Error::Precondition(format!("series coefficients must be ≥ 0, got {c}")));
        }
        Ok(MorseSeries { coefficients })
    }

    /// The geometric series 1/(1 − t^period) = 1 + t^p + t^{2p} + …
    pub fn geometric(period: usize, cap: usize) -> Result<MorseSeries> {
        if period == 0 {
            return Err(Error::Precondition("geometric series needs period ≥ 1".into()));
        }
        let mut s = MorseSeries::zero(cap);
        let mut d = 0;
        while d <= cap {
            s.coefficients[d] = 1;
            d += period;
        }
        Ok(s)
    }

    /// Poincaré series of a point: 1.
    pub fn point(cap: usize) -> MorseSeries {
        MorseSeries::one(cap)
    }

    /// Poincaré series of the 2-sphere (the full flag orbit of a rank-one
    /// group): 1 + t².
    pub fn sphere(cap: usize) -> MorseSeries {
        let mut s = MorseSeries::zero(cap);
        s.coefficients[0] = 1;
        if cap >= 2 {
            s.coefficients[2] = 1;
        }
        s
    }

    /// Rank-one torus-equivariant series of a point: 1/(1 − t²).
    pub fn torus_equivariant_point(cap: usize) -> MorseSeries {
        MorseSeries::geometric(2, cap).expect("period 2")
    }

    /// SU(2)-equivariant series of a point: 1/(1 − t⁴).
    pub fn group_equivariant_point(cap: usize) -> MorseSeries {
        MorseSeries::geometric(4, cap).expect("period 4")
    }

    pub fn degree_cap(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficients(&self) -> &[i64] {
        &self.coefficients
    }

    /// Coefficient of t^degree (0 beyond the cap).
    pub fn coefficient(&self, degree: usize) -> i64 {
        self.coefficients.get(degree).copied().unwrap_or(0)
    }

    /// Multiplication by t^shift, truncated at the same cap.
    pub fn shifted(&self, shift: usize) -> MorseSeries {
        let mut out = MorseSeries::zero(self.degree_cap());
        for (d, &c) in self.coefficients.iter().enumerate() {
            if d + shift <= out.degree_cap() {
                out.coefficients[d + shift] = c;
            }
        }
        out
    }

    /// Coefficient-wise sum; both terms must share a degree cap.
    pub fn plus(&self, other: &MorseSeries) -> Result<MorseSeries> {
        if self.degree_cap() != other.degree_cap() {
            return Err(Error::Precondition(format!(
                "degree caps differ: {} vs {}",
                self.degree_cap(),
                other.degree_cap()
            )));
        }
        let coefficients = self
            .coefficients
            .iter()
            .zip(other.coefficients.iter())
            .map(|(a, b)| a + b)
            .collect();
        Ok(MorseSeries { coefficients })
    }

    /// Cauchy product truncated at the common cap.
    pub fn times(&self, other: &MorseSeries) -> Result<MorseSeries> {
        if self.degree_cap() != other.degree_cap() {
            return Err(Error::Precondition(format!(
                "degree caps differ: {} vs {}",
                self.degree_cap(),
                other.degree_cap()
            )));
        }
        let cap = self.degree_cap();
        let mut out = MorseSeries::zero(cap);
        for (a, &ca) in self.coefficients.iter().enumerate() {
            if ca == 0 {
                continue;
            }
            for (b, &cb) in other.coefficients.iter().enumerate() {
                if a + b > cap {
                    break;
                }
                out.coefficients[a + b] += ca * cb;
            }
        }
        Ok(out)
    }

    /// The same series truncated at a lower (or equal) cap.
    pub fn truncated(&self, cap: usize) -> Result<MorseSeries> {
        if cap > self.degree_cap() {
            return Err(Error::Precondition(format!(
                "cannot extend a series truncated at {} to cap {}",
                self.degree_cap(),
                cap
            )));
        }
        Ok(MorseSeries { coefficients: self.coefficients[..=cap].to_vec() })
    }
}

impl std::fmt::Display for MorseSeries {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for (d, &c) in self.coefficients.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            match (c, d) {
                (c, 0) => write!(f, "{c}")?,
                (1, 1) => write!(f, "t")?,
                (1, d) => write!(f, "t^{d}")?,
                (c, 1) => write!(f, "{c}t")?,
                (c, d) => write!(f, "{c}t^{d}")?,
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Morse series of a classified critical list: Σ t^{index}·P_t, truncated at
/// `cap`. Each entry is (Hessian index λ, Poincaré series of the component);
/// a missing series aborts with [`Error::MissingCohomology`].
pub fn morse_series(terms: &[(usize, Option<MorseSeries>)], cap: usize) -> Result<MorseSeries> {
    let mut acc = MorseSeries::zero(cap);
    for (pos, (index, p)) in terms.iter().enumerate() {
        let p = p.as_ref().ok_or_else(|| {
            Error::MissingCohomology(format!("#{pos} (Hessian index {index})"))
        })?;
        acc = acc.plus(&p.truncated(cap)?.shifted(*index))?;
    }
    Ok(acc)
}

/// Coefficient-wise comparison of a Morse series against a target Poincaré
/// series over their common cap.
#[derive(Debug, Clone)]
pub struct PerfectionReport {
    /// Per-degree difference series − target.
    pub difference: Vec<i64>,
    /// True iff the difference vanishes identically (perfect up to the cap).
    pub perfect: bool,
    /// True iff every difference is ≥ 0 (the Morse inequalities hold).
    pub dominates: bool,
    pub degree_cap: usize,
}

/// Compare a Morse series with a target series coefficient-wise.
pub fn perfection_check(series: &MorseSeries, target: &MorseSeries) -> Result<PerfectionReport> {
    if series.degree_cap() != target.degree_cap() {
        return Err(Error::Precondition(format!(
            "degree caps differ: {} vs {}",
            series.degree_cap(),
            target.degree_cap()
        )));
    }
    let difference: Vec<i64> = series
        .coefficients()
        .iter()
        .zip(target.coefficients().iter())
        .map(|(a, b)| a - b)
        .collect();
    let perfect = difference.iter().all(|&d| d == 0);
    let dominates = difference.iter().all(|&d| d >= 0);
    Ok(PerfectionReport { difference, perfect, dominates, degree_cap: series.degree_cap() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_series_expand_their_closed_forms() {
        let t2 = MorseSeries::geometric(2, 9).unwrap();
        assert_eq!(t2.coefficients(), &[1, 0, 1, 0, 1, 0, 1, 0, 1, 0]);
        let t4 = MorseSeries::geometric(4, 9).unwrap();
        assert_eq!(t4.coefficients(), &[1, 0, 0, 0, 1, 0, 0, 0, 1, 0]);
        // 1/((1−t²)(1−t⁴)): coefficient of t^d counts solutions of 2a+4b = d.
        let prod = t2.times(&t4).unwrap();
        assert_eq!(prod.coefficients(), &[1, 0, 1, 0, 2, 0, 2, 0, 3, 0]);
        assert!(MorseSeries::geometric(0, 3).is_err());
    }

    #[test]
    fn shift_add_truncate_respect_the_cap() {
        let s = MorseSeries::sphere(5); // 1 + t²
        let shifted = s.shifted(2); // t² + t⁴
        assert_eq!(shifted.coefficients(), &[0, 0, 1, 0, 1, 0]);
        let sum = s.plus(&shifted).unwrap();
        assert_eq!(sum.coefficients(), &[1, 0, 2, 0, 1, 0]);
        assert_eq!(s.shifted(5).coefficients(), &[0, 0, 0, 0, 0, 1]);
        assert_eq!(s.shifted(9).coefficients(), &[0, 0, 0, 0, 0, 0]);
        let cut = sum.truncated(2).unwrap();
        assert_eq!(cut.coefficients(), &[1, 0, 2]);
        assert!(cut.truncated(4).is_err());
        assert!(cut.plus(&sum).is_err());
        assert_eq!(cut.coefficient(2), 2);
        assert_eq!(cut.coefficient(17), 0);
    }

    #[test]
    fn constructors_reject_invalid_input() {
        assert!(MorseSeries::from_coefficients(vec![]).is_err());
        assert!(MorseSeries::from_coefficients(vec![1, -1]).is_err());
        let ok = MorseSeries::from_coefficients(vec![1, 0, 2]).unwrap();
        assert_eq!(ok.degree_cap(), 2);
    }

    #[test]
    fn morse_series_sums_shifted_terms() {
        // 1 + t²(1 + t²) = 1 + t² + t⁴.
        let terms = vec![
            (0usize, Some(MorseSeries::point(4))),
            (2usize, Some(MorseSeries::sphere(4))),
        ];
        let m = morse_series(&terms, 4).unwrap();
        assert_eq!(m.coefficients(), &[1, 0, 1, 0, 1]);
        assert_eq!(m.to_string(), "1 + t^2 + t^4");

        let empty = morse_series(&[], 3).unwrap();
        assert_eq!(empty.coefficients(), &[0, 0, 0, 0]);
        assert_eq!(empty.to_string(), "0");

        let missing = vec![(0usize, Some(MorseSeries::point(4))), (2usize, None)];
        match morse_series(&missing, 4) {
            Err(Error::MissingCohomology(what)) => assert!(what.contains("#1")),
            other => panic!("expected MissingCohomology, got {other:?}"),
        }
    }

    #[test]
    fn perfection_check_reports_differences() {
        let m = MorseSeries::from_coefficients(vec![1, 0, 1, 0, 1]).unwrap();
        let target = MorseSeries::geometric(2, 4).unwrap();
        let report = perfection_check(&m, &target).unwrap();
        assert!(report.perfect);
        assert!(report.dominates);
        assert!(report.difference.iter().all(|&d| d == 0));

        // A corrupted index shifts one contribution up: still dominating at
        // low degree but no longer perfect, and dominance fails where the
        // shifted term left a hole.
        let corrupted = MorseSeries::from_coefficients(vec![1, 0, 0, 0, 2]).unwrap();
        let report = perfection_check(&corrupted, &target).unwrap();
        assert!(!report.perfect);
        assert!(!report.dominates);
        assert_eq!(report.difference, vec![0, 0, -1, 0, 1]);

        assert!(perfection_check(&m, &MorseSeries::one(7)).is_err());
    }

    #[test]
    fn display_formats_coefficients_and_powers() {
        let s = MorseSeries::from_coefficients(vec![2, 1, 0, 3]).unwrap();
        assert_eq!(s.to_string(), "2 + t + 3t^3");
        assert_eq!(MorseSeries::zero(2).to_string(), "0");
        let t = MorseSeries::from_coefficients(vec![0, 2]).unwrap();
        assert_eq!(t.to_string(), "2t");
    }
}
