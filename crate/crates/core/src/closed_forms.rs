//! Printed closed forms for friendship and Joost graphs, transcribed as
//! stated (including where they disagree with exhaustive search). Nothing
//! here consults the engine.

use serde::Serialize;
use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("{family}: {reason}")]
    Domain { family: &'static str, reason: String },
}

fn domain(family: &'static str, reason: impl Into<String>) -> FormulaError {
    FormulaError::Domain { family, reason: reason.into() }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyFormulaResult {
    pub b_tau: u64,
    /// Index under distinct primaries without blending.
    pub fsg_index: Rational,
    /// The expression evaluated, for reports.
    pub formula: &'static str,
}

/// `Fr(3,n)`: `b_tau = 2(n-1)`, index `3n / (2(n-1)(3n^2-5n+6))`.
pub fn fr3_formulas(n: u64) -> Result<FamilyFormulaResult, FormulaError> {
    if n < 2 {
        return Err(domain("fr3", format!("n must be >= 2, got {n}")));
    }
    let b = 2 * (n - 1);
    Ok(FamilyFormulaResult {
        b_tau: b,
        fsg_index: Rational::new(3 * n, b * (3 * n * n - 5 * n + 6)),
        formula: "3n/(2(n-1)(3n^2-5n+6))",
    })
}

/// General friendship graph from `(cycle length, copies)` families, the
/// last family being the one with the smallest cycle length.
///
/// With `kappa` the total number of cycles, `b_tau = 2(kappa-1)` and the
/// index is `sum(len*copies) / (2(kappa-1) * D)` where `D` sums
/// `copies*(len+1)` over every family but the last, adds `(q-1)(t+1)` for
/// the last family `(t, q)` when `q >= 2`, and adds 10.
pub fn general_fr_formulas(params: &[(u64, u64)]) -> Result<FamilyFormulaResult, FormulaError> {
    let Some((&(t, q), rest)) = params.split_last() else {
        return Err(domain("genfriendship", "no cycle families given"));
    };
    if let Some(&(len, _)) = params.iter().find(|(len, _)| *len < 3) {
        return Err(domain("genfriendship", format!("cycle length must be >= 3, got {len}")));
    }
    if params.iter().any(|&(_, copies)| copies == 0) {
        return Err(domain("genfriendship", "copies must be >= 1"));
    }
    if rest.iter().any(|&(len, _)| len < t) {
        return Err(domain("genfriendship", "the last family must have the smallest cycle length"));
    }
    let kappa: u64 = params.iter().map(|&(_, c)| c).sum();
    if kappa < 2 {
        return Err(domain("genfriendship", format!("needs at least two cycles, got {kappa}")));
    }
    let edges: u64 = params.iter().map(|&(len, c)| len * c).sum();
    let mut d: u64 = rest.iter().map(|&(len, c)| c * (len + 1)).sum();
    let formula = if q >= 2 {
        d += (q - 1) * (t + 1);
        "sum(len*copies)/(2(kappa-1)(sum copies*(len+1) + (q-1)(t+1) + 10))"
    } else {
        "sum(len*copies)/(2(kappa-1)(sum copies*(len+1) + 10))"
    };
    d += 10;
    let b = 2 * (kappa - 1);
    Ok(FamilyFormulaResult { b_tau: b, fsg_index: Rational::new(edges, b * d), formula })
}

/// Joost graph of `k` paths of order `n`: `b_tau = k`; index `1` for
/// `k = 1`, `2(n-1)/(2n-1)` for `k = 2`, `2k(n-1)/(2n+(n-1)k(k-1))` for
/// `k >= 3`.
pub fn joost_formulas(n: u64, k: u64) -> Result<FamilyFormulaResult, FormulaError> {
    if n < 3 {
        return Err(domain("joost", format!("path order must be >= 3, got {n}")));
    }
    if k < 1 {
        return Err(domain("joost", "needs at least one path"));
    }
    let (fsg_index, formula) = match k {
        1 => (Rational::integer(1), "1"),
        2 => (Rational::new(2 * (n - 1), 2 * n - 1), "2(n-1)/(2n-1)"),
        _ => (joost_general(n, k), "2k(n-1)/(2n+(n-1)k(k-1))"),
    };
    Ok(FamilyFormulaResult { b_tau: k, fsg_index, formula })
}

/// The `k >= 3` expression, valid as an expression for any `k >= 1`.
pub fn joost_general(n: u64, k: u64) -> Rational {
    Rational::new(2 * k * (n - 1), 2 * n + (n - 1) * k * (k - 1))
}

/// Tattoo number of a cycle.
pub fn cycle_tau(n: u64) -> u64 {
    debug_assert!(n >= 3);
    2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fr3_values() {
        let r = fr3_formulas(2).unwrap();
        assert_eq!((r.b_tau, r.fsg_index), (2, Rational::new(3, 8)));
        let r = fr3_formulas(3).unwrap();
        assert_eq!((r.b_tau, r.fsg_index), (4, Rational::new(1, 8)));
        assert_eq!(fr3_formulas(4).unwrap().fsg_index, Rational::new(1, 17));
        assert!(fr3_formulas(1).is_err());
    }

    #[test]
    fn general_friendship_values() {
        let r = general_fr_formulas(&[(4, 2), (3, 2)]).unwrap();
        assert_eq!((r.b_tau, r.fsg_index), (6, Rational::new(7, 72)));
        let r = general_fr_formulas(&[(5, 1), (3, 1)]).unwrap();
        assert_eq!((r.b_tau, r.fsg_index), (2, Rational::new(1, 4)));
        assert_eq!(general_fr_formulas(&[(3, 5)]).unwrap().b_tau, 8);
        assert!(general_fr_formulas(&[(3, 1)]).is_err());
        assert!(general_fr_formulas(&[(3, 1), (4, 1)]).is_err());
        assert!(general_fr_formulas(&[]).is_err());
    }

    #[test]
    fn joost_values() {
        let r = joost_formulas(4, 7).unwrap();
        assert_eq!((r.b_tau, r.fsg_index), (7, Rational::new(21, 67)));
        assert_eq!(joost_formulas(3, 3).unwrap().fsg_index, Rational::new(2, 3));
        assert_eq!(joost_formulas(5, 1).unwrap().fsg_index, Rational::integer(1));
        assert!(joost_formulas(2, 1).is_err());
        assert!(joost_formulas(3, 0).is_err());
    }

    #[test]
    fn joost_cases_are_continuous_at_two_paths() {
        for n in 3..=50 {
            assert_eq!(joost_general(n, 2), joost_formulas(n, 2).unwrap().fsg_index, "n = {n}");
        }
    }

    #[test]
    fn cycles() {
        for n in [3, 7, 100] {
            assert_eq!(cycle_tau(n), 2);
        }
    }
}
