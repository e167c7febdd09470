//! Age grading of a group element acting linearly near a fixed point.

use num_integer::Integer;
use num_rational::Ratio;

use super::GroupError;

/// Sum of rotation exponents `λ_j ∈ [0, 1)`, where the element acts on the
/// tangent space with eigenvalues `e^{2πiλ_j}`.
pub fn age<I>(angles: &[Ratio<I>]) -> Result<Ratio<I>, GroupError>
where
    I: Integer + Clone + std::fmt::Display,
{
    let zero = Ratio::from_integer(I::zero());
    let one = Ratio::from_integer(I::one());
    let mut total = zero.clone();
    for a in angles {
        if *a < zero || *a >= one {
            return Err(GroupError::AngleOutOfRange(a.to_string()));
        }
        total = total + a.clone();
    }
    Ok(total)
}

/// Rotation exponents `k_j / order` for an element acting by
/// `diag(ω^{k_1}, …, ω^{k_d})`, `ω = e^{2πi/order}`, reduced into `[0, 1)`.
pub fn rotation_angles(exponents: &[i64], order: i64) -> Vec<Ratio<i64>> {
    assert!(order > 0, "element order must be positive");
    exponents
        .iter()
        .map(|&k| Ratio::new(k.rem_euclid(order), order))
        .collect()
}
