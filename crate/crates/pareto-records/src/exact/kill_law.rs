//! Exact distribution of the kill count K_n: the number of remaining records
//! broken by the n-th observation, conditioned on that observation being a
//! record (K_n = −1 otherwise).
//!
//! The probability P(K_n = k) splits into three nonnegative pieces
//! A_k + 2·B_k + C_k according to how the killed records sit relative to the
//! coordinate extremes. C_k has a closed-form sum over integer compositions;
//! A_k and B_k satisfy first-order recurrences in k whose solutions are
//! implemented here in closed form, with the recurrences themselves kept as
//! debug assertions.

use num_rational::BigRational;
use num_traits::Zero;

use crate::rational::{from_u64, inv_u64, pow2_inv};

/// One row (fixed n, all k from 0 to n−1) of the exact kill-count law.
#[derive(Debug, Clone)]
pub struct KillPmfRow {
    pub n: u64,
    /// A_k component, k = 0..n−1.
    pub a: Vec<BigRational>,
    /// B_k component (enters the pmf with weight 2).
    pub b: Vec<BigRational>,
    /// C_k component: probability that the new record kills all k = r
    /// remaining records while landing in the "dominate everything" corner.
    pub c: Vec<BigRational>,
    /// P(K_n = k) = A_k + 2·B_k + C_k.
    pub pmf: Vec<BigRational>,
    /// P(K_n = k | K_n ≥ 0) = pmf·n / H_n.
    pub conditional: Vec<BigRational>,
}

/// C_k for all k = 0..n−1 at a fixed n.
///
/// The defining sum runs over nonnegative integer k-tuples (j_1..j_k) with
/// Σ j_ℓ = n−(k+1), each weighted by Π_{i=1..k} 1/(i + j_{k+1−i} + … + j_k).
/// Enumerating tuples costs binom(n−2, k−1) terms; instead we run a dynamic
/// program over suffix sums. With
///
///   g(1, s) = 1/(1+s),
///   g(i, s) = (Σ_{s'≤s} g(i−1, s')) / (i+s),
///
/// the tuple sum collapses to C_k = n^(-2) · g(k, n−k−1), at O(k·n) rational
/// operations per row via prefix-sum accumulation. `c_row` computes the whole
/// row in one pass. The k = 0 value is 1 exactly when n = 1 (the first
/// observation "kills everything" vacuously).
pub(crate) fn c_row(n: u64) -> Vec<BigRational> {
    assert!(n >= 1, "n must be at least 1");
    let nn = n as usize;
    let mut row = vec![BigRational::zero(); nn];
    if n == 1 {
        row[0] = from_u64(1);
        return row;
    }
    let n_sq_inv = &inv_u64(n) * &inv_u64(n);

    // Level i = 1: g(1, s) for s = 0..=n−2. C_{n,k} reads level k at s = n−1−k.
    let mut g: Vec<BigRational> = (0..=(nn - 2)).map(|s| inv_u64(s as u64 + 1)).collect();
    row[1] = &n_sq_inv * &g[nn - 2];
    for i in 2..nn {
        let width = nn - 1 - i;
        let mut acc = BigRational::zero();
        let mut next = Vec::with_capacity(width + 1);
        for (s, value) in g.iter().take(width + 1).enumerate() {
            acc += value;
            next.push(&acc * inv_u64((i + s) as u64));
        }
        g = next;
        row[i] = &n_sq_inv * &g[width];
    }
    row
}

/// The k = 0 base values (A_0, B_0, C_0) for a given n, from which the
/// recurrences start. H_n must be the exact harmonic number for the same n.
pub(crate) fn base_terms(n: u64, h_n: &BigRational) -> (BigRational, BigRational, BigRational) {
    assert!(n >= 1, "n must be at least 1");
    let a0 = if n >= 3 {
        inv_u64(n) * (h_n / from_u64(2) - BigRational::new(3.into(), 4.into()))
    } else {
        BigRational::zero()
    };
    let b0 = if n >= 2 {
        inv_u64(2 * n)
    } else {
        BigRational::zero()
    };
    let c0 = if n == 1 { from_u64(1) } else { BigRational::zero() };
    (a0, b0, c0)
}

/// Build the complete row for a given n. `h_n` must be the exact H_n.
///
/// The closed-form solutions, with S_k = Σ_{j≤k} 2^j C_j and
/// T_k = Σ_{j≤k} (k+1−j) 2^j C_j (so T_k = T_{k−1} + S_k):
///
///   B_k = 1(n ≥ k+2) · (2·B_0 − S_k) / 2^(k+1)
///   A_k = 1(n ≥ k+3) · (4·A_0 − 2k·B_0 + T_k) / 2^(k+2)
///
/// In debug builds each entry is cross-checked against the underlying
/// recurrences A_k = (A_{k−1} − B_k)/2 and B_k = (B_{k−1} − C_k)/2 on the
/// ranges where they hold, and the row is checked against its two exact mass
/// identities (Σ pmf = H_n/n and Σ C = n^(-2)).
pub(crate) fn build_row(n: u64, h_n: &BigRational) -> KillPmfRow {
    let nn = n as usize;
    let c = c_row(n);
    let (a0, b0, c0) = base_terms(n, h_n);
    debug_assert_eq!(c[0], c0);

    let mut a = vec![BigRational::zero(); nn];
    let mut b = vec![BigRational::zero(); nn];
    a[0] = a0.clone();
    b[0] = b0.clone();

    let two_b0 = &b0 * from_u64(2);
    let four_a0 = &a0 * from_u64(4);
    let mut s_k = BigRational::zero();
    let mut t_k = BigRational::zero();
    for k in 1..nn {
        let pow2_k = BigRational::from_integer(num_bigint::BigInt::from(1u8) << k);
        s_k += &pow2_k * &c[k];
        t_k += &s_k;
        if n >= k as u64 + 2 {
            b[k] = (&two_b0 - &s_k) * pow2_inv(k as u64 + 1);
            debug_assert_eq!(
                b[k],
                (&b[k - 1] - &c[k]) / from_u64(2),
                "B recurrence failed at n = {n}, k = {k}",
            );
        }
        if n >= k as u64 + 3 {
            a[k] = (&four_a0 - &two_b0 * from_u64(k as u64) + &t_k) * pow2_inv(k as u64 + 2);
            debug_assert_eq!(
                a[k],
                (&a[k - 1] - &b[k]) / from_u64(2),
                "A recurrence failed at n = {n}, k = {k}",
            );
        }
    }

    let pmf: Vec<BigRational> = (0..nn)
        .map(|k| &a[k] + &b[k] * from_u64(2) + &c[k])
        .collect();
    let n_over_h = from_u64(n) / h_n;
    let conditional: Vec<BigRational> = pmf.iter().map(|p| p * &n_over_h).collect();

    debug_assert_eq!(
        pmf.iter().sum::<BigRational>(),
        h_n * inv_u64(n),
        "pmf row mass must equal H_n / n at n = {n}",
    );
    debug_assert_eq!(
        c.iter().sum::<BigRational>(),
        &inv_u64(n) * &inv_u64(n),
        "C row mass must equal 1/n² at n = {n}",
    );

    KillPmfRow { n, a, b, c, pmf, conditional }
}
