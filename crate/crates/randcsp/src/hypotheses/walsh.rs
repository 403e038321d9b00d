//! Walsh–Hadamard analysis of laws on `{-1,+1}^l`.
//!
//! The coefficient of `Q ⊆ {1..l}` is `f(Q) = E prod_{r in Q} Z^(r)`, the
//! expected product of the spins indexed by `Q`. With the crate's encoding
//! (bit set = spin `+1`), `f(Q) = (-1)^|Q| H(Q)` where `H` is the standard
//! `(a,b) -> (a+b, a-b)` fast transform. The inverse includes the `2^-l`
//! normalization: `ν(x) = 2^-l sum_Q f(Q) prod_{r in Q} x_r`.

use super::gamma::Scalar;
use super::{HypError, ReplicaLaw};

/// `f(Q)` for all `Q`, indexed by subset bitmask.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierTable {
    l: u32,
    coeffs: Vec<f64>,
}

impl FourierTable {
    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn coefficient(&self, q: usize) -> f64 {
        self.coeffs[q]
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }
}

/// In-place fast transform returning `f[Q] = sum_i v[i] prod_{r in Q} spin_r(i)`.
pub(super) fn fourier_core<S: Scalar>(v: &[S]) -> Vec<S> {
    let n = v.len();
    debug_assert!(n.is_power_of_two());
    let mut a = v.to_vec();
    let mut h = 1;
    while h < n {
        let mut i = 0;
        while i < n {
            for j in i..i + h {
                let x = a[j].clone();
                let y = a[j + h].clone();
                a[j] = x.clone() + y.clone();
                a[j + h] = x - y;
            }
            i += h * 2;
        }
        h *= 2;
    }
    // The butterfly kernel is (-1)^{|Q ∧ i|}; the spin-product kernel is
    // (-1)^{|Q \ i|} = (-1)^{|Q|} (-1)^{|Q ∧ i|}.
    for (q, x) in a.iter_mut().enumerate() {
        if q.count_ones() % 2 == 1 {
            *x = x.clone().neg();
        }
    }
    a
}

pub(super) fn fourier_inverse_core<S: Scalar>(f: &[S]) -> Vec<S> {
    let n = f.len();
    let mut h: Vec<S> = f
        .iter()
        .enumerate()
        .map(|(q, x)| {
            if q.count_ones() % 2 == 1 {
                x.clone().neg()
            } else {
                x.clone()
            }
        })
        .collect();
    // The plain transform is an involution up to the factor n.
    h = {
        let mut a = h;
        let mut step = 1;
        while step < n {
            let mut i = 0;
            while i < n {
                for j in i..i + step {
                    let x = a[j].clone();
                    let y = a[j + step].clone();
                    a[j] = x.clone() + y.clone();
                    a[j + step] = x - y;
                }
                i += step * 2;
            }
            step *= 2;
        }
        a
    };
    let scale = S::from_ratio(1, n as u64);
    h.into_iter().map(|x| x * scale.clone()).collect()
}

/// Walsh coefficients of a replica law.
pub fn walsh(nu: &ReplicaLaw) -> FourierTable {
    FourierTable {
        l: nu.l(),
        coeffs: fourier_core(nu.probs()),
    }
}

/// Recovers the law from its Walsh coefficients (with the `2^-l`
/// normalization). Fails if the recovered vector is not a probability law
/// within tolerance.
pub fn walsh_inverse(table: &FourierTable) -> Result<ReplicaLaw, HypError> {
    let probs = fourier_inverse_core(&table.coeffs);
    ReplicaLaw::new(table.l, probs)
}
