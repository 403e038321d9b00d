//! The replica functional Γ_l and its three evaluation routes.
//!
//! `Γ_l(ν)` is the probability that `l` independent replica assignments all
//! violate a random clause, when the per-coordinate replica columns
//! `Z_1, ..., Z_k` are i.i.d. with law `ν` on `{-1,+1}^l`:
//!
//! * [`gamma_direct`] — exhaustive enumeration of all `(2^l)^k` coordinate
//!   configurations. The oracle route; works for any clause distribution.
//! * [`gamma_factorized`] — the closed form for factorizing distributions
//!   with distinct forbidden points: a sum over the `J^l` maps from replicas
//!   to forbidden points of the k-th power of a linear functional of `ν`.
//! * [`gamma_xor`] — the Fourier route for parity clauses:
//!   `2^-l * sum over even-size Q of f(Q)^k`, where `f(Q)` are the
//!   Walsh coefficients of `ν`.
//!
//! Every route has an `_exact` twin computing in arbitrary-precision
//! rationals; the f64 and exact paths share one generic core.

use super::walsh::fourier_core;
use super::{ExactLaw, HypError, ReplicaLaw};
use crate::formula::ClauseTypeDistribution;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arithmetic shared by the f64 and exact-rational evaluation modes.
pub trait Scalar:
    Clone
    + PartialOrd
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_ratio(num: i64, den: u64) -> Self;
    fn from_weight(w: &BigRational) -> Self;
    fn powu(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc * self.clone();
        }
        acc
    }
    fn neg(self) -> Self {
        Self::zero() - self
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_ratio(num: i64, den: u64) -> Self {
        num as f64 / den as f64
    }
    fn from_weight(w: &BigRational) -> Self {
        w.to_f64().unwrap()
    }
    fn powu(&self, e: u32) -> Self {
        self.powi(e as i32)
    }
}

impl Scalar for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_ratio(num: i64, den: u64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
    fn from_weight(w: &BigRational) -> Self {
        w.clone()
    }
}

pub(super) fn check_direct_cap(k: u32, l: u32) -> Result<(), HypError> {
    if k as u64 * l as u64 > 24 {
        Err(HypError::CapExceeded {
            what: format!("direct enumeration needs k*l <= 24, got k={k}, l={l}"),
        })
    } else {
        Ok(())
    }
}

fn gamma_direct_core<S: Scalar>(
    mu: &ClauseTypeDistribution,
    nu: &[S],
    l: u32,
) -> Result<S, HypError> {
    let k = mu.k();
    check_direct_cap(k, l)?;
    let lmask = (1u64 << l) - 1;
    let mut patterns = vec![0u32; l as usize];
    let mut acc = S::zero();
    for config in 0..1u64 << (k * l) {
        // Coordinate i holds bits [i*l, (i+1)*l) of the configuration.
        let mut weight = S::one();
        for i in 0..k {
            weight = weight * nu[((config >> (i * l)) & lmask) as usize].clone();
        }
        for (r, p) in patterns.iter_mut().enumerate() {
            let mut pat = 0u32;
            for i in 0..k {
                pat |= (((config >> (i * l + r as u32)) & 1) as u32) << i;
            }
            *p = pat;
        }
        // E_mu of prod_r (1 - phi(Z^(r))): only types violated by every
        // replica contribute their weight.
        let mut clause_sum = S::zero();
        'types: for (t, w) in mu.support() {
            for &p in &patterns {
                if t.get(p) {
                    continue 'types;
                }
            }
            clause_sum = clause_sum + S::from_weight(w);
        }
        acc = acc + weight * clause_sum;
    }
    Ok(acc)
}

/// Direct enumeration of Γ_l. Requires `k*l <= 24`.
pub fn gamma_direct(mu: &ClauseTypeDistribution, nu: &ReplicaLaw) -> Result<f64, HypError> {
    gamma_direct_core(mu, nu.probs(), nu.l())
}

/// Direct enumeration in exact rational arithmetic.
pub fn gamma_direct_exact(
    mu: &ClauseTypeDistribution,
    nu: &ExactLaw,
) -> Result<BigRational, HypError> {
    gamma_direct_core(mu, nu.probs(), nu.l())
}

fn gamma_factorized_core<S: Scalar>(
    bar_mu: &[S],
    j: u32,
    k: u32,
    nu: &[S],
    l: u32,
) -> Result<S, HypError> {
    if (j as f64).powi(l as i32) > (1u64 << 20) as f64 {
        return Err(HypError::CapExceeded {
            what: format!("factorized route needs J^l <= 2^20, got J={j}, l={l}"),
        });
    }
    if j > 20 {
        return Err(HypError::CapExceeded {
            what: format!("J={j} too large"),
        });
    }
    let mut acc = S::zero();
    let mut map = vec![0u32; l as usize];
    loop {
        // E over bar_mu of nu evaluated at the tuple whose replica-r entry is
        // the r-th mapped forbidden point's coordinate value.
        let mut e = S::zero();
        for t in 0..1u32 << j {
            let mut idx = 0usize;
            for (r, &jr) in map.iter().enumerate() {
                idx |= ((t >> jr & 1) as usize) << r;
            }
            e = e + bar_mu[t as usize].clone() * nu[idx].clone();
        }
        acc = acc + e.powu(k);

        let mut pos = 0;
        while pos < map.len() {
            map[pos] += 1;
            if map[pos] < j {
                break;
            }
            map[pos] = 0;
            pos += 1;
        }
        if pos == map.len() {
            break;
        }
    }
    Ok(acc)
}

/// Closed-form Γ_l for a factorizing distribution given by `(j, bar_mu, k)`.
///
/// The closed form indexes forbidden points by position, so it matches
/// [`gamma_direct`] on the induced distribution exactly when distinct
/// positions almost surely hold distinct points (true for the named
/// families); colliding points are counted with multiplicity here but merged
/// by the set semantics of the direct route.
pub fn gamma_factorized(
    bar_mu: &[f64],
    j: u32,
    k: u32,
    nu: &ReplicaLaw,
) -> Result<f64, HypError> {
    if bar_mu.len() != 1usize << j {
        return Err(HypError::BadLaw(format!(
            "bar_mu must have 2^{j} entries, got {}",
            bar_mu.len()
        )));
    }
    gamma_factorized_core(bar_mu, j, k, nu.probs(), nu.l())
}

/// Closed-form Γ_l in exact rational arithmetic.
pub fn gamma_factorized_exact(
    bar_mu: &[BigRational],
    j: u32,
    k: u32,
    nu: &ExactLaw,
) -> Result<BigRational, HypError> {
    if bar_mu.len() != 1usize << j {
        return Err(HypError::BadLaw(format!(
            "bar_mu must have 2^{j} entries, got {}",
            bar_mu.len()
        )));
    }
    gamma_factorized_core(bar_mu, j, k, nu.probs(), nu.l())
}

fn gamma_xor_core<S: Scalar>(nu: &[S], l: u32, k: u32) -> S {
    let f = fourier_core(nu);
    let mut acc = S::zero();
    for (q, coeff) in f.iter().enumerate() {
        if q.count_ones() % 2 == 0 {
            acc = acc + coeff.powu(k);
        }
    }
    acc * S::from_ratio(1, 1 << l)
}

/// Fourier-route Γ_l for the XOR clause distribution of arity `k`:
/// `2^-l * sum over even |Q| of f(Q)^k`.
pub fn gamma_xor(nu: &ReplicaLaw, k: u32) -> Result<f64, HypError> {
    Ok(gamma_xor_core(nu.probs(), nu.l(), k))
}

/// Fourier-route Γ_l in exact rational arithmetic.
pub fn gamma_xor_exact(nu: &ExactLaw, k: u32) -> Result<BigRational, HypError> {
    Ok(gamma_xor_core(nu.probs(), nu.l(), k))
}

/// One Γ evaluation route, packaged for the convexity prober and the runner.
#[derive(Debug, Clone)]
pub enum GammaRoute {
    /// Direct enumeration against an explicit clause distribution.
    Direct(ClauseTypeDistribution),
    /// Factorized closed form.
    Factorized { j: u32, k: u32, bar_mu: Vec<f64> },
    /// Fourier route for XOR of arity `k`.
    Xor { k: u32 },
}

impl GammaRoute {
    pub fn eval(&self, nu: &ReplicaLaw) -> Result<f64, HypError> {
        match self {
            GammaRoute::Direct(mu) => gamma_direct(mu, nu),
            GammaRoute::Factorized { j, k, bar_mu } => gamma_factorized(bar_mu, *j, *k, nu),
            GammaRoute::Xor { k } => gamma_xor(nu, *k),
        }
    }

    pub fn k(&self) -> u32 {
        match self {
            GammaRoute::Direct(mu) => mu.k(),
            GammaRoute::Factorized { k, .. } | GammaRoute::Xor { k } => *k,
        }
    }
}

/// Exact rationals for a `bar_mu` given as f64 (each entry converted
/// exactly, then normalized by the exact sum).
pub fn bar_mu_exact(bar_mu: &[f64]) -> Result<Vec<BigRational>, HypError> {
    let raw: Vec<BigRational> = bar_mu
        .iter()
        .map(|&w| BigRational::from_float(w).unwrap_or_else(BigRational::zero))
        .collect();
    let total: BigRational = raw.iter().cloned().sum();
    if !total.is_positive() {
        return Err(HypError::BadLaw("bar_mu sums to zero".into()));
    }
    Ok(raw.into_iter().map(|w| w / total.clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{
        eval_clause, hyp2col_bar_mu, ksat_bar_mu, make_hyp2col, make_ksat, make_nae, make_xor,
        nae_bar_mu,
    };
    use rand::Rng;
    use rand::SeedableRng;

    /// Test-only oracle: Γ via explicit spin vectors and the public clause
    /// evaluator, no bit packing shared with the implementation.
    fn naive_gamma(mu: &crate::formula::ClauseTypeDistribution, nu: &ReplicaLaw) -> f64 {
        let k = mu.k() as usize;
        let l = nu.l() as usize;
        let m = nu.probs().len();
        let mut total = 0.0;
        let mut cols = vec![0usize; k];
        loop {
            let weight: f64 = cols.iter().map(|&c| nu.probs()[c]).product();
            let mut inner = 0.0;
            for (t, w) in mu.support() {
                let mut prod = 1.0;
                for r in 0..l {
                    let tuple: Vec<i8> = (0..k)
                        .map(|i| if cols[i] >> r & 1 == 1 { 1 } else { -1 })
                        .collect();
                    if eval_clause(t, &tuple).unwrap() {
                        prod = 0.0;
                        break;
                    }
                }
                inner += w.to_f64().unwrap() * prod;
            }
            total += weight * inner;

            let mut pos = 0;
            while pos < k {
                cols[pos] += 1;
                if cols[pos] < m {
                    break;
                }
                cols[pos] = 0;
                pos += 1;
            }
            if pos == k {
                break;
            }
        }
        total
    }

    fn random_law(rng: &mut impl Rng, l: u32) -> ReplicaLaw {
        let raw: Vec<f64> = (0..1usize << l).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
        let sum: f64 = raw.iter().sum();
        ReplicaLaw::new(l, raw.into_iter().map(|x| x / sum).collect()).unwrap()
    }

    #[test]
    fn direct_matches_naive_oracle() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(5);
        for mu in [make_ksat(2).unwrap(), make_nae(3).unwrap(), make_xor(3).unwrap()] {
            for l in 1..=2u32 {
                for _ in 0..5 {
                    let nu = random_law(&mut rng, l);
                    let d = gamma_direct(&mu, &nu).unwrap();
                    let o = naive_gamma(&mu, &nu);
                    assert!((d - o).abs() < 1e-12, "direct={d}, oracle={o}");
                }
            }
        }
    }

    #[test]
    fn ksat_uniform_law_closed_form() {
        // Uniform ν: each replica independently violates with prob 2^-k, so
        // Γ = 2^(-k l). Checked against the enumeration oracle too.
        for k in 1..=4u32 {
            let mu = make_ksat(k).unwrap();
            for l in 1..=3u32 {
                if k * l > 12 {
                    continue;
                }
                let nu = ReplicaLaw::uniform(l).unwrap();
                let g = gamma_direct(&mu, &nu).unwrap();
                let expected = 0.5f64.powi((k * l) as i32);
                assert!((g - expected).abs() < 1e-15, "k={k}, l={l}: {g} vs {expected}");
                assert!((naive_gamma(&mu, &nu) - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn ksat_l1_uniform_is_one_eighth_for_k3() {
        let mu = make_ksat(3).unwrap();
        let nu = ReplicaLaw::uniform(1).unwrap();
        let g = gamma_direct(&mu, &nu).unwrap();
        assert!((g - 0.125).abs() < 1e-15);
    }

    #[test]
    fn xor_l1_is_one_half_for_any_law() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(9);
        for k in 1..=4u32 {
            let mu = make_xor(k).unwrap();
            for _ in 0..10 {
                let nu = random_law(&mut rng, 1);
                assert!((gamma_direct(&mu, &nu).unwrap() - 0.5).abs() < 1e-12);
                assert!((gamma_xor(&nu, k).unwrap() - 0.5).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn factorized_agrees_with_direct_on_named_families() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(13);
        for k in 2..=4u32 {
            for l in 1..=3u32 {
                if k * l > 12 {
                    continue;
                }
                let cases: Vec<(crate::formula::ClauseTypeDistribution, (u32, Vec<f64>))> = vec![
                    (make_ksat(k).unwrap(), ksat_bar_mu()),
                    (make_nae(k).unwrap(), nae_bar_mu()),
                    (make_hyp2col(k).unwrap(), hyp2col_bar_mu()),
                ];
                for (mu, (j, bar)) in cases {
                    for _ in 0..10 {
                        let nu = random_law(&mut rng, l);
                        let d = gamma_direct(&mu, &nu).unwrap();
                        let f = gamma_factorized(&bar, j, k, &nu).unwrap();
                        assert!((d - f).abs() < 1e-12, "k={k}, l={l}: {d} vs {f}");
                    }
                }
            }
        }
    }

    #[test]
    fn factorized_point_mass_value() {
        // ν a point mass on the all-+1 tuple, k-SAT: only the map sending
        // every replica to the single forbidden point contributes, with the
        // inner expectation 1/2, so Γ = 2^-k.
        for k in 1..=4u32 {
            for l in 1..=3u32 {
                let nu = ReplicaLaw::point_mass(l, (1usize << l) - 1).unwrap();
                let (j, bar) = ksat_bar_mu();
                let f = gamma_factorized(&bar, j, k, &nu).unwrap();
                assert!((f - 0.5f64.powi(k as i32)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn xor_route_agrees_with_direct() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(21);
        for k in [2u32, 3, 4] {
            let mu = make_xor(k).unwrap();
            for l in 1..=3u32 {
                if k * l > 12 {
                    continue;
                }
                for _ in 0..10 {
                    let nu = random_law(&mut rng, l);
                    let d = gamma_direct(&mu, &nu).unwrap();
                    let x = gamma_xor(&nu, k).unwrap();
                    assert!((d - x).abs() < 1e-12, "k={k}, l={l}: {d} vs {x}");
                }
            }
        }
    }

    #[test]
    fn xor_uniform_law_value() {
        for k in 1..=4u32 {
            for l in 1..=3u32 {
                let nu = ReplicaLaw::uniform(l).unwrap();
                let x = gamma_xor(&nu, k).unwrap();
                assert!((x - 0.5f64.powi(l as i32)).abs() < 1e-15, "k={k}, l={l}");
            }
        }
    }

    #[test]
    fn exact_routes_agree_exactly() {
        // Rational laws with small denominators: the three routes must agree
        // as exact rationals, not merely within float tolerance.
        let weights: [&[u64]; 3] = [&[1, 1], &[3, 1], &[1, 7]];
        for w in weights {
            let nu = ExactLaw::from_integer_weights(1, w).unwrap();
            let (j, bar) = ksat_bar_mu();
            let bar = bar_mu_exact(&bar).unwrap();
            for k in 1..=3u32 {
                let mu = make_ksat(k).unwrap();
                let d = gamma_direct_exact(&mu, &nu).unwrap();
                let f = gamma_factorized_exact(&bar, j, k, &nu).unwrap();
                assert_eq!(d, f);
            }
            for k in 1..=3u32 {
                let mu = make_xor(k).unwrap();
                let d = gamma_direct_exact(&mu, &nu).unwrap();
                let x = gamma_xor_exact(&nu, k).unwrap();
                assert_eq!(d, x);
            }
        }
        let nu2 = ExactLaw::from_integer_weights(2, &[1, 2, 3, 4]).unwrap();
        let mu = make_nae(3).unwrap();
        let (j, bar) = nae_bar_mu();
        let bar = bar_mu_exact(&bar).unwrap();
        assert_eq!(
            gamma_direct_exact(&mu, &nu2).unwrap(),
            gamma_factorized_exact(&bar, j, 3, &nu2).unwrap()
        );
    }

    #[test]
    fn gamma_stays_in_unit_interval() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(33);
        for mu in [make_ksat(3).unwrap(), make_nae(3).unwrap(), make_hyp2col(4).unwrap()] {
            for _ in 0..50 {
                let nu = random_law(&mut rng, 2);
                let g = gamma_direct(&mu, &nu).unwrap();
                assert!((0.0..=1.0).contains(&g));
            }
        }
    }

    #[test]
    fn gamma_is_polynomial_of_degree_at_most_k() {
        // Order-(k+1) directional differences of a degree-k polynomial
        // vanish identically.
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(41);
        for k in 2..=3u32 {
            let mu = make_ksat(k).unwrap();
            let l = 2;
            let dim = 1usize << l;
            let base = ReplicaLaw::uniform(l).unwrap();
            let mut d: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>() - 0.5).collect();
            let mean = d.iter().sum::<f64>() / dim as f64;
            d.iter_mut().for_each(|x| *x -= mean);
            let h = 0.02;
            let order = k + 1;
            let mut acc = 0.0;
            for jj in 0..=order {
                let probs: Vec<f64> = base
                    .probs()
                    .iter()
                    .zip(&d)
                    .map(|(&p, &di)| p + jj as f64 * h * di)
                    .collect();
                let nu = ReplicaLaw::new(l, probs).unwrap();
                let c = crate::ensembles::choose(order as u64, jj as u64).unwrap() as f64;
                let sign = if (order - jj) % 2 == 1 { -1.0 } else { 1.0 };
                acc += sign * c * gamma_direct(&mu, &nu).unwrap();
            }
            assert!(acc.abs() < 1e-10, "k={k}: residual {acc}");
        }
    }

    #[test]
    fn direct_cap_enforced() {
        let mu = make_ksat(13).unwrap();
        let nu = ReplicaLaw::uniform(2).unwrap();
        assert!(matches!(
            gamma_direct(&mu, &nu),
            Err(HypError::CapExceeded { .. })
        ));
    }
}
