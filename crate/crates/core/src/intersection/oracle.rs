//! Finite-field root counting, independent of the volume computations.
//!
//! Each trial draws `κ` polynomials on the support `B(S_m)` with uniform
//! coefficients in `F_p^×` and counts their common zeros on the torus
//! `(F̄_p^×)^κ`. With [`OracleMode::Rational`] the count is restricted to
//! `F_p`-rational points and done by exhaustive evaluation.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ff::{count_closure_points, is_prime, Fp, Mono, Poly, UPoly};
use super::SubtorusSpec;
use crate::error::{Error, Result};
use crate::exec::{self, Strategy};
use crate::lattice::{difference_lattice, LatticeIndex, SubLattice};
use crate::series::Series;

/// Largest torus `(p - 1)^κ` scanned in rational mode.
pub const MAX_TORUS: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum OracleMode {
    /// Distinct common zeros over the algebraic closure.
    #[default]
    Closure,
    /// `F_p`-rational common zeros.
    Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleTrial {
    pub trial: u32,
    pub seed: u64,
    pub p: u64,
    /// `None` when the zero set is positive-dimensional.
    pub count: Option<u64>,
}

fn check_prime(p: u64, indices: &[BigInt]) -> Result<()> {
    if !(101..1 << 32).contains(&p) || !is_prime(p) {
        return Err(Error::Oracle(format!("{p} is not a prime in [101, 2^32)")));
    }
    if let Some(d) = indices.iter().find(|d| (*d % p).is_zero()) {
        return Err(Error::Oracle(format!("p = {p} divides the lattice index {d}")));
    }
    Ok(())
}

/// `trials` independent root counts for `(V_m, Z)` over `F_p`. Trial `t`
/// draws its coefficients from ChaCha8 seeded with `z.seed()` on stream `t`.
pub fn oracle_count(
    series: &Series,
    m: u64,
    z: &SubtorusSpec,
    p: u64,
    trials: u32,
    mode: OracleMode,
    strategy: Strategy,
) -> Result<Vec<OracleTrial>> {
    let kappa = z.kappa();
    if kappa > 2 {
        return Err(Error::Oracle(format!("κ = {kappa} > 2 is not supported")));
    }
    z.check_series(series.dim())?;
    let s = series.evaluate(m);
    if s.is_empty() {
        return Err(Error::EmptySlice(m));
    }
    let image = s.image(z.matrix())?;
    if image.len() < 2 {
        return Err(Error::Oracle(format!("support B(S_{m}) has {} point(s); need at least 2", image.len())));
    }
    let mut indices = Vec::new();
    for (lat, ambient) in [(difference_lattice(&s)?, s.dim()), (difference_lattice(&image)?, kappa)] {
        if let LatticeIndex::Finite(d) = lat.index_in(&SubLattice::full(ambient))? {
            indices.push(d);
        }
    }
    check_prime(p, &indices)?;
    if mode == OracleMode::Rational {
        let torus = (p - 1).checked_pow(kappa as u32).unwrap_or(u64::MAX);
        if torus > MAX_TORUS {
            return Err(Error::Oracle(format!("torus has {torus} points, more than {MAX_TORUS}")));
        }
    }

    // Shift exponents to be nonnegative with a zero minimum per coordinate.
    let raw: Vec<Vec<i64>> = image
        .iter()
        .map(|q| q.0.iter().map(|x| x.to_i64().ok_or_else(|| Error::Oracle("exponent overflow".into()))).collect())
        .collect::<Result<_>>()?;
    let mins: Vec<i64> = (0..kappa).map(|j| raw.iter().map(|e| e[j]).min().unwrap()).collect();
    let support: Vec<Vec<u32>> =
        raw.iter().map(|e| e.iter().zip(&mins).map(|(x, lo)| (x - lo) as u32).collect()).collect();

    let f = Fp::new(p);
    let seed = z.seed();
    let ids: Vec<u32> = (0..trials).collect();
    let counts = exec::map(&ids, strategy, |&t| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(t as u64);
        let coeffs: Vec<Vec<u64>> =
            (0..kappa).map(|_| support.iter().map(|_| rng.random_range(1..p)).collect()).collect();
        let count = match (mode, kappa) {
            (OracleMode::Closure, 1) => Some(closure_count_1d(&support, &coeffs[0], f)),
            (OracleMode::Closure, _) => closure_count_2d(&support, &coeffs, f),
            (OracleMode::Rational, _) => Some(rational_count(&support, &coeffs, f, strategy)),
        };
        OracleTrial { trial: t, seed, p, count }
    });
    Ok(counts)
}

/// `f = Σ c_a x^a` with a nonzero constant term: distinct roots are
/// `deg f - deg gcd(f, f')`, all of them nonzero.
fn closure_count_1d(support: &[Vec<u32>], coeffs: &[u64], f: Fp) -> u64 {
    let deg = support.iter().map(|e| e[0]).max().unwrap() as usize;
    let mut c = vec![0u64; deg + 1];
    for (e, &k) in support.iter().zip(coeffs) {
        c[e[0] as usize] = f.add(c[e[0] as usize], k);
    }
    let poly = UPoly::new(c);
    let g = poly.gcd(&poly.derivative(f), f);
    (poly.degree().unwrap_or(0) - g.degree().unwrap_or(0)) as u64
}

/// Common zeros of `f, g` with `xy ≠ 0`, via `⟨f, g, xyt - 1⟩ ⊂ F_p[x, y, t]`.
fn closure_count_2d(support: &[Vec<u32>], coeffs: &[Vec<u64>], f: Fp) -> Option<u64> {
    let mut gens: Vec<Poly> = coeffs
        .iter()
        .map(|cs| Poly::from_terms(f, support.iter().zip(cs).map(|(e, &c)| (Mono(vec![e[0], e[1], 0]), c))))
        .collect();
    gens.push(Poly::from_terms(f, [(Mono(vec![1, 1, 1]), 1), (Mono(vec![0, 0, 0]), f.p - 1)]));
    count_closure_points(&gens, 3, f)
}

/// Exhaustive scan of `(F_p^×)^κ`, writing `x_j = g^{i_j}` for a generator
/// `g` so that each monomial is a table lookup.
fn rational_count(support: &[Vec<u32>], coeffs: &[Vec<u64>], f: Fp, strategy: Strategy) -> u64 {
    let order = f.p - 1;
    let g = f.generator();
    let mut table = Vec::with_capacity(order as usize);
    let mut x = 1;
    for _ in 0..order {
        table.push(x);
        x = f.mul(x, g);
    }
    let kappa = support[0].len();
    let eval = |cs: &[u64], logs: &[u64]| {
        support.iter().zip(cs).fold(0u64, |acc, (e, &c)| {
            let l = e.iter().zip(logs).fold(0u64, |s, (&a, &i)| (s + a as u64 * i) % order);
            f.add(acc, f.mul(c, table[l as usize]))
        })
    };
    let firsts: Vec<u64> = (0..order).collect();
    let per_first = exec::map(&firsts, strategy, |&i0| {
        let mut n = 0u64;
        if kappa == 1 {
            n += coeffs.iter().all(|cs| eval(cs, &[i0]) == 0) as u64;
        } else {
            for i1 in 0..order {
                n += coeffs.iter().all(|cs| eval(cs, &[i0, i1]) == 0) as u64;
            }
        }
        n
    });
    per_first.iter().sum()
}

/// Most frequent finite count, ties broken toward the larger value.
pub fn modal_count(trials: &[OracleTrial]) -> Option<u64> {
    let mut counts: Vec<u64> = trials.iter().filter_map(|t| t.count).collect();
    counts.sort_unstable();
    let mut best: Option<(usize, u64)> = None;
    for chunk in counts.chunk_by(|a, b| a == b) {
        if best.is_none_or(|(n, _)| chunk.len() >= n) {
            best = Some((chunk.len(), chunk[0]));
        }
    }
    best.map(|(_, c)| c)
}
