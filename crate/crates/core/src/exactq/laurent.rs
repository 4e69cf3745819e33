//! Dense univariate polynomials over Q, indexed by degree.
//!
//! These back the fraction canonicalization in [`super::QFrac`]: after
//! rescaling to a common root `t = q^{1/r}` and stripping the lowest power of
//! `t`, both parts of a fraction are ordinary polynomials in `t` and the usual
//! Euclidean gcd applies.

use num_rational::BigRational;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

pub(crate) type Poly = Vec<BigRational>;

pub(crate) fn trim(p: &mut Poly) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

pub(crate) fn degree(p: &Poly) -> Option<usize> {
    p.len().checked_sub(1)
}

fn make_monic(p: &mut Poly) {
    if let Some(lc) = p.last().cloned() {
        if !lc.is_one() {
            for c in p.iter_mut() {
                *c /= &lc;
            }
        }
    }
}

/// Quotient and remainder of `a` by a nonzero `b`.
pub(crate) fn div_rem(a: &Poly, b: &Poly) -> (Poly, Poly) {
    let db = degree(b).expect("polynomial division by zero");
    let mut rem = a.clone();
    trim(&mut rem);
    if rem.len() < b.len() {
        return (Vec::new(), rem);
    }
    let lc = &b[db];
    let mut quot = vec![BigRational::zero(); rem.len() - db];
    while let Some(dr) = degree(&rem) {
        if dr < db {
            break;
        }
        let factor = &rem[dr] / lc;
        let shift = dr - db;
        for (i, c) in b.iter().enumerate() {
            if !c.is_zero() {
                rem[i + shift] -= &factor * c;
            }
        }
        quot[shift] = factor;
        // the leading term cancels exactly; drop it even if trim would not
        rem.pop();
        trim(&mut rem);
    }
    trim(&mut quot);
    (quot, rem)
}

/// Largest `k` such that only powers `t^{ik}` occur (0 for constants).
pub(crate) fn support_gcd(p: &Poly) -> usize {
    p.iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .fold(0, |g, (i, _)| g.gcd(&i))
}

/// Substitutes `t^k -> s`; `p` must be supported on multiples of `k`.
pub(crate) fn compress(p: &Poly, k: usize) -> Poly {
    if k <= 1 {
        return p.clone();
    }
    p.iter().step_by(k).cloned().collect()
}

/// Substitutes `s -> t^k`.
pub(crate) fn expand(p: &Poly, k: usize) -> Poly {
    if k <= 1 || p.is_empty() {
        return p.clone();
    }
    let mut out = vec![BigRational::zero(); (p.len() - 1) * k + 1];
    for (i, c) in p.iter().enumerate() {
        out[i * k] = c.clone();
    }
    out
}

const PROBE_PRIME: u64 = (1 << 61) - 1;

fn inv_mod(a: u64, p: u64) -> u64 {
    crate::util::pow_mod(a, p - 2, p)
}

/// Image of `p` in `F_ℓ[t]`, or `None` if some denominator or the leading
/// coefficient vanishes mod `ℓ`.
fn reduce_mod(p: &Poly, l: u64) -> Option<Vec<u64>> {
    let big_l = BigInt::from(l);
    let mut out = Vec::with_capacity(p.len());
    for c in p {
        let n = c.numer().mod_floor(&big_l).to_u64().expect("reduced residue");
        let d = c.denom().mod_floor(&big_l).to_u64().expect("reduced residue");
        if d == 0 {
            return None;
        }
        out.push((n as u128 * inv_mod(d, l) as u128 % l as u128) as u64);
    }
    (out.last() != Some(&0)).then_some(out)
}

fn degree_of_gcd_mod(mut x: Vec<u64>, mut y: Vec<u64>, l: u64) -> usize {
    let m = l as u128;
    while y.last() == Some(&0) {
        y.pop();
    }
    while !y.is_empty() {
        let inv = inv_mod(*y.last().expect("nonzero"), l) as u128;
        let dy = y.len() - 1;
        while x.len() > dy {
            let lead = *x.last().expect("nonzero") as u128;
            if lead != 0 {
                let f = lead * inv % m;
                let shift = x.len() - 1 - dy;
                for (i, &c) in y.iter().enumerate() {
                    let sub = (f * c as u128 % m) as u64;
                    x[i + shift] = ((x[i + shift] as u128 + m - sub as u128) % m) as u64;
                }
            }
            x.pop();
        }
        while x.last() == Some(&0) {
            x.pop();
        }
        std::mem::swap(&mut x, &mut y);
    }
    x.len().saturating_sub(1)
}

/// True when `a` and `b` are certainly coprime over Q. Reduction at a prime
/// not dividing either leading coefficient can only enlarge the gcd, so a
/// constant gcd mod that prime is conclusive.
fn coprime_by_reduction(a: &Poly, b: &Poly) -> bool {
    match (reduce_mod(a, PROBE_PRIME), reduce_mod(b, PROBE_PRIME)) {
        (Some(x), Some(y)) => degree_of_gcd_mod(x, y, PROBE_PRIME) == 0,
        _ => false,
    }
}

/// Primitive integer polynomial proportional to `p` (nonzero).
fn primitive_part(p: &Poly) -> Vec<BigInt> {
    let lcm = p.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let ints: Vec<BigInt> = p.iter().map(|c| (c * &lcm).to_integer()).collect();
    primitive_int(ints)
}

fn primitive_int(p: Vec<BigInt>) -> Vec<BigInt> {
    let content = p.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    if content.is_one() || content.is_zero() {
        p
    } else {
        p.into_iter().map(|c| c / &content).collect()
    }
}

/// Pseudo-remainder of `a` by `b` over Z, degrees `deg a ≥ deg b`.
fn pseudo_rem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let lc = b.last().expect("nonzero divisor");
    let db = b.len() - 1;
    let mut r = a.to_vec();
    while r.len() > db && !r.is_empty() {
        let lead = r.last().expect("nonempty").clone();
        let shift = r.len() - 1 - db;
        if !lead.is_zero() {
            for c in r.iter_mut() {
                *c *= lc;
            }
            for (i, c) in b.iter().enumerate() {
                r[i + shift] -= &lead * c;
            }
        }
        r.pop();
        while r.last().is_some_and(Zero::is_zero) {
            r.pop();
        }
    }
    r
}

/// Monic greatest common divisor. Both inputs must be nonzero.
pub(crate) fn gcd(a: &Poly, b: &Poly) -> Poly {
    let mut x = a.clone();
    let mut y = b.clone();
    trim(&mut x);
    trim(&mut y);
    if x.len() <= 1 || y.len() <= 1 || coprime_by_reduction(&x, &y) {
        return vec![BigRational::one()];
    }
    let (mut x, mut y) = (primitive_part(&x), primitive_part(&y));
    if x.len() < y.len() {
        std::mem::swap(&mut x, &mut y);
    }
    while !y.is_empty() {
        let r = pseudo_rem(&x, &y);
        x = std::mem::replace(&mut y, if r.is_empty() { r } else { primitive_int(r) });
    }
    let mut g: Poly = x.into_iter().map(BigRational::from_integer).collect();
    make_monic(&mut g);
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(cs: &[i64]) -> Poly {
        let mut v: Poly = cs.iter().map(|&c| BigRational::from_integer(BigInt::from(c))).collect();
        trim(&mut v);
        v
    }

    #[test]
    fn modular_probe() {
        // (t - 1)(t + 2) and (t - 1)(t - 3) share a factor; t^2 + 1 and t do not
        assert!(!coprime_by_reduction(&p(&[-2, 1, 1]), &p(&[3, -4, 1])));
        assert!(coprime_by_reduction(&p(&[1, 0, 1]), &p(&[0, 1])));
        assert_eq!(gcd(&p(&[-2, 1, 1]), &p(&[3, -4, 1])), p(&[-1, 1]));
    }

    #[test]
    fn compression_round_trip() {
        let a = p(&[1, 0, 0, 2, 0, 0, -1]);
        assert_eq!(support_gcd(&a), 3);
        assert_eq!(compress(&a, 3), p(&[1, 2, -1]));
        assert_eq!(expand(&compress(&a, 3), 3), a);
        assert_eq!(support_gcd(&p(&[5])), 0);
    }

    #[test]
    fn division_with_remainder() {
        // t^3 - 1 = (t^2 - 1) * t + (t - 1)
        let (q, r) = div_rem(&p(&[-1, 0, 0, 1]), &p(&[-1, 0, 1]));
        assert_eq!(q, p(&[0, 1]));
        assert_eq!(r, p(&[-1, 1]));
    }

    #[test]
    fn gcd_is_monic() {
        // gcd(2t^2 - 2, 3t - 3) = t - 1
        assert_eq!(gcd(&p(&[-2, 0, 2]), &p(&[-3, 3])), p(&[-1, 1]));
        assert_eq!(gcd(&p(&[1, 1]), &p(&[-1, 1])), p(&[1]));
    }
}
