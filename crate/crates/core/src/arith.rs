//! Integer factorization for place-by-place diagnostics.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

const TRIAL_LIMIT: u64 = 1 << 16;

/// Deterministic Miller–Rabin for `n < 3.3e24`, probabilistic beyond.
pub fn is_probable_prime(n: &BigInt) -> bool {
    let n = n.abs();
    if n < BigInt::from(2) {
        return false;
    }
    for p in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41] {
        let p = BigInt::from(p);
        if n == p {
            return true;
        }
        if (&n % &p).is_zero() {
            return false;
        }
    }
    let one = BigInt::one();
    let nm1 = &n - &one;
    let mut d = nm1.clone();
    let mut s = 0;
    while d.is_even() {
        d >>= 1;
        s += 1;
    }
    'witness: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41] {
        let mut x = BigInt::from(a).modpow(&d, &n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % &n;
            if x == nm1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Brent's variant of Pollard rho; returns a nontrivial factor of composite `n`.
fn pollard_brent(n: &BigInt) -> Option<BigInt> {
    if n.is_even() {
        return Some(BigInt::from(2));
    }
    let one = BigInt::one();
    for c in 1u32..40 {
        let c = BigInt::from(c);
        let f = |x: &BigInt| (x * x + &c) % n;
        let mut y = BigInt::from(2);
        let mut r: u64 = 1;
        let mut q = BigInt::one();
        let mut g = BigInt::one();
        let mut x = y.clone();
        let mut ys = y.clone();
        const M: u64 = 128;
        while g == one {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g == one {
                ys = y.clone();
                for _ in 0..M.min(r - k) {
                    y = f(&y);
                    q = (q * (&x - &y).abs()) % n;
                }
                g = q.gcd(n);
                k += M;
            }
            r *= 2;
            if r > 1 << 22 {
                break;
            }
        }
        if g == *n {
            loop {
                ys = f(&ys);
                g = (&x - &ys).abs().gcd(n);
                if g != one {
                    break;
                }
            }
        }
        if g != one && g != *n {
            return Some(g);
        }
    }
    None
}

/// Prime factorization `(p, e)` of `|n|`, sorted by prime.
///
/// The flag is `false` when some cofactor resisted Pollard rho and was
/// returned unsplit.
pub fn factorize(n: &BigInt) -> (Vec<(BigInt, u32)>, bool) {
    let mut n = n.abs();
    let mut out: Vec<(BigInt, u32)> = Vec::new();
    let mut complete = true;
    if n.is_zero() {
        return (out, true);
    }
    let mut p = 2u64;
    while p < TRIAL_LIMIT && n > BigInt::one() {
        let bp = BigInt::from(p);
        if &bp * &bp > n {
            break;
        }
        let mut e = 0;
        while (&n % &bp).is_zero() {
            n /= &bp;
            e += 1;
        }
        if e > 0 {
            out.push((bp, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if m.to_u64().is_some_and(|v| v < TRIAL_LIMIT * TRIAL_LIMIT) || is_probable_prime(&m) {
            push_factor(&mut out, m, 1);
            continue;
        }
        match pollard_brent(&m) {
            Some(f) => {
                let other = &m / &f;
                stack.push(f);
                stack.push(other);
            }
            None => {
                complete = false;
                push_factor(&mut out, m, 1);
            }
        }
    }
    out.sort();
    (out, complete)
}

fn push_factor(out: &mut Vec<(BigInt, u32)>, p: BigInt, e: u32) {
    if let Some(entry) = out.iter_mut().find(|(q, _)| *q == p) {
        entry.1 += e;
    } else {
        out.push((p, e));
    }
}

/// Exponent of `p` in `n` (`n != 0`).
pub fn valuation(n: &BigInt, p: &BigInt) -> u32 {
    let mut n = n.clone();
    let mut v = 0;
    while !n.is_zero() && (&n % p).is_zero() {
        n /= p;
        v += 1;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_factorizations() {
        let (f, ok) = factorize(&BigInt::from(360));
        assert!(ok);
        assert_eq!(
            f,
            vec![
                (BigInt::from(2), 3),
                (BigInt::from(3), 2),
                (BigInt::from(5), 1)
            ]
        );
        assert_eq!(factorize(&BigInt::from(1)).0, vec![]);
        assert_eq!(factorize(&BigInt::from(-7)).0, vec![(BigInt::from(7), 1)]);
    }

    #[test]
    fn semiprime_beyond_trial_division() {
        let p = BigInt::from(1_000_003u64);
        let q = BigInt::from(998_244_353u64);
        let (f, ok) = factorize(&(&p * &q * &p));
        assert!(ok);
        assert_eq!(f, vec![(p, 2), (q, 1)]);
    }

    #[test]
    fn primality() {
        assert!(is_probable_prime(&BigInt::from(998_244_353u64)));
        assert!(!is_probable_prime(&BigInt::from(561)));
        assert!(is_probable_prime(
            &"170141183460469231731687303715884105727".parse().unwrap()
        ));
    }
}
