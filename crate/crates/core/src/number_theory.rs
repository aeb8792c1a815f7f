//! Arithmetic functions and Ramanujan sums.
//!
//! `c_q(n)` is evaluated exactly through the closed form
//! `c_q(n) = mu(q/g) * phi(q) / phi(q/g)` with `g = gcd(n, q)`, so every value is an
//! integer and no trigonometric rounding is involved. [`ramanujan_sum_trig`] evaluates
//! the defining exponential sum in floating point and is kept as a cross-check.

use crate::error::{Error, Result};

pub fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm(a: usize, b: usize) -> usize {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd(a, b) * b
}

/// Prime factorisation as `(prime, exponent)` pairs in increasing prime order.
pub fn factorize(mut n: usize) -> Vec<(usize, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: usize) -> bool {
    n >= 2 && factorize(n) == [(n, 1)]
}

/// Euler's totient.
pub fn totient(q: usize) -> Result<usize> {
    if q == 0 {
        return Err(Error::domain("totient of 0 is undefined"));
    }
    Ok(factorize(q)
        .iter()
        .fold(q, |acc, &(p, _)| acc / p * (p - 1)))
}

/// Möbius function.
pub fn mobius(n: usize) -> Result<i64> {
    if n == 0 {
        return Err(Error::domain("mobius of 0 is undefined"));
    }
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        Ok(0)
    } else if f.len() % 2 == 0 {
        Ok(1)
    } else {
        Ok(-1)
    }
}

/// Positive divisors of `n` in increasing order.
pub fn divisor_list(n: usize) -> Vec<usize> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut i = 1;
    while i * i <= n {
        if n % i == 0 {
            small.push(i);
            if i * i != n {
                large.push(n / i);
            }
        }
        i += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Divisors of `N` together with their totients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorProfile {
    pub n: usize,
    pub divisors: Vec<usize>,
    pub totients: Vec<usize>,
}

impl DivisorProfile {
    pub fn len(&self) -> usize {
        self.divisors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.divisors.is_empty()
    }

    /// Position of `q` in the divisor list.
    pub fn index_of(&self, q: usize) -> Option<usize> {
        self.divisors.iter().position(|&d| d == q)
    }
}

/// Divisors of `n` with totients. The totients always sum to `n`.
pub fn divisors(n: usize) -> Result<DivisorProfile> {
    if n == 0 {
        return Err(Error::domain("divisors of 0 requested"));
    }
    let divisors = divisor_list(n);
    let totients = divisors
        .iter()
        .map(|&q| totient(q))
        .collect::<Result<Vec<_>>>()?;
    debug_assert_eq!(totients.iter().sum::<usize>(), n);
    Ok(DivisorProfile {
        n,
        divisors,
        totients,
    })
}

/// Single exact value `c_q(n)` for any integer `n`.
pub fn ramanujan_value(q: usize, n: i64) -> Result<i64> {
    if q == 0 {
        return Err(Error::domain("Ramanujan sum of order 0"));
    }
    let r = n.rem_euclid(q as i64) as usize;
    let g = gcd(r, q);
    let qg = q / g;
    let mu = mobius(qg)?;
    Ok(mu * (totient(q)? / totient(qg)?) as i64)
}

/// One period of `c_q` laid out on `Z_N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RamanujanSum {
    pub q: usize,
    pub n: usize,
    pub values: Vec<i64>,
}

impl RamanujanSum {
    pub fn to_f64(&self) -> Vec<f64> {
        self.values.iter().map(|&v| v as f64).collect()
    }

    /// Squared norm over `Z_N`, which equals `N * phi(q)`.
    pub fn norm_sq(&self) -> i64 {
        self.values.iter().map(|v| v * v).sum()
    }
}

/// `c_q(n)` for `n = 0..N-1`. Requires `q | N`.
pub fn ramanujan_sum(q: usize, n: usize) -> Result<RamanujanSum> {
    if q == 0 || n == 0 {
        return Err(Error::domain("q and N must be positive"));
    }
    if n % q != 0 {
        return Err(Error::domain(format!("q = {q} does not divide N = {n}")));
    }
    let period = (0..q as i64)
        .map(|k| ramanujan_value(q, k))
        .collect::<Result<Vec<_>>>()?;
    let values = (0..n).map(|k| period[k % q]).collect();
    Ok(RamanujanSum { q, n, values })
}

/// Floating-point evaluation of `sum_{(k,q)=1} cos(2 pi k n / q)`.
pub fn ramanujan_sum_trig(q: usize, n: i64) -> f64 {
    (1..=q)
        .filter(|&k| gcd(k, q) == 1)
        .map(|k| (2.0 * std::f64::consts::PI * k as f64 * n as f64 / q as f64).cos())
        .sum()
}
