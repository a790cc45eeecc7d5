//! Exact rank computations for integer matrices over `Q` or `F_p`.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;
use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// Scalar field used for ranks.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum Field {
    #[default]
    Rational,
    Prime(u64),
}

impl Field {
    pub fn prime(p: u64) -> Result<Field, Error> {
        if p < 3 || !is_prime(p) || p > u32::MAX as u64 {
            return Err(Error::BadPrime(p));
        }
        Ok(Field::Prime(p))
    }

    /// Rank of a dense integer matrix.
    pub fn rank(self, m: &[Vec<i64>]) -> usize {
        match self {
            Field::Rational => rank_q(m),
            Field::Prime(p) => rank_mod(m, p),
        }
    }

    /// Rank of a sparse matrix given as rows of `(column, value)` pairs.
    pub fn rank_sparse(self, rows: &[Vec<(usize, i64)>], cols: usize) -> usize {
        let dense: Vec<Vec<i64>> = rows
            .iter()
            .map(|r| {
                let mut v = vec![0; cols];
                for &(c, x) in r {
                    v[c] += x;
                }
                v
            })
            .collect();
        self.rank(&dense)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "q"),
            Field::Prime(p) => write!(f, "p:{}", p),
        }
    }
}

impl FromStr for Field {
    type Err = Error;
    fn from_str(s: &str) -> Result<Field, Error> {
        if s == "q" || s == "Q" {
            return Ok(Field::Rational);
        }
        let p = s
            .strip_prefix("p:")
            .and_then(|t| t.parse::<u64>().ok())
            .ok_or_else(|| Error::Parse(format!("field must be `q` or `p:PRIME`, got `{s}`")))?;
        Field::prime(p)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= n {
        if n % k == 0 {
            return false;
        }
        k += 1;
    }
    true
}

fn rank_mod(m: &[Vec<i64>], p: u64) -> usize {
    let p = p as i64;
    let mut a: Vec<Vec<i64>> = m.iter().map(|r| r.iter().map(|x| x.rem_euclid(p)).collect()).collect();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| a[r][c] != 0) else { continue };
        a.swap(rank, piv);
        let inv = mod_pow(a[rank][c], p - 2, p);
        for x in a[rank].iter_mut() {
            *x = *x * inv % p;
        }
        for r in 0..rows {
            if r != rank && a[r][c] != 0 {
                let f = a[r][c];
                for k in c..cols {
                    a[r][k] = (a[r][k] - f * a[rank][k]).rem_euclid(p);
                }
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

fn mod_pow(mut b: i64, mut e: i64, p: i64) -> i64 {
    let mut acc = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

/// Fraction-free (Bareiss) elimination. Runs in `i128` and restarts in
/// `BigInt` if an intermediate value overflows.
fn rank_q(m: &[Vec<i64>]) -> usize {
    let a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    match bareiss_i128(a) {
        Some(r) => r,
        None => bareiss_big(m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()),
    }
}

fn bareiss_i128(mut a: Vec<Vec<i128>>) -> Option<usize> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut prev: i128 = 1;
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| a[r][c] != 0) else { continue };
        a.swap(rank, piv);
        let pv = a[rank][c];
        for r in rank + 1..rows {
            let f = a[r][c];
            for k in c..cols {
                let v = pv.checked_mul(a[r][k])?.checked_sub(f.checked_mul(a[rank][k])?)?;
                a[r][k] = v / prev;
            }
        }
        prev = pv;
        rank += 1;
        if rank == rows {
            break;
        }
    }
    Some(rank)
}

fn bareiss_big(mut a: Vec<Vec<BigInt>>) -> usize {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut prev = BigInt::from(1);
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| !a[r][c].is_zero()) else { continue };
        a.swap(rank, piv);
        let pv = a[rank][c].clone();
        for r in rank + 1..rows {
            let f = a[r][c].clone();
            for k in c..cols {
                let v = &pv * &a[r][k] - &f * &a[rank][k];
                a[r][k] = v / &prev;
            }
        }
        prev = pv.abs() * pv.signum();
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_ranks() {
        let m = vec![vec![1, 2, 3], vec![2, 4, 6], vec![1, 0, 1]];
        assert_eq!(Field::Rational.rank(&m), 2);
        assert_eq!(Field::Prime(7).rank(&m), 2);
        let z: Vec<Vec<i64>> = vec![vec![0, 0], vec![0, 0]];
        assert_eq!(Field::Rational.rank(&z), 0);
    }

    #[test]
    fn char_depends() {
        let m = vec![vec![3, 0], vec![0, 1]];
        assert_eq!(Field::Rational.rank(&m), 2);
        assert_eq!(Field::Prime(3).rank(&m), 1);
    }

    #[test]
    fn big_fallback_agrees() {
        let n = 40;
        let m: Vec<Vec<i64>> =
            (0..n).map(|r| (0..n).map(|c| ((r * 7 + c * 13) % 11) as i64 - 5 + (r == c) as i64 * 50).collect()).collect();
        let big = bareiss_big(m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect());
        assert_eq!(rank_q(&m), big);
        assert_eq!(big, n);
    }

    #[test]
    fn field_parse() {
        assert_eq!("q".parse::<Field>().unwrap(), Field::Rational);
        assert_eq!("p:101".parse::<Field>().unwrap(), Field::Prime(101));
        assert!("p:2".parse::<Field>().is_err());
        assert!("p:9".parse::<Field>().is_err());
    }
}
