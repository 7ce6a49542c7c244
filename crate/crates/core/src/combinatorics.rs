//! Stirling and Eulerian numbers, descents, increasing runs and the `C_u`
//! polynomials in `w = q^k/(1-q^k)`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

type Triangle = RwLock<Vec<Vec<BigInt>>>;

fn grow_triangle(
    cell: &'static OnceLock<Triangle>,
    n: usize,
    seed: Vec<BigInt>,
    next: impl Fn(&[BigInt], usize) -> Vec<BigInt>,
) -> Vec<BigInt> {
    let lock = cell.get_or_init(|| RwLock::new(vec![seed]));
    {
        let rows = lock.read().expect("triangle lock");
        if let Some(row) = rows.get(n) {
            return row.clone();
        }
    }
    let mut rows = lock.write().expect("triangle lock");
    while rows.len() <= n {
        let m = rows.len();
        let row = next(&rows[m - 1], m);
        rows.push(row);
    }
    rows[n].clone()
}

fn stirling_first_row(n: usize) -> Vec<BigInt> {
    static CELL: OnceLock<Triangle> = OnceLock::new();
    // s(n,k) = s(n-1,k-1) - (n-1) s(n-1,k)
    grow_triangle(&CELL, n, vec![BigInt::one()], |prev, m| {
        let mut row = vec![BigInt::zero(); m + 1];
        for k in 0..=m {
            let mut v = BigInt::zero();
            if k >= 1 {
                v += &prev[k - 1];
            }
            if k < prev.len() {
                v -= BigInt::from(m - 1) * &prev[k];
            }
            row[k] = v;
        }
        row
    })
}

fn stirling_second_row(n: usize) -> Vec<BigInt> {
    static CELL: OnceLock<Triangle> = OnceLock::new();
    // S(n,k) = k S(n-1,k) + S(n-1,k-1)
    grow_triangle(&CELL, n, vec![BigInt::one()], |prev, m| {
        let mut row = vec![BigInt::zero(); m + 1];
        for k in 1..=m {
            let mut v = prev[k - 1].clone();
            if k < prev.len() {
                v += BigInt::from(k) * &prev[k];
            }
            row[k] = v;
        }
        row
    })
}

fn eulerian_row(n: usize) -> Vec<BigInt> {
    static CELL: OnceLock<Triangle> = OnceLock::new();
    // A(n,k) = (k+1) A(n-1,k) + (n-k) A(n-1,k-1), with A(0,0) = 1
    grow_triangle(&CELL, n, vec![BigInt::one()], |prev, m| {
        let mut row = vec![BigInt::zero(); m.max(1)];
        for (k, slot) in row.iter_mut().enumerate() {
            let mut v = BigInt::zero();
            if k < prev.len() {
                v += BigInt::from(k + 1) * &prev[k];
            }
            if k >= 1 && k - 1 < prev.len() {
                v += BigInt::from(m - k) * &prev[k - 1];
            }
            *slot = v;
        }
        row
    })
}

/// Signed Stirling number of the first kind: coefficient of `x^k` in `(x)_n`.
pub fn stirling_first(n: usize, k: i64) -> BigInt {
    if k < 0 || k as usize > n {
        return BigInt::zero();
    }
    stirling_first_row(n)[k as usize].clone()
}

/// Stirling number of the second kind `S(n,k)`.
pub fn stirling_second(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    stirling_second_row(n)[k].clone()
}

/// Eulerian number `A(n,k)`: permutations of `1..n` with exactly `k` descents.
/// `A(0,0) = 1` is used for the empty permutation.
pub fn eulerian(n: usize, k: usize) -> BigInt {
    eulerian_row(n).get(k).cloned().unwrap_or_else(BigInt::zero)
}

/// Eulerian polynomial `A_n(x) = Σ_k A(n,k) x^k` as a coefficient list.
pub fn eulerian_polynomial(n: usize) -> Vec<BigInt> {
    eulerian_row(n)
}

pub fn binomial(n: i64, k: i64) -> BigInt {
    if k < 0 || n < 0 || k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Generalized binomial `C(x, k)` for rational `x`.
pub fn binomial_rational(x: &BigRational, k: usize) -> BigRational {
    let mut acc = BigRational::one();
    for i in 0..k {
        acc = acc * (x - BigRational::from_integer(BigInt::from(i)))
            / BigRational::from_integer(BigInt::from(i + 1));
    }
    acc
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Falling factorial `(x)_k = x(x-1)...(x-k+1)` for integer `x`.
pub fn falling_factorial(x: i64, k: usize) -> BigInt {
    (0..k as i64).fold(BigInt::one(), |acc, i| acc * BigInt::from(x - i))
}

/// Ordered tuple of distinct positive integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexTuple(Vec<u32>);

impl IndexTuple {
    pub fn new(entries: Vec<u32>) -> Result<Self> {
        let mut seen = entries.clone();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput(format!(
                "index tuple entries must be distinct: {entries:?}"
            )));
        }
        if seen.first() == Some(&0) {
            return Err(Error::InvalidInput("index tuple entries must be positive".into()));
        }
        Ok(IndexTuple(entries))
    }

    pub fn empty() -> Self {
        IndexTuple(Vec::new())
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for IndexTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Maximal partition of a tuple into strictly increasing consecutive runs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunPartition {
    pub runs: Vec<IndexTuple>,
}

/// Polynomial in `w = q^k/(1-q^k)` with integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WPolynomial {
    pub coefficients: BTreeMap<u32, BigInt>,
}

impl WPolynomial {
    pub fn one() -> Self {
        let mut coefficients = BTreeMap::new();
        coefficients.insert(0, BigInt::one());
        WPolynomial { coefficients }
    }

    pub fn add_term(&mut self, exp: u32, c: BigInt) {
        let slot = self.coefficients.entry(exp).or_insert_with(BigInt::zero);
        *slot += c;
        if slot.is_zero() {
            self.coefficients.remove(&exp);
        }
    }

    pub fn mul(&self, other: &WPolynomial) -> WPolynomial {
        let mut out = WPolynomial::default();
        for (ea, ca) in &self.coefficients {
            for (eb, cb) in &other.coefficients {
                out.add_term(ea + eb, ca * cb);
            }
        }
        out
    }

    pub fn coeff(&self, exp: u32) -> BigInt {
        self.coefficients.get(&exp).cloned().unwrap_or_else(BigInt::zero)
    }
}

impl fmt::Display for WPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coefficients.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coefficients
            .iter()
            .rev()
            .map(|(e, c)| match e {
                0 => c.to_string(),
                1 => format!("{c}*w"),
                _ => format!("{c}*w^{e}"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Number of positions `j` with `u_{j+1} < u_j`.
pub fn descent_count(u: &IndexTuple) -> usize {
    u.0.windows(2).filter(|w| w[1] < w[0]).count()
}

pub fn increasing_runs(u: &IndexTuple) -> RunPartition {
    let mut runs = Vec::new();
    let mut current: Vec<u32> = Vec::new();
    for &x in &u.0 {
        if let Some(&last) = current.last() {
            if x < last {
                runs.push(IndexTuple(std::mem::take(&mut current)));
            }
        }
        current.push(x);
    }
    if !current.is_empty() {
        runs.push(IndexTuple(current));
    }
    RunPartition { runs }
}

/// `C_u = Σ_i C(u-des-1, i) w^{i+des+1}`, with `C_∅ = 1`.
pub fn c_polynomial(u: &IndexTuple) -> WPolynomial {
    if u.is_empty() {
        return WPolynomial::one();
    }
    let len = u.len() as i64;
    let des = descent_count(u) as i64;
    let mut out = WPolynomial::default();
    for i in 0..=(len - des - 1) {
        out.add_term((i + des + 1) as u32, binomial(len - des - 1, i));
    }
    out
}

/// `Σ_i C(u-des-1, i) s(i+des+1, t) / (i+des+1)!`, the rational weight of
/// `(2πi)^{u-t} g^t_{m+1}` for a block of length `u` with `des` descents.
pub fn recursion_coefficient(u: usize, des: usize, t: usize) -> BigRational {
    let mut acc = BigRational::zero();
    if u == 0 || des >= u {
        return acc;
    }
    let top = u - des - 1;
    for i in 0..=top {
        let n = i + des + 1;
        acc += BigRational::new(
            binomial(top as i64, i as i64) * stirling_first(n, t as i64),
            factorial(n),
        );
    }
    acc
}

/// `Σ_D A(u,D) Σ_i C(u-D-1,i) s(i+D+1,t)/(i+D+1)!`; equals `δ_{u,t}`.
pub fn identity_comm_lhs(u: usize, t: usize) -> BigRational {
    (0..u).fold(BigRational::zero(), |acc, d| {
        acc + BigRational::from_integer(eulerian(u, d)) * recursion_coefficient(u, d, t)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(v: &[u32]) -> IndexTuple {
        IndexTuple::new(v.to_vec()).unwrap()
    }

    fn falling_coeffs(n: usize) -> Vec<BigInt> {
        let mut poly = vec![BigInt::one()];
        for i in 0..n {
            let mut next = vec![BigInt::zero(); poly.len() + 1];
            for (k, c) in poly.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= BigInt::from(i) * c;
            }
            poly = next;
        }
        poly
    }

    fn set_partitions_count(n: usize, k: usize) -> usize {
        fn go(i: usize, n: usize, blocks: usize, k: usize) -> usize {
            if i == n {
                return usize::from(blocks == k);
            }
            let mut total = blocks * go(i + 1, n, blocks, k);
            if blocks < k {
                total += go(i + 1, n, blocks + 1, k);
            }
            total
        }
        go(0, n, 0, k)
    }

    fn permutations(n: usize) -> Vec<Vec<u32>> {
        fn rec(cur: &mut Vec<u32>, left: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if left.is_empty() {
                out.push(cur.clone());
                return;
            }
            for i in 0..left.len() {
                let x = left.remove(i);
                cur.push(x);
                rec(cur, left, out);
                cur.pop();
                left.insert(i, x);
            }
        }
        let mut out = Vec::new();
        rec(&mut Vec::new(), &mut (1..=n as u32).collect(), &mut out);
        out
    }

    #[test]
    fn stirling_first_examples() {
        assert_eq!(stirling_first(0, 0), BigInt::one());
        assert_eq!(stirling_first(3, 2), BigInt::from(-3));
        assert_eq!(stirling_first(4, -1), BigInt::zero());
        for n in 0..9 {
            let poly = falling_coeffs(n);
            for (k, c) in poly.iter().enumerate() {
                assert_eq!(&stirling_first(n, k as i64), c);
            }
        }
    }

    #[test]
    fn stirling_second_examples() {
        assert_eq!(stirling_second(0, 0), BigInt::one());
        assert_eq!(stirling_second(3, 2), BigInt::from(3));
        assert_eq!(stirling_second(2, 5), BigInt::zero());
        for n in 0..8 {
            for k in 0..=n {
                assert_eq!(stirling_second(n, k), BigInt::from(set_partitions_count(n, k)));
            }
        }
    }

    #[test]
    fn eulerian_matches_enumeration() {
        assert_eq!(eulerian(1, 0), BigInt::one());
        assert_eq!(eulerian(3, 1), BigInt::from(4));
        assert_eq!(eulerian(3, 3), BigInt::zero());
        for n in 1..=7 {
            let mut counts = vec![0usize; n];
            for p in permutations(n) {
                counts[descent_count(&t(&p))] += 1;
            }
            for (k, c) in counts.iter().enumerate() {
                assert_eq!(eulerian(n, k), BigInt::from(*c));
            }
        }
    }

    #[test]
    fn stirling_inverse_and_eulerian_relation() {
        for n in 0..=12usize {
            for k in 0..=n {
                let sum: BigInt = (k..=n)
                    .map(|j| stirling_second(n, j) * stirling_first(j, k as i64))
                    .sum();
                assert_eq!(sum, BigInt::from(u8::from(n == k)));
            }
        }
        for n in 1..=10usize {
            for k in 1..=n {
                let sum: BigInt = (0..k)
                    .map(|j| eulerian(n, j) * binomial((n - j - 1) as i64, (k - j - 1) as i64))
                    .sum();
                assert_eq!(BigRational::new(sum, factorial(k)), BigRational::from_integer(stirling_second(n, k)));
            }
        }
    }

    #[test]
    fn second_kind_recurrences() {
        for n in 1..=12usize {
            for k in 1..=n {
                let rhs = BigInt::from(k) * stirling_second(n - 1, k) + stirling_second(n - 1, k - 1);
                assert_eq!(stirling_second(n, k), rhs);
            }
        }
        for n in 0..12usize {
            for k in 0..=n {
                let rhs: BigInt = (k..=n)
                    .map(|j| binomial(n as i64, j as i64) * stirling_second(j, k))
                    .sum();
                assert_eq!(stirling_second(n + 1, k + 1), rhs);
            }
        }
    }

    #[test]
    fn descents_and_runs() {
        assert_eq!(descent_count(&t(&[2, 3, 1, 4])), 1);
        assert_eq!(descent_count(&IndexTuple::empty()), 0);
        assert_eq!(descent_count(&t(&[3, 2, 1])), 2);
        assert_eq!(
            increasing_runs(&t(&[2, 3, 1, 4])).runs,
            vec![t(&[2, 3]), t(&[1, 4])]
        );
        assert_eq!(increasing_runs(&t(&[1, 2, 3])).runs, vec![t(&[1, 2, 3])]);
        assert_eq!(
            increasing_runs(&t(&[3, 2, 1])).runs,
            vec![t(&[3]), t(&[2]), t(&[1])]
        );
        assert!(IndexTuple::new(vec![1, 1]).is_err());
    }

    #[test]
    fn c_polynomial_examples() {
        let c = c_polynomial(&t(&[2, 3, 1, 4]));
        assert_eq!(c.to_string(), "1*w^4 + 2*w^3 + 1*w^2");
        assert_eq!(c_polynomial(&IndexTuple::empty()), WPolynomial::one());
        for n in 1..6u32 {
            let c = c_polynomial(&t(&(1..=n).collect::<Vec<_>>()));
            for j in 0..n {
                assert_eq!(c.coeff(j + 1), binomial(n as i64 - 1, j as i64));
            }
        }
    }

    #[test]
    fn identity_comm_is_delta() {
        assert_eq!(identity_comm_lhs(2, 2), BigRational::one());
        assert_eq!(identity_comm_lhs(2, 1), BigRational::zero());
        assert_eq!(identity_comm_lhs(5, 3), BigRational::zero());
        assert_eq!(recursion_coefficient(1, 0, 1), BigRational::one());
        // (2,0,2): i=0 gives C(1,0)s(1,2)/1! = 0; i=1 gives C(1,1)s(2,2)/2! = 1/2
        assert_eq!(recursion_coefficient(2, 0, 2), BigRational::new(1.into(), 2.into()));
        for u in 1..=8 {
            for tt in 0..=u {
                let expect = if u == tt { BigRational::one() } else { BigRational::zero() };
                assert_eq!(identity_comm_lhs(u, tt), expect, "u={u} t={tt}");
            }
        }
    }

    fn brute_c(u: &[u32]) -> WPolynomial {
        let mut out = WPolynomial::default();
        if u.is_empty() {
            return WPolynomial::one();
        }
        let cuts = u.len() - 1;
        for mask in 0u32..(1 << cuts) {
            let mut pieces = 1;
            let mut ok = true;
            for j in 0..cuts {
                if mask & (1 << j) != 0 {
                    pieces += 1;
                } else if u[j + 1] < u[j] {
                    ok = false;
                }
            }
            if ok {
                out.add_term(pieces, BigInt::one());
            }
        }
        out
    }

    fn run_product(u: &IndexTuple) -> WPolynomial {
        increasing_runs(u).runs.iter().fold(WPolynomial::one(), |acc, r| {
            let mut c = WPolynomial::default();
            for j in 0..r.len() {
                c.add_term(j as u32 + 1, binomial(r.len() as i64 - 1, j as i64));
            }
            acc.mul(&c)
        })
    }

    #[test]
    fn c_polynomial_matches_enumeration_all_perms() {
        for n in 0..=6 {
            for p in permutations(n) {
                let u = t(&p);
                assert_eq!(c_polynomial(&u), brute_c(&p));
                assert_eq!(c_polynomial(&u), run_product(&u));
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn c_polynomial_random_tuples(v in proptest::sample::subsequence((1u32..=12).collect::<Vec<_>>(), 0..=8), seed in 0u64..1000) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let mut v = v;
            v.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let u = IndexTuple::new(v.clone()).unwrap();
            proptest::prop_assert_eq!(c_polynomial(&u), brute_c(&v));
            proptest::prop_assert_eq!(c_polynomial(&u), run_product(&u));
            let runs = increasing_runs(&u);
            let flat: Vec<u32> = runs.runs.iter().flat_map(|r| r.entries().to_vec()).collect();
            proptest::prop_assert_eq!(flat, v.clone());
            if !v.is_empty() {
                proptest::prop_assert_eq!(runs.runs.len(), descent_count(&u) + 1);
            }
            for w in runs.runs.windows(2) {
                proptest::prop_assert!(w[0].entries().last() > w[1].entries().first());
            }
        }
    }
}
