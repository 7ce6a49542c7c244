//! Closed form for the weight-one HHA: configuration sums over pairings.

use num_rational::BigRational;

use super::expr::{CorrExpression, CorrSymbol, Insertion};
use super::spec::Basis;
use crate::elliptic::symbolic::Poly;
use crate::qseries::scalar::Graded;

/// Perfect and partial matchings of `items` in which every pair satisfies `ok`.
/// Each entry is `(pairs, unpaired)`.
pub fn partial_matchings(items: &[u32], ok: &dyn Fn(u32, u32) -> bool) -> Vec<(Vec<(u32, u32)>, Vec<u32>)> {
    let Some((&first, rest)) = items.split_first() else {
        return vec![(Vec::new(), Vec::new())];
    };
    let mut out = Vec::new();
    for (mut pairs, mut unpaired) in partial_matchings(rest, ok) {
        unpaired.insert(0, first);
        pairs.sort_unstable();
        out.push((pairs, unpaired));
    }
    for (i, &other) in rest.iter().enumerate() {
        if !ok(first, other) {
            continue;
        }
        let mut remaining = rest.to_vec();
        remaining.remove(i);
        for (mut pairs, unpaired) in partial_matchings(&remaining, ok) {
            pairs.push((first, other));
            pairs.sort_unstable();
            out.push((pairs, unpaired));
        }
    }
    out
}

/// `F(a_0^s; (a,ζ_{s+1}), …, (a,ζ_{s+n}))` as full correlators: the zero modes sit
/// at labels `1..=s`, and the sum runs over configurations of pairs containing at
/// least one zero index, each pair contributing `-norm·P_2(ζ_{p1}-ζ_{p2})/(2πi)²`.
/// Unpaired indices stay as insertions of `a` (generator `gen`).
pub fn weight1_configuration_formula(gen: usize, n: usize, s: usize, norm: &BigRational) -> CorrExpression {
    let labels: Vec<u32> = (1..=(s + n) as u32).collect();
    let s32 = s as u32;
    let pair_coeff = Graded::term(-norm.clone(), -2);
    let mut out = CorrExpression::zero();
    for (pairs, unpaired) in partial_matchings(&labels, &|a, b| a <= s32 || b <= s32) {
        let mut c = Poly::one();
        for (a, b) in &pairs {
            c = c.mul(&Poly::p(2, *b, *a).scale(&pair_coeff));
        }
        let ins = unpaired.iter().map(|&l| Insertion { state: Basis::generator(gen), label: l }).collect();
        let sym = CorrSymbol { zero_modes: Vec::new(), insertions: ins };
        if let Some(n) = sym.normalized() {
            out.add_term(n, &c);
        }
    }
    out
}

/// Number of configurations entering [`weight1_configuration_formula`].
pub fn configuration_count(n: usize, s: usize) -> usize {
    let labels: Vec<u32> = (1..=(s + n) as u32).collect();
    let s32 = s as u32;
    partial_matchings(&labels, &|a, b| a <= s32 || b <= s32).len()
}
