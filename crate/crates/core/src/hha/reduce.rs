//! The zero-mode recursion: forward reduction to zero-mode correlators and its
//! unit-triangular inverse.

use std::collections::HashMap;

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;

use super::expr::{CorrExpression, CorrSymbol, Insertion};
use super::spec::{Basis, HHASpec, HHAState};
use crate::combinatorics::{binomial, recursion_coefficient};
use crate::elliptic::symbolic::Poly;
use crate::error::{Error, Result};
use crate::qseries::scalar::Graded;

/// One elimination of the lowest-label insertion:
/// `F = head + tails - πi · residual`.
#[derive(Debug, Clone)]
pub struct Step {
    pub head: Option<CorrSymbol>,
    pub tails: CorrExpression,
    /// Coefficient of `-πi` from `P_1 = P̃_1 - πi`: `Σ_j F(…, a^1[0]a^j, …)`.
    pub residual: CorrExpression,
}

/// Sub-multisets `S` of a sorted multiset, with the remainder and the number
/// of index subsets that realize `S`.
fn sub_multisets(zm: &[usize]) -> Vec<(Vec<usize>, Vec<usize>, BigInt)> {
    let groups: Vec<(usize, usize)> = zm.iter().dedup_with_count().map(|(c, g)| (*g, c)).collect();
    let mut out = vec![(Vec::new(), Vec::new(), BigInt::from(1))];
    for (g, c) in groups {
        let mut next = Vec::new();
        for (s, rest, mult) in &out {
            for k in 0..=c {
                let mut s2 = s.clone();
                s2.extend(std::iter::repeat(g).take(k));
                let mut r2 = rest.clone();
                r2.extend(std::iter::repeat(g).take(c - k));
                next.push((s2, r2, mult * binomial(c as i64, k as i64)));
            }
        }
        out = next;
    }
    out
}

fn split_first(sym: &CorrSymbol) -> Result<(Insertion, &[Insertion])> {
    sym.insertions
        .split_first()
        .map(|(f, r)| (*f, r))
        .ok_or_else(|| Error::InvalidInput("no insertion to eliminate".into()))
}

fn head_symbol(sym: &CorrSymbol, first: &Insertion, rest: &[Insertion], prepend: bool) -> Option<CorrSymbol> {
    // o(L[-1]b) = 0
    if first.state.k > 0 {
        return None;
    }
    let mut zm = sym.zero_modes.clone();
    if prepend {
        zm.insert(0, first.state.gen);
    } else {
        zm.push(first.state.gen);
        zm.sort_unstable();
    }
    CorrSymbol { zero_modes: zm, insertions: rest.to_vec() }.canonical()
}

/// Commuting recursion step on one symbol.
pub fn step(spec: &HHASpec, sym: &CorrSymbol) -> Result<Step> {
    if !spec.is_commuting() {
        return Err(Error::NonCommuting);
    }
    let (first, rest) = split_first(sym)?;
    let head = head_symbol(sym, &first, rest, false);
    let a1 = HHAState::basis(first.state);
    let mut tails = CorrExpression::zero();
    let mut residual = CorrExpression::zero();
    let subs = sub_multisets(&sym.zero_modes);
    for (j, ins) in rest.iter().enumerate() {
        let target = HHAState::basis(ins.state);
        for (s, remaining, mult) in &subs {
            let d = spec.d_state(s, &a1)?;
            if d.is_zero() {
                continue;
            }
            let Some(bound) = spec.mode_bound(&d, &target)? else { continue };
            let mult = Graded::rational(BigRational::from_integer(mult.clone()));
            for m in 0..=bound {
                let c = spec.square_action(&d, m, &target)?;
                if c.is_zero() {
                    continue;
                }
                let coef = if s.is_empty() && m == 0 {
                    residual.add_with_state(remaining, rest, j, &c, &Poly::constant(mult.clone()));
                    Poly::p_tilde_1(ins.label, first.label)
                } else {
                    Poly::g(s.len() as u32, m + 1, ins.label, first.label)
                };
                tails.add_with_state(remaining, rest, j, &c, &coef.scale(&mult));
            }
        }
    }
    Ok(Step { head, tails, residual })
}

/// General (ordered) recursion step. Zero modes are an ordered tuple; the
/// `d`-states use the `m = 0` products of the table as commutator data.
pub fn ordered_step(spec: &HHASpec, sym: &CorrSymbol) -> Result<Step> {
    let (first, rest) = split_first(sym)?;
    let head = head_symbol(sym, &first, rest, true);
    let a1 = HHAState::basis(first.state);
    let r = sym.zero_modes.len();
    let mut tails = CorrExpression::zero();
    let mut residual = CorrExpression::zero();
    let missing = |e: Error| match e {
        Error::Closure(m) => Error::MissingCommutator(m),
        e => e,
    };
    for (j, ins) in rest.iter().enumerate() {
        let target = HHAState::basis(ins.state);
        // g^0 layer: all zero modes stay
        if let Some(bound) = spec.mode_bound(&a1, &target).map_err(missing)? {
            for m in 0..=bound {
                let c = spec.square_action(&a1, m, &target).map_err(missing)?;
                if c.is_zero() {
                    continue;
                }
                let coef = if m == 0 && spec.is_commuting() {
                    residual.add_with_state(&sym.zero_modes, rest, j, &c, &Poly::one());
                    Poly::p_tilde_1(ins.label, first.label)
                } else {
                    Poly::g(0, m + 1, ins.label, first.label)
                };
                tails.add_with_state(&sym.zero_modes, rest, j, &c, &coef);
            }
        }
        for mask in 0u32..(1u32 << r) - 1 {
            let kept: Vec<usize> = (0..r).filter(|p| mask & (1 << p) != 0).map(|p| sym.zero_modes[p]).collect();
            let comp: Vec<usize> = (0..r).filter(|p| mask & (1 << p) == 0).collect();
            let u = comp.len();
            for perm in comp.iter().copied().permutations(u) {
                let des = perm.windows(2).filter(|w| w[1] < w[0]).count();
                let gens: Vec<usize> = perm.iter().map(|p| sym.zero_modes[*p]).collect();
                let d = spec.d_state(&gens, &a1).map_err(missing)?;
                if d.is_zero() {
                    continue;
                }
                let Some(bound) = spec.mode_bound(&d, &target).map_err(missing)? else { continue };
                for m in 0..=bound {
                    let c = spec.square_action(&d, m, &target).map_err(missing)?;
                    if c.is_zero() {
                        continue;
                    }
                    for t in 1..=u {
                        let rc = recursion_coefficient(u, des, t);
                        if rc == BigRational::from_integer(0.into()) {
                            continue;
                        }
                        let coef = Poly::g(t as u32, m + 1, ins.label, first.label)
                            .scale(&Graded::term(rc, (u - t) as i32));
                        tails.add_with_state(&kept, rest, j, &c, &coef);
                    }
                }
            }
        }
    }
    Ok(Step { head, tails, residual })
}

fn assemble(step: &Step) -> CorrExpression {
    let mut out = step.tails.clone();
    if let Some(h) = &step.head {
        out.add_term(h.clone(), &Poly::one());
    }
    out
}

/// Reduction engine with memoized per-symbol results.
pub struct Reducer<'a> {
    spec: &'a HHASpec,
    memo: HashMap<CorrSymbol, CorrExpression>,
}

impl<'a> Reducer<'a> {
    pub fn new(spec: &'a HHASpec) -> Self {
        Reducer { spec, memo: HashMap::new() }
    }

    /// [`step`] with the `πi` residual verified to reduce to zero.
    pub fn checked_step(&mut self, sym: &CorrSymbol) -> Result<Step> {
        let st = step(self.spec, sym)?;
        self.check_residual(sym, &st)?;
        Ok(st)
    }

    fn check_residual(&mut self, sym: &CorrSymbol, st: &Step) -> Result<()> {
        if st.residual.is_zero() {
            return Ok(());
        }
        let r = self.reduce_expr(&st.residual)?;
        if !r.is_zero() {
            return Err(Error::A0Cancellation(format!(
                "eliminating the first insertion of {} leaves {}",
                sym.render(self.spec),
                r.render(self.spec)
            )));
        }
        Ok(())
    }

    pub fn reduce_symbol(&mut self, sym: &CorrSymbol) -> Result<CorrExpression> {
        let Some(sym) = sym.canonical() else { return Ok(CorrExpression::zero()) };
        if sym.insertions.is_empty() {
            let mut s = sym;
            s.zero_modes.sort_unstable();
            return Ok(CorrExpression::symbol(s));
        }
        if let Some(done) = self.memo.get(&sym) {
            return Ok(done.clone());
        }
        let st = self.checked_step(&sym)?;
        let n = sym.insertions.len();
        let mut out = CorrExpression::zero();
        for (t, c) in assemble(&st).terms() {
            if t.insertions.len() >= n {
                return Err(Error::NonTermination(format!("{} did not lose an insertion", t.render(self.spec))));
            }
            out = out.add(&self.reduce_symbol(t)?.mul_poly(c));
        }
        self.memo.insert(sym, out.clone());
        Ok(out)
    }

    pub fn reduce_expr(&mut self, e: &CorrExpression) -> Result<CorrExpression> {
        let mut out = CorrExpression::zero();
        for (s, c) in e.terms() {
            out = out.add(&self.reduce_symbol(s)?.mul_poly(c));
        }
        Ok(out)
    }
}

/// One commuting recursion step on every term with an insertion.
pub fn reduce_once(spec: &HHASpec, expr: &CorrExpression) -> Result<CorrExpression> {
    let mut red = Reducer::new(spec);
    let mut out = CorrExpression::zero();
    for (s, c) in expr.terms() {
        let Some(s) = s.canonical() else { continue };
        if s.insertions.is_empty() {
            out.add_term(s, c);
            continue;
        }
        let st = red.checked_step(&s)?;
        out = out.add(&assemble(&st).mul_poly(c));
    }
    Ok(out)
}

/// One step of the general recursion (ordered zero modes).
pub fn reduce_once_ordered(spec: &HHASpec, expr: &CorrExpression) -> Result<CorrExpression> {
    let mut red = Reducer::new(spec);
    let mut out = CorrExpression::zero();
    for (s, c) in expr.terms() {
        let Some(s) = s.canonical() else { continue };
        if s.insertions.is_empty() {
            out.add_term(s, c);
            continue;
        }
        let st = ordered_step(spec, &s)?;
        if spec.is_commuting() {
            red.check_residual(&s, &st)?;
        }
        out = out.add(&assemble(&st).mul_poly(c));
    }
    Ok(out)
}

/// Iterates the recursion until only zero-mode correlators remain.
pub fn reduce_to_zero_modes(spec: &HHASpec, expr: &CorrExpression) -> Result<CorrExpression> {
    Reducer::new(spec).reduce_expr(expr)
}

/// Inverse of one recursion step: the last zero mode `b^p` of `sym` becomes an
/// insertion at `label`, `F(R; ins) = F(R-p; (b^p, label), ins) - tails`.
pub fn peel_once(spec: &HHASpec, sym: &CorrSymbol, label: u32) -> Result<CorrExpression> {
    let mut red = Reducer::new(spec);
    let (fwd, st) = peel_parts(&mut red, sym, label)?;
    Ok(CorrExpression::symbol(fwd).sub(&st.tails))
}

fn peel_parts(red: &mut Reducer<'_>, sym: &CorrSymbol, label: u32) -> Result<(CorrSymbol, Step)> {
    let Some((&p, rest)) = sym.zero_modes.split_last() else {
        return Err(Error::InvalidInput("no zero mode to peel".into()));
    };
    if label == 0 || sym.min_label().is_some_and(|l| label >= l) {
        return Err(Error::InvalidInput(format!("peel label {label} must be positive and below all insertion labels")));
    }
    let mut ins = vec![Insertion { state: Basis::generator(p), label }];
    ins.extend(sym.insertions.iter().copied());
    let fwd = CorrSymbol { zero_modes: rest.to_vec(), insertions: ins };
    let st = red.checked_step(&fwd)?;
    Ok((fwd, st))
}

struct Inverter<'a, 'b> {
    red: &'b mut Reducer<'a>,
    labels: Vec<u32>,
    memo: HashMap<CorrSymbol, CorrExpression>,
}

impl Inverter<'_, '_> {
    fn invert(&mut self, sym: &CorrSymbol) -> Result<CorrExpression> {
        if sym.zero_modes.is_empty() {
            return Ok(CorrExpression::symbol(sym.clone()));
        }
        if let Some(done) = self.memo.get(sym) {
            return Ok(done.clone());
        }
        let r = sym.zero_modes.len();
        let label = *self
            .labels
            .get(r - 1)
            .ok_or_else(|| Error::InvalidInput(format!("no position supplied for {r} zero modes")))?;
        let (fwd, st) = peel_parts(self.red, sym, label)?;
        let mut out = self.invert(&fwd)?;
        for (t, c) in st.tails.terms() {
            out = out.sub(&self.invert(t)?.mul_poly(c));
        }
        self.memo.insert(sym.clone(), out.clone());
        Ok(out)
    }
}

/// `F(a_0^{s⃗}; ins)` as full correlators with coefficients in the `g`-algebra.
///
/// `positions[i]` is the label given to the zero mode peeled when `s - i`
/// zero modes remain; labels must decrease and stay below the insertion labels.
pub fn invert_to_full(spec: &HHASpec, target: &CorrSymbol, positions: &[u32]) -> Result<CorrExpression> {
    let s = target.zero_modes.len();
    if positions.len() != s {
        return Err(Error::InvalidInput(format!("expected {s} positions, got {}", positions.len())));
    }
    if positions.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidInput("positions must be strictly decreasing".into()));
    }
    let Some(mut t) = target.canonical() else { return Ok(CorrExpression::zero()) };
    t.zero_modes.sort_unstable();
    let mut red = Reducer::new(spec);
    // labels[r-1] is used when r zero modes remain
    let labels: Vec<u32> = positions.iter().rev().copied().collect();
    let mut inv = Inverter { red: &mut red, labels, memo: HashMap::new() };
    Ok(inv.invert(&t)?.normalized())
}

/// `[s, s-1, …, 1]`.
pub fn default_positions(s: usize) -> Vec<u32> {
    (1..=s as u32).rev().collect()
}
