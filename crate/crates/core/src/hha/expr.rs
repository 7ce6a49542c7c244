//! Correlator symbols and linear combinations of them with coefficients in the
//! elliptic polynomial ring.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::spec::{Basis, HHASpec, HHAState, IDENTITY};
use crate::elliptic::symbolic::Poly;
use crate::error::{Error, Result};
use crate::qseries::scalar::Graded;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Insertion {
    pub state: Basis,
    pub label: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrKind {
    ZeroMode,
    Full,
    Mixed,
}

/// `F(b_0^{s⃗}; (a^1, ζ_{j1}), …)`. Zero modes are generator indices; for the
/// commuting engine they are kept sorted, the ordered engine keeps them as given.
/// Insertions are sorted by label.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CorrSymbol {
    pub zero_modes: Vec<usize>,
    pub insertions: Vec<Insertion>,
}

impl CorrSymbol {
    /// `F(a_0^{s⃗})` with the zero modes sorted.
    pub fn zero_modes(mut zm: Vec<usize>) -> Self {
        zm.sort_unstable();
        CorrSymbol { zero_modes: zm, insertions: Vec::new() }
    }

    /// Mixed symbol; zero modes keep their order, insertions are sorted by label.
    pub fn new(zero_modes: Vec<usize>, mut insertions: Vec<Insertion>) -> Result<Self> {
        insertions.sort_by_key(|i| i.label);
        if insertions.windows(2).any(|w| w[0].label == w[1].label) {
            return Err(Error::InvalidInput("insertion labels must be distinct".into()));
        }
        if insertions.iter().any(|i| i.label == 0) {
            return Err(Error::InvalidInput("label 0 is reserved for the origin".into()));
        }
        Ok(CorrSymbol { zero_modes, insertions })
    }

    /// Generator insertions `(gen, label)` and sorted zero modes.
    pub fn mixed(zero_modes: Vec<usize>, ins: &[(usize, u32)]) -> Result<Self> {
        let mut zm = zero_modes;
        zm.sort_unstable();
        CorrSymbol::new(zm, ins.iter().map(|&(g, l)| Insertion { state: Basis::generator(g), label: l }).collect())
    }

    pub fn kind(&self) -> CorrKind {
        match (self.zero_modes.is_empty(), self.insertions.is_empty()) {
            (_, true) => CorrKind::ZeroMode,
            (true, false) => CorrKind::Full,
            _ => CorrKind::Mixed,
        }
    }

    /// `Σ` insertion weights `+ Σ` zero-mode weights.
    pub fn weight(&self, spec: &HHASpec) -> BigRational {
        let zm: BigRational = self.zero_modes.iter().map(|g| spec.generators()[*g].weight.clone()).sum();
        let ins: BigRational = self.insertions.iter().map(|i| spec.basis_weight(&i.state)).sum();
        zm + ins
    }

    pub fn min_label(&self) -> Option<u32> {
        self.insertions.first().map(|i| i.label)
    }

    /// Drops identity zero modes and identity insertions; `None` if the symbol
    /// vanishes (an `L[-1]^k 1` insertion).
    pub fn canonical(&self) -> Option<CorrSymbol> {
        if self.insertions.iter().any(|i| i.state.vanishes()) {
            return None;
        }
        Some(CorrSymbol {
            zero_modes: self.zero_modes.iter().copied().filter(|g| *g != IDENTITY).collect(),
            insertions: self.insertions.iter().copied().filter(|i| i.state.gen != IDENTITY).collect(),
        })
    }

    /// [`canonical`](Self::canonical), then a single insertion becomes a zero
    /// mode (`F(R; (b,ζ)) = F(R b_0)`, zero for descendants) and zero modes are
    /// sorted.
    pub fn normalized(&self) -> Option<CorrSymbol> {
        let mut c = self.canonical()?;
        if c.insertions.len() == 1 {
            let b = c.insertions.pop().expect("one insertion").state;
            if b.k > 0 {
                return None;
            }
            c.zero_modes.push(b.gen);
        }
        c.zero_modes.sort_unstable();
        Some(c)
    }

    pub fn render(&self, spec: &HHASpec) -> String {
        let mut counts: Vec<(usize, usize)> = Vec::new();
        let mut parts = Vec::new();
        if self.zero_modes.windows(2).all(|w| w[0] <= w[1]) {
            for g in &self.zero_modes {
                match counts.last_mut() {
                    Some((h, c)) if h == g => *c += 1,
                    _ => counts.push((*g, 1)),
                }
            }
            parts.extend(counts.iter().map(|(g, c)| format!("{}0^{c}", spec.name(*g))));
        } else {
            parts.extend(self.zero_modes.iter().map(|g| format!("{}0", spec.name(*g))));
        }
        let zm = if parts.is_empty() { String::new() } else { parts.join(" ") };
        let ins: Vec<String> =
            self.insertions.iter().map(|i| format!("({},z{})", spec.render_basis(&i.state), i.label)).collect();
        match (zm.is_empty(), ins.is_empty()) {
            (true, true) => "F(1)".into(),
            (false, true) => format!("F({zm})"),
            (true, false) => format!("F({})", ins.join(", ")),
            (false, false) => format!("F({}; {})", zm, ins.join(", ")),
        }
    }
}

/// Parses `"x0^3"`, `"x0^2 y0"` or `"x0*x0"` into sorted zero modes.
pub fn parse_zero_modes(spec: &HHASpec, text: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for tok in text.split(|c: char| c.is_whitespace() || c == '*').filter(|t| !t.is_empty()) {
        let (base, pow) = match tok.split_once('^') {
            Some((b, p)) => (b, p.parse::<usize>().map_err(|_| Error::Parse(format!("bad exponent in {tok:?}")))?),
            None => (tok, 1),
        };
        let name = base
            .strip_suffix('0')
            .filter(|n| !n.is_empty())
            .ok_or_else(|| Error::Parse(format!("expected a zero mode like x0^2, got {tok:?}")))?;
        let g = spec.generator_index(name).ok_or_else(|| Error::Parse(format!("unknown generator {name:?}")))?;
        if g != IDENTITY {
            out.extend(std::iter::repeat(g).take(pow));
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// `Σ coeff · F(...)`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrExpression {
    terms: BTreeMap<CorrSymbol, Poly>,
}

impl CorrExpression {
    pub fn zero() -> Self {
        CorrExpression::default()
    }

    pub fn symbol(s: CorrSymbol) -> Self {
        let mut e = CorrExpression::zero();
        e.add_term(s, &Poly::one());
        e
    }

    pub fn add_term(&mut self, s: CorrSymbol, c: &Poly) {
        if c.is_zero() {
            return;
        }
        let next = match self.terms.remove(&s) {
            Some(old) => old.add(c),
            None => c.clone(),
        };
        if !next.is_zero() {
            self.terms.insert(s, next);
        }
    }

    /// Adds `c · F(...)` with `F` replaced by its canonical form.
    pub fn add_canonical(&mut self, s: &CorrSymbol, c: &Poly) {
        if let Some(s) = s.canonical() {
            self.add_term(s, c);
        }
    }

    /// Adds `c · F(R; …, state at position idx, …)`, expanded over the basis terms.
    pub fn add_with_state(&mut self, zero_modes: &[usize], ins: &[Insertion], idx: usize, state: &HHAState, c: &Poly) {
        for (b, x) in state.terms() {
            let mut ins2 = ins.to_vec();
            ins2[idx].state = *b;
            let sym = CorrSymbol { zero_modes: zero_modes.to_vec(), insertions: ins2 };
            self.add_canonical(&sym, &c.scale(x));
        }
    }

    pub fn add(&self, other: &CorrExpression) -> CorrExpression {
        let mut out = self.clone();
        for (s, c) in &other.terms {
            out.add_term(s.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &CorrExpression) -> CorrExpression {
        self.add(&other.scale(&Graded::int(-1)))
    }

    pub fn scale(&self, c: &Graded) -> CorrExpression {
        self.mul_poly(&Poly::constant(c.clone()))
    }

    pub fn mul_poly(&self, p: &Poly) -> CorrExpression {
        let mut out = CorrExpression::zero();
        for (s, c) in &self.terms {
            out.add_term(s.clone(), &c.mul(p));
        }
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (&CorrSymbol, &Poly)> {
        self.terms.iter()
    }

    pub fn coeff(&self, s: &CorrSymbol) -> Poly {
        self.terms.get(s).cloned().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn map_coeffs(&self, f: impl Fn(&Poly) -> Result<Poly>) -> Result<CorrExpression> {
        let mut out = CorrExpression::zero();
        for (s, c) in &self.terms {
            out.add_term(s.clone(), &f(c)?);
        }
        Ok(out)
    }

    /// Every symbol replaced by [`CorrSymbol::normalized`].
    pub fn normalized(&self) -> CorrExpression {
        let mut out = CorrExpression::zero();
        for (s, c) in &self.terms {
            if let Some(n) = s.normalized() {
                out.add_term(n, c);
            }
        }
        out
    }

    /// Zero modes sorted (identification of ordered tuples under commuting zero modes).
    pub fn identified(&self) -> CorrExpression {
        let mut out = CorrExpression::zero();
        for (s, c) in &self.terms {
            let mut t = s.clone();
            t.zero_modes.sort_unstable();
            out.add_term(t, c);
        }
        out
    }

    pub fn max_insertions(&self) -> usize {
        self.terms.keys().map(|s| s.insertions.len()).max().unwrap_or(0)
    }

    pub fn render(&self, spec: &HHASpec) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        self.terms.iter().map(|(s, c)| format!("[{c}]·{}", s.render(spec))).collect::<Vec<_>>().join(" + ")
    }

    /// `[[coefficient, symbol], ...]` in symbol order.
    pub fn to_json(&self, spec: &HHASpec) -> serde_json::Value {
        serde_json::Value::Array(
            self.terms
                .iter()
                .map(|(s, c)| serde_json::json!([c.to_string(), s.render(spec)]))
                .collect(),
        )
    }
}

/// `(c/(2πi(cτ+d)))^k = B^k/(2πi)^{2k}`: rewrites a `B^k`-coefficient `r·(2πi)^{-2k}`
/// as the rational `r`, if it has that form.
pub fn in_b_units(c: &Graded, k: u32) -> Option<BigRational> {
    let shifted = c.shift_tpi(2 * k as i32);
    shifted.as_rational().or_else(|| shifted.is_zero().then(BigRational::zero))
}
