//! HHA specifications, states in `span{L[-1]^k a^l}` and the square-bracket
//! product on them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::combinatorics::{binomial, factorial, falling_factorial};
use crate::error::{Error, Result};
use crate::qseries::scalar::{format_rational, int, parse_rational, Graded};

/// Index of the identity generator `1`.
pub const IDENTITY: usize = 0;

/// `L[-1]^k a^gen`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Basis {
    pub k: u32,
    pub gen: usize,
}

impl Basis {
    pub fn new(k: u32, gen: usize) -> Self {
        Basis { k, gen }
    }

    pub fn generator(gen: usize) -> Self {
        Basis { k: 0, gen }
    }

    /// `L[-1]^k 1 = 0` for `k ≥ 1`.
    pub fn vanishes(&self) -> bool {
        self.gen == IDENTITY && self.k > 0
    }
}

/// Finite linear combination of [`Basis`] states.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HHAState(BTreeMap<Basis, Graded>);

impl HHAState {
    pub fn zero() -> Self {
        HHAState::default()
    }

    pub fn basis(b: Basis) -> Self {
        let mut s = HHAState::zero();
        s.add_term(b, &Graded::one());
        s
    }

    pub fn generator(gen: usize) -> Self {
        HHAState::basis(Basis::generator(gen))
    }

    pub fn add_term(&mut self, b: Basis, c: &Graded) {
        if b.vanishes() || c.is_zero() {
            return;
        }
        let next = self.0.get(&b).cloned().unwrap_or_default() + c.clone();
        if next.is_zero() {
            self.0.remove(&b);
        } else {
            self.0.insert(b, next);
        }
    }

    pub fn add(&self, other: &HHAState) -> HHAState {
        let mut out = self.clone();
        for (b, c) in &other.0 {
            out.add_term(*b, c);
        }
        out
    }

    pub fn scale(&self, c: &Graded) -> HHAState {
        let mut out = HHAState::zero();
        for (b, x) in &self.0 {
            out.add_term(*b, &(x * c));
        }
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Basis, &Graded)> {
        self.0.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// `L[-1]^n` applied to every term.
    pub fn lm1_pow(&self, n: u32) -> HHAState {
        let mut out = HHAState::zero();
        for (b, c) in &self.0 {
            out.add_term(Basis::new(b.k + n, b.gen), c);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub name: String,
    pub weight: BigRational,
}

/// A heavy Heisenberg algebra: generators (the first is always `1`) and the
/// products `a^i[m]a^j` for `m ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct HHASpec {
    generators: Vec<Generator>,
    table: BTreeMap<(usize, usize), BTreeMap<u32, HHAState>>,
    commuting: bool,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum GenRef {
    Index(usize),
    Name(String),
}

#[derive(Deserialize)]
struct RawGenerator {
    name: String,
    weight: serde_json::Value,
}

#[derive(Deserialize)]
struct RawOut {
    coeff: serde_json::Value,
    #[serde(default)]
    tpi: i32,
    gen: GenRef,
    #[serde(default)]
    dpow: u32,
}

#[derive(Deserialize)]
struct RawEntry {
    i: GenRef,
    j: GenRef,
    m: u32,
    #[serde(default)]
    out: Vec<RawOut>,
}

#[derive(Deserialize)]
struct RawSpec {
    generators: Vec<RawGenerator>,
    structure: Vec<RawEntry>,
    #[serde(default = "yes")]
    commuting: bool,
}

fn yes() -> bool {
    true
}

fn json_rational(v: &serde_json::Value) -> Result<BigRational> {
    match v {
        serde_json::Value::String(s) => parse_rational(s),
        serde_json::Value::Number(n) => parse_rational(&n.to_string()),
        _ => Err(Error::Parse(format!("expected a rational, got {v}"))),
    }
}

/// One structure-table output `coeff · L[-1]^dpow gen`.
#[derive(Debug, Clone)]
pub struct StructureOut {
    pub coeff: Graded,
    pub gen: usize,
    pub dpow: u32,
}

impl HHASpec {
    /// Builds a spec from generator `(name, weight)` pairs (without `1`) and
    /// entries `(i, j, m, outputs)` indexed into `1, generators...`.
    pub fn new(
        generators: Vec<(String, BigRational)>,
        entries: Vec<(usize, usize, u32, Vec<StructureOut>)>,
        commuting: bool,
    ) -> Result<Self> {
        let mut gens = vec![Generator { name: "1".into(), weight: BigRational::zero() }];
        for (name, weight) in generators {
            if gens.iter().any(|g| g.name == name) {
                return Err(Error::Parse(format!("duplicate generator {name}")));
            }
            gens.push(Generator { name, weight });
        }
        let n = gens.len();
        let mut table: BTreeMap<(usize, usize), BTreeMap<u32, HHAState>> = BTreeMap::new();
        for (i, j, m, outs) in entries {
            if i >= n || j >= n {
                return Err(Error::Closure(format!("entry ({i},{j},{m}) references an unknown generator")));
            }
            let mut st = HHAState::zero();
            for o in outs {
                if o.gen >= n {
                    return Err(Error::Closure(format!("output of ({i},{j},{m}) is outside the generator span")));
                }
                let lhs = &gens[i].weight + &gens[j].weight - int(m as i64 + 1);
                let rhs = &gens[o.gen].weight + int(o.dpow as i64);
                if lhs != rhs && !o.coeff.is_zero() {
                    return Err(Error::Inhomogeneous(format!(
                        "{}[{m}]{} has weight {} but L[-1]^{} {} has weight {}",
                        gens[i].name,
                        gens[j].name,
                        format_rational(&lhs),
                        o.dpow,
                        gens[o.gen].name,
                        format_rational(&rhs)
                    )));
                }
                st.add_term(Basis::new(o.dpow, o.gen), &o.coeff);
            }
            let slot = table.entry((i, j)).or_default();
            let merged = slot.get(&m).cloned().unwrap_or_default().add(&st);
            if merged.is_zero() {
                slot.remove(&m);
            } else {
                slot.insert(m, merged);
            }
        }
        Ok(HHASpec { generators: gens, table, commuting })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawSpec = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let mut gens = Vec::new();
        for g in &raw.generators {
            if g.name == "1" {
                continue;
            }
            gens.push((g.name.clone(), json_rational(&g.weight)?));
        }
        // indices refer to the list as written, which may or may not include "1"
        let listed: Vec<String> = raw.generators.iter().map(|g| g.name.clone()).collect();
        let mut names = vec!["1".to_string()];
        names.extend(gens.iter().map(|(n, _)| n.clone()));
        let resolve = |r: &GenRef| -> Result<usize> {
            let name = match r {
                GenRef::Name(s) => s.clone(),
                GenRef::Index(i) => {
                    listed.get(*i).cloned().ok_or_else(|| Error::Closure(format!("generator index {i} out of range")))?
                }
            };
            names.iter().position(|n| *n == name).ok_or_else(|| Error::Closure(format!("unknown generator {name}")))
        };
        let mut entries = Vec::new();
        for e in &raw.structure {
            let mut outs = Vec::new();
            for o in &e.out {
                outs.push(StructureOut {
                    coeff: Graded::term(json_rational(&o.coeff)?, o.tpi),
                    gen: resolve(&o.gen)?,
                    dpow: o.dpow,
                });
            }
            entries.push((resolve(&e.i)?, resolve(&e.j)?, e.m, outs));
        }
        HHASpec::new(gens, entries, raw.commuting)
    }

    /// JSON form accepted by [`HHASpec::from_json`].
    pub fn to_json(&self) -> serde_json::Value {
        let gens: Vec<_> = self
            .generators
            .iter()
            .map(|g| serde_json::json!({"name": g.name, "weight": format_rational(&g.weight)}))
            .collect();
        let mut structure = Vec::new();
        for ((i, j), modes) in &self.table {
            if modes.is_empty() {
                let (gi, gj) = (&self.generators[*i].name, &self.generators[*j].name);
                structure.push(serde_json::json!({"i": gi, "j": gj, "m": 0, "out": []}));
            }
            for (m, st) in modes {
                let out: Vec<_> = st
                    .terms()
                    .flat_map(|(b, c)| {
                        c.terms().map(move |(e, r)| {
                            serde_json::json!({"coeff": format_rational(r), "tpi": e, "gen": self.generators[b.gen].name, "dpow": b.k})
                        })
                    })
                    .collect();
                structure.push(serde_json::json!({
                    "i": self.generators[*i].name, "j": self.generators[*j].name, "m": m, "out": out
                }));
            }
        }
        serde_json::json!({"generators": gens, "structure": structure, "commuting": self.commuting})
    }

    /// `{1, a}` with `a` of weight 1 and `a[1]a = ⟨a,a⟩/(2πi)² · 1`.
    pub fn weight1(norm: BigRational) -> Self {
        let out = StructureOut { coeff: Graded::term(norm, -2), gen: IDENTITY, dpow: 0 };
        HHASpec::new(
            vec![("a".into(), BigRational::one())],
            vec![(1, 1, 0, vec![]), (1, 1, 1, vec![out])],
            true,
        )
        .expect("weight-1 preset")
    }

    /// `{1, x}`, `x = a[-1]²1` for a Heisenberg field `a`:
    /// `x[0]x = 2/(2πi)² L[-1]x`, `x[1]x = 4/(2πi)² x`, `x[3]x = 2/(2πi)⁴ 1`.
    pub fn weight2() -> Self {
        let o = |c: i64, e: i32, gen: usize, dpow: u32| StructureOut { coeff: Graded::term(int(c), e), gen, dpow };
        HHASpec::new(
            vec![("x".into(), int(2))],
            vec![
                (1, 1, 0, vec![o(2, -2, 1, 1)]),
                (1, 1, 1, vec![o(4, -2, 1, 0)]),
                (1, 1, 2, vec![]),
                (1, 1, 3, vec![o(2, -4, IDENTITY, 0)]),
            ],
            true,
        )
        .expect("weight-2 preset")
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    pub fn name(&self, gen: usize) -> &str {
        &self.generators[gen].name
    }

    pub fn is_commuting(&self) -> bool {
        self.commuting
    }

    pub fn basis_weight(&self, b: &Basis) -> BigRational {
        &self.generators[b.gen].weight + int(b.k as i64)
    }

    /// Common weight of all terms, or an error for mixed weights.
    pub fn state_weight(&self, s: &HHAState) -> Result<Option<BigRational>> {
        let ws: BTreeSet<BigRational> = s.terms().map(|(b, _)| self.basis_weight(b)).collect();
        match ws.len() {
            0 => Ok(None),
            1 => Ok(ws.into_iter().next()),
            _ => Err(Error::Inhomogeneous(format!("state mixes weights {ws:?}"))),
        }
    }

    fn lookup(&self, i: usize, j: usize, m: u32) -> Result<HHAState> {
        if i == IDENTITY || j == IDENTITY {
            // 1[m] = 0 and c[m]1 = 0 for m ≥ 0
            return Ok(HHAState::zero());
        }
        let modes = self.table.get(&(i, j)).ok_or_else(|| {
            Error::Closure(format!("no structure entry for {}[m]{}", self.name(i), self.name(j)))
        })?;
        Ok(modes.get(&m).cloned().unwrap_or_default())
    }

    /// Largest `m` with a listed nonzero `a^i[m]a^j`.
    pub fn max_mode(&self, i: usize, j: usize) -> Option<u32> {
        self.table.get(&(i, j))?.iter().filter(|(_, s)| !s.is_zero()).map(|(m, _)| *m).max()
    }

    /// Upper bound on `m` with `b[m]a ≠ 0`; `None` when every product vanishes.
    pub fn mode_bound(&self, b: &HHAState, a: &HHAState) -> Result<Option<u32>> {
        let mut best: Option<u32> = None;
        for (x, _) in b.terms() {
            for (y, _) in a.terms() {
                if x.gen == IDENTITY || y.gen == IDENTITY {
                    continue;
                }
                if !self.table.contains_key(&(x.gen, y.gen)) {
                    return Err(Error::Closure(format!(
                        "no structure entry for {}[m]{}",
                        self.name(x.gen),
                        self.name(y.gen)
                    )));
                }
                if let Some(mm) = self.max_mode(x.gen, y.gen) {
                    let v = mm + x.k + y.k;
                    best = Some(best.map_or(v, |c| c.max(v)));
                }
            }
        }
        Ok(best)
    }

    /// `(L[-1]^l c)[m] (L[-1]^n d)`, using `(L[-1]^l c)[m] = (-1)^l (m)_l c[m-l]`
    /// and `c[m] L[-1]^n d = Σ_k C(m,k) k! C(n,k) L[-1]^{n-k} c[m-k] d`.
    pub fn basis_product(&self, x: &Basis, m: u32, y: &Basis) -> Result<HHAState> {
        if x.vanishes() || y.vanishes() || x.k > m {
            return Ok(HHAState::zero());
        }
        let sign = if x.k % 2 == 0 { 1 } else { -1 };
        let pre = falling_factorial(m as i64, x.k as usize) * sign;
        let m1 = m - x.k;
        let mut out = HHAState::zero();
        for k in 0..=y.k.min(m1) {
            let c = binomial(m1 as i64, k as i64) * factorial(k as usize) * binomial(y.k as i64, k as i64);
            let coeff = Graded::rational(BigRational::from_integer(c * &pre));
            if coeff.is_zero() {
                continue;
            }
            let prod = self.lookup(x.gen, y.gen, m1 - k)?;
            out = out.add(&prod.lm1_pow(y.k - k).scale(&coeff));
        }
        Ok(out)
    }

    /// `b[m]a`, extended bilinearly.
    pub fn square_action(&self, b: &HHAState, m: u32, a: &HHAState) -> Result<HHAState> {
        let mut out = HHAState::zero();
        for (x, cx) in b.terms() {
            for (y, cy) in a.terms() {
                out = out.add(&self.basis_product(x, m, y)?.scale(&(cx * cy)));
            }
        }
        Ok(out)
    }

    /// `d^S(a) = (-1)^{|S|} b^{S_1}[0] b^{S_2}[0] ⋯ b^{S_s}[0] a`.
    pub fn d_state(&self, s: &[usize], a: &HHAState) -> Result<HHAState> {
        let mut cur = a.clone();
        for &g in s.iter().rev() {
            cur = self.square_action(&HHAState::generator(g), 0, &cur)?;
            if cur.is_zero() {
                break;
            }
        }
        Ok(if s.len() % 2 == 0 { cur } else { cur.scale(&Graded::int(-1)) })
    }

    pub fn render_basis(&self, b: &Basis) -> String {
        match b.k {
            0 => self.name(b.gen).to_string(),
            1 => format!("L[-1]{}", self.name(b.gen)),
            k => format!("L[-1]^{k}{}", self.name(b.gen)),
        }
    }

    pub fn render_state(&self, s: &HHAState) -> String {
        if s.is_zero() {
            return "0".into();
        }
        s.terms().map(|(b, c)| format!("({c}){}", self.render_basis(b))).collect::<Vec<_>>().join(" + ")
    }
}

impl fmt::Display for HHASpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_json())
    }
}

/// `c(h, i, s)`: coefficient of `z^i` in `(1/s!) ln(1+z)^s (1+z)^{h-1}`.
pub fn bracket_conversion(h: &BigRational, i: usize, s: usize) -> BigRational {
    let mul = |a: &[BigRational], b: &[BigRational]| {
        let mut out = vec![BigRational::zero(); i + 1];
        for (p, x) in a.iter().enumerate() {
            for (q, y) in b.iter().enumerate().take(i + 1 - p) {
                out[p + q] += x * y;
            }
        }
        out
    };
    let log: Vec<BigRational> = (0..=i)
        .map(|n| if n == 0 { BigRational::zero() } else { BigRational::new(BigInt::from(if n % 2 == 1 { 1 } else { -1 }), BigInt::from(n)) })
        .collect();
    let hm1 = h - BigRational::one();
    let mut acc: Vec<BigRational> = (0..=i).map(|n| crate::combinatorics::binomial_rational(&hm1, n)).collect();
    for _ in 0..s {
        acc = mul(&acc, &log);
    }
    &acc[i] / BigRational::from_integer(factorial(s))
}
