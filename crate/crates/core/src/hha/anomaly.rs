//! Modular anomaly of zero-mode correlators.
//!
//! `F(a_0^{s⃗})` is written through full correlators, which transform with their
//! weight; transforming the coefficients and reducing back leaves a polynomial in
//! `B = 2πi c/(cτ+d)` with zero-mode correlator coefficients.

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::expr::{in_b_units, CorrExpression, CorrSymbol};
use super::reduce::{default_positions, invert_to_full, reduce_to_zero_modes};
use super::spec::HHASpec;
use crate::combinatorics::factorial;
use crate::elliptic::symbolic::{transform, Atom, Poly};
use crate::error::{Error, Result};
use crate::qseries::scalar::{format_rational, Graded};

/// `(cτ+d)^{-w} F(a_0^{s⃗}; γτ) - F(a_0^{s⃗}; τ) = Σ_k B^k · E_k`, returned as `(k, E_k)`
/// for `k ≥ 1`. The coefficients of `E_k` are constants in `(2πi)^{±1}`.
pub fn anomaly_of_zero_modes(spec: &HHASpec, zero_modes: &[usize]) -> Result<Vec<(u32, CorrExpression)>> {
    let target = CorrSymbol::zero_modes(zero_modes.to_vec());
    let w_target = target.weight(spec);
    let full = invert_to_full(spec, &target, &default_positions(target.zero_modes.len()))?;

    let mut transformed = CorrExpression::zero();
    for (sym, c) in full.terms() {
        let expect = &w_target - sym.weight(spec);
        let ok = match c.homogeneous_weight() {
            Some(w) => expect == BigRational::from_integer(w.into()),
            None => false,
        };
        if !ok {
            return Err(Error::Inhomogeneous(format!(
                "coefficient of {} is not of weight {}",
                sym.render(spec),
                format_rational(&expect)
            )));
        }
        transformed.add_term(sym.clone(), &transform(c)?);
    }

    let reduced = reduce_to_zero_modes(spec, &transformed)?.sub(&CorrExpression::symbol(target.clone()));
    let mut layers: std::collections::BTreeMap<u32, CorrExpression> = Default::default();
    for (sym, c) in reduced.normalized().terms() {
        for (k, part) in c.collect_in(&Atom::B) {
            let Some(g) = part.as_constant() else {
                return Err(Error::ResidualDependence(format!(
                    "B^{k} coefficient of {} still depends on {part}",
                    sym.render(spec)
                )));
            };
            if k == 0 {
                return Err(Error::ResidualDependence(format!(
                    "B-free remainder {g} on {}",
                    sym.render(spec)
                )));
            }
            layers.entry(k).or_default().add_term(sym.clone(), &Poly::constant(g));
        }
    }
    Ok(layers.into_iter().filter(|(_, e)| !e.is_zero()).collect())
}

/// Anomaly layers in units of `c/(2πi(cτ+d)) = B/(2πi)²`: `(k, [(coefficient, symbol)])`.
pub fn anomaly_in_b_units(
    spec: &HHASpec,
    layers: &[(u32, CorrExpression)],
) -> Result<Vec<(u32, Vec<(BigRational, CorrSymbol)>)>> {
    layers
        .iter()
        .map(|(k, e)| {
            let terms = e
                .terms()
                .map(|(s, c)| {
                    let g = c.as_constant().unwrap_or_else(Graded::zero);
                    in_b_units(&g, *k).map(|r| (r, s.clone())).ok_or_else(|| {
                        Error::ResidualDependence(format!("coefficient {g} of {} is not rational in B/(2πi)^2", s.render(spec)))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((*k, terms))
        })
        .collect()
}

/// `{"k1": [["4", "F(x0^1)"]], ...}` with coefficients in `B/(2πi)²` units.
pub fn anomaly_json(spec: &HHASpec, layers: &[(u32, CorrExpression)]) -> Result<serde_json::Value> {
    let mut map = serde_json::Map::new();
    for (k, terms) in anomaly_in_b_units(spec, layers)? {
        let arr = terms
            .iter()
            .map(|(r, s)| serde_json::json!([format_rational(r), render_powers(spec, s)]))
            .collect();
        map.insert(format!("k{k}"), serde_json::Value::Array(arr));
    }
    Ok(serde_json::Value::Object(map))
}

/// Like [`CorrSymbol::render`] but always writes the exponent (`F(x0^1)`).
fn render_powers(spec: &HHASpec, s: &CorrSymbol) -> String {
    if !s.insertions.is_empty() || s.zero_modes.is_empty() {
        return s.render(spec);
    }
    let mut parts: Vec<(usize, usize)> = Vec::new();
    for g in &s.zero_modes {
        match parts.last_mut() {
            Some((h, c)) if h == g => *c += 1,
            _ => parts.push((*g, 1)),
        }
    }
    let body: Vec<String> = parts.iter().map(|(g, c)| format!("{}0^{c}", spec.name(*g))).collect();
    format!("F({})", body.join(" "))
}

/// Closed form of the weight-one anomaly: the `B^k` layer of `F(a_0^s)` is
/// `(norm·B/(2πi)²)^k s!/(2^k k!(s-2k)!) F(a_0^{s-2k})`.
pub fn weight1_anomaly_closed_form(gen: usize, s: usize, norm: &BigRational) -> Vec<(u32, CorrExpression)> {
    let mut out = Vec::new();
    for k in 1..=s / 2 {
        let c = BigRational::new(
            factorial(s),
            num_bigint::BigInt::from(2u32).pow(k as u32) * factorial(k) * factorial(s - 2 * k),
        ) * num_traits::pow(norm.clone(), k);
        if c.is_zero() {
            continue;
        }
        let sym = CorrSymbol::zero_modes(vec![gen; s - 2 * k]);
        let mut e = CorrExpression::zero();
        e.add_term(sym, &Poly::constant(Graded::term(c, -2 * k.to_i32().unwrap_or(0))));
        out.push((k as u32, e));
    }
    out
}
