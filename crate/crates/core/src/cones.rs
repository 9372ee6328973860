//! Nef, ample and Mori cones, the effective threshold `mu`, and the
//! classification of the face of the Mori cone cut out by `K + mu L`.

use std::fmt;

use serde::Serialize;

use crate::curves::{disjoint_sets, fiber_classes, minus_one_curves, mori_generators};
use crate::error::{Error, Result};
use crate::lattice::{DivClass, SurfaceModel};
use crate::rational::Rational;
use crate::ratlp::{solve, LinearProgram, LpOutcome, Relation};

/// `dv . G >= 0` for every Mori cone generator `G`.
pub fn is_nef(dv: &DivClass, s: &SurfaceModel) -> Result<bool> {
    s.check(dv)?;
    Ok(mori_generators(s).iter().all(|g| !dv.dot(g).is_negative()))
}

/// Nefness decided by linear programming over the Mori cone: minimize
/// `dv . y` over `y = sum t_i G_i`, `t >= 0`, normalized by `-K . y = 1`.
/// Independent of [`is_nef`] except for the generator list.
pub fn is_nef_lp(dv: &DivClass, s: &SurfaceModel) -> Result<bool> {
    s.check(dv)?;
    let gens = mori_generators(s);
    let dim = s.r() + 1;
    let n = dim + gens.len();
    // variables: y_0..y_r (free), then t_i >= 0
    let mut objective = vec![Rational::zero(); n];
    objective[0] = dv.h.clone();
    for (k, x) in dv.e.iter().enumerate() {
        objective[k + 1] = -x;
    }
    let mut lp = LinearProgram::minimize(objective);
    for k in 0..dim {
        lp = lp.free(k);
    }
    for k in 0..dim {
        let mut row = vec![Rational::zero(); n];
        row[k] = Rational::one();
        for (i, g) in gens.iter().enumerate() {
            let coord = if k == 0 { &g.h } else { &g.e[k - 1] };
            row[dim + i] = -coord;
        }
        lp.add_constraint(row, Relation::Eq, Rational::zero());
    }
    let mk = s.anticanonical();
    let mut norm = vec![Rational::zero(); n];
    norm[0] = mk.h.clone();
    for (k, x) in mk.e.iter().enumerate() {
        norm[k + 1] = -x;
    }
    lp.add_constraint(norm, Relation::Eq, Rational::one());
    match solve(&lp)? {
        LpOutcome::Optimal { value, .. } => Ok(!value.is_negative()),
        other => Err(Error::Invariant(format!(
            "nef program over the Mori cone returned {other:?}"
        ))),
    }
}

/// `dv . G > 0` for every Mori cone generator and `dv^2 > 0`.
pub fn is_ample(dv: &DivClass, s: &SurfaceModel) -> Result<bool> {
    Ok(ampleness_violation(dv, s)?.is_none())
}

/// The first reason `dv` fails to be ample, if any.
pub fn ampleness_violation(dv: &DivClass, s: &SurfaceModel) -> Result<Option<String>> {
    s.check(dv)?;
    for g in mori_generators(s) {
        let p = dv.dot(&g);
        if !p.is_positive() {
            return Ok(Some(format!("L . {g} = {p} is not positive")));
        }
    }
    let sq = dv.dot(dv);
    if !sq.is_positive() {
        return Ok(Some(format!("L^2 = {sq} is not positive")));
    }
    Ok(None)
}

pub(crate) fn require_ample(l: &DivClass, s: &SurfaceModel) -> Result<()> {
    match ampleness_violation(l, s)? {
        None => Ok(()),
        Some(why) => Err(Error::Domain(format!("class {l} is not ample: {why}"))),
    }
}

/// The least `lambda >= 0` with `K + lambda l` in the Mori cone, from the
/// program: minimize `lambda` subject to `sum t_i G_i - lambda l = K`.
pub fn mu(l: &DivClass, s: &SurfaceModel) -> Result<Rational> {
    require_ample(l, s)?;
    let gens = mori_generators(s);
    let k = s.canonical();
    let n = 1 + gens.len();
    let mut objective = vec![Rational::zero(); n];
    objective[0] = Rational::one();
    let mut lp = LinearProgram::minimize(objective);
    let l_coords: Vec<&Rational> = l.coords().collect();
    for (row_idx, target) in k.coords().enumerate() {
        let mut row = Vec::with_capacity(n);
        row.push(-l_coords[row_idx]);
        for g in &gens {
            row.push(g.coords().nth(row_idx).unwrap().clone());
        }
        lp.add_constraint(row, Relation::Eq, target.clone());
    }
    match solve(&lp)? {
        LpOutcome::Optimal { value, .. } => Ok(value),
        other => Err(Error::Invariant(format!(
            "threshold program for an ample class returned {other:?}"
        ))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ContractionKind {
    ToP2,
    ConicBundleF1,
    ConicBundleP1P1,
}

impl fmt::Display for ContractionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ContractionKind::ToP2 => "ToP2",
            ContractionKind::ConicBundleF1 => "ConicBundleF1",
            ContractionKind::ConicBundleP1P1 => "ConicBundleP1P1",
        };
        f.write_str(s)
    }
}

/// Normal form `L = -K + delta C + sum a_i E_i` of a polarization with
/// `mu(L) = 1`.
///
/// `a` is sorted nonincreasing and aligned with `curve_e`. For `ToP2` there
/// are `9 - d` curves and no fiber; for the conic-bundle kinds there are
/// `8 - d` curves and a fiber class `C` disjoint from all of them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ContractionData {
    pub kind: ContractionKind,
    pub delta: Rational,
    pub a: Vec<Rational>,
    pub curve_e: Vec<DivClass>,
    pub curve_c: Option<DivClass>,
}

impl ContractionData {
    /// `-K + delta C + sum a_i E_i`.
    pub fn reconstruct(&self, s: &SurfaceModel) -> DivClass {
        let mut l = s.anticanonical();
        if let Some(c) = &self.curve_c {
            l = l.add_scaled(&self.delta, c);
        }
        for (a, e) in self.a.iter().zip(&self.curve_e) {
            l = l.add_scaled(a, e);
        }
        l
    }

    /// True when every `a_i` and `delta` vanish, i.e. `L = -K`.
    pub fn is_zero_face(&self) -> bool {
        self.delta.is_zero() && self.a.iter().all(Rational::is_zero)
    }

    /// A fixed lattice realization of the given kind and coefficients, used
    /// to sweep coefficient grids without going through a class.
    ///
    /// `ToP2` uses `E_1..E_r`; `ConicBundleF1` uses `E_1..E_{r-1}` with
    /// fiber `H - E_r`; `ConicBundleP1P1` uses `E_1..E_{r-2}` together with
    /// `H - E_{r-1} - E_r`, and fiber `H - E_{r-1}`.
    pub fn standard(s: &SurfaceModel, kind: ContractionKind, delta: Rational, a: Vec<Rational>) -> Result<Self> {
        let r = s.r();
        if !(4..=7).contains(&s.degree()) {
            return Err(Error::Domain(format!(
                "contraction data needs degree 4..=7, got {}",
                s.degree()
            )));
        }
        let (curve_e, curve_c) = match kind {
            ContractionKind::ToP2 => ((1..=r).map(|i| s.e(i)).collect(), None),
            ContractionKind::ConicBundleF1 => ((1..r).map(|i| s.e(i)).collect(), Some(&s.h() - &s.e(r))),
            ContractionKind::ConicBundleP1P1 => {
                let mut es: Vec<DivClass> = (1..r - 1).map(|i| s.e(i)).collect();
                es.push(&(&s.h() - &s.e(r - 1)) - &s.e(r));
                (es, Some(&s.h() - &s.e(r - 1)))
            }
        };
        let cd = ContractionData {
            kind,
            delta,
            a,
            curve_e,
            curve_c,
        };
        cd.validate(s)?;
        Ok(cd)
    }

    /// Checks every structural invariant; violations are input errors.
    pub fn validate(&self, s: &SurfaceModel) -> Result<()> {
        let bad = |msg: String| Err(Error::Domain(msg));
        let r = s.r();
        let expected = match self.kind {
            ContractionKind::ToP2 => r,
            _ => r - 1,
        };
        if self.a.len() != expected || self.curve_e.len() != expected {
            return bad(format!("{} needs {expected} curves and coefficients", self.kind));
        }
        if self.delta.is_negative() || self.a.iter().any(Rational::is_negative) {
            return bad("coefficients must be nonnegative".into());
        }
        if self.a.windows(2).any(|w| w[0] < w[1]) {
            return bad("coefficients must be sorted nonincreasing".into());
        }
        if self.a.first().is_some_and(|a1| *a1 >= Rational::one()) {
            return bad("largest coefficient must be below 1".into());
        }
        let curves = minus_one_curves(s);
        for (i, e) in self.curve_e.iter().enumerate() {
            s.check(e)?;
            if !curves.contains(e) {
                return bad(format!("{e} is not a (-1)-curve"));
            }
            if self.curve_e[..i].iter().any(|f| !f.dot(e).is_zero()) {
                return bad("curves must be pairwise disjoint".into());
            }
        }
        match (&self.kind, &self.curve_c) {
            (ContractionKind::ToP2, None) => {
                if !self.delta.is_zero() {
                    return bad("ToP2 data has no fiber term".into());
                }
            }
            (ContractionKind::ToP2, Some(_)) => return bad("ToP2 data has no fiber term".into()),
            (_, None) => return bad("conic-bundle data needs a fiber class".into()),
            (kind, Some(c)) => {
                if !fiber_classes(s).contains(c) {
                    return bad(format!("{c} is not a conic fiber class"));
                }
                if self.curve_e.iter().any(|e| !e.dot(c).is_zero()) {
                    return bad("fiber must be disjoint from the contracted curves".into());
                }
                let found = classify_conic(s, &self.curve_e, c);
                if found != *kind {
                    return bad(format!("curves contract to the {found} configuration, not {kind}"));
                }
            }
        }
        Ok(())
    }
}

/// `F_1` when a (-1)-curve meets the fiber once and misses every contracted
/// curve, `P^1 x P^1` otherwise.
pub(crate) fn classify_conic(s: &SurfaceModel, es: &[DivClass], c: &DivClass) -> ContractionKind {
    match section_curve(s, es, c) {
        Some(_) => ContractionKind::ConicBundleF1,
        None => ContractionKind::ConicBundleP1P1,
    }
}

pub(crate) fn section_curve(s: &SurfaceModel, es: &[DivClass], c: &DivClass) -> Option<DivClass> {
    minus_one_curves(s)
        .iter()
        .find(|v| v.dot(c) == Rational::one() && es.iter().all(|e| e.dot(v).is_zero()))
        .cloned()
}

/// Decomposes an ample class with `mu(l) = 1` as
/// `l = -K + delta C + sum a_i E_i`.
///
/// A contraction to the plane is preferred whenever `K + l` is supported on
/// `9 - d` disjoint curves; otherwise the search runs over `8 - d` disjoint
/// curves and a disjoint fiber. Within each stage the first valid choice in
/// enumeration order wins.
pub fn face_decompose(l: &DivClass, s: &SurfaceModel) -> Result<ContractionData> {
    if !(4..=7).contains(&s.degree()) {
        return Err(Error::Domain(format!(
            "face decomposition is defined for degrees 4..=7, got {}",
            s.degree()
        )));
    }
    let m = mu(l, s)?;
    if m != Rational::one() {
        return Err(Error::Domain(format!("mu(L) = {m}; rescale L by mu(L) first")));
    }
    let r = s.r();
    let curves = minus_one_curves(s);
    let residual = &s.canonical() + l;

    if residual.is_zero() {
        let first = disjoint_sets(curves, r, s)?
            .into_iter()
            .next()
            .ok_or_else(|| Error::Invariant("no maximal disjoint set of (-1)-curves".into()))?;
        return Ok(ContractionData {
            kind: ContractionKind::ToP2,
            delta: Rational::zero(),
            a: vec![Rational::zero(); r],
            curve_e: first.iter().map(|&i| curves[i].clone()).collect(),
            curve_c: None,
        });
    }

    for set in disjoint_sets(curves, r, s)? {
        let es: Vec<&DivClass> = set.iter().map(|&i| &curves[i]).collect();
        if let Some((a, rest)) = split_off_curves(&residual, &es) {
            if rest.is_zero() {
                return finish(s, ContractionKind::ToP2, Rational::zero(), a, es, None);
            }
        }
    }

    let mk = s.anticanonical();
    for set in disjoint_sets(curves, r - 1, s)? {
        let es: Vec<&DivClass> = set.iter().map(|&i| &curves[i]).collect();
        let Some((a, rest)) = split_off_curves(&residual, &es) else {
            continue;
        };
        let delta = &mk.dot(&rest) / &Rational::integer(2);
        if delta.is_negative() {
            continue;
        }
        for c in fiber_classes(s) {
            if es.iter().any(|e| !e.dot(c).is_zero()) {
                continue;
            }
            if c.scale(&delta) == rest {
                let owned: Vec<DivClass> = es.iter().map(|e| (*e).clone()).collect();
                let kind = classify_conic(s, &owned, c);
                return finish(s, kind, delta, a, es, Some(c.clone()));
            }
        }
    }
    Err(Error::Invariant(format!(
        "no decomposition of K + L = {residual} over disjoint (-1)-curves and a fiber"
    )))
}

/// Coefficients `a_i = -D . E_i` (nonnegative) and the remainder
/// `D - sum a_i E_i`, for pairwise disjoint `E_i`.
fn split_off_curves(d: &DivClass, es: &[&DivClass]) -> Option<(Vec<Rational>, DivClass)> {
    let mut rest = d.clone();
    let mut a = Vec::with_capacity(es.len());
    for e in es {
        let coeff = -d.dot(e);
        if coeff.is_negative() {
            return None;
        }
        rest = rest.add_scaled(&-&coeff, e);
        a.push(coeff);
    }
    Some((a, rest))
}

fn finish(
    s: &SurfaceModel,
    kind: ContractionKind,
    delta: Rational,
    a: Vec<Rational>,
    es: Vec<&DivClass>,
    curve_c: Option<DivClass>,
) -> Result<ContractionData> {
    let mut pairs: Vec<(Rational, DivClass)> = a.into_iter().zip(es.into_iter().cloned()).collect();
    // stable: ties keep enumeration order
    pairs.sort_by(|x, y| y.0.cmp(&x.0));
    let (a, curve_e) = pairs.into_iter().unzip();
    let cd = ContractionData {
        kind,
        delta,
        a,
        curve_e,
        curve_c,
    };
    cd.validate(s)
        .map_err(|e| Error::Invariant(format!("face decomposition produced invalid data: {e}")))?;
    Ok(cd)
}
