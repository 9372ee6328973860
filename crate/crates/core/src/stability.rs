//! Slope, Dervan's condition (A), the alpha lower bounds in degrees 1 and 2,
//! and the top-level verdict.

use serde::Serialize;

use crate::alphabound::{certificate, compare_with_slope, Certificate, SlopeComparison};
use crate::cones::{face_decompose, is_nef, mu, require_ample, ContractionData};
use crate::curves::{disjoint_sets, minus_one_curves};
use crate::error::{Error, Result};
use crate::lattice::{DivClass, SurfaceModel};
use crate::rational::{q, Rational};

/// `nu(l) = (-K . l) / l^2`.
pub fn nu(l: &DivClass, s: &SurfaceModel) -> Result<Rational> {
    let sq = s.self_intersection(l)?;
    if sq.is_zero() {
        return Err(Error::Domain(format!("nu undefined: {l} has square 0")));
    }
    Ok(s.anticanonical_degree(l)? / sq)
}

/// Whether `-K - (2/3) nu(l) l` is nef.
pub fn condition_a(l: &DivClass, s: &SurfaceModel) -> Result<bool> {
    require_ample(l, s)?;
    is_nef(&residual(l, s)?, s)
}

fn residual(l: &DivClass, s: &SurfaceModel) -> Result<DivClass> {
    Ok(&s.anticanonical() - &normalize_unchecked(l, s)?)
}

fn normalize_unchecked(l: &DivClass, s: &SurfaceModel) -> Result<DivClass> {
    Ok(l.scale(&(q(2, 3) * nu(l, s)?)))
}

/// `(2/3) nu(l) l`, the multiple of `l` with slope `3/2`.
pub fn normalize(l: &DivClass, s: &SurfaceModel) -> Result<DivClass> {
    require_ample(l, s)?;
    let out = normalize_unchecked(l, s)?;
    if nu(&out, s)? != q(3, 2) {
        return Err(Error::Invariant(format!(
            "normalized class {out} does not have slope 3/2"
        )));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EpsilonData {
    pub epsilon: Rational,
    pub r: DivClass,
}

/// `R = -K - l'` and `epsilon = -K . R` for the normalized `l'`.
pub fn epsilon_data(s: &SurfaceModel, l: &DivClass) -> Result<EpsilonData> {
    let r = &s.anticanonical() - &normalize(l, s)?;
    let epsilon = s.anticanonical_degree(&r)?;
    Ok(EpsilonData { epsilon, r })
}

/// Certified lower bound `gamma` for `alpha(S, l')` where `l'` is the
/// normalization of `l`, in degrees 1 and 2 under condition (A).
pub fn gamma_lower_bound(s: &SurfaceModel, l: &DivClass) -> Result<Rational> {
    let d = s.degree();
    if d > 2 {
        return Err(Error::Domain(format!("gamma is defined for degrees 1 and 2, got {d}")));
    }
    if !condition_a(l, s)? {
        return Err(Error::Domain("condition (A) fails; gamma is not available".into()));
    }
    let eps = epsilon_data(s, l)?;
    if !eps.epsilon.is_positive() {
        return Err(Error::Invariant(format!(
            "epsilon = {} with R = {} nonzero",
            eps.epsilon, eps.r
        )));
    }
    let e = &eps.epsilon;
    let gamma = if d == 1 {
        if *e >= q(1, 2) {
            q(6, 5)
        } else {
            q(3, 1) / (q(3, 1) - e)
        }
    } else if *e >= Rational::one() {
        q(12, 11)
    } else {
        q(12, 1) / (q(12, 1) - e)
    };
    if gamma <= Rational::one() {
        return Err(Error::Invariant(format!("gamma = {gamma} is not above 1")));
    }
    Ok(gamma)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    KStableByMainTheorem,
    KStableBySixLineTheorem,
    DervanInapplicable,
    Unsupported,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub status: Status,
    pub condition_a: bool,
    pub nu: Rational,
    /// Lower bound on alpha for the normalized class (degree <= 2) or for
    /// `-K + x sum E_i` (six-line cubics).
    pub alpha_lower: Option<Rational>,
    /// The same bound transported to the class as given.
    pub alpha_lower_input: Option<Rational>,
    pub mu: Option<Rational>,
    pub contraction: Option<ContractionData>,
    pub certificate: Option<Certificate>,
    pub comparison: Option<SlopeComparison>,
    /// Upper bound on alpha for the class as given, from the certificate.
    pub alpha_upper_input: Option<Rational>,
    pub notes: Vec<String>,
}

impl Verdict {
    fn new(status: Status, condition_a: bool, nu: Rational) -> Self {
        Verdict {
            status,
            condition_a,
            nu,
            alpha_lower: None,
            alpha_lower_input: None,
            mu: None,
            contraction: None,
            certificate: None,
            comparison: None,
            alpha_upper_input: None,
            notes: Vec::new(),
        }
    }
}

pub fn verdict(s: &SurfaceModel, l: &DivClass) -> Result<Verdict> {
    require_ample(l, s)?;
    let nu_l = nu(l, s)?;
    let cond = condition_a(l, s)?;
    let d = s.degree();
    match d {
        8 => {
            let mut v = Verdict::new(Status::Unsupported, cond, nu_l);
            v.notes
                .push("degree 8 (the blow-up F1 of the plane) has no certificate here; neither do P2 or P1xP1".into());
            Ok(v)
        }
        1 | 2 => {
            if !cond {
                let mut v = Verdict::new(Status::Unknown, cond, nu_l);
                v.notes
                    .push("condition (A) fails, so the degree <= 2 criterion does not apply".into());
                return Ok(v);
            }
            let gamma = gamma_lower_bound(s, l)?;
            let mut v = Verdict::new(Status::KStableByMainTheorem, cond, nu_l);
            v.alpha_lower_input = Some(&gamma * q(2, 3) * &v.nu);
            v.notes.push(format!(
                "alpha(S, L') >= {gamma} > 1 = (2/3) nu(L') for L' = (2/3) nu(L) L; with condition (A) Dervan's criterion gives K-stability"
            ));
            v.alpha_lower = Some(gamma);
            Ok(v)
        }
        3 => cubic_verdict(s, l, cond, nu_l),
        _ => {
            let m = mu(l, s)?;
            let l1 = l.scale(&m);
            let cd = face_decompose(&l1, s)?;
            let cert = certificate(s, &cd)?;
            let cmp = compare_with_slope(s, &cd, &cert)?;
            let mut v = Verdict::new(Status::DervanInapplicable, cond, nu_l);
            v.alpha_upper_input = Some(&m * &cert.bound);
            v.notes.push(format!(
                "alpha(S, mu L) <= {} {} (2/3) nu(mu L) = {}, so Dervan's criterion cannot apply",
                cmp.bound,
                if cmp.equality { "=" } else { "<" },
                cmp.two_thirds_nu
            ));
            if cmp.equality {
                v.notes
                    .push("equality: L is proportional to -K on a quartic del Pezzo surface".into());
            }
            v.mu = Some(m);
            v.contraction = Some(cd);
            v.certificate = Some(cert);
            v.comparison = Some(cmp);
            Ok(v)
        }
    }
}

fn cubic_verdict(s: &SurfaceModel, l: &DivClass, cond: bool, nu_l: Rational) -> Result<Verdict> {
    if let Some(m) = match_six_line(s, l)? {
        if m.x.is_positive() && m.x <= q(1, 10) {
            let alpha = q(2, 1) / (q(3, 1) + q(3, 1) * &m.x);
            let mut v = Verdict::new(Status::KStableBySixLineTheorem, cond, nu_l);
            let two_thirds_nu = q(2, 3) * &v.nu * &m.scale;
            if alpha <= two_thirds_nu {
                return Err(Error::Invariant(format!(
                    "six-line bound {alpha} does not exceed (2/3) nu = {two_thirds_nu}"
                )));
            }
            v.alpha_lower_input = Some(&alpha / &m.scale);
            v.notes.push(format!(
                "L = {} (-K + {} sum of six disjoint lines); alpha >= {alpha} for 0 < x <= 1/10",
                m.scale, m.x
            ));
            v.alpha_lower = Some(alpha);
            return Ok(v);
        }
        let mut v = Verdict::new(Status::Unknown, cond, nu_l);
        if m.x.is_zero() {
            v.notes.push(
                "L is proportional to -K; the cubic surface admits a Kahler-Einstein metric (Tian), not certified here"
                    .into(),
            );
        } else {
            v.notes
                .push(format!("six-line family with x = {} outside 0 < x <= 1/10", m.x));
        }
        return Ok(v);
    }
    let mut v = Verdict::new(Status::Unknown, cond, nu_l);
    if let Some(m) = match_one_line(s, l)? {
        let rep = cubic_line_family_report(&m.x)?;
        if rep.condition_a != cond {
            return Err(Error::Invariant(
                "one-line condition (A) disagrees with the lattice test".into(),
            ));
        }
        v.notes.push(format!(
            "L = {} (-K + {} E) for a line E; alpha <= {}{}",
            m.scale,
            m.x,
            rep.alpha_upper,
            if rep.in_window {
                ", and (A) holds while alpha <= (2/3) nu, so Dervan's criterion is out of reach"
            } else {
                ""
            }
        ));
    } else {
        v.notes.push("no criterion covers this cubic polarization".into());
    }
    Ok(v)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SixLineMatch {
    pub scale: Rational,
    pub x: Rational,
    pub lines: Vec<DivClass>,
}

/// Writes `l = t (-K + x sum E_i')` for six disjoint lines `E_i'` with
/// `x >= 0`, taking the first such six in enumeration order.
pub fn match_six_line(s: &SurfaceModel, l: &DivClass) -> Result<Option<SixLineMatch>> {
    if s.degree() != 3 {
        return Ok(None);
    }
    s.check(l)?;
    let lines = minus_one_curves(s);
    for set in disjoint_sets(lines, 6, s)? {
        let es: Vec<DivClass> = set.iter().map(|&i| lines[i].clone()).collect();
        let sum = es.iter().fold(s.zero(), |acc, e| &acc + e);
        let h = (&s.anticanonical() + &sum).scale(&q(1, 3));
        let t = l.dot(&h) / Rational::integer(3);
        if !t.is_positive() {
            continue;
        }
        let beta = l.dot(&es[0]);
        if es.iter().any(|e| l.dot(e) != beta) {
            continue;
        }
        let x = Rational::one() - &beta / &t;
        if x.is_negative() {
            continue;
        }
        let rebuilt = s.anticanonical().add_scaled(&x, &sum).scale(&t);
        if rebuilt == *l {
            return Ok(Some(SixLineMatch { scale: t, x, lines: es }));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OneLineMatch {
    pub scale: Rational,
    pub x: Rational,
    pub line: DivClass,
}

/// Writes `l = t (-K + x E)` for a line `E` with `0 < x < 1`.
pub fn match_one_line(s: &SurfaceModel, l: &DivClass) -> Result<Option<OneLineMatch>> {
    if s.degree() != 3 {
        return Ok(None);
    }
    s.check(l)?;
    let mk = s.anticanonical();
    for e in minus_one_curves(s) {
        let le = l.dot(e);
        let t = (mk.dot(l) + &le) / Rational::integer(4);
        if !t.is_positive() {
            continue;
        }
        let x = Rational::one() - &le / &t;
        if !x.is_positive() || x >= Rational::one() {
            continue;
        }
        if mk.add_scaled(&x, e).scale(&t) == *l {
            return Ok(Some(OneLineMatch {
                scale: t,
                x,
                line: e.clone(),
            }));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CubicLineReport {
    pub x: Rational,
    pub nu: Rational,
    pub condition_a: bool,
    pub alpha_upper: Rational,
    pub two_thirds_nu: Rational,
    pub in_window: bool,
}

/// The cubic surface polarized by `-K + x E` for a line `E`, `0 <= x < 1`.
pub fn cubic_line_family_report(x: &Rational) -> Result<CubicLineReport> {
    if x.is_negative() || *x >= Rational::one() {
        return Err(Error::Domain(format!("x must lie in [0, 1), got {x}")));
    }
    let s = SurfaceModel::new(3)?;
    let l = s.anticanonical().add_scaled(x, &s.e(1));
    let nu_l = nu(&l, &s)?;
    let three = Rational::integer(3);
    let closed = (&three + x) / (&three + Rational::integer(2) * x - x * x);
    if nu_l != closed {
        return Err(Error::Invariant(format!(
            "slope {nu_l} differs from closed form {closed}"
        )));
    }
    let cond = condition_a(&l, &s)?;
    if cond != (*x <= q(3, 5)) {
        return Err(Error::Invariant(format!(
            "condition (A) at x = {x} disagrees with x <= 3/5"
        )));
    }
    let window = Rational::integer(13) * x * x + Rational::integer(2) * x - &three;
    Ok(CubicLineReport {
        x: x.clone(),
        alpha_upper: &three / (Rational::integer(4) + Rational::integer(2) * x),
        two_thirds_nu: q(2, 3) * &nu_l,
        nu: nu_l,
        in_window: cond && !window.is_negative(),
        condition_a: cond,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones::ContractionKind;
    use proptest::prelude::*;

    fn model(d: u8) -> SurfaceModel {
        SurfaceModel::new(d).unwrap()
    }

    fn six_line(x: Rational) -> DivClass {
        let s = model(3);
        let sum = (1..=6).fold(s.zero(), |acc, i| &acc + &s.e(i));
        s.anticanonical().add_scaled(&x, &sum)
    }

    #[test]
    fn slope_examples() {
        let s = model(3);
        assert_eq!(nu(&s.anticanonical(), &s).unwrap(), q(1, 1));
        let l = s.anticanonical().add_scaled(&q(1, 2), &s.e(1));
        assert_eq!(nu(&l, &s).unwrap(), q(14, 15));
        assert!(matches!(nu(&(&s.h() - &s.e(1)), &s), Err(Error::Domain(_))));
    }

    #[test]
    fn condition_a_examples() {
        let s = model(3);
        assert!(condition_a(&s.anticanonical(), &s).unwrap());
        let l = |x| s.anticanonical().add_scaled(&x, &s.e(1));
        assert!(condition_a(&l(q(3, 5)), &s).unwrap());
        assert!(!condition_a(&l(q(61, 100)), &s).unwrap());
        assert_eq!(
            condition_a(&l(q(1, 2)).scale(&q(5, 7)), &s).unwrap(),
            condition_a(&l(q(1, 2)), &s).unwrap()
        );
    }

    #[test]
    fn normalize_examples() {
        let s = model(1);
        let n = normalize(&s.anticanonical(), &s).unwrap();
        assert_eq!(n, s.anticanonical().scale(&q(2, 3)));
        let l = s.anticanonical().add_scaled(&q(1, 10), &s.e(1));
        let n = normalize(&l, &s).unwrap();
        assert_eq!(normalize(&n, &s).unwrap(), n);
        let shifted = &n - &s.anticanonical().scale(&q(2, 3));
        assert!(shifted.dot(&n).is_zero());
    }

    #[test]
    fn gamma_values() {
        let s1 = model(1);
        assert_eq!(epsilon_data(&s1, &s1.anticanonical()).unwrap().epsilon, q(1, 3));
        assert_eq!(gamma_lower_bound(&s1, &s1.anticanonical()).unwrap(), q(9, 8));
        let s2 = model(2);
        assert_eq!(gamma_lower_bound(&s2, &s2.anticanonical()).unwrap(), q(18, 17));
        assert_eq!(q(3, 1) / (q(3, 1) - q(1, 2)), q(6, 5));
        assert!(matches!(
            gamma_lower_bound(&model(3), &model(3).anticanonical()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn degree_two_verdict() {
        let s = model(2);
        let v = verdict(&s, &s.anticanonical()).unwrap();
        assert_eq!(v.status, Status::KStableByMainTheorem);
        assert_eq!(v.alpha_lower, Some(q(18, 17)));
        assert_eq!(v.alpha_lower_input, Some(q(12, 17)));
    }

    #[test]
    fn six_line_verdict() {
        let s = model(3);
        let v = verdict(&s, &six_line(q(1, 10))).unwrap();
        assert_eq!(v.status, Status::KStableBySixLineTheorem);
        assert_eq!(v.alpha_lower, Some(q(20, 33)));
        let v = verdict(&s, &six_line(q(1, 10)).scale(&q(3, 1))).unwrap();
        assert_eq!(v.alpha_lower, Some(q(20, 33)));
        assert_eq!(v.alpha_lower_input, Some(q(20, 99)));
        assert_eq!(verdict(&s, &six_line(q(1, 9))).unwrap().status, Status::Unknown);
        assert_eq!(verdict(&s, &s.anticanonical()).unwrap().status, Status::Unknown);
    }

    #[test]
    fn six_line_negative_side_matches_double_six() {
        let s = model(3);
        let l = six_line(q(-1, 20));
        let m = match_six_line(&s, &l).unwrap().unwrap();
        assert!(m.x.is_positive());
        assert_eq!(
            s.anticanonical()
                .add_scaled(&m.x, &m.lines.iter().fold(s.zero(), |a, e| &a + e))
                .scale(&m.scale),
            l
        );
    }

    #[test]
    fn degree_four_verdict() {
        let s = model(4);
        let v = verdict(&s, &s.anticanonical()).unwrap();
        assert_eq!(v.status, Status::DervanInapplicable);
        assert_eq!(v.certificate.as_ref().unwrap().bound, q(2, 3));
        assert!(v.comparison.as_ref().unwrap().equality);
        assert_eq!(v.contraction.as_ref().unwrap().kind, ContractionKind::ToP2);
    }

    #[test]
    fn degree_eight_is_unsupported() {
        let s = model(8);
        assert_eq!(verdict(&s, &s.anticanonical()).unwrap().status, Status::Unsupported);
    }

    #[test]
    fn cubic_line_reports() {
        let r = cubic_line_family_report(&q(1, 2)).unwrap();
        assert!(r.in_window && r.condition_a);
        assert_eq!(r.alpha_upper, q(3, 5));
        assert!(!cubic_line_family_report(&q(2, 5)).unwrap().in_window);
        assert!(!cubic_line_family_report(&q(7, 10)).unwrap().condition_a);
        assert!(cubic_line_family_report(&q(1, 1)).is_err());
        assert!(cubic_line_family_report(&q(-1, 3)).is_err());
        let s = model(3);
        let v = verdict(&s, &s.anticanonical().add_scaled(&q(1, 2), &s.e(2))).unwrap();
        assert_eq!(v.status, Status::Unknown);
        assert!(v.notes[0].contains("out of reach"));
    }

    fn ample_near_anticanonical(d: u8) -> impl Strategy<Value = DivClass> {
        let r = 9 - d as usize;
        prop::collection::vec((0i64..=6, 1i64..=6), r + 1).prop_filter_map("ample", move |v| {
            let s = model(d);
            let mut l = s.anticanonical();
            l.h += q(v[0].0, v[0].1);
            for (i, &(p, den)) in v[1..].iter().enumerate() {
                l.e[i] += q(p, 2 * den * 3);
            }
            crate::cones::is_ample(&l, &s).unwrap().then_some(l)
        })
    }

    proptest! {
        #[test]
        fn scaling_laws(l in (1u8..=7).prop_flat_map(ample_near_anticanonical), c in (1i64..=9, 1i64..=9)) {
            let s = model(9 - l.r() as u8);
            let c = q(c.0, c.1);
            prop_assert_eq!(nu(&l.scale(&c), &s).unwrap(), nu(&l, &s).unwrap() / &c);
            prop_assert_eq!(condition_a(&l.scale(&c), &s).unwrap(), condition_a(&l, &s).unwrap());
            prop_assert_eq!(mu(&l.scale(&c), &s).unwrap(), mu(&l, &s).unwrap() / &c);
            let n = normalize(&l, &s).unwrap();
            prop_assert!((&n - &s.anticanonical().scale(&q(2, 3))).dot(&n).is_zero());
        }

        #[test]
        fn gamma_above_one(d in 1u8..=2, seed in 0usize..1000) {
            let s = model(d);
            let r = s.r();
            let mut l = s.anticanonical();
            l.e[seed % r] += q((seed % 7) as i64, 20);
            l.h += q((seed % 5) as i64, 30);
            if crate::cones::is_ample(&l, &s).unwrap() && condition_a(&l, &s).unwrap() {
                prop_assert!(gamma_lower_bound(&s, &l).unwrap() > q(1, 1));
                prop_assert_eq!(verdict(&s, &l).unwrap().status, Status::KStableByMainTheorem);
            }
        }

        #[test]
        fn plane_slope_formula(a in prop::collection::vec((0i64..6, 6i64..=6), 3)) {
            let s = model(6);
            let mut a: Vec<Rational> = a.into_iter().map(|(p, d)| q(p, d)).collect();
            a.sort_by(|x, y| y.cmp(x));
            let cd = ContractionData::standard(&s, ContractionKind::ToP2, q(0, 1), a.clone()).unwrap();
            let sum: Rational = a.iter().sum();
            let sq: Rational = a.iter().map(|x| x * x).sum();
            let d = q(6, 1);
            prop_assert_eq!(nu(&cd.reconstruct(&s), &s).unwrap(), (&d + &sum) / (&d + q(2, 1) * &sum - sq));
        }
    }
}
