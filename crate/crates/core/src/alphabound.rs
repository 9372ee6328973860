//! Explicit effective divisors `D ~ L` for degrees 4..=7. A component of
//! coefficient `c` in such a `D` bounds the alpha invariant by `1/c`.

use rayon::prelude::*;
use serde::Serialize;

use crate::appendix::{self, AppendixInput};
use crate::cones::{section_curve, ContractionData, ContractionKind};
use crate::curves::minus_one_curves;
use crate::error::{Error, Result};
use crate::lattice::{DivClass, SurfaceModel};
use crate::rational::{q, Rational};
use crate::stability::nu;

/// The twelve subset sums over `(a_2, a_3, a_4, a_5)` used for the plane
/// contraction in degree 4, as positions into that 4-vector.
pub const SUMS_TWELVE: [&[usize]; 12] = [
    &[0],
    &[0, 1],
    &[0, 2],
    &[0, 3],
    &[1, 2],
    &[1, 3],
    &[2, 3],
    &[0, 1, 2],
    &[0, 1, 3],
    &[0, 2, 3],
    &[1, 2, 3],
    &[0, 1, 2, 3],
];

/// The five subset sums over `(a_2, a_3, a_4)` used for the conic bundle
/// over `F_1` in degree 4.
pub const SUMS_FIVE: [&[usize]; 5] = [&[0], &[0, 1], &[0, 2], &[1, 2], &[0, 1, 2]];

/// Largest listed subset sum not exceeding 1, or 0 if there is none.
pub fn largest_admissible_sum(values: &[Rational], family: &[&[usize]]) -> Rational {
    admissible_subset(values, family).map_or_else(Rational::zero, |(_, n)| n)
}

/// The first subset in `family` order whose sum is the largest admissible
/// one, together with that sum.
pub fn admissible_subset<'f>(values: &[Rational], family: &[&'f [usize]]) -> Option<(&'f [usize], Rational)> {
    let one = Rational::one();
    let mut best: Option<(&[usize], Rational)> = None;
    for subset in family {
        let sum: Rational = subset.iter().map(|&i| &values[i]).sum();
        if sum > one {
            continue;
        }
        if best.as_ref().is_none_or(|(_, b)| sum > *b) {
            best = Some((subset, sum));
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Component {
    pub label: String,
    pub class: DivClass,
    pub coefficient: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub divisor: Vec<Component>,
    pub witness_index: usize,
    pub bound: Rational,
}

impl Certificate {
    pub fn witness(&self) -> &Component {
        &self.divisor[self.witness_index]
    }

    /// `sum c_i G_i`.
    pub fn total(&self, s: &SurfaceModel) -> DivClass {
        self.divisor
            .iter()
            .fold(s.zero(), |acc, c| acc.add_scaled(&c.coefficient, &c.class))
    }
}

struct Builder {
    parts: Vec<Component>,
}

impl Builder {
    fn new() -> Self {
        Builder { parts: Vec::new() }
    }

    fn add(&mut self, label: impl Into<String>, class: &DivClass, coefficient: Rational) {
        self.parts.push(Component {
            label: label.into(),
            class: class.clone(),
            coefficient,
        });
    }

    fn finish(self, s: &SurfaceModel, target: &DivClass) -> Result<Certificate> {
        let mut merged: Vec<Component> = Vec::new();
        for part in self.parts {
            if part.coefficient.is_negative() {
                return Err(Error::Invariant(format!(
                    "certificate coefficient {} on {} is negative",
                    part.coefficient, part.label
                )));
            }
            match merged.iter_mut().find(|m| m.class == part.class) {
                Some(m) => {
                    m.coefficient += &part.coefficient;
                    if !m.label.split('=').any(|l| l == part.label) {
                        m.label = format!("{}={}", m.label, part.label);
                    }
                }
                None => merged.push(part),
            }
        }
        merged.retain(|c| !c.coefficient.is_zero());
        let curves = minus_one_curves(s);
        for c in &merged {
            if !curves.contains(&c.class) {
                return Err(Error::Invariant(format!(
                    "component {} = {} is not a (-1)-curve",
                    c.label, c.class
                )));
            }
        }
        let (witness_index, top) = merged
            .iter()
            .enumerate()
            .fold(None::<(usize, &Rational)>, |best, (i, c)| match best {
                Some((_, b)) if *b >= c.coefficient => best,
                _ => Some((i, &c.coefficient)),
            })
            .ok_or_else(|| Error::Invariant("empty certificate".into()))?;
        let bound = top.recip();
        let cert = Certificate {
            divisor: merged,
            witness_index,
            bound,
        };
        let total = cert.total(s);
        if total != *target {
            return Err(Error::Invariant(format!(
                "certificate sums to {total}, expected {target}"
            )));
        }
        Ok(cert)
    }
}

fn half(x: Rational) -> Rational {
    x / Rational::integer(2)
}

fn require(cond: bool, what: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Invariant(format!("curve realization failed: {what}")))
    }
}

/// Pullback of a line under the blow-down of the disjoint curves `es`.
fn line_class(s: &SurfaceModel, es: &[DivClass]) -> Result<DivClass> {
    let sum = es.iter().fold(s.zero(), |acc, e| &acc + e);
    let h = (&s.anticanonical() + &sum).scale(&q(1, 3));
    require(h.is_integral(), "line class is not integral")?;
    require(h.dot(&h) == Rational::one(), "line class has square 1")?;
    require(
        es.iter().all(|e| h.dot(e).is_zero()),
        "line class misses the contracted curves",
    )?;
    Ok(h)
}

/// Builds the certificate prescribed for the contraction `cd`.
pub fn certificate(s: &SurfaceModel, cd: &ContractionData) -> Result<Certificate> {
    let d = s.degree();
    if !(4..=7).contains(&d) {
        return Err(Error::Domain(format!("certificates exist for degrees 4..=7, got {d}")));
    }
    cd.validate(s)?;
    let target = cd.reconstruct(s);
    let b = match cd.kind {
        ContractionKind::ToP2 => plane_certificate(s, cd)?,
        ContractionKind::ConicBundleF1 => f1_certificate(s, cd)?,
        ContractionKind::ConicBundleP1P1 => quadric_certificate(s, cd)?,
    };
    b.finish(s, &target)
}

fn plane_certificate(s: &SurfaceModel, cd: &ContractionData) -> Result<Builder> {
    let es = &cd.curve_e;
    let a = &cd.a;
    let h = line_class(s, es)?;
    let line = |i: usize| &(&h - &es[0]) - &es[i];
    let mut b = Builder::new();
    let two = Rational::integer(2);
    match s.degree() {
        7 => {
            b.add("L12", &line(1), Rational::integer(3));
            b.add("E1", &es[0], &two + &a[0]);
            b.add("E2", &es[1], &two + &a[1]);
        }
        6 => {
            b.add("L12", &line(1), two.clone());
            b.add("L13", &line(2), Rational::one());
            b.add("E1", &es[0], &two + &a[0]);
            b.add("E2", &es[1], Rational::one() + &a[1]);
            b.add("E3", &es[2], a[2].clone());
        }
        5 => {
            for i in 1..4 {
                b.add(format!("L1{}", i + 1), &line(i), Rational::one());
            }
            b.add("E1", &es[0], &two + &a[0]);
            for i in 1..4 {
                b.add(format!("E{}", i + 1), &es[i], a[i].clone());
            }
        }
        _ => {
            let (t, n) = admissible_subset(&a[1..], &SUMS_TWELVE).unwrap_or((&[], Rational::zero()));
            quartic_table(&mut b, &h, es, a, t, &n, &Rational::zero(), None);
        }
    }
    Ok(b)
}

/// The degree-4 divisor `(3+2a_1+N)/2 E_1 + (1-N)/2 Z + ...` for the index
/// subset `t` of `(a_2..a_5)` realizing `N`. Conic fibers `C = E_1 + E_1'`
/// add `delta (E_1 + E_1')`.
#[allow(clippy::too_many_arguments)]
fn quartic_table(
    b: &mut Builder,
    h: &DivClass,
    es: &[DivClass],
    a: &[Rational],
    t: &[usize],
    n: &Rational,
    delta: &Rational,
    e1_prime: Option<&DivClass>,
) {
    let one = Rational::one();
    let z = es.iter().fold(h.scale(&Rational::integer(2)), |acc, e| &acc - e);
    b.add(
        "E1",
        &es[0],
        half(Rational::integer(3) + &a[0] * Rational::integer(2) + n),
    );
    b.add("Z", &z, half(&one - n));
    for i in 1..5 {
        let line = &(h - &es[0]) - &es[i];
        let label = format!("L1{}", i + 1);
        if t.contains(&(i - 1)) {
            b.add(label, &line, half(&one + n - &a[i] * Rational::integer(2)));
        } else {
            b.add(label, &line, half(&one + n));
            b.add(format!("E{}", i + 1), &es[i], a[i].clone());
        }
    }
    if let Some(e1p) = e1_prime {
        b.add("E1", &es[0], delta.clone());
        b.add("E1'", e1p, delta.clone());
    }
}

fn f1_certificate(s: &SurfaceModel, cd: &ContractionData) -> Result<Builder> {
    let c = cd.curve_c.as_ref().expect("validated conic data has a fiber");
    let v = section_curve(s, &cd.curve_e, c)
        .ok_or_else(|| Error::Invariant("no section curve for an F1 contraction".into()))?;
    let mut es = cd.curve_e.clone();
    es.push(v.clone());
    let mut a = cd.a.clone();
    a.push(Rational::zero());
    let h = line_class(s, &es)?;
    require(h == c + &v, "line class equals fiber plus section")?;
    let line = |i: usize| &(&h - &es[0]) - &es[i];
    let delta = &cd.delta;
    let one = Rational::one();
    let two = Rational::integer(2);
    let mut b = Builder::new();
    match s.degree() {
        7 => {
            b.add("L12", &line(1), Rational::integer(3) + delta);
            b.add("E1", &es[0], &two + delta + &a[0]);
            b.add("E2", &es[1], two.clone());
        }
        6 => {
            b.add("L12", &line(1), two.clone());
            b.add("L13", &line(2), &one + delta);
            b.add("E1", &es[0], &two + delta + &a[0]);
            b.add("E2", &es[1], &one + &a[1]);
        }
        5 => {
            b.add("L12", &line(1), one.clone());
            b.add("L13", &line(2), one.clone());
            b.add("L14", &line(3), &one + delta);
            b.add("E1", &es[0], &two + delta + &a[0]);
            b.add("E2", &es[1], a[1].clone());
            b.add("E3", &es[2], a[2].clone());
        }
        _ => {
            let e1p = c - &es[0];
            require(minus_one_curves(s).contains(&e1p), "fiber minus E1 is a (-1)-curve")?;
            let (t, n) = admissible_subset(&a[1..4], &SUMS_FIVE).unwrap_or((&[], Rational::zero()));
            quartic_table(&mut b, &h, &es, &a, t, &n, delta, Some(&e1p));
        }
    }
    Ok(b)
}

/// Index subset of `(a_2, a_3, a_4)` selected by the four-case rule for the
/// conic bundle over the quadric.
pub fn quadric_case(a2: &Rational, a3: &Rational, a4: &Rational) -> &'static [usize] {
    let one = Rational::one();
    if a2 + a3 <= &one + a4 {
        &[0, 1, 2]
    } else if a2 + a4 <= one {
        &[0, 2]
    } else if a3 + a4 <= one {
        &[1, 2]
    } else {
        &[0]
    }
}

fn quadric_certificate(s: &SurfaceModel, cd: &ContractionData) -> Result<Builder> {
    let c = cd.curve_c.as_ref().expect("validated conic data has a fiber");
    let es = &cd.curve_e;
    let a = &cd.a;
    let delta = &cd.delta;
    let sum = es.iter().fold(s.zero(), |acc, e| &acc + e);
    let cp = &(&s.anticanonical() + &sum).scale(&q(1, 2)) - c;
    require(cp.is_integral(), "second ruling is integral")?;
    require(
        cp.dot(&cp).is_zero() && cp.dot(c) == Rational::one(),
        "second ruling meets the fiber once",
    )?;
    require(
        es.iter().all(|e| cp.dot(e).is_zero()),
        "second ruling misses the contracted curves",
    )?;
    let f = |i: usize| c - &es[i];
    let fp = |i: usize| &cp - &es[i];
    let zc = |j: usize, k: usize| &(&(&(c + &cp) - &es[0]) - &es[j]) - &es[k];
    let one = Rational::one();
    let two = Rational::integer(2);
    let three = Rational::integer(3);
    let mut b = Builder::new();
    match s.degree() {
        7 => {
            b.add("E1", &es[0], &three + &a[0] + delta);
            b.add("F1", &f(0), &two + delta);
            b.add("F1'", &fp(0), two.clone());
        }
        6 => {
            b.add("F1", &f(0), q(3, 2) + delta);
            b.add("F1'", &fp(0), q(3, 2));
            b.add("F2", &f(1), q(1, 2));
            b.add("F2'", &fp(1), q(1, 2));
            b.add("E1", &es[0], &two + delta + &a[0]);
            b.add("E2", &es[1], a[1].clone());
        }
        5 => {
            b.add("F1", &f(0), &one + delta);
            b.add("F1'", &fp(0), one.clone());
            b.add("Z23", &zc(1, 2), one.clone());
            b.add("E1", &es[0], &two + delta + &a[0]);
            b.add("E2", &es[1], a[1].clone());
            b.add("E3", &es[2], a[2].clone());
        }
        _ => {
            let t = quadric_case(&a[1], &a[2], &a[3]);
            let n: Rational = t.iter().map(|&i| &a[i + 1]).sum();
            b.add("E1", &es[0], half(&three + &a[0] * &two + delta * &two + &n));
            b.add("F1", &f(0), half(&one + delta * &two + &n));
            b.add("F1'", &fp(0), half(&one + &n));
            for (j, k) in [(1usize, 2usize), (1, 3), (2, 3)] {
                let signed: Rational = t
                    .iter()
                    .map(|&i| {
                        let x = &a[i + 1];
                        if i + 1 == j || i + 1 == k {
                            -x
                        } else {
                            x.clone()
                        }
                    })
                    .sum();
                b.add(format!("Z{}{}", j + 1, k + 1), &zc(j, k), half(&one + signed));
            }
            for i in 1..4 {
                if !t.contains(&(i - 1)) {
                    b.add(format!("E{}", i + 1), &es[i], a[i].clone());
                }
            }
        }
    }
    Ok(b)
}

/// `nu(L)` from the normal form alone.
pub fn nu_from_data(s: &SurfaceModel, cd: &ContractionData) -> Rational {
    let d = Rational::integer(s.degree() as i64);
    let sum: Rational = cd.a.iter().sum();
    let sq: Rational = cd.a.iter().map(|x| x * x).sum();
    let two = Rational::integer(2);
    let four = Rational::integer(4);
    (&d + &two * &cd.delta + &sum) / (&d + &four * &cd.delta + &two * &sum - sq)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SlopeComparison {
    pub bound: Rational,
    pub two_thirds_nu: Rational,
    pub strict: bool,
    pub equality: bool,
}

/// Compares the certified upper bound with `(2/3) nu(L)`. Equality is
/// expected only for `L = -K` in degree 4; anything else that is not strict
/// is an invariant violation. In degree 4 the comparison is repeated through
/// the independent evaluator in [`crate::appendix`].
pub fn compare_with_slope(s: &SurfaceModel, cd: &ContractionData, cert: &Certificate) -> Result<SlopeComparison> {
    let l = cd.reconstruct(s);
    let nu_l = nu(&l, s)?;
    if nu_l != nu_from_data(s, cd) {
        return Err(Error::Invariant(format!(
            "slope {nu_l} disagrees with the normal-form value {}",
            nu_from_data(s, cd)
        )));
    }
    let two_thirds_nu = q(2, 3) * &nu_l;
    let bound = cert.bound.clone();
    let cmp = SlopeComparison {
        strict: bound < two_thirds_nu,
        equality: bound == two_thirds_nu,
        bound,
        two_thirds_nu,
    };
    let equality_point = s.degree() == 4 && cd.is_zero_face();
    if cmp.equality != equality_point || !(cmp.strict || cmp.equality) {
        return Err(Error::Invariant(format!(
            "bound {} vs 2/3 nu = {} (degree {}, {})",
            cmp.bound,
            cmp.two_thirds_nu,
            s.degree(),
            cd.kind
        )));
    }
    if s.degree() == 4 {
        check_against_appendix(cd, &cmp)?;
    }
    Ok(cmp)
}

fn check_against_appendix(cd: &ContractionData, cmp: &SlopeComparison) -> Result<()> {
    let mut a = cd.a.clone();
    a.resize(5, Rational::zero());
    let inp = AppendixInput::new(a, cd.delta.clone())
        .map_err(|e| Error::Invariant(format!("normal form rejected by the appendix evaluator: {e}")))?;
    let (lhs, rhs) = match cd.kind {
        ContractionKind::ToP2 | ContractionKind::ConicBundleF1 => {
            (appendix::first_lhs(&inp), appendix::first_rhs(&inp))
        }
        ContractionKind::ConicBundleP1P1 => (appendix::alpha_piecewise(&inp), appendix::second_rhs(&inp)),
    };
    if lhs != cmp.bound || rhs != cmp.two_thirds_nu {
        return Err(Error::Invariant(format!(
            "appendix evaluation ({lhs}, {rhs}) disagrees with certificate ({}, {})",
            cmp.bound, cmp.two_thirds_nu
        )));
    }
    Ok(())
}

/// Rationals `p/q` with `q <= max_den` in `[lo, hi)`, plus `hi` itself if
/// `include_hi`, sorted.
pub fn farey_range(max_den: u32, lo: &Rational, hi: &Rational, include_hi: bool) -> Vec<Rational> {
    let mut out = Vec::new();
    for den in 1..=max_den as i64 {
        let start = (lo * Rational::integer(den)).numer().clone();
        let mut p: i64 = i64::try_from(start).unwrap_or(0);
        loop {
            let x = q(p, den);
            if x > *hi || (!include_hi && x == *hi) {
                break;
            }
            if x >= *lo {
                out.push(x);
            }
            p += 1;
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Nonincreasing `len`-tuples drawn from `values`.
pub fn nonincreasing_tuples(values: &[Rational], len: usize) -> Vec<Vec<Rational>> {
    let mut desc = values.to_vec();
    desc.sort_by(|x, y| y.cmp(x));
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(len);
    fn rec(desc: &[Rational], start: usize, len: usize, cur: &mut Vec<Rational>, out: &mut Vec<Vec<Rational>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for i in start..desc.len() {
            cur.push(desc[i].clone());
            rec(desc, i, len, cur, out);
            cur.pop();
        }
    }
    rec(&desc, 0, len, &mut cur, &mut out);
    out
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GridReport {
    pub points: usize,
    pub equality_points: usize,
    pub failures: Vec<String>,
}

/// Builds and checks the certificate at every grid point for one degree
/// and contraction kind: `a_i` range over fractions with denominator at
/// most `max_den` in `[0, 1)`, and `delta` over the same denominators in
/// `[0, delta_max]` (held at zero for the plane contraction).
pub fn grid_check(degree: u8, kind: ContractionKind, max_den: u32, delta_max: &Rational) -> Result<GridReport> {
    let s = SurfaceModel::new(degree)?;
    let len = match kind {
        ContractionKind::ToP2 => s.r(),
        _ => s.r() - 1,
    };
    let avals = farey_range(max_den, &Rational::zero(), &Rational::one(), false);
    let deltas = match kind {
        ContractionKind::ToP2 => vec![Rational::zero()],
        _ => farey_range(max_den, &Rational::zero(), delta_max, true),
    };
    let tuples = nonincreasing_tuples(&avals, len);
    let jobs: Vec<(&Rational, &Vec<Rational>)> =
        deltas.iter().flat_map(|d| tuples.iter().map(move |a| (d, a))).collect();
    let mut report = jobs
        .par_iter()
        .map(|(delta, a)| {
            let mut r = GridReport {
                points: 1,
                ..GridReport::default()
            };
            match check_point(&s, kind, delta, a) {
                Ok(cmp) => r.equality_points += usize::from(cmp.equality),
                Err(e) => r.failures.push(format!("delta={delta} a={a:?}: {e}")),
            }
            r
        })
        .reduce(GridReport::default, |mut x, y| {
            x.points += y.points;
            x.equality_points += y.equality_points;
            x.failures.extend(y.failures);
            x
        });
    report.failures.sort();
    Ok(report)
}

fn check_point(s: &SurfaceModel, kind: ContractionKind, delta: &Rational, a: &[Rational]) -> Result<SlopeComparison> {
    let cd = ContractionData::standard(s, kind, delta.clone(), a.to_vec())?;
    let cert = certificate(s, &cd)?;
    compare_with_slope(s, &cd, &cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones::face_decompose;
    use proptest::prelude::*;

    fn model(d: u8) -> SurfaceModel {
        SurfaceModel::new(d).unwrap()
    }

    fn rs(v: &[(i64, i64)]) -> Vec<Rational> {
        v.iter().map(|&(n, d)| q(n, d)).collect()
    }

    #[test]
    fn admissible_sums() {
        assert_eq!(largest_admissible_sum(&rs(&[(0, 1); 4]), &SUMS_TWELVE), q(0, 1));
        assert_eq!(
            largest_admissible_sum(&rs(&[(3, 5), (1, 2), (3, 10), (1, 5)]), &SUMS_TWELVE),
            q(1, 1)
        );
        assert_eq!(largest_admissible_sum(&rs(&[(9, 10); 4]), &SUMS_TWELVE), q(9, 10));
        assert_eq!(largest_admissible_sum(&rs(&[(1, 2)]), &[]), q(0, 1));
    }

    #[test]
    fn degree_seven_plane() {
        let s = model(7);
        let cd = ContractionData::standard(&s, ContractionKind::ToP2, q(0, 1), rs(&[(1, 2), (1, 3)])).unwrap();
        let cert = certificate(&s, &cd).unwrap();
        let coeffs: Vec<_> = cert
            .divisor
            .iter()
            .map(|c| (c.label.as_str(), c.coefficient.clone()))
            .collect();
        assert_eq!(coeffs, vec![("L12", q(3, 1)), ("E1", q(5, 2)), ("E2", q(7, 3))]);
        assert_eq!(cert.divisor[0].class, s.class_from_ints(1, &[-1, -1]).unwrap());
        assert_eq!(cert.bound, q(1, 3));
        assert_eq!(cert.witness().label, "L12");
    }

    #[test]
    fn degree_four_table_row() {
        let s = model(4);
        let cd = ContractionData::standard(
            &s,
            ContractionKind::ToP2,
            q(0, 1),
            rs(&[(1, 2), (1, 3), (1, 4), (0, 1), (0, 1)]),
        )
        .unwrap();
        let (t, n) = admissible_subset(&cd.a[1..], &SUMS_TWELVE).unwrap();
        assert_eq!(t, &[0, 1]);
        assert_eq!(n, q(7, 12));
        let cert = certificate(&s, &cd).unwrap();
        assert_eq!(cert.witness().label, "E1");
        assert_eq!(cert.witness().coefficient, q(55, 24));
        assert_eq!(cert.bound, q(24, 55));
    }

    #[test]
    fn degree_four_anticanonical_equality() {
        let s = model(4);
        let cd = face_decompose(&s.anticanonical(), &s).unwrap();
        let cert = certificate(&s, &cd).unwrap();
        assert_eq!(cert.bound, q(2, 3));
        let cmp = compare_with_slope(&s, &cd, &cert).unwrap();
        assert!(cmp.equality && !cmp.strict);
    }

    #[test]
    fn degree_four_strict_example() {
        let s = model(4);
        let cd = ContractionData::standard(
            &s,
            ContractionKind::ToP2,
            q(0, 1),
            rs(&[(1, 2), (0, 1), (0, 1), (0, 1), (0, 1)]),
        )
        .unwrap();
        let cert = certificate(&s, &cd).unwrap();
        let cmp = compare_with_slope(&s, &cd, &cert).unwrap();
        assert_eq!(cmp.bound, q(1, 2));
        assert_eq!(cmp.two_thirds_nu, q(12, 19));
        assert!(cmp.strict);
    }

    #[test]
    fn conic_bundles_in_every_degree() {
        for d in 4..=7u8 {
            let s = model(d);
            let n = s.r() - 1;
            for kind in [ContractionKind::ConicBundleF1, ContractionKind::ConicBundleP1P1] {
                let a: Vec<Rational> = (0..n).map(|i| q(1, 2 + i as i64)).collect();
                let cd = ContractionData::standard(&s, kind, q(2, 3), a).unwrap();
                let cert = certificate(&s, &cd).unwrap();
                assert_eq!(cert.total(&s), cd.reconstruct(&s));
                assert!(compare_with_slope(&s, &cd, &cert).unwrap().strict);
            }
        }
    }

    #[test]
    fn quadric_bounds_by_degree() {
        let s = model(7);
        let cd = ContractionData::standard(&s, ContractionKind::ConicBundleP1P1, q(1, 2), rs(&[(1, 3)])).unwrap();
        assert_eq!(certificate(&s, &cd).unwrap().bound, q(6, 23));
        let s = model(4);
        let cd = ContractionData::standard(
            &s,
            ContractionKind::ConicBundleP1P1,
            q(1, 3),
            rs(&[(9, 10), (9, 10), (4, 5), (3, 5)]),
        )
        .unwrap();
        // a2 + a3 > 1 + a4, a2 + a4 > 1, a3 + a4 > 1: only a2 survives
        assert_eq!(quadric_case(&cd.a[1], &cd.a[2], &cd.a[3]), &[0]);
        let cert = certificate(&s, &cd).unwrap();
        assert_eq!(cert.bound, q(2, 1) / (q(3, 1) + q(9, 5) + q(2, 3) + q(9, 10)));
    }

    #[test]
    fn f1_merges_the_repeated_curve() {
        let s = model(4);
        let cd = ContractionData::standard(
            &s,
            ContractionKind::ConicBundleF1,
            q(1, 2),
            rs(&[(1, 3), (1, 4), (0, 1), (0, 1)]),
        )
        .unwrap();
        let cert = certificate(&s, &cd).unwrap();
        assert!(cert.divisor.iter().any(|c| c.label == "L15=E1'"));
        assert_eq!(cert.bound, q(2, 1) / (q(3, 1) + q(2, 3) + q(1, 1) + q(1, 4)));
    }

    #[test]
    fn small_grids_pass() {
        for d in 4..=7u8 {
            for kind in [
                ContractionKind::ToP2,
                ContractionKind::ConicBundleF1,
                ContractionKind::ConicBundleP1P1,
            ] {
                let r = grid_check(d, kind, 3, &q(1, 1)).unwrap();
                assert!(r.failures.is_empty(), "{:?}", r.failures);
                assert_eq!(r.equality_points, usize::from(d == 4));
            }
        }
    }

    #[test]
    fn out_of_range_degree() {
        let s = model(3);
        let cd = ContractionData {
            kind: ContractionKind::ToP2,
            delta: q(0, 1),
            a: vec![],
            curve_e: vec![],
            curve_c: None,
        };
        assert!(matches!(certificate(&s, &cd), Err(Error::Domain(_))));
    }

    #[test]
    fn farey_values() {
        assert_eq!(farey_range(6, &q(0, 1), &q(1, 1), false).len(), 12);
        assert_eq!(farey_range(6, &q(0, 1), &q(2, 1), true).len(), 25);
        assert_eq!(nonincreasing_tuples(&rs(&[(0, 1), (1, 2)]), 2).len(), 3);
    }

    fn unit_fraction() -> impl Strategy<Value = Rational> {
        (0i64..12, 1i64..=12).prop_map(|(p, d)| q(p.min(d - 1), d))
    }

    proptest! {
        #[test]
        fn bound_does_not_grow_with_a1(
            d in 4u8..=7,
            kind_idx in 0usize..3,
            mut a in prop::collection::vec(unit_fraction(), 5),
            bump in unit_fraction(),
            delta in (0i64..=12, 1i64..=6).prop_map(|(p, d)| q(p, d)),
        ) {
            let s = model(d);
            let kind = [ContractionKind::ToP2, ContractionKind::ConicBundleF1, ContractionKind::ConicBundleP1P1][kind_idx];
            let len = if kind == ContractionKind::ToP2 { s.r() } else { s.r() - 1 };
            let delta = if kind == ContractionKind::ToP2 { q(0, 1) } else { delta };
            a.truncate(len);
            a.sort_by(|x, y| y.cmp(x));
            let mut bigger = a.clone();
            bigger[0] = (&a[0] + &bump * (q(1, 1) - &a[0]) / q(2, 1)).max(a[0].clone());
            let lo = certificate(&s, &ContractionData::standard(&s, kind, delta.clone(), a).unwrap()).unwrap();
            let hi = certificate(&s, &ContractionData::standard(&s, kind, delta, bigger).unwrap()).unwrap();
            prop_assert!(hi.bound <= lo.bound);
        }
    }
}
