//! Exhaustive enumeration of (-1)-curves and conic-bundle fiber classes.
//!
//! A class `a H - sum b_i E_i` has `-K . C = 3a - sum b_i` and
//! `C^2 = a^2 - sum b_i^2`, so both searches reduce to listing integer
//! vectors with a prescribed coordinate sum and sum of squares. The range of
//! `a` comes from Cauchy-Schwarz, `(sum b_i)^2 <= r sum b_i^2`.

use std::sync::OnceLock;

use crate::error::Result;
use crate::lattice::{DivClass, SurfaceModel};
use crate::rational::Rational;

static MINUS_ONE: [OnceLock<Vec<DivClass>>; 8] = [const { OnceLock::new() }; 8];
static FIBERS: [OnceLock<Vec<DivClass>>; 8] = [const { OnceLock::new() }; 8];

/// All classes `C` with `C^2 = -1` and `-K . C = 1`, in enumeration order.
///
/// On a blow-up of the plane in at most eight general points these are
/// exactly the (-1)-curves.
pub fn minus_one_curves(s: &SurfaceModel) -> &'static [DivClass] {
    MINUS_ONE[s.degree() as usize - 1].get_or_init(|| enumerate_minus_one(s))
}

/// All nef classes `C` with `C^2 = 0` and `-K . C = 2`: the fiber classes of
/// conic bundles on the surface.
pub fn fiber_classes(s: &SurfaceModel) -> &'static [DivClass] {
    FIBERS[s.degree() as usize - 1].get_or_init(|| enumerate_fibers(s))
}

/// Generators of the Mori cone: the (-1)-curves, plus the fiber `H - E_1`
/// on the degree-8 model where the (-1)-curves alone do not span it.
pub fn mori_generators(s: &SurfaceModel) -> Vec<DivClass> {
    let mut gens = minus_one_curves(s).to_vec();
    if s.degree() == 8 {
        gens.push(&s.h() - &s.e(1));
    }
    gens
}

/// Index sets (increasing, in lexicographic order) of all `k`-subsets of
/// `curves` whose members pairwise intersect in zero.
pub fn disjoint_sets(curves: &[DivClass], k: usize, s: &SurfaceModel) -> Result<Vec<Vec<usize>>> {
    for c in curves {
        s.check(c)?;
    }
    let n = curves.len();
    let disjoint: Vec<Vec<bool>> = (0..n)
        .map(|i| (0..n).map(|j| i != j && curves[i].dot(&curves[j]).is_zero()).collect())
        .collect();
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    extend_disjoint(&disjoint, k, 0, &mut current, &mut out);
    Ok(out)
}

fn extend_disjoint(
    disjoint: &[Vec<bool>],
    k: usize,
    start: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if current.len() == k {
        out.push(current.clone());
        return;
    }
    let n = disjoint.len();
    let needed = k - current.len();
    for i in start..n {
        if n - i < needed {
            break;
        }
        if current.iter().all(|&j| disjoint[i][j]) {
            current.push(i);
            extend_disjoint(disjoint, k, i + 1, current, out);
            current.pop();
        }
    }
}

fn enumerate_minus_one(s: &SurfaceModel) -> Vec<DivClass> {
    let r = s.r() as i64;
    let mut found = Vec::new();
    let mut a = 0i64;
    // 3a - sum b = 1 and sum b^2 = a^2 + 1
    while (3 * a - 1).pow(2) <= r * (a * a + 1) {
        for b in vectors_with_sum_and_norm(s.r(), -1, a.max(0), 3 * a - 1, a * a + 1) {
            found.push(to_class(a, &b));
        }
        a += 1;
    }
    finish(s, found, |c| {
        s.self_intersection(c).unwrap() == Rational::integer(-1)
            && s.anticanonical_degree(c).unwrap() == Rational::one()
    })
}

fn enumerate_fibers(s: &SurfaceModel) -> Vec<DivClass> {
    let r = s.r() as i64;
    let gens = mori_generators(s);
    let mut found = Vec::new();
    let mut a = 1i64;
    // 3a - sum b = 2 and sum b^2 = a^2
    while (3 * a - 2).pow(2) <= r * a * a {
        for b in vectors_with_sum_and_norm(s.r(), -a, a, 3 * a - 2, a * a) {
            let c = to_class(a, &b);
            if gens.iter().all(|g| !c.dot(g).is_negative()) {
                found.push(c);
            }
        }
        a += 1;
    }
    finish(s, found, |c| {
        s.self_intersection(c).unwrap().is_zero() && s.anticanonical_degree(c).unwrap() == Rational::integer(2)
    })
}

fn finish(s: &SurfaceModel, mut found: Vec<DivClass>, check: impl Fn(&DivClass) -> bool) -> Vec<DivClass> {
    found.sort_by(|x, y| x.enumeration_cmp(y));
    found.dedup();
    for c in &found {
        assert!(
            c.is_integral() && check(c),
            "enumerated class {c} fails its defining equations on degree {}",
            s.degree()
        );
    }
    found
}

fn to_class(a: i64, b: &[i64]) -> DivClass {
    DivClass {
        h: Rational::integer(a),
        e: b.iter().map(|&x| Rational::integer(-x)).collect(),
    }
}

/// All integer vectors of length `len` with entries in `lo..=hi`, entry sum
/// `sum` and sum of squares `norm`.
fn vectors_with_sum_and_norm(len: usize, lo: i64, hi: i64, sum: i64, norm: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(len);
    search(len, lo, hi, sum, norm, &mut current, &mut out);
    out
}

fn search(len: usize, lo: i64, hi: i64, sum: i64, norm: i64, current: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
    let left = (len - current.len()) as i64;
    if left == 0 {
        if sum == 0 && norm == 0 {
            out.push(current.clone());
        }
        return;
    }
    if norm < 0 || sum < left * lo || sum > left * hi || sum * sum > left * norm {
        return;
    }
    for x in lo..=hi {
        if x * x > norm {
            continue;
        }
        current.push(x);
        search(len, lo, hi, sum - x, norm - x * x, current, out);
        current.pop();
    }
}
