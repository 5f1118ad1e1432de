//! Elementary symmetric polynomials, jumped Vandermonde matrices and the
//! constructive searches for tuples on which they do not vanish.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use thiserror::Error;

use crate::gf::{is_prime, FieldElement, FieldSpec};
use crate::linalg::FieldMatrix;

/// Exhaustive fallback searches only run in fields of at most this order.
pub const EXHAUSTIVE_SEARCH_LIMIT: u32 = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymfunError {
    #[error("invalid exponent profile l={l}, i={i}, j={j}")]
    BadProfile { l: usize, i: usize, j: usize },
    #[error("profile has {rows} rows but {cols} points were given")]
    NonSquareProfile { rows: usize, cols: usize },
    #[error("no admissible tuple found")]
    SearchExhausted,
}

/// Row exponents `{0, ..., l+1} \ {i, j}` of a jumped Vandermonde matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExponentProfile {
    l: usize,
    i: usize,
    j: usize,
    row_exponents: Vec<u32>,
}

impl ExponentProfile {
    pub fn new(l: usize, i: usize, j: usize) -> Result<Self, SymfunError> {
        if l == 0 || i >= j || j > l + 1 {
            return Err(SymfunError::BadProfile { l, i, j });
        }
        let row_exponents = (0..=(l as u32 + 1))
            .filter(|&e| e != i as u32 && e != j as u32)
            .collect();
        Ok(ExponentProfile {
            l,
            i,
            j,
            row_exponents,
        })
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn i(&self) -> usize {
        self.i
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn row_exponents(&self) -> &[u32] {
        &self.row_exponents
    }
}

/// `[σ_0, σ_1, ..., σ_n]` of `xs`, built one variable at a time with
/// `σ_k(x_1..x_n) = x_n σ_{k-1}(x_1..x_{n-1}) + σ_k(x_1..x_{n-1})`.
pub fn elementary_symmetric(field: &FieldSpec, xs: &[FieldElement]) -> Vec<FieldElement> {
    let mut sig = vec![FieldElement::ZERO; xs.len() + 1];
    sig[0] = FieldElement::ONE;
    for (n, &x) in xs.iter().enumerate() {
        for k in (1..=n + 1).rev() {
            sig[k] = field.add(sig[k], field.mul(x, sig[k - 1]));
        }
    }
    sig
}

fn pick(sig: &[FieldElement], k: i64) -> FieldElement {
    if k < 0 || k as usize >= sig.len() {
        FieldElement::ZERO
    } else {
        sig[k as usize]
    }
}

/// `σ_k(xs)`, with `σ_0 = 1` and `σ_k = 0` for `k < 0` or `k > |xs|`.
pub fn sigma(field: &FieldSpec, k: i64, xs: &[FieldElement]) -> FieldElement {
    pick(&elementary_symmetric(field, xs), k)
}

fn pair_from(field: &FieldSpec, sig: &[FieldElement], i: i64, j: i64) -> FieldElement {
    field.sub(
        field.mul(pick(sig, i), pick(sig, j + 1)),
        field.mul(pick(sig, j), pick(sig, i + 1)),
    )
}

/// `σ_{i,j} = σ_i σ_{j+1} - σ_j σ_{i+1}`.
pub fn sigma_pair(field: &FieldSpec, i: i64, j: i64, xs: &[FieldElement]) -> FieldElement {
    pair_from(field, &elementary_symmetric(field, xs), i, j)
}

/// Matrix with entry `(r, c) = xs[c]^exponents[r]`.
pub fn moment_matrix(field: &FieldSpec, exponents: &[u32], xs: &[FieldElement]) -> FieldMatrix {
    let entries = exponents
        .iter()
        .flat_map(|&e| xs.iter().map(move |&x| field.pow(x, e as u64)))
        .collect();
    FieldMatrix::new(field, exponents.len(), xs.len(), entries).expect("shape matches")
}

/// The jumped Vandermonde matrix `M_{l,i,j}(xs)`, of shape `l x |xs|`.
pub fn build_m(field: &FieldSpec, profile: &ExponentProfile, xs: &[FieldElement]) -> FieldMatrix {
    moment_matrix(field, profile.row_exponents(), xs)
}

fn vandermonde_product(field: &FieldSpec, xs: &[FieldElement]) -> FieldElement {
    let mut acc = FieldElement::ONE;
    for (l, &xl) in xs.iter().enumerate() {
        for &xk in &xs[..l] {
            acc = field.mul(acc, field.sub(xl, xk));
        }
    }
    acc
}

/// `(-1)^(i+j-1) σ_{n-i,n-j}(xs) ∏_{k<l} (x_l - x_k)` without any sign
/// correction.
pub fn printed_closed_form(
    field: &FieldSpec,
    profile: &ExponentProfile,
    xs: &[FieldElement],
) -> FieldElement {
    let n = xs.len() as i64;
    let (i, j) = (profile.i() as i64, profile.j() as i64);
    let value = field.mul(sigma_pair(field, n - i, n - j, xs), vandermonde_product(field, xs));
    if (i + j - 1) % 2 == 0 {
        value
    } else {
        field.neg(value)
    }
}

fn sign_cache() -> &'static Mutex<HashMap<(usize, usize, usize), i8>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize, usize), i8>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Sign `ε` relating the direct determinant of the square profile `(n, i, j)`
/// to [`printed_closed_form`]. Calibrated once on an instance over the
/// smallest odd prime field large enough to hold a nonvanishing tuple.
pub fn det_sign_calibration(n: usize, i: usize, j: usize) -> Result<i8, SymfunError> {
    let profile = ExponentProfile::new(n, i, j)?;
    if let Some(&eps) = sign_cache().lock().expect("cache poisoned").get(&(n, i, j)) {
        return Ok(eps);
    }
    let p = ((n as u32 + 2).max(3)..).find(|&p| is_prime(p)).expect("primes are unbounded");
    let field = FieldSpec::prime(p).expect("p is prime");
    let xs = search_sigma_pair_nonzero(&field, n, i, j, None)?;
    let direct = build_m(&field, &profile, &xs).determinant().expect("square");
    let printed = printed_closed_form(&field, &profile, &xs);
    let eps = if direct == printed {
        1
    } else if direct == field.neg(printed) {
        -1
    } else {
        panic!("closed form disagrees with the determinant beyond sign for n={n}, i={i}, j={j}");
    };
    sign_cache().lock().expect("cache poisoned").insert((n, i, j), eps);
    Ok(eps)
}

/// Closed-form determinant of a square jumped Vandermonde matrix together
/// with the calibrated sign it carries.
pub fn jumped_vandermonde_det(
    field: &FieldSpec,
    profile: &ExponentProfile,
    xs: &[FieldElement],
) -> Result<(FieldElement, i8), SymfunError> {
    if xs.len() != profile.l() {
        return Err(SymfunError::NonSquareProfile {
            rows: profile.l(),
            cols: xs.len(),
        });
    }
    let eps = det_sign_calibration(profile.l(), profile.i(), profile.j())?;
    let value = printed_closed_form(field, profile, xs);
    Ok((if eps == 1 { value } else { field.neg(value) }, eps))
}

/// Appends the first unused element (in rank order) that keeps `accept` true.
fn extend(
    field: &FieldSpec,
    prefix: &[FieldElement],
    accept: impl Fn(&[FieldElement]) -> bool,
) -> Option<Vec<FieldElement>> {
    let mut candidate = prefix.to_vec();
    candidate.push(FieldElement::ZERO);
    for x in field.enumerate() {
        if prefix.contains(&x) {
            continue;
        }
        *candidate.last_mut().expect("nonempty") = x;
        if accept(&candidate) {
            return Some(candidate);
        }
    }
    None
}

/// `n` distinct elements, starting with `fixed` if given, otherwise in rank
/// order.
fn distinct_prefix(field: &FieldSpec, n: usize, fixed: Option<FieldElement>) -> Option<Vec<FieldElement>> {
    if n == 0 {
        return Some(Vec::new());
    }
    let mut out: Vec<FieldElement> = fixed.into_iter().collect();
    out.extend(field.enumerate().filter(|x| Some(*x) != fixed).take(n - out.len()));
    (out.len() == n).then_some(out)
}

fn greedy_sigma(field: &FieldSpec, n: usize, k: usize, fixed: Option<FieldElement>) -> Option<Vec<FieldElement>> {
    if k == 0 {
        return distinct_prefix(field, n, fixed);
    }
    if k > n {
        return None;
    }
    if n == 1 {
        // k == 1: σ_1(x) = x
        return match fixed {
            Some(x) => (!x.is_zero()).then(|| vec![x]),
            None => Some(vec![FieldElement::ONE]),
        };
    }
    // σ_k(.., x) = x σ_{k-1}(..) + σ_k(..): at most one bad choice of x.
    let base = greedy_sigma(field, n - 1, k - 1, fixed)?;
    extend(field, &base, |xs| !sigma(field, k as i64, xs).is_zero())
}

fn greedy_sigma_pair(
    field: &FieldSpec,
    n: usize,
    a: i64,
    b: i64,
    fixed: Option<FieldElement>,
) -> Option<Vec<FieldElement>> {
    if b == -1 {
        // σ_{a,-1} = σ_a
        return greedy_sigma(field, n, a as usize, fixed);
    }
    let target = |xs: &[FieldElement]| !sigma_pair(field, a, b, xs).is_zero();
    if n == 1 {
        let xs = match fixed {
            Some(x) => vec![x],
            None => extend(field, &[], target)?,
        };
        return target(&xs).then_some(xs);
    }
    // σ_{a,b}(.., x) is quadratic in x with leading coefficient
    // σ_{a-1,b-1}(..): at most two bad choices once that is nonzero.
    let base = greedy_sigma_pair(field, n - 1, a - 1, b - 1, fixed)?;
    extend(field, &base, target)
}

fn exhaustive(
    field: &FieldSpec,
    n: usize,
    fixed: Option<FieldElement>,
    accept: &dyn Fn(&[FieldElement]) -> bool,
) -> Option<Vec<FieldElement>> {
    if field.q() > EXHAUSTIVE_SEARCH_LIMIT {
        return None;
    }
    let pool: Vec<FieldElement> = field.enumerate().filter(|x| Some(*x) != fixed).collect();
    let free = n - fixed.is_some() as usize;
    if free > pool.len() {
        return None;
    }
    // Symmetric targets only depend on the set, so combinations suffice.
    let mut idx: Vec<usize> = (0..free).collect();
    loop {
        let xs: Vec<FieldElement> = fixed
            .into_iter()
            .chain(idx.iter().map(|&k| pool[k]))
            .collect();
        if accept(&xs) {
            return Some(xs);
        }
        let mut pos = free;
        loop {
            if pos == 0 {
                return None;
            }
            pos -= 1;
            if idx[pos] < pool.len() - free + pos {
                break;
            }
        }
        idx[pos] += 1;
        for k in pos + 1..free {
            idx[k] = idx[k - 1] + 1;
        }
    }
}

/// `n` distinct elements with `σ_k ≠ 0`, built by extending a tuple with
/// `σ_{k-1} ≠ 0` by one element.
pub fn search_sigma_nonzero(
    field: &FieldSpec,
    n: usize,
    k: usize,
) -> Result<Vec<FieldElement>, SymfunError> {
    let accept = |xs: &[FieldElement]| !sigma(field, k as i64, xs).is_zero();
    greedy_sigma(field, n, k, None)
        .filter(|xs| accept(xs))
        .or_else(|| exhaustive(field, n, None, &accept))
        .ok_or(SymfunError::SearchExhausted)
}

/// `n` distinct elements with `σ_{n-i,n-j} ≠ 0`, optionally starting with a
/// prescribed first element.
///
/// The tuple for `(n, i, j)` extends one for `(n-1, i, j)` (whose pair
/// indices are both one lower), bottoming out in [`search_sigma_nonzero`]'s
/// recursion once the second index reaches -1.
pub fn search_sigma_pair_nonzero(
    field: &FieldSpec,
    n: usize,
    i: usize,
    j: usize,
    fixed_first: Option<FieldElement>,
) -> Result<Vec<FieldElement>, SymfunError> {
    if n == 0 || i >= j || j > n + 1 {
        return Err(SymfunError::BadProfile { l: n, i, j });
    }
    let (a, b) = (n as i64 - i as i64, n as i64 - j as i64);
    let accept = |xs: &[FieldElement]| !sigma_pair(field, a, b, xs).is_zero();
    greedy_sigma_pair(field, n, a, b, fixed_first)
        .filter(|xs| accept(xs))
        .or_else(|| exhaustive(field, n, fixed_first, &accept))
        .ok_or(SymfunError::SearchExhausted)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn els(rs: &[u32]) -> Vec<FieldElement> {
        rs.iter().map(|&r| FieldElement::from_rank(r)).collect()
    }

    fn distinct(xs: &[FieldElement]) -> bool {
        xs.iter().enumerate().all(|(k, x)| !xs[..k].contains(x))
    }

    #[test]
    fn sigma_examples() {
        let f7 = FieldSpec::prime(7).unwrap();
        let xs = els(&[1, 2, 3]);
        assert_eq!(sigma(&f7, 0, &xs), FieldElement::ONE);
        assert_eq!(sigma(&f7, 0, &[]), FieldElement::ONE);
        assert_eq!(sigma(&f7, -1, &xs), FieldElement::ZERO);
        assert_eq!(sigma(&f7, 2, &xs).rank(), 4);
        assert_eq!(sigma(&f7, 4, &xs), FieldElement::ZERO);
        assert_eq!(sigma(&f7, -3, &xs), FieldElement::ZERO);
    }

    #[test]
    fn sigma_pair_examples() {
        let f7 = FieldSpec::prime(7).unwrap();
        for xs in [els(&[3]), els(&[1, 5]), els(&[2, 4, 6])] {
            assert_eq!(sigma_pair(&f7, 0, -1, &xs), FieldElement::ONE);
        }
        let xs = els(&[4, 5]);
        assert_eq!(sigma_pair(&f7, 1, -1, &xs), f7.add(xs[0], xs[1]));
        // σ2 σ2 - σ1 σ3 = 16 - 36 = -20 = 1 (mod 7)
        assert_eq!(sigma_pair(&f7, 2, 1, &els(&[1, 2, 3])).rank(), 1);
    }

    #[test]
    fn profiles_and_matrices() {
        assert_eq!(ExponentProfile::new(2, 1, 3).unwrap().row_exponents(), &[0, 2]);
        assert_eq!(ExponentProfile::new(3, 2, 3).unwrap().row_exponents(), &[0, 1, 4]);
        assert!(ExponentProfile::new(2, 3, 3).is_err());
        assert!(ExponentProfile::new(2, 1, 4).is_err());

        let f7 = FieldSpec::prime(7).unwrap();
        let p = ExponentProfile::new(2, 1, 3).unwrap();
        let m = build_m(&f7, &p, &els(&[3, 5]));
        assert_eq!(m, FieldMatrix::from_ranks(&f7, &[&[1, 1], &[2, 4]]));
        let m = build_m(&f7, &p, &els(&[1, 2, 3, 4]));
        assert_eq!((m.rows(), m.cols()), (2, 4));
    }

    #[test]
    fn closed_form_examples() {
        let f7 = FieldSpec::prime(7).unwrap();
        let p = ExponentProfile::new(2, 1, 3).unwrap();
        let xs = els(&[1, 2]);
        let direct = build_m(&f7, &p, &xs).determinant().unwrap();
        assert_eq!(direct.rank(), 3);
        let (value, eps) = jumped_vandermonde_det(&f7, &p, &xs).unwrap();
        assert_eq!(value, direct);
        // x2^2 - x1^2 = +σ_1 (x2 - x1) while the printed sign is (-1)^3.
        assert_eq!(eps, -1);

        let (value, _) = jumped_vandermonde_det(&f7, &p, &els(&[4, 4])).unwrap();
        assert!(value.is_zero());

        // (n, n+1) is the classical Vandermonde.
        let p = ExponentProfile::new(3, 3, 4).unwrap();
        let xs = els(&[1, 3, 6]);
        let (value, _) = jumped_vandermonde_det(&f7, &p, &xs).unwrap();
        assert_eq!(value, vandermonde_product(&f7, &xs));

        assert_eq!(
            jumped_vandermonde_det(&f7, &p, &els(&[1, 2])),
            Err(SymfunError::NonSquareProfile { rows: 3, cols: 2 })
        );
    }

    #[test]
    fn search_examples() {
        let f5 = FieldSpec::prime(5).unwrap();
        let xs = search_sigma_nonzero(&f5, 3, 0).unwrap();
        assert_eq!(xs.len(), 3);
        let xs = search_sigma_nonzero(&f5, 3, 3).unwrap();
        assert!(distinct(&xs) && !xs.contains(&FieldElement::ZERO));

        let f7 = FieldSpec::prime(7).unwrap();
        let xs = search_sigma_nonzero(&f7, 4, 2).unwrap();
        assert!(distinct(&xs) && !sigma(&f7, 2, &xs).is_zero());

        let xs = search_sigma_pair_nonzero(&f5, 3, 1, 2, Some(FieldElement::ZERO)).unwrap();
        assert_eq!(xs[0], FieldElement::ZERO);
        assert!(distinct(&xs) && !sigma_pair(&f5, 2, 1, &xs).is_zero());

        let xs = search_sigma_pair_nonzero(&f7, 4, 2, 4, None).unwrap();
        assert!(distinct(&xs) && !sigma_pair(&f7, 2, 0, &xs).is_zero());

        // (n - i, n - j) = (0, -1)
        let xs = search_sigma_pair_nonzero(&f7, 3, 3, 4, None).unwrap();
        assert_eq!(xs, els(&[0, 1, 2]));
    }

    #[test]
    fn fixed_zero_with_i_zero_is_impossible() {
        // σ_{n,b} = σ_n σ_{b+1} and σ_n vanishes once a coordinate is zero.
        let f7 = FieldSpec::prime(7).unwrap();
        assert_eq!(
            search_sigma_pair_nonzero(&f7, 3, 0, 2, Some(FieldElement::ZERO)),
            Err(SymfunError::SearchExhausted)
        );
        assert!(search_sigma_pair_nonzero(&f7, 3, 0, 2, Some(FieldElement::ONE)).is_ok());
    }

    #[test]
    fn recursion_matches_subset_sums() {
        for q in [2u32, 3, 4, 5, 7, 8, 9] {
            let f = FieldSpec::of_order(q).unwrap();
            for code in 0..q.pow(4) {
                let xs: Vec<FieldElement> =
                    (0..4).map(|k| FieldElement::from_rank(code / q.pow(k) % q)).collect();
                for len in 0..=4usize {
                    let xs = &xs[..len];
                    for k in 0..=len {
                        let mut direct = FieldElement::ZERO;
                        for mask in 0u32..(1 << len) {
                            if mask.count_ones() as usize == k {
                                let prod = (0..len)
                                    .filter(|b| mask >> b & 1 == 1)
                                    .fold(FieldElement::ONE, |acc, b| f.mul(acc, xs[b]));
                                direct = f.add(direct, prod);
                            }
                        }
                        assert_eq!(sigma(&f, k as i64, xs), direct);
                    }
                }
            }
        }
    }
}
