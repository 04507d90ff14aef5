//! Linear and cyclic codes.
//!
//! A [`LinearCode`] carries both a full-row-rank parity-check matrix and a
//! generator matrix. Codes built from a root set index coordinate `i` by the
//! evaluation point `w^i`, where `w` is the field element of order `n`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::combin;
use crate::error::{Error, Result};
use crate::gf::Field;
use crate::matrix::Matrix;

/// Exponents `i` (mod `n`) such that `w^i` is a root of every codeword polynomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootSet {
    n: usize,
    exponents: Vec<usize>,
}

impl RootSet {
    /// Reduces exponents mod `n`, sorts and deduplicates.
    pub fn new(n: usize, exponents: impl IntoIterator<Item = i64>) -> RootSet {
        let mut e: Vec<usize> = exponents
            .into_iter()
            .map(|x| arith::rem_euclid(x, n as u64) as usize)
            .collect();
        e.sort_unstable();
        e.dedup();
        RootSet { n, exponents: e }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn exponents(&self) -> &[usize] {
        &self.exponents
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }
}

/// Free-form provenance carried alongside a code in files and reports.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeMeta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearCode {
    n: usize,
    k: usize,
    field: Field,
    h: Matrix,
    g: Matrix,
    roots: Option<RootSet>,
    meta: CodeMeta,
}

/// Result of a capped minimum-distance search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Distance {
    Exact(usize),
    /// No nonzero codeword of weight `<= cap` exists.
    AboveCap(usize),
}

impl Distance {
    pub fn exact(self) -> Option<usize> {
        match self {
            Distance::Exact(d) => Some(d),
            Distance::AboveCap(_) => None,
        }
    }
}

impl LinearCode {
    /// Code with parity-check matrix `h`; dependent rows are dropped.
    pub fn from_parity(h: &Matrix) -> LinearCode {
        let rank = h.rank();
        let h = if rank == h.rows() {
            h.clone()
        } else {
            h.row_basis()
        };
        let g = h.null_space();
        LinearCode {
            n: h.cols(),
            k: g.rows(),
            field: h.field().clone(),
            h,
            g,
            roots: None,
            meta: CodeMeta::default(),
        }
    }

    /// Code spanned by the rows of `g`.
    pub fn from_generator(g: &Matrix) -> LinearCode {
        let rank = g.rank();
        let g = if rank == g.rows() {
            g.clone()
        } else {
            g.row_basis()
        };
        let h = g.null_space();
        LinearCode {
            n: g.cols(),
            k: g.rows(),
            field: g.field().clone(),
            h,
            g,
            roots: None,
            meta: CodeMeta::default(),
        }
    }

    /// Cyclic code of length `n` whose codeword polynomials vanish at `w^i`
    /// for every `i` in `roots`, with `w = alpha^((q-1)/n)`.
    pub fn from_roots(field: &Field, roots: &RootSet) -> Result<LinearCode> {
        let n = roots.n();
        let q = field.q();
        if n == 0 || !(q as usize - 1).is_multiple_of(n) {
            return Err(Error::OrderMismatch { n, q });
        }
        let step = ((q as usize - 1) / n) as i64;
        let mut data = Vec::with_capacity(roots.len() * n);
        for &i in roots.exponents() {
            for j in 0..n {
                data.push(field.alpha_pow(step * (i * j) as i64));
            }
        }
        let h = Matrix::new(field, roots.len(), n, data)?;
        let mut code = LinearCode::from_parity(&h);
        debug_assert_eq!(code.k, n - roots.len());
        debug_assert!(code.is_cyclic());
        code.roots = Some(roots.clone());
        Ok(code)
    }

    pub(crate) fn set_roots(&mut self, roots: Option<RootSet>) {
        self.roots = roots;
    }

    pub fn with_meta(mut self, meta: CodeMeta) -> LinearCode {
        self.meta = meta;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn parity(&self) -> &Matrix {
        &self.h
    }

    pub fn generator(&self) -> &Matrix {
        &self.g
    }

    pub fn roots(&self) -> Option<&RootSet> {
        self.roots.as_ref()
    }

    pub fn meta(&self) -> &CodeMeta {
        &self.meta
    }

    /// The dual code, with parity-check matrix equal to this generator.
    pub fn dual(&self) -> LinearCode {
        LinearCode::from_parity(&self.g)
    }

    pub fn encode(&self, message: &[u32]) -> Result<Vec<u32>> {
        self.g.transpose().mul_vec(message)
    }

    pub fn contains(&self, word: &[u32]) -> Result<bool> {
        Ok(self.h.mul_vec(word)?.iter().all(|&v| v == 0))
    }

    fn coordinate_set(&self, s: &[usize]) -> Result<Vec<usize>> {
        if s.is_empty() {
            return Err(Error::EmptySet);
        }
        if let Some(&index) = s.iter().find(|&&i| i >= self.n) {
            return Err(Error::CoordinateOutOfRange { index, n: self.n });
        }
        let mut s = s.to_vec();
        s.sort_unstable();
        s.dedup();
        Ok(s)
    }

    /// Code obtained by keeping only the coordinates in `s`.
    pub fn puncture(&self, s: &[usize]) -> Result<LinearCode> {
        let s = self.coordinate_set(s)?;
        Ok(LinearCode::from_generator(&self.g.select_columns(&s)?))
    }

    /// Code whose parity-check matrix is `H` restricted to the columns in `s`.
    ///
    /// This is the parity-side restriction, not the textbook shortening
    /// (which keeps codewords vanishing outside `s`); the two differ in general.
    pub fn shorten(&self, s: &[usize]) -> Result<LinearCode> {
        let s = self.coordinate_set(s)?;
        Ok(LinearCode::from_parity(&self.h.select_columns(&s)?))
    }

    /// Exact minimum distance, or `AboveCap` if every nonzero codeword is
    /// heavier than `cap` (default `n - k + 1`).
    ///
    /// Uses whichever of the two searches is cheaper by enumeration count.
    pub fn min_distance(&self, cap: Option<usize>) -> Result<Distance> {
        if self.k == 0 {
            return Err(Error::ZeroDimensional);
        }
        let cap = cap.unwrap_or(self.n - self.k + 1).min(self.n);
        let subset_cost: u128 = (1..=cap)
            .map(|w| arith::binomial(self.n as u64, w as u64))
            .sum();
        let codeword_cost = (self.field.q() as u128).checked_pow(self.k as u32);
        match codeword_cost {
            Some(c) if c < subset_cost => self.min_distance_by_codewords(Some(cap)),
            _ => self.min_distance_by_subsets(Some(cap)),
        }
    }

    /// Smallest `w` such that some `w` columns of `H` are dependent.
    pub fn min_distance_by_subsets(&self, cap: Option<usize>) -> Result<Distance> {
        if self.k == 0 {
            return Err(Error::ZeroDimensional);
        }
        let cap = cap.unwrap_or(self.n - self.k + 1).min(self.n);
        for w in 1..=cap {
            if combin::any(self.n, w, |s| self.h.rank_of_columns(s) < w) {
                return Ok(Distance::Exact(w));
            }
        }
        Ok(Distance::AboveCap(cap))
    }

    /// Minimum weight over all codewords `m·G`, up to scalar multiples.
    pub fn min_distance_by_codewords(&self, cap: Option<usize>) -> Result<Distance> {
        if self.k == 0 {
            return Err(Error::ZeroDimensional);
        }
        let best = min_weight_projective(&self.field, &self.g);
        Ok(match cap {
            Some(c) if best > c => Distance::AboveCap(c),
            _ => Distance::Exact(best),
        })
    }

    /// True iff the cyclic shift of every generator row satisfies all parity checks.
    pub fn is_cyclic(&self) -> bool {
        (0..self.g.rows()).all(|i| {
            let row = self.g.row(i);
            let mut shifted = Vec::with_capacity(self.n);
            shifted.push(row[self.n - 1]);
            shifted.extend_from_slice(&row[..self.n - 1]);
            self.contains(&shifted).expect("shift preserves length")
        })
    }

    /// True iff `d = n - k + 1`; a zero-dimensional code counts as MDS.
    pub fn is_mds(&self) -> bool {
        self.first_non_mds_subset().is_none()
    }

    /// A column subset witnessing that the code is not MDS: either `k`
    /// dependent columns of `G` or `n - k` dependent columns of `H`.
    pub fn first_non_mds_subset(&self) -> Option<Vec<usize>> {
        let (m, w) = if self.k <= self.n - self.k {
            (&self.g, self.k)
        } else {
            (&self.h, self.n - self.k)
        };
        if w == 0 {
            return None;
        }
        combin::find_first(self.n, w, |s| m.rank_of_columns(s) < w)
    }

    /// Fills erased (`None`) symbols so that the word becomes a codeword.
    pub fn erasure_decode(&self, word: &[Option<u32>]) -> Result<Vec<u32>> {
        if word.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "word of length {} for a code of length {}",
                word.len(),
                self.n
            )));
        }
        let f = &self.field;
        let erased: Vec<usize> = (0..self.n).filter(|&i| word[i].is_none()).collect();
        let kept: Vec<usize> = (0..self.n).filter(|&i| word[i].is_some()).collect();
        let known: Vec<u32> = kept
            .iter()
            .map(|&i| f.check(word[i].unwrap()))
            .collect::<Result<_>>()?;
        let mut out: Vec<u32> = word.iter().map(|v| v.unwrap_or(0)).collect();
        if erased.is_empty() {
            return if self.contains(&out)? {
                Ok(out)
            } else {
                Err(Error::NotACodeword)
            };
        }
        let a = self.h.select_columns(&erased)?;
        if a.rank() < erased.len() {
            return Err(Error::Unrecoverable(erased));
        }
        let rhs: Vec<u32> = self
            .h
            .select_columns(&kept)?
            .mul_vec(&known)?
            .into_iter()
            .map(|v| f.neg(v))
            .collect();
        let x = a.solve(&rhs).map_err(|e| match e {
            Error::NoSolution => Error::NotACodeword,
            other => other,
        })?;
        for (&i, v) in erased.iter().zip(x) {
            out[i] = v;
        }
        debug_assert!(self.contains(&out).unwrap());
        Ok(out)
    }
}

/// Minimum weight of `c·G` over messages whose first nonzero entry is 1.
fn min_weight_projective(f: &Field, g: &Matrix) -> usize {
    let k = g.rows();
    let n = g.cols();
    let q = f.q();
    // multiples[j][c] = c * row_j
    let multiples: Vec<Vec<Vec<u32>>> = (0..k)
        .map(|j| {
            (0..q)
                .map(|c| g.row(j).iter().map(|&v| f.mul(c, v)).collect())
                .collect()
        })
        .collect();
    let add = |acc: &[u32], v: &[u32]| -> Vec<u32> {
        acc.iter().zip(v).map(|(&x, &y)| f.add(x, y)).collect()
    };
    // branch on the leading position and, if present, the next coefficient
    let branches: Vec<(usize, u32)> = (0..k)
        .flat_map(|lead| {
            let next = if lead + 1 < k { q } else { 1 };
            (0..next).map(move |c| (lead, c))
        })
        .collect();
    branches
        .into_par_iter()
        .map(|(lead, c)| {
            let mut acc = multiples[lead][1].clone();
            let mut depth = lead + 1;
            if depth < k {
                acc = add(&acc, &multiples[depth][c as usize]);
                depth += 1;
            }
            let mut best = n;
            dfs(&multiples, &acc, depth, q, f, &mut best);
            best
        })
        .min()
        .unwrap_or(n)
}

fn dfs(
    multiples: &[Vec<Vec<u32>>],
    acc: &[u32],
    depth: usize,
    q: u32,
    f: &Field,
    best: &mut usize,
) {
    if depth == multiples.len() {
        let w = acc.iter().filter(|&&v| v != 0).count();
        *best = (*best).min(w);
        return;
    }
    dfs(multiples, acc, depth + 1, q, f, best);
    let mut next = vec![0u32; acc.len()];
    for c in 1..q as usize {
        for (o, (&x, &y)) in next.iter_mut().zip(acc.iter().zip(&multiples[depth][c])) {
            *o = f.add(x, y);
        }
        dfs(multiples, &next, depth + 1, q, f, best);
    }
}

/// Hamming weight of a word.
pub fn weight(word: &[u32]) -> usize {
    word.iter().filter(|&&v| v != 0).count()
}

/// Syndrome `H·word`.
pub fn syndrome(code: &LinearCode, word: &[u32]) -> Result<Vec<u32>> {
    code.parity().mul_vec(word)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::row_space_equal;

    fn gf(q: u64) -> Field {
        Field::of_order(q).unwrap()
    }

    fn repetition(f: &Field, n: usize) -> LinearCode {
        LinearCode::from_generator(&Matrix::new(f, 1, n, vec![1; n]).unwrap())
    }

    #[test]
    fn parity_constructions() {
        let f = gf(2);
        let c = LinearCode::from_parity(&Matrix::new(&f, 1, 5, vec![1; 5]).unwrap());
        assert_eq!((c.n(), c.k()), (5, 4));
        let trivial = LinearCode::from_parity(&Matrix::identity(&f, 4));
        assert_eq!(trivial.k(), 0);
        let dup = Matrix::new(&f, 2, 5, vec![1; 10]).unwrap();
        let c2 = LinearCode::from_parity(&dup);
        assert_eq!(c2.parity().rows(), 1);
        assert!(row_space_equal(c.generator(), c2.generator()).unwrap());
    }

    #[test]
    fn root_built_codes() {
        let f = gf(16);
        let full = LinearCode::from_roots(&f, &RootSet::new(15, [])).unwrap();
        assert_eq!(full.k(), 15);
        let even = LinearCode::from_roots(&f, &RootSet::new(15, [0])).unwrap();
        assert_eq!(even.k(), 14);
        // fifteen ones sum to 1 in characteristic 2
        assert!(!even.contains(&[1; 15]).unwrap());
        let r = RootSet::new(15, [4, 7, 10, 13, 1, 0, 2]);
        let c = LinearCode::from_roots(&f, &r).unwrap();
        assert_eq!(c.k(), 8);
        assert_eq!(c.parity().rank(), 7);
        assert!(c.is_cyclic());
        assert_eq!(
            LinearCode::from_roots(&f, &RootSet::new(7, [1])).unwrap_err(),
            Error::OrderMismatch { n: 7, q: 16 }
        );
        // length-5 code over GF(16) uses w = alpha^3
        let c5 = LinearCode::from_roots(&f, &RootSet::new(5, [1])).unwrap();
        assert_eq!(c5.k(), 4);
        assert!(c5.is_cyclic());
    }

    #[test]
    fn root_membership_matches_evaluation() {
        let f = gf(13);
        let r = RootSet::new(12, [5, 9, 1, 0, 2]);
        let c = LinearCode::from_roots(&f, &r).unwrap();
        for i in 0..c.k() {
            let row = c.generator().row(i);
            for &e in r.exponents() {
                let x = f.alpha_pow(e as i64);
                let mut acc = 0;
                for &coef in row.iter().rev() {
                    acc = f.add(f.mul(acc, x), coef);
                }
                assert_eq!(acc, 0);
            }
        }
    }

    #[test]
    fn puncture_and_shorten() {
        let f = gf(7);
        let rep = repetition(&f, 5);
        let p = rep.puncture(&[1, 3]).unwrap();
        assert_eq!((p.n(), p.k()), (2, 1));
        assert_eq!(p.min_distance(None).unwrap(), Distance::Exact(2));
        let all: Vec<usize> = (0..5).collect();
        assert!(row_space_equal(rep.puncture(&all).unwrap().generator(), rep.generator()).unwrap());
        assert!(row_space_equal(rep.shorten(&all).unwrap().parity(), rep.parity()).unwrap());
        assert_eq!(rep.puncture(&[]).unwrap_err(), Error::EmptySet);
        let zero = LinearCode::from_parity(&Matrix::identity(&f, 4));
        assert_eq!(zero.shorten(&[0, 2]).unwrap().k(), 0);
    }

    #[test]
    fn distances() {
        let f = gf(3);
        for n in 1..6 {
            assert_eq!(
                repetition(&f, n).min_distance(None).unwrap(),
                Distance::Exact(n)
            );
        }
        let f16 = gf(16);
        let c = LinearCode::from_roots(&f16, &RootSet::new(15, [4, 7, 10, 13, 1, 0, 2])).unwrap();
        assert_eq!(c.min_distance_by_subsets(None).unwrap(), Distance::Exact(5));
        let local = c.puncture(&[0, 5, 10]).unwrap();
        assert_eq!((local.n(), local.k()), (3, 2));
        assert_eq!(
            local.min_distance_by_codewords(None).unwrap(),
            Distance::Exact(2)
        );
        assert!(local.is_mds());
        let f13 = gf(13);
        let c = LinearCode::from_roots(&f13, &RootSet::new(12, [5, 9, 1, 0, 2])).unwrap();
        assert_eq!(c.min_distance_by_subsets(None).unwrap(), Distance::Exact(4));
        assert_eq!(c.min_distance(Some(3)).unwrap(), Distance::AboveCap(3));
        let zero = LinearCode::from_parity(&Matrix::identity(&f, 3));
        assert_eq!(zero.min_distance(None), Err(Error::ZeroDimensional));
    }

    #[test]
    fn mds_predicates() {
        let f = gf(5);
        assert!(repetition(&f, 4).is_mds());
        let full = LinearCode::from_parity(&Matrix::zeros(&f, 0, 4));
        assert_eq!(full.k(), 4);
        assert!(full.is_mds());
        assert_eq!(full.min_distance(None).unwrap(), Distance::Exact(1));
        // [4,2] code with a zero column is not MDS
        let g = Matrix::new(&f, 2, 4, vec![1, 0, 1, 0, 0, 1, 1, 0]).unwrap();
        let c = LinearCode::from_generator(&g);
        assert!(!c.is_mds());
    }

    #[test]
    fn duality() {
        let f = gf(16);
        let c = LinearCode::from_roots(&f, &RootSet::new(15, [4, 7, 10, 13, 1, 0, 2])).unwrap();
        let dd = c.dual().dual();
        assert!(row_space_equal(dd.generator(), c.generator()).unwrap());
        assert_eq!(c.dual().k(), 7);
        assert!(c
            .generator()
            .mul(&c.parity().transpose())
            .unwrap()
            .is_zero());
    }

    #[test]
    fn erasure_decoding() {
        let f = gf(16);
        let c = LinearCode::from_roots(&f, &RootSet::new(15, [4, 7, 10, 13, 1, 0, 2])).unwrap();
        let msg: Vec<u32> = (1..=8).collect();
        let cw = c.encode(&msg).unwrap();
        let full: Vec<Option<u32>> = cw.iter().map(|&v| Some(v)).collect();
        assert_eq!(c.erasure_decode(&full).unwrap(), cw);
        let mut w = full.clone();
        for i in [0, 5, 10, 3, 4] {
            w[i] = None;
        }
        assert_eq!(c.erasure_decode(&w).unwrap(), cw);
        let mut bad = full.clone();
        bad[1] = Some(cw[1] ^ 1);
        assert_eq!(c.erasure_decode(&bad), Err(Error::NotACodeword));
        let mut too_many = full;
        for slot in too_many.iter_mut().take(8) {
            *slot = None;
        }
        assert!(matches!(
            c.erasure_decode(&too_many),
            Err(Error::Unrecoverable(_))
        ));
    }

    #[test]
    fn local_code_single_erasure_matches_exhaustive() {
        let f = gf(16);
        let c = LinearCode::from_roots(&f, &RootSet::new(15, [4, 7, 10, 13, 1, 0, 2])).unwrap();
        let local = c.puncture(&[0, 5, 10]).unwrap();
        let cw = local.encode(&[3, 9]).unwrap();
        for e in 0..3 {
            let mut w: Vec<Option<u32>> = cw.iter().map(|&v| Some(v)).collect();
            w[e] = None;
            let decoded = local.erasure_decode(&w).unwrap();
            let matches: Vec<Vec<u32>> = (0..16)
                .flat_map(|a| (0..16).map(move |b| (a, b)))
                .map(|(a, b)| local.encode(&[a, b]).unwrap())
                .filter(|x| (0..3).all(|i| i == e || x[i] == cw[i]))
                .collect();
            assert_eq!(matches, vec![decoded]);
        }
    }
}
