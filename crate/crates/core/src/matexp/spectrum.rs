use std::cmp::Ordering;

use nalgebra::{Schur, SVD};

use super::{check_square, MatexpError};
use crate::linalg::{to_complex, to_complex_vec, CMat, CVec, RMat, RVec, C64};

/// Relative cluster tolerance used when none is supplied.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-8;
/// Eigenvector-matrix condition number above which a spectrum is near-defective.
pub const NEAR_DEFECTIVE_COND: f64 = 1e12;

/// A Jordan block of size `size` whose chain occupies columns
/// `start..start + size` of `M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct JordanBlock {
    pub start: usize,
    pub size: usize,
}

/// Ordered (generalized) eigendecomposition `A = M J M⁻¹`.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<C64>,
    pub m: CMat,
    pub minv: CMat,
    /// Index groups of numerically equal eigenvalues, in eigenvalue order.
    pub clusters: Vec<Vec<usize>>,
    /// Non-trivial Jordan blocks; empty on the diagonalizable path.
    pub jordan_blocks: Vec<JordanBlock>,
    /// 2-norm condition number of `M`.
    pub condition: f64,
    pub near_defective: bool,
    cluster_of: Vec<usize>,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Cluster index of eigenvalue `i`.
    pub fn cluster_of(&self, i: usize) -> usize {
        self.cluster_of[i]
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues
            .iter()
            .fold(0.0, |acc, l| acc.max(l.norm()))
    }

    pub fn spectral_abscissa(&self) -> f64 {
        self.eigenvalues
            .iter()
            .fold(f64::NEG_INFINITY, |acc, l| acc.max(l.re))
    }

    pub fn is_diagonalizable(&self) -> bool {
        self.jordan_blocks.is_empty() && !self.near_defective
    }

    /// Jordan block containing eigenvalue index `i`, if any.
    pub fn block_of(&self, i: usize) -> Option<JordanBlock> {
        self.jordan_blocks
            .iter()
            .copied()
            .find(|b| i >= b.start && i < b.start + b.size)
    }

    /// The Jordan form `J` (diagonal on the diagonalizable path).
    pub fn jordan_form(&self) -> CMat {
        let n = self.dim();
        let mut j = CMat::from_diagonal(&CVec::from_vec(self.eigenvalues.clone()));
        for b in &self.jordan_blocks {
            for k in b.start..b.start + b.size - 1 {
                j[(k, k + 1)] = C64::new(1.0, 0.0);
            }
        }
        debug_assert_eq!(j.nrows(), n);
        j
    }

    /// `M J M⁻¹`.
    pub fn reconstruct(&self) -> CMat {
        &self.m * self.jordan_form() * &self.minv
    }

    /// `exp(tJ)`.
    pub fn exp_jordan(&self, t: f64) -> CMat {
        let n = self.dim();
        let mut e = CMat::zeros(n, n);
        for (i, l) in self.eigenvalues.iter().enumerate() {
            e[(i, i)] = (l * t).exp();
        }
        for b in &self.jordan_blocks {
            let base = (self.eigenvalues[b.start] * t).exp();
            let mut coef = 1.0;
            for p in 1..b.size {
                coef *= t / p as f64;
                for i in b.start..b.start + b.size - p {
                    e[(i, i + p)] = base * coef;
                }
            }
        }
        e
    }

    /// `exp(tA) = M exp(tJ) M⁻¹`.
    pub fn exp(&self, t: f64) -> CMat {
        &self.m * self.exp_jordan(t) * &self.minv
    }

    /// `M⁻¹ S M`.
    pub fn to_eigenbasis(&self, s: &RMat) -> Result<CMat, MatexpError> {
        let n = self.dim();
        if s.nrows() != n || s.ncols() != n {
            return Err(MatexpError::Dimension(format!(
                "structure matrix is {}x{}, spectrum has dimension {n}",
                s.nrows(),
                s.ncols()
            )));
        }
        Ok(&self.minv * to_complex(s) * &self.m)
    }
}

/// Readout and input projections onto the eigenbasis, and the structure
/// matrix in eigen-coordinates.
#[derive(Debug, Clone)]
pub struct Couplings {
    /// `z_k = c·v_k`.
    pub z: CVec,
    /// `w_k = ν_k·v` with `ν_k` the rows of `M⁻¹`.
    pub w: CVec,
    /// `S̄ = M⁻¹ S M`.
    pub sbar: CMat,
}

impl Couplings {
    pub fn new(spec: &Spectrum, c: &RVec, s: &RMat, input: &RVec) -> Result<Self, MatexpError> {
        let n = spec.dim();
        if c.len() != n || input.len() != n {
            return Err(MatexpError::Dimension(format!(
                "readout has length {}, input has length {}, spectrum has dimension {n}",
                c.len(),
                input.len()
            )));
        }
        let z = (to_complex_vec(c).transpose() * &spec.m).transpose();
        let w = &spec.minv * to_complex_vec(input);
        let sbar = spec.to_eigenbasis(s)?;
        Ok(Couplings { z, w, sbar })
    }

    /// Couplings with an input vector replaced, keeping `z` and `S̄`.
    pub fn with_input(&self, spec: &Spectrum, input: &RVec) -> Self {
        Couplings {
            z: self.z.clone(),
            w: &spec.minv * to_complex_vec(input),
            sbar: self.sbar.clone(),
        }
    }
}

/// Descending real part, then ascending |Im|, then positive imaginary first.
pub(crate) fn eig_order(a: &C64, b: &C64) -> Ordering {
    b.re.total_cmp(&a.re)
        .then(a.im.abs().total_cmp(&b.im.abs()))
        .then(b.im.total_cmp(&a.im))
}

fn union_find_clusters(vals: &[C64], tol: f64) -> Vec<usize> {
    let n = vals.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if (vals[i] - vals[j]).norm() <= tol {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    (0..n).map(|i| find(&mut parent, i)).collect()
}

fn schur_of(a: &RMat) -> Result<(CMat, CMat), MatexpError> {
    let n = a.nrows();
    Schur::try_new(to_complex(a), f64::EPSILON, 1000 * n.max(10))
        .map(|s| s.unpack())
        .ok_or(MatexpError::EigensolverFailure)
}

/// Normalize to unit 2-norm with the largest-magnitude component real positive.
fn normalize_phase(v: &mut CVec) {
    let norm = v.norm();
    if norm == 0.0 {
        return;
    }
    let mut best = 0;
    for i in 0..v.len() {
        if v[i].norm() > v[best].norm() * (1.0 + 1e-12) {
            best = i;
        }
    }
    let phase = v[best].conj() / v[best].norm();
    *v *= phase / norm;
}

fn invert(m: &CMat) -> CMat {
    m.clone().try_inverse().unwrap_or_else(|| {
        SVD::new(m.clone(), true, true)
            .pseudo_inverse(f64::EPSILON * m.nrows() as f64)
            .unwrap_or_else(|_| CMat::from_element(m.nrows(), m.ncols(), C64::new(f64::NAN, 0.0)))
    })
}

fn condition_number(m: &CMat) -> f64 {
    let sv = m.singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Ordered eigendecomposition of a real square matrix.
///
/// Eigenvalues within `cluster_tol·(1 + ρ(A))` of each other are grouped and
/// replaced by their mean. Eigenvectors come from back-substitution on the
/// complex Schur form; a cluster whose back-substitution is inconsistent (a
/// missing eigenvector) or a condition number of `M` above
/// [`NEAR_DEFECTIVE_COND`] marks the spectrum near-defective.
pub fn eig_decompose(a: &RMat, cluster_tol: f64) -> Result<Spectrum, MatexpError> {
    let n = check_square(a)?;
    let (q, t) = schur_of(a)?;
    let raw: Vec<C64> = (0..n).map(|i| t[(i, i)]).collect();
    let radius = raw.iter().fold(0.0f64, |acc, l| acc.max(l.norm()));
    let tol = cluster_tol * (1.0 + radius);
    let label = union_find_clusters(&raw, tol);

    let tnorm = t.norm().max(f64::MIN_POSITIVE);
    let floor = f64::EPSILON * tnorm;
    let mut defective = false;
    let mut x = CMat::zeros(n, n);
    for k in 0..n {
        let mut col = vec![C64::new(0.0, 0.0); n];
        col[k] = C64::new(1.0, 0.0);
        let mut xmax = 1.0f64;
        for i in (0..k).rev() {
            let num: C64 = (i + 1..=k).map(|j| t[(i, j)] * col[j]).sum();
            if label[i] == label[k] {
                if num.norm() > 1e-8 * tnorm * xmax {
                    defective = true;
                }
            } else {
                let mut d = t[(i, i)] - t[(k, k)];
                if d.norm() < floor {
                    d = C64::new(floor, 0.0);
                }
                col[i] = -num / d;
                xmax = xmax.max(col[i].norm());
            }
        }
        for i in 0..n {
            x[(i, k)] = col[i];
        }
    }
    let vecs = &q * x;

    // cluster means
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_to_group = vec![usize::MAX; n];
    for (i, &r) in label.iter().enumerate() {
        if root_to_group[r] == usize::MAX {
            root_to_group[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[root_to_group[r]].push(i);
    }
    let mut vals = raw.clone();
    let mut cols: Vec<CVec> = (0..n).map(|k| vecs.column(k).into_owned()).collect();
    for g in &groups {
        let mean = g.iter().map(|&i| raw[i]).sum::<C64>() / g.len() as f64;
        let mean = if mean.im.abs() <= tol {
            C64::new(mean.re, 0.0)
        } else {
            mean
        };
        for &i in g {
            vals[i] = mean;
        }
    }
    for c in cols.iter_mut() {
        normalize_phase(c);
    }

    // exact conjugate symmetry for real input
    let pair_tol = tol.max(1e-6 * (1.0 + radius));
    let mut paired = vec![false; groups.len()];
    for gi in 0..groups.len() {
        let li = vals[groups[gi][0]];
        if paired[gi] || li.im <= 0.0 {
            continue;
        }
        let partner = (0..groups.len())
            .filter(|&gj| !paired[gj] && gj != gi && groups[gj].len() == groups[gi].len())
            .filter(|&gj| vals[groups[gj][0]].im < 0.0)
            .min_by(|&p, &r| {
                let dp = (vals[groups[p][0]] - li.conj()).norm();
                let dr = (vals[groups[r][0]] - li.conj()).norm();
                dp.total_cmp(&dr)
            });
        if let Some(gj) = partner {
            if (vals[groups[gj][0]] - li.conj()).norm() <= pair_tol {
                paired[gi] = true;
                paired[gj] = true;
                for (&i, &j) in groups[gi].iter().zip(groups[gj].iter()) {
                    vals[j] = li.conj();
                    cols[j] = cols[i].map(|z| z.conj());
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig_order(&vals[i], &vals[j]).then(i.cmp(&j)));
    let eigenvalues: Vec<C64> = order.iter().map(|&i| vals[i]).collect();
    let m = CMat::from_columns(&order.iter().map(|&i| cols[i].clone()).collect::<Vec<_>>());
    let mut new_index = vec![0; n];
    for (pos, &i) in order.iter().enumerate() {
        new_index[i] = pos;
    }
    let mut clusters: Vec<Vec<usize>> = groups
        .iter()
        .map(|g| {
            let mut c: Vec<usize> = g.iter().map(|&i| new_index[i]).collect();
            c.sort_unstable();
            c
        })
        .collect();
    clusters.sort_by_key(|c| c[0]);
    let mut cluster_of = vec![0; n];
    for (ci, c) in clusters.iter().enumerate() {
        for &i in c {
            cluster_of[i] = ci;
        }
    }

    let minv = invert(&m);
    let condition = condition_number(&m);
    let near_defective = defective
        || condition.is_nan()
        || condition > NEAR_DEFECTIVE_COND
        || minv.iter().any(|z| !z.re.is_finite() || !z.im.is_finite());
    Ok(Spectrum {
        eigenvalues,
        m,
        minv,
        clusters,
        jordan_blocks: Vec::new(),
        condition,
        near_defective,
        cluster_of,
    })
}

/// Null space basis (as columns) of dimension `k` from the right singular
/// vectors of `b`, with the ratio of the largest discarded to the largest
/// retained singular value.
/// Returns the `k` trailing right singular vectors of `b`, the largest of
/// their singular values relative to `max(σ_max, scale)`, and the next
/// singular value relative to `σ_max`.
fn null_space(b: &CMat, k: usize, scale: f64) -> (CMat, f64, f64) {
    let n = b.ncols();
    let svd = SVD::new(b.clone(), false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let sv = svd.singular_values;
    let mut idx: Vec<usize> = (0..sv.len()).collect();
    idx.sort_by(|&i, &j| sv[j].total_cmp(&sv[i]));
    let smax = sv[idx[0]].max(f64::MIN_POSITIVE);
    let kept: Vec<usize> = idx[n - k..].to_vec();
    let small = sv[kept[0]] / smax.max(scale);
    let next = if n > k {
        sv[idx[n - k - 1]] / smax
    } else {
        1.0
    };
    let basis = CMat::from_fn(n, k, |r, c| v_t[(kept[c], r)].conj());
    (basis, small, next)
}

/// Jordan decomposition for a dominant eigenvalue of algebraic multiplicity
/// `ell ≥ 2` and geometric multiplicity 1, with the remaining eigenvalues
/// simple.
///
/// The chain `v₁, …, v_ℓ` satisfies `(A - λI)v₁ = 0`, `(A - λI)v_k = v_{k-1}`
/// and occupies the first `ell` columns of `M`.
pub fn jordan_decompose(a: &RMat, ell: usize, cluster_tol: f64) -> Result<Spectrum, MatexpError> {
    let n = check_square(a)?;
    if ell < 2 {
        return Err(MatexpError::TrivialJordanBlock);
    }
    if ell > n {
        return Err(MatexpError::UnsupportedJordan(format!(
            "block size {ell} exceeds dimension {n}"
        )));
    }
    let (_, t) = schur_of(a)?;
    let mut raw: Vec<C64> = (0..n).map(|i| t[(i, i)]).collect();
    raw.sort_by(eig_order);
    let radius = raw.iter().fold(0.0f64, |acc, l| acc.max(l.norm()));
    let spread_tol = 1e-3 * (1.0 + radius);
    let lambda = raw[..ell].iter().sum::<C64>() / ell as f64;
    if lambda.im.abs() > spread_tol {
        return Err(MatexpError::UnsupportedJordan(
            "dominant repeated eigenvalue must be real".into(),
        ));
    }
    let lambda = C64::new(lambda.re, 0.0);
    if raw[..ell].iter().any(|l| (l - lambda).norm() > spread_tol) {
        return Err(MatexpError::UnsupportedJordan(format!(
            "the {ell} dominant eigenvalues do not coincide"
        )));
    }
    let mut rest: Vec<C64> = raw[ell..].to_vec();
    if rest.iter().any(|l| (l - lambda).norm() <= spread_tol) {
        return Err(MatexpError::UnsupportedJordan(format!(
            "dominant eigenvalue has algebraic multiplicity above {ell}"
        )));
    }
    let tol = cluster_tol * (1.0 + radius);
    let labels = union_find_clusters(&rest, tol);
    if labels.iter().enumerate().any(|(i, &r)| r != i) {
        return Err(MatexpError::UnsupportedJordan(
            "remaining eigenvalues must be simple".into(),
        ));
    }
    for l in rest.iter_mut() {
        if l.im.abs() <= tol {
            l.im = 0.0;
        }
    }
    // exact conjugates
    for i in 0..rest.len() {
        if rest[i].im > 0.0 {
            if let Some(j) = (0..rest.len())
                .filter(|&j| rest[j].im < 0.0)
                .min_by(|&p, &q| {
                    (rest[p] - rest[i].conj())
                        .norm()
                        .total_cmp(&(rest[q] - rest[i].conj()).norm())
                })
            {
                rest[j] = rest[i].conj();
            }
        }
    }
    rest.sort_by(eig_order);

    let ac = to_complex(a);
    let b = &ac - CMat::identity(n, n) * lambda;
    let mut bpow = CMat::identity(n, n);
    for _ in 0..ell {
        bpow = &bpow * &b;
    }
    let scale = b.norm().powi(ell as i32);
    let (null, small, next) = null_space(&bpow, ell, scale);
    if small > 1e-6 || next < 1e-6 {
        return Err(MatexpError::UnsupportedJordan(format!(
            "generalized eigenspace of dimension {ell} not found (singular value ratios {small:e}, {next:e})"
        )));
    }
    let mut bl1 = CMat::identity(n, n);
    for _ in 0..ell - 1 {
        bl1 = &bl1 * &b;
    }
    let k = &bl1 * &null;
    let svd = SVD::new(k, false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let sv = svd.singular_values;
    let top = (0..sv.len())
        .max_by(|&i, &j| sv[i].total_cmp(&sv[j]))
        .unwrap_or(0);
    if sv[top] <= 1e-8 * bl1.norm().max(f64::MIN_POSITIVE) {
        return Err(MatexpError::UnsupportedJordan(
            "no chain of the requested length (geometric multiplicity above 1)".into(),
        ));
    }
    let u = CVec::from_fn(ell, |r, _| v_t[(top, r)].conj());
    let mut chain = vec![CVec::zeros(n); ell];
    chain[ell - 1] = &null * u;
    for kk in (1..ell).rev() {
        chain[kk - 1] = &b * &chain[kk];
    }
    let scale = chain.iter().fold(0.0f64, |acc, v| acc.max(v.norm()));
    // phase from the eigenvector, common to the whole chain
    let pivot = chain[0].icamax();
    let rot = if chain[0][pivot].norm() > 0.0 {
        chain[0][pivot].conj() / chain[0][pivot].norm()
    } else {
        C64::new(1.0, 0.0)
    };
    for v in chain.iter_mut() {
        *v *= rot / scale;
    }

    let mut cols: Vec<CVec> = chain;
    let mut eigenvalues = vec![lambda; ell];
    let mut prev: Option<(C64, CVec)> = None;
    for &l in &rest {
        let v = match &prev {
            Some((pl, pv)) if *pl == l.conj() && l.im < 0.0 => pv.map(|z| z.conj()),
            _ => {
                let (basis, _, _) = null_space(&(&ac - CMat::identity(n, n) * l), 1, 0.0);
                let mut v = basis.column(0).into_owned();
                normalize_phase(&mut v);
                v
            }
        };
        prev = Some((l, v.clone()));
        cols.push(v);
        eigenvalues.push(l);
    }
    let m = CMat::from_columns(&cols);
    let minv = invert(&m);
    let condition = condition_number(&m);
    let mut clusters = vec![(0..ell).collect::<Vec<_>>()];
    clusters.extend((ell..n).map(|i| vec![i]));
    let mut cluster_of = vec![0; n];
    for (i, c) in cluster_of.iter_mut().enumerate().skip(ell) {
        *c = i - ell + 1;
    }
    Ok(Spectrum {
        eigenvalues,
        m,
        minv,
        clusters,
        jordan_blocks: vec![JordanBlock {
            start: 0,
            size: ell,
        }],
        condition,
        near_defective: false,
        cluster_of,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rel_diff;

    fn recon_err(a: &RMat, spec: &Spectrum) -> f64 {
        let (re, _) = crate::linalg::split_real(&spec.reconstruct());
        rel_diff(&re, a)
    }

    #[test]
    fn spring_mass_eigenvalues() {
        let a = RMat::from_row_slice(2, 2, &[0.0, 1.0, -10.0, -7.0]);
        let spec = eig_decompose(&a, DEFAULT_CLUSTER_TOL).unwrap();
        assert!((spec.eigenvalues[0] - C64::new(-2.0, 0.0)).norm() < 1e-12);
        assert!((spec.eigenvalues[1] - C64::new(-5.0, 0.0)).norm() < 1e-12);
        assert!(recon_err(&a, &spec) < 1e-12);
        assert!(!spec.near_defective);
    }

    #[test]
    fn identity_is_one_cluster() {
        let a = RMat::identity(3, 3);
        let spec = eig_decompose(&a, DEFAULT_CLUSTER_TOL).unwrap();
        assert_eq!(spec.clusters, vec![vec![0, 1, 2]]);
        assert!(spec.eigenvalues.iter().all(|l| *l == C64::new(1.0, 0.0)));
        assert!(!spec.near_defective);
        assert!(recon_err(&a, &spec) < 1e-14);
    }

    #[test]
    fn conjugate_pairs_are_adjacent_and_exact() {
        let a = RMat::from_row_slice(3, 3, &[-1.0, 2.0, 0.0, -2.0, -1.0, 0.0, 0.0, 0.0, -0.5]);
        let spec = eig_decompose(&a, DEFAULT_CLUSTER_TOL).unwrap();
        assert_eq!(spec.eigenvalues[0], C64::new(-0.5, 0.0));
        assert_eq!(spec.eigenvalues[1], spec.eigenvalues[2].conj());
        assert!(spec.eigenvalues[1].im > 0.0);
        let v1 = spec.m.column(1).into_owned();
        let v2 = spec.m.column(2).into_owned();
        assert_eq!(v1.map(|z| z.conj()), v2);
        assert!(recon_err(&a, &spec) < 1e-12);
    }

    #[test]
    fn jordan_block_is_flagged_near_defective() {
        let a = RMat::from_row_slice(2, 2, &[-1.0, 1.0, 0.0, -1.0]);
        let spec = eig_decompose(&a, DEFAULT_CLUSTER_TOL).unwrap();
        assert!(spec.near_defective);
    }

    #[test]
    fn jordan_decomposition_reconstructs() {
        let a = RMat::from_row_slice(
            4,
            4,
            &[
                -1.0, 1.0, 0.0, 0.3, 0.0, -1.0, 1.0, 0.0, 0.0, 0.0, -1.0, 0.2, 0.0, 0.0, 0.0, -3.0,
            ],
        );
        let spec = jordan_decompose(&a, 3, DEFAULT_CLUSTER_TOL).unwrap();
        assert_eq!(spec.jordan_blocks, vec![JordanBlock { start: 0, size: 3 }]);
        assert!(recon_err(&a, &spec) < 1e-8, "{}", recon_err(&a, &spec));
        let id = &spec.m * &spec.minv;
        assert!((id - CMat::identity(4, 4)).camax() < 1e-10);
    }

    #[test]
    fn jordan_rejects_trivial_block() {
        let a = RMat::identity(2, 2);
        assert!(matches!(
            jordan_decompose(&a, 1, DEFAULT_CLUSTER_TOL),
            Err(MatexpError::TrivialJordanBlock)
        ));
    }

    #[test]
    fn rejects_non_square() {
        let a = RMat::zeros(2, 3);
        assert!(matches!(
            eig_decompose(&a, DEFAULT_CLUSTER_TOL),
            Err(MatexpError::NotSquare { .. })
        ));
    }
}
