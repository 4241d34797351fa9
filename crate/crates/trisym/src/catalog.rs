//! Explicit constructors for the admissible representation families:
//! sp(m,R) on R^2m, su(p,q) on R^(2p+2q), the skew-power representations of
//! su(1,n), so*(2m) inside su(m,m), and so(2,n) on Clifford modules, together
//! with compact-type duals, direct sums and string-id resolution.

use nalgebra::{Complex, DMatrix, DVector};

use crate::config::{RankBounds, Tolerances};
use crate::error::{Error, Result};
use crate::lie::{self, LieAlgebra};
use crate::linalg::{self, Subspace};
use crate::rep::{direct_sum, dualize, AlgebraType, CartanData, Representation, SummandInfo};

type CMat = DMatrix<Complex<f64>>;

fn cmat_zeros(n: usize) -> CMat {
    DMatrix::from_element(n, n, Complex::new(0.0, 0.0))
}

fn realify(m: &CMat) -> DMatrix<f64> {
    let re = m.map(|z| z.re);
    let im = m.map(|z| z.im);
    linalg::realify_complex(&re, &im)
}

/// Builds the matrix of ad_z restricted to the H block from structure
/// constants, verifying that it squares to -1.
fn j_h_from_ad_z(
    alg: &LieAlgebra,
    z_coords: &DVector<f64>,
    h_indices: &[usize],
    tol: &Tolerances,
) -> Result<DMatrix<f64>> {
    let hn = h_indices.len();
    let ad_z = alg.ad_vec(z_coords);
    let mut j = DMatrix::zeros(hn, hn);
    for (c, &hc) in h_indices.iter().enumerate() {
        let img = ad_z.column(hc);
        for (r, &hr) in h_indices.iter().enumerate() {
            j[(r, c)] = img[hr];
        }
        // The image must stay inside the H block.
        let mut leak: f64 = 0.0;
        for k in 0..alg.dim {
            if !h_indices.contains(&k) {
                leak = leak.max(img[k].abs());
            }
        }
        if leak > tol.residual {
            return Err(Error::NotAdmissible(format!(
                "ad_z does not preserve the H block (leak {leak:.3e})"
            )));
        }
    }
    let sq = &j * &j + DMatrix::<f64>::identity(hn, hn);
    let resid = linalg::max_abs(&sq);
    if resid > 1e-8 {
        return Err(Error::NotAdmissible(format!(
            "ad_z restricted to H does not square to -1 (residual {resid:.3e})"
        )));
    }
    Ok(j)
}

/// Complex antihermitian basis of u(m): i E_jj, E_jk - E_kj, i(E_jk + E_kj).
fn u_m_basis(m: usize) -> Vec<CMat> {
    let i = Complex::new(0.0, 1.0);
    let one = Complex::new(1.0, 0.0);
    let mut out = Vec::new();
    for j in 0..m {
        let mut d = cmat_zeros(m);
        d[(j, j)] = i;
        out.push(d);
    }
    for j in 0..m {
        for k in (j + 1)..m {
            let mut a = cmat_zeros(m);
            a[(j, k)] = one;
            a[(k, j)] = -one;
            out.push(a);
            let mut s = cmat_zeros(m);
            s[(j, k)] = i;
            s[(k, j)] = i;
            out.push(s);
        }
    }
    out
}

/// sp(m, R) acting on R^2m by matrix multiplication. Isotropy k = u(m),
/// z = -1/2 J_m, H = symmetric J-anticommuting matrices.
pub fn build_sp(m: usize, tol: &Tolerances) -> Result<Representation> {
    if m < 1 {
        return Err(Error::InvalidDimension("sp requires m >= 1".into()));
    }
    let n = 2 * m;
    let mut mats: Vec<DMatrix<f64>> = Vec::new();
    let mut names: Vec<String> = Vec::new();

    // k = u(m), realified.
    let k_basis = u_m_basis(m);
    for (idx, b) in k_basis.iter().enumerate() {
        mats.push(realify(b));
        names.push(format!("k{idx}"));
    }
    let k_count = mats.len();

    // H: symmetric antilinear blocks [[c,d],[d,-c]] placed at (j,k) and (k,j).
    let antilinear = |j: usize, k: usize, c: f64, d: f64| -> DMatrix<f64> {
        let mut out = DMatrix::zeros(n, n);
        let block = [[c, d], [d, -c]];
        for (r, row) in block.iter().enumerate() {
            for (s, &v) in row.iter().enumerate() {
                out[(2 * j + r, 2 * k + s)] = v;
                out[(2 * k + r, 2 * j + s)] = v;
            }
        }
        out
    };
    for j in 0..m {
        for k in j..m {
            mats.push(antilinear(j, k, 1.0, 0.0));
            names.push(format!("h{j}_{k}a"));
            mats.push(antilinear(j, k, 0.0, 1.0));
            names.push(format!("h{j}_{k}b"));
        }
    }
    let dim_l = mats.len();
    let algebra = LieAlgebra::from_matrix_basis(names, &mats, tol)?;

    // z = -1/2 J_m expands over the i E_jj generators (the first m of u(m)).
    let mut z = DVector::zeros(dim_l);
    for j in 0..m {
        z[j] = -0.5;
    }
    let k_indices: Vec<usize> = (0..k_count).collect();
    let h_indices: Vec<usize> = (k_count..dim_l).collect();
    let j_h = j_h_from_ad_z(&algebra, &z, &h_indices, tol)?;

    Ok(Representation {
        algebra,
        dim_v: n,
        rho: mats,
        j_v: Some(linalg::standard_complex_structure(m)),
        cartan: CartanData {
            k_indices,
            h_indices,
            z_coords: z,
            j_h,
        },
        type_flag: AlgebraType::NonCompact,
        name: format!("sp:{m}"),
        h_v: DMatrix::identity(n, n),
        summands: vec![SummandInfo {
            base_id: format!("sp:{m}"),
            base_dim: n,
            mult: 1,
        }],
    })
}

/// Complex basis of su(p, q) adapted to k = su(p) + su(q) + R z and H.
/// Returns (matrices, k_count, z_index) with z the last k generator.
fn su_pq_basis(p: usize, q: usize) -> (Vec<CMat>, usize, usize) {
    let n = p + q;
    let i = Complex::new(0.0, 1.0);
    let one = Complex::new(1.0, 0.0);
    let mut out: Vec<CMat> = Vec::new();

    let block_su = |lo: usize, m: usize, out: &mut Vec<CMat>| {
        for j in lo..lo + m {
            for k in (j + 1)..lo + m {
                let mut a = cmat_zeros(n);
                a[(j, k)] = one;
                a[(k, j)] = -one;
                out.push(a);
                let mut s = cmat_zeros(n);
                s[(j, k)] = i;
                s[(k, j)] = i;
                out.push(s);
            }
        }
        for j in lo..lo + m - 1 {
            let mut d = cmat_zeros(n);
            d[(j, j)] = i;
            d[(j + 1, j + 1)] = -i;
            out.push(d);
        }
    };
    block_su(0, p, &mut out);
    block_su(p, q, &mut out);

    // z = (i/n) diag(-q 1_p, p 1_q).
    let mut z = cmat_zeros(n);
    for j in 0..p {
        z[(j, j)] = i * Complex::new(-(q as f64) / n as f64, 0.0);
    }
    for j in p..n {
        z[(j, j)] = i * Complex::new(p as f64 / n as f64, 0.0);
    }
    out.push(z);
    let k_count = out.len();
    let z_index = k_count - 1;

    // H: off-block with m_kj = conj(m_jk).
    for j in 0..p {
        for k in p..n {
            let mut x = cmat_zeros(n);
            x[(j, k)] = one;
            x[(k, j)] = one;
            out.push(x);
            let mut y = cmat_zeros(n);
            y[(j, k)] = i;
            y[(k, j)] = -i;
            out.push(y);
        }
    }
    (out, k_count, z_index)
}

/// su(p, q) on R^(2p+2q), admissible with respect to (g, I_pq = J_p - J_q).
pub fn build_su_pq(p: usize, q: usize, tol: &Tolerances) -> Result<Representation> {
    if p < 1 || q < 1 {
        return Err(Error::InvalidDimension("su requires p, q >= 1".into()));
    }
    let n = p + q;
    let (cbasis, k_count, z_index) = su_pq_basis(p, q);
    let mats: Vec<DMatrix<f64>> = cbasis.iter().map(realify).collect();
    let names: Vec<String> = (0..mats.len())
        .map(|idx| {
            if idx < k_count {
                format!("k{idx}")
            } else {
                format!("h{}", idx - k_count)
            }
        })
        .collect();
    let dim_l = mats.len();
    let algebra = LieAlgebra::from_matrix_basis(names, &mats, tol)?;
    let mut z = DVector::zeros(dim_l);
    z[z_index] = 1.0;
    let k_indices: Vec<usize> = (0..k_count).collect();
    let h_indices: Vec<usize> = (k_count..dim_l).collect();
    let j_h = j_h_from_ad_z(&algebra, &z, &h_indices, tol)?;

    // J_V = I_pq = J_p - J_q in interleaved coordinates.
    let mut j_v = DMatrix::zeros(2 * n, 2 * n);
    for c in 0..n {
        let s = if c < p { 1.0 } else { -1.0 };
        j_v[(2 * c + 1, 2 * c)] = s;
        j_v[(2 * c, 2 * c + 1)] = -s;
    }

    Ok(Representation {
        algebra,
        dim_v: 2 * n,
        rho: mats,
        j_v: Some(j_v),
        cartan: CartanData {
            k_indices,
            h_indices,
            z_coords: z,
            j_h,
        },
        type_flag: AlgebraType::NonCompact,
        name: format!("su:{p},{q}"),
        h_v: DMatrix::identity(2 * n, 2 * n),
        summands: vec![SummandInfo {
            base_id: format!("su:{p},{q}"),
            base_dim: 2 * n,
            mult: 1,
        }],
    })
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut r = 1usize;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// All k-subsets of 0..n in lexicographic order.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            cur.push(v);
            rec(v + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Skew-power representation of su(1, n) on the real form of
/// Lambda^p (C^(n+1))*, realized through the splitting into monomials
/// without / with the distinguished index 0. The second block carries the
/// doubled inner product, matching the form-metric normalization.
pub fn build_su1n_wedge(n: usize, p: usize, tol: &Tolerances) -> Result<Representation> {
    if n < 1 || p < 1 {
        return Err(Error::InvalidDimension("su1n requires n, p >= 1".into()));
    }
    if p > n {
        return Err(Error::InvalidDimension(format!(
            "su1n wedge power p = {p} exceeds n = {n}: the action is not faithful"
        )));
    }
    // L = su(1, n): k = su(n) on indices 1..n plus z; H mixes index 0 with the rest.
    let nn = n + 1;
    let i = Complex::new(0.0, 1.0);
    let one = Complex::new(1.0, 0.0);
    let mut cbasis: Vec<CMat> = Vec::new();
    // su(n) block on coordinates 1..=n.
    for j in 1..nn {
        for k in (j + 1)..nn {
            let mut a = cmat_zeros(nn);
            a[(j, k)] = one;
            a[(k, j)] = -one;
            cbasis.push(a);
            let mut s = cmat_zeros(nn);
            s[(j, k)] = i;
            s[(k, j)] = i;
            cbasis.push(s);
        }
    }
    for j in 1..nn - 1 {
        let mut d = cmat_zeros(nn);
        d[(j, j)] = i;
        d[(j + 1, j + 1)] = -i;
        cbasis.push(d);
    }
    // z = (i/(n+1)) diag(-n, 1, ..., 1).
    let mut zmat = cmat_zeros(nn);
    zmat[(0, 0)] = i * Complex::new(-(n as f64) / nn as f64, 0.0);
    for j in 1..nn {
        zmat[(j, j)] = i * Complex::new(1.0 / nn as f64, 0.0);
    }
    cbasis.push(zmat);
    let k_count = cbasis.len();
    let z_index = k_count - 1;
    for k in 1..nn {
        let mut x = cmat_zeros(nn);
        x[(0, k)] = one;
        x[(k, 0)] = one;
        cbasis.push(x);
        let mut y = cmat_zeros(nn);
        y[(0, k)] = i;
        y[(k, 0)] = -i;
        cbasis.push(y);
    }

    // Monomial basis of Lambda^p: subsets without 0 first, then with 0.
    let mut monos: Vec<Vec<usize>> = Vec::new();
    for s in subsets(n, p) {
        monos.push(s.iter().map(|v| v + 1).collect());
    }
    let w1 = monos.len();
    for s in subsets(n, p - 1) {
        let mut m = vec![0usize];
        m.extend(s.iter().map(|v| v + 1));
        monos.push(m);
    }
    let nv = monos.len();
    debug_assert_eq!(nv, binomial(n, p) + binomial(n, p - 1));
    let index_of = |s: &[usize]| -> usize {
        monos
            .iter()
            .position(|m| m.as_slice() == s)
            .expect("monomial index")
    };

    // Dual derivation action on monomials: replacing factor e^s by e^r picks
    // up -M[s, r] and the reordering sign.
    let wedge_action = |m: &CMat| -> CMat {
        let mut out = DMatrix::from_element(nv, nv, Complex::new(0.0, 0.0));
        for (col, mono) in monos.iter().enumerate() {
            for (pos, &s) in mono.iter().enumerate() {
                for r in 0..nn {
                    let coef = -m[(s, r)];
                    if coef.norm_sqr() == 0.0 {
                        continue;
                    }
                    if r != s && mono.contains(&r) {
                        continue;
                    }
                    let mut target: Vec<usize> = mono.clone();
                    target[pos] = r;
                    // Sort with sign.
                    let mut sign = 1.0;
                    let mut t = target.clone();
                    for a in 0..t.len() {
                        for b in (a + 1)..t.len() {
                            if t[a] > t[b] {
                                t.swap(a, b);
                                sign = -sign;
                            }
                        }
                    }
                    let row = index_of(&t);
                    out[(row, col)] += coef * Complex::new(sign, 0.0);
                }
            }
        }
        out
    };

    // Conjugate by D = diag(1_W1, sqrt(2) 1_W2) so the background metric takes
    // the block form diag(1, 2).
    let scale = |mat: &mut CMat| {
        let s2 = 2.0f64.sqrt();
        for r in 0..nv {
            for c in 0..nv {
                if r >= w1 && c < w1 {
                    mat[(r, c)] /= Complex::new(s2, 0.0);
                } else if r < w1 && c >= w1 {
                    mat[(r, c)] *= Complex::new(s2, 0.0);
                }
            }
        }
    };

    let mut rho: Vec<DMatrix<f64>> = Vec::new();
    for b in &cbasis {
        let mut act = wedge_action(b);
        scale(&mut act);
        rho.push(realify(&act));
    }

    // Structure constants from the fundamental action (realified).
    let fund: Vec<DMatrix<f64>> = cbasis.iter().map(realify).collect();
    let names: Vec<String> = (0..fund.len())
        .map(|idx| {
            if idx < k_count {
                format!("k{idx}")
            } else {
                format!("h{}", idx - k_count)
            }
        })
        .collect();
    let algebra = LieAlgebra::from_matrix_basis(names, &fund, tol)?;
    let dim_l = algebra.dim;
    let mut z = DVector::zeros(dim_l);
    z[z_index] = 1.0;
    let k_indices: Vec<usize> = (0..k_count).collect();
    let h_indices: Vec<usize> = (k_count..dim_l).collect();
    let j_h = j_h_from_ad_z(&algebra, &z, &h_indices, tol)?;

    // J_V: multiplication by +i on the first block, -i on the second.
    let mut j_v = DMatrix::zeros(2 * nv, 2 * nv);
    for c in 0..nv {
        let s = if c < w1 { 1.0 } else { -1.0 };
        j_v[(2 * c + 1, 2 * c)] = s;
        j_v[(2 * c, 2 * c + 1)] = -s;
    }
    // Background metric: weight 1 on the first block, 2 on the second.
    let mut h_v = DMatrix::zeros(2 * nv, 2 * nv);
    for c in 0..nv {
        let w = if c < w1 { 1.0 } else { 2.0 };
        h_v[(2 * c, 2 * c)] = w;
        h_v[(2 * c + 1, 2 * c + 1)] = w;
    }

    Ok(Representation {
        algebra,
        dim_v: 2 * nv,
        rho,
        j_v: Some(j_v),
        cartan: CartanData {
            k_indices,
            h_indices,
            z_coords: z,
            j_h,
        },
        type_flag: AlgebraType::NonCompact,
        name: format!("su1n:{n}:{p}"),
        h_v,
        summands: vec![SummandInfo {
            base_id: format!("su1n:{n}:{p}"),
            base_dim: 2 * nv,
            mult: 1,
        }],
    })
}

/// so*(2m): the subalgebra of su(m, m) commuting with the quaternionic
/// structure built from the block swap (v1, v2) -> (-v2, v1) composed with
/// complex conjugation on R^4m = R^2m + R^2m. The triple (J, C, JC) with the
/// ambient complex structure J is quaternionic.
pub fn build_so_star(m: usize, tol: &Tolerances) -> Result<Representation> {
    if m < 2 {
        return Err(Error::InvalidDimension("so_star requires m >= 2".into()));
    }
    let ambient = build_su_pq(m, m, tol)?;
    let n = ambient.dim_v; // 4m
    let half = n / 2;
    let mut swap = DMatrix::zeros(n, n);
    for r in 0..half {
        swap[(r, half + r)] = -1.0;
        swap[(half + r, r)] = 1.0;
    }
    // Conjugation: x + iy -> x - iy in interleaved coordinates.
    let mut conj = DMatrix::zeros(n, n);
    for c in 0..n / 2 {
        conj[(2 * c, 2 * c)] = 1.0;
        conj[(2 * c + 1, 2 * c + 1)] = -1.0;
    }
    let i1 = swap * conj;

    // Solve [sum a_i rho_i, I1] = 0 separately inside k and H so the Cartan
    // splitting of the subalgebra is inherited.
    let commutant_combos = |indices: &[usize]| -> Vec<DVector<f64>> {
        let cols = indices.len();
        let mut a = DMatrix::zeros(n * n, cols);
        for (c, &idx) in indices.iter().enumerate() {
            a.set_column(c, &linalg::vectorize(&linalg::comm(&ambient.rho[idx], &i1)));
        }
        let ns = linalg::nullspace(&a, tol);
        (0..ns.dim())
            .map(|j| ns.basis.column(j).into_owned())
            .collect()
    };
    let k_combos = commutant_combos(&ambient.cartan.k_indices);
    let h_combos = commutant_combos(&ambient.cartan.h_indices);

    let mut mats: Vec<DMatrix<f64>> = Vec::new();
    let mut names: Vec<String> = Vec::new();
    for (j, combo) in k_combos.iter().enumerate() {
        let mut mmat = DMatrix::zeros(n, n);
        for (c, &idx) in ambient.cartan.k_indices.iter().enumerate() {
            if combo[c] != 0.0 {
                mmat += combo[c] * &ambient.rho[idx];
            }
        }
        mats.push(mmat);
        names.push(format!("k{j}"));
    }
    let k_count = mats.len();
    for (j, combo) in h_combos.iter().enumerate() {
        let mut mmat = DMatrix::zeros(n, n);
        for (c, &idx) in ambient.cartan.h_indices.iter().enumerate() {
            if combo[c] != 0.0 {
                mmat += combo[c] * &ambient.rho[idx];
            }
        }
        mats.push(mmat);
        names.push(format!("h{}", j));
    }
    let dim_l = mats.len();
    let algebra = LieAlgebra::from_matrix_basis(names, &mats, tol)?;
    let k_indices: Vec<usize> = (0..k_count).collect();
    let h_indices: Vec<usize> = (k_count..dim_l).collect();

    // z spans the center of k; normalize so ad_z restricted to H squares to -1
    // and satisfies the admissibility pairing with J_V.
    let sub_k = sub_algebra_center(&algebra, &k_indices, tol)?;
    let j_v = ambient.j_v.clone().expect("su(m,m) carries J_V");
    let mut chosen: Option<(DVector<f64>, DMatrix<f64>)> = None;
    for sign in [1.0, -1.0] {
        let z = sign * &sub_k;
        if let Ok(j_h) = j_h_from_ad_z(&algebra, &z, &h_indices, tol) {
            // Check rho(J_H x) = rho(x) J_V on one H generator.
            let mut lhs = DMatrix::zeros(n, n);
            for (r, &hr) in h_indices.iter().enumerate() {
                if j_h[(r, 0)] != 0.0 {
                    lhs += j_h[(r, 0)] * &mats[hr];
                }
            }
            let rhs = &mats[h_indices[0]] * &j_v;
            if linalg::max_abs(&(lhs - rhs)) < 1e-8 {
                chosen = Some((z, j_h));
                break;
            }
        }
    }
    let (z, j_h) = chosen.ok_or_else(|| {
        Error::NotAdmissible("so* center normalization failed the pairing check".into())
    })?;

    Ok(Representation {
        algebra,
        dim_v: n,
        rho: mats,
        j_v: Some(j_v),
        cartan: CartanData {
            k_indices,
            h_indices,
            z_coords: z,
            j_h,
        },
        type_flag: AlgebraType::NonCompact,
        name: format!("so_star:{m}"),
        h_v: DMatrix::identity(n, n),
        summands: vec![SummandInfo {
            base_id: format!("so_star:{m}"),
            base_dim: n,
            mult: 1,
        }],
    })
}

/// Central element of the subalgebra spanned by the given indices, scaled so
/// that (ad_z)^2 = -1 on its complement. Returns the coordinate vector.
fn sub_algebra_center(
    alg: &LieAlgebra,
    k_indices: &[usize],
    tol: &Tolerances,
) -> Result<DVector<f64>> {
    let kn = k_indices.len();
    // x in span(k) with [x, k_j] = 0 for all j.
    let mut a = DMatrix::zeros(alg.dim * kn, kn);
    for (col, &ki) in k_indices.iter().enumerate() {
        for (blk, &kj) in k_indices.iter().enumerate() {
            let br = alg.bracket_basis(ki, kj);
            for r in 0..alg.dim {
                a[(blk * alg.dim + r, col)] = br[r];
            }
        }
    }
    let ns = linalg::nullspace(&a, tol);
    if ns.dim() != 1 {
        return Err(Error::NotAdmissible(format!(
            "isotropy center has dimension {}, expected 1",
            ns.dim()
        )));
    }
    let combo = ns.basis.column(0).into_owned();
    let mut z = DVector::zeros(alg.dim);
    for (c, &ki) in k_indices.iter().enumerate() {
        z[ki] = combo[c];
    }
    // Normalize: (ad_z)^2 = -s^2 on the complement of k.
    let ad_z = alg.ad_vec(&z);
    let sq = &ad_z * &ad_z;
    // Use the largest-magnitude diagonal entry outside k as the scale.
    let mut s2: f64 = 0.0;
    for idx in 0..alg.dim {
        if !k_indices.contains(&idx) {
            s2 = s2.max(sq[(idx, idx)].abs());
        }
    }
    if s2 == 0.0 {
        return Err(Error::NotAdmissible(
            "ad_z vanishes on the complement".into(),
        ));
    }
    Ok(z / s2.sqrt())
}

/// Anticommuting gamma generators of square +1 on a module of dimension 2^n,
/// together with a complex structure anticommuting with all of them. Built by
/// doubling the module once per generator.
pub fn gamma_generators(n: usize) -> (Vec<DMatrix<f64>>, DMatrix<f64>) {
    let e = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
    let p = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
    let q = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
    let mut gammas = vec![e.clone()];
    let mut j = q;
    for _ in 1..n {
        let s = gammas[0].nrows();
        let id = DMatrix::<f64>::identity(s, s);
        gammas = gammas.iter().map(|g| g.kronecker(&e)).collect();
        j = j.kronecker(&e);
        gammas.push(id.kronecker(&p));
    }
    (gammas, j)
}

/// so(2, n) acting on a Clifford module: generators act with square +1 and
/// the complex structure J anticommutes with all of them.
pub fn build_so2n_clifford(n: usize, tol: &Tolerances) -> Result<Representation> {
    if !(1..=8).contains(&n) {
        return Err(Error::InvalidDimension(
            "so2n supports 1 <= n <= 8 at catalog scale".into(),
        ));
    }
    let (gammas, j_sigma) = gamma_generators(n);
    let dv = gammas[0].nrows();

    // so(2, n) as matrices on R^(n+2) preserving diag(1, 1, -1, ..., -1).
    let amb = n + 2;
    let mut lmats: Vec<DMatrix<f64>> = Vec::new();
    let mut names: Vec<String> = Vec::new();
    let mut rho: Vec<DMatrix<f64>> = Vec::new();

    // k: z rotates the definite 2-plane, so(n) rotates the rest.
    let mut zm = DMatrix::zeros(amb, amb);
    zm[(1, 0)] = 1.0;
    zm[(0, 1)] = -1.0;
    lmats.push(zm);
    names.push("z".into());
    rho.push(-0.5 * &j_sigma);
    for a in 0..n {
        for b in (a + 1)..n {
            let mut r = DMatrix::zeros(amb, amb);
            r[(2 + a, 2 + b)] = 1.0;
            r[(2 + b, 2 + a)] = -1.0;
            lmats.push(r);
            names.push(format!("r{a}_{b}"));
            rho.push(0.5 * &gammas[a] * &gammas[b]);
        }
    }
    let k_count = lmats.len();
    // H: boosts u_a = (e_a, 0) and v_a = (0, e_a).
    for a in 0..n {
        let mut u = DMatrix::zeros(amb, amb);
        u[(2 + a, 0)] = 1.0;
        u[(0, 2 + a)] = 1.0;
        lmats.push(u);
        names.push(format!("u{a}"));
        rho.push(0.5 * &gammas[a]);
    }
    for a in 0..n {
        let mut v = DMatrix::zeros(amb, amb);
        v[(2 + a, 1)] = 1.0;
        v[(1, 2 + a)] = 1.0;
        lmats.push(v);
        names.push(format!("v{a}"));
        rho.push(0.5 * &gammas[a] * &j_sigma);
    }
    let dim_l = lmats.len();
    let algebra = LieAlgebra::from_matrix_basis(names, &lmats, tol)?;
    let mut z = DVector::zeros(dim_l);
    z[0] = 1.0;
    let k_indices: Vec<usize> = (0..k_count).collect();
    let h_indices: Vec<usize> = (k_count..dim_l).collect();
    let j_h = j_h_from_ad_z(&algebra, &z, &h_indices, tol)?;

    Ok(Representation {
        algebra,
        dim_v: dv,
        rho,
        j_v: Some(j_sigma),
        cartan: CartanData {
            k_indices,
            h_indices,
            z_coords: z,
            j_h,
        },
        type_flag: AlgebraType::NonCompact,
        name: format!("so2n:{n}"),
        h_v: DMatrix::identity(dv, dv),
        summands: vec![SummandInfo {
            base_id: format!("so2n:{n}"),
            base_dim: dv,
            mult: 1,
        }],
    })
}

/// Resolves a catalog id: `sp:m`, `su:p,q`, `su1n:n:p`, `so_star:m`,
/// `so2n:n`, `dual:<id>`, `sum:<id>+<id>+...`, `mult:<d>:<id>`.
pub fn build_rep(id: &str, tol: &Tolerances) -> Result<Representation> {
    let bad = || Error::UnknownModelId(id.to_string());
    if let Some(rest) = id.strip_prefix("dual:") {
        let inner = build_rep(rest, tol)?;
        return dualize(&inner, tol);
    }
    if let Some(rest) = id.strip_prefix("sum:") {
        let parts: Vec<&str> = rest.split('+').collect();
        if parts.is_empty() {
            return Err(bad());
        }
        let reps: Result<Vec<Representation>> = parts.iter().map(|p| build_rep(p, tol)).collect();
        return direct_sum(&reps?, tol);
    }
    if let Some(rest) = id.strip_prefix("mult:") {
        let (d, base) = rest.split_once(':').ok_or_else(bad)?;
        let d: usize = d.parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        let rep = build_rep(base, tol)?;
        let copies: Vec<Representation> = (0..d).map(|_| rep.clone()).collect();
        let mut sum = direct_sum(&copies, tol)?;
        sum.name = format!("mult:{d}:{base}");
        sum.summands = vec![SummandInfo {
            base_id: base.to_string(),
            base_dim: rep.dim_v,
            mult: d,
        }];
        return Ok(sum);
    }
    if let Some(rest) = id.strip_prefix("sp:") {
        let m: usize = rest.parse().map_err(|_| bad())?;
        return build_sp(m, tol);
    }
    if let Some(rest) = id.strip_prefix("su:") {
        let (p, q) = rest.split_once(',').ok_or_else(bad)?;
        let p: usize = p.parse().map_err(|_| bad())?;
        let q: usize = q.parse().map_err(|_| bad())?;
        return build_su_pq(p, q, tol);
    }
    if let Some(rest) = id.strip_prefix("su1n:") {
        let (n, p) = rest.split_once(':').ok_or_else(bad)?;
        let n: usize = n.parse().map_err(|_| bad())?;
        let p: usize = p.parse().map_err(|_| bad())?;
        return build_su1n_wedge(n, p, tol);
    }
    if let Some(rest) = id.strip_prefix("so_star:") {
        let m: usize = rest.parse().map_err(|_| bad())?;
        return build_so_star(m, tol);
    }
    if let Some(rest) = id.strip_prefix("so2n:") {
        let n: usize = rest.parse().map_err(|_| bad())?;
        return build_so2n_clifford(n, tol);
    }
    Err(bad())
}

/// Non-compact catalog ids at the given rank bounds.
pub fn noncompact_ids(ranks: &RankBounds) -> Vec<String> {
    let mut ids = Vec::new();
    for m in 1..=ranks.sp_max_m {
        ids.push(format!("sp:{m}"));
    }
    for total in 2..=ranks.su_max_pq {
        for p in 1..total {
            ids.push(format!("su:{p},{}", total - p));
        }
    }
    for n in 1..=ranks.su1n_max_n {
        for p in 1..=n {
            ids.push(format!("su1n:{n}:{p}"));
        }
    }
    for m in 2..=ranks.so_star_max_m {
        ids.push(format!("so_star:{m}"));
    }
    for n in 1..=ranks.so2n_max_n {
        ids.push(format!("so2n:{n}"));
    }
    ids
}

/// All catalog ids (non-compact entries and their duals).
pub fn catalog_ids(ranks: &RankBounds) -> Vec<String> {
    let mut ids = noncompact_ids(ranks);
    let duals: Vec<String> = ids.iter().map(|s| format!("dual:{s}")).collect();
    ids.extend(duals);
    ids
}

/// The subspace spanned by coordinate directions, used in tests.
pub fn coordinate_subspace(ambient: usize, indices: &[usize]) -> Subspace {
    let mut m = DMatrix::zeros(ambient, indices.len());
    for (c, &i) in indices.iter().enumerate() {
        m[(i, c)] = 1.0;
    }
    Subspace::new(m)
}

/// sl(2, R) realized as sp(1, R): used to cross-check the abstract sl2
/// fixture against the catalog.
pub fn sl2_as_sp1(tol: &Tolerances) -> Result<Representation> {
    build_sp(1, tol)
}

pub use lie::sl2;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::jacobi_residual;
    use crate::rep::{background_metric, casimir, centralizer_split, check_admissible, RepType};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn sp1_dimensions_and_admissibility() {
        let r = build_sp(1, &tol()).unwrap();
        assert_eq!(r.dim_l(), 3);
        assert_eq!(r.dim_v, 2);
        assert_eq!(r.cartan.k_indices.len(), 1);
        assert!(jacobi_residual(&r.algebra) < 1e-12);
        let rep = check_admissible(&r, &tol());
        assert!(rep.verdict, "{rep:?}");
        background_metric(&r, &tol()).unwrap();
    }

    #[test]
    fn sp2_dimensions() {
        let r = build_sp(2, &tol()).unwrap();
        assert_eq!(r.dim_l(), 10);
        assert_eq!(r.dim_v, 4);
        assert!(check_admissible(&r, &tol()).verdict);
    }

    #[test]
    fn su11_dimensions() {
        let r = build_su_pq(1, 1, &tol()).unwrap();
        assert_eq!(r.dim_l(), 3);
        assert_eq!(r.dim_v, 4);
        let rep = check_admissible(&r, &tol());
        assert!(rep.verdict, "{rep:?}");
        // The (1,1) entry coincides with two copies of the standard sp(1,R)
        // representation, so its commutant is a full 2x2 matrix algebra with a
        // one-dimensional skew part.
        let split = centralizer_split(&r, &r.h_v.clone(), &tol());
        assert_eq!(split.rep_type, RepType::Reducible);
        assert_eq!(split.c_plus.len(), 3);
        assert_eq!(split.c_minus.len(), 1);
    }

    #[test]
    fn su21_dimensions() {
        let r = build_su_pq(2, 1, &tol()).unwrap();
        assert_eq!(r.dim_l(), 8);
        assert_eq!(r.dim_v, 6);
        assert!(check_admissible(&r, &tol()).verdict);
    }

    #[test]
    fn su1n_11_wedge() {
        let r = build_su1n_wedge(1, 1, &tol()).unwrap();
        assert_eq!(r.dim_v, 4);
        assert_eq!(r.dim_l(), 3);
        let rep = check_admissible(&r, &tol());
        assert!(rep.verdict, "{rep:?}");
        background_metric(&r, &tol()).unwrap();
        // Degenerate low-rank case: the wedge power of su(1,1) is the dual of
        // the standard representation, hence of real type with a single skew
        // commutant direction (the ambient complex structure).
        let split = centralizer_split(&r, &r.h_v.clone(), &tol());
        assert_eq!(split.c_minus.len(), 1);
    }

    #[test]
    fn su1n_21_is_complex_type() {
        let r = build_su1n_wedge(2, 1, &tol()).unwrap();
        assert_eq!(r.dim_v, 6);
        assert!(check_admissible(&r, &tol()).verdict);
        let split = centralizer_split(&r, &r.h_v.clone(), &tol());
        assert_eq!(split.rep_type, RepType::Complex);
    }

    #[test]
    fn su1n_22_wedge_dim() {
        let r = build_su1n_wedge(2, 2, &tol()).unwrap();
        assert_eq!(r.dim_v, 6); // 2 C(2,2) + 2 C(2,1) = 2 + 4
        assert!(check_admissible(&r, &tol()).verdict);
    }

    #[test]
    fn su1n_rejects_unfaithful_power() {
        assert!(build_su1n_wedge(2, 3, &tol()).is_err());
    }

    #[test]
    fn so_star_2_dims() {
        let r = build_so_star(2, &tol()).unwrap();
        assert_eq!(r.dim_l(), 6);
        assert_eq!(r.dim_v, 8);
        let rep = check_admissible(&r, &tol());
        assert!(rep.verdict, "{rep:?}");
        background_metric(&r, &tol()).unwrap();
    }

    #[test]
    fn so2n_small_modules() {
        let r1 = build_so2n_clifford(1, &tol()).unwrap();
        assert_eq!(r1.dim_v, 2);
        assert!(check_admissible(&r1, &tol()).verdict);
        let r3 = build_so2n_clifford(3, &tol()).unwrap();
        assert_eq!(r3.dim_v, 8);
        assert_eq!(r3.dim_l(), 10);
        let rep = check_admissible(&r3, &tol());
        assert!(rep.verdict, "{rep:?}");
        background_metric(&r3, &tol()).unwrap();
    }

    #[test]
    fn dual_of_sp1_is_compact_admissible() {
        let r = build_sp(1, &tol()).unwrap();
        let d = dualize(&r, &tol()).unwrap();
        assert_eq!(d.dim_v, 4);
        assert_eq!(d.dim_l(), 3);
        assert!(jacobi_residual(&d.algebra) < 1e-12);
        let rep = check_admissible(&d, &tol());
        assert!(rep.verdict, "{rep:?}");
        background_metric(&d, &tol()).unwrap();
    }

    #[test]
    fn direct_sum_two_sp1() {
        let r = build_sp(1, &tol()).unwrap();
        let s = direct_sum(&[r.clone(), r], &tol()).unwrap();
        assert_eq!(s.dim_v, 4);
        let cent = s.centralizer(&tol());
        assert_eq!(cent.len(), 4);
    }

    #[test]
    fn casimir_sp1_quarter_identity() {
        let r = build_sp(1, &tol()).unwrap();
        let b = lie::killing_form(&r.algebra, &tol());
        let hn = r.cartan.h_indices.len();
        let mut g_h = DMatrix::zeros(hn, hn);
        for (a, &i) in r.cartan.h_indices.iter().enumerate() {
            for (c, &j) in r.cartan.h_indices.iter().enumerate() {
                g_h[(a, c)] = b.matrix[(i, j)];
            }
        }
        let cas = casimir(&r, &g_h, &tol()).unwrap();
        let expected = 0.25 * DMatrix::<f64>::identity(2, 2);
        assert!(linalg::max_abs(&(&cas.casimir - expected)) < 1e-12);
        assert!(cas.identity_residual < 1e-12);
        assert!(cas.casimir_invertible && cas.rho_z_invertible);
    }

    #[test]
    fn direct_sum_of_nothing_rejected() {
        assert!(direct_sum(&[], &tol()).is_err());
    }

    #[test]
    fn compact_dual_casimir_negative_definite() {
        let r = build_rep("dual:sp:1", &tol()).unwrap();
        let b = lie::killing_form(&r.algebra, &tol());
        let hn = r.cartan.h_indices.len();
        let mut g_h = DMatrix::zeros(hn, hn);
        for (a, &i) in r.cartan.h_indices.iter().enumerate() {
            for (c, &j) in r.cartan.h_indices.iter().enumerate() {
                g_h[(a, c)] = -b.matrix[(i, j)];
            }
        }
        let cas = casimir(&r, &g_h, &tol()).unwrap();
        let evs = linalg::sym_eigenvalues(&cas.casimir);
        assert!(evs.iter().all(|&e| e < 0.0), "{evs:?}");
    }

    #[test]
    fn unknown_id_rejected() {
        assert!(matches!(
            build_rep("nope:1", &tol()),
            Err(Error::UnknownModelId(_))
        ));
    }
}
