//! Forward tensor operations.
//!
//! Shape conventions: matrices are `[rows, cols]` row-major, image batches
//! are `[batch, channels, height, width]`, vectors are `[n]`. Every op
//! validates shapes and reports both operands on mismatch. All loops are
//! sequential with a fixed iteration order, so results are bitwise
//! reproducible.

use super::element::Element;
use super::tensor::{debug_check_finite, Tensor};
use crate::error::{Error, Result};

// ── matmul microkernels ──────────────────────────────────────────────

/// c += a @ b, a: m×k, b: k×n.
pub(crate) fn mm_nn<E: Element>(a: &[E], b: &[E], c: &mut [E], m: usize, k: usize, n: usize) {
    debug_assert_eq!(a.len(), m * k);
    debug_assert_eq!(b.len(), k * n);
    debug_assert_eq!(c.len(), m * n);
    for i in 0..m {
        let arow = &a[i * k..(i + 1) * k];
        let crow = &mut c[i * n..(i + 1) * n];
        for (kk, &aik) in arow.iter().enumerate() {
            let brow = &b[kk * n..(kk + 1) * n];
            for j in 0..n {
                crow[j] += aik * brow[j];
            }
        }
    }
}

/// c += a @ b^T, a: m×k, b: n×k.
pub(crate) fn mm_nt<E: Element>(a: &[E], b: &[E], c: &mut [E], m: usize, k: usize, n: usize) {
    debug_assert_eq!(a.len(), m * k);
    debug_assert_eq!(b.len(), n * k);
    debug_assert_eq!(c.len(), m * n);
    let k4 = k / 4 * 4;
    for i in 0..m {
        let arow = &a[i * k..(i + 1) * k];
        for j in 0..n {
            let brow = &b[j * k..(j + 1) * k];
            // Four independent accumulators; summed in a fixed order.
            let (mut s0, mut s1, mut s2, mut s3) = (E::ZERO, E::ZERO, E::ZERO, E::ZERO);
            let mut t = 0;
            while t < k4 {
                s0 += arow[t] * brow[t];
                s1 += arow[t + 1] * brow[t + 1];
                s2 += arow[t + 2] * brow[t + 2];
                s3 += arow[t + 3] * brow[t + 3];
                t += 4;
            }
            for t in k4..k {
                s0 += arow[t] * brow[t];
            }
            c[i * n + j] += (s0 + s1) + (s2 + s3);
        }
    }
}

/// c += a^T @ b, a: t×m, b: t×n.
pub(crate) fn mm_tn<E: Element>(a: &[E], b: &[E], c: &mut [E], t: usize, m: usize, n: usize) {
    debug_assert_eq!(a.len(), t * m);
    debug_assert_eq!(b.len(), t * n);
    debug_assert_eq!(c.len(), m * n);
    for tt in 0..t {
        let arow = &a[tt * m..(tt + 1) * m];
        let brow = &b[tt * n..(tt + 1) * n];
        for (i, &ati) in arow.iter().enumerate() {
            let crow = &mut c[i * n..(i + 1) * n];
            for j in 0..n {
                crow[j] += ati * brow[j];
            }
        }
    }
}

fn require_rank<E: Element>(op: &'static str, t: &Tensor<E>, rank: usize) -> Result<()> {
    if t.rank() != rank {
        return Err(Error::invalid(
            op,
            format!("expected rank-{} tensor, got shape {:?}", rank, t.shape()),
        ));
    }
    Ok(())
}

fn shape_err<E: Element>(op: &'static str, a: &Tensor<E>, b: &Tensor<E>) -> Error {
    Error::ShapeMismatch {
        op,
        lhs: a.shape().to_vec(),
        rhs: b.shape().to_vec(),
    }
}

// ── elementwise ──────────────────────────────────────────────────────

pub fn add<E: Element>(a: &Tensor<E>, b: &Tensor<E>) -> Result<Tensor<E>> {
    if a.shape() != b.shape() {
        return Err(shape_err("add", a, b));
    }
    let data = a.data().iter().zip(b.data()).map(|(&x, &y)| x + y).collect();
    let out = Tensor::new(a.shape().to_vec(), data)?;
    debug_check_finite("add", &out);
    Ok(out)
}

pub fn mul<E: Element>(a: &Tensor<E>, b: &Tensor<E>) -> Result<Tensor<E>> {
    if a.shape() != b.shape() {
        return Err(shape_err("mul", a, b));
    }
    let data = a.data().iter().zip(b.data()).map(|(&x, &y)| x * y).collect();
    let out = Tensor::new(a.shape().to_vec(), data)?;
    debug_check_finite("mul", &out);
    Ok(out)
}

pub fn scale<E: Element>(a: &Tensor<E>, c: f64) -> Result<Tensor<E>> {
    let c = E::from_f64(c);
    let out = a.map(|v| v * c);
    debug_check_finite("scale", &out);
    Ok(out)
}

pub fn relu<E: Element>(a: &Tensor<E>) -> Result<Tensor<E>> {
    Ok(a.map(|v| if v > E::ZERO { v } else { E::ZERO }))
}

pub fn exp<E: Element>(a: &Tensor<E>) -> Result<Tensor<E>> {
    let out = a.map(|v| v.exp());
    debug_check_finite("exp", &out);
    Ok(out)
}

pub fn ln<E: Element>(a: &Tensor<E>) -> Result<Tensor<E>> {
    let out = a.map(|v| v.ln());
    debug_check_finite("ln", &out);
    Ok(out)
}

/// `mat + row` with the row vector broadcast across all rows.
pub fn add_row<E: Element>(mat: &Tensor<E>, row: &Tensor<E>) -> Result<Tensor<E>> {
    require_rank("add_row", mat, 2)?;
    let (r, c) = (mat.shape()[0], mat.shape()[1]);
    if row.shape() != [c] {
        return Err(shape_err("add_row", mat, row));
    }
    let rv = row.data();
    let mut data = mat.to_vec();
    for i in 0..r {
        for j in 0..c {
            data[i * c + j] += rv[j];
        }
    }
    let out = Tensor::new(vec![r, c], data)?;
    debug_check_finite("add_row", &out);
    Ok(out)
}

/// `mat − col` with the column vector `[r, 1]` broadcast across all columns.
pub fn sub_col<E: Element>(mat: &Tensor<E>, col: &Tensor<E>) -> Result<Tensor<E>> {
    require_rank("sub_col", mat, 2)?;
    let (r, c) = (mat.shape()[0], mat.shape()[1]);
    if col.shape() != [r, 1] {
        return Err(shape_err("sub_col", mat, col));
    }
    let cv = col.data();
    let mut data = mat.to_vec();
    for i in 0..r {
        for j in 0..c {
            data[i * c + j] -= cv[i];
        }
    }
    let out = Tensor::new(vec![r, c], data)?;
    debug_check_finite("sub_col", &out);
    Ok(out)
}

// ── linear algebra ───────────────────────────────────────────────────

pub fn matmul<E: Element>(a: &Tensor<E>, b: &Tensor<E>) -> Result<Tensor<E>> {
    require_rank("matmul", a, 2)?;
    require_rank("matmul", b, 2)?;
    let (m, k) = (a.shape()[0], a.shape()[1]);
    let (k2, n) = (b.shape()[0], b.shape()[1]);
    if k != k2 {
        return Err(shape_err("matmul", a, b));
    }
    let mut data = vec![E::ZERO; m * n];
    mm_nn(a.data(), b.data(), &mut data, m, k, n);
    let out = Tensor::new(vec![m, n], data)?;
    debug_check_finite("matmul", &out);
    Ok(out)
}

/// `a @ b^T`; `b` is `[n, k]` stored row-major.
pub fn matmul_nt<E: Element>(a: &Tensor<E>, b: &Tensor<E>) -> Result<Tensor<E>> {
    require_rank("matmul_nt", a, 2)?;
    require_rank("matmul_nt", b, 2)?;
    let (m, k) = (a.shape()[0], a.shape()[1]);
    let (n, k2) = (b.shape()[0], b.shape()[1]);
    if k != k2 {
        return Err(shape_err("matmul_nt", a, b));
    }
    let mut data = vec![E::ZERO; m * n];
    mm_nt(a.data(), b.data(), &mut data, m, k, n);
    let out = Tensor::new(vec![m, n], data)?;
    debug_check_finite("matmul_nt", &out);
    Ok(out)
}

/// Normalize each row of a matrix to unit Euclidean length.
///
/// A zero row is an error: downstream cosine similarity is undefined on it.
pub fn l2_normalize_rows<E: Element>(a: &Tensor<E>) -> Result<Tensor<E>> {
    require_rank("l2_normalize_rows", a, 2)?;
    let (r, c) = (a.shape()[0], a.shape()[1]);
    let mut data = a.to_vec();
    for i in 0..r {
        let row = &mut data[i * c..(i + 1) * c];
        let mut sq = E::ZERO;
        for &v in row.iter() {
            sq += v * v;
        }
        let norm = sq.sqrt();
        if !(norm > E::ZERO) {
            return Err(Error::invalid(
                "l2_normalize_rows",
                format!("row {} has zero norm", i),
            ));
        }
        for v in row.iter_mut() {
            *v = *v / norm;
        }
    }
    let out = Tensor::new(vec![r, c], data)?;
    debug_check_finite("l2_normalize_rows", &out);
    Ok(out)
}

// ── reductions ───────────────────────────────────────────────────────

/// Row sums of a matrix, returned as a `[r, 1]` column.
pub fn sum_rows<E: Element>(a: &Tensor<E>) -> Result<Tensor<E>> {
    require_rank("sum_rows", a, 2)?;
    let (r, c) = (a.shape()[0], a.shape()[1]);
    let d = a.data();
    let mut out = vec![E::ZERO; r];
    for i in 0..r {
        let mut s = E::ZERO;
        for j in 0..c {
            s += d[i * c + j];
        }
        out[i] = s;
    }
    let out = Tensor::new(vec![r, 1], out)?;
    debug_check_finite("sum_rows", &out);
    Ok(out)
}

pub fn sum_all<E: Element>(a: &Tensor<E>) -> Result<Tensor<E>> {
    let mut s = E::ZERO;
    for &v in a.data() {
        s += v;
    }
    let out = Tensor::scalar(s);
    debug_check_finite("sum_all", &out);
    Ok(out)
}

pub fn mean_all<E: Element>(a: &Tensor<E>) -> Result<Tensor<E>> {
    if a.is_empty() {
        return Err(Error::invalid("mean_all", "empty tensor"));
    }
    let mut s = E::ZERO;
    for &v in a.data() {
        s += v;
    }
    let out = Tensor::scalar(s / E::from_f64(a.len() as f64));
    debug_check_finite("mean_all", &out);
    Ok(out)
}

/// Concatenate along the first axis; trailing dimensions must agree.
pub fn concat_first<E: Element>(parts: &[&Tensor<E>]) -> Result<Tensor<E>> {
    if parts.is_empty() {
        return Err(Error::invalid("concat_first", "no tensors given"));
    }
    let tail = &parts[0].shape()[1..];
    let mut first_total = 0;
    for p in parts {
        if p.rank() == 0 || &p.shape()[1..] != tail {
            return Err(shape_err("concat_first", parts[0], p));
        }
        first_total += p.shape()[0];
    }
    let mut data = Vec::with_capacity(first_total * tail.iter().product::<usize>());
    for p in parts {
        data.extend_from_slice(p.data());
    }
    let mut shape = vec![first_total];
    shape.extend_from_slice(tail);
    Tensor::new(shape, data)
}

// ── convolution and friends ──────────────────────────────────────────

/// Validated geometry of one conv2d application.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ConvDims {
    pub batch: usize,
    pub cin: usize,
    pub h: usize,
    pub w: usize,
    pub cout: usize,
    pub kh: usize,
    pub kw: usize,
    pub stride: usize,
    pub pad: usize,
    pub hout: usize,
    pub wout: usize,
}

impl ConvDims {
    pub(crate) fn check<E: Element>(
        input: &Tensor<E>,
        kernel: &Tensor<E>,
        stride: usize,
        pad: usize,
    ) -> Result<Self> {
        require_rank("conv2d", input, 4)?;
        require_rank("conv2d", kernel, 4)?;
        let (batch, cin, h, w) = (
            input.shape()[0],
            input.shape()[1],
            input.shape()[2],
            input.shape()[3],
        );
        let (cout, kcin, kh, kw) = (
            kernel.shape()[0],
            kernel.shape()[1],
            kernel.shape()[2],
            kernel.shape()[3],
        );
        if cin != kcin {
            return Err(shape_err("conv2d", input, kernel));
        }
        if stride == 0 {
            return Err(Error::invalid("conv2d", "stride must be >= 1"));
        }
        if h + 2 * pad < kh || w + 2 * pad < kw {
            return Err(Error::invalid(
                "conv2d",
                format!("kernel {}x{} larger than padded input {}x{}", kh, kw, h + 2 * pad, w + 2 * pad),
            ));
        }
        let hout = (h + 2 * pad - kh) / stride + 1;
        let wout = (w + 2 * pad - kw) / stride + 1;
        Ok(ConvDims {
            batch,
            cin,
            h,
            w,
            cout,
            kh,
            kw,
            stride,
            pad,
            hout,
            wout,
        })
    }

    pub(crate) fn patch_len(&self) -> usize {
        self.cin * self.kh * self.kw
    }

    pub(crate) fn out_pixels(&self) -> usize {
        self.hout * self.wout
    }
}

/// Unpack one image into patch columns: `cols[(c*kh+ky)*kw+kx, oy*wout+ox]`.
pub(crate) fn im2col<E: Element>(img: &[E], d: &ConvDims, cols: &mut [E]) {
    let p = d.out_pixels();
    debug_assert_eq!(img.len(), d.cin * d.h * d.w);
    debug_assert_eq!(cols.len(), d.patch_len() * p);
    for c in 0..d.cin {
        let plane = &img[c * d.h * d.w..(c + 1) * d.h * d.w];
        for ky in 0..d.kh {
            for kx in 0..d.kw {
                let row = ((c * d.kh + ky) * d.kw + kx) * p;
                for oy in 0..d.hout {
                    let sy = (oy * d.stride + ky) as isize - d.pad as isize;
                    let base = row + oy * d.wout;
                    if sy < 0 || sy >= d.h as isize {
                        cols[base..base + d.wout].fill(E::ZERO);
                        continue;
                    }
                    let srow = &plane[sy as usize * d.w..(sy as usize + 1) * d.w];
                    for ox in 0..d.wout {
                        let sx = (ox * d.stride + kx) as isize - d.pad as isize;
                        cols[base + ox] = if sx < 0 || sx >= d.w as isize {
                            E::ZERO
                        } else {
                            srow[sx as usize]
                        };
                    }
                }
            }
        }
    }
}

/// Scatter-add patch columns back into an image (adjoint of [`im2col`]).
pub(crate) fn col2im<E: Element>(cols: &[E], d: &ConvDims, img: &mut [E]) {
    let p = d.out_pixels();
    debug_assert_eq!(img.len(), d.cin * d.h * d.w);
    debug_assert_eq!(cols.len(), d.patch_len() * p);
    for c in 0..d.cin {
        let plane = &mut img[c * d.h * d.w..(c + 1) * d.h * d.w];
        for ky in 0..d.kh {
            for kx in 0..d.kw {
                let row = ((c * d.kh + ky) * d.kw + kx) * p;
                for oy in 0..d.hout {
                    let sy = (oy * d.stride + ky) as isize - d.pad as isize;
                    if sy < 0 || sy >= d.h as isize {
                        continue;
                    }
                    let base = row + oy * d.wout;
                    let srow = &mut plane[sy as usize * d.w..(sy as usize + 1) * d.w];
                    for ox in 0..d.wout {
                        let sx = (ox * d.stride + kx) as isize - d.pad as isize;
                        if sx >= 0 && sx < d.w as isize {
                            srow[sx as usize] += cols[base + ox];
                        }
                    }
                }
            }
        }
    }
}

/// 2-D convolution with zero padding, optional per-channel bias.
pub fn conv2d<E: Element>(
    input: &Tensor<E>,
    kernel: &Tensor<E>,
    bias: Option<&Tensor<E>>,
    stride: usize,
    pad: usize,
) -> Result<Tensor<E>> {
    let d = ConvDims::check(input, kernel, stride, pad)?;
    if let Some(b) = bias {
        if b.shape() != [d.cout] {
            return Err(shape_err("conv2d", kernel, b));
        }
    }
    let p = d.out_pixels();
    let klen = d.patch_len();
    let mut cols = vec![E::ZERO; klen * p];
    let mut out = vec![E::ZERO; d.batch * d.cout * p];
    let img_len = d.cin * d.h * d.w;
    for bi in 0..d.batch {
        im2col(&input.data()[bi * img_len..(bi + 1) * img_len], &d, &mut cols);
        let out_img = &mut out[bi * d.cout * p..(bi + 1) * d.cout * p];
        mm_nn(kernel.data(), &cols, out_img, d.cout, klen, p);
        if let Some(b) = bias {
            for co in 0..d.cout {
                let bv = b.data()[co];
                for v in out_img[co * p..(co + 1) * p].iter_mut() {
                    *v += bv;
                }
            }
        }
    }
    let out = Tensor::new(vec![d.batch, d.cout, d.hout, d.wout], out)?;
    debug_check_finite("conv2d", &out);
    Ok(out)
}

/// Spatial mean per channel: `[b, c, h, w] -> [b, c]`.
pub fn global_avg_pool<E: Element>(input: &Tensor<E>) -> Result<Tensor<E>> {
    require_rank("global_avg_pool", input, 4)?;
    let (b, c, h, w) = (
        input.shape()[0],
        input.shape()[1],
        input.shape()[2],
        input.shape()[3],
    );
    let hw = h * w;
    if hw == 0 {
        return Err(Error::invalid("global_avg_pool", "empty spatial extent"));
    }
    let inv = E::from_f64(1.0 / hw as f64);
    let d = input.data();
    let mut out = vec![E::ZERO; b * c];
    for i in 0..b * c {
        let mut s = E::ZERO;
        for &v in &d[i * hw..(i + 1) * hw] {
            s += v;
        }
        out[i] = s * inv;
    }
    Tensor::new(vec![b, c], out)
}

/// Per-sample, per-channel normalization over the spatial extent.
pub fn instance_norm<E: Element>(input: &Tensor<E>, eps: f64) -> Result<Tensor<E>> {
    require_rank("instance_norm", input, 4)?;
    let (b, c, h, w) = (
        input.shape()[0],
        input.shape()[1],
        input.shape()[2],
        input.shape()[3],
    );
    let hw = h * w;
    if hw == 0 {
        return Err(Error::invalid("instance_norm", "empty spatial extent"));
    }
    let inv_n = E::from_f64(1.0 / hw as f64);
    let eps = E::from_f64(eps);
    let d = input.data();
    let mut out = vec![E::ZERO; d.len()];
    for i in 0..b * c {
        let x = &d[i * hw..(i + 1) * hw];
        let mut mean = E::ZERO;
        for &v in x {
            mean += v;
        }
        mean *= inv_n;
        let mut var = E::ZERO;
        for &v in x {
            let dv = v - mean;
            var += dv * dv;
        }
        var *= inv_n;
        let inv_sigma = E::ONE / (var + eps).sqrt();
        let o = &mut out[i * hw..(i + 1) * hw];
        for (oo, &v) in o.iter_mut().zip(x) {
            *oo = (v - mean) * inv_sigma;
        }
    }
    let out = Tensor::new(vec![b, c, h, w], out)?;
    debug_check_finite("instance_norm", &out);
    Ok(out)
}

/// Per-channel affine `y = x * gamma[c] + beta[c]` on a `[b, c, h, w]` tensor.
pub fn chan_affine<E: Element>(
    input: &Tensor<E>,
    gamma: &Tensor<E>,
    beta: &Tensor<E>,
) -> Result<Tensor<E>> {
    require_rank("chan_affine", input, 4)?;
    let (b, c, h, w) = (
        input.shape()[0],
        input.shape()[1],
        input.shape()[2],
        input.shape()[3],
    );
    if gamma.shape() != [c] || beta.shape() != [c] {
        return Err(shape_err("chan_affine", input, gamma));
    }
    let hw = h * w;
    let d = input.data();
    let (g, be) = (gamma.data(), beta.data());
    let mut out = vec![E::ZERO; d.len()];
    for bi in 0..b {
        for ci in 0..c {
            let base = (bi * c + ci) * hw;
            let (gv, bv) = (g[ci], be[ci]);
            for t in 0..hw {
                out[base + t] = d[base + t] * gv + bv;
            }
        }
    }
    let out = Tensor::new(vec![b, c, h, w], out)?;
    debug_check_finite("chan_affine", &out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(shape: &[usize], data: &[f64]) -> Tensor<f64> {
        Tensor::new(shape.to_vec(), data.to_vec()).unwrap()
    }

    #[test]
    fn matmul_identity() {
        let a = t(&[2, 2], &[1.0, 2.0, 3.0, 4.0]);
        let id = t(&[2, 2], &[1.0, 0.0, 0.0, 1.0]);
        let out = matmul(&a, &id).unwrap();
        assert_eq!(out.data(), a.data());
    }

    #[test]
    fn matmul_shape_error_names_op() {
        let a = t(&[2, 3], &[0.0; 6]);
        let b = t(&[2, 2], &[0.0; 4]);
        let err = matmul(&a, &b).unwrap_err().to_string();
        assert!(err.contains("matmul"), "{err}");
        assert!(err.contains("[2, 3]") && err.contains("[2, 2]"), "{err}");
    }

    #[test]
    fn relu_definition() {
        let a = t(&[3], &[-1.0, 0.0, 2.0]);
        assert_eq!(relu(&a).unwrap().data(), &[0.0, 0.0, 2.0]);
    }

    #[test]
    fn l2_normalize_345() {
        let a = t(&[1, 2], &[3.0, 4.0]);
        let n = l2_normalize_rows(&a).unwrap();
        assert!((n.data()[0] - 0.6).abs() < 1e-12);
        assert!((n.data()[1] - 0.8).abs() < 1e-12);
    }

    #[test]
    fn l2_normalize_rejects_zero_row() {
        let a = t(&[2, 2], &[1.0, 0.0, 0.0, 0.0]);
        assert!(l2_normalize_rows(&a).is_err());
    }

    #[test]
    fn matmul_nt_matches_explicit_transpose() {
        let a = t(&[2, 3], &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let b = t(&[4, 3], &[0.5, -1.0, 2.0, 1.0, 1.0, 1.0, 0.0, 0.0, 3.0, -2.0, 0.5, 0.25]);
        let bt = t(
            &[3, 4],
            &[0.5, 1.0, 0.0, -2.0, -1.0, 1.0, 0.0, 0.5, 2.0, 1.0, 3.0, 0.25],
        );
        let fast = matmul_nt(&a, &b).unwrap();
        let slow = matmul(&a, &bt).unwrap();
        for (x, y) in fast.data().iter().zip(slow.data()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn conv2d_identity_kernel() {
        // 1x1 kernel of 1.0 reproduces the input channel.
        let img = t(&[1, 1, 2, 3], &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let k = t(&[1, 1, 1, 1], &[1.0]);
        let out = conv2d(&img, &k, None, 1, 0).unwrap();
        assert_eq!(out.shape(), &[1, 1, 2, 3]);
        assert_eq!(out.data(), img.data());
    }

    #[test]
    fn conv2d_strided_shapes() {
        let img = Tensor::<f64>::zeros(vec![2, 3, 96, 96]);
        let k = Tensor::<f64>::zeros(vec![16, 3, 3, 3]);
        let out = conv2d(&img, &k, None, 2, 1).unwrap();
        assert_eq!(out.shape(), &[2, 16, 48, 48]);
    }

    #[test]
    fn conv2d_known_values() {
        // 2x2 mean filter over a 3x3 ramp, stride 1, no padding.
        let img = t(&[1, 1, 3, 3], &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0]);
        let k = t(&[1, 1, 2, 2], &[0.25; 4]);
        let out = conv2d(&img, &k, None, 1, 0).unwrap();
        assert_eq!(out.shape(), &[1, 1, 2, 2]);
        assert_eq!(out.data(), &[3.0, 4.0, 6.0, 7.0]);
    }

    #[test]
    fn gap_means_channels() {
        let img = t(&[1, 2, 1, 2], &[1.0, 3.0, 10.0, 30.0]);
        let out = global_avg_pool(&img).unwrap();
        assert_eq!(out.shape(), &[1, 2]);
        assert_eq!(out.data(), &[2.0, 20.0]);
    }

    #[test]
    fn instance_norm_zero_mean_unit_var() {
        let img = t(&[1, 1, 2, 2], &[1.0, 2.0, 3.0, 4.0]);
        let out = instance_norm(&img, 1e-12).unwrap();
        let mean: f64 = out.data().iter().sum::<f64>() / 4.0;
        let var: f64 = out.data().iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / 4.0;
        assert!(mean.abs() < 1e-9);
        assert!((var - 1.0).abs() < 1e-6);
    }

    #[test]
    fn concat_first_stacks() {
        let a = t(&[1, 2], &[1.0, 2.0]);
        let b = t(&[2, 2], &[3.0, 4.0, 5.0, 6.0]);
        let out = concat_first(&[&a, &b]).unwrap();
        assert_eq!(out.shape(), &[3, 2]);
        assert_eq!(out.data(), &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
    }

    #[test]
    fn sum_and_mean_reductions() {
        let a = t(&[2, 2], &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(sum_all(&a).unwrap().item().unwrap(), 10.0);
        assert_eq!(mean_all(&a).unwrap().item().unwrap(), 2.5);
        let rs = sum_rows(&a).unwrap();
        assert_eq!(rs.shape(), &[2, 1]);
        assert_eq!(rs.data(), &[3.0, 7.0]);
    }
}
