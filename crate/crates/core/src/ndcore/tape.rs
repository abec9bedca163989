//! Wengert tape: records forward ops, replays them in reverse for gradients.
//!
//! Values live in an arena on the tape; ops append nodes in topological
//! order (inputs always precede their consumers), and `backward` visits
//! each node exactly once. When no input requires a gradient the value is
//! still computed but no node is recorded, so a tape over frozen
//! parameters doubles as a plain executor for inference.

use super::element::Element;
use super::ops::{self, ConvDims};
use super::tensor::Tensor;
use crate::error::{Error, Result};

/// Index of a value in the tape arena.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ValueId(usize);

#[derive(Debug)]
enum Node {
    Add { a: ValueId, b: ValueId, out: ValueId },
    AddRow { mat: ValueId, row: ValueId, out: ValueId },
    SubCol { mat: ValueId, col: ValueId, out: ValueId },
    Mul { a: ValueId, b: ValueId, out: ValueId },
    Scale { a: ValueId, c: f64, out: ValueId },
    Matmul { a: ValueId, b: ValueId, out: ValueId },
    MatmulNT { a: ValueId, b: ValueId, out: ValueId },
    Relu { a: ValueId, out: ValueId },
    Exp { a: ValueId, out: ValueId },
    Ln { a: ValueId, out: ValueId },
    L2NormRows { a: ValueId, out: ValueId },
    SumRows { a: ValueId, out: ValueId },
    SumAll { a: ValueId, out: ValueId },
    MeanAll { a: ValueId, out: ValueId },
    ConcatFirst { parts: Vec<ValueId>, out: ValueId },
    Conv2d {
        input: ValueId,
        kernel: ValueId,
        bias: Option<ValueId>,
        out: ValueId,
        dims: ConvDims,
    },
    GlobalAvgPool { a: ValueId, out: ValueId },
    InstanceNorm { a: ValueId, out: ValueId, eps: f64 },
    ChanAffine { a: ValueId, gamma: ValueId, beta: ValueId, out: ValueId },
}

/// Gradients keyed by tape value id. Requires-grad leaves always resolve,
/// with zero tensors for leaves the loss never touched.
pub struct Gradients<E: Element> {
    grads: Vec<Option<Tensor<E>>>,
}

impl<E: Element> Gradients<E> {
    pub fn get(&self, id: ValueId) -> Option<&Tensor<E>> {
        self.grads.get(id.0).and_then(|g| g.as_ref())
    }
}

pub struct Tape<E: Element> {
    values: Vec<Tensor<E>>,
    requires: Vec<bool>,
    leaves: Vec<ValueId>,
    nodes: Vec<Node>,
}

impl<E: Element> Default for Tape<E> {
    fn default() -> Self {
        Self::new()
    }
}

impl<E: Element> Tape<E> {
    pub fn new() -> Self {
        Tape {
            values: Vec::new(),
            requires: Vec::new(),
            leaves: Vec::new(),
            nodes: Vec::new(),
        }
    }

    /// Register an input value; its `requires_grad` flag decides tracking.
    pub fn leaf(&mut self, t: Tensor<E>) -> ValueId {
        let req = t.requires_grad();
        let id = self.push(t, req);
        if req {
            self.leaves.push(id);
        }
        id
    }

    /// Register a constant (mask, detached statistic); never differentiated.
    pub fn constant(&mut self, t: Tensor<E>) -> ValueId {
        self.push(t.with_requires_grad(false), false)
    }

    pub fn value(&self, id: ValueId) -> &Tensor<E> {
        &self.values[id.0]
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    fn push(&mut self, t: Tensor<E>, requires: bool) -> ValueId {
        let id = ValueId(self.values.len());
        self.values.push(t);
        self.requires.push(requires);
        id
    }

    fn requires_any(&self, ids: &[ValueId]) -> bool {
        ids.iter().any(|id| self.requires[id.0])
    }

    fn record(&mut self, out: Tensor<E>, inputs: &[ValueId], node: impl FnOnce(ValueId) -> Node) -> ValueId {
        let req = self.requires_any(inputs);
        let id = self.push(out, req);
        if req {
            self.nodes.push(node(id));
        }
        id
    }

    // ── recorded ops ─────────────────────────────────────────────────

    pub fn add(&mut self, a: ValueId, b: ValueId) -> Result<ValueId> {
        let out = ops::add(self.value(a), self.value(b))?;
        Ok(self.record(out, &[a, b], |out| Node::Add { a, b, out }))
    }

    pub fn add_row(&mut self, mat: ValueId, row: ValueId) -> Result<ValueId> {
        let out = ops::add_row(self.value(mat), self.value(row))?;
        Ok(self.record(out, &[mat, row], |out| Node::AddRow { mat, row, out }))
    }

    pub fn sub_col(&mut self, mat: ValueId, col: ValueId) -> Result<ValueId> {
        let out = ops::sub_col(self.value(mat), self.value(col))?;
        Ok(self.record(out, &[mat, col], |out| Node::SubCol { mat, col, out }))
    }

    pub fn mul(&mut self, a: ValueId, b: ValueId) -> Result<ValueId> {
        let out = ops::mul(self.value(a), self.value(b))?;
        Ok(self.record(out, &[a, b], |out| Node::Mul { a, b, out }))
    }

    pub fn scale(&mut self, a: ValueId, c: f64) -> Result<ValueId> {
        let out = ops::scale(self.value(a), c)?;
        Ok(self.record(out, &[a], |out| Node::Scale { a, c, out }))
    }

    pub fn matmul(&mut self, a: ValueId, b: ValueId) -> Result<ValueId> {
        let out = ops::matmul(self.value(a), self.value(b))?;
        Ok(self.record(out, &[a, b], |out| Node::Matmul { a, b, out }))
    }

    pub fn matmul_nt(&mut self, a: ValueId, b: ValueId) -> Result<ValueId> {
        let out = ops::matmul_nt(self.value(a), self.value(b))?;
        Ok(self.record(out, &[a, b], |out| Node::MatmulNT { a, b, out }))
    }

    pub fn relu(&mut self, a: ValueId) -> Result<ValueId> {
        let out = ops::relu(self.value(a))?;
        Ok(self.record(out, &[a], |out| Node::Relu { a, out }))
    }

    pub fn exp(&mut self, a: ValueId) -> Result<ValueId> {
        let out = ops::exp(self.value(a))?;
        Ok(self.record(out, &[a], |out| Node::Exp { a, out }))
    }

    pub fn ln(&mut self, a: ValueId) -> Result<ValueId> {
        let out = ops::ln(self.value(a))?;
        Ok(self.record(out, &[a], |out| Node::Ln { a, out }))
    }

    pub fn l2_normalize_rows(&mut self, a: ValueId) -> Result<ValueId> {
        let out = ops::l2_normalize_rows(self.value(a))?;
        Ok(self.record(out, &[a], |out| Node::L2NormRows { a, out }))
    }

    pub fn sum_rows(&mut self, a: ValueId) -> Result<ValueId> {
        let out = ops::sum_rows(self.value(a))?;
        Ok(self.record(out, &[a], |out| Node::SumRows { a, out }))
    }

    pub fn sum_all(&mut self, a: ValueId) -> Result<ValueId> {
        let out = ops::sum_all(self.value(a))?;
        Ok(self.record(out, &[a], |out| Node::SumAll { a, out }))
    }

    pub fn mean_all(&mut self, a: ValueId) -> Result<ValueId> {
        let out = ops::mean_all(self.value(a))?;
        Ok(self.record(out, &[a], |out| Node::MeanAll { a, out }))
    }

    pub fn concat_first(&mut self, parts: &[ValueId]) -> Result<ValueId> {
        let tensors: Vec<&Tensor<E>> = parts.iter().map(|id| &self.values[id.0]).collect();
        let out = ops::concat_first(&tensors)?;
        let parts = parts.to_vec();
        let req = self.requires_any(&parts);
        let id = self.push(out, req);
        if req {
            self.nodes.push(Node::ConcatFirst { parts, out: id });
        }
        Ok(id)
    }

    pub fn conv2d(
        &mut self,
        input: ValueId,
        kernel: ValueId,
        bias: Option<ValueId>,
        stride: usize,
        pad: usize,
    ) -> Result<ValueId> {
        let dims = ConvDims::check(self.value(input), self.value(kernel), stride, pad)?;
        let out = ops::conv2d(
            self.value(input),
            self.value(kernel),
            bias.map(|b| self.value(b)),
            stride,
            pad,
        )?;
        let mut ins = vec![input, kernel];
        if let Some(b) = bias {
            ins.push(b);
        }
        Ok(self.record(out, &ins, |out| Node::Conv2d {
            input,
            kernel,
            bias,
            out,
            dims,
        }))
    }

    pub fn global_avg_pool(&mut self, a: ValueId) -> Result<ValueId> {
        let out = ops::global_avg_pool(self.value(a))?;
        Ok(self.record(out, &[a], |out| Node::GlobalAvgPool { a, out }))
    }

    pub fn instance_norm(&mut self, a: ValueId, eps: f64) -> Result<ValueId> {
        let out = ops::instance_norm(self.value(a), eps)?;
        Ok(self.record(out, &[a], |out| Node::InstanceNorm { a, out, eps }))
    }

    pub fn chan_affine(&mut self, a: ValueId, gamma: ValueId, beta: ValueId) -> Result<ValueId> {
        let out = ops::chan_affine(self.value(a), self.value(gamma), self.value(beta))?;
        Ok(self.record(out, &[a, gamma, beta], |out| Node::ChanAffine {
            a,
            gamma,
            beta,
            out,
        }))
    }

    /// Dense layer: `x @ w^T + bias`, weight stored `[out_dim, in_dim]`.
    pub fn affine(&mut self, x: ValueId, weight: ValueId, bias: ValueId) -> Result<ValueId> {
        let xw = self.matmul_nt(x, weight)?;
        self.add_row(xw, bias)
    }

    // ── backward ─────────────────────────────────────────────────────

    /// Reverse sweep from a scalar loss. Returns a gradient for every
    /// requires-grad leaf (zeros where the loss does not depend on it).
    pub fn backward(&mut self, loss: ValueId) -> Result<Gradients<E>> {
        let lv = &self.values[loss.0];
        if lv.len() != 1 {
            return Err(Error::invalid(
                "backward",
                format!("loss must be scalar, got shape {:?}", lv.shape()),
            ));
        }
        let mut grads: Vec<Option<Vec<E>>> = vec![None; self.values.len()];
        grads[loss.0] = Some(vec![E::ONE]);

        for node in self.nodes.iter().rev() {
            self.backward_node(node, &mut grads);
        }

        let mut out: Vec<Option<Tensor<E>>> = vec![None; self.values.len()];
        for (id, g) in grads.into_iter().enumerate() {
            if let Some(g) = g {
                out[id] = Some(Tensor::new(self.values[id].shape().to_vec(), g)?);
            }
        }
        for leaf in &self.leaves {
            if out[leaf.0].is_none() {
                out[leaf.0] = Some(Tensor::zeros(self.values[leaf.0].shape().to_vec()));
            }
        }
        Ok(Gradients { grads: out })
    }

    fn accum(&self, grads: &mut [Option<Vec<E>>], id: ValueId, contrib: impl FnOnce(&mut [E])) {
        if !self.requires[id.0] {
            return;
        }
        let slot = &mut grads[id.0];
        if slot.is_none() {
            *slot = Some(vec![E::ZERO; self.values[id.0].len()]);
        }
        contrib(slot.as_mut().unwrap());
    }

    fn backward_node(&self, node: &Node, grads: &mut [Option<Vec<E>>]) {
        match node {
            Node::Add { a, b, out } => {
                let Some(d) = grads[out.0].clone() else { return };
                self.accum(grads, *a, |g| {
                    for (gv, dv) in g.iter_mut().zip(&d) {
                        *gv += *dv;
                    }
                });
                self.accum(grads, *b, |g| {
                    for (gv, dv) in g.iter_mut().zip(&d) {
                        *gv += *dv;
                    }
                });
            }
            Node::AddRow { mat, row, out } => {
                let Some(d) = grads[out.0].clone() else { return };
                let c = self.values[row.0].len();
                self.accum(grads, *mat, |g| {
                    for (gv, dv) in g.iter_mut().zip(&d) {
                        *gv += *dv;
                    }
                });
                self.accum(grads, *row, |g| {
                    for (i, dv) in d.iter().enumerate() {
                        g[i % c] += *dv;
                    }
                });
            }
            Node::SubCol { mat, col, out } => {
                let Some(d) = grads[out.0].clone() else { return };
                let cols = self.values[mat.0].shape()[1];
                self.accum(grads, *mat, |g| {
                    for (gv, dv) in g.iter_mut().zip(&d) {
                        *gv += *dv;
                    }
                });
                self.accum(grads, *col, |g| {
                    for (i, dv) in d.iter().enumerate() {
                        g[i / cols] -= *dv;
                    }
                });
            }
            Node::Mul { a, b, out } => {
                let Some(d) = grads[out.0].clone() else { return };
                let av = self.values[a.0].clone();
                let bv = self.values[b.0].clone();
                self.accum(grads, *a, |g| {
                    for ((gv, dv), xv) in g.iter_mut().zip(&d).zip(bv.data()) {
                        *gv += *dv * *xv;
                    }
                });
                self.accum(grads, *b, |g| {
                    for ((gv, dv), xv) in g.iter_mut().zip(&d).zip(av.data()) {
                        *gv += *dv * *xv;
                    }
                });
            }
            Node::Scale { a, c, out } => {
                let Some(d) = grads[out.0].clone() else { return };
                let c = E::from_f64(*c);
                self.accum(grads, *a, |g| {
                    for (gv, dv) in g.iter_mut().zip(&d) {
                        *gv += c * *dv;
                    }
                });
            }
            Node::Matmul { a, b, out } => {
                let Some(d) = grads[out.0].clone() else { return };
                let (m, k) = (self.values[a.0].shape()[0], self.values[a.0].shape()[1]);
                let n = self.values[b.0].shape()[1];
                let av = self.values[a.0].clone();
                let bv = self.values[b.0].clone();
                // dA = d @ B^T
                self.accum(grads, *a, |g| ops::mm_nt(&d, bv.data(), g, m, n, k));
                // dB = A^T @ d
                self.accum(grads, *b, |g| ops::mm_tn(av.data(), &d, g, m, k, n));
            }
            Node::MatmulNT { a, b, out } => {
                let Some(d) = grads[out.0].clone() else { return };
                let (m, k) = (self.values[a.0].shape()[0], self.values[a.0].shape()[1]);
                let n = self.values[b.0].shape()[0];
                let av = self.values[a.0].clone();
                let bv = self.values[b.0].clone();
                // dA = d @ B
                self.accum(grads, *a, |g| ops::mm_nn(&d, bv.data(), g, m, n, k));
                // dB = d^T @ A
                self.accum(grads, *b, |g| ops::mm_tn(&d, av.data(), g, m, n, k));
            }
            Node::Relu { a, out } => {
                let Some(d) = grads[out.0].clone() else { return };
                let x = self.values[a.0].clone();
                self.accum(grads, *a, |g| {
                    for ((gv, dv), xv) in g.iter_mut().zip(&d).zip(x.data()) {
                        if *xv > E::ZERO {
                            *gv += *dv;
                        }
                    }
                });
            }
            Node::Exp { a, out } => {
                let Some(d) = grads[out.0].clone() else { return };
                let y = self.values[out.0].clone();
                self.accum(grads, *a, |g| {
                    for ((gv, dv), yv) in g.iter_mut().zip(&d).zip(y.data()) {
                        *gv += *dv * *yv;
                    }
                });
            }
            Node::Ln { a, out } => {
                let Some(d) = grads[out.0].clone() else { return };
                let x = self.values[a.0].clone();
                self.accum(grads, *a, |g| {
                    for ((gv, dv), xv) in g.iter_mut().zip(&d).zip(x.data()) {
                        *gv += *dv / *xv;
                    }
                });
            }
            Node::L2NormRows { a, out } => {
                let Some(d) = grads[out.0].clone() else { return };
                let x = self.values[a.0].clone();
                let y = self.values[out.0].clone();
                let (r, c) = (x.shape()[0], x.shape()[1]);
                self.accum(grads, *a, |g| {
                    for i in 0..r {
                        let xr = &x.data()[i * c..(i + 1) * c];
                        let yr = &y.data()[i * c..(i + 1) * c];
                        let dr = &d[i * c..(i + 1) * c];
                        let mut norm_sq = E::ZERO;
                        for &v in xr {
                            norm_sq += v * v;
                        }
                        let norm = norm_sq.sqrt();
                        let mut dot = E::ZERO;
                        for (yv, dv) in yr.iter().zip(dr) {
                            dot += *yv * *dv;
                        }
                        let gr = &mut g[i * c..(i + 1) * c];
                        for ((gv, dv), yv) in gr.iter_mut().zip(dr).zip(yr) {
                            *gv += (*dv - *yv * dot) / norm;
                        }
                    }
                });
            }
            Node::SumRows { a, out } => {
                let Some(d) = grads[out.0].clone() else { return };
                let c = self.values[a.0].shape()[1];
                self.accum(grads, *a, |g| {
                    for (i, gv) in g.iter_mut().enumerate() {
                        *gv += d[i / c];
                    }
                });
            }
            Node::SumAll { a, out } => {
                let Some(d) = grads[out.0].clone() else { return };
                let dv = d[0];
                self.accum(grads, *a, |g| {
                    for gv in g.iter_mut() {
                        *gv += dv;
                    }
                });
            }
            Node::MeanAll { a, out } => {
                let Some(d) = grads[out.0].clone() else { return };
                let n = self.values[a.0].len();
                let dv = d[0] / E::from_f64(n as f64);
                self.accum(grads, *a, |g| {
                    for gv in g.iter_mut() {
                        *gv += dv;
                    }
                });
            }
            Node::ConcatFirst { parts, out } => {
                let Some(d) = grads[out.0].clone() else { return };
                let mut offset = 0;
                for part in parts {
                    let len = self.values[part.0].len();
                    let slice = &d[offset..offset + len];
                    self.accum(grads, *part, |g| {
                        for (gv, dv) in g.iter_mut().zip(slice) {
                            *gv += *dv;
                        }
                    });
                    offset += len;
                }
            }
            Node::Conv2d {
                input,
                kernel,
                bias,
                out,
                dims,
            } => {
                let Some(d) = grads[out.0].clone() else { return };
                self.backward_conv2d(*input, *kernel, *bias, dims, &d, grads);
            }
            Node::GlobalAvgPool { a, out } => {
                let Some(d) = grads[out.0].clone() else { return };
                let shape = self.values[a.0].shape().to_vec();
                let hw = shape[2] * shape[3];
                let inv = E::from_f64(1.0 / hw as f64);
                self.accum(grads, *a, |g| {
                    for (i, gv) in g.iter_mut().enumerate() {
                        *gv += d[i / hw] * inv;
                    }
                });
            }
            Node::InstanceNorm { a, out, eps } => {
                let Some(d) = grads[out.0].clone() else { return };
                let x = self.values[a.0].clone();
                let y = self.values[out.0].clone();
                let shape = x.shape();
                let hw = shape[2] * shape[3];
                let groups = shape[0] * shape[1];
                let inv_n = E::from_f64(1.0 / hw as f64);
                let eps = E::from_f64(*eps);
                self.accum(grads, *a, |g| {
                    for i in 0..groups {
                        let xs = &x.data()[i * hw..(i + 1) * hw];
                        let ys = &y.data()[i * hw..(i + 1) * hw];
                        let ds = &d[i * hw..(i + 1) * hw];
                        let mut mean = E::ZERO;
                        for &v in xs {
                            mean += v;
                        }
                        mean *= inv_n;
                        let mut var = E::ZERO;
                        for &v in xs {
                            let dv = v - mean;
                            var += dv * dv;
                        }
                        var *= inv_n;
                        let inv_sigma = E::ONE / (var + eps).sqrt();
                        let mut mean_d = E::ZERO;
                        let mut mean_dy = E::ZERO;
                        for (dv, yv) in ds.iter().zip(ys) {
                            mean_d += *dv;
                            mean_dy += *dv * *yv;
                        }
                        mean_d *= inv_n;
                        mean_dy *= inv_n;
                        let gs = &mut g[i * hw..(i + 1) * hw];
                        for ((gv, dv), yv) in gs.iter_mut().zip(ds).zip(ys) {
                            *gv += inv_sigma * (*dv - mean_d - *yv * mean_dy);
                        }
                    }
                });
            }
            Node::ChanAffine { a, gamma, beta, out } => {
                let Some(d) = grads[out.0].clone() else { return };
                let x = self.values[a.0].clone();
                let shape = x.shape().to_vec();
                let (b, c, hw) = (shape[0], shape[1], shape[2] * shape[3]);
                let gm = self.values[gamma.0].clone();
                self.accum(grads, *a, |g| {
                    for bi in 0..b {
                        for ci in 0..c {
                            let base = (bi * c + ci) * hw;
                            let gv = gm.data()[ci];
                            for t in 0..hw {
                                g[base + t] += d[base + t] * gv;
                            }
                        }
                    }
                });
                self.accum(grads, *gamma, |g| {
                    for bi in 0..b {
                        for ci in 0..c {
                            let base = (bi * c + ci) * hw;
                            let mut s = E::ZERO;
                            for t in 0..hw {
                                s += d[base + t] * x.data()[base + t];
                            }
                            g[ci] += s;
                        }
                    }
                });
                self.accum(grads, *beta, |g| {
                    for bi in 0..b {
                        for ci in 0..c {
                            let base = (bi * c + ci) * hw;
                            let mut s = E::ZERO;
                            for t in 0..hw {
                                s += d[base + t];
                            }
                            g[ci] += s;
                        }
                    }
                });
            }
        }
    }

    fn backward_conv2d(
        &self,
        input: ValueId,
        kernel: ValueId,
        bias: Option<ValueId>,
        dims: &ConvDims,
        d: &[E],
        grads: &mut [Option<Vec<E>>],
    ) {
        let p = dims.out_pixels();
        let klen = dims.patch_len();
        let img_len = dims.cin * dims.h * dims.w;
        let x = self.values[input.0].clone();
        let k = self.values[kernel.0].clone();

        if self.requires[kernel.0] {
            let mut dk = vec![E::ZERO; dims.cout * klen];
            let mut cols = vec![E::ZERO; klen * p];
            for bi in 0..dims.batch {
                ops::im2col(&x.data()[bi * img_len..(bi + 1) * img_len], dims, &mut cols);
                let dout = &d[bi * dims.cout * p..(bi + 1) * dims.cout * p];
                // dK += dOut @ cols^T
                ops::mm_nt(dout, &cols, &mut dk, dims.cout, p, klen);
            }
            self.accum(grads, kernel, |g| {
                for (gv, dv) in g.iter_mut().zip(&dk) {
                    *gv += *dv;
                }
            });
        }

        if self.requires[input.0] {
            let mut dx = vec![E::ZERO; x.len()];
            let mut cols_grad = vec![E::ZERO; klen * p];
            for bi in 0..dims.batch {
                cols_grad.fill(E::ZERO);
                let dout = &d[bi * dims.cout * p..(bi + 1) * dims.cout * p];
                // dCols = K^T @ dOut
                ops::mm_tn(k.data(), dout, &mut cols_grad, dims.cout, klen, p);
                ops::col2im(&cols_grad, dims, &mut dx[bi * img_len..(bi + 1) * img_len]);
            }
            self.accum(grads, input, |g| {
                for (gv, dv) in g.iter_mut().zip(&dx) {
                    *gv += *dv;
                }
            });
        }

        if let Some(bid) = bias {
            if self.requires[bid.0] {
                let mut db = vec![E::ZERO; dims.cout];
                for bi in 0..dims.batch {
                    for co in 0..dims.cout {
                        let base = (bi * dims.cout + co) * p;
                        let mut s = E::ZERO;
                        for t in 0..p {
                            s += d[base + t];
                        }
                        db[co] += s;
                    }
                }
                self.accum(grads, bid, |g| {
                    for (gv, dv) in g.iter_mut().zip(&db) {
                        *gv += *dv;
                    }
                });
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn leaf64(tape: &mut Tape<f64>, shape: &[usize], data: &[f64]) -> ValueId {
        tape.leaf(
            Tensor::new(shape.to_vec(), data.to_vec())
                .unwrap()
                .with_requires_grad(true),
        )
    }

    #[test]
    fn grad_of_sum_of_squares() {
        // loss = sum(w ⊙ w), w = [1, 2] → grad = [2, 4]
        let mut tape = Tape::new();
        let w = leaf64(&mut tape, &[2], &[1.0, 2.0]);
        let sq = tape.mul(w, w).unwrap();
        let loss = tape.sum_all(sq).unwrap();
        let grads = tape.backward(loss).unwrap();
        assert_eq!(grads.get(w).unwrap().data(), &[2.0, 4.0]);
    }

    #[test]
    fn constant_loss_gives_zero_grad() {
        let mut tape = Tape::new();
        let w = leaf64(&mut tape, &[2], &[1.0, 2.0]);
        let c = tape.constant(Tensor::scalar(5.0));
        let loss = tape.sum_all(c).unwrap();
        let grads = tape.backward(loss).unwrap();
        assert_eq!(grads.get(w).unwrap().data(), &[0.0, 0.0]);
    }

    #[test]
    fn non_scalar_loss_is_error() {
        let mut tape = Tape::new();
        let w = leaf64(&mut tape, &[2], &[1.0, 2.0]);
        assert!(tape.backward(w).is_err());
    }

    #[test]
    fn backward_is_linear_in_the_loss() {
        // backward(l1 + l2) == backward(l1) + backward(l2), elementwise.
        let build = |which: u8| -> Vec<f64> {
            let mut tape = Tape::new();
            let w = leaf64(&mut tape, &[3], &[0.5, -1.5, 2.0]);
            let sq = tape.mul(w, w).unwrap();
            let l1 = tape.sum_all(sq).unwrap();
            let e = tape.exp(w).unwrap();
            let l2 = tape.mean_all(e).unwrap();
            let loss = match which {
                0 => l1,
                1 => l2,
                _ => tape.add(l1, l2).unwrap(),
            };
            let grads = tape.backward(loss).unwrap();
            grads.get(w).unwrap().to_vec()
        };
        let g1 = build(0);
        let g2 = build(1);
        let gsum = build(2);
        for i in 0..3 {
            assert!((gsum[i] - (g1[i] + g2[i])).abs() < 1e-12);
        }
    }

    #[test]
    fn grad_accumulates_across_consumers() {
        // loss = sum(w*2) + sum(w*3) → grad = 5 per element.
        let mut tape = Tape::new();
        let w = leaf64(&mut tape, &[2], &[1.0, 1.0]);
        let a = tape.scale(w, 2.0).unwrap();
        let b = tape.scale(w, 3.0).unwrap();
        let s = tape.add(a, b).unwrap();
        let loss = tape.sum_all(s).unwrap();
        let grads = tape.backward(loss).unwrap();
        assert_eq!(grads.get(w).unwrap().data(), &[5.0, 5.0]);
    }

    #[test]
    fn no_recording_without_requires_grad() {
        let mut tape = Tape::<f64>::new();
        let a = tape.constant(Tensor::filled(vec![2], 1.0));
        let b = tape.constant(Tensor::filled(vec![2], 2.0));
        let _ = tape.add(a, b).unwrap();
        assert_eq!(tape.num_nodes(), 0);
    }
}
