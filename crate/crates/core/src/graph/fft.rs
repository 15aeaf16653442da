// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::PI;

use super::{Edge, NodeId, NodeKind, OpKind, Sfg, SfgNode};
use crate::error::{Error, Result};

/// Node and edge totals of the graph built by [`generate_fft_sfg`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FftCounts {
    pub inputs: usize,
    pub constants: usize,
    pub memdata: usize,
    pub operations: usize,
    pub outputs: usize,
    pub nodes: usize,
    pub edges: usize,
}

/// Closed-form counts for an `n = 2^p` point transform.
///
/// Each of the `p` stages holds `n/2` butterflies. A butterfly whose twiddle
/// is `W^0` is an add/sub pair on complex values (4 operations); any other
/// butterfly adds a complex multiply (4 products, 1 add, 1 sub). Stage `s`
/// has `n / 2^s` trivial butterflies, so the non-trivial total is
/// `p*n/2 - (n - 1)`.
pub fn fft_counts(n: usize) -> Result<FftCounts> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::FftSize(n));
    }
    let p = n.trailing_zeros() as usize;
    let butterflies = p * n / 2;
    let nontrivial = butterflies - (n - 1);
    let operations = 4 * butterflies + 6 * nontrivial;
    let (inputs, constants, memdata, outputs) = (n, n, 2 * n, 2 * n);
    Ok(FftCounts {
        inputs,
        constants,
        memdata,
        operations,
        outputs,
        nodes: inputs + constants + memdata + operations + outputs,
        edges: 2 * operations + outputs,
    })
}

struct Builder {
    g: Sfg,
    next: u32,
}

impl Builder {
    fn push(&mut self, node: SfgNode) -> NodeId {
        let id = node.id;
        self.g.nodes.push(node);
        self.next += 1;
        id
    }

    fn fresh(&self) -> NodeId {
        NodeId(self.next)
    }

    fn node(&mut self, kind: NodeKind, label: String) -> NodeId {
        let n = SfgNode::new(self.fresh(), kind, label);
        self.push(n)
    }

    fn op(&mut self, op: OpKind, label: String, lhs: NodeId, rhs: NodeId) -> NodeId {
        let id = self.push(SfgNode::operation(self.fresh(), op, label));
        self.g.edges.push(Edge {
            from: lhs,
            to: id,
            pos: 0,
        });
        self.g.edges.push(Edge {
            from: rhs,
            to: id,
            pos: 1,
        });
        id
    }
}

fn bit_reverse(i: usize, bits: u32) -> usize {
    if bits == 0 {
        0
    } else {
        i.reverse_bits() >> (usize::BITS - bits)
    }
}

/// Radix-2 decimation-in-time FFT over `n` real inputs.
///
/// Inputs `X0..X{n-1}` feed the real part of each line; the imaginary part
/// of every input line is a zero constant `Xi{k}`. Twiddles live in two
/// coefficient tables of `n` entries, `Wr{k} = cos(2πk/n)` and
/// `Wi{k} = -sin(2πk/n)`; only `k < n/2` is read. Complex outputs are
/// `Yr{k}` / `Yi{k}` in natural order. Products take the data operand at
/// position 0 and the coefficient at position 1.
pub fn generate_fft_sfg(n: usize) -> Result<Sfg> {
    fft_counts(n)?;
    let bits = n.trailing_zeros();
    let mut b = Builder { g: Sfg::new(), next: 0 };

    let inputs: Vec<NodeId> = (0..n).map(|k| b.node(NodeKind::Input, format!("X{k}"))).collect();
    let zeros: Vec<NodeId> = (0..n)
        .map(|k| {
            let n = SfgNode::new(b.fresh(), NodeKind::Constant, format!("Xi{k}")).with_value(0.0);
            b.push(n)
        })
        .collect();
    let wr: Vec<NodeId> = (0..n)
        .map(|k| {
            let v = (2.0 * PI * k as f64 / n as f64).cos();
            let n = SfgNode::new(b.fresh(), NodeKind::MemData, format!("Wr{k}")).with_value(v);
            b.push(n)
        })
        .collect();
    let wi: Vec<NodeId> = (0..n)
        .map(|k| {
            let v = -(2.0 * PI * k as f64 / n as f64).sin();
            let n = SfgNode::new(b.fresh(), NodeKind::MemData, format!("Wi{k}")).with_value(v);
            b.push(n)
        })
        .collect();

    let mut re: Vec<NodeId> = (0..n).map(|i| inputs[bit_reverse(i, bits)]).collect();
    let mut im: Vec<NodeId> = (0..n).map(|i| zeros[bit_reverse(i, bits)]).collect();

    for s in 1..=bits {
        let m = 1usize << s;
        let half = m / 2;
        for group in (0..n).step_by(m) {
            for j in 0..half {
                let (top, bot) = (group + j, group + j + half);
                let k = j * (n / m);
                let tag = format!("s{s}_{top}");
                let (tr, ti) = if k == 0 {
                    (re[bot], im[bot])
                } else {
                    let m0 = b.op(OpKind::Mul, format!("{tag}_rr"), re[bot], wr[k]);
                    let m1 = b.op(OpKind::Mul, format!("{tag}_ii"), im[bot], wi[k]);
                    let tr = b.op(OpKind::Sub, format!("{tag}_tr"), m0, m1);
                    let m2 = b.op(OpKind::Mul, format!("{tag}_ri"), re[bot], wi[k]);
                    let m3 = b.op(OpKind::Mul, format!("{tag}_ir"), im[bot], wr[k]);
                    let ti = b.op(OpKind::Add, format!("{tag}_ti"), m2, m3);
                    (tr, ti)
                };
                let (ar, ai) = (re[top], im[top]);
                re[top] = b.op(OpKind::Add, format!("{tag}_ar"), ar, tr);
                im[top] = b.op(OpKind::Add, format!("{tag}_ai"), ai, ti);
                re[bot] = b.op(OpKind::Sub, format!("{tag}_br"), ar, tr);
                im[bot] = b.op(OpKind::Sub, format!("{tag}_bi"), ai, ti);
            }
        }
    }

    for k in 0..n {
        let yr = b.node(NodeKind::Output, format!("Yr{k}"));
        b.g.edges.push(Edge {
            from: re[k],
            to: yr,
            pos: 0,
        });
        let yi = b.node(NodeKind::Output, format!("Yi{k}"));
        b.g.edges.push(Edge {
            from: im[k],
            to: yi,
            pos: 0,
        });
    }
    Ok(b.g)
}
