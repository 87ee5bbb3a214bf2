use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::IntMatrix;

/// Row Hermite normal form `h = u * m` with the unimodular transform.
#[derive(Clone, Debug)]
pub struct Hermite {
    pub h: IntMatrix,
    pub u: IntMatrix,
    /// Pivot column of each nonzero row of `h`, in row order.
    pub pivots: Vec<usize>,
}

impl Hermite {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Nonzero rows of `h`.
    pub fn basis(&self) -> IntMatrix {
        self.h.select_rows(0..self.rank())
    }

    /// Rows of `u` spanning the left kernel of the input.
    pub fn left_kernel_rows(&self) -> IntMatrix {
        self.u.select_rows(self.rank()..self.u.rows())
    }
}

/// Row HNF with transform.
pub fn hnf(m: &IntMatrix) -> Hermite {
    hnf_inner(m, true)
}

/// Row HNF without tracking the transform; `u` is left empty.
pub fn hnf_only(m: &IntMatrix) -> Hermite {
    hnf_inner(m, false)
}

fn hnf_inner(m: &IntMatrix, track: bool) -> Hermite {
    let nrows = m.rows();
    let ncols = m.cols();
    let mut a = m.clone();
    let mut u = if track { IntMatrix::identity(nrows) } else { IntMatrix::zeros(0, 0) };
    let mut pivots = Vec::new();
    let mut prow = 0;
    for col in 0..ncols {
        if prow == nrows {
            break;
        }
        let mut found = false;
        loop {
            let best = (prow..nrows)
                .filter(|&r| !a[(r, col)].is_zero())
                .min_by(|&x, &y| a[(x, col)].abs().cmp(&a[(y, col)].abs()));
            let Some(best) = best else { break };
            found = true;
            a.swap_rows(prow, best);
            if track {
                u.swap_rows(prow, best);
            }
            let mut clean = true;
            for r in prow + 1..nrows {
                if a[(r, col)].is_zero() {
                    continue;
                }
                let q = a[(r, col)].div_floor(&a[(prow, col)]);
                let negq = -q;
                a.add_row_multiple(r, prow, &negq, col);
                if track {
                    u.add_row_multiple(r, prow, &negq, 0);
                }
                if !a[(r, col)].is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if !found {
            continue;
        }
        if a[(prow, col)].is_negative() {
            a.negate_row(prow);
            if track {
                u.negate_row(prow);
            }
        }
        for r in 0..prow {
            if a[(r, col)].is_zero() {
                continue;
            }
            let q = a[(r, col)].div_floor(&a[(prow, col)]);
            if q.is_zero() {
                continue;
            }
            let negq = -q;
            a.add_row_multiple(r, prow, &negq, col);
            if track {
                u.add_row_multiple(r, prow, &negq, 0);
            }
        }
        pivots.push(col);
        prow += 1;
    }
    Hermite { h: a, u, pivots }
}

/// Smith normal form `d = p * m * q` with `q_inv` the inverse of `q`.
#[derive(Clone, Debug)]
pub struct Smith {
    pub d: IntMatrix,
    pub p: IntMatrix,
    pub q: IntMatrix,
    pub q_inv: IntMatrix,
    pub rank: usize,
}

impl Smith {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.rank).map(|i| self.d[(i, i)].clone()).collect()
    }
}

struct SmithWork {
    a: IntMatrix,
    p: IntMatrix,
    q: IntMatrix,
    q_inv: IntMatrix,
}

impl SmithWork {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap_rows(i, j);
        self.p.swap_rows(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        self.a.swap_cols(i, j);
        self.q.swap_cols(i, j);
        self.q_inv.swap_rows(i, j);
    }

    /// row[dst] += c * row[src]
    fn row_op(&mut self, dst: usize, src: usize, c: &BigInt) {
        self.a.add_row_multiple(dst, src, c, 0);
        self.p.add_row_multiple(dst, src, c, 0);
    }

    /// col[dst] += c * col[src]
    fn col_op(&mut self, dst: usize, src: usize, c: &BigInt) {
        self.a.add_col_multiple(dst, src, c);
        self.q.add_col_multiple(dst, src, c);
        let negc = -c;
        self.q_inv.add_row_multiple(src, dst, &negc, 0);
    }
}

/// Smith normal form by minimal-pivot elimination.
pub fn snf(m: &IntMatrix) -> Smith {
    let rows = m.rows();
    let cols = m.cols();
    let mut w = SmithWork {
        a: m.clone(),
        p: IntMatrix::identity(rows),
        q: IntMatrix::identity(cols),
        q_inv: IntMatrix::identity(cols),
    };
    let mut t = 0;
    while t < rows.min(cols) {
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                let x = &w.a[(i, j)];
                if x.is_zero() {
                    continue;
                }
                if best.is_none_or(|(bi, bj)| x.abs() < w.a[(bi, bj)].abs()) {
                    best = Some((i, j));
                    if x.abs().is_one() {
                        break;
                    }
                }
            }
            if best.is_some_and(|(bi, bj)| w.a[(bi, bj)].abs().is_one()) {
                break;
            }
        }
        let Some((bi, bj)) = best else { break };
        w.swap_rows(t, bi);
        w.swap_cols(t, bj);
        loop {
            let mut clean = true;
            for i in t + 1..rows {
                if w.a[(i, t)].is_zero() {
                    continue;
                }
                let q = -w.a[(i, t)].div_floor(&w.a[(t, t)]);
                w.row_op(i, t, &q);
                if !w.a[(i, t)].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                if w.a[(t, j)].is_zero() {
                    continue;
                }
                let q = -w.a[(t, j)].div_floor(&w.a[(t, t)]);
                w.col_op(j, t, &q);
                if !w.a[(t, j)].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                let mut pos: Option<(usize, usize)> = None;
                let mut cur = w.a[(t, t)].abs();
                for i in t + 1..rows {
                    let x = w.a[(i, t)].abs();
                    if !x.is_zero() && x < cur {
                        cur = x;
                        pos = Some((i, t));
                    }
                }
                for j in t + 1..cols {
                    let x = w.a[(t, j)].abs();
                    if !x.is_zero() && x < cur {
                        cur = x;
                        pos = Some((t, j));
                    }
                }
                if let Some((i, j)) = pos {
                    if j == t {
                        w.swap_rows(t, i);
                    } else {
                        w.swap_cols(t, j);
                    }
                }
                continue;
            }
            let piv = w.a[(t, t)].clone();
            let mut offending = None;
            'outer: for i in t + 1..rows {
                for j in t + 1..cols {
                    if !w.a[(i, j)].is_multiple_of(&piv) {
                        offending = Some(i);
                        break 'outer;
                    }
                }
            }
            match offending {
                Some(i) => w.row_op(t, i, &BigInt::one()),
                None => break,
            }
        }
        if w.a[(t, t)].is_negative() {
            w.a.negate_row(t);
            w.p.negate_row(t);
        }
        t += 1;
    }
    Smith { d: w.a, p: w.p, q: w.q, q_inv: w.q_inv, rank: t }
}

/// Absolute determinant of a square matrix via HNF.
pub fn abs_det(m: &IntMatrix) -> BigInt {
    assert_eq!(m.rows(), m.cols(), "determinant of non-square matrix");
    let h = hnf_only(m);
    if h.rank() < m.rows() {
        return BigInt::zero();
    }
    (0..m.rows()).fold(BigInt::one(), |acc, i| acc * &h.h[(i, i)])
}
