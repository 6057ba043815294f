//! Dense covariant tensors of rank 1 through 4 and residual reports.
//!
//! Entries are stored row-major (last index fastest) in binary64.  All suite
//! dimensions satisfy `dim ≤ 12`, so `dim⁴ ≤ 20736` entries; everything is
//! dense and contractions loop exhaustively.

use serde::{Deserialize, Serialize};

use crate::Error;

/// A dense rank-`K` covariant tensor over an even-dimensional real space.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor<const K: usize> {
    dim: usize,
    pub(crate) data: Vec<f64>,
}

impl<const K: usize> Tensor<K> {
    /// The zero tensor of the given dimension.
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim.pow(K as u32)],
        }
    }

    /// Builds a tensor entry by entry from a multi-index closure.
    pub fn from_fn(dim: usize, mut f: impl FnMut([usize; K]) -> f64) -> Self {
        let mut t = Self::zeros(dim);
        let mut ix = [0usize; K];
        for v in t.data.iter_mut() {
            *v = f(ix);
            advance(&mut ix, dim);
        }
        t
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    fn lin(&self, ix: [usize; K]) -> usize {
        let mut l = 0;
        for &i in ix.iter() {
            debug_assert!(i < self.dim);
            l = l * self.dim + i;
        }
        l
    }

    #[inline]
    pub fn get(&self, ix: [usize; K]) -> f64 {
        self.data[self.lin(ix)]
    }

    #[inline]
    pub fn set(&mut self, ix: [usize; K], v: f64) {
        let l = self.lin(ix);
        self.data[l] = v;
    }

    /// Largest entry magnitude (the ∞-norm used as residual scale).
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |a, v| a.max(v.abs()))
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// `self + c · other`, in place.
    pub fn add_scaled(&mut self, c: f64, other: &Self) {
        assert_eq!(self.dim, other.dim, "tensor dimension mismatch");
        for (a, b) in self.data.iter_mut().zip(other.data.iter()) {
            *a += c * b;
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|v| c * v).collect(),
        }
    }

    /// Linear combination `Σ cᵢ Tᵢ`.  Panics on empty input or mixed dims.
    pub fn lin_comb(terms: &[(f64, &Self)]) -> Self {
        let dim = terms.first().expect("lin_comb of no terms").1.dim;
        let mut out = Self::zeros(dim);
        for &(c, t) in terms {
            out.add_scaled(c, t);
        }
        out
    }
}

impl<const K: usize> std::ops::Add for &Tensor<K> {
    type Output = Tensor<K>;
    fn add(self, rhs: Self) -> Tensor<K> {
        let mut out = self.clone();
        out.add_scaled(1.0, rhs);
        out
    }
}

impl<const K: usize> std::ops::Sub for &Tensor<K> {
    type Output = Tensor<K>;
    fn sub(self, rhs: Self) -> Tensor<K> {
        let mut out = self.clone();
        out.add_scaled(-1.0, rhs);
        out
    }
}

/// Advances a row-major multi-index; wraps to all zeros at the end.
#[inline]
pub(crate) fn advance<const K: usize>(ix: &mut [usize; K], dim: usize) -> bool {
    for k in (0..K).rev() {
        ix[k] += 1;
        if ix[k] < dim {
            return true;
        }
        ix[k] = 0;
    }
    false
}

// ---------------------------------------------------------------------------
// Matrix views on rank-2 tensors
// ---------------------------------------------------------------------------

impl Tensor<2> {
    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |[i, j]| if i == j { 1.0 } else { 0.0 })
    }

    /// Matrix product, reading both tensors as square row-major matrices.
    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "tensor dimension mismatch");
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self.data[i * d + k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..d {
                    out.data[i * d + j] += a * rhs.data[k * d + j];
                }
            }
        }
        out
    }

    pub fn transposed(&self) -> Self {
        let d = self.dim;
        Self::from_fn(d, |[i, j]| self.data[j * d + i])
    }

    pub fn trace(&self) -> f64 {
        let d = self.dim;
        (0..d).map(|i| self.data[i * d + i]).sum()
    }
}

// ---------------------------------------------------------------------------
// Residual reports
// ---------------------------------------------------------------------------

/// Outcome of comparing two tensors (or of aggregating identity checks).
///
/// `relative = max_abs_residual / max(1, scale)` and `pass ⇔ relative ≤ tol`.
/// The clamp at 1 keeps residuals of near-zero tensors meaningful.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResidualReport {
    pub max_abs_residual: f64,
    pub scale: f64,
    pub relative: f64,
    pub pass: bool,
    pub tol: f64,
}

impl ResidualReport {
    pub fn new(max_abs_residual: f64, scale: f64, tol: f64) -> Self {
        let relative = max_abs_residual / scale.max(1.0);
        Self {
            max_abs_residual,
            scale,
            relative,
            pass: relative <= tol,
            tol,
        }
    }

    /// Report for a boolean side condition: passing maps to a zero residual,
    /// failing to a unit one.
    pub fn from_flag(ok: bool, tol: f64) -> Self {
        Self::new(if ok { 0.0 } else { 1.0 }, 1.0, tol)
    }

    /// Severity normalized by tolerance; used to pick the worst sub-check.
    pub fn ratio(&self) -> f64 {
        if self.tol > 0.0 {
            self.relative / self.tol
        } else {
            f64::INFINITY
        }
    }
}

/// Entrywise comparison of two same-rank tensors.
pub fn residual<const K: usize>(
    x: &Tensor<K>,
    y: &Tensor<K>,
    tol: f64,
) -> Result<ResidualReport, Error> {
    if x.dim != y.dim {
        return Err(Error::DimensionMismatch(format!(
            "residual of rank-{K} tensors with dims {} and {}",
            x.dim, y.dim
        )));
    }
    let mut max_abs = 0.0_f64;
    for (a, b) in x.data.iter().zip(y.data.iter()) {
        max_abs = max_abs.max((a - b).abs());
    }
    let scale = x.max_abs().max(y.max_abs());
    Ok(ResidualReport::new(max_abs, scale, tol))
}

/// Accumulates sub-checks and reports the one worst relative to its own
/// tolerance, so `pass` of the result means every sub-check passed.
#[derive(Debug, Default)]
pub struct Checks {
    worst: Option<ResidualReport>,
}

impl Checks {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, report: ResidualReport) {
        let replace = match &self.worst {
            None => true,
            Some(w) => report.ratio() > w.ratio(),
        };
        if replace {
            self.worst = Some(report);
        }
    }

    pub fn push_parts(&mut self, max_abs: f64, scale: f64, tol: f64) {
        self.push(ResidualReport::new(max_abs, scale, tol));
    }

    pub fn push_flag(&mut self, ok: bool, tol: f64) {
        self.push(ResidualReport::from_flag(ok, tol));
    }

    pub fn finish(self, default_tol: f64) -> ResidualReport {
        self.worst
            .unwrap_or_else(|| ResidualReport::new(0.0, 0.0, default_tol))
    }
}

// ---------------------------------------------------------------------------
// Contractions
// ---------------------------------------------------------------------------

/// Contracts two slots (1-based) of a rank-4 tensor against an inverse
/// metric: `out(a,b) = gⁱʲ L(..i..a..j..b..)` with the remaining slots kept
/// in ascending order.
pub fn metric_contract(
    l: &Tensor<4>,
    g_inv: &Tensor<2>,
    slot_a: usize,
    slot_b: usize,
) -> Result<Tensor<2>, Error> {
    if !(1..=4).contains(&slot_a) || !(1..=4).contains(&slot_b) {
        return Err(Error::InvalidInput(format!(
            "contraction slots must lie in 1..4, got ({slot_a}, {slot_b})"
        )));
    }
    if slot_a == slot_b {
        return Err(Error::InvalidInput(format!(
            "contraction slots must be distinct, got ({slot_a}, {slot_b})"
        )));
    }
    if l.dim != g_inv.dim {
        return Err(Error::DimensionMismatch(format!(
            "tensor dim {} vs inverse metric dim {}",
            l.dim, g_inv.dim
        )));
    }
    let d = l.dim;
    let (sa, sb) = (slot_a - 1, slot_b - 1);
    let free: Vec<usize> = (0..4).filter(|s| *s != sa && *s != sb).collect();
    let mut out = Tensor::<2>::zeros(d);
    let mut ix = [0usize; 4];
    for a in 0..d {
        for b in 0..d {
            ix[free[0]] = a;
            ix[free[1]] = b;
            let mut sum = 0.0;
            for i in 0..d {
                ix[sa] = i;
                for j in 0..d {
                    ix[sb] = j;
                    sum += g_inv.data[i * d + j] * l.get(ix);
                }
            }
            out.data[a * d + b] = sum;
        }
    }
    Ok(out)
}

/// Full metric trace of a rank-2 tensor: `gⁱʲ S(eᵢ,eⱼ)`.
pub fn trace2(g_inv: &Tensor<2>, s: &Tensor<2>) -> f64 {
    assert_eq!(g_inv.dim, s.dim, "tensor dimension mismatch");
    g_inv
        .data
        .iter()
        .zip(s.data.iter())
        .map(|(a, b)| a * b)
        .sum()
}

/// Contracts the first two slots of a rank-3 tensor: `θ(x) = gⁱʲ F(eᵢ,eⱼ,x)`.
pub fn contract_first_pair(f: &Tensor<3>, g_inv: &Tensor<2>) -> Tensor<1> {
    assert_eq!(f.dim, g_inv.dim, "tensor dimension mismatch");
    let d = f.dim;
    Tensor::<1>::from_fn(d, |[x]| {
        let mut sum = 0.0;
        for i in 0..d {
            for j in 0..d {
                sum += g_inv.data[i * d + j] * f.data[(i * d + j) * d + x];
            }
        }
        sum
    })
}

/// Substitutes `P·arg` into one slot (0-based): contracts the slot's
/// covariant index with the operator's upper index,
/// `out(..,x,..) = t(..,m,..) Pᵐ_x`.
pub(crate) fn apply_op_slot<const K: usize>(
    t: &Tensor<K>,
    op: &Tensor<2>,
    slot: usize,
) -> Tensor<K> {
    assert!(slot < K);
    assert_eq!(t.dim, op.dim, "tensor dimension mismatch");
    let d = t.dim;
    let mut out = Tensor::<K>::zeros(d);
    let mut ix = [0usize; K];
    loop {
        let mut sum = 0.0;
        let k = ix[slot];
        let mut mx = ix;
        for m in 0..d {
            mx[slot] = m;
            sum += t.get(mx) * op.data[m * d + k];
        }
        out.set(ix, sum);
        if !advance(&mut ix, d) {
            break;
        }
    }
    out
}

/// Evaluates a rank-4 tensor on four vectors by successive contraction.
pub fn eval4(l: &Tensor<4>, x: &[f64], y: &[f64], z: &[f64], w: &[f64]) -> f64 {
    let d = l.dim;
    assert!(x.len() == d && y.len() == d && z.len() == d && w.len() == d);
    let mut sum = 0.0;
    for i in 0..d {
        if x[i] == 0.0 {
            continue;
        }
        for j in 0..d {
            if y[j] == 0.0 {
                continue;
            }
            let base = (i * d + j) * d;
            let mut inner = 0.0;
            for k in 0..d {
                let row = (base + k) * d;
                let mut last = 0.0;
                for m in 0..d {
                    last += l.data[row + m] * w[m];
                }
                inner += z[k] * last;
            }
            sum += x[i] * y[j] * inner;
        }
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Brute-force oracle: contracts slots (1,4) by explicit summation over
    /// all index tuples, independent of the strided implementation.
    fn oracle_contract_14(l: &Tensor<4>, g_inv: &Tensor<2>) -> Tensor<2> {
        let d = l.dim();
        Tensor::<2>::from_fn(d, |[y, z]| {
            let mut sum = 0.0;
            for i in 0..d {
                for j in 0..d {
                    sum += g_inv.get([i, j]) * l.get([i, y, z, j]);
                }
            }
            sum
        })
    }

    fn pi1_adapted(d: usize) -> Tensor<4> {
        // g = identity: π₁(x,y,z,w) = δ_yz δ_xw − δ_xz δ_yw
        Tensor::<4>::from_fn(d, |[x, y, z, w]| {
            let a = if y == z && x == w { 1.0 } else { 0.0 };
            let b = if x == z && y == w { 1.0 } else { 0.0 };
            a - b
        })
    }

    #[test]
    fn trace_of_identity_counts_dimension() {
        let g = Tensor::<2>::identity(4);
        assert_eq!(trace2(&g, &g), 4.0);
    }

    #[test]
    fn contract_pi1_slots_1_4_gives_3g_in_dim_4() {
        let d = 4;
        let g = Tensor::<2>::identity(d);
        let pi1 = pi1_adapted(d);
        let got = metric_contract(&pi1, &g, 1, 4).unwrap();
        let oracle = oracle_contract_14(&pi1, &g);
        let expected = g.scaled(3.0);
        assert!(residual(&got, &oracle, 1e-12).unwrap().pass);
        assert!(residual(&got, &expected, 1e-12).unwrap().pass);
    }

    #[test]
    fn contract_zero_tensor_is_zero() {
        let d = 4;
        let g = Tensor::<2>::identity(d);
        let z = Tensor::<4>::zeros(d);
        let got = metric_contract(&z, &g, 2, 3).unwrap();
        assert_eq!(got.max_abs(), 0.0);
    }

    #[test]
    fn contract_rejects_equal_or_out_of_range_slots() {
        let d = 4;
        let g = Tensor::<2>::identity(d);
        let l = Tensor::<4>::zeros(d);
        assert!(matches!(
            metric_contract(&l, &g, 2, 2),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            metric_contract(&l, &g, 0, 3),
            Err(Error::InvalidInput(_))
        ));
        let g6 = Tensor::<2>::identity(6);
        assert!(matches!(
            metric_contract(&l, &g6, 1, 4),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn metric_contract_is_linear() {
        // 100 seeded trials across dims ≤ 12.
        use rand::Rng;
        for trial in 0..100u64 {
            let mut rng = crate::rng::rng_for(trial, 0);
            let d = 2 * (2 + (trial as usize % 5)); // 4..12 even
            let l1 = Tensor::<4>::from_fn(d, |_| rng.gen_range(-1.0..1.0));
            let l2 = Tensor::<4>::from_fn(d, |_| rng.gen_range(-1.0..1.0));
            let g_inv = Tensor::<2>::from_fn(d, |[i, j]| {
                if i == j {
                    1.0 + 0.1 * (i as f64)
                } else {
                    0.0
                }
            });
            let (a, b) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let combo = Tensor::lin_comb(&[(a, &l1), (b, &l2)]);
            let lhs = metric_contract(&combo, &g_inv, 1, 4).unwrap();
            let rhs = Tensor::lin_comb(&[
                (a, &metric_contract(&l1, &g_inv, 1, 4).unwrap()),
                (b, &metric_contract(&l2, &g_inv, 1, 4).unwrap()),
            ]);
            assert!(residual(&lhs, &rhs, 1e-12).unwrap().pass, "trial {trial}");
        }
    }

    #[test]
    fn residual_examples() {
        let d = 4;
        let x = Tensor::<2>::identity(d);
        let r = residual(&x, &x, 1e-9).unwrap();
        assert_eq!(r.relative, 0.0);
        assert!(r.pass);

        // Below tolerance with the scale clamped at 1.
        let zero = Tensor::<1>::zeros(d);
        let mut tiny = Tensor::<1>::zeros(d);
        tiny.set([2], 1e-12);
        let r = residual(&zero, &tiny, 1e-9).unwrap();
        assert!(r.pass);
        assert_eq!(r.scale, 1e-12);
        assert_eq!(r.relative, 1e-12);
    }

    #[test]
    fn residual_rejects_mismatched_dims() {
        let x = Tensor::<2>::identity(4);
        let y = Tensor::<2>::identity(6);
        assert!(matches!(
            residual(&x, &y, 1e-9),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn apply_op_slot_substitutes_the_operator() {
        // P = diag(1,1,-1,-1); applying it in slot 2 of g flips columns 2,3.
        let d = 4;
        let p = Tensor::<2>::from_fn(d, |[i, j]| {
            if i == j {
                if i < 2 {
                    1.0
                } else {
                    -1.0
                }
            } else {
                0.0
            }
        });
        let g = Tensor::<2>::identity(d);
        let gt = apply_op_slot(&g, &p, 1);
        assert_eq!(gt.get([0, 0]), 1.0);
        assert_eq!(gt.get([2, 2]), -1.0);
        assert_eq!(gt.get([0, 2]), 0.0);
    }

    #[test]
    fn eval4_matches_entry_lookup_on_basis_vectors() {
        let d = 4;
        let pi1 = pi1_adapted(d);
        let mut e = |i: usize| {
            let mut v = vec![0.0; d];
            v[i] = 1.0;
            v
        };
        let (e0, e1) = (e(0), e(1));
        assert_eq!(eval4(&pi1, &e0, &e1, &e1, &e0), pi1.get([0, 1, 1, 0]));
        assert_eq!(eval4(&pi1, &e0, &e1, &e1, &e0), 1.0);
    }

    proptest! {
        #[test]
        fn residual_is_symmetric(seed in 0u64..500) {
            use rand::Rng;
            let mut rng = crate::rng::rng_for(seed, 1);
            let d = 4;
            let x = Tensor::<3>::from_fn(d, |_| rng.gen_range(-5.0..5.0));
            let y = Tensor::<3>::from_fn(d, |_| rng.gen_range(-5.0..5.0));
            let rxy = residual(&x, &y, 1e-9).unwrap();
            let ryx = residual(&y, &x, 1e-9).unwrap();
            prop_assert_eq!(rxy.max_abs_residual, ryx.max_abs_residual);
            prop_assert_eq!(rxy.relative, ryx.relative);
            let rxx = residual(&x, &x, 1e-9).unwrap();
            prop_assert_eq!(rxx.relative, 0.0);
        }
    }
}
