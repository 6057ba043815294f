//! Pointwise ambient data: metric, product structure, Lee-form data and the
//! symmetric `∇'θ` surrogate.
//!
//! All constructors enforce the structure axioms `P² = id`,
//! `g(Px,Py) = g(x,y)`, `tr P = 0` by building `P` from a g-orthonormal
//! eigenframe, so generated instances satisfy their invariants to rounding.

use nalgebra::DMatrix;
use rand::Rng;

use crate::rng::rng_for;
use crate::tensor::{apply_op_slot, Checks, ResidualReport, Tensor};
use crate::Error;

/// Sign of the Lee form under the product structure: `θ∘P = εθ`, `PΩ = εΩ`.
///
/// ε is an explicit instance parameter; suites always run both signs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Epsilon {
    Plus,
    Minus,
}

impl Epsilon {
    pub fn sign(self) -> f64 {
        match self {
            Epsilon::Plus => 1.0,
            Epsilon::Minus => -1.0,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Epsilon::Plus => 1,
            Epsilon::Minus => -1,
        }
    }

    pub fn from_i8(v: i8) -> Result<Self, Error> {
        match v {
            1 => Ok(Epsilon::Plus),
            -1 => Ok(Epsilon::Minus),
            other => Err(Error::InvalidInput(format!(
                "epsilon must be +1 or -1, got {other}"
            ))),
        }
    }

    /// Tag for seed-stream mixing.
    pub(crate) fn tag(self) -> u64 {
        match self {
            Epsilon::Plus => 1,
            Epsilon::Minus => 2,
        }
    }
}

impl std::fmt::Display for Epsilon {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:+}", self.as_i8())
    }
}

/// g-orthonormal bases of the ±1 eigenspaces of `P`, n vectors each.
#[derive(Debug, Clone)]
pub struct AdaptedFrames {
    pub plus: Vec<Vec<f64>>,
    pub minus: Vec<Vec<f64>>,
}

impl AdaptedFrames {
    /// All 2n frame vectors, plus block first.
    pub fn all(&self) -> impl Iterator<Item = &Vec<f64>> {
        self.plus.iter().chain(self.minus.iter())
    }
}

/// The ambient algebra every tensor lives in: dimension 2n, sign ε, metric
/// `g` with inverse, product structure `P`, the associated metric
/// `g̃(x,y) = g(x,Py)` and an adapted eigenframe.
#[derive(Debug, Clone)]
pub struct PointStructure {
    n: usize,
    epsilon: Epsilon,
    g: Tensor<2>,
    g_inv: Tensor<2>,
    p: Tensor<2>,
    g_tilde: Tensor<2>,
    frames: Option<AdaptedFrames>,
}

impl PointStructure {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn epsilon(&self) -> Epsilon {
        self.epsilon
    }

    pub fn g(&self) -> &Tensor<2> {
        &self.g
    }

    pub fn g_inv(&self) -> &Tensor<2> {
        &self.g_inv
    }

    pub fn p(&self) -> &Tensor<2> {
        &self.p
    }

    pub fn g_tilde(&self) -> &Tensor<2> {
        &self.g_tilde
    }

    /// Adapted frames; absent only for structures rebuilt from raw arrays
    /// whose eigenspaces could not be extracted.
    pub fn frames(&self) -> Option<&AdaptedFrames> {
        self.frames.as_ref()
    }

    /// Metric pairing of two vectors.
    pub fn g_dot(&self, x: &[f64], y: &[f64]) -> f64 {
        let d = self.dim();
        let mut sum = 0.0;
        for i in 0..d {
            let mut row = 0.0;
            for j in 0..d {
                row += self.g.values()[i * d + j] * y[j];
            }
            sum += x[i] * row;
        }
        sum
    }

    /// `(Px)^i = Pⁱ_j x^j`.
    pub fn p_apply(&self, x: &[f64]) -> Vec<f64> {
        let d = self.dim();
        (0..d)
            .map(|i| (0..d).map(|j| self.p.values()[i * d + j] * x[j]).sum())
            .collect()
    }

    /// Metric dual covector of a vector: `θ = g(Ω, ·)`.
    pub fn covector_of(&self, omega: &[f64]) -> Tensor<1> {
        let d = self.dim();
        Tensor::<1>::from_fn(d, |[i]| {
            (0..d).map(|j| self.g.values()[i * d + j] * omega[j]).sum()
        })
    }

    /// Metric dual vector of a covector: `Ω = g⁻¹θ`.
    pub fn vector_of(&self, theta: &Tensor<1>) -> Vec<f64> {
        let d = self.dim();
        (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| self.g_inv.values()[i * d + j] * theta.values()[j])
                    .sum()
            })
            .collect()
    }

    /// The composed covector `(θ∘P)(x) = θ(Px)`.
    pub fn compose_p(&self, theta: &Tensor<1>) -> Tensor<1> {
        apply_op_slot(theta, &self.p, 0)
    }

    /// Substitutes `P` into the listed (0-based) slots of a rank-2 tensor.
    pub fn apply_p2(&self, t: &Tensor<2>, slots: &[usize]) -> Tensor<2> {
        let mut out = t.clone();
        for &s in slots {
            out = apply_op_slot(&out, &self.p, s);
        }
        out
    }

    /// Substitutes `P` into the listed (0-based) slots of a rank-4 tensor.
    pub fn apply_p4(&self, t: &Tensor<4>, slots: &[usize]) -> Tensor<4> {
        let mut out = t.clone();
        for &s in slots {
            out = apply_op_slot(&out, &self.p, s);
        }
        out
    }

    /// The canonical flat model: `g = id`, `P = diag(1,…,1,−1,…,−1)`.
    pub fn adapted(n: usize, epsilon: Epsilon) -> Result<Self, Error> {
        if n < 2 {
            return Err(Error::InvalidInput(format!(
                "half-dimension must be at least 2, got {n}"
            )));
        }
        let d = 2 * n;
        let g = Tensor::<2>::identity(d);
        let p = Tensor::<2>::from_fn(d, |[i, j]| {
            if i != j {
                0.0
            } else if i < n {
                1.0
            } else {
                -1.0
            }
        });
        let mut basis = Vec::with_capacity(d);
        for i in 0..d {
            let mut v = vec![0.0; d];
            v[i] = 1.0;
            basis.push(v);
        }
        Ok(Self {
            n,
            epsilon,
            g_inv: g.clone(),
            g_tilde: p.clone(),
            g,
            p,
            frames: Some(AdaptedFrames {
                plus: basis[..n].to_vec(),
                minus: basis[n..].to_vec(),
            }),
        })
    }

    /// Rebuilds a structure from raw `g` and `P` arrays, e.g. from a loaded
    /// instance file.  Invariants are *not* enforced here; run
    /// [`validate_structure`] to check them.
    pub fn from_parts(
        n: usize,
        epsilon: Epsilon,
        g: Tensor<2>,
        p: Tensor<2>,
    ) -> Result<Self, Error> {
        if n < 2 {
            return Err(Error::InvalidInput(format!(
                "half-dimension must be at least 2, got {n}"
            )));
        }
        let d = 2 * n;
        if g.dim() != d || p.dim() != d {
            return Err(Error::DimensionMismatch(format!(
                "expected {d}x{d} arrays for n = {n}, got g dim {} and P dim {}",
                g.dim(),
                p.dim()
            )));
        }
        if !g.all_finite() || !p.all_finite() {
            return Err(Error::InvalidInput("non-finite entries in g or P".into()));
        }
        let g_inv = invert(&g)?;
        let g_tilde = g.matmul(&p);
        let frames = extract_frames(n, &g, &p);
        Ok(Self {
            n,
            epsilon,
            g,
            g_inv,
            p,
            g_tilde,
            frames,
        })
    }
}

fn invert(g: &Tensor<2>) -> Result<Tensor<2>, Error> {
    let d = g.dim();
    let m = DMatrix::from_row_slice(d, d, g.values());
    let inv = m
        .try_inverse()
        .ok_or_else(|| Error::InvalidInput("metric is singular".into()))?;
    Ok(Tensor::<2>::from_fn(d, |[i, j]| inv[(i, j)]))
}

/// Modified Gram–Schmidt under `g` with one reorthogonalization pass.
/// Returns None if a candidate collapses below the rank threshold.
fn orthonormalize(g: &Tensor<2>, candidates: &[Vec<f64>], want: usize) -> Option<Vec<Vec<f64>>> {
    let d = g.dim();
    let dot = |x: &[f64], y: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..d {
            for j in 0..d {
                s += x[i] * g.values()[i * d + j] * y[j];
            }
        }
        s
    };
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(want);
    for cand in candidates {
        if basis.len() == want {
            break;
        }
        let mut v = cand.clone();
        let norm0 = dot(&v, &v);
        if !(norm0 > 0.0) {
            return None; // not positive definite on this vector
        }
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&v, b);
                for i in 0..d {
                    v[i] -= c * b[i];
                }
            }
        }
        let nrm2 = dot(&v, &v);
        if nrm2 <= 1e-16 * norm0.max(1.0) {
            continue; // linearly dependent candidate, skip
        }
        let inv = nrm2.sqrt().recip();
        for x in v.iter_mut() {
            *x *= inv;
        }
        basis.push(v);
    }
    (basis.len() == want).then_some(basis)
}

/// Attempts to split the basis through the spectral projectors `(id ± P)/2`
/// and orthonormalize each half.
fn extract_frames(n: usize, g: &Tensor<2>, p: &Tensor<2>) -> Option<AdaptedFrames> {
    let d = 2 * n;
    let mut plus_cands = Vec::new();
    let mut minus_cands = Vec::new();
    for i in 0..d {
        let mut e = vec![0.0; d];
        e[i] = 1.0;
        let pe: Vec<f64> = (0..d)
            .map(|r| (0..d).map(|c| p.values()[r * d + c] * e[c]).sum())
            .collect();
        let vp: Vec<f64> = (0..d).map(|k| 0.5 * (e[k] + pe[k])).collect();
        let vm: Vec<f64> = (0..d).map(|k| 0.5 * (e[k] - pe[k])).collect();
        plus_cands.push(vp);
        minus_cands.push(vm);
    }
    let plus = orthonormalize(g, &plus_cands, n)?;
    let minus = orthonormalize(g, &minus_cands, n)?;
    // The split must actually be eigen: reject if P moves a frame vector.
    let check = |vs: &[Vec<f64>], sign: f64| -> bool {
        vs.iter().all(|v| {
            let pv: Vec<f64> = (0..d)
                .map(|r| (0..d).map(|c| p.values()[r * d + c] * v[c]).sum())
                .collect();
            pv.iter()
                .zip(v.iter())
                .all(|(a, b)| (a - sign * b).abs() <= 1e-6)
        })
    };
    (check(&plus, 1.0) && check(&minus, -1.0)).then_some(AdaptedFrames { plus, minus })
}

/// Builds a seeded random point structure: `g = AᵀA + 2n·id` from a uniform
/// array `A`, a g-orthonormal frame by Gram–Schmidt, and
/// `P = proj(V⁺) − proj(V⁻)`.
pub fn generate_structure(n: usize, epsilon: Epsilon, seed: u64) -> Result<PointStructure, Error> {
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "half-dimension must be at least 2 (the pi-tensor family degenerates below dim 4), got {n}"
        )));
    }
    let d = 2 * n;

    let mut rng_g = rng_for(seed, roles::METRIC);
    let a = Tensor::<2>::from_fn(d, |_| rng_g.gen_range(-1.0..1.0));
    let mut g = a.transposed().matmul(&a);
    for i in 0..d {
        g.data[i * d + i] += d as f64;
    }

    let mut rng_f = rng_for(seed, roles::FRAME);
    let mut frame: Vec<Vec<f64>> = Vec::with_capacity(d);
    let mut attempts = 0;
    while frame.len() < d {
        attempts += 1;
        if attempts > 64 * d {
            return Err(Error::Generation(
                "frame generation exhausted its retry budget".into(),
            ));
        }
        let cand: Vec<f64> = (0..d).map(|_| rng_f.gen_range(-1.0..1.0)).collect();
        let mut with_new = frame.clone();
        with_new.push(cand);
        if let Some(ortho) = orthonormalize(&g, &with_new, frame.len() + 1) {
            frame = ortho;
        }
    }

    // P = Σ_a σ_a f_a ⊗ (g f_a): Pⁱ_j = Σ_a σ_a f_aⁱ (g f_a)_j.
    let mut p = Tensor::<2>::zeros(d);
    for (a_idx, f) in frame.iter().enumerate() {
        let sigma = if a_idx < n { 1.0 } else { -1.0 };
        let dual: Vec<f64> = (0..d)
            .map(|j| (0..d).map(|m| g.values()[j * d + m] * f[m]).sum())
            .collect();
        for i in 0..d {
            for j in 0..d {
                p.data[i * d + j] += sigma * f[i] * dual[j];
            }
        }
    }

    let g_inv = invert(&g)?;
    let g_tilde = g.matmul(&p);
    Ok(PointStructure {
        n,
        epsilon,
        g,
        g_inv,
        p,
        g_tilde,
        frames: Some(AdaptedFrames {
            plus: frame[..n].to_vec(),
            minus: frame[n..].to_vec(),
        }),
    })
}

/// Aggregates the worst residual over all structure invariants.  Reports,
/// never fails.
pub fn validate_structure(ps: &PointStructure, tol: f64) -> ResidualReport {
    let d = ps.dim();
    let mut checks = Checks::new();

    let g_sym = (&ps.g - &ps.g.transposed()).max_abs();
    checks.push_parts(g_sym, ps.g.max_abs(), tol);

    let p2 = ps.p.matmul(&ps.p);
    let p2_err = (&p2 - &Tensor::<2>::identity(d)).max_abs();
    checks.push_parts(p2_err, 1.0, tol);

    let compat = (&ps.p.transposed().matmul(&ps.g).matmul(&ps.p) - &ps.g).max_abs();
    checks.push_parts(compat, ps.g.max_abs(), tol);

    checks.push_parts(ps.p.trace().abs(), 1.0, tol);

    let gt_sym = (&ps.g_tilde - &ps.g_tilde.transposed()).max_abs();
    checks.push_parts(gt_sym, ps.g_tilde.max_abs(), tol);

    let inv_err = (&ps.g_inv.matmul(&ps.g) - &Tensor::<2>::identity(d)).max_abs();
    checks.push_parts(inv_err, 1.0, tol);

    if let Some(frames) = &ps.frames {
        for (sign, vs) in [(1.0, &frames.plus), (-1.0, &frames.minus)] {
            for v in vs {
                let pv = ps.p_apply(v);
                let err = pv
                    .iter()
                    .zip(v.iter())
                    .fold(0.0_f64, |a, (x, y)| a.max((x - sign * y).abs()));
                checks.push_parts(err, 1.0, tol);
            }
        }
        let all: Vec<&Vec<f64>> = frames.all().collect();
        for (i, x) in all.iter().enumerate() {
            for (j, y) in all.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                checks.push_parts((ps.g_dot(x, y) - want).abs(), 1.0, tol);
            }
        }
    }

    checks.finish(tol)
}

/// Lee-form data: a covector θ, its metric dual Ω, and θ(Ω) = g(Ω,Ω).
#[derive(Debug, Clone)]
pub struct LeeData {
    pub theta: Tensor<1>,
    pub omega: Vec<f64>,
    pub theta_omega: f64,
}

impl LeeData {
    pub fn zero(ps: &PointStructure) -> Self {
        Self {
            theta: Tensor::<1>::zeros(ps.dim()),
            omega: vec![0.0; ps.dim()],
            theta_omega: 0.0,
        }
    }

    pub fn from_omega(ps: &PointStructure, omega: Vec<f64>) -> Self {
        let theta = ps.covector_of(&omega);
        let theta_omega = theta
            .values()
            .iter()
            .zip(omega.iter())
            .map(|(a, b)| a * b)
            .sum();
        Self {
            theta,
            omega,
            theta_omega,
        }
    }

    pub fn from_theta(ps: &PointStructure, theta: Tensor<1>) -> Self {
        let omega = ps.vector_of(&theta);
        let theta_omega = theta
            .values()
            .iter()
            .zip(omega.iter())
            .map(|(a, b)| a * b)
            .sum();
        Self {
            theta,
            omega,
            theta_omega,
        }
    }
}

/// Draws Ω as a random combination of the ε-eigenframe, so `PΩ = εΩ` and
/// `θ∘P = εθ` hold by construction.  Coefficients are uniform in
/// `[-scale, scale]`.
pub fn generate_theta(ps: &PointStructure, seed: u64, scale: f64) -> LeeData {
    generate_theta_in(ps, ps.epsilon(), seed, scale)
}

/// As [`generate_theta`] but with an explicit eigenspace choice; used to
/// assemble mixed Lee forms for classification tests.
pub fn generate_theta_in(ps: &PointStructure, side: Epsilon, seed: u64, scale: f64) -> LeeData {
    let frames = ps
        .frames()
        .expect("structure has no adapted frames; use a generated structure");
    let side_frames = match side {
        Epsilon::Plus => &frames.plus,
        Epsilon::Minus => &frames.minus,
    };
    let mut rng = rng_for(seed, roles::THETA);
    let d = ps.dim();
    let mut omega = vec![0.0; d];
    for f in side_frames {
        let c = rng.gen_range(-scale..=scale);
        for i in 0..d {
            omega[i] += c * f[i];
        }
    }
    LeeData::from_omega(ps, omega)
}

/// The symmetric rank-2 surrogate for `(∇'_y θ)z` in the closed-θ regime:
/// `H(y,z) = H(z,y)` with `H(Py,z) = H(y,Pz) = εH(y,z)`.
#[derive(Debug, Clone)]
pub struct NablaTheta {
    pub h: Tensor<2>,
}

impl NablaTheta {
    pub fn zero(ps: &PointStructure) -> Self {
        Self {
            h: Tensor::<2>::zeros(ps.dim()),
        }
    }
}

/// The projector onto admissible H data:
/// `Π(H)(y,z) = ¼[H(y,z) + εH(y,Pz) + εH(Py,z) + H(Py,Pz)]`.
pub fn project_h(ps: &PointStructure, h0: &Tensor<2>) -> Tensor<2> {
    let eps = ps.epsilon().sign();
    let h_p2 = ps.apply_p2(h0, &[1]);
    let h_p1 = ps.apply_p2(h0, &[0]);
    let h_pp = ps.apply_p2(h0, &[0, 1]);
    Tensor::lin_comb(&[
        (0.25, h0),
        (0.25 * eps, &h_p2),
        (0.25 * eps, &h_p1),
        (0.25, &h_pp),
    ])
}

/// Seeded random admissible H: a uniform rank-2 draw, symmetrized, then
/// passed through [`project_h`].
pub fn generate_h(ps: &PointStructure, seed: u64) -> NablaTheta {
    let mut rng = rng_for(seed, roles::NABLA_THETA);
    let d = ps.dim();
    let h0 = Tensor::<2>::from_fn(d, |_| rng.gen_range(-1.0..1.0));
    let sym = Tensor::lin_comb(&[(0.5, &h0), (0.5, &h0.transposed())]);
    NablaTheta {
        h: project_h(ps, &sym),
    }
}

/// Stream roles for the structure generators.
pub(crate) mod roles {
    pub const METRIC: u64 = 0x10;
    pub const FRAME: u64 = 0x11;
    pub const THETA: u64 = 0x12;
    pub const NABLA_THETA: u64 = 0x13;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::residual;
    use crate::STRUCT_TOL;

    #[test]
    fn generated_structures_pass_validation() {
        for seed in 0..100u64 {
            let ps = generate_structure(2, Epsilon::Plus, seed).unwrap();
            let r = validate_structure(&ps, STRUCT_TOL);
            assert!(r.pass, "seed {seed}: relative {}", r.relative);
        }
        for n in 2..=6usize {
            for eps in [Epsilon::Plus, Epsilon::Minus] {
                let ps = generate_structure(n, eps, 42).unwrap();
                let r = validate_structure(&ps, STRUCT_TOL);
                assert!(r.pass, "n {n}: relative {}", r.relative);
            }
        }
    }

    #[test]
    fn adapted_model_is_accepted() {
        let ps = PointStructure::adapted(2, Epsilon::Plus).unwrap();
        assert!(validate_structure(&ps, STRUCT_TOL).pass);
        assert_eq!(ps.g_tilde().get([2, 2]), -1.0);
    }

    #[test]
    fn unbalanced_p_is_rejected_by_trace() {
        // P = diag(1,1,1,-1): a valid involution but tr P = 2 ≠ 0.
        let d = 4;
        let g = Tensor::<2>::identity(d);
        let p = Tensor::<2>::from_fn(d, |[i, j]| {
            if i != j {
                0.0
            } else if i < 3 {
                1.0
            } else {
                -1.0
            }
        });
        let ps = PointStructure::from_parts(2, Epsilon::Plus, g, p).unwrap();
        let r = validate_structure(&ps, STRUCT_TOL);
        assert!(!r.pass);
        assert!(r.max_abs_residual >= 2.0 - 1e-12);
    }

    #[test]
    fn non_symmetric_metric_fails_validation() {
        let d = 4;
        let mut g = Tensor::<2>::identity(d);
        g.set([0, 1], 0.3);
        let p = PointStructure::adapted(2, Epsilon::Plus).unwrap().p().clone();
        let ps = PointStructure::from_parts(2, Epsilon::Plus, g, p).unwrap();
        assert!(!validate_structure(&ps, STRUCT_TOL).pass);
    }

    #[test]
    fn perturbed_frame_breaks_compatibility() {
        // Rebuild P from a frame with one vector skewed: tr P stays 0 but
        // g(P·,P·) = g fails.
        let n = 2;
        let d = 2 * n;
        let ps0 = generate_structure(n, Epsilon::Plus, 5).unwrap();
        let frames = ps0.frames().unwrap();
        let mut vectors: Vec<Vec<f64>> = frames.all().cloned().collect();
        vectors[0] = vectors[0]
            .iter()
            .zip(vectors[2].iter())
            .map(|(a, b)| a + 0.4 * b)
            .collect();
        let mut p = Tensor::<2>::zeros(d);
        for (a_idx, f) in vectors.iter().enumerate() {
            let sigma = if a_idx < n { 1.0 } else { -1.0 };
            let dual: Vec<f64> = (0..d)
                .map(|j| (0..d).map(|m| ps0.g().values()[j * d + m] * f[m]).sum())
                .collect();
            for i in 0..d {
                for j in 0..d {
                    p.data[i * d + j] += sigma * f[i] * dual[j];
                }
            }
        }
        let ps = PointStructure::from_parts(n, Epsilon::Plus, ps0.g().clone(), p).unwrap();
        let r = validate_structure(&ps, STRUCT_TOL);
        assert!(!r.pass);
    }

    #[test]
    fn theta_respects_the_epsilon_eigenspace() {
        for n in 2..=6usize {
            for eps in [Epsilon::Plus, Epsilon::Minus] {
                for seed in 0..10u64 {
                    let ps = generate_structure(n, eps, seed).unwrap();
                    let lee = generate_theta(&ps, seed, 1.0);
                    let theta_p = ps.compose_p(&lee.theta);
                    let want = lee.theta.scaled(eps.sign());
                    assert!(residual(&theta_p, &want, 1e-12).unwrap().pass);
                    let p_omega = ps.p_apply(&lee.omega);
                    let err = p_omega
                        .iter()
                        .zip(lee.omega.iter())
                        .fold(0.0_f64, |a, (x, y)| a.max((x - eps.sign() * y).abs()));
                    assert!(err <= 1e-12);
                    assert!(lee.theta_omega >= 0.0);
                    let gww = ps.g_dot(&lee.omega, &lee.omega);
                    assert!((lee.theta_omega - gww).abs() <= 1e-12 * gww.max(1.0));
                }
            }
        }
    }

    #[test]
    fn adapted_theta_example() {
        // ε = −1, Ω = e3 (third basis vector, index 2): θ = (0,0,1,0).
        let ps = PointStructure::adapted(2, Epsilon::Minus).unwrap();
        let mut omega = vec![0.0; 4];
        omega[2] = 1.0;
        let lee = LeeData::from_omega(&ps, omega);
        assert_eq!(lee.theta.values(), &[0.0, 0.0, 1.0, 0.0]);
        assert_eq!(lee.theta_omega, 1.0);
    }

    #[test]
    fn zero_theta_is_accepted() {
        let ps = generate_structure(2, Epsilon::Plus, 1).unwrap();
        let lee = LeeData::zero(&ps);
        assert_eq!(lee.theta_omega, 0.0);
        assert_eq!(lee.theta.max_abs(), 0.0);
    }

    #[test]
    fn h_projector_on_the_metric() {
        // H₀ = g projects to ½(g + ε g̃).
        for eps in [Epsilon::Plus, Epsilon::Minus] {
            let ps = generate_structure(3, eps, 9).unwrap();
            let h = project_h(&ps, ps.g());
            let want = Tensor::lin_comb(&[(0.5, ps.g()), (0.5 * eps.sign(), ps.g_tilde())]);
            assert!(residual(&h, &want, 1e-12).unwrap().pass);
        }
    }

    #[test]
    fn h_projector_kills_antisymmetric_input_after_symmetrization() {
        let ps = generate_structure(2, Epsilon::Minus, 3).unwrap();
        let d = ps.dim();
        let a = Tensor::<2>::from_fn(d, |[i, j]| (i as f64) - (j as f64));
        let sym = Tensor::lin_comb(&[(0.5, &a), (0.5, &a.transposed())]);
        assert_eq!(sym.max_abs(), 0.0);
        let h = project_h(&ps, &sym);
        assert_eq!(h.max_abs(), 0.0);
    }

    #[test]
    fn h_projector_is_idempotent_and_output_admissible() {
        for eps in [Epsilon::Plus, Epsilon::Minus] {
            for seed in 0..10u64 {
                let ps = generate_structure(2, eps, seed).unwrap();
                let h = generate_h(&ps, seed).h;
                let reprojected = project_h(&ps, &h);
                assert!(residual(&reprojected, &h, 1e-12).unwrap().pass);
                // symmetry and P-compatibility
                assert!(residual(&h, &h.transposed(), 1e-12).unwrap().pass);
                let hp = ps.apply_p2(&h, &[1]);
                assert!(residual(&hp, &h.scaled(eps.sign()), 1e-12).unwrap().pass);
                let ph = ps.apply_p2(&h, &[0]);
                assert!(residual(&ph, &h.scaled(eps.sign()), 1e-12).unwrap().pass);
            }
        }
    }

    #[test]
    fn rejects_half_dimension_below_two() {
        assert!(matches!(
            generate_structure(1, Epsilon::Plus, 0),
            Err(Error::InvalidInput(_))
        ));
    }
}
