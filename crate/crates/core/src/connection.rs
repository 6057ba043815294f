//! The two-parameter family of natural connections: torsion, potential,
//! the p/q vectors and S-tensors, and the relations linking the curvature
//! tensors R, R' and K.

use crate::curvature::{is_curvature_like, is_p_tensor, pi_tensors, psi1, psi2};
use crate::structure::{LeeData, NablaTheta, PointStructure};
use crate::tensor::Tensor;
use crate::{Error, DEFAULT_TOL};

/// Coordinates (λ, μ) of a natural connection on the family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConnectionParams {
    pub lambda: f64,
    pub mu: f64,
}

impl ConnectionParams {
    pub fn new(lambda: f64, mu: f64) -> Self {
        Self { lambda, mu }
    }

    /// The canonical connection: λ = 0, μ = −1/(4n).
    pub fn canonical(n: usize) -> Self {
        Self {
            lambda: 0.0,
            mu: -1.0 / (4.0 * n as f64),
        }
    }

    /// The connection D: λ = μ = 0.
    pub fn d_connection() -> Self {
        Self {
            lambda: 0.0,
            mu: 0.0,
        }
    }
}

/// Torsion of the natural connection with parameters (λ, μ):
///
/// ```text
/// T(x,y,z) = 1/2n {g(y,z)θ(Px) − g(x,z)θ(Py)}
///          + λ {g(y,z)θ(x) − g(x,z)θ(y) + g(y,Pz)θ(Px) − g(x,Pz)θ(Py)}
///          + μ {g(y,Pz)θ(x) − g(x,Pz)θ(y) + g(y,z)θ(Px) − g(x,z)θ(Py)}
/// ```
pub fn torsion(ps: &PointStructure, lee: &LeeData, cp: &ConnectionParams) -> Tensor<3> {
    let d = ps.dim();
    let inv2n = 1.0 / (d as f64);
    let g = ps.g().values();
    let gt = ps.g_tilde().values();
    let th = lee.theta.values();
    let thp = ps.compose_p(&lee.theta);
    let thp = thp.values();
    let (la, mu) = (cp.lambda, cp.mu);
    Tensor::<3>::from_fn(d, |[x, y, z]| {
        let gyz = g[y * d + z];
        let gxz = g[x * d + z];
        let gtyz = gt[y * d + z];
        let gtxz = gt[x * d + z];
        inv2n * (gyz * thp[x] - gxz * thp[y])
            + la * (gyz * th[x] - gxz * th[y] + gtyz * thp[x] - gtxz * thp[y])
            + mu * (gtyz * th[x] - gtxz * th[y] + gyz * thp[x] - gxz * thp[y])
    })
}

/// Potential of the connection from its torsion: `Q(x,y,z) = T(z,x,y)`.
pub fn q_from_torsion(t: &Tensor<3>) -> Tensor<3> {
    let d = t.dim();
    Tensor::<3>::from_fn(d, |[x, y, z]| t.get([z, x, y]))
}

/// Whether to evaluate the family data in its general form or in the
/// ε-specialized form (`θ∘P = εθ`, `PΩ = εΩ`).  Both agree on conforming
/// instances; the suite checks that agreement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PqMode {
    General,
    Specialized,
}

/// The vectors p, q of the curvature relation and their metric pairings.
#[derive(Debug, Clone)]
pub struct PqData {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub gpp: f64,
    pub gqq: f64,
    pub gpq: f64,
}

/// General form: `p = λΩ + (μ + 1/2n)PΩ`, `q = λPΩ + μΩ`.
/// Specialized: `p = (λ + εμ + ε/2n)Ω`, `q = (μ + ελ)Ω`.
pub fn pq_vectors(
    ps: &PointStructure,
    lee: &LeeData,
    cp: &ConnectionParams,
    mode: PqMode,
) -> PqData {
    let d = ps.dim();
    let inv2n = 1.0 / (d as f64);
    let (la, mu) = (cp.lambda, cp.mu);
    let (p, q) = match mode {
        PqMode::General => {
            let p_omega = ps.p_apply(&lee.omega);
            let p: Vec<f64> = (0..d)
                .map(|i| la * lee.omega[i] + (mu + inv2n) * p_omega[i])
                .collect();
            let q: Vec<f64> = (0..d)
                .map(|i| la * p_omega[i] + mu * lee.omega[i])
                .collect();
            (p, q)
        }
        PqMode::Specialized => {
            let eps = ps.epsilon().sign();
            let cp_coef = la + eps * mu + eps * inv2n;
            let cq_coef = mu + eps * la;
            let p: Vec<f64> = lee.omega.iter().map(|v| cp_coef * v).collect();
            let q: Vec<f64> = lee.omega.iter().map(|v| cq_coef * v).collect();
            (p, q)
        }
    };
    PqData {
        gpp: ps.g_dot(&p, &p),
        gqq: ps.g_dot(&q, &q),
        gpq: ps.g_dot(&p, &q),
        p,
        q,
    }
}

/// The rank-2 data of the curvature relation.
///
/// With `H(y,z)` standing for `(∇'_y θ)z`:
///
/// ```text
/// S' (y,z) = (λ + εμ + ε/2n) H(y,z) − (μ+ελ)/2n · θ(y)θ(z)
/// S''(y,z) = (λ + εμ)        H(y,z) + (μ+ελ)/2n · θ(y)θ(z)
/// S  (y,z) = (λ + εμ + ε/4n) H(y,z) + (g(p,p)+g(q,q))/4 · g(y,z) + g(p,q)/2 · g̃(y,z)
/// ```
///
/// In general mode S' and S'' take their unspecialized form
/// (`λH(y,z) + (μ+1/2n)H(y,Pz) − …`), which coincides with the above on
/// conforming instances.
#[derive(Debug, Clone)]
pub struct STensors {
    pub s_prime: Tensor<2>,
    pub s_double_prime: Tensor<2>,
    pub s: Tensor<2>,
}

pub fn s_tensors(
    ps: &PointStructure,
    lee: &LeeData,
    cp: &ConnectionParams,
    h: &NablaTheta,
    mode: PqMode,
) -> STensors {
    let d = ps.dim();
    let inv2n = 1.0 / (d as f64);
    let inv4n = 0.5 * inv2n;
    let eps = ps.epsilon().sign();
    let (la, mu) = (cp.lambda, cp.mu);
    let th = lee.theta.values();

    let (s_prime, s_double_prime) = match mode {
        PqMode::Specialized => {
            let theta_sq = Tensor::<2>::from_fn(d, |[y, z]| th[y] * th[z]);
            let c_h_prime = la + eps * mu + eps * inv2n;
            let c_h_dprime = la + eps * mu;
            let c_theta = (mu + eps * la) * inv2n;
            let s_prime = Tensor::lin_comb(&[(c_h_prime, &h.h), (-c_theta, &theta_sq)]);
            let s_double_prime = Tensor::lin_comb(&[(c_h_dprime, &h.h), (c_theta, &theta_sq)]);
            (s_prime, s_double_prime)
        }
        PqMode::General => {
            let h_p = ps.apply_p2(&h.h, &[1]);
            let thp = ps.compose_p(&lee.theta);
            let thp = thp.values().to_vec();
            let th = th.to_vec();
            let s_prime = Tensor::<2>::from_fn(d, |[y, z]| {
                la * h.h.get([y, z]) + (mu + inv2n) * h_p.get([y, z])
                    - inv2n * (la * th[y] * thp[z] + mu * th[y] * th[z])
            });
            let s_double_prime = Tensor::<2>::from_fn(d, |[y, z]| {
                la * h.h.get([y, z])
                    + mu * h_p.get([y, z])
                    + inv2n * (la * thp[y] * th[z] + mu * thp[y] * thp[z])
            });
            (s_prime, s_double_prime)
        }
    };

    let pq = pq_vectors(ps, lee, cp, mode);
    let c_h = la + eps * mu + eps * inv4n;
    let s = Tensor::lin_comb(&[
        (c_h, &h.h),
        (0.25 * (pq.gpp + pq.gqq), ps.g()),
        (0.5 * pq.gpq, ps.g_tilde()),
    ]);

    STensors {
        s_prime,
        s_double_prime,
        s,
    }
}

/// Projects a curvature-like tensor onto its P-invariant part:
/// `K(x,y,z,w) = ½[R(x,y,z,w) + R(x,y,Pz,Pw)]`.
pub fn k_from_r(r: &Tensor<4>, ps: &PointStructure) -> Result<Tensor<4>, Error> {
    let report = is_curvature_like(r, DEFAULT_TOL);
    if !report.pass {
        return Err(Error::PredicateFailed {
            predicate: "curvature-like",
            report,
        });
    }
    let r_p = ps.apply_p4(r, &[2, 3]);
    Ok(Tensor::lin_comb(&[(0.5, r), (0.5, &r_p)]))
}

/// Recovers the Levi-Civita curvature tensor from the curvature tensor of a
/// natural connection:
/// `R = R' − g(p,p)π₁ − g(q,q)π₂ − g(p,q)π₃ − ψ₁(S') − ψ₂(S'')`.
pub fn r_from_rprime(
    rprime: &Tensor<4>,
    ps: &PointStructure,
    lee: &LeeData,
    cp: &ConnectionParams,
    h: &NablaTheta,
) -> Result<Tensor<4>, Error> {
    let report = is_p_tensor(rprime, ps, DEFAULT_TOL);
    if !report.pass {
        return Err(Error::PredicateFailed {
            predicate: "Riemannian P-tensor",
            report,
        });
    }
    let pq = pq_vectors(ps, lee, cp, PqMode::Specialized);
    let st = s_tensors(ps, lee, cp, h, PqMode::Specialized);
    let pis = pi_tensors(ps);
    let psi1_s = psi1(&st.s_prime, ps)?;
    let psi2_s = psi2(&st.s_double_prime, ps)?;
    Ok(Tensor::lin_comb(&[
        (1.0, rprime),
        (-pq.gpp, &pis.pi1),
        (-pq.gqq, &pis.pi2),
        (-pq.gpq, &pis.pi3),
        (-1.0, &psi1_s),
        (-1.0, &psi2_s),
    ]))
}

/// The direct route to K on closed-θ instances:
/// `K = R' − (ψ₁+ψ₂)(S)` with S as in [`s_tensors`].
pub fn k_from_rprime(
    rprime: &Tensor<4>,
    ps: &PointStructure,
    lee: &LeeData,
    cp: &ConnectionParams,
    h: &NablaTheta,
) -> Result<Tensor<4>, Error> {
    let report = is_p_tensor(rprime, ps, DEFAULT_TOL);
    if !report.pass {
        return Err(Error::PredicateFailed {
            predicate: "Riemannian P-tensor",
            report,
        });
    }
    let h_sym = crate::tensor::residual(&h.h, &h.h.transposed(), DEFAULT_TOL)?;
    if !h_sym.pass {
        return Err(Error::PredicateFailed {
            predicate: "symmetric nabla-theta data (closed Lee form)",
            report: h_sym,
        });
    }
    let st = s_tensors(ps, lee, cp, h, PqMode::Specialized);
    let psi1_s = psi1(&st.s, ps)?;
    let psi2_s = psi2(&st.s, ps)?;
    Ok(Tensor::lin_comb(&[
        (1.0, rprime),
        (-1.0, &psi1_s),
        (-1.0, &psi2_s),
    ]))
}
