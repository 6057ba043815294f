//! Curvature-like tensor algebra: the ψ₁/ψ₂ builders, the π family,
//! symmetry predicates, Ricci-type contractions and seeded generators.

use rand::Rng;

use crate::rng::rng_for;
use crate::structure::PointStructure;
use crate::tensor::{metric_contract, trace2, Checks, ResidualReport, Tensor};
use crate::{Error, PREDICATE_TOL};

/// `ψ₁(S)(x,y,z,w) = g(y,z)S(x,w) − g(x,z)S(y,w) + S(y,z)g(x,w) − S(x,z)g(y,w)`.
///
/// Curvature-like exactly when S is symmetric.
pub fn psi1(s: &Tensor<2>, ps: &PointStructure) -> Result<Tensor<4>, Error> {
    if s.dim() != ps.dim() {
        return Err(Error::DimensionMismatch(format!(
            "rank-2 argument has dim {}, structure has dim {}",
            s.dim(),
            ps.dim()
        )));
    }
    let d = ps.dim();
    let g = ps.g().values();
    let sv = s.values();
    Ok(Tensor::<4>::from_fn(d, |[x, y, z, w]| {
        g[y * d + z] * sv[x * d + w] - g[x * d + z] * sv[y * d + w]
            + sv[y * d + z] * g[x * d + w]
            - sv[x * d + z] * g[y * d + w]
    }))
}

/// `ψ₂(S)(x,y,z,w) = ψ₁(S)(x,y,Pz,Pw)`.
///
/// Curvature-like exactly when S(x,Py) = S(y,Px).
pub fn psi2(s: &Tensor<2>, ps: &PointStructure) -> Result<Tensor<4>, Error> {
    let base = psi1(s, ps)?;
    Ok(ps.apply_p4(&base, &[2, 3]))
}

/// The three basic curvature-like tensors built from the metrics:
/// `π₁ = ½ψ₁(g)`, `π₂ = ½ψ₂(g)`, `π₃ = ψ₁(g̃) = ψ₂(g̃)`.
#[derive(Debug, Clone)]
pub struct PiTensors {
    pub pi1: Tensor<4>,
    pub pi2: Tensor<4>,
    pub pi3: Tensor<4>,
}

pub fn pi_tensors(ps: &PointStructure) -> PiTensors {
    let pi1 = psi1(ps.g(), ps).expect("metric matches its own structure").scaled(0.5);
    let pi2 = psi2(ps.g(), ps).expect("metric matches its own structure").scaled(0.5);
    let pi3 = psi1(ps.g_tilde(), ps).expect("metric matches its own structure");
    #[cfg(debug_assertions)]
    {
        let alt = psi2(ps.g_tilde(), ps).expect("metric matches its own structure");
        let r = crate::tensor::residual(&pi3, &alt, 1e-12).expect("same dims");
        debug_assert!(r.pass, "psi1(g~) != psi2(g~): relative {}", r.relative);
    }
    PiTensors { pi1, pi2, pi3 }
}

/// Exhaustive residual over the curvature-like identities: antisymmetry in
/// the first and second index pairs and the first Bianchi identity.
pub fn is_curvature_like(l: &Tensor<4>, tol: f64) -> ResidualReport {
    let d = l.dim();
    let scale = l.max_abs();
    let mut worst = 0.0_f64;
    for x in 0..d {
        for y in 0..d {
            for z in 0..d {
                for w in 0..d {
                    let v = l.get([x, y, z, w]);
                    worst = worst.max((v + l.get([y, x, z, w])).abs());
                    worst = worst.max((v + l.get([x, y, w, z])).abs());
                    let bianchi = v + l.get([y, z, x, w]) + l.get([z, x, y, w]);
                    worst = worst.max(bianchi.abs());
                }
            }
        }
    }
    ResidualReport::new(worst, scale, tol)
}

/// Curvature-likeness plus invariance under P in the last argument pair:
/// `L(x,y,Pz,Pw) = L(x,y,z,w)`.
pub fn is_p_tensor(l: &Tensor<4>, ps: &PointStructure, tol: f64) -> ResidualReport {
    let mut checks = Checks::new();
    checks.push(is_curvature_like(l, tol));
    let lp = ps.apply_p4(l, &[2, 3]);
    let diff = (&lp - l).max_abs();
    checks.push_parts(diff, l.max_abs(), tol);
    checks.finish(tol)
}

/// Ricci tensor, scalar curvature and their starred companions:
/// `ρ(y,z) = gⁱʲ L(eᵢ,y,z,eⱼ)`, `ρ*(y,z) = gⁱʲ L(eᵢ,y,z,Peⱼ)`.
#[derive(Debug, Clone)]
pub struct ContractionSet {
    pub rho: Tensor<2>,
    pub tau: f64,
    pub rho_star: Tensor<2>,
    pub tau_star: f64,
}

pub fn contractions(l: &Tensor<4>, ps: &PointStructure) -> ContractionSet {
    let rho = metric_contract(l, ps.g_inv(), 1, 4).expect("slots 1,4 are valid");
    let tau = trace2(ps.g_inv(), &rho);
    let l_p4 = ps.apply_p4(l, &[3]);
    let rho_star = metric_contract(&l_p4, ps.g_inv(), 1, 4).expect("slots 1,4 are valid");
    let tau_star = trace2(ps.g_inv(), &rho_star);
    ContractionSet {
        rho,
        tau,
        rho_star,
        tau_star,
    }
}

/// A rank-4 tensor with cached predicate results.
#[derive(Debug, Clone)]
pub struct CurvatureTensor {
    pub tensor: Tensor<4>,
    pub curvature_like: ResidualReport,
    pub p_tensor: ResidualReport,
}

impl CurvatureTensor {
    pub fn classify(tensor: Tensor<4>, ps: &PointStructure, tol: f64) -> Self {
        let curvature_like = is_curvature_like(&tensor, tol);
        let p_tensor = is_p_tensor(&tensor, ps, tol);
        Self {
            tensor,
            curvature_like,
            p_tensor,
        }
    }
}

/// Antisymmetrizes slots (1,2) and (3,4), symmetrizes across the pair swap,
/// then removes the Bianchi component
/// `b(L)(x,y,z,w) = ⅓[L(x,y,z,w) + L(y,z,x,w) + L(z,x,y,w)]`.
fn curvature_project(l0: &Tensor<4>) -> Tensor<4> {
    let d = l0.dim();
    let a12 = Tensor::<4>::from_fn(d, |[x, y, z, w]| {
        0.5 * (l0.get([x, y, z, w]) - l0.get([y, x, z, w]))
    });
    let a34 = Tensor::<4>::from_fn(d, |[x, y, z, w]| {
        0.5 * (a12.get([x, y, z, w]) - a12.get([x, y, w, z]))
    });
    let pair = Tensor::<4>::from_fn(d, |[x, y, z, w]| {
        0.5 * (a34.get([x, y, z, w]) + a34.get([z, w, x, y]))
    });
    let b = bianchi_part(&pair);
    &pair - &b
}

/// The cyclic average `b(L)`; idempotent on the pair-symmetrized space.
pub(crate) fn bianchi_part(l: &Tensor<4>) -> Tensor<4> {
    let d = l.dim();
    Tensor::<4>::from_fn(d, |[x, y, z, w]| {
        (l.get([x, y, z, w]) + l.get([y, z, x, w]) + l.get([z, x, y, w])) / 3.0
    })
}

/// Seeded random curvature-like tensor: a uniform draw pushed through the
/// symmetrization and Bianchi projectors.
pub fn random_curvature_like(ps: &PointStructure, seed: u64) -> CurvatureTensor {
    let mut rng = rng_for(seed, roles::CURVATURE);
    let d = ps.dim();
    let raw = Tensor::<4>::from_fn(d, |_| rng.gen_range(-1.0..1.0));
    CurvatureTensor::classify(curvature_project(&raw), ps, PREDICATE_TOL)
}

/// Seeded random Riemannian P-tensor: independent algebraic curvature
/// tensors on the two n-dimensional eigenblocks of the adapted frame,
/// embedded block-diagonally and pushed to the ambient basis.
pub fn random_p_tensor(ps: &PointStructure, seed: u64) -> CurvatureTensor {
    let n = ps.n();
    let d = ps.dim();
    let frames = ps
        .frames()
        .expect("structure has no adapted frames; use a generated structure");
    let mut rng = rng_for(seed, roles::P_TENSOR);

    let block = |offset: usize, lhat: &mut Tensor<4>, rng: &mut rand_chacha::ChaCha8Rng| {
        let raw = Tensor::<4>::from_fn(n, |_| rng.gen_range(-1.0..1.0));
        let proj = curvature_project(&raw);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for e in 0..n {
                        lhat.set(
                            [a + offset, b + offset, c + offset, e + offset],
                            proj.get([a, b, c, e]),
                        );
                    }
                }
            }
        }
    };
    let mut lhat = Tensor::<4>::zeros(d);
    block(0, &mut lhat, &mut rng);
    block(n, &mut lhat, &mut rng);

    // Frame components to ambient components through the dual covectors
    // E^a = g f_a: L_{ijkl} = Σ L̂_{abce} E^a_i E^b_j E^c_k E^e_l.
    let duals: Vec<Vec<f64>> = frames
        .all()
        .map(|f| {
            (0..d)
                .map(|i| (0..d).map(|m| ps.g().values()[i * d + m] * f[m]).sum())
                .collect()
        })
        .collect();
    let mut out = lhat;
    for slot in 0..4 {
        out = change_slot_basis(&out, &duals, slot);
    }
    CurvatureTensor::classify(out, ps, PREDICATE_TOL)
}

/// Replaces one slot's frame index by an ambient index:
/// `out(.., i, ..) = Σ_a in(.., a, ..) dual_a[i]`.
fn change_slot_basis(t: &Tensor<4>, duals: &[Vec<f64>], slot: usize) -> Tensor<4> {
    let d = t.dim();
    let mut out = Tensor::<4>::zeros(d);
    let mut ix = [0usize; 4];
    loop {
        let i = ix[slot];
        let mut sum = 0.0;
        let mut ax = ix;
        for (a, dual) in duals.iter().enumerate() {
            ax[slot] = a;
            sum += t.get(ax) * dual[i];
        }
        out.set(ix, sum);
        if !crate::tensor::advance(&mut ix, d) {
            break;
        }
    }
    out
}

pub(crate) mod roles {
    pub const CURVATURE: u64 = 0x20;
    pub const P_TENSOR: u64 = 0x21;
}
