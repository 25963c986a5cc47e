//! KZG polynomial commitments. Hiding uses the top slot: a commitment to g
//! with randomness r is a plain commitment to g + r * Z^D where D is the
//! maximum degree of the parameters, so g itself must have degree < D.

use ark_ff::{Field, One, UniformRand, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::algebra::{GroupElem, PairingBackend, Polynomial};
use crate::error::{ArcError, Result};

#[derive(Clone, Debug)]
pub struct KzgParams<B: PairingBackend> {
    /// alpha^i * h1 for i = 0..=max_degree.
    pub powers_g1: Vec<B::G1>,
    pub h2: B::G2,
    pub alpha_g2: B::G2,
    pub max_degree: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KzgCommitment<B: PairingBackend>(pub B::G1);

/// Evaluation proof. `blind` is the randomness of the opened commitment; the
/// verifier adds `blind * x^D` to the claimed value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KzgOpening<B: PairingBackend> {
    pub proof: B::G1,
    pub blind: B::Fr,
}

impl<B: PairingBackend> KzgCommitment<B> {
    pub fn to_bytes(&self) -> Vec<u8> {
        self.0.to_bytes()
    }
}

impl<B: PairingBackend> std::ops::Add for KzgCommitment<B> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        KzgCommitment(self.0 + o.0)
    }
}

/// Samples the trapdoor from a seeded RNG and drops it after use.
pub fn kzg_setup<B: PairingBackend>(seed: u64, d: usize) -> Result<KzgParams<B>> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut alpha = B::Fr::rand(&mut rng);
    while alpha.is_zero() {
        alpha = B::Fr::rand(&mut rng);
    }
    kzg_setup_with_trapdoor(alpha, d)
}

/// Setup with a caller-chosen trapdoor. Only sensible in tests.
pub fn kzg_setup_with_trapdoor<B: PairingBackend>(alpha: B::Fr, d: usize) -> Result<KzgParams<B>> {
    if d < 1 {
        return Err(ArcError::InvalidParam("kzg degree must be at least 1".into()));
    }
    let mut scalars = Vec::with_capacity(d + 1);
    let mut acc = B::Fr::one();
    for _ in 0..=d {
        scalars.push(acc);
        acc *= alpha;
    }
    let powers_g1 = B::fixed_base_mul(&B::G1::generator(), &scalars);
    let h2 = B::G2::generator();
    Ok(KzgParams { powers_g1, h2, alpha_g2: h2.scale(&alpha), max_degree: d })
}

fn check_degree<B: PairingBackend>(pp: &KzgParams<B>, g: &Polynomial<B::Fr>) -> Result<()> {
    if !g.is_zero() && g.degree() >= pp.max_degree {
        return Err(ArcError::DegreeOverflow { got: g.degree(), limit: pp.max_degree - 1 });
    }
    Ok(())
}

fn commit_raw<B: PairingBackend>(pp: &KzgParams<B>, coeffs: &[B::Fr]) -> B::G1 {
    B::msm(coeffs, &pp.powers_g1[..coeffs.len()]).expect("degree checked")
}

pub fn kzg_commit<B: PairingBackend>(pp: &KzgParams<B>, g: &Polynomial<B::Fr>, r: B::Fr) -> Result<KzgCommitment<B>> {
    check_degree(pp, g)?;
    Ok(KzgCommitment(commit_raw(pp, g.coeffs()) + pp.powers_g1[pp.max_degree].scale(&r)))
}

/// Opening of the commitment to (g, r) at x, where y must equal g(x).
pub fn kzg_prove<B: PairingBackend>(
    pp: &KzgParams<B>,
    g: &Polynomial<B::Fr>,
    r: B::Fr,
    x: B::Fr,
    y: B::Fr,
) -> Result<KzgOpening<B>> {
    check_degree(pp, g)?;
    if g.eval(x) != y {
        return Err(ArcError::NonZeroRemainder);
    }
    let d = pp.max_degree;
    let full = g + &Polynomial::monomial(d, r);
    let q = full.div_linear(x, y + r * x.pow([d as u64]))?;
    Ok(KzgOpening { proof: commit_raw(pp, q.coeffs()), blind: r })
}

pub fn kzg_check<B: PairingBackend>(
    pp: &KzgParams<B>,
    c: &KzgCommitment<B>,
    x: B::Fr,
    y: B::Fr,
    op: &KzgOpening<B>,
) -> bool {
    let y_full = y + op.blind * x.pow([pp.max_degree as u64]);
    let h1 = pp.powers_g1[0];
    let lhs = B::pairing(&op.proof, &(pp.alpha_g2 - pp.h2.scale(&x)));
    let rhs = B::pairing(&(c.0 - h1.scale(&y_full)), &pp.h2);
    lhs == rhs
}
