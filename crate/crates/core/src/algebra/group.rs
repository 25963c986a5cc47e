//! Bilinear groups. `PairingBackend` hides whether we run on BLS12-377 or on
//! the transparent mock where every group is the scalar field itself.

use std::fmt::Debug;
use std::marker::PhantomData;
use std::ops::{Add, Neg, Sub};

use ark_ec::pairing::Pairing;
use ark_ec::scalar_mul::ScalarMul;
use ark_ec::short_weierstrass::Affine;
use ark_ec::{AffineRepr, CurveGroup, PrimeGroup, VariableBaseMSM};
use ark_ff::{PrimeField, Zero};
use ark_serialize::{CanonicalDeserialize, CanonicalSerialize};
use sha2::{Digest, Sha256};

use super::field;
use crate::error::{ArcError, Result};

/// An additive prime-order group with scalars `S`.
pub trait GroupElem<S: PrimeField>:
    Copy + Clone + Debug + PartialEq + Eq + Send + Sync + 'static + Add<Output = Self> + Sub<Output = Self> + Neg<Output = Self>
{
    fn identity() -> Self;
    fn generator() -> Self;
    fn scale(&self, s: &S) -> Self;
    fn is_identity(&self) -> bool {
        *self == Self::identity()
    }
    /// Compressed, big-endian encoding of fixed width.
    fn to_bytes(&self) -> Vec<u8>;
    fn from_bytes(b: &[u8]) -> Result<Self>;
    fn byte_len() -> usize;
}

pub trait PairingBackend: 'static + Copy + Clone + Debug + Default + PartialEq + Eq + Send + Sync {
    type Fr: PrimeField;
    /// G1 elements can be secret-shared for distributed commitments.
    type G1: GroupElem<Self::Fr> + crate::mpc::ShareValue;
    type G2: GroupElem<Self::Fr>;
    type Gt: Clone + Debug + PartialEq + Eq;

    fn name() -> &'static str;

    fn pairing(a: &Self::G1, b: &Self::G2) -> Self::Gt;

    /// Deterministic point with unknown discrete log (mock: a small multiple
    /// of the generator, see [`MockBackend`]).
    fn hash_to_g1(tag: &[u8], index: u64) -> Self::G1;

    fn msm(scalars: &[Self::Fr], points: &[Self::G1]) -> Result<Self::G1> {
        if scalars.len() != points.len() {
            return Err(ArcError::LengthMismatch { expected: points.len(), got: scalars.len() });
        }
        Ok(scalars.iter().zip(points).fold(Self::G1::identity(), |acc, (s, p)| acc + p.scale(s)))
    }

    /// `[s_i * g]` for a fixed base.
    fn fixed_base_mul(g: &Self::G1, scalars: &[Self::Fr]) -> Vec<Self::G1> {
        scalars.iter().map(|s| g.scale(s)).collect()
    }
}

/// Group element of the mock backend: the discrete log itself.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MockElem<F: PrimeField>(pub F);

impl<F: PrimeField> Add for MockElem<F> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        MockElem(self.0 + o.0)
    }
}

impl<F: PrimeField> Sub for MockElem<F> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        MockElem(self.0 - o.0)
    }
}

impl<F: PrimeField> Neg for MockElem<F> {
    type Output = Self;
    fn neg(self) -> Self {
        MockElem(-self.0)
    }
}

impl<F: PrimeField> GroupElem<F> for MockElem<F> {
    fn identity() -> Self {
        MockElem(F::zero())
    }
    fn generator() -> Self {
        MockElem(F::one())
    }
    fn scale(&self, s: &F) -> Self {
        MockElem(self.0 * s)
    }
    fn to_bytes(&self) -> Vec<u8> {
        field::to_bytes(&self.0)
    }
    fn from_bytes(b: &[u8]) -> Result<Self> {
        field::from_bytes(b).map(MockElem)
    }
    fn byte_len() -> usize {
        field::byte_len::<F>()
    }
}

/// Insecure but bilinear: G1 = G2 = GT = F and e(a, b) = a * b.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MockBackend<F: PrimeField>(PhantomData<F>);

impl<F: PrimeField> PairingBackend for MockBackend<F> {
    type Fr = F;
    type G1 = MockElem<F>;
    type G2 = MockElem<F>;
    type Gt = MockElem<F>;

    fn name() -> &'static str {
        "mock"
    }

    fn pairing(a: &MockElem<F>, b: &MockElem<F>) -> MockElem<F> {
        MockElem(a.0 * b.0)
    }

    /// `(index + 2) * g`; the logs are public, which is the point of the mock.
    fn hash_to_g1(_tag: &[u8], index: u64) -> MockElem<F> {
        MockElem(F::from(index) + F::from(2u64))
    }
}

fn ser_be<T: CanonicalSerialize>(t: &T) -> Vec<u8> {
    let mut v = Vec::with_capacity(t.compressed_size());
    t.serialize_compressed(&mut v).expect("serialize into vec");
    v.reverse();
    v
}

fn de_be<T: CanonicalDeserialize>(b: &[u8]) -> Result<T> {
    let mut v = b.to_vec();
    v.reverse();
    T::deserialize_compressed(&v[..]).map_err(|e| ArcError::Malformed(e.to_string()))
}

macro_rules! curve_group {
    ($name:ident, $proj:ty, $aff:ty) => {
        #[derive(Clone, Copy, Debug, PartialEq, Eq)]
        pub struct $name(pub $proj);

        impl Add for $name {
            type Output = Self;
            fn add(self, o: Self) -> Self {
                $name(self.0 + o.0)
            }
        }

        impl Sub for $name {
            type Output = Self;
            fn sub(self, o: Self) -> Self {
                $name(self.0 - o.0)
            }
        }

        impl Neg for $name {
            type Output = Self;
            fn neg(self) -> Self {
                $name(-self.0)
            }
        }

        impl GroupElem<ark_bls12_377::Fr> for $name {
            fn identity() -> Self {
                $name(<$proj>::zero())
            }
            fn generator() -> Self {
                $name(<$proj as PrimeGroup>::generator())
            }
            fn scale(&self, s: &ark_bls12_377::Fr) -> Self {
                $name(self.0 * s)
            }
            fn to_bytes(&self) -> Vec<u8> {
                ser_be(&self.0.into_affine())
            }
            fn from_bytes(b: &[u8]) -> Result<Self> {
                if b.len() != Self::byte_len() {
                    return Err(ArcError::Malformed("bad point length".into()));
                }
                de_be::<$aff>(b).map(|a| $name(a.into()))
            }
            fn byte_len() -> usize {
                <$aff>::generator().compressed_size()
            }
        }
    };
}

curve_group!(G1Curve, ark_bls12_377::G1Projective, ark_bls12_377::G1Affine);
curve_group!(G2Curve, ark_bls12_377::G2Projective, ark_bls12_377::G2Affine);

/// BLS12-377 via arkworks.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Bls377;

impl PairingBackend for Bls377 {
    type Fr = ark_bls12_377::Fr;
    type G1 = G1Curve;
    type G2 = G2Curve;
    type Gt = ark_ec::pairing::PairingOutput<ark_bls12_377::Bls12_377>;

    fn name() -> &'static str {
        "curve"
    }

    fn pairing(a: &G1Curve, b: &G2Curve) -> Self::Gt {
        ark_bls12_377::Bls12_377::pairing(a.0, b.0)
    }

    /// Try-and-increment on sha256(tag || index || ctr), then cofactor clearing.
    fn hash_to_g1(tag: &[u8], index: u64) -> G1Curve {
        let mut ctr = 0u32;
        loop {
            let mut h = Sha256::new();
            h.update(tag);
            h.update(index.to_be_bytes());
            h.update(ctr.to_be_bytes());
            let d1 = h.finalize();
            let d2 = Sha256::digest(d1);
            let mut wide = d1.to_vec();
            wide.extend_from_slice(&d2);
            let x = ark_bls12_377::Fq::from_be_bytes_mod_order(&wide);
            let greatest = d2[0] & 1 == 1;
            if let Some(p) = Affine::<ark_bls12_377::g1::Config>::get_point_from_x_unchecked(x, greatest) {
                let q = p.clear_cofactor();
                if !q.is_zero() {
                    return G1Curve(q.into());
                }
            }
            ctr += 1;
        }
    }

    fn msm(scalars: &[Self::Fr], points: &[G1Curve]) -> Result<G1Curve> {
        if scalars.len() != points.len() {
            return Err(ArcError::LengthMismatch { expected: points.len(), got: scalars.len() });
        }
        let proj: Vec<_> = points.iter().map(|p| p.0).collect();
        let bases = ark_bls12_377::G1Projective::normalize_batch(&proj);
        Ok(G1Curve(ark_bls12_377::G1Projective::msm(&bases, scalars).expect("lengths checked")))
    }

    fn fixed_base_mul(g: &G1Curve, scalars: &[Self::Fr]) -> Vec<G1Curve> {
        g.0.batch_mul(scalars).into_iter().map(|a| G1Curve(a.into())).collect()
    }
}
