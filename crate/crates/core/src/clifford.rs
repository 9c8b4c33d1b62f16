//! Gamma matrices of Cl(1,3) and the reflection/rotation reading of their products.
//!
//! Each γ_n is treated as the spinor action of a reflection R̂_n. Products of
//! two spatial reflections are rotations by π about the remaining axis, and
//! the spinor representation only closes after a 4π turn: (γ_2γ_3)² = −I,
//! (γ_2γ_3)⁴ = +I. Everything here is dense 4×4 complex linear algebra; the
//! identities are checked numerically, not symbolically.

use std::fmt;
use std::str::FromStr;

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

pub type Matrix4c = Matrix4<Complex64>;

/// Tolerance for identities between exactly representable integer matrices.
pub const EXACT_TOL: f64 = 1e-14;
/// Tolerance for floating products and derived quantities.
pub const DERIVED_TOL: f64 = 1e-12;

/// Minkowski signature (+,−,−,−).
pub const SIGNATURE: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    /// Dirac–Pauli form, γ₀ = diag(1, 1, −1, −1).
    Standard,
    /// Weyl form, γ₀ off-diagonal.
    Chiral,
}

impl Representation {
    pub const ALL: [Representation; 2] = [Representation::Standard, Representation::Chiral];

    pub fn name(self) -> &'static str {
        match self {
            Representation::Standard => "standard",
            Representation::Chiral => "chiral",
        }
    }
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Representation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "standard" | "dirac" | "dirac-pauli" => Ok(Representation::Standard),
            "chiral" | "weyl" => Ok(Representation::Chiral),
            _ => Err(Error::UnsupportedRepresentation(s.to_string())),
        }
    }
}

fn pauli(k: usize) -> [[Complex64; 2]; 2] {
    match k {
        1 => [[ZERO, ONE], [ONE, ZERO]],
        2 => [[ZERO, -I], [I, ZERO]],
        3 => [[ONE, ZERO], [ZERO, -ONE]],
        _ => [[ONE, ZERO], [ZERO, ONE]],
    }
}

/// Assemble a 4×4 matrix from 2×2 blocks `[[a, b], [c, d]]`.
fn from_blocks(blocks: [[[[Complex64; 2]; 2]; 2]; 2]) -> Matrix4c {
    Matrix4c::from_fn(|row, col| blocks[row / 2][col / 2][row % 2][col % 2])
}

fn scale2(m: [[Complex64; 2]; 2], s: f64) -> [[Complex64; 2]; 2] {
    [[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]]
}

/// Largest entrywise modulus of `a − b`.
pub fn max_abs_diff(a: &Matrix4c, b: &Matrix4c) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn check_index(index: usize) -> Result<()> {
    if index < 4 {
        Ok(())
    } else {
        Err(Error::IndexOutOfRange { index, bound: 4 })
    }
}

/// The four gamma matrices in one representation.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaSet {
    gamma: [Matrix4c; 4],
    representation: Representation,
    from_standard: Matrix4c,
}

impl GammaSet {
    pub fn new(representation: Representation) -> Self {
        let zero = [[ZERO; 2]; 2];
        let id = pauli(0);
        let spatial = |k: usize| from_blocks([[zero, pauli(k)], [scale2(pauli(k), -1.0), zero]]);
        let gamma0 = match representation {
            Representation::Standard => from_blocks([[id, zero], [zero, scale2(id, -1.0)]]),
            Representation::Chiral => from_blocks([[zero, id], [id, zero]]),
        };
        let gamma = [gamma0, spatial(1), spatial(2), spatial(3)];
        let mut set = GammaSet {
            gamma,
            representation,
            from_standard: Matrix4c::identity(),
        };
        if representation != Representation::Standard {
            let standard = GammaSet::new(Representation::Standard);
            set.from_standard = intertwiner(&standard, &set)
                .expect("both representations generate the same Clifford algebra");
        }
        set
    }

    pub fn representation(&self) -> Representation {
        self.representation
    }

    /// γ_index; panics on an index ≥ 4 (use [`GammaSet::get`] for checked access).
    pub fn gamma(&self, index: usize) -> &Matrix4c {
        &self.gamma[index]
    }

    pub fn get(&self, index: usize) -> Result<&Matrix4c> {
        check_index(index)?;
        Ok(&self.gamma[index])
    }

    pub fn matrices(&self) -> &[Matrix4c; 4] {
        &self.gamma
    }

    /// Unitary S with γ_this = S γ_standard S⁻¹. Maps standard-basis spinors into this basis.
    pub fn from_standard(&self) -> &Matrix4c {
        &self.from_standard
    }

    /// R̂_axis as a spinor map.
    pub fn reflection(&self, axis: usize) -> Result<SpinorMap> {
        Ok(SpinorMap {
            matrix: *self.get(axis)?,
            kind: MapKind::Reflection(axis),
        })
    }

    /// The 16 ordered products γ₀^a₀ γ₁^a₁ γ₂^a₂ γ₃^a₃, a_i ∈ {0, 1}.
    pub fn basis_products(&self) -> Vec<Matrix4c> {
        (0..16u32)
            .map(|mask| {
                (0..4).fold(Matrix4c::identity(), |acc, l| {
                    if mask & (1 << l) != 0 {
                        acc * self.gamma[l]
                    } else {
                        acc
                    }
                })
            })
            .collect()
    }
}

/// Build a gamma set from a representation name.
pub fn build_gamma_set(name: &str) -> Result<GammaSet> {
    Ok(GammaSet::new(name.parse()?))
}

/// Constructive similarity transform between two gamma sets.
///
/// Averages X over the algebra basis, S = Σ_A Γ'_A X Γ_A⁻¹, which satisfies
/// γ'_l S = S γ_l for any seed X. The first elementary seed giving a
/// nonsingular S is used, and S is rescaled to be unitary.
pub fn intertwiner(from: &GammaSet, to: &GammaSet) -> Option<Matrix4c> {
    let source = from.basis_products();
    let target = to.basis_products();
    for seed in 0..16 {
        let mut x = Matrix4c::zeros();
        x[(seed / 4, seed % 4)] = ONE;
        let mut s = Matrix4c::zeros();
        for (a, b) in source.iter().zip(&target) {
            let inv = a.try_inverse()?;
            s += b * x * inv;
        }
        let gram = s.adjoint() * s;
        let scale = gram[(0, 0)].re;
        if scale > 1e-6 {
            return Some(s / Complex64::new(scale.sqrt(), 0.0));
        }
    }
    None
}

/// γ_l γ_n + γ_n γ_l.
pub fn anticommutator(g: &GammaSet, l: usize, n: usize) -> Result<Matrix4c> {
    let a = g.get(l)?;
    let b = g.get(n)?;
    Ok(a * b + b * a)
}

/// Expected anticommutator 2 η_ln I.
pub fn anticommutator_expected(l: usize, n: usize) -> Matrix4c {
    if l == n {
        Matrix4c::identity() * Complex64::new(2.0 * SIGNATURE[l], 0.0)
    } else {
        Matrix4c::zeros()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "axis")]
pub enum MapKind {
    Reflection(usize),
    Rotation(usize),
    Glide(usize),
    Other,
}

/// A 4×4 spinor matrix with its geometric reading.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorMap {
    pub matrix: Matrix4c,
    pub kind: MapKind,
}

impl SpinorMap {
    pub fn compose(&self, other: &SpinorMap) -> SpinorMap {
        SpinorMap {
            matrix: self.matrix * other.matrix,
            kind: MapKind::Other,
        }
    }

    pub fn power(&self, k: u32) -> Matrix4c {
        matrix_power(&self.matrix, k)
    }
}

pub fn matrix_power(m: &Matrix4c, k: u32) -> Matrix4c {
    (0..k).fold(Matrix4c::identity(), |acc, _| acc * m)
}

/// Rotation by π about a spatial axis as the product of the two other reflections.
///
/// axis = 1 gives γ₂γ₃, axis = 2 gives γ₁γ₃, axis = 3 gives γ₁γ₂.
pub fn rotation_from_reflections(g: &GammaSet, axis: usize) -> Result<SpinorMap> {
    check_index(axis)?;
    if axis == 0 {
        return Err(Error::TimeAxisRotation);
    }
    let (a, b) = match axis {
        1 => (2, 3),
        2 => (1, 3),
        _ => (1, 2),
    };
    Ok(SpinorMap {
        matrix: g.gamma[a] * g.gamma[b],
        kind: MapKind::Rotation(axis),
    })
}

/// The pair of reflection indices composing the rotation about `axis`.
pub fn rotation_factors(axis: usize) -> Option<(usize, usize)> {
    match axis {
        1 => Some((2, 3)),
        2 => Some((1, 3)),
        3 => Some((1, 2)),
        _ => None,
    }
}

/// Smallest k ≤ max_k with mᵏ = I (entrywise to [`DERIVED_TOL`]).
pub fn periodicity_order(m: &Matrix4c, max_k: u32) -> Option<u32> {
    let id = Matrix4c::identity();
    let mut power = Matrix4c::identity();
    for k in 1..=max_k {
        power *= m;
        if max_abs_diff(&power, &id) < DERIVED_TOL {
            return Some(k);
        }
    }
    None
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl IdentityCheck {
    fn new(name: impl Into<String>, max_deviation: f64, tolerance: f64) -> Self {
        IdentityCheck {
            name: name.into(),
            max_deviation,
            tolerance,
            passed: max_deviation < tolerance,
        }
    }

    fn flag(name: impl Into<String>, ok: bool) -> Self {
        IdentityCheck {
            name: name.into(),
            max_deviation: if ok { 0.0 } else { 1.0 },
            tolerance: 0.5,
            passed: ok,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AlgebraReport {
    pub representation: Representation,
    pub checks: Vec<IdentityCheck>,
    pub all_passed: bool,
}

/// Run the full identity suite on one representation.
pub fn verify_identities(g: &GammaSet) -> AlgebraReport {
    let mut checks = Vec::new();
    let id = Matrix4c::identity();
    let minus_id = -id;

    for l in 0..4 {
        for n in l..4 {
            let anti = anticommutator(g, l, n).expect("indices in range");
            let dev = max_abs_diff(&anti, &anticommutator_expected(l, n));
            checks.push(IdentityCheck::new(
                format!("{{gamma{l}, gamma{n}}} = 2 eta_{l}{n} I"),
                dev,
                EXACT_TOL,
            ));
        }
    }

    for l in 0..4 {
        let det = g.gamma[l].determinant().norm();
        checks.push(IdentityCheck::flag(
            format!("gamma{l} invertible"),
            det > 0.5,
        ));
    }

    for l in 0..4 {
        let expected = if l == 0 { 2 } else { 4 };
        let order = periodicity_order(&g.gamma[l], 8);
        checks.push(IdentityCheck::flag(
            format!("order(gamma{l}) = {expected}"),
            order == Some(expected),
        ));
    }

    for axis in 1..4 {
        let rot = rotation_from_reflections(g, axis).expect("spatial axis");
        let (a, b) = rotation_factors(axis).expect("spatial axis");
        checks.push(IdentityCheck::new(
            format!("(gamma{a} gamma{b})^2 = -I"),
            max_abs_diff(&rot.power(2), &minus_id),
            DERIVED_TOL,
        ));
        checks.push(IdentityCheck::new(
            format!("(gamma{a} gamma{b})^4 = I"),
            max_abs_diff(&rot.power(4), &id),
            DERIVED_TOL,
        ));
        let m = &rot.matrix;
        let ga = &g.gamma[axis];
        checks.push(IdentityCheck::new(
            format!("[gamma{a} gamma{b}, gamma{axis}] = 0"),
            max_abs_diff(&(m * ga), &(ga * m)),
            DERIVED_TOL,
        ));
        for f in [a, b] {
            let gf = &g.gamma[f];
            checks.push(IdentityCheck::new(
                format!("{{gamma{a} gamma{b}, gamma{f}}} = 0"),
                max_abs_diff(&(m * gf), &(-(gf * m))),
                DERIVED_TOL,
            ));
        }
    }

    let standard = GammaSet::new(Representation::Standard);
    let s = g.from_standard();
    let s_inv = s.try_inverse();
    let dev = match s_inv {
        Some(inv) => (0..4)
            .map(|l| max_abs_diff(&(s * standard.gamma[l] * inv), &g.gamma[l]))
            .fold(0.0, f64::max),
        None => f64::INFINITY,
    };
    checks.push(IdentityCheck::new(
        "S gamma_standard S^-1 = gamma",
        dev,
        DERIVED_TOL,
    ));

    let all_passed = checks.iter().all(|c| c.passed);
    AlgebraReport {
        representation: g.representation,
        checks,
        all_passed,
    }
}
