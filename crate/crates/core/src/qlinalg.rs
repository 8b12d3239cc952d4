//! Exact 2×2 complex linear algebra for a single qubit.
//!
//! Everything here is closed form: eigendecompositions come from the
//! Pauli-vector representation `h = m·I + r (n·σ)` and unitary exponentials
//! from `exp(-iθ n·σ) = cos θ I - i sin θ n·σ`. Units follow the rest of the
//! crate: ħ = 1, so Hamiltonians are expressed in rad/s.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::tolerance::TOLERANCES;

pub type C64 = Complex64;

/// A column 2-vector.
pub type Vec2 = [C64; 2];

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// `⟨u|v⟩`.
pub fn inner(u: &Vec2, v: &Vec2) -> C64 {
    u[0].conj() * v[0] + u[1].conj() * v[1]
}

/// Row-major 2×2 complex matrix.
#[derive(Clone, Copy, PartialEq)]
pub struct ComplexMat2 {
    pub m: [[C64; 2]; 2],
}

impl fmt::Debug for ComplexMat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{}, {}], [{}, {}]]",
            self.m[0][0], self.m[0][1], self.m[1][0], self.m[1][1]
        )
    }
}

impl ComplexMat2 {
    pub const fn new(a00: C64, a01: C64, a10: C64, a11: C64) -> Self {
        Self {
            m: [[a00, a01], [a10, a11]],
        }
    }

    pub const fn real(a00: f64, a01: f64, a10: f64, a11: f64) -> Self {
        Self::new(
            C64::new(a00, 0.0),
            C64::new(a01, 0.0),
            C64::new(a10, 0.0),
            C64::new(a11, 0.0),
        )
    }

    pub const fn zeros() -> Self {
        Self::new(ZERO, ZERO, ZERO, ZERO)
    }

    pub const fn identity() -> Self {
        Self::new(ONE, ZERO, ZERO, ONE)
    }

    pub const fn pauli_x() -> Self {
        Self::real(0.0, 1.0, 1.0, 0.0)
    }

    pub const fn pauli_y() -> Self {
        Self::new(ZERO, C64::new(0.0, -1.0), I, ZERO)
    }

    pub const fn pauli_z() -> Self {
        Self::real(1.0, 0.0, 0.0, -1.0)
    }

    /// `|u⟩⟨v|`.
    pub fn outer(u: &Vec2, v: &Vec2) -> Self {
        Self::new(
            u[0] * v[0].conj(),
            u[0] * v[1].conj(),
            u[1] * v[0].conj(),
            u[1] * v[1].conj(),
        )
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.m;
        Self::new(m[0][0].conj(), m[1][0].conj(), m[0][1].conj(), m[1][1].conj())
    }

    pub fn transpose(&self) -> Self {
        let m = &self.m;
        Self::new(m[0][0], m[1][0], m[0][1], m[1][1])
    }

    pub fn trace(&self) -> C64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn det(&self) -> C64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn scale(&self, s: C64) -> Self {
        let m = &self.m;
        Self::new(m[0][0] * s, m[0][1] * s, m[1][0] * s, m[1][1] * s)
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn apply(&self, v: &Vec2) -> Vec2 {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }

    /// `u · self · u†`.
    pub fn conjugate_by(&self, u: &ComplexMat2) -> Self {
        *u * *self * u.adjoint()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.m
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Max absolute entry of `self - self†`.
    pub fn hermitian_deviation(&self) -> f64 {
        (*self - self.adjoint()).max_abs()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    /// Max absolute entry of `U†U - I`.
    pub fn unitarity_deviation(&self) -> f64 {
        (self.adjoint() * *self - Self::identity()).max_abs()
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_deviation() <= tol
    }

    /// `(self + self†)/2`.
    pub fn hermitian_part(&self) -> Self {
        (*self + self.adjoint()).scale_re(0.5)
    }
}

impl Add for ComplexMat2 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let (a, b) = (&self.m, &o.m);
        Self::new(
            a[0][0] + b[0][0],
            a[0][1] + b[0][1],
            a[1][0] + b[1][0],
            a[1][1] + b[1][1],
        )
    }
}

impl Sub for ComplexMat2 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let (a, b) = (&self.m, &o.m);
        Self::new(
            a[0][0] - b[0][0],
            a[0][1] - b[0][1],
            a[1][0] - b[1][0],
            a[1][1] - b[1][1],
        )
    }
}

impl Neg for ComplexMat2 {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale_re(-1.0)
    }
}

impl Mul for ComplexMat2 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let (a, b) = (&self.m, &o.m);
        Self::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

/// Pauli-vector form `h = mean·I + (hx σx + hy σy + hz σz)` of a Hermitian matrix.
#[derive(Debug, Clone, Copy)]
struct PauliForm {
    mean: f64,
    hx: f64,
    hy: f64,
    hz: f64,
}

impl PauliForm {
    fn of(h: &ComplexMat2) -> Self {
        let a = h.m[0][0].re;
        let d = h.m[1][1].re;
        // symmetrized off-diagonal: h01 = hx - i hy
        let off = (h.m[0][1] + h.m[1][0].conj()) * 0.5;
        Self {
            mean: 0.5 * (a + d),
            hx: off.re,
            hy: -off.im,
            hz: 0.5 * (a - d),
        }
    }

    fn radius(&self) -> f64 {
        (self.hx * self.hx + self.hy * self.hy + self.hz * self.hz).sqrt()
    }
}

fn check_hermitian(h: &ComplexMat2) -> Result<()> {
    let deviation = h.hermitian_deviation();
    let scale = h.max_abs().max(1.0);
    if deviation > TOLERANCES.hermitian * scale {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(())
}

/// Eigendecomposition of a 2×2 Hermitian matrix.
///
/// Eigenvalues are ascending. Each eigenvector is normalised so that its
/// first component with magnitude above `TOLERANCES.phase_zero` is real and
/// positive, which makes amplitudes computed in these bases reproducible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenSystem2 {
    pub e0: f64,
    pub e1: f64,
    pub v0: Vec2,
    pub v1: Vec2,
}

impl EigenSystem2 {
    /// The computational basis with the given (ascending) energies.
    pub fn canonical(e0: f64, e1: f64) -> Self {
        Self {
            e0,
            e1,
            v0: [ONE, ZERO],
            v1: [ZERO, ONE],
        }
    }

    pub fn gap(&self) -> f64 {
        self.e1 - self.e0
    }

    pub fn energy(&self, n: usize) -> f64 {
        match n {
            0 => self.e0,
            _ => self.e1,
        }
    }

    pub fn vector(&self, n: usize) -> &Vec2 {
        match n {
            0 => &self.v0,
            _ => &self.v1,
        }
    }

    pub fn projector(&self, n: usize) -> ComplexMat2 {
        let v = self.vector(n);
        ComplexMat2::outer(v, v)
    }

    /// Matrix elements `⟨v_n|a|v_m⟩`.
    pub fn to_basis(&self, a: &ComplexMat2) -> ComplexMat2 {
        let av0 = a.apply(&self.v0);
        let av1 = a.apply(&self.v1);
        ComplexMat2::new(
            inner(&self.v0, &av0),
            inner(&self.v0, &av1),
            inner(&self.v1, &av0),
            inner(&self.v1, &av1),
        )
    }

    /// Inverse of [`EigenSystem2::to_basis`]: `Σ b_nm |v_n⟩⟨v_m|`.
    pub fn from_basis(&self, b: &ComplexMat2) -> ComplexMat2 {
        let vs = [&self.v0, &self.v1];
        let mut out = ComplexMat2::zeros();
        for (n, vn) in vs.iter().enumerate() {
            for (m, vm) in vs.iter().enumerate() {
                out = out + ComplexMat2::outer(vn, vm).scale(b.m[n][m]);
            }
        }
        out
    }

    /// `Σ e_n |v_n⟩⟨v_n|`.
    pub fn reconstruct(&self) -> ComplexMat2 {
        self.projector(0).scale_re(self.e0) + self.projector(1).scale_re(self.e1)
    }
}

fn fix_phase(v: Vec2) -> Vec2 {
    for c in v {
        let r = c.norm();
        if r > TOLERANCES.phase_zero {
            let phase = c.conj() / r;
            return [v[0] * phase, v[1] * phase];
        }
    }
    v
}

/// Closed-form eigendecomposition of a Hermitian 2×2 matrix.
pub fn herm_eig(h: &ComplexMat2) -> Result<EigenSystem2> {
    check_hermitian(h)?;
    Ok(herm_eig_unchecked(h))
}

pub(crate) fn herm_eig_unchecked(h: &ComplexMat2) -> EigenSystem2 {
    let p = PauliForm::of(h);
    let r = p.radius();
    if r <= TOLERANCES.degeneracy * p.mean.abs().max(1.0) {
        return EigenSystem2::canonical(p.mean - r, p.mean + r);
    }
    let nz = p.hz / r;
    let perp = (p.hx * p.hx + p.hy * p.hy).sqrt();
    // half-angle cosine/sine of the polar angle, each from its stable branch
    let (c, s) = if nz >= 0.0 {
        let c = (0.5 * (1.0 + nz)).sqrt();
        (c, perp / (2.0 * c * r))
    } else {
        let s = (0.5 * (1.0 - nz)).sqrt();
        (perp / (2.0 * s * r), s)
    };
    // e^{iφ} = (hx + i hy)/|h_perp|
    let phase = if perp > 0.0 {
        C64::new(p.hx / perp, p.hy / perp)
    } else {
        ONE
    };
    let v1 = [C64::new(c, 0.0), phase * s];
    let v0 = [-phase.conj() * s, C64::new(c, 0.0)];
    EigenSystem2 {
        e0: p.mean - r,
        e1: p.mean + r,
        v0: fix_phase(v0),
        v1: fix_phase(v1),
    }
}

/// `exp(-i h dt)` with ħ = 1.
pub fn unitary_exp(h: &ComplexMat2, dt: f64) -> ComplexMat2 {
    let p = PauliForm::of(h);
    let r = p.radius();
    let theta = r * dt;
    let cos = theta.cos();
    // sin(r dt)/r, finite as r → 0
    let sinc_dt = if theta.abs() < 1e-8 {
        dt * (1.0 - theta * theta / 6.0)
    } else {
        theta.sin() / r
    };
    // -i sinc_dt (h - mean I)
    let k = C64::new(0.0, -sinc_dt);
    let traceless = ComplexMat2::new(
        C64::new(p.hz, 0.0),
        C64::new(p.hx, -p.hy),
        C64::new(p.hx, p.hy),
        C64::new(-p.hz, 0.0),
    );
    let u = ComplexMat2::identity().scale_re(cos) + traceless.scale(k);
    if p.mean == 0.0 {
        u
    } else {
        let phi = -p.mean * dt;
        u.scale(C64::new(phi.cos(), phi.sin()))
    }
}

/// A qubit density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Copy, PartialEq)]
pub struct DensityMatrix(ComplexMat2);

impl fmt::Debug for DensityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DensityMatrix({:?})", self.0)
    }
}

impl DensityMatrix {
    /// Validates `m` and stores its Hermitian part.
    pub fn new(m: ComplexMat2) -> Result<Self> {
        let deviation = m.hermitian_deviation();
        if deviation > TOLERANCES.hermitian {
            return Err(Error::NotHermitian { deviation });
        }
        let m = m.hermitian_part();
        let tr = m.trace();
        if (tr.re - 1.0).abs() > TOLERANCES.trace {
            return domain(format!("density matrix trace {} differs from 1", tr.re));
        }
        let ev = eigenvalues(&m);
        if ev[0] < TOLERANCES.eigenvalue_floor {
            return domain(format!("density matrix has negative eigenvalue {:e}", ev[0]));
        }
        Ok(Self(m))
    }

    pub fn maximally_mixed() -> Self {
        Self(ComplexMat2::identity().scale_re(0.5))
    }

    /// Pure state `|ψ⟩⟨ψ|`; `psi` is normalised first.
    pub fn pure(psi: &Vec2) -> Result<Self> {
        let norm = inner(psi, psi).re.sqrt();
        if !(norm > 0.0) {
            return domain("cannot build a pure state from the zero vector");
        }
        let v = [psi[0] / norm, psi[1] / norm];
        Self::new(ComplexMat2::outer(&v, &v))
    }

    pub fn matrix(&self) -> &ComplexMat2 {
        &self.0
    }

    /// `U ρ U†`. Unitarity of `u` is the caller's responsibility.
    pub fn evolve(&self, u: &ComplexMat2) -> Result<Self> {
        Self::new(self.0.conjugate_by(u))
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> [f64; 2] {
        eigenvalues(&self.0)
    }

    /// `Tr[a ρ]`.
    pub fn expectation(&self, a: &ComplexMat2) -> C64 {
        (*a * self.0).trace()
    }
}

/// Ascending eigenvalues of a Hermitian matrix (Hermitian part is used).
pub fn eigenvalues(m: &ComplexMat2) -> [f64; 2] {
    let p = PauliForm::of(m);
    let r = p.radius();
    [p.mean - r, p.mean + r]
}

/// Bloch vector of a state, expressed in an energy eigenbasis.
///
/// `rz = p(v1) - p(v0)`, so Gibbs states have `rz < 0`; `rx - i ry` is twice
/// the element `⟨v1|ρ|v0⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub rx: f64,
    pub ry: f64,
    pub rz: f64,
}

impl BlochVector {
    pub fn norm(&self) -> f64 {
        (self.rx * self.rx + self.ry * self.ry + self.rz * self.rz).sqrt()
    }
}

pub fn bloch_from_rho(rho: &DensityMatrix, basis: &EigenSystem2) -> BlochVector {
    let b = basis.to_basis(rho.matrix());
    let rho10 = b.m[1][0];
    BlochVector {
        rx: 2.0 * rho10.re,
        ry: -2.0 * rho10.im,
        rz: b.m[1][1].re - b.m[0][0].re,
    }
}

pub fn rho_from_bloch(r: &BlochVector, basis: &EigenSystem2) -> Result<DensityMatrix> {
    let norm = r.norm();
    if norm > 1.0 + TOLERANCES.bloch_norm {
        return domain(format!("Bloch vector length {norm} exceeds 1"));
    }
    let rho10 = C64::new(0.5 * r.rx, -0.5 * r.ry);
    let b = ComplexMat2::new(
        C64::new(0.5 * (1.0 - r.rz), 0.0),
        rho10.conj(),
        rho10,
        C64::new(0.5 * (1.0 + r.rz), 0.0),
    );
    DensityMatrix::new(basis.from_basis(&b))
}

/// `½ Tr|ρ - σ|`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> f64 {
    let [a, b] = eigenvalues(&(*rho.matrix() - *sigma.matrix()));
    0.5 * (a.abs() + b.abs())
}

/// `-λ ln λ` with the log argument floored and `0 ln 0 = 0`.
pub(crate) fn xlnx_neg(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        0.0
    } else {
        -lambda * lambda.max(TOLERANCES.log_floor).ln()
    }
}

/// Von Neumann entropy in nats.
pub fn vn_entropy(rho: &DensityMatrix) -> f64 {
    rho.eigenvalues().into_iter().map(xlnx_neg).sum()
}
