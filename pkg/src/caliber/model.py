"""Flat-model constructors: the quaternionic cone, its unit-sphere link frame,
and the linear twistor model, each with its catalog of distinguished forms.

Conventions
-----------
Cone R^{4(n+1)}: coordinates are literal quaternion components per block,
h_j = x_{j0} + x_{j1} i + x_{j2} j + x_{j3} k, and the complex structures
I_1, I_2, I_3 act by left multiplication by i, j, k.  The standard basis
order is positively oriented.

Twistor model R^{4n+2} = H^n + C: basis (e_{10}, ..., e_{n3}, f_2, f_3); the
H^n block carries the same numerical Kahler-triple patterns (beta_1, beta_2,
beta_3), which there arise from right quaternion multiplication, so the
left-acting quaternionic unitary group and the circle h -> h lambda^{-1},
z -> lambda^{-2} z act as isometries of the structure.

Link frame at a unit point x: tangent space x-perp with orthonormal basis
(A_1, A_2, A_3, then the quaternionic complement in quaternionic order),
A_p = I_p x.  All catalog forms are expressed in these frame indices; the
frame at the default base point is integral, so that catalog is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from caliber import _quat
from caliber.calib import Plane
from caliber.exterior import AltForm, ComplexAltForm, pullback, wedge

__all__ = [
    "HKModel",
    "LinkFrame",
    "TwistorModel",
    "build_hyperkahler_cone",
    "build_link_frame",
    "default_link_frame",
    "build_twistor_model",
    "make_V_theta",
    "make_W_theta",
    "make_squashed_associative",
    "standard_triple_matrices",
    "standard_kahler_forms",
    "random_sp_cone_isometry",
    "random_sp_u1_element",
    "sp_u1_matrix",
    "random_unitary_pair_element",
]


# ---------------------------------------------------------------------------
# standard quaternionic patterns

_I1_BLOCK = np.array([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]])
_I2_BLOCK = np.array([[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]])
_I3_BLOCK = np.array([[0, 0, 0, -1], [0, 0, -1, 0], [0, 1, 0, 0], [1, 0, 0, 0]])


def standard_triple_matrices(blocks: int, dim: int | None = None, offset: int = 0):
    """The three anticommuting complex-structure matrices built from 4x4
    quaternion blocks, embedded at `offset` in an ambient dimension."""
    n = dim if dim is not None else 4 * blocks
    out = []
    for B in (_I1_BLOCK, _I2_BLOCK, _I3_BLOCK):
        M = np.zeros((n, n), dtype=int)
        for j in range(blocks):
            s = offset + 4 * j
            M[s : s + 4, s : s + 4] = B
        out.append(M)
    return tuple(out)


def standard_kahler_forms(blocks: int, dim: int | None = None, offset: int = 0):
    """Exact Kahler 2-forms of the standard triple: for each block,
    beta_1 = e01 + e23, beta_2 = e02 - e13, beta_3 = e03 + e12."""
    n = dim if dim is not None else 4 * blocks
    b1, b2, b3 = {}, {}, {}
    for j in range(blocks):
        s = offset + 4 * j
        b1[(s, s + 1)] = 1
        b1[(s + 2, s + 3)] = 1
        b2[(s, s + 2)] = 1
        b2[(s + 1, s + 3)] = -1
        b3[(s, s + 3)] = 1
        b3[(s + 1, s + 2)] = 1
    return AltForm(n, 2, b1), AltForm(n, 2, b2), AltForm(n, 2, b3)


def _wedge_power(f, p: int):
    if p == 0:
        if isinstance(f, ComplexAltForm):
            return ComplexAltForm(AltForm.constant(f.dim, 1), AltForm.zero(f.dim, 0))
        return AltForm.constant(f.dim, 1)
    out = f
    for _ in range(p - 1):
        out = wedge(out, f)
    return out


def _factorial_inv(k: int) -> Fraction:
    return Fraction(1, math.factorial(k))


# ---------------------------------------------------------------------------
# hyperkahler cone


@dataclass(frozen=True)
class HKModel:
    """The flat quaternionic cone R^{4n+4} with its full form catalog."""

    n: int
    dim: int
    I1: np.ndarray
    I2: np.ndarray
    I3: np.ndarray
    catalog: dict = field(repr=False)

    @property
    def complex_structures(self):
        return (self.I1, self.I2, self.I3)

    def form(self, name: str):
        return self.catalog[name]


def _cone_catalog(n: int) -> dict:
    dim = 4 * (n + 1)
    w1, w2, w3 = standard_kahler_forms(n + 1, dim)
    zero2 = AltForm.zero(dim, 2)
    sigma = {
        1: ComplexAltForm(w2, w3),
        2: ComplexAltForm(w3, w1),
        3: ComplexAltForm(w1, w2),
    }
    cat: dict = {"omega1": w1, "omega2": w2, "omega3": w3}
    for p in (1, 2, 3):
        cat[f"sigma{p}"] = sigma[p]
        ups = _wedge_power(sigma[p], n + 1) * _factorial_inv(n + 1)
        cat[f"upsilon{p}"] = ups
        cat[f"re_upsilon{p}"] = ups.re
        cat[f"im_upsilon{p}"] = ups.im
    for label, p in (("I", 1), ("J", 2), ("K", 3)):
        for k in range(1, n + 2):
            theta = (_wedge_power(sigma[p], k) * _factorial_inv(k)).re
            cat[f"theta_{label}{2 * k}"] = theta
    sq = {p: _wedge_power(cat[f"omega{p}"], 2) for p in (1, 2, 3)}
    half = Fraction(1, 2)
    cat["Phi1"] = (sq[1] * -1 + sq[2] + sq[3]) * half
    cat["Phi2"] = (sq[1] - sq[2] + sq[3]) * half
    cat["Phi3"] = (sq[1] + sq[2] - sq[3]) * half
    cat["Lambda"] = (sq[1] + sq[2] + sq[3]) * Fraction(1, 6)
    cat["vol"] = AltForm.blade(dim, tuple(range(dim)))
    return cat


@lru_cache(maxsize=None)
def build_hyperkahler_cone(n: int) -> HKModel:
    """Flat hyperkahler cone model for quaternionic link dimension n (1..3)."""
    if not 1 <= n <= 3:
        raise ValueError(f"n must be in 1..3, got {n}")
    dim = 4 * (n + 1)
    I1, I2, I3 = standard_triple_matrices(n + 1)
    return HKModel(n, dim, I1, I2, I3, _cone_catalog(n))


# ---------------------------------------------------------------------------
# link frame


@dataclass(frozen=True)
class LinkFrame:
    """Structure tensors of the unit-sphere link at a point, in an adapted
    orthonormal frame of the tangent space.

    Frame indices: 0, 1, 2 are the Reeb directions A_1, A_2, A_3; indices
    3 .. 4n+2 run through the horizontal space in quaternionic order.
    """

    n: int
    dim: int
    base_point: np.ndarray
    frame: np.ndarray  # (4n+4, 4n+3) columns: A1, A2, A3, horizontal blocks
    reeb: tuple
    J1: np.ndarray
    J2: np.ndarray
    J3: np.ndarray
    catalog: dict = field(repr=False)

    vertical_indices: tuple = (0, 1, 2)

    @property
    def horizontal_indices(self) -> tuple:
        return tuple(range(3, self.dim))

    @property
    def transverse_structures(self):
        return (self.J1, self.J2, self.J3)

    def form(self, name: str):
        return self.catalog[name]

    def submersion_to_twistor(self) -> np.ndarray:
        """The linear model of the circle projection along A_1: a
        (4n+2) x (4n+3) matrix sending (A_2, A_3) to (f_2, f_3) and the
        horizontal block to H^n, killing A_1."""
        m = np.zeros((self.dim - 1, self.dim))
        m[: self.dim - 3, 3:] = np.eye(self.dim - 3)
        m[self.dim - 3, 1] = 1.0
        m[self.dim - 2, 2] = 1.0
        return m


def _exactify(M: np.ndarray):
    R = np.rint(M)
    if np.max(np.abs(M - R)) < 1e-12:
        return R.astype(int)
    return None


def _link_catalog(n: int, frame, cone: HKModel) -> dict:
    dim = 4 * n + 3
    alpha = {p: AltForm.blade(dim, [p - 1]) for p in (1, 2, 3)}
    Omega = {p: pullback(cone.form(f"omega{p}"), frame) for p in (1, 2, 3)}
    kappa = {
        1: Omega[1] - wedge(alpha[2], alpha[3]),
        2: Omega[2] - wedge(alpha[3], alpha[1]),
        3: Omega[3] - wedge(alpha[1], alpha[2]),
    }
    cat: dict = {}
    for p in (1, 2, 3):
        cat[f"alpha{p}"] = alpha[p]
        cat[f"Omega{p}"] = Omega[p]
        cat[f"kappa{p}"] = kappa[p]

    pairs = {1: (2, 3), 2: (3, 1), 3: (1, 2)}
    for p, (q, r) in pairs.items():
        tau = ComplexAltForm(alpha[q], alpha[r])
        sig = ComplexAltForm(Omega[q], Omega[r])
        psi = wedge(tau, _wedge_power(sig, n)) * _factorial_inv(n)
        cat[f"psi{p}"] = psi
        cat[f"re_psi{p}"] = psi.re
        cat[f"im_psi{p}"] = psi.im
        gamma = wedge(ComplexAltForm(alpha[q], -alpha[r]), ComplexAltForm(kappa[q], kappa[r]))
        cat[f"gamma{p}"] = gamma
        cat[f"re_gamma{p}"] = gamma.re
        cat[f"im_gamma{p}"] = gamma.im
        cat[f"xi{p}"] = wedge(kappa[q], kappa[q]) + wedge(kappa[r], kappa[r])

    aO = {p: wedge(alpha[p], Omega[p]) for p in (1, 2, 3)}
    cat["phi1"] = aO[1] * -1 + aO[2] + aO[3]
    cat["phi2"] = aO[1] - aO[2] + aO[3]
    cat["phi3"] = aO[1] + aO[2] - aO[3]

    for label, p in (("I", 1), ("J", 2), ("K", 3)):
        q, r = pairs[p]
        tau = ComplexAltForm(alpha[q], alpha[r])
        sig = ComplexAltForm(Omega[q], Omega[r])
        for k in range(1, n + 2):
            theta = (wedge(tau, _wedge_power(sig, k - 1)) * _factorial_inv(k - 1)).re
            cat[f"theta_{label}{2 * k - 1}"] = theta

    cat["omega1_tilde"] = kappa[1] * 2 - wedge(alpha[2], alpha[3])
    cat["vol"] = AltForm.blade(dim, tuple(range(dim)))
    return cat


def build_link_frame(n: int, x=None) -> LinkFrame:
    """Adapted link frame at a unit base point of the cone (default e_0)."""
    cone = build_hyperkahler_cone(n)
    N = cone.dim
    if x is None:
        x = np.zeros(N)
        x[0] = 1.0
    x = np.asarray(x, dtype=float)
    if x.shape != (N,):
        raise ValueError(f"base point must have dimension {N}")
    if abs(np.linalg.norm(x) - 1.0) > 1e-12:
        raise ValueError("base point must be a unit vector")
    A = [cone.complex_structures[p] @ x for p in range(3)]
    cols = [a.astype(float) for a in A]
    span = [x] + cols
    horiz: list[np.ndarray] = []
    for i in range(N):
        w = np.zeros(N)
        w[i] = 1.0
        for u in span + horiz:
            w = w - (u @ w) * u
        nrm = np.linalg.norm(w)
        if nrm < 1e-6:
            continue
        w = w / nrm
        block = [w] + [cone.complex_structures[p] @ w for p in range(3)]
        horiz.extend(block)
        if len(horiz) == 4 * n:
            break
    frame = np.array(cols + horiz).T  # (N, 4n+3)
    exact = _exactify(frame)
    frame_for_pullback = exact if exact is not None else frame
    catalog = _link_catalog(n, frame_for_pullback, cone)
    J = tuple(frame.T @ cone.complex_structures[p] @ frame for p in range(3))
    frame.setflags(write=False)
    return LinkFrame(n, N - 1, x, frame, tuple(A), J[0], J[1], J[2], catalog)


_default_link_frame = lru_cache(maxsize=None)(lambda n: build_link_frame(n))


def default_link_frame(n: int) -> LinkFrame:
    return _default_link_frame(n)


# ---------------------------------------------------------------------------
# twistor model


@dataclass(frozen=True)
class TwistorModel:
    """The linear twistor model R^{4n+2} = H^n + C with its form catalog and
    compatible complex structures."""

    n: int
    dim: int
    J_plus: np.ndarray
    J_minus: np.ndarray
    J2: np.ndarray
    J3: np.ndarray
    catalog: dict = field(repr=False)

    @property
    def h_indices(self) -> tuple:
        return tuple(range(4 * self.n))

    @property
    def v_indices(self) -> tuple:
        return (4 * self.n, 4 * self.n + 1)

    def form(self, name: str):
        return self.catalog[name]


@lru_cache(maxsize=None)
def build_twistor_model(n: int) -> TwistorModel:
    if not 1 <= n <= 3:
        raise ValueError(f"n must be in 1..3, got {n}")
    dim = 4 * n + 2
    b1, b2, b3 = standard_kahler_forms(n, dim)
    f2, f3 = dim - 2, dim - 1
    omega_V = AltForm(dim, 2, {(f2, f3): 1})
    omega_H = b1
    omega_KE = omega_H + omega_V
    omega_NK = omega_H * 2 - omega_V
    omega_minus = omega_H - omega_V  # Kahler form of the vertical-reversed structure
    f2_form = AltForm.blade(dim, [f2])
    f3_form = AltForm.blade(dim, [f3])
    gamma0 = wedge(ComplexAltForm(f2_form, -f3_form), ComplexAltForm(b2, b3))
    xi = wedge(b2, b2) + wedge(b3, b3)
    cat = {
        "beta1": b1,
        "beta2": b2,
        "beta3": b3,
        "omega_H": omega_H,
        "omega_V": omega_V,
        "omega_KE": omega_KE,
        "omega_NK": omega_NK,
        "omega_minus": omega_minus,
        "gamma0": gamma0,
        "re_gamma0": gamma0.re,
        "im_gamma0": gamma0.im,
        "xi": xi,
        "vol": AltForm.blade(dim, tuple(range(dim))),
    }
    T1, T2, T3 = standard_triple_matrices(n, dim)
    J_plus = T1.astype(float)
    J_plus[f2, f3] = -1.0
    J_plus[f3, f2] = 1.0
    J_minus = T1.astype(float)
    J_minus[f2, f3] = 1.0
    J_minus[f3, f2] = -1.0
    return TwistorModel(n, dim, J_plus, J_minus, T2.astype(float), T3.astype(float), cat)


def make_V_theta(n: int, theta: float) -> Plane:
    """The distinguished 2-plane V_theta inside the twistor model."""
    model = build_twistor_model(n)
    dim = model.dim
    f2, f3 = model.v_indices
    e12, e13 = 2, 3
    c, s = math.cos(theta), math.sin(theta)
    v2 = np.zeros(dim)
    v2[f2] = -c
    v2[e13] = -c
    v2[f3] = -s
    v2[e12] = -s
    v3 = np.zeros(dim)
    v3[f2] = -s
    v3[e13] = s
    v3[f3] = -c
    v3[e12] = c
    return Plane.from_vectors([v2, v3])


def make_W_theta(n: int, theta: float) -> Plane:
    """The 3-plane R e_{10} + V_theta, oriented (e_{10}, v_2, v_3)."""
    V = make_V_theta(n, theta)
    e10 = np.zeros(V.dim)
    e10[0] = 1.0
    return Plane.from_vectors(np.vstack([e10, V.frame]))


def make_squashed_associative(n: int, t: float):
    """The squashed associative 3-form family at the default link frame.

    Returns the pair (-phi_minus_t, phi_plus_t); both tend to
    alpha_1 ^ alpha_2 ^ alpha_3 as t -> 0.
    """
    if n != 1:
        raise ValueError("squashed associative forms are a 7-dimensional construction (n = 1)")
    if not t > 0:
        raise ValueError("t must be positive")
    lf = default_link_frame(n)
    a123 = wedge(wedge(lf.form("alpha1"), lf.form("alpha2")), lf.form("alpha3"))
    ak = [wedge(lf.form(f"alpha{p}"), lf.form(f"kappa{p}")) for p in (1, 2, 3)]
    t2 = t * t
    minus_phi_minus = a123 + (ak[0] * -1 + ak[1] + ak[2]) * t2
    phi_plus = a123 - (ak[0] + ak[1] + ak[2]) * t2
    return minus_phi_minus, phi_plus


# ---------------------------------------------------------------------------
# isometry sampling


def random_sp_cone_isometry(n: int, rng: np.random.Generator) -> np.ndarray:
    """Random quaternionic-unitary isometry of the cone R^{4n+4} commuting
    with the left-multiplication structures (so it fixes the whole catalog)."""
    B = _quat.random_sp_quaternion_matrix(n + 1, rng)
    return _quat.right_action_realification(B)


def sp_u1_matrix(n: int, B_quat: np.ndarray, lam: complex) -> np.ndarray:
    """Real matrix of the twistor action (h, z) -> (B h lambda^{-1}, lambda^{-2} z)."""
    C = _quat.sp_complex_block(B_quat) * (1.0 / lam)
    H = _quat.realify_interleaved(C)
    dim = 4 * n + 2
    M = np.zeros((dim, dim))
    M[: 4 * n, : 4 * n] = H
    ang = -2.0 * np.angle(lam)
    M[4 * n :, 4 * n :] = _quat.rotation2(ang)
    return M


def random_sp_u1_element(n: int, rng: np.random.Generator) -> np.ndarray:
    """Random element of the gamma0 stabilizer inside U(2n) x U(1)."""
    B = _quat.random_sp_quaternion_matrix(n, rng)
    lam = np.exp(1j * rng.uniform(0.0, 2.0 * np.pi))
    return sp_u1_matrix(n, B, lam)


def _random_unitary(m: int, rng: np.random.Generator) -> np.ndarray:
    Z = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))


def random_unitary_pair_element(n: int, rng: np.random.Generator) -> np.ndarray:
    """Random element of U(2n) x U(1) acting on the twistor model (generically
    outside the gamma0 stabilizer)."""
    U = _random_unitary(2 * n, rng)
    H = _quat.realify_interleaved(U)
    dim = 4 * n + 2
    M = np.zeros((dim, dim))
    M[: 4 * n, : 4 * n] = H
    M[4 * n :, 4 * n :] = _quat.rotation2(rng.uniform(0.0, 2.0 * np.pi))
    return M
