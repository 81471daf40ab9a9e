"""Tangent-plane classification, proposition-level equivalence checks, and the
normal form of calibrated 3-planes in the twistor model.

Membership tests are basis-free: J-invariance through the orthogonal projector
onto the plane, isotropy through the restricted 2-form, phases through the
complex value of the relevant volume form (defined only on calibrated planes).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from caliber.calib import Plane, SearchParams, comass_search, is_calibrated, skew_matrix
from caliber.exterior import AltForm, evaluate
from caliber.model import (
    HKModel,
    LinkFrame,
    TwistorModel,
    make_W_theta,
    random_sp_u1_element,
    standard_triple_matrices,
)

__all__ = [
    "ClassificationReport",
    "NormalFormResult",
    "EquivalenceResult",
    "classify_plane",
    "check_equivalences",
    "normal_form_theta",
    "quaternionic_envelope",
    "PhaseRigidityReport",
    "phase_rigidity_scan",
    "rotated_w_theta",
    "batch_random_planes",
    "batch_complex_planes",
    "batch_complex_isotropic_planes",
    "batch_double_lagrangian_planes",
    "batch_cr_planes",
    "batch_cr_legendrian_planes",
    "batch_hv_isotropic_planes",
    "batch_double_lagrangian_twistor",
    "projector_invariance_residual",
    "isotropy_residual",
    "intersection_dim",
]


# ---------------------------------------------------------------------------
# basic geometric measurements


def projector_invariance_residual(frame: np.ndarray, J: np.ndarray) -> float:
    """sup-norm of proj_E J proj_E - J proj_E; zero iff J(E) is contained in E."""
    P = frame.T @ frame
    JP = J @ P
    return float(np.max(np.abs(P @ JP - JP)))


def isotropy_residual(frame: np.ndarray, two_form: AltForm) -> float:
    S = skew_matrix(two_form)
    return float(np.max(np.abs(frame @ S @ frame.T)))


def intersection_dim(frame: np.ndarray, indices, tol: float = 1e-6) -> int:
    """dim of the intersection with the coordinate subspace on `indices`."""
    k, n = frame.shape
    comp = [i for i in range(n) if i not in set(indices)]
    if not comp:
        return k
    block = frame[:, comp]
    s = np.linalg.svd(block, compute_uv=False)
    rank = int(np.sum(s > tol))
    return k - rank


def _phase(value: complex, tol: float) -> float | None:
    if abs(abs(value) - 1.0) > tol:
        return None
    return float(math.atan2(value.imag, value.real))


def _form_value(form, frame: np.ndarray):
    vecs = [np.asarray(row, dtype=float) for row in frame]
    return evaluate(form, vecs)


# ---------------------------------------------------------------------------
# classification report


@dataclass
class ClassificationReport:
    space: str
    n: int
    dim: int
    degree: int
    tol: float
    flags: dict = field(default_factory=dict)

    def add(self, name: str, flag, witness, tol=None) -> None:
        if isinstance(witness, complex):
            witness = {"re": float(witness.real), "im": float(witness.imag)}
        elif isinstance(witness, (np.floating, np.integer)):
            witness = float(witness)
        self.flags[name] = {"flag": flag, "witness": witness, "tol": self.tol if tol is None else tol}

    def flag(self, name: str):
        return self.flags[name]["flag"]

    def witness(self, name: str):
        return self.flags[name]["witness"]

    def to_json(self) -> dict:
        return {
            "space": self.space,
            "n": self.n,
            "dim": self.dim,
            "degree": self.degree,
            "tol": self.tol,
            "flags": {k: dict(v) for k, v in sorted(self.flags.items())},
        }


def classify_plane(plane: Plane, model, tol: float = 1e-8) -> ClassificationReport:
    """Full vector of membership flags and numeric witnesses for a plane."""
    if isinstance(model, HKModel):
        return _classify_cone(plane, model, tol)
    if isinstance(model, LinkFrame):
        return _classify_link(plane, model, tol)
    if isinstance(model, TwistorModel):
        return _classify_twistor(plane, model, tol)
    raise TypeError(f"unsupported model type {type(model)!r}")


def _classify_cone(plane: Plane, hk: HKModel, tol: float) -> ClassificationReport:
    if plane.dim != hk.dim:
        raise ValueError(f"dimension mismatch: plane {plane.dim}, model {hk.dim}")
    F = plane.frame
    k = plane.degree
    rep = ClassificationReport("cone", hk.n, hk.dim, k, tol)
    structures = dict(zip((1, 2, 3), hk.complex_structures))
    for p in (1, 2, 3):
        res = projector_invariance_residual(F, structures[p])
        invariant = res <= tol
        rep.add(f"invariant_I{p}", invariant, res)
        oriented = None
        if invariant and k % 2 == 0:
            m = k // 2
            power = hk.form(f"omega{p}")
            val = _form_value(_wedge_power_float(power, m, 1.0 / math.factorial(m)), F)
            oriented = val
            rep.add(f"complex_I{p}", abs(val - 1) <= tol, val)
            rep.add(f"anti_complex_I{p}", abs(val + 1) <= tol, val)
        else:
            rep.add(f"complex_I{p}", False if not invariant else None, res)
            rep.add(f"anti_complex_I{p}", False if not invariant else None, res)
        iso = isotropy_residual(F, hk.form(f"omega{p}"))
        rep.add(f"isotropic_omega{p}", iso <= tol, iso)
        rep.add(f"lagrangian_omega{p}", iso <= tol and k == 2 * hk.n + 2, iso)
    for p, (q, r) in {1: (2, 3), 2: (3, 1), 3: (1, 2)}.items():
        ci = bool(rep.flag(f"complex_I{p}")) and rep.flag(f"isotropic_omega{q}") and rep.flag(f"isotropic_omega{r}")
        rep.add(f"complex_isotropic_I{p}", ci, None)
    if k == 2 * hk.n + 2:
        for p in (1, 2, 3):
            val = complex(_form_value(hk.form(f"upsilon{p}"), F))
            rep.add(f"special_lagrangian_phase_upsilon{p}", _phase(val, tol) is not None, val)
            ph = _phase(val, tol)
            rep.flags[f"special_lagrangian_phase_upsilon{p}"]["phase"] = ph
    if k % 2 == 0 and 2 <= k <= 2 * hk.n + 2:
        for label in ("I", "J", "K"):
            val = _form_value(hk.form(f"theta_{label}{k}"), F)
            rep.add(f"special_isotropic_theta_{label}{k}", abs(val - 1) <= tol, val)
    if k == 4:
        for p in (1, 2, 3):
            val = _form_value(hk.form(f"Phi{p}"), F)
            rep.add(f"cayley_Phi{p}", abs(val - 1) <= tol, val)
        rep.add("quaternionic_Lambda_value", None, _form_value(hk.form("Lambda"), F))
    return rep


def _classify_link(plane: Plane, lf: LinkFrame, tol: float) -> ClassificationReport:
    if plane.dim != lf.dim:
        raise ValueError(f"dimension mismatch: plane {plane.dim}, model {lf.dim}")
    F = plane.frame
    k = plane.degree
    n = lf.n
    rep = ClassificationReport("link", n, lf.dim, k, tol)
    J = dict(zip((1, 2, 3), lf.transverse_structures))
    reeb = np.eye(lf.dim)[:3]
    for p in (1, 2, 3):
        has_reeb = bool(np.linalg.norm(F.T @ (F @ reeb[p - 1]) - reeb[p - 1]) <= 10 * tol)
        jres = projector_invariance_residual(F, J[p])
        cr = has_reeb and jres <= tol
        rep.add(f"cr_I{p}", cr, {"reeb": has_reeb, "J_residual": jres})
        if cr and k % 2 == 1:
            m = (k - 1) // 2
            cal = _wedge_power_float(lf.form(f"Omega{p}"), m, 1.0 / math.factorial(m))
            cal = _wedge_float(lf.form(f"alpha{p}"), cal)
            rep.flags[f"cr_I{p}"]["oriented_value"] = float(_form_value(cal, F))
        aval = float(np.max(np.abs(F[:, p - 1])))
        rep.add(f"isotropic_alpha{p}", aval <= tol, aval)
        rep.add(f"legendrian_alpha{p}", aval <= tol and k == 2 * n + 1, aval)
    for p, (q, r) in {1: (2, 3), 2: (3, 1), 3: (1, 2)}.items():
        ci = bool(rep.flag(f"cr_I{p}")) and rep.flag(f"isotropic_alpha{q}") and rep.flag(f"isotropic_alpha{r}")
        rep.add(f"cr_isotropic_I{p}", ci, None)
    if k == 2 * n + 1:
        for p in (1, 2, 3):
            val = complex(_form_value(lf.form(f"psi{p}"), F))
            ph = _phase(val, tol)
            rep.add(f"special_legendrian_phase_psi{p}", ph is not None, val)
            rep.flags[f"special_legendrian_phase_psi{p}"]["phase"] = ph
    if k % 2 == 1 and k <= 2 * n + 1:
        for label in ("I", "J", "K"):
            val = _form_value(lf.form(f"theta_{label}{k}"), F)
            rep.add(f"special_isotropic_theta_{label}{k}", abs(val - 1) <= tol, val)
    if k == 3:
        for p in (1, 2, 3):
            val = _form_value(lf.form(f"phi{p}"), F)
            rep.add(f"associative_phi{p}", abs(val - 1) <= tol, val)
        val = complex(_form_value(lf.form("gamma1"), F))
        rep.add("re_gamma1_value", abs(val.real - 1) <= tol, val)
    horiz = float(np.max(np.abs(F[:, :3])))
    rep.add("horizontal_p1", rep.flag("isotropic_alpha1"), rep.witness("isotropic_alpha1"))
    rep.add("horizontal", horiz <= tol, horiz)
    return rep


def _classify_twistor(plane: Plane, tm: TwistorModel, tol: float) -> ClassificationReport:
    if plane.dim != tm.dim:
        raise ValueError(f"dimension mismatch: plane {plane.dim}, model {tm.dim}")
    F = plane.frame
    k = plane.degree
    n = tm.n
    rep = ClassificationReport("twistor", n, tm.dim, k, tol)
    for name, J in (("J_plus", tm.J_plus), ("J_minus", tm.J_minus)):
        res = projector_invariance_residual(F, J)
        rep.add(f"complex_{name}", res <= tol, res)
    for name in ("omega_KE", "omega_NK", "omega_H", "omega_V"):
        res = isotropy_residual(F, tm.form(name))
        rep.add(f"isotropic_{name}", res <= tol, res)
        rep.flags[f"isotropic_{name}"]["restriction_norm"] = res
    rep.add("lagrangian_omega_KE", rep.flag("isotropic_omega_KE") and k == 2 * n + 1, rep.witness("isotropic_omega_KE"))
    rep.add("lagrangian_omega_NK", rep.flag("isotropic_omega_NK") and k == 2 * n + 1, rep.witness("isotropic_omega_NK"))
    horiz = float(np.max(np.abs(F[:, list(tm.v_indices)])))
    rep.add("horizontal", horiz <= tol, horiz)
    dim_h = intersection_dim(F, tm.h_indices)
    dim_v = intersection_dim(F, tm.v_indices)
    rep.add("dim_cap_H", None, dim_h)
    rep.add("dim_cap_V", None, dim_v)
    rep.add("hv_compatible", dim_h + dim_v == k, {"dim_cap_H": dim_h, "dim_cap_V": dim_v})
    if k == 3:
        val = complex(_form_value(tm.form("gamma0"), F))
        rep.add("re_gamma0_calibrated", abs(val.real - 1) <= tol, val)
        rep.flags["re_gamma0_calibrated"]["phase"] = _phase(val, tol)
    return rep


def _wedge_power_float(f: AltForm, m: int, scale: float) -> AltForm:
    from caliber.exterior import wedge

    out = f.to_float()
    for _ in range(m - 1):
        out = wedge(out, f.to_float())
    return out * scale


def _wedge_float(a: AltForm, b: AltForm) -> AltForm:
    from caliber.exterior import wedge

    return wedge(a.to_float(), b)


# ---------------------------------------------------------------------------
# proposition-level equivalences


@dataclass(frozen=True)
class EquivalenceResult:
    check_id: str
    holds: bool
    witness: dict


def check_equivalences(plane: Plane, model, tol: float = 1e-8) -> list[EquivalenceResult]:
    """Evaluate both sides of the plane-level structure implications.

    A failure on any plane contradicts a theorem, so a False result is a test
    failure of the suite.
    """
    rep = classify_plane(plane, model, tol)
    out: list[EquivalenceResult] = []

    def implication(check_id: str, premise: bool, conclusion: bool, witness: dict):
        out.append(EquivalenceResult(check_id, (not premise) or conclusion, {"premise": premise, **witness}))

    if isinstance(model, HKModel):
        premise = bool(rep.flag("invariant_I1")) and bool(rep.flag("isotropic_omega2"))
        implication(
            "complex_w2iso_implies_w3iso",
            premise,
            bool(rep.flag("isotropic_omega3")),
            {"w3_residual": rep.witness("isotropic_omega3")},
        )
        if plane.degree == 2 * model.n + 2:
            dl = bool(rep.flag("lagrangian_omega2")) and bool(rep.flag("lagrangian_omega3"))
            implication(
                "double_lagrangian_implies_I1_invariant",
                dl,
                bool(rep.flag("invariant_I1")),
                {"I1_residual": rep.witness("invariant_I1")},
            )
            ups2 = complex(_form_value(model.form("upsilon2"), plane.frame))
            rot = ups2 * (-1j) ** (model.n + 1)
            implication(
                "double_lagrangian_upsilon2_volume",
                dl,
                abs(abs(rot.real) - 1) <= tol and abs(rot.imag) <= tol,
                {"rotated_upsilon2": {"re": rot.real, "im": rot.imag}},
            )
    elif isinstance(model, LinkFrame):
        if plane.degree == 3:
            for p in (1, 3):
                implication(
                    f"cr_I{p}_implies_phi2_associative",
                    bool(rep.flag(f"cr_I{p}")),
                    abs(abs(rep.witness("associative_phi2")) - 1) <= tol,
                    {"phi2": rep.witness("associative_phi2")},
                )
        if plane.degree == 2 * model.n + 1:
            leg = bool(rep.flag("cr_I1")) and rep.flag("legendrian_alpha2") and rep.flag("legendrian_alpha3")
            psi2 = complex(_form_value(model.form("psi2"), plane.frame))
            psi3 = complex(_form_value(model.form("psi3"), plane.frame))
            target2 = 1j ** (model.n + 1)
            ok2 = min(abs(psi2 - target2), abs(psi2 + target2)) <= tol
            ok3 = min(abs(psi3 - 1), abs(psi3 + 1)) <= tol
            implication(
                "cr_legendrian_special_phases",
                leg,
                ok2 and ok3,
                {"psi2": {"re": psi2.real, "im": psi2.imag}, "psi3": {"re": psi3.real, "im": psi3.imag}},
            )
    elif isinstance(model, TwistorModel):
        hv = bool(rep.flag("hv_compatible"))
        iso_ke = bool(rep.flag("isotropic_omega_KE"))
        iso_nk = bool(rep.flag("isotropic_omega_NK"))
        implication("hv_compatible_iso_KE_iff_NK", hv, iso_ke == iso_nk, {"iso_KE": iso_ke, "iso_NK": iso_nk})
        if plane.degree == 2 * model.n + 1:
            dl = bool(rep.flag("lagrangian_omega_KE")) and bool(rep.flag("lagrangian_omega_NK"))
            dims_ok = rep.witness("dim_cap_H") == 2 * model.n and rep.witness("dim_cap_V") == 1
            implication(
                "double_lagrangian_hv_dimensions",
                dl,
                hv and dims_ok,
                {"dim_cap_H": rep.witness("dim_cap_H"), "dim_cap_V": rep.witness("dim_cap_V")},
            )
    return out


# ---------------------------------------------------------------------------
# normal form for calibrated 3-planes in the twistor model


@dataclass(frozen=True)
class NormalFormResult:
    theta: float
    envelope: np.ndarray  # (4, dim) orthonormal quaternionic-line basis
    dim_cap_H: int
    dim_cap_V: int
    ke_isotropic: bool

    @property
    def hv_flags(self) -> tuple:
        return (self.dim_cap_H, self.dim_cap_V, self.ke_isotropic)

    def to_json(self) -> dict:
        return {
            "theta": float(self.theta),
            "envelope": [[float(x) for x in row] for row in self.envelope],
            "dim_cap_H": int(self.dim_cap_H),
            "dim_cap_V": int(self.dim_cap_V),
            "ke_isotropic": bool(self.ke_isotropic),
        }


def quaternionic_envelope(plane: Plane, model: TwistorModel, tol: float = 1e-8,
                          cal_tol: float = 1e-8) -> np.ndarray:
    """Orthonormal basis (w, J1 w, J2 w, J3 w) of the quaternionic line whose
    sum with the vertical plane contains the calibrated 3-plane."""
    if not is_calibrated(model.form("re_gamma0").to_float(), plane, cal_tol):
        raise ValueError("plane is not calibrated by the real twistor 3-form")
    n = model.n
    Mh = plane.frame[:, : 4 * n]
    _U, _S, Vt = np.linalg.svd(Mh, full_matrices=False)
    w = Vt[0]
    j = int(np.argmax(np.abs(w) > 1e-9))
    if w[j] < 0:
        w = -w
    T1, T2, T3 = standard_triple_matrices(n)
    basis_h = np.array([w, T1 @ w, T2 @ w, T3 @ w])
    resid = float(np.max(np.abs(Mh - (Mh @ basis_h.T) @ basis_h)))
    if resid > tol:
        raise ValueError(f"horizontal part escapes the quaternionic line (residual {resid:.2e})")
    env = np.zeros((4, model.dim))
    env[:, : 4 * n] = basis_h
    return env


def normal_form_theta(plane: Plane, model: TwistorModel, tol: float = 1e-8) -> NormalFormResult:
    """Recover the normal-form angle theta in [0, pi/4] of a calibrated 3-plane.

    The primary extraction is theta = arccos(s) / 2 with s the largest
    singular value of the restriction of the Kahler form to the plane (an
    invariant of the stabilizer action, since the restricted pairing is
    equivariant).  Because arccos loses half the significant digits near
    s = 1, the reported angle is the equivalent well-conditioned extraction
    from the singular values (sin(theta + pi/4), cos(theta + pi/4)) of the
    vertical block of the frame; the two are cross-checked and a discrepancy
    beyond conditioning error is raised, not absorbed.
    """
    if plane.degree != 3:
        raise ValueError("normal form applies to 3-planes")
    if not is_calibrated(model.form("re_gamma0").to_float(), plane, tol):
        raise ValueError("plane is not calibrated by the real twistor 3-form")
    S = skew_matrix(model.form("omega_KE"))
    B = plane.frame @ S @ plane.frame.T
    s = float(np.linalg.svd(B, compute_uv=False)[0])
    theta_spec = 0.5 * math.acos(min(1.0, max(0.0, s)))
    sv = np.linalg.svd(plane.frame[:, list(model.v_indices)], compute_uv=False)
    theta = math.atan2(float(sv[0]), float(sv[1])) - math.pi / 4
    theta = min(math.pi / 4, max(0.0, theta))
    if abs(theta - theta_spec) > 1e-6:
        raise ValueError(
            f"normal-form extractions disagree: spectral {theta_spec!r} vs vertical-block {theta!r}"
        )
    env = quaternionic_envelope(plane, model, cal_tol=tol)
    dim_h = intersection_dim(plane.frame, model.h_indices)
    dim_v = intersection_dim(plane.frame, model.v_indices)
    iso = isotropy_residual(plane.frame, model.form("omega_KE")) <= tol
    if dim_h < 1:
        raise ValueError("internal inconsistency: calibrated plane with no horizontal vector")
    return NormalFormResult(theta, env, dim_h, dim_v, bool(iso))


def rotated_w_theta(n: int, theta: float, rng: np.random.Generator) -> Plane:
    """A random stabilizer-group rotation of the normal-form plane W_theta."""
    W = make_W_theta(n, theta)
    g = random_sp_u1_element(n, rng)
    return Plane.from_vectors(W.frame @ g.T)


# ---------------------------------------------------------------------------
# phase rigidity scan


@dataclass(frozen=True)
class PhaseRigidityReport:
    thetas: tuple
    values: tuple
    margins: tuple

    def to_json(self) -> dict:
        return {
            "rows": [
                {"theta": float(t), "max_value": float(v), "margin": float(m)}
                for t, v, m in zip(self.thetas, self.values, self.margins)
            ]
        }


def phase_rigidity_scan(model: TwistorModel, thetas=None,
                        params: SearchParams = SearchParams()) -> PhaseRigidityReport:
    """Measure max_P Re(e^{-i theta} gamma0)(P) over a grid of phases.

    Reports the observed maximum and margin 1 - max for each phase; no
    assertion is made here.
    """
    if thetas is None:
        thetas = [k * math.pi / 8 for k in range(9)]
    re = model.form("re_gamma0").to_float()
    im = model.form("im_gamma0").to_float()
    values = []
    for th in thetas:
        f = re * math.cos(th) + im * math.sin(th)
        res = comass_search(f, params=params)
        values.append(res.value)
    margins = [1.0 - v for v in values]
    return PhaseRigidityReport(tuple(thetas), tuple(values), tuple(margins))


# ---------------------------------------------------------------------------
# batched rejection-free plane generators


def _batch_normalize(V: np.ndarray) -> np.ndarray:
    return V / np.linalg.norm(V, axis=-1, keepdims=True)


def _batch_project_out(V: np.ndarray, constraints: list[np.ndarray]) -> np.ndarray:
    """Project batched vectors (B, N) off the span of per-sample constraint
    vectors, then normalize.  Constraints need not be orthonormal; they are
    orthonormalized on the fly."""
    ortho: list[np.ndarray] = []
    for c in constraints:
        w = c.copy()
        for u in ortho:
            w -= np.sum(u * w, axis=-1, keepdims=True) * u
        nrm = np.linalg.norm(w, axis=-1, keepdims=True)
        good = nrm[..., 0] > 1e-12
        w[good] = w[good] / nrm[good]
        w[~good] = 0.0
        ortho.append(w)
    out = V.copy()
    for u in ortho:
        out -= np.sum(u * out, axis=-1, keepdims=True) * u
    return _batch_normalize(out)


def batch_random_planes(dim: int, k: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random oriented k-planes as row frames of shape (count, k, dim)."""
    G = rng.standard_normal((count, dim, k))
    Q, R = np.linalg.qr(G)
    d = np.sign(np.einsum("...ii->...i", R))
    d[d == 0] = 1.0
    return np.swapaxes(Q * d[..., None, :], -1, -2)


def batch_complex_planes(structures, line_count: int, count: int, rng: np.random.Generator,
                         isotropic: bool = False, dim: int | None = None) -> np.ndarray:
    """J1-complex planes built from complex lines (v, J1 v); with `isotropic`,
    successive generators are chosen in the quaternionic orthocomplement, so
    the planes are additionally isotropic for the other two Kahler forms."""
    I1, I2, I3 = structures
    n = I1.shape[0] if dim is None else dim
    rows = []
    constraints: list[np.ndarray] = []
    for _ in range(line_count):
        v = _batch_project_out(rng.standard_normal((count, n)), constraints)
        jv = v @ I1.T
        rows.extend([v, jv])
        constraints.extend([v, jv])
        if isotropic:
            constraints.extend([v @ I2.T, v @ I3.T])
    return np.stack(rows, axis=1)


def batch_complex_isotropic_planes(hk: HKModel, line_count: int, count: int,
                                   rng: np.random.Generator) -> np.ndarray:
    return batch_complex_planes(hk.complex_structures, line_count, count, rng, isotropic=True)


def batch_double_lagrangian_planes(hk: HKModel, count: int, rng: np.random.Generator) -> np.ndarray:
    """Planes of top dimension 2n+2 that are Lagrangian for the second and
    third Kahler forms (equivalently invariant complex Lagrangians)."""
    return batch_complex_isotropic_planes(hk, hk.n + 1, count, rng)


def batch_cr_planes(lf: LinkFrame, count: int, rng: np.random.Generator,
                    horizontal: bool = False, p: int = 1) -> np.ndarray:
    """3-planes (A_p, v, J_p v) at the link frame; `horizontal` draws v from
    the joint kernel of the contact forms, giving the isotropic class."""
    dim = lf.dim
    J = lf.transverse_structures[p - 1]
    v = np.zeros((count, dim))
    if horizontal:
        v[:, 3:] = rng.standard_normal((count, dim - 3))
    else:
        v[:, [q for q in range(dim) if q != p - 1]] = rng.standard_normal((count, dim - 1))
    v = _batch_normalize(v)
    jv = v @ J.T
    a = np.zeros((count, dim))
    a[:, p - 1] = 1.0
    return np.stack([a, v, jv], axis=1)


def batch_cr_legendrian_planes(lf: LinkFrame, count: int, rng: np.random.Generator) -> np.ndarray:
    """(2n+1)-planes spanned by the first Reeb vector and n complex lines with
    quaternionically orthogonal generators inside the joint contact kernel."""
    dim = lf.dim
    J = lf.transverse_structures
    a = np.zeros((count, dim))
    a[:, 0] = 1.0
    rows = [a]
    constraints: list[np.ndarray] = []
    for _ in range(lf.n):
        g = np.zeros((count, dim))
        g[:, 3:] = rng.standard_normal((count, dim - 3))
        v = _batch_project_out(g, constraints)
        jv = v @ J[0].T
        rows.extend([v, jv])
        constraints.extend([v, jv, v @ J[1].T, v @ J[2].T])
    return np.stack(rows, axis=1)


def batch_hv_isotropic_planes(tm: TwistorModel, h_dim: int, count: int,
                              rng: np.random.Generator, vertical: bool = True) -> np.ndarray:
    """HV-compatible planes with isotropic horizontal part (and an optional
    vertical line), hence isotropic for both twistor Kahler forms."""
    n = tm.n
    dim = tm.dim
    T1 = standard_triple_matrices(n)[0]
    rows = []
    constraints: list[np.ndarray] = []
    for _ in range(h_dim):
        g = np.zeros((count, dim))
        g[:, : 4 * n] = rng.standard_normal((count, 4 * n))
        v = _batch_project_out(g, constraints)
        rows.append(v)
        jv = np.zeros_like(v)
        jv[:, : 4 * n] = v[:, : 4 * n] @ T1.T
        constraints.extend([v, jv])
    if vertical:
        ang = rng.uniform(0.0, 2.0 * np.pi, size=count)
        w = np.zeros((count, dim))
        w[:, 4 * n] = np.cos(ang)
        w[:, 4 * n + 1] = np.sin(ang)
        rows.append(w)
    return np.stack(rows, axis=1)


def batch_double_lagrangian_twistor(tm: TwistorModel, count: int, rng: np.random.Generator) -> np.ndarray:
    """(2n+1)-planes Lagrangian for both the Kahler-Einstein and the
    nearly-Kahler form: a Lagrangian horizontal part plus a vertical line."""
    return batch_hv_isotropic_planes(tm, 2 * tm.n, count, rng, vertical=True)
