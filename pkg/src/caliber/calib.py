"""Comass computation and semi-calibration certification.

The comass of a k-form is its maximum over oriented orthonormal k-planes.
`comass_search` runs multi-start Riemannian ascent on the Stiefel manifold of
orthonormal k-frames: Euclidean multilinear gradient projected to the tangent
space, QR retraction, Armijo backtracking.  Search values are certified lower
bounds only; "comass one" acceptance additionally rests on the relevant
structure theorem for the form at hand.

All restarts are seeded independently (seed + restart index), so results are
deterministic for a fixed seed regardless of batching.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from caliber.exterior import AltForm, ComplexAltForm, evaluate, interior, pullback, wedge

__all__ = [
    "Plane",
    "SearchParams",
    "ComassResult",
    "FormEvaluator",
    "comass_search",
    "comass_2form_exact",
    "skew_matrix",
    "is_calibrated",
    "batch_evaluate",
    "LineReduction",
    "reduce_along_line",
    "ScalingMetric",
    "TransportedForm",
    "transported_semicalibration",
    "splitting_support",
    "is_pure_type",
    "isotropy_of_maximizers",
    "canonical_frame",
]


# ---------------------------------------------------------------------------
# planes


@dataclass(frozen=True, eq=False)
class Plane:
    """An oriented k-plane in R^N, held as an ordered orthonormal frame.

    `frame` has shape (k, N): rows are the frame vectors, and the orientation
    is the row order.  Construction orthonormalizes (Gram-Schmidt via QR,
    orientation preserved) and rejects rank-deficient input.
    """

    dim: int
    degree: int
    frame: np.ndarray

    @classmethod
    def from_vectors(cls, vectors, *, orthonormalize: bool = True, tol: float = 1e-10) -> "Plane":
        A = np.asarray(vectors, dtype=float)
        if A.ndim != 2:
            raise ValueError("frame must be a 2-D array of row vectors")
        k, n = A.shape
        if k > n:
            raise ValueError(f"cannot span a {k}-plane in R^{n}")
        if k == 0:
            frame = A.copy()
            frame.setflags(write=False)
            return cls(n, 0, frame)
        if orthonormalize:
            Q, R = np.linalg.qr(A.T)
            diag = np.abs(np.diag(R))
            if np.min(diag) <= tol * max(1.0, np.max(diag)):
                raise ValueError("rank-deficient frame")
            s = np.sign(np.diag(R))
            frame = (Q * s).T
        else:
            gram = A @ A.T
            if np.max(np.abs(gram - np.eye(k))) > tol:
                raise ValueError("frame is not orthonormal")
            frame = A.copy()
        frame.setflags(write=False)
        return cls(n, k, frame)

    def spans_same_oriented(self, other: "Plane", tol: float = 1e-8) -> bool:
        if (self.dim, self.degree) != (other.dim, other.degree):
            return False
        C = self.frame @ other.frame.T
        return bool(np.max(np.abs(C @ C.T - np.eye(self.degree))) <= tol and np.linalg.det(C) > 0)

    def contains_vector(self, v, tol: float = 1e-8) -> bool:
        v = np.asarray(v, dtype=float)
        proj = self.frame.T @ (self.frame @ v)
        return bool(np.max(np.abs(proj - v)) <= tol)

    def to_json(self) -> dict:
        return {"dim": self.dim, "frame": [[float(x) for x in row] for row in self.frame]}

    @classmethod
    def from_json(cls, data) -> "Plane":
        if isinstance(data, str):
            data = json.loads(data)
        return cls.from_vectors(data["frame"])


@dataclass(frozen=True)
class SearchParams:
    restarts: int = 200
    seed: int = 0
    max_iters: int = 500
    tol: float = 1e-10  # Riemannian gradient norm for convergence
    armijo_c1: float = 0.3  # sufficient-increase fraction of the linear model
    step0: float = 1.0
    shrink: float = 0.5
    max_halvings: int = 30


@dataclass(frozen=True)
class ComassResult:
    value: float
    argmax: Plane
    restarts_used: int
    converged_fraction: float
    all_values: np.ndarray = field(repr=False, default=None)
    all_frames: np.ndarray = field(repr=False, default=None)

    def maximizer_planes(self, tol: float = 1e-6) -> list[Plane]:
        """Planes from restarts whose value is within tol of the best found."""
        out = []
        for val, fr in zip(self.all_values, self.all_frames):
            if abs(val - self.value) <= tol:
                out.append(Plane(fr.shape[1], fr.shape[0], fr))
        return out

    def to_json(self) -> dict:
        return {
            "value": float(self.value),
            "argmax": self.argmax.to_json(),
            "restarts_used": int(self.restarts_used),
            "converged_fraction": float(self.converged_fraction),
        }


# ---------------------------------------------------------------------------
# batched multilinear evaluation


def _det2(M):
    return M[..., 0, 0] * M[..., 1, 1] - M[..., 0, 1] * M[..., 1, 0]


def _det3(M):
    return (
        M[..., 0, 0] * (M[..., 1, 1] * M[..., 2, 2] - M[..., 1, 2] * M[..., 2, 1])
        - M[..., 0, 1] * (M[..., 1, 0] * M[..., 2, 2] - M[..., 1, 2] * M[..., 2, 0])
        + M[..., 0, 2] * (M[..., 1, 0] * M[..., 2, 1] - M[..., 1, 1] * M[..., 2, 0])
    )


def _batch_det(M):
    k = M.shape[-1]
    if k == 1:
        return M[..., 0, 0]
    if k == 2:
        return _det2(M)
    if k == 3:
        return _det3(M)
    return np.linalg.det(M)


_ROWS_EXCEPT = {m: [[r for r in range(m) if r != i] for i in range(m)] for m in range(1, 9)}


def _batch_cofactor(M):
    """Cofactor matrices C with det(M) = sum_i M[i,j] C[i,j] for every j."""
    k = M.shape[-1]
    if k == 1:
        return np.ones_like(M)
    if k == 2:
        C = np.empty_like(M)
        C[..., 0, 0] = M[..., 1, 1]
        C[..., 0, 1] = -M[..., 1, 0]
        C[..., 1, 0] = -M[..., 0, 1]
        C[..., 1, 1] = M[..., 0, 0]
        return C
    if k == 3:
        C = np.empty_like(M)
        C[..., :, 0] = np.cross(M[..., :, 1], M[..., :, 2], axis=-1)
        C[..., :, 1] = np.cross(M[..., :, 2], M[..., :, 0], axis=-1)
        C[..., :, 2] = np.cross(M[..., :, 0], M[..., :, 1], axis=-1)
        return C
    if k == 4:
        C = np.empty_like(M)
        rex = _ROWS_EXCEPT[4]
        for i in range(4):
            sub = M[..., rex[i], :]
            for j in range(4):
                minor = sub[..., :, rex[j]]
                C[..., i, j] = ((-1) ** (i + j)) * _det3(minor)
        return C
    # SVD-based adjugate: cof(M) = det(U) det(V) * U diag(prod_{j != i} s_j) V^T;
    # exact in the limit of singular matrices, unlike det * inv(M)^T.
    U, S, Vt = np.linalg.svd(M)
    detU = np.linalg.det(U)
    detV = np.linalg.det(Vt)
    left = np.cumprod(np.concatenate([np.ones_like(S[..., :1]), S[..., :-1]], axis=-1), axis=-1)
    right = np.cumprod(np.concatenate([np.ones_like(S[..., :1]), S[..., :0:-1]], axis=-1), axis=-1)[..., ::-1]
    P = left * right
    core = np.einsum("...ik,...k,...kj->...ij", U, P, Vt)
    return (detU * detV)[..., None, None] * core


class FormEvaluator:
    """Vectorized evaluation and Euclidean gradient of a real form on frames.

    Frames are passed as arrays of shape (..., N, k) with frame vectors as
    columns; `values` returns shape (...,) and `grads` shape (..., N, k).
    """

    def __init__(self, form: AltForm):
        if isinstance(form, ComplexAltForm):
            raise TypeError("comass machinery operates on real forms; take real_part() first")
        self.dim = form.dim
        self.degree = form.degree
        items = sorted(form._raw_terms().items())
        from caliber.exterior import _indices_from_mask

        self.idx = np.array([_indices_from_mask(m) for m, _ in items], dtype=np.intp).reshape(len(items), form.degree)
        self.coeffs = np.array([float(c) for _, c in items])
        k = form.degree
        onehot = np.zeros((len(items), k, form.dim))
        for t in range(len(items)):
            for i in range(k):
                onehot[t, i, self.idx[t, i]] = 1.0
        self._onehot = onehot

    def values(self, V: np.ndarray) -> np.ndarray:
        M = V[..., self.idx, :]  # (..., T, k, k)
        return _batch_det(M) @ self.coeffs

    def grads(self, V: np.ndarray) -> np.ndarray:
        M = V[..., self.idx, :]
        C = _batch_cofactor(M)
        return np.einsum("t,...tij,tin->...nj", self.coeffs, C, self._onehot)


def batch_evaluate(form: AltForm, frames: np.ndarray) -> np.ndarray:
    """Evaluate a real k-form on a batch of row-vector frames (..., k, N)."""
    ev = FormEvaluator(form)
    V = np.swapaxes(np.asarray(frames, dtype=float), -1, -2)
    return ev.values(V)


# ---------------------------------------------------------------------------
# comass search


def _qf(X: np.ndarray) -> np.ndarray:
    """Batched thin-QR retraction with positive diagonal (orientation safe)."""
    Q, R = np.linalg.qr(X)
    d = np.sign(np.einsum("...ii->...i", R))
    d[d == 0] = 1.0
    return Q * d[..., None, :]


def canonical_frame(frame: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Deterministic orthonormal frame spanning the same oriented plane.

    Gram-Schmidt on the projections of the standard basis vectors, signs fixed
    by first significant coordinate, last vector flipped to match orientation.
    """
    frame = np.asarray(frame, dtype=float)
    k, n = frame.shape
    P = frame.T @ frame
    rows: list[np.ndarray] = []
    for i in range(n):
        w = P[:, i].copy()
        for u in rows:
            w -= (u @ w) * u
        nrm = np.linalg.norm(w)
        if nrm > 1e-8:
            rows.append(w / nrm)
        if len(rows) == k:
            break
    if len(rows) < k:
        raise ValueError("could not canonicalize frame")
    W = np.array(rows)
    for i in range(k):
        j = int(np.argmax(np.abs(W[i]) > tol))
        if W[i, j] < 0:
            W[i] = -W[i]
    if np.linalg.det(W @ frame.T) < 0:
        W[k - 1] = -W[k - 1]
    return W


def comass_search(form: AltForm, k: int | None = None, params: SearchParams = SearchParams()) -> ComassResult:
    """Multi-start Riemannian ascent for the comass of a real k-form.

    Returns a certified lower bound together with the best local maximizer
    found; deterministic given `params.seed`.
    """
    if isinstance(form, ComplexAltForm):
        raise TypeError("comass_search needs a real form; use real_part()/imag_part()")
    if k is None:
        k = form.degree
    if k != form.degree:
        raise ValueError(f"degree mismatch: form has degree {form.degree}, requested k={k}")
    if params.restarts < 1:
        raise ValueError("restarts must be >= 1")
    n = form.dim
    if form.is_zero() or k == 0:
        plane = Plane.from_vectors(np.eye(n)[:k], orthonormalize=False)
        value = abs(float(form._raw_terms().get(0, 0.0))) if k == 0 else 0.0
        return ComassResult(value, plane, params.restarts, 1.0, np.full(params.restarts, value),
                            np.repeat(plane.frame[None, :, :], params.restarts, axis=0))

    ev = FormEvaluator(form)
    R = params.restarts
    V = np.empty((R, n, k))
    for r in range(R):
        rng = np.random.default_rng(params.seed + r)
        V[r] = _qf(rng.standard_normal((n, k)))

    final_gn = np.full(R, np.inf)
    active = np.arange(R)
    for _ in range(params.max_iters):
        if active.size == 0:
            break
        Va = V[active]
        f0 = ev.values(Va)
        G = ev.grads(Va)
        VtG = np.einsum("bnk,bnl->bkl", Va, G)
        sym = 0.5 * (VtG + np.swapaxes(VtG, -1, -2))
        RG = G - np.einsum("bnk,bkl->bnl", Va, sym)
        gn2 = np.sum(RG * RG, axis=(1, 2))
        gn = np.sqrt(gn2)
        done = gn < params.tol
        final_gn[active[done]] = gn[done]
        live = ~done
        active, Va, f0, RG, gn2 = active[live], Va[live], f0[live], RG[live], gn2[live]
        if active.size == 0:
            break

        t = np.full(active.size, params.step0)
        pending = np.arange(active.size)
        accepted = np.zeros(active.size, dtype=bool)
        newV = Va.copy()
        for _h in range(params.max_halvings):
            if pending.size == 0:
                break
            cand = _qf(Va[pending] + t[pending, None, None] * RG[pending])
            f1 = ev.values(cand)
            ok = f1 >= f0[pending] + params.armijo_c1 * t[pending] * gn2[pending]
            hit = pending[ok]
            newV[hit] = cand[ok]
            accepted[hit] = True
            pending = pending[~ok]
            t[pending] *= params.shrink
        stuck = ~accepted
        final_gn[active[stuck]] = np.sqrt(gn2[stuck])
        V[active[accepted]] = newV[accepted]
        active = active[accepted]

    if active.size:
        Va = V[active]
        G = ev.grads(Va)
        VtG = np.einsum("bnk,bnl->bkl", Va, G)
        sym = 0.5 * (VtG + np.swapaxes(VtG, -1, -2))
        RG = G - np.einsum("bnk,bkl->bnl", Va, sym)
        final_gn[active] = np.sqrt(np.sum(RG * RG, axis=(1, 2)))

    values = ev.values(V)
    best = float(np.max(values))
    tied = np.flatnonzero(values >= best - 1e-9)
    best_frame = None
    best_key = None
    for r in tied:
        W = canonical_frame(V[r].T)
        key = np.round(W, 12).tobytes()
        if best_key is None or key < best_key:
            best_key = key
            best_frame = W
    argmax = Plane.from_vectors(best_frame, orthonormalize=True)
    value = float(ev.values(argmax.frame.T))
    converged = float(np.mean(final_gn < params.tol))
    return ComassResult(value, argmax, R, converged, values, np.swapaxes(V, -1, -2))


def skew_matrix(form: AltForm) -> np.ndarray:
    """The skew coefficient matrix S of a 2-form: form(X, Y) = X^T S Y."""
    if form.degree != 2:
        raise ValueError(f"expected a 2-form, got degree {form.degree}")
    S = np.zeros((form.dim, form.dim))
    for (i, j), c in form.terms.items():
        S[i, j] = float(c)
        S[j, i] = -float(c)
    return S


def comass_2form_exact(form: AltForm) -> float:
    """Comass of a 2-form: the spectral norm of its skew coefficient matrix."""
    S = skew_matrix(form)
    if not np.any(S):
        return 0.0
    return float(np.linalg.svd(S, compute_uv=False)[0])


def is_calibrated(form, plane: Plane, tol: float = 1e-9) -> bool:
    """Whether the form attains 1 on the oriented plane (comass-one forms only)."""
    if form.degree != plane.degree:
        raise ValueError(f"degree mismatch: form {form.degree}, plane {plane.degree}")
    val = evaluate(form, [np.asarray(row, dtype=float) for row in plane.frame])
    return bool(abs(val - 1) <= tol)


# ---------------------------------------------------------------------------
# line reduction and transported semi-calibrations


@dataclass(frozen=True)
class LineReduction:
    alpha: AltForm
    beta: AltForm
    basis: np.ndarray  # (N, N-1) orthonormal columns spanning e-perp
    alpha_comass: ComassResult | None = None


def _complete_to_basis(e: np.ndarray) -> np.ndarray:
    n = e.shape[0]
    cols = [e]
    for i in range(n):
        w = np.zeros(n)
        w[i] = 1.0
        for u in cols:
            w -= (u @ w) * u
        nrm = np.linalg.norm(w)
        if nrm > 1e-8:
            cols.append(w / nrm)
        if len(cols) == n:
            break
    return np.array(cols[1:]).T


def reduce_along_line(form, e, basis: np.ndarray | None = None, *,
                      lines_fill_calibrated_planes: bool = False,
                      params: SearchParams = SearchParams()) -> LineReduction:
    """Split form = e^flat ^ alpha + beta relative to a unit direction e.

    alpha and beta are returned as forms on e-perp, expressed in `basis`
    (orthonormal columns perpendicular to e; a deterministic completion is
    built when not supplied).  With `lines_fill_calibrated_planes`, alpha is
    additionally checked as a semi-calibration candidate by comass search.
    """
    e = np.asarray(e, dtype=float)
    if abs(np.linalg.norm(e) - 1.0) > 1e-9:
        raise ValueError("e must be a unit vector")
    n = e.shape[0]
    if form.dim != n:
        raise ValueError("dimension mismatch")
    if basis is None:
        basis = _complete_to_basis(e)
    else:
        basis = np.asarray(basis, dtype=float)
        if basis.shape != (n, n - 1):
            raise ValueError("basis must be N x (N-1)")
        if np.max(np.abs(basis.T @ basis - np.eye(n - 1))) > 1e-9 or np.max(np.abs(basis.T @ e)) > 1e-9:
            raise ValueError("basis must be orthonormal and perpendicular to e")
    alpha_full = interior(e, form)
    e_flat = AltForm.one_form(e.tolist())
    beta_full = form - wedge(e_flat, alpha_full)
    alpha = pullback(alpha_full, basis)
    beta = pullback(beta_full, basis)
    alpha_res = None
    if lines_fill_calibrated_planes:
        alpha_real = alpha.real_part() if isinstance(alpha, ComplexAltForm) else alpha
        alpha_res = comass_search(alpha_real, params=params)
    return LineReduction(alpha, beta, basis, alpha_res)


@dataclass(frozen=True)
class ScalingMetric:
    """The metric t^2 g_H + g_V for a declared coordinate split."""

    t: float
    h_indices: tuple[int, ...]


@dataclass(frozen=True)
class TransportedForm:
    form: AltForm
    metric: ScalingMetric | None

    def orthonormal_components(self) -> AltForm:
        """Components in an orthonormal coframe of the recorded metric.

        Comass with respect to the metric equals the Euclidean comass of the
        returned form.
        """
        if self.metric is None:
            return self.form
        h = set(self.metric.h_indices)
        t = self.metric.t
        raw = {}
        from caliber.exterior import _indices_from_mask

        for mask, c in self.form._raw_terms().items():
            m = sum(1 for i in _indices_from_mask(mask) if i in h)
            raw[mask] = c / (t**m)
        return AltForm(self.form.dim, self.form.degree, _raw=raw)


def transported_semicalibration(form: AltForm, *, scaling: tuple | None = None,
                                submersion: np.ndarray | None = None) -> TransportedForm:
    """Transport a semi-calibration through metric scaling or a submersion.

    scaling=(t, h_indices): requires every term of the form to have the same
    number m of indices inside the declared horizontal split; returns t^m f,
    which has comass one for the metric t^2 g_H + g_V.

    submersion=p (W x N matrix with orthonormal rows): returns the pullback
    p^* f, a semi-calibration for the Euclidean metric upstairs.
    """
    if (scaling is None) == (submersion is None):
        raise ValueError("exactly one of scaling= or submersion= must be given")
    if scaling is not None:
        t, h_indices = scaling
        if t <= 0:
            raise ValueError("scaling factor must be positive")
        h = set(int(i) for i in h_indices)
        from caliber.exterior import _indices_from_mask

        counts = {sum(1 for i in _indices_from_mask(m) if i in h) for m in form._raw_terms()}
        if len(counts) > 1:
            raise ValueError(f"form does not split: horizontal index counts {sorted(counts)}")
        m = counts.pop() if counts else 0
        return TransportedForm(form * (float(t) ** m), ScalingMetric(float(t), tuple(sorted(h))))
    p = np.asarray(submersion, dtype=float)
    w = p.shape[0]
    if np.max(np.abs(p @ p.T - np.eye(w))) > 1e-10:
        raise ValueError("map is not a Riemannian submersion (rows not orthonormal)")
    if form.dim != w:
        raise ValueError("dimension mismatch between form and submersion target")
    return TransportedForm(pullback(form, p), None)


# ---------------------------------------------------------------------------
# structure of maximizers


def splitting_support(form: AltForm, e, maximizers: Sequence[Plane], tol: float = 1e-8) -> bool:
    """True iff every supplied calibrated plane is orthogonal to e.

    Precondition: interior(e, form) = 0 (within 1e-12).
    """
    e = np.asarray(e, dtype=float)
    res = interior(e, form)
    if res.norm_inf() > 1e-12:
        raise ValueError("precondition failed: interior(e, form) != 0")
    for plane in maximizers:
        if np.max(np.abs(plane.frame @ e)) > tol:
            return False
    return True


def is_pure_type(form: AltForm, J: np.ndarray, tol: float = 1e-8) -> bool:
    """Projector test for J-type (k,0)+(0,k): the polarized double contraction
    with (u, Jv) vanishes for all basis pairs."""
    n = form.dim
    J = np.asarray(J, dtype=float)
    basis = np.eye(n)
    contracted = [interior(J[:, a], form) for a in range(n)]
    for a in range(n):
        for b in range(a, n):
            g = interior(basis[a], contracted[b]) + interior(basis[b], contracted[a])
            if g.norm_inf() > tol:
                return False
    return True


def isotropy_of_maximizers(form: AltForm, J: np.ndarray, omega: AltForm,
                           maximizers: Sequence[Plane], tol: float = 1e-8,
                           type_tol: float = 1e-8) -> bool:
    """True iff omega vanishes on every maximizer plane.

    Precondition (checked): form has J-type (k,0)+(0,k).
    """
    if not is_pure_type(form, J, type_tol):
        raise ValueError("type precondition failed: form is not of J-type (k,0)+(0,k)")
    S = skew_matrix(omega)
    for plane in maximizers:
        B = plane.frame @ S @ plane.frame.T
        if np.max(np.abs(B)) > tol:
            return False
    return True
