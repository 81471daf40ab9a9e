"""Sparse alternating k-forms on R^N.

Blades are stored as bitmasks over the standard basis, so a k-form is a map
from strictly increasing index lists to scalar coefficients.  Scalars may be
int, Fraction, or float; exact types stay exact through every operation.
Complex-valued forms are a pair of real forms (`ComplexAltForm`), and all
operations distribute over the pair.

Vectors are plain sequences / 1-D numpy arrays of length N.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

Scalar = Union[int, float, Fraction]

__all__ = [
    "AltForm",
    "ComplexAltForm",
    "wedge",
    "interior",
    "hodge",
    "evaluate",
    "pullback",
    "form_to_json",
    "form_from_json",
]


# ---------------------------------------------------------------------------
# bitmask blade helpers


def _mask_from_indices(indices: Iterable[int], dim: int) -> int:
    mask = 0
    prev = -1
    for i in indices:
        i = int(i)
        if i <= prev:
            raise ValueError(f"index list must be strictly increasing, got {tuple(indices)}")
        if not 0 <= i < dim:
            raise ValueError(f"index {i} out of range for dimension {dim}")
        mask |= 1 << i
        prev = i
    return mask


def _indices_from_mask(mask: int) -> tuple[int, ...]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return tuple(out)


def _merge_sign(m1: int, m2: int) -> int:
    """Sign of sorting the concatenation of two disjoint increasing lists."""
    inv = 0
    m = m2
    while m:
        low = m & -m
        j = low.bit_length() - 1
        inv ^= (m1 >> (j + 1)).bit_count() & 1
        m ^= low
    return -1 if inv else 1


def _drop_sign(mask: int, i: int) -> int:
    """Sign (-1)^p where p is the position of index i inside the blade."""
    return -1 if (mask & ((1 << i) - 1)).bit_count() & 1 else 1


# ---------------------------------------------------------------------------


class AltForm:
    """A real alternating k-form on R^N in canonical sparse storage.

    Instances are immutable in practice: no method mutates `terms`, and two
    forms compare equal iff dim, degree, and the canonicalized term maps are
    identical (exact comparison; use :meth:`approx_eq` for floats).
    """

    __slots__ = ("dim", "degree", "_terms")

    def __init__(self, dim: int, degree: int, terms: Mapping | None = None, *, _raw: dict | None = None):
        if degree < 0:
            raise ValueError(f"degree must be nonnegative, got {degree}")
        if degree > dim and (terms or _raw):
            raise ValueError(f"no nonzero forms of degree {degree} on R^{dim}")
        self.dim = int(dim)
        self.degree = int(degree)
        if _raw is not None:
            self._terms = {m: c for m, c in _raw.items() if c != 0}
        else:
            acc: dict[int, Scalar] = {}
            for key, coeff in (terms or {}).items():
                mask = key if isinstance(key, int) else _mask_from_indices(key, dim)
                if mask.bit_count() != degree:
                    raise ValueError(f"blade {key} has wrong length for degree {degree}")
                if mask >= (1 << dim):
                    raise ValueError(f"blade {key} out of range for dimension {dim}")
                acc[mask] = acc.get(mask, 0) + coeff
            self._terms = {m: c for m, c in acc.items() if c != 0}

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, dim: int, degree: int) -> "AltForm":
        return cls(dim, degree, _raw={})

    @classmethod
    def blade(cls, dim: int, indices: Sequence[int], coeff: Scalar = 1) -> "AltForm":
        mask = _mask_from_indices(indices, dim)
        return cls(dim, len(tuple(indices)), _raw={mask: coeff})

    @classmethod
    def constant(cls, dim: int, value: Scalar) -> "AltForm":
        return cls(dim, 0, _raw={0: value} if value != 0 else {})

    @classmethod
    def one_form(cls, covector: Sequence[Scalar]) -> "AltForm":
        cov = list(covector)
        return cls(len(cov), 1, _raw={1 << i: c for i, c in enumerate(cov) if c != 0})

    # -- views --------------------------------------------------------------

    @property
    def terms(self) -> dict[tuple[int, ...], Scalar]:
        return {_indices_from_mask(m): c for m, c in sorted(self._terms.items())}

    @property
    def scalar_kind(self) -> str:
        return "real"

    def coefficient(self, indices: Sequence[int]) -> Scalar:
        return self._terms.get(_mask_from_indices(indices, self.dim), 0)

    def num_terms(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def norm_inf(self) -> float:
        return max((abs(c) for c in self._terms.values()), default=0.0)

    # -- algebra ------------------------------------------------------------

    def __add__(self, other: "AltForm") -> "AltForm":
        self._check_compatible(other)
        acc = dict(self._terms)
        for m, c in other._terms.items():
            acc[m] = acc.get(m, 0) + c
        return AltForm(self.dim, self.degree, _raw=acc)

    def __sub__(self, other: "AltForm") -> "AltForm":
        return self + (-other)

    def __neg__(self) -> "AltForm":
        return AltForm(self.dim, self.degree, _raw={m: -c for m, c in self._terms.items()})

    def __mul__(self, scalar):
        if isinstance(scalar, complex):
            return ComplexAltForm(self * scalar.real, self * scalar.imag)
        return AltForm(self.dim, self.degree, _raw={m: c * scalar for m, c in self._terms.items()})

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        if isinstance(scalar, int):
            return self * Fraction(1, scalar)
        if isinstance(scalar, Fraction):
            return self * (1 / scalar)
        return self * (1.0 / scalar)

    def __xor__(self, other):
        return wedge(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, AltForm):
            return NotImplemented
        return self.dim == other.dim and self.degree == other.degree and self._terms == other._terms

    __hash__ = None  # mutable-ish container semantics

    def approx_eq(self, other: "AltForm", tol: float = 1e-9) -> bool:
        self._check_compatible(other)
        keys = set(self._terms) | set(other._terms)
        return all(abs(self._terms.get(m, 0) - other._terms.get(m, 0)) <= tol for m in keys)

    def wedge(self, other):
        return wedge(self, other)

    def real_part(self) -> "AltForm":
        return self

    def imag_part(self) -> "AltForm":
        return AltForm.zero(self.dim, self.degree)

    def to_float(self) -> "AltForm":
        return AltForm(self.dim, self.degree, _raw={m: float(c) for m, c in self._terms.items()})

    # -- plumbing -----------------------------------------------------------

    def _check_compatible(self, other: "AltForm") -> None:
        if self.dim != other.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")
        if self.degree != other.degree:
            raise ValueError(f"degree mismatch: {self.degree} vs {other.degree}")

    def __repr__(self) -> str:
        inside = ", ".join(f"{idx}: {c}" for idx, c in list(self.terms.items())[:6])
        more = "" if len(self._terms) <= 6 else f", ... ({len(self._terms)} terms)"
        return f"AltForm(dim={self.dim}, degree={self.degree}, {{{inside}{more}}})"

    # raw access for sibling modules
    def _raw_terms(self) -> dict[int, Scalar]:
        return self._terms


class ComplexAltForm:
    """A complex k-form stored as the pair (Re, Im) of real forms."""

    __slots__ = ("re", "im")

    def __init__(self, re: AltForm, im: AltForm):
        re._check_compatible(im)
        self.re = re
        self.im = im

    @property
    def dim(self) -> int:
        return self.re.dim

    @property
    def degree(self) -> int:
        return self.re.degree

    @property
    def scalar_kind(self) -> str:
        return "complex"

    def num_terms(self) -> int:
        masks = set(self.re._raw_terms()) | set(self.im._raw_terms())
        return len(masks)

    def is_zero(self) -> bool:
        return self.re.is_zero() and self.im.is_zero()

    def norm_inf(self) -> float:
        return max(self.re.norm_inf(), self.im.norm_inf())

    def conjugate(self) -> "ComplexAltForm":
        return ComplexAltForm(self.re, -self.im)

    def real_part(self) -> AltForm:
        return self.re

    def imag_part(self) -> AltForm:
        return self.im

    def __add__(self, other):
        other = _as_complex(other)
        return ComplexAltForm(self.re + other.re, self.im + other.im)

    def __sub__(self, other):
        other = _as_complex(other)
        return ComplexAltForm(self.re - other.re, self.im - other.im)

    def __neg__(self):
        return ComplexAltForm(-self.re, -self.im)

    def __mul__(self, scalar):
        if isinstance(scalar, complex):
            a, b = scalar.real, scalar.imag
        elif isinstance(scalar, tuple):
            a, b = scalar
        else:
            a, b = scalar, 0
        return ComplexAltForm(self.re * a - self.im * b, self.re * b + self.im * a)

    __rmul__ = __mul__

    def __xor__(self, other):
        return wedge(self, other)

    def wedge(self, other):
        return wedge(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ComplexAltForm):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    __hash__ = None

    def approx_eq(self, other, tol: float = 1e-9) -> bool:
        other = _as_complex(other)
        return self.re.approx_eq(other.re, tol) and self.im.approx_eq(other.im, tol)

    def __repr__(self) -> str:
        return f"ComplexAltForm(re={self.re!r}, im={self.im!r})"


def _as_complex(f) -> ComplexAltForm:
    if isinstance(f, ComplexAltForm):
        return f
    return ComplexAltForm(f, AltForm.zero(f.dim, f.degree))


# ---------------------------------------------------------------------------
# operations


def wedge(a, b):
    """Exterior product; graded-anticommutative, associative, bilinear."""
    if isinstance(a, ComplexAltForm) or isinstance(b, ComplexAltForm):
        ac, bc = _as_complex(a), _as_complex(b)
        return ComplexAltForm(
            wedge(ac.re, bc.re) - wedge(ac.im, bc.im),
            wedge(ac.re, bc.im) + wedge(ac.im, bc.re),
        )
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    degree = a.degree + b.degree
    if degree > a.dim:
        return AltForm.zero(a.dim, degree)
    acc: dict[int, Scalar] = {}
    for m1, c1 in a._raw_terms().items():
        for m2, c2 in b._raw_terms().items():
            if m1 & m2:
                continue
            m = m1 | m2
            c = c1 * c2 * _merge_sign(m1, m2)
            prev = acc.get(m)
            acc[m] = c if prev is None else prev + c
    return AltForm(a.dim, degree, _raw=acc)


def interior(v, a):
    """Interior product (contraction) of a vector with a form.

    Acts as an antiderivation of degree -1; contracting a 0-form is an error.
    """
    if isinstance(a, ComplexAltForm):
        return ComplexAltForm(interior(v, a.re), interior(v, a.im))
    entries = v.tolist() if isinstance(v, np.ndarray) else list(v)
    if len(entries) != a.dim:
        raise ValueError(f"dimension mismatch: vector has {len(entries)} entries, form dim {a.dim}")
    if a.degree == 0:
        raise ValueError("cannot contract a 0-form")
    acc: dict[int, Scalar] = {}
    for mask, c in a._raw_terms().items():
        m = mask
        while m:
            low = m & -m
            i = low.bit_length() - 1
            m ^= low
            vi = entries[i]
            if vi == 0:
                continue
            nm = mask ^ low
            term = c * vi * _drop_sign(mask, i)
            prev = acc.get(nm)
            acc[nm] = term if prev is None else prev + term
    return AltForm(a.dim, a.degree - 1, _raw=acc)


def hodge(a, orientation: int = 1):
    """Euclidean Hodge star; satisfies hodge(hodge(a)) = (-1)^{k(N-k)} a."""
    if isinstance(a, ComplexAltForm):
        return ComplexAltForm(hodge(a.re, orientation), hodge(a.im, orientation))
    if orientation not in (1, -1):
        raise ValueError("orientation must be +1 or -1")
    n, k = a.dim, a.degree
    full = (1 << n) - 1
    base = (k * (k - 1)) // 2
    acc: dict[int, Scalar] = {}
    for mask, c in a._raw_terms().items():
        s = -1 if (_index_sum(mask) - base) & 1 else 1
        acc[full ^ mask] = c * s * orientation
    return AltForm(n, n - k, _raw=acc)


def _index_sum(mask: int) -> int:
    total = 0
    while mask:
        low = mask & -mask
        total += low.bit_length() - 1
        mask ^= low
    return total


def evaluate(a, vectors: Sequence):
    """Evaluate the form on an ordered list of vectors (fully antisymmetric)."""
    if isinstance(a, ComplexAltForm):
        return complex(evaluate(a.re, vectors)) + 1j * complex(evaluate(a.im, vectors))
    vecs = list(vectors)
    if len(vecs) != a.degree:
        raise ValueError(f"arity mismatch: form degree {a.degree}, got {len(vecs)} vectors")
    out = a
    for v in vecs:
        out = interior(v, out)
    return out._raw_terms().get(0, 0)


def pullback(a, matrix):
    """Pull back a form on R^N along the linear map R^M -> R^N given by an N x M matrix."""
    if isinstance(a, ComplexAltForm):
        return ComplexAltForm(pullback(a.re, matrix), pullback(a.im, matrix))
    L = matrix
    exact = not isinstance(L, np.ndarray) or L.dtype == object
    if isinstance(L, np.ndarray):
        rows, cols = L.shape
    else:
        rows, cols = len(L), len(L[0])
    if rows != a.dim:
        raise ValueError(f"shape mismatch: form dim {a.dim}, matrix has {rows} rows")
    k = a.degree
    if k == 0:
        return AltForm(cols, 0, _raw=dict(a._raw_terms()))
    if k > cols:
        return AltForm.zero(cols, min(k, cols))
    if exact:
        return _pullback_exact(a, L, cols)
    return _pullback_float(a, np.asarray(L, dtype=float), cols)


def _pullback_float(a: AltForm, L: np.ndarray, cols: int) -> AltForm:
    from itertools import combinations

    k = a.degree
    combos = list(combinations(range(cols), k))
    col_idx = np.array(combos, dtype=int)  # (C, k)
    acc = np.zeros(len(combos))
    for mask, c in a._raw_terms().items():
        rows = _indices_from_mask(mask)
        sub = L[np.ix_(rows, range(cols))]  # (k, M)
        mats = sub[:, col_idx]  # (k, C, k)
        dets = np.linalg.det(np.transpose(mats, (1, 0, 2)))
        acc += float(c) * dets
    raw = {}
    for combo, val in zip(combos, acc):
        if val != 0.0:
            raw[_mask_from_indices(combo, cols)] = float(val)
    return AltForm(cols, k, _raw=raw)


def _pullback_exact(a: AltForm, L, cols: int) -> AltForm:
    from itertools import combinations

    if isinstance(L, np.ndarray):
        L = L.tolist()
    k = a.degree
    acc: dict[int, Scalar] = {}
    for mask, c in a._raw_terms().items():
        rows = _indices_from_mask(mask)
        for combo in combinations(range(cols), k):
            det = _det_exact([[L[r][j] for j in combo] for r in rows])
            if det == 0:
                continue
            m = _mask_from_indices(combo, cols)
            acc[m] = acc.get(m, 0) + c * det
    return AltForm(cols, k, _raw=acc)


def _det_exact(m) -> Scalar:
    n = len(m)
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    total = 0
    for j in range(n):
        if m[0][j] == 0:
            continue
        minor = [row[:j] + row[j + 1 :] for row in m[1:]]
        total += (-1) ** j * m[0][j] * _det_exact(minor)
    return total


# ---------------------------------------------------------------------------
# JSON schema: {"dim": N, "degree": k, "terms": [{"indices": [...], "re": x, "im": y}]}


def form_to_json(f) -> dict:
    cf = _as_complex(f) if isinstance(f, ComplexAltForm) else None
    dim = f.dim
    degree = f.degree
    if cf is None:
        entries = {m: (c, 0) for m, c in f._raw_terms().items()}
    else:
        entries = {}
        for m, c in cf.re._raw_terms().items():
            entries[m] = (c, 0)
        for m, c in cf.im._raw_terms().items():
            re_val = entries.get(m, (0, 0))[0]
            entries[m] = (re_val, c)
    terms = [
        {"indices": list(_indices_from_mask(m)), "re": float(re), "im": float(im)}
        for m, (re, im) in sorted(entries.items())
    ]
    return {"dim": dim, "degree": degree, "terms": terms}


def form_from_json(data) -> AltForm | ComplexAltForm:
    if isinstance(data, str):
        data = json.loads(data)
    dim, degree = int(data["dim"]), int(data["degree"])
    re_terms: dict[int, float] = {}
    im_terms: dict[int, float] = {}
    for t in data.get("terms", []):
        mask = _mask_from_indices(t["indices"], dim)
        if mask.bit_count() != degree:
            raise ValueError(f"term {t['indices']} does not have degree {degree}")
        re_terms[mask] = re_terms.get(mask, 0.0) + float(t.get("re", 0.0))
        im_terms[mask] = im_terms.get(mask, 0.0) + float(t.get("im", 0.0))
    re = AltForm(dim, degree, _raw=re_terms)
    im = AltForm(dim, degree, _raw=im_terms)
    if im.is_zero():
        return re
    return ComplexAltForm(re, im)
