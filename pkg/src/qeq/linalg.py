"""Dense complex matrices and superoperators.

A superoperator is stored as its transfer table: ``images[i, j]`` is the
image of the matrix unit ``E_ij`` of the source space.  Equality of two
superoperators is therefore an entrywise comparison of tables.

Zero-dimensional spaces are allowed throughout; every check on them is
vacuously true.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

DEFAULT_TOL = 1e-9
PSD_TOL = 1e-7


def as_matrix(a: object) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {m.shape}")
    return m


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product with left-major composite indices."""
    a, b = as_matrix(a), as_matrix(b)
    ra, ca = a.shape
    rb, cb = b.shape
    return np.einsum("ij,kl->ikjl", a, b).reshape(ra * rb, ca * cb)


def direct_sum(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Block-diagonal matrix ``[[a, 0], [0, b]]``."""
    a, b = as_matrix(a), as_matrix(b)
    out = np.zeros((a.shape[0] + b.shape[0], a.shape[1] + b.shape[1]), dtype=complex)
    out[: a.shape[0], : a.shape[1]] = a
    out[a.shape[0]:, a.shape[1]:] = b
    return out


def adjoint(a: np.ndarray) -> np.ndarray:
    return as_matrix(a).conj().T


def _max_dev(a: np.ndarray, b: np.ndarray) -> float:
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a - b)))


def is_unitary(u: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    """True iff both ``U†U`` and ``UU†`` are within ``tol`` of the identity, entrywise."""
    u = as_matrix(u)
    n, c = u.shape
    if n != c:
        raise ValueError(f"is_unitary needs a square matrix, got {u.shape}")
    eye = np.eye(n)
    return _max_dev(adjoint(u) @ u, eye) <= tol and _max_dev(u @ adjoint(u), eye) <= tol


def is_hermitian(a: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    a = as_matrix(a)
    return a.shape[0] == a.shape[1] and _max_dev(a, adjoint(a)) <= tol


def min_eigenvalue(a: np.ndarray) -> float:
    """Smallest eigenvalue of the Hermitian part of ``a`` (``inf`` for 0x0)."""
    a = as_matrix(a)
    if a.size == 0:
        return float("inf")
    h = (a + adjoint(a)) / 2
    return float(np.linalg.eigvalsh(h)[0])


def max_eigenvalue(a: np.ndarray) -> float:
    a = as_matrix(a)
    if a.size == 0:
        return float("-inf")
    h = (a + adjoint(a)) / 2
    return float(np.linalg.eigvalsh(h)[-1])


def is_psd(a: np.ndarray, tol: float = PSD_TOL) -> bool:
    return is_hermitian(a, max(tol, DEFAULT_TOL)) and min_eigenvalue(a) >= -tol


def is_density(rho: np.ndarray, tol: float = DEFAULT_TOL, psd_tol: float = PSD_TOL) -> bool:
    """Hermitian, positive semidefinite and of trace at most one."""
    rho = as_matrix(rho)
    if rho.shape[0] != rho.shape[1]:
        return False
    if rho.size == 0:
        return True
    return is_psd(rho, psd_tol) and np.trace(rho).real <= 1 + tol


def matrix_unit(n: int, i: int, j: int) -> np.ndarray:
    e = np.zeros((n, n), dtype=complex)
    e[i, j] = 1
    return e


def matrix_to_json(a: np.ndarray) -> str:
    a = as_matrix(a)
    entries = [[float(z.real), float(z.imag)] for z in a.reshape(-1)]
    return json.dumps({"rows": a.shape[0], "cols": a.shape[1], "entries": entries})


def matrix_from_json(text: str) -> np.ndarray:
    doc = json.loads(text)
    rows, cols = int(doc["rows"]), int(doc["cols"])
    entries = doc["entries"]
    if len(entries) != rows * cols:
        raise ValueError(f"expected {rows * cols} entries, found {len(entries)}")
    flat = np.array([complex(re, im) for re, im in entries], dtype=complex)
    return flat.reshape(rows, cols)


# ---------------------------------------------------------------------------
# Superoperators


@dataclass(frozen=True, eq=False)
class Superoperator:
    """A linear map from ``src_dim``-square to ``dst_dim``-square matrices.

    ``images`` has shape ``(src_dim, src_dim, dst_dim, dst_dim)``.
    """

    images: np.ndarray

    def __post_init__(self) -> None:
        img = np.asarray(self.images, dtype=complex)
        if img.ndim != 4 or img.shape[0] != img.shape[1] or img.shape[2] != img.shape[3]:
            raise ValueError(f"bad transfer-table shape {img.shape}")
        object.__setattr__(self, "images", img)

    @property
    def src_dim(self) -> int:
        return self.images.shape[0]

    @property
    def dst_dim(self) -> int:
        return self.images.shape[2]

    def apply(self, rho: np.ndarray) -> np.ndarray:
        rho = as_matrix(rho)
        if rho.shape != (self.src_dim, self.src_dim):
            raise ValueError(f"input of shape {rho.shape} for a map on dimension {self.src_dim}")
        return np.einsum("ij,ijab->ab", rho, self.images)

    def image(self, i: int, j: int) -> np.ndarray:
        return self.images[i, j]

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        return self.apply(rho)


def superop_identity(n: int) -> Superoperator:
    img = np.zeros((n, n, n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            img[i, j, i, j] = 1
    return Superoperator(img)


def superop_zero(src_dim: int, dst_dim: int) -> Superoperator:
    return Superoperator(np.zeros((src_dim, src_dim, dst_dim, dst_dim), dtype=complex))


def superop_conjugation(k: np.ndarray) -> Superoperator:
    """The map ``ρ ↦ K ρ K†`` for an arbitrary (not necessarily square) ``K``."""
    k = as_matrix(k)
    # images[i, j] = K E_ij K† = outer(K[:, i], conj(K[:, j]))
    img = np.einsum("ai,bj->ijab", k, k.conj())
    return Superoperator(img)


def superop_from_unitary(u: np.ndarray, tol: float = DEFAULT_TOL) -> Superoperator:
    u = as_matrix(u)
    if not is_unitary(u, tol):
        raise ValueError("superop_from_unitary: matrix is not unitary")
    return superop_conjugation(u)


def superop_prepare(state: np.ndarray) -> Superoperator:
    """The map from the one-dimensional space sending ``[c]`` to ``c·state``."""
    state = as_matrix(state)
    return Superoperator(state[None, None, :, :])


def superop_trace(n: int) -> Superoperator:
    """Trace onto the one-dimensional space."""
    img = np.zeros((n, n, 1, 1), dtype=complex)
    for i in range(n):
        img[i, i, 0, 0] = 1
    return Superoperator(img)


def superop_compose(g: Superoperator, f: Superoperator) -> Superoperator:
    """``g ∘ f``."""
    if f.dst_dim != g.src_dim:
        raise ValueError(f"cannot compose: {f.dst_dim} != {g.src_dim}")
    s, m, d = f.src_dim, f.dst_dim, g.dst_dim
    fm = f.images.reshape(s * s, m * m)
    gm = g.images.reshape(m * m, d * d)
    return Superoperator((fm @ gm).reshape(s, s, d, d))


def superop_tensor(f: Superoperator, g: Superoperator) -> Superoperator:
    s1, d1, s2, d2 = f.src_dim, f.dst_dim, g.src_dim, g.dst_dim
    img = np.einsum("ijab,klcd->ikjlacbd", f.images, g.images)
    return Superoperator(img.reshape(s1 * s2, s1 * s2, d1 * d2, d1 * d2))


def superop_sum(fs: Sequence[Superoperator]) -> Superoperator:
    if not fs:
        raise ValueError("superop_sum needs at least one summand")
    shape = fs[0].images.shape
    for f in fs:
        if f.images.shape != shape:
            raise ValueError(f"mismatched shapes {f.images.shape} and {shape}")
    return Superoperator(sum((f.images for f in fs[1:]), fs[0].images.copy()))


def superop_precompose_permutation(f: Superoperator, perm: Sequence[int]) -> Superoperator:
    """``f ∘ P*`` where ``P`` sends basis vector ``k`` to basis vector ``perm[k]``.

    ``P E_ij P† = E_{perm[i] perm[j]}``, so this is a reindexing of the table.
    """
    p = np.asarray(perm, dtype=int)
    return Superoperator(f.images[np.ix_(p, p)])


def superop_difference(f: Superoperator, g: Superoperator) -> tuple[float, tuple[int, int, int, int] | None]:
    """Largest entrywise deviation and the table index ``(i, j, a, b)`` where it occurs."""
    if f.images.shape != g.images.shape:
        raise ValueError(f"shape mismatch {f.images.shape} vs {g.images.shape}")
    if f.images.size == 0:
        return 0.0, None
    diff = np.abs(f.images - g.images)
    idx = np.unravel_index(int(np.argmax(diff)), diff.shape)
    return float(diff[idx]), tuple(int(k) for k in idx)  # type: ignore[return-value]


def superop_equal(f: Superoperator, g: Superoperator, tol: float = DEFAULT_TOL) -> bool:
    dev, _ = superop_difference(f, g)
    return dev <= tol


def choi_matrix(f: Superoperator) -> np.ndarray:
    """``Σ_ij E_ij ⊗ f(E_ij)``, indexed ``[(i, a), (j, b)]``."""
    s, d = f.src_dim, f.dst_dim
    return f.images.transpose(0, 2, 1, 3).reshape(s * d, s * d)


def is_completely_positive(f: Superoperator, tol: float = PSD_TOL) -> bool:
    c = choi_matrix(f)
    if c.size == 0:
        return True
    return is_hermitian(c, tol) and min_eigenvalue(c) >= -tol


def trace_form(f: Superoperator) -> np.ndarray:
    """Matrix ``M`` with ``Tr f(ρ) = Tr(M ρ)``."""
    return np.einsum("ijaa->ji", f.images)


def is_trace_nonincreasing(f: Superoperator, tol: float = DEFAULT_TOL) -> bool:
    """``Tr f(ρ) ≤ 1 + tol`` for every density matrix ``ρ`` of trace one."""
    if f.src_dim == 0:
        return True
    return max_eigenvalue(trace_form(f)) <= 1 + tol
