"""Direct/iterative SPD solves, Jacobi scaling, and extreme eigenvalues."""

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import CapabilityError, IndefiniteSystemError, SingularSystemError

# above this size dense factorization/eigendecomposition is refused
DENSE_LIMIT = 6000


@dataclass
class SolveReport:
    coefficients: np.ndarray
    method: str
    iterations: int
    relative_residual: float


@dataclass
class SpectrumReport:
    lambda_min: float
    lambda_max: float
    kappa: float
    preconditioned_kappa: float = None


def _rel_residual(matrix, x, b):
    nb = float(np.linalg.norm(b))
    if nb == 0.0:
        return float(np.linalg.norm(matrix @ x))
    return float(np.linalg.norm(matrix @ x - b)) / nb


def solve_spd(system, method="direct", tol=None, max_iter=None):
    """Solve the assembled SPD system.

    direct: dense Cholesky up to DENSE_LIMIT unknowns, sparse LU beyond;
    cg: hand-rolled conjugate gradients with breakdown detection.  The
    returned report always satisfies relative_residual <= tol."""
    b = system.rhs
    if method == "direct":
        if tol is None:
            tol = 1e-8
        if system.n <= DENSE_LIMIT:
            try:
                c, low = sla.cho_factor(system.dense(), check_finite=False)
                x = sla.cho_solve((c, low), b, check_finite=False)
            except np.linalg.LinAlgError as err:
                raise SingularSystemError(f"Cholesky factorization failed: {err}")
        else:
            try:
                lu = spla.splu(sp.csc_matrix(system.matrix))
                x = lu.solve(b)
            except RuntimeError as err:
                raise SingularSystemError(f"sparse factorization failed: {err}")
        resid = _rel_residual(system.matrix, x, b)
        if not np.isfinite(resid) or resid > tol:
            raise SingularSystemError(
                f"direct solve residual {resid:.3e} exceeds tolerance {tol:.1e}")
        return SolveReport(coefficients=x, method="direct", iterations=0,
                           relative_residual=resid)

    if method == "cg":
        if tol is None:
            tol = 1e-12
        if max_iter is None:
            max_iter = 20 * system.n
        x, its = _cg(system.matrix, b, tol, max_iter)
        resid = _rel_residual(system.matrix, x, b)
        if resid > tol:
            raise SingularSystemError(
                f"cg stalled at residual {resid:.3e} after {its} iterations")
        return SolveReport(coefficients=x, method="cg", iterations=its,
                           relative_residual=resid)

    raise ValueError(f"unknown solve method '{method}'")


def _cg(matrix, b, tol, max_iter):
    n = b.size
    x = np.zeros(n)
    r = b.copy()
    nb = float(np.linalg.norm(b))
    if nb == 0.0:
        return x, 0
    p = r.copy()
    rs = float(r @ r)
    for it in range(1, max_iter + 1):
        ap = matrix @ p
        pap = float(p @ ap)
        if pap <= 0.0:
            raise IndefiniteSystemError(
                f"negative curvature in cg at iteration {it} (p^T A p = {pap:.3e})")
        alpha = rs / pap
        x += alpha * p
        r -= alpha * ap
        rs_new = float(r @ r)
        if np.sqrt(rs_new) <= tol * nb:
            return x, it
        p = r + (rs_new / rs) * p
        rs = rs_new
    raise SingularSystemError(f"cg did not converge in {max_iter} iterations")


def jacobi_scale(system):
    """Symmetric diagonal scaling D^-1/2 A D^-1/2.

    Returns (scaled CSR matrix, scaling vector s = diag(A)^-1/2)."""
    d = system.matrix.diagonal()
    if (d <= 0.0).any():
        raise IndefiniteSystemError(
            "nonpositive diagonal entry; matrix cannot be positive definite")
    s = 1.0 / np.sqrt(d)
    coo = system.matrix.tocoo()
    data = coo.data * (s[coo.row] * s[coo.col])
    scaled = sp.coo_matrix((data, (coo.row, coo.col)), shape=coo.shape).tocsr()
    return scaled, s


# relative floor under which the smallest eigenvalue counts as zero
_SINGULAR_FLOOR = 1e-14


def _extremes_dense(matrix):
    vals = np.linalg.eigvalsh(matrix.toarray())
    return float(vals[0]), float(vals[-1])


def _kappa(lmin, lmax):
    if lmax <= 0.0:
        return np.inf
    if lmin <= _SINGULAR_FLOOR * lmax:
        return np.inf
    return lmax / lmin

def extreme_eigenvalues(system, jacobi=False):
    """Extreme eigenvalues and condition number of the assembled matrix.

    Dense symmetric eigendecomposition; systems above DENSE_LIMIT are
    refused.  kappa is +inf when the matrix is numerically singular
    (lambda_min <= 1e-14 lambda_max).  With ``jacobi`` the condition
    number after diagonal scaling is reported as well."""
    if system.n > DENSE_LIMIT:
        raise CapabilityError(
            f"eigenvalue extraction limited to {DENSE_LIMIT} unknowns, got {system.n}")
    lmin, lmax = _extremes_dense(system.matrix)
    report = SpectrumReport(lambda_min=lmin, lambda_max=lmax,
                            kappa=_kappa(lmin, lmax))
    if jacobi:
        scaled, _ = jacobi_scale(system)
        smin, smax = _extremes_dense(scaled)
        report.preconditioned_kappa = _kappa(smin, smax)
    return report
