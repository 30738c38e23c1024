"""Reference solutions evaluated slice by slice on a fixed mesh.

A reference object serves two views of the exact solution u: raw node values
u(x_i, t_m) and hat-averaged values (q_h u(., t_m))_i, the latter feeding the
q_2h-filtered error norms.

SeriesReference builds u by sine-mode superposition

    u(x, t) = sum_k [a_k cos(k t') + (b_k / k) sin(k t')] sin(k x'),

in the canonical frame.  On the grid, mode k is indistinguishable from its
alias: sin(k x_i) folds onto sin(r x_i) with r = k mod 2N (up to sign), and
when T' = pi the time factors fold with period lcm(2N, 2M) as well.  The
superposition is therefore summed class by class over that joint period,
which makes the truncation tail decay like the amplitude tail itself (the
mesh caps difference quotients at 2/h), instead of like a continuous
derivative series.  The remaining tail is estimated from the fitted decay of
the supplied coefficients and reported for gating.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.fft import dst

from .data import DataSpec, Profile, average_qh, hat_average_factor, sine_coefficients
from .errors import ContractViolation
from .grid import GridFn, MeshSpec
from .oracle import HarmonicData, canonical_mesh, exact_time_coefficients


class GridReference:
    """Reference backed by precomputed (M+1, N+1) arrays."""

    def __init__(self, mesh: MeshSpec, values: np.ndarray,
                 qh_values: np.ndarray | None = None):
        if values.shape != (mesh.M + 1, mesh.N + 1):
            raise ContractViolation("reference array shape does not match the mesh")
        self.mesh = mesh
        self._values = values
        self._qh = qh_values

    def slice_values(self, m: int) -> GridFn:
        return self._values[m].copy()

    def qh_slice_values(self, m: int) -> GridFn:
        if self._qh is None:
            raise ContractViolation("this reference carries no hat-averaged slices")
        return self._qh[m].copy()


class HarmonicReference:
    """Exact solution of a single-harmonic data family."""

    def __init__(self, mesh: MeshSpec, kind: HarmonicData):
        self.mesh = mesh
        self.kind = kind
        cm = canonical_mesh(mesh)
        self._coeffs = exact_time_coefficients(kind, cm.times())
        shape = np.sin(kind.k * cm.nodes())
        shape[0] = shape[-1] = 0.0
        self._shape = shape
        self._qh_factor = float(hat_average_factor(kind.k * cm.h))

    def slice_values(self, m: int) -> GridFn:
        return self._coeffs[m] * self._shape

    def qh_slice_values(self, m: int) -> GridFn:
        return self._qh_factor * self._coeffs[m] * self._shape


class CallableReference:
    """Reference from a vectorized evaluator u(x, t); hat averages by quadrature."""

    def __init__(self, mesh: MeshSpec, func, quadrature_nodes: int = 8):
        self.mesh = mesh
        self._func = func
        self._nodes = mesh.nodes()
        self._times = mesh.times()
        self._qnodes = quadrature_nodes

    def slice_values(self, m: int) -> GridFn:
        out = np.asarray(self._func(self._nodes, self._times[m]), dtype=float)
        out[0] = out[-1] = 0.0
        return out

    def qh_slice_values(self, m: int) -> GridFn:
        t = self._times[m]
        profile = Profile.from_callable(lambda x: self._func(x, t), self.mesh.X,
                                        quadrature_nodes=self._qnodes)
        return average_qh(profile, self.mesh)


def _fit_decay(amps: np.ndarray):
    """Fit |amp_k| ~ C k^-q on the top quarter of the index range.

    Coefficients that vanish up to roundoff (closed-form integration leaves
    ~1e-17 garbage in exactly-zero entries) are excluded from the fit.
    """
    k = np.arange(1, len(amps) + 1)
    scale = float(np.max(np.abs(amps), initial=0.0))
    if scale == 0.0:
        return 0.0, float("inf")
    lo = max(1, (3 * len(amps)) // 4)
    mask = (k >= lo) & (np.abs(amps) > 1e-13 * scale)
    if np.count_nonzero(mask) < 4:
        return 0.0, float("inf")
    lk = np.log(k[mask])
    la = np.log(np.abs(amps[mask]))
    slope, intercept = np.polyfit(lk, la, 1)
    return float(np.exp(intercept)), float(-slope)


def _tail_amp_sq(amps: np.ndarray) -> float:
    """Estimated sum of squared amplitudes beyond the supplied range."""
    c, q = _fit_decay(amps)
    if c == 0.0:
        return 0.0
    p = 2.0 * q
    if p <= 1.0:
        return float("inf")
    big_k = len(amps)
    return c ** 2 * big_k ** (1.0 - p) / (p - 1.0)


class SeriesReference:
    """Truncated sine-series superposition of the exact solution.

    Supports f = None only; forcing references come from HarmonicReference or
    a manufactured CallableReference.  n_modes defaults to fold_groups times
    the joint alias period when T' = pi (exact folding), else to 8 N.
    """

    def __init__(self, mesh: MeshSpec, data: DataSpec, n_modes: int | None = None,
                 fold_groups: int = 64):
        if data.f is not None:
            raise ContractViolation(
                "series reference supports zero forcing; use a harmonic or callable reference")
        self.mesh = mesh
        cm = canonical_mesh(mesh)
        self._cm = cm
        n, m = mesh.N, mesh.M

        # plain canonical amplitudes: a_k from u0, b_k from the rescaled u1
        joint = math.lcm(2 * n, 2 * m)
        exact_fold = abs(cm.T - math.pi) <= 1e-12 * math.pi
        if n_modes is None:
            n_modes = fold_groups * joint if exact_fold else 8 * n
        root = math.sqrt(2.0 / mesh.X)
        scale_t = mesh.a * math.pi / mesh.X
        a = sine_coefficients(data.u0, n_modes) * root
        b = sine_coefficients(data.u1, n_modes) * root / scale_t
        k = np.arange(1, n_modes + 1)
        qh_fac = hat_average_factor(k * cm.h)

        self.tail_estimate = self._estimate_tail(a, b, k, cm)

        if exact_fold:
            values, qh_values = self._synthesize_folded(a, b, k, qh_fac, joint)
        else:
            values, qh_values = self._synthesize_direct(a, b, k, qh_fac)
        self._values = values
        self._qh = qh_values

    # -- synthesis ---------------------------------------------------------
    def _space_fold(self, freqs: np.ndarray, rows: np.ndarray) -> np.ndarray:
        """Fold rows (one per frequency) onto the N-1 discrete sine modes."""
        n = self.mesh.N
        r = freqs % (2 * n)
        folded = np.zeros((n + 1, rows.shape[1]))
        low = r < n
        np.add.at(folded, np.where(low, r, 0), np.where(low[:, None], rows, 0.0))
        high = r > n
        np.subtract.at(folded, np.where(high, 2 * n - r, 0),
                       np.where(high[:, None], rows, 0.0))
        folded[0] = 0.0
        return folded[1:n]

    def _from_mode_coeffs(self, folded: np.ndarray) -> np.ndarray:
        """(N-1, M+1) discrete sine coefficients -> (M+1, N+1) node values."""
        vals = dst(folded, type=1, axis=0) / 2.0
        out = np.zeros((self.mesh.M + 1, self.mesh.N + 1))
        out[:, 1:-1] = vals.T
        return out

    def _synthesize_folded(self, a, b, k, qh_fac, joint):
        # collapse every continuous mode onto its joint space-time alias class
        classes = k % joint
        amp_cos = np.zeros(joint)
        amp_sin = np.zeros(joint)
        amp_cos_qh = np.zeros(joint)
        amp_sin_qh = np.zeros(joint)
        np.add.at(amp_cos, classes, a)
        np.add.at(amp_sin, classes, b / k)
        np.add.at(amp_cos_qh, classes, a * qh_fac)
        np.add.at(amp_sin_qh, classes, b / k * qh_fac)
        q = np.arange(joint)
        return self._synthesize(q, amp_cos, amp_sin, amp_cos_qh, amp_sin_qh)

    def _synthesize_direct(self, a, b, k, qh_fac):
        return self._synthesize(k, a, b / k, a * qh_fac, b / k * qh_fac)

    def _synthesize(self, freqs, amp_cos, amp_sin, amp_cos_qh, amp_sin_qh,
                    chunk: int = 2048):
        times = self._cm.times()
        n1 = self.mesh.N - 1
        folded = np.zeros((n1, len(times)))
        folded_qh = np.zeros((n1, len(times)))
        for lo in range(0, len(freqs), chunk):
            fc = freqs[lo:lo + chunk]
            phases = np.outer(fc, times)
            cos_t, sin_t = np.cos(phases), np.sin(phases)
            rows = amp_cos[lo:lo + chunk, None] * cos_t + amp_sin[lo:lo + chunk, None] * sin_t
            rows_qh = (amp_cos_qh[lo:lo + chunk, None] * cos_t
                       + amp_sin_qh[lo:lo + chunk, None] * sin_t)
            folded += self._space_fold(fc, rows)
            folded_qh += self._space_fold(fc, rows_qh)
        return self._from_mode_coeffs(folded), self._from_mode_coeffs(folded_qh)

    # -- tail --------------------------------------------------------------
    def _estimate_tail(self, a, b, k, cm) -> float:
        tail_sq = _tail_amp_sq(a) + _tail_amp_sq(b / k)
        if not np.isfinite(tail_sq):
            return float("inf")
        # aliased modes contribute at most 2/h per backward space difference
        # and 2/tau per backward time difference
        cap = 2.0 / cm.h + 2.0 / cm.tau
        return math.sqrt(math.pi / 2.0 * tail_sq) * cap

    # -- protocol ----------------------------------------------------------
    def slice_values(self, m: int) -> GridFn:
        return self._values[m].copy()

    def qh_slice_values(self, m: int) -> GridFn:
        return self._qh[m].copy()
