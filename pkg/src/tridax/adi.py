"""ADI heat-diffusion drivers over batched 2-D/3-D meshes.

Each step forms an explicit right-hand side from the 5-point (2-D) or
7-point (3-D) second-difference stencil scaled by the diffusion
coefficient, runs one implicit tridiagonal sweep per dimension over it,
and accumulates the result into the field:

    d      <- gamma * sum_axes (u[-1] - 2*u[0] + u[+1])     (interior, 0 on boundary)
    d      <- sweep(x), sweep(y)[, sweep(z)]                 each updating d
    u      <- u + d

Interior sweep rows are (-gamma/2, 1 + gamma, -gamma/2); boundary rows are
pinned identity rows with zero right-hand side, so the field's boundary
values never change (Dirichlet, taken from the initial field). The
``literal_coefficients`` flag switches the sweep diagonal to the bare
``gamma`` form for model-comparison runs; that variant is not a consistent
time step and is off by default.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import ZeroDuration
from .mesh import Axis, ConstantLineCoefficients, Mesh, StoredCoefficients, solve_lines
from .precision import Precision

REPORT_SCHEMA = "tridax.report.v1"


@dataclass
class AdiConfig:
    """Parameters of one ADI run.

    ``unroll`` groups that many iterations into one reporting step; it
    never changes the arithmetic (loop unrolling is a pipeline
    optimization with no numerical effect).
    """

    gamma: float
    n_iter: int
    unroll: int = 1
    precision: Precision = Precision.FP64
    literal_coefficients: bool = False
    group: int = 32
    width: int = 8

    def __post_init__(self):
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")
        if self.n_iter < 1:
            raise ValueError("n_iter must be >= 1")
        if self.unroll < 1:
            raise ValueError("unroll must be >= 1")

    def sweep_coefficients(self) -> ConstantLineCoefficients:
        gamma = self.gamma
        literal = self.literal_coefficients

        def profile(n, dtype):
            gm = dtype.type(gamma)
            one = dtype.type(1)
            off = -(dtype.type(0.5) * gm)
            a = np.full(n, off, dtype=dtype)
            b = np.full(n, gm if literal else one + gm, dtype=dtype)
            c = np.full(n, off, dtype=dtype)
            # pinned identity rows on the boundary
            a[0] = a[-1] = 0
            c[0] = c[-1] = 0
            b[0] = b[-1] = one
            return a, b, c

        return ConstantLineCoefficients(profile)


@dataclass
class PhaseStats:
    seconds: float = 0.0
    bytes: int = 0

    @property
    def gb_per_s(self) -> float:
        return effective_bandwidth(self.bytes, self.seconds) if self.seconds > 0 else 0.0


@dataclass
class RunReport:
    """Per-phase timing/traffic and per-iteration update norms."""

    phases: dict[str, PhaseStats] = field(default_factory=dict)
    delta_inf: list[float] = field(default_factory=list)
    steps: list[dict] = field(default_factory=list)
    config: dict = field(default_factory=dict)

    def phase(self, name: str) -> PhaseStats:
        return self.phases.setdefault(name, PhaseStats())

    @property
    def total_seconds(self) -> float:
        return sum(p.seconds for p in self.phases.values())

    @property
    def total_bytes(self) -> int:
        return sum(p.bytes for p in self.phases.values())

    def to_dict(self) -> dict:
        return {
            "schema_version": REPORT_SCHEMA,
            "config": self.config,
            "phases": {
                name: {"seconds": p.seconds, "bytes": p.bytes, "gb_per_s": p.gb_per_s}
                for name, p in self.phases.items()
            },
            "total_seconds": self.total_seconds,
            "total_bytes": self.total_bytes,
            "effective_gb_per_s": (effective_bandwidth(self.total_bytes, self.total_seconds)
                                   if self.total_seconds > 0 else 0.0),
            "delta_inf": self.delta_inf,
            "steps": self.steps,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def csv_rows(self) -> list[list]:
        rows = [["schema_version", REPORT_SCHEMA],
                ["phase", "seconds", "bytes", "gb_per_s"]]
        for name, p in self.phases.items():
            rows.append([name, f"{p.seconds:.9f}", p.bytes, f"{p.gb_per_s:.6f}"])
        return rows


def effective_bandwidth(nbytes: float, seconds: float) -> float:
    """Logical traffic over wall time, in GB/s (1 GB = 1e9 bytes)."""
    if seconds <= 0:
        raise ZeroDuration(f"non-positive duration {seconds}")
    return nbytes / seconds / 1e9


def adi_rhs(u: Mesh, cfg: AdiConfig) -> tuple[ConstantLineCoefficients, Mesh]:
    """Explicit stencil phase: returns the sweep coefficient rule and ``d``.

    ``d`` is the scaled sum of per-axis second differences at interior
    points and zero on every boundary point.
    """
    arr = u.data
    if not np.all(np.isfinite(arr)):
        raise ValueError("field contains non-finite values")
    dtype = arr.dtype
    gm = dtype.type(cfg.gamma)
    two = dtype.type(2)
    d = Mesh(np.zeros_like(arr), u.spatial_ndim)
    if u.spatial_ndim == 2:
        core = (slice(None), slice(0, 1), slice(1, -1), slice(1, -1))
    else:
        core = (slice(None), slice(1, -1), slice(1, -1), slice(1, -1))
    cz, cy, cx = core[1], core[2], core[3]
    ctr = arr[:, cz, cy, cx]
    acc = (arr[:, cz, cy, :-2] - two * ctr) + arr[:, cz, cy, 2:]
    acc = acc + ((arr[:, cz, :-2, cx] - two * ctr) + arr[:, cz, 2:, cx])
    if u.spatial_ndim == 3:
        acc = acc + ((arr[:, :-2, cy, cx] - two * ctr) + arr[:, 2:, cy, cx])
    d.data[core] = gm * acc
    return cfg.sweep_coefficients(), d


def adi_step(u: Mesh, cfg: AdiConfig, *, threads: int = 1) -> tuple[Mesh, Mesh]:
    """One full step; returns the new field and the accumulated update."""
    for axis in u.solved_axes():
        if u.extent(axis) < 4:
            raise ValueError(f"axis {axis.value} extent {u.extent(axis)} < 4")
    coeffs, d = adi_rhs(u, cfg)
    for axis in u.solved_axes():
        solve_lines(d, coeffs, axis, "thomas", group=cfg.group, width=cfg.width,
                    out=d, threads=threads)
    u_next = Mesh(u.data + d.data, u.spatial_ndim)
    return u_next, d


def adi_run(u0: Mesh, cfg: AdiConfig, *, threads: int = 1) -> tuple[Mesh, RunReport]:
    """Run ``n_iter`` steps, accounting wall time and logical traffic.

    Per iteration the stencil phase reads one mesh and writes one; each
    sweep reads and writes one mesh (plus three coefficient meshes when
    coefficients are stored rather than generated — not the case here);
    the accumulate phase reads two meshes and writes one.
    """
    report = RunReport(config={
        "gamma": cfg.gamma, "n_iter": cfg.n_iter, "unroll": cfg.unroll,
        "precision": cfg.precision.value, "dims": list(u0.dims),
        "batch": u0.batch, "literal_coefficients": cfg.literal_coefficients,
    })
    u = u0.astype(cfg.precision) if u0.precision is not cfg.precision else u0.copy()
    mesh_bytes = u.nbytes
    axes = u.solved_axes()
    step_start = time.perf_counter()
    for it in range(cfg.n_iter):
        t0 = time.perf_counter()
        coeffs, d = adi_rhs(u, cfg)
        t1 = time.perf_counter()
        rhs = report.phase("rhs")
        rhs.seconds += t1 - t0
        rhs.bytes += 2 * mesh_bytes
        for axis in axes:
            t0 = time.perf_counter()
            solve_lines(d, coeffs, axis, "thomas", group=cfg.group,
                        width=cfg.width, out=d, threads=threads)
            t1 = time.perf_counter()
            sweep = report.phase(f"sweep_{axis.value}")
            sweep.seconds += t1 - t0
            sweep.bytes += 2 * mesh_bytes + (3 * mesh_bytes if coeffs.is_stored else 0)
        t0 = time.perf_counter()
        u = Mesh(u.data + d.data, u.spatial_ndim)
        t1 = time.perf_counter()
        upd = report.phase("update")
        upd.seconds += t1 - t0
        upd.bytes += 3 * mesh_bytes
        report.delta_inf.append(d.max_abs())
        if (it + 1) % cfg.unroll == 0 or it + 1 == cfg.n_iter:
            now = time.perf_counter()
            report.steps.append({"iterations": it + 1, "seconds": now - step_start})
            step_start = now
    return u, report


def logical_bytes_per_iteration(points: int, word_bytes: int, ndim: int,
                                stored_coefficients: bool = False) -> int:
    """Mesh traffic one ADI iteration touches, per the phase accounting.

    Stencil: 2 mesh transfers; each of the ``ndim`` sweeps: 2 (+3 with
    stored coefficients); accumulate: 3.
    """
    per_sweep = 2 + (3 if stored_coefficients else 0)
    touches = 2 + ndim * per_sweep + 3
    return touches * points * word_bytes
