"""Sweeps, root finding and zero contours over the analytic and numeric quantities."""
from __future__ import annotations

import logging
import math
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Callable, Iterable, Literal, Optional, Sequence

import numpy as np
import pandas as pd
from scipy.optimize import minimize_scalar

from circuit_model import ZERO_BIAS, CircuitParams, FluxBias, flux_tuned_frequency
from config_utils import RunConfig
from errors import DomainError, PoleError
from hamiltonian import DEFAULT_TRUNCATION, BasisIndex, HamiltonianOptions, TruncationScheme
from perturbation import PAIRS, POLE_SOFT_GHZ, corrected_coupling_g_cr, decouple, detunings, effective_coupling_g_d
from spectrum import exchange_coupling, solve, sweep_levels, zz_numeric
from zz_analytic import ZZForm, pole_catalog, zz_total

_logger = logging.getLogger(__name__)

SweepVariable = Literal["phi_x", "phi_y", "omega_x", "omega_y"]
VARIABLES = ("phi_x", "phi_y", "omega_x", "omega_y")
MAX_GRID_POINTS = 1_000_000

ROOT_XTOL = 1e-12       # bracket width at which bisection stops
ROOT_FTOL = 1e-9        # 1 Hz in GHz; larger residuals mean the sign change was a pole
MAX_BISECTIONS = 200


@dataclass(frozen=True)
class SweepAxis:
    variable: SweepVariable
    start: float
    stop: float
    points: int

    def __post_init__(self):
        if self.variable not in VARIABLES:
            raise DomainError(f"unknown sweep variable {self.variable!r}")
        if not (math.isfinite(self.start) and math.isfinite(self.stop)):
            raise DomainError("sweep range must be finite")
        if self.points < 1:
            raise DomainError(f"a sweep needs at least one point, got {self.points}")
        if self.points == 1 and self.start != self.stop:
            raise DomainError("a one-point sweep needs start == stop")
        if self.points > 1 and not self.start < self.stop:
            raise DomainError(f"sweep start must be below stop ({self.start} >= {self.stop})")

    @property
    def column(self) -> str:
        return self.variable if self.variable.startswith("phi") else f"{self.variable}_ghz"

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.points)


@dataclass(frozen=True)
class SweepSpec:
    axis: SweepAxis
    second: Optional[SweepAxis] = None

    def __post_init__(self):
        if self.second is not None:
            if self.second.variable == self.axis.variable:
                raise DomainError("2D sweep needs two different variables")
            if self.axis.points * self.second.points > MAX_GRID_POINTS:
                raise DomainError(f"2D grid larger than {MAX_GRID_POINTS} points")

    @classmethod
    def line(cls, variable: SweepVariable, start: float, stop: float, points: int) -> "SweepSpec":
        return cls(SweepAxis(variable, start, stop, points))

    @property
    def axes(self) -> tuple[SweepAxis, ...]:
        return (self.axis,) if self.second is None else (self.axis, self.second)

    @property
    def is_2d(self) -> bool:
        return self.second is not None

    def assignments(self) -> list[dict[str, float]]:
        """Grid points in row-major order (first axis outermost)."""
        if self.second is None:
            return [{self.axis.variable: float(v)} for v in self.axis.values()]
        return [{self.axis.variable: float(u), self.second.variable: float(v)}
                for u in self.axis.values() for v in self.second.values()]


def apply_point(params: CircuitParams, bias: FluxBias, assignment: dict[str, float]) -> tuple[CircuitParams, FluxBias]:
    """Set sweep variables. ω_β variables fix the zero-bias frequency and zero that bias component."""
    phi = {"phi_x": bias.phi_x, "phi_y": bias.phi_y}
    for variable, value in assignment.items():
        if variable in ("phi_x", "phi_y"):
            phi[variable] = value
        elif variable == "omega_x":
            params = params.with_qubit_frequencies(omega_x=value)
            phi["phi_x"] = 0.0
        elif variable == "omega_y":
            params = params.with_qubit_frequencies(omega_y=value)
            phi["phi_y"] = 0.0
        else:
            raise DomainError(f"unknown sweep variable {variable!r}")
    return params, FluxBias(phi["phi_x"], phi["phi_y"])


@dataclass(frozen=True)
class Root:
    location: float
    bracket: tuple[float, float]
    residual: float


@dataclass(frozen=True)
class ContourChain:
    points: tuple[tuple[float, float], ...]
    closed: bool


@dataclass
class RootReport:
    variable: str
    roots: list[Root] = field(default_factory=list)
    contours: list[ContourChain] = field(default_factory=list)
    method: dict = field(default_factory=dict)
    degenerate: bool = False
    diagnostics: list[str] = field(default_factory=list)

    @property
    def locations(self) -> list[float]:
        return [r.location for r in self.roots]

    def frame(self) -> pd.DataFrame:
        if self.contours:
            rows = [{"chain": k, "closed": c.closed, "x": x, "y": y}
                    for k, c in enumerate(self.contours) for x, y in c.points]
            return pd.DataFrame(rows, columns=["chain", "closed", "x", "y"])
        rows = [{"root": r.location, "bracket_lo": r.bracket[0], "bracket_hi": r.bracket[1],
                 "residual": r.residual} for r in self.roots]
        return pd.DataFrame(rows, columns=["root", "bracket_lo", "bracket_hi", "residual"])


def _safe(f: Callable[[float], float]) -> Callable[[float], float]:
    def wrapped(x: float) -> float:
        try:
            return float(f(x))
        except PoleError:
            return math.nan
    return wrapped


def bisect(f: Callable[[float], float], lo: float, hi: float, f_lo: float, f_hi: float,
           xtol: float = ROOT_XTOL) -> Root:
    """Refine a sign-changing bracket by halving until it is narrower than xtol."""
    for _ in range(MAX_BISECTIONS):
        if hi - lo <= xtol:
            break
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if f_mid == 0.0:
            lo = hi = mid
            break
        if math.isnan(f_mid):
            raise PoleError("bisection", hi - lo)
        if (f_lo < 0) == (f_mid < 0):
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
    location = 0.5 * (lo + hi)
    return Root(location=location, bracket=(lo, hi), residual=f(location))


def find_roots(f: Callable[[float], float], xs: Sequence[float],
               pole_distances: Optional[Callable[[float], np.ndarray]] = None,
               variable: str = "x", xtol: float = ROOT_XTOL, ftol: float = ROOT_FTOL,
               soft: float = POLE_SOFT_GHZ) -> RootReport:
    """Scan ``xs`` for sign changes of f and bisect each clean bracket.

    f is in GHz. Brackets touching a NaN (pole error), or in which one of the
    signed ``pole_distances`` changes sign or comes within ``soft``, are skipped.
    """
    f = _safe(f)
    xs = np.asarray(xs, dtype=float)
    values = np.array([f(x) for x in xs])
    report = RootReport(variable=variable, method={"scan_points": int(xs.size), "refinement": "bisection",
                                                   "xtol": xtol, "ftol": ftol})
    finite = values[np.isfinite(values)]
    if finite.size == values.size and finite.size and np.all(finite == 0.0):
        report.degenerate = True
        report.diagnostics.append("function is identically zero on the grid")
        return report

    distances = None
    if pole_distances is not None:
        distances = np.array([pole_distances(x) for x in xs])

    sign_changes = 0
    poisoned = 0
    for k, x in enumerate(xs):
        if values[k] == 0.0:
            report.roots.append(Root(float(x), (float(x), float(x)), 0.0))
    for k in range(xs.size - 1):
        f0, f1 = values[k], values[k + 1]
        if math.isnan(f0) or math.isnan(f1):
            if not (math.isnan(f0) and math.isnan(f1)):
                poisoned += 1
                report.diagnostics.append(f"[{xs[k]:.9g}, {xs[k + 1]:.9g}] touches a pole")
            continue
        if f0 == 0.0 or f1 == 0.0 or (f0 < 0) == (f1 < 0):
            continue
        sign_changes += 1
        if distances is not None:
            d0, d1 = distances[k], distances[k + 1]
            crossing = (np.sign(d0) != np.sign(d1)) | (np.abs(d0) < soft) | (np.abs(d1) < soft)
            if np.any(crossing):
                poisoned += 1
                report.diagnostics.append(f"[{xs[k]:.9g}, {xs[k + 1]:.9g}] straddles a pole")
                continue
        try:
            root = bisect(f, float(xs[k]), float(xs[k + 1]), f0, f1, xtol)
        except PoleError:
            poisoned += 1
            report.diagnostics.append(f"[{xs[k]:.9g}, {xs[k + 1]:.9g}] hit a pole during refinement")
            continue
        if not abs(root.residual) < ftol:
            poisoned += 1
            report.diagnostics.append(f"sign change near {root.location:.9g} is a discontinuity "
                                      f"(residual {root.residual:.3e} GHz)")
            continue
        _logger.debug(f"root of {variable} at {root.location:.12g} (residual {root.residual:.2e})")
        report.roots.append(root)
    report.roots.sort(key=lambda r: r.location)
    if sign_changes and not report.roots:
        report.diagnostics.append(f"all {sign_changes} sign changes are poisoned by poles")
    report.method["sign_changes"] = sign_changes
    report.method["skipped_brackets"] = poisoned
    return report


# Marching squares. Corners are numbered counter-clockwise from (i, j):
# 0=(i,j) 1=(i+1,j) 2=(i+1,j+1) 3=(i,j+1); edge k joins corner k and k+1 mod 4.
# Each entry: (saddle, segments); for saddles segments is (center <= 0, center > 0).
MARCHING_SQUARES_TABLE = [
    (False, []),                                        # 0000
    (False, [(2, 3)]),                                  # 0001
    (False, [(1, 2)]),                                  # 0010
    (False, [(1, 3)]),                                  # 0011
    (False, [(0, 1)]),                                  # 0100
    (True, ([(0, 1), (2, 3)], [(3, 0), (1, 2)])),       # 0101
    (False, [(0, 2)]),                                  # 0110
    (False, [(3, 0)]),                                  # 0111
    (False, [(3, 0)]),                                  # 1000
    (False, [(0, 2)]),                                  # 1001
    (True, ([(3, 0), (1, 2)], [(0, 1), (2, 3)])),       # 1010
    (False, [(0, 1)]),                                  # 1011
    (False, [(1, 3)]),                                  # 1100
    (False, [(1, 2)]),                                  # 1101
    (False, [(2, 3)]),                                  # 1110
    (False, []),                                        # 1111
]


def values_to_index(values) -> int:
    n = 0
    for v in values:
        n = (n << 1) | int(v > 0)
    return n


def lerp_point(p0, p1, v0, v1):
    t = v0 / (v0 - v1)
    t = min(1.0, max(0.0, t))
    return (p0[0] * (1 - t) + t * p1[0], p0[1] * (1 - t) + t * p1[1])


def _cell_edge_keys(i: int, j: int) -> tuple:
    return (("x", i, j), ("y", i + 1, j), ("x", i, j + 1), ("y", i, j))


def zero_contours(xs: Sequence[float], ys: Sequence[float], values: np.ndarray) -> list[ContourChain]:
    """Zero level set of values[i, j] = f(xs[i], ys[j]) as linked point chains.

    Cells with a NaN corner are skipped. Chains are closed loops or end on the
    grid boundary (or next to a skipped cell).
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    values = np.asarray(values, dtype=float)
    if values.shape != (xs.size, ys.size):
        raise DomainError(f"values shape {values.shape} does not match grid {(xs.size, ys.size)}")

    def crossing(key):
        kind, i, j = key
        if kind == "x":
            return lerp_point((xs[i], ys[j]), (xs[i + 1], ys[j]), values[i, j], values[i + 1, j])
        return lerp_point((xs[i], ys[j]), (xs[i], ys[j + 1]), values[i, j], values[i, j + 1])

    segments: list[tuple] = []
    for i in range(xs.size - 1):
        for j in range(ys.size - 1):
            corners = (values[i, j], values[i + 1, j], values[i + 1, j + 1], values[i, j + 1])
            if any(math.isnan(v) for v in corners):
                continue
            saddle, edges = MARCHING_SQUARES_TABLE[values_to_index(corners)]
            if saddle:
                edges = edges[int(sum(corners) / 4.0 > 0)]
            keys = _cell_edge_keys(i, j)
            segments.extend((keys[e0], keys[e1]) for e0, e1 in edges)

    attached: dict[tuple, list[int]] = defaultdict(list)
    for k, (k0, k1) in enumerate(segments):
        attached[k0].append(k)
        attached[k1].append(k)

    used = [False] * len(segments)

    def walk(start_key, seg):
        keys = [start_key]
        current = start_key
        while seg is not None:
            used[seg] = True
            k0, k1 = segments[seg]
            current = k1 if k0 == current else k0
            keys.append(current)
            seg = next((s for s in attached[current] if not used[s]), None)
        return keys

    chains: list[ContourChain] = []
    # open chains first, starting from ends with a single segment
    for key, segs in sorted(attached.items()):
        if len(segs) == 1 and not used[segs[0]]:
            keys = walk(key, segs[0])
            chains.append(ContourChain(tuple(crossing(k) for k in keys), closed=False))
    for seg in range(len(segments)):
        if not used[seg]:
            keys = walk(segments[seg][0], seg)
            closed = keys[0] == keys[-1]
            chains.append(ContourChain(tuple(crossing(k) for k in keys), closed=closed))
    return chains


CouplingKind = Literal["g_d", "g_cr"]


def _coupling_value(params: CircuitParams, bias: FluxBias, which: CouplingKind) -> float:
    if which == "g_d":
        return effective_coupling_g_d(params, bias).value
    if which == "g_cr":
        return corrected_coupling_g_cr(params, bias).value
    raise DomainError(f"unknown coupling {which!r}")


def _resonance_distances(params: CircuitParams, bias: FluxBias) -> np.ndarray:
    det = detunings(params, bias)
    return np.array([det.delta[pair] for pair in PAIRS])


def find_switchoff(params: CircuitParams, sweep: SweepSpec, which: CouplingKind = "g_cr",
                   bias: FluxBias = ZERO_BIAS) -> RootReport:
    """Zeros of the effective qubit-qubit coupling along a line, or its zero contour on a 2D grid."""
    if sweep.is_2d:
        return _switchoff_contour(params, sweep, which, bias)
    axis = sweep.axis

    def at(x: float) -> tuple[CircuitParams, FluxBias]:
        return apply_point(params, bias, {axis.variable: x})

    report = find_roots(lambda x: _coupling_value(*at(x), which), axis.values(),
                        pole_distances=lambda x: _resonance_distances(*at(x)),
                        variable=axis.column)
    report.method["quantity"] = which
    return report


def _switchoff_contour(params: CircuitParams, sweep: SweepSpec, which: CouplingKind,
                       bias: FluxBias) -> RootReport:
    u_axis, v_axis = sweep.axes
    us, vs = u_axis.values(), v_axis.values()
    grid = np.empty((us.size, vs.size))
    for i, u in enumerate(us):
        for j, v in enumerate(vs):
            p, b = apply_point(params, bias, {u_axis.variable: u, v_axis.variable: v})
            try:
                grid[i, j] = _coupling_value(p, b, which)
            except PoleError:
                grid[i, j] = math.nan
    report = RootReport(variable=f"{u_axis.column},{v_axis.column}",
                        method={"quantity": which, "contour": "marching squares",
                                "grid": [int(us.size), int(vs.size)]})
    finite = grid[np.isfinite(grid)]
    if finite.size and np.all(finite == 0.0):
        report.degenerate = True
        report.diagnostics.append("function is identically zero on the grid")
        return report
    report.contours = zero_contours(us, vs, grid)
    return report


def _zz_pole_distances(params: CircuitParams, bias: FluxBias, include_cross_kerr: bool,
                       zz_form: ZZForm) -> np.ndarray:
    omega_x, omega_y = flux_tuned_frequency(params, bias)
    poles = pole_catalog(params, omega_x=omega_x, include_cross_kerr=include_cross_kerr, zz_form=zz_form)
    # catalog order is by location; key by condition so distances line up across the grid
    by_condition = {p.condition: p.omega_y for p in poles}
    return np.array([omega_y - by_condition[c] for c in sorted(by_condition)])


def find_zz_zero(params: CircuitParams, sweep: SweepSpec, include_cross_kerr: bool = False,
                 zz_form: ZZForm = "literal", bias: FluxBias = ZERO_BIAS) -> RootReport:
    """Zeros of the analytic static ZZ, skipping brackets that contain cataloged poles."""
    if sweep.is_2d:
        raise DomainError("ZZ zeros are searched along one axis")
    axis = sweep.axis

    def at(x: float) -> tuple[CircuitParams, FluxBias]:
        return apply_point(params, bias, {axis.variable: x})

    def xi(x: float) -> float:
        breakdown = zz_total(*at(x), include_cross_kerr=include_cross_kerr, zz_form=zz_form)
        return breakdown.xi_total / 1e3

    report = find_roots(xi, axis.values(),
                        pole_distances=lambda x: _zz_pole_distances(*at(x), include_cross_kerr, zz_form),
                        variable=axis.column)
    report.method.update({"quantity": "xi_total", "include_cross_kerr": include_cross_kerr,
                          "zz_form": zz_form})
    return report


@dataclass(frozen=True)
class AvoidedCrossing:
    location: float
    gap: float
    coupling: float


def find_min_gap(params: CircuitParams, axis: SweepAxis, first: BasisIndex | str, second: BasisIndex | str,
                 bias: FluxBias = ZERO_BIAS, trunc: TruncationScheme = DEFAULT_TRUNCATION,
                 options: Optional[HamiltonianOptions] = None) -> AvoidedCrossing:
    """Smallest splitting of the two dressed states carrying a bare pair along one axis."""
    def splitting(x: float) -> float:
        p, b = apply_point(params, bias, {axis.variable: x})
        return exchange_coupling(solve(p, b, trunc, options), first, second).gap

    xs = axis.values()
    gaps = np.array([splitting(x) for x in xs])
    k = int(np.argmin(gaps))
    lo = xs[max(k - 1, 0)]
    hi = xs[min(k + 1, xs.size - 1)]
    if hi > lo:
        result = minimize_scalar(splitting, bounds=(lo, hi), method="bounded", options={"xatol": 1e-7})
        x_min = float(result.x) if result.fun <= gaps[k] else float(xs[k])
    else:
        x_min = float(xs[k])
    p, b = apply_point(params, bias, {axis.variable: x_min})
    ex = exchange_coupling(solve(p, b, trunc, options), first, second)
    return AvoidedCrossing(location=x_min, gap=ex.gap, coupling=ex.coupling)


QUANTITIES = ("g_d", "g_cr", "g_in", "delta_omega", "decoupled", "zz", "zz_numeric")


@dataclass(frozen=True)
class EvaluationOptions:
    include_cross_kerr: bool = False
    zz_form: ZZForm = "literal"
    trunc: TruncationScheme = DEFAULT_TRUNCATION
    hamiltonian: HamiltonianOptions = HamiltonianOptions()
    workers: int = 1


def _nan_row(columns: Iterable[str]) -> dict[str, float]:
    return {c: math.nan for c in columns}


def _decoupled_columns(params: CircuitParams, bias: FluxBias, quantities: set[str]) -> dict:
    columns = {
        "g_d": ["g_d_mhz"],
        "g_cr": ["g_cr_mhz"],
        "g_in": ["g_in_a_mhz", "g_in_b_mhz"],
        "delta_omega": ["delta_omega_x_mhz", "delta_omega_y_mhz"],
        "decoupled": ["omega_d_x_ghz", "omega_d_y_ghz", "omega_cr_x_ghz", "omega_cr_y_ghz"],
    }
    wanted = [c for q in ("g_d", "g_cr", "g_in", "delta_omega", "decoupled") if q in quantities for c in columns[q]]
    if not wanted:
        return {}
    try:
        full = decouple(params, bias).as_row()
    except PoleError as e:
        _logger.debug(f"decoupling at a pole: {e}")
        return _nan_row(wanted)
    return {c: full[c] for c in wanted}


def evaluate_point(params: CircuitParams, bias: FluxBias, quantities: set[str],
                   options: EvaluationOptions = EvaluationOptions()) -> dict:
    """All requested quantities at one operating point, in fixed column order."""
    row = _decoupled_columns(params, bias, quantities)
    if "zz" in quantities:
        zz = zz_total(params, bias, include_cross_kerr=options.include_cross_kerr,
                      zz_form=options.zz_form)
        row.update(zz.as_row())
    if "zz_numeric" in quantities:
        numeric = zz_numeric(solve(params, bias, options.trunc, options.hamiltonian))
        row.update({"xi_numeric_mhz": numeric.value * 1e3, "numeric_unreliable": numeric.unreliable})
    return row


def _sweep_row(params: CircuitParams, bias: FluxBias, axes: tuple[SweepAxis, ...], quantities: set[str],
               options: EvaluationOptions, assignment: dict[str, float]) -> dict:
    p, b = apply_point(params, bias, assignment)
    omega_x, omega_y = flux_tuned_frequency(p, b)
    row: dict = {axis.column: assignment[axis.variable] for axis in axes}
    for axis in axes:
        if axis.variable == "phi_x":
            row["omega_x_ghz"] = omega_x
        elif axis.variable == "phi_y":
            row["omega_y_ghz"] = omega_y
    row.update(evaluate_point(p, b, quantities, options))
    return row


def run_sweep(config: RunConfig | CircuitParams, spec: SweepSpec, quantities: Iterable[str],
              options: EvaluationOptions = EvaluationOptions()) -> pd.DataFrame:
    """Evaluate quantities over the sweep grid; rows follow grid order.

    Columns: the sweep variables, the tuned qubit frequency of each swept
    flux, then the quantity columns. Points are independent and spread
    over ``options.workers`` processes when it is above one.
    """
    quantities = set(quantities)
    unknown = quantities - set(QUANTITIES)
    if unknown:
        raise DomainError(f"unknown quantities {', '.join(sorted(unknown))}")
    if options.workers < 1:
        raise DomainError(f"workers must be >= 1, got {options.workers}")
    if isinstance(config, RunConfig):
        params, bias = config.params, config.bias
    else:
        params, bias = config, ZERO_BIAS

    row_at = partial(_sweep_row, params, bias, spec.axes, quantities, options)
    assignments = spec.assignments()
    if options.workers == 1 or len(assignments) == 1:
        rows = [row_at(a) for a in assignments]
    else:
        chunk = max(1, len(assignments) // (4 * options.workers))
        with ProcessPoolExecutor(max_workers=options.workers) as pool:
            rows = list(pool.map(row_at, assignments, chunksize=chunk))
    _logger.debug(f"sweep evaluated {len(rows)} points on {options.workers} worker(s) "
                  f"for {', '.join(sorted(quantities))}")
    return pd.DataFrame(rows)


def run_level_sweep(config: RunConfig | CircuitParams, spec: SweepSpec, labels: Optional[Sequence[str]] = None,
                    tracked: bool = False, trunc: TruncationScheme = DEFAULT_TRUNCATION,
                    options: Optional[HamiltonianOptions] = None) -> pd.DataFrame:
    """Labeled (or adiabatically tracked) energy levels over the sweep grid."""
    if isinstance(config, RunConfig):
        params, bias = config.params, config.bias
    else:
        params, bias = config, ZERO_BIAS
    points = [apply_point(params, bias, a) for a in spec.assignments()]
    sweep = sweep_levels([p for p, _ in points], [b for _, b in points], trunc, options)
    frame = sweep.tracked_frame(labels) if tracked else sweep.labeled_frame(labels)
    for axis in spec.axes:
        if axis.variable.startswith("omega"):
            values = [a[axis.variable] for a in spec.assignments()]
            n_states = len(frame) // len(values)
            frame.insert(0, axis.column, np.repeat(values, n_states))
    return frame
