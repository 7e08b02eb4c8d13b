"""Command-line front end.

Evaluates group-summed kernels and transform pipelines on grids, enumerates
group balls, prints the explicit sup-norm constants, and runs the
deterministic invariant check suites.

Single evaluations and check reports are emitted as UTF-8 JSON with a
top-level ``"schema": 1`` field; grid sweeps are emitted as CSV.  With a fixed
``--seed`` the check report is byte-identical across runs.  Exit codes:
0 success, 1 failed check suite or numeric failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import cmath
import csv
import io
import json
import math
import re
import sys
from typing import Callable, Optional, Sequence

import numpy as np

from . import fuchsian, geom, kernels, shc, specfun
from .errors import PoincareKernelsError, UnknownSuite

__all__ = ["main"]

SCHEMA_VERSION = 1
DEFAULT_SEED = 104729

_KERNEL_ANCHORS = {
    "geom": "geometric-series-kernel",
    "resolvent": "resolvent-group-sum",
    "heat": "heat-group-sum",
    "poisson": "poisson-group-sum",
}


class _ConfigError(Exception):
    """Invalid command-line value; the message carries the dotted field path."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


# ---------------------------------------------------------------------------
# scalar / grid parsing
# ---------------------------------------------------------------------------

_UNIT_IMAG = re.compile(r"(^|[+-])j")


def _parse_complex(text: str, field: str) -> complex:
    raw = text.strip().lower().replace(" ", "")
    if not raw:
        raise _ConfigError(field, "empty scalar")
    norm = _UNIT_IMAG.sub(r"\g<1>1j", raw.replace("i", "j"))
    try:
        value = complex(norm)
    except ValueError:
        raise _ConfigError(field, f"cannot parse complex scalar {text!r}") from None
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise _ConfigError(field, f"non-finite scalar {text!r}")
    return value


def _parse_real(text: str, field: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise _ConfigError(field, f"cannot parse real scalar {text!r}") from None
    if not math.isfinite(value):
        raise _ConfigError(field, f"non-finite scalar {text!r}")
    return value


def _parse_point(text: str, field: str) -> geom.Point:
    value = _parse_complex(text, field)
    if not value.imag > 0.0:
        raise _ConfigError(field, f"point must lie in the upper half-plane, got {text!r}")
    return geom.Point(value.real, value.imag)


def _parse_grid(text: str, field: str) -> list[float]:
    raw = text.strip()
    if ":" in raw:
        parts = raw.split(":")
        if len(parts) != 3:
            raise _ConfigError(field, f"range grids are start:stop:count, got {text!r}")
        start = _parse_real(parts[0], field)
        stop = _parse_real(parts[1], field)
        try:
            count = int(parts[2])
        except ValueError:
            raise _ConfigError(field, f"grid count must be an integer, got {parts[2]!r}") from None
        if not 1 <= count <= 1_000_000:
            raise _ConfigError(field, f"grid count must be in [1, 1e6], got {count}")
        return [float(v) for v in np.linspace(start, stop, count)]
    values = [_parse_real(part, field) for part in raw.split(",") if part.strip() != ""]
    if not values:
        raise _ConfigError(field, f"empty grid {text!r}")
    return values


def _resolve_multiplier(choice: str, k: float, field: str) -> fuchsian.MultiplierSystem:
    if choice == "auto":
        kind = "trivial" if abs(k - round(k)) <= 1e-9 else "eta_power"
    elif choice in ("eta", "eta_power"):
        kind = "eta_power"
    else:
        kind = "trivial"
    try:
        return fuchsian.MultiplierSystem(kind, k)
    except PoincareKernelsError as exc:
        raise _ConfigError(field, str(exc)) from None


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


def _render_json(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _render_csv(fieldnames: Sequence[str], rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(fieldnames), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


def _write_text(text: str, output: Optional[str]) -> None:
    if output:
        with open(output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _numeric_failure(command: str, exc: PoincareKernelsError, output: Optional[str]) -> int:
    doc = {
        "schema": SCHEMA_VERSION,
        "command": command,
        "error": {"type": type(exc).__name__, "message": str(exc)},
    }
    _write_text(_render_json(doc), output)
    return 1


def _rel_residual(value: complex, reference: complex) -> float:
    return abs(value - reference) / max(abs(reference), 1e-300)


# ---------------------------------------------------------------------------
# kernel subcommand
# ---------------------------------------------------------------------------


def _run_kernel(args: argparse.Namespace) -> int:
    kind = args.kernel_kind
    command = f"kernel-{kind}"
    z = _parse_point(args.z, "kernel.z")
    w = _parse_point(args.w, "kernel.w")
    k = float(args.k)
    ms = _resolve_multiplier(args.multiplier, k, "kernel.multiplier")
    radius = _parse_real(args.radius, "kernel.R")
    if not radius >= 1.0:
        raise _ConfigError("kernel.R", f"truncation radius must be >= 1, got {radius}")
    budget = int(args.budget)
    if budget < 1:
        raise _ConfigError("kernel.budget", "budget must be positive")
    try:
        if kind in ("geom", "resolvent"):
            s = _parse_complex(args.s, "kernel.s")
            params = kernels.KernelParams(s=s, radius_sigma=radius, budget=budget)
            if kind == "geom":
                kv = kernels.geometric_kernel(z, w, params, ms)
            else:
                kv = kernels.resolvent_kernel(z, w, params, ms)
            record = kernels.kernel_record(z, w, s, k, radius, kv)
        elif kind == "heat":
            t = _parse_real(args.t, "kernel.t")
            if not t > 0.0:
                raise _ConfigError("kernel.t", f"time must be positive, got {t}")
            kv = kernels.heat_kernel_M(t, z, w, ms, radius, budget)
            record = kernels.kernel_record(z, w, complex(t), k, radius, kv)
            record["t"] = t
        else:
            u = _parse_real(args.u, "kernel.u")
            if not u > 0.0:
                raise _ConfigError("kernel.u", f"distance parameter must be positive, got {u}")
            big_z = _parse_complex(args.Z, "kernel.Z")
            kv = kernels.poisson_kernel_M(u, big_z, z, w, ms, radius, budget)
            record = kernels.kernel_record(z, w, big_z, k, radius, kv)
            record["u"] = u
    except PoincareKernelsError as exc:
        return _numeric_failure(command, exc, args.output)
    record["schema"] = SCHEMA_VERSION
    record["command"] = command
    record["multiplier"] = ms.kind
    record["anchor"] = _KERNEL_ANCHORS[kind]
    _write_text(_render_json(record), args.output)
    return 0


# ---------------------------------------------------------------------------
# transform subcommand
# ---------------------------------------------------------------------------

_TRANSFORM_DEFAULT_GRIDS = {
    "forward": "0,1,3",
    "inverse": "0,1,4",
    "roundtrip": "0,1,4",
    "h": "0,0.5,2,5",
}


def _run_transform(args: argparse.Namespace) -> int:
    kind = args.transform_kind
    command = f"transform-{kind}"
    k = float(args.k)
    s_cx = _parse_complex(args.s, "transform.s")
    if s_cx.imag != 0.0:
        raise _ConfigError("transform.s", "transform sweeps take real s")
    s = s_cx.real
    try:
        params = shc.WaveTestParams(complex(s), k)
    except PoincareKernelsError as exc:
        raise _ConfigError("transform.s", str(exc)) from None
    grid_text = args.grid if args.grid is not None else _TRANSFORM_DEFAULT_GRIDS[kind]
    grid = _parse_grid(grid_text, "transform.grid")
    rows: list[dict] = []
    try:
        if kind == "forward":
            profile = shc.ProfileFunction(
                lambda x: kernels.phi_s_closed(0.25 * x, s, k).real, s
            )
            fields = ["y", "q_forward", "q_closed", "rel_residual"]
            for y in grid:
                if y < 0.0:
                    raise _ConfigError("transform.grid", "forward grid needs y >= 0")
                got = complex(shc.q_forward(profile, y, k=k))
                ref = complex(shc.qs_value(params, y))
                rows.append(
                    {
                        "y": y,
                        "q_forward": got.real,
                        "q_closed": ref.real,
                        "rel_residual": _rel_residual(got, ref),
                    }
                )
        elif kind == "inverse":
            fields = ["x", "phi_inverse", "phi_closed", "rel_residual"]
            for x in grid:
                if x < 0.0:
                    raise _ConfigError("transform.grid", "inverse grid needs x >= 0")
                got = complex(shc.phi_inverse(lambda y: shc.qs_prime(params, y), x, k=k))
                ref = kernels.phi_s_closed(0.25 * x, s, k)
                rows.append(
                    {
                        "x": x,
                        "phi_inverse": got.real,
                        "phi_closed": ref.real,
                        "rel_residual": _rel_residual(got, ref),
                    }
                )
        elif kind == "roundtrip":
            fields = ["x", "phi_in", "phi_back", "rel_residual"]
            for x in grid:
                if x < 0.0:
                    raise _ConfigError("transform.grid", "roundtrip grid needs x >= 0")
                phi_in = kernels.phi_s_closed(0.25 * x, s, k)
                phi_back = complex(
                    shc.phi_inverse(lambda y: shc.qs_prime(params, y), x, k=k)
                )
                rows.append(
                    {
                        "x": x,
                        "phi_in": phi_in.real,
                        "phi_back": phi_back.real,
                        "rel_residual": _rel_residual(phi_back, phi_in),
                    }
                )
        else:
            g = shc.gs_even_test_function(params)
            fields = ["r", "h_quadrature", "h_closed", "rel_residual"]
            for r in grid:
                got = complex(shc.fourier_h(g, r))
                ref = complex(shc.h_gs_closed(params, r))
                rows.append(
                    {
                        "r": r,
                        "h_quadrature": got.real,
                        "h_closed": ref.real,
                        "rel_residual": _rel_residual(got, ref),
                    }
                )
    except PoincareKernelsError as exc:
        return _numeric_failure(command, exc, args.output)
    _write_text(_render_csv(fields, rows), args.output)
    return 0


# ---------------------------------------------------------------------------
# group subcommand
# ---------------------------------------------------------------------------


def _run_group(args: argparse.Namespace) -> int:
    kind = args.group_kind
    command = f"group-{kind}"
    z = _parse_point(args.z, "group.z")
    w = _parse_point(args.w, "group.w")
    try:
        if kind == "ball":
            radius = _parse_real(args.radius, "group.R")
            if not radius >= 1.0:
                raise _ConfigError("group.R", f"ball radius must be >= 1, got {radius}")
            ball = fuchsian.enumerate_ball(z, w, radius, int(args.budget))
            doc = {
                "schema": SCHEMA_VERSION,
                "command": command,
                "z": [z.x, z.y],
                "w": [w.x, w.y],
                "R": radius,
                "count": len(ball),
                "certified": ball.certified,
            }
            if args.list:
                doc["elements"] = ball.serialize()
        else:
            rho = _parse_real(args.rho, "group.rho")
            if not rho > 0.0:
                raise _ConfigError("group.rho", f"radius must be positive, got {rho}")
            doc = {
                "schema": SCHEMA_VERSION,
                "command": command,
                "z": [z.x, z.y],
                "w": [w.x, w.y],
                "rho": rho,
                "count": fuchsian.counting_N(rho, z, w),
            }
    except PoincareKernelsError as exc:
        return _numeric_failure(command, exc, args.output)
    _write_text(_render_json(doc), args.output)
    return 0


# ---------------------------------------------------------------------------
# constants subcommand
# ---------------------------------------------------------------------------


def _run_constants(args: argparse.Namespace) -> int:
    k = float(args.k)
    try:
        ctx = geom.WeightContext(k)
    except PoincareKernelsError as exc:
        raise _ConfigError("constants.k", str(exc)) from None
    doc = {
        "schema": SCHEMA_VERSION,
        "command": "constants",
        "k": k,
        "k1": ctx.k1,
        "k2": ctx.k2,
        "A": ctx.A,
        "lambda0": ctx.lambda0,
    }
    has_vol = args.vol is not None
    has_diam = args.diam is not None
    if has_vol != has_diam:
        raise _ConfigError("constants.vol", "--vol and --diam must be given together")
    if has_vol:
        try:
            consts = kernels.sup_norm_constants(
                kernels.SupNormInputs(k, int(args.d_dim), float(args.vol), float(args.diam))
            )
        except PoincareKernelsError as exc:
            raise _ConfigError("constants.vol", str(exc)) from None
        doc["volume"] = float(args.vol)
        doc["diameter"] = float(args.diam)
        doc["d_dim"] = int(args.d_dim)
        doc["C"] = consts["C"]
        doc["script_C"] = consts["script_C"]
    _write_text(_render_json(doc), args.output)
    return 0


# ---------------------------------------------------------------------------
# check suites
# ---------------------------------------------------------------------------


def _assert_row(anchor: str, tolerance: float, measured: float, passed: bool, samples: int) -> dict:
    return {
        "anchor": anchor,
        "tolerance": float(tolerance),
        "measured": float(measured),
        "passed": bool(passed),
        "samples": int(samples),
    }


def _random_point(rng: np.random.Generator) -> geom.Point:
    return geom.Point(float(rng.uniform(-2.0, 2.0)), float(10.0 ** rng.uniform(-1.0, 1.0)))


def _suite_gk_bound(rng: np.random.Generator, weight_k: float) -> list[dict]:
    n = 10_000
    violations = 0
    min_value = math.inf
    for _ in range(n):
        k = float(rng.uniform(-2.5, 2.5))
        s = abs(k) + float(np.exp(rng.uniform(math.log(0.15), math.log(5.0))))
        sigma = 1.0 + float(10.0 ** rng.uniform(-8.0, 2.0))
        res = kernels.gk_difference(sigma, s, k)
        if not res.bound_ok:
            violations += 1
        min_value = min(min_value, complex(res.value).real)
    return [
        _assert_row("difference-profile-bound", 0.0, float(violations), violations == 0, n),
        _assert_row("difference-profile-positivity", 0.0, min_value, min_value >= 0.0, n),
    ]


def _suite_multiplier(rng: np.random.Generator, weight_k: float) -> list[dict]:
    cases = [
        ("eta_power", 0.0),
        ("eta_power", 0.5),
        ("eta_power", 1.0),
        ("eta_power", 1.3),
        ("trivial", 0.0),
        ("trivial", 2.0),
    ]
    if all(abs(weight_k - k) > 1e-12 for _, k in cases):
        cases.append(("eta_power", float(weight_k)))
    minus_i = fuchsian.GroupElement(-1, 0, 0, -1)
    center_worst = 0.0
    comp_worst = 0.0
    n_pairs = 60
    for kind, k in cases:
        ms = fuchsian.MultiplierSystem(kind, k)
        ctx = geom.WeightContext(k)
        center_worst = max(
            center_worst,
            abs(fuchsian.chi(ms, fuchsian.IDENTITY) - 1.0),
            abs(fuchsian.chi(ms, minus_i) - cmath.exp(-2j * math.pi * k)),
        )
        for _ in range(n_pairs):
            g1 = fuchsian.random_word(rng)
            g2 = fuchsian.random_word(rng)
            omega = geom.omega_k(g1.to_mat2(), g2.to_mat2(), ctx)
            resid = abs(
                fuchsian.chi(ms, g1 @ g2)
                - omega * fuchsian.chi(ms, g1) * fuchsian.chi(ms, g2)
            )
            comp_worst = max(comp_worst, resid)
    return [
        _assert_row("multiplier-center-values", 1e-12, center_worst, center_worst <= 1e-12, 2 * len(cases)),
        _assert_row("multiplier-composition", 1e-10, comp_worst, comp_worst <= 1e-10, n_pairs * len(cases)),
    ]


def _suite_hrecurrence(rng: np.random.Generator, weight_k: float) -> list[dict]:
    overlap_worst = 0.0
    n_overlap = 0
    for s in (1.6, 2.5, 4.0):
        p = shc.WaveTestParams(complex(s), 0.0)
        for r in (0.0, 0.7, 2.0, 5.0):
            ref = shc.h_gs_closed(p, r)
            for n in (1, 2):
                overlap_worst = max(
                    overlap_worst, abs(shc.h_continued(p, r, n) - ref) / abs(ref)
                )
                n_overlap += 1
    indep_worst = 0.0
    n_indep = 0
    for s in (0.3, 0.55, 0.7, 0.85, 0.95):
        p = shc.WaveTestParams(complex(s), 0.0, strict=False)
        for r in (0.4, 1.3):
            deep = shc.h_continued(p, r, 2)
            gap = abs(shc.h_continued(p, r, 1) - deep)
            indep_worst = max(indep_worst, gap / max(1.0, abs(deep)))
            n_indep += 1
    return [
        _assert_row("spectral-continuation-overlap", 1e-11, overlap_worst, overlap_worst <= 1e-11, n_overlap),
        _assert_row("spectral-continuation-depth-independence", 1e-9, indep_worst, indep_worst <= 1e-9, n_indep),
    ]


def _suite_cocycle(rng: np.random.Generator, weight_k: float) -> list[dict]:
    n = 200
    worst = 0.0
    for _ in range(n):
        g1 = fuchsian.random_word(rng)
        g2 = fuchsian.random_word(rng)
        k = float(rng.uniform(-2.0, 2.0))
        ctx = geom.WeightContext(k)
        z = _random_point(rng)
        m1 = g1.to_mat2()
        m2 = g2.to_mat2()
        lhs = geom.j_phase(m1, geom.moebius_act(m2, z), ctx) * geom.j_phase(m2, z, ctx)
        rhs = geom.omega_k(m1, m2, ctx) * geom.j_phase((g1 @ g2).to_mat2(), z, ctx)
        worst = max(worst, abs(lhs - rhs))
    return [_assert_row("phase-cocycle", 1e-12, worst, worst <= 1e-12, n)]


def _suite_invariance(rng: np.random.Generator, weight_k: float) -> list[dict]:
    n = 200
    worst = 0.0
    for _ in range(n):
        g = fuchsian.random_word(rng)
        k = float(rng.uniform(-2.0, 2.0))
        ctx = geom.WeightContext(k)
        z = _random_point(rng)
        w = _random_point(rng)
        m = g.to_mat2()
        lhs = geom.h_k(geom.moebius_act(m, z), geom.moebius_act(m, w), ctx)
        rhs = (
            geom.j_phase(m, z, ctx)
            * geom.j_phase(m, w, ctx).conjugate()
            * geom.h_k(z, w, ctx)
        )
        worst = max(worst, abs(lhs - rhs))
    return [_assert_row("point-pair-phase-equivariance", 1e-12, worst, worst <= 1e-12, n)]


def _suite_ball(rng: np.random.Generator, weight_k: float) -> list[dict]:
    rows = []
    z_i = geom.Point(0.0, 1.0)
    small = sorted(g.as_tuple() for g in fuchsian.enumerate_ball(z_i, z_i, 1.01).elements)
    want = sorted([(1, 0, 0, 1), (-1, 0, 0, -1), (0, -1, 1, 0), (0, 1, -1, 0)])
    rows.append(_assert_row("unit-ball-at-i", 0.0, float(len(small)), small == want, 1))
    n_i = fuchsian.counting_N(0.1, z_i, z_i)
    rows.append(_assert_row("orbit-count-small-radius", 0.0, float(n_i), n_i == 4, 1))
    z_2i = geom.Point(0.0, 2.0)
    n_2i = fuchsian.counting_N(0.1, z_2i, z_2i)
    rows.append(_assert_row("orbit-count-generic-point", 0.0, float(n_2i), n_2i == 2, 1))
    z = _random_point(rng)
    w = _random_point(rng)
    radius = 12.0
    fwd = fuchsian.enumerate_ball(z, w, radius)
    bwd = {g.as_tuple() for g in fuchsian.enumerate_ball(w, z, radius).elements}
    distinct = {g.as_tuple() for g in fwd.elements}
    inv_ok = all(
        g.inverse().as_tuple() in bwd
        for g in fwd.elements
        if fuchsian.sigma_of(g, z, w) <= radius - 1e-6
    )
    member_ok = all(fuchsian.sigma_of(g, z, w) <= radius + 1e-9 for g in fwd.elements)
    rows.append(
        _assert_row(
            "ball-inverse-closure",
            0.0,
            float(len(fwd.elements)),
            inv_ok and len(distinct) == len(fwd.elements),
            len(fwd.elements),
        )
    )
    rows.append(_assert_row("ball-membership", 0.0, float(len(fwd.elements)), member_ok, len(fwd.elements)))
    return rows


def _suite_contiguous(rng: np.random.Generator, weight_k: float) -> list[dict]:
    n = 50
    worst = 0.0
    for _ in range(n):
        a = float(rng.uniform(-2.5, 2.5))
        b = float(rng.uniform(-2.5, 2.5))
        c = float(rng.uniform(0.3, 4.0))
        x = float(rng.uniform(-0.75, 0.75))
        lhs = specfun.gauss_2f1(a, b, c, x) - specfun.gauss_2f1(a, b, c + 1.0, x)
        rhs = (a * b * x) / (c * (c + 1.0)) * specfun.gauss_2f1(a + 1.0, b + 1.0, c + 2.0, x)
        resid = abs(lhs - rhs) / max(1.0, abs(lhs), abs(rhs))
        worst = max(worst, resid)
    return [_assert_row("hypergeometric-contiguous-shift", 1e-13, worst, worst <= 1e-13, n)]


def _suite_subordination(rng: np.random.Generator, weight_k: float) -> list[dict]:
    worst = 0.0
    n = 0
    for lam in (0.25, 1.0, 4.0):
        for a in (0.5, 1.0, 2.0):
            worst = max(worst, kernels.subordination_check(a, lam))
            n += 1
    return [_assert_row("heat-to-decay-bridge", 1e-9, worst, worst <= 1e-9, n)]


_SUITES: list[tuple[str, Callable[[np.random.Generator, float], list[dict]]]] = [
    ("gk_bound", _suite_gk_bound),
    ("multiplier", _suite_multiplier),
    ("hrecurrence", _suite_hrecurrence),
    ("cocycle", _suite_cocycle),
    ("invariance", _suite_invariance),
    ("ball", _suite_ball),
    ("contiguous", _suite_contiguous),
    ("subordination", _suite_subordination),
]


def _run_check(args: argparse.Namespace) -> int:
    known = [name for name, _ in _SUITES]
    requested = list(args.suites)
    if "all" in requested:
        selected = set(known)
    else:
        for name in requested:
            if name not in known:
                raise UnknownSuite(
                    f"unknown suite {name!r}; known suites: {', '.join(['all'] + known)}"
                )
        selected = set(requested)
    seed = int(args.seed)
    if not 0 <= seed < 2**64:
        raise _ConfigError("check.seed", "seed must be a 64-bit unsigned integer")
    weight_k = float(args.k)
    suites_out = []
    failures = 0
    for idx, (name, fn) in enumerate(_SUITES):
        if name not in selected:
            continue
        rng = np.random.default_rng([seed, idx])
        try:
            assertions = fn(rng, weight_k)
        except PoincareKernelsError as exc:
            assertions = [
                {
                    "anchor": f"{name}-execution",
                    "tolerance": 0.0,
                    "measured": None,
                    "passed": False,
                    "samples": 0,
                    "error": f"{type(exc).__name__}: {exc}",
                }
            ]
        passed = all(row["passed"] for row in assertions)
        if not passed:
            failures += 1
        suites_out.append({"name": name, "passed": passed, "assertions": assertions})
    doc = {
        "schema": SCHEMA_VERSION,
        "command": "check",
        "seed": seed,
        "weight_k": weight_k,
        "suites": suites_out,
        "all_passed": failures == 0,
    }
    _write_text(_render_json(doc), args.output)
    return 0 if failures == 0 else 1


# ---------------------------------------------------------------------------
# parser assembly
# ---------------------------------------------------------------------------


def _add_output(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--output", "-o", default=None, help="write to this path instead of stdout")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="poincare-kernels",
        description="Weighted point-pair kernels, multiplier systems and transform pipelines.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_kernel = sub.add_parser("kernel", help="evaluate a group-summed kernel at one point pair")
    k_sub = p_kernel.add_subparsers(dest="kernel_kind", required=True)
    for kind, blurb in [
        ("geom", "geometric-series kernel (regular on the diagonal)"),
        ("resolvent", "resolvent kernel (singular on the diagonal)"),
        ("heat", "heat kernel at time t"),
        ("poisson", "subordinated kernel at spectral shift Z"),
    ]:
        pk = k_sub.add_parser(kind, help=blurb)
        pk.add_argument("--z", required=True, help='base point, e.g. "0.3+1.7i"')
        pk.add_argument("--w", required=True, help='second point, e.g. "2.4i"')
        pk.add_argument("--k", type=float, default=0.0, help="real weight (default 0)")
        pk.add_argument(
            "--multiplier",
            choices=["auto", "trivial", "eta", "eta_power"],
            default="auto",
            help="multiplier system; auto picks trivial for integer k",
        )
        pk.add_argument("--R", dest="radius", default="40", help="sigma-ball truncation radius")
        pk.add_argument("--budget", type=int, default=10_000_000, help="enumeration candidate cap")
        if kind in ("geom", "resolvent"):
            pk.add_argument("--s", required=True, help="spectral parameter")
        elif kind == "heat":
            pk.add_argument("--t", required=True, help="positive time")
        else:
            pk.add_argument("--u", required=True, help="positive distance parameter")
            pk.add_argument("--Z", required=True, help="spectral shift")
        _add_output(pk)
        pk.set_defaults(handler=_run_kernel)

    p_transform = sub.add_parser("transform", help="transform-pipeline sweeps against closed forms")
    t_sub = p_transform.add_subparsers(dest="transform_kind", required=True)
    for kind, blurb in [
        ("forward", "profile-to-horocycle step against the closed form"),
        ("inverse", "horocycle-to-profile step against the closed form"),
        ("roundtrip", "profile -> horocycle -> profile closure"),
        ("h", "even Fourier transform of the wave family against the closed form"),
    ]:
        pt = t_sub.add_parser(kind, help=blurb)
        pt.add_argument("--s", required=True, help="real spectral parameter, > max(1, |k|)")
        pt.add_argument("--k", type=float, default=0.0, help="real weight (default 0)")
        pt.add_argument("--grid", default=None, help='evaluation grid: "a,b,c" or "start:stop:count"')
        _add_output(pt)
        pt.set_defaults(handler=_run_transform)

    p_group = sub.add_parser("group", help="group-ball enumeration and orbit counting")
    g_sub = p_group.add_subparsers(dest="group_kind", required=True)
    pgb = g_sub.add_parser("ball", help="enumerate the sigma-ball between two points")
    pgb.add_argument("--z", required=True)
    pgb.add_argument("--w", required=True)
    pgb.add_argument("--R", dest="radius", required=True, help="sigma radius, >= 1")
    pgb.add_argument("--budget", type=int, default=10_000_000)
    pgb.add_argument("--list", action="store_true", help="include the matrix entries in the record")
    _add_output(pgb)
    pgb.set_defaults(handler=_run_group)
    pgc = g_sub.add_parser("count", help="count orbit points within hyperbolic distance rho")
    pgc.add_argument("--z", required=True)
    pgc.add_argument("--w", required=True)
    pgc.add_argument("--rho", required=True, help="hyperbolic distance radius, > 0")
    _add_output(pgc)
    pgc.set_defaults(handler=_run_group)

    p_const = sub.add_parser("constants", help="weight split and explicit sup-norm constants")
    p_const.add_argument("--k", type=float, required=True, help="real weight")
    p_const.add_argument("--d-dim", dest="d_dim", type=int, default=1, help="multiplier dimension")
    p_const.add_argument("--vol", type=float, default=None, help="hyperbolic volume of the domain")
    p_const.add_argument("--diam", type=float, default=None, help="diameter of the truncated domain")
    _add_output(p_const)
    p_const.set_defaults(handler=_run_constants)

    p_check = sub.add_parser("check", help="run deterministic invariant check suites")
    p_check.add_argument(
        "suites",
        nargs="+",
        metavar="SUITE",
        help="suite names, or 'all' (known: %s)" % ", ".join(name for name, _ in _SUITES),
    )
    p_check.add_argument("--seed", type=int, default=DEFAULT_SEED, help="64-bit unsigned seed")
    p_check.add_argument("--k", type=float, default=0.5, help="extra weight fed to the multiplier suite")
    _add_output(p_check)
    p_check.set_defaults(handler=_run_check)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        if code is None:
            return 0
        return code if isinstance(code, int) else 2
    try:
        return args.handler(args)
    except _ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except PoincareKernelsError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
