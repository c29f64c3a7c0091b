"""Cross-checks of the closed forms against independent references.

Used by ``qsync validate``.  Each check yields pass, warn or fail; only a
fail makes the run unsuccessful.  Randomised checks draw from a seeded
generator so reports are reproducible.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .gates import MatchingIndices, cu_suppression, matching_ratio, vb_cnot
from .hamiltonian import ControlState, Drive, SystemParams, ZERO_DRIVE, conditional_hamiltonian, propagator
from .oracle import IntegrationError, evolve, flip_trace
from .rwa import (
    effective_hamiltonian,
    non_rabi_angle,
    non_rabi_frequency,
    rabi_frequency,
    regime_check,
    transition_probability,
)
from .static import InitialAmplitudes, static_frame, static_occupation
from .sweep import solve_vb_numeric

DEFAULT_TOLERANCES = {
    "static": 1e-12,
    "rwa_closed_form": 1e-12,
    "matching": 1e-10,
    "ratio": 1e-12,
    "suppression": 1e-12,
    "static_oracle": 1e-8,
    "norm_drift": 1e-9,
}
DEFAULT_RWA_ERROR_BOUND = 0.05
INDEX_RANGE = range(1, 7)


@dataclass
class CheckResult:
    name: str
    status: str
    detail: str


@dataclass
class Report:
    results: list = field(default_factory=list)

    def add(self, name, status, detail):
        self.results.append(CheckResult(name, status, detail))

    @property
    def passed(self) -> bool:
        return all(r.status != "fail" for r in self.results)

    def render(self) -> str:
        width = max((len(r.name) for r in self.results), default=0)
        lines = [f"{r.status.upper():4}  {r.name:<{width}}  {r.detail}" for r in self.results]
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines) + "\n"


def _grade(report, name, error, tol, what="max error"):
    status = "pass" if error < tol else "fail"
    report.add(name, status, f"{what} {error:.3e} (tol {tol:.1e})")


def random_params(rng, n, delta_a=0.0) -> list[SystemParams]:
    values = rng.uniform(-2.0, 2.0, size=(n, 5))
    return [SystemParams(v[0], delta_a, v[2], v[3], v[4]) for v in values]


def static_closed_form_error(rng, samples: int) -> float:
    worst = 0.0
    for p in random_params(rng, samples):
        s = ControlState.UP if rng.random() < 0.5 else ControlState.DOWN
        init = InitialAmplitudes.from_angle(rng.uniform(0, 2 * math.pi))
        t = rng.uniform(0, 20)
        psi = propagator(conditional_hamiltonian(p, ZERO_DRIVE, s, 0.0), t) @ np.array([init.a, init.b])
        worst = max(worst, abs(abs(psi[0]) ** 2 - static_occupation(p, s, init, t)))
    return worst


def rwa_closed_form_error(rng, samples: int) -> float:
    worst = 0.0
    for p in random_params(rng, samples):
        d = Drive(v_a=0.0, v_b=rng.uniform(-1, 1), omega=rng.uniform(0.1, 4))
        s = ControlState.UP if rng.random() < 0.5 else ControlState.DOWN
        t = rng.uniform(0, 50)
        amp = propagator(effective_hamiltonian(p, d, s), t)[1, 0]
        worst = max(worst, abs(abs(amp) ** 2 - transition_probability(p, d, s, t)))
    return worst


def matching_errors(params) -> tuple[float, float, float]:
    """Worst (closed form vs bisection, frequency ratio, suppression) errors."""
    root_err = ratio_err = supp_err = 0.0
    for p in params:
        for n in INDEX_RANGE:
            for l in INDEX_RANGE:
                idx = MatchingIndices(n, l)
                v = vb_cnot(p, idx)
                root_err = max(root_err, abs(solve_vb_numeric(p, idx) - v) / abs(v))
                ratio = non_rabi_frequency(p, v) / rabi_frequency(p, v)
                ratio_err = max(ratio_err, abs(ratio - matching_ratio(idx)))
                leak = math.sin(non_rabi_angle(p, Drive(v_b=v))) ** 2
                supp_err = max(supp_err, abs(leak - cu_suppression(idx)))
    return root_err, ratio_err, supp_err


def run_checks(cfg) -> Report:
    section = cfg.raw.get("validate", {})
    tol = dict(DEFAULT_TOLERANCES, **section.get("tolerances", {}))
    samples = section.get("samples", 1000)
    bound = section.get("rwa_error_bound", DEFAULT_RWA_ERROR_BOUND)
    rng = np.random.default_rng(cfg.seed)
    p = cfg.system
    report = Report()

    _grade(report, "static closed form vs propagator", static_closed_form_error(rng, samples), tol["static"])
    _grade(report, "RWA closed form vs effective propagator", rwa_closed_form_error(rng, samples),
           tol["rwa_closed_form"])

    sync_params = [q for q in random_params(rng, max(samples // 50, 5)) if q.coupling and q.eps_b and q.delta_b]
    if p.coupling and p.eps_b and p.delta_b:
        sync_params.insert(0, p)
    root_err, ratio_err, supp_err = matching_errors(sync_params)
    _grade(report, "matching amplitude vs bisection", root_err, tol["matching"], "max rel error")
    _grade(report, "frequency ratio at matching amplitude", ratio_err, tol["ratio"])
    _grade(report, "non-Rabi suppression identity", supp_err, tol["suppression"])

    q = p.replace(delta_a=0.0)
    try:
        period = static_frame(q, ControlState.UP).period
        init = cfg.initial
        times = np.linspace(0.0, period, 41)
        trace = evolve(q, ZERO_DRIVE, np.array([init.a, init.b, 0, 0], dtype=complex), period,
                       cfg.integration, times=times)
        closed = np.array([static_occupation(q, ControlState.UP, init, t) for t in times])
        _grade(report, "static oracle vs closed form", float(np.max(np.abs(trace.populations[:, 0] - closed))),
               tol["static_oracle"])
    except (ValueError, IntegrationError) as exc:
        report.add("static oracle vs closed form", "fail", str(exc))

    _driven_checks(cfg, q, report, tol, bound)
    return report


def _driven_checks(cfg, q, report, tol, bound):
    try:
        d = cfg.drive_template.resolve(q)
    except ValueError as exc:
        report.add("driven checks", "warn", f"skipped: {exc}")
        return
    omega_r = rabi_frequency(q, d.v_b)
    if omega_r == 0:
        report.add("driven checks", "warn", "skipped: no drive on qubit B")
        return
    period = 2 * math.pi / omega_r
    times = np.linspace(0.0, period, 201)
    try:
        flips = flip_trace(q, d, times, cfg.integration)
    except IntegrationError as exc:
        report.add("oracle norm drift", "fail", str(exc))
        return
    psi0 = np.zeros(4, dtype=complex)
    psi0[1] = 1.0
    try:
        drift = evolve(q, d, psi0, 5 * period, cfg.integration, times=np.linspace(0, 5 * period, 11)).norm_drift
    except IntegrationError as exc:
        report.add("oracle norm drift", "fail", str(exc))
    else:
        _grade(report, "oracle norm drift (5 Rabi periods)", drift, tol["norm_drift"], "drift")

    closed = np.array([[transition_probability(q, d, s, t) for s in ControlState] for t in times])
    error = float(np.max(np.abs(flips - closed)))
    try:
        regime = regime_check(q, d, cfg.regime_threshold)
        in_regime = regime.in_regime
        ratios = ", ".join(f"{r:.3g}" for r in regime.ratios)
    except ValueError as exc:
        in_regime, ratios = False, str(exc)
    detail = f"max error {error:.3e} (bound {bound:.2g}); regime ratios {ratios}"
    if error < bound:
        report.add("RWA vs oracle", "pass", detail)
    elif in_regime:
        report.add("RWA vs oracle", "fail", detail)
    else:
        report.add("RWA vs oracle", "warn", detail + " -- outside RWA regime, advisory only")
