"""Seeded verification campaigns, one runner per command, aggregated into reports."""

from __future__ import annotations

import hashlib
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .kernel import GaussianRational, NilsliceError
from .slices import (
    OrbitIndex,
    SliceCoords,
    jm_triple,
    jordan_type,
    lambda_act_coords,
    lambda_act_matrix,
    nilpotent_rep,
    printed_weight_table_C,
    slice_point,
    valid_indices,
    weight_table,
)
from .spectra import (
    charpoly_identity_check,
    charpoly_identity_check_printed,
    is_regular,
    kleinian_check,
    spectral_class_of,
)
from .hilbert import (
    RepeatedSupport,
    b_fiber_partner,
    ideal_distance,
    ideal_point_from_coords,
    round_trip,
    same_fiber_sample,
    support_points,
    surface_residuals,
)
from .transversality import (
    fiber_jacobian_rank,
    jacobian_finite_difference,
    jacobian_numeric,
    numeric_rank,
    transversality_certificate,
)

SCHEMA = "nilslice.report/1"
FAMILIES = ("C", "D", "B")
COMMANDS = (
    "verify-charpoly",
    "verify-transversality",
    "verify-jm",
    "verify-lambda",
    "verify-embedding",
    "verify-kleinian",
    "verify-smoothness",
)
DEFAULT_SAMPLES = {
    "verify-charpoly": 25,
    "verify-lambda": 50,
    "verify-embedding": 100,
    "verify-smoothness": 10,
}


class ConfigError(NilsliceError):
    pass


@dataclass(frozen=True)
class CampaignConfig:
    kinds: tuple = FAMILIES
    m_values: tuple = (2, 3, 4, 5, 6)
    n: Optional[int] = None  # None: every valid n
    samples: Optional[int] = None  # None: per-command default
    seed: int = 0
    tol: float = 1e-9
    format: str = "json"

    def __post_init__(self):
        for k in self.kinds:
            if k not in FAMILIES:
                raise ConfigError(f"unknown kind {k!r}")
        if not self.m_values or min(self.m_values) < 1:
            raise ConfigError("m must be at least 1")
        if self.samples is not None and self.samples < 1:
            raise ConfigError("samples must be positive")
        if self.format not in ("json", "text"):
            raise ConfigError(f"unknown format {self.format!r}")
        if not self.tol > 0:
            raise ConfigError("tol must be positive")

    def samples_for(self, command: str) -> int:
        return self.samples if self.samples is not None else DEFAULT_SAMPLES.get(command, 1)

    def to_json(self) -> dict:
        d = asdict(self)
        d["kinds"] = list(self.kinds)
        d["m_values"] = list(self.m_values)
        return d


# ------------------------------------------------------------------ sampling


class SampleStream:
    """PCG64 stream keyed by (seed, cell id); rationals p/q with p in [-9, 9], q in [1, 9]."""

    def __init__(self, seed: int, cell_id: str):
        key = int.from_bytes(hashlib.sha256(cell_id.encode()).digest()[:8], "big")
        self.rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, key])))

    def rational(self) -> GaussianRational:
        p = int(self.rng.integers(-9, 10))
        q = int(self.rng.integers(1, 10))
        return GaussianRational(Fraction(p, q))

    def nonzero_rational(self) -> GaussianRational:
        while True:
            x = self.rational()
            if x:
                return x

    def coords(self, idx: OrbitIndex) -> SliceCoords:
        return SliceCoords.from_flat(idx, [self.rational() for _ in range(idx.dim)])


def cell_id(command: str, idx: OrbitIndex) -> str:
    return f"{command}:{idx}"


def _cell(idx: OrbitIndex, passed: bool, samples: int, **metrics) -> dict:
    return {"kind": idx.family, "m": idx.m, "n": idx.n, "passed": bool(passed), "samples": samples, "metrics": metrics}


def _rel_mu_error(a, b) -> float:
    """Matching distance between two multisets of complex numbers, relative."""
    a, b = list(a), list(b)
    scale = max([1.0] + [abs(x) for x in a + b])
    worst = 0.0
    for x in a:
        j = min(range(len(b)), key=lambda k: abs(b[k] - x))
        worst = max(worst, abs(b.pop(j) - x))
    return worst / scale


# ------------------------------------------------------------------ runners


def run_charpoly(idx: OrbitIndex, cfg: CampaignConfig) -> dict:
    st = SampleStream(cfg.seed, cell_id("verify-charpoly", idx))
    k = cfg.samples_for("verify-charpoly")
    nonzero = 0
    printed_zero = 0
    for _ in range(k):
        c = st.coords(idx)
        r = charpoly_identity_check(idx, c)
        nonzero += sum(1 for x in r.coeffs if x != 0)
        if idx.family != "D" and charpoly_identity_check_printed(idx, c).is_zero():
            printed_zero += 1
    metrics = {"nonzero_residual_coefficients": nonzero}
    if idx.family != "D":
        metrics["printed_form_exact_samples"] = printed_zero
    return _cell(idx, nonzero == 0, k, **metrics)


def run_transversality(idx: OrbitIndex, cfg: CampaignConfig) -> dict:
    cert = transversality_certificate(idx)
    ok = cert.verdict and cert.dim_V == idx.m + 2 * idx.n
    return _cell(idx, ok, 1, **{k: v for k, v in cert.to_json().items() if k not in ("kind", "m", "n")})


def run_jm(idx: OrbitIndex, cfg: CampaignConfig) -> dict:
    relations = jm_triple(idx).relations_hold()
    jordan = jordan_type(nilpotent_rep(idx))
    ok = relations and jordan == sorted(idx.partition(), reverse=True)
    return _cell(idx, ok, 1, relations=relations, jordan_type=jordan, partition=sorted(idx.partition(), reverse=True))


def run_lambda(idx: OrbitIndex, cfg: CampaignConfig) -> dict:
    st = SampleStream(cfg.seed, cell_id("verify-lambda", idx))
    k = cfg.samples_for("verify-lambda")
    H = jm_triple(idx).H
    agree = 0
    worst_mu = 0.0
    for _ in range(k):
        r, c = st.nonzero_rational(), st.coords(idx)
        S = slice_point(idx, c)
        if lambda_act_matrix(r, S, H) == slice_point(idx, lambda_act_coords(idx, r, c)):
            agree += 1
        tau = spectral_class_of(S)
        tau_r = spectral_class_of(slice_point(idx, lambda_act_coords(idx, r, c)))
        worst_mu = max(worst_mu, _rel_mu_error(tau_r.mu, tau.scaled(complex(r * r)).mu))
    metrics = {"matrix_vs_coordinate_agreement": agree, "mu_scaling_error": worst_mu,
               "weights": list(weight_table(idx))}
    ok = agree == k and worst_mu < cfg.tol
    if idx.family == "C":
        printed = printed_weight_table_C(idx)
        metrics["printed_weights"] = list(printed)
        metrics["printed_weights_match"] = printed == weight_table(idx)
        ok = ok and metrics["printed_weights_match"]
    return _cell(idx, ok, k, **metrics)


def _embedding_C_D(idx: OrbitIndex, cfg: CampaignConfig, st: SampleStream, k: int) -> dict:
    worst_res = worst_rt = 0.0
    repeated = degree_fail = 0
    distinct = pairs = 0
    for _ in range(k):
        c = st.coords(idx)
        tau = spectral_class_of(slice_point(idx, c))
        ip = ideal_point_from_coords(idx, c)
        degree_fail += not ip.degrees_ok()
        sp = support_points(ip)
        worst_res = max([worst_res] + surface_residuals(sp, tau, idx.family))
        try:
            worst_rt = max(worst_rt, ideal_distance(round_trip(sp, tau, idx), ip))
        except RepeatedSupport:
            repeated += 1
        try:
            c2 = same_fiber_sample(idx, c, st.rng)
        except ArithmeticError:
            continue
        pairs += 1
        sp2 = support_points(ideal_point_from_coords(idx, c2))
        distinct += sp.distance(sp2) > 1e-6 * sp.scale()
    simple = k - repeated
    ok = (worst_res < cfg.tol and worst_rt < 1e-8 and degree_fail == 0
          and simple >= 0.95 * k and distinct == pairs)
    return _cell(idx, ok, k, surface_residual=worst_res, round_trip_error=worst_rt,
                 repeated_support=repeated, degree_bound_failures=degree_fail,
                 same_fiber_pairs=pairs, distinct_support_pairs=distinct)


def _embedding_B(idx: OrbitIndex, cfg: CampaignConfig, st: SampleStream, k: int) -> dict:
    worst_res = worst_partner = 0.0
    partner_ok = distinct = pairs = 0
    for _ in range(k):
        c = st.coords(idx)
        tau = spectral_class_of(slice_point(idx, c))
        sp = support_points(ideal_point_from_coords(idx, c))
        worst_res = max([worst_res] + surface_residuals(sp, tau, "B"))
        d = sp.distance(support_points(ideal_point_from_coords(idx, b_fiber_partner(c))))
        worst_partner = max(worst_partner, d)
        partner_ok += d < 1e-9 * sp.scale()
        try:
            c2 = same_fiber_sample(idx, c, st.rng)
        except ArithmeticError:
            continue
        pairs += 1
        sp2 = support_points(ideal_point_from_coords(idx, c2))
        distinct += sp.distance(sp2) > 1e-6 * sp.scale()
    ok = worst_res < cfg.tol and partner_ok == k and distinct >= 0.99 * pairs
    return _cell(idx, ok, k, surface_residual=worst_res, partner_discrepancy=worst_partner,
                 partner_identical=partner_ok, same_fiber_pairs=pairs, distinct_support_pairs=distinct)


def run_embedding(idx: OrbitIndex, cfg: CampaignConfig) -> dict:
    st = SampleStream(cfg.seed, cell_id("verify-embedding", idx))
    k = cfg.samples_for("verify-embedding")
    if idx.family == "B":
        return _embedding_B(idx, cfg, st, k)
    return _embedding_C_D(idx, cfg, st, k)


def run_kleinian(idx: OrbitIndex, cfg: CampaignConfig) -> dict:
    r = kleinian_check(idx.family, idx.m)
    return _cell(idx, r["passed"], 1, type=r["type"], expected=r["expected"],
                 normal_form=r["normal_form"], vanishing=r["vanishing"])


def run_smoothness(idx: OrbitIndex, cfg: CampaignConfig) -> dict:
    st = SampleStream(cfg.seed, cell_id("verify-smoothness", idx))
    k = cfg.samples_for("verify-smoothness")
    full = 0
    worst_fd = 0.0
    lam_same = 0
    skipped = 0
    done = 0
    while done < k and skipped < 20 * k:
        c = st.coords(idx)
        if not is_regular(spectral_class_of(slice_point(idx, c))):
            skipped += 1
            continue
        done += 1
        J = jacobian_numeric(idx, c)
        rank = numeric_rank(J, 1e-8)
        full += rank == idx.m
        Jf = jacobian_finite_difference(idx, c)
        worst_fd = max(worst_fd, float(np.max(np.abs(J - Jf)) / max(1.0, float(np.max(np.abs(J))))))
        r = st.nonzero_rational()
        lam_same += fiber_jacobian_rank(idx, lambda_act_coords(idx, r, c)) == rank
    zero_rank = fiber_jacobian_rank(idx, SliceCoords.zero(idx))
    ok = done == k and full == k and worst_fd < 1e-6
    return _cell(idx, ok, done, full_rank=full, fd_agreement=worst_fd, lambda_rank_invariant=lam_same,
                 singular_samples_skipped=skipped, rank_at_zero=zero_rank)


RUNNERS: dict[str, Callable[[OrbitIndex, CampaignConfig], dict]] = {
    "verify-charpoly": run_charpoly,
    "verify-transversality": run_transversality,
    "verify-jm": run_jm,
    "verify-lambda": run_lambda,
    "verify-embedding": run_embedding,
    "verify-kleinian": run_kleinian,
    "verify-smoothness": run_smoothness,
}


# ------------------------------------------------------------------ cells


def cells(command: str, cfg: CampaignConfig) -> list[OrbitIndex]:
    out = []
    for fam in cfg.kinds:
        for m in cfg.m_values:
            if command == "verify-kleinian":
                idxs = [i for i in valid_indices(fam, m) if i.n == 1]
            else:
                idxs = valid_indices(fam, m)
                if command == "verify-embedding":
                    idxs = [i for i in idxs if i.n >= 1]
            if cfg.n is not None:
                idxs = [i for i in idxs if i.n == cfg.n]
            out.extend(idxs)
    return out


def _run_one(args) -> tuple[dict, float]:
    command, idx, cfg = args
    t0 = time.perf_counter()
    try:
        res = RUNNERS[command](idx, cfg)
    except NilsliceError as e:
        res = _cell(idx, False, 0, error=f"{type(e).__name__}: {e}")
    return res, time.perf_counter() - t0


def workers() -> int:
    env = os.environ.get("NILSLICE_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"NILSLICE_THREADS must be an integer, got {env!r}")
    return os.cpu_count() or 1


def run_campaign(command: str, cfg: CampaignConfig) -> dict:
    """Run one command (or report-all) and return the report dict."""
    commands = COMMANDS if command == "report-all" else (command,)
    for c in commands:
        if c not in RUNNERS:
            raise ConfigError(f"unknown command {c!r}")
    jobs = [(c, idx, cfg) for c in commands for idx in cells(c, cfg)]
    if cfg.n is not None and not jobs:
        raise ConfigError(f"n={cfg.n} is not valid for the requested kinds and m")
    nw = min(workers(), max(1, len(jobs)))
    if nw > 1:
        with ProcessPoolExecutor(max_workers=nw) as ex:
            results = list(ex.map(_run_one, jobs))
    else:
        results = [_run_one(j) for j in jobs]
    sections: dict[str, list] = {c: [] for c in commands}
    timings: dict[str, float] = {}
    for (c, idx, _), (res, dt) in zip(jobs, results):
        sections[c].append(res)
        timings[cell_id(c, idx)] = round(dt, 6)
    total = sum(len(v) for v in sections.values())
    passed = sum(r["passed"] for v in sections.values() for r in v)
    return {
        "schema": SCHEMA,
        "command": command,
        "config": cfg.to_json(),
        "results": sections,
        "summary": {"cells": total, "passed": passed, "failed": total - passed, "all_passed": passed == total},
        "timings": timings,
    }


def strip_timings(report: dict) -> dict:
    return {k: v for k, v in report.items() if k != "timings"}


def render_text(report: dict) -> str:
    lines = []
    for command, rows in report["results"].items():
        for r in rows:
            flag = "PASS" if r["passed"] else "FAIL"
            extra = " ".join(f"{k}={v}" for k, v in r["metrics"].items() if not isinstance(v, (list, dict)))
            lines.append(f"{flag} {command} {r['kind']}{r['m']}/n={r['n']} {extra}".rstrip())
    s = report["summary"]
    lines.append(f"{s['passed']}/{s['cells']} cells passed")
    return "\n".join(lines) + "\n"
