"""Parameter-sweep engine and deterministic CSV/JSON output.

A sweep evaluates one quantity (a witness, the sink strength, or a
full-model/simplified-model ratio) on a rectangular (kappa/eps, gamma/eps)
grid at a configurable time specification:

* ``max_over_period``  - maximum over one period [0, T] per cell,
* ``fixed_fraction:f`` - at t = f * T(cell),
* ``fixed_time:t``     - at a fixed eps*t for every cell.

Everything is vectorized across grid cells (coefficients broadcast, the
witness kernel runs on flat batches, and the golden-section refinement of the
per-period maxima advances all cells simultaneously).  Output is written
atomically and is byte-identical for identical configurations, regardless of
worker count: cells are independent and results are assembled in grid order
(gamma outer, kappa inner, both ascending).
"""

from __future__ import annotations

import enum
import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from . import backend
from ._version import __version__ as _version
from .coeffs import CoefficientModel, closed_form_coefficient_arrays
from .core import EP_TOL_DEFAULT

__all__ = [
    "SweepQuantity",
    "TimeSpec",
    "GridSpec",
    "SweepConfig",
    "SweepResult",
    "run_sweep",
    "write_result",
    "parse_config_file",
    "max_over_period_grid",
    "witness_grid_at_times",
    "lambda_grid",
    "regime_grid",
]

FLAG_TOKENS = {
    backend.FLAG_EXCEEDS_GAUSSIAN: "exceeds_gaussian_bound",
    backend.FLAG_NONPHYSICAL: "nonphysical",
    backend.FLAG_COMPLEX_SYMPLECTIC: "complex_symplectic",
}

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
_QNAMES = ("tau", "tau1", "tau2", "en")


class SweepQuantity(enum.Enum):
    TAU = "tau"
    TAU1 = "tau1"
    TAU2 = "tau2"
    EN = "en"
    LAMBDA = "lambda"
    RATIO_TAU1 = "ratio_tau1"
    RATIO_EN = "ratio_en"


class TimeSpecKind(enum.Enum):
    MAX_OVER_PERIOD = "max_over_period"
    FIXED_FRACTION = "fixed_fraction"
    FIXED_TIME = "fixed_time"


@dataclass(frozen=True)
class TimeSpec:
    kind: TimeSpecKind
    value: float = 0.0  # fraction f or fixed eps*t

    def __post_init__(self):
        if self.kind is TimeSpecKind.FIXED_FRACTION and not self.value > 0:
            raise ValueError("fixed_fraction requires f > 0")
        if self.kind is TimeSpecKind.FIXED_TIME and self.value < 0:
            raise ValueError("fixed_time requires eps*t >= 0")

    def label(self) -> str:
        if self.kind is TimeSpecKind.MAX_OVER_PERIOD:
            return self.kind.value
        return f"{self.kind.value}:{self.value:.17g}"

    @classmethod
    def parse(cls, text: str) -> "TimeSpec":
        if text == "max_over_period":
            return cls(TimeSpecKind.MAX_OVER_PERIOD)
        for kind in (TimeSpecKind.FIXED_FRACTION, TimeSpecKind.FIXED_TIME):
            if text.startswith(kind.value + ":"):
                return cls(kind, float(text.split(":", 1)[1]))
        raise ValueError(f"unrecognized time spec {text!r}")


@dataclass(frozen=True)
class GridSpec:
    min: float
    max: float
    n: int

    def __post_init__(self):
        if not (0.0 <= self.min <= self.max <= 2.0):
            raise ValueError("grid bounds must satisfy 0 <= min <= max <= 2")
        if not (2 <= self.n <= 4096):
            raise ValueError("grid size must be in [2, 4096]")

    def values(self) -> np.ndarray:
        return np.linspace(self.min, self.max, self.n)

    def label(self) -> str:
        return f"{self.min:.17g}:{self.max:.17g}:{self.n}"


@dataclass(frozen=True)
class SweepConfig:
    kappa_grid: GridSpec
    gamma_grid: GridSpec
    model: CoefficientModel
    quantity: SweepQuantity
    time_spec: TimeSpec
    output_path: str
    format: str = "csv"
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        if self.format not in ("csv", "json"):
            raise ValueError("format must be csv or json")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if self.quantity in (SweepQuantity.RATIO_TAU1, SweepQuantity.RATIO_EN):
            if self.model not in (CoefficientModel.SINK_PERIODIC, CoefficientModel.SEMICLASSICAL):
                raise ValueError("ratio quantities compare the full model against sink or semiclassical")


@dataclass(frozen=True)
class SweepResult:
    kappas: np.ndarray
    gammas: np.ndarray
    values: np.ndarray          # shape (n_gamma, n_kappa)
    flags: list                 # list of lists of tokens, row-major
    regimes: np.ndarray         # string array, shape (n_gamma, n_kappa)
    metadata: dict


# ---------------------------------------------------------------------------
# grid evaluation
# ---------------------------------------------------------------------------


def regime_grid(kappas: np.ndarray, gammas: np.ndarray, ep_tol: float = EP_TOL_DEFAULT):
    """mu^2 and regime labels on the (gamma, kappa) grid, epsilon = 1."""
    K = kappas[None, :]
    G = gammas[:, None]
    mu2 = 1.0 - K * K - G * G + np.zeros((gammas.size, kappas.size))
    regime = np.where(
        np.abs(mu2) <= ep_tol, "exceptional_point", np.where(mu2 > 0, "oscillatory", "exponential")
    )
    return mu2, regime


def _eval_quantities(model: CoefficientModel, K, G, ts):
    """Witness quantities for broadcastable kappa/gamma/time arrays."""
    arrs = closed_form_coefficient_arrays(model, K, G, ts)
    shape = arrs["B1"].shape
    tau, tau1, tau2, EN, _, fl = backend.witness_batch(
        arrs["B1"], arrs["B2"], arrs["C1"], arrs["C2"], arrs["D"], arrs["Dbar"]
    )
    out = {
        "tau": tau.reshape(shape),
        "tau1": tau1.reshape(shape),
        "tau2": tau2.reshape(shape),
        "en": EN.reshape(shape),
    }
    return out, fl.reshape(shape)


def witness_grid_at_times(model: CoefficientModel, kappas, gammas, ts):
    """All four witnesses at per-cell times ``ts`` (shape (n_gamma, n_kappa))."""
    K = np.broadcast_to(kappas[None, :], ts.shape)
    G = np.broadcast_to(gammas[:, None], ts.shape)
    return _eval_quantities(model, K, G, ts)


def lambda_grid(kappas: np.ndarray, gammas: np.ndarray):
    """Sink strength 4*gamma*(1 - 1/mu^2) with divergence handling."""
    mu2, regime = regime_grid(kappas, gammas)
    G = np.broadcast_to(gammas[:, None], mu2.shape)
    with np.errstate(divide="ignore", invalid="ignore"):
        lam = 4.0 * G * (1.0 - 1.0 / mu2)
    lam = np.where(G == 0.0, 0.0, lam)
    lam = np.where(regime == "exceptional_point", np.where(G == 0.0, 0.0, -np.inf), lam)
    lam = np.where(regime == "exponential", np.nan, lam)
    return lam, regime


def max_over_period_grid(
    model: CoefficientModel,
    kappas: np.ndarray,
    gammas: np.ndarray,
    quantities: Iterable[str] = _QNAMES,
    n_samples: int = 512,
    refine_iters: int = 22,
    period_index: int = 0,
    row_chunk: int = 8,
):
    """Per-cell maxima over one period window for several quantities at once.

    One coarse vectorized pass shares the coefficient and kernel work across
    the four witnesses; each requested quantity is then refined with a
    vectorized golden-section search on its own bracket (the coarse grid
    oversamples the 2*mu oscillation ~128-fold, so the bracket contains the
    global maximum).  Non-oscillatory cells yield NaN.

    Returns {quantity: (values, argmax_t, flags)} with shape (n_gamma, n_kappa).
    """
    quantities = list(quantities)
    mu2, regime = regime_grid(kappas, gammas)
    osc = regime == "oscillatory"
    ng, nk = mu2.shape
    with np.errstate(divide="ignore", invalid="ignore"):
        T = np.where(osc, 2.0 * np.pi / np.sqrt(np.where(osc, mu2, 1.0)), np.nan)
    t0 = period_index * T

    best_val = {q: np.full((ng, nk), np.nan) for q in quantities}
    best_t = {q: np.where(osc, t0, np.nan) for q in quantities}

    # coarse pass, chunked over gamma rows to bound memory
    phase = np.linspace(0.0, 1.0, n_samples)
    for lo in range(0, ng, row_chunk):
        hi = min(lo + row_chunk, ng)
        Tc = T[lo:hi]
        ts = t0[lo:hi, :, None] + Tc[:, :, None] * phase[None, None, :]
        oc = osc[lo:hi]
        ts = np.where(oc[:, :, None], ts, 0.0)
        K = np.broadcast_to(kappas[None, :, None], ts.shape)
        G = np.broadcast_to(gammas[lo:hi, None, None], ts.shape)
        vals, _ = _eval_quantities(model, K, G, ts)
        for q in quantities:
            v = np.where(oc[:, :, None], vals[q], np.nan)
            allnan = np.all(np.isnan(v), axis=2)
            safe = np.where(np.isnan(v), -np.inf, v)
            idx = np.argmax(safe, axis=2)
            ii, jj = np.meshgrid(np.arange(hi - lo), np.arange(nk), indexing="ij")
            bv = v[ii, jj, idx]
            bt = ts[ii, jj, idx]
            best_val[q][lo:hi] = np.where(allnan, np.nan, bv)
            best_t[q][lo:hi] = np.where(allnan, np.nan, bt)
            # refinement bracket: one coarse step either side
            step = (Tc / (n_samples - 1))
            a = np.clip(bt - step, t0[lo:hi], t0[lo:hi] + Tc)
            b = np.clip(bt + step, t0[lo:hi], t0[lo:hi] + Tc)
            rv, rt = _golden_refine(model, kappas, gammas[lo:hi], oc, q, a, b, refine_iters)
            better = ~np.isnan(rv) & (np.isnan(bv) | (rv > bv))
            best_val[q][lo:hi] = np.where(better, rv, best_val[q][lo:hi])
            best_t[q][lo:hi] = np.where(better, rt, best_t[q][lo:hi])

    out = {}
    for q in quantities:
        ts_q = np.where(np.isnan(best_t[q]), 0.0, best_t[q])
        vals, fl = witness_grid_at_times(model, kappas, gammas, ts_q)
        flags = np.where(osc, fl, 0).astype(np.uint8)
        out[q] = (best_val[q], best_t[q], flags)
    return out


def _golden_refine(model, kappas, gammas, osc, quantity, a, b, iters):
    """Vectorized golden-section maximization on per-cell brackets [a, b].

    Keeps the classic invariant a < x1 < x2 < b per cell; each iteration
    shrinks every bracket with a single batched evaluation.
    """
    shape = a.shape
    K = np.broadcast_to(kappas[None, :], shape)
    G = np.broadcast_to(gammas[:, None], shape)
    a = np.where(osc, a, 0.0)
    b = np.where(osc, b, 0.0)

    def f(ts):
        vals, _ = _eval_quantities(model, K, G, np.where(osc, ts, 0.0))
        v = vals[quantity]
        return np.where(osc & ~np.isnan(v), v, -np.inf)

    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1 = f(x1)
    f2 = f(x2)
    for _ in range(iters):
        left = f1 >= f2  # maximum bracketed in [a, x2]
        a = np.where(left, a, x1)
        b = np.where(left, x2, b)
        x_new = np.where(left, b - _GOLDEN * (b - a), a + _GOLDEN * (b - a))
        f_new = f(x_new)
        x1, x2, f1, f2 = (
            np.where(left, x_new, x2),
            np.where(left, x1, x_new),
            np.where(left, f_new, f2),
            np.where(left, f1, f_new),
        )
    tm = 0.5 * (a + b)
    vm = f(tm)
    out_v = np.where(np.isfinite(vm), vm, np.nan)
    return out_v, tm


# ---------------------------------------------------------------------------
# sweep driver
# ---------------------------------------------------------------------------


def _flag_tokens(flagbyte: int, extra: tuple = ()) -> list:
    toks = [name for bit, name in FLAG_TOKENS.items() if flagbyte & bit]
    toks.extend(extra)
    return toks


def combine_ratio(num, den):
    """full-model / simplified-model ratio with the degenerate-cell rules.

    0/0 -> 1 (the models genuinely coincide there); positive/0 -> sentinel -1
    flagged as undefined, so plotting pipelines never see infinities.  NaN in
    either operand propagates.  Returns (values, undefined_mask).
    """
    num = np.asarray(num, dtype=float)
    den = np.asarray(den, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = num / den
    vals = np.where((num == 0.0) & (den == 0.0), 1.0, vals)
    undefined = (den == 0.0) & (num > 0.0)
    vals = np.where(undefined, -1.0, vals)
    return vals, undefined


def _witness_values(config: SweepConfig, model: CoefficientModel, kappas, gammas, qname: str):
    """values, kernel-flag bytes and an oscillatory-required mask for one model."""
    mu2, regime = regime_grid(kappas, gammas)
    osc = regime == "oscillatory"
    spec = config.time_spec
    if spec.kind is TimeSpecKind.MAX_OVER_PERIOD:
        vals, _, fl = max_over_period_grid(model, kappas, gammas, [qname])[qname]
        needs_period = True
    elif spec.kind is TimeSpecKind.FIXED_FRACTION:
        with np.errstate(divide="ignore", invalid="ignore"):
            T = 2.0 * np.pi / np.sqrt(np.where(osc, mu2, 1.0))
        ts = np.where(osc, spec.value * T, 0.0)
        allv, fl = witness_grid_at_times(model, kappas, gammas, ts)
        vals = np.where(osc, allv[qname], np.nan)
        needs_period = True
    else:
        ts = np.full(mu2.shape, spec.value)
        sink_like = model in (CoefficientModel.SINK_PERIODIC, CoefficientModel.ASYMPTOTIC)
        ts_eval = np.where(osc, ts, 0.0) if sink_like else ts
        allv, fl = witness_grid_at_times(model, kappas, gammas, ts_eval)
        vals = np.where(osc, allv[qname], np.nan) if sink_like else allv[qname]
        needs_period = sink_like
    return vals, fl, osc, needs_period


def _evaluate_gamma_block(config: SweepConfig, gammas: np.ndarray):
    """Evaluate a block of gamma rows; returns (values, flags, regimes)."""
    kappas = config.kappa_grid.values()
    _, regime = regime_grid(kappas, gammas)
    osc = regime == "oscillatory"
    q = config.quantity

    if q is SweepQuantity.LAMBDA:
        vals, regime = lambda_grid(kappas, gammas)
        G = np.broadcast_to(gammas[:, None], vals.shape)
        flags = []
        for i in range(vals.shape[0]):
            for j in range(vals.shape[1]):
                extra = []
                if regime[i, j] == "exceptional_point" and G[i, j] > 0:
                    extra.append("ep_divergent")
                if regime[i, j] == "exponential":
                    extra.append("outside_oscillatory")
                flags.append(extra)
        return vals, flags, regime

    if q in (SweepQuantity.RATIO_TAU1, SweepQuantity.RATIO_EN):
        qname = "tau1" if q is SweepQuantity.RATIO_TAU1 else "en"
        num, fln, osc, _ = _witness_values(config, CoefficientModel.FULL, kappas, gammas, qname)
        den, fld, _, _ = _witness_values(config, config.model, kappas, gammas, qname)
        num = np.where(osc, num, np.nan)
        vals, undefined = combine_ratio(num, den)
        flags = []
        merged = (fln | fld).astype(np.uint8)
        for i in range(vals.shape[0]):
            for j in range(vals.shape[1]):
                extra = []
                if not osc[i, j]:
                    extra.append("outside_oscillatory")
                else:
                    if undefined[i, j]:
                        extra.append("undefined_ratio")
                flags.append(_flag_tokens(int(merged[i, j]) if osc[i, j] else 0, tuple(extra)))
        return vals, flags, regime

    vals, fl, osc, needs_period = _witness_values(config, config.model, kappas, gammas, q.value)
    flags = []
    for i in range(vals.shape[0]):
        for j in range(vals.shape[1]):
            extra = []
            masked = needs_period and not osc[i, j]
            if masked:
                extra.append("outside_oscillatory")
            flags.append(_flag_tokens(0 if masked else int(fl[i, j]), tuple(extra)))
    return vals, flags, regime


def _block_worker(args):
    config, gammas = args
    return _evaluate_gamma_block(config, gammas)


def run_sweep(config: SweepConfig) -> SweepResult:
    """Evaluate the configured grid; deterministic row order (gamma outer)."""
    kappas = config.kappa_grid.values()
    gammas = config.gamma_grid.values()
    n_blocks = min(config.threads * 4, gammas.size) if config.threads > 1 else 1
    blocks = np.array_split(gammas, n_blocks)
    work = [(config, blk) for blk in blocks if blk.size]

    if config.threads > 1 and len(work) > 1:
        import concurrent.futures as cf

        with cf.ProcessPoolExecutor(max_workers=config.threads) as ex:
            parts = list(ex.map(_block_worker, work))
    else:
        parts = [_block_worker(w) for w in work]

    values = np.concatenate([p[0] for p in parts], axis=0)
    flags = [tok for p in parts for tok in p[1]]
    regimes = np.concatenate([p[2] for p in parts], axis=0)
    metadata = {
        "tool": "ptmodes",
        "version": _version,
        "model": config.model.value,
        "quantity": config.quantity.value,
        "time_spec": config.time_spec.label(),
        "seed": config.seed,
        "kappa_grid": config.kappa_grid.label(),
        "gamma_grid": config.gamma_grid.label(),
    }
    return SweepResult(kappas, gammas, values, flags, regimes, metadata)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

CSV_HEADER = "kappa_over_eps,gamma_over_eps,value,flags,regime"


def _fmt(x: float) -> str:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.17g}"


def render_csv(result: SweepResult) -> str:
    lines = []
    for key, val in result.metadata.items():
        lines.append(f"# {key}={val}")
    lines.append(CSV_HEADER)
    nk = result.kappas.size
    idx = 0
    for i, g in enumerate(result.gammas):
        for j, k in enumerate(result.kappas):
            toks = "|".join(result.flags[idx])
            lines.append(
                f"{_fmt(k)},{_fmt(g)},{_fmt(float(result.values[i, j]))},{toks},{result.regimes[i, j]}"
            )
            idx += 1
    assert idx == nk * result.gammas.size
    return "\n".join(lines) + "\n"


def _json_value(x: float):
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def render_json(result: SweepResult) -> str:
    rows = []
    idx = 0
    for i, g in enumerate(result.gammas):
        for j, k in enumerate(result.kappas):
            rows.append(
                {
                    "kappa_over_eps": float(k),
                    "gamma_over_eps": float(g),
                    "value": _json_value(float(result.values[i, j])),
                    "flags": result.flags[idx],
                    "regime": str(result.regimes[i, j]),
                }
            )
            idx += 1
    return json.dumps({"metadata": result.metadata, "rows": rows}, indent=1) + "\n"


def write_atomic(text: str, path: str) -> None:
    """Write via a temp file + rename so partial output never lands."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_result(result: SweepResult, path: str, fmt: str) -> None:
    text = render_csv(result) if fmt == "csv" else render_json(result)
    write_atomic(text, path)


def parse_config_file(path: str) -> dict:
    """Flat key=value configuration; '#' starts a comment, blanks ignored."""
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {raw.rstrip()!r}")
            key, val = line.split("=", 1)
            out[key.strip()] = val.strip()
    return out
