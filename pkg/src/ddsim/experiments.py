"""Experiment harness: purity sweeps, scaling studies and table output.

Configuration is a flat INI file with a single ``[ddsim]`` section (the
section header may be omitted). Every experiment returns a :class:`Table`
whose rows are plain values; :func:`emit` writes it as CSV or JSON.
"""

from __future__ import annotations

import configparser
import csv
import dataclasses
import hashlib
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .errors import BadParams, BranchAmbiguity, IoError, WidthTooLarge
from .hamiltonians import (
    SpinChainParams,
    ThermalParams,
    build_spin_chain,
    coupling_strengths,
    decompose,
    random_model,
    thermal_bath_state,
)
from .magnus import (
    bound_cdd,
    bound_pdd,
    bound_ratio,
    bound_tsds,
    convergence_check,
    error_phase_from_hamiltonian,
)
from .operators import DEFAULT_ANALYSIS_BITS, FLOAT_BITS, OperatorMatrix, PrecisionPolicy, format_real
from .sequences import (
    IdealPulse,
    Free,
    PulseSequence,
    adjust_for_width,
    as_time,
    format_time,
    gen_cdd,
    gen_concat_cpmg,
    gen_cpmg,
    gen_pdd,
    gen_tsds,
    gen_universal_cycle,
)
from .simulate import (
    effective_error_hamiltonian,
    escalate,
    evolve,
    purity_loss,
    thompson_check,
)

EXPERIMENTS = (
    "fig1",
    "fig2",
    "table1_scaling",
    "pdd_cdd_ratio",
    "thompson_sweep",
    "cpmg_scaling",
    "tsds_scaling",
    "custom",
)
SCALING_SCHEMES = ("PDD", "CDD", "TSDS", "CPMG", "concat_CPMG", "universal")
PRECISION_ENV = "DDSIM_PRECISION_BITS"


def _parse_levels(text: str) -> tuple:
    """``"1-3,6"`` -> ``(1, 2, 3, 6)``."""
    out = []
    for part in str(text).replace(" ", "").split(","):
        if not part:
            continue
        lo, sep, hi = part.partition("-")
        try:
            out.extend(range(int(lo), int(hi) + 1) if sep else [int(part)])
        except ValueError as exc:
            raise BadParams(f"bad level range {part!r}") from exc
    if any(v < 0 for v in out):
        raise BadParams("levels must be nonnegative")
    return tuple(out)


def _parse_times(text: str) -> tuple:
    return tuple(as_time(p) for p in str(text).split(",") if p.strip())


def _parse_bool(text: str) -> bool:
    v = str(text).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise BadParams(f"not a boolean: {text!r}")


def _parse_precision(text: str) -> Optional[PrecisionPolicy]:
    v = str(text).strip().lower()
    if v in ("", "adaptive", "auto"):
        return None
    bits = int(v)
    if bits < 2:
        raise BadParams("precision must be at least 2 bits")
    return PrecisionPolicy.fixed(bits)


@dataclass(frozen=True)
class ExperimentConfig:
    """Parameters of one experiment run.

    ``precision`` is ``None`` for automatic escalation or a fixed
    :class:`PrecisionPolicy`. Times are exact ``Fraction`` seconds.
    """

    experiment: str = "fig1"
    chain: SpinChainParams = field(default_factory=SpinChainParams)
    two_pi: bool = False
    temperature: float = 1.0
    total_time: Fraction = Fraction(1, 10 ** 5)
    levels: tuple = tuple(range(1, 9))
    pulse_widths: tuple = (Fraction(1, 10 ** 12), Fraction(1, 10 ** 11), Fraction(1, 10 ** 10))
    precision: Optional[PrecisionPolicy] = None
    min_bits: int = 64
    max_bits: int = 4096
    seed: int = 0
    output_path: str = ""
    scheme: str = "PDD"
    scaling_time: Fraction = Fraction(1, 10 ** 6)
    tau_min: Fraction = Fraction(1, 10 ** 9)
    tau_max: Fraction = Fraction(1, 10 ** 7)
    n_points: int = 5
    cdd_level: int = 2
    tsds_order: int = 3
    cpmg_level: int = 1
    beta_t: float = 0.1
    n_draws: int = 1000
    bath_qubits: int = 2
    model_j: float = 1e6
    model_beta: float = 1e6
    sequence_file: str = ""
    norm_kind: str = "eigen_spread"

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise BadParams(f"unknown experiment {self.experiment!r}")
        if not self.total_time > 0 or not self.scaling_time > 0:
            raise BadParams("total_time must be positive")
        if any(v < 0 for v in self.levels):
            raise BadParams("levels must be nonnegative")
        if not (0 < self.tau_min < self.tau_max):
            raise BadParams("need 0 < tau_min < tau_max")
        if self.n_points < 2:
            raise BadParams("n_points must be at least 2")
        if self.scheme not in SCALING_SCHEMES:
            raise BadParams(f"unknown scheme {self.scheme!r}")

    # serialization ------------------------------------------------------

    def canonical(self) -> str:
        """Sorted ``key=value`` lines covering every parameter."""
        items = {}
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if f.name == "chain":
                for cf in dataclasses.fields(v):
                    items[f"chain.{cf.name}"] = repr(getattr(v, cf.name))
                continue
            if f.name == "output_path":
                continue
            if isinstance(v, PrecisionPolicy):
                v = f"fixed:{v.bits}"
            elif v is None:
                v = "adaptive"
            elif isinstance(v, tuple):
                v = ",".join(format_time(x) if isinstance(x, Fraction) else str(x) for x in v)
            elif isinstance(v, Fraction):
                v = format_time(v)
            items[f.name] = str(v)
        return "\n".join(f"{k}={items[k]}" for k in sorted(items)) + "\n"

    @property
    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()[:16]

    @classmethod
    def from_mapping(cls, raw: dict, **overrides) -> "ExperimentConfig":
        """Build a config from string-valued ``key: value`` pairs."""
        raw = {k.strip().lower(): v for k, v in raw.items()}
        raw.update({k: v for k, v in overrides.items() if v is not None})
        known = {f.name for f in dataclasses.fields(cls)} | {
            "n_spins", "j_coupling", "beta_coupling", "decay_base"}
        unknown = sorted(set(raw) - known)
        if unknown:
            raise BadParams(f"unknown config keys: {', '.join(unknown)}")
        try:
            return cls(**cls._convert(raw))
        except (ValueError, TypeError, ArithmeticError) as exc:
            raise BadParams(f"bad config value: {exc}") from exc

    @staticmethod
    def _convert(raw: dict) -> dict:
        kw = {}
        chain = {}
        for key in ("n_spins",):
            if key in raw:
                chain[key] = int(raw[key])
        for key in ("j_coupling", "beta_coupling", "decay_base"):
            if key in raw:
                chain[key] = float(raw[key])
        for key, val in raw.items():
            if key in chain or key in ("n_spins", "j_coupling", "beta_coupling", "decay_base"):
                continue
            if key in ("experiment", "output_path", "sequence_file", "norm_kind", "scheme"):
                kw[key] = str(val).strip()
            elif key == "levels":
                kw[key] = _parse_levels(val)
            elif key == "pulse_widths":
                kw[key] = _parse_times(val)
            elif key in ("total_time", "scaling_time", "tau_min", "tau_max"):
                kw[key] = as_time(str(val))
            elif key == "precision":
                kw[key] = val if isinstance(val, PrecisionPolicy) else _parse_precision(val)
            elif key == "two_pi":
                kw[key] = val if isinstance(val, bool) else _parse_bool(val)
            elif key in ("temperature", "beta_t", "model_j", "model_beta"):
                kw[key] = float(val)
            else:
                kw[key] = int(val)
        if chain:
            kw["chain"] = SpinChainParams(**chain)
        return kw

    @classmethod
    def from_ini(cls, path, **overrides) -> "ExperimentConfig":
        """Read a flat INI file; a missing ``[ddsim]`` header is allowed."""
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise IoError(f"cannot read config {path}: {exc}") from exc
        parser = configparser.ConfigParser(interpolation=None)
        try:
            parser.read_string(text if text.lstrip().startswith("[") else "[ddsim]\n" + text)
        except configparser.Error as exc:
            raise BadParams(f"malformed config: {exc}") from exc
        section = "ddsim" if parser.has_section("ddsim") else (parser.sections() or ["ddsim"])[0]
        raw = dict(parser.items(section)) if parser.has_section(section) else {}
        return cls.from_mapping(raw, **overrides)

    def with_env(self, environ=None) -> "ExperimentConfig":
        """Apply the precision override from the environment."""
        env = os.environ if environ is None else environ
        val = env.get(PRECISION_ENV)
        if val is None or not val.strip():
            return self
        try:
            bits = int(val)
        except ValueError as exc:
            raise BadParams(f"{PRECISION_ENV} must be an integer") from exc
        if bits < 2:
            raise BadParams(f"{PRECISION_ENV} must be at least 2")
        return dataclasses.replace(self, precision=PrecisionPolicy.fixed(bits))


# ---------------------------------------------------------------------------
# tables


@dataclass
class Table:
    """Experiment output: ordered columns, rows of plain values and metadata."""

    experiment: str
    columns: tuple
    rows: list
    config_hash: str = ""
    meta: dict = field(default_factory=dict)
    convergence_failures: list = field(default_factory=list)

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]

    def records(self) -> list:
        return [dict(zip(self.columns, r)) for r in self.rows]


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def table_to_csv(t: Table) -> str:
    buf = io.StringIO()
    buf.write(f"# config_hash={t.config_hash}\n")
    for k in sorted(t.meta):
        buf.write(f"# {k}={_cell(t.meta[k])}\n")
    for msg in t.convergence_failures:
        buf.write(f"# convergence_failure={msg}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(t.columns)
    for r in t.rows:
        w.writerow([_cell(v) for v in r])
    return buf.getvalue()


def table_to_json(t: Table) -> str:
    doc = {
        "experiment": t.experiment,
        "config_hash": t.config_hash,
        "columns": list(t.columns),
        "rows": [list(r) for r in t.rows],
        "meta": t.meta,
        "convergence_failures": list(t.convergence_failures),
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def table_from_json(text: str) -> Table:
    doc = json.loads(text)
    return Table(doc["experiment"], tuple(doc["columns"]), [tuple(r) for r in doc["rows"]],
                 doc["config_hash"], doc["meta"], list(doc["convergence_failures"]))


def emit(table: Table, fmt: str = "csv", path=None) -> str:
    """Serialize ``table`` and write it to ``path`` (if given).

    Raises
    ------
    IoError
        If the file cannot be written.
    """
    if fmt == "csv":
        text = table_to_csv(table)
    elif fmt == "json":
        text = table_to_json(table)
    else:
        raise BadParams(f"unknown format {fmt!r}")
    if path:
        try:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise IoError(f"cannot write {path}: {exc}") from exc
    return text


# ---------------------------------------------------------------------------
# shared helpers


def _run_jobs(jobs: list, threads: int) -> list:
    """Run independent callables and return results in submission order."""
    if threads <= 1 or len(jobs) <= 1:
        return [j() for j in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(j) for j in jobs]
        return [f.result() for f in futures]


def _resolve(cfg: ExperimentConfig, compute: Callable[[int], object], predicted: float,
             n_segments: int, dim: int, start_bits: Optional[int] = None):
    if cfg.precision is not None:
        bits = cfg.precision.select_bits()
        return compute(bits), bits
    return escalate(compute, predicted, n_segments, dim, cfg.min_bits, cfg.max_bits, start_bits)


def chain_params(cfg: ExperimentConfig) -> SpinChainParams:
    p = cfg.chain
    if cfg.two_pi:
        p = dataclasses.replace(p, j_coupling=2 * math.pi * p.j_coupling,
                                beta_coupling=2 * math.pi * p.beta_coupling)
    return p


def chain_model(cfg: ExperimentConfig) -> Callable[[int], tuple]:
    """``bits -> (h_e, thermal bath state)`` for the configured chain."""
    params = chain_params(cfg)
    thermal = ThermalParams(cfg.temperature)

    def model(bits):
        h = build_spin_chain(params, bits=bits)
        return h, thermal_bath_state(decompose(h).b0, thermal)

    return model


def _tiny(x: float) -> float:
    return max(float(x), 1e-300)


def _fmt(x, bits: int) -> str:
    return format_real(x, bits)


# ---------------------------------------------------------------------------
# purity sweeps


def _purity_job(cfg, model, seq, predicted, dim):
    def compute(bits):
        h_e, bath = model(bits)
        u = evolve(h_e, seq, bits)
        return purity_loss(u, None, bath, clamp=False)

    loss, bits = _resolve(cfg, compute, predicted, len(seq), dim)
    return _fmt(max(loss, 0 * loss), bits), bits


def _sweep(cfg: ExperimentConfig, widths: tuple, threads: int) -> Table:
    model = chain_model(cfg)
    h53, _ = model(FLOAT_BITS)
    c = coupling_strengths(decompose(h53), "spectral")
    dim = h53.dim
    t = cfg.total_time
    jobs, keys, failures = [], [], []
    for delta in widths:
        for level in cfg.levels:
            if level < 1:
                raise BadParams("purity sweeps need levels >= 1")
            tau0 = t / 4 ** level
            rep = convergence_check(c, tau0, delta, level, t)
            if not rep.ok:
                bad = [k for k in ("taunb", "width", "appendix_b") if not getattr(rep, f"{k}_ok")]
                failures.append(f"level={level} width={format_time(delta)} failed={'+'.join(bad)}")
            floor_pred = (float(delta) * c.j) ** 2 * 1e-2
            for scheme in ("CDD", "PDD"):
                if scheme == "CDD":
                    seq = gen_cdd(tau0, level)
                    pred = bound_cdd(c, tau0, level).phi ** 2
                else:
                    seq = gen_pdd(tau0, 4 ** (level - 1))
                    pred = bound_pdd(c, tau0, t).phi ** 2
                keys.append((level, scheme, delta, seq.pulse_count))
                try:
                    seq = adjust_for_width(seq, delta)
                except WidthTooLarge:
                    jobs.append(lambda: None)
                    continue
                pred = _tiny(max(pred, floor_pred))
                jobs.append(lambda s=seq, p=pred: _purity_job(cfg, model, s, p, dim))
    results = _run_jobs(jobs, threads)
    rows = []
    for (level, scheme, delta, npulses), res in zip(keys, results):
        if res is None:
            rows.append((level, scheme, format_time(delta), npulses, "", 0, "skipped"))
        else:
            rows.append((level, scheme, format_time(delta), npulses, res[0], res[1], "ok"))
    rows.sort(key=lambda r: (Fraction(r[2]), r[1], r[0]))
    return rows, failures


def run_fig1(cfg: ExperimentConfig, threads: int = 1) -> Table:
    """Purity loss of CDD and PDD with ideal pulses at fixed total time.

    CDD level ``n`` uses ``tau0 = T / 4^n``. The matching PDD point repeats
    the universal cycle ``4^(n-1)`` times at the same ``tau0``, so both
    sequences share ``T`` and the number of free intervals.
    """
    rows, failures = _sweep(cfg, (Fraction(0),), threads)
    cols = ("level", "scheme", "n_pulses", "purity_loss", "precision_bits")
    out = [(r[0], r[1], r[3], r[4], r[5]) for r in rows]
    return Table("fig1", cols, out, cfg.config_hash, {"total_time": format_time(cfg.total_time)}, failures)


def run_fig2(cfg: ExperimentConfig, threads: int = 1) -> Table:
    """Fig. 1 sweep repeated with rectangular pulses of each configured width.

    Rows whose pulses do not fit into the free intervals are marked
    ``skipped``.
    """
    rows, failures = _sweep(cfg, tuple(cfg.pulse_widths), threads)
    cols = ("level", "scheme", "width", "n_pulses", "purity_loss", "precision_bits", "status")
    return Table("fig2", cols, rows, cfg.config_hash, {"total_time": format_time(cfg.total_time)}, failures)


# ---------------------------------------------------------------------------
# error-phase scaling


def random_hamiltonian(cfg: ExperimentConfig, bits: int, axes=("X", "Y", "Z")) -> OperatorMatrix:
    """Joint Hamiltonian of the seeded random model at ``bits``.

    The model is drawn in double precision and then widened, so every
    precision sees the same matrix.
    """
    rng = np.random.default_rng(cfg.seed)
    d = random_model(cfg.bath_qubits, rng, j=cfg.model_j, beta=cfg.model_beta, axes=axes)
    h = d.reassemble()
    return h.with_bits(bits).hermitize() if bits != FLOAT_BITS else h


def _tau_grid(cfg: ExperimentConfig) -> list:
    lo, hi = math.log10(cfg.tau_min), math.log10(cfg.tau_max)
    return [as_time(float(f"{10 ** x:.3g}")) for x in np.linspace(lo, hi, cfg.n_points)]


def phase_of(h_e: OperatorMatrix, seq: PulseSequence, norm_kind: str = "eigen_spread"):
    """Exact error phase of ``seq`` under ``h_e``."""
    u = evolve(h_e, seq)
    _, phi = effective_error_hamiltonian(u, seq, norm_kind=norm_kind)
    return phi


def fit_slope(x, y) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    lx = np.log10(np.asarray([float(v) for v in x]))
    ly = np.log10(np.asarray([float(v) for v in y]))
    return float(np.polyfit(lx, ly, 1)[0])


def _scaling_points(cfg: ExperimentConfig, scheme: str, c):
    """(tau0, sequence, bound) triples for one scheme."""
    pts = []
    if scheme == "PDD":
        t = cfg.scaling_time
        seen = set()
        for tau in _tau_grid(cfg):
            cycles = max(1, round(t / (4 * tau)))
            if cycles in seen:
                continue
            seen.add(cycles)
            tau0 = t / (4 * cycles)
            pts.append((tau0, gen_pdd(tau0, cycles), bound_pdd(c, tau0, t).phi))
    elif scheme == "CDD":
        for tau in _tau_grid(cfg):
            pts.append((tau, gen_cdd(tau, cfg.cdd_level), bound_cdd(c, tau, cfg.cdd_level).phi))
    elif scheme == "universal":
        for tau in _tau_grid(cfg):
            pts.append((tau, gen_universal_cycle(tau), bound_pdd(c, tau, 4 * tau).phi))
    elif scheme == "TSDS":
        for tau in _tau_grid(cfg):
            seq = gen_tsds(cfg.tsds_order, tau)
            pts.append((tau, seq, bound_tsds(c, seq.total_duration, max(seq.pulse_count, 4)).phi))
    elif scheme == "CPMG":
        for tau in _tau_grid(cfg):
            pts.append((tau, gen_cpmg(tau, 1), math.nan))
    elif scheme == "concat_CPMG":
        for tau in _tau_grid(cfg):
            pts.append((tau, gen_concat_cpmg(tau, cfg.cpmg_level), math.nan))
    else:
        raise BadParams(f"unknown scheme {scheme!r}")
    return pts


def run_scaling(cfg: ExperimentConfig, scheme: Optional[str] = None, threads: int = 1) -> Table:
    """Exact error phase and analytic bound over a ``tau0`` sweep.

    PDD keeps the total time ``scaling_time`` fixed; every other scheme
    uses a single sequence whose intervals scale with ``tau0``. CPMG
    schemes use a pure-dephasing model (``B_Z`` and ``B_0`` only) and have
    no analytic bound column.
    """
    scheme = scheme or cfg.scheme
    axes = ("Z",) if scheme in ("CPMG", "concat_CPMG") else ("X", "Y", "Z")
    h53 = random_hamiltonian(cfg, FLOAT_BITS, axes)
    c = coupling_strengths(decompose(h53), cfg.norm_kind)
    start = cfg.precision.select_bits() if cfg.precision is not None else DEFAULT_ANALYSIS_BITS
    cache = {}

    def h_at(bits):
        if bits not in cache:
            cache[bits] = random_hamiltonian(cfg, bits, axes)
        return cache[bits]

    pts = _scaling_points(cfg, scheme, c)
    # fill the model cache before threads share it
    h_at(start)

    def job(seq, bound):
        def compute(bits):
            return phase_of(h_at(bits), seq, cfg.norm_kind)

        pred = bound if math.isfinite(bound) else 1.0
        return _resolve(cfg, compute, pred, len(seq), h53.dim, start_bits=start)

    results = _run_jobs([lambda s=s, b=b: job(s, b) for _, s, b in pts], threads)
    rows = []
    for (tau0, seq, bound), (phi, bits) in zip(pts, results):
        rows.append((scheme, format_time(tau0), seq.pulse_count, _fmt(phi, bits),
                     "" if not math.isfinite(bound) else repr(float(bound)), bits))
    slope = fit_slope([p[0] for p in pts], [r[0] for r in results])
    label = {"TSDS": f"order={cfg.tsds_order}", "CDD": f"level={cfg.cdd_level}",
             "concat_CPMG": f"level={cfg.cpmg_level}"}.get(scheme, "")
    meta = {"scheme": scheme, "slope": round(slope, 12), "variant": label,
            "J": repr(c.j), "beta": repr(c.beta)}
    cols = ("scheme", "tau0", "n_pulses", "phi_exact", "phi_bound", "precision_bits")
    return Table("table1_scaling", cols, rows, cfg.config_hash, meta)


def _merge_scaling(name: str, cfg: ExperimentConfig, tables: list) -> Table:
    cols = ("variant",) + tables[0].columns
    rows = []
    meta = {}
    for t in tables:
        v = t.meta["variant"]
        rows.extend((v,) + r for r in t.rows)
        meta[f"slope[{v}]"] = t.meta["slope"]
    return Table(name, cols, rows, cfg.config_hash, meta)


def run_cpmg_scaling(cfg: ExperimentConfig, threads: int = 1) -> Table:
    """Concatenated CPMG levels 1 to 3 on a pure-dephasing model."""
    tabs = [run_scaling(dataclasses.replace(cfg, cpmg_level=k), "concat_CPMG", threads) for k in (1, 2, 3)]
    return _merge_scaling("cpmg_scaling", cfg, tabs)


def run_tsds_scaling(cfg: ExperimentConfig, threads: int = 1) -> Table:
    """Trotter-Suzuki sequences of order 2 and 3."""
    tabs = [run_scaling(dataclasses.replace(cfg, tsds_order=k), "TSDS", threads) for k in (2, 3)]
    return _merge_scaling("tsds_scaling", cfg, tabs)


# ---------------------------------------------------------------------------
# CDD / PDD ratio


def run_ratio(cfg: ExperimentConfig, threads: int = 1) -> Table:
    """``Phi_CDD / Phi_PDD`` at fixed ``beta T`` for each configured level.

    ``T = beta_t / beta`` with ``beta`` the spectral norm of ``B0`` of the
    random model. Level ``n`` uses ``tau0 = T / 4^n`` for both schemes.
    """
    h53 = random_hamiltonian(cfg, FLOAT_BITS)
    c = coupling_strengths(decompose(h53), "spectral")
    t = as_time(float(f"{cfg.beta_t / c.beta:.6g}"))
    bt = float(t) * c.beta
    start = cfg.precision.select_bits() if cfg.precision is not None else DEFAULT_ANALYSIS_BITS
    cache = {}

    def h_at(bits):
        if bits not in cache:
            cache[bits] = random_hamiltonian(cfg, bits)
        return cache[bits]

    h_at(start)
    failures = []
    jobs = []
    for level in cfg.levels:
        if level < 1:
            raise BadParams("ratio sweep needs levels >= 1")
        tau0 = t / 4 ** level
        rep = convergence_check(c, tau0, 0, level, t)
        if not rep.taunb_ok:
            failures.append(f"level={level} failed=taunb")
        for seq, pred in ((gen_cdd(tau0, level), bound_cdd(c, tau0, level).phi),
                          (gen_pdd(tau0, 4 ** (level - 1)), bound_pdd(c, tau0, t).phi)):
            def job(s=seq, p=pred):
                return _resolve(cfg, lambda b: phase_of(h_at(b), s, "spectral"), _tiny(p),
                                len(s), h53.dim, start_bits=start)
            jobs.append(job)
    res = _run_jobs(jobs, threads)
    rows = []
    for i, level in enumerate(cfg.levels):
        (pc, bc), (pp, bp) = res[2 * i], res[2 * i + 1]
        x = bt / 4 ** level
        bits = max(bc, bp)
        ratio = pc / pp
        rows.append((level, repr(x), _fmt(pc, bc), _fmt(pp, bp), _fmt(ratio, bits),
                     repr(bound_ratio(bt, x)), bits))
    cols = ("level", "beta_tau0", "phi_cdd", "phi_pdd", "ratio_exact", "ratio_bound", "precision_bits")
    meta = {"beta_T": repr(bt), "J": repr(c.j), "beta": repr(c.beta), "total_time": format_time(t)}
    return Table("pdd_cdd_ratio", cols, rows, cfg.config_hash, meta, failures)


# ---------------------------------------------------------------------------
# Thompson sweep


def random_ideal_sequence(rng, max_pulses: int = 12, scale: float = 1.0) -> PulseSequence:
    """Random Pauli pulses separated by random free intervals.

    The sum of intervals is at most ``scale``.
    """
    n = int(rng.integers(1, max_pulses + 1))
    gaps = rng.uniform(0.05, 1.0, size=n + 1)
    gaps = gaps / gaps.sum() * scale * rng.uniform(0.2, 1.0)
    segs = []
    for k in range(n + 1):
        segs.append(Free(as_time(float(f"{gaps[k]:.12g}"))))
        if k < n:
            segs.append(IdealPulse(str(rng.choice(["X", "Y", "Z"]))))
    return PulseSequence(tuple(segs), f"rand{n}")


def run_thompson_sweep(cfg: ExperimentConfig, threads: int = 1) -> Table:
    """Compare ``||H_eff||`` with ``||H_e||`` on random models and sequences.

    Each draw uses a fresh random model with unit couplings on
    ``bath_qubits`` bath qubits and a sequence of total free time at most
    ``1 / ||H_e||`` so the principal logarithm is unambiguous.
    """
    rng = np.random.default_rng(cfg.seed)
    draws = []
    for k in range(cfg.n_draws):
        j, beta = rng.uniform(0.05, 1.0, size=2)
        d = random_model(cfg.bath_qubits, rng, j=float(j), beta=float(beta))
        h = d.reassemble()
        hn = float(np.max(np.abs(np.linalg.eigvalsh(h.data))))
        seq = random_ideal_sequence(rng, scale=1.0 / hn)
        draws.append((k, h, seq))

    def job(h, seq):
        return thompson_check(h, seq, cfg.norm_kind)

    res = _run_jobs([lambda h=h, s=s: job(h, s) for _, h, s in draws], threads)
    rows = []
    for (k, _, seq), (ok, lhs, rhs) in zip(draws, res):
        rows.append((k, seq.pulse_count, repr(lhs), repr(rhs), ok))
    violations = sum(1 for r in rows if not r[4])
    cols = ("draw", "n_pulses", "lhs_norm", "rhs_norm", "holds")
    return Table("thompson_sweep", cols, rows, cfg.config_hash, {"violations": violations})


# ---------------------------------------------------------------------------
# custom sequence


def run_custom(cfg: ExperimentConfig, threads: int = 1) -> Table:
    """Evolve the sequence in ``sequence_file`` under the configured chain.

    The first configured pulse width (if positive) converts ideal pulses to
    rectangular ones.
    """
    if not cfg.sequence_file:
        raise BadParams("custom experiment needs sequence_file")
    seq = PulseSequence.load(cfg.sequence_file)
    if cfg.pulse_widths and cfg.pulse_widths[0] > 0 and not any(
            not isinstance(s, (Free, IdealPulse)) for s in seq.segments):
        seq = adjust_for_width(seq, cfg.pulse_widths[0])
    model = chain_model(cfg)
    h53, _ = model(FLOAT_BITS)
    c = coupling_strengths(decompose(h53), "spectral")
    pred = _tiny((float(seq.total_duration) * c.j) ** 2 * 1e-6)

    def compute(bits):
        h_e, bath = model(bits)
        u = evolve(h_e, seq, bits)
        return purity_loss(u, None, bath, clamp=False), u

    def loss_only(bits):
        loss, u = compute(bits)
        cache["u"] = u
        return loss

    cache = {}
    loss, bits = _resolve(cfg, loss_only, pred, len(seq), h53.dim)
    phi = ""
    if seq.total_duration > 0:
        try:
            _, p = effective_error_hamiltonian(cache["u"], seq, norm_kind=cfg.norm_kind)
            phi = _fmt(p, bits)
        except BranchAmbiguity:
            phi = ""
    cols = ("label", "n_pulses", "duration_s", "purity_loss", "error_phase", "precision_bits")
    rows = [(seq.label or "custom", seq.pulse_count, format_time(seq.total_duration),
             _fmt(max(loss, 0 * loss), bits), phi, bits)]
    return Table("custom", cols, rows, cfg.config_hash)


RUNNERS = {
    "fig1": run_fig1,
    "fig2": run_fig2,
    "table1_scaling": run_scaling,
    "pdd_cdd_ratio": run_ratio,
    "thompson_sweep": run_thompson_sweep,
    "cpmg_scaling": run_cpmg_scaling,
    "tsds_scaling": run_tsds_scaling,
    "custom": run_custom,
}


def run_experiment(cfg: ExperimentConfig, threads: int = 1) -> Table:
    """Dispatch on ``cfg.experiment``."""
    if threads < 1:
        raise BadParams("threads must be positive")
    return RUNNERS[cfg.experiment](cfg, threads=threads)


__all__ = [
    "EXPERIMENTS",
    "SCALING_SCHEMES",
    "PRECISION_ENV",
    "ExperimentConfig",
    "Table",
    "emit",
    "table_to_csv",
    "table_to_json",
    "table_from_json",
    "chain_model",
    "random_hamiltonian",
    "random_ideal_sequence",
    "phase_of",
    "fit_slope",
    "run_fig1",
    "run_fig2",
    "run_scaling",
    "run_cpmg_scaling",
    "run_tsds_scaling",
    "run_ratio",
    "run_thompson_sweep",
    "run_custom",
    "run_experiment",
]
