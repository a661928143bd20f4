"""Projection-error sweep comparing WXDS, DSPMR, DSPMR-R and LREBT."""

import csv
import json
import logging
import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from wxds.errind import IndicatorInputs, h2_apriori, h2_indicator, operator_norms, total_epsilon
from wxds.gramian import CrossGramian, empirical_gramians
from wxds.hapod import HapodConfig, dominant_pair
from wxds.lti import average_system
from wxds.reduce import Method, Projector, balanced_truncation, compress_factor, dspmr, project
from wxds.sim import Excitation, impulse_response, l2_norm

log = logging.getLogger(__name__)

CSV_HEADER = ['epsilon', 'method', 'reduced_order', 'rel_l2_error', 'indicator', 'apriori', 'wall_time_ms']
DEFAULT_EPSILONS = [1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9, 1e-10, 1e-11, 1e-12]
DEFAULT_SEED = 1009


class ConfigError(ValueError):
    pass


@dataclass
class SweepRecord:
    """One ``(epsilon, method)`` row.

    ``indicator`` and ``apriori`` are only set for WXDS rows and, like
    ``rel_l2_error``, are relative to the L2 norm of the full-order impulse
    response. A failed row has ``rel_l2_error = nan``.
    """

    epsilon: float
    method: Method
    reduced_order: int
    rel_l2_error: float
    indicator: float | None = None
    apriori: float | None = None
    wall_time_ms: float | None = None

    def __post_init__(self):
        self.method = Method(self.method)

    @property
    def failed(self):
        return math.isnan(self.rel_l2_error)


@dataclass
class ExperimentConfig:
    """Sweep configuration; JSON keys equal the field names.

    ``system`` is ``"fom"`` or a mapping with Matrix Market paths under the
    keys ``A``, ``B``, ``C`` and optionally ``E``. ``excitation`` is the
    training input for the empirical Gramians (the test input is always an
    impulse).
    """

    system: object = 'fom'
    h: float = 1e-3
    T: float = 5.0
    epsilons: list = field(default_factory=lambda: list(DEFAULT_EPSILONS))
    excitation: Excitation = field(default_factory=lambda: Excitation('binary', DEFAULT_SEED))
    hapod: HapodConfig = field(default_factory=lambda: HapodConfig(1.0))
    methods: list = field(default_factory=lambda: [m.value for m in Method])
    indicator_siso: str = 'average'
    record_timing: bool = True
    output: str | None = None

    def __post_init__(self):
        if isinstance(self.excitation, dict):
            self.excitation = Excitation(**self.excitation)
        if isinstance(self.hapod, dict):
            self.hapod = HapodConfig(**{'epsilon': 1.0, **self.hapod})
        if not self.epsilons:
            raise ConfigError('epsilons must not be empty')
        if any(not (e >= 0) for e in self.epsilons):
            raise ConfigError('epsilons must be non-negative')
        if not (self.h > 0 and self.T >= self.h):
            raise ConfigError('need h > 0 and T >= h')
        try:
            self.methods = [Method(m) for m in self.methods]
        except ValueError as e:
            raise ConfigError(str(e)) from None
        if self.system != 'fom' and not (isinstance(self.system, dict) and {'A', 'B', 'C'} <= set(self.system)):
            raise ConfigError('system must be "fom" or a mapping with keys A, B, C (and optional E)')

    @classmethod
    def from_json(cls, path, **overrides):
        try:
            with open(path) as f:
                raw = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigError(f'{path}: {e}') from None
        if not isinstance(raw, dict):
            raise ConfigError(f'{path}: top level must be an object')
        raw.update({k: v for k, v in overrides.items() if v is not None})
        unknown = set(raw) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f'{path}: unknown keys {sorted(unknown)}')
        try:
            return cls(**raw)
        except (TypeError, ValueError) as e:
            raise ConfigError(f'{path}: {e}') from None

    def to_json(self):
        d = asdict(self)
        d['methods'] = [str(m) for m in self.methods]
        return json.dumps(d, indent=2)

    def load_system(self):
        from wxds.harness.benchmarks import fom_system
        from wxds.harness.mmio import load_matrix_market

        if self.system == 'fom':
            return fom_system()
        s = self.system
        return load_matrix_market(s['A'], s['B'], s['C'], s.get('E'))


class SweepContext:
    """Simulation data shared by all rows of a sweep.

    Holds the empirical Gramians (one shared set of training simulations),
    the reference impulse response and the indicator inputs.
    """

    def __init__(self, sys, cfg):
        self.sys = sys
        self.cfg = cfg
        square = sys if sys.M == sys.Q else average_system(sys)
        W, self.Z_C, self.Z_O = empirical_gramians(sys, cfg.excitation, cfg.h, cfg.T)
        if W is None:
            W, _, _ = empirical_gramians(square, cfg.excitation, cfg.h, cfg.T)
        self.W = W
        self.y = impulse_response(sys, cfg.h, cfg.T)
        self.y_norm = l2_norm(self.y)
        self.b_norm, self.c_norm = operator_norms(sys, cfg.indicator_siso)
        self._factors = {}

    def compressed_factors(self, hc):
        key = (hc.epsilon, hc.omega, hc.partition_width)
        if key not in self._factors:
            t0 = time.perf_counter()
            pair = compress_factor(self.Z_C, hc), compress_factor(self.Z_O, hc)
            self._factors[key] = pair, time.perf_counter() - t0
        return self._factors[key]

    def rel_error(self, rom):
        yr = impulse_response(rom, self.cfg.h, self.cfg.T)
        return l2_norm(type(self.y)(self.y.step, self.y.values - yr.values)) / self.y_norm

    def projector(self, epsilon, method):
        """Projector of `method` at `epsilon`.

        Returns ``(projector, indicator, apriori, extra_seconds)``; the
        indicator values are ``None`` except for WXDS, and ``extra_seconds``
        is the (cached) factor compression time charged to the method.
        """
        hc = HapodConfig(epsilon, self.cfg.hapod.omega, self.cfg.hapod.partition_width)
        if method is Method.WXDS:
            w = hc.partition_width
            res = dominant_pair(self.W.blocks(w), self.W.T.blocks(w), hc)
            p = Projector.orthogonal(res.modes, res.singular_values)
            # the U_X branch's dropped values stand in for the tail of W_X's spectrum
            inp = IndicatorInputs(self.b_norm, self.c_norm, res.branches[0].discarded, epsilon, self.sys.N)
            ind = h2_indicator(inp) / self.y_norm
            pre = h2_apriori(self.b_norm, self.c_norm, total_epsilon(epsilon, self.W.N)) / self.y_norm
            return p, ind, pre, 0.0
        (zc, zo), extra = self.compressed_factors(hc)
        if method is Method.LREBT:
            p = balanced_truncation(zc, zo, self.sys.E)
        else:
            p = dspmr(zc, zo, refined=method is Method.DSPMR_R)
        return p, None, None, extra

    def run(self, epsilon, method):
        t0 = time.perf_counter()
        p, ind, pre, extra = self.projector(epsilon, Method(method))
        rom = project(self.sys, p)
        elapsed = (time.perf_counter() - t0 + extra) * 1e3
        err = self.rel_error(rom)
        return SweepRecord(epsilon, method, p.order, err, ind, pre,
                           elapsed if self.cfg.record_timing else None)


def run_sweep(cfg, sys=None):
    """Run every ``(epsilon, method)`` combination of `cfg`.

    Rows whose construction fails are kept with ``rel_l2_error = nan`` and
    the sweep continues.
    """
    sys = cfg.load_system() if sys is None else sys
    ctx = SweepContext(sys, cfg)
    records = []
    for eps in cfg.epsilons:
        for method in cfg.methods:
            try:
                rec = ctx.run(eps, method)
            except (ValueError, ArithmeticError, np.linalg.LinAlgError) as e:
                log.warning('eps=%g %s failed: %s', eps, method, e)
                rec = SweepRecord(eps, method, 0, math.nan)
            log.info('eps=%g %s n=%d err=%.3e', eps, method, rec.reduced_order, rec.rel_l2_error)
            records.append(rec)
    return records


def _fmt(v):
    if v is None:
        return ''
    if isinstance(v, Method):
        return v.value
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def _write_rows(f, records):
    w = csv.writer(f, lineterminator='\n')
    w.writerow(CSV_HEADER)
    for r in records:
        w.writerow([_fmt(getattr(r, k)) for k in CSV_HEADER])


def emit_csv(records, path):
    """Write records with the fixed header; floats use shortest round-trip form.

    `path` may also be an open text file.
    """
    if hasattr(path, 'write'):
        _write_rows(path, records)
        return
    try:
        with open(path, 'w', newline='') as f:
            _write_rows(f, records)
    except OSError as e:
        raise OSError(e.errno, f'cannot write {path}: {e.strerror}') from e


def read_csv(path):
    """Parse a file written by :func:`emit_csv` back into records."""
    def opt(s):
        return None if s == '' else float(s)

    with open(path, newline='') as f:
        rows = list(csv.reader(f))
    if not rows or rows[0] != CSV_HEADER:
        raise ValueError(f'{path}: unexpected header')
    return [SweepRecord(float(r[0]), Method(r[1]), int(r[2]), float(r[3]), opt(r[4]), opt(r[5]), opt(r[6]))
            for r in rows[1:]]
