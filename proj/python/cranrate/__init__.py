"""Rate regions, sum-rate sweeps and checks for two-hop cloud radio access networks.

pmf, channel, network and sweep-config arguments accept either a JSON string
or the equivalent dict.
"""

import json as _json

from . import _core
from ._core import ParseError, capacity_logdet, fme, region_text


def _dump(obj):
    return obj if isinstance(obj, str) else _json.dumps(obj)


def entropy(pmf, variables):
    return _core.entropy(_dump(pmf), list(variables))


def mutual_info(pmf, a, b, given=()):
    return _core.mutual_info(_dump(pmf), list(a), list(b), list(given))


def channel_capacity(channel):
    """(capacity in bits, optimizing input pmf)."""
    return _core.channel_capacity(_dump(channel))


def region_json(system, pmf, caps=None, nbs=2, nusers=2):
    return _json.loads(_core.region_json(system, _dump(pmf), caps or {}, nbs, nusers))


def max_sum_rate(system, pmf, caps=None):
    return _core.max_sum_rate(system, _dump(pmf), caps or {})


def theorem1_margin(pmf, caps, r1, r2):
    return _core.theorem1_margin(_dump(pmf), caps, r1, r2)


def optimize_scheme(scheme, network, restarts=8, max_evals=20000, seed=1):
    """(sum rate, optimizer coordinates) for one of GDS-I, GDS-II, GDS-III, GCOMP, GDS-TS."""
    return _core.optimize_scheme(scheme, _dump(network), restarts, max_evals, seed)


def rsum_star(network, restarts=16, seed=1):
    return _core.rsum_star(_dump(network), restarts, seed)


def sweep_csv(config):
    return _core.sweep_csv(_dump(config))


def gap_audit(instances, seed, nmax=4, lmax=4):
    return _json.loads(_core.gap_audit(instances, seed, nmax, lmax))


def verify_examples(example=0, samples=10000, seed=1):
    return _json.loads(_core.verify_examples(example, samples, seed))


__all__ = [
    "ParseError",
    "capacity_logdet",
    "channel_capacity",
    "entropy",
    "fme",
    "gap_audit",
    "max_sum_rate",
    "mutual_info",
    "optimize_scheme",
    "region_json",
    "region_text",
    "rsum_star",
    "sweep_csv",
    "theorem1_margin",
    "verify_examples",
]
