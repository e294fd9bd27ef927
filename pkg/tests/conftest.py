"""Shared fixtures; expensive pipeline runs are memoized on disk.

A full renormalization step takes minutes, and several tests share the same
runs (the step at the reference map, the 11-step fixed-point iteration, the
finite-difference linearization matrix).  Results are cached as JSON under
tests/_cache keyed by run name; the pipeline is deterministic, so a cached
value is bit-identical to a fresh one.  Delete the directory to recompute.
"""

import json
from pathlib import Path

import pytest

from cylren.analytic_map import (
    AnalyticMap,
    quadratic_siegel_map,
    reference_fixed_point,
)
from cylren.renorm import (
    RenormConfig,
    RenormResult,
    check_domain,
    iterate_fixed_point,
    renormalize_once,
)
from cylren.spectrum import (
    BoundConstants,
    LinearizationMatrix,
    build_matrix,
    estimate_tail_constants,
    unstable_direction_probe,
)

CACHE_DIR = Path(__file__).resolve().parent / "_cache"


def cached(name, compute, encode=lambda v: v, decode=lambda v: v):
    path = CACHE_DIR / (name + ".json")
    if path.exists():
        with open(path) as fh:
            return decode(json.load(fh))
    value = compute()
    CACHE_DIR.mkdir(exist_ok=True)
    tmp = path.with_suffix(".tmp")
    with open(tmp, "w") as fh:
        json.dump(encode(value), fh, indent=1)
    tmp.replace(path)
    return value


def _encode_result(res):
    return {"map": res.map_out.to_json_dict(), "diagnostics": res.diagnostics}


def _decode_result(data):
    return RenormResult(
        AnalyticMap.from_json_dict(data["map"]), data["diagnostics"]
    )


def cached_renorm(name, f, cfg):
    return cached(
        name, lambda: renormalize_once(f, cfg), _encode_result, _decode_result
    )


@pytest.fixture(scope="session")
def fhat():
    return reference_fixed_point()


@pytest.fixture(scope="session")
def cfg():
    return RenormConfig()


@pytest.fixture(scope="session")
def renorm_base(fhat, cfg):
    """One renormalization step at the reference map, default config."""
    return cached_renorm("renorm_base", fhat, cfg)


@pytest.fixture(scope="session")
def fixed_point_run(cfg):
    """11 steps of the projected operator from the quadratic."""

    def compute():
        results = iterate_fixed_point(quadratic_siegel_map(cfg.rho_in), 11, cfg)
        return {
            "step_norms": [r.diagnostics["step_norm"] for r in results],
            "final": results[-1].map_out.to_json_dict(),
        }

    data = cached("fixed_point_11", compute)
    return {
        "step_norms": data["step_norms"],
        "final": AnalyticMap.from_json_dict(data["final"]),
    }


@pytest.fixture(scope="session")
def a14(fhat, cfg):
    """Finite-difference linearization matrix for N = 14, eps = 0.01."""
    path = CACHE_DIR / "a14.json"
    if path.exists():
        return LinearizationMatrix.load(path)
    mat = build_matrix(fhat, 14, 0.01, cfg)
    CACHE_DIR.mkdir(exist_ok=True)
    mat.save(path)
    return mat


@pytest.fixture(scope="session")
def tail_constants(fhat, cfg, a14):
    """Defect and contraction constants for the N = 14 spectral bound."""

    def compute():
        bc = estimate_tail_constants(fhat, 14, 0.01, cfg, k=80,
                                     probes=(15, 2), matrix=a14)
        return bc.to_dict()

    data = cached("tail_n14", compute)
    return BoundConstants(**data)


@pytest.fixture(scope="session")
def domain_report(fhat, cfg):
    return cached("domain_fhat", lambda: check_domain(fhat, cfg))


@pytest.fixture(scope="session")
def unstable_probe(fhat, cfg):
    return cached(
        "unstable_probe", lambda: unstable_direction_probe(fhat, 0.01, cfg)
    )
