"""Bundled reference spectra for the verification suite.

Eight circuits on the minimal representations with the fixed angle rule
phi_k = sin(k).  The stored phase values are published to 4, 5 or 6 decimal
places, so each row carries the matching comparison tolerance; the
difference counts are exact integers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebras import build_representation
from .circuits import assemble, parse_geometry
from .spectral import Verdict, classify


@dataclass(frozen=True)
class ReferenceRun:
    name: str
    m: int
    geometry: str
    positive_phases: tuple
    phase_tol: float
    n_distinct_diffs: int
    verdict: Verdict


REFERENCE_RUNS = (
    ReferenceRun(
        "m4-full-product",
        4,
        "u1 u2 u3 u4",
        (0.90790, 0.93150, 1.47642, 1.69880),
        5e-6,
        33,
        Verdict.GENERIC_REFLECTION_SYMMETRIC,
    ),
    ReferenceRun(
        "m12-full-product",
        12,
        "u1 u2 u3 u4 u5 u6 u7 u8 u9 u10 u11 u12",
        (
            0.059883, 0.093810, 0.131038, 0.158502, 0.520456, 0.599805,
            0.676978, 0.738023, 0.797634, 0.881392, 1.122102, 1.153706,
            1.236953, 1.256336, 1.371849, 1.442192, 1.512413, 1.558035,
            1.716604, 1.808851, 1.999112, 2.152408, 2.173039, 2.207634,
            2.386399, 2.469262, 2.501312, 2.629893, 2.771071, 2.812209,
            3.085452, 3.133734,
        ),
        5e-7,
        2049,
        Verdict.GENERIC_REFLECTION_SYMMETRIC,
    ),
    ReferenceRun(
        "m4-staircase-ggt",
        4,
        "u1 u2 u3 u4 | ggt",
        (0.11319, 3.00427),
        5e-6,
        9,
        Verdict.FREE_FERMIONIC,
    ),
    ReferenceRun(
        "m7-staircase-ggt",
        7,
        "u1 u2 u3 u4 u5 u6 u7 | ggt",
        (1.2386, 1.3379, 1.8236, 1.8830),
        5e-5,
        27,
        Verdict.FREE_FERMIONIC,
    ),
    ReferenceRun(
        "m12-g1-ggt",
        12,
        "g1_ggt",
        (0.38339, 0.47935, 0.57221, 0.66313, 2.47595, 2.57190, 2.66477, 2.75568),
        5e-6,
        81,
        Verdict.FREE_FERMIONIC,
    ),
    ReferenceRun(
        "m12-g2-ggt",
        12,
        "g2_ggt",
        (0.33711, 0.59747, 1.06579, 1.32615, 1.81545, 2.07581, 2.54413, 2.80449),
        5e-6,
        81,
        Verdict.FREE_FERMIONIC,
    ),
    ReferenceRun(
        "m12-g3-ggt",
        12,
        "g3_ggt",
        (0.47513, 0.69983, 0.95615, 1.18029, 1.96102, 2.18572, 2.44204, 2.66618),
        5e-6,
        81,
        Verdict.FREE_FERMIONIC,
    ),
    ReferenceRun(
        "m8-word-ggt",
        8,
        "u1 u4 u3 u5 u6 u8 | ggt",
        (1.0080, 1.3259, 1.8400, 2.1092),
        5e-5,
        33,
        Verdict.GENERIC_REFLECTION_SYMMETRIC,
    ),
)


def run_reference(run: ReferenceRun, tol_override: float | None = None) -> dict:
    """Recompute one reference circuit and compare against the stored values."""
    rep = build_representation("ffd-min", run.m)
    geo = parse_geometry(run.geometry, angles="sin", m=run.m)
    sig = classify(assemble(rep, geo))
    pos = np.sort(sig.distinct_phases[sig.distinct_phases > 0])
    expected = np.sort(np.array(run.positive_phases))
    tol = run.phase_tol if tol_override is None else tol_override
    if pos.size == expected.size:
        phase_err = float(np.max(np.abs(pos - expected)))
    else:
        phase_err = float("inf")
    ok = (
        phase_err <= tol
        and sig.n_distinct_diffs == run.n_distinct_diffs
        and sig.verdict is run.verdict
    )
    return {
        "name": run.name,
        "m": run.m,
        "geometry": run.geometry,
        "n_distinct": sig.n_distinct,
        "n_distinct_diffs": sig.n_distinct_diffs,
        "expected_diffs": run.n_distinct_diffs,
        "verdict": sig.verdict.value,
        "expected_verdict": run.verdict.value,
        "phase_error": phase_err,
        "phase_tol": tol,
        "pass": bool(ok),
    }


def run_all_references(tol_override: float | None = None) -> list:
    return [run_reference(r, tol_override) for r in REFERENCE_RUNS]
