"""JSON and CSV encodings of the lab's reports.

Count tables are lists of ``{"beta": nested rows, "count": int}`` sorted by
the entries of beta. Every ``*_to_dict`` has a matching ``*_from_dict`` that
rebuilds an equal in-memory value.
"""

from __future__ import annotations

import csv
import io
import json
from collections import Counter
from fractions import Fraction
from typing import Any, Iterable

from .core import BocksteinMatrix, GammaContext
from .distribution import CountReport, FiberCensus, JointTable, PsiBin, SampleReport
from .field_linalg import MatrixModP
from .module_linalg import MatrixModP2


def _table(items: Iterable[tuple[BocksteinMatrix, int]]) -> list[dict]:
    return [{"beta": beta.to_nested(), "count": count} for beta, count in items]


def _untable(p: int, k: int, digest: str, rows: list[dict]) -> dict[bytes, int]:
    return {
        BocksteinMatrix.from_nested(p, r["beta"], k, digest).to_bytes(): int(r["count"])
        for r in rows
    }


def _psi(d: dict) -> MatrixModP:
    return MatrixModP.from_rows(d["p"], d["psi"], cols=d["n"])


def count_report_to_dict(r: CountReport) -> dict:
    return {
        "kind": "count_report",
        "p": r.p, "m": r.m, "n": r.n, "k": r.k,
        "size_L_psi": r.size_L_psi,
        "hom_size": r.hom_size,
        "fiber_size": r.fiber_size,
        "theorem_probability": str(r.theorem_probability),
    }


def count_report_from_dict(d: dict) -> CountReport:
    return CountReport(d["p"], d["m"], d["n"], d["k"], d["size_L_psi"], d["hom_size"],
                       d["fiber_size"], Fraction(d["theorem_probability"]))


def census_to_dict(c: FiberCensus) -> dict:
    pred = c.prediction()
    return {
        "kind": "fiber_census",
        "p": c.p, "m": c.psi.rows, "n": c.psi.cols, "k": c.k, "c": c.c,
        "psi": c.psi.to_rows(),
        "psi_digest": c.psi_digest,
        "total": c.total,
        "counts": _table(c.items()),
        "prediction": count_report_to_dict(pred),
        "checks": c.checks(),
        "passed": c.passed,
    }


def census_from_dict(d: dict) -> FiberCensus:
    psi = _psi(d)
    return FiberCensus(psi, d["k"], d["c"], _untable(d["p"], d["k"], psi.digest(), d["counts"]), d["total"])


def sample_to_dict(r: SampleReport) -> dict:
    return {
        "kind": "sample_report",
        "p": r.p, "m": r.psi.rows, "n": r.psi.cols, "k": r.k, "c": r.c,
        "psi": r.psi.to_rows(),
        "psi_digest": r.psi.digest(),
        "hom_size": r.hom_size,
        "trials": r.trials,
        "seed": r.seed,
        "counts": _table(r.items()),
        "chi_square": r.chi_square,
        "degrees_of_freedom": r.degrees_of_freedom,
        "p_value": r.p_value,
    }


def sample_from_dict(d: dict) -> SampleReport:
    psi = _psi(d)
    return SampleReport(psi, d["k"], d["c"], d["trials"], d["seed"],
                        _untable(d["p"], d["k"], psi.digest(), d["counts"]),
                        d["chi_square"], d["degrees_of_freedom"], d["p_value"])


def _bin_items(b: PsiBin):
    digest = b.psi.digest()
    keys = sorted(b.counts, key=lambda key: BocksteinMatrix.from_bytes(key, digest).entries)
    return [(BocksteinMatrix.from_bytes(key, digest), b.counts[key]) for key in keys]


def joint_to_dict(t: JointTable) -> dict:
    return {
        "kind": "joint_table",
        "p": t.p, "m": t.m, "n": t.n,
        "trials": t.trials,
        "seed": t.seed,
        "rank_histogram": {str(k): v for k, v in t.rank_histogram().items()},
        "bins": [
            {
                "psi": b.psi.to_rows(),
                "psi_digest": digest,
                "k": b.k, "c": b.c,
                "hom_size": b.hom_size,
                "total": b.total,
                "flat": b.is_flat(),
                "counts": _table(_bin_items(b)),
            }
            for digest, b in t.bins.items()
        ],
    }


def joint_from_dict(d: dict) -> JointTable:
    bins = {}
    for b in d["bins"]:
        psi = MatrixModP.from_rows(d["p"], b["psi"], cols=d["n"])
        digest = psi.digest()
        bins[digest] = PsiBin(psi, b["k"], b["c"], Counter(_untable(d["p"], b["k"], digest, b["counts"])))
    return JointTable(d["p"], d["m"], d["n"], d["trials"], d["seed"], bins)


def compute_to_dict(ctx: GammaContext, phi: MatrixModP2, beta: BocksteinMatrix) -> dict:
    frame = ctx.frame
    return {
        "kind": "bockstein",
        "p": ctx.p, "m": frame.m, "n": frame.n, "k": beta.k, "c": beta.c,
        "phi": phi.to_rows(),
        "psi": ctx.psi.to_rows(),
        "psi_digest": ctx.psi_digest,
        "kernel_basis": [list(v) for v in frame.kernel_basis],
        "image_basis": [list(v) for v in frame.image_basis],
        "image_pivot_rows": list(frame.image_pivot_rows),
        "coker_rows": list(frame.coker_rows),
        "phi0": ctx.phi0.matrix.to_rows(),
        "beta": beta.to_nested(),
        "beta_bytes": beta.to_bytes().hex(),
    }


def beta_from_dict(d: dict) -> BocksteinMatrix:
    psi = MatrixModP.from_rows(d["p"], d["psi"], cols=d["n"])
    return BocksteinMatrix.from_nested(d["p"], d["beta"], d["k"], psi.digest())


FROM_DICT = {
    "count_report": count_report_from_dict,
    "fiber_census": census_from_dict,
    "sample_report": sample_from_dict,
    "joint_table": joint_from_dict,
    "bockstein": beta_from_dict,
}


def to_json(d: dict) -> str:
    return json.dumps(d, indent=2, sort_keys=False) + "\n"


def from_json(text: str) -> Any:
    d = json.loads(text)
    return FROM_DICT[d["kind"]](d)


CSV_HEADER = ["psi_digest", "k", "c", "beta", "count", "expected"]


def to_csv(d: dict) -> str:
    """One row per beta (count reports get a single row of their fields)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    kind = d["kind"]
    if kind == "count_report":
        keys = [k for k in d if k != "kind"]
        w.writerow(keys)
        w.writerow([d[k] for k in keys])
    elif kind in ("fiber_census", "sample_report"):
        if kind == "fiber_census":
            expected = d["prediction"]["fiber_size"]
        else:
            expected = str(Fraction(d["trials"], d["hom_size"]))
        w.writerow(CSV_HEADER)
        for r in d["counts"]:
            w.writerow([d["psi_digest"], d["k"], d["c"],
                        json.dumps(r["beta"], separators=(",", ":")), r["count"], expected])
    elif kind == "joint_table":
        w.writerow(CSV_HEADER)
        for b in d["bins"]:
            expected = str(Fraction(b["total"], b["hom_size"]))
            for r in b["counts"]:
                w.writerow([b["psi_digest"], b["k"], b["c"],
                            json.dumps(r["beta"], separators=(",", ":")), r["count"], expected])
    elif kind == "bockstein":
        w.writerow(["psi_digest", "k", "c", "beta"])
        w.writerow([d["psi_digest"], d["k"], d["c"], json.dumps(d["beta"], separators=(",", ":"))])
    elif kind == "verify_report":
        w.writerow(["criterion", "subject", "status", "detail"])
        for r in d["checks"]:
            w.writerow([r["criterion"], r["subject"], "PASS" if r["passed"] else "FAIL", r["detail"]])
    else:
        raise ValueError(f"no CSV layout for {kind!r}")
    return buf.getvalue()
