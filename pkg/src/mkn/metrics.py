"""Ranking metrics and corpus reports.

``P@k`` here is a hit rate: the fraction of records with at least one
gold disease among the top ``k``.
"""

import csv
import io
import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import EmptyCorpus, EmptyGoldSet

DEFAULT_CUTOFF = 10


def relevance_vector(ranking, gold, p=DEFAULT_CUTOFF) -> list:
    gold = set(gold)
    return [1 if d in gold else 0 for d in list(ranking)[:p]]


def dcg(rel, p=DEFAULT_CUTOFF) -> float:
    """``rel_1 + sum_{i=2..p} rel_i / log2(i)``; missing positions count 0."""
    if p < 1:
        raise ValueError("cutoff p must be >= 1")
    rel = list(rel)[:p]
    if not rel:
        return 0.0
    return float(rel[0]) + math.fsum(r / math.log2(i) for i, r in enumerate(rel[1:], start=2))


def recall_at_k(gold, ranking, k=10) -> float:
    gold = set(gold)
    if not gold:
        raise EmptyGoldSet("recall needs at least one gold disease")
    return len(gold & set(list(ranking)[:k])) / len(gold)


def hit_at_k(gold, ranking, k) -> int:
    return int(bool(set(gold) & set(list(ranking)[:k])))


def precision_hit_at_k(results, golds, k) -> float:
    """Fraction of records having at least one gold disease in the top ``k``."""
    results, golds = list(results), list(golds)
    if not results:
        raise EmptyCorpus("no records")
    return sum(hit_at_k(g, r, k) for r, g in zip(results, golds)) / len(results)


@dataclass
class RecordScore:
    record_id: str
    dcg: float
    r_at_10: float
    hit10: int
    hit20: int


@dataclass
class CorpusReport:
    system: str
    rows: list
    config: dict = field(default_factory=dict)
    skipped_records: int = 0

    @property
    def p_at_10(self):
        return float(np.mean([r.hit10 for r in self.rows]))

    @property
    def p_at_20(self):
        return float(np.mean([r.hit20 for r in self.rows]))

    @property
    def r_at_10_avg(self):
        return math.fsum(r.r_at_10 for r in self.rows) / len(self.rows)

    @property
    def dcg_avg(self):
        return math.fsum(r.dcg for r in self.rows) / len(self.rows)

    def aggregates(self) -> dict:
        return {
            "system": self.system,
            "p_at_10": self.p_at_10,
            "p_at_20": self.p_at_20,
            "r_at_10_avg": self.r_at_10_avg,
            "dcg_avg": self.dcg_avg,
            "n_records": len(self.rows),
            "skipped_records": self.skipped_records,
            "config": self.config,
        }


def build_report(results, records, system, config=None, p=DEFAULT_CUTOFF) -> CorpusReport:
    """Score ranked diagnoses against the gold labels of ``records``.

    Records without gold diseases cannot be scored for recall and are
    dropped (counted in ``skipped_records``).
    """
    rows, skipped = [], 0
    for res, rec in zip(results, records):
        if not rec.diseases:
            skipped += 1
            continue
        ranking = res.diseases
        rows.append(RecordScore(
            rec.id,
            dcg(relevance_vector(ranking, rec.diseases, p), p),
            recall_at_k(rec.diseases, ranking, 10),
            hit_at_k(rec.diseases, ranking, 10),
            hit_at_k(rec.diseases, ranking, 20),
        ))
    if not rows:
        raise EmptyCorpus("no scorable records")
    return CorpusReport(system, rows, dict(config or {}), skipped)


def report_csv(report: CorpusReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["record_id", "system", "dcg", "r_at_10", "hit10", "hit20"])
    for r in report.rows:
        w.writerow([r.record_id, report.system, repr(r.dcg), repr(r.r_at_10), r.hit10, r.hit20])
    return buf.getvalue()


def report_json(report: CorpusReport) -> str:
    return json.dumps(report.aggregates(), sort_keys=True, indent=2) + "\n"


def atomic_write(path, text: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# --- SVG charts ----------------------------------------------------------

_W, _H, _PAD = 640, 320, 40


def _svg(body, title):
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" viewBox="0 0 {_W} {_H}">\n'
        f'<rect width="{_W}" height="{_H}" fill="white"/>\n'
        f'<text x="{_W / 2}" y="20" text-anchor="middle" font-family="sans-serif" font-size="14">{title}</text>\n'
        f'<line x1="{_PAD}" y1="{_H - _PAD}" x2="{_W - _PAD}" y2="{_H - _PAD}" stroke="black"/>\n'
        f'<line x1="{_PAD}" y1="{_PAD}" x2="{_PAD}" y2="{_H - _PAD}" stroke="black"/>\n'
        f"{body}</svg>\n"
    )


def dcg_curve_svg(report: CorpusReport) -> str:
    vals = [r.dcg for r in report.rows]
    top = max(max(vals), 1.0)
    n = len(vals)
    step = (_W - 2 * _PAD) / max(n - 1, 1)
    pts = " ".join(
        f"{_PAD + i * step:.2f},{_H - _PAD - v / top * (_H - 2 * _PAD):.2f}" for i, v in enumerate(vals)
    )
    body = f'<polyline fill="none" stroke="steelblue" stroke-width="1.5" points="{pts}"/>\n'
    body += f'<text x="{_PAD - 4}" y="{_PAD + 4}" text-anchor="end" font-size="10">{top:.2f}</text>\n'
    return _svg(body, f"DCG per record ({report.system})")


def recall_bars_svg(report: CorpusReport, bins=(0.0, 0.25, 0.5, 0.75, 1.0)) -> str:
    """Bar chart of how many records fall at each recall level (rounded down to a bin)."""
    counts = [0] * len(bins)
    for r in report.rows:
        i = max(j for j, b in enumerate(bins) if r.r_at_10 >= b - 1e-12)
        counts[i] += 1
    top = max(max(counts), 1)
    bw = (_W - 2 * _PAD) / len(bins)
    body = ""
    for i, (b, c) in enumerate(zip(bins, counts)):
        h = c / top * (_H - 2 * _PAD)
        x = _PAD + i * bw
        body += (f'<rect x="{x + 4:.2f}" y="{_H - _PAD - h:.2f}" width="{bw - 8:.2f}" height="{h:.2f}" '
                 f'fill="indianred"/>\n'
                 f'<text x="{x + bw / 2:.2f}" y="{_H - _PAD + 14}" text-anchor="middle" font-size="10">{b:g}</text>\n'
                 f'<text x="{x + bw / 2:.2f}" y="{_H - _PAD - h - 3:.2f}" text-anchor="middle" font-size="10">{c}</text>\n')
    return _svg(body, f"R@10 distribution ({report.system})")


def emit_report(report: CorpusReport, out_dir, stem=None) -> dict:
    """Write ``<stem>.csv``, ``<stem>.json`` and two SVG charts into ``out_dir``."""
    if not report.rows:
        raise EmptyCorpus("nothing to report")
    stem = stem or f"report_{report.system}"
    out_dir = Path(out_dir)
    paths = {
        "csv": out_dir / f"{stem}.csv",
        "json": out_dir / f"{stem}.json",
        "dcg_svg": out_dir / f"{stem}_dcg.svg",
        "recall_svg": out_dir / f"{stem}_r10.svg",
    }
    atomic_write(paths["csv"], report_csv(report))
    atomic_write(paths["json"], report_json(report))
    atomic_write(paths["dcg_svg"], dcg_curve_svg(report))
    atomic_write(paths["recall_svg"], recall_bars_svg(report))
    return paths
