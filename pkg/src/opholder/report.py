"""CSV, JSON and SVG emission for experiment records.

Records are anything with ``rows`` (a list of flat dicts) plus optional
``tag``, ``seed`` and ``config``; plain lists of rows are accepted too.
"""
from __future__ import annotations

import csv
import json
import math
import xml.etree.ElementTree as ET
from pathlib import Path

import numpy as np

from .bounds_verifier import exponent_fit

SVG_NS = "http://www.w3.org/2000/svg"
WIDTH, HEIGHT, PAD = 640, 420, 60


def _rows(record) -> list:
    return list(record.rows if hasattr(record, "rows") else record)


def _meta(record) -> dict:
    if isinstance(record, dict):
        return record
    return {"tag": getattr(record, "tag", ""), "seed": getattr(record, "seed", ""),
            "config": getattr(record, "config", {}) or {}}


def format_value(v) -> str:
    """Deterministic text for one CSV cell; floats carry 17 significant digits."""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    if isinstance(v, (list, tuple)):
        return " ".join(format_value(x) for x in v)
    return "" if v is None else str(v)


def emit_csv(record, path, fields=None) -> Path:
    """Write rows in ``fields`` order (default: keys of the first row)."""
    rows = _rows(record)
    if fields is None:
        fields = list(rows[0]) if rows else list(getattr(record, "fields", ()) or ())
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(fields)
        for r in rows:
            out.writerow([format_value(r.get(k)) for k in fields])
    return path


def read_csv(path) -> list:
    """Rows back as dicts, numeric cells parsed."""
    def parse(s):
        for cast in (int, float):
            try:
                return cast(s)
            except ValueError:
                pass
        return s

    with open(path, newline="") as fh:
        return [{k: parse(v) for k, v in row.items()} for row in csv.DictReader(fh)]


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return {"re": obj.real.tolist(), "im": obj.imag.tolist()}
        return obj.tolist()
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, Path):
        return str(obj)
    return obj


def emit_json(obj, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n")
    return path


# ---------------------------------------------------------------------------
# SVG


class _Axes:
    """Linear map from data box to the drawing area."""

    def __init__(self, xs, ys):
        self.x0, self.x1 = self._span(xs)
        self.y0, self.y1 = self._span(ys)

    @staticmethod
    def _span(v):
        lo, hi = float(np.min(v)), float(np.max(v))
        if hi - lo < 1e-12 * max(1.0, abs(lo)):
            lo, hi = lo - 0.5, hi + 0.5
        pad = 0.05 * (hi - lo)
        return lo - pad, hi + pad

    def px(self, x):
        return PAD + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - 2 * PAD)

    def py(self, y):
        return HEIGHT - PAD - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - 2 * PAD)


def _doc(title):
    root = ET.Element("svg", xmlns=SVG_NS, width=str(WIDTH), height=str(HEIGHT),
                      viewBox=f"0 0 {WIDTH} {HEIGHT}")
    ET.SubElement(root, "title").text = title
    ET.SubElement(root, "rect", x="0", y="0", width=str(WIDTH), height=str(HEIGHT), fill="white")
    return root


def _text(root, x, y, s, **kw):
    el = ET.SubElement(root, "text", x=f"{x:.2f}", y=f"{y:.2f}", attrib={"font-size": "12",
                       "font-family": "monospace", **kw})
    el.text = s
    return el


def _frame(root, ax, xlabel, ylabel, caption):
    ET.SubElement(root, "rect", x=str(PAD), y=str(PAD), width=str(WIDTH - 2 * PAD),
                  height=str(HEIGHT - 2 * PAD), fill="none", stroke="black")
    for v in np.linspace(ax.x0, ax.x1, 5):
        _text(root, ax.px(v) - 20, HEIGHT - PAD + 16, f"{v:.3g}")
    for v in np.linspace(ax.y0, ax.y1, 5):
        _text(root, 4, ax.py(v) + 4, f"{v:.3g}")
    _text(root, WIDTH / 2 - 60, HEIGHT - 12, xlabel, **{"class": "xlabel"})
    _text(root, 4, PAD - 24, ylabel, **{"class": "ylabel"})
    _text(root, PAD, 20, caption, **{"class": "caption"})


def _caption(meta) -> str:
    cfg = meta.get("config") or {}
    dims = cfg.get("dims", cfg.get("dim", "-"))
    return f"tag={meta.get('tag', '')} dims={format_value(dims)} seed={meta.get('seed', '')}"


def _markers(root, ax, xs, ys):
    for x, y in zip(xs, ys):
        ET.SubElement(root, "circle", cx=f"{ax.px(x):.2f}", cy=f"{ax.py(y):.2f}", r="3",
                      fill="steelblue", attrib={"class": "marker"})


def emit_svg(record, kind: str, path) -> Path:
    """Plot kinds: ratio-vs-delta, loglog-slope, kappa-table."""
    rows = _rows(record)
    if not rows:
        raise ValueError("empty record")
    meta = _meta(record)
    caption = _caption(meta)
    root = _doc(f"{kind} {caption}")
    if kind == "ratio-vs-delta":
        pts = [(r["delta"], r["ratio"]) for r in rows if r["delta"] > 0 and np.isfinite(r["ratio"])]
        if not pts:
            raise ValueError("no plottable points")
        xs = np.log10([p[0] for p in pts])
        ys = np.array([p[1] for p in pts])
        ax = _Axes(xs, ys)
        _frame(root, ax, "log10 delta", "ratio", caption)
        _markers(root, ax, xs, ys)
    elif kind == "loglog-slope":
        pts = [(r["delta"], r["numerator"]) for r in rows if r["delta"] > 0 and r["numerator"] > 0]
        if not pts:
            raise ValueError("no plottable points")
        d = np.array([p[0] for p in pts])
        v = np.array([p[1] for p in pts])
        xs, ys = np.log(d), np.log(v)
        ax = _Axes(xs, ys)
        _frame(root, ax, "log delta", "log value", caption)
        _markers(root, ax, xs, ys)
        if len(np.unique(xs)) >= 2:
            fit = exponent_fit(d, v)
            x0, x1 = xs.min(), xs.max()
            y0, y1 = fit["slope"] * x0 + fit["intercept"], fit["slope"] * x1 + fit["intercept"]
            ET.SubElement(root, "line", x1=f"{ax.px(x0):.2f}", y1=f"{ax.py(y0):.2f}",
                          x2=f"{ax.px(x1):.2f}", y2=f"{ax.py(y1):.2f}", stroke="crimson",
                          attrib={"class": "fit"})
            _text(root, PAD + 8, PAD + 16, f"slope = {fit['slope']!r}",
                  **{"class": "slope", "data-slope": repr(fit["slope"])})
    elif kind == "kappa-table":
        keys = list(rows[0])
        h = 16
        root.set("height", str(PAD + h * (len(rows) + 2)))
        root.set("viewBox", f"0 0 {WIDTH} {PAD + h * (len(rows) + 2)}")
        _text(root, PAD, 20, caption, **{"class": "caption"})
        _text(root, PAD, PAD, "  ".join(keys), **{"font-weight": "bold"})
        for i, r in enumerate(rows):
            _text(root, PAD, PAD + h * (i + 1), "  ".join(format_value(r[k]) for k in keys))
    else:
        raise ValueError(f"unknown plot kind {kind!r}")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    ET.ElementTree(root).write(path, encoding="utf-8", xml_declaration=True)
    return path
