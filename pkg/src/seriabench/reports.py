"""Evaluation report emission: CSV table, JSON detail, SVG bar charts."""

import csv
import json

from .algorithms import ConfigurationError

CSV_FIELDS = ("algorithm", "ptype", "kind", "size", "mean_performance", "count")


def write_csv(report, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
        writer.writeheader()
        for row in report.rows:
            writer.writerow({k: row[k] for k in CSV_FIELDS})
    return path


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = []
        for row in csv.DictReader(fh):
            row["size"] = int(row["size"])
            row["count"] = int(row["count"])
            row["mean_performance"] = float(row["mean_performance"])
            rows.append(row)
    return rows


def write_json(report, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report.to_json(), fh, sort_keys=True, indent=1)
        fh.write("\n")
    return path


def _svg_bar_group(ptype, means, x0, y0, width, height):
    parts = [f'<text x="{x0}" y="{y0 - 8}" font-size="14" '
             f'font-family="sans-serif">{ptype}</text>']
    if not means:
        return parts
    top = max(1.0, max(v for _, v in means))
    bar_w = max(14, int(width / max(1, len(means)) * 0.7))
    step = width / max(1, len(means))
    for i, (name, value) in enumerate(means):
        h = 0 if top == 0 else value / top * (height - 30)
        x = x0 + i * step
        y = y0 + (height - 30) - h
        parts.append(f'<rect x="{x:.1f}" y="{y:.1f}" width="{bar_w}" '
                     f'height="{h:.1f}" fill="#4878a8"/>')
        parts.append(f'<text x="{x:.1f}" y="{y0 + height - 16}" font-size="9" '
                     f'font-family="sans-serif" transform="rotate(30 {x:.1f} '
                     f'{y0 + height - 16})">{name}</text>')
        parts.append(f'<text x="{x:.1f}" y="{y - 3:.1f}" font-size="9" '
                     f'font-family="sans-serif">{value:.3f}</text>')
    return parts


def write_svg(report, path):
    """Bar charts of mean performance per algorithm, one group per pattern."""
    by_ptype = {}
    for row in report.rows:
        agg = by_ptype.setdefault(row["ptype"], {})
        agg.setdefault(row["algorithm"], []).append(
            (row["mean_performance"], row["count"]))
    groups = []
    for ptype in sorted(by_ptype):
        means = []
        for algo in sorted(by_ptype[ptype]):
            cells = by_ptype[ptype][algo]
            total = sum(c for _, c in cells)
            means.append((algo, sum(v * c for v, c in cells) / total))
        groups.append((ptype, means))
    gw, gh, pad = 360, 200, 30
    width = gw + 2 * pad
    height = pad + len(groups) * (gh + pad)
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
             f'height="{height}">']
    y = pad + 10
    for ptype, means in groups:
        parts.extend(_svg_bar_group(ptype, means, pad, y, gw, gh))
        y += gh + pad
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts))
        fh.write("\n")
    return path


def emit_report(report, formats, out_base):
    """Write the requested formats next to ``out_base``; returns the paths."""
    if not report.rows:
        raise ConfigurationError("report is empty; nothing to emit")
    unknown = set(formats) - {"csv", "json", "svg"}
    if unknown:
        raise ConfigurationError(f"unknown report formats: {sorted(unknown)}")
    written = []
    if "csv" in formats:
        written.append(write_csv(report, out_base + ".csv"))
    if "json" in formats:
        written.append(write_json(report, out_base + ".json"))
    if "svg" in formats:
        written.append(write_svg(report, out_base + ".svg"))
    return written
