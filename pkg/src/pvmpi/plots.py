"""Static SVG figures: fan charts, scenario spaghetti, MPI bands,
bivariate boxes, reliability diagrams.

Hand-rolled SVG so the artifacts stay dependency-free and structurally
testable: nested bands are polygons inside a ``<g class="bands">`` group,
drawn widest (lightest) first so low-coverage bands sit darkest on top.
"""

import numpy as np

from . import marginals as _marginals

W, H = 640, 420
MARGIN = 46


def _xmap(x, x0, x1):
    return MARGIN + (x - x0) / (x1 - x0) * (W - 2 * MARGIN)


def _ymap(y, y0=0.0, y1=1.0):
    return H - MARGIN - (y - y0) / (y1 - y0) * (H - 2 * MARGIN)


def _shade(rank, total):
    # rank 0 = darkest (lowest coverage)
    level = int(40 + 190 * rank / max(total - 1, 1))
    return f"rgb({level},{level},{level})"


def _header(title):
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
        f'viewBox="0 0 {W} {H}">',
        f'<title>{title}</title>',
        f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>',
    ]


def _axes(parts, x0, x1, xlabel, ylabel):
    parts.append(
        f'<line x1="{MARGIN}" y1="{H - MARGIN}" x2="{W - MARGIN}" y2="{H - MARGIN}" '
        f'stroke="black"/>'
    )
    parts.append(
        f'<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" y2="{H - MARGIN}" stroke="black"/>'
    )
    parts.append(
        f'<text x="{W // 2}" y="{H - 8}" font-size="12" text-anchor="middle">{xlabel}</text>'
    )
    parts.append(
        f'<text x="14" y="{H // 2}" font-size="12" text-anchor="middle" '
        f'transform="rotate(-90 14 {H // 2})">{ylabel}</text>'
    )


def _polyline(xs, ys, stroke, width=1.5, cls=""):
    pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(xs, ys))
    cls_attr = f' class="{cls}"' if cls else ""
    return f'<polyline{cls_attr} points="{pts}" fill="none" stroke="{stroke}" stroke-width="{width}"/>'


def _band_polygon(xs, lo, hi, fill, cls="band"):
    upper = [(x, y) for x, y in zip(xs, hi)]
    lower = [(x, y) for x, y in zip(reversed(xs), reversed(lo))]
    pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in upper + lower)
    return f'<polygon class="{cls}" points="{pts}" fill="{fill}" stroke="none"/>'


def _interval_bands_svg(title, bounds_by_alpha, observed, hours):
    """Shared renderer for fan charts and MPI band charts."""
    alphas = sorted(bounds_by_alpha)
    x0, x1 = hours[0], hours[-1]
    xs = [_xmap(h, x0, x1) for h in hours]
    parts = _header(title)
    parts.append('<g class="bands">')
    for rank, alpha in enumerate(reversed(alphas)):  # widest first
        lo, hi = bounds_by_alpha[alpha]
        fill = _shade(len(alphas) - 1 - rank, len(alphas))
        parts.append(_band_polygon(xs, [_ymap(v) for v in lo], [_ymap(v) for v in hi], fill))
    parts.append("</g>")
    if observed is not None:
        parts.append(_polyline(xs, [_ymap(v) for v in observed], "#e6b800", 2.5, cls="observed"))
    _axes(parts, x0, x1, "hour", "normalized power")
    parts.append("</svg>")
    return "\n".join(parts)


def fan_chart_svg(day_curves, observed=None, hour_start=7) -> str:
    """Univariate prediction intervals per hour (central intervals)."""
    levels = day_curves[0].levels
    alphas = sorted(set(levels))
    hours = [hour_start + c.lead for c in day_curves]
    bounds = {}
    for alpha in alphas:
        lo = [_marginals.inverse_cdf(c, (1 - alpha) / 2) for c in day_curves]
        hi = [_marginals.inverse_cdf(c, (1 + alpha) / 2) for c in day_curves]
        bounds[alpha] = (lo, hi)
    return _interval_bands_svg("univariate prediction intervals", bounds, observed, hours)


def mpi_bands_svg(mpi_set, observed=None, hour_start=7) -> str:
    """The MPI boxes of one day rendered as nested per-hour bands."""
    dim = mpi_set.boxes[0].lower.shape[0]
    hours = [hour_start + d for d in range(dim)]
    bounds = {box.alpha: (list(box.lower), list(box.upper)) for box in mpi_set.boxes}
    return _interval_bands_svg("multivariate prediction intervals", bounds, observed, hours)


def scenarios_svg(scenario_values, observed=None, hour_start=7, max_paths=20) -> str:
    """Spaghetti plot of sampled trajectories."""
    values = np.atleast_2d(scenario_values)[:max_paths]
    dim = values.shape[1]
    hours = [hour_start + d for d in range(dim)]
    xs = [_xmap(h, hours[0], hours[-1]) for h in hours]
    parts = _header("scenario trajectories")
    parts.append('<g class="scenarios">')
    for row in values:
        parts.append(_polyline(xs, [_ymap(v) for v in row], "#999999", 1.0, cls="scenario"))
    parts.append("</g>")
    if observed is not None:
        parts.append(_polyline(xs, [_ymap(v) for v in observed], "black", 2.5, cls="observed"))
    _axes(parts, hours[0], hours[-1], "hour", "normalized power")
    parts.append("</svg>")
    return "\n".join(parts)


def bivariate_boxes_svg(mpi_set, dim_x, dim_y, observed=None) -> str:
    """Nested rectangles for two lead times, plus the measured point in red."""
    parts = _header(f"bivariate MPIs (dims {dim_x + 1}, {dim_y + 1})")
    parts.append('<g class="boxes">')
    boxes = sorted(mpi_set.boxes, key=lambda b: -b.alpha)  # widest first
    total = len(boxes)
    for rank, box in enumerate(boxes):
        x_lo = _xmap(box.lower[dim_x], 0, 1)
        x_hi = _xmap(box.upper[dim_x], 0, 1)
        y_lo = _ymap(box.lower[dim_y])
        y_hi = _ymap(box.upper[dim_y])
        fill = _shade(total - 1 - rank, total)
        parts.append(
            f'<rect class="mpi-box" x="{x_lo:.2f}" y="{y_hi:.2f}" '
            f'width="{x_hi - x_lo:.2f}" height="{y_lo - y_hi:.2f}" fill="{fill}"/>'
        )
    parts.append("</g>")
    if observed is not None:
        cx = _xmap(observed[dim_x], 0, 1)
        cy = _ymap(observed[dim_y])
        parts.append(f'<circle class="observed" cx="{cx:.2f}" cy="{cy:.2f}" r="4" fill="red"/>')
    _axes(parts, 0, 1, f"power dim {dim_x + 1}", f"power dim {dim_y + 1}")
    parts.append("</svg>")
    return "\n".join(parts)


def reliability_svg(coverage_by_model) -> str:
    """Empirical vs nominal coverage with the diagonal reference."""
    parts = _header("reliability diagram")
    diag = [_xmap(0, 0, 1), _ymap(0), _xmap(1, 0, 1), _ymap(1)]
    parts.append(
        f'<line class="diagonal" x1="{diag[0]:.2f}" y1="{diag[1]:.2f}" '
        f'x2="{diag[2]:.2f}" y2="{diag[3]:.2f}" stroke="#888888" stroke-dasharray="4 3"/>'
    )
    colors = {"gaussian": "#1f77b4", "rvine": "#d62728", "upi": "#2ca02c"}
    for idx, (name, coverage) in enumerate(sorted(coverage_by_model.items())):
        alphas = sorted(coverage)
        xs = [_xmap(a, 0, 1) for a in alphas]
        ys = [_ymap(coverage[a]) for a in alphas]
        color = colors.get(name, f"hsl({60 * idx},60%,40%)")
        parts.append(_polyline(xs, ys, color, 2.0, cls=f"reliability-{name}"))
        parts.append(
            f'<text x="{W - MARGIN - 4}" y="{MARGIN + 14 * (idx + 1)}" font-size="11" '
            f'text-anchor="end" fill="{color}">{name}</text>'
        )
    _axes(parts, 0, 1, "nominal coverage", "empirical coverage")
    parts.append("</svg>")
    return "\n".join(parts)
