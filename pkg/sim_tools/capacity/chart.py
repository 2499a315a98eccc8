# smmimo_sim/sim_tools/capacity/chart.py
"""Self-contained SVG line chart of a capacity curve, one polyline per alpha."""

from typing import List

from sim_tools.capacity.montecarlo import CapacityCurve

COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"]

WIDTH, HEIGHT = 900, 560
LEFT, RIGHT, TOP, BOTTOM = 80, 200, 60, 70


def _escape(text: str) -> str:
    return (
        text.replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace('"', "&quot;")
    )


def _nice_max(value: float) -> float:
    if value <= 0:
        return 1.0
    step = 10 ** len(str(int(value))) / 10
    return step * (int(value / step) + 1)


def render_capacity_svg(curve: CapacityCurve, title: str = "Ergodic capacity vs SNR") -> str:
    """
    Render the curve as SVG text.

    Axes are SNR in dB (x) and capacity in bps/Hz (y); the legend lists
    alpha per series. No scripts, fonts or external references.
    """
    snrs = sorted({p.snr_db for p in curve.points})
    if not snrs:
        raise ValueError("capacity curve is empty")
    x_min, x_max = snrs[0], snrs[-1]
    y_max = _nice_max(max(p.mean_capacity for p in curve.points))
    plot_w = WIDTH - LEFT - RIGHT
    plot_h = HEIGHT - TOP - BOTTOM
    bottom = TOP + plot_h

    def x_px(x: float) -> float:
        if x_max == x_min:
            return LEFT + plot_w / 2
        return LEFT + (x - x_min) / (x_max - x_min) * plot_w

    def y_px(y: float) -> float:
        return bottom - y / y_max * plot_h

    lines: List[str] = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        '<rect x="0" y="0" width="100%" height="100%" fill="#ffffff"/>',
        f'<text x="{WIDTH / 2:.1f}" y="32" text-anchor="middle" font-size="20" font-family="sans-serif">{_escape(title)}</text>',
    ]

    ticks = 5
    for i in range(ticks + 1):
        value = y_max * i / ticks
        y = y_px(value)
        lines.append(f'<line x1="{LEFT}" y1="{y:.2f}" x2="{LEFT + plot_w}" y2="{y:.2f}" stroke="#dddddd" stroke-width="1"/>')
        lines.append(f'<text x="{LEFT - 8}" y="{y + 4:.2f}" text-anchor="end" font-size="12" font-family="sans-serif">{value:g}</text>')
    for snr in snrs:
        x = x_px(snr)
        lines.append(f'<line x1="{x:.2f}" y1="{bottom}" x2="{x:.2f}" y2="{bottom + 5}" stroke="#000000" stroke-width="1"/>')
        lines.append(f'<text x="{x:.2f}" y="{bottom + 20}" text-anchor="middle" font-size="12" font-family="sans-serif">{snr:g}</text>')

    lines.append(f'<line x1="{LEFT}" y1="{bottom}" x2="{LEFT + plot_w}" y2="{bottom}" stroke="#000000" stroke-width="2"/>')
    lines.append(f'<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{bottom}" stroke="#000000" stroke-width="2"/>')
    lines.append(
        f'<text x="{LEFT + plot_w / 2:.1f}" y="{HEIGHT - 20}" text-anchor="middle" font-size="14" font-family="sans-serif">SNR (dB)</text>'
    )
    lines.append(
        f'<text x="20" y="{TOP + plot_h / 2:.1f}" text-anchor="middle" font-size="14" font-family="sans-serif" '
        f'transform="rotate(-90 20 {TOP + plot_h / 2:.1f})">Capacity (bps/Hz)</text>'
    )

    for idx, alpha in enumerate(curve.alphas()):
        color = COLORS[idx % len(COLORS)]
        series = curve.series(alpha)
        points = " ".join(f"{x_px(p.snr_db):.2f},{y_px(p.mean_capacity):.2f}" for p in series)
        lines.append(f'<polyline fill="none" stroke="{color}" stroke-width="2.5" points="{points}"/>')
        for p in series:
            lines.append(f'<circle cx="{x_px(p.snr_db):.2f}" cy="{y_px(p.mean_capacity):.2f}" r="3.5" fill="{color}"/>')
        ly = TOP + 20 + idx * 24
        lx = LEFT + plot_w + 20
        lines.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 24}" y2="{ly}" stroke="{color}" stroke-width="3"/>')
        lines.append(f'<text x="{lx + 32}" y="{ly + 4}" font-size="13" font-family="sans-serif">alpha = {alpha:g}</text>')

    lines.append("</svg>")
    return "\n".join(lines) + "\n"
