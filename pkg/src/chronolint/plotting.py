"""Deterministic SVG rendering for significance series.

Fixed viewport, fixed colors, no timestamps: identical input data always
renders to identical bytes, so plots can be golden-tested.
"""

from __future__ import annotations

WIDTH = 860
HEIGHT = 320
MARGIN_LEFT = 50
MARGIN_RIGHT = 10
MARGIN_TOP = 30
MARGIN_BOTTOM = 40

_WORSE = "#c0392b"
_BETTER = "#27ae60"
_FLAT = "#95a5a6"


def render_significance_svg(scores: list[float], labels: list[str] | None = None) -> str:
    """Bar chart of per-change significance on the fixed [-1, 1] scale."""
    n = len(scores)
    plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM
    mid_y = MARGIN_TOP + plot_h / 2

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="monospace" font-size="11">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        '<text x="8" y="18" font-size="13">Weighted significance per change</text>',
    ]

    for value, label in ((1.0, "+1"), (0.0, "0"), (-1.0, "-1")):
        y = mid_y - value * plot_h / 2
        parts.append(
            f'<line x1="{MARGIN_LEFT}" y1="{y:.1f}" x2="{WIDTH - MARGIN_RIGHT}" '
            f'y2="{y:.1f}" stroke="#ddd"/>'
        )
        parts.append(f'<text x="{MARGIN_LEFT - 26}" y="{y + 4:.1f}">{label}</text>')
    parts.append(
        f'<line x1="{MARGIN_LEFT}" y1="{mid_y:.1f}" x2="{WIDTH - MARGIN_RIGHT}" '
        f'y2="{mid_y:.1f}" stroke="#666"/>'
    )

    if n:
        slot = plot_w / n
        bar_w = max(1.0, min(24.0, slot * 0.7))
        label_step = max(1, n // 12)
        for i, score in enumerate(scores):
            x = MARGIN_LEFT + slot * i + (slot - bar_w) / 2
            h = abs(score) * plot_h / 2
            y = mid_y - h if score > 0 else mid_y
            color = _WORSE if score > 0 else _BETTER if score < 0 else _FLAT
            height = h if score != 0 else 0.5  # hairline so zero changes stay visible
            parts.append(
                f'<rect x="{x:.2f}" y="{y:.2f}" width="{bar_w:.2f}" '
                f'height="{height:.2f}" fill="{color}"/>'
            )
            if i % label_step == 0:
                text = labels[i] if labels else str(i)
                parts.append(
                    f'<text x="{x + bar_w / 2:.2f}" y="{HEIGHT - 14}" '
                    f'text-anchor="middle">{_escape(text)}</text>'
                )

    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
