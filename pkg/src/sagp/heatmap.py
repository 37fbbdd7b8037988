"""Grayscale SVG heat map for a square probability matrix."""

from xml.sax.saxutils import escape

import numpy as np

N_LEVELS = 10


def gray_level(value, vmin, vmax):
    """Index 0..9 on the ramp; 0 is white (vmin), 9 is black (vmax)."""
    if vmax <= vmin:
        return 0
    t = (value - vmin) / (vmax - vmin)
    return int(min(N_LEVELS - 1, max(0, np.floor(t * N_LEVELS))))


def ramp_color(level):
    g = round(255 * (1 - level / (N_LEVELS - 1)))
    return f"#{g:02x}{g:02x}{g:02x}"


def heatmap_svg(M, labels=None, cell=24, title="Interaction probability"):
    M = np.asarray(M, dtype=float)
    p = M.shape[0]
    labels = labels or [str(i + 1) for i in range(p)]
    vmin = float(M.min()) if M.size else 0.0
    vmax = float(M.max()) if M.size else 1.0
    margin = 60
    legend_w = 3 * cell
    width = margin + p * cell + legend_w + 20
    height = max(margin + p * cell + 20, margin + N_LEVELS * 14 + 40)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="10">',
        f'<text x="{margin}" y="16" font-size="12">{escape(title)}</text>',
    ]
    for i in range(p):
        y = margin + i * cell
        out.append(f'<text x="{margin - 4}" y="{y + cell * 0.65:.1f}" text-anchor="end">{escape(labels[i])}</text>')
        x = margin + i * cell
        out.append(
            f'<text x="{x + cell / 2:.1f}" y="{margin - 6}" text-anchor="middle">{escape(labels[i])}</text>'
        )
        for j in range(p):
            color = ramp_color(gray_level(M[i, j], vmin, vmax))
            out.append(
                f'<rect x="{margin + j * cell}" y="{y}" width="{cell}" height="{cell}" '
                f'fill="{color}" stroke="#999999" stroke-width="0.5"><title>'
                f"{escape(labels[i])},{escape(labels[j])}: {M[i, j]:.3f}</title></rect>"
            )
    lx = margin + p * cell + 20
    out.append(f'<text x="{lx}" y="{margin - 6}">{vmax:.3g}</text>')
    for lev in range(N_LEVELS):
        ly = margin + lev * 14
        out.append(
            f'<rect x="{lx}" y="{ly}" width="14" height="14" fill="{ramp_color(N_LEVELS - 1 - lev)}" '
            f'stroke="#999999" stroke-width="0.5"/>'
        )
    out.append(f'<text x="{lx}" y="{margin + N_LEVELS * 14 + 12}">{vmin:.3g}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_heatmap(path, M, labels=None, **kw):
    with open(path, "w") as fh:
        fh.write(heatmap_svg(M, labels, **kw))
