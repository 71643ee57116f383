"""Polyline export and self-contained SVG plots for planar systems."""

import numpy as np

from .geometry import SphereRegion
from .rules import SwitchingRule

WIDTH, HEIGHT, MARGIN = 640, 480, 50


def threshold_polylines(rule: SwitchingRule, lower, upper, samples=401):
    """Branches of ``{s = 0}`` inside the box ``[lower, upper]`` (2-D only).

    Linear rules give one segment. Quadratic rules with a closed form are
    solved for x2 at each x1 grid value, giving up to two branches.
    """
    lower, upper = np.asarray(lower, float), np.asarray(upper, float)
    if rule.x0.size != 2:
        raise ValueError("threshold polylines need a planar system")
    if rule.is_linear:
        n = rule.normal
        t = np.array([-n[1], n[0]])
        span = float(np.linalg.norm(upper - lower))
        ts = np.linspace(-span, span, samples)
        pts = rule.x0 + ts[:, None] * t / np.linalg.norm(t)
        return _clip_branches([pts], lower, upper)
    if rule.form is None:
        return []
    M, c, d = rule.form.M, rule.form.c, rule.form.d
    branches = [[], []]
    for x1 in np.linspace(lower[0], upper[0], samples):
        # a x2^2 + b x2 + k = 0
        a = M[1, 1]
        b = 2.0 * M[0, 1] * x1 + c[1]
        k = M[0, 0] * x1 * x1 + c[0] * x1 + d
        if abs(a) <= 1e-300:
            roots = [-k / b] if b != 0 else []
        else:
            disc = b * b - 4 * a * k
            if disc < 0:
                roots = []
            else:
                sq = np.sqrt(disc)
                roots = sorted([(-b - sq) / (2 * a), (-b + sq) / (2 * a)])
        for i, r in enumerate(roots):
            branches[i].append((x1, r))
    return _clip_branches([np.array(b) for b in branches if b], lower, upper)


def _clip_branches(branches, lower, upper):
    out = []
    for pts in branches:
        inside = np.all((pts >= lower) & (pts <= upper), axis=1)
        run = []
        for p, ok in zip(pts, inside):
            if ok:
                run.append(p)
            elif run:
                out.append(np.array(run))
                run = []
        if run:
            out.append(np.array(run))
    return [b for b in out if len(b) > 1]


def write_polylines_csv(branches, path):
    """Columns ``branch, x1, x2``."""
    lines = ["branch,x1,x2"]
    for i, pts in enumerate(branches):
        for p in pts:
            lines.append(f"{i},{float(p[0])!r},{float(p[1])!r}")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def sphere_polyline(sphere: SphereRegion, count=256):
    return sphere.boundary_points(count)


def _fmt(v):
    return f"{v:.2f}"


def svg_plot(title, trajectory=None, thresholds=(), x0=None, circles=(), bounds=None):
    """Trajectory (bold), thresholds (thin), equilibrium (dot) as SVG markup."""
    pts_all = []
    if trajectory is not None:
        pts_all.append(np.asarray(trajectory))
    if x0 is not None:
        pts_all.append(np.asarray(x0)[None, :])
    if bounds is None:
        P = np.vstack(pts_all)
        lo, hi = P.min(axis=0), P.max(axis=0)
        pad = 0.08 * np.maximum(hi - lo, 1e-9)
        lo, hi = lo - pad, hi + pad
    else:
        lo, hi = (np.asarray(b, float) for b in bounds)

    def tx(p):
        u = MARGIN + (p[0] - lo[0]) / (hi[0] - lo[0]) * (WIDTH - 2 * MARGIN)
        v = HEIGHT - MARGIN - (p[1] - lo[1]) / (hi[1] - lo[1]) * (HEIGHT - 2 * MARGIN)
        return u, v

    def path(pts, style):
        pts = np.asarray(pts)
        if len(pts) > 2000:
            idx = np.unique(np.linspace(0, len(pts) - 1, 2000).astype(int))
            pts = pts[idx]
        coords = " ".join(f"{_fmt(u)},{_fmt(v)}" for u, v in map(tx, pts))
        return f'<polyline points="{coords}" fill="none" {style}/>'

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
           f'viewBox="0 0 {WIDTH} {HEIGHT}">',
           f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
           f'<rect x="{MARGIN}" y="{MARGIN}" width="{WIDTH - 2 * MARGIN}" '
           f'height="{HEIGHT - 2 * MARGIN}" fill="none" stroke="black" stroke-width="1"/>',
           f'<text x="{WIDTH / 2}" y="{MARGIN / 2}" text-anchor="middle" '
           f'font-family="sans-serif" font-size="14">{title}</text>',
           f'<text x="{MARGIN}" y="{HEIGHT - 15}" font-family="sans-serif" font-size="11">'
           f'x1 [{lo[0]:.4g}, {hi[0]:.4g}]   x2 [{lo[1]:.4g}, {hi[1]:.4g}]</text>']
    clip = f'<clipPath id="plot"><rect x="{MARGIN}" y="{MARGIN}" width="{WIDTH - 2 * MARGIN}" height="{HEIGHT - 2 * MARGIN}"/></clipPath>'
    out.append(clip)
    out.append('<g clip-path="url(#plot)">')
    for sph in circles:
        out.append(path(sphere_polyline(sph), 'stroke="gray" stroke-dasharray="4,3" stroke-width="1"'))
    for branch in thresholds:
        out.append(path(branch, 'stroke="black" stroke-width="1"'))
    if trajectory is not None:
        out.append(path(trajectory, 'stroke="black" stroke-width="2.5"'))
    if x0 is not None:
        u, v = tx(x0)
        out.append(f'<circle cx="{_fmt(u)}" cy="{_fmt(v)}" r="4" fill="black"/>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
