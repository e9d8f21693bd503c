"""Self-contained SVG reward curves from reward-log CSV files."""

from __future__ import annotations

import csv
from pathlib import Path

from .errors import ConfigurationError

WIDTH, HEIGHT = 860, 480
PAD_LEFT, PAD_RIGHT, PAD_TOP, PAD_BOTTOM = 64, 24, 40, 48
COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"]


def read_rewards_csv(path: str | Path) -> tuple[list[int], list[float]]:
    path = Path(path)
    try:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or "total_reward" not in reader.fieldnames:
                raise ConfigurationError(f"{path}: not a reward log (missing header)")
            episodes, rewards = [], []
            for row in reader:
                episodes.append(int(row["episode"]))
                rewards.append(float(row["total_reward"]))
    except OSError as exc:
        raise ConfigurationError(f"cannot read {path}: {exc}")
    except (KeyError, ValueError) as exc:
        raise ConfigurationError(f"{path}: malformed reward log: {exc}")
    if not episodes:
        raise ConfigurationError(f"{path}: no data rows")
    return episodes, rewards


def moving_average(values: list[float], window: int) -> list[float]:
    out = []
    acc = 0.0
    for i, v in enumerate(values):
        acc += v
        if i >= window:
            acc -= values[i - window]
        out.append(acc / min(i + 1, window))
    return out


def _scale(lo: float, hi: float):
    if hi == lo:
        hi = lo + 1.0
    return lo, hi


def plot_rewards(csv_paths, out_path, smoothing: int = 50) -> None:
    """Raw + moving-average reward curves; one color per input file."""
    series = []
    for path in csv_paths:
        episodes, rewards = read_rewards_csv(path)
        series.append((Path(path).stem, episodes, rewards))

    x_lo, x_hi = _scale(
        min(min(e) for _, e, _ in series), max(max(e) for _, e, _ in series)
    )
    y_lo, y_hi = _scale(
        min(min(r) for _, _, r in series), max(max(r) for _, _, r in series)
    )
    plot_w = WIDTH - PAD_LEFT - PAD_RIGHT
    plot_h = HEIGHT - PAD_TOP - PAD_BOTTOM

    def px(x: float) -> float:
        return PAD_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(y: float) -> float:
        return HEIGHT - PAD_BOTTOM - (y - y_lo) / (y_hi - y_lo) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<text x="{WIDTH / 2}" y="24" font-family="sans-serif" font-size="16" '
        'text-anchor="middle">Episode reward</text>',
    ]
    # axes and ticks
    parts.append(
        f'<line x1="{PAD_LEFT}" y1="{HEIGHT - PAD_BOTTOM}" x2="{WIDTH - PAD_RIGHT}" '
        f'y2="{HEIGHT - PAD_BOTTOM}" stroke="black"/>'
    )
    parts.append(
        f'<line x1="{PAD_LEFT}" y1="{PAD_TOP}" x2="{PAD_LEFT}" '
        f'y2="{HEIGHT - PAD_BOTTOM}" stroke="black"/>'
    )
    for i in range(5):
        y_val = y_lo + (y_hi - y_lo) * i / 4
        y = py(y_val)
        parts.append(
            f'<line x1="{PAD_LEFT}" y1="{y:.2f}" x2="{WIDTH - PAD_RIGHT}" y2="{y:.2f}" '
            'stroke="#dddddd" stroke-dasharray="4"/>'
        )
        parts.append(
            f'<text x="{PAD_LEFT - 6}" y="{y + 4:.2f}" font-family="sans-serif" '
            f'font-size="11" text-anchor="end">{y_val:.1f}</text>'
        )
    for i in range(5):
        x_val = x_lo + (x_hi - x_lo) * i / 4
        x = px(x_val)
        parts.append(
            f'<text x="{x:.2f}" y="{HEIGHT - PAD_BOTTOM + 18}" font-family="sans-serif" '
            f'font-size="11" text-anchor="middle">{x_val:.0f}</text>'
        )
    parts.append(
        f'<text x="{WIDTH / 2}" y="{HEIGHT - 10}" font-family="sans-serif" '
        'font-size="12" text-anchor="middle">episode</text>'
    )

    for idx, (stem, episodes, rewards) in enumerate(series):
        color = COLORS[idx % len(COLORS)]
        points = " ".join(f"{px(e):.2f},{py(r):.2f}" for e, r in zip(episodes, rewards))
        if len(episodes) == 1:
            parts.append(
                f'<circle cx="{px(episodes[0]):.2f}" cy="{py(rewards[0]):.2f}" r="4" '
                f'fill="{color}"/>'
            )
        else:
            parts.append(
                f'<polyline points="{points}" fill="none" stroke="{color}" '
                'stroke-width="1" opacity="0.35"/>'
            )
            smooth = moving_average(rewards, smoothing)
            smooth_points = " ".join(
                f"{px(e):.2f},{py(r):.2f}" for e, r in zip(episodes, smooth)
            )
            parts.append(
                f'<polyline points="{smooth_points}" fill="none" stroke="{color}" '
                'stroke-width="2"/>'
            )
        ly = PAD_TOP + 16 * idx
        parts.append(
            f'<rect x="{WIDTH - PAD_RIGHT - 150}" y="{ly}" width="12" height="12" fill="{color}"/>'
        )
        parts.append(
            f'<text x="{WIDTH - PAD_RIGHT - 132}" y="{ly + 10}" font-family="sans-serif" '
            f'font-size="12">{stem}</text>'
        )
    parts.append("</svg>")
    Path(out_path).write_text("\n".join(parts) + "\n")
