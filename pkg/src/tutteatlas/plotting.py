"""CSV, JSON and SVG emission for limit sets and zero sets, plus re-reading for replot."""

from __future__ import annotations

import csv
import io
import json
import logging
from collections.abc import Iterable
from dataclasses import dataclass, field
from enum import StrEnum
from pathlib import Path
from typing import Any

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from tutteatlas.errors import ValidationError  # noqa: E402
from tutteatlas.limit_sets import DEFAULT_SAMPLES, CurveSet, Plane, z_to_v  # noqa: E402
from tutteatlas.roots import RootSet  # noqa: E402

logger = logging.getLogger(__name__)

VIEW_LIMIT = 3.0
NUMBER_FORMAT = ".17g"

# matplotlib otherwise salts element ids randomly
matplotlib.rcParams["svg.hashsalt"] = "tutteatlas"

_KIND_COLORS = {
    "segment": "tab:blue",
    "circle": "tab:orange",
    "arc": "tab:green",
    "radial": "tab:purple",
    "line": "tab:brown",
    "points": "tab:red",
    "param": "tab:cyan",
}


class OutputFormat(StrEnum):
    CSV = "csv"
    JSON = "json"
    SVG = "svg"


def fmt(value: float) -> str:
    """17 significant digits, enough to round-trip a double."""
    return format(value, NUMBER_FORMAT)


@dataclass(frozen=True)
class PieceData:
    """One sampled curve piece. ``piece_id`` is ``"<index>-<kind>"``."""

    piece_id: str
    points: tuple[complex, ...]

    @property
    def kind(self) -> str:
        return self.piece_id.partition("-")[2]


@dataclass(frozen=True)
class ZeroData:
    point: complex
    residual: float
    multiplicity: int


@dataclass(frozen=True)
class PlotData:
    """Everything an SVG is drawn from; CSV and JSON both carry all of it."""

    pieces: tuple[PieceData, ...] = ()
    zeros: tuple[ZeroData, ...] = ()
    plane: Plane = Plane.Z
    meta: dict[str, Any] = field(default_factory=dict, compare=False)

    @property
    def is_zero_set(self) -> bool:
        return bool(self.zeros) or not self.pieces


def limit_set_data(curves: CurveSet, samples: int = DEFAULT_SAMPLES) -> PlotData:
    pieces = tuple(
        PieceData(f"{k}-{curves.pieces[k].kind}", tuple(complex(p) for p in points))
        for k, points in curves.sample(samples)
    )
    return PlotData(pieces=pieces, plane=curves.plane, meta={"regime": curves.regime})


def zero_set_data(
    rs: RootSet, plane: Plane | str = Plane.Z, q: float | None = None, positive_re: bool = False
) -> PlotData:
    """Zeros with residuals; in the v-plane each root contributes both preimages.

    The v-plane points keep the residual and multiplicity of the root they came from.
    """
    plane = Plane(plane)
    zeros: list[ZeroData] = []
    for root, residual, multiplicity in zip(
        rs.roots, rs.residuals, rs.multiplicities, strict=True
    ):
        if plane is Plane.Z:
            zeros.append(ZeroData(root, residual, multiplicity))
            continue
        if q is None:
            raise ValidationError("v-plane zeros need q")
        for v in z_to_v(root, q):
            if positive_re and not v.real > 0:
                continue
            zeros.append(ZeroData(v, residual, multiplicity))
    return PlotData(zeros=tuple(zeros), plane=plane)


# ---------------------------------------------------------------------------
# CSV


def to_csv(data: PlotData) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    if data.is_zero_set:
        writer.writerow(["re", "im", "residual", "multiplicity"])
        for zero in data.zeros:
            writer.writerow(
                [fmt(zero.point.real), fmt(zero.point.imag), fmt(zero.residual), zero.multiplicity]
            )
    else:
        writer.writerow(["piece_id", "re", "im"])
        for piece in data.pieces:
            for p in piece.points:
                writer.writerow([piece.piece_id, fmt(p.real), fmt(p.imag)])
    return buffer.getvalue()


def from_csv(text: str, plane: Plane = Plane.Z) -> PlotData:
    reader = csv.DictReader(io.StringIO(text))
    columns = reader.fieldnames or []
    try:
        if columns == ["re", "im", "residual", "multiplicity"]:
            zeros = tuple(
                ZeroData(
                    complex(float(row["re"]), float(row["im"])),
                    float(row["residual"]),
                    int(row["multiplicity"]),
                )
                for row in reader
            )
            return PlotData(zeros=zeros, plane=plane)
        if columns == ["piece_id", "re", "im"]:
            grouped: dict[str, list[complex]] = {}
            for row in reader:
                grouped.setdefault(row["piece_id"], []).append(
                    complex(float(row["re"]), float(row["im"]))
                )
            pieces = tuple(PieceData(pid, tuple(pts)) for pid, pts in grouped.items())
            return PlotData(pieces=pieces, plane=plane)
    except (KeyError, TypeError, ValueError) as e:
        raise ValidationError(f"malformed CSV row: {e}") from e
    raise ValidationError(f"unrecognised CSV header {columns}")


# ---------------------------------------------------------------------------
# JSON


def to_json(data: PlotData) -> dict[str, Any]:
    payload: dict[str, Any] = {"plane": str(data.plane), **data.meta}
    if data.is_zero_set:
        payload["zeros"] = [
            {
                "re": z.point.real,
                "im": z.point.imag,
                "residual": z.residual,
                "multiplicity": z.multiplicity,
            }
            for z in data.zeros
        ]
    else:
        payload["pieces"] = [
            {"piece_id": piece.piece_id, "points": [[p.real, p.imag] for p in piece.points]}
            for piece in data.pieces
        ]
    return payload


def from_json(payload: dict[str, Any]) -> PlotData:
    try:
        plane = Plane(payload.get("plane", Plane.Z))
        if "zeros" in payload:
            zeros = tuple(
                ZeroData(complex(z["re"], z["im"]), float(z["residual"]), int(z["multiplicity"]))
                for z in payload["zeros"]
            )
            return PlotData(zeros=zeros, plane=plane)
        pieces = tuple(
            PieceData(str(piece["piece_id"]), tuple(complex(re, im) for re, im in piece["points"]))
            for piece in payload["pieces"]
        )
    except (KeyError, TypeError, ValueError) as e:
        raise ValidationError(f"malformed plot JSON: {e}") from e
    return PlotData(pieces=pieces, plane=plane)


# ---------------------------------------------------------------------------
# SVG


def to_svg(data: PlotData) -> str:
    """Render on the fixed window [-3, 3] x [-3, 3].

    The unit circle and the imaginary axis are always drawn. Output depends only
    on the points, so a CSV or JSON re-read gives the same bytes.
    """
    fig, ax = plt.subplots(figsize=(6, 6))
    try:
        theta = np.linspace(0, 2 * np.pi, 721)
        ax.plot(np.cos(theta), np.sin(theta), color="0.6", linewidth=0.8, linestyle="--")
        ax.axvline(0.0, color="0.6", linewidth=0.8)
        ax.axhline(0.0, color="0.85", linewidth=0.5)

        for piece in data.pieces:
            xs = [p.real for p in piece.points]
            ys = [p.imag for p in piece.points]
            ax.plot(
                xs,
                ys,
                linestyle="none",
                marker=".",
                markersize=1.5,
                color=_KIND_COLORS.get(piece.kind, "black"),
            )
        if data.zeros:
            ax.plot(
                [z.point.real for z in data.zeros],
                [z.point.imag for z in data.zeros],
                linestyle="none",
                marker="x",
                markersize=3,
                color="black",
            )

        ax.set_xlim(-VIEW_LIMIT, VIEW_LIMIT)
        ax.set_ylim(-VIEW_LIMIT, VIEW_LIMIT)
        ax.set_aspect("equal")
        ax.set_xlabel("Re")
        ax.set_ylabel("Im")

        buffer = io.StringIO()
        fig.savefig(buffer, format="svg", metadata={"Date": None})
    finally:
        plt.close(fig)
    return buffer.getvalue()


# ---------------------------------------------------------------------------
# Files


def render(data: PlotData, output_format: OutputFormat | str) -> str:
    output_format = OutputFormat(output_format)
    if output_format is OutputFormat.CSV:
        return to_csv(data)
    if output_format is OutputFormat.JSON:
        return json.dumps(to_json(data), indent=2) + "\n"
    return to_svg(data)


def write_output(text: str, path: str | Path | None, stream: Any = None) -> None:
    """Write to ``path`` or, when it is None, to ``stream``."""
    if path is None:
        stream.write(text)
        return
    Path(path).write_text(text, encoding="utf-8")
    logger.info(f"wrote {len(text)} characters to {path}")


def read_plot_data(path: str | Path) -> PlotData:
    """Load a CSV or JSON file written by :func:`render`."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ValidationError(f"cannot read {path}: {e}") from e
    if path.suffix.lower() == ".json" or text.lstrip().startswith("{"):
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as e:
            raise ValidationError(f"{path} is not valid JSON: {e}") from e
        return from_json(payload)
    return from_csv(text)


def replot(paths: Iterable[str | Path]) -> str:
    """SVG of one or more emitted files overlaid."""
    pieces: list[PieceData] = []
    zeros: list[ZeroData] = []
    for path in paths:
        data = read_plot_data(path)
        pieces.extend(data.pieces)
        zeros.extend(data.zeros)
    return to_svg(PlotData(pieces=tuple(pieces), zeros=tuple(zeros)))
