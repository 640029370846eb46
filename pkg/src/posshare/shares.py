"""Share containers and their JSON wire format.

A share set is one public master circle plus an ordered chain of refinement
shift vectors. Open-space sets carry a single implicit radius schedule; the
map-aware variant stores an explicit radius on every refinement share.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

from .geometry import Circle, Point, Vector

OSPS = "OSPS"
CSPS = "CSPS"


@dataclass(frozen=True)
class MasterShare:
    """Anchors the chain in absolute coordinates; public to everyone."""

    circle: Circle

    def __post_init__(self) -> None:
        if self.circle.radius <= 0:
            raise ValueError("master share radius must be positive")


@dataclass(frozen=True)
class RefinementShare:
    """A relative shift; map-aware shares also carry their own radius."""

    shift: Vector
    radius: Optional[float] = None


@dataclass(frozen=True)
class ShareSet:
    master: MasterShare
    refinements: tuple[RefinementShare, ...]
    delta_r: float
    mode: str = OSPS

    def __post_init__(self) -> None:
        object.__setattr__(self, "refinements", tuple(self.refinements))
        if self.mode not in (OSPS, CSPS):
            raise ValueError(f"unknown mode {self.mode!r}")
        if len(self.refinements) < 1:
            raise ValueError("a share set needs at least one refinement share")
        if self.mode == OSPS:
            bound = self.delta_r * (1.0 + 1e-9) + 1e-12
            for i, share in enumerate(self.refinements):
                if share.shift.length > bound:
                    raise ValueError(
                        f"refinement share {i} has length {share.shift.length}, "
                        f"exceeding delta_r={self.delta_r}"
                    )
        else:
            for i, share in enumerate(self.refinements):
                if share.radius is None:
                    raise ValueError(f"CSPS refinement share {i} is missing its radius")

    @property
    def n(self) -> int:
        return len(self.refinements)

    def with_master(self, master: MasterShare) -> "ShareSet":
        return replace(self, master=master)

    def to_dict(self) -> dict:
        shares = []
        for share in self.refinements:
            entry = {"dx": share.shift.dx, "dy": share.shift.dy}
            if share.radius is not None:
                entry["r"] = share.radius
            shares.append(entry)
        return {
            "mode": self.mode,
            "n": self.n,
            "delta_r": self.delta_r,
            "master": {
                "x": self.master.circle.center.x,
                "y": self.master.circle.center.y,
                "r": self.master.circle.radius,
            },
            "shares": shares,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def share_set_from_dict(doc: dict) -> ShareSet:
    try:
        mode = doc["mode"]
        master = MasterShare(Circle(Point(doc["master"]["x"], doc["master"]["y"]), doc["master"]["r"]))
        shares = tuple(
            RefinementShare(Vector(s["dx"], s["dy"]), s.get("r")) for s in doc["shares"]
        )
        delta_r = float(doc["delta_r"])
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed share-set document: {exc}") from exc
    parsed = ShareSet(master=master, refinements=shares, delta_r=delta_r, mode=mode)
    if parsed.n != doc.get("n", parsed.n):
        raise ValueError(f"share-set document claims n={doc['n']} but carries {parsed.n} shares")
    return parsed


def share_set_from_json(text: str) -> ShareSet:
    return share_set_from_dict(json.loads(text))


def osps_share_radii(r0: float, n: int) -> list[float]:
    """Precision (radius) after fusing k shares, k = 0..n, open-space model."""
    if n < 1 or r0 <= 0 or not math.isfinite(r0):
        raise ValueError("need n >= 1 and finite r0 > 0")
    return [r0 - k * (r0 / n) if k < n else 0.0 for k in range(n + 1)]
