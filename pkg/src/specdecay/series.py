"""Time series of sampled norms."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["NormSeries", "SeriesBundle"]


@dataclass(frozen=True, eq=False)
class NormSeries:
    name: str
    t: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "values", v)
        if t.ndim != 1 or t.shape != v.shape:
            raise ValueError("t and values must be 1-D arrays of equal length")
        if t.size == 0:
            raise ValueError(f"series {self.name!r} is empty")
        if np.any(np.diff(t) <= 0):
            raise ValueError(f"series {self.name!r}: times must be strictly increasing")
        if not np.all(np.isfinite(v)) or not np.all(np.isfinite(t)):
            raise ValueError(f"series {self.name!r}: non-finite entries")
        if np.any(v < 0):
            raise ValueError(f"series {self.name!r}: negative values")

    def __len__(self):
        return self.t.size

    def window(self, t_lo: float, t_hi: float) -> "NormSeries":
        sel = (self.t >= t_lo) & (self.t <= t_hi)
        return NormSeries(self.name, self.t[sel], self.values[sel])


class SeriesBundle:
    """Several named series sampled at common times (one CSV table)."""

    def __init__(self, names=(), t=None, columns=None):
        self._names = list(names)
        self._t: list[float] = [] if t is None else [float(x) for x in t]
        self._cols: dict[str, list[float]] = {k: [] for k in self._names}
        if columns is not None:
            for k in self._names:
                self._cols[k] = [float(x) for x in columns[k]]
                if len(self._cols[k]) != len(self._t):
                    raise ValueError(f"column {k!r} length mismatch")

    @property
    def names(self) -> list[str]:
        return list(self._names)

    @property
    def t(self) -> np.ndarray:
        return np.asarray(self._t, dtype=float)

    def column(self, name: str) -> np.ndarray:
        return np.asarray(self._cols[name], dtype=float)

    def __contains__(self, name):
        return name in self._cols

    def __len__(self):
        return len(self._t)

    def __getitem__(self, name: str) -> NormSeries:
        if name not in self._cols:
            raise KeyError(f"no series named {name!r}; have {self._names}")
        return NormSeries(name, self.t, self.column(name))

    def append(self, t: float, values: dict[str, float]):
        if self._t and t <= self._t[-1]:
            raise ValueError("sample times must increase")
        missing = set(self._names) - set(values)
        if missing:
            raise ValueError(f"missing values for {sorted(missing)}")
        self._t.append(float(t))
        for k in self._names:
            self._cols[k].append(float(values[k]))

    def extend(self, other: "SeriesBundle"):
        if other.names != self.names:
            raise ValueError("bundles have different columns")
        for i, t in enumerate(other._t):
            self.append(t, {k: other._cols[k][i] for k in self._names})

    def __eq__(self, other):
        if not isinstance(other, SeriesBundle):
            return NotImplemented
        return self._names == other._names and self._t == other._t and self._cols == other._cols
