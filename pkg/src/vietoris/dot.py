"""Graphviz DOT export of Hasse diagrams."""
from __future__ import annotations

from typing import Sequence

from .finposet import FinPoset


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def hasse_dot(P: FinPoset, labels: Sequence[str] | None = None, name: str = "hasse") -> str:
    """Cover relation of ``P`` drawn bottom-to-top."""
    labels = labels if labels is not None else [str(i) for i in range(P.n)]
    lines = [f"digraph {_quote(name)} {{", "  rankdir=BT;", "  node [shape=box];"]
    for i in range(P.n):
        lines.append(f"  n{i} [label={_quote(labels[i])}];")
    for i, j in P.covers():
        lines.append(f"  n{i} -> n{j} [arrowhead=none];")
    lines.append("}")
    return "\n".join(lines) + "\n"
