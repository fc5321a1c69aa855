"""Dataflow DAG extraction and size metrics.

The DAG makes the sharing explicit: one node per cell, one edge per def-use
pair.  ``tree_expansion_size`` answers "how big would this be as a pure
expression tree", computed by the recurrence size(cell) = 1 + sum of
size(producer) over its sources, with environment names and literals
counting 1.  Compared against the linear cell count, it quantifies the
blow-up that sharing avoids.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .model import Interstring, is_literal


@dataclass(frozen=True)
class CellNode:
    id: int
    layer: int
    index: int
    dst: str
    op: str
    sources: tuple[str, ...]


@dataclass
class DataflowView:
    cells: list[CellNode]
    edges: list[tuple[int, int]]  # (producer id, consumer id)
    depth: int
    width: int
    cell_count: int
    tree_expansion_size: int

    def metrics(self) -> dict[str, int]:
        return {
            "depth": self.depth,
            "width": self.width,
            "cells": self.cell_count,
            "tree_expansion_size": self.tree_expansion_size,
        }

    def metrics_text(self) -> str:
        return "".join(f"{k}={v}\n" for k, v in self.metrics().items())


def to_dag(istr: Interstring) -> DataflowView:
    """Extract the def-use DAG of a validated interstring."""
    cells: list[CellNode] = []
    by_layer_dst: list[dict[str, int]] = []
    for li, layer in enumerate(istr.layers):
        layer_map: dict[str, int] = {}
        for ci, cell in enumerate(layer):
            node = CellNode(len(cells), li, ci, cell[0], cell[1], cell[2:])
            cells.append(node)
            layer_map[node.dst] = node.id
        by_layer_dst.append(layer_map)

    def producer_of(name: str, before_layer: int) -> int | None:
        for li in range(before_layer - 1, -1, -1):
            if name in by_layer_dst[li]:
                return by_layer_dst[li][name]
        return None

    edges: list[tuple[int, int]] = []
    producers: dict[int, list[int | None]] = {}
    for node in cells:
        prods: list[int | None] = []
        for src in node.sources:
            pid = None if is_literal(src) else producer_of(src, node.layer)
            prods.append(pid)
            if pid is not None:
                edges.append((pid, node.id))
        producers[node.id] = prods

    depth_memo: dict[int, int] = {}

    def node_depth(nid: int) -> int:
        if nid in depth_memo:
            return depth_memo[nid]
        ps = [p for p in producers[nid] if p is not None]
        d = 1 + (max(node_depth(p) for p in ps) if ps else 0)
        depth_memo[nid] = d
        return d

    size_memo: dict[int, int] = {}

    def node_size(nid: int) -> int:
        if nid in size_memo:
            return size_memo[nid]
        total = 1
        for p in producers[nid]:
            total += 1 if p is None else node_size(p)
        size_memo[nid] = total
        return total

    consumed = {pid for pid, _ in edges}
    roots = [node.id for node in cells if node.id not in consumed]
    tree_size = sum(node_size(r) for r in roots)

    return DataflowView(
        cells=cells,
        edges=edges,
        depth=max((node_depth(n.id) for n in cells), default=0),
        width=max((len(layer) for layer in istr.layers), default=0),
        cell_count=len(cells),
        tree_expansion_size=tree_size,
    )
