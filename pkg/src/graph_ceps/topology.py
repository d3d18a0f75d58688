"""Microphone-connection graphs and their Laplacians.

A microphone array is modeled as a weighted undirected graph: microphones
on the same device (synchronized and/or closely located) form a group and
are mutually connected with weight 1, while microphones in different groups
share a weak connection weight ``alpha`` in [0, 1].  The graph Laplacian
``L = D - A`` of this structure supplies the basis for the graph cepstrum.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidParameterError, InvalidTopologyError

Groups = tuple[tuple[int, ...], ...]


def normalize_groups(n_channels: int, groups) -> Groups:
    """Validate a 1-based channel partition and return it as sorted tuples.

    Every channel index in 1..n_channels must occur in exactly one group.
    """
    seen: set[int] = set()
    out = []
    for group in groups:
        chans = tuple(sorted(int(c) for c in group))
        if not chans:
            raise InvalidTopologyError("empty group in channel partition")
        for c in chans:
            if not 1 <= c <= n_channels:
                raise InvalidTopologyError(
                    f"channel {c} outside the valid range 1..{n_channels}"
                )
            if c in seen:
                raise InvalidTopologyError(f"channel {c} assigned to more than one group")
            seen.add(c)
        out.append(chans)
    missing = sorted(set(range(1, n_channels + 1)) - seen)
    if missing:
        raise InvalidTopologyError(f"channels missing from partition: {missing}")
    return tuple(out)


@dataclass(frozen=True)
class MicArrayGraph:
    """N microphones plus the weighted connection structure between them.

    ``groups`` partitions the 1-based channel indices into devices.  Graphs
    built with :func:`build_graph` have adjacency 1 inside a group and
    ``alpha`` across groups; graphs built from explicit edge lists (for
    example :func:`ring_graph`) carry arbitrary 0/1 adjacency and keep
    ``groups`` only for device semantics.
    """

    n_channels: int
    groups: Groups
    alpha: float
    adjacency: np.ndarray


@dataclass(frozen=True)
class GraphLaplacian:
    """Graph Laplacian ``L = D - A`` together with the graph it came from."""

    matrix: np.ndarray
    source: MicArrayGraph


def build_graph(n_channels: int, groups, alpha: float) -> MicArrayGraph:
    """Build the connection graph of a grouped microphone array.

    Channel pairs within a group get adjacency weight 1; pairs in different
    groups get weight ``alpha``; the diagonal is zero.

    Args:
        n_channels: number of microphones N (at least 2).
        groups: partition of {1..N} into device groups (1-based indices).
        alpha: cross-group connection weight in [0.0, 1.0].

    Returns:
        A validated :class:`MicArrayGraph`.
    """
    if n_channels < 2:
        raise InvalidTopologyError("a microphone graph needs at least 2 channels")
    alpha = float(alpha)
    if not 0.0 <= alpha <= 1.0:
        raise InvalidParameterError(f"alpha must lie in [0.0, 1.0], got {alpha}")
    norm_groups = normalize_groups(n_channels, groups)

    adjacency = np.full((n_channels, n_channels), alpha, dtype=float)
    for group in norm_groups:
        idx = np.asarray(group) - 1
        adjacency[np.ix_(idx, idx)] = 1.0
    np.fill_diagonal(adjacency, 0.0)
    return MicArrayGraph(n_channels, norm_groups, alpha, adjacency)


def graph_from_edges(n_channels: int, edges, groups=None, alpha: float = 0.0) -> MicArrayGraph:
    """Build a graph from an explicit list of 1-based edges with weight 1.

    Used for irregular connection structures that a group partition cannot
    express.  ``groups`` defaults to one singleton group per channel.
    """
    if n_channels < 2:
        raise InvalidTopologyError("a microphone graph needs at least 2 channels")
    if groups is None:
        groups = [(c,) for c in range(1, n_channels + 1)]
    norm_groups = normalize_groups(n_channels, groups)
    adjacency = np.zeros((n_channels, n_channels), dtype=float)
    for edge in edges:
        m, n = (int(v) for v in edge)
        if m == n:
            raise InvalidTopologyError(f"self-connection on channel {m} is not allowed")
        for c in (m, n):
            if not 1 <= c <= n_channels:
                raise InvalidTopologyError(f"edge channel {c} outside 1..{n_channels}")
        adjacency[m - 1, n - 1] = 1.0
        adjacency[n - 1, m - 1] = 1.0
    return MicArrayGraph(n_channels, norm_groups, float(alpha), adjacency)


def ring_graph(n_channels: int) -> MicArrayGraph:
    """Cycle-connected graph: channel i linked with weight 1 to i±1 mod N.

    Its Laplacian is circulant, which makes the graph Fourier basis coincide
    (per eigenspace) with the DFT basis.  Requires N >= 3.
    """
    if n_channels < 3:
        raise InvalidTopologyError("a ring graph needs at least 3 channels")
    edges = [(i, i % n_channels + 1) for i in range(1, n_channels + 1)]
    return graph_from_edges(n_channels, edges)


def degree_matrix(graph: MicArrayGraph) -> np.ndarray:
    """Diagonal matrix of adjacency row sums."""
    return np.diag(graph.adjacency.sum(axis=1))


def laplacian(graph: MicArrayGraph) -> GraphLaplacian:
    """Graph Laplacian ``L = D - A``; symmetric with zero row sums."""
    matrix = degree_matrix(graph) - graph.adjacency
    return GraphLaplacian(matrix, graph)


def topology_to_dict(graph: MicArrayGraph) -> dict:
    """JSON-serializable description of a group-built topology."""
    return {
        "n_channels": graph.n_channels,
        "alpha": graph.alpha,
        "groups": [list(g) for g in graph.groups],
    }


def load_topology(source) -> MicArrayGraph:
    """Load a topology from a JSON file path, JSON string path, or dict.

    Schema: ``{"n_channels": int, "alpha": float, "groups": [[int,...],...]}``
    with 1-based channel indices.  An optional ``"edges"`` list of
    ``[m, n]`` pairs overrides the group-wise complete-subgraph rule.
    """
    if isinstance(source, (str, Path)):
        try:
            with open(source, encoding="utf-8") as fh:
                doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidTopologyError(f"topology file is not valid JSON: {exc}") from exc
    else:
        doc = source
    if not isinstance(doc, dict):
        raise InvalidTopologyError("topology document must be a JSON object")
    if "n_channels" not in doc:
        raise InvalidTopologyError("topology is missing 'n_channels'")
    n_channels = int(doc["n_channels"])

    if "edges" in doc:
        return graph_from_edges(
            n_channels,
            doc["edges"],
            groups=doc.get("groups"),
            alpha=float(doc.get("alpha", 0.0)),
        )
    for key in ("alpha", "groups"):
        if key not in doc:
            raise InvalidTopologyError(f"topology is missing '{key}'")
    return build_graph(n_channels, doc["groups"], float(doc["alpha"]))
