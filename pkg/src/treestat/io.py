"""Text formats for trees, samples, marginal profiles and null distributions.

Tree text: comma-separated terminal vertices in lexicographic order, each
vertex written with dots (``1.1.1,1.2``); the empty tree is ``-``.

Sample file::

    # comments and blank lines are ignored
    treestat-sample v1 m=2 depth=4
    1.1.1,1.2
    -

Null-distribution file: header
``treestat-null v1 B=<int> n=<int> m=<int> depth=<int> z=<decimal> seed=<int>``
followed by one value per line in ascending order.

Marginals file: header ``treestat-marginals v1 m=<int> depth=<int>`` followed
by ``<vertex> <probability>`` lines in canonical vertex order.
"""

from __future__ import annotations

import io as _io
import os
import re
from contextlib import contextmanager
from typing import IO, Iterator, Union

import numpy as np

from .errors import ArityViolation, DepthExceeded, ParseError
from .inference import NullDistribution
from .sampling import MarginalProfile
from .tree_core import Tree, TreeSample, Vertex, from_terminals, layout, terminals

__all__ = [
    "format_tree",
    "parse_tree",
    "read_sample",
    "write_sample",
    "read_null",
    "write_null",
    "read_marginals",
    "write_marginals",
]

Source = Union[str, os.PathLike, IO[str]]

_LABEL = re.compile(r"[0-9]+")


def format_tree(t: Tree) -> str:
    terms = sorted(terminals(t))
    return ",".join(map(str, terms)) if terms else "-"


def parse_tree(text: str, m: int, line: int | None = None) -> Tree:
    """Inverse of :func:`format_tree`; ancestors listed as terminals are absorbed."""
    stripped = text.strip()
    offset = len(text) - len(text.lstrip()) + 1
    if stripped == "-":
        return Tree.empty(m)
    if not stripped:
        raise ParseError("empty tree text (use '-' for the empty tree)", line, offset)
    verts = []
    col = offset
    for comp in stripped.split(","):
        if not comp:
            raise ParseError("empty vertex", line, col)
        labels = []
        part_col = col
        for part in comp.split("."):
            if not _LABEL.fullmatch(part):
                raise ParseError(f"malformed label {part!r}", line, part_col)
            labels.append(int(part))
            part_col += len(part) + 1
        if labels[0] != 1:
            raise ParseError(f"vertex {comp!r} does not start at the root label 1", line, col)
        if min(labels) < 1 or max(labels) > m:
            raise ArityViolation(f"vertex {comp!r} has a label outside 1..{m}")
        verts.append(Vertex(labels))
        col += len(comp) + 1
    return from_terminals(m, verts)


@contextmanager
def _open(source: Source, mode: str) -> Iterator[IO[str]]:
    if hasattr(source, "read") or hasattr(source, "write"):
        yield source
    else:
        with open(source, mode, encoding="utf-8", newline="") as fh:
            yield fh


def _content_lines(fh: IO[str]) -> Iterator[tuple[int, str]]:
    for lineno, raw in enumerate(fh, start=1):
        s = raw.strip()
        if s and not s.startswith("#"):
            yield lineno, s


def _parse_header(lineno: int, line: str, kind: str, required: tuple[str, ...]) -> dict[str, str]:
    tokens = line.split()
    if tokens[0] != kind:
        raise ParseError(f"expected a {kind} header, got {tokens[0]!r}", lineno, 1)
    if len(tokens) < 2 or tokens[1] != "v1":
        raise ParseError(f"unknown {kind} version {tokens[1] if len(tokens) > 1 else ''!r}", lineno)
    fields = {}
    for tok in tokens[2:]:
        key, sep, value = tok.partition("=")
        if not sep:
            raise ParseError(f"malformed header field {tok!r}", lineno)
        fields[key] = value
    missing = [k for k in required if k not in fields]
    if missing:
        raise ParseError(f"header lacks {', '.join(missing)}", lineno)
    return fields


def _int_field(fields: dict, key: str, lineno: int) -> int:
    try:
        return int(fields[key])
    except ValueError:
        raise ParseError(f"header field {key}={fields[key]!r} is not an integer", lineno) from None


def read_sample(source: Source) -> TreeSample:
    with _open(source, "r") as fh:
        lines = _content_lines(fh)
        try:
            lineno, header = next(lines)
        except StopIteration:
            raise ParseError("missing treestat-sample header") from None
        fields = _parse_header(lineno, header, "treestat-sample", ("m", "depth"))
        m = _int_field(fields, "m", lineno)
        depth = _int_field(fields, "depth", lineno)
        trees = []
        for lineno, text in lines:
            t = parse_tree(text, m, line=lineno)
            if t.depth > depth:
                raise DepthExceeded(f"line {lineno}: tree of depth {t.depth} in a depth={depth} file")
            trees.append(t)
    return TreeSample(m, depth, tuple(trees))


def write_sample(sample: TreeSample, sink: Source) -> None:
    with _open(sink, "w") as fh:
        fh.write(f"treestat-sample v1 m={sample.m} depth={sample.depth_cap}\n")
        for t in sample:
            fh.write(format_tree(t) + "\n")


def _decimal(x: float) -> str:
    return format(float(x), ".17g")


def read_null(source: Source) -> NullDistribution:
    with _open(source, "r") as fh:
        lines = _content_lines(fh)
        try:
            lineno, header = next(lines)
        except StopIteration:
            raise ParseError("missing treestat-null header") from None
        fields = _parse_header(lineno, header, "treestat-null", ("B", "n", "m", "depth", "z", "seed"))
        meta = {k: _int_field(fields, k, lineno) for k in ("B", "n", "m", "depth", "seed")}
        try:
            meta["z"] = float(fields["z"])
        except ValueError:
            raise ParseError(f"header field z={fields['z']!r} is not a decimal", lineno) from None
        for key, value in fields.items():
            meta.setdefault(key, value)
        values = []
        for lineno, text in lines:
            try:
                values.append(float(text))
            except ValueError:
                raise ParseError(f"malformed value {text!r}", lineno, 1) from None
    if len(values) != meta["B"]:
        raise ParseError(f"header says B={meta['B']} but file has {len(values)} values")
    if any(b < a for a, b in zip(values, values[1:])):
        raise ParseError("null values must be in ascending order")
    return NullDistribution(np.array(values), meta)


def write_null(null: NullDistribution, sink: Source) -> None:
    meta = null.metadata
    with _open(sink, "w") as fh:
        fh.write(
            f"treestat-null v1 B={null.B} n={meta['n']} m={meta['m']} depth={meta['depth']} "
            f"z={_decimal(meta['z'])} seed={meta['seed']}\n"
        )
        model = meta.get("model")
        if model:
            fh.write(f"# model {model}\n")
        for x in null.values:
            fh.write(_decimal(x) + "\n")


def read_marginals(source: Source) -> MarginalProfile:
    with _open(source, "r") as fh:
        lines = _content_lines(fh)
        try:
            lineno, header = next(lines)
        except StopIteration:
            raise ParseError("missing treestat-marginals header") from None
        fields = _parse_header(lineno, header, "treestat-marginals", ("m", "depth"))
        m = _int_field(fields, "m", lineno)
        depth = _int_field(fields, "depth", lineno)
        mapping = {}
        for lineno, text in lines:
            parts = text.split()
            if len(parts) != 2:
                raise ParseError("expected '<vertex> <probability>'", lineno, 1)
            try:
                v = Vertex.parse(parts[0])
                v.check_arity(m)
                mapping[v] = float(parts[1])
            except ValueError as exc:
                raise ParseError(str(exc), lineno, 1) from None
    missing = [v for v in layout(m, depth).vertices if v not in mapping]
    if missing:
        raise ParseError(f"marginals missing for {len(missing)} vertices, first {missing[0]}")
    return MarginalProfile.from_mapping(m, depth, mapping)


def write_marginals(profile: MarginalProfile, sink: Source) -> None:
    with _open(sink, "w") as fh:
        fh.write(f"treestat-marginals v1 m={profile.m} depth={profile.depth}\n")
        for v, p in profile.items():
            fh.write(f"{v} {_decimal(p)}\n")


def dumps_sample(sample: TreeSample) -> str:
    buf = _io.StringIO()
    write_sample(sample, buf)
    return buf.getvalue()
