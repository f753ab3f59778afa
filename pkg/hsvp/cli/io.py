"""Readers and writers for hierarchy, probability and conditionals files.

Hierarchy files hold one node per line, ``node_id<TAB>parent_id[<TAB>name]``,
with parent 0 for the root. Probability files are CSV with the header
``instance_id,y_true,p_0,...,p_{K-1}``. Conditionals files hold one line per
(parent, child) pair, ``[instance_id<TAB>]node_id<TAB>child_id<TAB>prob``.
Lines starting with ``#`` and blank lines are skipped in tab-separated files.
"""

import csv
import logging
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from hsvp.core.errors import (
    HsvpException,
    InputFormatException,
    InvalidHierarchyException,
)
from hsvp.core.hierarchy import Hierarchy, build_hierarchy
from hsvp.core.prob import FlatDistribution, HierarchicalDistribution, ProblemInstance

logger = logging.getLogger(__name__)

SINGLE_INSTANCE_ID = "0"


def _tab_lines(path: Path) -> Iterator[Tuple[int, List[str]]]:
    """Yield (1-based line number, fields) of the data lines."""
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            yield lineno, [field.strip() for field in line.rstrip("\r\n").split("\t")]


def _parse_int(path: Path, lineno: int, value: str, what: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise InputFormatException(str(path), lineno, f"{what} must be an integer, got {value!r}")


def _parse_float(path: Path, lineno: int, value: str, what: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise InputFormatException(str(path), lineno, f"{what} must be a number, got {value!r}")


def read_hierarchy(path: Path) -> Hierarchy:
    """Parse and validate a hierarchy file.

    Raises:
        InputFormatException: On malformed lines or an invalid tree
    """
    edges: List[Tuple[int, int]] = []
    names: Dict[int, str] = {}
    for lineno, fields in _tab_lines(path):
        if len(fields) not in (2, 3):
            raise InputFormatException(
                str(path), lineno, f"expected 2 or 3 tab-separated fields, got {len(fields)}"
            )
        node = _parse_int(path, lineno, fields[0], "node id")
        parent = _parse_int(path, lineno, fields[1], "parent id")
        edges.append((node, parent))
        if len(fields) == 3 and fields[2]:
            names[node] = fields[2]

    if not edges:
        raise InputFormatException(str(path), None, "no nodes")
    try:
        hierarchy = build_hierarchy(edges, names)
    except InvalidHierarchyException as e:
        raise InputFormatException(str(path), None, str(e))
    logger.info(f"Loaded {hierarchy!r} from {path}")
    return hierarchy


def probs_header(class_count: int) -> List[str]:
    return ["instance_id", "y_true"] + [f"p_{c}" for c in range(class_count)]


def read_probs(path: Path, h: Hierarchy) -> List[ProblemInstance]:
    """Parse a flat probability CSV into labeled instances.

    Raises:
        InputFormatException: On a wrong header, row width, label, probability
            vector, or when the file holds no rows
    """
    K = h.class_count
    instances: List[ProblemInstance] = []
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None:
            raise InputFormatException(str(path), None, "empty file")
        expected = probs_header(K)
        if [field.strip() for field in header] != expected:
            raise InputFormatException(
                str(path), 1, f"expected header {','.join(expected[:3])},...,p_{K - 1}"
            )
        for row in reader:
            lineno = reader.line_num
            if not row or not any(field.strip() for field in row):
                continue
            if len(row) != K + 2:
                raise InputFormatException(
                    str(path), lineno, f"expected {K + 2} fields, got {len(row)}"
                )
            instance_id = row[0].strip()
            y_true = _parse_int(path, lineno, row[1].strip(), "y_true")
            if not -1 <= y_true < K:
                raise InputFormatException(
                    str(path), lineno, f"y_true must be -1 or a class index below {K}, got {y_true}"
                )
            probs = [_parse_float(path, lineno, v.strip(), "probability") for v in row[2:]]
            try:
                flat = FlatDistribution(probs)
            except HsvpException as e:
                raise InputFormatException(str(path), lineno, str(e))
            instances.append(ProblemInstance(instance_id, flat=flat, y_true=y_true))

    if not instances:
        raise InputFormatException(str(path), None, "no instances")
    logger.info(f"Loaded {len(instances)} instances from {path}")
    return instances


def read_conds(path: Path, h: Hierarchy) -> List[ProblemInstance]:
    """Parse a conditionals file into unlabeled hierarchical instances.

    Three-column files hold a single instance with id "0"; four-column files
    carry the instance id first. Instances keep the order of their first line.

    Raises:
        InputFormatException: On malformed lines, pairs that are not
            parent-child edges of h, duplicates, or invalid conditionals
    """
    width: Optional[int] = None
    # instance -> parent -> child -> prob
    grouped: Dict[str, Dict[int, Dict[int, float]]] = {}
    for lineno, fields in _tab_lines(path):
        if width is None:
            if len(fields) not in (3, 4):
                raise InputFormatException(
                    str(path), lineno, f"expected 3 or 4 tab-separated fields, got {len(fields)}"
                )
            width = len(fields)
        elif len(fields) != width:
            raise InputFormatException(
                str(path), lineno, f"expected {width} fields like the first line, got {len(fields)}"
            )
        instance_id = fields[0] if width == 4 else SINGLE_INSTANCE_ID
        parent_field, child_field, prob_field = fields[-3:]
        parent = _parse_int(path, lineno, parent_field, "node id")
        child = _parse_int(path, lineno, child_field, "child id")
        prob = _parse_float(path, lineno, prob_field, "probability")
        if child not in h.parent_of or h.parent_of[child] != parent:
            raise InputFormatException(
                str(path), lineno, f"{child} is not a child of node {parent}"
            )
        children = grouped.setdefault(instance_id, {}).setdefault(parent, {})
        if child in children:
            raise InputFormatException(
                str(path), lineno, f"duplicate conditional for edge {parent}->{child}"
            )
        children[child] = prob

    if not grouped:
        raise InputFormatException(str(path), None, "no instances")

    instances: List[ProblemInstance] = []
    for instance_id, by_parent in grouped.items():
        child_cond: Dict[int, List[float]] = {}
        for parent, probs in by_parent.items():
            missing = [c for c in h.children_of[parent] if c not in probs]
            if missing:
                raise InputFormatException(
                    str(path), None, f"instance {instance_id}: node {parent} lacks children {missing}"
                )
            child_cond[parent] = [probs[c] for c in h.children_of[parent]]
        try:
            hier = HierarchicalDistribution(h, child_cond)
        except HsvpException as e:
            raise InputFormatException(str(path), None, f"instance {instance_id}: {e}")
        instances.append(ProblemInstance(instance_id, hier=hier))

    logger.info(f"Loaded {len(instances)} conditional instances from {path}")
    return instances


def attach_conds(
    instances: Sequence[ProblemInstance],
    conditional: Sequence[ProblemInstance],
    path: Path,
) -> List[ProblemInstance]:
    """Give flat instances the conditionals of the same instance id.

    Raises:
        InputFormatException: If the two files hold different instance ids
    """
    by_id = {inst.instance_id: inst for inst in conditional}
    if set(by_id) != {inst.instance_id for inst in instances}:
        raise InputFormatException(
            str(path), None, "instance ids differ from the probability file"
        )
    return [
        ProblemInstance(
            inst.instance_id,
            flat=inst.flat,
            hier=by_id[inst.instance_id].hier,
            y_true=inst.y_true,
        )
        for inst in instances
    ]


def write_hierarchy(path: Path, h: Hierarchy) -> None:
    """Write a hierarchy file, one node per line in declaration order."""
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for v in h.node_ids:
            f.write(f"{v}\t{h.parent_of[v]}\t{h.node_names[v]}\n")


def write_probs(path: Path, instances: Sequence[ProblemInstance], class_count: int) -> None:
    """Write flat instances as a probability CSV with round-trip exact floats."""
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(probs_header(class_count))
        for inst in instances:
            writer.writerow(
                [inst.instance_id, inst.y_true] + [repr(float(p)) for p in inst.flat.probs]
            )
