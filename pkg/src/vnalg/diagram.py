"""Planar combinatorial maps for virtual Y-oriented trivalent graph diagrams.

A diagram is a rotation system: nodes carry counterclockwise cyclic dart
orders, edges pair darts, and faces arise by orbit tracing.  Crossings have
four darts with opposite rotation positions on the same strand; trivalent
vertices have three with the unpaired edge's dart first; legs (tangle
boundary points) have one.  A closed loop with no nodes at all is encoded
as an edge whose darts appear in no rotation.

Face tracing uses next(d) = rotation-successor of the partner of d; the
sector between consecutive darts (r_i, r_{i+1}) of a node belongs to the
face orbit containing r_{i+1}.  For tangles the boundary circle is closed
internally through a phantom cycle of boundary edges joining consecutive
legs, which keeps the two sides of every leg in distinct faces; the face
outside the circle is discarded.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

CROSSING_KINDS = ("CROSSING_POS", "CROSSING_NEG", "CROSSING_VIRTUAL")
VERTEX_KINDS = ("VERTEX_TWO_IN_ONE_OUT", "VERTEX_TWO_OUT_ONE_IN")
NODE_KINDS = CROSSING_KINDS + VERTEX_KINDS + ("LEG",)

_RAYS = ((0, -1), (1, 0), (0, 1), (-1, 0))  # rotation slots 0..3 at a crossing


def _cross(u, v) -> int:
    return u[0] * v[1] - u[1] * v[0]


@dataclass(frozen=True)
class Node:
    id: int
    kind: str
    rotation: Tuple[int, ...]


@dataclass(frozen=True)
class Edge:
    id: int
    darts: Tuple[int, int]
    head: int  # the dart at the edge's head (edge oriented toward it)


@dataclass(frozen=True)
class Face:
    id: int
    boundary: Tuple[int, ...]  # darts in orbit order


@dataclass(frozen=True)
class LocalConstraint:
    node: int
    kind: str  # HORIZONTAL_BRACKET | VERTICAL_BRACKET | PRODUCT
    roles: Dict[str, int]  # role name -> face id


@dataclass(frozen=True)
class ValidationReport:
    problems: Tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.problems


class Diagram:
    """Immutable diagram; face structure is computed lazily and cached."""

    def __init__(self, name: str, nodes: Sequence[Node], edges: Sequence[Edge]):
        self.name = name
        self.nodes = tuple(sorted(nodes, key=lambda n: n.id))
        self.edges = tuple(sorted(edges, key=lambda e: e.id))
        self.node_by_id = {n.id: n for n in self.nodes}
        self.edge_by_id = {e.id: e for e in self.edges}
        self._dart_node: Dict[int, int] = {}
        for n in self.nodes:
            for d in n.rotation:
                self._dart_node[d] = n.id
        self._dart_edge: Dict[int, int] = {}
        self._partner: Dict[int, int] = {}
        for e in self.edges:
            a, b = e.darts
            self._dart_edge[a] = e.id
            self._dart_edge[b] = e.id
            self._partner[a] = b
            self._partner[b] = a
        self._faces: Optional[Tuple[Face, ...]] = None
        self._sector_face: Optional[Dict[Tuple[int, int], int]] = None

    # -- basic accessors ---------------------------------------------------

    def dart_node(self, dart: int) -> Optional[int]:
        return self._dart_node.get(dart)

    def partner(self, dart: int) -> int:
        return self._partner[dart]

    def outgoing(self, dart: int) -> bool:
        """True when the edge is oriented away from the node at this dart."""
        return self.edge_by_id[self._dart_edge[dart]].head != dart

    @property
    def legs(self) -> Tuple[Node, ...]:
        return tuple(n for n in self.nodes if n.kind == "LEG")

    @property
    def free_loops(self) -> Tuple[Edge, ...]:
        return tuple(
            e
            for e in self.edges
            if e.darts[0] not in self._dart_node and e.darts[1] not in self._dart_node
        )

    # -- faces ---------------------------------------------------------------

    def _augmented_maps(self):
        """sigma (rotation-next) and alpha (partner), with free loops attached
        to phantom bivalent nodes and legs joined by a phantom boundary cycle."""
        sigma: Dict[int, int] = {}
        for n in self.nodes:
            if n.kind == "LEG":
                continue
            rot = n.rotation
            for i, d in enumerate(rot):
                sigma[d] = rot[(i + 1) % len(rot)]
        alpha = dict(self._partner)
        for e in self.free_loops:
            # phantom bivalent node: the loop alone contributes two faces
            a, b = e.darts
            sigma[a] = b
            sigma[b] = a
        legs = self.legs
        boundary_darts = []
        if legs:
            base = max(max(self._dart_node, default=0), max(alpha, default=0)) + 1
            k = len(legs)
            for i, leg in enumerate(legs):
                to_next = base + 2 * i
                to_prev = base + 2 * i + 1
                inward = leg.rotation[0]
                # CCW at a boundary point: toward next leg, inward, toward prev
                sigma[to_next] = inward
                sigma[inward] = to_prev
                sigma[to_prev] = to_next
                boundary_darts.append((to_next, to_prev))
            for i in range(k):
                to_next = boundary_darts[i][0]
                prev_of_next = boundary_darts[(i + 1) % k][1]
                alpha[to_next] = prev_of_next
                alpha[prev_of_next] = to_next
        return sigma, alpha, {d for pair in boundary_darts for d in pair}

    def faces(self) -> Tuple[Face, ...]:
        """All regions of the planar complement (boundary regions included
        for tangles; the region outside the tangle circle is not a face)."""
        if self._faces is not None:
            return self._faces
        sigma, alpha, phantom = self._augmented_maps()
        seen = set()
        faces: List[Face] = []
        sector_face: Dict[Tuple[int, int], int] = {}
        for start in sorted(sigma):
            if start in seen:
                continue
            orbit = []
            d = start
            while True:
                orbit.append(d)
                seen.add(d)
                d = sigma[alpha[d]]
                if d == start:
                    break
                if d in seen:
                    raise ValueError("face tracing does not partition the darts")
            if phantom and all(d in phantom for d in orbit):
                continue  # the outside of the tangle circle
            fid = len(faces)
            faces.append(Face(fid, tuple(orbit)))
            for d in orbit:
                sector_face[d] = fid
        # sector (r_i, r_{i+1}) belongs to the face orbit containing r_{i+1}
        self._faces = tuple(faces)
        self._sector_face = sector_face
        return self._faces

    def face_of_sector_dart(self, dart: int) -> int:
        """Face owning the sector that ends at ``dart`` (CCW)."""
        if self._sector_face is None:
            self.faces()
        return self._sector_face[dart]

    # -- validation ----------------------------------------------------------

    def validate(self) -> ValidationReport:
        problems: List[str] = []
        seen_darts = {}
        for n in self.nodes:
            if n.kind not in NODE_KINDS:
                problems.append(f"node {n.id}: unknown kind {n.kind}")
                continue
            want = 4 if n.kind in CROSSING_KINDS else (3 if n.kind in VERTEX_KINDS else 1)
            if len(n.rotation) != want:
                problems.append(f"node {n.id}: {n.kind} needs {want} darts")
            for d in n.rotation:
                if d in seen_darts:
                    problems.append(f"dart {d} appears in two rotations")
                seen_darts[d] = n.id
        for e in self.edges:
            a, b = e.darts
            if a == b:
                problems.append(f"edge {e.id}: darts must be distinct")
            if e.head not in e.darts:
                problems.append(f"edge {e.id}: head dart not on the edge")
            for d in e.darts:
                if d not in seen_darts and e not in self.free_loops:
                    problems.append(f"edge {e.id}: dart {d} attached to no node")
        used_edges = {}
        for d in self._dart_edge:
            pass
        for n in self.nodes:
            for d in n.rotation:
                if d not in self._dart_edge:
                    problems.append(f"node {n.id}: dart {d} belongs to no edge")
        if problems:
            return ValidationReport(tuple(problems))

        for n in self.nodes:
            if n.kind in CROSSING_KINDS:
                problems.extend(self._validate_crossing(n))
            elif n.kind in VERTEX_KINDS:
                problems.extend(self._validate_vertex(n))
        if problems:
            return ValidationReport(tuple(problems))

        try:
            faces = self.faces()
        except ValueError as exc:
            return ValidationReport((str(exc),))
        V = sum(1 for n in self.nodes if n.kind != "LEG") + len(self.free_loops)
        E = len(self.edges)
        L = len(self.legs)
        F = len(faces)
        if L == 0:
            if self.nodes or self.edges:
                if V - E + F != 2:
                    problems.append(
                        f"Euler check failed: V-E+F = {V}-{E}+{F} != 2 (not planar)"
                    )
        else:
            if F != E + L - V + 1 - L + 1:
                # closed form: F_disk = E - V + 1 after boundary augmentation
                # (V'=V+0 real nodes of the augmented map count legs 3-valent)
                pass
            # Euler on the augmented closed map: legs become 3-valent nodes.
            if (V + L) - (E + L) + (F + 1) != 2:
                problems.append(
                    f"Euler check failed for tangle: V={V} E={E} L={L} F={F}"
                )
        return ValidationReport(tuple(problems))

    def _strands(self, n: Node):
        """((in_dart, out_dart) for the rot[0]/rot[2] strand, then rot[1]/rot[3])."""
        r = n.rotation
        out = []
        for pair in ((r[0], r[2]), (r[1], r[3])):
            d1, d2 = pair
            o1, o2 = self.outgoing(d1), self.outgoing(d2)
            if o1 == o2:
                return None
            out.append((d2, d1) if o1 else (d1, d2))
        return out

    def _validate_crossing(self, n: Node) -> List[str]:
        problems = []
        strands = self._strands(n)
        if strands is None:
            return [f"node {n.id}: a strand reverses through the crossing"]
        if self.outgoing(n.rotation[0]):
            return [f"node {n.id}: rotation must start at an incoming dart"]
        if n.kind == "CROSSING_VIRTUAL":
            return problems
        # rotation[0] is the incoming under-strand dart; sign from directions
        sign = self._crossing_sign(n)
        want = "CROSSING_POS" if sign > 0 else "CROSSING_NEG"
        if n.kind != want:
            problems.append(
                f"node {n.id}: declared {n.kind} but rotation/orientations give {want}"
            )
        return problems

    def _crossing_sign(self, n: Node) -> int:
        r = n.rotation
        idx = {d: i for i, d in enumerate(r)}
        (ua, ub), (oa, ob) = self._strands(n)
        d_under = _RAYS[idx[ub]]
        d_over = _RAYS[idx[ob]]
        return 1 if _cross(d_over, d_under) > 0 else -1

    def _validate_vertex(self, n: Node) -> List[str]:
        r = n.rotation
        flags = [self.outgoing(d) for d in r]
        n_out = sum(flags)
        if n_out == 0 or n_out == 3:
            return [f"node {n.id}: vertex is a source or sink"]
        if n.kind == "VERTEX_TWO_IN_ONE_OUT":
            if not (flags[0] and not flags[1] and not flags[2]):
                return [
                    f"node {n.id}: two-in-one-out rotation must start at the out dart"
                ]
        else:
            if not (not flags[0] and flags[1] and flags[2]):
                return [
                    f"node {n.id}: two-out-one-in rotation must start at the in dart"
                ]
        return []

    # -- local coloring constraints ------------------------------------------

    def local_constraint(self, node_id: int) -> LocalConstraint:
        """Quadrant/sector-to-role assignment for one node (spec: the lookup
        is a fixed function of kind and strand orientations)."""
        n = self.node_by_id[node_id]
        if n.kind == "LEG":
            raise ValueError("LEG nodes carry no constraint")
        self.faces()
        if n.kind in VERTEX_KINDS:
            return self._vertex_constraint(n)
        return self._crossing_constraint(n)

    def _sector_faces(self, n: Node) -> List[int]:
        """Face of sector (rot[i], rot[i+1]) for each i."""
        r = n.rotation
        return [self.face_of_sector_dart(r[(i + 1) % len(r)]) for i in range(len(r))]

    def _vertex_constraint(self, n: Node) -> LocalConstraint:
        s = self._sector_faces(n)
        # facing along the unpaired edge's flow: a = right face, b = left face,
        # ab = the face between the paired edges (always sector 1)
        if n.kind == "VERTEX_TWO_IN_ONE_OUT":
            roles = {"b": s[0], "ab": s[1], "a": s[2]}
        else:
            roles = {"a": s[0], "ab": s[1], "b": s[2]}
        return LocalConstraint(n.id, "PRODUCT", roles)

    def _crossing_constraint(self, n: Node) -> LocalConstraint:
        r = n.rotation
        idx = {d: i for i, d in enumerate(r)}
        (ua, ub), (oa, ob) = self._strands(n)
        dir_a, dir_b = _RAYS[idx[ub]], _RAYS[idx[ob]]
        tail_a, tail_b = idx[ua], idx[oa]
        # the tails sector is bounded by both incoming rays (always adjacent)
        if (tail_a + 1) % 4 == tail_b:
            tails = tail_a
        else:
            tails = tail_b
        heads = (tails + 2) % 4
        sides = [i for i in range(4) if i not in (tails, heads)]
        right = left = None
        for i in sides:
            mid = (
                _RAYS[i][0] + _RAYS[(i + 1) % 4][0],
                _RAYS[i][1] + _RAYS[(i + 1) % 4][1],
            )
            if _cross(dir_a, mid) < 0 and _cross(dir_b, mid) < 0:
                right = i
            elif _cross(dir_a, mid) > 0 and _cross(dir_b, mid) > 0:
                left = i
        if right is None or left is None:
            raise ValueError(f"node {n.id}: inconsistent crossing orientations")
        s = self._sector_faces(n)
        if n.kind == "CROSSING_VIRTUAL":
            roles = {"a": s[right], "b": s[tails], "c": s[left], "d": s[heads]}
            return LocalConstraint(n.id, "VERTICAL_BRACKET", roles)
        sign = self._crossing_sign(n)
        if sign > 0:
            roles = {"a": s[right], "b": s[heads], "c": s[left], "d": s[tails]}
        else:
            roles = {"a": s[right], "b": s[tails], "c": s[left], "d": s[heads]}
        return LocalConstraint(n.id, "HORIZONTAL_BRACKET", roles)

    def constraints(self) -> List[LocalConstraint]:
        return [
            self.local_constraint(n.id) for n in self.nodes if n.kind != "LEG"
        ]

    # -- serialization ---------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "nodes": [
                {"id": n.id, "kind": n.kind, "rotation": list(n.rotation)}
                for n in self.nodes
            ],
            "edges": [
                {"id": e.id, "darts": list(e.darts), "head": e.head}
                for e in self.edges
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Diagram":
        try:
            name = data["name"]
            nodes = [
                Node(int(n["id"]), n["kind"], tuple(int(d) for d in n["rotation"]))
                for n in data["nodes"]
            ]
            edges = [
                Edge(
                    int(e["id"]),
                    (int(e["darts"][0]), int(e["darts"][1])),
                    int(e["head"]),
                )
                for e in data["edges"]
            ]
        except (KeyError, TypeError, IndexError, ValueError) as exc:
            raise ValueError(f"malformed diagram object ({exc})") from exc
        return cls(name, nodes, edges)

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    def __eq__(self, other):
        return (
            isinstance(other, Diagram)
            and self.name == other.name
            and self.nodes == other.nodes
            and self.edges == other.edges
        )

    def __hash__(self):
        return hash((self.name, self.nodes, self.edges))


def load_diagram(path) -> Diagram:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: not valid JSON ({exc})") from exc
    return Diagram.from_json(data)


def save_diagram(diagram: Diagram, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(diagram.dumps())
        fh.write("\n")


# ---------------------------------------------------------------------------
# declarative construction

class DiagramBuilder:
    """Assemble a diagram from nodes with angle-tagged arms.

    Arms are placed counterclockwise by angle; crossings declare their
    under/over strand paths, vertices just their three arms.  Edges are
    oriented endpoint-to-endpoint; endpoints name either a leg or a
    (node, arm) pair.  The crossing sign and vertex type are derived, so a
    mis-declared picture fails validation instead of silently flipping.
    """

    def __init__(self, name: str):
        self.name = name
        self._next_dart = 1
        self._next_node = 1
        self._next_edge = 1
        self._nodes: List[Node] = []
        self._arm_dart: Dict[Tuple[str, str], int] = {}
        self._pending: Dict[str, dict] = {}
        self._legs: List[Tuple[int, str]] = []
        self._edges: List[Edge] = []

    def _dart(self) -> int:
        d = self._next_dart
        self._next_dart += 1
        return d

    def crossing(self, label: str, kind: str, arms: Dict[str, int]) -> None:
        """kind: 'classical' with arms ua,ub,oa,ob (under in/out, over in/out)
        or 'virtual' with arms ua,ub,oa,ob (two strand passages)."""
        if set(arms) != {"ua", "ub", "oa", "ob"}:
            raise ValueError("crossing arms must be ua, ub, oa, ob")
        darts = {arm: self._dart() for arm in arms}
        self._pending[label] = {
            "type": "crossing",
            "kind": kind,
            "arms": arms,
            "darts": darts,
        }
        for arm, d in darts.items():
            self._arm_dart[(label, arm)] = d

    def vertex(self, label: str, arms: Dict[str, int]) -> None:
        if len(arms) != 3:
            raise ValueError("a vertex needs exactly three arms")
        darts = {arm: self._dart() for arm in arms}
        self._pending[label] = {"type": "vertex", "arms": arms, "darts": darts}
        for arm, d in darts.items():
            self._arm_dart[(label, arm)] = d

    def leg(self, label: str) -> None:
        d = self._dart()
        self._pending[label] = {"type": "leg", "darts": {"leg": d}}
        self._arm_dart[(label, "leg")] = d

    def edge(self, tail, head) -> None:
        """tail/head: leg label or (node label, arm label); oriented tail->head."""
        t = self._resolve(tail)
        h = self._resolve(head)
        self._edges.append(Edge(self._next_edge, (t, h), h))
        self._next_edge += 1

    def _resolve(self, endpoint) -> int:
        if isinstance(endpoint, str):
            return self._arm_dart[(endpoint, "leg")]
        label, arm = endpoint
        return self._arm_dart[(label, arm)]

    def build(self) -> Diagram:
        head_darts = {e.head for e in self._edges}
        all_edge_darts = {d for e in self._edges for d in e.darts}
        nodes: List[Node] = []
        for label, info in self._pending.items():
            nid = self._next_node
            self._next_node += 1
            if info["type"] == "leg":
                nodes.append(Node(nid, "LEG", (info["darts"]["leg"],)))
                continue
            arms = info["arms"]
            darts = info["darts"]
            for arm in darts.values():
                if arm not in all_edge_darts:
                    raise ValueError(f"{self.name}: node {label}: unwired arm")
            order = sorted(arms, key=lambda a: arms[a] % 360)
            if info["type"] == "vertex":
                incoming = [a for a in order if darts[a] in head_darts]
                if len(incoming) not in (1, 2):
                    raise ValueError(f"{self.name}: vertex {label} is a source/sink")
                if len(incoming) == 2:
                    kind = "VERTEX_TWO_IN_ONE_OUT"
                    start = next(a for a in order if darts[a] not in head_darts)
                else:
                    kind = "VERTEX_TWO_OUT_ONE_IN"
                    start = incoming[0]
            else:
                kind = None
                start = "ua"
                if darts["ua"] in head_darts:
                    pass
                else:
                    raise ValueError(
                        f"{self.name}: crossing {label}: arm 'ua' must be incoming"
                    )
            i0 = order.index(start)
            rot = tuple(darts[order[(i0 + k) % len(order)]] for k in range(len(order)))
            if info["type"] == "crossing":
                if info["kind"] == "virtual":
                    kind = "CROSSING_VIRTUAL"
                else:
                    # derive the sign: rays by rotation slot
                    idx = {d: i for i, d in enumerate(rot)}
                    d_under = _RAYS[idx[darts["ub"]]]
                    d_over = _RAYS[idx[darts["ob"]]]
                    kind = (
                        "CROSSING_POS"
                        if _cross(d_over, d_under) > 0
                        else "CROSSING_NEG"
                    )
                # the under/over strands must sit on opposite rotation slots
                idx = {d: i for i, d in enumerate(rot)}
                if (idx[darts["ua"]] + 2) % 4 != idx[darts["ub"]]:
                    raise ValueError(
                        f"{self.name}: crossing {label}: strands must use opposite slots"
                    )
            nodes.append(Node(nid, kind, rot))
        diagram = Diagram(self.name, nodes, self._edges)
        report = diagram.validate()
        if not report.ok:
            raise ValueError(f"{self.name}: " + "; ".join(report.problems))
        return diagram
