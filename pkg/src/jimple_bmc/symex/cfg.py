"""Control-flow analysis and bounded unrolling of GOTO function bodies.

Unrolling turns a (reducible) body into an acyclic instruction list:
every natural-loop back edge may be taken at most ``k`` times per path,
and where iteration ``k+1`` would begin we plant a cut: an unwinding
obligation followed by ``ASSUME false``.  Downstream symbolic execution
then needs only a single forward pass, because every jump in the result
goes forward.

The same machinery builds the k-induction step body: loop-modified
variables are havocked at loop entry, assertions inside the first ``k``
iterations turn into assumptions, and iteration ``k+1`` keeps its
assertions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..goto import ir as g
from ..source import SourcePos


class IrreducibleError(Exception):
    """A retreating edge that is not a natural back edge was found."""


class StepUnsupportedError(Exception):
    """The k-induction step transform cannot handle this function."""


# ---------------------------------------------------------------------------
# CFG + natural loops


def _successors_table(fn: g.GotoFunction) -> list[list[int]]:
    labels = fn.label_index()
    n = len(fn.body)
    out: list[list[int]] = []
    for i, ins in enumerate(fn.body):
        if isinstance(ins, g.GotoI):
            out.append([labels[ins.label]])
        elif isinstance(ins, g.IfI):
            # Fall-through first: layout prefers the straight path.
            out.append([i + 1, labels[ins.label]])
        elif isinstance(ins, (g.ReturnI, g.ThrowI, g.EndFunction)):
            out.append([])
        else:
            out.append([i + 1] if i + 1 < n else [])
    return out


def _reachable(succ: list[list[int]], entry: int = 0) -> set[int]:
    seen = {entry}
    stack = [entry]
    while stack:
        u = stack.pop()
        for v in succ[u]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return seen


def _dominators(succ: list[list[int]], reach: set[int], entry: int = 0) -> dict[int, set[int]]:
    preds: dict[int, list[int]] = {v: [] for v in reach}
    for u in reach:
        for v in succ[u]:
            if v in reach:
                preds[v].append(u)
    dom: dict[int, set[int]] = {v: set(reach) for v in reach}
    dom[entry] = {entry}
    changed = True
    order = sorted(reach)
    while changed:
        changed = False
        for v in order:
            if v == entry:
                continue
            ps = [dom[p] for p in preds[v]]
            new = set.intersection(*ps) | {v} if ps else {v}
            if new != dom[v]:
                dom[v] = new
                changed = True
    return dom


@dataclass
class Loop:
    header: int
    back_sources: set[int]
    members: set[int]


def find_loops(fn: g.GotoFunction) -> list[Loop]:
    """Natural loops of the body; raises IrreducibleError otherwise."""
    succ = _successors_table(fn)
    reach = _reachable(succ)
    dom = _dominators(succ, reach)
    retreating: list[tuple[int, int]] = []
    # DFS edge classification.
    state: dict[int, int] = {}  # 0 in-progress, 1 done

    def dfs(u: int) -> None:
        state[u] = 0
        for v in succ[u]:
            if v not in reach:
                continue
            if v not in state:
                dfs(v)
            elif state[v] == 0:
                retreating.append((u, v))
        state[u] = 1

    import sys

    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, len(fn.body) * 2 + 100))
    try:
        dfs(0)
    finally:
        sys.setrecursionlimit(old)

    preds: dict[int, list[int]] = {v: [] for v in reach}
    for u in reach:
        for v in succ[u]:
            if v in reach:
                preds[v].append(u)
    by_header: dict[int, Loop] = {}
    for u, h in retreating:
        if h not in dom[u]:
            raise IrreducibleError(
                f"irreducible control flow in {fn.name}: jump from {u} to {h}"
            )
        loop = by_header.setdefault(h, Loop(h, set(), {h}))
        loop.back_sources.add(u)
        # Everything that reaches u backwards without passing h is a member.
        work = [u]
        while work:
            x = work.pop()
            if x in loop.members:
                continue
            loop.members.add(x)
            work.extend(p for p in preds[x] if p != h)
    return list(by_header.values())


# ---------------------------------------------------------------------------
# Unrolling


@dataclass
class UnrolledInstr:
    instr: g.Instr
    orig_index: int  # -1 for synthesized instructions (cuts, havocs)


@dataclass
class UnrolledBody:
    instrs: list[UnrolledInstr]
    label_map: dict[str, int] = field(default_factory=dict)  # fresh label -> index


@dataclass(frozen=True)
class _Node:
    pc: int
    ctx: tuple[tuple[int, int], ...]  # (header, iteration) outermost-first


_CUT = "cut"


def unroll_function(
    fn: g.GotoFunction,
    k: int,
    step_mode: bool = False,
    havoc_env: dict[str, g.GotoType] | None = None,
) -> UnrolledBody:
    """Acyclic unrolling with back edges taken at most ``k`` times.

    In step mode: loop-modified scalars are havocked at loop entries,
    asserts in iterations 1..k become assumes, and back-edge cuts are
    plain ``ASSUME false`` (unwinding is not an obligation of the step).
    """
    if k < 1:
        raise ValueError("unwind bound must be >= 1")
    succ = _successors_table(fn)
    loops = find_loops(fn)
    header_of: dict[int, Loop] = {l.header: l for l in loops}
    loops_of: dict[int, list[int]] = {}  # node -> headers containing it, outer first
    for i in range(len(fn.body)):
        containing = [l.header for l in loops if i in l.members]
        containing.sort(key=lambda h: len(header_of[h].members), reverse=True)
        loops_of[i] = containing
    back_edges = {(u, l.header) for l in loops for u in l.back_sources}

    modified: dict[int, list[str]] = {}
    if step_mode:
        for l in loops:
            modified[l.header] = _loop_modified_vars(fn, l, havoc_env or {})

    def transition(node: _Node, s: int) -> _Node | str:
        ctx = dict(node.ctx)
        new_ctx: list[tuple[int, int]] = []
        for h in loops_of[s]:
            if (node.pc, s) in back_edges and h == s:
                it = ctx.get(h, 0) + 1
                if it > (k + 1 if step_mode else k):
                    return _CUT
                new_ctx.append((h, it))
            elif h in ctx:
                new_ctx.append((h, ctx[h]))
            elif h == s:
                new_ctx.append((h, 1))
            else:
                raise IrreducibleError(
                    f"{fn.name}: entry into loop {h} bypassing its header"
                )
        return _Node(s, tuple(new_ctx))

    # Depth-first layout over the unfolded DAG, fall-through edge first.
    order: list[_Node] = []
    seen: set[_Node] = set()

    entry = transition(_Node(-1, ()), 0) if 0 in loops_of and loops_of[0] else _Node(0, ())
    if isinstance(entry, str):
        raise IrreducibleError("entry cannot be a cut")

    stack: list[tuple[_Node, bool]] = [(entry, False)]
    post: list[_Node] = []
    while stack:
        node, processed = stack.pop()
        if processed:
            post.append(node)
            continue
        if node in seen:
            continue
        seen.add(node)
        stack.append((node, True))
        targets = []
        for s in succ[node.pc]:
            t = transition(node, s)
            if isinstance(t, _Node):
                targets.append(t)
        # Reverse so the fall-through (first successor) is explored first.
        for t in reversed(targets):
            if t not in seen:
                stack.append((t, False))
    order = list(reversed(post))
    index_of = {node: i for i, node in enumerate(order)}

    out = UnrolledBody(instrs=[])
    labels: dict[_Node, str] = {}
    fresh = [0]

    def label_for(node: _Node) -> str:
        if node not in labels:
            fresh[0] += 1
            labels[node] = f"#L{fresh[0]}"
        return labels[node]

    pending_labels: dict[_Node, str] = {}

    def emit(ins: g.Instr, orig: int) -> None:
        out.instrs.append(UnrolledInstr(ins, orig))

    def emit_cut(node: _Node, pos: SourcePos) -> None:
        if not step_mode:
            loop_pos = fn.body[_innermost_header(node)].pos if node.ctx else pos
            emit(
                g.AssertI(
                    g.Constant(0, g.BOOL_T),
                    g.PropertyClass.UNWINDING,
                    f"unwinding bound {k} exceeded",
                    pos=loop_pos,
                ),
                -1,
            )
        emit(g.AssumeI(g.Constant(0, g.BOOL_T), pos=pos), -1)

    def _innermost_header(node: _Node) -> int:
        return node.ctx[-1][0] if node.ctx else node.pc

    def emit_havoc(header: int, pos: SourcePos) -> None:
        env = havoc_env or {}
        for name in modified.get(header, []):
            t = env[name]
            emit(g.Assign(g.Symbol(name, t), g.Nondet(t), pos=pos), -1)

    for li, node in enumerate(order):
        # Label this point if anyone jumps here.
        if node in labels:
            emit(g.LabelI(labels[node], pos=fn.body[node.pc].pos), -1)
            out.label_map[labels[node]] = len(out.instrs) - 1
        ins = fn.body[node.pc]
        pos = ins.pos
        nxt = order[li + 1] if li + 1 < len(order) else None

        def goto_or_fall(target: _Node | str) -> None:
            if target == _CUT:
                emit_cut(node, pos)
                return
            assert isinstance(target, _Node)
            _maybe_havoc_edge(node, target)
            if nxt == target:
                return
            emit(g.GotoI(label_for(target), pos=pos), -1)

        def _maybe_havoc_edge(src: _Node, dst: _Node) -> None:
            if step_mode and _enters_loop(src, dst):
                emit_havoc(dst.pc, pos)

        if isinstance(ins, g.GotoI):
            goto_or_fall(transition(node, succ[node.pc][0]))
        elif isinstance(ins, g.IfI):
            fall_s, target_s = succ[node.pc][0], succ[node.pc][1]
            tgt = transition(node, target_s)
            fall = transition(node, fall_s)
            if tgt == _CUT:
                # Taking the branch would start iteration k+1.
                fresh[0] += 1
                skip = f"#L{fresh[0]}"
                emit(g.IfI(g.Unary("not", ins.cond), skip, pos=pos), node.pc)
                emit_cut(node, pos)
                emit(g.LabelI(skip, pos=pos), -1)
                out.label_map[skip] = len(out.instrs) - 1
                goto_or_fall(fall)
            else:
                assert isinstance(tgt, _Node)
                if step_mode and _enters_loop(node, tgt):
                    # Route the branch through a trampoline that havocs the
                    # loop state before entering the header.
                    fresh[0] += 1
                    tramp = f"#L{fresh[0]}"
                    fresh[0] += 1
                    skip = f"#L{fresh[0]}"
                    emit(g.IfI(ins.cond, tramp, pos=pos), node.pc)
                    emit(g.GotoI(skip, pos=pos), -1)
                    emit(g.LabelI(tramp, pos=pos), -1)
                    out.label_map[tramp] = len(out.instrs) - 1
                    emit_havoc(tgt.pc, pos)
                    emit(g.GotoI(label_for(tgt), pos=pos), -1)
                    emit(g.LabelI(skip, pos=pos), -1)
                    out.label_map[skip] = len(out.instrs) - 1
                    goto_or_fall(fall)
                else:
                    emit(g.IfI(ins.cond, label_for(tgt), pos=pos), node.pc)
                    goto_or_fall(fall)
        elif isinstance(ins, (g.ReturnI, g.ThrowI)):
            emit(ins, node.pc)
        elif isinstance(ins, g.EndFunction):
            emit(ins, node.pc)
        elif isinstance(ins, g.LabelI):
            if succ[node.pc]:
                goto_or_fall(transition(node, succ[node.pc][0]))
        else:
            out_ins = ins
            if step_mode and isinstance(ins, g.AssertI) and node.ctx:
                h, it = node.ctx[-1]
                if it <= k:
                    out_ins = g.AssumeI(ins.cond, pos=ins.pos)
            emit(out_ins, node.pc)
            if succ[node.pc]:
                goto_or_fall(transition(node, succ[node.pc][0]))
    return out


def _enters_loop(src: "_Node", dst: "_Node") -> bool:
    """Does the edge src->dst enter a loop fresh through its header?"""
    src_headers = {h for h, _ in src.ctx}
    return any(it == 1 and h == dst.pc and h not in src_headers for h, it in dst.ctx)


def _loop_modified_vars(fn: g.GotoFunction, loop: Loop, env: dict[str, g.GotoType]) -> list[str]:
    """Scalar symbols assigned inside the loop body.

    Heap writes and function calls inside the loop make the step transform
    unsound for this simple havoc rule, so they are rejected.
    """
    names: list[str] = []
    for i in sorted(loop.members):
        ins = fn.body[i]
        if isinstance(ins, g.Call):
            raise StepUnsupportedError(f"{fn.name}: call inside loop body")
        if isinstance(ins, g.Assign):
            if isinstance(ins.target, g.Symbol):
                if ins.target.name not in names:
                    if ins.target.name not in env:
                        raise StepUnsupportedError(
                            f"{fn.name}: cannot type loop variable {ins.target.name}"
                        )
                    names.append(ins.target.name)
            else:
                raise StepUnsupportedError(f"{fn.name}: heap write inside loop body")
    return names


def check_step_supported(fn: g.GotoFunction, env: dict[str, g.GotoType]) -> None:
    """Raises StepUnsupportedError for nested loops or unhavocable loops."""
    loops = find_loops(fn)
    for a in loops:
        for b in loops:
            if a is not b and a.header in b.members:
                raise StepUnsupportedError(f"{fn.name}: nested loops")
    for l in loops:
        _loop_modified_vars(fn, l, env)
