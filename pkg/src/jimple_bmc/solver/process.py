"""External SMT solver process driver.

Protocol: the whole SMT-LIB2 script is written to the solver's standard
input in one shot and the answer (``sat``/``unsat``/``unknown`` plus a
``get-model`` dump) is parsed from standard output.  No incremental
interaction.

Solver discovery order: explicit path, the ``JIMPLE_BMC_SOLVER``
environment variable (a full command line), a ``z3`` binary on PATH,
finally the bundled Node shim around the z3 WASM build.  Discovery
failures raise at configuration time, never mid-run.
"""

from __future__ import annotations

import os
import shlex
import shutil
import subprocess
from dataclasses import dataclass, field
from pathlib import Path

from .formula import Formula, Model, complete_model
from .smtlib import emit_smtlib2
from .terms import ArrayVal, Value

ENV_SOLVER = "JIMPLE_BMC_SOLVER"


class SolverConfigError(Exception):
    """No usable solver process could be configured."""


class SolverOutputError(Exception):
    """The solver produced output we could not interpret."""


@dataclass
class SolverCommand:
    argv: list[str]
    extra_env: dict[str, str] = field(default_factory=dict)

    def describe(self) -> str:
        return " ".join(self.argv)


@dataclass
class SolverResult:
    status: str  # sat | unsat | unknown
    model: Model | None = None
    reason: str = ""


_node_shim_cache: SolverCommand | None = None


def _node_shim() -> SolverCommand | None:
    global _node_shim_cache
    if _node_shim_cache is not None:
        return _node_shim_cache
    node = shutil.which("node")
    if node is None:
        return None
    shim = Path(__file__).with_name("z3smt2.js")
    if not shim.exists():
        return None
    probe = subprocess.run(
        [node, "-e", "require.resolve('z3-solver')"], capture_output=True, text=True
    )
    env: dict[str, str] = {}
    if probe.returncode != 0:
        npm = shutil.which("npm")
        if npm is None:
            return None
        root = subprocess.run([npm, "root", "-g"], capture_output=True, text=True)
        if root.returncode != 0:
            return None
        env = {"NODE_PATH": root.stdout.strip()}
        recheck = subprocess.run(
            [node, "-e", "require.resolve('z3-solver')"],
            capture_output=True,
            text=True,
            env={**os.environ, **env},
        )
        if recheck.returncode != 0:
            return None
    _node_shim_cache = SolverCommand([node, str(shim)], env)
    return _node_shim_cache


def resolve_solver(path: str | None = None) -> SolverCommand:
    """Pick the solver command; raises SolverConfigError when none works."""
    if path:
        exe = shutil.which(path) or (path if os.path.exists(path) else None)
        if exe is None:
            raise SolverConfigError(f"solver binary not found: {path}")
        argv = [exe, "-in"] if "z3" in Path(exe).name else [exe]
        return SolverCommand(argv)
    env_cmd = os.environ.get(ENV_SOLVER)
    if env_cmd:
        argv = shlex.split(env_cmd)
        if not argv or shutil.which(argv[0]) is None and not os.path.exists(argv[0]):
            raise SolverConfigError(f"{ENV_SOLVER} points at a missing binary: {env_cmd}")
        return SolverCommand(argv)
    z3 = shutil.which("z3")
    if z3 is not None:
        return SolverCommand([z3, "-in"])
    shim = _node_shim()
    if shim is not None:
        return shim
    raise SolverConfigError(
        "no SMT solver available: install z3, set JIMPLE_BMC_SOLVER, or "
        "install the z3-solver npm package for the bundled Node shim"
    )


def solve(
    formula: Formula,
    command: SolverCommand | None = None,
    timeout: float = 60.0,
    dump_path: str | None = None,
) -> SolverResult:
    """Run one solver process over the formula and parse its verdict."""
    if command is None:
        command = resolve_solver()
    text = emit_smtlib2(formula, timeout_ms=int(timeout * 1000))
    if dump_path:
        Path(dump_path).write_text(text)
    env = {**os.environ, **command.extra_env} if command.extra_env else None
    try:
        proc = subprocess.run(
            command.argv,
            input=text.encode(),
            capture_output=True,
            timeout=timeout,
            env=env,
        )
    except subprocess.TimeoutExpired:
        return SolverResult("unknown", reason=f"solver timeout after {timeout}s")
    except OSError as exc:
        raise SolverConfigError(f"failed to run solver {command.describe()}: {exc}")
    out = proc.stdout.decode(errors="replace")
    err = proc.stderr.decode(errors="replace")
    try:
        items = _parse_sexprs(out)
    except SolverOutputError as exc:
        return SolverResult("unknown", reason=f"unparsable solver output: {exc}")
    status = next((i for i in items if i in ("sat", "unsat", "unknown")), None)
    if status is None:
        detail = (err or out).strip().splitlines()
        return SolverResult("unknown", reason=f"no verdict from solver: {detail[:3]}")
    if status == "unsat":
        return SolverResult("unsat")
    if status == "unknown":
        return SolverResult("unknown", reason="solver answered unknown")
    model = _parse_model(items, formula)
    return SolverResult("sat", model=model)


# ---------------------------------------------------------------------------
# Model parsing: s-expressions from get-model output


def _parse_sexprs(text: str) -> list:
    tokens = _tokenize(text)
    items = []
    pos = 0
    while pos < len(tokens):
        item, pos = _parse_one(tokens, pos)
        items.append(item)
    return items


def _tokenize(text: str) -> list[str]:
    tokens: list[str] = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c in "() \t\r\n":
            if c in "()":
                tokens.append(c)
            i += 1
        elif c == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif c == "|":
            j = text.find("|", i + 1)
            if j < 0:
                raise SolverOutputError("unterminated quoted symbol")
            tokens.append(text[i + 1 : j])
            i = j + 1
        elif c == '"':
            j = i + 1
            while j < n and text[j] != '"':
                j += 1
            tokens.append(text[i : j + 1])
            i = j + 1
        else:
            j = i
            while j < n and text[j] not in "() \t\r\n;|":
                j += 1
            tokens.append(text[i:j])
            i = j
    return tokens


def _parse_one(tokens: list[str], pos: int):
    tok = tokens[pos]
    if tok == "(":
        items = []
        pos += 1
        while pos < len(tokens) and tokens[pos] != ")":
            item, pos = _parse_one(tokens, pos)
            items.append(item)
        if pos >= len(tokens):
            raise SolverOutputError("unbalanced parentheses")
        return items, pos + 1
    if tok == ")":
        raise SolverOutputError("unexpected )")
    return tok, pos + 1


def _is_define_fun(item) -> bool:
    return isinstance(item, list) and len(item) >= 5 and item[0] == "define-fun"


def _parse_model(items: list, formula: Formula) -> Model:
    defs: list = []
    for item in items:
        if isinstance(item, list):
            if item and item[0] == "model":
                defs = item[1:]
                break
            if all(_is_define_fun(d) for d in item) and item:
                defs = item
                break
    consts: dict[str, tuple[list, object]] = {}
    funs: dict[str, tuple[str, object]] = {}
    for d in defs:
        if not _is_define_fun(d):
            continue
        _, name, params, _sort, body = d[0], d[1], d[2], d[3], d[4]
        if params:
            funs[name] = (params[0][0], body)
        else:
            consts[name] = ([], body)
    model = Model()
    for name, _ in consts.items():
        try:
            model.values[name] = _ground_value(consts[name][1], funs, {})
        except SolverOutputError:
            pass  # auxiliary solver-internal entries may be unparsable
    return complete_model(model, formula)


def _ground_value(expr, funs: dict, env: dict[str, Value]) -> Value:
    if isinstance(expr, str):
        if expr.startswith("#x"):
            return int(expr[2:], 16)
        if expr.startswith("#b"):
            return int(expr[2:], 2)
        if expr == "true":
            return 1
        if expr == "false":
            return 0
        if expr in env:
            return env[expr]
        if expr.isdigit():
            return int(expr)
        raise SolverOutputError(f"unexpected model atom {expr!r}")
    if not isinstance(expr, list) or not expr:
        raise SolverOutputError(f"unexpected model value {expr!r}")
    head = expr[0]
    if head == "_":
        if len(expr) == 3 and isinstance(expr[1], str) and expr[1].startswith("bv"):
            return int(expr[1][2:])
        if len(expr) == 3 and expr[1] == "as-array":
            fname = expr[2]
            if fname not in funs:
                raise SolverOutputError(f"as-array references unknown function {fname}")
            var, body = funs[fname]
            return _array_from_ite(body, var, funs)
    if isinstance(head, list) and len(head) == 3 and head[0] == "as" and head[1] == "const":
        return ArrayVal(int(_ground_value(expr[1], funs, env)))
    if head == "store":
        base = _ground_value(expr[1], funs, env)
        if not isinstance(base, ArrayVal):
            raise SolverOutputError("store base is not an array")
        idx = int(_ground_value(expr[2], funs, env))
        val = int(_ground_value(expr[3], funs, env))
        return base.set(idx, val)
    if head == "lambda":
        var = expr[1][0][0]
        return _array_from_ite(expr[2], var, funs)
    if head == "let":
        inner = dict(env)
        for name, bound in expr[1]:
            inner[name] = _ground_value(bound, funs, inner)
        return _ground_value(expr[2], funs, inner)
    if head == "ite":
        cond = expr[1]
        if isinstance(cond, list) and len(cond) == 3 and cond[0] == "=":
            a = _ground_value(cond[1], funs, env)
            b = _ground_value(cond[2], funs, env)
            return _ground_value(expr[2] if a == b else expr[3], funs, env)
    raise SolverOutputError(f"unsupported model value form {expr!r}")


def _array_from_ite(body, var: str, funs: dict) -> ArrayVal:
    entries: list[tuple[int, int]] = []
    node = body
    while isinstance(node, list) and node and node[0] == "ite":
        cond, then, node = node[1], node[2], node[3]
        if not (isinstance(cond, list) and len(cond) == 3 and cond[0] == "="):
            raise SolverOutputError(f"unsupported array condition {cond!r}")
        lhs, rhs = cond[1], cond[2]
        key_expr = rhs if lhs == var else lhs if rhs == var else None
        if key_expr is None:
            raise SolverOutputError(f"array condition does not test index var: {cond!r}")
        key = int(_ground_value(key_expr, funs, {}))
        entries.append((key, int(_ground_value(then, funs, {}))))
    default = int(_ground_value(node, funs, {}))
    # Earlier ite branches win; reversed so ArrayVal.get's last-wins matches.
    return ArrayVal(default, tuple(reversed([(k, v) for k, v in entries])))
