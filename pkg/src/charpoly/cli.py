"""Command-line front end: problem files, JSON reports, SVG plots.

A problem file declares a coefficient field, a variable frame split into
u- and y-variables, named generators, and optionally a linear form, a pair
weight and budget overrides:

    field Q                      # or: field F2 / field Fp 5
    vars u: u1 u2 ; y: y1 y2
    gen f1 = y1^2 + u1^3
    gen f2 = y2^3 + u2^7
    form L = (2/3, 3/7)
    pair b = 3/2
    budget max_events = 64

Exit codes: 0 success, 1 invalid input, 2 structured nontermination
(a budget ran out and the report says exactly where).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import re
import sys
import time
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .arith import Frame, PolyElement, field_from_spec, field_spec, parse_poly
from .errors import (BudgetExceededError, CharpolyError, DomainError,
                     InvalidInputError, NotDissolvableError)
from .forms import in_zero, poly_of_pair, poly_of_system
from .graded import (check_rid_eq_dir, check_standard_basis, directrix,
                     ridge)
from .polyhedra import LinearForm, lambda_measure
from .prep import Budget, prepare, vertex_normalize

COMMANDS = ("polyhedron", "pair-polyhedron", "normalize", "prepare",
            "directrix", "ridge", "check-condition", "check-std-basis",
            "measure")

_IDENT = re.compile(r"[A-Za-z_][A-Za-z_0-9]*\Z")
_BUDGET_KEYS = ("max_events", "normalize_steps", "dissolve_degree",
                "dissolve")


# ---------------------------------------------------------------------------
# problem files
# ---------------------------------------------------------------------------

@dataclass
class ProblemFile:
    frame: Frame
    generators: list          # [(name, PolyElement)]
    form: LinearForm = None
    form_name: str = None
    pair: Fraction = None
    pair_name: str = None
    budgets: dict = dc_field(default_factory=dict)

    @property
    def system(self):
        return [g for _, g in self.generators]


def _syntax(line_no, col, message):
    return InvalidInputError(f"line {line_no}, column {col}: {message}")


def _parse_rational(text, line_no, col):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise _syntax(line_no, col, f"not a rational number: {text!r}")


def _split_idents(text, line_no, col):
    names = [t for t in re.split(r"[,\s]+", text.strip()) if t]
    for name in names:
        if not _IDENT.match(name):
            raise _syntax(line_no, col, f"bad identifier {name!r}")
    return names


def parse_problem(text: str) -> ProblemFile:
    field = None
    frame = None
    raw_u = raw_y = None
    generators = []
    names_seen = set()
    form = form_name = None
    pair = pair_name = None
    budgets = {}

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        col = len(line) - len(line.lstrip()) + 1
        stripped = line.strip()
        word = stripped.split(None, 1)[0]
        rest = stripped[len(word):].strip()

        if word == "field":
            if field is not None:
                raise _syntax(line_no, col, "duplicate field declaration")
            spec = rest.replace(" ", "")
            if spec.lower().startswith("fp"):
                spec = "F" + spec[2:]
            try:
                field = field_from_spec(spec)
            except InvalidInputError as exc:
                raise _syntax(line_no, col, str(exc))
        elif word == "vars":
            if raw_u is not None:
                raise _syntax(line_no, col, "duplicate vars declaration")
            m = re.match(r"u\s*:\s*(.*?)\s*;\s*y\s*:\s*(.*)\Z", rest)
            if not m:
                raise _syntax(line_no, col,
                              "expected `vars u: <ids> ; y: <ids>`")
            raw_u = _split_idents(m.group(1), line_no, col)
            raw_y = _split_idents(m.group(2), line_no, col)
            for name in raw_u + raw_y:
                if name in names_seen:
                    raise _syntax(line_no, col, f"duplicate name {name!r}")
                names_seen.add(name)
        elif word == "gen":
            if field is None or raw_u is None:
                raise _syntax(line_no, col,
                              "field and vars must come before generators")
            if frame is None:
                frame = Frame(raw_u, raw_y, field)
            m = re.match(r"([A-Za-z_][A-Za-z_0-9]*)\s*=\s*(.*)\Z", rest)
            if not m:
                raise _syntax(line_no, col, "expected `gen <name> = <expr>`")
            name, expr = m.group(1), m.group(2)
            if name in names_seen:
                raise _syntax(line_no, col, f"duplicate name {name!r}")
            names_seen.add(name)
            try:
                poly = parse_poly(frame, expr)
            except InvalidInputError as exc:
                raise _syntax(line_no, col, str(exc))
            generators.append((name, poly))
        elif word == "form":
            if form is not None:
                raise _syntax(line_no, col, "duplicate form declaration")
            if raw_u is None:
                raise _syntax(line_no, col, "vars must come before form")
            m = re.match(r"([A-Za-z_][A-Za-z_0-9]*)\s*=\s*\((.*)\)\s*\Z", rest)
            if not m:
                raise _syntax(line_no, col,
                              "expected `form <name> = (a1, ..., ae)`")
            form_name = m.group(1)
            entries = [t.strip() for t in m.group(2).split(",")]
            coeffs = [_parse_rational(t, line_no, col) for t in entries]
            if len(coeffs) != len(raw_u):
                raise _syntax(line_no, col,
                              f"form needs {len(raw_u)} entries")
            try:
                form = LinearForm(coeffs)
            except InvalidInputError as exc:
                raise _syntax(line_no, col, str(exc))
        elif word == "pair":
            if pair is not None:
                raise _syntax(line_no, col, "duplicate pair declaration")
            m = re.match(r"([A-Za-z_][A-Za-z_0-9]*)\s*=\s*(\S+)\s*\Z", rest)
            if not m:
                raise _syntax(line_no, col, "expected `pair <name> = <q>`")
            pair_name = m.group(1)
            pair = _parse_rational(m.group(2), line_no, col)
        elif word == "budget":
            m = re.match(r"([A-Za-z_][A-Za-z_0-9]*)\s*=\s*(\S+)\s*\Z", rest)
            if not m:
                raise _syntax(line_no, col, "expected `budget <key> = <int>`")
            key, value = m.group(1), m.group(2)
            if key not in _BUDGET_KEYS:
                raise _syntax(line_no, col, f"unknown budget key {key!r}")
            budgets[key] = _parse_budget_value(key, value, line_no, col)
        else:
            raise _syntax(line_no, col, f"unknown directive {word!r}")

    if not generators:
        raise InvalidInputError("no generators")
    if field is None:
        raise InvalidInputError("missing field declaration")
    if raw_u is None:
        raise InvalidInputError("missing vars declaration")
    if frame is None:
        frame = Frame(raw_u, raw_y, field)
    return ProblemFile(frame, generators, form, form_name, pair, pair_name,
                       budgets)


def _parse_budget_value(key, value, line_no=0, col=0):
    if key == "dissolve":
        if value.lower() in ("1", "true", "yes", "on"):
            return True
        if value.lower() in ("0", "false", "no", "off"):
            return False
        raise _syntax(line_no, col, f"budget dissolve must be 0/1, got {value!r}")
    try:
        return int(value)
    except ValueError:
        raise _syntax(line_no, col, f"budget {key} must be an integer")


def print_problem(problem: ProblemFile) -> str:
    """Canonical text form; parsing it back yields an identical problem."""
    frame = problem.frame
    lines = [f"field {field_spec(frame.field)}",
             "vars u: " + " ".join(frame.u_names)
             + " ; y: " + " ".join(frame.y_names)]
    for name, poly in problem.generators:
        lines.append(f"gen {name} = {poly}")
    if problem.form is not None:
        coeffs = ", ".join(str(c) for c in problem.form.coeffs)
        lines.append(f"form {problem.form_name or 'L'} = ({coeffs})")
    if problem.pair is not None:
        lines.append(f"pair {problem.pair_name or 'b'} = {problem.pair}")
    for key in _BUDGET_KEYS:
        if key in problem.budgets:
            value = problem.budgets[key]
            lines.append(f"budget {key} = {int(value)}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# serialization helpers
# ---------------------------------------------------------------------------

def _point_str(p):
    return ",".join(str(Fraction(c)) for c in p)


def _plain(x):
    """JSON-safe copy: exact rationals become strings, never floats."""
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, PolyElement):
        return str(x)
    if isinstance(x, LinearForm):
        return _point_str(x.coeffs)
    if isinstance(x, dict):
        out = {}
        for k, v in x.items():
            if isinstance(k, tuple):
                k = ",".join(str(t) for t in k)
            out[str(k)] = _plain(v)
        return out
    if isinstance(x, (list, tuple)):
        if x and all(isinstance(c, (int, Fraction)) for c in x):
            return _point_str(x)
        return [_plain(v) for v in x]
    return x


def _poly_payload(poly):
    if poly.is_empty:
        return {"empty": True, "vertices": [], "facets": []}
    return {"empty": False,
            "vertices": [_point_str(v) for v in poly.vertices],
            "extreme-vertices": [_point_str(v)
                                 for v in poly.extreme_vertices],
            "facets": [_point_str(L.coeffs) for L in poly.facets]}


def _new_variable_name(name, taken):
    candidate = "z" + name[1:] if name.startswith("y") else name + "'"
    while candidate in taken:
        candidate += "'"
    return candidate


def _substitution_strings(state):
    frame = state.frame
    taken = set(frame.u_names) | set(frame.y_names)
    out = []
    for name, shift in zip(frame.y_names, state.shifts):
        if shift.is_zero:
            continue
        new = _new_variable_name(name, taken)
        out.append(f"{new} = {name} + {shift}")
    return out


def _state_payload(state):
    payload = {"status": state.status,
               "generators": [str(g) for g in state.gens],
               "substitutions": _substitution_strings(state),
               "polyhedron": _poly_payload(state.polyhedron),
               "events": _plain(list(state.events))}
    if state.cycle is not None:
        payload["cycle"] = [_point_str(v) for v in state.cycle]
    if state.witness is not None:
        payload["witness"] = _point_str(state.witness)
    if state.lambda_value is not None:
        payload["lambda"] = str(state.lambda_value)
    if state.lambda_trace:
        payload["lambda-trace"] = [str(t) for t in state.lambda_trace]
    return payload


# ---------------------------------------------------------------------------
# budgets
# ---------------------------------------------------------------------------

def _merge_budgets(problem_budgets, flag_items):
    merged = {}
    env = os.environ.get("CHARPOLY_BUDGET_DEFAULTS", "")
    for chunk in env.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        if "=" not in chunk:
            raise InvalidInputError(
                f"CHARPOLY_BUDGET_DEFAULTS entry {chunk!r} is not k=v")
        key, value = chunk.split("=", 1)
        key = key.strip()
        if key not in _BUDGET_KEYS:
            raise InvalidInputError(f"unknown budget key {key!r}")
        merged[key] = _parse_budget_value(key, value.strip())
    merged.update(problem_budgets)
    for item in flag_items:
        if "=" not in item:
            raise InvalidInputError(f"--budget expects k=v, got {item!r}")
        key, value = item.split("=", 1)
        if key not in _BUDGET_KEYS:
            raise InvalidInputError(f"unknown budget key {key!r}")
        merged[key] = _parse_budget_value(key, value)
    budget = Budget()
    for key, value in merged.items():
        setattr(budget, key, value)
    budget.validate()
    return budget


# ---------------------------------------------------------------------------
# SVG plotting (e = 2 only)
# ---------------------------------------------------------------------------

def _svg_for_polyhedron(poly):
    W = H = 600
    M = 40
    verts = [] if poly.is_empty else list(poly.vertices)
    facets = [] if poly.is_empty else list(poly.facets)
    top = max([c for v in verts for c in v] + [Fraction(1)])
    span = int(math.ceil(top)) + 1

    def px(x):
        return M + float(Fraction(x)) * (W - 2 * M) / span

    def py(y):
        return H - M - float(Fraction(y)) * (H - 2 * M) / span

    def pt(x, y):
        return f"{px(x):.2f},{py(y):.2f}"

    parts = ['<?xml version="1.0" encoding="UTF-8"?>',
             f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
             f'width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
             f'<rect width="{W}" height="{H}" fill="white"/>']

    if verts:
        chain = sorted(verts, key=lambda v: (v[0], -v[1]))
        corner = [(chain[0][0], span)] + chain + [(span, chain[-1][1]),
                                                  (span, span)]
        points = " ".join(pt(x, y) for x, y in corner)
        parts.append(f'<polygon points="{points}" fill="#dce9f9" '
                     'stroke="none"/>')

    # axes and integer ticks
    parts.append(f'<line x1="{px(0):.2f}" y1="{py(0):.2f}" '
                 f'x2="{px(span):.2f}" y2="{py(0):.2f}" stroke="black"/>')
    parts.append(f'<line x1="{px(0):.2f}" y1="{py(0):.2f}" '
                 f'x2="{px(0):.2f}" y2="{py(span):.2f}" stroke="black"/>')
    for t in range(span + 1):
        parts.append(f'<line x1="{px(t):.2f}" y1="{py(0) - 4:.2f}" '
                     f'x2="{px(t):.2f}" y2="{py(0) + 4:.2f}" stroke="black"/>')
        parts.append(f'<text x="{px(t):.2f}" y="{py(0) + 18:.2f}" '
                     f'font-size="11" text-anchor="middle">{t}</text>')
        parts.append(f'<line x1="{px(0) - 4:.2f}" y1="{py(t):.2f}" '
                     f'x2="{px(0) + 4:.2f}" y2="{py(t):.2f}" stroke="black"/>')
        parts.append(f'<text x="{px(0) - 8:.2f}" y="{py(t) + 4:.2f}" '
                     f'font-size="11" text-anchor="end">{t}</text>')

    for L in facets:
        a1, a2 = L.coeffs
        hits = []
        if a2 > 0:
            y0 = Fraction(1) / a2
            if 0 <= y0 <= span:
                hits.append((Fraction(0), y0))
            ys = (1 - a1 * span) / a2
            if 0 <= ys <= span:
                hits.append((Fraction(span), ys))
        if a1 > 0:
            x0 = Fraction(1) / a1
            if 0 <= x0 <= span:
                hits.append((x0, Fraction(0)))
            xs = (1 - a2 * span) / a1
            if 0 <= xs <= span:
                hits.append((xs, Fraction(span)))
        hits = sorted(set(hits))
        if len(hits) >= 2:
            (x1, y1), (x2, y2) = hits[0], hits[-1]
            parts.append(f'<line x1="{px(x1):.2f}" y1="{py(y1):.2f}" '
                         f'x2="{px(x2):.2f}" y2="{py(y2):.2f}" '
                         'stroke="#b03030" stroke-dasharray="6 3"/>')

    for v in verts:
        parts.append(f'<circle cx="{px(v[0]):.2f}" cy="{py(v[1]):.2f}" '
                     'r="4" fill="#1f4e9c"/>')
        parts.append(f'<text x="{px(v[0]) + 7:.2f}" y="{py(v[1]) - 7:.2f}" '
                     f'font-size="12">({_point_str(v)})</text>')
    if not verts:
        parts.append(f'<text x="{W / 2:.2f}" y="{H / 2:.2f}" font-size="16" '
                     'text-anchor="middle">empty polyhedron</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


# ---------------------------------------------------------------------------
# command dispatch
# ---------------------------------------------------------------------------

def run(command, problem: ProblemFile, budget: Budget):
    """Dispatch a command; returns (payload, exit_code, plot_polyhedron)."""
    system = problem.system
    if command == "polyhedron":
        poly = poly_of_system(system)
        return _poly_payload(poly), 0, poly
    if command == "pair-polyhedron":
        if problem.pair is None:
            raise InvalidInputError(
                "pair-polyhedron needs a `pair b = <q>` line")
        poly = poly_of_pair(system, problem.pair)
        payload = _poly_payload(poly)
        payload["b"] = str(problem.pair)
        return payload, 0, poly
    if command == "normalize":
        try:
            state = vertex_normalize(system, budget)
        except BudgetExceededError as exc:
            return ({"status": "budget-exhausted",
                     "events": _plain(list(exc.events)),
                     "message": str(exc)}, 2, None)
        return _state_payload(state), 0, state.polyhedron
    if command == "prepare":
        state = prepare(system, budget)
        code = 2 if state.status == "budget-exhausted" else 0
        return _state_payload(state), code, state.polyhedron
    if command == "directrix":
        result = directrix([in_zero(g) for g in system])
        return ({"dimension": result.r_min,
                 "forms": [str(f) for f in result.linear_forms]}, 0, None)
    if command == "ridge":
        result = ridge([in_zero(g) for g in system])
        return ({"count": result.d,
                 "generators": [str(g) for g in result.additive_gens]},
                0, None)
    if command == "check-condition":
        report = check_rid_eq_dir([in_zero(g) for g in system])
        return ({"status": report.status,
                 "witness": str(report.witness) if report.witness else None},
                0, None)
    if command == "check-std-basis":
        report = check_standard_basis(system, problem.form)
        return ({"ok": report.ok,
                 "reference-form": _point_str(report.reference_form.coeffs),
                 "violations": [[kind, idx] for kind, idx
                                in report.violations],
                 "condition1": report.condition1,
                 "orders": list(report.orders),
                 "exponents": [",".join(str(b) for b in e)
                               for e in report.exponents]}, 0, None)
    if command == "measure":
        initial = poly_of_system(system)
        state = prepare(system, budget)
        final = state.polyhedron
        payload = {"status": state.status,
                   "initial": _poly_payload(initial),
                   "final": _poly_payload(final)}
        if final.is_empty:
            raise DomainError(
                "prepared polyhedron is empty; the measure is undefined")
        payload["measure"] = str(lambda_measure(final, initial))
        code = 2 if state.status == "budget-exhausted" else 0
        return payload, code, final
    raise InvalidInputError(f"unknown command {command!r}")


def _run_file(command, path, text, budget_flags, svg_path, as_json):
    started = time.perf_counter()
    problem = parse_problem(text)
    budget = _merge_budgets(problem.budgets, budget_flags)
    payload, code, poly = run(command, problem, budget)
    elapsed = time.perf_counter() - started
    report = {"command": command,
              "input": {"digest": hashlib.sha256(text.encode()).hexdigest(),
                        "path": path},
              "result": payload,
              "timing": {"seconds": elapsed}}
    if svg_path is not None and poly is not None:
        if problem.frame.e == 2:
            with open(svg_path, "w", encoding="utf-8") as fh:
                fh.write(_svg_for_polyhedron(poly))
        else:
            report["result"]["svg-note"] = "svg output needs e = 2"
    return report, code


def _render_human(report):
    lines = [f"command: {report['command']}"]
    result = report["result"]

    def walk(prefix, value):
        if isinstance(value, dict):
            for k in value:
                walk(f"{prefix}{k}.", value[k])
        elif isinstance(value, list):
            if all(not isinstance(v, (dict, list)) for v in value):
                lines.append(f"{prefix[:-1]}: "
                             + (", ".join(str(v) for v in value) or "(none)"))
            else:
                for i, v in enumerate(value):
                    walk(f"{prefix}{i}.", v)
        else:
            lines.append(f"{prefix[:-1]}: {value}")

    walk("", result)
    return "\n".join(lines)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="charpoly",
        description="characteristic polyhedra of marked polynomial ideals")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("file", nargs="?",
                        help="problem file (omit with --batch)")
    parser.add_argument("--json", action="store_true",
                        help="emit a RunReport as JSON")
    parser.add_argument("--svg", metavar="PATH",
                        help="write a 2-D plot of the result polyhedron")
    parser.add_argument("--budget", action="append", default=[],
                        metavar="K=V", help="override one budget entry")
    parser.add_argument("--batch", metavar="DIR",
                        help="run the command on every .cpoly file in DIR")
    args = parser.parse_args(argv)

    try:
        if args.batch:
            if args.file:
                raise InvalidInputError("give either a file or --batch")
            if args.svg:
                raise InvalidInputError("--svg needs a single input file")
            paths = sorted(
                os.path.join(args.batch, name)
                for name in os.listdir(args.batch)
                if name.endswith(".cpoly"))
            if not paths:
                raise InvalidInputError(f"no .cpoly files in {args.batch!r}")
            reports = []
            worst = 0
            for path in paths:
                with open(path, encoding="utf-8") as fh:
                    text = fh.read()
                report, code = _run_file(args.command, path, text,
                                         args.budget, None, args.json)
                reports.append(report)
                worst = max(worst, code)
            if args.json:
                print(json.dumps(reports, indent=2))
            else:
                for report in reports:
                    print(f"== {report['input']['path']} ==")
                    print(_render_human(report))
            return worst
        if not args.file:
            raise InvalidInputError("missing problem file")
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
        report, code = _run_file(args.command, args.file, text,
                                 args.budget, args.svg, args.json)
        if args.json:
            print(json.dumps(report, indent=2))
        else:
            print(_render_human(report))
        return code
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except BudgetExceededError as exc:
        print(f"nontermination: {exc}", file=sys.stderr)
        return 2
    except NotDissolvableError as exc:
        print(f"not dissolvable: {exc}", file=sys.stderr)
        return 1
    except (InvalidInputError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
